#![allow(dead_code)]

pub mod dixon;

use std::collections::HashMap;

use dlparam::{CharacterSheet, CycNum};

/// Compares the built-in `GL_2(F_p)` sheet with the brute-force table on
/// the regular elements of both tori. Rows are compared as a multiset of
/// `(degree, restricted values)`, which does not depend on how the oracle's
/// roots of unity are identified with complex ones.
pub fn sheet_matches_oracle(sheet: &CharacterSheet) -> Result<(), String> {
    let p = sheet.spec.q();
    let table = dixon::character_table(p);
    let field = dixon::Quadratic::new(p);
    let level = table.group.exponent;
    if table.rows.len() != sheet.rows.len() {
        return Err(format!(
            "{} oracle rows, {} sheet rows",
            table.rows.len(),
            sheet.rows.len()
        ));
    }
    let split: Vec<Vec<u64>> = sheet.rows[0].values[0].keys().cloned().collect();
    let ell: Vec<Vec<u64>> = sheet.rows[0].values[1].keys().cloned().collect();
    let points: Vec<usize> = split
        .iter()
        .map(|e| field.split(e[0], e[1]))
        .chain(ell.iter().map(|e| field.elliptic(e[0])))
        .map(|m| table.group.index_of(&m))
        .collect();

    let mut counts: HashMap<(u64, Vec<CycNum>), i64> = HashMap::new();
    for row in &sheet.rows {
        let vals = split
            .iter()
            .map(|e| &row.values[0][e])
            .chain(ell.iter().map(|e| &row.values[1][e]))
            .map(|v| v.lift(level).unwrap())
            .collect();
        *counts.entry((row.dim, vals)).or_default() += 1;
    }
    for (r, (dim, _)) in table.rows.iter().enumerate() {
        let vals = points.iter().map(|&x| table.value(r, x).clone()).collect();
        *counts.entry((*dim, vals)).or_default() -= 1;
    }
    let bad = counts.values().filter(|&&c| c != 0).count();
    if bad == 0 {
        Ok(())
    } else {
        Err(format!(
            "{bad} restricted rows differ between sheet and oracle"
        ))
    }
}
