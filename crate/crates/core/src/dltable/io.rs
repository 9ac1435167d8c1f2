//! JSON sheet files.
//!
//! ```text
//! { "group": "GL", "n": 2, "q": 3, "zeta_level": 8, "tori": ["1+1", "2"],
//!   "irreducibles": [ { "label": "onedim:0", "dim": 1,
//!     "values": { "1+1": [ { "element": [0, 1], "value": [[1, 1, 0]] } ], ... } } ] }
//! ```
//!
//! A value is a list of `[numerator, denominator, power]` triples at
//! `zeta_level`. Elements are listed in ascending lexicographic order, so
//! saving is deterministic.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{validate_sheet, CharacterSheet, IrrLabel, SheetError, SheetRow};
use crate::cyclotomic::CycNum;
use crate::reductive::{GroupSpec, TorusType};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheetFile {
    group: String,
    n: usize,
    q: u64,
    zeta_level: u64,
    tori: Vec<String>,
    irreducibles: Vec<RowFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    label: String,
    dim: u64,
    values: IndexMap<String, Vec<EntryFile>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    element: Vec<u64>,
    value: Vec<[i64; 3]>,
}

fn encode_value(v: &CycNum) -> Result<Vec<[i64; 3]>, SheetError> {
    v.to_triples()
        .into_iter()
        .map(|(num, den, pow)| match (num.to_i64(), den.to_i64()) {
            (Some(n), Some(d)) => Ok([n, d, pow as i64]),
            _ => Err(SheetError::Schema(format!(
                "coefficient {num}/{den} does not fit a 64-bit integer"
            ))),
        })
        .collect()
}

/// Serializes a sheet as compact JSON followed by a newline.
pub fn sheet_to_json(sheet: &CharacterSheet) -> Result<String, SheetError> {
    let irreducibles = sheet
        .rows
        .iter()
        .map(|row| {
            let mut values = IndexMap::new();
            for (torus, map) in sheet.tori.iter().zip(&row.values) {
                let entries = map
                    .iter()
                    .map(|(e, v)| {
                        Ok(EntryFile {
                            element: e.clone(),
                            value: encode_value(v)?,
                        })
                    })
                    .collect::<Result<Vec<_>, SheetError>>()?;
                values.insert(torus.label(), entries);
            }
            Ok(RowFile {
                label: row.label.to_string(),
                dim: row.dim,
                values,
            })
        })
        .collect::<Result<Vec<_>, SheetError>>()?;
    let file = SheetFile {
        group: "GL".into(),
        n: sheet.spec.n(),
        q: sheet.spec.q(),
        zeta_level: sheet.zeta_level,
        tori: sheet.tori.iter().map(|t| t.label()).collect(),
        irreducibles,
    };
    let mut s = serde_json::to_string(&file)?;
    s.push('\n');
    Ok(s)
}

fn parse_label(s: &str, spec: GroupSpec) -> Result<IrrLabel, SheetError> {
    match s.parse::<IrrLabel>() {
        Ok(l) => Ok(l),
        Err(_) if spec.n() > 2 && !s.trim().is_empty() => Ok(IrrLabel::Other(s.to_string())),
        Err(e) => Err(SheetError::Schema(e.to_string())),
    }
}

/// Parses a sheet without structural validation.
pub fn sheet_from_json(text: &str) -> Result<CharacterSheet, SheetError> {
    let file: SheetFile = serde_json::from_str(text)?;
    if file.group != "GL" {
        return Err(SheetError::Schema(format!(
            "unsupported group {:?}",
            file.group
        )));
    }
    let spec = GroupSpec::new(file.n, file.q)?;
    if file.zeta_level == 0 {
        return Err(SheetError::Schema("zeta_level must be positive".into()));
    }
    let tori = file
        .tori
        .iter()
        .map(|t| TorusType::parse(spec, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::with_capacity(file.irreducibles.len());
    for row in file.irreducibles {
        let label = parse_label(&row.label, spec)?;
        let mut values = Vec::with_capacity(tori.len());
        for key in row.values.keys() {
            if !file.tori.contains(key) {
                return Err(SheetError::Schema(format!(
                    "{}: values for undeclared torus {key:?}",
                    row.label
                )));
            }
        }
        for name in &file.tori {
            let mut map = BTreeMap::new();
            for entry in row.values.get(name).map(Vec::as_slice).unwrap_or_default() {
                let mut triples = Vec::with_capacity(entry.value.len());
                for &[num, den, pow] in &entry.value {
                    if den <= 0 || pow < 0 || pow as u64 >= file.zeta_level {
                        return Err(SheetError::Schema(format!(
                            "{}: bad triple [{num}, {den}, {pow}] at level {}",
                            row.label, file.zeta_level
                        )));
                    }
                    triples.push((BigInt::from(num), BigInt::from(den), pow as u64));
                }
                let v = CycNum::from_triples(file.zeta_level, &triples)?;
                if map.insert(entry.element.clone(), v).is_some() {
                    return Err(SheetError::Schema(format!(
                        "{}: torus {name}: element {:?} listed twice",
                        row.label, entry.element
                    )));
                }
            }
            values.push(map);
        }
        rows.push(SheetRow {
            label,
            dim: row.dim,
            values,
        });
    }
    Ok(CharacterSheet {
        spec,
        zeta_level: file.zeta_level,
        tori,
        rows,
    })
}

pub fn save_sheet(sheet: &CharacterSheet, path: impl AsRef<Path>) -> Result<(), SheetError> {
    fs::write(path, sheet_to_json(sheet)?)?;
    Ok(())
}

/// Reads and validates a sheet; any structural violation rejects the file.
pub fn load_sheet(path: impl AsRef<Path>) -> Result<CharacterSheet, SheetError> {
    let sheet = sheet_from_json(&fs::read_to_string(path)?)?;
    let report = validate_sheet(&sheet)?;
    if !report.is_ok() {
        return Err(SheetError::Invalid(report));
    }
    Ok(sheet)
}
