//! Built-in sheets for `GL_1(F_q)` and `GL_2(F_q)`, `q` odd.
//!
//! `GL_2` coordinates: the split torus point `(i, j)` is `diag(h^i, h^j)`
//! with `h = g^{q+1}` generating `F_q^*`; the elliptic point `a` is `g^a` in
//! `F_{q^2}^*`. All values are written at level `q^2 - 1`, where
//! `zeta_{q-1}^x = zeta_{q^2-1}^{x(q+1)}`.

use std::collections::BTreeMap;

use super::{CharacterSheet, IrrLabel, SheetError, SheetRow};
use crate::cyclotomic::CycNum;
use crate::reductive::GroupSpec;

/// The `q - 1` characters of `F_q^*`, each restricted to itself.
pub fn build_gl1_sheet(q: u64) -> Result<CharacterSheet, SheetError> {
    let spec = GroupSpec::new(1, q)?;
    let tori = spec.tori();
    let level = q - 1;
    let points = tori[0].regular_elements()?;
    let rows = (0..level)
        .map(|k| {
            let values = points
                .iter()
                .map(|t| {
                    let a = t.exps()[0];
                    (
                        t.exps().to_vec(),
                        CycNum::root(level, (k * a % level) as i64),
                    )
                })
                .collect();
            SheetRow {
                label: IrrLabel::OneDim(k),
                dim: 1,
                values: vec![values],
            }
        })
        .collect();
    Ok(CharacterSheet {
        spec,
        zeta_level: level,
        tori,
        rows,
    })
}

/// Every canonical `GL_2(F_q)` label, sorted by family then parameters.
pub fn gl2_labels(q: u64) -> Vec<IrrLabel> {
    let m = q * q - 1;
    let mut out: Vec<IrrLabel> = (0..q - 1).map(IrrLabel::OneDim).collect();
    out.extend((0..q - 1).map(IrrLabel::Steinberg));
    for k in 0..q - 1 {
        out.extend((k + 1..q - 1).map(|l| IrrLabel::Principal(k, l)));
    }
    out.extend(
        (1..m)
            .filter(|c| c % (q + 1) != 0 && *c <= c * q % m)
            .map(IrrLabel::Cuspidal),
    );
    out
}

struct Gl2 {
    q: u64,
    m: u64,
}

impl Gl2 {
    fn small(&self, x: u64) -> CycNum {
        CycNum::root(self.m, ((x % (self.q - 1)) * (self.q + 1)) as i64)
    }

    fn big(&self, x: u64) -> CycNum {
        CycNum::root(self.m, (x % self.m) as i64)
    }

    fn split(&self, label: &IrrLabel, i: u64, j: u64) -> CycNum {
        match *label {
            IrrLabel::OneDim(k) | IrrLabel::Steinberg(k) => self.small(k * (i + j)),
            IrrLabel::Principal(k, l) => self.small(k * i + l * j) + self.small(k * j + l * i),
            _ => CycNum::zero(self.m),
        }
    }

    fn elliptic(&self, label: &IrrLabel, a: u64) -> CycNum {
        let q = self.q;
        match *label {
            IrrLabel::OneDim(k) => self.big(k * a % self.m * (q + 1)),
            IrrLabel::Steinberg(k) => -self.big(k * a % self.m * (q + 1)),
            IrrLabel::Cuspidal(c) => -(self.big(c * a) + self.big(c * q % self.m * a)),
            _ => CycNum::zero(self.m),
        }
    }

    fn dim(&self, label: &IrrLabel) -> u64 {
        match label {
            IrrLabel::OneDim(_) => 1,
            IrrLabel::Steinberg(_) => self.q,
            IrrLabel::Principal(..) => self.q + 1,
            _ => self.q - 1,
        }
    }
}

/// The classical `GL_2(F_q)` table restricted to regular semisimple torus
/// elements. Only odd `q` is generated.
pub fn build_gl2_sheet(q: u64) -> Result<CharacterSheet, SheetError> {
    let spec = GroupSpec::new(2, q)?;
    if q.is_multiple_of(2) {
        return Err(SheetError::Unsupported(format!(
            "built-in GL2 sheet needs odd q, got {q}"
        )));
    }
    let g = Gl2 { q, m: q * q - 1 };
    let tori = spec.tori();
    let split_pts = tori[0].regular_elements()?;
    let ell_pts = tori[1].regular_elements()?;
    let rows = gl2_labels(q)
        .into_iter()
        .map(|label| {
            let split: BTreeMap<_, _> = split_pts
                .iter()
                .map(|t| {
                    let (i, j) = (t.exps()[0], t.exps()[1]);
                    (t.exps().to_vec(), g.split(&label, i, j))
                })
                .collect();
            let ell: BTreeMap<_, _> = ell_pts
                .iter()
                .map(|t| (t.exps().to_vec(), g.elliptic(&label, t.exps()[0])))
                .collect();
            SheetRow {
                dim: g.dim(&label),
                label,
                values: vec![split, ell],
            }
        })
        .collect();
    Ok(CharacterSheet {
        spec,
        zeta_level: g.m,
        tori,
        rows,
    })
}

/// Built-in sheet for `(n, q)`, when one exists.
pub fn builtin_sheet(n: usize, q: u64) -> Result<CharacterSheet, SheetError> {
    match n {
        1 => build_gl1_sheet(q),
        2 => build_gl2_sheet(q),
        _ => Err(SheetError::Unsupported(format!(
            "no built-in sheet for GL{n}; load one from a file"
        ))),
    }
}
