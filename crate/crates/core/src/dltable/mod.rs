//! Character sheets: values of every irreducible character of `G^F` on the
//! regular semisimple locus of every maximal torus, keyed by discrete-log
//! coordinates of torus elements.

mod builtin;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::cyclotomic::CycNum;
use crate::error::Error;
use crate::reductive::{GroupSpec, TorusType};

pub use builtin::{build_gl1_sheet, build_gl2_sheet, builtin_sheet};
pub use io::{load_sheet, save_sheet, sheet_from_json, sheet_to_json};

/// Name of an irreducible character. The four families cover `GL_1`
/// (`onedim` only) and `GL_2`; sheets for larger `n` carry free-form labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrLabel {
    OneDim(u64),
    Steinberg(u64),
    Principal(u64, u64),
    Cuspidal(u64),
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
pub enum LabelError {
    #[error(
        "cannot parse label {0:?}; expected onedim:k, steinberg:k, principal:k,l or cuspidal:c"
    )]
    Syntax(String),
    #[error("label {label} is not valid for {spec}: {reason}")]
    Invalid {
        label: String,
        spec: String,
        reason: String,
    },
}

impl FromStr for IrrLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, LabelError> {
        let bad = || LabelError::Syntax(s.to_string());
        let (family, params) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums = params
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        match (family.trim(), nums.as_slice()) {
            ("onedim", &[k]) => Ok(IrrLabel::OneDim(k)),
            ("steinberg", &[k]) => Ok(IrrLabel::Steinberg(k)),
            ("principal", &[k, l]) => Ok(IrrLabel::Principal(k, l)),
            ("cuspidal", &[c]) => Ok(IrrLabel::Cuspidal(c)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for IrrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrLabel::OneDim(k) => write!(f, "onedim:{k}"),
            IrrLabel::Steinberg(k) => write!(f, "steinberg:{k}"),
            IrrLabel::Principal(k, l) => write!(f, "principal:{k},{l}"),
            IrrLabel::Cuspidal(c) => write!(f, "cuspidal:{c}"),
            IrrLabel::Other(s) => f.write_str(s),
        }
    }
}

impl IrrLabel {
    /// Reduces parameters and picks the canonical representative:
    /// principal with `k < l`, cuspidal as `min(c, cq mod q^2-1)`.
    pub fn canonical(&self, spec: GroupSpec) -> Result<IrrLabel, LabelError> {
        let q = spec.q();
        let invalid = |reason: &str| LabelError::Invalid {
            label: self.to_string(),
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        match (spec.n(), self) {
            (_, IrrLabel::Other(s)) if spec.n() > 2 => Ok(IrrLabel::Other(s.clone())),
            (1, IrrLabel::OneDim(k)) => Ok(IrrLabel::OneDim(k % (q - 1))),
            (1, _) => Err(invalid("GL1 has only one-dimensional characters")),
            (2, IrrLabel::OneDim(k)) => Ok(IrrLabel::OneDim(k % (q - 1))),
            (2, IrrLabel::Steinberg(k)) => Ok(IrrLabel::Steinberg(k % (q - 1))),
            (2, IrrLabel::Principal(k, l)) => {
                let (k, l) = (k % (q - 1), l % (q - 1));
                if k == l {
                    return Err(invalid("principal series needs k != l mod q-1"));
                }
                Ok(IrrLabel::Principal(k.min(l), k.max(l)))
            }
            (2, IrrLabel::Cuspidal(c)) => {
                let m = q * q - 1;
                let c = c % m;
                if c.is_multiple_of(q + 1) {
                    return Err(invalid("cuspidal parameter must not be a multiple of q+1"));
                }
                Ok(IrrLabel::Cuspidal(c.min(c * q % m)))
            }
            _ => Err(invalid("no family labels for this rank")),
        }
    }

    /// Parses a label and returns its canonical form for `spec`.
    pub fn parse_canonical(s: &str, spec: GroupSpec) -> Result<IrrLabel, LabelError> {
        s.parse::<IrrLabel>()?.canonical(spec)
    }
}

/// One irreducible: label, degree, and its values on each torus's regular
/// locus (indexed like [`CharacterSheet::tori`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetRow {
    pub label: IrrLabel,
    pub dim: u64,
    pub values: Vec<BTreeMap<Vec<u64>, CycNum>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSheet {
    pub spec: GroupSpec,
    /// lcm of the torus exponents; every value lives in `Q(zeta_{zeta_level})`.
    pub zeta_level: u64,
    pub tori: Vec<TorusType>,
    pub rows: Vec<SheetRow>,
}

/// lcm of the exponents of all `T^F`.
pub fn expected_zeta_level(spec: GroupSpec) -> Result<u64, Error> {
    spec.tori()
        .iter()
        .try_fold(1u64, |acc, t| Ok(acc.lcm(&t.exponent()?)))
}

impl CharacterSheet {
    pub fn row(&self, label: &IrrLabel) -> Option<&SheetRow> {
        self.rows.iter().find(|r| &r.label == label)
    }

    pub fn torus_index(&self, torus: &TorusType) -> Option<usize> {
        self.tori.iter().position(|t| t == torus)
    }

    /// Labels in sheet order.
    pub fn labels(&self) -> Vec<IrrLabel> {
        self.rows.iter().map(|r| r.label.clone()).collect()
    }
}

/// A single structural problem found in a sheet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TorusSet {
        expected: Vec<String>,
        found: Vec<String>,
    },
    ZetaLevel {
        expected: u64,
        found: u64,
    },
    RowCount {
        expected: String,
        found: usize,
    },
    DimSquares {
        expected: String,
        found: String,
    },
    InvalidLabel {
        label: String,
        reason: String,
    },
    DuplicateLabel {
        label: String,
        canonical: String,
    },
    MissingTorus {
        label: String,
        torus: String,
    },
    MissingElement {
        label: String,
        torus: String,
        element: Vec<u64>,
    },
    NonRegularElement {
        label: String,
        torus: String,
        element: Vec<u64>,
    },
    LevelMismatch {
        label: String,
        torus: String,
        element: Vec<u64>,
        level: u64,
    },
    ClassFunction {
        label: String,
        torus: String,
        element: Vec<u64>,
        conjugate: Vec<u64>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TorusSet { expected, found } => {
                write!(f, "torus list {found:?}, expected {expected:?}")
            }
            Violation::ZetaLevel { expected, found } => {
                write!(f, "zeta level {found}, expected {expected}")
            }
            Violation::RowCount { expected, found } => {
                write!(f, "{found} rows, expected {expected}")
            }
            Violation::DimSquares { expected, found } => {
                write!(f, "sum of squared degrees {found}, expected |G^F| = {expected}")
            }
            Violation::InvalidLabel { label, reason } => write!(f, "{label}: {reason}"),
            Violation::DuplicateLabel { label, canonical } => {
                write!(f, "{label}: duplicates another row (canonical form {canonical})")
            }
            Violation::MissingTorus { label, torus } => {
                write!(f, "{label}: no values for torus {torus}")
            }
            Violation::MissingElement { label, torus, element } => {
                write!(f, "{label}: torus {torus}: missing regular element {element:?}")
            }
            Violation::NonRegularElement { label, torus, element } => {
                write!(f, "{label}: torus {torus}: value at non-regular element {element:?}")
            }
            Violation::LevelMismatch { label, torus, element, level } => {
                write!(f, "{label}: torus {torus}: value at {element:?} has level {level}")
            }
            Violation::ClassFunction { label, torus, element, conjugate } => write!(
                f,
                "{label}: torus {torus}: values at conjugate elements {element:?} and {conjugate:?} differ"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "sheet valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, ThisError)]
pub enum SheetError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Schema(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sheet failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Core(#[from] Error),
}

/// Structural checks: torus list, zeta level, row count, degrees, labels,
/// exact coverage of the regular locus, and the class-function property
/// under `N(T)^F / T^F`.
pub fn validate_sheet(sheet: &CharacterSheet) -> Result<ValidationReport, Error> {
    let spec = sheet.spec;
    let mut out = Vec::new();

    let tori = spec.tori();
    if sheet.tori != tori {
        out.push(Violation::TorusSet {
            expected: tori.iter().map(|t| t.label()).collect(),
            found: sheet.tori.iter().map(|t| t.label()).collect(),
        });
    }
    let level = expected_zeta_level(spec)?;
    if sheet.zeta_level != level {
        out.push(Violation::ZetaLevel {
            expected: level,
            found: sheet.zeta_level,
        });
    }
    let classes = spec.class_number();
    if BigInt::from(sheet.rows.len()) != classes {
        out.push(Violation::RowCount {
            expected: classes.to_string(),
            found: sheet.rows.len(),
        });
    }
    let squares: BigInt = sheet.rows.iter().map(|r| BigInt::from(r.dim).pow(2)).sum();
    if squares != spec.group_order() {
        out.push(Violation::DimSquares {
            expected: spec.group_order().to_string(),
            found: squares.to_string(),
        });
    }

    let mut seen = BTreeSet::new();
    for row in &sheet.rows {
        match row.label.canonical(spec) {
            Ok(c) => {
                if !seen.insert(c.clone()) {
                    out.push(Violation::DuplicateLabel {
                        label: row.label.to_string(),
                        canonical: c.to_string(),
                    });
                }
            }
            Err(e) => out.push(Violation::InvalidLabel {
                label: row.label.to_string(),
                reason: e.to_string(),
            }),
        }
    }

    for (ti, torus) in sheet.tori.iter().enumerate() {
        let regular: BTreeSet<Vec<u64>> = torus
            .regular_elements()?
            .into_iter()
            .map(|t| t.exps().to_vec())
            .collect();
        for row in &sheet.rows {
            let label = row.label.to_string();
            let Some(values) = row.values.get(ti) else {
                out.push(Violation::MissingTorus {
                    label,
                    torus: torus.label(),
                });
                continue;
            };
            for e in regular.iter().filter(|e| !values.contains_key(*e)) {
                out.push(Violation::MissingElement {
                    label: label.clone(),
                    torus: torus.label(),
                    element: e.clone(),
                });
            }
            for (e, v) in values {
                if !regular.contains(e) {
                    out.push(Violation::NonRegularElement {
                        label: label.clone(),
                        torus: torus.label(),
                        element: e.clone(),
                    });
                } else if v.level() != sheet.zeta_level {
                    out.push(Violation::LevelMismatch {
                        label: label.clone(),
                        torus: torus.label(),
                        element: e.clone(),
                        level: v.level(),
                    });
                }
            }
            let mut done = BTreeSet::new();
            for e in &regular {
                if done.contains(e) {
                    continue;
                }
                let orbit = torus.relative_weyl_orbit(e)?;
                let Some(base) = values.get(e) else {
                    continue;
                };
                for w in &orbit {
                    if values.get(w).is_some_and(|v| v != base) {
                        out.push(Violation::ClassFunction {
                            label: label.clone(),
                            torus: torus.label(),
                            element: e.clone(),
                            conjugate: w.clone(),
                        });
                    }
                }
                done.extend(orbit);
            }
        }
    }
    Ok(ValidationReport { violations: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl2(q: u64) -> GroupSpec {
        GroupSpec::new(2, q).unwrap()
    }

    #[test]
    fn label_grammar_round_trip() {
        for s in ["onedim:3", "steinberg:0", "principal:1,4", "cuspidal:7"] {
            assert_eq!(s.parse::<IrrLabel>().unwrap().to_string(), s);
        }
        for s in [
            "onedim",
            "principal:1",
            "cusp:1",
            "onedim:-1",
            "cuspidal:1,2",
            "",
        ] {
            assert!(s.parse::<IrrLabel>().is_err(), "{s}");
        }
    }

    #[test]
    fn canonical_forms() {
        let spec = gl2(11);
        let c = |s: &str| IrrLabel::parse_canonical(s, spec);
        assert_eq!(c("principal:5,2").unwrap(), IrrLabel::Principal(2, 5));
        assert!(c("principal:11,1").is_err());
        assert_eq!(c("principal:12,1").unwrap(), IrrLabel::Principal(1, 2));
        assert_eq!(c("cuspidal:11").unwrap(), IrrLabel::Cuspidal(1));
        assert_eq!(c("cuspidal:1").unwrap(), IrrLabel::Cuspidal(1));
        assert!(c("cuspidal:24").is_err());
        assert_eq!(c("onedim:13").unwrap(), IrrLabel::OneDim(3));
        let one = GroupSpec::new(1, 5).unwrap();
        assert!(IrrLabel::parse_canonical("steinberg:0", one).is_err());
    }

    #[test]
    fn label_order_is_by_family() {
        let mut v = [IrrLabel::Cuspidal(1),
            IrrLabel::Principal(0, 1),
            IrrLabel::Steinberg(0),
            IrrLabel::OneDim(5),
            IrrLabel::OneDim(0)];
        v.sort();
        assert_eq!(
            v.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            [
                "onedim:0",
                "onedim:5",
                "steinberg:0",
                "principal:0,1",
                "cuspidal:1"
            ]
        );
    }

    #[test]
    fn zeta_levels() {
        assert_eq!(expected_zeta_level(gl2(11)).unwrap(), 120);
        assert_eq!(
            expected_zeta_level(GroupSpec::new(1, 7).unwrap()).unwrap(),
            6
        );
        assert_eq!(
            expected_zeta_level(GroupSpec::new(3, 2).unwrap()).unwrap(),
            21
        );
    }
}
