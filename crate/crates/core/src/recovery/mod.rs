//! From the values of an irreducible character on the regular semisimple
//! elements of every maximal torus, recover the unique short integer
//! expansion in torus characters, the geometric conjugacy class of its
//! support, and whether the representation is unipotent.

mod kernel;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::abelian::{raw_exponent, AbChar, GrpElt};
use crate::cyclotomic::{CycMatrix, CycNum};
use crate::dltable::{CharacterSheet, IrrLabel};
use crate::error::Error;
use crate::reductive::{check_q_condition, geom_class_id, GeomClassId, GroupSpec, TorusType};

pub use kernel::{Route, TorusKernel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// Visit every subset and require exactly one valid expansion.
    #[default]
    Exhaustive,
    /// Stop at the first valid expansion.
    Fast,
}

#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
pub enum RecoveryError {
    #[error("q-condition fails for {spec}: {detail}")]
    QConditionViolated { spec: String, detail: String },
    #[error("torus {torus}: no expansion with at most {bound} terms")]
    NoExpansion { torus: String, bound: usize },
    #[error("torus {torus}: two valid expansions, {first} and {second}")]
    NonUnique {
        torus: String,
        first: String,
        second: String,
    },
    #[error("torus {torus}: characters {chars} are dependent on the regular locus")]
    Dependent { torus: String, chars: String },
    #[error("{label}: {}", .items.join("; "))]
    Inconsistency { label: String, items: Vec<String> },
    #[error("no row labelled {0}")]
    UnknownLabel(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl RecoveryError {
    /// Errors that mean the data contradicts the expected structure, as
    /// opposed to bad input or a failed gate.
    pub fn is_inconsistency(&self) -> bool {
        matches!(
            self,
            RecoveryError::NoExpansion { .. }
                | RecoveryError::NonUnique { .. }
                | RecoveryError::Dependent { .. }
                | RecoveryError::Inconsistency { .. }
        )
    }
}

/// `f = sum c_i theta_i` on `T^F_rs`, terms sorted by character exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub torus: TorusType,
    pub terms: Vec<(AbChar, i64)>,
}

impl Expansion {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(character exponents, coefficient)` pairs.
    pub fn plain_terms(&self) -> Vec<(Vec<u64>, i64)> {
        self.terms
            .iter()
            .map(|(t, c)| (t.cexps().to_vec(), *c))
            .collect()
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c:+}*{:?}", t.cexps())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryReport {
    pub label: IrrLabel,
    pub expansions: Vec<Expansion>,
    pub epsilon: GeomClassId,
    pub unipotent: bool,
}

/// JSON form of a [`RecoveryReport`]; keys appear in this order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub label: String,
    pub tori: Vec<TorusTermsJson>,
    pub epsilon: GeomClassId,
    pub unipotent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusTermsJson {
    pub torus: String,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub character: Vec<u64>,
    pub coefficient: i64,
}

impl RecoveryReport {
    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            label: self.label.to_string(),
            tori: self
                .expansions
                .iter()
                .map(|e| TorusTermsJson {
                    torus: e.torus.label(),
                    terms: e
                        .plain_terms()
                        .into_iter()
                        .map(|(character, coefficient)| TermJson {
                            character,
                            coefficient,
                        })
                        .collect(),
                })
                .collect(),
            epsilon: self.epsilon.clone(),
            unipotent: self.unipotent,
        }
    }
}

impl fmt::Display for RecoveryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.label)?;
        for e in &self.expansions {
            writeln!(f, "  torus {:<6} m={}  {}", e.torus.label(), e.len(), e)?;
        }
        writeln!(f, "  epsilon   {}", self.epsilon)?;
        writeln!(f, "  unipotent {}", self.unipotent)
    }
}

fn gate(spec: GroupSpec) -> Result<(), RecoveryError> {
    let report = check_q_condition(spec)?;
    if report.holds {
        return Ok(());
    }
    let detail = report
        .tori
        .iter()
        .map(|t| {
            let rel = if t.holds { "<" } else { ">=" };
            format!("torus {}: {} {rel} {}", t.torus, t.ratio, report.threshold)
        })
        .collect::<Vec<_>>()
        .join(", ");
    Err(RecoveryError::QConditionViolated {
        spec: spec.to_string(),
        detail,
    })
}

/// The unique expansion of `f` with at most `bound` terms, after checking
/// the q-condition for the ambient group.
pub fn sparse_decompose(
    f: &BTreeMap<Vec<u64>, CycNum>,
    torus: &TorusType,
    bound: usize,
    mode: SearchMode,
) -> Result<Expansion, RecoveryError> {
    gate(torus.spec())?;
    let level = f.values().try_fold(torus.exponent()?, |acc, v| {
        Ok::<_, Error>(acc.lcm(&v.level()))
    })?;
    TorusKernel::new(torus, level)?.decompose(f, bound, mode, Route::Integer)
}

/// Runs recovery for the rows of one sheet, sharing per-torus precomputation.
pub struct Recoverer<'a> {
    sheet: &'a CharacterSheet,
    kernels: Vec<TorusKernel>,
    mode: SearchMode,
    route: Route,
}

impl<'a> Recoverer<'a> {
    /// Refuses sheets whose group fails the q-condition. The sheet is
    /// expected to have passed [`crate::dltable::validate_sheet`].
    pub fn new(sheet: &'a CharacterSheet) -> Result<Self, RecoveryError> {
        gate(sheet.spec)?;
        let kernels = sheet
            .tori
            .iter()
            .map(|t| TorusKernel::new(t, sheet.zeta_level))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Recoverer {
            sheet,
            kernels,
            mode: SearchMode::Exhaustive,
            route: Route::Integer,
        })
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn sheet(&self) -> &CharacterSheet {
        self.sheet
    }

    fn row_values(
        &self,
        label: &IrrLabel,
    ) -> Result<(&IrrLabel, &[BTreeMap<Vec<u64>, CycNum>]), RecoveryError> {
        let canonical = label.canonical(self.sheet.spec).ok();
        self.sheet
            .rows
            .iter()
            .find(|r| &r.label == label || Some(&r.label) == canonical.as_ref())
            .map(|r| (&r.label, r.values.as_slice()))
            .ok_or_else(|| RecoveryError::UnknownLabel(label.to_string()))
    }

    /// Per-torus expansions of one row, bounded by `|W|`.
    pub fn decompose_row(&self, label: &IrrLabel) -> Result<Vec<Expansion>, RecoveryError> {
        let (_, values) = self.row_values(label)?;
        let bound = self.sheet.spec.weyl_order() as usize;
        self.kernels
            .iter()
            .zip(values)
            .map(|(k, f)| k.decompose(f, bound, self.mode, self.route))
            .collect()
    }

    /// Expansions, the class `epsilon` shared by all nonempty supports, and
    /// the unipotence flag, with every structural assertion checked.
    pub fn recover(&self, label: &IrrLabel) -> Result<RecoveryReport, RecoveryError> {
        let (row_label, values) = self.row_values(label)?;
        let expansions = self.decompose_row(label)?;
        let w = self.sheet.spec.weyl_order() as usize;
        let mut items = Vec::new();
        let mut classes: BTreeMap<GeomClassId, Vec<String>> = BTreeMap::new();
        for e in &expansions {
            if e.len() > w {
                items.push(format!(
                    "torus {}: {} terms exceed |W| = {w}",
                    e.torus,
                    e.len()
                ));
            }
            for (theta, _) in &e.terms {
                classes
                    .entry(geom_class_id(&e.torus, theta)?)
                    .or_default()
                    .push(format!("{}:{:?}", e.torus, theta.cexps()));
            }
        }
        if expansions.iter().all(Expansion::is_empty) {
            items.push("every torus has an empty support".into());
        }
        if classes.len() > 1 {
            let listing = classes
                .iter()
                .map(|(id, who)| format!("{id} <- {}", who.join(",")))
                .collect::<Vec<_>>()
                .join(" | ");
            items.push(format!(
                "supports span several geometric classes: {listing}"
            ));
        }
        let constant = values.iter().all(|map| {
            let mut it = map.values();
            it.next().is_none_or(|first| it.all(|v| v == first))
        });
        let trivial = expansions
            .iter()
            .any(|e| e.terms.iter().any(|(t, _)| t.is_trivial()));
        if constant != trivial {
            items.push(format!(
                "constant on every regular locus = {constant}, trivial character in a support = {trivial}"
            ));
        }
        if !items.is_empty() {
            return Err(RecoveryError::Inconsistency {
                label: row_label.to_string(),
                items,
            });
        }
        let epsilon = classes.into_keys().next().expect("nonempty support");
        Ok(RecoveryReport {
            label: row_label.clone(),
            expansions,
            epsilon,
            unipotent: constant,
        })
    }

    /// Constancy on every regular locus, cross-checked against the
    /// recovered supports.
    pub fn is_unipotent(&self, label: &IrrLabel) -> Result<bool, RecoveryError> {
        Ok(self.recover(label)?.unipotent)
    }

    /// Reports for all rows in sheet order.
    pub fn recover_all(&self) -> Vec<(IrrLabel, Result<RecoveryReport, RecoveryError>)> {
        self.sheet
            .rows
            .iter()
            .map(|r| (r.label.clone(), self.recover(&r.label)))
            .collect()
    }

    /// Compares every recovered expansion with the classical decomposition
    /// pattern of `GL_1` or `GL_2`.
    pub fn verify_dl_consistency(&self) -> Result<ConsistencyReport, RecoveryError> {
        let spec = self.sheet.spec;
        if spec.n() > 2 {
            return Err(RecoveryError::Input(format!(
                "no reference decomposition pattern for {spec}"
            )));
        }
        let rows = self
            .sheet
            .rows
            .iter()
            .map(|row| {
                let mut failures = Vec::new();
                match (expected_pattern(spec, &row.label), self.recover(&row.label)) {
                    (None, _) => failures.push("label has no reference pattern".to_string()),
                    (_, Err(e)) => failures.push(e.to_string()),
                    (Some(expected), Ok(report)) => {
                        for (e, want) in report.expansions.iter().zip(expected) {
                            let got = e.plain_terms();
                            if got != want {
                                failures.push(format!(
                                    "torus {}: expected {want:?}, recovered {got:?}",
                                    e.torus
                                ));
                            }
                        }
                    }
                }
                RowConsistency {
                    label: row.label.to_string(),
                    failures,
                }
            })
            .collect();
        Ok(ConsistencyReport { rows })
    }
}

/// Reference supports and multiplicities, per torus in canonical order.
fn expected_pattern(spec: GroupSpec, label: &IrrLabel) -> Option<Vec<Vec<(Vec<u64>, i64)>>> {
    let q = spec.q();
    let m = q * q - 1;
    let sorted = |mut v: Vec<(Vec<u64>, i64)>| {
        v.sort();
        v
    };
    Some(match (spec.n(), label) {
        (1, IrrLabel::OneDim(k)) => vec![vec![(vec![*k], 1)]],
        (2, IrrLabel::OneDim(k)) => vec![vec![(vec![*k, *k], 1)], vec![(vec![k * (q + 1) % m], 1)]],
        (2, IrrLabel::Steinberg(k)) => {
            vec![vec![(vec![*k, *k], 1)], vec![(vec![k * (q + 1) % m], -1)]]
        }
        (2, IrrLabel::Principal(k, l)) => {
            vec![sorted(vec![(vec![*k, *l], 1), (vec![*l, *k], 1)]), vec![]]
        }
        (2, IrrLabel::Cuspidal(c)) => {
            vec![vec![], sorted(vec![(vec![*c], -1), (vec![c * q % m], -1)])]
        }
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowConsistency {
    pub label: String,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub rows: Vec<RowConsistency>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.failures.is_empty()).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.rows.iter().flat_map(|r| {
            r.failures
                .iter()
                .map(move |f| (r.label.as_str(), f.as_str()))
        })
    }

    pub fn is_ok(&self) -> bool {
        self.passed() == self.rows.len()
    }
}

pub fn recover_e(
    sheet: &CharacterSheet,
    label: &IrrLabel,
) -> Result<RecoveryReport, RecoveryError> {
    Recoverer::new(sheet)?.recover(label)
}

pub fn is_unipotent(sheet: &CharacterSheet, label: &IrrLabel) -> Result<bool, RecoveryError> {
    Recoverer::new(sheet)?.is_unipotent(label)
}

pub fn verify_dl_consistency(sheet: &CharacterSheet) -> Result<ConsistencyReport, RecoveryError> {
    Recoverer::new(sheet)?.verify_dl_consistency()
}

/// Exact Gram determinant and its nonvanishing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramResult {
    pub det: CycNum,
    pub nonzero: bool,
}

/// `det(sum_{s in locus} theta_i(s) theta_j(s^{-1}))` at the exponent of `T^F`.
pub fn gram_determinant(
    torus: &TorusType,
    chars: &[AbChar],
    locus: &[GrpElt],
) -> Result<CycNum, RecoveryError> {
    let group = torus.rational_points()?;
    let level = group.exponent();
    for c in chars {
        if **c.group() != *group {
            return Err(Error::ParentMismatch(format!("character on {}", c.group())).into());
        }
    }
    let moduli = group.moduli();
    let k = chars.len();
    let mut counts = vec![vec![0i64; level as usize]; k * k];
    for s in locus {
        let inv = s.inverse();
        let fwd: Vec<u64> = chars
            .iter()
            .map(|c| raw_exponent(c.cexps(), s.exps(), moduli, level))
            .collect();
        let back: Vec<u64> = chars
            .iter()
            .map(|c| raw_exponent(c.cexps(), inv.exps(), moduli, level))
            .collect();
        for i in 0..k {
            for j in 0..k {
                counts[i * k + j][((fwd[i] + back[j]) % level) as usize] += 1;
            }
        }
    }
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let hist = &counts[i * k + j];
                    CycNum::from_root_sum(
                        level,
                        hist.iter()
                            .enumerate()
                            .filter(|(_, &n)| n != 0)
                            .map(|(e, &n)| (e as u64, n)),
                    )
                })
                .collect()
        })
        .collect();
    Ok(CycMatrix::from_rows(level, rows)?.det()?)
}

/// Gram test on `T^F_rs` for at most `2|W|` distinct characters.
pub fn gram_independence(torus: &TorusType, chars: &[AbChar]) -> Result<GramResult, RecoveryError> {
    gate(torus.spec())?;
    let limit = 2 * torus.spec().weyl_order() as usize;
    if chars.len() > limit {
        return Err(RecoveryError::Input(format!(
            "{} characters exceed 2|W| = {limit}",
            chars.len()
        )));
    }
    for (i, a) in chars.iter().enumerate() {
        if chars[..i].iter().any(|b| b.cexps() == a.cexps()) {
            return Err(RecoveryError::Input(format!(
                "character {:?} listed twice",
                a.cexps()
            )));
        }
    }
    let det = gram_determinant(torus, chars, &torus.regular_elements()?)?;
    Ok(GramResult {
        nonzero: !det.is_zero(),
        det,
    })
}
