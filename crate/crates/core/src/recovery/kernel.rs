//! Exhaustive sparse decomposition of a function on `T^F_rs` into at most
//! `bound` torus characters with nonzero integer coefficients.
//!
//! Each candidate subset is solved over `Q` on power-basis coordinates: for
//! every sample `s` and coordinate `k` the row
//! `[coord_k(theta_1(s)), ..., coord_k(theta_m(s)) | coord_k(f(s))]` is fed to
//! an incremental fraction-free Gauss-Jordan elimination in `i128`. An
//! inconsistent row rejects the subset at once, which for wrong subsets
//! happens within the first sample. Once the rank is full the solution is
//! checked for integrality and then verified on every sample. Subsets whose
//! arithmetic would overflow are re-solved in `Q(zeta)` with
//! [`CycMatrix::solve_exact`].

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Expansion, RecoveryError, SearchMode};
use crate::abelian::{raw_exponent, AbChar, GrpElt, DEFAULT_ENUMERATION_BUDGET};
use crate::cyclotomic::{CycMatrix, CycNum, RootTable, SolveError};
use crate::error::Error;
use crate::reductive::TorusType;

/// How a single subset is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// `i128` elimination on coordinates, falling back to `Field` on overflow.
    Integer,
    /// [`CycMatrix::solve_exact`] on the cyclotomic system.
    Field,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Reject,
    Valid(Vec<i64>),
    Dependent,
}

/// Precomputed data for one torus at one working level.
pub struct TorusKernel {
    torus: TorusType,
    level: u64,
    table: Arc<RootTable>,
    chars: Vec<AbChar>,
    samples: Vec<GrpElt>,
    /// `exps[c * samples.len() + s]` is the exponent of `chars[c](samples[s])`.
    exps: Vec<u64>,
}

/// A function on the regular locus in kernel coordinates.
pub(crate) struct Target {
    coords: Vec<Vec<i64>>,
    values: Vec<CycNum>,
    zero: bool,
}

impl TorusKernel {
    /// `level` must be a multiple of the exponent of `T^F`.
    pub fn new(torus: &TorusType, level: u64) -> Result<Self, Error> {
        let group = torus.rational_points()?;
        if level == 0 || !level.is_multiple_of(group.exponent()) {
            return Err(Error::NonDivisibleLevel {
                from: group.exponent(),
                to: level,
            });
        }
        let chars = group.enumerate_chars(DEFAULT_ENUMERATION_BUDGET)?;
        let samples = torus.regular_elements()?;
        let mut exps = Vec::with_capacity(chars.len() * samples.len());
        for c in &chars {
            for s in &samples {
                exps.push(raw_exponent(c.cexps(), s.exps(), group.moduli(), level));
            }
        }
        Ok(TorusKernel {
            torus: torus.clone(),
            level,
            table: RootTable::get(level),
            chars,
            samples,
            exps,
        })
    }

    pub fn torus(&self) -> &TorusType {
        &self.torus
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn characters(&self) -> &[AbChar] {
        &self.chars
    }

    pub fn samples(&self) -> &[GrpElt] {
        &self.samples
    }

    #[inline]
    fn exp(&self, c: usize, s: usize) -> u64 {
        self.exps[c * self.samples.len() + s]
    }

    /// Checks totality on the regular locus and converts to coordinates.
    /// Returns `None` when some value has non-integral coordinates, in which
    /// case no integer combination of roots of unity can match.
    pub(crate) fn target(
        &self,
        f: &BTreeMap<Vec<u64>, CycNum>,
    ) -> Result<Option<Target>, RecoveryError> {
        if f.len() != self.samples.len() {
            return Err(RecoveryError::Input(format!(
                "torus {}: function has {} values, regular locus has {} elements",
                self.torus,
                f.len(),
                self.samples.len()
            )));
        }
        let mut coords = Vec::with_capacity(self.samples.len());
        let mut values = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let v = f.get(s.exps()).ok_or_else(|| {
                RecoveryError::Input(format!(
                    "torus {}: no value at regular element {:?}",
                    self.torus,
                    s.exps()
                ))
            })?;
            let v = if v.level() == self.level {
                v.clone()
            } else {
                v.lift(self.level)?
            };
            match v.to_i64_coeffs() {
                Some(c) => coords.push(c),
                None => return Ok(None),
            }
            values.push(v);
        }
        let zero = coords.iter().all(|c| c.iter().all(|&x| x == 0));
        Ok(Some(Target {
            coords,
            values,
            zero,
        }))
    }

    /// Runs the search. Exhaustive mode visits every subset of size
    /// `<= bound` and demands exactly one valid expansion.
    pub fn decompose(
        &self,
        f: &BTreeMap<Vec<u64>, CycNum>,
        bound: usize,
        mode: SearchMode,
        route: Route,
    ) -> Result<Expansion, RecoveryError> {
        let Some(target) = self.target(f)? else {
            return Err(RecoveryError::NoExpansion {
                torus: self.torus.label(),
                bound,
            });
        };
        let found = match mode {
            SearchMode::Exhaustive => self.search_all(&target, bound, route)?,
            SearchMode::Fast => self
                .search_first(&target, bound, route)?
                .into_iter()
                .collect(),
        };
        match found.len() {
            0 => Err(RecoveryError::NoExpansion {
                torus: self.torus.label(),
                bound,
            }),
            1 => Ok(self.expansion(&found[0].0, &found[0].1)),
            _ => Err(RecoveryError::NonUnique {
                torus: self.torus.label(),
                first: self.expansion(&found[0].0, &found[0].1).to_string(),
                second: self.expansion(&found[1].0, &found[1].1).to_string(),
            }),
        }
    }

    fn expansion(&self, subset: &[usize], coeffs: &[i64]) -> Expansion {
        Expansion {
            torus: self.torus.clone(),
            terms: subset
                .iter()
                .zip(coeffs)
                .map(|(&i, &c)| (self.chars[i].clone(), c))
                .collect(),
        }
    }

    fn subsets_from(&self, first: usize, size: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
        (first + 1..self.chars.len())
            .combinations(size - 1)
            .map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
    }

    fn classify(
        &self,
        t: &Target,
        subset: Vec<usize>,
        route: Route,
    ) -> Result<Option<(Vec<usize>, Vec<i64>)>, RecoveryError> {
        match self.solve_subset(t, &subset, route)? {
            Outcome::Reject => Ok(None),
            Outcome::Valid(c) => Ok(Some((subset, c))),
            Outcome::Dependent => Err(RecoveryError::Dependent {
                torus: self.torus.label(),
                chars: subset
                    .iter()
                    .map(|&i| format!("{:?}", self.chars[i].cexps()))
                    .join(" "),
            }),
        }
    }

    fn search_all(
        &self,
        t: &Target,
        bound: usize,
        route: Route,
    ) -> Result<Vec<(Vec<usize>, Vec<i64>)>, RecoveryError> {
        let mut found = Vec::new();
        if t.zero {
            found.push((Vec::new(), Vec::new()));
        }
        for size in 1..=bound.min(self.chars.len()) {
            let per_first: Vec<Result<Vec<_>, RecoveryError>> = (0..self.chars.len())
                .into_par_iter()
                .map(|first| {
                    let mut out = Vec::new();
                    for subset in self.subsets_from(first, size) {
                        if let Some(hit) = self.classify(t, subset, route)? {
                            out.push(hit);
                        }
                    }
                    Ok(out)
                })
                .collect();
            for r in per_first {
                found.extend(r?);
            }
        }
        Ok(found)
    }

    fn search_first(
        &self,
        t: &Target,
        bound: usize,
        route: Route,
    ) -> Result<Option<(Vec<usize>, Vec<i64>)>, RecoveryError> {
        if t.zero {
            return Ok(Some((Vec::new(), Vec::new())));
        }
        for size in 1..=bound.min(self.chars.len()) {
            let hit = (0..self.chars.len())
                .into_par_iter()
                .find_map_first(|first| {
                    for subset in self.subsets_from(first, size) {
                        match self.classify(t, subset, route) {
                            Ok(None) => {}
                            Ok(Some(hit)) => return Some(Ok(hit)),
                            Err(e) => return Some(Err(e)),
                        }
                    }
                    None
                });
            if let Some(hit) = hit {
                return hit.map(Some);
            }
        }
        Ok(None)
    }

    pub(crate) fn solve_subset(
        &self,
        t: &Target,
        subset: &[usize],
        route: Route,
    ) -> Result<Outcome, RecoveryError> {
        match route {
            Route::Integer => match self.solve_integer(t, subset) {
                Some(o) => Ok(o),
                None => self.solve_field(t, subset),
            },
            Route::Field => self.solve_field(t, subset),
        }
    }

    /// `None` on `i128` overflow.
    fn solve_integer(&self, t: &Target, subset: &[usize]) -> Option<Outcome> {
        let m = subset.len();
        let deg = self.table.degree();
        // Gauss-Jordan rows: (pivot column, m coefficients + rhs)
        let mut pivots: Vec<(usize, Vec<i128>)> = Vec::with_capacity(m);
        let mut row = vec![0i128; m + 1];
        'samples: for (s, fs) in t.coords.iter().enumerate() {
            for k in 0..deg {
                let mut nonzero = fs[k] != 0;
                for (j, &c) in subset.iter().enumerate() {
                    row[j] = self.table.root(self.exp(c, s))[k] as i128;
                    nonzero |= row[j] != 0;
                }
                row[m] = fs[k] as i128;
                if !nonzero {
                    continue;
                }
                for (p, prow) in &pivots {
                    let a = row[*p];
                    if a != 0 {
                        let b = prow[*p];
                        eliminate(&mut row, prow, a, b)?;
                    }
                }
                let Some(p) = row[..m].iter().position(|&x| x != 0) else {
                    if row[m] != 0 {
                        return Some(Outcome::Reject);
                    }
                    continue;
                };
                for (_, prow) in pivots.iter_mut() {
                    let a = prow[p];
                    if a != 0 {
                        eliminate(prow, &row, a, row[p])?;
                    }
                }
                pivots.push((p, row.clone()));
                if pivots.len() == m {
                    break 'samples;
                }
            }
        }
        if pivots.len() < m {
            return Some(Outcome::Dependent);
        }
        let mut coeffs = vec![0i64; m];
        for (p, prow) in &pivots {
            let (q, r) = prow[m].div_rem(&prow[*p]);
            if r != 0 || q == 0 {
                return Some(Outcome::Reject);
            }
            coeffs[*p] = q.to_i64()?;
        }
        let mut acc = vec![0i128; deg];
        for (s, fs) in t.coords.iter().enumerate() {
            acc.iter_mut().for_each(|x| *x = 0);
            for (&c, &k) in subset.iter().zip(&coeffs) {
                for (a, &r) in acc.iter_mut().zip(self.table.root(self.exp(c, s))) {
                    *a = a.checked_add(k as i128 * r as i128)?;
                }
            }
            if acc.iter().zip(fs).any(|(&a, &b)| a != b as i128) {
                return Some(Outcome::Reject);
            }
        }
        Some(Outcome::Valid(coeffs))
    }

    fn solve_field(&self, t: &Target, subset: &[usize]) -> Result<Outcome, RecoveryError> {
        let rows = (0..self.samples.len())
            .map(|s| {
                subset
                    .iter()
                    .map(|&c| CycNum::root(self.level, self.exp(c, s) as i64))
                    .collect()
            })
            .collect();
        let a = CycMatrix::from_rows(self.level, rows)?;
        match a.solve_exact(&t.values) {
            Ok(x) => {
                let mut coeffs = Vec::with_capacity(x.len());
                for v in &x {
                    match v.as_rational() {
                        Some(r) if r.is_integer() && !r.numer().is_zero() => {
                            match r.numer().to_i64() {
                                Some(c) => coeffs.push(c),
                                None => {
                                    return Err(Error::Overflow(format!("coefficient {r}")).into())
                                }
                            }
                        }
                        _ => return Ok(Outcome::Reject),
                    }
                }
                Ok(Outcome::Valid(coeffs))
            }
            Err(SolveError::NoSolution) => Ok(Outcome::Reject),
            Err(SolveError::RankDeficient) => Ok(Outcome::Dependent),
            Err(SolveError::Arithmetic(e)) => Err(e.into()),
        }
    }
}

/// `row <- b * row - a * prow`, then divide by the content. `None` on overflow.
#[inline]
fn eliminate(row: &mut [i128], prow: &[i128], a: i128, b: i128) -> Option<()> {
    let mut g = 0i128;
    for (x, &y) in row.iter_mut().zip(prow) {
        *x = b.checked_mul(*x)?.checked_sub(a.checked_mul(y)?)?;
        g = g.gcd(x);
    }
    if g > 1 {
        row.iter_mut().for_each(|x| *x /= g);
    }
    Some(())
}
