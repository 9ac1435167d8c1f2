//! `GL_n` over `F_q`: F-stable maximal tori indexed by partitions of `n`,
//! their point groups in discrete-log coordinates, regularity, norm maps,
//! the largeness condition on `q`, and geometric conjugacy of torus
//! characters.
//!
//! Every multiplicative group `F_{q^d}^*` is modelled as `Z/(q^d - 1)` via a
//! norm-compatible tower of generators: the embedding `F_{q^d}^* -> F_{q^m}^*`
//! is multiplication of exponents by `(q^m - 1)/(q^d - 1)` and Frobenius is
//! multiplication by `q`. No field addition is ever needed.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{self, AbChar, AbHom, FinAbGroup, GrpElt, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};

/// `GL_n` over `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    n: usize,
    q: u64,
}

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true
}

impl GroupSpec {
    pub fn new(n: usize, q: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRank);
        }
        if !is_prime_power(q) {
            return Err(Error::NotPrimePower(q));
        }
        Ok(GroupSpec { n, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `|W| = n!`.
    pub fn weyl_order(&self) -> u64 {
        (1..=self.n as u64).product()
    }

    /// `q^k`, checked.
    pub fn q_pow(&self, k: u64) -> Result<u64> {
        u32::try_from(k)
            .ok()
            .and_then(|k| self.q.checked_pow(k))
            .ok_or_else(|| Error::Overflow(format!("{}^{k}", self.q)))
    }

    /// `q^k - 1`, the order of `F_{q^k}^*`.
    pub fn units_order(&self, k: u64) -> Result<u64> {
        Ok(self.q_pow(k)? - 1)
    }

    /// `|GL_n(F_q)| = prod_{i<n} (q^n - q^i)`.
    pub fn group_order(&self) -> BigInt {
        let q = BigInt::from(self.q);
        let qn = num_traits::pow(q.clone(), self.n);
        (0..self.n)
            .map(|i| &qn - num_traits::pow(q.clone(), i))
            .product()
    }

    /// Number of conjugacy classes (= number of irreducible characters) of
    /// `GL_n(F_q)`: the coefficient of `x^n` in `prod_k (1 - x^k)/(1 - q x^k)`.
    pub fn class_number(&self) -> BigInt {
        let n = self.n;
        let mut series = vec![BigInt::zero(); n + 1];
        series[0] = BigInt::one();
        let q = BigInt::from(self.q);
        for k in 1..=n {
            // multiply by 1/(1 - q x^k) = sum_j q^j x^{jk}
            for i in k..=n {
                let t = &series[i - k] * &q;
                series[i] += t;
            }
            // multiply by (1 - x^k)
            for i in (k..=n).rev() {
                let t = series[i - k].clone();
                series[i] -= t;
            }
        }
        series[n].clone()
    }

    /// All `G^F`-classes of F-stable maximal tori, one per partition of `n`,
    /// ordered lexicographically on the (decreasing) block tuples.
    pub fn tori(&self) -> Vec<TorusType> {
        let mut out = Vec::new();
        partitions(self.n, self.n, &mut Vec::new(), &mut out);
        out.sort();
        out.into_iter()
            .map(|blocks| TorusType {
                spec: *self,
                blocks,
            })
            .collect()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GL{}(F{})", self.n, self.q)
    }
}

fn partitions(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    for part in (1..=max.min(n)).rev() {
        cur.push(part);
        partitions(n - part, part, cur, out);
        cur.pop();
    }
}

/// An F-stable maximal torus of `GL_n`, keyed by the cycle type of the
/// twisting Weyl element. Its rational points are `prod_i F_{q^{d_i}}^*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusType {
    spec: GroupSpec,
    blocks: Vec<usize>,
}

/// Point group of a torus at a Frobenius level: `T^F` for level 1, otherwise
/// `T^{F^m}` identified coordinatewise with `(F_{q^m}^*)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoints {
    pub torus: TorusType,
    pub level: u64,
    pub group: Arc<FinAbGroup>,
}

impl TorusType {
    pub fn new(spec: GroupSpec, mut blocks: Vec<usize>) -> Result<Self> {
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        if blocks.iter().sum::<usize>() != spec.n || blocks.contains(&0) {
            return Err(Error::BadPartition(format!(
                "{blocks:?} for n = {}",
                spec.n
            )));
        }
        Ok(TorusType { spec, blocks })
    }

    /// Parses `"2+1"`-style partition strings.
    pub fn parse(spec: GroupSpec, s: &str) -> Result<Self> {
        let blocks = s
            .split('+')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::BadPartition(s.to_string()))?;
        Self::new(spec, blocks).map_err(|_| Error::BadPartition(s.to_string()))
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Partition string, e.g. `"1+1"`.
    pub fn label(&self) -> String {
        self.blocks
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Order of the twisting Weyl element: lcm of the block sizes.
    pub fn twist_order(&self) -> u64 {
        self.blocks
            .iter()
            .fold(1u64, |acc, &d| acc.lcm(&(d as u64)))
    }

    pub fn is_split(&self) -> bool {
        self.blocks.iter().all(|&d| d == 1)
    }

    /// `T^F = prod_i Z/(q^{d_i} - 1)`.
    pub fn rational_points(&self) -> Result<Arc<FinAbGroup>> {
        let moduli = self
            .blocks
            .iter()
            .map(|&d| self.spec.units_order(d as u64))
            .collect::<Result<Vec<_>>>()?;
        FinAbGroup::new(moduli)
    }

    /// Exponent of `T^F`; every character of `T^F` has values in this
    /// group of roots of unity.
    pub fn exponent(&self) -> Result<u64> {
        Ok(self.rational_points()?.exponent())
    }

    pub fn points(&self, m: u64) -> Result<TorusPoints> {
        let group = if m == 1 {
            self.rational_points()?
        } else if m > 1 && m.is_multiple_of(self.twist_order()) {
            FinAbGroup::new(vec![self.spec.units_order(m)?; self.spec.n])?
        } else {
            return Err(Error::InvalidLevel {
                torus: self.label(),
                level: m,
            });
        };
        Ok(TorusPoints {
            torus: self.clone(),
            level: m,
            group,
        })
    }

    fn check_rational(&self, t: &GrpElt) -> Result<()> {
        let g = self.rational_points()?;
        if **t.group() != *g {
            return Err(Error::ParentMismatch(format!(
                "{} is not a point group of torus {}",
                t.group(),
                self.label()
            )));
        }
        Ok(())
    }

    /// Eigenvalues of `t in T^F` as discrete logs in `F_{q^L}^*`, sorted.
    /// A block of size `d` with coordinate `a` contributes the Frobenius
    /// orbit `a q^j (q^L - 1)/(q^d - 1)`, `j < d`.
    pub fn eigenvalues(&self, t: &GrpElt, level: u64) -> Result<Vec<u64>> {
        self.check_rational(t)?;
        block_orbit_residues(self.spec, &self.blocks, t.exps(), level, || self.label())
    }

    /// Whether `t` is regular semisimple in `G`, i.e. has `n` distinct
    /// eigenvalues.
    pub fn is_regular(&self, t: &GrpElt) -> Result<bool> {
        let ev = self.eigenvalues(t, self.twist_order())?;
        Ok(ev.windows(2).all(|w| w[0] != w[1]))
    }

    /// `T^F_rs` in lexicographic coordinate order.
    pub fn regular_elements(&self) -> Result<Vec<GrpElt>> {
        let g = self.rational_points()?;
        let mut out = Vec::new();
        for t in g.enumerate_elements(DEFAULT_ENUMERATION_BUDGET)? {
            if self.is_regular(&t)? {
                out.push(t);
            }
        }
        Ok(out)
    }

    /// `|T^F - T^F_rs| / |T^F|`, by enumeration.
    pub fn rs_ratio(&self) -> Result<BigRational> {
        let g = self.rational_points()?;
        let regular = self.regular_elements()?.len() as u128;
        let order = g.order();
        Ok(BigRational::new(
            BigInt::from(order - regular),
            BigInt::from(order),
        ))
    }

    /// The norm `T^{F^m} -> T^F`, `t -> t F(t) ... F^{m-1}(t)`.
    ///
    /// On a block of size `d` with level-`m` coordinates `(b_0, ..., b_{d-1})`
    /// the image is `[sum_{j<m} b_{-j mod d} q^j mod (q^m - 1)] / [(q^m-1)/(q^d-1)]`.
    pub fn norm_hom(&self, m: u64) -> Result<AbHom> {
        if m == 0 || !m.is_multiple_of(self.twist_order()) {
            return Err(Error::InvalidLevel {
                torus: self.label(),
                level: m,
            });
        }
        let source = self.points(m)?.group;
        let target = self.rational_points()?;
        let qm1 = self.spec.units_order(m)? as u128;
        let q = self.spec.q as u128;
        let mut images = Vec::with_capacity(self.spec.n);
        for (b, &d) in self.blocks.iter().enumerate() {
            let qd1 = self.spec.units_order(d as u64)? as u128;
            let embed = qm1 / qd1;
            for i in 0..d {
                let mut sum: u128 = 0;
                let mut qj: u128 = 1;
                for j in 0..m as usize {
                    if (d - j % d) % d == i {
                        sum = (sum + qj) % qm1.max(1);
                    }
                    qj = qj * q % qm1.max(1);
                }
                if qm1 == 0 || !sum.is_multiple_of(embed) {
                    return Err(Error::IllDefinedHom(format!(
                        "norm sum {sum} not divisible by {embed}"
                    )));
                }
                let mut img = vec![0i64; self.blocks.len()];
                img[b] = ((sum / embed) % qd1) as i64;
                images.push(img);
            }
        }
        AbHom::new(source, target, images)
    }

    /// Orbit of a `T^F` coordinate tuple under `N(T)^F / T^F`: Frobenius
    /// inside each block and permutations of equal blocks. The same formulas
    /// describe the action on character exponent tuples.
    pub fn relative_weyl_orbit(&self, coords: &[u64]) -> Result<Vec<Vec<u64>>> {
        let g = self.rational_points()?;
        let moduli = g.moduli().to_vec();
        let q = self.spec.q as u128;
        let mut seen = BTreeSet::new();
        seen.insert(coords.to_vec());
        let mut stack = vec![coords.to_vec()];
        while let Some(c) = stack.pop() {
            let mut next = Vec::new();
            for (b, &m) in moduli.iter().enumerate() {
                let mut v = c.clone();
                v[b] = (v[b] as u128 * q % m as u128) as u64;
                next.push(v);
            }
            for b in 1..self.blocks.len() {
                if self.blocks[b] == self.blocks[b - 1] {
                    let mut v = c.clone();
                    v.swap(b, b - 1);
                    next.push(v);
                }
            }
            for v in next {
                if seen.insert(v.clone()) {
                    stack.push(v);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }
}

impl fmt::Display for TorusType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn block_orbit_residues(
    spec: GroupSpec,
    blocks: &[usize],
    coords: &[u64],
    level: u64,
    label: impl Fn() -> String,
) -> Result<Vec<u64>> {
    if level == 0 || blocks.iter().any(|&d| !level.is_multiple_of(d as u64)) {
        return Err(Error::InvalidLevel {
            torus: label(),
            level,
        });
    }
    let ql1 = spec.units_order(level)? as u128;
    let q = spec.q as u128;
    let mut out = Vec::with_capacity(spec.n);
    for (&d, &a) in blocks.iter().zip(coords) {
        let scale = ql1 / spec.units_order(d as u64)? as u128;
        let mut x = a as u128 * scale % ql1.max(1);
        for _ in 0..d {
            out.push(x as u64);
            x = x * q % ql1.max(1);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Per-torus outcome of the largeness test on `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusRatio {
    pub torus: TorusType,
    pub ratio: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QReport {
    pub spec: GroupSpec,
    /// `2^(-2|W| + 1)`.
    pub threshold: BigRational,
    pub tori: Vec<TorusRatio>,
    pub holds: bool,
}

/// Tests `|T^F - T^F_rs| / |T^F| < 2^(-2|W|+1)` strictly, for every torus.
pub fn check_q_condition(spec: GroupSpec) -> Result<QReport> {
    let w = spec.weyl_order();
    let denom = num_traits::pow(BigInt::from(2), (2 * w - 1) as usize);
    let threshold = BigRational::new(BigInt::one(), denom);
    let tori = spec
        .tori()
        .into_iter()
        .map(|torus| {
            let ratio = torus.rs_ratio()?;
            let holds = ratio < threshold;
            Ok(TorusRatio {
                torus,
                ratio,
                holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let holds = tori.iter().all(|t| t.holds);
    Ok(QReport {
        spec,
        threshold,
        tori,
        holds,
    })
}

/// Canonical label of a geometric conjugacy class: the sorted multiset of
/// lifted Frobenius-orbit residues at the reference level `L = lcm(1..n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeomClassId {
    pub level: u64,
    pub residues: Vec<u64>,
}

impl fmt::Display for GeomClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.residues.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}@{}", r.join(", "), self.level)
    }
}

/// Reference level for class labels: `lcm(1, ..., n)`.
pub fn reference_level(spec: GroupSpec) -> u64 {
    (1..=spec.n as u64).fold(1u64, |acc, d| acc.lcm(&d))
}

fn check_char_on(torus: &TorusType, chi: &AbChar) -> Result<()> {
    let g = torus.rational_points()?;
    if **chi.group() != *g {
        return Err(Error::ParentMismatch(format!(
            "character on {} used with torus {}",
            chi.group(),
            torus.label()
        )));
    }
    Ok(())
}

/// Normal-form classifier for `(T, theta)`.
pub fn geom_class_id(torus: &TorusType, chi: &AbChar) -> Result<GeomClassId> {
    check_char_on(torus, chi)?;
    let level = reference_level(torus.spec);
    let residues = block_orbit_residues(torus.spec, &torus.blocks, chi.cexps(), level, || {
        torus.label()
    })?;
    Ok(GeomClassId { level, residues })
}

/// Definitional test: pull both characters back along the norm maps to the
/// common level `m = lcm` of the twist orders and ask whether they lie in
/// one `S_n`-orbit under coordinate permutation.
pub fn geometric_conjugate(a: (&TorusType, &AbChar), b: (&TorusType, &AbChar)) -> Result<bool> {
    let (ta, ca) = a;
    let (tb, cb) = b;
    if ta.spec != tb.spec {
        return Err(Error::SpecMismatch(
            ta.spec.to_string(),
            tb.spec.to_string(),
        ));
    }
    check_char_on(ta, ca)?;
    check_char_on(tb, cb)?;
    let m = ta.twist_order().lcm(&tb.twist_order());
    let pa = abelian::pullback(ca, &ta.norm_hom(m)?)?;
    let pb = abelian::pullback(cb, &tb.norm_hom(m)?)?;
    let n = ta.spec.n;
    let transpositions: Vec<Vec<usize>> = (1..n)
        .map(|i| {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i - 1, i);
            p
        })
        .collect();
    let orbit = abelian::orbit(&pa, &transpositions)?;
    Ok(orbit.iter().any(|x| x.cexps() == pb.cexps()))
}
