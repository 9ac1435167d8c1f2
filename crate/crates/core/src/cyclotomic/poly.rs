//! Integer polynomials: cyclotomic polynomials, reduction tables for roots of
//! unity, and the small amount of `Z[x]` / `Q[x]` arithmetic needed by the
//! determinant and inversion routines.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Exact division of `num` by the monic polynomial `den` (ascending
/// coefficients). Panics if the division leaves a remainder.
fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    assert_eq!(*den.last().unwrap(), 1, "divisor must be monic");
    let mut rem = num.to_vec();
    if rem.len() <= dn {
        assert!(rem.iter().all(|&c| c == 0), "inexact polynomial division");
        return vec![0];
    }
    let mut quot = vec![0i64; rem.len() - dn];
    for i in (dn..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dn] = c;
        for (j, &d) in den.iter().enumerate() {
            let idx = i - dn + j;
            rem[idx] = rem[idx]
                .checked_sub(c.checked_mul(d).expect("cyclotomic coefficient overflow"))
                .expect("cyclotomic coefficient overflow");
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "inexact polynomial division");
    quot
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The `n`-th cyclotomic polynomial, ascending coefficients, computed by
/// dividing `x^n - 1` by `Phi_d` for every proper divisor `d` of `n`.
///
/// Panics if `n == 0`.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    cyclotomic_poly_shared(n).as_ref().clone()
}

pub(crate) fn cyclotomic_poly_shared(n: u64) -> Arc<Vec<i64>> {
    assert!(n > 0, "cyclotomic_poly: n must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let poly = if n == 1 {
        vec![-1, 1]
    } else {
        let mut acc = vec![0i64; n as usize + 1];
        acc[0] = -1;
        acc[n as usize] = 1;
        for d in divisors(n) {
            if d == n {
                continue;
            }
            acc = exact_div_monic(&acc, &cyclotomic_poly_shared(d));
        }
        acc
    };
    let poly = Arc::new(poly);
    phi_cache().lock().unwrap().insert(n, poly.clone());
    poly
}

/// Power-basis coordinates of every `N`-th root of unity, reduced modulo
/// `Phi_N`. Row `e` holds the coordinates of `zeta_N^e`.
#[derive(Debug)]
pub struct RootTable {
    level: u64,
    degree: usize,
    phi: Arc<Vec<i64>>,
    roots: Vec<Vec<i64>>,
}

impl RootTable {
    fn build(level: u64) -> Self {
        let phi = cyclotomic_poly_shared(level);
        let degree = phi.len() - 1;
        let mut roots = Vec::with_capacity(level as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..level {
            roots.push(cur.clone());
            // multiply by x and reduce: x^degree = -sum phi[j] x^j
            let top = cur[degree - 1];
            for j in (1..degree).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for j in 0..degree {
                    cur[j] = cur[j]
                        .checked_sub(top.checked_mul(phi[j]).expect("root table overflow"))
                        .expect("root table overflow");
                }
            }
        }
        RootTable {
            level,
            degree,
            phi,
            roots,
        }
    }

    /// Shared table for `level`, built once per process.
    pub fn get(level: u64) -> Arc<RootTable> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<RootTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().unwrap().get(&level) {
            return t.clone();
        }
        let table = Arc::new(RootTable::build(level));
        cache.lock().unwrap().insert(level, table.clone());
        table
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `phi(level)`, the dimension of the power basis.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn phi(&self) -> &[i64] {
        &self.phi
    }

    /// Coordinates of `zeta^e`, `e` taken modulo the level.
    #[inline]
    pub fn root(&self, e: u64) -> &[i64] {
        &self.roots[(e % self.level) as usize]
    }
}

/// Dense polynomial with `BigInt` coefficients, ascending order, no trailing
/// zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct ZPoly(pub Vec<BigInt>);

impl ZPoly {
    pub fn from_coeffs(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        ZPoly(c)
    }

    pub fn one() -> Self {
        ZPoly(vec![BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ZPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        ZPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        ZPoly::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        ZPoly(self.0.iter().map(|c| -c).collect())
    }

    /// Exact quotient in `Z[x]`. Panics when `other` does not divide `self`.
    pub fn exact_div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return ZPoly::default();
        }
        let dn = other.0.len() - 1;
        let lead = other.0.last().unwrap();
        let mut rem = self.0.clone();
        assert!(rem.len() > dn, "inexact polynomial division");
        let mut quot = vec![BigInt::zero(); rem.len() - dn];
        for i in (dn..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let (q, r) = rem[i].div_rem(lead);
            assert!(r.is_zero(), "inexact polynomial division");
            for (j, d) in other.0.iter().enumerate() {
                rem[i - dn + j] -= &q * d;
            }
            quot[i - dn] = q;
        }
        assert!(
            rem.iter().all(|c| c.is_zero()),
            "inexact polynomial division"
        );
        ZPoly::from_coeffs(quot)
    }

    /// Remainder modulo a monic integer polynomial.
    pub fn rem_monic(&self, modulus: &[i64]) -> Vec<BigInt> {
        let d = modulus.len() - 1;
        let mut rem = self.0.clone();
        if rem.len() < d {
            rem.resize(d, BigInt::zero());
            return rem;
        }
        for i in (d..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut rem[i]);
            for (j, &m) in modulus.iter().enumerate().take(d) {
                if m != 0 {
                    rem[i - d + j] -= &c * m;
                }
            }
        }
        rem.truncate(d);
        rem
    }
}

/// Dense polynomial over `Q`, used for extended Euclid when inverting.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_coeffs(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); len];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] -= b;
        }
        QPoly::from_coeffs(out)
    }

    pub fn div_rem(&self, other: &Self) -> (Self, Self) {
        assert!(!other.is_zero());
        if self.is_zero() || self.0.len() < other.0.len() {
            return (QPoly(vec![]), self.clone());
        }
        let dn = other.degree();
        let lead = other.0.last().unwrap().clone();
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); rem.len() - dn];
        for i in (dn..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / &lead;
            for (j, d) in other.0.iter().enumerate() {
                let t = &q * d;
                rem[i - dn + j] -= t;
            }
            quot[i - dn] = q;
        }
        (QPoly::from_coeffs(quot), QPoly::from_coeffs(rem))
    }

    /// Inverse of `self` modulo `modulus`, if the two are coprime.
    pub fn inverse_mod(&self, modulus: &Self) -> Option<Self> {
        // invariant: s_i * self == r_i (mod modulus)
        let (mut r0, mut r1) = (modulus.clone(), self.div_rem(modulus).1);
        let (mut s0, mut s1) = (QPoly(vec![]), QPoly(vec![BigRational::one()]));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.degree() != 0 {
            return None;
        }
        let c = r0.0[0].clone();
        let inv = QPoly(s0.0.into_iter().map(|x| x / &c).collect());
        Some(inv.div_rem(modulus).1)
    }
}

/// Least common multiple of the rational denominators.
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
