//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(phi(N)-1)`
//! after reduction modulo the cyclotomic polynomial, so two elements at the
//! same level are equal exactly when their coefficient vectors are equal.

mod matrix;
pub mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use matrix::{CycMatrix, SolveError};
pub use poly::{cyclotomic_poly, euler_phi, RootTable};

/// An element of `Q(zeta_N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    level: u64,
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero(level: u64) -> Self {
        assert!(level > 0, "cyclotomic level must be positive");
        let d = euler_phi(level) as usize;
        CycNum {
            level,
            coeffs: vec![BigRational::zero(); d],
        }
    }

    pub fn one(level: u64) -> Self {
        Self::from_rational(level, BigRational::one())
    }

    pub fn from_integer(level: u64, v: i64) -> Self {
        Self::from_rational(level, BigRational::from_integer(v.into()))
    }

    pub fn from_rational(level: u64, v: BigRational) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = v;
        z
    }

    /// `zeta_N^a`, with `a` reduced modulo `N`.
    pub fn root(level: u64, a: i64) -> Self {
        assert!(level > 0, "cyclotomic level must be positive");
        let e = a.rem_euclid(level as i64) as u64;
        let table = RootTable::get(level);
        CycNum {
            level,
            coeffs: table
                .root(e)
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    /// `sum c * zeta_N^e` over the given `(e, c)` pairs.
    pub fn from_root_sum(level: u64, terms: impl IntoIterator<Item = (u64, i64)>) -> Self {
        let table = RootTable::get(level);
        let mut acc = vec![0i128; table.degree()];
        for (e, c) in terms {
            if c == 0 {
                continue;
            }
            for (a, &r) in acc.iter_mut().zip(table.root(e)) {
                *a += c as i128 * r as i128;
            }
        }
        CycNum {
            level,
            coeffs: acc
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    /// Builds an element from power-basis coordinates (length `phi(level)`).
    pub fn from_coeffs(level: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        let d = euler_phi(level) as usize;
        if coeffs.len() != d {
            return Err(Error::Dimension(format!(
                "expected {d} power-basis coefficients at level {level}, got {}",
                coeffs.len()
            )));
        }
        Ok(CycNum { level, coeffs })
    }

    /// Builds an element from `numerator/denominator * zeta^power` triples;
    /// powers need not be reduced.
    pub fn from_triples(level: u64, triples: &[(BigInt, BigInt, u64)]) -> Result<Self> {
        if level == 0 {
            return Err(Error::ZeroLevel);
        }
        let table = RootTable::get(level);
        let mut coeffs = vec![BigRational::zero(); table.degree()];
        for (num, den, pow) in triples {
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let c = BigRational::new(num.clone(), den.clone());
            for (slot, &r) in coeffs.iter_mut().zip(table.root(*pow)) {
                if r != 0 {
                    *slot += &c * BigInt::from(r);
                }
            }
        }
        Ok(CycNum { level, coeffs })
    }

    /// Nonzero power-basis coordinates as `(numerator, denominator, power)`.
    pub fn to_triples(&self) -> Vec<(BigInt, BigInt, u64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.numer().clone(), c.denom().clone(), i as u64))
            .collect()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Power-basis coordinates as machine integers, when all are integral
    /// and fit.
    pub fn to_i64_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_integer() {
                    c.numer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    /// The rational `r` with `self == r * other`, if one exists.
    pub fn rational_ratio(&self, other: &CycNum) -> Result<Option<BigRational>> {
        self.check_level(other)?;
        let Some(k) = other.coeffs.iter().position(|c| !c.is_zero()) else {
            return Err(Error::DivisionByZero);
        };
        let r = &self.coeffs[k] / &other.coeffs[k];
        let proportional = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| *a == &r * b);
        Ok(proportional.then_some(r))
    }

    fn check_level(&self, other: &CycNum) -> Result<()> {
        if self.level != other.level {
            Err(Error::LevelMismatch(self.level, other.level))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &CycNum) -> Result<CycNum> {
        self.check_level(other)?;
        Ok(CycNum {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &CycNum) -> Result<CycNum> {
        self.check_level(other)?;
        Ok(CycNum {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &CycNum) -> Result<CycNum> {
        self.check_level(other)?;
        let table = RootTable::get(self.level);
        let d = table.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(CycNum {
            level: self.level,
            coeffs: reduce_rational(prod, &table),
        })
    }

    pub fn scalar_mul(&self, s: &BigRational) -> CycNum {
        CycNum {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplies by `zeta^e`.
    pub fn mul_root(&self, e: i64) -> CycNum {
        let table = RootTable::get(self.level);
        let shift = e.rem_euclid(self.level as i64) as u64;
        let mut out = vec![BigRational::zero(); table.degree()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &r) in out.iter_mut().zip(table.root(i as u64 + shift)) {
                if r != 0 {
                    *slot += c * BigInt::from(r);
                }
            }
        }
        CycNum {
            level: self.level,
            coeffs: out,
        }
    }

    /// Multiplicative inverse, via extended Euclid against `Phi_N`.
    pub fn inverse(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let table = RootTable::get(self.level);
        let modulus = poly::QPoly::from_coeffs(
            table
                .phi()
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        );
        let a = poly::QPoly::from_coeffs(self.coeffs.clone());
        let inv = a
            .inverse_mod(&modulus)
            .expect("cyclotomic polynomials are irreducible");
        let mut coeffs = inv.0;
        coeffs.resize(table.degree(), BigRational::zero());
        Ok(CycNum {
            level: self.level,
            coeffs,
        })
    }

    pub fn checked_div(&self, other: &CycNum) -> Result<CycNum> {
        self.checked_mul(&other.inverse()?)
    }

    /// The same field element expressed at level `target` (a multiple of the
    /// current level), via `zeta_N = zeta_M^(M/N)`.
    pub fn lift(&self, target: u64) -> Result<CycNum> {
        if target == 0 || !target.is_multiple_of(self.level) {
            return Err(Error::NonDivisibleLevel {
                from: self.level,
                to: target,
            });
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let step = target / self.level;
        let table = RootTable::get(target);
        let mut out = vec![BigRational::zero(); table.degree()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &r) in out.iter_mut().zip(table.root(i as u64 * step)) {
                if r != 0 {
                    *slot += c * BigInt::from(r);
                }
            }
        }
        Ok(CycNum {
            level: target,
            coeffs: out,
        })
    }

    /// Exact equality; errors when the levels differ.
    pub fn try_eq(&self, other: &CycNum) -> Result<bool> {
        self.check_level(other)?;
        Ok(self.coeffs == other.coeffs)
    }
}

/// Reduces a coefficient vector of arbitrary length modulo `Phi_N`.
fn reduce_rational(mut v: Vec<BigRational>, table: &Arc<RootTable>) -> Vec<BigRational> {
    let d = table.degree();
    let phi = table.phi();
    for i in (d..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[i]);
        for (j, &p) in phi.iter().enumerate().take(d) {
            if p != 0 {
                v[i - d + j] -= &c * BigInt::from(p);
            }
        }
    }
    v.resize(d, BigRational::zero());
    v
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CycNum> for &CycNum {
            type Output = CycNum;
            /// Panics on level mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &CycNum) -> CycNum {
                self.$checked(rhs).expect("cyclotomic level mismatch")
            }
        }
        impl $trait for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{i}", self.level)?,
                (_, false) => write!(f, "{mag}*z{}^{i}", self.level)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[{}]({self})", self.level)
    }
}
