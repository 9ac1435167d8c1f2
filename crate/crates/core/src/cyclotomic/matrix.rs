use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use super::poly::{denominator_lcm, RootTable, ZPoly};
use super::CycNum;
use crate::error::{Error, Result};

/// Dense matrix of cyclotomic numbers sharing one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycMatrix {
    level: u64,
    rows: usize,
    cols: usize,
    entries: Vec<CycNum>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the system is inconsistent")]
    NoSolution,
    #[error("the coefficient matrix does not have full column rank")]
    RankDeficient,
    #[error(transparent)]
    Arithmetic(#[from] Error),
}

impl CycMatrix {
    pub fn from_rows(level: u64, rows: Vec<Vec<CycNum>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for x in row {
                if x.level() != level {
                    return Err(Error::LevelMismatch(level, x.level()));
                }
                entries.push(x);
            }
        }
        Ok(CycMatrix {
            level,
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn identity(level: u64, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            CycNum::one(level)
                        } else {
                            CycNum::zero(level)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(level, rows).unwrap()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[CycNum] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &CycMatrix) -> Result<CycMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let rows = (0..self.rows)
            .map(|i| {
                (0..other.cols)
                    .map(|j| {
                        (0..self.cols).fold(CycNum::zero(self.level), |acc, k| {
                            &acc + &(self.get(i, k) * other.get(k, j))
                        })
                    })
                    .collect()
            })
            .collect();
        CycMatrix::from_rows(self.level, rows)
    }

    /// Exact determinant.
    ///
    /// Rows are scaled to integer polynomials, Bareiss elimination runs in
    /// `Z[x]` where every division is exact, and the result is reduced modulo
    /// `Phi_N` at the end (reduction is a ring homomorphism).
    pub fn det(&self) -> Result<CycNum> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let table = RootTable::get(self.level);
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<ZPoly>> = (0..n)
            .map(|i| {
                let row = self.row(i);
                let l = denominator_lcm(row.iter().flat_map(|x| x.coeffs()));
                scale *= &l;
                row.iter()
                    .map(|x| {
                        ZPoly::from_coeffs(
                            x.coeffs().iter().map(|c| (c * &l).to_integer()).collect(),
                        )
                    })
                    .collect()
            })
            .collect();
        if n == 0 {
            return Ok(CycNum::one(self.level));
        }
        let mut negate = false;
        let mut prev = ZPoly::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        negate = !negate;
                    }
                    None => return Ok(CycNum::zero(self.level)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = t.exact_div(&prev);
                }
            }
            prev = m[k][k].clone();
        }
        let mut d = m[n - 1][n - 1].clone();
        if negate {
            d = d.neg();
        }
        let coeffs = d
            .rem_monic(table.phi())
            .into_iter()
            .map(|c| BigRational::new(c, scale.clone()))
            .collect();
        CycNum::from_coeffs(self.level, coeffs)
    }

    /// Exact solution of `A x = b` for a matrix of full column rank.
    ///
    /// The first rows that are linearly independent form a square subsystem;
    /// it is solved exactly and the solution is then checked against every
    /// row. Inconsistent systems are reported, never approximated.
    pub fn solve_exact(&self, b: &[CycNum]) -> std::result::Result<Vec<CycNum>, SolveError> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has {} entries for {} rows",
                b.len(),
                self.rows
            ))
            .into());
        }
        for x in b {
            if x.level() != self.level {
                return Err(Error::LevelMismatch(self.level, x.level()).into());
            }
        }
        let c = self.cols;
        // Echelon rows (pivot column, coefficients with pivot normalized to 1, rhs).
        let mut pivots: Vec<(usize, Vec<CycNum>, CycNum)> = Vec::new();
        for i in 0..self.rows {
            if pivots.len() == c {
                break;
            }
            let mut row = self.row(i).to_vec();
            let mut rhs = b[i].clone();
            for (p, prow, prhs) in &pivots {
                if row[*p].is_zero() {
                    continue;
                }
                let f = row[*p].clone();
                for (x, y) in row.iter_mut().zip(prow) {
                    *x = &*x - &(&f * y);
                }
                rhs = &rhs - &(&f * prhs);
            }
            let Some(p) = row.iter().position(|x| !x.is_zero()) else {
                if !rhs.is_zero() {
                    return Err(SolveError::NoSolution);
                }
                continue;
            };
            let inv = row[p].inverse()?;
            let row: Vec<CycNum> = row.iter().map(|x| x * &inv).collect();
            let rhs = &rhs * &inv;
            pivots.push((p, row, rhs));
        }
        if pivots.len() < c {
            return Err(SolveError::RankDeficient);
        }
        // back substitution on the square subsystem
        let mut x = vec![CycNum::zero(self.level); c];
        pivots.sort_by_key(|(p, _, _)| *p);
        for (p, row, rhs) in pivots.iter().rev() {
            let mut v = rhs.clone();
            for j in p + 1..c {
                if !row[j].is_zero() {
                    v = &v - &(&row[j] * &x[j]);
                }
            }
            x[*p] = v;
        }
        for i in 0..self.rows {
            let lhs = self
                .row(i)
                .iter()
                .zip(&x)
                .fold(CycNum::zero(self.level), |acc, (a, xj)| &acc + &(a * xj));
            if lhs != b[i] {
                return Err(SolveError::NoSolution);
            }
        }
        Ok(x)
    }
}
