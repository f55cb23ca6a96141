//! Exact rational linear algebra: fraction-free elimination, rank, reduced
//! row echelon form, and canonical kernel bases.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{primitive_integer_vector, rat_int, Integer, Rational};

/// A dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn new(cols: usize) -> RationalMatrix {
        RationalMatrix { cols, data: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<RationalMatrix> {
        let mut m = RationalMatrix::new(cols);
        for row in rows {
            m.push_row(row)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: Vec<Rational>) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::SpaceMismatch(format!(
                "row of width {} pushed to a matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.push(row);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.data.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.data[r][c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r]
    }

    /// Rows scaled to coprime integers (empty matrix handled trivially).
    fn cleared_rows(&self) -> Vec<Vec<Integer>> {
        self.data
            .iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .filter(|x| !x.is_zero())
                    .fold(Integer::one(), |acc, x| {
                        num_integer::Integer::lcm(&acc, x.denom())
                    });
                row.iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect()
    }

    /// Matrix rank by fraction-free (Bareiss) elimination over the integers.
    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Fraction-free echelon form; returns the reduced integer rows and the
    /// pivot column indices (which are independent of the input row order).
    fn echelon(&self) -> (Vec<Vec<Integer>>, Vec<usize>) {
        let mut m = self.cleared_rows();
        let rows = m.len();
        let mut pivots = Vec::new();
        let mut prev = Integer::one();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let pivot = m[r][c].clone();
            for i in 0..rows {
                if i <= r {
                    continue;
                }
                for k in 0..self.cols {
                    if k == c {
                        continue;
                    }
                    let t = &m[i][k] * &pivot - &m[i][c] * &m[r][k];
                    debug_assert!((&t % &prev).is_zero(), "Bareiss division is exact");
                    m[i][k] = t / &prev;
                }
                m[i][c] = Integer::zero();
            }
            prev = pivot;
            pivots.push(c);
            r += 1;
        }
        m.truncate(pivots.len());
        (m, pivots)
    }

    /// Unique reduced row echelon form (zero rows dropped) with pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let (ech, pivots) = self.echelon();
        let mut rows: Vec<Vec<Rational>> = ech
            .into_iter()
            .map(|row| row.into_iter().map(rat_int).collect())
            .collect();
        for (r, &c) in pivots.iter().enumerate().rev() {
            let inv = rows[r][c].clone();
            for x in rows[r].iter_mut() {
                *x = &*x / &inv;
            }
            for i in 0..r {
                let factor = rows[i][c].clone();
                if factor.is_zero() {
                    continue;
                }
                for k in 0..self.cols {
                    let t = &rows[i][k] - &factor * &rows[r][k];
                    rows[i][k] = t;
                }
            }
        }
        (
            RationalMatrix { cols: self.cols, data: rows },
            pivots,
        )
    }

    /// Canonical basis of the right kernel: one primitive integer vector per
    /// free column, ordered by free column index. Independent of row order.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (rref, pivots) = self.rref();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -rref.entry(r, f).clone();
            }
            basis.push(primitive_integer_vector(&v));
        }
        basis
    }
}

/// Dot product of two equal-length slices.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Primitive integer generators of the annihilator of a single nonzero
/// vector: the `dim-1` functionals vanishing on `v` (kernel of the 1-row
/// matrix `v^T`).
pub fn annihilator(v: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::OutOfRange(
            "annihilator of the zero vector is the full dual space".into(),
        ));
    }
    let m = RationalMatrix::from_rows(v.len(), vec![v.to_vec()])?;
    Ok(m.kernel())
}
