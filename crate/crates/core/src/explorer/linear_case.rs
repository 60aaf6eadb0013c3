//! Degree-1 specialization solved exactly.
//!
//! For `u = sum c_k x_k` the system reduces to three linear equations:
//!
//! ```text
//! sum_k c_k - n c_n = 0            (equation I, beta = n)
//! sum_k (-1)^k c_k  = 0            (equation II)
//! sum_k c_k         = 1            (Ouroboros for a nonzero form)
//! ```
//!
//! Row reduction over the rationals gives the affine solution set.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// `{ particular + sum_j t_j directions[j] }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineSolutionSet<T> {
    pub n: usize,
    pub dimension: usize,
    pub particular: Vec<T>,
    pub directions: Vec<Vec<T>>,
}

fn constraint_rows(n: usize) -> Vec<(Vec<BigRational>, BigRational)> {
    let int = |v: i64| BigRational::from_integer(v.into());
    let eq_i = (1..=n).map(|k| if k == n { int(1 - n as i64) } else { int(1) }).collect();
    let eq_ii = (1..=n).map(|k| if k % 2 == 1 { int(-1) } else { int(1) }).collect();
    let sum = vec![int(1); n];
    vec![(eq_i, int(0)), (eq_ii, int(0)), (sum, int(1))]
}

/// Reduced row echelon form; returns pivot columns.
fn rref(rows: &mut [(Vec<BigRational>, BigRational)], n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pick) = (row..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(row, pick);
        let inv = rows[row].0[col].recip();
        for v in rows[row].0.iter_mut() {
            *v *= &inv;
        }
        rows[row].1 *= &inv;
        for i in 0..rows.len() {
            if i == row || rows[i].0[col].is_zero() {
                continue;
            }
            let factor = rows[i].0[col].clone();
            let (pivot_coeffs, pivot_rhs) = rows[row].clone();
            for (v, p) in rows[i].0.iter_mut().zip(&pivot_coeffs) {
                *v -= &factor * p;
            }
            rows[i].1 -= &factor * &pivot_rhs;
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    pivots
}

pub fn linear_case_exact<T: Scalar>(n: usize) -> Result<AffineSolutionSet<T>> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 2 });
    }
    let mut rows = constraint_rows(n);
    let pivots = rref(&mut rows, n);
    // Consistency: no zero row with nonzero right-hand side remains.
    debug_assert!(rows.iter().all(|(c, b)| !c.iter().all(Zero::is_zero) || b.is_zero()));

    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![BigRational::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = rows[r].1.clone();
    }
    let directions: Vec<Vec<BigRational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r].0[f].clone();
            }
            v
        })
        .collect();
    let conv = |v: &Vec<BigRational>| v.iter().map(T::from_exact).collect::<Vec<T>>();
    Ok(AffineSolutionSet {
        n,
        dimension: directions.len(),
        particular: conv(&particular),
        directions: directions.iter().map(conv).collect(),
    })
}

impl AffineSolutionSet<BigRational> {
    /// Exact membership: every constraint holds with equality.
    pub fn contains_exact(&self, c: &[BigRational]) -> bool {
        c.len() == self.n
            && constraint_rows(self.n).iter().all(|(row, rhs)| {
                let lhs = row.iter().zip(c).fold(BigRational::zero(), |acc, (a, x)| acc + a * x);
                (&lhs - rhs).abs().is_zero()
            })
    }
}

impl<T: Real> AffineSolutionSet<T> {
    /// Euclidean distance from `point` to the set.
    pub fn distance(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.n);
        // Orthonormalize the directions (modified Gram-Schmidt).
        let mut basis: Vec<Vec<T>> = Vec::new();
        for d in &self.directions {
            let mut v = d.clone();
            for q in &basis {
                let proj = dot(&v, q);
                for (a, &b) in v.iter_mut().zip(q) {
                    *a = *a - proj * b;
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > T::epsilon() {
                basis.push(v.into_iter().map(|a| a / norm).collect());
            }
        }
        let mut diff: Vec<T> = point.iter().zip(&self.particular).map(|(&a, &b)| a - b).collect();
        for q in &basis {
            let proj = dot(&diff, q);
            for (a, &b) in diff.iter_mut().zip(q) {
                *a = *a - proj * b;
            }
        }
        dot(&diff, &diff).sqrt()
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
