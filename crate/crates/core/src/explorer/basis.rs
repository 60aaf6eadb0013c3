//! Graded monomial basis.
//!
//! Order: by total degree, then lexicographically descending in the
//! exponent vector. For `n = 2, d = 2` that is `1, x1, x2, x1^2, x1*x2, x2^2`.
//! The constant is index 0 and `x_k` is index `k`.

use serde::Serialize;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    n: usize,
    degree: u32,
    exponents: Vec<Vec<u32>>,
}

fn push_compositions(total: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        push_compositions(total - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// `C(n + d, d)`.
pub fn basis_len(n: usize, degree: u32) -> usize {
    let d = degree as usize;
    (1..=d).fold(1usize, |acc, i| acc * (n + i) / i)
}

impl MonomialBasis {
    pub fn new(n: usize, degree: u32) -> Self {
        assert!(n >= 1, "basis needs at least one variable");
        let mut exponents = Vec::with_capacity(basis_len(n, degree));
        for t in 0..=degree {
            push_compositions(t, n, &mut Vec::with_capacity(n), &mut exponents);
        }
        Self { n, degree, exponents }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn total_degree(&self, index: usize) -> u32 {
        self.exponents[index].iter().sum()
    }

    /// Printable name, e.g. `x1^2*x3`.
    pub fn name(&self, index: usize) -> String {
        let parts: Vec<String> = self.exponents[index]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| if e == 1 { format!("x{}", k + 1) } else { format!("x{}^{}", k + 1, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Values of every monomial at `x`.
    pub fn values<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.exponents
            .iter()
            .map(|m| m.iter().zip(x).fold(T::one(), |acc, (&e, &xi)| acc * xi.powi(e as i32)))
            .collect()
    }

    /// `d/dx_k` of every monomial at `x` (`k` is 1-based).
    pub fn partials<T: Real>(&self, x: &[T], k: usize) -> Vec<T> {
        self.exponents
            .iter()
            .map(|m| {
                let ek = m[k - 1];
                if ek == 0 {
                    return T::zero();
                }
                m.iter().zip(x).enumerate().fold(T::from_index(ek as usize), |acc, (j, (&e, &xi))| {
                    let e = if j == k - 1 { e - 1 } else { e };
                    acc * xi.powi(e as i32)
                })
            })
            .collect()
    }
}
