//! Least-squares objective for the polynomial ansatz.
//!
//! With samples `x_i`, `i = 1..N`:
//!
//! ```text
//! J = w_I  * mean_i r_I(x_i)^2
//!   + w_II * mean_i r_II(x_i)^2
//!   + w_O  * mean_i (u(u(x_i), ..., u(x_i)) - u(x_i))^2
//! ```
//!
//! `r_I` is equation (I) with `beta = n` and `r_II` is equation (II), both
//! linear in theta. The normalization `u(0) = 0`, `u(1, ..., 1) = 1` is
//! imposed by eliminating the constant coefficient (fixed at 0) and the
//! `x_n` coefficient (`1 - sum of the others`). The optimizer works on the
//! remaining free coordinates.

use super::basis::MonomialBasis;
use crate::scalar::Real;

/// Per-sample precomputed features.
struct Sample<T> {
    phi: Vec<T>,
    psi_i: Vec<T>,
    psi_ii: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights<T> {
    pub eq_i: T,
    pub eq_ii: T,
    pub ouroboros: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub objective: T,
    /// Unweighted mean squares.
    pub eq_i: T,
    pub eq_ii: T,
    pub ouroboros: T,
}

pub struct Objective<T> {
    basis: MonomialBasis,
    degrees: Vec<u32>,
    samples: Vec<Sample<T>>,
    weights: Weights<T>,
    /// Basis indices of the free coordinates.
    free: Vec<usize>,
    /// Basis index of `x_n`, the eliminated degree-1 coordinate.
    pinned: usize,
}

impl<T: Real> Objective<T> {
    pub fn new(basis: MonomialBasis, points: &[Vec<T>], weights: Weights<T>) -> Self {
        let n = basis.n();
        let nf = T::from_index(n);
        let samples = points
            .iter()
            .map(|x| {
                let phi = basis.values(x);
                let partials: Vec<Vec<T>> = (1..=n).map(|k| basis.partials(x, k)).collect();
                let psi_i = (0..basis.len())
                    .map(|m| {
                        let total = partials.iter().fold(T::zero(), |acc, p| acc + p[m]);
                        total - nf * partials[n - 1][m]
                    })
                    .collect();
                let psi_ii = (0..basis.len())
                    .map(|m| {
                        partials.iter().enumerate().fold(T::zero(), |acc, (k, p)| {
                            if k % 2 == 0 {
                                acc - p[m]
                            } else {
                                acc + p[m]
                            }
                        })
                    })
                    .collect();
                Sample { phi, psi_i, psi_ii }
            })
            .collect();
        let degrees = (0..basis.len()).map(|m| basis.total_degree(m)).collect();
        let pinned = n;
        let free = (1..basis.len()).filter(|&m| m != pinned).collect();
        Self { basis, degrees, samples, weights, free, pinned }
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn free_dim(&self) -> usize {
        self.free.len()
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn theta_from_free(&self, z: &[T]) -> Vec<T> {
        assert_eq!(z.len(), self.free.len());
        let mut theta = vec![T::zero(); self.basis.len()];
        let mut rest = T::zero();
        for (&m, &v) in self.free.iter().zip(z) {
            theta[m] = v;
            rest = rest + v;
        }
        theta[self.pinned] = T::one() - rest;
        theta
    }

    /// Drops the eliminated coordinates. Only meaningful for a theta that
    /// already satisfies the normalization.
    pub fn free_from_theta(&self, theta: &[T]) -> Vec<T> {
        self.free.iter().map(|&m| theta[m]).collect()
    }

    /// Theta of the arithmetic mean: `1/n` on each degree-1 slot.
    pub fn mean_theta(&self) -> Vec<T> {
        let n = self.basis.n();
        let mut theta = vec![T::zero(); self.basis.len()];
        for slot in theta.iter_mut().skip(1).take(n) {
            *slot = T::one() / T::from_index(n);
        }
        theta
    }

    pub fn mean_free(&self) -> Vec<T> {
        self.free_from_theta(&self.mean_theta())
    }

    /// `g(t) = u(t, ..., t)` and `g'(t)` for a full theta.
    fn diagonal(&self, theta: &[T], t: T) -> (T, T) {
        let mut g = T::zero();
        let mut dg = T::zero();
        for (m, &c) in theta.iter().enumerate() {
            let d = self.degrees[m] as i32;
            g = g + c * t.powi(d);
            if d > 0 {
                dg = dg + c * T::from_index(d as usize) * t.powi(d - 1);
            }
        }
        (g, dg)
    }

    fn dot(a: &[T], b: &[T]) -> T {
        a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
    }

    /// Objective and its parts at a full theta (no normalization assumed).
    pub fn evaluate_theta(&self, theta: &[T]) -> Evaluation<T> {
        let mut sums = [T::zero(); 3];
        for s in &self.samples {
            let r1 = Self::dot(theta, &s.psi_i);
            let r2 = Self::dot(theta, &s.psi_ii);
            let u = Self::dot(theta, &s.phi);
            let (g, _) = self.diagonal(theta, u);
            let d = g - u;
            sums[0] = sums[0] + r1 * r1;
            sums[1] = sums[1] + r2 * r2;
            sums[2] = sums[2] + d * d;
        }
        let count = T::from_index(self.samples.len());
        let [a, b, c] = sums.map(|v| v / count);
        Evaluation {
            objective: self.weights.eq_i * a + self.weights.eq_ii * b + self.weights.ouroboros * c,
            eq_i: a,
            eq_ii: b,
            ouroboros: c,
        }
    }

    pub fn evaluate_free(&self, z: &[T]) -> Evaluation<T> {
        self.evaluate_theta(&self.theta_from_free(z))
    }

    /// Stacked residual vector `r` with `J = |r|^2`, and its Jacobian with
    /// respect to the free coordinates (row-major, `3N x free_dim`).
    pub fn residuals_and_jacobian(&self, z: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
        let theta = self.theta_from_free(z);
        let count = T::from_index(self.samples.len());
        let s1 = (self.weights.eq_i / count).sqrt();
        let s2 = (self.weights.eq_ii / count).sqrt();
        let s3 = (self.weights.ouroboros / count).sqrt();
        let nsamples = self.samples.len();
        let mut r = Vec::with_capacity(3 * nsamples);
        let mut jac = Vec::with_capacity(3 * nsamples);

        // d theta_m / d z_j = [m == free_j] - [m == pinned]
        let project = |full: &dyn Fn(usize) -> T| -> Vec<T> {
            let pinned = full(self.pinned);
            self.free.iter().map(|&m| full(m) - pinned).collect()
        };

        for s in &self.samples {
            r.push(s1 * Self::dot(&theta, &s.psi_i));
            jac.push(project(&|m| s1 * s.psi_i[m]));
        }
        for s in &self.samples {
            r.push(s2 * Self::dot(&theta, &s.psi_ii));
            jac.push(project(&|m| s2 * s.psi_ii[m]));
        }
        for s in &self.samples {
            let u = Self::dot(&theta, &s.phi);
            let (g, dg) = self.diagonal(&theta, u);
            r.push(s3 * (g - u));
            // d/d theta_m [g(u) - u] = u^deg(m) + (g'(u) - 1) * phi_m
            jac.push(project(&|m| s3 * (u.powi(self.degrees[m] as i32) + (dg - T::one()) * s.phi[m])));
        }
        (r, jac)
    }

    /// `J` and `dJ/dz`.
    pub fn value_and_gradient(&self, z: &[T]) -> (T, Vec<T>) {
        let (r, jac) = self.residuals_and_jacobian(z);
        let j = r.iter().fold(T::zero(), |acc, &v| acc + v * v);
        let two = T::one() + T::one();
        let mut grad = vec![T::zero(); z.len()];
        for (ri, row) in r.iter().zip(&jac) {
            for (g, &a) in grad.iter_mut().zip(row) {
                *g = *g + two * *ri * a;
            }
        }
        (j, grad)
    }
}
