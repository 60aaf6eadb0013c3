//! Levenberg-Marquardt with Marquardt diagonal scaling.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions<T> {
    pub max_iter: usize,
    /// Stop once `|r|^2` is at or below this.
    pub target: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome<T> {
    pub x: Vec<T>,
    pub cost: T,
    pub iterations: usize,
    pub stop: StopReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Target,
    IterationCap,
    /// No damped step reduces the cost any more.
    Stalled,
}

/// Solves `a x = b` for symmetric positive definite `a`; `None` if the
/// factorization breaks down.
pub fn cholesky_solve<T: Real>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let s = (0..i).fold(b[i], |acc, k| acc - l[i][k] * y[k]);
        y[i] = s / l[i][i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(y[i], |acc, k| acc - l[k][i] * x[k]);
        x[i] = s / l[i][i];
    }
    Some(x)
}

fn cost<T: Real>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

/// Minimizes `|r(x)|^2` from `x0`. `f` returns the residuals and the
/// row-major Jacobian.
pub fn minimize<T, F>(f: F, x0: Vec<T>, opts: LmOptions<T>) -> LmOutcome<T>
where
    T: Real,
    F: Fn(&[T]) -> (Vec<T>, Vec<Vec<T>>),
{
    let p = x0.len();
    let mut x = x0;
    let (mut r, mut jac) = f(&x);
    let mut c = cost(&r);
    let mut lambda = T::from_f64_lossy(1e-3);
    let lambda_min = T::from_f64_lossy(1e-15);
    let lambda_max = T::from_f64_lossy(1e16);
    let tiny = T::from_f64_lossy(1e-12);

    for iter in 0..opts.max_iter {
        if c <= opts.target {
            return LmOutcome { x, cost: c, iterations: iter, stop: StopReason::Target };
        }
        if !c.is_finite() {
            return LmOutcome { x, cost: c, iterations: iter, stop: StopReason::Stalled };
        }
        let mut jtj = vec![vec![T::zero(); p]; p];
        let mut jtr = vec![T::zero(); p];
        for (row, &ri) in jac.iter().zip(&r) {
            for i in 0..p {
                let a = row[i];
                if a == T::zero() {
                    continue;
                }
                jtr[i] = jtr[i] + a * ri;
                for j in 0..=i {
                    jtj[i][j] = jtj[i][j] + a * row[j];
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                jtj[j][i] = jtj[i][j];
            }
        }
        let scale = (0..p).fold(T::zero(), |m, i| m.max(jtj[i][i])).max(T::one());

        loop {
            let mut damped = jtj.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] = row[i] + lambda * (jtj[i][i] + tiny * scale);
            }
            let neg: Vec<T> = jtr.iter().map(|&g| -g).collect();
            let step = cholesky_solve(&damped, &neg);
            if let Some(step) = step {
                let trial: Vec<T> = x.iter().zip(&step).map(|(&a, &b)| a + b).collect();
                let (tr, tj) = f(&trial);
                let tc = cost(&tr);
                if tc.is_finite() && tc < c {
                    x = trial;
                    r = tr;
                    jac = tj;
                    c = tc;
                    lambda = (lambda / T::from_f64_lossy(3.0)).max(lambda_min);
                    break;
                }
            }
            lambda = lambda * T::from_f64_lossy(8.0);
            if lambda > lambda_max {
                return LmOutcome { x, cost: c, iterations: iter + 1, stop: StopReason::Stalled };
            }
        }
    }
    let stop = if c <= opts.target { StopReason::Target } else { StopReason::IterationCap };
    LmOutcome { x, cost: c, iterations: opts.max_iter, stop }
}
