//! Deciding `f(f(x), ..., f(x)) = f(x)`.
//!
//! Linear forms are decided exactly from their coefficient sum. Anything
//! else is tested on a seeded sample set.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linear::LinearForm;
use crate::sampling::SampleDomain;
use crate::scalar::Scalar;

pub const DEFAULT_EXACT_TOL: f64 = 1e-12;
pub const DEFAULT_SAMPLED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsExact,
    HoldsSampled,
    Fails,
    /// The candidate could not be evaluated at some sample.
    EvaluationError,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::HoldsExact | Verdict::HoldsSampled)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuroborosReport<T> {
    pub verdict: Verdict,
    pub max_deviation: T,
    /// Point where the identity fails worst; present whenever the verdict is `fails`.
    pub witness: Option<Vec<T>>,
    /// `|f(f(w), ..., f(w)) - f(w)|` at the witness.
    pub witness_deviation: Option<T>,
    pub samples_used: usize,
    /// Whether every sampled `f(x)` stayed inside `[-R, R]`. Informational.
    pub range_contained: Option<bool>,
    pub error: Option<String>,
}

impl<T: Scalar> OuroborosReport<T> {
    pub fn to_f64(&self) -> OuroborosReport<f64> {
        OuroborosReport {
            verdict: self.verdict,
            max_deviation: self.max_deviation.to_f64_lossy(),
            witness: self.witness.as_ref().map(|w| w.iter().map(T::to_f64_lossy).collect()),
            witness_deviation: self.witness_deviation.as_ref().map(T::to_f64_lossy),
            samples_used: self.samples_used,
            range_contained: self.range_contained,
            error: self.error.clone(),
        }
    }
}

/// A function under test: either a linear form or a general expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate<T> {
    Linear(LinearForm<T>),
    Expr(Expr<T>),
}

impl<T: Scalar> Candidate<T> {
    pub fn to_expr(&self) -> Expr<T> {
        match self {
            Candidate::Linear(f) => f.to_expr(),
            Candidate::Expr(e) => e.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Candidate::Linear(f) => f.n(),
            Candidate::Expr(e) => e.dim(),
        }
    }
}

fn positive_tol<T: Scalar>(tol: &T) -> Result<()> {
    if *tol > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// Exact decision for a linear form.
///
/// Holds iff the coefficients sum to 1 (within `tol`) or the form is
/// identically zero. The zero form is Ouroboros too: `f(0, ..., 0) = 0`.
pub fn check_linear_exact<T: Scalar>(f: &LinearForm<T>, tol: T) -> Result<OuroborosReport<T>> {
    positive_tol(&tol)?;
    let sum = f.coefficient_sum();
    let deviation = (sum.clone() - T::one()).abs();
    let all_zero = f.coeffs().iter().all(|c| c.abs() <= tol);
    let holds = deviation <= tol || all_zero;
    let mut report = OuroborosReport {
        verdict: if holds { Verdict::HoldsExact } else { Verdict::Fails },
        max_deviation: if all_zero { T::zero() } else { deviation },
        witness: None,
        witness_deviation: None,
        samples_used: 0,
        range_contained: None,
        error: None,
    };
    if !holds {
        // f(f, ..., f) = sum * f(w), so any w with f(w) != 0 is a witness.
        let n = f.n();
        let witness = if !sum.is_zero() {
            vec![T::one(); n]
        } else {
            let (j, _) = f
                .coeffs()
                .iter()
                .enumerate()
                .fold((0, T::zero()), |(bj, bv), (j, c)| {
                    if c.abs() > bv {
                        (j, c.abs())
                    } else {
                        (bj, bv)
                    }
                });
            let mut w = vec![T::zero(); n];
            w[j] = T::one();
            w
        };
        let (y, fy) = diagonal_self_apply_linear(f, &witness)?;
        report.witness_deviation = Some((fy - y).abs());
        report.witness = Some(witness);
    }
    Ok(report)
}

fn diagonal_self_apply_linear<T: Scalar>(f: &LinearForm<T>, x: &[T]) -> Result<(T, T)> {
    let y = f.evaluate(x)?;
    let fy = f.evaluate(&vec![y.clone(); f.n()])?;
    Ok((y, fy))
}

/// Returns `(f(x), f(f(x), ..., f(x)))`; the diagonal point has `x.len()` coordinates.
pub fn diagonal_self_apply<T: Scalar>(f: &Expr<T>, x: &[T]) -> Result<(T, T)> {
    let y = f.evaluate(x)?;
    let fy = f.evaluate(&vec![y.clone(); x.len()])?;
    Ok((y, fy))
}

/// Sampled test over `dom`. A sample passes when
/// `|f(y, ..., y) - y| <= tol * (1 + |y|)` with `y = f(x)`.
pub fn check_sampled<T: Scalar>(f: &Expr<T>, dom: &SampleDomain, tol: T) -> Result<OuroborosReport<T>> {
    positive_tol(&tol)?;
    dom.validate()?;
    if f.dim() > dom.n {
        return Err(Error::DimensionMismatch { used: f.dim(), n: dom.n });
    }
    let radius = T::from_f64_lossy(dom.radius);
    let mut max_deviation = T::zero();
    let mut worst_failure: Option<(Vec<T>, T)> = None;
    let mut range_contained = true;

    for (i, x) in dom.points::<T>().into_iter().enumerate() {
        let (y, fy) = match diagonal_self_apply(f, &x) {
            Ok(pair) => pair,
            Err(err) => {
                return Ok(OuroborosReport {
                    verdict: Verdict::EvaluationError,
                    max_deviation,
                    witness: Some(x),
                    witness_deviation: None,
                    samples_used: i + 1,
                    range_contained: None,
                    error: Some(format!("sample {i}: {err}")),
                });
            }
        };
        if y.abs() > radius {
            range_contained = false;
        }
        let d = (fy - y.clone()).abs();
        let limit = tol.clone() * (T::one() + y.abs());
        if d > limit && worst_failure.as_ref().is_none_or(|(_, wd)| d > *wd) {
            worst_failure = Some((x, d.clone()));
        }
        if d > max_deviation {
            max_deviation = d;
        }
    }

    let (verdict, witness, witness_deviation) = match worst_failure {
        Some((w, d)) => (Verdict::Fails, Some(w), Some(d)),
        None => (Verdict::HoldsSampled, None, None),
    };
    Ok(OuroborosReport {
        verdict,
        max_deviation,
        witness,
        witness_deviation,
        samples_used: dom.count,
        range_contained: Some(range_contained),
        error: None,
    })
}
