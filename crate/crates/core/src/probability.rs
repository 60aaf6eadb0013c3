//! Finite discrete random variables and the expectation functional.
//!
//! A functional `O` is Ouroboros when applying it to its own output returns
//! the same output, `O(O(f)) = O(f)`. Expectation is the motivating
//! instance: `E[X]` is a number, a number is a constant random variable,
//! and the expectation of a constant is that constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{display_value, Scalar};

pub const PROB_SUM_TOL: f64 = 1e-12;

/// Outcomes `x_i` with masses `p_i = P(X = x_i)`. Duplicate outcomes are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteRandomVariable<T> {
    values: Vec<T>,
    probs: Vec<T>,
}

fn validate_masses<T: Scalar>(masses: &[T]) -> Result<()> {
    for (index, p) in masses.iter().enumerate() {
        if !p.is_finite_value() || p.is_negative() || *p > T::one() {
            return Err(Error::ProbabilityOutOfRange { index, value: display_value(p) });
        }
    }
    let total = T::sum_of(masses.iter().cloned());
    if (total.clone() - T::one()).abs() > T::from_f64_lossy(PROB_SUM_TOL) {
        return Err(Error::ProbabilitySum(display_value(&total)));
    }
    Ok(())
}

impl<T: Scalar> DiscreteRandomVariable<T> {
    pub fn new(values: Vec<T>, probs: Vec<T>) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::LengthMismatch { values: values.len(), probs: probs.len() });
        }
        if values.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite { index });
        }
        validate_masses(&probs)?;
        Ok(Self { values, probs })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn expected_value(&self) -> T {
        T::sum_of(self.values.iter().zip(&self.probs).map(|(x, p)| x.clone() * p.clone()))
    }
}

/// `sum_i x_i P(X = x_i)`.
pub fn expected_value<T: Scalar>(x: &DiscreteRandomVariable<T>) -> T {
    x.expected_value()
}

/// The constant `c` as a random variable: one outcome with mass 1.
pub fn as_constant_rv<T: Scalar>(c: T) -> Result<DiscreteRandomVariable<T>> {
    DiscreteRandomVariable::new(vec![c], vec![T::one()])
}

/// `sum_j a_j 1_{A_j}` over a partition with masses `P(A_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimpleRandomVariable<T> {
    pieces: Vec<(T, T)>,
}

impl<T: Scalar> SimpleRandomVariable<T> {
    /// `pieces` are `(level, mass)` pairs.
    pub fn new(pieces: Vec<(T, T)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if let Some(index) = pieces.iter().position(|(a, _)| !a.is_finite_value()) {
            return Err(Error::NonFinite { index });
        }
        let masses: Vec<T> = pieces.iter().map(|(_, m)| m.clone()).collect();
        validate_masses(&masses)?;
        Ok(Self { pieces })
    }

    /// `c * 1_Omega`.
    pub fn indicator_of_whole_space(c: T) -> Self {
        Self { pieces: vec![(c, T::one())] }
    }

    pub fn pieces(&self) -> &[(T, T)] {
        &self.pieces
    }

    pub fn lebesgue_integral(&self) -> T {
        T::sum_of(self.pieces.iter().map(|(a, m)| a.clone() * m.clone()))
    }
}

pub fn lebesgue_integral<T: Scalar>(s: &SimpleRandomVariable<T>) -> T {
    s.lebesgue_integral()
}

/// A functional whose output can be fed back in as an input.
pub trait OuroborosFunctional<I> {
    type Output: Clone;

    fn apply(&self, input: &I) -> Result<Self::Output>;

    /// Views an output as an input.
    fn embed(&self, output: Self::Output) -> Result<I>;

    /// `(O(f), O(O(f)))`.
    fn self_apply(&self, input: &I) -> Result<(Self::Output, Self::Output)> {
        let once = self.apply(input)?;
        let twice = self.apply(&self.embed(once.clone())?)?;
        Ok((once, twice))
    }
}

/// `X -> E[X]`, with a number embedded as a constant random variable.
#[derive(Debug, Clone, Copy, Default)]
pub struct Expectation;

impl<T: Scalar> OuroborosFunctional<DiscreteRandomVariable<T>> for Expectation {
    type Output = T;

    fn apply(&self, input: &DiscreteRandomVariable<T>) -> Result<T> {
        Ok(input.expected_value())
    }

    fn embed(&self, output: T) -> Result<DiscreteRandomVariable<T>> {
        as_constant_rv(output)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport<T> {
    pub expected: T,
    pub expected_of_expected: T,
    pub deviation: T,
    pub holds: bool,
}

impl<T: Scalar> ExpectationReport<T> {
    pub fn to_f64(&self) -> ExpectationReport<f64> {
        ExpectationReport {
            expected: self.expected.to_f64_lossy(),
            expected_of_expected: self.expected_of_expected.to_f64_lossy(),
            deviation: self.deviation.to_f64_lossy(),
            holds: self.holds,
        }
    }
}

/// Tests `E[E[X]] = E[X]` within `tol`.
pub fn check_expectation_ouroboros<T: Scalar>(
    x: &DiscreteRandomVariable<T>,
    tol: T,
) -> Result<ExpectationReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (expected, expected_of_expected) = Expectation.self_apply(x)?;
    let deviation = (expected_of_expected.clone() - expected.clone()).abs();
    Ok(ExpectationReport { holds: deviation <= tol, expected, expected_of_expected, deviation })
}
