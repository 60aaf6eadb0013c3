use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::Scalar;

/// `u(x) = c1*x1 + ... + cn*xn`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearForm<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> LinearForm<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite_value()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient_sum(&self) -> T {
        T::sum_of(self.coeffs.iter().cloned())
    }

    pub fn evaluate(&self, point: &[T]) -> Result<T> {
        if point.len() < self.n() {
            return Err(Error::PointTooShort { need: self.n(), got: point.len() });
        }
        Ok(T::sum_of(self.coeffs.iter().zip(point).map(|(c, x)| c.clone() * x.clone())))
    }

    /// `c1*x1 + c2*x2 + ...` with every term kept, zero coefficients included.
    pub fn to_expr(&self) -> Expr<T> {
        Expr::sum_of(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| Expr::Mul(Box::new(Expr::Const(c.clone())), Box::new(Expr::Var(i + 1)))),
        )
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearForm<U> {
        LinearForm { coeffs: self.coeffs.iter().map(f).collect() }
    }
}
