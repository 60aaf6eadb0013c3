//! Constructors for the linear families known to be Ouroboros or to solve
//! the transport equation `sum_{k<=beta} du/dx_k = beta * du/dx_n`.
//!
//! Constructors validate and reject; they never renormalize their input.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linear::LinearForm;
use crate::scalar::{display_value, Scalar};

pub const UNIT_SUM_TOL: f64 = 1e-12;

fn check_unit_sum<T: Scalar>(f: &LinearForm<T>) -> Result<()> {
    let sum = f.coefficient_sum();
    if (sum.clone() - T::one()).abs() > T::from_f64_lossy(UNIT_SUM_TOL) {
        return Err(Error::CoefficientSum { sum: display_value(&sum) });
    }
    Ok(())
}

/// `sum c_i x_i` with `sum c_i = 1`.
pub fn weighted_average<T: Scalar>(coeffs: Vec<T>) -> Result<LinearForm<T>> {
    let f = LinearForm::new(coeffs)?;
    check_unit_sum(&f)?;
    Ok(f)
}

/// All coefficients `1/n`.
pub fn arithmetic_mean<T: Scalar>(n: usize) -> Result<LinearForm<T>> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 1 });
    }
    let c = T::one() / T::from_index(n);
    LinearForm::new(vec![c; n])
}

/// The constant function `c` on an `n`-dimensional domain.
pub fn constant_fn<T: Scalar>(c: T, n: usize) -> Result<Expr<T>> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 1 });
    }
    if !c.is_finite_value() {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(Expr::Const(c))
}

/// `u(x) = mu_beta * x_n + sum_{k<n} c_k x_k` with
/// `mu_beta = (c_1 + ... + c_beta) / beta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop2Solution<T> {
    n: usize,
    beta: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> Prop2Solution<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// `c_1, ..., c_{n-1}`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn mu_beta(&self) -> T {
        T::sum_of(self.coeffs[..self.beta].iter().cloned()) / T::from_index(self.beta)
    }

    /// Expression form. The `x_n` coefficient is kept as the unevaluated
    /// quotient `(c_1 + ... + c_beta) / beta`, so an exact lift of the
    /// expression carries the exact average.
    pub fn to_expr(&self) -> Expr<T> {
        let head = self.coeffs[..self.beta].iter().map(|c| Expr::Const(c.clone()));
        let mu = Expr::Div(
            Box::new(Expr::sum_of(head)),
            Box::new(Expr::Const(T::from_index(self.beta))),
        );
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| Expr::Mul(Box::new(Expr::Const(c.clone())), Box::new(Expr::Var(i + 1))))
            .chain(std::iter::once(Expr::Mul(Box::new(mu), Box::new(Expr::Var(self.n)))));
        Expr::sum_of(terms)
    }

    pub fn to_linear_form(&self) -> LinearForm<T> {
        let mut c = self.coeffs.clone();
        c.push(self.mu_beta());
        LinearForm::new(c).expect("validated on construction")
    }
}

/// Builds the solution for `n = coeffs.len() + 1` and `1 <= beta <= n - 1`.
pub fn prop2_solution<T: Scalar>(coeffs: Vec<T>, beta: usize) -> Result<Prop2Solution<T>> {
    let n = coeffs.len() + 1;
    if beta == 0 || beta > n - 1 {
        return Err(Error::BetaOutOfRange { beta, max: n - 1 });
    }
    if let Some(index) = coeffs.iter().position(|c| !c.is_finite_value()) {
        return Err(Error::NonFinite { index });
    }
    Ok(Prop2Solution { n, beta, coeffs })
}

/// Member of the set of linear forms with `c_n = 1/n` and `sum c_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitSumMember<T> {
    form: LinearForm<T>,
}

impl<T: Scalar> UnitSumMember<T> {
    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn coeffs(&self) -> &[T] {
        self.form.coeffs()
    }

    /// The input coefficients unchanged.
    pub fn to_linear_form(&self) -> LinearForm<T> {
        self.form.clone()
    }

    /// Expression form with `c_n` written as `1/n` and `c_{n-1}` as
    /// `1 - 1/n - (c_1 + ... + c_{n-2})`, both unevaluated. Within the
    /// validation tolerance these equal the input coefficients, and an
    /// exact lift satisfies both constraints exactly.
    pub fn to_expr(&self) -> Expr<T> {
        let n = self.n();
        let inv_n = || Expr::Div(Box::new(Expr::one()), Box::new(Expr::Const(T::from_index(n))));
        let term = |c: Expr<T>, k: usize| Expr::Mul(Box::new(c), Box::new(Expr::Var(k)));
        let mut terms: Vec<Expr<T>> = Vec::with_capacity(n);
        if n >= 2 {
            let head = &self.form.coeffs()[..n - 2];
            terms.extend(head.iter().enumerate().map(|(i, c)| term(Expr::Const(c.clone()), i + 1)));
            let balance = Expr::Sub(
                Box::new(Expr::Sub(Box::new(Expr::one()), Box::new(inv_n()))),
                Box::new(Expr::sum_of(head.iter().map(|c| Expr::Const(c.clone())))),
            );
            terms.push(term(balance, n - 1));
        }
        terms.push(term(inv_n(), n));
        Expr::sum_of(terms)
    }
}

pub fn pde1_unit_sum_family<T: Scalar>(coeffs: Vec<T>) -> Result<UnitSumMember<T>> {
    let f = LinearForm::new(coeffs)?;
    let n = f.n();
    let expected = T::one() / T::from_index(n);
    let last = f.coeffs()[n - 1].clone();
    if (last.clone() - expected).abs() > T::from_f64_lossy(UNIT_SUM_TOL) {
        return Err(Error::LastCoefficient { found: display_value(&last), n });
    }
    check_unit_sum(&f)?;
    Ok(UnitSumMember { form: f })
}
