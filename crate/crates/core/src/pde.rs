//! Residuals of two constant-coefficient transport equations:
//!
//! ```text
//! (I)   sum_{k=1..beta} du/dx_k = beta * du/dx_n        1 <= beta <= n
//! (II)  sum_{k=1..n} (-1)^k du/dx_k = 0
//! ```
//!
//! Residuals are always LHS - RHS. A residual is "symbolically zero" when
//! its exact polynomial canonical form vanishes; the candidate's float
//! constants are lifted to rationals first, so rounding never decides it.

use num_rational::BigRational;
use serde::Serialize;

use crate::check::{check_linear_exact, check_sampled, Candidate, OuroborosReport, DEFAULT_EXACT_TOL, DEFAULT_SAMPLED_TOL};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::families::arithmetic_mean;
use crate::poly::Polynomial;
use crate::sampling::SampleDomain;
use crate::scalar::Scalar;

pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Bound on |symbolic - finite difference| reported as agreement.
pub const ORACLE_AGREEMENT_TOL: f64 = 1e-6;
/// Sampled acceptance bound used only when the symbolic test is inconclusive.
pub const SAMPLED_RESIDUAL_TOL: f64 = 1e-9;
pub const PROP3_TOL: f64 = 1e-12;
pub const RESIDUAL_CONVENTION: &str = "lhs_minus_rhs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "equation")]
pub enum PdeKind {
    #[serde(rename = "I")]
    EqI { beta: usize },
    #[serde(rename = "II")]
    EqII,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PdeSpec {
    #[serde(flatten)]
    pub kind: PdeKind,
    pub n: usize,
}

impl PdeSpec {
    pub fn eq_i(n: usize, beta: usize) -> Result<Self> {
        let spec = Self { kind: PdeKind::EqI { beta }, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn eq_ii(n: usize) -> Result<Self> {
        let spec = Self { kind: PdeKind::EqII, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::DimensionTooSmall { got: 0, min: 1 });
        }
        if let PdeKind::EqI { beta } = self.kind {
            if beta == 0 || beta > self.n {
                return Err(Error::BetaOutOfRange { beta, max: self.n });
            }
        }
        Ok(())
    }
}

/// `LHS - RHS` built from symbolic partial derivatives.
pub fn residual_expr<T: Scalar>(u: &Expr<T>, spec: &PdeSpec) -> Result<Expr<T>> {
    spec.validate()?;
    if u.dim() > spec.n {
        return Err(Error::DimensionMismatch { used: u.dim(), n: spec.n });
    }
    Ok(match spec.kind {
        PdeKind::EqI { beta } => {
            let lhs = (1..=beta).fold(Expr::zero(), |acc, k| Expr::add(acc, u.differentiate(k)));
            let rhs = Expr::mul(Expr::Const(T::from_index(beta)), u.differentiate(spec.n));
            Expr::sub(lhs, rhs)
        }
        PdeKind::EqII => (1..=spec.n).fold(Expr::zero(), |acc, k| {
            let d = u.differentiate(k);
            if k % 2 == 1 {
                Expr::sub(acc, d)
            } else {
                Expr::add(acc, d)
            }
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolicStatus {
    Zero,
    NonZero,
    /// The residual is not a polynomial (division by a variable expression).
    Inconclusive,
}

pub fn symbolic_status<T: Scalar>(u: &Expr<T>, spec: &PdeSpec) -> Result<SymbolicStatus> {
    let Some(exact) = u.to_exact() else {
        return Ok(SymbolicStatus::Inconclusive);
    };
    let r = residual_expr::<BigRational>(&exact, spec)?;
    Ok(match Polynomial::from_expr(&r) {
        Some(p) if p.is_zero() => SymbolicStatus::Zero,
        Some(_) => SymbolicStatus::NonZero,
        None => SymbolicStatus::Inconclusive,
    })
}

/// Central difference `(u(x + h e_k) - u(x - h e_k)) / 2h`.
pub fn finite_difference<T: Scalar>(u: &Expr<T>, k: usize, x: &[T], h: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if k == 0 || k > x.len() {
        return Err(Error::PointTooShort { need: k.max(1), got: x.len() });
    }
    let mut plus = x.to_vec();
    plus[k - 1] = plus[k - 1].clone() + h.clone();
    let mut minus = x.to_vec();
    minus[k - 1] = minus[k - 1].clone() - h.clone();
    let two = T::one() + T::one();
    Ok((u.evaluate(&plus)? - u.evaluate(&minus)?) / (two * h))
}

fn fd_residual<T: Scalar>(u: &Expr<T>, spec: &PdeSpec, x: &[T], h: &T) -> Result<T> {
    let d = |k: usize| finite_difference(u, k, x, h.clone());
    Ok(match spec.kind {
        PdeKind::EqI { beta } => {
            let mut lhs = T::zero();
            for k in 1..=beta {
                lhs = lhs + d(k)?;
            }
            lhs - T::from_index(beta) * d(spec.n)?
        }
        PdeKind::EqII => {
            let mut acc = T::zero();
            for k in 1..=spec.n {
                if k % 2 == 1 {
                    acc = acc - d(k)?;
                } else {
                    acc = acc + d(k)?;
                }
            }
            acc
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport<T> {
    pub spec: PdeSpec,
    pub convention: &'static str,
    pub residual: String,
    pub symbolic_zero: bool,
    pub symbolic_status: SymbolicStatus,
    pub max_abs_residual: T,
    pub max_abs_fd_residual: T,
    pub max_oracle_disagreement: T,
    pub oracle_agreement: bool,
    pub samples_used: usize,
    pub note: Option<String>,
}

impl<T: Scalar> ResidualReport<T> {
    /// Zero symbolically, or (when that test is inconclusive) small at every sample.
    pub fn holds(&self) -> bool {
        match self.symbolic_status {
            SymbolicStatus::Zero => true,
            SymbolicStatus::NonZero => false,
            SymbolicStatus::Inconclusive => self.max_abs_residual <= T::from_f64_lossy(SAMPLED_RESIDUAL_TOL),
        }
    }

    pub fn to_f64(&self) -> ResidualReport<f64> {
        ResidualReport {
            spec: self.spec,
            convention: self.convention,
            residual: self.residual.clone(),
            symbolic_zero: self.symbolic_zero,
            symbolic_status: self.symbolic_status,
            max_abs_residual: self.max_abs_residual.to_f64_lossy(),
            max_abs_fd_residual: self.max_abs_fd_residual.to_f64_lossy(),
            max_oracle_disagreement: self.max_oracle_disagreement.to_f64_lossy(),
            oracle_agreement: self.oracle_agreement,
            samples_used: self.samples_used,
            note: self.note.clone(),
        }
    }
}

fn sample_domain_for(spec: &PdeSpec, dom: &SampleDomain) -> Result<()> {
    dom.validate()?;
    if dom.n < spec.n {
        return Err(Error::DimensionMismatch { used: spec.n, n: dom.n });
    }
    Ok(())
}

/// Symbolic verdict plus two numerical routes over `dom`: the symbolic
/// residual evaluated at each sample, and central finite differences of `u`.
pub fn check_residual<T: Scalar>(u: &Expr<T>, spec: &PdeSpec, dom: &SampleDomain) -> Result<ResidualReport<T>> {
    let residual = residual_expr(u, spec)?;
    sample_domain_for(spec, dom)?;
    let status = symbolic_status(u, spec)?;
    let h = T::from_f64_lossy(DEFAULT_FD_STEP);
    let mut max_abs = T::zero();
    let mut max_fd = T::zero();
    let mut max_gap = T::zero();
    for x in dom.points::<T>() {
        let x = &x[..spec.n];
        let r = residual.evaluate(x)?;
        let fd = fd_residual(u, spec, x, &h)?;
        let gap = (r.clone() - fd.clone()).abs();
        max_abs = max_abs.max_of(r.abs());
        max_fd = max_fd.max_of(fd.abs());
        max_gap = max_gap.max_of(gap);
    }
    let note = (status == SymbolicStatus::Inconclusive)
        .then(|| "residual is not polynomial; verdict falls back to sampled residuals".to_string());
    Ok(ResidualReport {
        spec: *spec,
        convention: RESIDUAL_CONVENTION,
        residual: residual.to_string(),
        symbolic_zero: status == SymbolicStatus::Zero,
        symbolic_status: status,
        oracle_agreement: max_gap <= T::from_f64_lossy(ORACLE_AGREEMENT_TOL),
        max_abs_residual: max_abs,
        max_abs_fd_residual: max_fd,
        max_oracle_disagreement: max_gap,
        samples_used: dom.count,
        note,
    })
}

trait MaxOf {
    fn max_of(self, other: Self) -> Self;
}

impl<T: PartialOrd> MaxOf for T {
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Report<T> {
    pub holds: bool,
    pub odd_sum: T,
    pub even_sum: T,
}

/// Compares the odd-index and even-index coefficient sums (1-based) of an
/// even-dimensional linear form.
pub fn check_prop3<T: Scalar>(c: &[T], n: usize) -> Result<Prop3Report<T>> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n == 0 {
        return Err(Error::DimensionTooSmall { got: 0, min: 2 });
    }
    if c.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} coefficients, got {}", c.len())));
    }
    let odd_sum = T::sum_of(c.iter().step_by(2).cloned());
    let even_sum = T::sum_of(c.iter().skip(1).step_by(2).cloned());
    let holds = (odd_sum.clone() - even_sum.clone()).abs() <= T::from_f64_lossy(PROP3_TOL);
    Ok(Prop3Report { holds, odd_sum, even_sum })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialCondition<T> {
    pub value: Option<T>,
    pub holds: bool,
}

/// Both equations with `beta = n`, the point condition `u(0, ..., 0) = 0`,
/// and the Ouroboros property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemReport<T> {
    pub n: usize,
    pub eq_i: ResidualReport<T>,
    pub eq_ii: ResidualReport<T>,
    pub initial_condition: InitialCondition<T>,
    pub ouroboros: OuroborosReport<T>,
    pub eq_i_holds: bool,
    pub eq_ii_holds: bool,
    pub initial_condition_holds: bool,
    pub ouroboros_holds: bool,
    pub all_hold: bool,
}

impl<T: Scalar> SystemReport<T> {
    pub fn to_f64(&self) -> SystemReport<f64> {
        SystemReport {
            n: self.n,
            eq_i: self.eq_i.to_f64(),
            eq_ii: self.eq_ii.to_f64(),
            initial_condition: InitialCondition {
                value: self.initial_condition.value.as_ref().map(T::to_f64_lossy),
                holds: self.initial_condition.holds,
            },
            ouroboros: self.ouroboros.to_f64(),
            eq_i_holds: self.eq_i_holds,
            eq_ii_holds: self.eq_ii_holds,
            initial_condition_holds: self.initial_condition_holds,
            ouroboros_holds: self.ouroboros_holds,
            all_hold: self.all_hold,
        }
    }
}

pub fn check_system<T: Scalar>(u: &Candidate<T>, n: usize, dom: &SampleDomain) -> Result<SystemReport<T>> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    if u.dim() > n {
        return Err(Error::DimensionMismatch { used: u.dim(), n });
    }
    let expr = u.to_expr();
    let eq_i = check_residual(&expr, &PdeSpec::eq_i(n, n)?, dom)?;
    let eq_ii = check_residual(&expr, &PdeSpec::eq_ii(n)?, dom)?;
    let value = expr.evaluate(&vec![T::zero(); n]).ok();
    let initial_condition = InitialCondition { holds: value.as_ref().is_some_and(|v| v.is_zero()), value };
    let ouroboros = match u {
        Candidate::Linear(f) => check_linear_exact(f, T::from_f64_lossy(DEFAULT_EXACT_TOL))?,
        Candidate::Expr(e) => check_sampled(e, dom, T::from_f64_lossy(DEFAULT_SAMPLED_TOL))?,
    };
    let eq_i_holds = eq_i.holds();
    let eq_ii_holds = eq_ii.holds();
    let initial_condition_holds = initial_condition.holds;
    let ouroboros_holds = ouroboros.verdict.holds();
    Ok(SystemReport {
        n,
        all_hold: eq_i_holds && eq_ii_holds && initial_condition_holds && ouroboros_holds,
        eq_i,
        eq_ii,
        initial_condition,
        ouroboros,
        eq_i_holds,
        eq_ii_holds,
        initial_condition_holds,
        ouroboros_holds,
    })
}

/// The arithmetic mean in even dimension `n` against the full system.
pub fn verify_prop4<T: Scalar>(n: usize, dom: &SampleDomain) -> Result<SystemReport<T>> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall { got: n, min: 2 });
    }
    check_system(&Candidate::Linear(arithmetic_mean::<T>(n)?), n, dom)
}
