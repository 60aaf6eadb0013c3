//! Exact sparse multivariate polynomials over the rationals.
//!
//! Used to decide whether a residual expression is identically zero. Every
//! finite float is a dyadic rational, so lifting an `Expr<f64>` loses
//! nothing and the zero test is exact.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::expr::Expr;
use crate::scalar::Scalar;

/// Canonicalization gives up (returns `None`) beyond these sizes.
pub const MAX_TERMS: usize = 5_000;
pub const MAX_DEGREE: u32 = 256;

/// Exponent vector with trailing zeros trimmed; `[]` is the constant monomial.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn variable(k: usize) -> Self {
        let mut m = vec![0; k];
        m[k - 1] = 1;
        let mut p = Self::zero();
        p.add_term(m, BigRational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let m = trim(m);
        let slot = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let Some(&e) = m.get(k - 1) else { continue };
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[k - 1] -= 1;
            out.add_term(dm, c * BigRational::from_integer(e.into()));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn bounded_pow(&self, e: u32) -> Option<Self> {
        if self.degree().saturating_mul(e) > MAX_DEGREE {
            return None;
        }
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = within_limits(&acc * self)?;
        }
        Some(acc)
    }

    /// Canonical form of `e`, or `None` if `e` divides by a non-constant,
    /// contains a non-finite constant, or exceeds [`MAX_TERMS`] or
    /// [`MAX_DEGREE`].
    pub fn from_expr<T: Scalar>(e: &Expr<T>) -> Option<Self> {
        within_limits(match e {
            Expr::Const(c) => Self::constant(c.to_exact()?),
            Expr::Var(k) => Self::variable(*k),
            Expr::Add(a, b) => &Self::from_expr(a)? + &Self::from_expr(b)?,
            Expr::Sub(a, b) => &Self::from_expr(a)? - &Self::from_expr(b)?,
            Expr::Mul(a, b) => &Self::from_expr(a)? * &Self::from_expr(b)?,
            Expr::Div(a, b) => {
                let den = Self::from_expr(b)?.as_constant()?;
                if den.is_zero() {
                    return None;
                }
                let num = Self::from_expr(a)?;
                &num * &Self::constant(den.recip())
            }
            Expr::Neg(a) => -&Self::from_expr(a)?,
            Expr::Pow(a, n) => Self::from_expr(a)?.bounded_pow(*n)?,
        })
    }
}

fn within_limits(p: Polynomial) -> Option<Polynomial> {
    (p.terms.len() <= MAX_TERMS && p.degree() <= MAX_DEGREE).then_some(p)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let len = ma.len().max(mb.len());
                let m: Monomial = (0..len)
                    .map(|i| ma.get(i).copied().unwrap_or(0) + mb.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Polynomial {
        Polynomial::from_expr(&parse::<f64>(s).unwrap()).unwrap()
    }

    #[test]
    fn canonical_equality() {
        assert_eq!(p("(x1 + x2)^2"), p("x1^2 + 2*x1*x2 + x2^2"));
        assert_eq!(p("x1*x2 - x2*x1"), Polynomial::zero());
        assert!(p("x1/2 + x1/2 - x1").is_zero());
    }

    #[test]
    fn rounding_does_not_leak_into_the_zero_test() {
        // 0.1 + 0.2 != 0.3 in floats, and the lifted values differ too.
        assert!(!p("0.1 + 0.2 - 0.3").is_zero());
        assert!(p("0.1 + 0.2 - 0.2 - 0.1").is_zero());
    }

    #[test]
    fn non_polynomial_inputs() {
        assert!(Polynomial::from_expr(&parse::<f64>("1/x1").unwrap()).is_none());
        assert!(Polynomial::from_expr(&parse::<f64>("x1/(2-2)").unwrap()).is_none());
        assert!(Polynomial::from_expr(&parse::<f64>("x1/(1+1)").unwrap()).is_some());
        assert!(Polynomial::from_expr(&parse::<f64>("(x1^100)^3").unwrap()).is_none());
        assert!(Polynomial::from_expr(&parse::<f64>("(x1+x2+x3+x4+x5+x6)^12").unwrap()).is_none());
    }

    #[test]
    fn derivative_and_degree() {
        let q = p("x1^3*x2 + 5*x2");
        assert_eq!(q.degree(), 4);
        assert_eq!(q.derivative(1), p("3*x1^2*x2"));
        assert_eq!(q.derivative(2), p("x1^3 + 5"));
        assert!(q.derivative(3).is_zero());
    }
}
