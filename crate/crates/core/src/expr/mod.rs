//! Multivariate real expressions over positional variables `x1, x2, ...`.

mod diff;
mod parse;
mod print;

use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use parse::{parse, parse_with_hint, ParseError, ParseErrorKind, MAX_EXPONENT};

/// Expression tree. Variable indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Const(T),
    Var(usize),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Neg(Box<Expr<T>>),
    Pow(Box<Expr<T>>, u32),
}

impl<T: Scalar> Expr<T> {
    pub fn constant(value: T) -> Self {
        Expr::Const(value)
    }

    /// # Panics
    /// If `index` is 0.
    pub fn var(index: usize) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        Expr::Var(index)
    }

    pub fn zero() -> Self {
        Expr::Const(T::zero())
    }

    pub fn one() -> Self {
        Expr::Const(T::one())
    }

    /// Largest variable index used, 0 for a constant expression.
    pub fn dim(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(k) => *k,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.dim().max(b.dim())
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.dim(),
        }
    }

    pub fn as_const(&self) -> Option<&T> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one_const(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    /// Evaluates at `point`; `point[k-1]` is the value of `xk`.
    pub fn evaluate(&self, point: &[T]) -> Result<T> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var(k) => point
                .get(k - 1)
                .cloned()
                .ok_or(Error::PointTooShort { need: *k, got: point.len() })?,
            Expr::Add(a, b) => a.evaluate(point)? + b.evaluate(point)?,
            Expr::Sub(a, b) => a.evaluate(point)? - b.evaluate(point)?,
            Expr::Mul(a, b) => a.evaluate(point)? * b.evaluate(point)?,
            Expr::Div(a, b) => {
                let num = a.evaluate(point)?;
                let den = b.evaluate(point)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                num / den
            }
            Expr::Neg(a) => -a.evaluate(point)?,
            Expr::Pow(a, e) => num_traits::pow(a.evaluate(point)?, *e as usize),
        })
    }

    /// Rebuilds the tree with every constant converted by `f`.
    pub fn map_scalar<U: Scalar>(&self, f: &impl Fn(&T) -> U) -> Expr<U> {
        let bx = |e: &Expr<T>| Box::new(e.map_scalar(f));
        match self {
            Expr::Const(c) => Expr::Const(f(c)),
            Expr::Var(k) => Expr::Var(*k),
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
            Expr::Div(a, b) => Expr::Div(bx(a), bx(b)),
            Expr::Neg(a) => Expr::Neg(bx(a)),
            Expr::Pow(a, e) => Expr::Pow(bx(a), *e),
        }
    }

    /// Same tree with constants lifted to exact rationals.
    pub fn to_exact(&self) -> Option<Expr<BigRational>> {
        if !self.constants_finite() {
            return None;
        }
        Some(self.map_scalar(&|c: &T| c.to_exact().expect("checked finite")))
    }

    fn constants_finite(&self) -> bool {
        match self {
            Expr::Const(c) => c.is_finite_value(),
            Expr::Var(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.constants_finite() && b.constants_finite()
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.constants_finite(),
        }
    }

    /// Sum of `terms`, left-associated, `0` when empty. No folding.
    pub fn sum_of(terms: impl IntoIterator<Item = Expr<T>>) -> Self {
        let mut iter = terms.into_iter();
        match iter.next() {
            None => Expr::zero(),
            Some(first) => iter.fold(first, |acc, t| Expr::Add(Box::new(acc), Box::new(t))),
        }
    }

    // Simplifying constructors: constant folding and 0/1 elimination only.

    pub fn add(a: Self, b: Self) -> Self {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (a, b) if a.is_zero_const() => b,
            (a, b) if b.is_zero_const() => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Self, b: Self) -> Self {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            (a, b) if b.is_zero_const() => a,
            (a, b) if a.is_zero_const() => Expr::neg(b),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Self, b: Self) -> Self {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            (a, b) if a.is_zero_const() || b.is_zero_const() => Expr::zero(),
            (a, b) if a.is_one_const() => b,
            (a, b) if b.is_one_const() => a,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Self, b: Self) -> Self {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
            (a, b) if b.is_one_const() => a,
            (a, b) if a.is_zero_const() && !b.is_zero_const() => Expr::zero(),
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Self) -> Self {
        match a {
            Expr::Const(x) => Expr::Const(-x),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn pow(base: Self, exp: u32) -> Self {
        match (base, exp) {
            (_, 0) => Expr::one(),
            (b, 1) => b,
            (Expr::Const(x), e) => Expr::Const(num_traits::pow(x, e as usize)),
            (b, e) => Expr::Pow(Box::new(b), e),
        }
    }

    /// Bottom-up rebuild through the simplifying constructors.
    pub fn simplify(&self) -> Self {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::add(a.simplify(), b.simplify()),
            Expr::Sub(a, b) => Expr::sub(a.simplify(), b.simplify()),
            Expr::Mul(a, b) => Expr::mul(a.simplify(), b.simplify()),
            Expr::Div(a, b) => Expr::div(a.simplify(), b.simplify()),
            Expr::Neg(a) => Expr::neg(a.simplify()),
            Expr::Pow(a, e) => Expr::pow(a.simplify(), *e),
        }
    }
}

impl<T: Scalar> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl<T: Scalar> std::str::FromStr for Expr<T> {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}
