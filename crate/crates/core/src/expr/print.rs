//! Printing that parses back to a structurally equal tree.

use std::fmt::{self, Write};

use super::Expr;
use crate::scalar::Scalar;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level<T: Scalar>(e: &Expr<T>) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Const(c) if c.is_negative() => UNARY,
        Expr::Pow(..) => POWER,
        Expr::Const(_) | Expr::Var(_) => ATOM,
    }
}

fn write_magnitude<T: Scalar>(c: &T, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mag = c.abs();
    match mag.decimal_literal() {
        Some(lit) => f.write_str(&lit),
        // Exact values without a terminating decimal, e.g. 1/3.
        None => write!(f, "({mag})"),
    }
}

fn write_at<T: Scalar>(e: &Expr<T>, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(e) < min {
        f.write_char('(')?;
        write_expr(e, f)?;
        f.write_char(')')
    } else {
        write_expr(e, f)
    }
}

pub(super) fn write_expr<T: Scalar>(e: &Expr<T>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => {
            if c.is_negative() {
                f.write_char('-')?;
            }
            write_magnitude(c, f)
        }
        Expr::Var(k) => write!(f, "x{k}"),
        Expr::Add(a, b) => {
            write_at(a, SUM, f)?;
            f.write_str(" + ")?;
            write_at(b, PRODUCT, f)
        }
        Expr::Sub(a, b) => {
            write_at(a, SUM, f)?;
            f.write_str(" - ")?;
            write_at(b, PRODUCT, f)
        }
        Expr::Mul(a, b) => {
            write_at(a, PRODUCT, f)?;
            f.write_char('*')?;
            write_at(b, UNARY, f)
        }
        Expr::Div(a, b) => {
            write_at(a, PRODUCT, f)?;
            f.write_char('/')?;
            write_at(b, UNARY, f)
        }
        Expr::Neg(a) => {
            f.write_char('-')?;
            match a.as_ref() {
                // "-3" would fold back into a negative literal.
                Expr::Const(c) if !c.is_negative() => {
                    f.write_char('(')?;
                    write_magnitude(c, f)?;
                    f.write_char(')')
                }
                inner => write_at(inner, UNARY, f),
            }
        }
        Expr::Pow(base, exp) => {
            write_at(base, ATOM, f)?;
            write!(f, "^{exp}")
        }
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use crate::expr::{parse, Expr};

    fn round_trip(s: &str) {
        let e: Expr<f64> = parse(s).unwrap();
        let printed = e.to_string();
        let again: Expr<f64> = parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
        assert_eq!(e, again, "{s} -> {printed}");
    }

    #[test]
    fn examples_round_trip() {
        for s in [
            "x1+x2",
            "-(x1)",
            "-3",
            "-(3)",
            "--3",
            "-3^2",
            "(-3)^2",
            "(x1^2)^3",
            "x1 - (x2 - x3)",
            "x1 / (x2 * x3)",
            "x1*(x2/x3)",
            "-(x1 + x2)*x3",
            "-x1^2",
            "--x1",
            "x1 - -2",
            "0.1*x1 + 1e-300*x2 - 1.5e300",
            "-(-(2))",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn readable_output() {
        let e: Expr<f64> = parse("0.25*x1 + 0.75*x2").unwrap();
        assert_eq!(e.to_string(), "0.25*x1 + 0.75*x2");
        let e: Expr<f64> = parse("-(x1)").unwrap();
        assert_eq!(e.to_string(), "-x1");
    }

    #[test]
    fn exact_constants_print_as_quotients() {
        let third = Expr::Const(BigRational::new(1.into(), 3.into()));
        assert_eq!(third.to_string(), "(1/3)");
        let back: Expr<BigRational> = parse(&third.to_string()).unwrap();
        assert_eq!(back.evaluate(&[]).unwrap(), BigRational::new(1.into(), 3.into()));
    }
}
