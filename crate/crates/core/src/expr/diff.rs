use super::Expr;
use crate::scalar::Scalar;

impl<T: Scalar> Expr<T> {
    /// Exact partial derivative with respect to `xk`, simplified through the
    /// folding constructors. Derivatives of constants come out as `Const(0)`.
    ///
    /// # Panics
    /// If `k` is 0.
    pub fn differentiate(&self, k: usize) -> Expr<T> {
        assert!(k >= 1, "variable indices start at 1");
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(j) => {
                if *j == k {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(a, b) => Expr::add(a.differentiate(k), b.differentiate(k)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(k), b.differentiate(k)),
            Expr::Mul(a, b) => {
                let da = a.differentiate(k);
                let db = b.differentiate(k);
                Expr::add(
                    Expr::mul(da, b.simplify()),
                    Expr::mul(a.simplify(), db),
                )
            }
            Expr::Div(a, b) => {
                let da = a.differentiate(k);
                let db = b.differentiate(k);
                let b = b.simplify();
                if db.is_zero_const() {
                    return Expr::div(da, b);
                }
                Expr::div(
                    Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a.simplify(), db)),
                    Expr::pow(b, 2),
                )
            }
            Expr::Neg(a) => Expr::neg(a.differentiate(k)),
            Expr::Pow(a, e) => {
                let da = a.differentiate(k);
                if *e == 0 || da.is_zero_const() {
                    return Expr::zero();
                }
                let coeff = Expr::Const(T::from_index(*e as usize));
                Expr::mul(Expr::mul(coeff, Expr::pow(a.simplify(), e - 1)), da)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr};
    use crate::poly::Polynomial;

    fn e(s: &str) -> Expr<f64> {
        parse(s).unwrap()
    }

    #[test]
    fn linear_coefficients() {
        assert_eq!(e("0.25*x1 + 0.75*x2").differentiate(1), Expr::Const(0.25));
        assert_eq!(e("0.25*x1 + 0.75*x2").differentiate(2), Expr::Const(0.75));
    }

    #[test]
    fn unused_variable_is_zero() {
        assert_eq!(e("x1 + x2").differentiate(3), Expr::Const(0.0));
        assert_eq!(e("17").differentiate(1), Expr::Const(0.0));
    }

    #[test]
    fn product_and_power() {
        let d = e("x1^2*x2").differentiate(1);
        let got = Polynomial::from_expr(&d).unwrap();
        let want = Polynomial::from_expr(&e("2*x1*x2")).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn quotient_rule() {
        let d = e("x1/x2").differentiate(2);
        let v = d.evaluate(&[3.0, 2.0]).unwrap();
        assert!((v + 0.75).abs() < 1e-15);
        assert_eq!(e("x1/4").differentiate(1), Expr::Const(0.25));
    }

    #[test]
    fn negation_and_constants() {
        assert_eq!(e("-(3*x1)").differentiate(1), Expr::Const(-3.0));
        assert_eq!(e("(x2 + 1)^3").differentiate(1), Expr::Const(0.0));
    }
}
