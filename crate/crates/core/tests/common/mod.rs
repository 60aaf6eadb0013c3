#![allow(dead_code)]

use ouroboros::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn monomial(coef: f64, exps: &[u32]) -> Expr<f64> {
    let mut e = Expr::Const(coef);
    for (k, &p) in exps.iter().enumerate() {
        let v = Expr::Var(k + 1);
        match p {
            0 => {}
            1 => e = Expr::Mul(Box::new(e), Box::new(v)),
            _ => e = Expr::Mul(Box::new(e), Box::new(Expr::Pow(Box::new(v), p))),
        }
    }
    e
}

/// Random polynomial in `x1..xn` of total degree at most `degree`,
/// coefficients uniform in `[-5, 5]`.
pub fn random_polynomial(rng: &mut impl Rng, n: usize, degree: u32) -> Expr<f64> {
    let terms = rng.random_range(1..=8);
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let total = rng.random_range(0..=degree);
        let mut exps = vec![0u32; n];
        for _ in 0..total {
            exps[rng.random_range(0..n)] += 1;
        }
        out.push(monomial(rng.random_range(-5.0..=5.0), &exps));
    }
    Expr::sum_of(out)
}

pub fn random_point(rng: &mut impl Rng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-radius..=radius)).collect()
}

/// `|a - b| / max(1, |a|)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}
