mod common;

use common::{random_point, random_polynomial, rng};
use ouroboros::check::{check_linear_exact, check_sampled, Verdict};
use ouroboros::families::{arithmetic_mean, constant_fn, pde1_unit_sum_family, prop2_solution, weighted_average};
use ouroboros::pde::{check_prop3, check_residual, symbolic_status, verify_prop4, PdeSpec, SymbolicStatus};
use ouroboros::{BigRational, LinearForm, SampleDomain};
use proptest::prelude::*;

/// Multiples of 2^-10 in [-5, 5]: every partial sum is exact in binary.
fn dyadic() -> impl Strategy<Value = f64> {
    (-5120i32..=5120).prop_map(|k| f64::from(k) / 1024.0)
}

/// Even-length dyadic vectors, half of them rebalanced so the odd and
/// even sums agree.
fn even_form() -> impl Strategy<Value = Vec<f64>> {
    ((1usize..=5), any::<bool>())
        .prop_flat_map(|(half, balance)| (prop::collection::vec(dyadic(), 2 * half), Just(balance)))
        .prop_map(|(mut c, balance)| {
            if balance {
                let odd: f64 = c.iter().step_by(2).sum();
                let even: f64 = c.iter().skip(1).step_by(2).sum();
                let last = c.len() - 1;
                c[last] += odd - even;
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prop2_solutions_solve_eq_i(
        (c, beta) in (2usize..=8).prop_flat_map(|n| (prop::collection::vec(-5.0f64..5.0, n - 1), 1..n)),
        seed in any::<u64>(),
    ) {
        let s = prop2_solution(c, beta).unwrap();
        let spec = PdeSpec::eq_i(s.n(), beta).unwrap();
        let u = s.to_expr();
        prop_assert_eq!(symbolic_status(&u, &spec).unwrap(), SymbolicStatus::Zero);
        let r = check_residual(&u, &spec, &SampleDomain::new(s.n(), 2.0, seed, 100).unwrap()).unwrap();
        prop_assert!(r.symbolic_zero && r.max_abs_residual <= 1e-12, "{}", r.max_abs_residual);
    }

    #[test]
    fn prop3_matches_eq_ii(c in even_form()) {
        let n = c.len();
        let prop3 = check_prop3(&c, n).unwrap().holds;
        let u = LinearForm::new(c).unwrap().to_expr();
        let status = symbolic_status(&u, &PdeSpec::eq_ii(n).unwrap()).unwrap();
        prop_assert_ne!(status, SymbolicStatus::Inconclusive);
        prop_assert_eq!(prop3, status == SymbolicStatus::Zero);
    }

    #[test]
    fn unit_sum_members_solve_eq_i_and_are_ouroboros(
        head in (1usize..=7).prop_flat_map(|m| prop::collection::vec(-5.0f64..5.0, m)),
    ) {
        let n = head.len() + 1;
        let last = 1.0 / n as f64;
        let mut c = head;
        let rest: f64 = c[..c.len() - 1].iter().sum();
        let k = c.len() - 1;
        c[k] = 1.0 - last - rest;
        c.push(last);
        let m = match pde1_unit_sum_family(c) {
            Ok(m) => m,
            // Rounding in the construction above can exceed the tolerance.
            Err(_) => return Ok(()),
        };
        let spec = PdeSpec::eq_i(n, n).unwrap();
        prop_assert_eq!(symbolic_status(&m.to_expr(), &spec).unwrap(), SymbolicStatus::Zero);
        prop_assert_eq!(check_linear_exact(&m.to_linear_form(), 1e-12).unwrap().verdict, Verdict::HoldsExact);
    }

    #[test]
    fn symbolic_and_difference_residuals_agree(seed in any::<u64>(), half in 1usize..=2, degree in 0u32..=4) {
        let n = 2 * half;
        let mut r = rng(seed);
        let u = random_polynomial(&mut r, n, degree);
        let dom = SampleDomain::new(n, 2.0, seed, 20).unwrap();
        for spec in [PdeSpec::eq_i(n, n).unwrap(), PdeSpec::eq_i(n, 1).unwrap(), PdeSpec::eq_ii(n).unwrap()] {
            let rep = check_residual(&u, &spec, &dom).unwrap();
            prop_assert!(rep.oracle_agreement, "{u}: disagreement {}", rep.max_oracle_disagreement);
            prop_assert!(rep.max_oracle_disagreement <= 1e-6);
        }
    }

    #[test]
    fn constructors_pass_their_checkers(n in 1usize..=12, c in -100.0f64..100.0, seed in any::<u64>()) {
        let mean = arithmetic_mean::<f64>(n).unwrap();
        prop_assert_eq!(check_linear_exact(&mean, 1e-12).unwrap().verdict, Verdict::HoldsExact);
        let same = weighted_average(vec![1.0 / n as f64; n]).unwrap();
        prop_assert_eq!(same.coeffs(), mean.coeffs());
        let k = constant_fn(c, n).unwrap();
        let dom = SampleDomain::new(n, 5.0, seed, 50).unwrap();
        prop_assert_eq!(check_sampled(&k, &dom, 1e-9).unwrap().verdict, Verdict::HoldsSampled);
    }
}

#[test]
fn the_mean_solves_the_system_in_every_even_dimension() {
    for n in [2, 4, 6, 8, 10] {
        let dom = SampleDomain::new(n, 2.0, 5, 50).unwrap();
        let r = verify_prop4::<f64>(n, &dom).unwrap();
        assert!(r.eq_i_holds && r.eq_ii_holds && r.initial_condition_holds && r.ouroboros_holds, "n={n}");
        assert!(r.eq_i.symbolic_zero && r.eq_ii.symbolic_zero);
        let exact = verify_prop4::<BigRational>(n, &dom).unwrap();
        assert!(exact.all_hold, "exact n={n}");
        assert_eq!(exact.ouroboros.verdict, Verdict::HoldsExact);
    }
    assert!(verify_prop4::<f64>(3, &SampleDomain::new(3, 2.0, 5, 50).unwrap()).is_err());
}

#[test]
fn residual_values_match_hand_differentiation() {
    let mut r = rng(1);
    let u = ouroboros::expr::parse::<f64>("x1^2*x2 - 3*x2").unwrap();
    let spec = PdeSpec::eq_i(2, 2).unwrap();
    let res = ouroboros::pde::residual_expr(&u, &spec).unwrap();
    for _ in 0..20 {
        let x = random_point(&mut r, 2, 2.0);
        // d/dx1 + d/dx2 - 2 d/dx2 = 2 x1 x2 - (x1^2 - 3)
        let want = 2.0 * x[0] * x[1] - (x[0] * x[0] - 3.0);
        assert!((res.evaluate(&x).unwrap() - want).abs() <= 1e-12);
    }
}
