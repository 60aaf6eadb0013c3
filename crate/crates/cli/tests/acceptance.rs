//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ouroboros::check::{check_linear_exact, check_sampled, diagonal_self_apply, Verdict};
use ouroboros::explorer::{explore, linear_case_exact, Classification, ExplorationConfig, Objective};
use ouroboros::expr::{parse, ParseErrorKind};
use ouroboros::families::prop2_solution;
use ouroboros::pde::{check_prop3, check_residual, finite_difference, symbolic_status, verify_prop4, PdeSpec, SymbolicStatus};
use ouroboros::probability::{check_expectation_ouroboros, DiscreteRandomVariable, SimpleRandomVariable};
use ouroboros::{BigRational, Expr, LinearForm, SampleDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

fn theorem() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = r.random_range(1..=10);
        let raw = loop {
            let c: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
            if c.iter().sum::<f64>().abs() >= 0.5 {
                break c;
            }
        };
        let s: f64 = raw.iter().sum();
        let f = LinearForm::new(raw.into_iter().map(|v| v / s).collect()).map_err(|e| e.to_string())?;
        let exact = check_linear_exact(&f, 1e-12).map_err(|e| e.to_string())?;
        ensure(exact.verdict == Verdict::HoldsExact, || format!("vector {i}: exact verdict {:?}", exact.verdict))?;
        let dom = SampleDomain::new(n, 10.0, 1000 + i, 200).map_err(|e| e.to_string())?;
        let rep = check_sampled(&f.to_expr(), &dom, 1e-9).map_err(|e| e.to_string())?;
        ensure(rep.max_deviation <= 1e-9 && rep.verdict.holds(), || {
            format!("vector {i}: sampled max deviation {}", rep.max_deviation)
        })?;
        worst = worst.max(rep.max_deviation);
    }
    Ok(format!("1000 vectors, exact holds for all, worst sampled deviation {worst:.3e}"))
}

fn converse() -> Outcome {
    let mut r = rng(2);
    let mut smallest = f64::INFINITY;
    for i in 0..1000 {
        let n = r.random_range(1..=10);
        let c = loop {
            let c: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
            if (c.iter().sum::<f64>() - 1.0).abs() >= 0.01 && c.iter().any(|v| v.abs() >= 0.01) {
                break c;
            }
        };
        let expr = LinearForm::new(c).map_err(|e| e.to_string())?.to_expr();
        let dom = SampleDomain::new(n, 10.0, 5000 + i, 200).map_err(|e| e.to_string())?;
        let rep = check_sampled(&expr, &dom, 1e-9).map_err(|e| e.to_string())?;
        ensure(rep.verdict == Verdict::Fails, || format!("vector {i}: verdict {:?}", rep.verdict))?;
        let w = rep.witness.ok_or_else(|| format!("vector {i}: no witness"))?;
        let (y, fy) = diagonal_self_apply(&expr, &w).map_err(|e| e.to_string())?;
        let gap = (fy - y).abs();
        ensure(gap > 1e-6, || format!("vector {i}: witness gap {gap}"))?;
        smallest = smallest.min(gap);
    }
    Ok(format!("1000 vectors fail with witnesses, smallest gap {smallest:.3e}"))
}

fn expectation() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let k = r.random_range(1..=20);
        let values: Vec<f64> = (0..k).map(|_| r.random_range(-1e3..1e3)).collect();
        let w: Vec<f64> = (0..k).map(|_| r.random_range(0.001..1.0)).collect();
        let total: f64 = w.iter().sum();
        let mut probs: Vec<f64> = w.iter().map(|x| x / total).collect();
        let drift = 1.0 - probs.iter().sum::<f64>();
        probs[0] += drift;
        let x = DiscreteRandomVariable::new(values, probs).map_err(|e| format!("rv {i}: {e}"))?;
        let rep = check_expectation_ouroboros(&x, 1e-12).map_err(|e| e.to_string())?;
        ensure(rep.holds && rep.deviation <= 1e-12, || format!("rv {i}: deviation {}", rep.deviation))?;
        worst = worst.max(rep.deviation);
    }
    for i in 0..100 {
        let c: f64 = r.random_range(-1e6..1e6);
        let got = SimpleRandomVariable::indicator_of_whole_space(c).lebesgue_integral();
        ensure(got == c, || format!("level {i}: integral {got} != {c}"))?;
    }
    Ok(format!("1000 random variables, worst deviation {worst:.3e}; 100 levels integrate exactly"))
}

fn prop2() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = r.random_range(2..=8);
        let beta = r.random_range(1..n);
        let c: Vec<f64> = (0..n - 1).map(|_| r.random_range(-5.0..=5.0)).collect();
        let s = prop2_solution(c, beta).map_err(|e| e.to_string())?;
        let u = s.to_expr();
        let spec = PdeSpec::eq_i(n, beta).map_err(|e| e.to_string())?;
        let status = symbolic_status(&u, &spec).map_err(|e| e.to_string())?;
        ensure(status == SymbolicStatus::Zero, || format!("instance {i}: symbolic status {status:?}"))?;
        let dom = SampleDomain::new(n, 2.0, 7000 + i, 100).map_err(|e| e.to_string())?;
        let rep = check_residual(&u, &spec, &dom).map_err(|e| e.to_string())?;
        ensure(rep.samples_used == 100 && rep.max_abs_residual <= 1e-12, || {
            format!("instance {i}: residual {}", rep.max_abs_residual)
        })?;
        worst = worst.max(rep.max_abs_residual);
    }
    Ok(format!("200 instances symbolically zero, worst sampled residual {worst:.3e}"))
}

fn prop3() -> Outcome {
    let mut r = rng(5);
    let mut disagreements = 0;
    let mut balanced = 0;
    for _ in 0..500 {
        let n = 2 * r.random_range(1..=5);
        // Multiples of 2^-10 keep every partial sum exact.
        let mut c: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(-5120i32..=5120)) / 1024.0).collect();
        if r.random_bool(0.5) {
            let odd: f64 = c.iter().step_by(2).sum();
            let even: f64 = c.iter().skip(1).step_by(2).sum();
            c[n - 1] += odd - even;
        }
        let holds = check_prop3(&c, n).map_err(|e| e.to_string())?.holds;
        let u = LinearForm::new(c).map_err(|e| e.to_string())?.to_expr();
        let status = symbolic_status(&u, &PdeSpec::eq_ii(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if status == SymbolicStatus::Inconclusive || holds != (status == SymbolicStatus::Zero) {
            disagreements += 1;
        }
        balanced += usize::from(holds);
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements in 500 forms"))?;
    Ok(format!("500 forms ({balanced} balanced), 0 disagreements"))
}

fn prop4() -> Outcome {
    for n in [2, 4, 6, 8] {
        let dom = SampleDomain::new(n, 2.0, 8, 100).map_err(|e| e.to_string())?;
        let exact = verify_prop4::<BigRational>(n, &dom).map_err(|e| e.to_string())?;
        ensure(
            exact.eq_i_holds && exact.eq_ii_holds && exact.initial_condition_holds && exact.ouroboros_holds,
            || format!("n={n}: exact sub-verdicts {} {} {} {}", exact.eq_i_holds, exact.eq_ii_holds, exact.initial_condition_holds, exact.ouroboros_holds),
        )?;
        ensure(exact.eq_i.symbolic_zero && exact.eq_ii.symbolic_zero, || format!("n={n}: not symbolically zero"))?;
        ensure(exact.ouroboros.verdict == Verdict::HoldsExact, || format!("n={n}: {:?}", exact.ouroboros.verdict))?;
        let float = verify_prop4::<f64>(n, &dom).map_err(|e| e.to_string())?;
        ensure(float.all_hold, || format!("n={n}: f64 run did not hold"))?;
    }
    Ok("n = 2, 4, 6, 8: all four sub-verdicts hold exactly".into())
}

fn monomial(coef: f64, exps: &[u32]) -> Expr<f64> {
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

fn derivative_oracle() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = r.random_range(1..=5);
        let degree = r.random_range(0..=4u32);
        let terms: Vec<Expr<f64>> = (0..r.random_range(1..=8))
            .map(|_| {
                let mut exps = vec![0u32; n];
                for _ in 0..r.random_range(0..=degree) {
                    exps[r.random_range(0..n)] += 1;
                }
                monomial(r.random_range(-5.0..=5.0), &exps)
            })
            .collect();
        let e = Expr::sum_of(terms);
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..=2.0)).collect();
            for k in 1..=n {
                let exact = e.differentiate(k).evaluate(&x).map_err(|e| e.to_string())?;
                let fd = finite_difference(&e, k, &x, 1e-5).map_err(|e| e.to_string())?;
                let err = rel_err(exact, fd);
                ensure(err <= 1e-6, || format!("polynomial {i} ({e}) d/dx{k} at {x:?}: {exact} vs {fd}"))?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("200 polynomials x 10 points, worst relative error {worst:.3e}"))
}

fn random_ast(r: &mut ChaCha8Rng, depth: u32) -> Expr<f64> {
    if depth == 0 || r.random_bool(0.25) {
        return match r.random_range(0..4) {
            0 => Expr::Var(r.random_range(1..=6)),
            1 => Expr::Const(f64::from(r.random_range(0u32..1000))),
            2 => Expr::Const(f64::from(r.random_range(-1000i32..1000)) / 8.0),
            _ => Expr::Const(r.random_range(-1e6..1e6)),
        };
    }
    let op = r.random_range(0..6);
    let mut sub = || Box::new(random_ast(r, depth - 1));
    match op {
        0 => Expr::Add(sub(), sub()),
        1 => Expr::Sub(sub(), sub()),
        2 => Expr::Mul(sub(), sub()),
        3 => Expr::Div(sub(), sub()),
        4 => Expr::Neg(sub()),
        _ => {
            let a = sub();
            Expr::Pow(a, r.random_range(0..6))
        }
    }
}

fn parser() -> Outcome {
    let mut r = rng(8);
    for i in 0..200 {
        let e = random_ast(&mut r, 5);
        let text = e.to_string();
        let back: Expr<f64> = parse(&text).map_err(|err| format!("ast {i}: {text:?} fails to parse: {err}"))?;
        ensure(back == e, || format!("ast {i}: {text:?} reparses differently"))?;
    }
    let malformed: [(&str, usize, ParseErrorKind); 20] = [
        ("", 0, ParseErrorKind::Empty),
        ("   ", 3, ParseErrorKind::Empty),
        ("x1 +", 4, ParseErrorKind::UnexpectedEnd),
        ("(x1 + x2", 0, ParseErrorKind::UnclosedParen),
        ("x1 x2", 3, ParseErrorKind::TrailingInput('x')),
        ("x1)", 2, ParseErrorKind::TrailingInput(')')),
        ("x1^-1", 3, ParseErrorKind::NegativeExponent),
        ("x1^2.5", 3, ParseErrorKind::NonIntegerExponent),
        ("x1^", 3, ParseErrorKind::MissingExponent),
        ("x1^y", 3, ParseErrorKind::MissingExponent),
        ("x1^1001", 3, ParseErrorKind::ExponentTooLarge),
        ("x0*2", 0, ParseErrorKind::VariableIndexZero),
        ("y + 1", 0, ParseErrorKind::UnexpectedChar('y')),
        ("x + 1", 0, ParseErrorKind::BadVariable),
        ("1 $ 2", 2, ParseErrorKind::TrailingInput('$')),
        ("2 * * 3", 4, ParseErrorKind::UnexpectedChar('*')),
        ("1e999", 0, ParseErrorKind::InvalidNumber),
        ("1.2.3", 3, ParseErrorKind::TrailingInput('.')),
        ("()", 1, ParseErrorKind::UnexpectedChar(')')),
        ("x1 + (x2 * (x3 - 1)", 5, ParseErrorKind::UnclosedParen),
    ];
    for (text, offset, kind) in malformed {
        let got = catch_unwind(|| parse::<f64>(text)).map_err(|_| format!("{text:?}: parser panicked"))?;
        let err = got.err().ok_or_else(|| format!("{text:?}: parsed"))?;
        ensure((err.offset, err.kind.clone()) == (offset, kind.clone()), || {
            format!("{text:?}: got {:?} at {}, want {kind:?} at {offset}", err.kind, err.offset)
        })?;
    }
    Ok("200 generated expressions round-trip; 20 malformed inputs give positioned errors".into())
}

fn fd_gradient(obj: &Objective<f64>, z: &[f64], h: f64) -> Vec<f64> {
    (0..z.len())
        .map(|i| {
            let mut p = z.to_vec();
            let mut m = z.to_vec();
            p[i] += h;
            m[i] -= h;
            (obj.evaluate_free(&p).objective - obj.evaluate_free(&m).objective) / (2.0 * h)
        })
        .collect()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let text = std::fs::read_to_string(path).expect("schema file");
    jsonschema::validator_for(&serde_json::from_str(&text).expect("schema is JSON")).expect("schema compiles")
}

fn explorer() -> Outcome {
    let mut worst_mean = 0.0f64;
    for n in [2, 4] {
        for degree in 1..=3 {
            let obj = ExplorationConfig { n, degree, ..Default::default() }.objective::<f64>();
            let j = obj.evaluate_theta(&obj.mean_theta()).objective;
            ensure(j <= 1e-12, || format!("n={n} d={degree}: objective at the mean {j}"))?;
            worst_mean = worst_mean.max(j);
        }
    }

    let mut r = rng(9);
    let cases = [(2, 1), (2, 2), (2, 3), (4, 1), (4, 2), (4, 3)];
    let mut worst_grad = 0.0f64;
    for trial in 0..50 {
        let (n, degree) = cases[trial % cases.len()];
        let obj = ExplorationConfig { n, degree, seed: trial as u64, ..Default::default() }.objective::<f64>();
        let z: Vec<f64> = (0..obj.free_dim()).map(|_| StandardNormal.sample(&mut r)).collect();
        let (_, g) = obj.value_and_gradient(&z);
        let fd = fd_gradient(&obj, &z, 1e-6);
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let err = g.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
        ensure(err <= 1e-5, || format!("gradient trial {trial} (n={n}, d={degree}): relative error {err}"))?;
        worst_grad = worst_grad.max(err);
    }

    let mut worst_set = 0.0f64;
    let mut converged = 0;
    for n in [2, 4, 6] {
        let cfg = ExplorationConfig { n, degree: 1, starts: 20, seed: 42, ..Default::default() };
        let report = explore::<f64>(&cfg).map_err(|e| e.to_string())?;
        let set = linear_case_exact::<f64>(n).map_err(|e| e.to_string())?;
        for rec in report.records.iter().filter(|r| r.classification != Classification::NonConverged) {
            let d = set.distance(&rec.theta[1..=n]);
            ensure(d <= 1e-6, || format!("n={n} start {}: set distance {d}", rec.start))?;
            worst_set = worst_set.max(d);
            converged += 1;
        }
    }
    ensure(converged > 0, || "no degree-1 run converged".into())?;

    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ouroboros"))
        .args(["explore", "--n", "2", "--degree", "2", "--starts", "20", "--seed", "42"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(out.status.code() == Some(0), || format!("explore exited with {:?}", out.status.code()))?;
    ensure(elapsed < Duration::from_secs(60), || format!("explore took {elapsed:?}"))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("explore output is not JSON: {e}"))?;
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    ensure(errors.is_empty(), || format!("schema errors: {errors:?}"))?;
    let records = v["result"]["records"].as_array().ok_or("no records")?;
    ensure(records.len() == 20 && records.iter().all(|r| r["classification"].is_string()), || {
        "records lack classifications".into()
    })?;
    let text = String::from_utf8_lossy(&out.stdout).to_lowercase();
    ensure(!text.contains("unique"), || "report asserts uniqueness".into())?;

    Ok(format!(
        "mean objective <= {worst_mean:.1e}; gradient error <= {worst_grad:.1e}; \
         {converged} converged d=1 runs within {worst_set:.1e}; CLI run {:.2}s, schema-valid",
        elapsed.as_secs_f64()
    ))
}

fn without_timestamp(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("ouroboros-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let rv = dir.join("rv.json");
    std::fs::write(&rv, r#"{"values": [1, 5, -2], "probs": ["1/2", "1/4", "1/4"]}"#).map_err(|e| e.to_string())?;
    let rv = rv.to_string_lossy().into_owned();
    let commands: Vec<Vec<&str>> = vec![
        vec!["check", "--coeffs", "0.2,0.3,0.5"],
        vec!["check", "--coeffs", "0.5,0.6"],
        vec!["check", "--expr", "x1*x2 + x3", "--seed", "5"],
        vec!["check", "--expr", "(x1+x2)/2", "--samples", "300", "--seed", "6"],
        vec!["pde", "--coeffs", "0.1,0.2,0.5,0.4", "--eq", "II"],
        vec!["pde", "--coeffs", "1/4,1/4,1/4,1/4", "--eq", "system"],
        vec!["pde", "--expr", "(x1+x2+x3+x4)/4", "--eq", "system", "--seed", "2"],
        vec!["pde", "--expr", "x1^2 - x2", "--eq", "I", "--n", "2", "--beta", "1"],
        vec!["expect", "--values", "1,2,4", "--probs", "0.2,0.5,0.3"],
        vec!["expect", "--rv", &rv],
        vec!["explore", "--n", "2", "--degree", "2", "--starts", "8", "--seed", "42"],
        vec!["explore", "--n", "4", "--degree", "1", "--starts", "6", "--seed", "3", "--init", "mean"],
        vec!["version"],
    ];
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_ouroboros")).args(args).output();
    for args in &commands {
        let a = run(args).map_err(|e| e.to_string())?;
        let b = run(args).map_err(|e| e.to_string())?;
        ensure(a.status.code() == b.status.code(), || format!("{args:?}: exit codes differ"))?;
        ensure(!a.stdout.is_empty(), || format!("{args:?}: empty output"))?;
        ensure(without_timestamp(&a.stdout) == without_timestamp(&b.stdout), || {
            format!("{args:?}: outputs differ")
        })?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} invocations byte-identical apart from the timestamp", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 theorem", theorem),
        ("2 converse", converse),
        ("3 expectation", expectation),
        ("4 transport family", prop2),
        ("5 parity balance", prop3),
        ("6 mean solves the system", prop4),
        ("7 derivative oracle", derivative_oracle),
        ("8 parser", parser),
        ("9 explorer", explorer),
        ("10 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
