use std::path::{Path, PathBuf};

use ouroboros::check::{check_linear_exact, check_sampled, OuroborosReport};
use ouroboros::explorer::{explore as run_explore, ExplorationConfig, ExplorationReport, InitStrategy};
use ouroboros::expr::{parse, ParseError};
use ouroboros::pde::{check_prop3, check_residual, check_system, Prop3Report, ResidualReport, SystemReport};
use ouroboros::probability::{check_expectation_ouroboros, DiscreteRandomVariable, ExpectationReport};
use ouroboros::scalar::{display_value, parse_exact_coefficient};
use ouroboros::{BigRational, Candidate, Expr, LinearForm, PdeSpec, SampleDomain, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{self, number_list, Overrides};
use crate::{envelope, CheckArgs, Equation, ExpectArgs, ExploreArgs, Init, InputError, Outcome, PdeArgs, TOOL_VERSION};

const MAX_DIM: usize = 1000;
const MAX_SAMPLES: usize = 1_000_000;
const MAX_EXPLORE_N: usize = 64;
const MAX_THETA_LEN: usize = 1000;
const MAX_STARTS: usize = 10_000;
const MAX_ITER: usize = 100_000;
/// Cap on `samples * theta_len`, the size of one Jacobian.
const MAX_JACOBIAN: usize = 50_000_000;

fn syntax_error(text: &str, e: ParseError) -> InputError {
    let column = text[..e.offset.min(text.len())].chars().count();
    InputError { message: e.to_string(), detail: Some(format!("  {text}\n  {}^", " ".repeat(column))) }
}

fn parse_expr(text: &str) -> Result<Expr<f64>, InputError> {
    parse::<f64>(text).map_err(|e| syntax_error(text, e))
}

fn parse_numbers(what: &str, items: &[String]) -> Result<Vec<BigRational>, InputError> {
    if items.is_empty() || items.iter().all(|s| s.is_empty()) {
        return Err(InputError::new(format!("{what}: no values given")));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let v = parse_exact_coefficient(s)
                .ok_or_else(|| InputError::new(format!("{what}: entry {} ({s:?}) is not a number or fraction", i + 1)))?;
            if !v.to_f64_lossy().is_finite() {
                return Err(InputError::new(format!("{what}: entry {} ({s}) is out of range", i + 1)));
            }
            Ok(v)
        })
        .collect()
}

fn exact(what: &str, v: f64) -> Result<BigRational, InputError> {
    BigRational::from_float(v).ok_or_else(|| InputError::new(format!("{what} must be finite, got {v}")))
}

fn check_dim(n: usize) -> Result<(), InputError> {
    if n > MAX_DIM {
        return Err(InputError::new(format!("dimension {n} exceeds the limit of {MAX_DIM}")));
    }
    Ok(())
}

fn domain(n: usize, radius: f64, seed: u64, samples: usize) -> Result<SampleDomain, InputError> {
    check_dim(n)?;
    if samples > MAX_SAMPLES {
        return Err(InputError::new(format!("samples {samples} exceeds the limit of {MAX_SAMPLES}")));
    }
    Ok(SampleDomain::new(n, radius, seed, samples)?)
}

fn list(s: Option<String>) -> Option<Value> {
    s.map(Value::String)
}

// ---------------------------------------------------------------- check

#[derive(Debug, Serialize, Deserialize)]
struct CheckConfig {
    #[serde(with = "number_list")]
    coeffs: Option<Vec<String>>,
    expr: Option<String>,
    dim: Option<usize>,
    samples: usize,
    radius: f64,
    seed: u64,
    tol: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { coeffs: None, expr: None, dim: None, samples: 1000, radius: 10.0, seed: 0, tol: None }
    }
}

#[derive(Debug, Serialize)]
struct CheckResult {
    mode: &'static str,
    function: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficient_sum: Option<String>,
    report: OuroborosReport<f64>,
}

pub fn check(a: CheckArgs) -> Result<Outcome, InputError> {
    let mut flags = Overrides::new();
    config::push(&mut flags, "coeffs", list(a.coeffs));
    config::push(&mut flags, "expr", a.expr);
    config::push(&mut flags, "dim", a.dim);
    config::push(&mut flags, "samples", a.samples);
    config::push(&mut flags, "radius", a.radius);
    config::push(&mut flags, "seed", a.seed);
    config::push(&mut flags, "tol", a.tol);
    let mut cfg: CheckConfig = config::resolve(&CheckConfig::default(), a.config.as_deref(), flags)?;

    let result = match (&cfg.coeffs, &cfg.expr) {
        (Some(coeffs), None) => {
            let form = LinearForm::new(parse_numbers("coeffs", coeffs)?)?;
            let n = form.n();
            check_dim(n)?;
            if cfg.dim.is_some_and(|d| d != n) {
                return Err(InputError::new(format!("--dim {} does not match {n} coefficients", cfg.dim.unwrap())));
            }
            cfg.dim = Some(n);
            let tol = *cfg.tol.get_or_insert(ouroboros::check::DEFAULT_EXACT_TOL);
            let report = check_linear_exact(&form, exact("tol", tol)?)?;
            CheckResult {
                mode: "linear_exact",
                function: form.to_expr().to_string(),
                n,
                coefficient_sum: Some(display_value(&form.coefficient_sum())),
                report: report.to_f64(),
            }
        }
        (None, Some(text)) => {
            let e = parse_expr(text)?;
            let n = *cfg.dim.get_or_insert(e.dim().max(1));
            let tol = *cfg.tol.get_or_insert(ouroboros::check::DEFAULT_SAMPLED_TOL);
            let dom = domain(n, cfg.radius, cfg.seed, cfg.samples)?;
            let report = check_sampled(&e, &dom, tol)?;
            CheckResult { mode: "sampled", function: e.to_string(), n, coefficient_sum: None, report }
        }
        _ => return Err(InputError::new("give exactly one of --coeffs or --expr")),
    };
    let passed = result.report.verdict.holds();
    Ok(Outcome { json: envelope("check", &cfg, Some(cfg.seed), &result), passed, out: None })
}

// ---------------------------------------------------------------- pde

#[derive(Debug, Serialize, Deserialize)]
struct PdeConfig {
    #[serde(with = "number_list")]
    coeffs: Option<Vec<String>>,
    expr: Option<String>,
    eq: Option<Equation>,
    beta: Option<usize>,
    n: Option<usize>,
    prop3: bool,
    samples: usize,
    radius: f64,
    seed: u64,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            coeffs: None,
            expr: None,
            eq: None,
            beta: None,
            n: None,
            prop3: false,
            samples: 100,
            radius: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct PdeResult {
    mode: &'static str,
    function: String,
    n: usize,
    equation: Equation,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<ResidualReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prop3: Option<Prop3Report<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    system: Option<SystemReport<f64>>,
    passed: bool,
}

fn pde_generic<T: Scalar>(
    candidate: Candidate<T>,
    cfg: &PdeConfig,
    n: usize,
    eq: Equation,
    prop3: bool,
) -> Result<PdeResult, InputError> {
    let dom = domain(n, cfg.radius, cfg.seed, cfg.samples)?;
    let u = candidate.to_expr();
    let mode = match candidate {
        Candidate::Linear(_) => "linear_exact",
        Candidate::Expr(_) => "expression",
    };
    let mut out =
        PdeResult { mode, function: u.to_string(), n, equation: eq, residual: None, prop3: None, system: None, passed: true };
    match eq {
        Equation::I | Equation::II => {
            let spec = match eq {
                Equation::I => PdeSpec::eq_i(n, cfg.beta.unwrap_or(n))?,
                _ => PdeSpec::eq_ii(n)?,
            };
            let r = check_residual(&u, &spec, &dom)?;
            out.passed = r.holds();
            out.residual = Some(r.to_f64());
        }
        Equation::System => {
            let r = check_system(&candidate, n, &dom)?;
            out.passed = r.all_hold;
            out.system = Some(r.to_f64());
        }
    }
    if prop3 {
        let Candidate::Linear(form) = &candidate else {
            return Err(InputError::new("the odd/even coefficient comparison needs --coeffs"));
        };
        let r = check_prop3(form.coeffs(), n)?;
        out.passed &= r.holds;
        out.prop3 =
            Some(Prop3Report { holds: r.holds, odd_sum: r.odd_sum.to_f64_lossy(), even_sum: r.even_sum.to_f64_lossy() });
    }
    Ok(out)
}

pub fn pde(a: PdeArgs) -> Result<Outcome, InputError> {
    let mut flags = Overrides::new();
    config::push(&mut flags, "coeffs", list(a.coeffs));
    config::push(&mut flags, "expr", a.expr);
    config::push(&mut flags, "eq", a.eq);
    config::push(&mut flags, "beta", a.beta);
    config::push(&mut flags, "n", a.n);
    config::push(&mut flags, "prop3", a.prop3.then_some(true));
    config::push(&mut flags, "samples", a.samples);
    config::push(&mut flags, "radius", a.radius);
    config::push(&mut flags, "seed", a.seed);
    let mut cfg: PdeConfig = config::resolve(&PdeConfig::default(), a.config.as_deref(), flags)?;

    let eq = cfg.eq.ok_or_else(|| InputError::new("--eq is required (I, II or system)"))?;
    if eq != Equation::I && cfg.beta.is_some() {
        return Err(InputError::new("--beta applies to --eq I only"));
    }
    let result = match (&cfg.coeffs, &cfg.expr) {
        (Some(coeffs), None) => {
            let form = LinearForm::new(parse_numbers("coeffs", coeffs)?)?;
            let n = *cfg.n.get_or_insert(form.n());
            if n != form.n() {
                return Err(InputError::new(format!("--n {n} does not match {} coefficients", form.n())));
            }
            if eq == Equation::I {
                cfg.beta.get_or_insert(n);
            }
            // Odd/even sums accompany equation II whenever they apply.
            let prop3 = cfg.prop3 || (eq == Equation::II && n % 2 == 0);
            cfg.prop3 = prop3;
            pde_generic(Candidate::Linear(form), &cfg, n, eq, prop3)?
        }
        (None, Some(text)) => {
            let e = parse_expr(text)?;
            let n = *cfg.n.get_or_insert(e.dim().max(1));
            if e.dim() > n {
                return Err(ouroboros::Error::DimensionMismatch { used: e.dim(), n }.into());
            }
            if eq == Equation::I {
                cfg.beta.get_or_insert(n);
            }
            pde_generic(Candidate::Expr(e), &cfg, n, eq, cfg.prop3)?
        }
        _ => return Err(InputError::new("give exactly one of --coeffs or --expr")),
    };
    let passed = result.passed;
    Ok(Outcome { json: envelope("pde", &cfg, Some(cfg.seed), &result), passed, out: None })
}

// ---------------------------------------------------------------- expect

#[derive(Debug, Serialize, Deserialize)]
struct ExpectConfig {
    rv: Option<PathBuf>,
    #[serde(with = "number_list")]
    values: Option<Vec<String>>,
    #[serde(with = "number_list")]
    probs: Option<Vec<String>>,
    tol: f64,
}

impl Default for ExpectConfig {
    fn default() -> Self {
        Self { rv: None, values: None, probs: None, tol: 1e-12 }
    }
}

#[derive(Debug, Serialize)]
struct ExpectResult {
    support_size: usize,
    expected_exact: String,
    report: ExpectationReport<f64>,
}

fn read_rv(path: &Path) -> Result<(Vec<String>, Vec<String>), InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::new(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| InputError::new(format!("{} is not valid JSON: {e}", path.display())))?;
    let obj = v.as_object().ok_or_else(|| InputError::new(format!("{} must be a JSON object", path.display())))?;
    if let Some(key) = obj.keys().find(|k| *k != "values" && *k != "probs") {
        return Err(InputError::new(format!("unknown key \"{key}\" in {}", path.display())));
    }
    let field = |name: &str| {
        obj.get(name)
            .and_then(config::list_from_value)
            .ok_or_else(|| InputError::new(format!("{}: \"{name}\" must be an array of numbers", path.display())))
    };
    Ok((field("values")?, field("probs")?))
}

pub fn expect(a: ExpectArgs) -> Result<Outcome, InputError> {
    let mut flags = Overrides::new();
    config::push(&mut flags, "rv", a.rv);
    config::push(&mut flags, "values", list(a.values));
    config::push(&mut flags, "probs", list(a.probs));
    config::push(&mut flags, "tol", a.tol);
    let mut cfg: ExpectConfig = config::resolve(&ExpectConfig::default(), a.config.as_deref(), flags)?;

    if let Some(path) = &cfg.rv {
        if cfg.values.is_some() || cfg.probs.is_some() {
            return Err(InputError::new("give either --rv or --values/--probs, not both"));
        }
        let (values, probs) = read_rv(path)?;
        cfg.values = Some(values);
        cfg.probs = Some(probs);
    }
    let (Some(values), Some(probs)) = (&cfg.values, &cfg.probs) else {
        return Err(InputError::new("give --rv, or both --values and --probs"));
    };
    let x = DiscreteRandomVariable::new(parse_numbers("values", values)?, parse_numbers("probs", probs)?)?;
    let report = check_expectation_ouroboros(&x, exact("tol", cfg.tol)?)?;
    let result = ExpectResult {
        support_size: x.values().len(),
        expected_exact: display_value(&report.expected),
        report: report.to_f64(),
    };
    let passed = result.report.holds;
    Ok(Outcome { json: envelope("expect", &cfg, None, &result), passed, out: None })
}

// ---------------------------------------------------------------- explore

fn explore_limits(c: &ExplorationConfig) -> Result<(), InputError> {
    c.validate()?;
    let too_big = |what: &str, got: usize, max: usize| {
        Err(InputError::new(format!("{what} {got} exceeds the limit of {max}")))
    };
    if c.n > MAX_EXPLORE_N {
        return too_big("n", c.n, MAX_EXPLORE_N);
    }
    if c.degree > 16 {
        return too_big("degree", c.degree as usize, 16);
    }
    let p = c.theta_len();
    if p > MAX_THETA_LEN {
        return too_big("basis size", p, MAX_THETA_LEN);
    }
    if c.starts > MAX_STARTS {
        return too_big("starts", c.starts, MAX_STARTS);
    }
    if c.max_iter > MAX_ITER {
        return too_big("max_iter", c.max_iter, MAX_ITER);
    }
    if c.samples > MAX_SAMPLES {
        return too_big("samples", c.samples, MAX_SAMPLES);
    }
    if c.effective_samples().saturating_mul(p) > MAX_JACOBIAN {
        return too_big("samples x basis size", c.effective_samples().saturating_mul(p), MAX_JACOBIAN);
    }
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn write_csv(path: &Path, report: &ExplorationReport<f64>) -> Result<(), InputError> {
    let fail = |e: csv::Error| InputError::new(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    let mut header: Vec<String> = [
        "start",
        "classification",
        "objective",
        "eq_i_residual",
        "eq_ii_residual",
        "ouroboros_residual",
        "distance_to_mean",
        "iterations",
        "stop_reason",
        "reverified_objective",
        "linear_set_distance",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(report.basis.iter().map(|b| format!("theta[{b}]")));
    w.write_record(&header).map_err(fail)?;
    for r in &report.records {
        let class = serde_json::to_value(r.classification).expect("classification serializes");
        let mut row = vec![
            r.start.to_string(),
            class.as_str().unwrap_or_default().to_string(),
            num(r.objective),
            num(r.eq_i_residual),
            num(r.eq_ii_residual),
            num(r.ouroboros_residual),
            num(r.distance_to_mean),
            r.iterations.to_string(),
            r.stop_reason.to_string(),
            r.reverification.as_ref().map(|v| num(v.objective)).unwrap_or_default(),
            r.linear_set_distance.map(num).unwrap_or_default(),
        ];
        row.extend(r.theta.iter().map(|&t| num(t)));
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| InputError::new(format!("cannot write {}: {e}", path.display())))
}

pub fn explore(a: ExploreArgs) -> Result<Outcome, InputError> {
    let mut flags = Overrides::new();
    config::push(&mut flags, "n", a.n);
    config::push(&mut flags, "degree", a.degree);
    config::push(&mut flags, "starts", a.starts);
    config::push(&mut flags, "seed", a.seed);
    config::push(&mut flags, "samples", a.samples);
    config::push(&mut flags, "radius", a.radius);
    config::push(
        &mut flags,
        "init",
        a.init.map(|i| match i {
            Init::Random => InitStrategy::Random,
            Init::Mean => InitStrategy::Mean,
        }),
    );
    config::push(&mut flags, "init_scale", a.init_scale);
    config::push(&mut flags, "max_iter", a.max_iter);
    config::push(&mut flags, "w_eq_i", a.w_eq_i);
    config::push(&mut flags, "w_eq_ii", a.w_eq_ii);
    config::push(&mut flags, "w_ouroboros", a.w_ouroboros);
    config::push(&mut flags, "convergence_tol", a.convergence_tol);
    config::push(&mut flags, "objective_threshold", a.objective_threshold);
    let cfg: ExplorationConfig = config::resolve(&ExplorationConfig::default(), a.config.as_deref(), flags)?;
    explore_limits(&cfg)?;

    let report = run_explore::<f64>(&cfg)?;
    if let Some(path) = &a.csv {
        write_csv(path, &report)?;
    }
    Ok(Outcome { json: envelope("explore", &cfg, Some(cfg.seed), &report), passed: true, out: a.out })
}

// ---------------------------------------------------------------- version

#[derive(Debug, Serialize)]
struct VersionResult {
    name: &'static str,
    version: &'static str,
}

pub fn version() -> Outcome {
    let result = VersionResult { name: "ouroboros", version: TOOL_VERSION };
    let config = serde_json::Map::new();
    Outcome { json: envelope("version", &config, None, &result), passed: true, out: None }
}
