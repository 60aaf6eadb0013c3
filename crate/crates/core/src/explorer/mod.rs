//! Numerical search over polynomial ansatzes for solutions of the
//! overdetermined system
//!
//! ```text
//! sum_{k=1..n} du/dx_k = n du/dx_n
//! sum_{k=1..n} (-1)^k du/dx_k = 0
//! u(u(x), ..., u(x)) = u(x)
//! ```
//!
//! in even dimension `n`, normalized by `u(0) = 0` and `u(1, ..., 1) = 1`.
//! The search reports what it finds per start; it does not and cannot
//! establish that the arithmetic mean is the only solution.

pub mod basis;
pub mod linear_case;
pub mod lm;
pub mod objective;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use basis::{basis_len, MonomialBasis};
pub use linear_case::{linear_case_exact, AffineSolutionSet};
pub use lm::{LmOptions, StopReason};
pub use objective::{Evaluation, Objective, Weights};

use crate::error::{Error, Result};
use crate::sampling::SampleDomain;
use crate::scalar::Real;

/// Distance to the mean's theta below which a converged run is mean-like.
pub const MEAN_DISTANCE_TOL: f64 = 1e-3;
/// Re-verification uses this many times the original sample count.
pub const REVERIFY_SAMPLE_FACTOR: usize = 10;
/// Re-verification accepts objectives up to this multiple of the threshold.
pub const REVERIFY_SLACK: f64 = 10.0;
/// Minimum samples per theta coordinate.
pub const SAMPLES_PER_COEFFICIENT: usize = 10;

pub const NONTRIVIAL_READING: &str =
    "nontrivial is read as nonconstant, enforced by the normalization u(0,...,0) = 0 and u(1,...,1) = 1";
pub const SEARCH_SPACE: &str = "polynomials of bounded total degree only; no claim is made about other function classes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Standard normal draw per free coordinate, scaled by `init_scale`.
    Random,
    /// Start exactly at the arithmetic mean.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationConfig {
    pub n: usize,
    pub degree: u32,
    /// Requested sample count; raised to `10 * theta_len` if smaller.
    pub samples: usize,
    pub radius: f64,
    pub seed: u64,
    pub starts: usize,
    pub w_eq_i: f64,
    pub w_eq_ii: f64,
    pub w_ouroboros: f64,
    pub max_iter: usize,
    /// Optimizer stops once the objective is at or below this.
    pub convergence_tol: f64,
    /// Runs at or below this objective count as converged.
    pub objective_threshold: f64,
    pub init: InitStrategy,
    pub init_scale: f64,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        Self {
            n: 2,
            degree: 2,
            samples: 200,
            radius: 1.0,
            seed: 0,
            starts: 20,
            w_eq_i: 1.0,
            w_eq_ii: 1.0,
            w_ouroboros: 1.0,
            max_iter: 500,
            convergence_tol: 1e-26,
            objective_threshold: 1e-10,
            init: InitStrategy::Random,
            init_scale: 1.0,
        }
    }
}

impl ExplorationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n % 2 == 1 {
            return Err(Error::OddDimension(self.n));
        }
        if self.n < 2 {
            return Err(Error::DimensionTooSmall { got: self.n, min: 2 });
        }
        if self.degree == 0 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        if self.starts == 0 {
            return Err(Error::InvalidArgument("at least one start is required".into()));
        }
        for (name, w) in [("w_eq_i", self.w_eq_i), ("w_eq_ii", self.w_eq_ii), ("w_ouroboros", self.w_ouroboros)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {w}")));
            }
        }
        for (name, v) in [
            ("convergence_tol", self.convergence_tol),
            ("objective_threshold", self.objective_threshold),
            ("init_scale", self.init_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        SampleDomain { n: self.n, radius: self.radius, seed: self.seed, count: self.samples.max(1) }.validate()
    }

    pub fn theta_len(&self) -> usize {
        basis_len(self.n, self.degree)
    }

    pub fn effective_samples(&self) -> usize {
        self.samples.max(SAMPLES_PER_COEFFICIENT * self.theta_len())
    }

    pub fn sample_domain(&self) -> SampleDomain {
        SampleDomain { n: self.n, radius: self.radius, seed: self.seed, count: self.effective_samples() }
    }

    /// Seed for the re-verification sample set of `start`.
    pub fn reverify_seed(&self, start: usize) -> u64 {
        splitmix64(self.seed ^ 0x5eed_0f_0bad_cafe ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn weights<T: Real>(&self) -> Weights<T> {
        Weights {
            eq_i: T::from_f64_lossy(self.w_eq_i),
            eq_ii: T::from_f64_lossy(self.w_eq_ii),
            ouroboros: T::from_f64_lossy(self.w_ouroboros),
        }
    }

    /// Objective over this config's sample set.
    pub fn objective<T: Real>(&self) -> Objective<T> {
        Objective::new(MonomialBasis::new(self.n, self.degree), &self.sample_domain().points(), self.weights())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    MeanLike,
    /// Rejected as trivial.
    ConstantLike,
    OtherCandidate,
    NonConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reverification<T> {
    pub seed: u64,
    pub samples: usize,
    pub objective: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartRecord<T> {
    pub start: usize,
    pub theta: Vec<T>,
    pub objective: T,
    pub eq_i_residual: T,
    pub eq_ii_residual: T,
    pub ouroboros_residual: T,
    pub distance_to_mean: T,
    pub iterations: usize,
    pub stop_reason: &'static str,
    pub classification: Classification,
    pub reverification: Option<Reverification<T>>,
    /// Degree 1 only: distance to the exact solution set of the linear case.
    pub linear_set_distance: Option<T>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationCounts {
    pub mean_like: usize,
    pub constant_like: usize,
    pub other_candidate: usize,
    pub non_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub system: &'static str,
    pub beta: usize,
    pub nontrivial_reading: &'static str,
    pub search_space: &'static str,
    pub basis_order: &'static str,
    pub residual_convention: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearOracleCheck<T> {
    pub solution_dimension: usize,
    pub particular: Vec<T>,
    pub directions: Vec<Vec<T>>,
    /// Largest distance of a converged run to the solution set.
    pub max_distance: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplorationReport<T> {
    pub header: ReportHeader,
    pub config: ExplorationConfig,
    pub samples_used: usize,
    pub theta_len: usize,
    pub basis: Vec<String>,
    pub mean_theta: Vec<T>,
    pub objective_at_mean: T,
    pub records: Vec<StartRecord<T>>,
    pub counts: ClassificationCounts,
    pub linear_oracle: Option<LinearOracleCheck<T>>,
}

fn l2_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y)).sqrt()
}

/// Classifies a finished run before re-verification.
pub fn classify<T: Real>(theta: &[T], objective: T, distance_to_mean: T, threshold: T) -> Classification {
    if !(objective <= threshold) {
        return Classification::NonConverged;
    }
    let nonconstant = theta.iter().skip(1).fold(T::zero(), |m, &c| m.max(c.abs()));
    if nonconstant <= T::from_f64_lossy(1e-8) {
        Classification::ConstantLike
    } else if distance_to_mean <= T::from_f64_lossy(MEAN_DISTANCE_TOL) {
        Classification::MeanLike
    } else {
        Classification::OtherCandidate
    }
}

fn initial_point<T: Real>(config: &ExplorationConfig, objective: &Objective<T>, start: usize) -> Vec<T> {
    match config.init {
        InitStrategy::Mean => objective.mean_free(),
        InitStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(start as u64 + 1);
            (0..objective.free_dim())
                .map(|_| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    T::from_f64_lossy(g * config.init_scale)
                })
                .collect()
        }
    }
}

fn run_start<T: Real>(
    config: &ExplorationConfig,
    objective: &Objective<T>,
    mean_theta: &[T],
    linear_set: Option<&AffineSolutionSet<T>>,
    start: usize,
) -> StartRecord<T> {
    let x0 = initial_point(config, objective, start);
    let opts = LmOptions { max_iter: config.max_iter, target: T::from_f64_lossy(config.convergence_tol) };
    let out = lm::minimize(|z| objective.residuals_and_jacobian(z), x0, opts);
    let theta = objective.theta_from_free(&out.x);
    let eval = objective.evaluate_theta(&theta);
    let distance_to_mean = l2_distance(&theta, mean_theta);
    let threshold = T::from_f64_lossy(config.objective_threshold);
    let mut classification = classify(&theta, eval.objective, distance_to_mean, threshold);

    let mut reverification = None;
    if classification == Classification::OtherCandidate {
        let fresh = ExplorationConfig {
            seed: config.reverify_seed(start),
            samples: REVERIFY_SAMPLE_FACTOR * config.effective_samples(),
            ..config.clone()
        };
        let j = fresh.objective::<T>().evaluate_theta(&theta).objective;
        let passed = j <= threshold * T::from_f64_lossy(REVERIFY_SLACK);
        if !passed {
            classification = Classification::NonConverged;
        }
        reverification = Some(Reverification { seed: fresh.seed, samples: fresh.samples, objective: j, passed });
    }

    let n = config.n;
    let linear_set_distance = linear_set.map(|set| set.distance(&theta[1..=n]));
    StartRecord {
        start,
        objective: eval.objective,
        eq_i_residual: eval.eq_i,
        eq_ii_residual: eval.eq_ii,
        ouroboros_residual: eval.ouroboros,
        distance_to_mean,
        iterations: out.iterations,
        stop_reason: match out.stop {
            StopReason::Target => "target",
            StopReason::IterationCap => "iteration_cap",
            StopReason::Stalled => "stalled",
        },
        classification,
        reverification,
        linear_set_distance,
        theta,
    }
}

/// Runs every start (in parallel) and assembles the report in start order.
pub fn explore<T: Real>(config: &ExplorationConfig) -> Result<ExplorationReport<T>> {
    config.validate()?;
    let objective = config.objective::<T>();
    let mean_theta = objective.mean_theta();
    let linear_set = if config.degree == 1 { Some(linear_case_exact::<T>(config.n)?) } else { None };

    let records: Vec<StartRecord<T>> = (0..config.starts)
        .into_par_iter()
        .map(|start| run_start(config, &objective, &mean_theta, linear_set.as_ref(), start))
        .collect();

    let mut counts = ClassificationCounts::default();
    for r in &records {
        match r.classification {
            Classification::MeanLike => counts.mean_like += 1,
            Classification::ConstantLike => counts.constant_like += 1,
            Classification::OtherCandidate => counts.other_candidate += 1,
            Classification::NonConverged => counts.non_converged += 1,
        }
    }

    let linear_oracle = linear_set.map(|set| {
        let max_distance = records
            .iter()
            .filter(|r| matches!(r.classification, Classification::MeanLike | Classification::OtherCandidate))
            .filter_map(|r| r.linear_set_distance)
            .fold(None, |m: Option<T>, d| Some(m.map_or(d, |m| m.max(d))));
        LinearOracleCheck {
            solution_dimension: set.dimension,
            particular: set.particular.clone(),
            directions: set.directions.clone(),
            max_distance,
        }
    });

    let basis = objective.basis();
    Ok(ExplorationReport {
        header: ReportHeader {
            system: "sum_k du/dx_k = n du/dx_n; sum_k (-1)^k du/dx_k = 0; u(u(x),...,u(x)) = u(x)",
            beta: config.n,
            nontrivial_reading: NONTRIVIAL_READING,
            search_space: SEARCH_SPACE,
            basis_order: "graded by total degree, then lexicographically descending exponents; constant first",
            residual_convention: crate::pde::RESIDUAL_CONVENTION,
        },
        config: config.clone(),
        samples_used: objective.sample_count(),
        theta_len: basis.len(),
        basis: (0..basis.len()).map(|i| basis.name(i)).collect(),
        objective_at_mean: objective.evaluate_theta(&mean_theta).objective,
        mean_theta,
        records,
        counts,
        linear_oracle,
    })
}
