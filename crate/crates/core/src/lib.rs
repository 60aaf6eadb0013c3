//! Ouroboros functions: maps with `f(f(x), ..., f(x)) = f(x)`.
//!
//! The crate provides
//!
//! * an expression type with a parser, printer and symbolic derivative,
//! * exact and sampled Ouroboros checks,
//! * constructors for the weighted-average families and the first-order
//!   PDE solutions,
//! * expectation as an Ouroboros functional on random variables,
//! * PDE residual checks with a finite-difference oracle,
//! * a multi-start least-squares search over polynomial ansatzes.
//!
//! Everything is generic over [`Scalar`]: `f32`, `f64` and exact
//! [`BigRational`]. Aliases for the common instantiations are below.
//!
//! ```
//! use ouroboros::{families, check};
//!
//! let mean = families::arithmetic_mean::<f64>(4).unwrap();
//! let report = check::check_linear_exact(&mean, check::DEFAULT_EXACT_TOL).unwrap();
//! assert!(report.verdict.holds());
//! ```

pub mod check;
pub mod error;
pub mod explorer;
pub mod expr;
pub mod families;
pub mod linear;
pub mod pde;
pub mod poly;
pub mod probability;
pub mod sampling;
pub mod scalar;

pub use num_rational::BigRational;

pub use check::{Candidate, OuroborosReport, Verdict};
pub use error::{Error, Result};
pub use explorer::{explore, ExplorationConfig, ExplorationReport};
pub use expr::{Expr, ParseError};
pub use linear::LinearForm;
pub use pde::{PdeKind, PdeSpec, SymbolicStatus};
pub use poly::Polynomial;
pub use probability::DiscreteRandomVariable;
pub use sampling::SampleDomain;
pub use scalar::{Real, Scalar};

pub type Expr64 = Expr<f64>;
pub type Expr32 = Expr<f32>;
pub type ExactExpr = Expr<BigRational>;

pub type LinearForm64 = LinearForm<f64>;
pub type LinearForm32 = LinearForm<f32>;
pub type ExactLinearForm = LinearForm<BigRational>;

pub type Candidate64 = Candidate<f64>;
pub type ExactCandidate = Candidate<BigRational>;

pub type RandomVariable64 = DiscreteRandomVariable<f64>;
pub type ExactRandomVariable = DiscreteRandomVariable<BigRational>;

pub type Exploration64 = ExplorationReport<f64>;
