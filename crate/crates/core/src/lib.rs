//! Mutation-score driven test suite evolution.
//!
//! A subject program written in a small imperative language is mutated with
//! first-order operators (arithmetic, relational and constant replacement).
//! A genetic algorithm then evolves integer test inputs. Each test's fitness
//! is the number of mutants it kills, and the run stops when the suite's
//! mutation score is satisfactory.
//!
//! ```
//! use mutagen::{ga::{GaConfig, InputDomain}, lang, mutation::MutationOperator, suite};
//!
//! let program = lang::parse("fn double(x) { return x * 2 }").unwrap();
//! let domain = InputDomain::uniform(1, 1, 8).unwrap();
//! let config = GaConfig { seed: 7, max_generations: 10, ..GaConfig::default() };
//! let report = suite::optimize(
//!     &program,
//!     &MutationOperator::ALL,
//!     &domain,
//!     &config,
//!     &suite::RunOptions::default(),
//! )
//! .unwrap();
//! assert!(report.final_score > 0.0);
//! ```

pub mod cli;
pub mod config;
pub mod ga;
pub mod interp;
pub mod lang;
pub mod mutation;
pub mod report;
pub mod suite;

pub use lang::ParseError;

/// How batches of independent executions are scheduled. Results never
/// depend on the choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expected {expected} inputs, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("no mutants were generated")]
    NoMutants,
    #[error("exhaustive scan needs {executions} executions, cap is {cap}")]
    DomainTooLarge { executions: u128, cap: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("row {row}: {message}")]
    SuiteFormat { row: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
