//! Permutation-based (1+1) evolutionary algorithms.
//!
//! The crate covers the symmetric group `S_n` ([`permutation`]), strength
//! distributions and seeded streams ([`sampling`]), swap and scramble
//! mutation with void detection ([`mutation`]), lifted pseudo-Boolean
//! benchmarks ([`benchmarks`]), the elitist EA ([`ea`]), closed-form
//! probabilities ([`analytics`]) and experiment orchestration ([`harness`]).
//!
//! ```
//! use permea::{run, BenchmarkSpec, Initial, OperatorName, RunConfig};
//!
//! let bench = BenchmarkSpec::pleadingones(12).unwrap();
//! let op = OperatorName::ScrambleHt.build(12, 1.5).unwrap();
//! let config = RunConfig::new(bench, op, None, Initial::UniformRandom, 42).unwrap();
//! let record = run(&config);
//! assert!(record.success);
//! assert!(record.evals_effective <= record.evals_all);
//! ```

pub mod analytics;
pub mod benchmarks;
pub mod ea;
pub mod error;
pub mod harness;
pub mod mutation;
pub mod permutation;
pub mod sampling;

pub use analytics::ProbabilityInterval;
pub use benchmarks::{BenchmarkKind, BenchmarkSpec, JumpRegion, LiftedFunction};
pub use ea::{run, Initial, RunConfig, RunRecord};
pub use error::{Error, Result};
pub use harness::{CellSummary, ExperimentConfig, ExperimentRecord, Format};
pub use mutation::{MutationKind, MutationReport, OperatorName, OperatorSpec, VoidClass};
pub use permutation::{CycleDecomposition, Permutation};
pub use sampling::{PowerLaw, StrengthDistribution, StreamRng};
