//! Fair division of randomly valued goods and chores.
//!
//! Instances draw every agent's value for an item from that item's own law
//! on `[0, 1]`. The crate provides the allocators (max-welfare argmax, online
//! sampling, and matching-based envy-free and proportional procedures), the
//! bipartite matching machinery they reduce to, fairness metrics, brute-force
//! oracles, and a seeded, cached experiment harness.

pub mod acceptance;
pub mod allocators;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod instance;
pub mod matching;
pub mod metrics;
pub mod oracle;
pub mod rng;

pub use allocators::{AllocOutcome, InfeasibleStage, SampleLog, SampleRegime, Thresholds};
pub use distributions::{Distribution, DistributionSpec, FamilyMixture, MixtureName, PdfBounds};
pub use error::{AllocError, InstanceError, MatchingError, MetricsError, OracleError, SpecError};
pub use harness::{Algorithm, ExperimentConfig, HarnessError, PlotMetric, TrialResult};
pub use instance::{Allocation, Instance, Mode, Provenance, ValueMatrix};
pub use matching::{BipartiteGraph, Direction, Matching};
pub use metrics::MetricsReport;
pub use rng::SeededRng;
