//! Differentially private population statistics, analytic security
//! calculators, synthetic traces and the privacy-utility simulation.

pub mod analytics;
pub mod dp;
pub mod simulation;
pub mod traces;

pub use analytics::{
    binary_entropy, detection_probability, log10_miss_probability, minimum_leakage, session_false_accept,
    simulate_detection, DetectionExperiment, SessionBound,
};
pub use dp::{
    clamped_mean, gaussian_sigma, raw_population, release, release_population, DpBudget, PopulationParams, Provenance, Release,
    VARIANCE_MARGIN,
};
pub use simulation::{default_sweep, simulate, simulate_privacy_utility, OrderingCheck, SimulationReport, SimulationRow};
pub use traces::{generate_traces, lag1_autocorrelation, AdversaryModel, GroundTruth, SimulationConfig, TraceSession};
