//! Certified global optima for two classic constrained design benchmarks.
//!
//! * [`problems`]: the pressure-vessel and cantilever-beam problems as
//!   evaluatable objects (objective, constraints, bounds, thickness grid).
//! * [`roots`]: safeguarded Newton, the vessel volume solve, real quartic
//!   roots and the cantilever multiplier.
//! * [`optimum`]: the analytic optima, their certificates and the
//!   brute-force thickness sweep.
//! * [`validator`]: screening of published or user-supplied solutions.
//! * [`harness`]: seeded random-search and differential-evolution baselines.

pub mod error;
pub mod harness;
pub mod optimum;
pub mod problems;
pub mod roots;
pub mod validator;

pub use error::{Error, Result};
pub use optimum::{global_optimum, OptimumCertificate, Provenance};
pub use problems::{
    CantileverDesign, Design, EvaluationReport, FeasibilityTolerance, Problem, VesselDesign,
};
pub use validator::{CandidateRecord, Classification, ProvenOptima, ValidationTolerances, ValidationVerdict};
