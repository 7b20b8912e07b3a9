//! Analytic global optima and their certificates.
//!
//! The vessel optimum is obtained by restricting the search to the curve on
//! which the volume constraint is active, bounding the radius from both
//! sides, fixing the smallest admissible grid thicknesses and comparing the
//! reduced objective at the two ends of the curve. The Lagrange stationarity
//! condition along the same curve is solved independently as a cross-check,
//! and a brute-force sweep over every thickness pair confirms the result.
//!
//! The cantilever optimum follows from the closed-form Lagrange multiplier.

mod cantilever;
mod sweep;
mod vessel;

use serde::{Deserialize, Serialize};

use crate::problems::{Design, Problem};

pub use cantilever::cantilever_global_optimum;
pub use sweep::{vessel_grid_sweep, write_sweep_csv, GridSweep, SweepRow};
pub use vessel::{
    curve_length, stationarity_polynomial, vessel_curve_analysis, vessel_global_optimum,
    vessel_min_thicknesses, vessel_radius_cap, vessel_radius_interval, vessel_stationarity_roots,
    CurveAnalysis, CurveMinimum, MinThicknesses, ReducedVesselCoeffs,
};

/// Upper bound on `kkt_residual` for an emitted certificate.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// How the optimality of a certificate was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Comparison of the reduced objective at the ends of the active-volume curve.
    EndpointArgument,
    /// Interior root of the Lagrange stationarity condition.
    LagrangeStationarity,
    /// Closed-form Lagrange multiplier.
    LambdaClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    /// Constraint label, e.g. `g1`.
    pub constraint: String,
    pub value: f64,
}

/// A candidate the certificate considered and rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub label: String,
    pub design: Design,
    pub objective: f64,
    pub feasible: bool,
}

/// Machine-checkable witness of a global optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimumCertificate {
    pub problem: Problem,
    pub design: Design,
    pub objective: f64,
    /// 1-based constraint numbers active at the optimum.
    pub active_constraints: Vec<usize>,
    /// Non-negative KKT multipliers for the `g <= 0` constraints.
    pub multipliers: Vec<Multiplier>,
    /// Largest scaled violation among stationarity, primal feasibility of the
    /// active set and multiplier sign.
    pub kkt_residual: f64,
    pub provenance: Provenance,
    /// Vessel only: how the reduced objective behaves along the active-volume curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveAnalysis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<Alternative>,
}

impl OptimumCertificate {
    pub fn multiplier(&self, constraint: &str) -> Option<f64> {
        self.multipliers.iter().find(|m| m.constraint == constraint).map(|m| m.value)
    }
}

/// Certificate for either problem.
pub fn global_optimum(problem: Problem) -> crate::Result<OptimumCertificate> {
    match problem {
        Problem::Vessel => vessel_global_optimum(),
        Problem::Cantilever => cantilever_global_optimum(),
    }
}
