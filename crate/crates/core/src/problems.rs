//! The two benchmark problems as evaluatable objects.
//!
//! Pressure vessel: four variables (shell thickness, head thickness, inner
//! radius, cylinder length), four inequality constraints, simple bounds and a
//! thickness grid of 1/16 inch. Cantilever beam: five section heights, one
//! inequality constraint, simple bounds.
//!
//! All constraint values follow the `g(x) <= 0` convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Problem constants, stored exactly as published.
pub mod constants {
    /// Cost coefficient of `d1 * r * L` (material and forming of the shell).
    pub const COST_SHELL: f64 = 0.6224;
    /// Cost coefficient of `d2 * r^2` (heads).
    pub const COST_HEAD: f64 = 1.7781;
    /// Cost coefficient of `d1^2 * L` (longitudinal welding).
    pub const COST_WELD_LENGTH: f64 = 3.1661;
    /// Cost coefficient of `d1^2 * r` (circumferential welding).
    pub const COST_WELD_RADIUS: f64 = 19.84;

    /// Hoop-stress ratio for the shell: `g1 = -d1 + 0.0193 r`.
    pub const SHELL_STRESS: f64 = 0.0193;
    /// Hoop-stress ratio for the heads: `g2 = -d2 + 0.00954 r`.
    pub const HEAD_STRESS: f64 = 0.00954;
    /// Required enclosed volume in cubic inches.
    pub const VOLUME: f64 = 1_296_000.0;
    /// Length limit of `g4 = L - 240`.
    pub const LENGTH_LIMIT: f64 = 240.0;

    /// Thickness quantum in inches.
    pub const GRID_STEP: f64 = 0.0625;
    /// Largest admissible thickness multiple.
    pub const GRID_MAX: i64 = 99;
    pub const THICKNESS_BOUNDS: (f64, f64) = (GRID_STEP, GRID_MAX as f64 * GRID_STEP);
    pub const RADIUS_BOUNDS: (f64, f64) = (10.0, 200.0);
    pub const LENGTH_BOUNDS: (f64, f64) = (10.0, 200.0);

    /// Weight per unit section height of the cantilever.
    pub const BEAM_UNIT_WEIGHT: f64 = 0.0624;
    /// Load weights of the five cantilever segments.
    pub const BEAM_LOADS: [f64; 5] = [61.0, 37.0, 19.0, 7.0, 1.0];
    pub const BEAM_BOUNDS: (f64, f64) = (0.01, 100.0);
}

use constants::*;

/// Which benchmark a record, run or certificate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Vessel,
    Cantilever,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Vessel => "vessel",
            Problem::Cantilever => "cantilever",
        }
    }

    /// Number of continuous design variables.
    pub fn dimension(self) -> usize {
        match self {
            Problem::Vessel => 4,
            Problem::Cantilever => 5,
        }
    }
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vessel" | "pressure-vessel" | "pressure_vessel" => Ok(Problem::Vessel),
            "cantilever" | "beam" | "cantilever-beam" => Ok(Problem::Cantilever),
            other => Err(Error::Domain(format!("unknown problem `{other}`"))),
        }
    }
}

/// A pressure-vessel design point. All lengths in inches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselDesign {
    /// `d1`
    pub shell_thickness: f64,
    /// `d2`
    pub head_thickness: f64,
    /// `r`
    pub radius: f64,
    /// `L`
    pub length: f64,
}

impl VesselDesign {
    /// Checked constructor: every field finite and strictly positive.
    pub fn new(shell_thickness: f64, head_thickness: f64, radius: f64, length: f64) -> Result<Self> {
        let design = VesselDesign { shell_thickness, head_thickness, radius, length };
        for (name, v) in design.named() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(design)
    }

    /// Design with thicknesses given as grid multiples.
    pub fn from_grid(i: i64, j: i64, radius: f64, length: f64) -> Self {
        VesselDesign {
            shell_thickness: i as f64 * GRID_STEP,
            head_thickness: j as f64 * GRID_STEP,
            radius,
            length,
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.shell_thickness, self.head_thickness, self.radius, self.length]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match *v {
            [d1, d2, r, l] => VesselDesign::new(d1, d2, r, l),
            _ => Err(Error::Domain(format!("vessel design needs 4 values, got {}", v.len()))),
        }
    }

    fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("shell_thickness", self.shell_thickness),
            ("head_thickness", self.head_thickness),
            ("radius", self.radius),
            ("length", self.length),
        ]
    }

    fn ensure_finite(&self) -> Result<()> {
        match self.named().into_iter().find(|(_, v)| !v.is_finite()) {
            Some((name, v)) => Err(Error::Domain(format!("{name} is not finite ({v})"))),
            None => Ok(()),
        }
    }
}

/// A cantilever design: five section heights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CantileverDesign {
    pub x: [f64; 5],
}

impl CantileverDesign {
    /// Checked constructor: every height finite and within the simple bounds.
    pub fn new(x: [f64; 5]) -> Result<Self> {
        let (lo, hi) = BEAM_BOUNDS;
        if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(lo..=hi).contains(*v)) {
            return Err(Error::Domain(format!("x{} = {v} outside [{lo}, {hi}]", i + 1)));
        }
        Ok(CantileverDesign { x })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let x: [f64; 5] = v
            .try_into()
            .map_err(|_| Error::Domain(format!("cantilever design needs 5 values, got {}", v.len())))?;
        CantileverDesign::new(x)
    }

    fn ensure_finite(&self) -> Result<()> {
        match self.x.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::Domain(format!("x{} is not finite", i + 1))),
            None => Ok(()),
        }
    }
}

/// Either design, for code that handles both problems uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Design {
    Vessel(VesselDesign),
    Cantilever(CantileverDesign),
}

impl Design {
    pub fn problem(&self) -> Problem {
        match self {
            Design::Vessel(_) => Problem::Vessel,
            Design::Cantilever(_) => Problem::Cantilever,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Design::Vessel(v) => v.to_array().to_vec(),
            Design::Cantilever(c) => c.x.to_vec(),
        }
    }
}

/// Tolerances used when classifying a design as feasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityTolerance {
    /// Allowed positive slack for every constraint except the volume constraint.
    pub slack: f64,
    /// Allowed positive slack for the vessel volume constraint (values of order 1e6).
    pub volume: f64,
    /// Allowed excursion beyond the simple bounds.
    pub bound: f64,
    /// Allowed distance of `d / 0.0625` from an integer.
    pub grid: f64,
}

impl Default for FeasibilityTolerance {
    fn default() -> Self {
        FeasibilityTolerance { slack: 1e-9, volume: 1e-3, bound: 1e-9, grid: 1e-9 }
    }
}

impl FeasibilityTolerance {
    /// Zero tolerance everywhere: feasible means feasible in floating point.
    pub fn strict() -> Self {
        FeasibilityTolerance { slack: 0.0, volume: 0.0, bound: 0.0, grid: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub variable: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BoundViolation {
    /// Distance outside the interval.
    pub fn excess(&self) -> f64 {
        (self.lower - self.value).max(self.value - self.upper).max(0.0)
    }
}

/// Objective, constraint values and feasibility verdict for one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub objective: f64,
    /// `g_i(x)` in problem order; `<= 0` is satisfied.
    pub constraint_slacks: Vec<f64>,
    pub bound_violations: Vec<BoundViolation>,
    /// Vessel only: a thickness is off the 1/16 inch grid.
    pub grid_violation: bool,
    pub feasible: bool,
    /// Largest positive constraint value or bound excess, 0 when none.
    pub max_violation: f64,
}

impl EvaluationReport {
    /// Constraint numbers (1-based, as in `g1..g4`) with `|g_i| <= tol_i`.
    pub fn active_constraints(&self, tol: &[f64]) -> Vec<usize> {
        self.constraint_slacks
            .iter()
            .zip(tol)
            .enumerate()
            .filter(|(_, (g, t))| g.abs() <= **t)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Pressure vessel

pub fn vessel_objective(x: &VesselDesign) -> Result<f64> {
    x.ensure_finite()?;
    let VesselDesign { shell_thickness: d1, head_thickness: d2, radius: r, length: l } = *x;
    Ok(COST_SHELL * d1 * r * l
        + COST_HEAD * d2 * r * r
        + COST_WELD_LENGTH * d1 * d1 * l
        + COST_WELD_RADIUS * d1 * d1 * r)
}

/// Enclosed volume of a cylinder of radius `r` and length `l` with two hemispherical heads.
pub fn vessel_volume(r: f64, l: f64) -> f64 {
    use std::f64::consts::PI;
    PI * r * r * l + 4.0 * PI / 3.0 * r * r * r
}

/// `[g1, g2, g3, g4]`.
pub fn vessel_constraints(x: &VesselDesign) -> Result<[f64; 4]> {
    x.ensure_finite()?;
    let VesselDesign { shell_thickness: d1, head_thickness: d2, radius: r, length: l } = *x;
    Ok([
        -d1 + SHELL_STRESS * r,
        -d2 + HEAD_STRESS * r,
        -vessel_volume(r, l) + VOLUME,
        l - LENGTH_LIMIT,
    ])
}

/// Result of snapping both thicknesses to the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCheck {
    pub on_grid: bool,
    /// Nearest multiples `(I, J)` of the grid step.
    pub multiples: (i64, i64),
}

pub fn vessel_grid_check(x: &VesselDesign, tol: f64) -> GridCheck {
    let snap = |d: f64| {
        let q = d / GRID_STEP;
        let n = q.round();
        let ok = (q - n).abs() <= tol && (1.0..=GRID_MAX as f64).contains(&n);
        (n as i64, ok)
    };
    let (i, ok1) = snap(x.shell_thickness);
    let (j, ok2) = snap(x.head_thickness);
    GridCheck { on_grid: ok1 && ok2, multiples: (i, j) }
}

fn bound_check(name: &str, value: f64, (lo, hi): (f64, f64), tol: f64) -> Option<BoundViolation> {
    (value < lo - tol || value > hi + tol).then(|| BoundViolation {
        variable: name.to_string(),
        value,
        lower: lo,
        upper: hi,
    })
}

/// Full evaluation of a vessel design.
pub fn evaluate_vessel(x: &VesselDesign, tol: &FeasibilityTolerance) -> Result<EvaluationReport> {
    let objective = vessel_objective(x)?;
    let g = vessel_constraints(x)?;
    let bound_violations: Vec<_> = [
        bound_check("shell_thickness", x.shell_thickness, THICKNESS_BOUNDS, tol.bound),
        bound_check("head_thickness", x.head_thickness, THICKNESS_BOUNDS, tol.bound),
        bound_check("radius", x.radius, RADIUS_BOUNDS, tol.bound),
        bound_check("length", x.length, LENGTH_BOUNDS, tol.bound),
    ]
    .into_iter()
    .flatten()
    .collect();
    let grid_violation = !vessel_grid_check(x, tol.grid).on_grid;
    let slack_ok = g
        .iter()
        .enumerate()
        .all(|(i, &gi)| gi <= if i == 2 { tol.volume } else { tol.slack });
    let max_violation = g
        .iter()
        .copied()
        .chain(bound_violations.iter().map(BoundViolation::excess))
        .fold(0.0, f64::max);
    Ok(EvaluationReport {
        objective,
        constraint_slacks: g.to_vec(),
        feasible: slack_ok && bound_violations.is_empty() && !grid_violation,
        bound_violations,
        grid_violation,
        max_violation,
    })
}

// ---------------------------------------------------------------------------
// Cantilever beam

pub fn cantilever_objective(x: &CantileverDesign) -> Result<f64> {
    x.ensure_finite()?;
    Ok(BEAM_UNIT_WEIGHT * x.x.iter().sum::<f64>())
}

/// `sum(a_i / x_i^3) - 1`.
pub fn cantilever_constraint(x: &CantileverDesign) -> Result<f64> {
    x.ensure_finite()?;
    if let Some(i) = x.x.iter().position(|&v| v == 0.0) {
        return Err(Error::Singularity(format!("x{} = 0", i + 1)));
    }
    Ok(BEAM_LOADS.iter().zip(&x.x).map(|(a, xi)| a / (xi * xi * xi)).sum::<f64>() - 1.0)
}

pub fn evaluate_cantilever(x: &CantileverDesign, tol: &FeasibilityTolerance) -> Result<EvaluationReport> {
    let objective = cantilever_objective(x)?;
    let g = cantilever_constraint(x)?;
    let bound_violations: Vec<_> = x
        .x
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| bound_check(&format!("x{}", i + 1), v, BEAM_BOUNDS, tol.bound))
        .collect();
    let max_violation = bound_violations.iter().map(BoundViolation::excess).fold(g.max(0.0), f64::max);
    Ok(EvaluationReport {
        objective,
        constraint_slacks: vec![g],
        feasible: g <= tol.slack && bound_violations.is_empty(),
        bound_violations,
        grid_violation: false,
        max_violation,
    })
}

pub fn evaluate(design: &Design, tol: &FeasibilityTolerance) -> Result<EvaluationReport> {
    match design {
        Design::Vessel(v) => evaluate_vessel(v, tol),
        Design::Cantilever(c) => evaluate_cantilever(c, tol),
    }
}
