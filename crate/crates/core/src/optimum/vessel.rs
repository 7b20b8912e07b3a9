use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Alternative, Multiplier, OptimumCertificate, Provenance, CERTIFICATE_TOL};
use crate::error::{Error, Result};
use crate::problems::constants::*;
use crate::problems::{evaluate_vessel, Design, FeasibilityTolerance, Problem, VesselDesign};
use crate::roots::{self, quartic_real_roots, solve_vessel_radius, RealRoot};

/// Objective coefficients once both thicknesses are fixed:
/// `f(r, L) = a r L + b r^2 + c L + d r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedVesselCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(skip)]
    thicknesses: Option<(f64, f64)>,
}

impl ReducedVesselCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        ReducedVesselCoeffs { a, b, c, d, thicknesses: None }
    }

    pub fn from_thicknesses(d1: f64, d2: f64) -> Self {
        ReducedVesselCoeffs {
            a: COST_SHELL * d1,
            b: COST_HEAD * d2,
            c: COST_WELD_LENGTH * d1 * d1,
            d: COST_WELD_RADIUS * d1 * d1,
            thicknesses: Some((d1, d2)),
        }
    }

    /// Thicknesses the coefficients were built from; recovered from `a` and
    /// `b` when constructed from raw coefficients.
    pub fn implied_thicknesses(&self) -> (f64, f64) {
        self.thicknesses.unwrap_or((self.a / COST_SHELL, self.b / COST_HEAD))
    }

    pub fn objective(&self, r: f64, l: f64) -> f64 {
        self.a * r * l + self.b * r * r + self.c * l + self.d * r
    }

    /// Reduced objective along the active-volume curve.
    pub fn objective_on_curve(&self, r: f64) -> f64 {
        self.objective(r, curve_length(r))
    }

    /// `d/dr f(r, L(r))` along the active-volume curve, evaluated through the
    /// stationarity polynomial: `pi r^3 f'(r) = P(r)`.
    pub fn curve_derivative(&self, r: f64) -> f64 {
        roots::eval_quartic(stationarity_polynomial(self), r) / (PI * r * r * r)
    }

    /// Volume multiplier in the `phi = f + lambda (V - K)` convention.
    pub fn volume_lambda(&self, r: f64) -> f64 {
        -(self.a * r + self.c) / (PI * r * r)
    }
}

/// Cylinder length that puts the volume constraint at equality for radius `r`.
pub fn curve_length(r: f64) -> f64 {
    VOLUME / (PI * r * r) - 4.0 * r / 3.0
}

/// Stationarity condition of the reduced objective on the active-volume curve,
/// as quartic coefficients `[c4, c3, c2, c1, c0]`.
///
/// Eliminating the multiplier with the length equation,
/// `lambda = -(a r + c) / (pi r^2)`, substituting `L = K/(pi r^2) - 4r/3`
/// into the radius equation and multiplying through by `pi r^3` gives
///
/// `(2 pi b - 8 pi a / 3) r^4 + (pi d - 4 pi c / 3) r^3 - a K r - 2 K c = 0`.
pub fn stationarity_polynomial(k: &ReducedVesselCoeffs) -> [f64; 5] {
    [
        2.0 * PI * k.b - 8.0 * PI * k.a / 3.0,
        PI * k.d - 4.0 * PI * k.c / 3.0,
        0.0,
        -k.a * VOLUME,
        -2.0 * VOLUME * k.c,
    ]
}

/// Radii at which the volume constraint is active at the length bounds:
/// `r1` at `L = 200`, `r2` at `L = 10`.
pub fn vessel_radius_interval() -> Result<(f64, f64)> {
    let r1 = solve_vessel_radius(LENGTH_BOUNDS.1, VOLUME)?;
    let r2 = solve_vessel_radius(LENGTH_BOUNDS.0, VOLUME)?;
    Ok((r1, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinThicknesses {
    pub i: i64,
    pub j: i64,
    pub d1: f64,
    pub d2: f64,
}

/// Smallest grid thicknesses that satisfy both stress constraints at radius `r1`.
pub fn vessel_min_thicknesses(r1: f64) -> MinThicknesses {
    let i = grid_ceil(SHELL_STRESS * r1 / GRID_STEP);
    let j = grid_ceil(HEAD_STRESS * r1 / GRID_STEP);
    MinThicknesses { i, j, d1: i as f64 * GRID_STEP, d2: j as f64 * GRID_STEP }
}

/// `ceil`, except that values within rounding of an integer snap to it.
fn grid_ceil(q: f64) -> i64 {
    let n = q.round();
    let m = if (q - n).abs() <= 16.0 * f64::EPSILON * n.abs().max(1.0) { n } else { q.ceil() };
    (m as i64).max(1)
}

/// Largest radius the stress constraints allow: `min(d1 / 0.0193, d2 / 0.00954)`.
pub fn vessel_radius_cap(d1: f64, d2: f64) -> f64 {
    (d1 / SHELL_STRESS).min(d2 / HEAD_STRESS)
}

/// Where the reduced objective attains its minimum on the feasible arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMinimum {
    /// At the radius cap: a stress constraint is active.
    UpperBoundary,
    /// At the smallest radius: the length bound is active.
    LowerBoundary,
    /// At a root of the stationarity polynomial.
    Interior,
}

/// Behaviour of the reduced objective on the feasible arc `[r1, min(R*, r2)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveAnalysis {
    pub coeffs: ReducedVesselCoeffs,
    pub lower: f64,
    pub upper: f64,
    /// `[c4, c3, c2, c1, c0]`
    pub polynomial: [f64; 5],
    pub real_roots: Vec<RealRoot>,
    pub roots_in_range: Vec<f64>,
    pub derivative_at_lower: f64,
    pub derivative_at_upper: f64,
    pub minimum: CurveMinimum,
    pub minimizer: f64,
    /// Volume multiplier `-(a r + c) / (pi r^2)` at the minimizer.
    pub volume_lambda: f64,
}

fn feasible_arc(coeffs: &ReducedVesselCoeffs) -> Result<(f64, f64)> {
    let (r1, r2) = vessel_radius_interval()?;
    let (d1, d2) = coeffs.implied_thicknesses();
    Ok((r1, vessel_radius_cap(d1, d2).min(r2)))
}

/// Real roots of the stationarity polynomial on `[r1, min(R*, r2)]`, where
/// `R*` is the radius cap of the thicknesses implied by `coeffs`.
pub fn vessel_stationarity_roots(coeffs: &ReducedVesselCoeffs) -> Result<Vec<f64>> {
    let (lo, hi) = feasible_arc(coeffs)?;
    if hi < lo {
        return Ok(Vec::new());
    }
    let poly = stationarity_polynomial(coeffs);
    let found = quartic_real_roots(poly[0], poly[1], poly[2], poly[3], poly[4])?;
    found
        .iter()
        .map(|r| r.value)
        .filter(|r| (lo..=hi).contains(r))
        .map(|r| {
            let slope = coeffs.curve_derivative(r);
            if slope.abs() <= 1e-6 {
                Ok(r)
            } else {
                Err(Error::Convergence { iterations: 0, residual: slope.abs() })
            }
        })
        .collect()
}

pub fn vessel_curve_analysis(coeffs: &ReducedVesselCoeffs) -> Result<CurveAnalysis> {
    let (lower, upper) = feasible_arc(coeffs)?;
    if upper < lower {
        return Err(Error::Domain(format!("empty feasible arc [{lower}, {upper}]")));
    }
    let polynomial = stationarity_polynomial(coeffs);
    let real_roots = quartic_real_roots(polynomial[0], polynomial[1], polynomial[2], polynomial[3], polynomial[4])?;
    let roots_in_range = vessel_stationarity_roots(coeffs)?;

    let mut best = (CurveMinimum::UpperBoundary, upper, coeffs.objective_on_curve(upper));
    for (kind, r) in std::iter::once((CurveMinimum::LowerBoundary, lower))
        .chain(roots_in_range.iter().map(|&r| (CurveMinimum::Interior, r)))
    {
        let f = coeffs.objective_on_curve(r);
        if f < best.2 {
            best = (kind, r, f);
        }
    }
    Ok(CurveAnalysis {
        coeffs: *coeffs,
        lower,
        upper,
        polynomial,
        real_roots,
        roots_in_range,
        derivative_at_lower: coeffs.curve_derivative(lower),
        derivative_at_upper: coeffs.curve_derivative(upper),
        minimum: best.0,
        minimizer: best.1,
        volume_lambda: coeffs.volume_lambda(best.1),
    })
}

/// The certified vessel optimum.
pub fn vessel_global_optimum() -> Result<OptimumCertificate> {
    let (r1, _) = vessel_radius_interval()?;
    let MinThicknesses { d1, d2, .. } = vessel_min_thicknesses(r1);
    let coeffs = ReducedVesselCoeffs::from_thicknesses(d1, d2);
    let curve = vessel_curve_analysis(&coeffs)?;

    let mut candidates = vec![
        ("radius-cap end", VesselDesign::new(d1, d2, curve.upper, curve_length(curve.upper))?, Provenance::EndpointArgument),
        ("length-bound end", VesselDesign::new(d1, d2, r1, LENGTH_BOUNDS.1)?, Provenance::EndpointArgument),
    ];
    for &r in &curve.roots_in_range {
        candidates.push(("stationary point", VesselDesign::new(d1, d2, r, curve_length(r))?, Provenance::LagrangeStationarity));
    }

    let tol = FeasibilityTolerance::default();
    let mut evaluated = Vec::with_capacity(candidates.len());
    for (label, design, provenance) in candidates {
        let report = evaluate_vessel(&design, &tol)?;
        evaluated.push((label, design, provenance, report));
    }
    let best = evaluated
        .iter()
        .enumerate()
        .filter(|(_, c)| c.3.feasible)
        .min_by(|a, b| a.1 .3.objective.total_cmp(&b.1 .3.objective))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Domain("no feasible candidate on the active-volume curve".into()))?;
    let (_, design, provenance, report) = evaluated.remove(best);

    let active = report.active_constraints(&[tol.slack, tol.slack, tol.volume, tol.slack]);
    let (multipliers, kkt_residual) = vessel_kkt(&design, &active, &report.constraint_slacks);
    if kkt_residual > CERTIFICATE_TOL {
        return Err(Error::Convergence { iterations: 0, residual: kkt_residual });
    }

    Ok(OptimumCertificate {
        problem: Problem::Vessel,
        design: Design::Vessel(design),
        objective: report.objective,
        active_constraints: active,
        multipliers,
        kkt_residual,
        provenance,
        curve: Some(curve),
        alternatives: evaluated
            .into_iter()
            .map(|(label, design, _, report)| Alternative {
                label: label.to_string(),
                design: Design::Vessel(design),
                objective: report.objective,
                feasible: report.feasible,
            })
            .collect(),
    })
}

/// Multipliers and scaled KKT residual of the continuous `(r, L)` subproblem
/// at fixed thicknesses.
fn vessel_kkt(x: &VesselDesign, active: &[usize], g: &[f64]) -> (Vec<Multiplier>, f64) {
    let coeffs = ReducedVesselCoeffs::from_thicknesses(x.shell_thickness, x.head_thickness);
    let (r, l) = (x.radius, x.length);
    let grad_r = coeffs.a * l + 2.0 * coeffs.b * r + coeffs.d;
    let grad_l = coeffs.a * r + coeffs.c;
    let scale = grad_r.hypot(grad_l);

    // grad g3 = -(dV/dr, dV/dL); grad g1 = (0.0193, 0); grad g2 = (0.00954, 0); grad g4 = (0, 1).
    let dv_dr = 2.0 * PI * r * l + 4.0 * PI * r * r;
    let dv_dl = PI * r * r;
    let is_active = |n: usize| active.contains(&n);

    let mut multipliers = Vec::new();
    let mut res_r = grad_r;
    let mut res_l = grad_l;
    if is_active(4) {
        let mu4 = -grad_l;
        res_l += mu4;
        multipliers.push(Multiplier { constraint: "g4".into(), value: mu4 });
    }
    if is_active(3) {
        let mu3 = res_l / dv_dl;
        res_l -= mu3 * dv_dl;
        res_r -= mu3 * dv_dr;
        multipliers.push(Multiplier { constraint: "g3".into(), value: mu3 });
    }
    // With both stress constraints active the split is not unique; charge g1.
    for (n, ratio) in [(1, SHELL_STRESS), (2, HEAD_STRESS)] {
        if is_active(n) {
            let mu = -res_r / ratio;
            res_r += mu * ratio;
            multipliers.push(Multiplier { constraint: format!("g{n}"), value: mu });
        }
    }
    multipliers.sort_by(|a, b| a.constraint.cmp(&b.constraint));

    let stationarity = res_r.hypot(res_l) / scale;
    let sign = multipliers.iter().map(|m| (-m.value).max(0.0)).fold(0.0, f64::max);
    let primal = active
        .iter()
        .map(|&n| if n == 3 { g[2].abs() / VOLUME } else { g[n - 1].abs() })
        .fold(0.0, f64::max);
    (multipliers, stationarity.max(sign).max(primal))
}
