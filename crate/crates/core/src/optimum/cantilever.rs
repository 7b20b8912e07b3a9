use super::{Multiplier, OptimumCertificate, Provenance, CERTIFICATE_TOL};
use crate::error::{Error, Result};
use crate::problems::constants::{BEAM_LOADS, BEAM_UNIT_WEIGHT};
use crate::problems::{
    cantilever_constraint, cantilever_objective, CantileverDesign, Design, Problem,
};
use crate::roots::{solve_cantilever_lambda, DEFAULT_TOL};

/// The certified cantilever optimum: `x_i = (3 lambda a_i / k)^(1/4)`.
pub fn cantilever_global_optimum() -> Result<OptimumCertificate> {
    let k = BEAM_UNIT_WEIGHT;
    let lambda = solve_cantilever_lambda(&BEAM_LOADS, k, DEFAULT_TOL)?;
    let design = CantileverDesign::new(BEAM_LOADS.map(|a| (3.0 * lambda * a / k).powf(0.25)))?;
    let objective = cantilever_objective(&design)?;
    let g = cantilever_constraint(&design)?;

    let stationarity = BEAM_LOADS
        .iter()
        .zip(&design.x)
        .map(|(a, x)| (k - 3.0 * lambda * a / x.powi(4)).abs())
        .fold(0.0, f64::max);
    let kkt_residual = stationarity.max(g.abs()).max((-lambda).max(0.0));
    if kkt_residual > CERTIFICATE_TOL {
        return Err(Error::Convergence { iterations: 0, residual: kkt_residual });
    }

    Ok(OptimumCertificate {
        problem: Problem::Cantilever,
        design: Design::Cantilever(design),
        objective,
        active_constraints: vec![1],
        multipliers: vec![Multiplier { constraint: "g1".into(), value: lambda }],
        kkt_residual,
        provenance: Provenance::LambdaClosedForm,
        curve: None,
        alternatives: Vec::new(),
    })
}
