//! Brute-force enumeration of every thickness pair `(I, J)` in `[1, 99]^2`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::vessel::{curve_length, vessel_radius_cap, vessel_radius_interval, ReducedVesselCoeffs};
use crate::error::{Error, Result};
use crate::problems::constants::{GRID_MAX, GRID_STEP};
use crate::problems::{vessel_objective, VesselDesign};
use crate::roots::golden_section_min;

/// Subintervals used to bracket sign changes of the curve derivative.
const SCAN_INTERVALS: usize = 64;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "I")]
    pub i: i64,
    #[serde(rename = "J")]
    pub j: i64,
    pub d1: f64,
    pub d2: f64,
    /// False when the radius cap falls below `r1`.
    pub feasible: bool,
    pub r_opt: Option<f64>,
    #[serde(rename = "L_opt")]
    pub l_opt: Option<f64>,
    pub f_opt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSweep {
    /// Row-major in `I`, then `J`; infeasible rows are kept.
    pub rows: Vec<SweepRow>,
    pub argmin: (i64, i64),
    pub min_objective: f64,
}

impl GridSweep {
    pub fn row(&self, i: i64, j: i64) -> Option<&SweepRow> {
        let idx = (i - 1) * GRID_MAX + (j - 1);
        self.rows.get(usize::try_from(idx).ok()?).filter(|r| r.i == i && r.j == j)
    }
}

fn sweep_row(i: i64, j: i64, r1: f64, r2: f64) -> Result<SweepRow> {
    let (d1, d2) = (i as f64 * GRID_STEP, j as f64 * GRID_STEP);
    let upper = vessel_radius_cap(d1, d2).min(r2);
    let mut row = SweepRow { i, j, d1, d2, feasible: false, r_opt: None, l_opt: None, f_opt: None };
    if upper < r1 {
        return Ok(row);
    }
    let coeffs = ReducedVesselCoeffs::from_thicknesses(d1, d2);
    let mut candidates = vec![r1, upper];

    let nodes: Vec<f64> =
        (0..=SCAN_INTERVALS).map(|s| r1 + (upper - r1) * s as f64 / SCAN_INTERVALS as f64).collect();
    let slopes: Vec<f64> = nodes.iter().map(|&r| coeffs.curve_derivative(r)).collect();
    for k in 0..SCAN_INTERVALS {
        if slopes[k] < 0.0 && slopes[k + 1] >= 0.0 {
            let lo = nodes[k.saturating_sub(1)];
            let hi = nodes[(k + 1).min(SCAN_INTERVALS)];
            let (r, _) = golden_section_min(|r| coeffs.objective_on_curve(r), lo, hi, GOLDEN_TOL);
            candidates.push(r);
        }
    }

    let mut best: Option<(f64, f64, f64)> = None;
    for r in candidates {
        let l = curve_length(r);
        let f = vessel_objective(&VesselDesign { shell_thickness: d1, head_thickness: d2, radius: r, length: l })?;
        if best.is_none_or(|b| f < b.2) {
            best = Some((r, l, f));
        }
    }
    let (r, l, f) = best.expect("at least two candidates");
    row.feasible = true;
    row.r_opt = Some(r);
    row.l_opt = Some(l);
    row.f_opt = Some(f);
    Ok(row)
}

/// Minimizes the reduced objective along the active-volume curve for every
/// thickness pair. Rows are computed independently, so the output does not
/// depend on evaluation order.
pub fn vessel_grid_sweep() -> Result<GridSweep> {
    let (r1, r2) = vessel_radius_interval()?;
    let pairs: Vec<(i64, i64)> = (1..=GRID_MAX).flat_map(|i| (1..=GRID_MAX).map(move |j| (i, j))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(i, j)| sweep_row(i, j, r1, r2))
        .collect::<Result<Vec<_>>>()?;

    let (argmin, min_objective) = rows
        .iter()
        .filter_map(|r| r.f_opt.map(|f| ((r.i, r.j), f)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Domain("no feasible thickness pair".into()))?;
    Ok(GridSweep { rows, argmin, min_objective })
}

/// Writes the sweep as CSV with header `I,J,d1,d2,feasible,r_opt,L_opt,f_opt`
/// followed by a `# argmin,I,J,f` footer line.
pub fn write_sweep_csv<W: Write>(sweep: &GridSweep, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &sweep.rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    let mut out = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "# argmin,{},{},{}", sweep.argmin.0, sweep.argmin.1, sweep.min_objective)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_12_7_is_infeasible() {
        let (r1, r2) = vessel_radius_interval().unwrap();
        let row = sweep_row(12, 7, r1, r2).unwrap();
        assert!(!row.feasible);
        assert!(row.f_opt.is_none());
        assert!(12.0 * GRID_STEP / 0.0193 < r1);
    }

    #[test]
    fn golden_refinement_finds_interior_minimum() {
        // Thick shells push the minimum into the interior of a wide arc:
        // the scan must not stop at the endpoints.
        let (r1, r2) = vessel_radius_interval().unwrap();
        let row = sweep_row(99, 99, r1, r2).unwrap();
        let coeffs = ReducedVesselCoeffs::from_thicknesses(99.0 * GRID_STEP, 99.0 * GRID_STEP);
        let dense = (0..=20_000)
            .map(|s| r1 + (r2 - r1) * s as f64 / 20_000.0)
            .map(|r| coeffs.objective_on_curve(r))
            .fold(f64::INFINITY, f64::min);
        assert!(row.f_opt.unwrap() <= dense + 1e-6 * dense);
    }

    #[test]
    fn csv_has_header_and_footer() {
        let sweep = GridSweep {
            rows: vec![
                SweepRow { i: 1, j: 1, d1: 0.0625, d2: 0.0625, feasible: false, r_opt: None, l_opt: None, f_opt: None },
                SweepRow { i: 13, j: 7, d1: 0.8125, d2: 0.4375, feasible: true, r_opt: Some(42.0), l_opt: Some(176.0), f_opt: Some(6059.0) },
            ],
            argmin: (13, 7),
            min_objective: 6059.0,
        };
        let mut buf = Vec::new();
        write_sweep_csv(&sweep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "I,J,d1,d2,feasible,r_opt,L_opt,f_opt");
        assert_eq!(lines[1], "1,1,0.0625,0.0625,false,,,");
        assert_eq!(lines[3], "# argmin,13,7,6059");
    }
}
