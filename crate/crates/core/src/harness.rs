//! Seeded baseline optimizers for comparing algorithms against the certified optima.
//!
//! Two algorithms are provided: uniform random search and DE/rand/1/bin.
//! Constraints are handled with a static quadratic penalty on normalized
//! constraint values. The vessel thicknesses are searched as continuous grid
//! indices that are rounded (and clamped to `[1, 99]`) at evaluation time, so
//! every evaluated vessel design lies exactly on the thickness grid.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`; a run is a pure function of its problem and configuration.

use std::io::Write;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::constants::*;
use crate::problems::{
    cantilever_constraint, cantilever_objective, vessel_constraints, vessel_objective, CantileverDesign,
    Problem, VesselDesign,
};
use crate::validator::ProvenOptima;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    RandomSearch,
    DifferentialEvolution,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" | "random-search" | "rs" => Ok(Algorithm::RandomSearch),
            "de" | "differential-evolution" => Ok(Algorithm::DifferentialEvolution),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::RandomSearch => "random-search",
            Algorithm::DifferentialEvolution => "differential-evolution",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Objective evaluations allowed.
    pub budget: usize,
    /// DE population size.
    pub population: usize,
    /// DE differential weight.
    pub f: f64,
    /// DE crossover rate.
    pub cr: f64,
    pub penalty_coefficient: f64,
    /// Record the best-so-far values every this many evaluations (and at the last one).
    pub history_interval: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::DifferentialEvolution,
            seed: 0,
            budget: 50_000,
            population: 40,
            f: 0.7,
            cr: 0.9,
            penalty_coefficient: 1e9,
            history_interval: 500,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if self.history_interval == 0 {
            return Err(Error::Config("history interval must be positive".into()));
        }
        if !(self.penalty_coefficient >= 0.0 && self.penalty_coefficient.is_finite()) {
            return Err(Error::Config("penalty coefficient must be finite and non-negative".into()));
        }
        if self.algorithm == Algorithm::DifferentialEvolution {
            if self.population < 4 {
                return Err(Error::Config(format!("population must be at least 4, got {}", self.population)));
            }
            if !(self.f > 0.0 && self.f <= 2.0) {
                return Err(Error::Config(format!("F must lie in (0, 2], got {}", self.f)));
            }
            if !(0.0..=1.0).contains(&self.cr) {
                return Err(Error::Config(format!("CR must lie in [0, 1], got {}", self.cr)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub evaluation_index: usize,
    pub best_penalized_f: f64,
    pub best_feasible_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub problem: Problem,
    pub config: RunConfig,
    /// Design with the lowest penalized objective (thicknesses already on the grid).
    pub best_design: Vec<f64>,
    pub best_penalized_f: f64,
    /// Lowest objective among strictly feasible evaluated designs.
    pub best_feasible_f: Option<f64>,
    pub best_feasible_design: Option<Vec<f64>>,
    pub evaluations_used: usize,
    /// `(best_feasible_f - f_min) / f_min`
    pub gap: Option<f64>,
    pub history: Vec<HistoryPoint>,
}

fn proven_optima() -> Result<ProvenOptima> {
    static OPTIMA: OnceLock<std::result::Result<ProvenOptima, Error>> = OnceLock::new();
    OPTIMA.get_or_init(ProvenOptima::certified).clone()
}

/// Search-space box of the encoded variables.
fn search_bounds(problem: Problem) -> Vec<(f64, f64)> {
    match problem {
        Problem::Vessel => vec![(1.0, GRID_MAX as f64), (1.0, GRID_MAX as f64), RADIUS_BOUNDS, LENGTH_BOUNDS],
        Problem::Cantilever => vec![BEAM_BOUNDS; 5],
    }
}

/// Maps an encoded point to the design actually evaluated.
fn decode(problem: Problem, v: &[f64]) -> Vec<f64> {
    match problem {
        Problem::Vessel => {
            let snap = |q: f64| q.round().clamp(1.0, GRID_MAX as f64) as i64;
            VesselDesign::from_grid(snap(v[0]), snap(v[1]), v[2], v[3]).to_array().to_vec()
        }
        Problem::Cantilever => v.to_vec(),
    }
}

struct Evaluation {
    objective: f64,
    penalized: f64,
    /// Every constraint `<= 0` exactly.
    feasible: bool,
}

fn evaluate_point(problem: Problem, design: &[f64], penalty: f64) -> Evaluation {
    let (objective, scaled): (f64, Vec<f64>) = match problem {
        Problem::Vessel => {
            let x = VesselDesign { shell_thickness: design[0], head_thickness: design[1], radius: design[2], length: design[3] };
            let g = vessel_constraints(&x).expect("finite design");
            let scale = [1.0, 1.0, VOLUME, LENGTH_LIMIT];
            (vessel_objective(&x).expect("finite design"), g.iter().zip(scale).map(|(g, s)| g / s).collect())
        }
        Problem::Cantilever => {
            let x = CantileverDesign { x: design.try_into().expect("five values") };
            (cantilever_objective(&x).expect("finite design"), vec![cantilever_constraint(&x).expect("nonzero heights")])
        }
    };
    let violation: f64 = scaled.iter().map(|g| g.max(0.0).powi(2)).sum();
    Evaluation { objective, penalized: objective + penalty * violation, feasible: scaled.iter().all(|&g| g <= 0.0) }
}

/// Best-so-far bookkeeping shared by both algorithms.
struct Tracker {
    problem: Problem,
    config: RunConfig,
    evaluations: usize,
    best_penalized: (f64, Vec<f64>),
    best_feasible: Option<(f64, Vec<f64>)>,
    history: Vec<HistoryPoint>,
}

impl Tracker {
    fn new(problem: Problem, config: RunConfig) -> Self {
        Tracker {
            problem,
            config,
            evaluations: 0,
            best_penalized: (f64::INFINITY, Vec::new()),
            best_feasible: None,
            history: Vec::new(),
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.config.budget
    }

    /// Evaluates an encoded point and returns its penalized objective.
    fn evaluate(&mut self, encoded: &[f64]) -> f64 {
        let design = decode(self.problem, encoded);
        let e = evaluate_point(self.problem, &design, self.config.penalty_coefficient);
        self.evaluations += 1;
        if e.penalized < self.best_penalized.0 {
            self.best_penalized = (e.penalized, design.clone());
        }
        if e.feasible && self.best_feasible.as_ref().is_none_or(|b| e.objective < b.0) {
            self.best_feasible = Some((e.objective, design));
        }
        if self.evaluations.is_multiple_of(self.config.history_interval) || self.evaluations == self.config.budget {
            self.history.push(HistoryPoint {
                evaluation_index: self.evaluations,
                best_penalized_f: self.best_penalized.0,
                best_feasible_f: self.best_feasible.as_ref().map(|b| b.0),
            });
        }
        e.penalized
    }

    fn finish(self, f_min: f64) -> RunResult {
        let best_feasible_f = self.best_feasible.as_ref().map(|b| b.0);
        RunResult {
            problem: self.problem,
            config: self.config,
            best_design: self.best_penalized.1,
            best_penalized_f: self.best_penalized.0,
            best_feasible_f,
            best_feasible_design: self.best_feasible.map(|b| b.1),
            evaluations_used: self.evaluations,
            gap: best_feasible_f.map(|f| (f - f_min) / f_min),
            history: self.history,
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()
}

fn random_search(tracker: &mut Tracker, rng: &mut ChaCha8Rng) {
    let bounds = search_bounds(tracker.problem);
    while !tracker.exhausted() {
        let x = sample(rng, &bounds);
        tracker.evaluate(&x);
    }
}

/// DE/rand/1/bin. Mutants leaving the box are pulled back to a uniform point
/// between the violated bound and the target's coordinate.
fn differential_evolution(tracker: &mut Tracker, rng: &mut ChaCha8Rng) {
    let bounds = search_bounds(tracker.problem);
    let dim = bounds.len();
    let np = tracker.config.population;
    let (weight, cr) = (tracker.config.f, tracker.config.cr);

    let mut pop = Vec::with_capacity(np);
    let mut fit = Vec::with_capacity(np);
    while pop.len() < np && !tracker.exhausted() {
        let x = sample(rng, &bounds);
        fit.push(tracker.evaluate(&x));
        pop.push(x);
    }
    if pop.len() < np {
        return;
    }

    let mut trial = vec![0.0; dim];
    'search: loop {
        for i in 0..np {
            if tracker.exhausted() {
                break 'search;
            }
            let pick = |rng: &mut ChaCha8Rng, taken: &[usize]| loop {
                let k = rng.gen_range(0..np);
                if !taken.contains(&k) {
                    break k;
                }
            };
            let r1 = pick(rng, &[i]);
            let r2 = pick(rng, &[i, r1]);
            let r3 = pick(rng, &[i, r1, r2]);
            let forced = rng.gen_range(0..dim);
            for d in 0..dim {
                trial[d] = if d == forced || rng.gen::<f64>() < cr {
                    let v = pop[r1][d] + weight * (pop[r2][d] - pop[r3][d]);
                    let (lo, hi) = bounds[d];
                    if v < lo {
                        lo + rng.gen::<f64>() * (pop[i][d] - lo)
                    } else if v > hi {
                        hi - rng.gen::<f64>() * (hi - pop[i][d])
                    } else {
                        v
                    }
                } else {
                    pop[i][d]
                };
            }
            let ft = tracker.evaluate(&trial);
            if ft <= fit[i] {
                pop[i].copy_from_slice(&trial);
                fit[i] = ft;
            }
        }
    }
}

/// One seeded run.
pub fn run(problem: Problem, config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let f_min = proven_optima()?.get(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tracker = Tracker::new(problem, *config);
    match config.algorithm {
        Algorithm::RandomSearch => random_search(&mut tracker, &mut rng),
        Algorithm::DifferentialEvolution => differential_evolution(&mut tracker, &mut rng),
    }
    Ok(tracker.finish(f_min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStat {
    pub threshold: f64,
    pub successes: usize,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub problem: Problem,
    /// In the order of the input configurations.
    pub runs: Vec<RunResult>,
    pub thresholds: Vec<ThresholdStat>,
    /// Runs that never evaluated a feasible design.
    pub infeasible_runs: usize,
    pub median_gap: Option<f64>,
    pub best_gap: Option<f64>,
    pub worst_gap: Option<f64>,
    pub mean_gap: Option<f64>,
    pub gap_variance: Option<f64>,
}

/// Runs every configuration (in parallel) and aggregates gaps. Aggregates are
/// computed from sorted gaps, so they do not depend on configuration order.
pub fn batch(problem: Problem, configs: &[RunConfig], thresholds: &[f64]) -> Result<BatchReport> {
    if configs.is_empty() {
        return Err(Error::Config("batch needs at least one configuration".into()));
    }
    let runs = configs.par_iter().map(|c| run(problem, c)).collect::<Result<Vec<_>>>()?;

    let mut gaps: Vec<f64> = runs.iter().filter_map(|r| r.gap).collect();
    gaps.sort_by(f64::total_cmp);
    let n = runs.len();
    let thresholds = thresholds
        .iter()
        .map(|&t| {
            let successes = gaps.iter().filter(|&&g| g < t).count();
            ThresholdStat { threshold: t, successes, success_rate: successes as f64 / n as f64 }
        })
        .collect();

    let median_gap = match gaps.len() {
        0 => None,
        m if m % 2 == 1 => Some(gaps[m / 2]),
        m => Some(0.5 * (gaps[m / 2 - 1] + gaps[m / 2])),
    };
    let mean_gap = (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64);
    let gap_variance = mean_gap.map(|mu| gaps.iter().map(|g| (g - mu).powi(2)).sum::<f64>() / gaps.len() as f64);

    Ok(BatchReport {
        problem,
        infeasible_runs: n - gaps.len(),
        thresholds,
        median_gap,
        best_gap: gaps.first().copied(),
        worst_gap: gaps.last().copied(),
        mean_gap,
        gap_variance,
        runs,
    })
}

/// Writes a run's history as CSV: `evaluation_index,best_penalized_f,best_feasible_f`.
pub fn write_history_csv<W: Write>(result: &RunResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for h in &result.history {
        w.serialize(h).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
