//! Screening of claimed solutions against the certified optima.
//!
//! Corpus files hold one record per line:
//!
//! ```text
//! source,problem,reported_f[,x1,...,xn][,*]
//! ```
//!
//! where `n` is 4 for the vessel and 5 for the cantilever, and a trailing
//! `*` (either as its own field or glued to `reported_f`) marks a result that
//! is known to be invalid. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimum::{cantilever_global_optimum, vessel_global_optimum};
use crate::problems::constants::{BEAM_LOADS, HEAD_STRESS, SHELL_STRESS};
use crate::problems::{
    evaluate_cantilever, evaluate_vessel, CantileverDesign, FeasibilityTolerance, Problem, VesselDesign,
};

/// Published results for the pressure-vessel benchmark, shipped with the crate.
pub const BUNDLED_CORPUS: &str = include_str!("../data/vessel_literature.csv");

/// Recomputed objectives below `f_min` by more than this are never blamed on
/// the claim when the attached design checks out.
const SOUNDNESS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub source: String,
    pub problem: Problem,
    pub reported_f: f64,
    /// Design vector in problem order, when the source published one.
    pub design: Option<Vec<f64>>,
    /// Marked invalid in the corpus.
    pub flagged_invalid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Verified,
    ObjectiveMismatch,
    Infeasible,
    GridViolation,
    BelowProvenOptimum,
    UnverifiableNoDesign,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Verified => "verified",
            Classification::ObjectiveMismatch => "objective-mismatch",
            Classification::Infeasible => "infeasible",
            Classification::GridViolation => "grid-violation",
            Classification::BelowProvenOptimum => "below-proven-optimum",
            Classification::UnverifiableNoDesign => "unverifiable-no-design",
        }
    }

    /// Whether this outcome signals a problem with the claim.
    pub fn is_anomaly(self) -> bool {
        !matches!(self, Classification::Verified | Classification::UnverifiableNoDesign)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub classification: Classification,
    pub recomputed_f: Option<f64>,
    pub worst_violation: Option<f64>,
    /// `reported_f - f_min`
    pub gap_to_optimum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationTolerances {
    /// Margin below `f_min` a reported objective may sit before it is rejected.
    pub claim: f64,
    /// Allowed `|recomputed - reported|`.
    pub report: f64,
    pub feasibility: FeasibilityTolerance,
    /// Decimal places published design vectors are rounded to. Constraint
    /// tolerances are widened by what that rounding can move each constraint.
    pub design_decimals: Option<u32>,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        ValidationTolerances {
            claim: 1e-3,
            report: 0.01,
            feasibility: FeasibilityTolerance::default(),
            design_decimals: Some(4),
        }
    }
}

/// Certified minimum objective of each problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProvenOptima {
    pub vessel: f64,
    pub cantilever: f64,
}

impl ProvenOptima {
    pub fn certified() -> Result<Self> {
        Ok(ProvenOptima {
            vessel: vessel_global_optimum()?.objective,
            cantilever: cantilever_global_optimum()?.objective,
        })
    }

    pub fn get(&self, problem: Problem) -> f64 {
        match problem {
            Problem::Vessel => self.vessel,
            Problem::Cantilever => self.cantilever,
        }
    }
}

struct DesignCheck {
    recomputed: f64,
    constraints_ok: bool,
    on_grid: bool,
    worst_violation: f64,
}

fn check_design(problem: Problem, values: &[f64], tol: &ValidationTolerances) -> Result<DesignCheck> {
    if values.len() != problem.dimension() {
        return Err(Error::Domain(format!(
            "{problem} design needs {} values, got {}",
            problem.dimension(),
            values.len()
        )));
    }
    let half_unit = tol.design_decimals.map_or(0.0, |n| 0.5 * 10f64.powi(-(n as i32)));
    let mut ft = tol.feasibility;
    match problem {
        Problem::Vessel => {
            let x = VesselDesign { shell_thickness: values[0], head_thickness: values[1], radius: values[2], length: values[3] };
            let (r, l) = (x.radius.abs(), x.length.abs());
            let dv = 2.0 * std::f64::consts::PI * r * l + 4.0 * std::f64::consts::PI * r * r
                + std::f64::consts::PI * r * r;
            // g1, g2 move by 0.0193 / 0.00954 per unit r; g4 by 1 per unit L.
            ft.slack += half_unit * SHELL_STRESS.max(HEAD_STRESS).max(1.0);
            ft.volume += half_unit * dv;
            ft.bound += half_unit;
            let report = evaluate_vessel(&x, &ft)?;
            let g = &report.constraint_slacks;
            let constraints_ok = report.bound_violations.is_empty()
                && g.iter().enumerate().all(|(i, &gi)| gi <= if i == 2 { ft.volume } else { ft.slack });
            Ok(DesignCheck {
                recomputed: report.objective,
                constraints_ok,
                on_grid: !report.grid_violation,
                worst_violation: report.max_violation,
            })
        }
        Problem::Cantilever => {
            let x = CantileverDesign { x: values.try_into().expect("length checked") };
            let sensitivity: f64 =
                BEAM_LOADS.iter().zip(&x.x).map(|(a, xi)| 3.0 * a / xi.abs().powi(4)).sum();
            ft.slack += half_unit * sensitivity;
            ft.bound += half_unit;
            let report = evaluate_cantilever(&x, &ft)?;
            Ok(DesignCheck {
                recomputed: report.objective,
                constraints_ok: report.feasible,
                on_grid: true,
                worst_violation: report.max_violation,
            })
        }
    }
}

/// Classifies one claim. Precedence: infeasible, grid-violation,
/// below-proven-optimum, objective-mismatch, then verified (design present)
/// or unverifiable-no-design.
///
/// A reported objective below the optimum is charged to the claim unless the
/// attached design is feasible, on the grid and its recomputed objective is not
/// below the optimum; then the report itself is wrong (objective-mismatch).
pub fn validate(record: &CandidateRecord, optima: &ProvenOptima, tol: &ValidationTolerances) -> Result<ValidationVerdict> {
    if !(record.reported_f > 0.0 && record.reported_f.is_finite()) {
        return Err(Error::Domain(format!("{}: reported objective must be positive", record.source)));
    }
    let f_min = optima.get(record.problem);
    let gap_to_optimum = record.reported_f - f_min;
    let below_claim = record.reported_f < f_min - tol.claim;

    let check = record.design.as_deref().map(|v| check_design(record.problem, v, tol)).transpose()?;

    let classification = match &check {
        Some(c) if !c.constraints_ok => Classification::Infeasible,
        Some(c) if !c.on_grid => Classification::GridViolation,
        Some(c) if below_claim && c.recomputed < f_min - SOUNDNESS_SLACK => Classification::BelowProvenOptimum,
        None if below_claim => Classification::BelowProvenOptimum,
        Some(c) if below_claim || (c.recomputed - record.reported_f).abs() > tol.report => {
            Classification::ObjectiveMismatch
        }
        Some(_) => Classification::Verified,
        None => Classification::UnverifiableNoDesign,
    };
    Ok(ValidationVerdict {
        classification,
        recomputed_f: check.as_ref().map(|c| c.recomputed),
        worst_violation: check.as_ref().map(|c| c.worst_violation),
        gap_to_optimum,
    })
}

fn parse_number(field: &str, what: &str, line: u64) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse { line, message: format!("invalid {what} `{field}`") })
}

/// Parses a corpus from any reader.
pub fn parse_corpus<R: Read>(input: R) -> Result<Vec<CandidateRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let mut fields: Vec<&str> = row.iter().collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }

        let mut flagged_invalid = false;
        if fields.last() == Some(&"*") {
            flagged_invalid = true;
            fields.pop();
        }
        if fields.len() < 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected `source,problem,reported_f[,design...][,*]`, got {} fields", fields.len()),
            });
        }
        let source = fields[0].to_string();
        if source.is_empty() {
            return Err(Error::Parse { line, message: "empty source".into() });
        }
        let problem: Problem = fields[1]
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("unknown problem `{}`", fields[1]) })?;

        let mut f_field = fields[2];
        if let Some(stripped) = f_field.strip_suffix('*') {
            flagged_invalid = true;
            f_field = stripped.trim_end();
        }
        let reported_f = parse_number(f_field, "reported objective", line)?;
        if reported_f <= 0.0 {
            return Err(Error::Parse { line, message: format!("reported objective must be positive, got {reported_f}") });
        }

        let design = match &fields[3..] {
            [] => None,
            values if values.len() == problem.dimension() => Some(
                values
                    .iter()
                    .map(|v| parse_number(v, "design value", line))
                    .collect::<Result<Vec<_>>>()?,
            ),
            values => {
                return Err(Error::Parse {
                    line,
                    message: format!("{problem} design needs {} values, got {}", problem.dimension(), values.len()),
                })
            }
        };
        records.push(CandidateRecord { source, problem, reported_f, design, flagged_invalid });
    }
    Ok(records)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CandidateRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_corpus(std::io::BufReader::new(file))
}

pub fn bundled_corpus() -> Vec<CandidateRecord> {
    parse_corpus(BUNDLED_CORPUS.as_bytes()).expect("bundled corpus parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub record: CandidateRecord,
    pub verdict: ValidationVerdict,
    /// Starred records must be rejected (below-proven-optimum or infeasible);
    /// unstarred ones must not be anomalous.
    pub as_expected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub entries: Vec<ReportEntry>,
    pub counts: BTreeMap<Classification, usize>,
    /// Entries with `as_expected == false`.
    pub anomalies: usize,
    /// Lowest reported objective among unstarred records, with its source.
    pub best_unflagged: Option<(String, f64)>,
}

impl CorpusReport {
    pub fn count(&self, c: Classification) -> usize {
        self.counts.get(&c).copied().unwrap_or(0)
    }
}

pub fn corpus_report(records: &[CandidateRecord], optima: &ProvenOptima, tol: &ValidationTolerances) -> Result<CorpusReport> {
    let mut entries = Vec::with_capacity(records.len());
    let mut counts = BTreeMap::new();
    for record in records {
        let verdict = validate(record, optima, tol)?;
        let c = verdict.classification;
        let as_expected = if record.flagged_invalid {
            matches!(c, Classification::BelowProvenOptimum | Classification::Infeasible)
        } else {
            !c.is_anomaly()
        };
        *counts.entry(c).or_insert(0) += 1;
        entries.push(ReportEntry { record: record.clone(), verdict, as_expected });
    }
    let anomalies = entries.iter().filter(|e| !e.as_expected).count();
    let best_unflagged = entries
        .iter()
        .filter(|e| !e.record.flagged_invalid)
        .min_by(|a, b| a.record.reported_f.total_cmp(&b.record.reported_f))
        .map(|e| (e.record.source.clone(), e.record.reported_f));
    Ok(CorpusReport { entries, counts, anomalies, best_unflagged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optima() -> ProvenOptima {
        ProvenOptima::certified().unwrap()
    }

    fn vessel(source: &str, f: f64, design: Option<[f64; 4]>) -> CandidateRecord {
        CandidateRecord {
            source: source.into(),
            problem: Problem::Vessel,
            reported_f: f,
            design: design.map(|d| d.to_vec()),
            flagged_invalid: false,
        }
    }

    #[test]
    fn low_claim_without_design() {
        let v = validate(&vessel("Hu", 6059.131, None), &optima(), &ValidationTolerances::default()).unwrap();
        assert_eq!(v.classification, Classification::BelowProvenOptimum);
        assert!(v.gap_to_optimum < 0.0);
        assert!(v.recomputed_f.is_none());
    }

    #[test]
    fn rounded_published_design_verifies() {
        let rec = vessel("GandomiYang", 6059.714, Some([0.8125, 0.4375, 42.0984, 176.6366]));
        let v = validate(&rec, &optima(), &ValidationTolerances::default()).unwrap();
        assert_eq!(v.classification, Classification::Verified, "{v:?}");
        assert!((v.recomputed_f.unwrap() - 6059.714).abs() < 0.01);
    }

    #[test]
    fn rounded_design_fails_without_rounding_allowance() {
        let rec = vessel("GandomiYang", 6059.714, Some([0.8125, 0.4375, 42.0984, 176.6366]));
        let tol = ValidationTolerances { design_decimals: None, ..Default::default() };
        let v = validate(&rec, &optima(), &tol).unwrap();
        assert_eq!(v.classification, Classification::Infeasible);
    }

    #[test]
    fn certificate_self_validates() {
        let cert = vessel_global_optimum().unwrap();
        let rec = CandidateRecord {
            source: "certificate".into(),
            problem: Problem::Vessel,
            reported_f: cert.objective,
            design: Some(cert.design.values()),
            flagged_invalid: false,
        };
        let v = validate(&rec, &optima(), &ValidationTolerances::default()).unwrap();
        assert_eq!(v.classification, Classification::Verified);
        assert!(v.gap_to_optimum.abs() < 1e-12);
    }

    #[test]
    fn precedence() {
        let o = optima();
        let tol = ValidationTolerances::default();
        // Off-grid and infeasible: infeasible wins.
        let v = validate(&vessel("x", 5000.0, Some([0.7, 0.4375, 42.0984, 176.6366])), &o, &tol).unwrap();
        assert_eq!(v.classification, Classification::Infeasible);
        // Off-grid but feasible.
        let v = validate(&vessel("x", 6100.0, Some([0.85, 0.45, 42.0984, 176.6366])), &o, &tol).unwrap();
        assert_eq!(v.classification, Classification::GridViolation);
        // Feasible design, but the claimed value is wrong.
        let v = validate(&vessel("x", 7000.0, Some([0.8125, 0.4375, 42.0984, 176.6366])), &o, &tol).unwrap();
        assert_eq!(v.classification, Classification::ObjectiveMismatch);
        // A feasible design with a too-low claim is a misreport, not a violation of the optimum.
        let v = validate(&vessel("x", 6000.0, Some([0.8125, 0.5, 42.0, 180.0])), &o, &tol).unwrap();
        assert_eq!(v.classification, Classification::ObjectiveMismatch, "{v:?}");
        // Unknown design, plausible claim.
        let v = validate(&vessel("x", 6500.0, None), &o, &tol).unwrap();
        assert_eq!(v.classification, Classification::UnverifiableNoDesign);
    }

    #[test]
    fn cantilever_records() {
        let o = optima();
        let tol = ValidationTolerances::default();
        let rec = CandidateRecord {
            source: "best".into(),
            problem: Problem::Cantilever,
            reported_f: 1.33999,
            design: Some(vec![6.0089, 5.3049, 4.5023, 3.5077, 2.1504]),
            flagged_invalid: false,
        };
        assert_eq!(validate(&rec, &o, &tol).unwrap().classification, Classification::Verified);
        let low = CandidateRecord { reported_f: 1.3, design: None, ..rec.clone() };
        assert_eq!(validate(&low, &o, &tol).unwrap().classification, Classification::BelowProvenOptimum);
        let thin = CandidateRecord { reported_f: 1.0, design: Some(vec![4.0; 5]), ..rec };
        assert_eq!(validate(&thin, &o, &tol).unwrap().classification, Classification::Infeasible);
    }

    #[test]
    fn invalid_record_is_rejected() {
        assert!(validate(&vessel("x", -1.0, None), &optima(), &ValidationTolerances::default()).is_err());
        let bad = vessel("x", 6100.0, Some([1.0, 1.0, 1.0, 1.0]));
        let bad = CandidateRecord { design: Some(vec![1.0, 2.0]), ..bad };
        assert!(validate(&bad, &optima(), &ValidationTolerances::default()).is_err());
    }

    #[test]
    fn parse_rows() {
        let text = "# comment\nSandgren,vessel,7980.894\nMontes,vessel,6059.702*\nHu, vessel, 6059.131, *\n\nX,cantilever,1.4,6,5,4,3,2\n";
        let recs = parse_corpus(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 4);
        assert_eq!(recs[0].reported_f, 7980.894);
        assert!(!recs[0].flagged_invalid);
        assert!(recs[1].flagged_invalid && recs[2].flagged_invalid);
        assert_eq!(recs[3].design.as_deref(), Some(&[6.0, 5.0, 4.0, 3.0, 2.0][..]));
        assert!(parse_corpus("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn parse_errors_name_the_line() {
        for (text, line) in [
            ("A,vessel,1\nB,vessel,abc\n", 2),
            ("# c\nA,vessel,1\nB,frobnicator,6000\n", 3),
            ("A,vessel,6000,1,2\n", 1),
            ("A,vessel\n", 1),
            ("A,vessel,-5\n", 1),
        ] {
            match parse_corpus(text.as_bytes()) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn bundled_corpus_shape() {
        let recs = bundled_corpus();
        assert_eq!(recs.len(), 38);
        assert!(recs.iter().all(|r| r.problem == Problem::Vessel));
        let starred: Vec<f64> = recs.iter().filter(|r| r.flagged_invalid).map(|r| r.reported_f).collect();
        assert_eq!(starred, vec![6059.702, 6059.131]);
    }

    #[test]
    fn report_over_certificate_only() {
        let cert = vessel_global_optimum().unwrap();
        let rec = vessel("certificate", cert.objective, Some(cert.design.values().try_into().unwrap()));
        let report = corpus_report(&[rec], &optima(), &ValidationTolerances::default()).unwrap();
        assert_eq!(report.count(Classification::Verified), 1);
        assert_eq!(report.anomalies, 0);
    }
}
