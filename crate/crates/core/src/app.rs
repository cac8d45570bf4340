//! The command implementations behind the `densefusion` binary, kept in
//! the library so they can be driven from tests.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::evaluate::{render_cohort_table, render_report_csv, render_report_text, roc_curve, stratified_report, StratumReport};
use crate::fusion::{run_policy, FusionPolicy};
use crate::imgproc::Grid;
use crate::model::{CaseRecord, ThermalFrame, TestResult};
use crate::radiomics::{analyze_frame, average_features, RadiomicFeatureVector};
use crate::risk::{mammo_positive, select_threshold_youden, train_risk_model, RiskModel, TrainingCase, TrainingReport};
use crate::scores::ScoreRow;
use crate::thermal_io::{
    generate_cohort, load_thermal_frame, write_label_pgm, write_manifest, write_thermal_frame, Calibration, CohortSpec,
};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes a phantom cohort under `out`: `frames/<id>.pgm` with `.cal`
/// sidecars, `truth/<id>.json`, and `manifest.csv`. Returns the manifest path.
pub fn run_phantom(spec: &CohortSpec, seed: u64, out: &Path) -> Result<PathBuf> {
    let cohort = generate_cohort(spec, seed)?;
    let frames = out.join("frames");
    let truth = out.join("truth");
    create_dir(&frames)?;
    create_dir(&truth)?;
    let mut records = Vec::with_capacity(cohort.len());
    for case in cohort {
        let id = &case.record.case_id;
        let frame_path = frames.join(format!("{id}.pgm"));
        write_thermal_frame(&frame_path, &case.frame, Calibration::default())?;
        case.truth.write(&truth.join(format!("{id}.json")))?;
        let mut record = case.record;
        record.thermal_refs = vec![frame_path];
        records.push(record);
    }
    let manifest = out.join("manifest.csv");
    write_manifest(&manifest, &records)?;
    info!("wrote {} phantom cases to {}", records.len(), out.display());
    Ok(manifest)
}

fn load_frames(case: &CaseRecord) -> Result<Vec<ThermalFrame>> {
    if case.thermal_refs.is_empty() {
        return Err(Error::parse(&case.case_id, "no thermal_ref"));
    }
    case.thermal_refs.iter().map(|p| load_thermal_frame(p)).collect()
}

/// Analyses one view and writes its hotspot labels, vessel skeleton and
/// breast mask as 8-bit PGMs.
fn export_debug(dir: &Path, case_id: &str, view: usize, frame: &ThermalFrame, config: &Config) -> Result<RadiomicFeatureVector> {
    let a = analyze_frame(frame, None, &config.segment)?;
    let stem = format!("{case_id}_v{view}");
    // right-side labels continue after the left ones
    let offset = a.hotspots.left.hotspots.len() as u32;
    let mut labels = a.hotspots.left.labels.clone();
    for (dst, &r) in labels.as_mut_slice().iter_mut().zip(a.hotspots.right.labels.as_slice()) {
        if r > 0 {
            *dst = r + offset;
        }
    }
    write_label_pgm(&dir.join(format!("{stem}_hotspots.pgm")), &labels)?;
    let white = |b: bool| if b { 255 } else { 0 };
    let skeleton = Grid::from_fn(frame.width(), frame.height(), |x, y| {
        white(*a.vessels.left.skeleton.get(x, y) || *a.vessels.right.skeleton.get(x, y))
    });
    write_label_pgm(&dir.join(format!("{stem}_skeleton.pgm")), &skeleton)?;
    write_label_pgm(&dir.join(format!("{stem}_mask.pgm")), &a.mask.union().map(|&b| white(b)))?;
    Ok(a.features)
}

/// Averaged feature vector over all views of a case.
pub fn extract_case(case: &CaseRecord, config: &Config, debug: Option<&Path>) -> Result<RadiomicFeatureVector> {
    let frames = load_frames(case)?;
    let views = frames
        .iter()
        .enumerate()
        .map(|(k, f)| match debug {
            Some(dir) => export_debug(dir, &case.case_id, k, f, config),
            None => analyze_frame(f, None, &config.segment).map(|a| a.features),
        })
        .collect::<Result<Vec<_>>>()?;
    average_features(&views)
}

/// Trains a model on every case of the manifest; any extraction failure
/// aborts training.
pub fn run_train(cases: &[CaseRecord], config: &Config) -> Result<TrainingReport> {
    if cases.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let positives = cases.iter().filter(|c| c.ground_truth.is_positive()).count();
    if positives == 0 || positives == cases.len() {
        return Err(Error::DegenerateLabels);
    }
    let features = cases
        .par_iter()
        .map(|c| {
            extract_case(c, config, None).map_err(|e| Error::parse(&c.case_id, format!("feature extraction failed: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let training: Vec<TrainingCase> = cases
        .iter()
        .zip(features)
        .map(|(c, features)| TrainingCase {
            features,
            age: c.age,
            menopause: c.menopause,
            suspicious: c.ground_truth.is_positive(),
        })
        .collect();
    let bins = config.bscore_bins.unwrap_or_default();
    let report = train_risk_model(&training, &config.train, bins)?;
    let correct = training
        .iter()
        .filter(|t| {
            report
                .model
                .assess(&t.features, t.age, t.menopause)
                .is_ok_and(|a| a.positive() == t.suspicious)
        })
        .count();
    info!(
        "training accuracy {:.2}% ({correct}/{})",
        100.0 * correct as f64 / training.len() as f64,
        training.len()
    );
    Ok(report)
}

/// Scores every case in manifest order. Thermal failures are logged and
/// yield a row with no thermal result; the second value counts them.
pub fn run_score(cases: &[CaseRecord], model: &RiskModel, config: &Config, debug: Option<&Path>) -> Result<(Vec<ScoreRow>, usize)> {
    if let Some(dir) = debug {
        create_dir(dir)?;
    }
    let mut model = model.clone();
    if let Some(bins) = config.bscore_bins {
        model.bins = bins;
    }
    let rows: Vec<(ScoreRow, bool)> = cases
        .par_iter()
        .map(|c| {
            let thermal = extract_case(c, config, debug).and_then(|f| model.assess(&f, c.age, c.menopause));
            let failed = match &thermal {
                Ok(_) => false,
                Err(e) => {
                    warn!("case {}: {e}", c.case_id);
                    true
                }
            };
            let row = ScoreRow {
                case_id: c.case_id.clone(),
                thermal: thermal.ok(),
                mammo_positive: c.mammo_prob.map(|p| mammo_positive(p, config.mammo_threshold)),
            };
            (row, failed)
        })
        .collect();
    let failed = rows.iter().filter(|(_, f)| *f).count();
    Ok((rows.into_iter().map(|(r, _)| r).collect(), failed))
}

/// Per-case modality results joined from the score table by `case_id`.
pub fn modality_results(cases: &[CaseRecord], scores: &[ScoreRow]) -> Result<(Vec<Option<TestResult>>, Vec<Option<TestResult>>)> {
    let mut by_id: HashMap<&str, &ScoreRow> = HashMap::new();
    for r in scores {
        if by_id.insert(&r.case_id, r).is_some() {
            return Err(Error::DuplicateId(r.case_id.clone()));
        }
    }
    let mut mammo = Vec::with_capacity(cases.len());
    let mut thermal = Vec::with_capacity(cases.len());
    for c in cases {
        let row = by_id.get(c.case_id.as_str());
        mammo.push(row.and_then(|r| r.mammo_positive).map(TestResult::mammo));
        thermal.push(row.and_then(|r| r.thermal).map(|a| TestResult::thermal(a.positive())));
    }
    Ok((mammo, thermal))
}

/// Stratified reports for the requested policy, or for every policy the
/// inputs permit when none is requested.
pub fn run_evaluate(
    cases: &[CaseRecord],
    scores: &[ScoreRow],
    policy: Option<FusionPolicy>,
) -> Result<Vec<(FusionPolicy, Vec<StratumReport>)>> {
    if cases.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let (mammo, thermal) = modality_results(cases, scores)?;
    let policies = match policy {
        Some(p) => vec![p],
        None => FusionPolicy::ALL.to_vec(),
    };
    let mut out = Vec::new();
    let mut last_err = None;
    for p in policies {
        match run_policy(p, cases, &mammo, &thermal) {
            Ok(results) => out.push((p, stratified_report(cases, &results)?)),
            Err(e) if policy.is_none() => {
                warn!("skipping {p}: {e}");
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    match (out.is_empty(), last_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(out),
    }
}

pub fn render_evaluation_text(reports: &[(FusionPolicy, Vec<StratumReport>)]) -> String {
    reports
        .iter()
        .map(|(p, rows)| render_report_text(p.name(), rows))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Writes `<policy>.csv` per policy into `dir`.
pub fn write_evaluation_csv(dir: &Path, reports: &[(FusionPolicy, Vec<StratumReport>)]) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    reports
        .iter()
        .map(|(p, rows)| {
            let path = dir.join(format!("{}.csv", p.name().to_ascii_lowercase()));
            fs::write(&path, render_report_csv(rows)).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Cohort composition plus ROC analysis of whichever scores are available.
/// The second value is a `curve,fpr,tpr` table of the ROC points.
pub fn run_report(cases: &[CaseRecord], scores: Option<&[ScoreRow]>) -> Result<(String, String)> {
    if cases.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let mut text = String::from("cohort\n");
    text.push_str(&render_cohort_table(cases));
    let mut curves = String::from("curve,fpr,tpr\n");

    let mut series: Vec<(&str, Vec<f64>, Vec<bool>)> = Vec::new();
    let (probs, labels): (Vec<f64>, Vec<bool>) = cases
        .iter()
        .filter_map(|c| c.mammo_prob.map(|p| (p, c.ground_truth.is_positive())))
        .unzip();
    series.push(("mammography", probs, labels));
    if let Some(scores) = scores {
        let by_id: HashMap<&str, &ScoreRow> = scores.iter().map(|r| (r.case_id.as_str(), r)).collect();
        let (s, l): (Vec<f64>, Vec<bool>) = cases
            .iter()
            .filter_map(|c| {
                let a = by_id.get(c.case_id.as_str())?.thermal?;
                Some((a.ensemble, c.ground_truth.is_positive()))
            })
            .unzip();
        series.push(("thermal_ensemble", s, l));
    }
    text.push_str("\nroc\n");
    for (name, s, l) in series {
        match roc_curve(&s, &l) {
            Ok(roc) => {
                let youden = select_threshold_youden(&s, &l)?;
                let _ = writeln!(text, "{name:<18} n={:<5} auc={:.4} youden_threshold={youden}", s.len(), roc.auc);
                for (fpr, tpr) in roc.points {
                    let _ = writeln!(curves, "{name},{fpr},{tpr}");
                }
            }
            Err(e) => {
                let _ = writeln!(text, "{name:<18} n={:<5} unavailable: {e}", s.len());
            }
        }
    }
    Ok((text, curves))
}
