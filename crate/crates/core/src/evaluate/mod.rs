//! Screening statistics: confusion counts, metrics with Wald intervals,
//! stratified reports, ROC analysis and the rate-to-count back-solver.

mod roc;
mod stats;

pub use roc::{roc_curve, RocCurve};
pub use stats::{back_solve_counts, back_solve_str, confusion, decimals_of, metrics, report_for, round2, wald_ci, Z95};

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::model::{AcrDensity, AgeBand, CaseRecord, ConfusionCounts, DensityClass, Estimate, Metric, MetricReport, TestResult};

/// Marker printed for a metric whose denominator is zero.
pub const UNDEFINED: &str = "—";

/// A subset of the cohort that metrics are reported for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stratum {
    Overall,
    Density(DensityClass),
    Age(AgeBand),
    Menopause(bool),
    Acr(AcrDensity),
}

impl Stratum {
    /// Report order: overall, fatty/dense, age bands, menopause, ACR grade.
    pub fn all() -> Vec<Stratum> {
        let mut v = vec![
            Stratum::Overall,
            Stratum::Density(DensityClass::Fatty),
            Stratum::Density(DensityClass::Dense),
        ];
        v.extend(AgeBand::ALL.map(Stratum::Age));
        v.extend([Stratum::Menopause(false), Stratum::Menopause(true)]);
        v.extend(AcrDensity::ALL.map(Stratum::Acr));
        v
    }

    pub fn contains(self, c: &CaseRecord) -> bool {
        match self {
            Stratum::Overall => true,
            Stratum::Density(d) => c.density_class() == d,
            Stratum::Age(a) => c.age_band() == a,
            Stratum::Menopause(m) => c.menopause == m,
            Stratum::Acr(a) => c.density == a,
        }
    }

    pub fn label(self) -> String {
        match self {
            Stratum::Overall => "overall".into(),
            Stratum::Density(DensityClass::Fatty) => "fatty".into(),
            Stratum::Density(DensityClass::Dense) => "dense".into(),
            Stratum::Age(a) => a.label().into(),
            Stratum::Menopause(false) => "premenopausal".into(),
            Stratum::Menopause(true) => "postmenopausal".into(),
            Stratum::Acr(a) => format!("acr_{a}"),
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumReport {
    pub stratum: Stratum,
    pub report: MetricReport,
}

/// One metric report per stratum. Empty strata are kept with every cell
/// undefined.
pub fn stratified_report(cases: &[CaseRecord], results: &[TestResult]) -> Result<Vec<StratumReport>> {
    if cases.len() != results.len() {
        return Err(Error::LengthMismatch {
            left: cases.len(),
            right: results.len(),
        });
    }
    Ok(Stratum::all()
        .into_iter()
        .map(|stratum| {
            let mut c = ConfusionCounts::default();
            for (case, r) in cases.iter().zip(results) {
                if stratum.contains(case) {
                    c.record(r.positive, case.ground_truth.is_positive());
                }
            }
            StratumReport {
                stratum,
                report: report_for(c),
            }
        })
        .collect())
}

fn cell(e: Option<Estimate>) -> String {
    match e {
        Some(e) => format!("{:.2} ({:.2}, {:.2})", round2(e.point), round2(e.ci_lo), round2(e.ci_hi)),
        None => UNDEFINED.to_string(),
    }
}

/// Aligned text table of a stratified report under a heading.
pub fn render_report_text(title: &str, rows: &[StratumReport]) -> String {
    let mut header = vec!["stratum".to_string(), "n_pos".into(), "n_neg".into()];
    header.extend(Metric::ALL.iter().map(|m| m.name().to_string()));
    let mut table = vec![header];
    for r in rows {
        let mut line = vec![r.stratum.label(), r.report.n_pos.to_string(), r.report.n_neg.to_string()];
        line.extend(Metric::ALL.iter().map(|&m| cell(r.report.get(m))));
        table.push(line);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|j| table.iter().map(|l| l[j].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = format!("{title}\n");
    for line in &table {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (s, &w))| {
                let pad = w - s.chars().count();
                if j == 0 {
                    format!("{s}{}", " ".repeat(pad))
                } else {
                    format!("{}{s}", " ".repeat(pad))
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

/// Header of the report CSV.
pub const REPORT_CSV_HEADER: &str = "stratum,metric,point,ci_lo,ci_hi,n_pos,n_neg";

/// Long-format CSV, one line per stratum and metric, values in percent to
/// two decimals.
pub fn render_report_csv(rows: &[StratumReport]) -> String {
    let mut out = format!("{REPORT_CSV_HEADER}\n");
    for r in rows {
        for m in Metric::ALL {
            let (p, lo, hi) = match r.report.get(m) {
                Some(e) => (
                    format!("{:.2}", round2(e.point)),
                    format!("{:.2}", round2(e.ci_lo)),
                    format!("{:.2}", round2(e.ci_hi)),
                ),
                None => (UNDEFINED.into(), UNDEFINED.into(), UNDEFINED.into()),
            };
            let _ = writeln!(
                out,
                "{},{},{p},{lo},{hi},{},{}",
                r.stratum.label(),
                m.name(),
                r.report.n_pos,
                r.report.n_neg
            );
        }
    }
    out
}

/// Cohort composition per stratum: `(stratum, cases, suspicious cases)`.
pub fn cohort_table(cases: &[CaseRecord]) -> Vec<(Stratum, usize, usize)> {
    Stratum::all()
        .into_iter()
        .map(|s| {
            let members = cases.iter().filter(|c| s.contains(c));
            let (n, pos) = members.fold((0, 0), |(n, p), c| (n + 1, p + usize::from(c.ground_truth.is_positive())));
            (s, n, pos)
        })
        .collect()
}

pub fn render_cohort_table(cases: &[CaseRecord]) -> String {
    let total = cases.len().max(1) as f64;
    let mut out = format!("{:<16}{:>8}{:>9}{:>12}\n", "stratum", "cases", "%", "suspicious");
    for (s, n, pos) in cohort_table(cases) {
        let _ = writeln!(out, "{:<16}{:>8}{:>9.1}{:>12}", s.label(), n, 100.0 * n as f64 / total, pos);
    }
    out
}
