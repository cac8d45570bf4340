use crate::error::{Error, Result};
use crate::model::{ConfusionCounts, Estimate, GroundTruth, MetricReport, TestResult};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// 2×2 counts of `results` against `truths`, aligned by position.
pub fn confusion(results: &[TestResult], truths: &[GroundTruth]) -> Result<ConfusionCounts> {
    if results.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: results.len(),
            right: truths.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (r, t) in results.iter().zip(truths) {
        c.record(r.positive, t.is_positive());
    }
    Ok(c)
}

/// Wald interval `p ± 1.96·sqrt(p(1-p)/n)` in percent, clipped to [0, 100].
pub fn wald_ci(p: f64, n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::NZero);
    }
    let half = Z95 * (p * (1.0 - p) / n as f64).sqrt();
    Ok(((100.0 * (p - half)).max(0.0), (100.0 * (p + half)).min(100.0)))
}

fn estimate(num: u64, den: u64) -> Option<Estimate> {
    (den > 0).then(|| {
        let p = num as f64 / den as f64;
        let (ci_lo, ci_hi) = wald_ci(p, den).expect("positive denominator");
        Estimate {
            point: 100.0 * p,
            ci_lo,
            ci_hi,
        }
    })
}

/// Metrics of any counts, with undefined cells as `None`. An empty cohort
/// gives an all-undefined report.
pub fn report_for(c: ConfusionCounts) -> MetricReport {
    let sensitivity = estimate(c.true_pos, c.n_pos());
    let specificity = estimate(c.true_neg, c.n_neg());
    // Balanced accuracy uses the stratum total as its Wald denominator.
    let balanced_accuracy = match (sensitivity, specificity) {
        (Some(se), Some(sp)) => {
            let p = (se.point + sp.point) / 200.0;
            let (ci_lo, ci_hi) = wald_ci(p, c.total()).expect("non-empty cohort");
            Some(Estimate {
                point: (se.point + sp.point) / 2.0,
                ci_lo,
                ci_hi,
            })
        }
        _ => None,
    };
    MetricReport {
        sensitivity,
        specificity,
        ppv: estimate(c.true_pos, c.predicted_pos()),
        npv: estimate(c.true_neg, c.predicted_neg()),
        balanced_accuracy,
        n_pos: c.n_pos(),
        n_neg: c.n_neg(),
        counts: c,
    }
}

/// Sensitivity, specificity, PPV, NPV and balanced accuracy with 95% CIs.
pub fn metrics(c: ConfusionCounts) -> Result<MetricReport> {
    if c.total() == 0 {
        return Err(Error::EmptyCohort);
    }
    Ok(report_for(c))
}

/// Rounds half away from zero to two decimals, as reports print them.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Number of decimals written in a rate such as `"94.55"` or `"17.0"`.
pub fn decimals_of(rate: &str) -> u32 {
    rate.trim().split_once('.').map_or(0, |(_, d)| d.len() as u32)
}

/// Every `(count, n)` with `n` in `n_range` whose percentage rounds to
/// `rate` at the given number of decimals, i.e. lies within half a unit of
/// its last decimal (inclusive). Compared exactly in integers.
pub fn back_solve_counts(rate: f64, decimals: u32, n_range: std::ops::RangeInclusive<u64>) -> Vec<(u64, u64)> {
    let scale = 10u128.pow(decimals);
    let target = (rate * scale as f64).round() as i128;
    let mut out = Vec::new();
    for n in n_range {
        if n == 0 {
            continue;
        }
        for count in 0..=n {
            // |100·count/n − target/scale| ≤ 1/(2·scale); inclusive since an
            // exact tie may have been rounded either way
            let diff = 200 * scale as i128 * count as i128 - 2 * target * n as i128;
            if diff.unsigned_abs() <= n as u128 {
                out.push((count, n));
            }
        }
    }
    out
}

/// [`back_solve_counts`] taking the rate as written, so its precision sets
/// the tolerance.
pub fn back_solve_str(rate: &str, n_range: std::ops::RangeInclusive<u64>) -> Result<Vec<(u64, u64)>> {
    let value: f64 = rate
        .trim()
        .parse()
        .map_err(|_| Error::InvalidSpec(format!("bad rate `{rate}`")))?;
    Ok(back_solve_counts(value, decimals_of(rate), n_range))
}
