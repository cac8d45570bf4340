use crate::error::{Error, Result};
use crate::model::BScore;

use super::logistic::{fit_logistic, sigmoid, Fit, TrainOptions};

/// Combines the three group probabilities with age and menopause.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleModel {
    pub w_hotspot: f64,
    pub w_vascular: f64,
    pub w_areolar: f64,
    /// Weight on age in years divided by 100.
    pub w_age: f64,
    pub w_menopause: f64,
    pub bias: f64,
}

impl EnsembleModel {
    pub fn zero() -> Self {
        EnsembleModel {
            w_hotspot: 0.0,
            w_vascular: 0.0,
            w_areolar: 0.0,
            w_age: 0.0,
            w_menopause: 0.0,
            bias: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.w_hotspot, self.w_vascular, self.w_areolar, self.w_age, self.w_menopause, self.bias];
        if all.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::SchemaMismatch("ensemble weights must be finite".into()))
        }
    }
}

/// Ensemble inputs in weight order.
pub fn ensemble_inputs(scores: [f64; 3], age: u32, menopause: bool) -> Vec<f64> {
    vec![scores[0], scores[1], scores[2], age as f64 / 100.0, if menopause { 1.0 } else { 0.0 }]
}

/// `sigmoid(w·s + w_age·age/100 + w_meno·menopause + b)` over the hotspot,
/// vascular and areolar scores.
pub fn ensemble_score(e: &EnsembleModel, scores: [f64; 3], age: u32, menopause: bool) -> f64 {
    let x = ensemble_inputs(scores, age, menopause);
    let w = [e.w_hotspot, e.w_vascular, e.w_areolar, e.w_age, e.w_menopause];
    sigmoid(e.bias + x.iter().zip(w).map(|(a, w)| a * w).sum::<f64>())
}

/// Fits the ensemble by logistic regression on unnormalised inputs.
pub fn train_ensemble(rows: &[([f64; 3], u32, bool)], y: &[bool], opts: &TrainOptions) -> Result<(EnsembleModel, Fit)> {
    if rows.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let x: Vec<Vec<f64>> = rows.iter().map(|&(s, age, meno)| ensemble_inputs(s, age, meno)).collect();
    let fit = fit_logistic(&x, y, opts)?;
    let w = &fit.weights;
    let model = EnsembleModel {
        w_hotspot: w[0],
        w_vascular: w[1],
        w_areolar: w[2],
        w_age: w[3],
        w_menopause: w[4],
        bias: fit.bias,
    };
    Ok((model, fit))
}

/// Ascending cut points mapping the ensemble probability to grades 1 to 5.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BScoreBins([f64; 4]);

impl Default for BScoreBins {
    fn default() -> Self {
        BScoreBins([0.15, 0.35, 0.60, 0.85])
    }
}

impl BScoreBins {
    pub fn new(cuts: [f64; 4]) -> Result<Self> {
        let inside = cuts.iter().all(|&c| c > 0.0 && c < 1.0);
        let ascending = cuts.windows(2).all(|w| w[0] < w[1]);
        if inside && ascending {
            Ok(BScoreBins(cuts))
        } else {
            Err(Error::InvalidSpec(format!(
                "B-Score cut points must be strictly ascending inside (0, 1), got {cuts:?}"
            )))
        }
    }

    pub fn from_slice(cuts: &[f64]) -> Result<Self> {
        let arr: [f64; 4] = cuts
            .try_into()
            .map_err(|_| Error::InvalidSpec(format!("B-Score needs 4 cut points, got {}", cuts.len())))?;
        BScoreBins::new(arr)
    }

    pub fn cuts(&self) -> [f64; 4] {
        self.0
    }
}

/// Grade `1 + #{cut <= p}`, so a probability on a cut point takes the
/// higher grade.
pub fn to_bscore(p: f64, bins: &BScoreBins) -> BScore {
    let above = bins.0.iter().filter(|&&c| c <= p).count() as u8;
    BScore::new(1 + above).expect("grade within 1..=5")
}

pub fn thermalytix_positive(b: BScore) -> bool {
    b.grade() >= 3
}

/// Operating point of the mammography classifier.
pub const MAMMO_THRESHOLD: f64 = 0.43;

/// Positive only when `p` strictly exceeds the threshold.
pub fn mammo_positive(p: f64, threshold: f64) -> bool {
    p > threshold
}

/// Threshold maximising Youden's J under the rule `score > t`.
///
/// Candidates are the midpoints between consecutive distinct scores plus
/// the two infinite sentinels. J is compared exactly on integer counts and
/// ties go to the largest threshold.
pub fn select_threshold_youden(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteFeature { row: i, col: 0 });
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as u128;
    let n_neg = labels.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    // Sweep from +inf downwards; J·P·N = tp·N + tn·P - P·N, so comparing
    // tp·N + tn·P is exact.
    let (mut tp, mut tn) = (0u128, n_neg);
    let mut best = (tn * n_pos, f64::INFINITY);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                tn -= 1;
            }
            i += 1;
        }
        let t = match order.get(i) {
            Some(&next) => 0.5 * (s + scores[next]),
            None => f64::NEG_INFINITY,
        };
        let value = tp * n_neg + tn * n_pos;
        // thresholds only decrease along the sweep, so strict > keeps the largest
        if value > best.0 {
            best = (value, t);
        }
    }
    Ok(best.1)
}

/// Youden's J of the rule `score > t`.
pub fn youden_j(scores: &[f64], labels: &[bool], t: f64) -> f64 {
    let (mut tp, mut tn, mut p, mut n) = (0.0, 0.0, 0.0, 0.0);
    for (&s, &l) in scores.iter().zip(labels) {
        if l {
            p += 1.0;
            tp += f64::from(s > t);
        } else {
            n += 1.0;
            tn += f64::from(s <= t);
        }
    }
    tp / p + tn / n - 1.0
}
