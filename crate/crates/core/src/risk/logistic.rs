use crate::error::{Error, Result};
use crate::imgproc::mean_std;
use crate::radiomics::{FeatureGroup, GroupFeatures};

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    /// L2 penalty on the weights; the bias is not penalised.
    pub lambda: f64,
    pub learning_rate: f64,
    pub iterations: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            lambda: 0.1,
            learning_rate: 1.0,
            iterations: 500,
        }
    }
}

/// Regularised mean logistic loss and its gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub loss: f64,
    pub grad_weights: Vec<f64>,
    pub grad_bias: f64,
}

/// `mean_i [ln(1 + e^z_i) - y_i z_i] + (λ/2)|w|²` with `z_i = w·x_i + b`.
pub fn logistic_objective(weights: &[f64], bias: f64, x: &[Vec<f64>], y: &[bool], lambda: f64) -> Objective {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let z = bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
        let t = if label { 1.0 } else { 0.0 };
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, a) in gw.iter_mut().zip(row) {
            *g += r * a;
        }
        gb += r;
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum();
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + lambda * w;
    }
    Objective {
        loss: loss / n + 0.5 * lambda * penalty,
        grad_weights: gw,
        grad_bias: gb / n,
    }
}

/// Result of gradient descent on already-normalised inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Loss before the first step and after every accepted step.
    pub losses: Vec<f64>,
}

impl Fit {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("at least the initial loss")
    }
}

fn check_inputs(x: &[Vec<f64>], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if !(y.iter().any(|&t| t) && y.iter().any(|&t| !t)) {
        return Err(Error::DegenerateLabels);
    }
    let dim = x[0].len();
    for (row, r) in x.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::SchemaMismatch(format!("row {row} has {} features, expected {dim}", r.len())));
        }
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { row, col });
        }
    }
    Ok(dim)
}

/// Full-batch gradient descent from zero weights. A step that would raise
/// the loss is retried at half the learning rate, and the reduced rate is
/// kept for later iterations, so the loss never increases.
pub fn fit_logistic(x: &[Vec<f64>], y: &[bool], opts: &TrainOptions) -> Result<Fit> {
    let dim = check_inputs(x, y)?;
    if !(opts.lambda >= 0.0 && opts.learning_rate > 0.0) {
        return Err(Error::InvalidSpec("training needs lambda >= 0 and a positive learning rate".into()));
    }
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut lr = opts.learning_rate;
    let mut cur = logistic_objective(&w, b, x, y, opts.lambda);
    let mut losses = vec![cur.loss];
    'outer: for _ in 0..opts.iterations {
        loop {
            let w_next: Vec<f64> = w.iter().zip(&cur.grad_weights).map(|(w, g)| w - lr * g).collect();
            let b_next = b - lr * cur.grad_bias;
            let next = logistic_objective(&w_next, b_next, x, y, opts.lambda);
            if next.loss <= cur.loss {
                w = w_next;
                b = b_next;
                cur = next;
                losses.push(cur.loss);
                break;
            }
            lr *= 0.5;
            if lr < 1e-12 {
                break 'outer;
            }
        }
    }
    Ok(Fit {
        weights: w,
        bias: b,
        losses,
    })
}

/// One group classifier with the normalisation frozen at training time.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub group: FeatureGroup,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl LinearModel {
    pub fn zero(group: FeatureGroup) -> Self {
        LinearModel {
            group,
            weights: vec![0.0; group.len()],
            bias: 0.0,
            means: vec![0.0; group.len()],
            stds: vec![1.0; group.len()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.group.len();
        if self.weights.len() != n || self.means.len() != n || self.stds.len() != n {
            return Err(Error::SchemaMismatch(format!(
                "`{}` model needs {n} weights, means and stds",
                self.group
            )));
        }
        let all = self.weights.iter().chain(&self.means).chain(&self.stds).chain([&self.bias]);
        if all.clone().any(|v| !v.is_finite()) || self.stds.iter().any(|&s| s <= 0.0) {
            return Err(Error::SchemaMismatch(format!(
                "`{}` model has non-finite values or non-positive stds",
                self.group
            )));
        }
        Ok(())
    }

    pub fn normalize(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Probability from raw (unnormalised) group values.
    pub fn score(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(Error::SchemaMismatch(format!(
                "`{}` model takes {} features, got {}",
                self.group,
                self.weights.len(),
                values.len()
            )));
        }
        let z = self.bias + self.normalize(values).iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>();
        Ok(sigmoid(z))
    }
}

/// `sigmoid(w·normalize(f) + b)`; the group tag must match the model's.
pub fn score_group(m: &LinearModel, f: &GroupFeatures) -> Result<f64> {
    if m.group != f.group {
        return Err(Error::SchemaMismatch(format!("`{}` model given `{}` features", m.group, f.group)));
    }
    m.score(&f.values)
}

/// Per-feature mean and population std over the rows; zero-variance
/// features get std 1.
pub fn normalization(x: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let dim = x.first().map_or(0, Vec::len);
    (0..dim)
        .map(|j| {
            let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let (m, s) = mean_std(&col).unwrap_or((0.0, 0.0));
            (m, if s > 0.0 { s } else { 1.0 })
        })
        .unzip()
}

/// Fits one group classifier on raw feature rows.
pub fn train_logistic(group: FeatureGroup, x: &[Vec<f64>], y: &[bool], opts: &TrainOptions) -> Result<(LinearModel, Fit)> {
    check_inputs(x, y)?;
    if x[0].len() != group.len() {
        return Err(Error::SchemaMismatch(format!(
            "`{group}` group has {} features, rows have {}",
            group.len(),
            x[0].len()
        )));
    }
    let (means, stds) = normalization(x);
    let mut model = LinearModel {
        group,
        weights: Vec::new(),
        bias: 0.0,
        means,
        stds,
    };
    let xn: Vec<Vec<f64>> = x.iter().map(|r| model.normalize(r)).collect();
    let fit = fit_logistic(&xn, y, opts)?;
    model.weights = fit.weights.clone();
    model.bias = fit.bias;
    Ok((model, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((softplus(-50.0) - (-50f64).exp()).abs() < 1e-30);
        assert_eq!(softplus(800.0), 800.0);
    }

    #[test]
    fn separable_one_dimensional_data() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        let opts = TrainOptions {
            lambda: 0.1,
            ..TrainOptions::default()
        };
        let (m, fit) = train_logistic(FeatureGroup::Areolar, &x.iter().map(|r| vec![r[0], 0.0, 0.0, 0.0]).collect::<Vec<_>>(), &y, &opts).unwrap();
        let correct = x.iter().zip(&y).filter(|(r, &t)| (m.score(&[r[0], 0.0, 0.0, 0.0]).unwrap() > 0.5) == t).count();
        assert_eq!(correct, 20);
        assert!(fit.losses.windows(2).all(|w| w[1] <= w[0]));
        // the constant columns keep std 1 and receive no gradient
        assert_eq!(m.stds[1], 1.0);
        assert_eq!(m.weights[1], 0.0);
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(fit_logistic(&x, &[true, true], &TrainOptions::default()), Err(Error::DegenerateLabels)));
        let bad = vec![vec![1.0], vec![f64::INFINITY]];
        assert!(matches!(
            fit_logistic(&bad, &[true, false], &TrainOptions::default()),
            Err(Error::NonFiniteFeature { row: 1, col: 0 })
        ));
    }

    #[test]
    fn zero_model_scores_one_half() {
        let m = LinearModel::zero(FeatureGroup::Hotspot);
        assert_eq!(score_group(&m, &GroupFeatures::zeros(FeatureGroup::Hotspot)).unwrap(), 0.5);
        assert!(matches!(
            score_group(&m, &GroupFeatures::zeros(FeatureGroup::Vascular)),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn mean_features_score_sigmoid_of_bias() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i * i) as f64 * 0.3, 1.0, -(i as f64)]).collect();
        let y: Vec<bool> = (0..8).map(|i| i % 3 == 0).collect();
        let (m, _) = train_logistic(FeatureGroup::Areolar, &x, &y, &TrainOptions::default()).unwrap();
        let s = m.score(&m.means.clone()).unwrap();
        assert_eq!(s, sigmoid(m.bias));
    }
}
