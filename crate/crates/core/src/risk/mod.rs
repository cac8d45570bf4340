//! Group classifiers, the clinical ensemble, B-Score grading and the
//! mammography operating point.

mod ensemble;
mod logistic;

pub use ensemble::{
    ensemble_inputs, ensemble_score, mammo_positive, select_threshold_youden, thermalytix_positive, to_bscore,
    train_ensemble, youden_j, BScoreBins, EnsembleModel, MAMMO_THRESHOLD,
};
pub use logistic::{
    fit_logistic, logistic_objective, normalization, score_group, sigmoid, train_logistic, Fit, LinearModel, Objective,
    TrainOptions,
};

use std::path::Path;

use crate::error::{Error, Result};
use crate::kv;
use crate::model::BScore;
use crate::radiomics::{FeatureGroup, RadiomicFeatureVector, SCHEMA_VERSION};

/// First line of every model file.
pub const MODEL_FORMAT: &str = "densefusion-model-1";

/// Everything needed to turn a feature vector into a B-Score.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskModel {
    pub schema: String,
    pub hotspot: LinearModel,
    pub vascular: LinearModel,
    pub areolar: LinearModel,
    pub ensemble: EnsembleModel,
    pub bins: BScoreBins,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalAssessment {
    pub s_hotspot: f64,
    pub s_vascular: f64,
    pub s_areolar: f64,
    pub ensemble: f64,
    pub bscore: BScore,
}

impl ThermalAssessment {
    pub fn positive(&self) -> bool {
        thermalytix_positive(self.bscore)
    }
}

/// One labelled case for training.
#[derive(Clone, Debug)]
pub struct TrainingCase {
    pub features: RadiomicFeatureVector,
    pub age: u32,
    pub menopause: bool,
    pub suspicious: bool,
}

#[derive(Clone, Debug)]
pub struct TrainingReport {
    pub model: RiskModel,
    /// Final training loss of the hotspot, vascular, areolar and ensemble fits.
    pub final_losses: [f64; 4],
    pub fits: [Fit; 4],
}

impl RiskModel {
    pub fn group(&self, g: FeatureGroup) -> &LinearModel {
        match g {
            FeatureGroup::Hotspot => &self.hotspot,
            FeatureGroup::Vascular => &self.vascular,
            FeatureGroup::Areolar => &self.areolar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::SchemaMismatch(format!(
                "model trained on `{}`, this build uses `{SCHEMA_VERSION}`",
                self.schema
            )));
        }
        for g in FeatureGroup::ALL {
            let m = self.group(g);
            if m.group != g {
                return Err(Error::SchemaMismatch(format!("`{}` model stored under `{g}`", m.group)));
            }
            m.validate()?;
        }
        self.ensemble.validate()
    }

    pub fn assess(&self, f: &RadiomicFeatureVector, age: u32, menopause: bool) -> Result<ThermalAssessment> {
        if f.version() != self.schema {
            return Err(Error::SchemaMismatch(format!(
                "features are `{}`, model expects `{}`",
                f.version(),
                self.schema
            )));
        }
        let s_hotspot = self.hotspot.score(f.group(FeatureGroup::Hotspot))?;
        let s_vascular = self.vascular.score(f.group(FeatureGroup::Vascular))?;
        let s_areolar = self.areolar.score(f.group(FeatureGroup::Areolar))?;
        let ensemble = ensemble_score(&self.ensemble, [s_hotspot, s_vascular, s_areolar], age, menopause);
        Ok(ThermalAssessment {
            s_hotspot,
            s_vascular,
            s_areolar,
            ensemble,
            bscore: to_bscore(ensemble, &self.bins),
        })
    }

    pub fn render(&self) -> String {
        let mut out = format!("format={MODEL_FORMAT}\nschema={}\n", self.schema);
        for g in FeatureGroup::ALL {
            let m = self.group(g);
            out.push_str(&format!(
                "{g}.weights={}\n{g}.bias={}\n{g}.means={}\n{g}.stds={}\n",
                kv::render_list(&m.weights),
                m.bias,
                kv::render_list(&m.means),
                kv::render_list(&m.stds),
            ));
        }
        let e = &self.ensemble;
        out.push_str(&format!(
            "ensemble.group_weights={}\nensemble.clinical_weights={}\nensemble.bias={}\n",
            kv::render_list(&[e.w_hotspot, e.w_vascular, e.w_areolar]),
            kv::render_list(&[e.w_age, e.w_menopause]),
            e.bias,
        ));
        out.push_str(&format!("bscore_bins={}\n", kv::render_list(&self.bins.cuts())));
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let entries = kv::parse(text, path)?;
        match entries.first() {
            Some(e) if e.key == "format" && e.value == MODEL_FORMAT => {}
            _ => return Err(Error::parse(path, format!("not a model file: first key must be `format={MODEL_FORMAT}`"))),
        }
        let mut schema = None;
        let mut groups = [FeatureGroup::Hotspot, FeatureGroup::Vascular, FeatureGroup::Areolar].map(|g| LinearModel {
            group: g,
            weights: Vec::new(),
            bias: f64::NAN,
            means: Vec::new(),
            stds: Vec::new(),
        });
        let mut group_w: Option<Vec<f64>> = None;
        let mut clinical_w: Option<Vec<f64>> = None;
        let mut ens_bias = None;
        let mut bins = None;
        let mut seen = std::collections::HashSet::new();
        for e in &entries[1..] {
            if !seen.insert(e.key.as_str()) {
                return Err(Error::parse(path, format!("line {}: duplicate key `{}`", e.line, e.key)));
            }
            match e.key.as_str() {
                "schema" => schema = Some(e.value.clone()),
                "ensemble.group_weights" => group_w = Some(e.parse_list(path)?),
                "ensemble.clinical_weights" => clinical_w = Some(e.parse_list(path)?),
                "ensemble.bias" => ens_bias = Some(e.parse_value(path)?),
                "bscore_bins" => {
                    let cuts: Vec<f64> = e.parse_list(path)?;
                    bins = Some(BScoreBins::from_slice(&cuts).map_err(|err| Error::parse(path, err.to_string()))?);
                }
                key => {
                    let (g, field) = key.split_once('.').ok_or_else(|| e.unknown(path))?;
                    let g = FeatureGroup::parse(g).ok_or_else(|| e.unknown(path))?;
                    let m = &mut groups[FeatureGroup::ALL.iter().position(|&x| x == g).expect("known group")];
                    match field {
                        "weights" => m.weights = e.parse_list(path)?,
                        "bias" => m.bias = e.parse_value(path)?,
                        "means" => m.means = e.parse_list(path)?,
                        "stds" => m.stds = e.parse_list(path)?,
                        _ => return Err(e.unknown(path)),
                    }
                }
            }
        }
        let missing = |k: &str| Error::parse(path, format!("missing key `{k}`"));
        let gw = group_w.ok_or_else(|| missing("ensemble.group_weights"))?;
        let cw = clinical_w.ok_or_else(|| missing("ensemble.clinical_weights"))?;
        let (&[w_hotspot, w_vascular, w_areolar], &[w_age, w_menopause]) = (&gw[..], &cw[..]) else {
            return Err(Error::parse(path, "ensemble needs 3 group weights and 2 clinical weights"));
        };
        let [hotspot, vascular, areolar] = groups;
        let model = RiskModel {
            schema: schema.ok_or_else(|| missing("schema"))?,
            hotspot,
            vascular,
            areolar,
            ensemble: EnsembleModel {
                w_hotspot,
                w_vascular,
                w_areolar,
                w_age,
                w_menopause,
                bias: ens_bias.ok_or_else(|| missing("ensemble.bias"))?,
            },
            bins: bins.ok_or_else(|| missing("bscore_bins"))?,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RiskModel::parse(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}

/// Trains the three group classifiers, then the ensemble on their
/// in-sample scores.
pub fn train_risk_model(cases: &[TrainingCase], opts: &TrainOptions, bins: BScoreBins) -> Result<TrainingReport> {
    if cases.is_empty() {
        return Err(Error::EmptyCohort);
    }
    if let Some(c) = cases.iter().find(|c| c.features.version() != SCHEMA_VERSION) {
        return Err(Error::SchemaMismatch(format!("training row has schema `{}`", c.features.version())));
    }
    let y: Vec<bool> = cases.iter().map(|c| c.suspicious).collect();
    let mut fits = Vec::new();
    let mut models = Vec::new();
    for g in FeatureGroup::ALL {
        let x: Vec<Vec<f64>> = cases.iter().map(|c| c.features.group(g).to_vec()).collect();
        let (m, fit) = train_logistic(g, &x, &y, opts)?;
        models.push(m);
        fits.push(fit);
    }
    let rows: Vec<([f64; 3], u32, bool)> = cases
        .iter()
        .map(|c| {
            let s = [0, 1, 2].map(|i| {
                models[i]
                    .score(c.features.group(FeatureGroup::ALL[i]))
                    .expect("dimensions checked in training")
            });
            (s, c.age, c.menopause)
        })
        .collect();
    let (ensemble, efit) = train_ensemble(&rows, &y, opts)?;
    fits.push(efit);
    let [hotspot, vascular, areolar]: [LinearModel; 3] = models.try_into().expect("three group models");
    let fits: [Fit; 4] = fits.try_into().expect("four fits");
    Ok(TrainingReport {
        final_losses: [0, 1, 2, 3].map(|i| fits[i].final_loss()),
        fits,
        model: RiskModel {
            schema: SCHEMA_VERSION.to_string(),
            hotspot,
            vascular,
            areolar,
            ensemble,
            bins,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiomics::FEATURE_DIM;

    fn cases() -> Vec<TrainingCase> {
        (0..12)
            .map(|i| {
                let sus = i % 2 == 0;
                let values = (0..FEATURE_DIM)
                    .map(|j| ((i * 7 + j * 3) % 11) as f64 * 0.1 + if sus { 1.0 } else { 0.0 })
                    .collect();
                TrainingCase {
                    features: RadiomicFeatureVector::from_values(values).unwrap(),
                    age: 40 + i as u32,
                    menopause: i > 6,
                    suspicious: sus,
                }
            })
            .collect()
    }

    #[test]
    fn model_file_round_trip() {
        let report = train_risk_model(&cases(), &TrainOptions::default(), BScoreBins::default()).unwrap();
        let text = report.model.render();
        let back = RiskModel::parse(&text, Path::new("m.txt")).unwrap();
        assert_eq!(back, report.model);
        assert_eq!(back.render(), text);
        assert!(text.starts_with("format=densefusion-model-1\nschema=radiomics-v1\nhotspot.weights="));
        assert!(report.final_losses.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn training_is_deterministic_and_separates() {
        let a = train_risk_model(&cases(), &TrainOptions::default(), BScoreBins::default()).unwrap();
        let b = train_risk_model(&cases(), &TrainOptions::default(), BScoreBins::default()).unwrap();
        assert_eq!(a.model.render(), b.model.render());
        for c in cases() {
            let s = a.model.assess(&c.features, c.age, c.menopause).unwrap();
            assert_eq!(s.ensemble > 0.5, c.suspicious);
        }
    }

    #[test]
    fn malformed_model_files() {
        let p = Path::new("m.txt");
        assert!(RiskModel::parse("schema=radiomics-v1\n", p).is_err());
        let good = train_risk_model(&cases(), &TrainOptions::default(), BScoreBins::default()).unwrap().model.render();
        let other_schema = good.replace("schema=radiomics-v1", "schema=radiomics-v0");
        assert!(matches!(RiskModel::parse(&other_schema, p), Err(Error::SchemaMismatch(_))));
        let short = good.replacen("hotspot.weights=", "hotspot.weights=1,", 1);
        assert!(matches!(RiskModel::parse(&short, p), Err(Error::SchemaMismatch(_))));
        let dup = format!("{good}ensemble.bias=0\n");
        assert!(RiskModel::parse(&dup, p).is_err());
        let unknown = format!("{good}vascular.colour=1\n");
        assert!(RiskModel::parse(&unknown, p).is_err());
    }
}
