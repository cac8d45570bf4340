//! Run configuration read from a `key=value` file.
//!
//! ```text
//! segment.hotspot_k=1.5
//! risk.bscore_bins=0.15,0.35,0.6,0.85
//! risk.mammo_threshold=0.43
//! fusion.policy=DENSITY_INFORMED
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::fusion::FusionPolicy;
use crate::kv;
use crate::risk::{BScoreBins, TrainOptions, MAMMO_THRESHOLD};
use crate::segment::SegmentationParams;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub segment: SegmentationParams,
    /// Overrides the bins stored in a model file when set.
    pub bscore_bins: Option<BScoreBins>,
    pub mammo_threshold: f64,
    pub train: TrainOptions,
    /// `None` evaluates every policy the inputs permit.
    pub policy: Option<FusionPolicy>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            segment: SegmentationParams::default(),
            bscore_bins: None,
            mammo_threshold: MAMMO_THRESHOLD,
            train: TrainOptions::default(),
            policy: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut c = Config::default();
        let mut seen = std::collections::HashSet::new();
        for e in kv::parse(text, path)? {
            if !seen.insert(e.key.clone()) {
                return Err(Error::parse(path, format!("line {}: duplicate key `{}`", e.line, e.key)));
            }
            let bad = |msg: String| Error::parse(path, format!("line {}: {msg}", e.line));
            match e.key.split_once('.') {
                Some(("segment", k)) => c.segment.set(k, &e, path)?,
                Some(("risk", "bscore_bins")) => {
                    let cuts: Vec<f64> = e.parse_list(path)?;
                    c.bscore_bins = Some(BScoreBins::from_slice(&cuts).map_err(|err| bad(err.to_string()))?);
                }
                Some(("risk", "mammo_threshold")) => {
                    let t: f64 = e.parse_value(path)?;
                    if !(0.0..=1.0).contains(&t) {
                        return Err(bad(format!("mammo_threshold {t} outside [0, 1]")));
                    }
                    c.mammo_threshold = t;
                }
                Some(("risk", "lambda")) => c.train.lambda = e.parse_value(path)?,
                Some(("risk", "learning_rate")) => c.train.learning_rate = e.parse_value(path)?,
                Some(("risk", "iterations")) => c.train.iterations = e.parse_value(path)?,
                Some(("fusion", "policy")) => c.policy = Some(e.value.parse().map_err(bad)?),
                _ => return Err(e.unknown(path)),
            }
        }
        c.segment.validate().map_err(|err| Error::parse(path, err.to_string()))?;
        if !(c.train.lambda >= 0.0 && c.train.learning_rate > 0.0) {
            return Err(Error::parse(path, "risk.lambda must be >= 0 and risk.learning_rate > 0"));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text, path)
    }

    /// The configuration as a file that parses back to the same value.
    pub fn render(&self) -> String {
        let mut out = self.segment.render();
        if let Some(b) = self.bscore_bins {
            out.push_str(&format!("risk.bscore_bins={}\n", kv::render_list(&b.cuts())));
        }
        out.push_str(&format!(
            "risk.mammo_threshold={}\nrisk.lambda={}\nrisk.learning_rate={}\nrisk.iterations={}\n",
            self.mammo_threshold, self.train.lambda, self.train.learning_rate, self.train.iterations
        ));
        if let Some(p) = self.policy {
            out.push_str(&format!("fusion.policy={p}\n"));
        }
        out
    }
}
