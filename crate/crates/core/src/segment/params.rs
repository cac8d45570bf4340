use std::path::Path;

use crate::error::{Error, Result};
use crate::kv;

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationParams {
    /// Hotspot threshold is `mean + k * std` of the side mask.
    pub hotspot_k: f64,
    pub min_hotspot_area: usize,
    pub vesselness_scales: Vec<f64>,
    /// In-mask percentiles `(low, high)` for hysteresis on the vesselness map.
    pub vessel_hysteresis: (f64, f64),
    /// Absolute lower bounds for the two hysteresis levels, so a frame
    /// without vessels does not promote its strongest noise to a vessel.
    pub vessel_floor: (f64, f64),
    /// Spur branches with fewer pixels than this are pruned.
    pub min_spur_length: usize,
    pub areola_radius: f64,
    pub ambient_cutoff: f64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        SegmentationParams {
            hotspot_k: 1.5,
            min_hotspot_area: 20,
            vesselness_scales: vec![1.0, 2.0, 3.0],
            vessel_hysteresis: (90.0, 97.0),
            vessel_floor: (0.2, 0.5),
            min_spur_length: 5,
            areola_radius: 12.0,
            ambient_cutoff: 28.0,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parse {
            path: "segmentation parameters".into(),
            message: m.to_string(),
        });
        if !(self.hotspot_k > 0.0 && self.hotspot_k.is_finite()) {
            return bad("hotspot_k must be positive");
        }
        let (lo, hi) = self.vessel_hysteresis;
        if !(0.0 <= lo && lo < hi && hi <= 100.0) {
            return bad("vessel hysteresis needs 0 <= low < high <= 100");
        }
        if self.vessel_floor.0 > self.vessel_floor.1 {
            return bad("vessel floor low must not exceed high");
        }
        if self.vesselness_scales.is_empty() || self.vesselness_scales.iter().any(|&s| !(s >= 0.5 && s.is_finite())) {
            return bad("vesselness scales must be non-empty and >= 0.5");
        }
        if !(self.areola_radius >= 1.0 && self.areola_radius.is_finite()) {
            return bad("areola_radius must be >= 1");
        }
        if !self.ambient_cutoff.is_finite() {
            return bad("ambient_cutoff must be finite");
        }
        Ok(())
    }

    /// Applies a `segment.<key>` config entry (prefix already stripped).
    pub fn set(&mut self, key: &str, e: &kv::Entry, path: &Path) -> Result<()> {
        match key {
            "hotspot_k" => self.hotspot_k = e.parse_value(path)?,
            "min_hotspot_area" => self.min_hotspot_area = e.parse_value(path)?,
            "vesselness_scales" => self.vesselness_scales = e.parse_list(path)?,
            "vessel_hysteresis" | "vessel_floor" => {
                let v: Vec<f64> = e.parse_list(path)?;
                let [a, b] = v[..] else {
                    return Err(Error::parse(path, format!("line {}: `{key}` needs two values", e.line)));
                };
                if key == "vessel_hysteresis" {
                    self.vessel_hysteresis = (a, b);
                } else {
                    self.vessel_floor = (a, b);
                }
            }
            "min_spur_length" => self.min_spur_length = e.parse_value(path)?,
            "areola_radius" => self.areola_radius = e.parse_value(path)?,
            "ambient_cutoff" => self.ambient_cutoff = e.parse_value(path)?,
            _ => return Err(e.unknown(path)),
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        format!(
            "segment.hotspot_k={}\nsegment.min_hotspot_area={}\nsegment.vesselness_scales={}\n\
             segment.vessel_hysteresis={},{}\nsegment.vessel_floor={},{}\nsegment.min_spur_length={}\n\
             segment.areola_radius={}\nsegment.ambient_cutoff={}\n",
            self.hotspot_k,
            self.min_hotspot_area,
            kv::render_list(&self.vesselness_scales),
            self.vessel_hysteresis.0,
            self.vessel_hysteresis.1,
            self.vessel_floor.0,
            self.vessel_floor.1,
            self.min_spur_length,
            self.areola_radius,
            self.ambient_cutoff,
        )
    }
}
