//! Hotspot, vascular and areolar feature groups and the versioned
//! 20-feature schema they are assembled into.

mod export;
mod features;
mod pipeline;

pub use export::{read_feature_csv, render_feature_csv, write_feature_csv};
pub use features::{areolar_features, hotspot_features, vascular_features, CALIBER_EPS};
pub use pipeline::{analyze_frame, average_features, case_features, FrameAnalysis};

use std::fmt;

use crate::error::{Error, Result};

/// Version tag stamped into every feature vector and model file.
pub const SCHEMA_VERSION: &str = "radiomics-v1";

pub const HOTSPOT_FEATURES: [&str; 8] = [
    "hotspot_area_l",
    "hotspot_area_r",
    "hotspot_peak_dt_l",
    "hotspot_peak_dt_r",
    "hotspot_eccentricity_l",
    "hotspot_eccentricity_r",
    "hotspot_area_asymmetry",
    "hotspot_peak_asymmetry",
];

pub const VASCULAR_FEATURES: [&str; 8] = [
    "vessel_edges_l",
    "vessel_edges_r",
    "vessel_branches_l",
    "vessel_branches_r",
    "vessel_caliber_l",
    "vessel_caliber_r",
    "vessel_count_symmetry",
    "vessel_caliber_symmetry",
];

pub const AREOLAR_FEATURES: [&str; 4] = [
    "areolar_temp_l",
    "areolar_temp_r",
    "areolar_delta_t",
    "areolar_contrast",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureGroup {
    Hotspot,
    Vascular,
    Areolar,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 3] = [FeatureGroup::Hotspot, FeatureGroup::Vascular, FeatureGroup::Areolar];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Hotspot => "hotspot",
            FeatureGroup::Vascular => "vascular",
            FeatureGroup::Areolar => "areolar",
        }
    }

    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            FeatureGroup::Hotspot => &HOTSPOT_FEATURES,
            FeatureGroup::Vascular => &VASCULAR_FEATURES,
            FeatureGroup::Areolar => &AREOLAR_FEATURES,
        }
    }

    pub fn len(self) -> usize {
        self.feature_names().len()
    }

    /// Position of the group's first feature in the full vector.
    pub fn offset(self) -> usize {
        FeatureGroup::ALL.iter().take_while(|&&g| g != self).map(|g| g.len()).sum()
    }

    pub fn parse(s: &str) -> Option<Self> {
        FeatureGroup::ALL.into_iter().find(|g| g.name() == s)
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Number of features in the full schema.
pub const FEATURE_DIM: usize = HOTSPOT_FEATURES.len() + VASCULAR_FEATURES.len() + AREOLAR_FEATURES.len();

/// All feature names in schema order.
pub fn feature_names() -> impl Iterator<Item = &'static str> {
    FeatureGroup::ALL.into_iter().flat_map(|g| g.feature_names().iter().copied())
}

/// Values of one feature group, tagged with the group they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFeatures {
    pub group: FeatureGroup,
    pub values: Vec<f64>,
}

impl GroupFeatures {
    pub fn zeros(group: FeatureGroup) -> Self {
        GroupFeatures {
            group,
            values: vec![0.0; group.len()],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let i = self.group.feature_names().iter().position(|&n| n == name)?;
        self.values.get(i).copied()
    }
}

/// The full feature vector of one case.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiomicFeatureVector {
    version: String,
    values: Vec<f64>,
}

impl RadiomicFeatureVector {
    /// Builds a vector from raw values under the current schema.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() != FEATURE_DIM {
            return Err(Error::SchemaMismatch(format!(
                "expected {FEATURE_DIM} features, got {}",
                values.len()
            )));
        }
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { row: 0, col });
        }
        Ok(RadiomicFeatureVector {
            version: SCHEMA_VERSION.to_string(),
            values,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn group(&self, g: FeatureGroup) -> &[f64] {
        &self.values[g.offset()..g.offset() + g.len()]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_names().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Concatenates the three groups in schema order. Groups are matched by
/// name, so input order does not matter; each must appear exactly once
/// with the schema's length.
pub fn assemble_features(groups: &[GroupFeatures]) -> Result<RadiomicFeatureVector> {
    let mut values = Vec::with_capacity(FEATURE_DIM);
    for g in FeatureGroup::ALL {
        let mut found = groups.iter().filter(|x| x.group == g);
        let first = found
            .next()
            .ok_or_else(|| Error::SchemaMismatch(format!("missing `{g}` group")))?;
        if found.next().is_some() {
            return Err(Error::SchemaMismatch(format!("duplicate `{g}` group")));
        }
        if first.values.len() != g.len() {
            return Err(Error::SchemaMismatch(format!(
                "`{g}` group has {} values, schema has {}",
                first.values.len(),
                g.len()
            )));
        }
        values.extend_from_slice(&first.values);
    }
    RadiomicFeatureVector::from_values(values)
}
