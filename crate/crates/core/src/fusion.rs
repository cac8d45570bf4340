//! Combination policies over per-modality screening calls.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{CaseRecord, DensityClass, ResultSource, TestResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FusionPolicy {
    DensityInformed,
    OrRule,
    MammoOnly,
    ThermalOnly,
}

impl FusionPolicy {
    pub const ALL: [FusionPolicy; 4] = [
        FusionPolicy::MammoOnly,
        FusionPolicy::ThermalOnly,
        FusionPolicy::OrRule,
        FusionPolicy::DensityInformed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FusionPolicy::DensityInformed => "DENSITY_INFORMED",
            FusionPolicy::OrRule => "OR_RULE",
            FusionPolicy::MammoOnly => "MAMMO_ONLY",
            FusionPolicy::ThermalOnly => "THERMAL_ONLY",
        }
    }
}

impl fmt::Display for FusionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionPolicy {
    type Err = String;

    /// Accepts the canonical names case-insensitively, with `-` for `_`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        FusionPolicy::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| format!("unknown fusion policy `{s}`"))
    }
}

fn missing(c: &CaseRecord) -> Error {
    Error::MissingRequiredModality {
        case_ids: vec![c.case_id.clone()],
    }
}

/// Density routing with lazily supplied modality results; only the
/// provider for the case's density class is ever called.
pub fn route_density_informed_with(
    c: &CaseRecord,
    mammo: impl FnOnce() -> Option<TestResult>,
    thermal: impl FnOnce() -> Option<TestResult>,
) -> Result<TestResult> {
    let chosen = match c.density_class() {
        DensityClass::Fatty => mammo(),
        DensityClass::Dense => thermal(),
    };
    chosen
        .map(|r| TestResult {
            positive: r.positive,
            source: ResultSource::FusedDensity,
        })
        .ok_or_else(|| missing(c))
}

/// Mammography for fatty breasts, thermal for dense breasts.
pub fn route_density_informed(c: &CaseRecord, mammo: Option<TestResult>, thermal: Option<TestResult>) -> Result<TestResult> {
    route_density_informed_with(c, || mammo, || thermal)
}

pub fn combine_or(mammo: TestResult, thermal: TestResult) -> TestResult {
    TestResult {
        positive: mammo.positive || thermal.positive,
        source: ResultSource::FusedOr,
    }
}

/// Applies `policy` to every case in order. Cases lacking a modality the
/// policy needs are collected into one error.
pub fn run_policy(
    policy: FusionPolicy,
    cases: &[CaseRecord],
    mammo: &[Option<TestResult>],
    thermal: &[Option<TestResult>],
) -> Result<Vec<TestResult>> {
    for len in [mammo.len(), thermal.len()] {
        if len != cases.len() {
            return Err(Error::LengthMismatch {
                left: cases.len(),
                right: len,
            });
        }
    }
    let mut out = Vec::with_capacity(cases.len());
    let mut missing_ids = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        let r = match policy {
            FusionPolicy::MammoOnly => mammo[i].ok_or_else(|| missing(c)),
            FusionPolicy::ThermalOnly => thermal[i].ok_or_else(|| missing(c)),
            FusionPolicy::OrRule => match (mammo[i], thermal[i]) {
                (Some(m), Some(t)) => Ok(combine_or(m, t)),
                _ => Err(missing(c)),
            },
            FusionPolicy::DensityInformed => route_density_informed(c, mammo[i], thermal[i]),
        };
        match r {
            Ok(r) => out.push(r),
            Err(_) => missing_ids.push(c.case_id.clone()),
        }
    }
    if missing_ids.is_empty() {
        Ok(out)
    } else {
        Err(Error::MissingRequiredModality { case_ids: missing_ids })
    }
}
