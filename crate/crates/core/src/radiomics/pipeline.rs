use crate::error::{Error, Result};
use crate::model::{BreastMask, HotspotMap, SidePair, ThermalFrame, VascularGraph};
use crate::segment::{
    detect_hotspots, extract_vascular_map, locate_areolar_regions, segment_breast, AreolarRegions, SegmentationParams,
};

use super::{
    areolar_features, assemble_features, hotspot_features, vascular_features, RadiomicFeatureVector, FEATURE_DIM,
};

/// Every intermediate product of one frame, kept for debug export.
#[derive(Clone, Debug)]
pub struct FrameAnalysis {
    pub mask: BreastMask,
    pub hotspots: SidePair<HotspotMap>,
    pub vessels: SidePair<VascularGraph>,
    pub areolas: AreolarRegions,
    pub features: RadiomicFeatureVector,
}

/// Segments one frame and computes its feature vector.
pub fn analyze_frame(
    frame: &ThermalFrame,
    landmarks: Option<SidePair<(usize, usize)>>,
    p: &SegmentationParams,
) -> Result<FrameAnalysis> {
    let mask = segment_breast(frame, p)?;
    let hotspots = detect_hotspots(frame, &mask, p);
    let vessels = extract_vascular_map(frame, &mask, p);
    let areolas = locate_areolar_regions(frame, &mask, landmarks, p)?;
    let features = assemble_features(&[
        hotspot_features(&hotspots.left, &hotspots.right),
        vascular_features(&vessels.left, &vessels.right),
        areolar_features(&areolas, frame, &mask),
    ])?;
    Ok(FrameAnalysis {
        mask,
        hotspots,
        vessels,
        areolas,
        features,
    })
}

/// Element-wise mean of several views of one case.
pub fn average_features(views: &[RadiomicFeatureVector]) -> Result<RadiomicFeatureVector> {
    let first = views.first().ok_or(Error::EmptyCohort)?;
    if let Some(v) = views.iter().find(|v| v.version() != first.version()) {
        return Err(Error::SchemaMismatch(format!(
            "cannot average `{}` with `{}` vectors",
            first.version(),
            v.version()
        )));
    }
    let n = views.len() as f64;
    let values = (0..FEATURE_DIM)
        .map(|i| views.iter().map(|v| v.values()[i]).sum::<f64>() / n)
        .collect();
    RadiomicFeatureVector::from_values(values)
}

/// Feature vector of a case from all of its thermal views.
pub fn case_features(frames: &[ThermalFrame], p: &SegmentationParams) -> Result<RadiomicFeatureVector> {
    let views = frames
        .iter()
        .map(|f| analyze_frame(f, None, p).map(|a| a.features))
        .collect::<Result<Vec<_>>>()?;
    average_features(&views)
}
