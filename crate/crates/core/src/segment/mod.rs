//! Classical thermal segmentation: breast regions, hotspots, vascular graph
//! and areolar regions.
//!
//! Right-side results are computed on the mirrored frame, as if they were
//! the left side, and mirrored back. Mirroring the input frame therefore
//! mirrors every output exactly.

mod areola;
mod breast;
mod hotspot;
mod params;
mod vessel;

pub use areola::{disk_in_mask, locate_areolar_regions, AreolarRegions, LANDMARK_SMOOTHING};
pub use breast::{segment_breast, Midline};
pub use hotspot::{detect_hotspots, detect_side_hotspots, eccentricity, hotspot_candidates};
pub use params::SegmentationParams;
pub use vessel::{
    extract_side_vascular_map, extract_vascular_map, hysteresis, skeleton_graph, vesselness, FRANGI_BETA, FRANGI_C,
};

use crate::imgproc::Grid;
use crate::model::Side;

/// Frame and mask in left-side orientation.
pub(crate) fn canonical(side: Side, temps: &Grid<f64>, mask: &Grid<bool>) -> (Grid<f64>, Grid<bool>) {
    match side {
        Side::Left => (temps.clone(), mask.clone()),
        Side::Right => (temps.mirrored(), mask.mirrored()),
    }
}
