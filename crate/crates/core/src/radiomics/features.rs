use crate::imgproc::{mean_std, Grid};
use crate::model::{BreastMask, HotspotMap, Side, ThermalFrame, VascularGraph};
use crate::segment::AreolarRegions;

use super::{FeatureGroup, GroupFeatures};

/// Guards the caliber symmetry ratio when both sides have no vessels.
pub const CALIBER_EPS: f64 = 1e-9;

fn ratio(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / (a + b).max(floor)
}

fn peak_delta(map: &HotspotMap) -> f64 {
    map.hotspots
        .iter()
        .map(|h| h.peak_c - map.baseline_mean)
        .fold(0.0, f64::max)
}

fn largest_eccentricity(map: &HotspotMap) -> f64 {
    // the first of equally large components wins
    map.hotspots
        .iter()
        .rev()
        .max_by_key(|h| h.area)
        .map_or(0.0, |h| h.eccentricity)
}

/// Area, peak temperature above the side mean, and shape of each side's
/// hotspots, plus their bilateral asymmetry. Peak asymmetry is a
/// temperature difference in °C.
pub fn hotspot_features(left: &HotspotMap, right: &HotspotMap) -> GroupFeatures {
    let (al, ar) = (left.total_area() as f64, right.total_area() as f64);
    let (pl, pr) = (peak_delta(left), peak_delta(right));
    GroupFeatures {
        group: FeatureGroup::Hotspot,
        values: vec![
            al,
            ar,
            pl,
            pr,
            largest_eccentricity(left),
            largest_eccentricity(right),
            ratio(al, ar, 1.0),
            (pl - pr).abs(),
        ],
    }
}

/// Vessel counts, branching and caliber per side with their symmetry.
pub fn vascular_features(left: &VascularGraph, right: &VascularGraph) -> GroupFeatures {
    let (el, er) = (left.edges.len() as f64, right.edges.len() as f64);
    let (cl, cr) = (left.mean_caliber(), right.mean_caliber());
    GroupFeatures {
        group: FeatureGroup::Vascular,
        values: vec![
            el,
            er,
            left.branch_count() as f64,
            right.branch_count() as f64,
            cl,
            cr,
            ratio(el, er, 1.0),
            ratio(cl, cr, CALIBER_EPS),
        ],
    }
}

fn region_mean(frame: &ThermalFrame, region: &Grid<bool>) -> f64 {
    let values: Vec<f64> = region.points().map(|(x, y)| frame.at(x, y)).collect();
    mean_std(&values).map_or(0.0, |(m, _)| m)
}

/// Mean areolar temperature per side, its bilateral difference in °C, and
/// the larger excess of an areolar region over its own side.
pub fn areolar_features(regions: &AreolarRegions, frame: &ThermalFrame, masks: &BreastMask) -> GroupFeatures {
    let areola = regions.disks.map(|_, d| region_mean(frame, d));
    let contrast = Side::BOTH
        .into_iter()
        .map(|s| *areola.get(s) - region_mean(frame, masks.side(s)))
        .fold(f64::NEG_INFINITY, f64::max);
    GroupFeatures {
        group: FeatureGroup::Areolar,
        values: vec![
            areola.left,
            areola.right,
            (areola.left - areola.right).abs(),
            contrast,
        ],
    }
}
