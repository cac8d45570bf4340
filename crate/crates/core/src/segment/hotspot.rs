use crate::imgproc::{label_components, mean_std, Connectivity, Grid};
use crate::model::{BreastMask, Hotspot, HotspotMap, Side, SidePair, ThermalFrame};

use super::{canonical, SegmentationParams};

/// Pixels of `mask` strictly hotter than `mean + k * std` of the mask, with
/// the statistics used. A zero-variance side yields an empty set.
pub fn hotspot_candidates(temps: &Grid<f64>, mask: &Grid<bool>, k: f64) -> (Grid<bool>, f64, f64, f64) {
    let values: Vec<f64> = mask.points().map(|(x, y)| *temps.get(x, y)).collect();
    let (mean, std) = mean_std(&values).unwrap_or((0.0, 0.0));
    let threshold = mean + k * std;
    let hot = Grid::from_fn(mask.width(), mask.height(), |x, y| *mask.get(x, y) && *temps.get(x, y) > threshold);
    (hot, mean, std, threshold)
}

/// Eccentricity of a pixel set from its second-order central moments, in
/// `[0, 1)`; 0 for a disc or a single pixel.
pub fn eccentricity(points: &[(usize, usize)]) -> f64 {
    let n = points.len() as i128;
    if n < 2 {
        return 0.0;
    }
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for &(x, y) in points {
        let (x, y) = (x as i128, y as i128);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    // n^2 times the covariance entries, exact in integers
    let a = (n * sxx - sx * sx) as f64;
    let c = (n * syy - sy * sy) as f64;
    let b = (n * sxy - sx * sy) as f64;
    let root = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let major = 0.5 * (a + c + root);
    let minor = 0.5 * (a + c - root);
    if major <= 0.0 {
        return 0.0;
    }
    (1.0 - (minor / major).max(0.0)).sqrt()
}

fn detect_canonical(temps: &Grid<f64>, mask: &Grid<bool>, p: &SegmentationParams) -> (Grid<u32>, Vec<Hotspot>, f64, f64, f64) {
    let (hot, mean, std, threshold) = hotspot_candidates(temps, mask, p.hotspot_k);
    let labeling = label_components(&hot, Connectivity::Eight);
    let mut remap = vec![0u32; labeling.count() + 1];
    let mut next = 0u32;
    for (i, &size) in labeling.sizes.iter().enumerate() {
        if size >= p.min_hotspot_area {
            next += 1;
            remap[i + 1] = next;
        }
    }
    let labels = labeling.labels.map(|&l| remap[l as usize]);
    let mut pixels: Vec<Vec<(usize, usize)>> = vec![Vec::new(); next as usize];
    for (i, &l) in labels.as_slice().iter().enumerate() {
        if l > 0 {
            pixels[l as usize - 1].push(labels.coords(i));
        }
    }
    let hotspots = pixels
        .iter()
        .enumerate()
        .map(|(i, px)| {
            let n = px.len() as f64;
            let sx: usize = px.iter().map(|p| p.0).sum();
            let sy: usize = px.iter().map(|p| p.1).sum();
            let peak = px.iter().map(|&(x, y)| *temps.get(x, y)).fold(f64::NEG_INFINITY, f64::max);
            Hotspot {
                id: i as u32 + 1,
                area: px.len(),
                peak_c: peak,
                centroid: (sx as f64 / n, sy as f64 / n),
                eccentricity: eccentricity(px),
            }
        })
        .collect();
    (labels, hotspots, mean, std, threshold)
}

/// Hotspots of one side, using that side's own temperature statistics.
pub fn detect_side_hotspots(frame: &ThermalFrame, mask: &Grid<bool>, side: Side, p: &SegmentationParams) -> HotspotMap {
    let (temps, mask) = canonical(side, frame.temps(), mask);
    let (labels, mut hotspots, baseline_mean, baseline_std, threshold) = detect_canonical(&temps, &mask, p);
    let labels = match side {
        Side::Left => labels,
        Side::Right => {
            let w = frame.width() as f64 - 1.0;
            for h in &mut hotspots {
                h.centroid.0 = w - h.centroid.0;
            }
            labels.mirrored()
        }
    };
    HotspotMap {
        side,
        labels,
        hotspots,
        baseline_mean,
        baseline_std,
        threshold,
    }
}

pub fn detect_hotspots(frame: &ThermalFrame, mask: &BreastMask, p: &SegmentationParams) -> SidePair<HotspotMap> {
    SidePair::new(
        detect_side_hotspots(frame, &mask.left, Side::Left, p),
        detect_side_hotspots(frame, &mask.right, Side::Right, p),
    )
}
