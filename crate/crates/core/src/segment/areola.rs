use crate::error::{Error, Result};
use crate::imgproc::{boundary_distance, masked_gaussian, Grid};
use crate::model::{BreastMask, Side, SidePair, ThermalFrame};

use super::{canonical, SegmentationParams};

/// Smoothing used before searching for the areolar landmark, px.
pub const LANDMARK_SMOOTHING: f64 = 6.0;
/// Half-width of the window in which a landmark must be an extremum.
const EXTREMUM_HALF: isize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct AreolarRegions {
    pub landmarks: SidePair<(usize, usize)>,
    pub disks: SidePair<Grid<bool>>,
    /// Whether the landmarks were estimated rather than supplied.
    pub estimated: bool,
}

/// Pixels of `mask` within `radius` of `center`.
pub fn disk_in_mask(mask: &Grid<bool>, center: (usize, usize), radius: f64) -> Grid<bool> {
    let r2 = radius * radius;
    Grid::from_fn(mask.width(), mask.height(), |x, y| {
        let dx = x as f64 - center.0 as f64;
        let dy = y as f64 - center.1 as f64;
        *mask.get(x, y) && dx * dx + dy * dy <= r2
    })
}

fn window_range(s: &Grid<f64>, mask: &Grid<bool>, x: usize, y: usize, half: isize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for dy in -half..=half {
        for dx in -half..=half {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if let (Some(&true), Some(&v)) = (mask.checked(nx, ny), s.checked(nx, ny)) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    (lo, hi)
}

/// Landmark of one side in canonical (left) orientation.
///
/// Candidates are in-mask pixels that are the hottest or coldest point of
/// their 7x7 in-mask window on the smoothed frame, away from the mask
/// border. The candidate nearest the mask centroid wins, ties broken by
/// row then column. Without candidates, the in-mask pixel nearest the
/// centroid is used.
fn estimate_canonical(temps: &Grid<f64>, mask: &Grid<bool>) -> (usize, usize) {
    let smooth = masked_gaussian(temps, mask, LANDMARK_SMOOTHING);
    let dist = boundary_distance(mask);
    let (n, sx, sy) = mask
        .points()
        .fold((0i64, 0i64, 0i64), |(n, sx, sy), (x, y)| (n + 1, sx + x as i64, sy + y as i64));
    let key = |(x, y): (usize, usize)| {
        let dx = x as i64 * n - sx;
        let dy = y as i64 * n - sy;
        (dx * dx + dy * dy, y, x)
    };
    let margin = 3.0 * LANDMARK_SMOOTHING;
    let candidates = mask.points().filter(|&(x, y)| {
        if *dist.get(x, y) < margin {
            return false;
        }
        let v = *smooth.get(x, y);
        let (lo, hi) = window_range(&smooth, mask, x, y, EXTREMUM_HALF);
        v == lo || v == hi
    });
    candidates
        .min_by_key(|&p| key(p))
        .or_else(|| mask.points().min_by_key(|&p| key(p)))
        .expect("mask is non-empty")
}

fn estimate_landmark(frame: &ThermalFrame, mask: &Grid<bool>, side: Side) -> Result<(usize, usize)> {
    if mask.count() == 0 {
        return Err(Error::NoForeground { side: Some(side) });
    }
    let (temps, m) = canonical(side, frame.temps(), mask);
    let (x, y) = estimate_canonical(&temps, &m);
    Ok(match side {
        Side::Left => (x, y),
        Side::Right => (frame.width() - 1 - x, y),
    })
}

/// Areolar disks per side around supplied or estimated landmarks.
pub fn locate_areolar_regions(
    frame: &ThermalFrame,
    mask: &BreastMask,
    landmarks: Option<SidePair<(usize, usize)>>,
    p: &SegmentationParams,
) -> Result<AreolarRegions> {
    let estimated = landmarks.is_none();
    let landmarks = match landmarks {
        Some(l) => {
            for side in Side::BOTH {
                let (x, y) = *l.get(side);
                let m = mask.side(side);
                if x >= m.width() || y >= m.height() || !*m.get(x, y) {
                    return Err(Error::LandmarkOutsideMask { side, x, y });
                }
            }
            l
        }
        None => SidePair::new(
            estimate_landmark(frame, &mask.left, Side::Left)?,
            estimate_landmark(frame, &mask.right, Side::Right)?,
        ),
    };
    let disks = landmarks.map(|side, &c| disk_in_mask(mask.side(side), c, p.areola_radius));
    Ok(AreolarRegions {
        landmarks,
        disks,
        estimated,
    })
}
