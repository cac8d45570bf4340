use crate::error::{Error, Result};
use crate::imgproc::{largest_component, Connectivity, Grid};
use crate::model::{BreastMask, Side, ThermalFrame};

use super::SegmentationParams;

/// Which side of the body midline a column falls on.
///
/// The midline is the column centroid of the foreground. With `n`
/// foreground pixels summing to `sx` columns, column `x` is left when
/// `x * n < sx`, right when `x * n > sx`, and on the midline otherwise.
/// Integer arithmetic keeps the rule exactly mirror-symmetric.
#[derive(Clone, Copy, Debug)]
pub struct Midline {
    n: u64,
    sum_x: u64,
}

impl Midline {
    pub fn of(foreground: &Grid<bool>) -> Option<Self> {
        let (mut n, mut sum_x) = (0u64, 0u64);
        for (x, _) in foreground.points() {
            n += 1;
            sum_x += x as u64;
        }
        (n > 0).then_some(Midline { n, sum_x })
    }

    pub fn side_of(&self, x: usize) -> Option<Side> {
        let lhs = x as u64 * self.n;
        match lhs.cmp(&self.sum_x) {
            std::cmp::Ordering::Less => Some(Side::Left),
            std::cmp::Ordering::Greater => Some(Side::Right),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Column position of the midline.
    pub fn column(&self) -> f64 {
        self.sum_x as f64 / self.n as f64
    }
}

/// Splits the warm foreground into left and right breast regions.
pub fn segment_breast(frame: &ThermalFrame, p: &SegmentationParams) -> Result<BreastMask> {
    let foreground = frame.temps().map(|&t| t >= p.ambient_cutoff);
    let midline = Midline::of(&foreground).ok_or(Error::NoForeground { side: None })?;
    let half = |side: Side| {
        Grid::from_fn(frame.width(), frame.height(), |x, y| {
            *foreground.get(x, y) && midline.side_of(x) == Some(side)
        })
    };
    let left = largest_component(&half(Side::Left), Connectivity::Four);
    // Right side in mirrored form so ties break identically on both sides.
    let right = largest_component(&half(Side::Right).mirrored(), Connectivity::Four).mirrored();
    for (side, m) in [(Side::Left, &left), (Side::Right, &right)] {
        if m.count() == 0 {
            return Err(Error::NoForeground { side: Some(side) });
        }
    }
    Ok(BreastMask { left, right })
}
