//! Synthetic thermal frames with fully known structures.
//!
//! Base field: ambient air outside a rectangular torso, a warm torso plateau
//! and one radial cosine depression ("lobe") per breast. Planted on top:
//! Gaussian hotspots, Gaussian-profile vessel ridges (several vessels combine
//! by maximum) and a flat-topped areolar bump at each lobe centre.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgproc::Grid;
use crate::kv;
use crate::model::{
    AcrDensity, AgeBand, CaseRecord, GroundTruth, Side, SidePair, ThermalFrame, View, TEMP_MAX_C, TEMP_MIN_C,
};

/// Width of the cosine roll-off around the areolar plateau, px.
const AREOLA_ROLLOFF: f64 = 3.0;
/// FWHM of a Gaussian in units of its standard deviation.
const FWHM_PER_SIGMA: f64 = 2.354_820_045;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub noise_sigma: f64,
    pub ambient_c: f64,
    pub torso_c: f64,
    /// Temperature at the centre of each lobe depression.
    pub lobe_floor_c: f64,
    pub lobe_radius: f64,
    /// Columns/rows of ambient air left, right and below the torso.
    pub body_margin: usize,
    pub hotspots_left: usize,
    pub hotspots_right: usize,
    /// Nominal radius; the bump's standard deviation is half of it.
    pub hotspot_radius: f64,
    pub hotspot_delta_t: f64,
    pub vessels_left: usize,
    pub vessels_right: usize,
    /// Full width at half maximum of the vessel cross-section, px.
    pub vessel_caliber: f64,
    pub vessel_delta_t: f64,
    pub vessel_length: f64,
    /// Plant Y-shaped vessels (trunk plus two branches) instead of straight ones.
    pub vessel_branching: bool,
    pub areola_radius: f64,
    pub areola_delta_t_left: f64,
    pub areola_delta_t_right: f64,
    pub max_retries: usize,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            width: 200,
            height: 160,
            noise_sigma: 0.05,
            ambient_c: 22.0,
            torso_c: 34.0,
            lobe_floor_c: 33.0,
            lobe_radius: 44.0,
            body_margin: 4,
            hotspots_left: 0,
            hotspots_right: 0,
            hotspot_radius: 10.0,
            hotspot_delta_t: 2.0,
            vessels_left: 0,
            vessels_right: 0,
            vessel_caliber: 3.0,
            vessel_delta_t: 1.5,
            vessel_length: 30.0,
            vessel_branching: false,
            areola_radius: 12.0,
            areola_delta_t_left: 0.0,
            areola_delta_t_right: 0.0,
            max_retries: 1000,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl PhantomSpec {
    pub fn hotspots(&self, side: Side) -> usize {
        match side {
            Side::Left => self.hotspots_left,
            Side::Right => self.hotspots_right,
        }
    }

    pub fn vessels(&self, side: Side) -> usize {
        match side {
            Side::Left => self.vessels_left,
            Side::Right => self.vessels_right,
        }
    }

    pub fn areola_delta_t(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.areola_delta_t_left,
            Side::Right => self.areola_delta_t_right,
        }
    }

    /// Largest column of the left image half under the centroid midline rule.
    fn left_half_end(&self) -> usize {
        (self.width - 2) / 2
    }

    /// Lobe centres: the centre of each half-torso horizontally, the frame's
    /// middle row vertically. The right centre mirrors the left.
    pub fn lobe_centers(&self) -> SidePair<(f64, f64)> {
        let cx = (self.body_margin + self.left_half_end()) as f64 / 2.0;
        let cy = (self.height as f64 - 1.0) / 2.0;
        SidePair::new((cx, cy), (self.width as f64 - 1.0 - cx, cy))
    }

    pub fn in_body(&self, x: usize, y: usize) -> bool {
        x >= self.body_margin && x + self.body_margin < self.width && y + self.body_margin < self.height
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 32 || self.height < 32 {
            return Err(invalid("frame must be at least 32x32"));
        }
        if !(self.noise_sigma.is_finite() && (0.0..=1.0).contains(&self.noise_sigma)) {
            return Err(invalid("noise_sigma must lie in [0, 1]"));
        }
        for (name, dt) in [
            ("hotspot_delta_t", self.hotspot_delta_t),
            ("vessel_delta_t", self.vessel_delta_t),
        ] {
            if !(dt > 0.0 && dt <= 5.0) {
                return Err(invalid(format!("{name} must lie in (0, 5]")));
            }
        }
        for (name, dt) in [
            ("areola_delta_t_left", self.areola_delta_t_left),
            ("areola_delta_t_right", self.areola_delta_t_right),
        ] {
            if !(0.0..=5.0).contains(&dt) {
                return Err(invalid(format!("{name} must lie in [0, 5]")));
            }
        }
        for (name, v) in [
            ("hotspot_radius", self.hotspot_radius),
            ("vessel_caliber", self.vessel_caliber),
            ("areola_radius", self.areola_radius),
        ] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be >= 1 px")));
            }
        }
        if !(self.vessel_length >= 2.0 && self.vessel_length.is_finite()) {
            return Err(invalid("vessel_length must be >= 2 px"));
        }
        if self.max_retries == 0 {
            return Err(invalid("max_retries must be positive"));
        }
        if !(TEMP_MIN_C..=TEMP_MAX_C).contains(&self.ambient_c) || !(TEMP_MIN_C..=TEMP_MAX_C).contains(&self.torso_c)
        {
            return Err(invalid("ambient and torso temperatures must lie in [15, 45]"));
        }
        if !(self.lobe_floor_c > self.ambient_c && self.lobe_floor_c <= self.torso_c) {
            return Err(invalid("lobe floor must lie in (ambient, torso]"));
        }
        let peak = self.torso_c
            + self.hotspot_delta_t
            + self.vessel_delta_t
            + self.areola_delta_t_left.max(self.areola_delta_t_right)
            + 6.0 * self.noise_sigma;
        if peak > TEMP_MAX_C || self.ambient_c - 6.0 * self.noise_sigma < TEMP_MIN_C {
            return Err(invalid("structures plus noise would leave the physiological range"));
        }
        let (cx, cy) = self.lobe_centers().left;
        let r = self.lobe_radius;
        if !(r >= 4.0)
            || cx - r < self.body_margin as f64
            || cx + r > self.left_half_end() as f64
            || cy - r < 0.0
            || cy + r > (self.height - 1 - self.body_margin) as f64
        {
            return Err(invalid("lobe radius does not fit inside the half-torso"));
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, e: &kv::Entry, path: &Path) -> Result<()> {
        match key {
            "width" => self.width = e.parse_value(path)?,
            "height" => self.height = e.parse_value(path)?,
            "noise_sigma" => self.noise_sigma = e.parse_value(path)?,
            "ambient_c" => self.ambient_c = e.parse_value(path)?,
            "torso_c" => self.torso_c = e.parse_value(path)?,
            "lobe_floor_c" => self.lobe_floor_c = e.parse_value(path)?,
            "lobe_radius" => self.lobe_radius = e.parse_value(path)?,
            "body_margin" => self.body_margin = e.parse_value(path)?,
            "hotspots_left" => self.hotspots_left = e.parse_value(path)?,
            "hotspots_right" => self.hotspots_right = e.parse_value(path)?,
            "hotspot_radius" => self.hotspot_radius = e.parse_value(path)?,
            "hotspot_delta_t" => self.hotspot_delta_t = e.parse_value(path)?,
            "vessels_left" => self.vessels_left = e.parse_value(path)?,
            "vessels_right" => self.vessels_right = e.parse_value(path)?,
            "vessel_caliber" => self.vessel_caliber = e.parse_value(path)?,
            "vessel_delta_t" => self.vessel_delta_t = e.parse_value(path)?,
            "vessel_length" => self.vessel_length = e.parse_value(path)?,
            "vessel_branching" => self.vessel_branching = e.parse_value(path)?,
            "areola_radius" => self.areola_radius = e.parse_value(path)?,
            "areola_delta_t_left" => self.areola_delta_t_left = e.parse_value(path)?,
            "areola_delta_t_right" => self.areola_delta_t_right = e.parse_value(path)?,
            "max_retries" => self.max_retries = e.parse_value(path)?,
            _ => return Err(e.unknown(path)),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedHotspot {
    pub side: Side,
    pub center: (f64, f64),
    pub radius: f64,
    pub delta_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedVessel {
    pub side: Side,
    /// A straight vessel is one two-point polyline; a Y vessel is a trunk and
    /// two branches sharing the junction point.
    pub polylines: Vec<Vec<(f64, f64)>>,
    pub caliber: f64,
    pub delta_t: f64,
}

impl PlantedVessel {
    pub fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.polylines.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn distance(&self, p: (f64, f64)) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_branching(&self) -> bool {
        self.polylines.len() > 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedAreola {
    pub side: Side,
    pub center: (f64, f64),
    pub radius: f64,
    pub delta_t: f64,
}

/// Everything planted in one phantom frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomTruth {
    pub seed: u64,
    pub spec: PhantomSpec,
    pub lobe_centers: [(f64, f64); 2],
    pub hotspots: Vec<PlantedHotspot>,
    pub vessels: Vec<PlantedVessel>,
    pub areolas: Vec<PlantedAreola>,
}

impl PhantomTruth {
    pub fn lobe_center(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Left => self.lobe_centers[0],
            Side::Right => self.lobe_centers[1],
        }
    }

    pub fn hotspots_on(&self, side: Side) -> impl Iterator<Item = &PlantedHotspot> {
        self.hotspots.iter().filter(move |h| h.side == side)
    }

    pub fn vessels_on(&self, side: Side) -> impl Iterator<Item = &PlantedVessel> {
        self.vessels.iter().filter(move |v| v.side == side)
    }

    pub fn areola(&self, side: Side) -> &PlantedAreola {
        self.areolas.iter().find(|a| a.side == side).expect("one areola per side")
    }

    /// Pixels strictly inside the lobe disk of `side`.
    pub fn lobe_mask(&self, side: Side) -> Grid<bool> {
        let (cx, cy) = self.lobe_center(side);
        let r = self.spec.lobe_radius;
        Grid::from_fn(self.spec.width, self.spec.height, |x, y| {
            (x as f64 - cx).hypot(y as f64 - cy) < r
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("truth is always serialisable")
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

pub fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn segment_distance(a: ((f64, f64), (f64, f64)), b: ((f64, f64), (f64, f64))) -> f64 {
    let d1 = cross(a.0, a.1, b.0);
    let d2 = cross(a.0, a.1, b.1);
    let d3 = cross(b.0, b.1, a.0);
    let d4 = cross(b.0, b.1, a.1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    [
        point_segment_distance(a.0, b.0, b.1),
        point_segment_distance(a.1, b.0, b.1),
        point_segment_distance(b.0, a.0, a.1),
        point_segment_distance(b.1, a.0, a.1),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

fn vessel_distance(a: &PlantedVessel, b: &PlantedVessel) -> f64 {
    a.segments()
        .flat_map(|sa| b.segments().map(move |sb| segment_distance(sa, sb)))
        .fold(f64::INFINITY, f64::min)
}

/// Smooth base field without any planted structure or noise.
pub fn base_field(spec: &PhantomSpec) -> Grid<f64> {
    let centers = spec.lobe_centers();
    let depth = spec.torso_c - spec.lobe_floor_c;
    let r = spec.lobe_radius;
    Grid::from_fn(spec.width, spec.height, |x, y| {
        if !spec.in_body(x, y) {
            return spec.ambient_c;
        }
        let mut t = spec.torso_c;
        for c in [centers.left, centers.right] {
            let d = (x as f64 - c.0).hypot(y as f64 - c.1);
            if d < r {
                t -= depth * (1.0 + (PI * d / r).cos()) / 2.0;
            }
        }
        t
    })
}

fn areola_profile(d: f64, radius: f64) -> f64 {
    if d <= radius {
        1.0
    } else if d < radius + AREOLA_ROLLOFF {
        (1.0 + (PI * (d - radius) / AREOLA_ROLLOFF).cos()) / 2.0
    } else {
        0.0
    }
}

struct Placer<'a> {
    spec: &'a PhantomSpec,
    rng: ChaCha8Rng,
    hotspots: Vec<PlantedHotspot>,
    vessels: Vec<PlantedVessel>,
}

impl Placer<'_> {
    /// Clearance around the lobe centre kept free for a planted areola.
    fn areola_clearance(&self, side: Side) -> f64 {
        if self.spec.areola_delta_t(side) > 0.0 {
            self.spec.areola_radius + AREOLA_ROLLOFF
        } else {
            0.0
        }
    }

    fn uniform_in_annulus(&mut self, center: (f64, f64), r_min: f64, r_max: f64) -> (f64, f64) {
        let u: f64 = self.rng.random();
        let rho = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
        let theta = self.rng.random::<f64>() * 2.0 * PI;
        (center.0 + rho * theta.cos(), center.1 + rho * theta.sin())
    }

    fn place_hotspot(&mut self, side: Side, center: (f64, f64)) -> Result<()> {
        let s = self.spec;
        let r = s.hotspot_radius;
        // a planted areola is kept clear of the hotspot's two-sd footprint
        let r_min = match self.areola_clearance(side) {
            c if c > 0.0 => (0.3 * s.lobe_radius).max(c + r + 4.0),
            _ => 0.3 * s.lobe_radius,
        };
        let r_max = s.lobe_radius - r / 2.0 - 2.0;
        if r_max > r_min {
            for _ in 0..s.max_retries {
                let c = self.uniform_in_annulus(center, r_min, r_max);
                let clear = self
                    .hotspots
                    .iter()
                    .filter(|h| h.side == side)
                    .all(|h| (h.center.0 - c.0).hypot(h.center.1 - c.1) >= 2.0 * r + 4.0);
                if clear {
                    self.hotspots.push(PlantedHotspot {
                        side,
                        center: c,
                        radius: r,
                        delta_t: s.hotspot_delta_t,
                    });
                    return Ok(());
                }
            }
        }
        Err(Error::SpecOverflow {
            what: "hotspot",
            retries: s.max_retries,
        })
    }

    fn place_vessel(&mut self, side: Side, center: (f64, f64)) -> Result<()> {
        let s = self.spec;
        let half = s.vessel_length / 2.0;
        let limit = s.lobe_radius - 3.0;
        let keep_out = self.areola_clearance(side);
        let vessel_gap = 10.0 + s.vessel_caliber;
        let hotspot_gap = s.hotspot_radius + s.vessel_caliber + 2.0;
        if limit > half {
            for _ in 0..s.max_retries {
                let mid = self.uniform_in_annulus(center, 0.0, limit);
                let theta = self.rng.random::<f64>() * 2.0 * PI;
                let dir = |a: f64, len: f64, from: (f64, f64)| (from.0 + len * a.cos(), from.1 + len * a.sin());
                let polylines = if s.vessel_branching {
                    let start = dir(theta + PI, half, mid);
                    let spread = 35f64.to_radians();
                    vec![
                        vec![start, mid],
                        vec![mid, dir(theta + spread, half, mid)],
                        vec![mid, dir(theta - spread, half, mid)],
                    ]
                } else {
                    vec![vec![dir(theta + PI, half, mid), dir(theta, half, mid)]]
                };
                let v = PlantedVessel {
                    side,
                    polylines,
                    caliber: s.vessel_caliber,
                    delta_t: s.vessel_delta_t,
                };
                let inside = v
                    .polylines
                    .iter()
                    .flatten()
                    .all(|p| (p.0 - center.0).hypot(p.1 - center.1) <= limit);
                let clear_of_areola = keep_out == 0.0 || v.distance(center) >= keep_out + s.vessel_caliber;
                let clear_of_vessels = self
                    .vessels
                    .iter()
                    .filter(|o| o.side == side)
                    .all(|o| vessel_distance(o, &v) >= vessel_gap);
                let clear_of_hotspots = self
                    .hotspots
                    .iter()
                    .filter(|h| h.side == side)
                    .all(|h| v.distance(h.center) >= hotspot_gap);
                if inside && clear_of_areola && clear_of_vessels && clear_of_hotspots {
                    self.vessels.push(v);
                    return Ok(());
                }
            }
        }
        Err(Error::SpecOverflow {
            what: "vessel",
            retries: s.max_retries,
        })
    }
}

/// Generates one phantom. Identical `(spec, seed)` gives a bit-identical
/// frame and truth.
pub fn generate_phantom(spec: &PhantomSpec, seed: u64) -> Result<(ThermalFrame, PhantomTruth)> {
    spec.validate()?;
    let centers = spec.lobe_centers();
    let mut placer = Placer {
        spec,
        rng: ChaCha8Rng::seed_from_u64(seed),
        hotspots: Vec::new(),
        vessels: Vec::new(),
    };
    for side in Side::BOTH {
        for _ in 0..spec.hotspots(side) {
            placer.place_hotspot(side, *centers.get(side))?;
        }
    }
    for side in Side::BOTH {
        for _ in 0..spec.vessels(side) {
            placer.place_vessel(side, *centers.get(side))?;
        }
    }
    let areolas: Vec<PlantedAreola> = Side::BOTH
        .iter()
        .map(|&side| PlantedAreola {
            side,
            center: *centers.get(side),
            radius: spec.areola_radius,
            delta_t: spec.areola_delta_t(side),
        })
        .collect();

    let mut temps = base_field(spec);
    for y in 0..spec.height {
        for x in 0..spec.width {
            if !spec.in_body(x, y) {
                continue;
            }
            let p = (x as f64, y as f64);
            let mut add = 0.0;
            for h in &placer.hotspots {
                let sd = h.radius / 2.0;
                let d2 = (p.0 - h.center.0).powi(2) + (p.1 - h.center.1).powi(2);
                add += h.delta_t * (-d2 / (2.0 * sd * sd)).exp();
            }
            let mut ridge: f64 = 0.0;
            for v in &placer.vessels {
                let sd = v.caliber / FWHM_PER_SIGMA;
                let d = v.distance(p);
                ridge = ridge.max(v.delta_t * (-d * d / (2.0 * sd * sd)).exp());
            }
            add += ridge;
            for a in &areolas {
                if a.delta_t > 0.0 {
                    add += a.delta_t * areola_profile((p.0 - a.center.0).hypot(p.1 - a.center.1), a.radius);
                }
            }
            if add != 0.0 {
                let i = temps.index(x, y);
                temps.as_mut_slice()[i] += add;
            }
        }
    }
    if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma).expect("sigma validated");
        for t in temps.as_mut_slice() {
            *t = (*t + normal.sample(&mut placer.rng)).clamp(TEMP_MIN_C, TEMP_MAX_C);
        }
    }

    let truth = PhantomTruth {
        seed,
        spec: spec.clone(),
        lobe_centers: [centers.left, centers.right],
        hotspots: placer.hotspots,
        vessels: placer.vessels,
        areolas,
    };
    Ok((ThermalFrame::new(temps, View::Frontal)?, truth))
}

/// Structure counts and contrasts for one class of synthetic case. The
/// `affected` side carries the class's findings; the other side gets the
/// contralateral settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassProfile {
    pub hotspots: usize,
    pub hotspot_delta_t: f64,
    pub vessels: usize,
    pub contralateral_vessels: usize,
    pub areola_delta_t: f64,
    pub contralateral_areola_delta_t: f64,
    /// Range the mammography probability is drawn from.
    pub mammo_prob: (f64, f64),
}

impl ClassProfile {
    pub fn benign() -> Self {
        ClassProfile {
            hotspots: 0,
            hotspot_delta_t: 2.0,
            vessels: 1,
            contralateral_vessels: 1,
            areola_delta_t: 0.8,
            contralateral_areola_delta_t: 0.8,
            mammo_prob: (0.01, 0.55),
        }
    }

    pub fn malignant() -> Self {
        ClassProfile {
            hotspots: 2,
            hotspot_delta_t: 2.5,
            vessels: 2,
            contralateral_vessels: 1,
            areola_delta_t: 1.6,
            contralateral_areola_delta_t: 0.8,
            mammo_prob: (0.35, 0.99),
        }
    }

    fn set(&mut self, key: &str, e: &kv::Entry, path: &Path) -> Result<()> {
        match key {
            "hotspots" => self.hotspots = e.parse_value(path)?,
            "hotspot_delta_t" => self.hotspot_delta_t = e.parse_value(path)?,
            "vessels" => self.vessels = e.parse_value(path)?,
            "contralateral_vessels" => self.contralateral_vessels = e.parse_value(path)?,
            "areola_delta_t" => self.areola_delta_t = e.parse_value(path)?,
            "contralateral_areola_delta_t" => self.contralateral_areola_delta_t = e.parse_value(path)?,
            "mammo_prob" => {
                let v: Vec<f64> = e.parse_list(path)?;
                match v[..] {
                    [lo, hi] if 0.0 <= lo && lo <= hi && hi <= 1.0 => self.mammo_prob = (lo, hi),
                    _ => return Err(Error::parse(path, format!("line {}: mammo_prob needs lo,hi in [0,1]", e.line))),
                }
            }
            _ => return Err(e.unknown(path)),
        }
        Ok(())
    }

    fn apply(&self, base: &PhantomSpec, affected: Side) -> PhantomSpec {
        let mut s = base.clone();
        s.hotspot_delta_t = self.hotspot_delta_t;
        let (hl, hr) = match affected {
            Side::Left => (self.hotspots, 0),
            Side::Right => (0, self.hotspots),
        };
        let (vl, vr) = match affected {
            Side::Left => (self.vessels, self.contralateral_vessels),
            Side::Right => (self.contralateral_vessels, self.vessels),
        };
        let (al, ar) = match affected {
            Side::Left => (self.areola_delta_t, self.contralateral_areola_delta_t),
            Side::Right => (self.contralateral_areola_delta_t, self.areola_delta_t),
        };
        s.hotspots_left = hl;
        s.hotspots_right = hr;
        s.vessels_left = vl;
        s.vessels_right = vr;
        s.areola_delta_t_left = al;
        s.areola_delta_t_right = ar;
        s
    }
}

/// Labelled synthetic cohort description, read from a `key=value` file.
///
/// Keys: `cases`, `malignant_fraction`, `phantom.<field>` for the shared
/// frame geometry and `benign.<field>` / `malignant.<field>` for the class
/// profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct CohortSpec {
    pub cases: usize,
    pub malignant_fraction: f64,
    pub phantom: PhantomSpec,
    pub benign: ClassProfile,
    pub malignant: ClassProfile,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            cases: 40,
            malignant_fraction: 0.5,
            phantom: PhantomSpec::default(),
            benign: ClassProfile::benign(),
            malignant: ClassProfile::malignant(),
        }
    }
}

impl CohortSpec {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut spec = CohortSpec::default();
        for e in kv::parse(text, path)? {
            match e.key.split_once('.') {
                Some(("phantom", k)) => spec.phantom.set(k, &e, path)?,
                Some(("benign", k)) => spec.benign.set(k, &e, path)?,
                Some(("malignant", k)) => spec.malignant.set(k, &e, path)?,
                None if e.key == "cases" => spec.cases = e.parse_value(path)?,
                None if e.key == "malignant_fraction" => {
                    let f: f64 = e.parse_value(path)?;
                    if !(0.0..=1.0).contains(&f) {
                        return Err(Error::parse(path, format!("line {}: malignant_fraction outside [0, 1]", e.line)));
                    }
                    spec.malignant_fraction = f;
                }
                _ => return Err(e.unknown(path)),
            }
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// One generated case: manifest record (without thermal paths), frame, truth.
#[derive(Clone, Debug)]
pub struct PhantomCase {
    pub record: CaseRecord,
    pub frame: ThermalFrame,
    pub truth: PhantomTruth,
}

// Cohort demographics loosely follow a screening population.
const AGE_BAND_WEIGHTS: [u32; 6] = [1, 44, 130, 87, 51, 11];
const DENSITY_WEIGHTS: [u32; 4] = [8, 157, 144, 15];

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[u32]) -> usize {
    let total: u32 = weights.iter().sum();
    let mut u = rng.random_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn age_in_band(rng: &mut ChaCha8Rng, band: AgeBand) -> u32 {
    let (lo, hi) = match band {
        AgeBand::Under30 => (18, 29),
        AgeBand::From30To39 => (30, 39),
        AgeBand::From40To49 => (40, 49),
        AgeBand::From50To59 => (50, 59),
        AgeBand::From60To69 => (60, 69),
        AgeBand::From70 => (70, 84),
    };
    rng.random_range(lo..=hi)
}

/// Generates a labelled cohort. Case `i` draws from its own ChaCha stream, so
/// a case does not change when the cohort grows.
pub fn generate_cohort(spec: &CohortSpec, seed: u64) -> Result<Vec<PhantomCase>> {
    let n = spec.cases;
    let n_malignant = (n as f64 * spec.malignant_fraction).round() as usize;
    let mut order_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut malignant = vec![false; n];
    malignant[..n_malignant].iter_mut().for_each(|m| *m = true);
    // Fisher-Yates so labels are interleaved
    for i in (1..n).rev() {
        let j = order_rng.random_range(0..=i);
        malignant.swap(i, j);
    }

    let mut out = Vec::with_capacity(n);
    for (i, &is_malignant) in malignant.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let band = AgeBand::ALL[pick_weighted(&mut rng, &AGE_BAND_WEIGHTS)];
        let age = age_in_band(&mut rng, band);
        let p_meno = match age {
            0..=44 => 0.05,
            45..=54 => 0.5,
            _ => 0.95,
        };
        let menopause = rng.random_bool(p_meno);
        let density = AcrDensity::ALL[pick_weighted(&mut rng, &DENSITY_WEIGHTS)];
        let profile = if is_malignant { &spec.malignant } else { &spec.benign };
        let (lo, hi) = profile.mammo_prob;
        let mammo_prob = ((lo + rng.random::<f64>() * (hi - lo)) * 1000.0).round() / 1000.0;
        let affected = if rng.random_bool(0.5) { Side::Left } else { Side::Right };
        let phantom_seed = rng.next_u64();

        let (frame, truth) = generate_phantom(&profile.apply(&spec.phantom, affected), phantom_seed)?;
        out.push(PhantomCase {
            record: CaseRecord {
                case_id: format!("ph{:04}", i + 1),
                age,
                menopause,
                density,
                mammo_prob: Some(mammo_prob),
                thermal_refs: Vec::new(),
                ground_truth: GroundTruth::from_positive(is_malignant),
            },
            frame,
            truth,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_is_base_field() {
        let spec = PhantomSpec {
            noise_sigma: 0.0,
            ..PhantomSpec::default()
        };
        let (frame, truth) = generate_phantom(&spec, 3).unwrap();
        assert_eq!(frame.temps(), &base_field(&spec));
        assert!(truth.hotspots.is_empty() && truth.vessels.is_empty());
        let (lo, hi) = frame.min_max();
        assert_eq!((lo, hi), (22.0, 34.0));
        let (cx, cy) = truth.lobe_center(Side::Left);
        assert_eq!(frame.at(cx.round() as usize, cy.round() as usize) < 33.01, true);
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = PhantomSpec {
            hotspots_left: 2,
            vessels_right: 1,
            ..PhantomSpec::default()
        };
        let a = generate_phantom(&spec, 11).unwrap();
        let b = generate_phantom(&spec, 11).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = generate_phantom(&spec, 12).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn planted_centres_are_warm_and_inside_lobes() {
        for seed in 0..20 {
            let spec = PhantomSpec {
                noise_sigma: 0.0,
                hotspots_left: 2,
                hotspots_right: 1,
                vessels_left: 1,
                vessels_right: 1,
                vessel_branching: seed % 2 == 0,
                areola_delta_t_left: 0.5,
                ..PhantomSpec::default()
            };
            let (frame, truth) = generate_phantom(&spec, seed).unwrap();
            let base = base_field(&spec);
            for h in &truth.hotspots {
                let (x, y) = (h.center.0.round() as usize, h.center.1.round() as usize);
                // rounding moves at most 0.71 px off centre
                let gain = (-(0.5f64) / (2.0 * 25.0)).exp();
                assert!(frame.at(x, y) - base.get(x, y) >= 0.5 * h.delta_t * gain);
                let lc = truth.lobe_center(h.side);
                assert!((h.center.0 - lc.0).hypot(h.center.1 - lc.1) < spec.lobe_radius);
            }
            for v in &truth.vessels {
                let lc = truth.lobe_center(v.side);
                for p in v.polylines.iter().flatten() {
                    assert!((p.0 - lc.0).hypot(p.1 - lc.1) < spec.lobe_radius);
                }
            }
        }
    }

    #[test]
    fn overflow_and_invalid_specs() {
        let crowded = PhantomSpec {
            hotspots_left: 12,
            max_retries: 50,
            ..PhantomSpec::default()
        };
        assert!(matches!(
            generate_phantom(&crowded, 1),
            Err(Error::SpecOverflow { what: "hotspot", retries: 50 })
        ));
        let hot = PhantomSpec {
            hotspot_delta_t: 6.0,
            ..PhantomSpec::default()
        };
        assert!(matches!(generate_phantom(&hot, 1), Err(Error::InvalidSpec(_))));
        let thin = PhantomSpec {
            vessel_caliber: 0.5,
            ..PhantomSpec::default()
        };
        assert!(matches!(generate_phantom(&thin, 1), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn truth_json_round_trip() {
        let spec = PhantomSpec {
            hotspots_right: 1,
            vessels_left: 1,
            vessel_branching: true,
            ..PhantomSpec::default()
        };
        let (_, truth) = generate_phantom(&spec, 5).unwrap();
        let back = PhantomTruth::from_json(&truth.to_json(), Path::new("t")).unwrap();
        assert_eq!(back, truth);
        assert!(back.vessels[0].is_branching());
    }

    #[test]
    fn lobes_are_mirror_images() {
        let spec = PhantomSpec::default();
        let base = base_field(&spec);
        assert_eq!(base.mirrored(), base);
        let c = spec.lobe_centers();
        assert_eq!(c.left.0 + c.right.0, spec.width as f64 - 1.0);
    }

    #[test]
    fn cohort_is_labelled_and_stable() {
        let spec = CohortSpec::parse("cases=6\nmalignant_fraction=0.5\nphantom.noise_sigma=0.02\n", Path::new("c"))
            .unwrap();
        let a = generate_cohort(&spec, 9).unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a.iter().filter(|c| c.record.ground_truth.is_positive()).count(), 3);
        let b = generate_cohort(&spec, 9).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.record, y.record);
            assert_eq!(x.frame, y.frame);
        }
        for c in &a {
            assert!(c.record.age >= 18);
            let hot = c.truth.hotspots.len();
            assert_eq!(hot > 0, c.record.ground_truth.is_positive());
        }
        assert!(CohortSpec::parse("bogus=1\n", Path::new("c")).is_err());
    }
}
