//! Domain types shared across ingestion, segmentation, scoring, fusion and
//! evaluation. Everything here is an immutable value.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgproc::Grid;

/// Lowest and highest plausible skin/ambient temperature in °C.
pub const TEMP_MIN_C: f64 = 15.0;
pub const TEMP_MAX_C: f64 = 45.0;

/// ACR BI-RADS breast composition category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AcrDensity {
    A,
    B,
    C,
    D,
}

/// Two-way density routing class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DensityClass {
    Fatty,
    Dense,
}

impl AcrDensity {
    pub const ALL: [AcrDensity; 4] = [AcrDensity::A, AcrDensity::B, AcrDensity::C, AcrDensity::D];

    pub fn classify(self) -> DensityClass {
        classify_density(self)
    }

    pub fn letter(self) -> char {
        match self {
            AcrDensity::A => 'A',
            AcrDensity::B => 'B',
            AcrDensity::C => 'C',
            AcrDensity::D => 'D',
        }
    }
}

/// A/B route to mammography, C/D to thermal.
pub fn classify_density(d: AcrDensity) -> DensityClass {
    match d {
        AcrDensity::A | AcrDensity::B => DensityClass::Fatty,
        AcrDensity::C | AcrDensity::D => DensityClass::Dense,
    }
}

impl FromStr for AcrDensity {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim() {
            "A" | "a" => Ok(AcrDensity::A),
            "B" | "b" => Ok(AcrDensity::B),
            "C" | "c" => Ok(AcrDensity::C),
            "D" | "d" => Ok(AcrDensity::D),
            _ => Err(()),
        }
    }
}

impl fmt::Display for AcrDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Standard-of-care reference conclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroundTruth {
    Suspicious,
    NotSuspicious,
}

impl GroundTruth {
    pub fn is_positive(self) -> bool {
        self == GroundTruth::Suspicious
    }

    pub fn from_positive(positive: bool) -> Self {
        if positive {
            GroundTruth::Suspicious
        } else {
            GroundTruth::NotSuspicious
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroundTruth::Suspicious => "SUSPICIOUS",
            GroundTruth::NotSuspicious => "NOT_SUSPICIOUS",
        }
    }
}

impl FromStr for GroundTruth {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim() {
            "SUSPICIOUS" => Ok(GroundTruth::Suspicious),
            "NOT_SUSPICIOUS" => Ok(GroundTruth::NotSuspicious),
            _ => Err(()),
        }
    }
}

/// One screened woman as listed in a manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseRecord {
    pub case_id: String,
    pub age: u32,
    pub menopause: bool,
    pub density: AcrDensity,
    pub mammo_prob: Option<f64>,
    /// One or more thermal frames; several views are averaged at feature level.
    pub thermal_refs: Vec<PathBuf>,
    pub ground_truth: GroundTruth,
}

impl CaseRecord {
    pub fn density_class(&self) -> DensityClass {
        self.density.classify()
    }

    pub fn age_band(&self) -> AgeBand {
        AgeBand::of(self.age)
    }
}

/// Age strata used in cohort tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgeBand {
    Under30,
    From30To39,
    From40To49,
    From50To59,
    From60To69,
    From70,
}

impl AgeBand {
    pub const ALL: [AgeBand; 6] = [
        AgeBand::Under30,
        AgeBand::From30To39,
        AgeBand::From40To49,
        AgeBand::From50To59,
        AgeBand::From60To69,
        AgeBand::From70,
    ];

    pub fn of(age: u32) -> Self {
        match age {
            0..=29 => AgeBand::Under30,
            30..=39 => AgeBand::From30To39,
            40..=49 => AgeBand::From40To49,
            50..=59 => AgeBand::From50To59,
            60..=69 => AgeBand::From60To69,
            _ => AgeBand::From70,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AgeBand::Under30 => "age<30",
            AgeBand::From30To39 => "age30-39",
            AgeBand::From40To49 => "age40-49",
            AgeBand::From50To59 => "age50-59",
            AgeBand::From60To69 => "age60-69",
            AgeBand::From70 => "age>=70",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum View {
    Frontal,
    LeftOblique,
    RightOblique,
}

/// Image side as displayed: `Left` is the half with the smaller column index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A value per breast side.
#[derive(Clone, Debug, PartialEq)]
pub struct SidePair<T> {
    pub left: T,
    pub right: T,
}

impl<T> SidePair<T> {
    pub fn new(left: T, right: T) -> Self {
        SidePair { left, right }
    }

    pub fn get(&self, side: Side) -> &T {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Side, &T) -> U) -> SidePair<U> {
        SidePair {
            left: f(Side::Left, &self.left),
            right: f(Side::Right, &self.right),
        }
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(Side, &T) -> Result<U>) -> Result<SidePair<U>> {
        Ok(SidePair {
            left: f(Side::Left, &self.left)?,
            right: f(Side::Right, &self.right)?,
        })
    }

    pub fn swapped(self) -> Self {
        SidePair {
            left: self.right,
            right: self.left,
        }
    }
}

/// Calibrated temperature raster in °C.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalFrame {
    view: View,
    temps: Grid<f64>,
}

impl ThermalFrame {
    /// Validates that every temperature is finite and within [15, 45] °C.
    pub fn new(temps: Grid<f64>, view: View) -> Result<Self> {
        if temps.width() == 0 || temps.height() == 0 {
            return Err(Error::DimensionMismatch("frame has zero width or height".into()));
        }
        for (i, &t) in temps.as_slice().iter().enumerate() {
            let (x, y) = temps.coords(i);
            if !t.is_finite() {
                return Err(Error::NonFiniteTemperature { x, y });
            }
            if !(TEMP_MIN_C..=TEMP_MAX_C).contains(&t) {
                return Err(Error::OutOfPhysioRange { x, y, value: t });
            }
        }
        Ok(ThermalFrame { view, temps })
    }

    pub fn width(&self) -> usize {
        self.temps.width()
    }

    pub fn height(&self) -> usize {
        self.temps.height()
    }

    pub fn view(&self) -> View {
        self.view
    }

    pub fn temps(&self) -> &Grid<f64> {
        &self.temps
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        *self.temps.get(x, y)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.temps
            .as_slice()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)))
    }

    pub fn mirrored(&self) -> ThermalFrame {
        ThermalFrame {
            view: self.view,
            temps: self.temps.mirrored(),
        }
    }

    /// Shifts the frame by `(dx, dy)` inside a larger canvas filled with `fill` °C.
    pub fn padded(&self, dx: usize, dy: usize, width: usize, height: usize, fill: f64) -> Result<ThermalFrame> {
        ThermalFrame::new(self.temps.padded(dx, dy, width, height, fill), self.view)
    }
}

/// Disjoint per-side breast regions.
#[derive(Clone, Debug, PartialEq)]
pub struct BreastMask {
    pub left: Grid<bool>,
    pub right: Grid<bool>,
}

impl BreastMask {
    pub fn side(&self, side: Side) -> &Grid<bool> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn union(&self) -> Grid<bool> {
        Grid::from_fn(self.left.width(), self.left.height(), |x, y| {
            *self.left.get(x, y) || *self.right.get(x, y)
        })
    }

    pub fn is_disjoint(&self) -> bool {
        self.left
            .as_slice()
            .iter()
            .zip(self.right.as_slice())
            .all(|(&l, &r)| !(l && r))
    }
}

/// One connected hot region.
#[derive(Clone, Debug, PartialEq)]
pub struct Hotspot {
    pub id: u32,
    pub area: usize,
    pub peak_c: f64,
    /// `(x, y)` in frame pixel coordinates.
    pub centroid: (f64, f64),
    pub eccentricity: f64,
}

/// Hotspots of one side. Label `0` is background, `1..=K` index `hotspots`.
#[derive(Clone, Debug, PartialEq)]
pub struct HotspotMap {
    pub side: Side,
    pub labels: Grid<u32>,
    pub hotspots: Vec<Hotspot>,
    /// Mean and standard deviation of the side mask temperatures.
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub threshold: f64,
}

impl HotspotMap {
    pub fn total_area(&self) -> usize {
        self.hotspots.iter().map(|h| h.area).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.hotspots.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Endpoint,
    Branch,
    /// Anchor placed on a closed loop that has no endpoint or branch.
    Loop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VesselNode {
    /// Representative pixel `(x, y)`.
    pub position: (usize, usize),
    pub kind: NodeKind,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VesselEdge {
    pub from: usize,
    pub to: usize,
    /// Skeleton pixels from `from` to `to`, inclusive of both node pixels.
    pub pixels: Vec<(usize, usize)>,
    pub caliber_px: f64,
}

impl VesselEdge {
    pub fn length(&self) -> usize {
        self.pixels.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VascularGraph {
    pub side: Side,
    pub vessel_mask: Grid<bool>,
    pub skeleton: Grid<bool>,
    pub nodes: Vec<VesselNode>,
    pub edges: Vec<VesselEdge>,
}

impl VascularGraph {
    pub fn branch_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Branch && n.degree >= 3)
            .count()
    }

    pub fn mean_caliber(&self) -> f64 {
        if self.edges.is_empty() {
            0.0
        } else {
            self.edges.iter().map(|e| e.caliber_px).sum::<f64>() / self.edges.len() as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RiskBand {
    Low,
    Moderate,
    High,
}

/// Thermal risk grade 1–5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BScore(u8);

impl BScore {
    pub fn new(grade: u8) -> Option<Self> {
        (1..=5).contains(&grade).then_some(BScore(grade))
    }

    pub fn grade(self) -> u8 {
        self.0
    }

    pub fn band(self) -> RiskBand {
        match self.0 {
            1 | 2 => RiskBand::Low,
            3 => RiskBand::Moderate,
            _ => RiskBand::High,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResultSource {
    MammoAi,
    ThermalytixAi,
    FusedDensity,
    FusedOr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TestResult {
    pub positive: bool,
    pub source: ResultSource,
}

impl TestResult {
    pub fn mammo(positive: bool) -> Self {
        TestResult {
            positive,
            source: ResultSource::MammoAi,
        }
    }

    pub fn thermal(positive: bool) -> Self {
        TestResult {
            positive,
            source: ResultSource::ThermalytixAi,
        }
    }
}

/// 2×2 screening outcome counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub const fn new(true_pos: u64, false_pos: u64, true_neg: u64, false_neg: u64) -> Self {
        ConfusionCounts {
            true_pos,
            false_pos,
            true_neg,
            false_neg,
        }
    }

    pub fn n_pos(&self) -> u64 {
        self.true_pos + self.false_neg
    }

    pub fn n_neg(&self) -> u64 {
        self.true_neg + self.false_pos
    }

    pub fn total(&self) -> u64 {
        self.n_pos() + self.n_neg()
    }

    pub fn predicted_pos(&self) -> u64 {
        self.true_pos + self.false_pos
    }

    pub fn predicted_neg(&self) -> u64 {
        self.true_neg + self.false_neg
    }

    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.true_pos += 1,
            (true, false) => self.false_pos += 1,
            (false, false) => self.true_neg += 1,
            (false, true) => self.false_neg += 1,
        }
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            true_pos: self.true_pos + o.true_pos,
            false_pos: self.false_pos + o.false_pos,
            true_neg: self.true_neg + o.true_neg,
            false_neg: self.false_neg + o.false_neg,
        }
    }
}

/// Point estimate and 95% interval, in percent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub point: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Screening metrics for one cohort or stratum. `None` marks an undefined
/// cell (zero denominator).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub sensitivity: Option<Estimate>,
    pub specificity: Option<Estimate>,
    pub ppv: Option<Estimate>,
    pub npv: Option<Estimate>,
    pub balanced_accuracy: Option<Estimate>,
    pub n_pos: u64,
    pub n_neg: u64,
    pub counts: ConfusionCounts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Sensitivity,
    Specificity,
    Ppv,
    Npv,
    BalancedAccuracy,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Ppv,
        Metric::Npv,
        Metric::BalancedAccuracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Ppv => "ppv",
            Metric::Npv => "npv",
            Metric::BalancedAccuracy => "balanced_accuracy",
        }
    }
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> Option<Estimate> {
        match metric {
            Metric::Sensitivity => self.sensitivity,
            Metric::Specificity => self.specificity,
            Metric::Ppv => self.ppv,
            Metric::Npv => self.npv,
            Metric::BalancedAccuracy => self.balanced_accuracy,
        }
    }
}
