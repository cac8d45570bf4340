//! Shared fixtures: the published screening cohort rebuilt case by case,
//! its reference figures, and small helpers.

#![allow(dead_code)]

use densefusion::evaluate::back_solve_str;
use densefusion::fusion::FusionPolicy;
use densefusion::model::{AcrDensity, CaseRecord, ConfusionCounts, DensityClass, GroundTruth, Metric};
use densefusion::risk::{mammo_positive, to_bscore, BScoreBins, ThermalAssessment, MAMMO_THRESHOLD};
use densefusion::scores::ScoreRow;

/// A count set with the four published rates (percent strings) it must
/// reproduce: sensitivity, specificity, PPV, NPV.
pub struct PublishedCounts {
    pub label: &'static str,
    pub counts: ConfusionCounts,
    pub rates: [&'static str; 4],
}

pub const PUBLISHED: [PublishedCounts; 6] = [
    PublishedCounts {
        label: "mammography overall",
        counts: ConfusionCounts::new(45, 37, 232, 10),
        rates: ["81.82", "86.25", "54.88", "95.87"],
    },
    PublishedCounts {
        label: "thermal overall",
        counts: ConfusionCounts::new(51, 66, 203, 4),
        rates: ["92.73", "75.46", "43.59", "98.07"],
    },
    PublishedCounts {
        label: "mammography fatty",
        counts: ConfusionCounts::new(26, 14, 124, 1),
        rates: ["96.30", "89.86", "65.00", "99.20"],
    },
    PublishedCounts {
        label: "thermal fatty",
        counts: ConfusionCounts::new(25, 26, 112, 2),
        rates: ["92.59", "81.16", "49.02", "98.25"],
    },
    PublishedCounts {
        label: "mammography dense",
        counts: ConfusionCounts::new(19, 22, 109, 9),
        rates: ["67.86", "83.08", "46.34", "92.31"],
    },
    PublishedCounts {
        label: "thermal dense",
        counts: ConfusionCounts::new(26, 40, 91, 2),
        rates: ["92.86", "69.47", "39.39", "97.85"],
    },
];

/// Every rate of `p` that the back-solver does not map to the fixture's
/// `(numerator, denominator)` at that denominator. Empty means verified.
pub fn back_solve_failures(p: &PublishedCounts) -> Vec<String> {
    let c = p.counts;
    let pairs = [
        (c.true_pos, c.n_pos()),
        (c.true_neg, c.n_neg()),
        (c.true_pos, c.predicted_pos()),
        (c.true_neg, c.predicted_neg()),
    ];
    let mut out = Vec::new();
    for (m, (rate, (k, n))) in Metric::ALL.iter().zip(p.rates.iter().zip(pairs)) {
        let found = back_solve_str(rate, n..=n).unwrap();
        if !found.contains(&(k, n)) {
            out.push(format!("{} {}: {rate}% has solutions {found:?} at n={n}, fixture has {k}/{n}", p.label, m.name()));
        }
    }
    out
}

/// Joint mammography/thermal outcome cells per density class and truth:
/// `(mammo positive, thermal positive, number of cases)`.
const JOINT: [(DensityClass, bool, &[(bool, bool, usize)]); 4] = [
    (DensityClass::Fatty, true, &[(false, false, 1), (true, false, 1), (true, true, 25)]),
    (DensityClass::Fatty, false, &[(false, false, 100), (false, true, 24), (true, false, 12), (true, true, 2)]),
    (DensityClass::Dense, true, &[(false, false, 2), (false, true, 7), (true, true, 19)]),
    (DensityClass::Dense, false, &[(false, false, 79), (false, true, 30), (true, false, 12), (true, true, 10)]),
];

/// The published cohort as individual cases plus their score rows.
///
/// Mammography probabilities straddle the 0.43 operating point (negatives
/// include exactly 0.43) and ensemble probabilities straddle the B-Score
/// positivity cut, so positivity flows through the real decision rules.
pub fn reference_cohort() -> (Vec<CaseRecord>, Vec<ScoreRow>) {
    let bins = BScoreBins::default();
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    for (class, suspicious, cells) in JOINT {
        for &(m, t, n) in cells {
            for _ in 0..n {
                let i = cases.len();
                let density = match (class, i % 2) {
                    (DensityClass::Fatty, 0) => AcrDensity::A,
                    (DensityClass::Fatty, _) => AcrDensity::B,
                    (DensityClass::Dense, 0) => AcrDensity::C,
                    (DensityClass::Dense, _) => AcrDensity::D,
                };
                let age = 25 + (i * 7 % 60) as u32;
                let mammo_prob = if m { [0.4301, 0.6, 0.97][i % 3] } else { [0.43, 0.2, 0.01][i % 3] };
                let ensemble = if t { [0.35, 0.6, 0.9][i % 3] } else { [0.05, 0.2, 0.3499][i % 3] };
                let id = format!("p{i:03}");
                cases.push(CaseRecord {
                    case_id: id.clone(),
                    age,
                    menopause: age >= 50,
                    density,
                    mammo_prob: Some(mammo_prob),
                    thermal_refs: Vec::new(),
                    ground_truth: GroundTruth::from_positive(suspicious),
                });
                rows.push(ScoreRow {
                    case_id: id,
                    thermal: Some(ThermalAssessment {
                        s_hotspot: ensemble,
                        s_vascular: ensemble,
                        s_areolar: ensemble,
                        ensemble,
                        bscore: to_bscore(ensemble, &bins),
                    }),
                    mammo_positive: Some(mammo_positive(mammo_prob, MAMMO_THRESHOLD)),
                });
            }
        }
    }
    (cases, rows)
}

/// One published table cell: point estimate and interval in percent.
#[derive(Clone, Copy, Debug)]
pub struct Reference {
    pub policy: FusionPolicy,
    /// `overall`, `fatty` or `dense`.
    pub stratum: &'static str,
    pub metric: Metric,
    pub values: [f64; 3],
}

const M: [Metric; 5] = Metric::ALL;

fn row(policy: FusionPolicy, stratum: &'static str, cells: [[f64; 3]; 5]) -> impl Iterator<Item = Reference> {
    M.into_iter().zip(cells).map(move |(metric, values)| Reference {
        policy,
        stratum,
        metric,
        values,
    })
}

/// Published comparison table. Cells the results narrative restates at
/// two decimals use that precision; the rest are the table's figures.
pub fn published_table() -> Vec<Reference> {
    use FusionPolicy::*;
    let mut v = Vec::new();
    v.extend(row(
        MammoOnly,
        "overall",
        [
            [81.82, 71.62, 92.01],
            [86.25, 82.13, 90.36],
            [54.88, 44.11, 65.65],
            [95.87, 93.36, 98.38],
            [84.04, 80.1, 88.0],
        ],
    ));
    v.extend(row(
        MammoOnly,
        "fatty",
        [
            [96.30, 89.17, 100.0],
            [89.86, 84.82, 94.89],
            [65.00, 50.22, 79.78],
            [99.20, 97.64, 100.0],
            [93.08, 90.3, 95.8],
        ],
    ));
    v.extend(row(
        MammoOnly,
        "dense",
        [
            [67.86, 50.56, 85.16],
            [83.08, 76.63, 89.52],
            [46.34, 31.08, 61.61],
            [92.31, 87.48, 97.14],
            [75.47, 70.1, 80.2],
        ],
    ));
    v.extend(row(
        ThermalOnly,
        "overall",
        [
            [92.73, 85.86, 99.59],
            [75.46, 70.32, 80.61],
            [43.59, 34.40, 52.58],
            [98.07, 96.19, 99.94],
            [84.10, 80.1, 88.1],
        ],
    ));
    v.extend(row(
        ThermalOnly,
        "fatty",
        [
            [92.59, 82.71, 100.0],
            [81.16, 74.64, 87.68],
            [49.02, 35.23, 62.74],
            [98.25, 95.84, 100.0],
            [86.87, 83.2, 90.1],
        ],
    ));
    v.extend(row(
        ThermalOnly,
        "dense",
        [
            [92.86, 83.32, 100.0],
            [69.47, 61.58, 77.35],
            [39.39, 27.61, 51.12],
            [97.85, 94.90, 100.0],
            [81.16, 76.9, 85.4],
        ],
    ));
    v.extend(row(
        OrRule,
        "overall",
        [
            [94.6, 88.6, 100.0],
            [66.5, 60.9, 72.2],
            [36.6, 28.7, 44.5],
            [98.4, 96.5, 100.0],
            [80.6, 76.2, 84.9],
        ],
    ));
    v.extend(row(
        DensityInformed,
        "overall",
        [
            [94.55, 88.54, 100.0],
            [79.93, 75.14, 84.71],
            [49.06, 39.54, 58.57],
            [98.62, 97.08, 100.0],
            [87.2, 83.6, 90.9],
        ],
    ));
    v
}

/// Agreement of a rendered two-decimal figure with a published one.
pub fn within_pp(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol + 1e-9
}
