//! Per-case score table written by scoring and read by evaluation.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::BScore;
use crate::risk::ThermalAssessment;

pub const SCORE_COLUMNS: [&str; 8] = [
    "case_id",
    "s_hotspot",
    "s_vascular",
    "s_areolar",
    "ensemble",
    "bscore",
    "thermal_positive",
    "mammo_positive",
];

/// Written in every thermal column of a case whose thermal pipeline failed.
pub const FAILED: &str = "FAILED";

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    pub case_id: String,
    /// `None` when the thermal pipeline failed for this case.
    pub thermal: Option<ThermalAssessment>,
    /// `None` when the case has no mammography probability.
    pub mammo_positive: Option<bool>,
}

pub fn render_scores(rows: &[ScoreRow]) -> String {
    let mut out = SCORE_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let thermal = match &r.thermal {
            Some(a) => format!(
                "{},{},{},{},{},{}",
                a.s_hotspot,
                a.s_vascular,
                a.s_areolar,
                a.ensemble,
                a.bscore.grade(),
                a.positive()
            ),
            None => [FAILED; 6].join(","),
        };
        let mammo = r.mammo_positive.map(|m| m.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{thermal},{mammo}\n", r.case_id));
    }
    out
}

pub fn write_scores(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    std::fs::write(path, render_scores(rows)).map_err(|e| Error::io(path, e))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

pub fn parse_scores(text: &str, path: &Path) -> Result<Vec<ScoreRow>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SCORE_COLUMNS {
        return Err(Error::parse(path, format!("score header must be `{}`", SCORE_COLUMNS.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |what: &str| Error::parse(path, format!("line {line}: bad {what}"));
        let thermal = if &rec[1] == FAILED {
            None
        } else {
            let num = |j: usize| rec[j].parse::<f64>().map_err(|_| bad(SCORE_COLUMNS[j]));
            let grade: u8 = rec[5].parse().map_err(|_| bad("bscore"))?;
            let a = ThermalAssessment {
                s_hotspot: num(1)?,
                s_vascular: num(2)?,
                s_areolar: num(3)?,
                ensemble: num(4)?,
                bscore: BScore::new(grade).ok_or_else(|| bad("bscore"))?,
            };
            if parse_bool(&rec[6]) != Some(a.positive()) {
                return Err(bad("thermal_positive (must agree with bscore)"));
            }
            Some(a)
        };
        let mammo_positive = match &rec[7] {
            "" => None,
            s => Some(parse_bool(s).ok_or_else(|| bad("mammo_positive"))?),
        };
        rows.push(ScoreRow {
            case_id: rec[0].to_string(),
            thermal,
            mammo_positive,
        });
    }
    Ok(rows)
}

pub fn load_scores(path: &Path) -> Result<Vec<ScoreRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text, path)
}
