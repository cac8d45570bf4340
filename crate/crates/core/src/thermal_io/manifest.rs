use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{AcrDensity, CaseRecord, GroundTruth};

pub const MANIFEST_COLUMNS: [&str; 7] = [
    "case_id",
    "age",
    "menopause",
    "density",
    "mammo_prob",
    "thermal_ref",
    "ground_truth",
];

/// Separator between several thermal views of one case in `thermal_ref`.
pub const VIEW_SEPARATOR: char = ';';

/// Reads a case manifest. Relative `thermal_ref` paths resolve against the
/// manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<CaseRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest(&text, base)
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<CaseRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let mut col = [0usize; 7];
    for (slot, name) in col.iter_mut().zip(MANIFEST_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }

    let mut seen = HashSet::new();
    let mut cases = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        // header is line 1
        let line = row + 2;
        let field = |i: usize| record.get(col[i]).unwrap_or("");

        let case_id = field(0).to_string();
        if case_id.is_empty() {
            return Err(Error::Range {
                line,
                field: "case_id",
                detail: "empty".into(),
            });
        }
        let age: u32 = field(1).parse().map_err(|_| Error::Range {
            line,
            field: "age",
            detail: format!("`{}` is not a whole number of years", field(1)),
        })?;
        if age < 18 {
            return Err(Error::Range {
                line,
                field: "age",
                detail: format!("{age} < 18"),
            });
        }
        let menopause = match field(2).to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => {
                return Err(Error::BadEnum {
                    line,
                    field: "menopause",
                    value: other.to_string(),
                })
            }
        };
        let density: AcrDensity = field(3).parse().map_err(|_| Error::BadEnum {
            line,
            field: "density",
            value: field(3).to_string(),
        })?;
        let mammo_prob = match field(4) {
            "" => None,
            s => {
                let p: f64 = s.parse().map_err(|_| Error::Range {
                    line,
                    field: "mammo_prob",
                    detail: format!("`{s}` is not a number"),
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Range {
                        line,
                        field: "mammo_prob",
                        detail: format!("{p} outside [0, 1]"),
                    });
                }
                Some(p)
            }
        };
        let thermal_refs = field(5)
            .split(VIEW_SEPARATOR)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| base.join(s))
            .collect();
        let ground_truth: GroundTruth = field(6).parse().map_err(|_| Error::BadEnum {
            line,
            field: "ground_truth",
            value: field(6).to_string(),
        })?;

        if !seen.insert(case_id.clone()) {
            return Err(Error::DuplicateId(case_id));
        }
        cases.push(CaseRecord {
            case_id,
            age,
            menopause,
            density,
            mammo_prob,
            thermal_refs,
            ground_truth,
        });
    }
    Ok(cases)
}

/// Writes a manifest; thermal paths are written relative to `base` when they
/// live under it.
pub fn write_manifest(path: &Path, cases: &[CaseRecord]) -> Result<()> {
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    fs::write(path, render_manifest(cases, base)).map_err(|e| Error::io(path, e))
}

pub fn render_manifest(cases: &[CaseRecord], base: &Path) -> String {
    let mut out = MANIFEST_COLUMNS.join(",");
    out.push('\n');
    for c in cases {
        let refs: Vec<String> = c
            .thermal_refs
            .iter()
            .map(|p| relative_to(p, base).display().to_string())
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.case_id,
            c.age,
            c.menopause,
            c.density,
            c.mammo_prob.map(|p| p.to_string()).unwrap_or_default(),
            refs.join(&VIEW_SEPARATOR.to_string()),
            c.ground_truth.as_str(),
        ));
    }
    out
}

fn relative_to(p: &Path, base: &Path) -> PathBuf {
    if base.as_os_str().is_empty() {
        return p.to_path_buf();
    }
    p.strip_prefix(base).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf())
}
