use std::path::Path;

use crate::error::{Error, Result};

use super::{feature_names, RadiomicFeatureVector, FEATURE_DIM};

/// Feature table with a `case_id` column followed by the schema's names.
pub fn render_feature_csv(rows: &[(String, RadiomicFeatureVector)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("case_id").chain(feature_names()))?;
    for (id, v) in rows {
        let mut record = vec![id.clone()];
        record.extend(v.values().iter().map(|x| x.to_string()));
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::parse("feature table", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_feature_csv(path: &Path, rows: &[(String, RadiomicFeatureVector)]) -> Result<()> {
    std::fs::write(path, render_feature_csv(rows)?).map_err(|e| Error::io(path, e))
}

/// Reads a table written by [`write_feature_csv`]; the header must match
/// the current schema exactly.
pub fn read_feature_csv(path: &Path) -> Result<Vec<(String, RadiomicFeatureVector)>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<String> = std::iter::once("case_id").chain(feature_names()).map(str::to_string).collect();
    if header != expected {
        return Err(Error::SchemaMismatch(format!("{}: header does not match the feature schema", path.display())));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let values = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, format!("row {}: {e}", i + 1)))?;
        debug_assert_eq!(values.len(), FEATURE_DIM);
        let v = RadiomicFeatureVector::from_values(values).map_err(|e| match e {
            Error::NonFiniteFeature { col, .. } => Error::NonFiniteFeature { row: i, col },
            e => e,
        })?;
        rows.push((rec[0].to_string(), v));
    }
    Ok(rows)
}
