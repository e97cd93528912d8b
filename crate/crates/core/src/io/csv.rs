//! CSV ingestion: group column extraction, one-hot encoding of categorical
//! feature columns, and optional z-score standardization.

use std::path::Path;

use crate::dataset::GroupedDataset;
use crate::error::Error;
use crate::Result;

/// A column picked by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl ColumnSelector {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            ColumnSelector::Index(i) => {
                if *i < headers.len() {
                    Ok(*i)
                } else {
                    Err(Error::ingest(format!(
                        "column index {i} out of range; file has {} columns",
                        headers.len()
                    )))
                }
            }
            ColumnSelector::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::ingest(format!("missing column `{name}`"))),
        }
    }
}

impl From<&str> for ColumnSelector {
    fn from(s: &str) -> Self {
        ColumnSelector::Name(s.to_string())
    }
}

/// Ingestion settings.
#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// The group column; always excluded from the features.
    pub group_column: ColumnSelector,
    /// Explicit feature columns, or all remaining columns when `None`.
    pub feature_columns: Option<Vec<ColumnSelector>>,
    /// z-score each feature after encoding; zero-variance features are left
    /// centered at 0.
    pub standardize: bool,
    /// One-hot encode non-numeric feature columns. With this off, a
    /// non-numeric cell is an error.
    pub one_hot: bool,
}

impl IngestConfig {
    pub fn new(group_column: impl Into<ColumnSelector>) -> Self {
        Self {
            group_column: group_column.into(),
            feature_columns: None,
            standardize: false,
            one_hot: true,
        }
    }

    pub fn with_standardize(mut self, on: bool) -> Self {
        self.standardize = on;
        self
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    let trimmed = cell.trim();
    if trimmed.is_empty() {
        return None;
    }
    trimmed.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Load a comma-delimited UTF-8 file with a header row into a dataset.
///
/// Row order is preserved; group ids are densified in first-appearance
/// order with the original labels retained. Missing cells are errors, not
/// imputed.
pub fn load_csv(path: impl AsRef<Path>, config: &IngestConfig) -> Result<GroupedDataset<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::ingest(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::ingest(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if headers.is_empty() {
        return Err(Error::ingest("empty file: no header row"));
    }

    let group_col = config.group_column.resolve(&headers)?;
    let feature_cols: Vec<usize> = match &config.feature_columns {
        Some(cols) => {
            let mut resolved = Vec::with_capacity(cols.len());
            for c in cols {
                let idx = c.resolve(&headers)?;
                if idx == group_col {
                    return Err(Error::ingest(format!(
                        "group column `{}` cannot also be a feature",
                        headers[idx]
                    )));
                }
                resolved.push(idx);
            }
            resolved
        }
        None => (0..headers.len()).filter(|&i| i != group_col).collect(),
    };
    if feature_cols.is_empty() {
        return Err(Error::ingest(
            "no feature columns left after removing the group column",
        ));
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut group_labels: Vec<String> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ingest(format!("row {}: {e}", row_idx + 1)))?;
        if record.len() != headers.len() {
            return Err(Error::ingest(format!(
                "row {}: expected {} fields, found {}",
                row_idx + 1,
                headers.len(),
                record.len()
            )));
        }
        group_labels.push(record[group_col].trim().to_string());
        rows.push(record.iter().map(String::from).collect());
    }
    if rows.is_empty() {
        return Err(Error::ingest("empty file: no data rows"));
    }
    let n = rows.len();

    // Encode column by column: numeric columns pass through, categorical
    // columns expand to one indicator feature per distinct value in
    // first-appearance order.
    let mut features: Vec<Vec<f64>> = Vec::new(); // column-major
    for &col in &feature_cols {
        let cells: Vec<&str> = rows.iter().map(|r| r[col].as_str()).collect();
        if let Some(empty_row) = cells.iter().position(|c| c.trim().is_empty()) {
            return Err(Error::ingest(format!(
                "row {}, column `{}`: missing value",
                empty_row + 1,
                headers[col]
            )));
        }
        let parsed: Vec<Option<f64>> = cells.iter().map(|c| parse_cell(c)).collect();
        if parsed.iter().all(Option::is_some) {
            features.push(parsed.into_iter().map(Option::unwrap).collect());
            continue;
        }
        if !config.one_hot {
            let bad = parsed.iter().position(Option::is_none).unwrap();
            return Err(Error::ingest(format!(
                "row {}, column `{}`: non-numeric value `{}`",
                bad + 1,
                headers[col],
                cells[bad]
            )));
        }
        let mut categories: Vec<String> = Vec::new();
        let mut codes = Vec::with_capacity(n);
        for cell in &cells {
            let val = cell.trim();
            let code = match categories.iter().position(|c| c == val) {
                Some(c) => c,
                None => {
                    categories.push(val.to_string());
                    categories.len() - 1
                }
            };
            codes.push(code);
        }
        for cat in 0..categories.len() {
            features.push(
                codes
                    .iter()
                    .map(|&c| if c == cat { 1.0 } else { 0.0 })
                    .collect(),
            );
        }
    }

    if config.standardize {
        for column in &mut features {
            let mean = column.iter().sum::<f64>() / n as f64;
            let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            for v in column.iter_mut() {
                *v -= mean;
                if std > 0.0 {
                    *v /= std;
                }
            }
        }
    }

    let dim = features.len();
    let mut points = Vec::with_capacity(n * dim);
    for row in 0..n {
        for column in &features {
            points.push(column[row]);
        }
    }
    GroupedDataset::from_labels(points, dim, &group_labels)
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn write_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn groups_densify_in_first_appearance_order() {
        let f = write_file("x,y,label\n1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n");
        let ds = load_csv(f.path(), &IngestConfig::new("label")).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.m(), 2);
        assert_eq!(ds.groups(), &[0, 1, 0]);
        assert_eq!(ds.group_size(0), 2);
        assert_eq!(ds.group_size(1), 1);
        assert_eq!(ds.point(2), &[5.0, 6.0]);
    }

    #[test]
    fn standardization_centers_and_scales() {
        let f = write_file("x,g\n1.0,a\n2.0,a\n3.0,b\n4.0,b\n");
        let cfg = IngestConfig::new("g").with_standardize(true);
        let ds = load_csv(f.path(), &cfg).unwrap();
        let values: Vec<f64> = (0..4).map(|i| ds.point(i)[0]).collect();
        let mean: f64 = values.iter().sum::<f64>() / 4.0;
        let var: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-9);
        assert!((var.sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_variance_feature_is_centered_only() {
        let f = write_file("x,y,g\n2.0,1.0,a\n2.0,2.0,b\n");
        let cfg = IngestConfig::new("g").with_standardize(true);
        let ds = load_csv(f.path(), &cfg).unwrap();
        assert_eq!(ds.point(0)[0], 0.0);
        assert_eq!(ds.point(1)[0], 0.0);
    }

    #[test]
    fn categorical_features_one_hot_encode() {
        let f = write_file("color,size,g\nred,1.0,a\nblue,2.0,a\nred,3.0,b\n");
        let ds = load_csv(f.path(), &IngestConfig::new("g")).unwrap();
        // color expands to [red, blue]; size stays numeric.
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.point(0), &[1.0, 0.0, 1.0]);
        assert_eq!(ds.point(1), &[0.0, 1.0, 2.0]);
        assert_eq!(ds.point(2), &[1.0, 0.0, 3.0]);
    }

    #[test]
    fn non_numeric_cell_errors_without_one_hot() {
        let f = write_file("x,g\n1.0,a\noops,b\n");
        let mut cfg = IngestConfig::new("g");
        cfg.one_hot = false;
        let err = load_csv(f.path(), &cfg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("`x`"), "{msg}");
    }

    #[test]
    fn missing_group_column_is_reported() {
        let f = write_file("x,y\n1.0,2.0\n");
        let err = load_csv(f.path(), &IngestConfig::new("label")).unwrap_err();
        assert!(err.to_string().contains("label"));
    }

    #[test]
    fn empty_data_is_rejected() {
        let f = write_file("x,g\n");
        assert!(load_csv(f.path(), &IngestConfig::new("g")).is_err());
    }

    #[test]
    fn missing_cell_is_an_error() {
        let f = write_file("x,y,g\n1.0,,a\n");
        let err = load_csv(f.path(), &IngestConfig::new("g")).unwrap_err();
        assert!(err.to_string().contains("missing value"));
    }

    #[test]
    fn row_permutation_permutes_points_identically() {
        let base = "x,g\n1.0,a\n2.0,b\n3.0,a\n";
        let permuted = "x,g\n3.0,a\n1.0,a\n2.0,b\n";
        let d1 = load_csv(write_file(base).path(), &IngestConfig::new("g")).unwrap();
        let d2 = load_csv(write_file(permuted).path(), &IngestConfig::new("g")).unwrap();
        // The induced partition by value is unchanged.
        let part = |d: &GroupedDataset<f64>| {
            let mut by_group: Vec<Vec<i64>> = vec![Vec::new(); d.m()];
            for i in 0..d.n() {
                by_group[d.group_of(i)].push((d.point(i)[0] * 10.0) as i64);
            }
            for g in &mut by_group {
                g.sort_unstable();
            }
            by_group.sort();
            by_group
        };
        assert_eq!(part(&d1), part(&d2));
    }
}
