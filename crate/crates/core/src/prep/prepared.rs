//! Applying a schema to raw rows, and the `<name>_preprocessed.csv` file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::schema::{DatasetSchema, FieldType, Normalization};
use super::PrepError;

/// Raw cell tokens that mean "missing".
pub fn is_missing_token(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("nan")
}

/// Reads a headerless raw CSV file into string cells.
pub fn read_raw_csv(path: &Path) -> Result<Vec<Vec<String>>, PrepError> {
    let file = fs::File::open(path).map_err(|_| PrepError::MissingFile(path.to_path_buf()))?;
    parse_raw_csv(file)
}

pub fn parse_raw_csv<R: std::io::Read>(source: R) -> Result<Vec<Vec<String>>, PrepError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| PrepError::Csv(e.to_string()))?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(|c| c.trim().to_string()).collect::<Vec<_>>());
    }
    Ok(rows)
}

/// Min/max recorded for a MinMax-normalized column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

impl MinMax {
    pub fn fit(values: impl Iterator<Item = f64>) -> Option<MinMax> {
        let mut mm: Option<MinMax> = None;
        for v in values.filter(|v| !v.is_nan()) {
            mm = Some(match mm {
                None => MinMax { min: v, max: v },
                Some(m) => MinMax {
                    min: m.min.min(v),
                    max: m.max.max(v),
                },
            });
        }
        mm
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn invert(&self, y: f64) -> f64 {
        y * (self.max - self.min) + self.min
    }
}

/// Supervised target of a prepared dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    None,
    Classes {
        name: String,
        labels: Vec<String>,
        classes: Vec<String>,
    },
    OneHot {
        name: String,
        classes: Vec<String>,
        indicators: Vec<Vec<f64>>,
    },
    Regression {
        name: String,
        values: Vec<f64>,
    },
}

impl Target {
    pub fn is_none(&self) -> bool {
        matches!(self, Target::None)
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Target::Classes { .. } | Target::OneHot { .. })
    }

    /// Per-row class index and the class names, for either class encoding.
    pub fn class_indices(&self) -> Option<(Vec<usize>, Vec<String>)> {
        match self {
            Target::Classes { labels, classes, .. } => Some((
                labels
                    .iter()
                    .map(|l| classes.binary_search(l).expect("label in class list"))
                    .collect(),
                classes.clone(),
            )),
            Target::OneHot {
                classes, indicators, ..
            } => Some((
                indicators
                    .iter()
                    .map(|row| row.iter().position(|&v| v == 1.0).unwrap_or(0))
                    .collect(),
                classes.clone(),
            )),
            _ => None,
        }
    }

    fn select(&self, idx: &[usize]) -> Target {
        match self {
            Target::None => Target::None,
            Target::Classes {
                name,
                labels,
                classes,
            } => Target::Classes {
                name: name.clone(),
                labels: idx.iter().map(|&i| labels[i].clone()).collect(),
                classes: classes.clone(),
            },
            Target::OneHot {
                name,
                classes,
                indicators,
            } => Target::OneHot {
                name: name.clone(),
                classes: classes.clone(),
                indicators: idx.iter().map(|&i| indicators[i].clone()).collect(),
            },
            Target::Regression { name, values } => Target::Regression {
                name: name.clone(),
                values: idx.iter().map(|&i| values[i]).collect(),
            },
        }
    }

    fn column_names(&self) -> Vec<String> {
        match self {
            Target::None => vec![],
            Target::Classes { name, .. } | Target::Regression { name, .. } => vec![name.clone()],
            Target::OneHot { name, classes, .. } => {
                classes.iter().map(|c| format!("{name}_{c}")).collect()
            }
        }
    }
}

/// Feature matrix plus target, with the scaling needed to transform new vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedDataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub target: Target,
    /// One entry per feature column; `Some` where MinMax was applied.
    pub feature_scaling: Vec<Option<MinMax>>,
    pub target_scaling: Option<MinMax>,
}

impl PreparedDataset {
    pub fn n_rows(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Output columns in file order: features first, then target columns.
    pub fn column_names(&self) -> Vec<String> {
        let mut cols = self.feature_names.clone();
        cols.extend(self.target.column_names());
        cols
    }

    pub fn select(&self, idx: &[usize]) -> PreparedDataset {
        PreparedDataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            target: self.target.select(idx),
            feature_scaling: self.feature_scaling.clone(),
            target_scaling: self.target_scaling,
        }
    }

    /// Applies the stored feature scaling to a raw input vector.
    pub fn transform_input(&self, raw: &[f64]) -> Result<Vec<f64>, PrepError> {
        if raw.len() != self.n_features() {
            return Err(PrepError::DimensionMismatch {
                expected: self.n_features(),
                actual: raw.len(),
            });
        }
        Ok(raw
            .iter()
            .zip(&self.feature_scaling)
            .map(|(&x, s)| s.map_or(x, |m| m.apply(x)))
            .collect())
    }

    pub fn preprocessed_path(dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}_preprocessed.csv"))
    }

    fn layout_path(dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}_preprocessed.layout.json"))
    }

    /// Writes `<name>_preprocessed.csv` plus a layout sidecar with the scaling parameters.
    pub fn save(&self, dir: &Path) -> Result<PathBuf, PrepError> {
        let path = Self::preprocessed_path(dir, &self.name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| PrepError::Csv(e.to_string()))?;
        let csv_err = |e: csv::Error| PrepError::Csv(e.to_string());
        w.write_record(self.column_names()).map_err(csv_err)?;
        for i in 0..self.n_rows() {
            let mut rec: Vec<String> = self.features[i].iter().map(|v| fmt_num(*v)).collect();
            match &self.target {
                Target::None => {}
                Target::Classes { labels, .. } => rec.push(labels[i].clone()),
                Target::OneHot { indicators, .. } => {
                    rec.extend(indicators[i].iter().map(|v| fmt_num(*v)))
                }
                Target::Regression { values, .. } => rec.push(fmt_num(values[i])),
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| PrepError::io(&path, e))?;

        let layout = Layout {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            feature_scaling: self.feature_scaling.clone(),
            target_scaling: self.target_scaling,
            target: match &self.target {
                Target::None => TargetLayout::None,
                Target::Classes { name, classes, .. } => TargetLayout::Classes {
                    name: name.clone(),
                    classes: classes.clone(),
                },
                Target::OneHot { name, classes, .. } => TargetLayout::OneHot {
                    name: name.clone(),
                    classes: classes.clone(),
                },
                Target::Regression { name, .. } => TargetLayout::Regression { name: name.clone() },
            },
        };
        let lpath = Self::layout_path(dir, &self.name);
        fs::write(&lpath, serde_json::to_string_pretty(&layout).expect("layout serializes"))
            .map_err(|e| PrepError::io(&lpath, e))?;
        Ok(path)
    }

    pub fn exists(dir: &Path, name: &str) -> bool {
        Self::preprocessed_path(dir, name).is_file() && Self::layout_path(dir, name).is_file()
    }

    pub fn load(dir: &Path, name: &str) -> Result<PreparedDataset, PrepError> {
        let lpath = Self::layout_path(dir, name);
        let text = fs::read_to_string(&lpath).map_err(|e| PrepError::io(&lpath, e))?;
        let layout: Layout =
            serde_json::from_str(&text).map_err(|e| PrepError::Csv(e.to_string()))?;
        let path = Self::preprocessed_path(dir, name);
        let mut reader = csv::Reader::from_path(&path).map_err(|e| PrepError::Csv(e.to_string()))?;
        let n_feat = layout.feature_names.len();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut indicators = Vec::new();
        let mut values = Vec::new();
        for (r, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| PrepError::Csv(e.to_string()))?;
            let num = |c: usize| -> Result<f64, PrepError> {
                parse_num(&rec[c]).ok_or_else(|| PrepError::NonNumeric {
                    row: r,
                    column: c,
                    value: rec[c].to_string(),
                })
            };
            features.push((0..n_feat).map(num).collect::<Result<Vec<_>, _>>()?);
            match &layout.target {
                TargetLayout::None => {}
                TargetLayout::Classes { .. } => labels.push(rec[n_feat].to_string()),
                TargetLayout::OneHot { classes, .. } => indicators.push(
                    (n_feat..n_feat + classes.len())
                        .map(num)
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                TargetLayout::Regression { .. } => values.push(num(n_feat)?),
            }
        }
        let target = match layout.target {
            TargetLayout::None => Target::None,
            TargetLayout::Classes { name, classes } => Target::Classes {
                name,
                labels,
                classes,
            },
            TargetLayout::OneHot { name, classes } => Target::OneHot {
                name,
                classes,
                indicators,
            },
            TargetLayout::Regression { name } => Target::Regression { name, values },
        };
        Ok(PreparedDataset {
            name: layout.name,
            feature_names: layout.feature_names,
            features,
            target,
            feature_scaling: layout.feature_scaling,
            target_scaling: layout.target_scaling,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Layout {
    name: String,
    feature_names: Vec<String>,
    feature_scaling: Vec<Option<MinMax>>,
    target_scaling: Option<MinMax>,
    target: TargetLayout,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TargetLayout {
    None,
    Classes { name: String, classes: Vec<String> },
    OneHot { name: String, classes: Vec<String> },
    Regression { name: String },
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

fn parse_num(cell: &str) -> Option<f64> {
    if is_missing_token(cell) {
        Some(f64::NAN)
    } else {
        cell.trim().parse().ok()
    }
}

/// Converts raw rows into a [`PreparedDataset`] following `schema`.
///
/// MinMax maps `x` to `(x - min) / (max - min)` with min/max fitted on these rows.
/// One-hot columns get one indicator per distinct label, labels sorted
/// lexicographically. Normalization codes on class columns are ignored.
pub fn apply_schema(raw: &[Vec<String>], schema: &DatasetSchema) -> Result<PreparedDataset, PrepError> {
    schema.validate()?;
    let n_cols = schema.len();
    for (r, row) in raw.iter().enumerate() {
        if row.len() != n_cols {
            return Err(PrepError::ColumnCount {
                row: r,
                expected: n_cols,
                actual: row.len(),
            });
        }
    }

    let numeric_column = |c: usize| -> Result<Vec<f64>, PrepError> {
        raw.iter()
            .enumerate()
            .map(|(r, row)| {
                parse_num(&row[c]).ok_or_else(|| PrepError::NonNumeric {
                    row: r,
                    column: c,
                    value: row[c].clone(),
                })
            })
            .collect()
    };
    let scale = |c: usize, col: &mut [f64]| -> Result<Option<MinMax>, PrepError> {
        if schema.feat_normalization[c] != Normalization::MinMax {
            return Ok(None);
        }
        let Some(mm) = MinMax::fit(col.iter().copied()) else {
            return Err(PrepError::DegenerateRange {
                column: schema.feat_label[c].clone(),
            });
        };
        if mm.max == mm.min {
            return Err(PrepError::DegenerateRange {
                column: schema.feat_label[c].clone(),
            });
        }
        for v in col.iter_mut() {
            if !v.is_nan() {
                *v = mm.apply(*v);
            }
        }
        Ok(Some(mm))
    };

    let mut feature_names = Vec::new();
    let mut feature_cols: Vec<Vec<f64>> = Vec::new();
    let mut feature_scaling = Vec::new();
    let mut target = Target::None;
    let mut target_scaling = None;

    for c in 0..n_cols {
        let label = schema.feat_label[c].clone();
        match schema.feat_type[c] {
            FieldType::Feature => {
                let mut col = numeric_column(c)?;
                feature_scaling.push(scale(c, &mut col)?);
                feature_cols.push(col);
                feature_names.push(label);
            }
            FieldType::RegressionValue => {
                let mut values = numeric_column(c)?;
                target_scaling = scale(c, &mut values)?;
                target = Target::Regression { name: label, values };
            }
            FieldType::Class | FieldType::ClassOneHot => {
                let labels: Vec<String> = raw
                    .iter()
                    .enumerate()
                    .map(|(r, row)| {
                        if is_missing_token(&row[c]) {
                            Err(PrepError::MissingLabel { row: r })
                        } else {
                            Ok(row[c].clone())
                        }
                    })
                    .collect::<Result<_, _>>()?;
                let classes: Vec<String> = labels
                    .iter()
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                target = if schema.feat_type[c] == FieldType::Class {
                    Target::Classes {
                        name: label,
                        labels,
                        classes,
                    }
                } else {
                    let indicators = labels
                        .iter()
                        .map(|l| classes.iter().map(|k| f64::from(u8::from(k == l))).collect())
                        .collect();
                    Target::OneHot {
                        name: label,
                        classes,
                        indicators,
                    }
                };
            }
        }
    }

    let features = (0..raw.len())
        .map(|r| feature_cols.iter().map(|col| col[r]).collect())
        .collect();
    Ok(PreparedDataset {
        name: schema.dataset_name.clone(),
        feature_names,
        features,
        target,
        feature_scaling,
        target_scaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema(types: &[FieldType], norms: &[Normalization]) -> DatasetSchema {
        DatasetSchema {
            dataset_name: "t".into(),
            dataset_description: String::new(),
            feat_no: (0..types.len()).collect(),
            feat_label: (0..types.len()).map(|i| format!("c{i}")).collect(),
            feat_type: types.to_vec(),
            feat_normalization: norms.to_vec(),
        }
    }

    fn rows(cells: &[&[&str]]) -> Vec<Vec<String>> {
        cells
            .iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect())
            .collect()
    }

    #[test]
    fn minmax_column() {
        let s = schema(&[FieldType::Feature], &[Normalization::MinMax]);
        let p = apply_schema(&rows(&[&["2"], &["4"], &["6"]]), &s).unwrap();
        assert_eq!(p.features, vec![vec![0.0], vec![0.5], vec![1.0]]);
        assert_eq!(p.feature_scaling, vec![Some(MinMax { min: 2.0, max: 6.0 })]);
    }

    #[test]
    fn one_hot_is_lexicographic() {
        let s = schema(
            &[FieldType::Feature, FieldType::ClassOneHot],
            &[Normalization::None, Normalization::None],
        );
        let p = apply_schema(
            &rows(&[&["1", "setosa"], &["2", "versicolor"], &["3", "setosa"]]),
            &s,
        )
        .unwrap();
        match &p.target {
            Target::OneHot {
                classes,
                indicators,
                ..
            } => {
                assert_eq!(classes, &["setosa", "versicolor"]);
                assert_eq!(indicators, &vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(p.column_names(), ["c0", "c1_setosa", "c1_versicolor"]);
    }

    #[test]
    fn constant_minmax_column_is_an_error() {
        let s = schema(&[FieldType::Feature], &[Normalization::MinMax]);
        let err = apply_schema(&rows(&[&["3"], &["3"]]), &s).unwrap_err();
        assert!(err.to_string().contains("degenerate normalization range"), "{err}");
    }

    #[test]
    fn non_numeric_feature_reports_position() {
        let s = schema(&[FieldType::Feature, FieldType::Feature], &[Normalization::None; 2]);
        let err = apply_schema(&rows(&[&["1", "2"], &["3", "abc"]]), &s).unwrap_err();
        assert_eq!(
            err,
            PrepError::NonNumeric {
                row: 1,
                column: 1,
                value: "abc".into()
            }
        );
    }

    #[test]
    fn missing_tokens_become_nan() {
        let s = schema(&[FieldType::Feature, FieldType::Feature], &[Normalization::None; 2]);
        let p = apply_schema(&rows(&[&["1", ""], &["NaN", "2"], &["nan", "3"]]), &s).unwrap();
        assert!(p.features[0][1].is_nan());
        assert!(p.features[1][0].is_nan());
        assert!(p.features[2][0].is_nan());
    }

    #[test]
    fn minmax_idempotent_on_unit_range() {
        let s = schema(&[FieldType::Feature], &[Normalization::MinMax]);
        let once = apply_schema(&rows(&[&["0"], &["0.25"], &["1"]]), &s).unwrap();
        let again_raw: Vec<Vec<String>> = once.features.iter().map(|r| vec![r[0].to_string()]).collect();
        let twice = apply_schema(&again_raw, &s).unwrap();
        assert_eq!(once.features, twice.features);
    }

    #[test]
    fn transform_input_checks_length() {
        let s = schema(&[FieldType::Feature, FieldType::Feature], &[Normalization::MinMax, Normalization::None]);
        let p = apply_schema(&rows(&[&["0", "5"], &["10", "6"]]), &s).unwrap();
        assert_eq!(p.transform_input(&[5.0, 7.0]).unwrap(), vec![0.5, 7.0]);
        assert_eq!(
            p.transform_input(&[1.0]).unwrap_err(),
            PrepError::DimensionMismatch { expected: 2, actual: 1 }
        );
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = schema(
            &[FieldType::Feature, FieldType::Feature, FieldType::Class],
            &[Normalization::MinMax, Normalization::None, Normalization::None],
        );
        let p = apply_schema(&rows(&[&["1", "2.5", "a"], &["3", "", "b"], &["2", "1", "a"]]), &s).unwrap();
        p.save(dir.path()).unwrap();
        let back = PreparedDataset::load(dir.path(), "t").unwrap();
        assert_eq!(back.feature_names, p.feature_names);
        assert_eq!(back.target, p.target);
        assert_eq!(back.feature_scaling, p.feature_scaling);
        assert!(back.features[1][1].is_nan());
        assert_eq!(back.features[0], p.features[0]);
    }
}
