//! Dataset resolution chain: preprocessed file, else structure file, else
//! the elicitation dialogue. Also the optional outlier/imputation/augmentation pass.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::elicit::elicit_schema;
use super::impute::impute_knn;
use super::outliers::detect_outliers_iqr;
use super::prepared::{apply_schema, read_raw_csv, PreparedDataset, Target};
use super::quality::xgewfi_score;
use super::schema::DatasetSchema;
use super::smote::augment_smote;
use super::PrepError;
use crate::dialogue::Dialogue;
use crate::engines::{rf_importance, Task};

pub const IMPUTE_NEIGHBORS: usize = 5;
pub const SMOTE_NEIGHBORS: usize = 5;
pub const SMOTE_SEED: u64 = 1;

pub fn raw_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.csv"))
}

/// Where a loaded dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Preprocessed,
    FromSchema,
    Elicited,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QualityReport {
    /// (feature name, row indices flagged by the IQR fences)
    pub outliers: Vec<(String, Vec<usize>)>,
    pub imputed_cells: usize,
    pub synthetic_rows: usize,
    pub imputation_error: Option<f64>,
    pub augmentation_error: Option<f64>,
}

/// Opens `name` from `dir`, preprocessing and asking questions only as needed.
pub fn open_dataset(
    dir: &Path,
    name: &str,
    dialogue: &mut dyn Dialogue,
) -> Result<(DatasetSchema, PreparedDataset, Provenance), PrepError> {
    let schema_path = DatasetSchema::path_in(dir, name);
    if PreparedDataset::exists(dir, name) && schema_path.is_file() {
        let schema = DatasetSchema::load(&schema_path)?;
        return Ok((schema, PreparedDataset::load(dir, name)?, Provenance::Preprocessed));
    }
    if schema_path.is_file() {
        let schema = DatasetSchema::load(&schema_path)?;
        let prepared = convert(dir, &schema, dialogue)?;
        return Ok((schema, prepared, Provenance::FromSchema));
    }
    let (schema, prepared) = preprocess(dir, name, dialogue)?;
    Ok((schema, prepared, Provenance::Elicited))
}

/// Runs the full elicitation for `name`, writes both files, then offers
/// imputation and augmentation.
pub fn preprocess(
    dir: &Path,
    name: &str,
    dialogue: &mut dyn Dialogue,
) -> Result<(DatasetSchema, PreparedDataset), PrepError> {
    let raw = raw_path(dir, name);
    if !raw.is_file() {
        return Err(PrepError::MissingFile(raw));
    }
    let schema = elicit_schema(name, &raw, dialogue)?;
    dialogue.say("Saving dataset configuration...");
    let path = schema.save(dir)?;
    dialogue.say(&format!("The configuration is saved to {}", file_name(&path)));
    let mut prepared = convert(dir, &schema, dialogue)?;
    let report = quality_pass(&mut prepared, dialogue)?;
    if report.imputed_cells > 0 || report.synthetic_rows > 0 {
        prepared.save(dir)?;
    }
    Ok((schema, prepared))
}

fn convert(
    dir: &Path,
    schema: &DatasetSchema,
    dialogue: &mut dyn Dialogue,
) -> Result<PreparedDataset, PrepError> {
    let raw = read_raw_csv(&raw_path(dir, &schema.dataset_name))?;
    dialogue.say("Processing to the file conversion...");
    let prepared = apply_schema(&raw, schema)?;
    let path = prepared.save(dir)?;
    dialogue.say(&format!("The configuration is saved to {}", file_name(&path)));
    Ok(prepared)
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn yes(answer: Option<String>) -> Result<bool, PrepError> {
    let a = answer.ok_or(PrepError::DialogueClosed)?;
    Ok(matches!(a.trim().to_lowercase().as_str(), "y" | "yes"))
}

fn importances(data: &PreparedDataset) -> Vec<f64> {
    let d = data.n_features();
    let task = Task::detect(&data.target);
    task.filter(|_| d >= 2)
        .and_then(|t| rf_importance(data, t).ok())
        .map(|r| r.importances)
        .unwrap_or_else(|| vec![1.0 / d as f64; d])
}

/// Reports IQR outliers, then asks whether to impute missing cells and
/// whether to add SMOTE rows. Generated data is scored against the original.
pub fn quality_pass(
    prepared: &mut PreparedDataset,
    dialogue: &mut dyn Dialogue,
) -> Result<QualityReport, PrepError> {
    let mut report = QualityReport::default();
    for (c, name) in prepared.feature_names.iter().enumerate() {
        let col: Vec<f64> = prepared.features.iter().map(|r| r[c]).collect();
        if let Ok(rows) = detect_outliers_iqr(&col) {
            if !rows.is_empty() {
                report.outliers.push((name.clone(), rows.into_iter().collect()));
            }
        }
    }
    if report.outliers.is_empty() {
        dialogue.say("No outliers were found by the interquartile range rule.");
    } else {
        for (name, rows) in &report.outliers {
            dialogue.say(&format!("Field {name}: {} outlier(s) at rows {rows:?}", rows.len()));
        }
    }

    let missing = prepared.features.iter().flatten().filter(|v| v.is_nan()).count();
    if missing > 0 && yes(dialogue.ask(&format!(
        "{missing} value(s) are missing. Do you want to impute the missing data (y/n)?"
    )))? {
        let incomplete: Vec<usize> = (0..prepared.n_rows())
            .filter(|&r| prepared.features[r].iter().any(|v| v.is_nan()))
            .collect();
        let complete: Vec<Vec<f64>> = prepared
            .features
            .iter()
            .filter(|r| !r.iter().any(|v| v.is_nan()))
            .cloned()
            .collect();
        prepared.features = impute_knn(&prepared.features, IMPUTE_NEIGHBORS)?;
        report.imputed_cells = missing;
        let generated: Vec<Vec<f64>> = incomplete.iter().map(|&r| prepared.features[r].clone()).collect();
        if !complete.is_empty() {
            let score = xgewfi_score(&complete, &generated, &importances(prepared))?;
            dialogue.say(&format!("Imputed {missing} value(s); weighted generation error: {score:.4}"));
            report.imputation_error = Some(score);
        }
    }

    if let Some((indices, classes)) = prepared.target.class_indices() {
        if yes(dialogue.ask("Do you want to augment the data (y/n)?"))? {
            let count = loop {
                let a = dialogue.ask("How many rows should be generated?").ok_or(PrepError::DialogueClosed)?;
                match a.trim().parse::<usize>() {
                    Ok(n) if n > 0 => break n,
                    _ => dialogue.say("Please answer with a positive integer."),
                }
            };
            let labels: Vec<String> = indices.iter().map(|&i| classes[i].clone()).collect();
            match augment_smote(&prepared.features, &labels, SMOTE_NEIGHBORS, count, SMOTE_SEED) {
                Ok(rows) => {
                    let original = prepared.features.clone();
                    let generated: Vec<Vec<f64>> = rows.iter().map(|r| r.values.clone()).collect();
                    for row in rows {
                        prepared.features.push(row.values);
                        match &mut prepared.target {
                            Target::Classes { labels, .. } => labels.push(row.label),
                            Target::OneHot { classes, indicators, .. } => indicators.push(
                                classes.iter().map(|c| f64::from(u8::from(*c == row.label))).collect(),
                            ),
                            _ => unreachable!("class target"),
                        }
                    }
                    let score = xgewfi_score(&original, &generated, &importances(prepared))?;
                    dialogue.say(&format!(
                        "Generated {} row(s); weighted generation error: {score:.4}",
                        generated.len()
                    ));
                    report.synthetic_rows = generated.len();
                    report.augmentation_error = Some(score);
                }
                Err(e) => dialogue.say(&format!("Augmentation skipped: {e}")),
            }
        }
    }
    Ok(report)
}
