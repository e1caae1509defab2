//! Chatbot dialogue that defines a dataset's structure.

use std::path::Path;

use super::prepared::read_raw_csv;
use super::schema::{DatasetSchema, FieldType, Normalization};
use super::PrepError;
use crate::dialogue::Dialogue;

pub const TYPE_MENU: &str = "(1. Feature 2. Predicted value 3. Class  4. Class (to be converted ONE-HOT for neural network)";
pub const NORMALIZATION_MENU: &str = "(1. None 2. MinMax)";

fn ask(dialogue: &mut dyn Dialogue, question: &str) -> Result<String, PrepError> {
    dialogue
        .ask(question)
        .map(|a| a.trim().to_string())
        .ok_or(PrepError::DialogueClosed)
}

fn ask_menu<T>(
    dialogue: &mut dyn Dialogue,
    question: &str,
    parse: impl Fn(u8) -> Option<T>,
) -> Result<T, PrepError> {
    loop {
        let answer = ask(dialogue, question)?;
        if let Some(v) = answer.parse::<u8>().ok().and_then(&parse) {
            return Ok(v);
        }
        dialogue.say(&format!("`{answer}` is not one of the listed choices."));
    }
}

/// Asks for the description, then label, type and normalization of every
/// column of `raw_path`, showing a sample value from the first row.
pub fn elicit_schema(
    dataset_name: &str,
    raw_path: &Path,
    dialogue: &mut dyn Dialogue,
) -> Result<DatasetSchema, PrepError> {
    let rows = read_raw_csv(raw_path)?;
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_cols == 0 {
        return Err(PrepError::InvalidSchema("dataset has no columns".into()));
    }

    dialogue.say(&format!(
        "Let us preprocess the {dataset_name} dataset. Please, answer the following questions:"
    ));
    let description = ask(
        dialogue,
        &format!("What is the description of the {dataset_name} dataset (ENTER to skip)?"),
    )?;

    let mut schema = DatasetSchema {
        dataset_name: dataset_name.to_string(),
        dataset_description: if description.is_empty() {
            format!("{dataset_name} dataset")
        } else {
            description
        },
        feat_no: Vec::with_capacity(n_cols),
        feat_label: Vec::with_capacity(n_cols),
        feat_type: Vec::with_capacity(n_cols),
        feat_normalization: Vec::with_capacity(n_cols),
    };

    for c in 0..n_cols {
        let sample = &rows[0][c];
        let mut label = ask(
            dialogue,
            &format!("What is the name of the field {c}? (Value example: {sample})"),
        )?;
        if label.is_empty() {
            label = format!("field {c}");
        }
        let kind = loop {
            let kind = ask_menu(
                dialogue,
                &format!("What is the type of field {label}? {TYPE_MENU}"),
                FieldType::from_code,
            )?;
            let clash = match kind {
                FieldType::RegressionValue => schema.feat_type.contains(&FieldType::RegressionValue),
                FieldType::Class | FieldType::ClassOneHot => schema
                    .feat_type
                    .iter()
                    .any(|t| matches!(t, FieldType::Class | FieldType::ClassOneHot)),
                FieldType::Feature => false,
            };
            if !clash {
                break kind;
            }
            dialogue.say("Only one field of that kind is allowed per dataset.");
        };
        let norm = ask_menu(
            dialogue,
            &format!("What is the normalization applied to {label}? {NORMALIZATION_MENU}"),
            Normalization::from_code,
        )?;
        schema.feat_no.push(c);
        schema.feat_label.push(label);
        schema.feat_type.push(kind);
        schema.feat_normalization.push(norm);
    }
    schema.validate()?;
    Ok(schema)
}
