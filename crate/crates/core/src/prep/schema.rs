//! Dataset structure file (`<name>.json`).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::PrepError;

/// Role of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldType {
    Feature = 1,
    RegressionValue = 2,
    Class = 3,
    ClassOneHot = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    None = 1,
    MinMax = 2,
}

impl FieldType {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(FieldType::Feature),
            2 => Some(FieldType::RegressionValue),
            3 => Some(FieldType::Class),
            4 => Some(FieldType::ClassOneHot),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn is_target(self) -> bool {
        !matches!(self, FieldType::Feature)
    }
}

impl Normalization {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Normalization::None),
            2 => Some(Normalization::MinMax),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }
}

// The structure file stores menu codes as strings ("1"); integers are accepted on read.
macro_rules! code_serde {
    ($ty:ty, $what:literal) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.code().to_string())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct CodeVisitor;
                impl Visitor<'_> for CodeVisitor {
                    type Value = $ty;
                    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                        write!(f, "a {} code", $what)
                    }
                    fn visit_u64<E: de::Error>(self, v: u64) -> Result<$ty, E> {
                        u8::try_from(v)
                            .ok()
                            .and_then(<$ty>::from_code)
                            .ok_or_else(|| E::custom(format!("invalid {} code {v}", $what)))
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> Result<$ty, E> {
                        v.trim()
                            .parse::<u64>()
                            .map_err(|_| E::custom(format!("invalid {} code {v:?}", $what)))
                            .and_then(|c| self.visit_u64(c))
                    }
                }
                d.deserialize_any(CodeVisitor)
            }
        }
    };
}

code_serde!(FieldType, "field type");
code_serde!(Normalization, "normalization");

/// Per-column description of a dataset, one list entry per column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    pub dataset_name: String,
    pub dataset_description: String,
    pub feat_no: Vec<usize>,
    pub feat_label: Vec<String>,
    pub feat_type: Vec<FieldType>,
    pub feat_normalization: Vec<Normalization>,
}

impl DatasetSchema {
    pub fn len(&self) -> usize {
        self.feat_no.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feat_no.is_empty()
    }

    pub fn validate(&self) -> Result<(), PrepError> {
        let n = self.feat_no.len();
        if n == 0 {
            return Err(PrepError::InvalidSchema("dataset has no columns".into()));
        }
        if self.feat_label.len() != n || self.feat_type.len() != n || self.feat_normalization.len() != n {
            return Err(PrepError::InvalidSchema(format!(
                "list lengths differ: feat_no {}, feat_label {}, feat_type {}, feat_normalization {}",
                n,
                self.feat_label.len(),
                self.feat_type.len(),
                self.feat_normalization.len()
            )));
        }
        if self.feat_no.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(PrepError::InvalidSchema(
                "feat_no must be 0, 1, 2, ... in column order".into(),
            ));
        }
        let regressions = self.count(|t| t == FieldType::RegressionValue);
        let classes = self.count(|t| matches!(t, FieldType::Class | FieldType::ClassOneHot));
        if regressions > 1 {
            return Err(PrepError::InvalidSchema("more than one regression value field".into()));
        }
        if classes > 1 {
            return Err(PrepError::InvalidSchema("more than one class field".into()));
        }
        Ok(())
    }

    fn count(&self, pred: impl Fn(FieldType) -> bool) -> usize {
        self.feat_type.iter().filter(|&&t| pred(t)).count()
    }

    pub fn target_type(&self) -> Option<FieldType> {
        self.feat_type.iter().copied().find(|t| t.is_target())
    }

    pub fn feature_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.feat_type
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_target())
            .map(|(i, _)| i)
    }

    /// JSON in the four-space-indented layout of the structure files.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let fmt = serde_json::ser::PrettyFormatter::with_indent(b"    ");
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        self.serialize(&mut ser).expect("schema serializes");
        String::from_utf8(buf).expect("utf-8 json")
    }

    pub fn from_json(text: &str) -> Result<Self, PrepError> {
        let schema: DatasetSchema = serde_json::from_str(text)
            .map_err(|e| PrepError::InvalidSchema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn path_in(dir: &Path, dataset_name: &str) -> PathBuf {
        dir.join(format!("{dataset_name}.json"))
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf, PrepError> {
        self.validate()?;
        let path = Self::path_in(dir, &self.dataset_name);
        fs::write(&path, self.to_json() + "\n").map_err(|e| PrepError::io(&path, e))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, PrepError> {
        let text = fs::read_to_string(path).map_err(|e| PrepError::io(path, e))?;
        Self::from_json(&text)
    }
}
