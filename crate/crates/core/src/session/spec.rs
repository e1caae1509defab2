//! Which keys each problem type needs, loaded from a TOML table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::interp::SlotRegistry;

pub const DEFAULT_ALGORITHMS: &str = include_str!("../../data/algorithms.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "CLUSTERING")]
    Clustering,
    #[serde(rename = "DIMENSIONALITY")]
    Dimensionality,
    #[serde(rename = "CLASSIFICATION")]
    Classification,
    #[serde(rename = "PREDICTION")]
    Prediction,
    #[serde(rename = "FEAT_IMP")]
    FeatImp,
}

impl Problem {
    pub const ALL: [Problem; 5] = [
        Problem::Clustering,
        Problem::Dimensionality,
        Problem::Classification,
        Problem::Prediction,
        Problem::FeatImp,
    ];

    pub fn key_value(self) -> &'static str {
        match self {
            Problem::Clustering => "CLUSTERING",
            Problem::Dimensionality => "DIMENSIONALITY",
            Problem::Classification => "CLASSIFICATION",
            Problem::Prediction => "PREDICTION",
            Problem::FeatImp => "FEAT_IMP",
        }
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_uppercase();
        Problem::ALL
            .into_iter()
            .find(|p| p.key_value() == s)
            .ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key_value())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionalKey {
    pub key: String,
    #[serde(default)]
    pub default: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub problem: Problem,
    pub required_keys: Vec<String>,
    #[serde(default)]
    pub optional_keys: Vec<OptionalKey>,
}

impl AlgorithmSpec {
    pub fn optional_pairs(&self) -> Vec<(String, Option<String>)> {
        self.optional_keys.iter().map(|o| (o.key.clone(), o.default.clone())).collect()
    }

    fn validate(&self) -> Result<(), String> {
        if self.required_keys.first().map(String::as_str) != Some("PROBLEM")
            || self.required_keys.get(1).map(String::as_str) != Some("DATASET")
        {
            return Err(format!("{}: required keys must start with PROBLEM, DATASET", self.problem));
        }
        let needs = match self.problem {
            Problem::Clustering => Some("NB_CLST"),
            Problem::Dimensionality => Some("NB_CMPS"),
            _ => None,
        };
        if let Some(k) = needs {
            if !self.required_keys.iter().any(|r| r == k) {
                return Err(format!("{} requires {k}", self.problem));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmTable {
    #[serde(rename = "algorithm")]
    specs: Vec<AlgorithmSpec>,
}

impl AlgorithmTable {
    pub fn from_toml(text: &str) -> Result<AlgorithmTable, SessionError> {
        let table: AlgorithmTable = toml::from_str(text).map_err(|e| SessionError::Config(e.to_string()))?;
        for s in &table.specs {
            s.validate().map_err(SessionError::Config)?;
        }
        Ok(table)
    }

    pub fn builtin() -> AlgorithmTable {
        Self::from_toml(DEFAULT_ALGORITHMS).expect("bundled algorithm table is valid")
    }

    pub fn get(&self, problem: Problem) -> Option<&AlgorithmSpec> {
        self.specs.iter().find(|s| s.problem == problem)
    }

    pub fn specs(&self) -> &[AlgorithmSpec] {
        &self.specs
    }

    /// Every key referenced by the table must have at least one registry rule.
    pub fn check_registry(&self, registry: &SlotRegistry) -> Result<(), SessionError> {
        for s in &self.specs {
            for k in s.required_keys.iter().chain(s.optional_keys.iter().map(|o| &o.key)) {
                if !registry.contains_key(k) {
                    return Err(SessionError::Config(format!("key {k} used by {} has no registry rule", s.problem)));
                }
            }
        }
        Ok(())
    }
}
