//! The slot registry: the table of keys and the questions used to extract them.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::Serialize;

use super::InterpError;

/// Registry shipped with the crate.
pub const DEFAULT_REGISTRY: &str = include_str!("../../data/parameters.csv");

const HEADER: [&str; 4] = ["Key", "Type", "Return value", "Questions"];

/// How a registry question is answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotKind {
    /// Yes/No question; a yes maps to the rule's return value.
    Boolean,
    /// Open question; the extracted span is the value.
    Span,
}

impl SlotKind {
    pub fn token(self) -> &'static str {
        match self {
            SlotKind::Boolean => "Y/N",
            SlotKind::Span => "Std.",
        }
    }
}

impl FromStr for SlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Y/N" => Ok(SlotKind::Boolean),
            "Std." => Ok(SlotKind::Span),
            other => Err(other.to_string()),
        }
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One registry row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotRule {
    pub key: String,
    pub kind: SlotKind,
    pub return_value: String,
    pub question: String,
}

impl SlotRule {
    /// Builds a rule, checking the kind/return-value pairing.
    pub fn new(
        key: impl Into<String>,
        kind: SlotKind,
        return_value: impl Into<String>,
        question: impl Into<String>,
    ) -> Result<Self, String> {
        let rule = SlotRule {
            key: key.into().trim().to_string(),
            kind,
            return_value: return_value.into().trim().to_string(),
            question: question.into().trim().to_string(),
        };
        if rule.key.is_empty() {
            return Err("empty key".into());
        }
        if rule.question.is_empty() {
            return Err(format!("rule for {} has an empty question", rule.key));
        }
        match (kind, rule.return_value.is_empty()) {
            (SlotKind::Boolean, true) => Err(format!(
                "Y/N rule for {} needs a return value",
                rule.key
            )),
            (SlotKind::Span, false) => Err(format!(
                "Std. rule for {} must not carry a return value",
                rule.key
            )),
            _ => Ok(rule),
        }
    }
}

/// Ordered collection of rules. Questions for a key are tried in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotRegistry {
    rules: Vec<SlotRule>,
}

impl SlotRegistry {
    pub fn from_rules(rules: Vec<SlotRule>) -> Result<Self, InterpError> {
        if rules.is_empty() {
            return Err(InterpError::EmptyRegistry);
        }
        Ok(SlotRegistry { rules })
    }

    /// The registry bundled with the crate.
    pub fn builtin() -> Self {
        load_registry(DEFAULT_REGISTRY.as_bytes()).expect("bundled registry is valid")
    }

    pub fn rules(&self) -> &[SlotRule] {
        &self.rules
    }

    pub fn rules_for<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a SlotRule> + 'a {
        self.rules.iter().filter(move |r| r.key == key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.rules.iter().any(|r| r.key == key)
    }

    pub fn keys(&self) -> BTreeSet<&str> {
        self.rules.iter().map(|r| r.key.as_str()).collect()
    }

    /// First question registered for `key`, used when the user must be asked directly.
    pub fn first_question(&self, key: &str) -> Option<&str> {
        self.rules.iter().find(|r| r.key == key).map(|r| r.question.as_str())
    }

    pub fn push(&mut self, rule: SlotRule) {
        self.rules.push(rule);
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Serializes back to the CSV layout accepted by [`load_registry`].
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER).expect("in-memory write");
        for r in &self.rules {
            w.write_record([r.key.as_str(), r.kind.token(), &r.return_value, &r.question])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

/// Parses a registry CSV (`Key,Type,Return value,Questions`).
pub fn load_registry<R: Read>(source: R) -> Result<SlotRegistry, InterpError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut rules = Vec::new();
    let mut seen_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| InterpError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if !seen_header {
            let fields: Vec<&str> = record.iter().map(str::trim).collect();
            if fields != HEADER {
                return Err(InterpError::Parse {
                    line,
                    message: format!("expected header `{}`", HEADER.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if record.len() != HEADER.len() {
            return Err(InterpError::Parse {
                line,
                message: format!("expected 4 columns, found {}", record.len()),
            });
        }
        let kind: SlotKind = record[1].parse().map_err(|tok| InterpError::Parse {
            line,
            message: format!("unknown question type `{tok}` (expected Y/N or Std.)"),
        })?;
        let rule = SlotRule::new(&record[0], kind, &record[2], &record[3])
            .map_err(|message| InterpError::Parse { line, message })?;
        rules.push(rule);
    }
    SlotRegistry::from_rules(rules)
}
