use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::qa::{Answer, QaBackend};
use super::registry::{SlotKind, SlotRegistry};
use super::InterpError;

/// A resolved key value and the confidence of the answer that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binding {
    pub value: String,
    pub confidence: f64,
}

/// Outcome of interpreting one command.
///
/// `bindings` holds values found in the command (or supplied by the user);
/// `defaults` holds optional keys that were absent and fell back to their
/// documented default.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CommandFrame {
    pub raw_command: String,
    pub bindings: BTreeMap<String, Binding>,
    pub defaults: BTreeMap<String, String>,
    pub unresolved: BTreeSet<String>,
}

impl CommandFrame {
    pub fn new(raw_command: impl Into<String>) -> Self {
        CommandFrame {
            raw_command: raw_command.into(),
            ..Default::default()
        }
    }

    /// Bound value, falling back to the default when the key was not in the command.
    pub fn value(&self, key: &str) -> Option<&str> {
        self.bindings
            .get(key)
            .map(|b| b.value.as_str())
            .or_else(|| self.defaults.get(key).map(String::as_str))
    }

    pub fn bind(&mut self, key: &str, value: impl Into<String>, confidence: f64) {
        self.unresolved.remove(key);
        self.defaults.remove(key);
        self.bindings.insert(
            key.to_string(),
            Binding {
                value: value.into(),
                confidence,
            },
        );
    }

    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }

    /// `{key: value}` view of the extracted bindings.
    pub fn values(&self) -> BTreeMap<&str, &str> {
        self.bindings
            .iter()
            .map(|(k, b)| (k.as_str(), b.value.as_str()))
            .collect()
    }
}

/// One registry question applied to the command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub question: String,
    pub kind: SlotKind,
    /// `None` when a span question found no suitable answer.
    pub answer: Option<Answer>,
    /// Value the answer contributes to the key, if any.
    pub returned: Option<String>,
}

/// Result of resolving one key, with the per-question trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub key: String,
    pub value: Option<Binding>,
    pub trace: Vec<TraceStep>,
}

/// Applies every rule for `key` and keeps the best-confidence answer.
/// Ties go to the earliest rule.
pub fn resolve_key_traced(
    key: &str,
    command: &str,
    registry: &SlotRegistry,
    qa: &dyn QaBackend,
) -> Result<Resolution, InterpError> {
    if !registry.contains_key(key) {
        return Err(InterpError::UnknownKey(key.to_string()));
    }
    let mut trace = Vec::new();
    let mut best: Option<Binding> = None;
    for rule in registry.rules_for(key) {
        let (answer, returned) = match rule.kind {
            SlotKind::Boolean => {
                let a = qa.answer_boolean(&rule.question, command);
                let ret = a.is_yes().then(|| rule.return_value.clone());
                (Some(a), ret)
            }
            SlotKind::Span => {
                let a = qa.answer_span(&rule.question, command);
                let ret = a.as_ref().map(|a| a.text.clone());
                (a, ret)
            }
        };
        if let (Some(value), Some(a)) = (&returned, &answer) {
            if best.as_ref().is_none_or(|b| a.confidence > b.confidence) {
                best = Some(Binding {
                    value: value.clone(),
                    confidence: a.confidence,
                });
            }
        }
        trace.push(TraceStep {
            question: rule.question.clone(),
            kind: rule.kind,
            answer,
            returned,
        });
    }
    Ok(Resolution {
        key: key.to_string(),
        value: best,
        trace,
    })
}

pub fn resolve_key(
    key: &str,
    command: &str,
    registry: &SlotRegistry,
    qa: &dyn QaBackend,
) -> Result<Option<Binding>, InterpError> {
    resolve_key_traced(key, command, registry, qa).map(|r| r.value)
}

/// Keys to resolve for one command.
#[derive(Debug, Clone, Default)]
pub struct KeyPlan<'a> {
    /// Mandatory keys in resolution order.
    pub required: &'a [String],
    /// Optional keys with the default used when they are absent.
    pub optional: &'a [(String, Option<String>)],
}

/// Resolves the planned keys against `command`.
///
/// Keys missing from the registry or from the command end up in
/// `unresolved` (required) or `defaults` (optional with a default).
pub fn interpret(
    command: &str,
    registry: &SlotRegistry,
    qa: &dyn QaBackend,
    plan: &KeyPlan<'_>,
) -> CommandFrame {
    let mut frame = CommandFrame::new(command);
    for key in plan.required {
        match resolve_key(key, command, registry, qa) {
            Ok(Some(b)) => {
                frame.bindings.insert(key.clone(), b);
            }
            _ => {
                frame.unresolved.insert(key.clone());
            }
        }
    }
    for (key, default) in plan.optional {
        if frame.bindings.contains_key(key) {
            continue;
        }
        match resolve_key(key, command, registry, qa) {
            Ok(Some(b)) => {
                frame.bindings.insert(key.clone(), b);
            }
            _ => {
                if let Some(d) = default {
                    frame.defaults.insert(key.clone(), d.clone());
                }
            }
        }
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{LexicalQa, SlotRule};

    const CASE1: &str = "I want to perform a clustering using 3 clusters on the iris dataset.";

    fn keys(k: &[&str]) -> Vec<String> {
        k.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn resolves_case1_keys() {
        let reg = SlotRegistry::builtin();
        let qa = LexicalQa::default();
        let p = resolve_key("PROBLEM", CASE1, &reg, &qa).unwrap().unwrap();
        assert_eq!(p.value, "CLUSTERING");
        assert_eq!(resolve_key("NB_CLST", CASE1, &reg, &qa).unwrap().unwrap().value, "3");
        assert_eq!(resolve_key("NB_CMPS", CASE1, &reg, &qa).unwrap(), None);
    }

    #[test]
    fn unknown_key() {
        let reg = SlotRegistry::builtin();
        let err = resolve_key("COLOR", CASE1, &reg, &LexicalQa::default()).unwrap_err();
        assert_eq!(err.to_string(), "key not in registry: COLOR");
    }

    #[test]
    fn boolean_value_is_return_value_never_yes() {
        let reg = SlotRegistry::builtin();
        let qa = LexicalQa::default();
        let r = resolve_key_traced("PROBLEM", CASE1, &reg, &qa).unwrap();
        for step in &r.trace {
            if let Some(v) = &step.returned {
                assert_ne!(v, "yes");
                assert_ne!(v, "no");
            }
        }
    }

    #[test]
    fn ties_go_to_first_rule() {
        let rules = vec![
            SlotRule::new("PROBLEM", SlotKind::Boolean, "FIRST", "Is this clustering?").unwrap(),
            SlotRule::new("PROBLEM", SlotKind::Boolean, "SECOND", "Is this clustering?").unwrap(),
        ];
        let reg = SlotRegistry::from_rules(rules).unwrap();
        let b = resolve_key("PROBLEM", CASE1, &reg, &LexicalQa::default()).unwrap().unwrap();
        assert_eq!(b.value, "FIRST");
    }

    #[test]
    fn empty_command_leaves_everything_unresolved() {
        let reg = SlotRegistry::builtin();
        let required = keys(&["PROBLEM", "DATASET"]);
        let frame = interpret(
            "",
            &reg,
            &LexicalQa::default(),
            &KeyPlan { required: &required, optional: &[] },
        );
        assert!(frame.bindings.is_empty());
        assert_eq!(frame.unresolved, required.into_iter().collect());
    }

    #[test]
    fn optional_defaults_kept_apart_from_bindings() {
        let reg = SlotRegistry::builtin();
        let required = keys(&["PROBLEM", "DATASET", "NB_CLST"]);
        let optional = vec![("RANDOM".to_string(), Some("REPRODUCTIBLE".to_string()))];
        let frame = interpret(
            CASE1,
            &reg,
            &LexicalQa::default(),
            &KeyPlan { required: &required, optional: &optional },
        );
        assert!(frame.is_complete());
        assert!(!frame.bindings.contains_key("RANDOM"));
        assert_eq!(frame.value("RANDOM"), Some("REPRODUCTIBLE"));
    }
}
