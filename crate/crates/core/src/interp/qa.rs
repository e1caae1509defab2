//! Question-answering backends that interrogate a command with registry questions.
//!
//! [`QaBackend`] is the adapter point: a remote extractive/yes-no model can be
//! plugged in behind it. [`LexicalQa`] is the default, deterministic backend.
//!
//! # Confidence
//!
//! Every candidate answer gets a logit. For yes/no questions the logit of
//! "yes" is
//!
//! ```text
//! TOKEN_WEIGHT * (matched topic tokens) + FAMILY_BONUS (command uses the question's own word family)
//!                                      + PHRASE_BONUS * (matched multi-word phrases)
//! ```
//!
//! and "no" has the fixed logit `NO_LOGIT`. For span questions every regex
//! match is a candidate with logit `SPAN_BASE + specificity`, competing with
//! a fixed no-answer logit `NULL_LOGIT`. Confidence is the softmax
//! probability of the chosen candidate.

use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

pub const TOKEN_WEIGHT: f64 = 1.0;
pub const FAMILY_BONUS: f64 = 1.5;
pub const PHRASE_BONUS: f64 = 1.0;
pub const NO_LOGIT: f64 = 1.0;
pub const SPAN_BASE: f64 = 2.0;
pub const NULL_LOGIT: f64 = 1.0;

/// An answer with its confidence in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Answer {
    pub text: String,
    pub confidence: f64,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        self.text == "yes"
    }
}

/// Pluggable question-answering backend.
pub trait QaBackend: Send + Sync {
    /// Extracts the answer span of an open question, if any.
    fn answer_span(&self, question: &str, command: &str) -> Option<Answer>;
    /// Answers a yes/no question; `text` is `"yes"` or `"no"`.
    fn answer_boolean(&self, question: &str, command: &str) -> Answer;
}

/// A set of word forms that count as the same word.
#[derive(Debug, Clone)]
pub struct WordFamily {
    pub forms: Vec<String>,
}

/// A yes/no topic: word families that evoke it, plus optional phrases.
#[derive(Debug, Clone)]
pub struct Topic {
    pub name: String,
    pub families: Vec<WordFamily>,
    pub phrases: Vec<String>,
}

impl Topic {
    fn family_of(&self, token: &str) -> Option<usize> {
        self.families
            .iter()
            .position(|f| f.forms.iter().any(|w| w == token))
    }
}

/// Synonym lexicon of the lexical backend.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub topics: Vec<Topic>,
    /// Count nouns ("How many X?") and the forms accepted for them in a command.
    pub count_nouns: Vec<WordFamily>,
}

fn family(forms: &[&str]) -> WordFamily {
    WordFamily {
        forms: forms.iter().map(|s| s.to_string()).collect(),
    }
}

fn topic(name: &str, families: &[&[&str]], phrases: &[&str]) -> Topic {
    Topic {
        name: name.into(),
        families: families.iter().map(|f| family(f)).collect(),
        phrases: phrases.iter().map(|s| s.to_string()).collect(),
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            topics: vec![
                topic(
                    "clustering",
                    &[
                        &["cluster", "clusters", "clustering", "clustered"],
                        &["regroup", "regroups", "regrouping", "regrouped"],
                        &["group", "groups", "grouping"],
                    ],
                    &[],
                ),
                topic(
                    "classification",
                    &[&["classification", "classify", "classifying", "classifier", "classified"]],
                    &[],
                ),
                topic(
                    "prediction",
                    &[
                        &["prediction", "predict", "predicting", "predictions"],
                        &["regression", "regress", "regressor"],
                    ],
                    &[],
                ),
                topic(
                    "dimensionality",
                    &[
                        &["dimensionality", "dimensional", "dimension", "dimensions"],
                        &["reduction", "reduce", "reducing"],
                        &["pca"],
                    ],
                    &["reduce dimensions", "reduce the dimensions", "principal components"],
                ),
                topic(
                    "importance",
                    &[&["importance", "important"]],
                    &["feature importance", "importance of the features", "importance of features"],
                ),
                topic(
                    "random",
                    &[&["random", "randomly", "randomized", "nondeterministic"]],
                    &[],
                ),
                topic(
                    "reproducible",
                    &[&["reproducible", "reproductible", "reproducibility", "reproduce", "deterministic"]],
                    &[],
                ),
                topic(
                    "preprocessing",
                    &[&["preprocess", "preprocessing", "preprocessed", "prepare"]],
                    &[],
                ),
            ],
            count_nouns: vec![
                family(&["cluster", "clusters"]),
                family(&["group", "groups"]),
                family(&["component", "components"]),
                family(&["dimension", "dimensions"]),
                family(&["neighbor", "neighbors", "neighbour", "neighbours"]),
            ],
        }
    }
}

/// Lowercased alphanumeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn softmax_pick(logits: &[f64], pick: usize) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let denom: f64 = logits.iter().map(|l| (l - max).exp()).sum();
    (logits[pick] - max).exp() / denom
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpanQuestion {
    Dataset,
    Count,
    TestValues,
}

fn classify_span_question(question: &str) -> Option<SpanQuestion> {
    let tokens = tokenize(question);
    if question.trim_start().to_lowercase().starts_with("how many") {
        return Some(SpanQuestion::Count);
    }
    if tokens.iter().any(|t| t == "test" || t == "tested" || t == "values") {
        return Some(SpanQuestion::TestValues);
    }
    if tokens.iter().any(|t| t == "dataset" || t == "data") {
        return Some(SpanQuestion::Dataset);
    }
    None
}

fn dataset_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)\b(on the|using the|with the|of the|from the|using|with|the)\s+([A-Za-z0-9_\-]+)\s+(?:dataset|data set)\b",
        )
        .unwrap()
    })
}

fn vector_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"\[\s*[-+]?\d+(?:\.\d*)?(?:\s*,\s*[-+]?\d+(?:\.\d*)?)*\s*\]").unwrap()
    })
}

const NOT_A_NAME: [&str; 7] = ["the", "a", "an", "this", "that", "my", "your"];

/// Deterministic pattern/lexicon backend.
#[derive(Debug, Clone, Default)]
pub struct LexicalQa {
    lexicon: Lexicon,
}

impl LexicalQa {
    pub fn new(lexicon: Lexicon) -> Self {
        LexicalQa { lexicon }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Topic and word family named by a yes/no question.
    fn question_topic(&self, question: &str) -> Option<(&Topic, usize)> {
        tokenize(question).iter().find_map(|tok| {
            self.lexicon
                .topics
                .iter()
                .find_map(|t| t.family_of(tok).map(|f| (t, f)))
        })
    }

    fn count_family(&self, noun: &str) -> Vec<String> {
        self.lexicon
            .count_nouns
            .iter()
            .find(|f| f.forms.iter().any(|w| w == noun))
            .map(|f| f.forms.clone())
            .unwrap_or_else(|| {
                let stem = noun.strip_suffix('s').unwrap_or(noun);
                vec![stem.to_string(), format!("{stem}s")]
            })
    }

    fn dataset_candidates(&self, command: &str) -> Vec<(String, f64)> {
        dataset_regex()
            .captures_iter(command)
            .filter_map(|c| {
                let name = c.get(2)?.as_str();
                if NOT_A_NAME.contains(&name.to_lowercase().as_str()) {
                    return None;
                }
                let lead = c.get(1)?.as_str().to_lowercase();
                let specificity = if lead == "the" { 0.5 } else { 1.0 };
                Some((name.to_string(), SPAN_BASE + specificity))
            })
            .collect()
    }

    fn count_candidates(&self, question: &str, command: &str) -> Vec<(String, f64)> {
        let q = tokenize(question);
        // "how many <noun>"
        let Some(noun) = q.get(2) else { return Vec::new() };
        let forms = self.count_family(noun);
        let alternation = forms
            .iter()
            .map(|f| regex::escape(f))
            .collect::<Vec<_>>()
            .join("|");
        let before = Regex::new(&format!(r"(?i)\b(\d+)\s+(?:{alternation})\b")).unwrap();
        let after = Regex::new(&format!(r"(?i)\b(?:{alternation})\s*(?:=|:|of)\s*(\d+)\b")).unwrap();
        let mut out: Vec<(usize, String, f64)> = before
            .captures_iter(command)
            .map(|c| {
                let m = c.get(1).unwrap();
                (m.start(), m.as_str().to_string(), SPAN_BASE + 1.0)
            })
            .collect();
        out.extend(after.captures_iter(command).map(|c| {
            let m = c.get(1).unwrap();
            (m.start(), m.as_str().to_string(), SPAN_BASE + 0.5)
        }));
        out.sort_by_key(|(pos, _, _)| *pos);
        out.into_iter().map(|(_, s, l)| (s, l)).collect()
    }

    fn vector_candidates(&self, command: &str) -> Vec<(String, f64)> {
        vector_regex()
            .find_iter(command)
            .map(|m| (m.as_str().to_string(), SPAN_BASE + 1.0))
            .collect()
    }
}

impl QaBackend for LexicalQa {
    fn answer_span(&self, question: &str, command: &str) -> Option<Answer> {
        if question.trim().is_empty() || command.trim().is_empty() {
            return None;
        }
        let candidates = match classify_span_question(question)? {
            SpanQuestion::Dataset => self.dataset_candidates(command),
            SpanQuestion::Count => self.count_candidates(question, command),
            SpanQuestion::TestValues => self.vector_candidates(command),
        };
        if candidates.is_empty() {
            return None;
        }
        let mut logits: Vec<f64> = candidates.iter().map(|(_, l)| *l).collect();
        logits.push(NULL_LOGIT);
        // first candidate with the highest logit
        let best = (0..candidates.len()).fold(0, |best, i| {
            if candidates[i].1 > candidates[best].1 {
                i
            } else {
                best
            }
        });
        Some(Answer {
            text: candidates[best].0.clone(),
            confidence: softmax_pick(&logits, best),
        })
    }

    fn answer_boolean(&self, question: &str, command: &str) -> Answer {
        let no = |confidence: f64| Answer {
            text: "no".into(),
            confidence,
        };
        if command.trim().is_empty() {
            return no(0.0);
        }
        let Some((topic, question_family)) = self.question_topic(question) else {
            return no(softmax_pick(&[NO_LOGIT, 0.0], 0));
        };
        let tokens = tokenize(command);
        let mut matched = 0usize;
        let mut same_family = false;
        for tok in &tokens {
            if let Some(f) = topic.family_of(tok) {
                matched += 1;
                same_family |= f == question_family;
            }
        }
        let joined = tokens.join(" ");
        let phrases = topic
            .phrases
            .iter()
            .filter(|p| joined.contains(p.as_str()))
            .count();
        if matched == 0 && phrases == 0 {
            return no(softmax_pick(&[NO_LOGIT, 0.0], 0));
        }
        let score = TOKEN_WEIGHT * matched as f64
            + if same_family { FAMILY_BONUS } else { 0.0 }
            + PHRASE_BONUS * phrases as f64;
        Answer {
            text: "yes".into(),
            confidence: softmax_pick(&[score, NO_LOGIT], 0),
        }
    }
}
