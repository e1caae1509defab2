//! Question/answer channel between the workbench and a user.

use std::collections::VecDeque;

use crate::ghg::GatePresentation;

pub trait Dialogue {
    /// Informational text; no answer expected.
    fn say(&mut self, text: &str);

    /// Asks a question. `None` means the user went away.
    fn ask(&mut self, question: &str) -> Option<String>;

    /// Shows the footprint estimate and similar past requests before the launch prompt.
    fn present_estimate(&mut self, presentation: &GatePresentation) {
        self.say(&presentation.render());
    }

    /// Asks the launch question of the carbon gate.
    fn confirm(&mut self, question: &str) -> Option<String> {
        self.ask(question)
    }
}

/// One line of a [`ScriptedDialogue`] transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line {
    Said(String),
    Asked(String),
    Answered(String),
}

/// Replays canned answers; records everything that was said and asked.
#[derive(Debug, Default, Clone)]
pub struct ScriptedDialogue {
    answers: VecDeque<String>,
    pub transcript: Vec<Line>,
}

impl ScriptedDialogue {
    pub fn new<I, S>(answers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedDialogue {
            answers: answers.into_iter().map(Into::into).collect(),
            transcript: Vec::new(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.answers.len()
    }

    pub fn questions(&self) -> Vec<&str> {
        self.transcript
            .iter()
            .filter_map(|l| match l {
                Line::Asked(q) => Some(q.as_str()),
                _ => None,
            })
            .collect()
    }
}

impl Dialogue for ScriptedDialogue {
    fn say(&mut self, text: &str) {
        self.transcript.push(Line::Said(text.to_string()));
    }

    fn ask(&mut self, question: &str) -> Option<String> {
        self.transcript.push(Line::Asked(question.to_string()));
        let a = self.answers.pop_front()?;
        self.transcript.push(Line::Answered(a.clone()));
        Some(a)
    }
}
