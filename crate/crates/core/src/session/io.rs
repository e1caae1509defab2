use std::collections::VecDeque;

use super::events::SessionEvent;
use crate::dialogue::Dialogue;
use crate::ghg::GatePresentation;

/// Transport for one session: events out, user lines in.
pub trait SessionIo {
    fn emit(&mut self, event: SessionEvent);

    /// Next line from the user. `None` ends the session.
    fn answer(&mut self) -> Option<String>;
}

/// Adapts a [`SessionIo`] to the [`Dialogue`] used by the preprocessing and gate code.
pub struct EventDialogue<'a> {
    io: &'a mut dyn SessionIo,
    /// Key attached to the next question, if it fills one.
    pub key: Option<String>,
}

impl<'a> EventDialogue<'a> {
    pub fn new(io: &'a mut dyn SessionIo) -> Self {
        EventDialogue { io, key: None }
    }

    pub fn emit(&mut self, event: SessionEvent) {
        self.io.emit(event);
    }

    /// Asks a question tied to `key`.
    pub fn ask_key(&mut self, key: &str, question: &str) -> Option<String> {
        self.key = Some(key.to_string());
        let a = self.ask(question);
        self.key = None;
        a
    }
}

impl Dialogue for EventDialogue<'_> {
    fn say(&mut self, text: &str) {
        self.io.emit(SessionEvent::Info { text: text.to_string() });
    }

    fn ask(&mut self, question: &str) -> Option<String> {
        self.io.emit(SessionEvent::Question {
            key: self.key.clone(),
            text: question.to_string(),
        });
        self.io.answer()
    }

    fn present_estimate(&mut self, presentation: &GatePresentation) {
        self.io.emit(SessionEvent::Estimate {
            text: presentation.render(),
            presentation: presentation.clone(),
        });
    }

    fn confirm(&mut self, question: &str) -> Option<String> {
        self.io.emit(SessionEvent::Confirm { text: question.to_string() });
        self.io.answer()
    }
}

/// Canned user lines; every emitted event is kept.
#[derive(Debug, Default)]
pub struct ScriptedIo {
    lines: VecDeque<String>,
    pub events: Vec<SessionEvent>,
}

impl ScriptedIo {
    pub fn new<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedIo {
            lines: lines.into_iter().map(Into::into).collect(),
            events: Vec::new(),
        }
    }

    pub fn push_line(&mut self, line: impl Into<String>) {
        self.lines.push_back(line.into());
    }

    pub fn remaining(&self) -> usize {
        self.lines.len()
    }

    pub fn kinds(&self) -> Vec<&'static str> {
        self.events.iter().map(SessionEvent::kind).collect()
    }
}

impl SessionIo for ScriptedIo {
    fn emit(&mut self, event: SessionEvent) {
        self.events.push(event);
    }

    fn answer(&mut self) -> Option<String> {
        self.lines.pop_front()
    }
}
