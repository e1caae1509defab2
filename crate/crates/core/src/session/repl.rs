use std::io::{BufRead, Write};

use super::events::{SessionEvent, COMMAND_PROMPT};
use super::io::SessionIo;
use super::orchestrator::{CommandOutcome, Workbench};

/// Prompt/command loop until the input ends or the user types `quit` or `exit`.
pub fn run_session(workbench: &Workbench, io: &mut dyn SessionIo) -> Vec<CommandOutcome> {
    let mut outcomes = Vec::new();
    loop {
        io.emit(SessionEvent::Prompt {
            text: COMMAND_PROMPT.to_string(),
        });
        let Some(line) = io.answer() else { break };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if matches!(line.to_ascii_lowercase().as_str(), "quit" | "exit") {
            break;
        }
        outcomes.push(workbench.handle_command(line, io));
    }
    outcomes
}

struct TerminalIo<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> SessionIo for TerminalIo<R, W> {
    fn emit(&mut self, event: SessionEvent) {
        let text = event.text();
        let _ = if event.expects_answer() || matches!(event, SessionEvent::Prompt { .. }) {
            write!(self.output, "{text}\n> ")
        } else {
            writeln!(self.output, "{}", text.trim_end())
        };
        let _ = self.output.flush();
    }

    fn answer(&mut self) -> Option<String> {
        let mut line = String::new();
        match self.input.read_line(&mut line) {
            Ok(0) | Err(_) => None,
            Ok(_) => Some(line.trim_end_matches(['\n', '\r']).to_string()),
        }
    }
}

/// Terminal session over any reader/writer pair.
pub fn run_repl<R: BufRead, W: Write>(workbench: &Workbench, input: R, output: W) -> Vec<CommandOutcome> {
    let mut io = TerminalIo { input, output };
    run_session(workbench, &mut io)
}
