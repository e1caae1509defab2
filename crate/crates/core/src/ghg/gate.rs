//! Pre-launch presentation and the y/n decision.

use serde::Serialize;

use super::predictor::{FootprintEstimate, MIN_TRAINING_RECORDS};
use super::record::RequestRecord;
use crate::dialogue::Dialogue;

pub const LAUNCH_PROMPT: &str = "Launch the request (y/n)?";
pub const SIMILAR_HEADER: &str = "Here are the most similar requests in case launching another request can be avoided.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateDecision {
    Launch,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GatePresentation {
    pub estimate: Option<FootprintEstimate>,
    pub similar: Vec<RequestRecord>,
    pub history_len: usize,
}

/// `%.Ne` as printed by C and Python: two-digit signed exponent.
pub fn format_sci(v: f64, digits: usize) -> String {
    let s = format!("{v:.digits$e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

impl GatePresentation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.estimate {
            Some(e) => {
                out.push_str(&format!("Predicted execution time (in sec): {:.3}\n", e.duration_s));
                out.push_str(&format!("Predicted generated GHG: {} kg CO2\n", format_sci(e.emissions_kg, 3)));
            }
            None => out.push_str(&format!(
                "No footprint prediction yet: {} of {MIN_TRAINING_RECORDS} past requests recorded.\n",
                self.history_len
            )),
        }
        if !self.similar.is_empty() {
            out.push('\n');
            out.push_str(SIMILAR_HEADER);
            out.push('\n');
            for r in &self.similar {
                out.push_str(&format!("   Request {} using dataset {}\n", r.request_id, r.dataset_name));
            }
        }
        out
    }
}

/// Shows the estimate, then asks until the answer is y or n.
/// With `auto_confirm` the question is skipped. A closed dialogue aborts.
pub fn confirm_gate(presentation: &GatePresentation, dialogue: &mut dyn Dialogue, auto_confirm: bool) -> GateDecision {
    dialogue.present_estimate(presentation);
    if auto_confirm {
        return GateDecision::Launch;
    }
    loop {
        let Some(answer) = dialogue.confirm(LAUNCH_PROMPT) else {
            return GateDecision::Abort;
        };
        match answer.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" => return GateDecision::Launch,
            "n" | "no" => return GateDecision::Abort,
            _ => dialogue.say("Please answer y or n."),
        }
    }
}
