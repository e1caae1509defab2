use std::sync::Mutex;
use std::time::Instant;

use chrono::{Local, NaiveDateTime, TimeDelta};
use serde::{Deserialize, Serialize};

pub const REQUEST_ID_FORMAT: &str = "_%Y-%m-%d_%H-%M-%S";

/// One executed request, as stored in the ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestRecord {
    pub request_id: String,
    pub algorithm: String,
    pub dataset_name: String,
    pub n_rows: usize,
    pub n_fields: usize,
    pub duration_s: f64,
    pub emissions_kg: f64,
}

pub fn request_id(t: NaiveDateTime) -> String {
    t.format(REQUEST_ID_FORMAT).to_string()
}

pub fn parse_request_id(id: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(id, REQUEST_ID_FORMAT).ok()
}

pub fn is_request_id(id: &str) -> bool {
    id.len() == 20 && parse_request_id(id).is_some()
}

/// Source of wall-clock timestamps and elapsed seconds.
pub trait Clock: Send + Sync {
    fn now(&self) -> NaiveDateTime;
    /// Monotonic seconds since an arbitrary origin.
    fn seconds(&self) -> f64;
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> NaiveDateTime {
        Local::now().naive_local()
    }

    fn seconds(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Deterministic clock: every `seconds()` call advances time by `step`.
pub struct StepClock {
    state: Mutex<(NaiveDateTime, f64)>,
    step: f64,
}

impl StepClock {
    pub fn new(start: NaiveDateTime, step: f64) -> StepClock {
        StepClock {
            state: Mutex::new((start, 0.0)),
            step,
        }
    }
}

impl Clock for StepClock {
    fn now(&self) -> NaiveDateTime {
        self.state.lock().unwrap().0
    }

    fn seconds(&self) -> f64 {
        let mut s = self.state.lock().unwrap();
        let t = s.1;
        s.1 += self.step;
        s.0 += TimeDelta::milliseconds((self.step * 1000.0).round() as i64);
        t
    }
}
