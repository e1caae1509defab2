//! Append-only JSON-lines request history.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::TimeDelta;

use super::predictor::FootprintPredictor;
use super::record::{parse_request_id, request_id, Clock, RequestRecord};
use super::{EnergyModel, LedgerError};

/// Descriptor of the work being tracked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobInfo {
    pub algorithm: String,
    pub dataset_name: String,
    pub n_rows: usize,
    pub n_fields: usize,
}

pub struct Ledger {
    path: PathBuf,
    records: RwLock<Vec<RequestRecord>>,
    writer: Mutex<()>,
    predictor: Mutex<Option<Arc<FootprintPredictor>>>,
}

impl std::fmt::Debug for Ledger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ledger").field("path", &self.path).field("len", &self.len()).finish()
    }
}

impl Ledger {
    /// Loads `path` if it exists; the file is created on first append.
    pub fn open(path: impl Into<PathBuf>) -> Result<Ledger, LedgerError> {
        let path = path.into();
        let records = if path.is_file() {
            let text = fs::read_to_string(&path).map_err(|e| LedgerError::io(&path, e))?;
            parse_lines(&text)?
        } else {
            Vec::new()
        };
        Ok(Ledger {
            path,
            records: RwLock::new(records),
            writer: Mutex::new(()),
            predictor: Mutex::new(None),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> Vec<RequestRecord> {
        self.records.read().unwrap().clone()
    }

    pub fn len(&self) -> usize {
        self.records.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: &str) -> Option<RequestRecord> {
        self.records.read().unwrap().iter().find(|r| r.request_id == id).cloned()
    }

    /// Appends `record`, moving its id forward one second at a time until it
    /// is unique. Returns the stored record.
    pub fn append(&self, mut record: RequestRecord) -> Result<RequestRecord, LedgerError> {
        if !(record.duration_s >= 0.0 && record.emissions_kg >= 0.0) {
            return Err(LedgerError::NegativeMeasure);
        }
        let _guard = self.writer.lock().unwrap();
        {
            let existing = self.records.read().unwrap();
            if let Some(mut t) = parse_request_id(&record.request_id) {
                while existing.iter().any(|r| r.request_id == record.request_id) {
                    t += TimeDelta::seconds(1);
                    record.request_id = request_id(t);
                }
            } else if existing.iter().any(|r| r.request_id == record.request_id) {
                return Err(LedgerError::DuplicateId(record.request_id));
            }
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| LedgerError::io(dir, e))?;
        }
        let mut line = serde_json::to_string(&record).expect("record serializes");
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| LedgerError::io(&self.path, e))?;
        f.write_all(line.as_bytes()).map_err(|e| LedgerError::io(&self.path, e))?;
        f.sync_data().map_err(|e| LedgerError::io(&self.path, e))?;
        self.records.write().unwrap().push(record.clone());
        *self.predictor.lock().unwrap() = None;
        Ok(record)
    }

    /// Cached predictor trained on the current history, if there is enough of it.
    pub fn predictor(&self) -> Option<Arc<FootprintPredictor>> {
        let mut cache = self.predictor.lock().unwrap();
        if let Some(p) = cache.as_ref() {
            return Some(Arc::clone(p));
        }
        let trained = Arc::new(FootprintPredictor::train(&self.records())?);
        *cache = Some(Arc::clone(&trained));
        Some(trained)
    }
}

fn parse_lines(text: &str) -> Result<Vec<RequestRecord>, LedgerError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| LedgerError::Corrupt {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Runs `run`, measures it and appends a record whatever `run` returns.
///
/// The second value is the ledger outcome; a write failure never hides the
/// job output.
pub fn track<T>(
    ledger: &Ledger,
    energy: &EnergyModel,
    clock: &dyn Clock,
    job: &JobInfo,
    run: impl FnOnce() -> T,
) -> (T, Result<RequestRecord, LedgerError>) {
    let started = clock.now();
    let t0 = clock.seconds();
    let output = run();
    let duration_s = (clock.seconds() - t0).max(0.0);
    let record = RequestRecord {
        request_id: request_id(started),
        algorithm: job.algorithm.clone(),
        dataset_name: job.dataset_name.clone(),
        n_rows: job.n_rows,
        n_fields: job.n_fields,
        duration_s,
        emissions_kg: energy.emissions_kg(duration_s),
    };
    (output, ledger.append(record))
}
