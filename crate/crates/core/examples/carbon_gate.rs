//! Records tracked jobs in a ledger, then shows the estimate and similar requests before a launch.

use ml_workbench::dialogue::ScriptedDialogue;
use ml_workbench::ghg::{
    confirm_gate, predict_footprint, similar_requests, track, EnergyModel, GatePresentation, JobInfo, Ledger, Prospective,
    StepClock, MIN_TRAINING_RECORDS,
};
use rand::{Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let ledger = Ledger::open(dir.path().join("ledger.jsonl"))?;
    let energy = EnergyModel::default();
    let start = chrono::NaiveDate::from_ymd_opt(2023, 3, 1).unwrap().and_hms_opt(9, 0, 0).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);

    for i in 0..MIN_TRAINING_RECORDS + 10 {
        let n_rows = rng.random_range(100..2000);
        let n_fields = rng.random_range(2..12);
        // the step clock stands in for the job's run time
        let clock = StepClock::new(start + chrono::TimeDelta::hours(i as i64), 1e-5 * (n_rows * n_fields) as f64);
        let job = JobInfo {
            algorithm: "CLUSTERING".into(),
            dataset_name: format!("blobs_{}", i % 4),
            n_rows,
            n_fields,
        };
        let ((), record) = track(&ledger, &energy, &clock, &job, || ());
        record?;
    }

    let prospective = Prospective {
        algorithm: "CLUSTERING".into(),
        dataset_name: "blobs_new".into(),
        n_rows: 1500,
        n_fields: 8,
    };
    let records = ledger.records();
    let presentation = GatePresentation {
        estimate: predict_footprint(&prospective.algorithm, prospective.n_rows, prospective.n_fields, &ledger),
        similar: similar_requests(&prospective, &records, None),
        history_len: records.len(),
    };
    let mut dialogue = ScriptedDialogue::new(["n"]);
    let decision = confirm_gate(&presentation, &mut dialogue, false);
    print!("{}", presentation.render());
    println!("decision: {decision:?}");
    Ok(())
}
