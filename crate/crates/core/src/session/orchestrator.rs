use std::fs::File;
use std::sync::Arc;

use serde_json::json;

use super::config::{TrainingConfig, WorkbenchConfig};
use super::events::{ResultKind, ResultPayload, SessionEvent, PROBLEM_QUESTION};
use super::io::{EventDialogue, SessionIo};
use super::spec::{AlgorithmTable, Problem};
use super::SessionError;
use crate::dialogue::Dialogue;
use crate::engines::{
    evaluate, kmeans, learning_curves, pca, predict, rf_importance, train_with_seed, ClusteringResult,
    CurveSet, EngineError, ImportanceResult, Init, ModelKind, PcaResult, Prediction, SeedPolicy, SupervisedModel, Task,
};
use crate::explain::{
    explain_clustering, explain_importance, explain_pca, explain_supervised, ExplainBundle, SvgRenderer, BUNDLE_INDEX,
};
use crate::ghg::{
    confirm_gate, predict_footprint, similar_requests, track, Clock, GateDecision, GatePresentation, JobInfo, Ledger,
    Prospective, SystemClock,
};
use crate::interp::{interpret, load_registry, resolve_key, CommandFrame, KeyPlan, LexicalQa, QaBackend, SlotRegistry};
use crate::prep::{open_dataset, preprocess, split, PreparedDataset, Target, DEFAULT_TRAIN_RATIO};

/// How one command ended.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandOutcome {
    Completed(Box<ResultPayload>),
    /// The user declined the launch.
    Aborted,
    Failed(String),
}

/// Engine output for one request.
#[derive(Debug, Clone)]
pub enum EngineOutput {
    Clustering(ClusteringResult),
    Dimensionality(PcaResult),
    Supervised {
        model: Box<SupervisedModel>,
        test_score: f64,
        curves: CurveSet,
        test_vector: Option<Vec<f64>>,
        prediction: Option<Prediction>,
    },
    Importance(ImportanceResult),
}

/// Parses `[4.8,3.0,1.4,0.2]`, `4.8 3.0 1.4 0.2` and similar.
pub fn parse_test_vector(text: &str) -> Option<Vec<f64>> {
    let inner = text.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')', '.']);
    let values: Option<Vec<f64>> = inner
        .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    values.filter(|v| !v.is_empty())
}

/// Checks a key value and returns its canonical form.
fn canonical(key: &str, value: &str) -> Result<String, String> {
    let v = value.trim();
    match key {
        "PROBLEM" => v.parse::<Problem>().map(|p| p.key_value().to_string()),
        "DATASET" => {
            let name = v.trim_end_matches('.');
            let ok = !name.is_empty()
                && name.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !name.starts_with('.');
            if ok {
                Ok(name.to_string())
            } else {
                Err("a dataset name".into())
            }
        }
        "NB_CLST" | "NB_CMPS" => match v.trim_end_matches('.').parse::<usize>() {
            Ok(n) if n > 0 => Ok(n.to_string()),
            _ => Err("a positive integer".into()),
        },
        "RANDOM" => SeedPolicy::from_key_value(v)
            .map(|p| match p {
                SeedPolicy::Reproducible => "REPRODUCTIBLE".to_string(),
                SeedPolicy::Random => "RANDOM".to_string(),
            })
            .ok_or_else(|| "REPRODUCTIBLE or RANDOM".into()),
        "TEST" => parse_test_vector(v)
            .map(|_| v.to_string())
            .ok_or_else(|| "a list of numbers such as [4.8,3.0,1.4,0.2]".into()),
        _ => Ok(v.to_string()),
    }
}

fn number(frame: &CommandFrame, key: &str) -> Result<usize, SessionError> {
    let v = frame.value(key).unwrap_or_default();
    v.trim().parse().map_err(|_| SessionError::InvalidValue {
        key: key.into(),
        value: v.into(),
    })
}

fn problem_of(frame: &CommandFrame) -> Option<Problem> {
    frame.value("PROBLEM").and_then(|v| v.parse().ok())
}

/// Interprets `command` without executing it.
///
/// When no problem is found only PROBLEM, DATASET and ACTION are looked up.
pub fn interpret_command(
    command: &str,
    registry: &SlotRegistry,
    qa: &dyn QaBackend,
    table: &AlgorithmTable,
) -> CommandFrame {
    let problem = resolve_key("PROBLEM", command, registry, qa)
        .ok()
        .flatten()
        .and_then(|b| b.value.parse::<Problem>().ok());
    interpret_as(command, problem, registry, qa, table)
}

fn interpret_as(
    command: &str,
    problem: Option<Problem>,
    registry: &SlotRegistry,
    qa: &dyn QaBackend,
    table: &AlgorithmTable,
) -> CommandFrame {
    match problem.and_then(|p| table.get(p)) {
        Some(spec) => {
            let optional = spec.optional_pairs();
            interpret(command, registry, qa, &KeyPlan { required: &spec.required_keys, optional: &optional })
        }
        None => {
            let required = vec!["PROBLEM".to_string(), "DATASET".to_string()];
            let optional: Vec<(String, Option<String>)> = if registry.contains_key("ACTION") {
                vec![("ACTION".to_string(), None)]
            } else {
                Vec::new()
            };
            interpret(command, registry, qa, &KeyPlan { required: &required, optional: &optional })
        }
    }
}

/// Runs the engine matching the frame's problem on `data`.
pub fn dispatch(
    frame: &CommandFrame,
    data: &PreparedDataset,
    table: &AlgorithmTable,
    training: &TrainingConfig,
) -> Result<EngineOutput, SessionError> {
    let problem = problem_of(frame).ok_or(SessionError::NoProblem)?;
    let spec = table
        .get(problem)
        .ok_or_else(|| SessionError::Config(format!("no algorithm entry for {problem}")))?;
    let missing: Vec<String> = spec.required_keys.iter().filter(|k| frame.value(k).is_none()).cloned().collect();
    if !missing.is_empty() {
        return Err(SessionError::MissingKeys {
            problem: problem.to_string(),
            keys: missing,
        });
    }
    let policy = match frame.value("RANDOM") {
        Some(v) => SeedPolicy::from_key_value(v).ok_or_else(|| SessionError::InvalidValue {
            key: "RANDOM".into(),
            value: v.into(),
        })?,
        None => SeedPolicy::default(),
    };
    let seed = policy.seed();
    match problem {
        Problem::Clustering => {
            let k = number(frame, "NB_CLST")?;
            Ok(EngineOutput::Clustering(kmeans(&data.features, k, seed, Init::PlusPlus)?))
        }
        Problem::Dimensionality => {
            let c = number(frame, "NB_CMPS")?;
            Ok(EngineOutput::Dimensionality(pca(&data.features, c)?))
        }
        Problem::Classification | Problem::Prediction => {
            let kind = if problem == Problem::Classification {
                ModelKind::Classifier
            } else {
                ModelKind::Regressor
            };
            let test_vector = frame
                .value("TEST")
                .map(|v| {
                    parse_test_vector(v).ok_or_else(|| SessionError::InvalidValue {
                        key: "TEST".into(),
                        value: v.into(),
                    })
                })
                .transpose()?;
            let parts = split(data, DEFAULT_TRAIN_RATIO, seed)?;
            let model = train_with_seed(&parts.train, kind, policy, seed, &training.network)?;
            let test_score = evaluate(&model, &parts.test)?;
            let curves = learning_curves(data, kind, training.folds, &training.curve_sizes, &training.network, seed)?;
            let prediction = test_vector
                .as_ref()
                .map(|t| predict(&model, t, &data.feature_scaling))
                .transpose()?;
            Ok(EngineOutput::Supervised {
                model: Box::new(model),
                test_score,
                curves,
                test_vector,
                prediction,
            })
        }
        Problem::FeatImp => {
            let task = Task::detect(&data.target).ok_or(EngineError::MissingTarget)?;
            Ok(EngineOutput::Importance(rf_importance(data, task)?))
        }
    }
}

impl EngineOutput {
    pub fn explain(&self, request_id: &str, data: &PreparedDataset) -> Result<ExplainBundle, SessionError> {
        let bundle = match self {
            EngineOutput::Clustering(r) => explain_clustering(request_id, r, &data.features, &data.feature_names)?,
            EngineOutput::Dimensionality(r) => explain_pca(request_id, r, &data.feature_names)?,
            EngineOutput::Supervised { model, curves, .. } => explain_supervised(request_id, curves, model.kind)?,
            EngineOutput::Importance(r) => explain_importance(request_id, r, &data.feature_names)?,
        };
        Ok(bundle)
    }

    fn kind(&self) -> ResultKind {
        match self {
            EngineOutput::Clustering(_) => ResultKind::Clustering,
            EngineOutput::Dimensionality(_) => ResultKind::Dimensionality,
            EngineOutput::Supervised { model, .. } => match model.kind {
                ModelKind::Classifier => ResultKind::Classification,
                ModelKind::Regressor => ResultKind::Prediction,
            },
            EngineOutput::Importance(_) => ResultKind::FeatImp,
        }
    }

    fn summary(&self, data: &PreparedDataset) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ");
        match self {
            EngineOutput::Clustering(r) => {
                let sizes: Vec<String> = r.cluster_sizes().iter().map(usize::to_string).collect();
                let sil = r
                    .silhouette_mean
                    .map_or_else(|| "undefined".to_string(), |s| format!("{s:.3}"));
                format!(
                    "Clustering of the {} dataset into {} clusters (sizes {}); mean silhouette {sil}.",
                    data.name,
                    r.k(),
                    sizes.join(", ")
                )
            }
            EngineOutput::Dimensionality(r) => format!(
                "PCA of the {} dataset with {} components; explained variance ratio {} (total {:.3}).",
                data.name,
                r.components.len(),
                list(&r.explained_variance_ratio),
                r.explained_variance_ratio.iter().sum::<f64>()
            ),
            EngineOutput::Supervised {
                model,
                test_score,
                curves,
                test_vector,
                prediction,
            } => {
                let what = match model.kind {
                    ModelKind::Classifier => "Classifier",
                    ModelKind::Regressor => "Regressor",
                };
                let mut s = format!(
                    "{what} trained on the {} dataset: test {} {test_score:.3}.",
                    data.name, curves.score_name
                );
                if let (Some(t), Some(p)) = (test_vector, prediction) {
                    s.push_str(&format!(" Prediction of {} for [{}]: {p}.", model.target_name, list(t)));
                }
                s
            }
            EngineOutput::Importance(r) => {
                let parts: Vec<String> = data
                    .feature_names
                    .iter()
                    .zip(&r.importances)
                    .map(|(n, v)| format!("{n} {v:.3}"))
                    .collect();
                let task = match r.task {
                    Task::Classification => "classification",
                    Task::Regression => "regression",
                };
                format!(
                    "Feature importance on the {} dataset ({task} task): {}.",
                    data.name,
                    parts.join(", ")
                )
            }
        }
    }

    fn details(&self) -> serde_json::Value {
        match self {
            EngineOutput::Clustering(r) => json!({
                "k": r.k(),
                "cluster_sizes": r.cluster_sizes(),
                "centroids": r.centroids,
                "silhouette_mean": r.silhouette_mean,
                "inertia": r.inertia,
                "iterations": r.iterations,
            }),
            EngineOutput::Dimensionality(r) => json!({
                "components": r.components,
                "explained_variance": r.explained_variance,
                "explained_variance_ratio": r.explained_variance_ratio,
            }),
            EngineOutput::Supervised {
                model,
                test_score,
                curves,
                test_vector,
                prediction,
            } => json!({
                "model": model.kind,
                "layer_sizes": model.layer_sizes,
                "seed_policy": model.seed_policy,
                "score_name": curves.score_name,
                "test_score": test_score,
                "train_sizes": curves.train_sizes,
                "validation_scores": curves.validation_scores.iter().map(|m| m.mean).collect::<Vec<_>>(),
                "test_vector": test_vector,
                "prediction": prediction,
            }),
            EngineOutput::Importance(r) => json!({
                "task": r.task,
                "importances": r.importances,
                "n_trees": r.n_trees,
            }),
        }
    }
}

fn target_fits(problem: Problem, data: &PreparedDataset) -> Result<(), &'static str> {
    match (problem, &data.target) {
        (Problem::Classification, t) if !t.is_classification() => Err("has no class field"),
        (Problem::Prediction, t) if !matches!(t, Target::Regression { .. }) => Err("has no regression value field"),
        (Problem::FeatImp, Target::None) => Err("has no class or regression value field"),
        _ => Ok(()),
    }
}

/// Checks a bound value against the opened dataset.
fn fits_dataset(key: &str, value: &str, data: &PreparedDataset) -> Result<(), String> {
    match key {
        "NB_CLST" => {
            let k: usize = value.parse().unwrap_or(0);
            if k > data.n_rows() {
                return Err(format!("The {} dataset has only {} rows.", data.name, data.n_rows()));
            }
        }
        "NB_CMPS" => {
            let c: usize = value.parse().unwrap_or(0);
            if c > data.n_features() {
                return Err(format!("The {} dataset has only {} features.", data.name, data.n_features()));
            }
        }
        "TEST" => {
            let n = parse_test_vector(value).map_or(0, |v| v.len());
            if n != data.n_features() {
                return Err(format!(
                    "The test vector needs {} values, got {n}.",
                    data.n_features()
                ));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Shared state behind every session: registry, tables, ledger, settings.
pub struct Workbench {
    config: WorkbenchConfig,
    registry: SlotRegistry,
    algorithms: AlgorithmTable,
    qa: Arc<dyn QaBackend>,
    ledger: Ledger,
    clock: Arc<dyn Clock>,
}

impl std::fmt::Debug for Workbench {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workbench")
            .field("config", &self.config)
            .field("ledger", &self.ledger)
            .finish_non_exhaustive()
    }
}

impl Workbench {
    pub fn open(config: WorkbenchConfig) -> Result<Workbench, SessionError> {
        config.validate()?;
        let registry = match &config.registry {
            Some(p) => load_registry(File::open(p).map_err(|e| SessionError::io(p, e))?)?,
            None => SlotRegistry::builtin(),
        };
        let algorithms = match &config.algorithms {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| SessionError::io(p, e))?;
                AlgorithmTable::from_toml(&text)?
            }
            None => AlgorithmTable::builtin(),
        };
        algorithms.check_registry(&registry)?;
        if !config.data_dir.is_dir() {
            return Err(SessionError::Config(format!(
                "data directory {} does not exist",
                config.data_dir.display()
            )));
        }
        let ledger = Ledger::open(&config.ledger)?;
        Ok(Workbench {
            config,
            registry,
            algorithms,
            qa: Arc::new(LexicalQa::default()),
            ledger,
            clock: Arc::new(SystemClock::default()),
        })
    }

    pub fn with_clock(mut self, clock: impl Clock + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    pub fn with_qa(mut self, qa: impl QaBackend + 'static) -> Self {
        self.qa = Arc::new(qa);
        self
    }

    pub fn config(&self) -> &WorkbenchConfig {
        &self.config
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn registry(&self) -> &SlotRegistry {
        &self.registry
    }

    pub fn algorithms(&self) -> &AlgorithmTable {
        &self.algorithms
    }

    pub fn interpret(&self, command: &str) -> CommandFrame {
        interpret_command(command, &self.registry, &*self.qa, &self.algorithms)
    }

    /// Runs one command to completion, emitting every event on `io`.
    pub fn handle_command(&self, command: &str, io: &mut dyn SessionIo) -> CommandOutcome {
        let mut d = EventDialogue::new(io);
        match self.run(command.trim(), &mut d) {
            Ok(Some(result)) => {
                d.emit(SessionEvent::Result(Box::new(result.clone())));
                CommandOutcome::Completed(Box::new(result))
            }
            Ok(None) => CommandOutcome::Aborted,
            Err(e) => {
                let message = e.to_string();
                d.emit(SessionEvent::Error { message: message.clone() });
                CommandOutcome::Failed(message)
            }
        }
    }

    /// Asks the registry question for `key` until the answer is valid.
    fn ask_value(&self, d: &mut EventDialogue<'_>, key: &str) -> Result<String, SessionError> {
        let question = self
            .registry
            .first_question(key)
            .ok_or_else(|| SessionError::Config(format!("no question for {key}")))?
            .to_string();
        loop {
            let answer = d.ask_key(key, &question).ok_or(SessionError::Closed)?;
            let direct = canonical(key, &answer);
            let value = direct.clone().or_else(|e| {
                resolve_key(key, &answer, &self.registry, &*self.qa)
                    .ok()
                    .flatten()
                    .ok_or(e)
                    .and_then(|b| canonical(key, &b.value))
            });
            match value {
                Ok(v) => return Ok(v),
                Err(expected) => d.say(&format!("Please answer with {expected}.")),
            }
        }
    }

    fn run(&self, command: &str, d: &mut EventDialogue<'_>) -> Result<Option<ResultPayload>, SessionError> {
        if command.is_empty() {
            return Err(SessionError::EmptyCommand);
        }
        let mut frame = self.interpret(command);
        let problem = match problem_of(&frame) {
            Some(p) => p,
            None if frame.value("ACTION") == Some("PREPROCESS") => return self.run_preprocess(frame, d).map(Some),
            None => {
                let answer = d.ask_key("PROBLEM", PROBLEM_QUESTION).ok_or(SessionError::Closed)?;
                let p = answer
                    .trim()
                    .parse::<Problem>()
                    .ok()
                    .or_else(|| {
                        resolve_key("PROBLEM", &answer, &self.registry, &*self.qa)
                            .ok()
                            .flatten()
                            .and_then(|b| b.value.parse().ok())
                    })
                    .ok_or(SessionError::NoProblem)?;
                frame = interpret_as(command, Some(p), &self.registry, &*self.qa, &self.algorithms);
                frame.bind("PROBLEM", p.key_value(), 1.0);
                p
            }
        };
        let spec = self
            .algorithms
            .get(problem)
            .ok_or_else(|| SessionError::Config(format!("no algorithm entry for {problem}")))?
            .clone();

        for key in &spec.required_keys {
            if let Some(v) = frame.value(key).map(str::to_string) {
                match canonical(key, &v) {
                    Ok(c) => {
                        if c != v {
                            let conf = frame.bindings.get(key).map_or(1.0, |b| b.confidence);
                            frame.bind(key, c, conf);
                        }
                        continue;
                    }
                    Err(expected) => d.say(&format!("The value {v:?} for {key} is not {expected}.")),
                }
            }
            let v = self.ask_value(d, key)?;
            frame.bind(key, v, 1.0);
        }
        for opt in &spec.optional_keys {
            let Some(v) = frame.bindings.get(&opt.key).map(|b| b.value.clone()) else {
                continue;
            };
            match canonical(&opt.key, &v) {
                Ok(c) if c == v => {}
                Ok(c) => {
                    let conf = frame.bindings[&opt.key].confidence;
                    frame.bind(&opt.key, c, conf);
                }
                Err(expected) => {
                    d.say(&format!("The value {v:?} for {} is not {expected}.", opt.key));
                    let v = self.ask_value(d, &opt.key)?;
                    frame.bind(&opt.key, v, 1.0);
                }
            }
        }

        let data = loop {
            let name = frame.value("DATASET").expect("DATASET is required").to_string();
            let (_, data, _) = open_dataset(&self.config.data_dir, &name, d)?;
            match target_fits(problem, &data) {
                Ok(()) => break data,
                Err(why) => {
                    d.say(&format!("The {name} dataset {why}."));
                    let v = self.ask_value(d, "DATASET")?;
                    frame.bind("DATASET", v, 1.0);
                }
            }
        };
        let keys: Vec<String> = frame.bindings.keys().cloned().collect();
        for key in keys {
            while let Err(msg) = fits_dataset(&key, frame.value(&key).unwrap_or_default(), &data) {
                d.say(&msg);
                let v = self.ask_value(d, &key)?;
                frame.bind(&key, v, 1.0);
            }
        }

        let job = JobInfo {
            algorithm: problem.key_value().to_string(),
            dataset_name: data.name.clone(),
            n_rows: data.n_rows(),
            n_fields: data.n_features(),
        };
        let prospective = Prospective {
            algorithm: job.algorithm.clone(),
            dataset_name: job.dataset_name.clone(),
            n_rows: job.n_rows,
            n_fields: job.n_fields,
        };
        let records = self.ledger.records();
        let presentation = GatePresentation {
            estimate: predict_footprint(&job.algorithm, job.n_rows, job.n_fields, &self.ledger),
            similar: similar_requests(&prospective, &records, None),
            history_len: records.len(),
        };
        if confirm_gate(&presentation, d, self.config.auto_confirm) == GateDecision::Abort {
            d.say("The request was not launched.");
            return Ok(None);
        }

        let (output, record) = track(&self.ledger, &self.config.energy, &*self.clock, &job, || {
            dispatch(&frame, &data, &self.algorithms, &self.config.training)
        });
        let record = record?;
        let output = output?;
        let bundle = output.explain(&record.request_id, &data)?;
        let dir = bundle.write(&self.config.output_dir, &SvgRenderer)?;
        let mut files: Vec<String> = bundle.plots.iter().map(|p| p.file.clone()).collect();
        files.extend(bundle.tables.iter().map(|t| t.file.clone()));
        files.extend(bundle.latex_snippets.iter().map(|s| s.file.clone()));
        files.push(BUNDLE_INDEX.to_string());
        let summary = format!(
            "{} Request {} used {:.3} s and {} kg CO2. Explanations are in {}.",
            output.summary(&data),
            record.request_id,
            record.duration_s,
            crate::ghg::format_sci(record.emissions_kg, 3),
            dir.file_name().map_or_else(|| dir.display().to_string(), |f| f.to_string_lossy().into_owned())
        );
        Ok(Some(ResultPayload {
            kind: output.kind(),
            request_id: Some(record.request_id.clone()),
            dataset: data.name.clone(),
            frame,
            summary,
            details: output.details(),
            bundle: Some(record.request_id),
            files,
        }))
    }

    fn run_preprocess(&self, frame: CommandFrame, d: &mut EventDialogue<'_>) -> Result<ResultPayload, SessionError> {
        let mut frame = frame;
        let name = match frame.value("DATASET").map(|v| canonical("DATASET", v)) {
            Some(Ok(v)) => v,
            _ => {
                let v = self.ask_value(d, "DATASET")?;
                frame.bind("DATASET", v.clone(), 1.0);
                v
            }
        };
        let (schema, data) = preprocess(&self.config.data_dir, &name, d)?;
        let target = match &data.target {
            Target::None => "none",
            Target::Classes { .. } | Target::OneHot { .. } => "class",
            Target::Regression { .. } => "regression value",
        };
        Ok(ResultPayload {
            kind: ResultKind::Preprocess,
            request_id: None,
            dataset: name.clone(),
            frame,
            summary: format!(
                "The {name} dataset is preprocessed: {} rows, {} features, target: {target}.",
                data.n_rows(),
                data.n_features()
            ),
            details: json!({
                "rows": data.n_rows(),
                "features": data.feature_names,
                "target": target,
                "description": schema.dataset_description,
            }),
            bundle: None,
            files: vec![format!("{name}.json"), format!("{name}_preprocessed.csv")],
        })
    }
}
