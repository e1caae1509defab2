//! Plots, tables and LaTeX text describing one request's result.

mod builders;
pub mod latex;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use builders::{explain_clustering, explain_importance, explain_pca, explain_supervised};
pub use latex::{check_latex, escape_latex, LatexError};
pub use svg::{PlotRenderer, SvgRenderer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Radar,
    Silhouette,
    Heatmap,
    Bar,
    Line,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Half-width of a shaded band around `y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plot {
    pub name: String,
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Axis or bar labels.
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub series: Vec<Series>,
    /// Heatmap cells.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrix: Vec<Vec<f64>>,
    /// Vertical reference line (silhouette mean).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    /// Path relative to the bundle directory.
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatexSnippet {
    pub name: String,
    /// Name of the plot or table it describes.
    pub describes: String,
    pub source: String,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExplainBundle {
    pub request_id: String,
    pub plots: Vec<Plot>,
    pub tables: Vec<Table>,
    pub latex_snippets: Vec<LatexSnippet>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExplainError {
    #[error("feature names are empty")]
    NoFeatureNames,
    #[error("expected {expected} names, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("curve set is empty")]
    EmptyCurves,
    #[error("invalid result: {0}")]
    InvalidResult(String),
    #[error("snippet {name}: {source}")]
    Latex { name: String, source: LatexError },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

pub const BUNDLE_INDEX: &str = "bundle.json";

impl ExplainBundle {
    pub fn new(request_id: &str) -> ExplainBundle {
        ExplainBundle {
            request_id: request_id.to_string(),
            ..Default::default()
        }
    }

    pub(crate) fn add_plot(&mut self, plot: Plot, snippet: String) {
        self.latex_snippets.push(LatexSnippet {
            name: plot.name.clone(),
            describes: plot.name.clone(),
            source: snippet,
            file: format!("latex/{}.tex", plot.name),
        });
        self.plots.push(plot);
    }

    pub(crate) fn add_table(&mut self, table: Table, snippet: String) {
        self.latex_snippets.push(LatexSnippet {
            name: table.name.clone(),
            describes: table.name.clone(),
            source: snippet,
            file: format!("latex/{}.tex", table.name),
        });
        self.tables.push(table);
    }

    pub fn plots_of(&self, kind: PlotKind) -> usize {
        self.plots.iter().filter(|p| p.kind == kind).count()
    }

    /// Every plot and table has a well-formed snippet that references it.
    pub fn validate(&self) -> Result<(), ExplainError> {
        let members = self.plots.iter().map(|p| &p.name).chain(self.tables.iter().map(|t| &t.name));
        for name in members {
            let snippet = self
                .latex_snippets
                .iter()
                .find(|s| &s.describes == name && s.source.contains(name.as_str()))
                .ok_or_else(|| ExplainError::InvalidResult(format!("no LaTeX snippet for {name}")))?;
            check_latex(&snippet.source).map_err(|source| ExplainError::Latex {
                name: snippet.name.clone(),
                source,
            })?;
        }
        for s in &self.latex_snippets {
            check_latex(&s.source).map_err(|source| ExplainError::Latex {
                name: s.name.clone(),
                source,
            })?;
        }
        Ok(())
    }

    /// Writes `<out_dir>/<request_id>/{plots,tables,latex}/…` and `bundle.json`.
    pub fn write(&self, out_dir: &Path, renderer: &dyn PlotRenderer) -> Result<PathBuf, ExplainError> {
        self.validate()?;
        let dir = out_dir.join(&self.request_id);
        let io = |p: &Path, e: std::io::Error| ExplainError::Io {
            path: p.to_path_buf(),
            message: e.to_string(),
        };
        for sub in ["plots", "tables", "latex"] {
            let p = dir.join(sub);
            fs::create_dir_all(&p).map_err(|e| io(&p, e))?;
        }
        for plot in &self.plots {
            let p = dir.join(&plot.file);
            fs::write(&p, renderer.render(plot)).map_err(|e| io(&p, e))?;
        }
        for table in &self.tables {
            let p = dir.join(&table.file);
            let mut w = csv::Writer::from_path(&p).map_err(|e| ExplainError::Io { path: p.clone(), message: e.to_string() })?;
            let csv_err = |e: csv::Error| ExplainError::Io { path: p.clone(), message: e.to_string() };
            w.write_record(&table.headers).map_err(csv_err)?;
            for r in &table.rows {
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush().map_err(|e| io(&p, e))?;
        }
        for s in &self.latex_snippets {
            let p = dir.join(&s.file);
            fs::write(&p, &s.source).map_err(|e| io(&p, e))?;
        }
        let p = dir.join(BUNDLE_INDEX);
        let json = serde_json::to_string_pretty(self).expect("bundle serializes");
        fs::write(&p, json + "\n").map_err(|e| io(&p, e))?;
        Ok(dir)
    }

    pub fn load(bundle_dir: &Path) -> Result<ExplainBundle, ExplainError> {
        let p = bundle_dir.join(BUNDLE_INDEX);
        let text = fs::read_to_string(&p).map_err(|e| ExplainError::Io {
            path: p.clone(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| ExplainError::Io {
            path: p,
            message: e.to_string(),
        })
    }
}
