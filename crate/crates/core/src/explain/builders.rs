use super::latex::{escape_latex, figure, table};
use super::{ExplainBundle, ExplainError, Plot, PlotKind, Series, Table};
use crate::engines::{ClusteringResult, CurveSet, ImportanceResult, ModelKind, PcaResult, Task};

fn plot(name: &str, kind: PlotKind, title: &str, x_label: &str, y_label: &str) -> Plot {
    Plot {
        name: name.to_string(),
        kind,
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: y_label.to_string(),
        categories: Vec::new(),
        series: Vec::new(),
        matrix: Vec::new(),
        reference: None,
        file: format!("plots/{name}.svg"),
    }
}

fn check_names(names: &[String], d: usize) -> Result<(), ExplainError> {
    if names.is_empty() {
        return Err(ExplainError::NoFeatureNames);
    }
    if names.len() != d {
        return Err(ExplainError::LengthMismatch { expected: d, actual: names.len() });
    }
    Ok(())
}

fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b })
}

fn argmin(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |b, (i, x)| if *x < v[b] { i } else { b })
}

/// Radar chart per cluster, silhouette plot (k >= 2) and the cluster table.
///
/// `data` supplies the per-feature min/max used to scale the radar axes.
pub fn explain_clustering(
    request_id: &str,
    result: &ClusteringResult,
    data: &[Vec<f64>],
    feature_names: &[String],
) -> Result<ExplainBundle, ExplainError> {
    let k = result.k();
    let d = result.centroids.first().map_or(0, Vec::len);
    check_names(feature_names, d)?;
    if data.len() != result.assignments.len() || data.iter().any(|r| r.len() != d) {
        return Err(ExplainError::InvalidResult("data does not match the assignments".into()));
    }
    if result.assignments.iter().any(|&a| a >= k) {
        return Err(ExplainError::InvalidResult("cluster index out of range".into()));
    }
    let n = data.len();
    let mins: Vec<f64> = (0..d).map(|j| data.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
    let maxs: Vec<f64> = (0..d).map(|j| data.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let sizes = result.cluster_sizes();
    let mut bundle = ExplainBundle::new(request_id);

    for (c, centroid) in result.centroids.iter().enumerate() {
        let scaled: Vec<f64> = centroid
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let range = maxs[j] - mins[j];
                if range > 0.0 { ((v - mins[j]) / range).clamp(0.0, 1.0) } else { 0.5 }
            })
            .collect();
        let name = format!("radar_cluster_{c}");
        let mut p = plot(&name, PlotKind::Radar, &format!("Cluster {c}"), "", "");
        p.categories = feature_names.to_vec();
        p.series.push(Series {
            name: format!("cluster {c}"),
            x: (0..d).map(|j| j as f64).collect(),
            y: scaled.clone(),
            band: None,
        });
        let (hi, lo) = (argmax(&scaled), argmin(&scaled));
        let text = format!(
            "Cluster {c} groups {} of the {n} rows ({:.1}\\%). On the min-max scaled axes its centroid is highest on {} ({:.2}) and lowest on {} ({:.2}).",
            sizes[c],
            100.0 * sizes[c] as f64 / n as f64,
            escape_latex(&feature_names[hi]),
            scaled[hi],
            escape_latex(&feature_names[lo]),
            scaled[lo],
        );
        let caption = format!("Centroid of cluster {c}, each feature scaled to [0,1] with the dataset range.");
        let snippet = figure(request_id, &p, &text, &caption);
        bundle.add_plot(p, snippet);
    }

    match (&result.silhouette_per_sample, result.silhouette_mean) {
        (Some(per_sample), Some(mean)) if k >= 2 => {
            let mut p = plot("silhouette", PlotKind::Silhouette, "Silhouette index", "silhouette value", "samples");
            let mut cluster_means = Vec::new();
            for c in 0..k {
                let mut vals: Vec<f64> = per_sample
                    .iter()
                    .zip(&result.assignments)
                    .filter(|(_, &a)| a == c)
                    .map(|(s, _)| *s)
                    .collect();
                vals.sort_by(|a, b| b.total_cmp(a));
                cluster_means.push(vals.iter().sum::<f64>() / vals.len().max(1) as f64);
                p.categories.push(format!("cluster {c}"));
                p.series.push(Series {
                    name: format!("cluster {c}"),
                    x: (0..vals.len()).map(|i| i as f64).collect(),
                    y: vals,
                    band: None,
                });
            }
            p.reference = Some(mean);
            let negative = per_sample.iter().filter(|&&s| s < 0.0).count();
            let per_cluster: Vec<String> = cluster_means
                .iter()
                .enumerate()
                .map(|(c, m)| format!("cluster {c}: {m:.3}"))
                .collect();
            let text = format!(
                "The mean silhouette index is {mean:.3}. Cluster means are {}. {negative} sample(s) have a negative value and may be closer to another cluster.",
                per_cluster.join(", ")
            );
            let caption = "Silhouette value of every sample, grouped by cluster; the dashed line marks the mean.";
            let snippet = figure(request_id, &p, &text, caption);
            bundle.add_plot(p, snippet);
        }
        _ => bundle
            .notes
            .push("silhouette undefined: it needs at least two clusters and fewer clusters than rows".into()),
    }

    let mut headers = vec!["Cluster".to_string(), "Size".to_string()];
    headers.extend(feature_names.iter().cloned());
    let rows = result
        .centroids
        .iter()
        .enumerate()
        .map(|(c, centroid)| {
            let mut r = vec![c.to_string(), sizes[c].to_string()];
            r.extend(centroid.iter().map(|v| format!("{v:.4}")));
            r
        })
        .collect();
    let t = Table {
        name: "clusters".into(),
        headers,
        rows,
        file: "tables/clusters.csv".into(),
    };
    let text = format!("The k-means clustering found {k} cluster(s) over {n} rows; the table lists their sizes and centroids.");
    let snippet = table(request_id, &t, &text, "Cluster sizes and centroid coordinates.");
    bundle.add_table(t, snippet);
    Ok(bundle)
}

/// Covariance heatmap of the input features and the explained-variance bar chart.
pub fn explain_pca(request_id: &str, result: &PcaResult, feature_names: &[String]) -> Result<ExplainBundle, ExplainError> {
    let d = result.covariance.len();
    check_names(feature_names, d)?;
    if result.explained_variance_ratio.is_empty() {
        return Err(ExplainError::InvalidResult("no components".into()));
    }
    let mut bundle = ExplainBundle::new(request_id);

    let mut heat = plot("covariance", PlotKind::Heatmap, "Covariance of the initial features", "", "");
    heat.categories = feature_names.to_vec();
    heat.matrix = result.covariance.clone();
    let variances: Vec<f64> = (0..d).map(|i| result.covariance[i][i]).collect();
    let top = argmax(&variances);
    let mut text = format!(
        "The covariance matrix of the {d} initial feature(s) is shown as a heatmap. The most variable feature is {} (variance {:.3}).",
        escape_latex(&feature_names[top]),
        variances[top]
    );
    let mut pair: Option<(usize, usize)> = None;
    for i in 0..d {
        for j in (i + 1)..d {
            if pair.is_none_or(|(a, b)| result.covariance[i][j].abs() > result.covariance[a][b].abs()) {
                pair = Some((i, j));
            }
        }
    }
    if let Some((a, b)) = pair {
        text.push_str(&format!(
            " The strongest covariance between two distinct features is between {} and {} ({:.3}).",
            escape_latex(&feature_names[a]),
            escape_latex(&feature_names[b]),
            result.covariance[a][b]
        ));
    }
    let snippet = figure(request_id, &heat, &text, "Covariance heatmap of the initial features.");
    bundle.add_plot(heat, snippet);

    let ratios = &result.explained_variance_ratio;
    let mut bars = plot("explained_variance", PlotKind::Bar, "Explained variance ratio", "component", "ratio");
    bars.categories = (1..=ratios.len()).map(|i| format!("PC{i}")).collect();
    bars.series.push(Series {
        name: "explained variance ratio".into(),
        x: (1..=ratios.len()).map(|i| i as f64).collect(),
        y: ratios.clone(),
        band: None,
    });
    let total: f64 = ratios.iter().sum();
    let text = format!(
        "The {} extracted component(s) retain {:.2}\\% of the total variance; the first component alone explains {:.2}\\%.",
        ratios.len(),
        100.0 * total,
        100.0 * ratios[0]
    );
    let snippet = figure(request_id, &bars, &text, "Explained variance ratio of each extracted component.");
    bundle.add_plot(bars, snippet);
    Ok(bundle)
}

/// Learning, performance and scalability curves.
pub fn explain_supervised(request_id: &str, curves: &CurveSet, kind: ModelKind) -> Result<ExplainBundle, ExplainError> {
    if curves.is_empty() {
        return Err(ExplainError::EmptyCurves);
    }
    let m = curves.len();
    if curves.train_scores.len() != m || curves.validation_scores.len() != m || curves.fit_times.len() != m {
        return Err(ExplainError::InvalidResult("curve arrays differ in length".into()));
    }
    let score = match kind {
        ModelKind::Classifier => "accuracy",
        ModelKind::Regressor => "R2 score",
    };
    let sizes: Vec<f64> = curves.train_sizes.iter().map(|&s| s as f64).collect();
    let series = |name: &str, x: &[f64], v: &[crate::engines::MeanStd]| Series {
        name: name.to_string(),
        x: x.to_vec(),
        y: v.iter().map(|s| s.mean).collect(),
        band: Some(v.iter().map(|s| s.std).collect()),
    };
    let (first, last) = (curves.train_sizes[0], curves.train_sizes[m - 1]);
    let mut bundle = ExplainBundle::new(request_id);

    let mut lc = plot("learning_curve", PlotKind::Line, "Learning curve", "training examples", score);
    lc.series.push(series("Training score", &sizes, &curves.train_scores));
    lc.series.push(series("Cross-validation score", &sizes, &curves.validation_scores));
    let (t, v) = (curves.train_scores[m - 1], curves.validation_scores[m - 1]);
    let gap = t.mean - v.mean;
    let verdict = if gap > 0.1 {
        "The gap between the two curves suggests over-fitting."
    } else if v.mean < 0.5 {
        "Both scores stay low, which suggests under-fitting."
    } else {
        "The two curves end close to each other."
    };
    let text = format!(
        "With {last} training rows the mean cross-validated {score} is {:.3} ($\\pm$ {:.3}) against {:.3} ($\\pm$ {:.3}) on the training rows. {verdict}",
        v.mean, v.std, t.mean, t.std
    );
    let snippet = figure(request_id, &lc, &text, &format!("Training and cross-validation {score} against the number of training rows."));
    bundle.add_plot(lc, snippet);

    let times: Vec<f64> = curves.fit_times.iter().map(|t| t.mean).collect();
    let mut perf = plot("performance", PlotKind::Line, "Performance of the model", "fit time (s)", score);
    perf.series.push(series("Cross-validation score", &times, &curves.validation_scores));
    let text = format!(
        "Cross-validated {score} against the mean fit time, for {m} training size(s) from {first} to {last} rows."
    );
    let snippet = figure(request_id, &perf, &text, &format!("Cross-validation {score} against fit time."));
    bundle.add_plot(perf, snippet);

    let mut scal = plot("scalability", PlotKind::Line, "Scalability of the model", "training examples", "fit time (s)");
    scal.series.push(series("Fit time", &sizes, &curves.fit_times));
    let text = format!("Mean fit time of the network for training sets of {first} to {last} rows.");
    let snippet = figure(request_id, &scal, &text, "Fit time against the number of training rows.");
    bundle.add_plot(scal, snippet);
    Ok(bundle)
}

/// Bar chart of normalized importances indexed by feature.
pub fn explain_importance(
    request_id: &str,
    result: &ImportanceResult,
    feature_names: &[String],
) -> Result<ExplainBundle, ExplainError> {
    check_names(feature_names, result.importances.len())?;
    let imp = &result.importances;
    let mut bars = plot("feature_importance", PlotKind::Bar, "Feature importance", "feature index", "normalized importance");
    bars.categories = (0..imp.len()).map(|i| i.to_string()).collect();
    bars.series.push(Series {
        name: "importance".into(),
        x: (0..imp.len()).map(|i| i as f64).collect(),
        y: imp.clone(),
        band: None,
    });
    let task = match result.task {
        Task::Classification => "classification",
        Task::Regression => "regression",
    };
    let listing: Vec<String> = feature_names
        .iter()
        .zip(imp)
        .enumerate()
        .map(|(i, (n, v))| format!("{i}: {} ({v:.3})", escape_latex(n)))
        .collect();
    let top = argmax(imp);
    let text = format!(
        "The dataset was detected as a {task} problem. Importances are normalized to sum to 1; the most important feature is {} ({:.3}). Index legend: {}.",
        escape_latex(&feature_names[top]),
        imp[top],
        listing.join("; ")
    );
    let mut bundle = ExplainBundle::new(request_id);
    let snippet = figure(request_id, &bars, &text, "Normalized importance of each feature, by feature index.");
    bundle.add_plot(bars, snippet);
    Ok(bundle)
}
