//! The churn experiment: preprocessing, PCA scan, quantum vs classical SVM
//! runs, and a markdown report. Every stage reads its inputs from and writes
//! its outputs to `output_dir`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{
    binary_labels, find_elbow, label_encode, load_churn_csv, one_hot_encode, pca_fit, pca_transform,
    pearson_correlation, stratified_sample, train_test_split, undersample, Column, ElbowRule,
    FeatureMatrix, VifMode,
};
use crate::encoding::{Entanglement, FeatureMapKind, FeatureMapSpec, MinMaxScaler};
use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, save_kernel, KernelMode};
use crate::ml::{accuracy, rbf_gamma_scale, save_model, svm_fit, svm_predict, SvmKernel};
use crate::quantum::MAX_QUBITS;
use crate::rng::sub_seed;

pub const FEATURES_FILE: &str = "features.csv";
pub const PREPROCESS_REPORT_FILE: &str = "preprocess_report.json";
pub const EXPLAINED_VARIANCE_FILE: &str = "explained_variance.csv";
pub const ELBOW_SVG_FILE: &str = "elbow.svg";
pub const ELBOW_REPORT_FILE: &str = "elbow.json";
pub const METRICS_JSON_FILE: &str = "metrics.json";
pub const METRICS_CSV_FILE: &str = "metrics.csv";
pub const TIMINGS_FILE: &str = "timings.json";
pub const REPORT_FILE: &str = "report.md";

const LABEL_COLUMN: &str = "label";
const TARGET: &str = "Churn";
const POSITIVE: &str = "Yes";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum KernelModeName {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureMapConfig {
    pub kind: FeatureMapKind,
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl Default for FeatureMapConfig {
    fn default() -> Self {
        FeatureMapConfig {
            kind: FeatureMapKind::Zz,
            reps: 2,
            entanglement: Entanglement::Linear,
        }
    }
}

/// All experiment settings. Missing JSON fields take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub seed: u64,
    pub pca_dims: Vec<usize>,
    pub svm_c: f64,
    pub feature_map: FeatureMapConfig,
    pub kernel_mode: KernelModeName,
    pub shots: u64,
    /// `(train, test)` rows for the quantum kernels; `None` uses the full split.
    pub quantum_subsample: Option<(usize, usize)>,
    pub train_ratio: f64,
    /// Thread count for kernel evaluation; 0 picks the number of CPUs.
    pub workers: usize,
    pub output_dir: PathBuf,
    pub identifier_columns: Vec<String>,
    /// Dropped after the correlation check.
    pub correlation_drops: Vec<String>,
    /// Dropped one at a time, in order, after each VIF round.
    pub vif_drops: Vec<String>,
    pub vif_mode: VifMode,
    pub elbow_rule: ElbowRule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset_path: PathBuf::from("data/telco_churn.csv"),
            seed: 42,
            pca_dims: vec![2, 10, 15],
            svm_c: 1.0,
            feature_map: FeatureMapConfig::default(),
            kernel_mode: KernelModeName::Exact,
            shots: 4096,
            quantum_subsample: Some((800, 200)),
            train_ratio: 0.8,
            workers: 0,
            output_dir: PathBuf::from("out"),
            identifier_columns: vec!["customerID".into()],
            correlation_drops: vec!["TotalCharges".into()],
            vif_drops: vec!["PhoneService".into(), "MonthlyCharges".into()],
            vif_mode: VifMode::Uncentered,
            elbow_rule: ElbowRule::LogDrop,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn effective_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    fn feature_map(&self, dim: usize) -> Result<FeatureMapSpec> {
        FeatureMapSpec::new(self.feature_map.kind, dim, self.feature_map.reps, self.feature_map.entanglement)
    }

    fn validate_dims(&self, columns: usize) -> Result<()> {
        if self.pca_dims.is_empty() {
            return Err(Error::Argument("pca_dims is empty".into()));
        }
        for &d in &self.pca_dims {
            if d == 0 || d > MAX_QUBITS {
                return Err(Error::Capacity(format!(
                    "PCA dimension {d}: quantum kernels support 1 to {MAX_QUBITS} qubits"
                )));
            }
            if d > columns {
                return Err(Error::Capacity(format!(
                    "PCA dimension {d} exceeds the {columns} encoded columns"
                )));
            }
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    text.push('\n');
    write_file(path, text)
}

fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D> {
    let text = read_artifact(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read_artifact(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- preprocess

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropRecord {
    pub column: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VifRound {
    /// VIF per column; `null` marks perfect collinearity.
    pub values: BTreeMap<String, Option<f64>>,
    /// Column removed after this round, if any.
    pub dropped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub dataset: String,
    pub seed: u64,
    pub rows_ingested: usize,
    pub class_counts: BTreeMap<String, usize>,
    pub missing_total_charges: usize,
    pub correlations: BTreeMap<String, f64>,
    pub vif_mode: VifMode,
    pub vif_rounds: Vec<VifRound>,
    pub drops: Vec<DropRecord>,
    pub encoded_columns: usize,
    pub column_names: Vec<String>,
    pub rows_after_undersampling: usize,
    pub class_counts_after_undersampling: BTreeMap<String, usize>,
}

impl PreprocessReport {
    pub fn drop_list(&self) -> Vec<&str> {
        self.drops.iter().map(|d| d.column.as_str()).collect()
    }
}

fn class_counts(labels: &[i8]) -> BTreeMap<String, usize> {
    let pos = labels.iter().filter(|l| **l > 0).count();
    BTreeMap::from([("No".to_string(), labels.len() - pos), ("Yes".to_string(), pos)])
}

pub fn preprocess(config: &ExperimentConfig) -> Result<PreprocessReport> {
    let table = load_churn_csv(&config.dataset_path)?;
    let labels = binary_labels(&table, TARGET, POSITIVE)?;
    let total = table.numeric("TotalCharges")?;

    let mut correlations = BTreeMap::new();
    for other in ["tenure", "MonthlyCharges"] {
        let r = pearson_correlation(table.numeric(other)?, total)?;
        correlations.insert(format!("{other}~TotalCharges"), r);
    }

    let mut drops: Vec<DropRecord> = config
        .correlation_drops
        .iter()
        .map(|c| DropRecord {
            column: c.clone(),
            reason: format!(
                "highly correlated with tenure (r = {:.4})",
                correlations["tenure~TotalCharges"]
            ),
        })
        .collect();
    let mut removed: Vec<&str> = config
        .identifier_columns
        .iter()
        .chain(&config.correlation_drops)
        .map(String::as_str)
        .collect();
    removed.push(TARGET);

    let mut vif_rounds = Vec::new();
    let mut vif_removed: Vec<&str> = Vec::new();
    let vif_drops: Vec<&str> = config.vif_drops.iter().map(String::as_str).collect();
    for round in 0..=config.vif_drops.len() {
        let current = table.without(&[removed.as_slice(), vif_removed.as_slice()].concat());
        let names: Vec<&str> = current.column_names().iter().map(String::as_str).collect();
        let encoded = label_encode::<f64>(&current, &names)?;
        let values = crate::data::vif(&encoded, config.vif_mode)?;
        let values: BTreeMap<String, Option<f64>> = names
            .iter()
            .zip(values)
            .map(|(n, v)| (n.to_string(), v.is_finite().then_some(v)))
            .collect();
        let dropped = vif_drops.get(round).copied();
        if let Some(col) = dropped {
            let score = values.get(col).ok_or_else(|| Error::Schema(col.to_string()))?;
            drops.push(DropRecord {
                column: col.to_string(),
                reason: match score {
                    Some(v) => format!("variance inflation factor {v:.2}"),
                    None => "perfectly collinear (infinite VIF)".into(),
                },
            });
            vif_removed.push(col);
        }
        vif_rounds.push(VifRound {
            values,
            dropped: dropped.map(str::to_string),
        });
    }
    for id in &config.identifier_columns {
        drops.push(DropRecord {
            column: id.clone(),
            reason: "identifier, no predictive content".into(),
        });
    }

    let kept = table.without(&[removed.as_slice(), vif_removed.as_slice()].concat());
    let mut categorical = Vec::new();
    let mut passthrough = Vec::new();
    for name in kept.column_names() {
        match kept.column(name)? {
            Column::Text(_) => categorical.push(name.as_str()),
            Column::Numeric(_) => passthrough.push(name.as_str()),
        }
    }
    let encoded = one_hot_encode::<f64>(&kept, &categorical, &passthrough)?;
    let (features, sampled_labels) = undersample(&encoded, &labels, config.seed)?;
    write_features(&config.out(FEATURES_FILE), &features, &sampled_labels)?;

    let report = PreprocessReport {
        dataset: config.dataset_path.display().to_string(),
        seed: config.seed,
        rows_ingested: table.row_count(),
        class_counts: class_counts(&labels),
        missing_total_charges: total.iter().filter(|v| v.is_none()).count(),
        correlations,
        vif_mode: config.vif_mode,
        vif_rounds,
        drops,
        encoded_columns: features.ncols(),
        column_names: features.column_names().to_vec(),
        rows_after_undersampling: features.nrows(),
        class_counts_after_undersampling: class_counts(&sampled_labels),
    };
    write_json(&config.out(PREPROCESS_REPORT_FILE), &report)?;
    Ok(report)
}

/// Feature columns then a `label` column of `-1`/`1`.
pub fn write_features(path: &Path, features: &FeatureMatrix<f64>, labels: &[i8]) -> Result<()> {
    let mut out = String::new();
    let mut header: Vec<&str> = features.column_names().iter().map(String::as_str).collect();
    header.push(LABEL_COLUMN);
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, l) in labels.iter().enumerate() {
        for v in features.row(i) {
            write!(out, "{v},").unwrap();
        }
        writeln!(out, "{l}").unwrap();
    }
    write_file(path, out)
}

pub fn read_features(path: &Path) -> Result<(FeatureMatrix<f64>, Vec<i8>)> {
    let text = read_artifact(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.last().map(String::as_str) != Some(LABEL_COLUMN) {
        return Err(Error::Schema(LABEL_COLUMN.into()));
    }
    let d = header.len() - 1;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (j, cell) in rec.iter().enumerate() {
            let parse_err = || Error::Parse {
                row: row + 1,
                column: header[j].clone(),
                message: format!("`{cell}` is not a number"),
            };
            if j == d {
                labels.push(cell.parse::<i8>().map_err(|_| parse_err())?);
            } else {
                values.push(cell.parse::<f64>().map_err(|_| parse_err())?);
            }
        }
    }
    let values = Array2::from_shape_vec((labels.len(), d), values).map_err(|e| Error::Shape(e.to_string()))?;
    Ok((FeatureMatrix::new(values, header[..d].to_vec())?, labels))
}

// ------------------------------------------------------------------ pca scan

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElbowReport {
    pub rule: ElbowRule,
    pub elbow_index: usize,
    pub cumulative_at_elbow: f64,
    pub cumulative_full_rank: f64,
    pub ratios: Vec<f64>,
}

pub fn pca_scan(config: &ExperimentConfig) -> Result<ElbowReport> {
    let (features, _) = read_features(&config.out(FEATURES_FILE))?;
    let model = pca_fit(&features, features.ncols())?;
    let ratios = model.explained_variance_ratio.to_vec();
    let cumulative: Vec<f64> = ratios
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect();
    let elbow = find_elbow(&ratios, config.elbow_rule)?;

    let mut csv = String::from("component,ratio,cumulative\n");
    for (k, (r, c)) in ratios.iter().zip(&cumulative).enumerate() {
        writeln!(csv, "{},{r},{c}", k + 1).unwrap();
    }
    write_file(&config.out(EXPLAINED_VARIANCE_FILE), csv)?;
    write_file(&config.out(ELBOW_SVG_FILE), elbow_svg(&ratios, &cumulative, elbow))?;

    let report = ElbowReport {
        rule: config.elbow_rule,
        elbow_index: elbow,
        cumulative_at_elbow: cumulative[elbow - 1],
        cumulative_full_rank: *cumulative.last().expect("at least one component"),
        ratios,
    };
    write_json(&config.out(ELBOW_REPORT_FILE), &report)?;
    Ok(report)
}

/// Cumulative explained variance (line) and per-component ratio (bars) with
/// the elbow marked.
pub fn elbow_svg(ratios: &[f64], cumulative: &[f64], elbow: usize) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 20.0, 30.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let n = ratios.len().max(1) as f64;
    let x = |k: usize| left + pw * (k as f64 - 0.5) / n;
    let y = |v: f64| top + ph * (1.0 - v.clamp(0.0, 1.05) / 1.05);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        top + ph,
        left + pw,
        top + ph
    )
    .unwrap();
    writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#, top + ph).unwrap();
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{tick:.2}</text>"#,
            left - 6.0,
            y(tick) + 4.0
        )
        .unwrap();
    }
    let bar = (pw / n * 0.6).max(1.0);
    for (k, r) in ratios.iter().enumerate() {
        writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{bar:.2}" height="{:.2}" fill="#9ecae1"/>"##,
            x(k + 1) - bar / 2.0,
            y(*r),
            top + ph - y(*r)
        )
        .unwrap();
    }
    let points: Vec<String> = cumulative
        .iter()
        .enumerate()
        .map(|(k, c)| format!("{:.2},{:.2}", x(k + 1), y(*c)))
        .collect();
    writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#08519c" stroke-width="2"/>"##,
        points.join(" ")
    )
    .unwrap();
    if elbow >= 1 && elbow <= cumulative.len() {
        let (ex, ey) = (x(elbow), y(cumulative[elbow - 1]));
        writeln!(s, r##"<circle cx="{ex:.2}" cy="{ey:.2}" r="6" fill="none" stroke="#d62728" stroke-width="2"/>"##).unwrap();
        writeln!(
            s,
            r##"<text x="{ex:.2}" y="{:.2}" fill="#d62728" text-anchor="middle">elbow {elbow}</text>"##,
            ey - 12.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">principal component</text>"#,
        left + pw / 2.0,
        h - 12.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">explained variance</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

// ----------------------------------------------------------------------- run

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Quantum,
    Classical,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Quantum => "QUANTUM",
            Method::Classical => "CLASSICAL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub pca_dim: usize,
    pub method: Method,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub support_vectors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub feature_map: String,
    pub kernel_mode: KernelModeName,
    pub svm_c: f64,
    pub rows: Vec<MetricsRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub pca_dim: usize,
    pub method: Method,
    pub wall_seconds: f64,
}

fn labels_pm(y: &[i8], idx: &[usize]) -> Vec<i8> {
    idx.iter().map(|&i| y[i]).collect()
}

pub fn run(config: &ExperimentConfig) -> Result<MetricsReport> {
    let features_path = config.out(FEATURES_FILE);
    if !features_path.exists() {
        return Err(Error::MissingArtifact(features_path));
    }
    // cheap header read so bad dims fail before any compute
    let header = read_artifact(&features_path)?;
    let columns = header.lines().next().map_or(0, |l| l.split(',').count().saturating_sub(1));
    config.validate_dims(columns)?;
    if !(config.svm_c > 0.0) {
        return Err(Error::Argument(format!("svm_c must be > 0, got {}", config.svm_c)));
    }

    let (features, labels) = read_features(&features_path)?;
    let split = train_test_split(features.nrows(), config.train_ratio, config.seed, Some(&labels))?;
    let train = features.select_rows(&split.train);
    let test = features.select_rows(&split.test);
    let y_train = labels_pm(&labels, &split.train);
    let y_test = labels_pm(&labels, &split.test);

    // positions inside the train/test split used for the quantum kernels
    let (q_train, q_test): (Vec<usize>, Vec<usize>) = match config.quantum_subsample {
        Some((n_tr, n_te)) => (
            stratified_sample(&y_train, n_tr.min(y_train.len()), sub_seed(config.seed, 1))?,
            stratified_sample(&y_test, n_te.min(y_test.len()), sub_seed(config.seed, 2))?,
        ),
        None => ((0..y_train.len()).collect(), (0..y_test.len()).collect()),
    };
    let q_train_ids: Vec<String> = q_train.iter().map(|&i| split.train[i].to_string()).collect();
    let q_test_ids: Vec<String> = q_test.iter().map(|&i| split.test[i].to_string()).collect();
    let qy_train = labels_pm(&y_train, &q_train);
    let qy_test = labels_pm(&y_test, &q_test);

    let workers = config.effective_workers();
    let pi = std::f64::consts::PI;
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut descriptor = String::new();

    for &dim in &config.pca_dims {
        let pca = pca_fit(&train, dim)?;
        let names: Vec<String> = (1..=dim).map(|k| format!("pc{k}")).collect();
        let s_train = FeatureMatrix::new(pca_transform(&pca, train.values())?, names.clone())?;
        let s_test = FeatureMatrix::new(pca_transform(&pca, test.values())?, names)?;
        let scaler = MinMaxScaler::fit(&s_train, 0.0, pi)?;
        let x_train = scaler.transform(&s_train)?;
        let x_test = scaler.transform(&s_test)?;

        // classical RBF on the full split
        let started = Instant::now();
        let gamma = rbf_gamma_scale(x_train.values())?;
        let classical = svm_fit(x_train.values(), &y_train, config.svm_c, SvmKernel::Rbf { gamma })?;
        let (p_train, _) = svm_predict(&classical, x_train.values())?;
        let (p_test, _) = svm_predict(&classical, x_test.values())?;
        rows.push(MetricsRow {
            pca_dim: dim,
            method: Method::Classical,
            train_accuracy: accuracy(&p_train, &y_train)?,
            test_accuracy: accuracy(&p_test, &y_test)?,
            train_size: y_train.len(),
            test_size: y_test.len(),
            support_vectors: classical.support_indices.len(),
        });
        save_model(&classical, &config.out(&format!("svm_classical_pca{dim}.txt")))?;
        timings.push(TimingRow {
            pca_dim: dim,
            method: Method::Classical,
            wall_seconds: started.elapsed().as_secs_f64(),
        });

        // quantum fidelity kernel on the subsample
        let started = Instant::now();
        let spec = config.feature_map(dim)?;
        descriptor = spec.to_string();
        let qx_train = x_train.select_rows(&q_train);
        let qx_test = x_test.select_rows(&q_test);
        let (mode_train, mode_test) = match config.kernel_mode {
            KernelModeName::Exact => (KernelMode::Exact, KernelMode::Exact),
            KernelModeName::Sampled => (
                KernelMode::Sampled {
                    shots: config.shots,
                    seed: sub_seed(config.seed, 3),
                },
                KernelMode::Sampled {
                    shots: config.shots,
                    seed: sub_seed(config.seed, 4),
                },
            ),
        };
        let k_train = kernel_matrix(&spec, &qx_train, None, mode_train, workers)?
            .with_ids(q_train_ids.clone(), q_train_ids.clone())?;
        let k_test = kernel_matrix(&spec, &qx_test, Some(&qx_train), mode_test, workers)?
            .with_ids(q_test_ids.clone(), q_train_ids.clone())?;
        save_kernel(&k_train, &config.out(&format!("kernel_train_pca{dim}.txt")))?;
        save_kernel(&k_test, &config.out(&format!("kernel_test_pca{dim}.txt")))?;
        let quantum = svm_fit(k_train.values.view(), &qy_train, config.svm_c, SvmKernel::Precomputed)?;
        let (p_train, _) = svm_predict(&quantum, k_train.values.view())?;
        let (p_test, _) = svm_predict(&quantum, k_test.values.view())?;
        rows.push(MetricsRow {
            pca_dim: dim,
            method: Method::Quantum,
            train_accuracy: accuracy(&p_train, &qy_train)?,
            test_accuracy: accuracy(&p_test, &qy_test)?,
            train_size: qy_train.len(),
            test_size: qy_test.len(),
            support_vectors: quantum.support_indices.len(),
        });
        save_model(&quantum, &config.out(&format!("svm_quantum_pca{dim}.txt")))?;
        timings.push(TimingRow {
            pca_dim: dim,
            method: Method::Quantum,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
    }

    let report = MetricsReport {
        seed: config.seed,
        feature_map: descriptor,
        kernel_mode: config.kernel_mode,
        svm_c: config.svm_c,
        rows,
    };
    write_json(&config.out(METRICS_JSON_FILE), &report)?;
    write_file(&config.out(METRICS_CSV_FILE), metrics_csv(&report))?;
    write_json(&config.out(TIMINGS_FILE), &timings)?;
    Ok(report)
}

pub fn metrics_csv(report: &MetricsReport) -> String {
    let mut s = String::from("pca_dim,method,train_accuracy,test_accuracy,train_size,test_size,support_vectors\n");
    for r in &report.rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.pca_dim, r.method, r.train_accuracy, r.test_accuracy, r.train_size, r.test_size, r.support_vectors
        )
        .unwrap();
    }
    s
}

// -------------------------------------------------------------------- report

/// Train/test gap above which a row is flagged as overfitting.
pub const GAP_FLAG: f64 = 0.15;

pub fn load_metrics(config: &ExperimentConfig) -> Result<MetricsReport> {
    read_json(&config.out(METRICS_JSON_FILE))
}

pub fn render_report(metrics: &MetricsReport) -> Result<String> {
    if metrics.rows.is_empty() {
        return Err(Error::Argument("metrics file contains no rows".into()));
    }
    let mut dims: Vec<usize> = metrics.rows.iter().map(|r| r.pca_dim).collect();
    dims.sort_unstable();
    dims.dedup();

    let mut s = String::from("# Quantum vs classical SVM\n\n");
    writeln!(
        s,
        "Seed {}, feature map `{}`, kernel mode {:?}, C = {}.\n",
        metrics.seed, metrics.feature_map, metrics.kernel_mode, metrics.svm_c
    )
    .unwrap();
    s.push_str("| PCA | Method | Split | Accuracy |\n|---:|---|---|---:|\n");
    let mut flags = Vec::new();
    for d in &dims {
        for method in [Method::Quantum, Method::Classical] {
            for r in metrics.rows.iter().filter(|r| r.pca_dim == *d && r.method == method) {
                writeln!(s, "| {} | {} | train | {} |", r.pca_dim, r.method, r.train_accuracy).unwrap();
                writeln!(s, "| {} | {} | test | {} |", r.pca_dim, r.method, r.test_accuracy).unwrap();
                let gap = r.train_accuracy - r.test_accuracy;
                if method == Method::Quantum && gap >= GAP_FLAG {
                    flags.push(format!(
                        "- PCA {}: quantum train/test gap {:.4} suggests overfitting",
                        r.pca_dim, gap
                    ));
                }
            }
        }
    }
    if !flags.is_empty() {
        s.push('\n');
        for f in flags {
            s.push_str(&f);
            s.push('\n');
        }
    }
    Ok(s)
}

/// Renders `metrics.json` to `report.md` and returns the text.
pub fn report(config: &ExperimentConfig) -> Result<String> {
    let text = render_report(&load_metrics(config)?)?;
    write_file(&config.out(REPORT_FILE), &text)?;
    Ok(text)
}
