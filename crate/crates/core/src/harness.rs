//! The experiment pipeline behind the command-line tool:
//!
//! 1. [`generate`] writes instance files plus a manifest;
//! 2. [`evaluate`] runs partitioners on every instance and records one
//!    [`ResultRow`] per (instance, method);
//! 3. [`summarize`] turns result rows into per-(node count, method, metric)
//!    means with 95% confidence intervals, plus a long-format table for
//!    plotting.
//!
//! All CSV files carry a `schema` column that is checked on read.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::channel::{generate_batch, ChannelInstance, ExperimentConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::partition::{
    approximate_partition, brute_force_partition, clumped_partition, power_partition, ExactSolver, Method,
    PartitionResult,
};
use crate::sinr::mrc_sinr_with;
use crate::stats::mean_ci;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const EVALUATION_FILE: &str = "evaluation.json";
pub const RESULTS_SCHEMA: &str = "dirgroup-results/1";
pub const SUMMARY_SCHEMA: &str = "dirgroup-summary/1";
pub const LONG_SCHEMA: &str = "dirgroup-long/1";

/// Seed of instance `index` among those with `nodes` nodes, derived from the
/// master seed with a SplitMix64 finalizer.
pub fn derive_seed(master: u64, nodes: usize, index: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ nodes as u64) ^ index as u64)
}

pub fn instance_file_name(nodes: usize, index: usize) -> String {
    format!("k{nodes:03}_i{index:03}.json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub nodes: usize,
    pub seed: u64,
}

/// Everything needed to reproduce a run: tool version, configuration, seeds
/// and the files written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub instances: Vec<ManifestEntry>,
    /// Total solve time per method in seconds; empty for generation runs.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub method_seconds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Writes `count` instances for each node count into `out_dir`. Instance
/// seeds come from [`derive_seed`]; `base.seed` is the master seed and
/// `base.num_nodes` is overridden per count.
pub fn generate(
    base: &ExperimentConfig,
    node_counts: &[usize],
    count: usize,
    out_dir: &Path,
    exec: Exec,
) -> Result<RunManifest> {
    base.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut entries = Vec::new();
    let mut configs = Vec::new();
    for &nodes in node_counts {
        for index in 0..count {
            let config = ExperimentConfig {
                num_nodes: nodes,
                seed: derive_seed(base.seed, nodes, index),
                ..base.clone()
            };
            config.validate()?;
            entries.push(ManifestEntry {
                file: instance_file_name(nodes, index),
                nodes,
                seed: config.seed,
            });
            configs.push(config);
        }
    }
    let instances = generate_batch(&configs, exec);
    for (entry, instance) in entries.iter().zip(instances) {
        instance?.write(&out_dir.join(&entry.file))?;
    }
    let manifest = RunManifest {
        tool_version: crate::VERSION.to_string(),
        config: base.clone(),
        master_seed: base.seed,
        instances: entries,
        method_seconds: BTreeMap::new(),
        outputs: Vec::new(),
    };
    manifest.write(&out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    pub methods: Vec<Method>,
    pub groups: usize,
    pub pilots: usize,
    /// Budget for each exact solve.
    pub timeout: Option<Duration>,
    pub exec: Exec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Timeout,
    Error,
}

/// One (instance, method) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema: String,
    pub instance: String,
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
    pub method: Method,
    pub status: Status,
    pub objective_b: Option<f64>,
    pub min_sinr_db: Option<f64>,
    pub mean_sinr_db: Option<f64>,
    pub max_sinr_db: Option<f64>,
    pub solve_time_s: Option<f64>,
    pub error: Option<String>,
}

impl ResultRow {
    fn failed(instance: &str, nodes: Option<usize>, seed: Option<u64>, method: Method, status: Status, err: String) -> Self {
        ResultRow {
            schema: RESULTS_SCHEMA.to_string(),
            instance: instance.to_string(),
            nodes,
            seed,
            method,
            status,
            objective_b: None,
            min_sinr_db: None,
            mean_sinr_db: None,
            max_sinr_db: None,
            solve_time_s: None,
            error: Some(err),
        }
    }
}

/// Runs one partitioner on an instance.
pub fn run_method(
    instance: &ChannelInstance,
    method: Method,
    groups: usize,
    pilots: usize,
    timeout: Option<Duration>,
    exec: Exec,
) -> Result<PartitionResult> {
    let nodes = &instance.profiles;
    match method {
        Method::Exact => {
            let mut solver = ExactSolver::default().with_exec(exec);
            solver.time_limit = timeout;
            solver.solve(nodes, groups, pilots)
        }
        Method::Approximation => approximate_partition(nodes, groups, pilots),
        Method::Clumped => clumped_partition(nodes, groups, pilots),
        Method::Power => power_partition(instance, groups, pilots),
        Method::BruteForce => brute_force_partition(nodes, groups, pilots),
    }
}

fn evaluate_instance(name: &str, loaded: &Result<ChannelInstance>, options: &EvaluateOptions) -> Vec<ResultRow> {
    let instance = match loaded {
        Ok(i) => i,
        Err(e) => {
            return options
                .methods
                .iter()
                .map(|&m| ResultRow::failed(name, None, None, m, Status::Error, e.to_string()))
                .collect()
        }
    };
    let nodes = Some(instance.num_nodes());
    let seed = Some(instance.config.seed);
    options
        .methods
        .iter()
        .map(|&method| {
            let outcome = run_method(instance, method, options.groups, options.pilots, options.timeout, options.exec)
                .and_then(|r| mrc_sinr_with(instance, &r.partition, Exec::Sequential).map(|s| (r, s)));
            match outcome {
                Ok((result, sinr)) => ResultRow {
                    schema: RESULTS_SCHEMA.to_string(),
                    instance: name.to_string(),
                    nodes,
                    seed,
                    method,
                    status: Status::Ok,
                    objective_b: Some(result.objective),
                    min_sinr_db: Some(sinr.min_db),
                    mean_sinr_db: Some(sinr.mean_db),
                    max_sinr_db: Some(sinr.max_db),
                    solve_time_s: Some(result.solve_time.as_secs_f64()),
                    error: None,
                },
                Err(Error::Timeout(elapsed)) => {
                    let mut row = ResultRow::failed(name, nodes, seed, method, Status::Timeout, "timed out".into());
                    row.solve_time_s = Some(elapsed.as_secs_f64());
                    row
                }
                Err(e) => ResultRow::failed(name, nodes, seed, method, Status::Error, e.to_string()),
            }
        })
        .collect()
}

/// Instance files of a directory in name order, manifests excluded.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().is_some_and(|n| n != MANIFEST_FILE && n != EVALUATION_FILE)
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Evaluates every instance in `in_dir` with every requested method. Rows come
/// back in (file name, method list) order whatever the completion order.
/// Unreadable files produce error rows rather than aborting the run.
pub fn evaluate(in_dir: &Path, options: &EvaluateOptions) -> Result<Vec<ResultRow>> {
    let files = instance_files(in_dir)?;
    let per_instance = exec::map_collect(options.exec, &files, |path| {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let loaded = ChannelInstance::read(path);
        evaluate_instance(&name, &loaded, options)
    });
    Ok(per_instance.into_iter().flatten().collect())
}

/// Total solve seconds per method over successful rows.
pub fn method_seconds(rows: &[ResultRow]) -> BTreeMap<String, f64> {
    let mut totals = BTreeMap::new();
    for row in rows {
        if let Some(t) = row.solve_time_s {
            *totals.entry(row.method.to_string()).or_insert(0.0) += t;
        }
    }
    totals
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

const RESULT_COLUMNS: [&str; 12] = [
    "schema",
    "instance",
    "nodes",
    "seed",
    "method",
    "status",
    "objective_b",
    "min_sinr_db",
    "mean_sinr_db",
    "max_sinr_db",
    "solve_time_s",
    "error",
];

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_csv(path, rows, &RESULT_COLUMNS)
}

/// Reads a results file, checking the header and the schema of every row.
/// Errors name the offending line.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let format_error = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(RESULT_COLUMNS) {
        return Err(format_error(format!(
            "line 1: expected columns {}, found {}",
            RESULT_COLUMNS.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row: ResultRow = record
            .deserialize(Some(&header))
            .map_err(|e| format_error(format!("line {line}: {e}")))?;
        if row.schema != RESULTS_SCHEMA {
            return Err(format_error(format!("line {line}: unsupported schema {:?}", row.schema)));
        }
        if row.status == Status::Ok
            && [row.nodes.map(|n| n as f64), row.objective_b, row.min_sinr_db, row.mean_sinr_db, row.max_sinr_db]
                .iter()
                .any(Option::is_none)
        {
            return Err(format_error(format!("line {line}: ok row with missing values")));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MinSinrDb,
    MeanSinrDb,
    MaxSinrDb,
    ObjectiveB,
    SolveTimeS,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::MinSinrDb,
        Metric::MeanSinrDb,
        Metric::MaxSinrDb,
        Metric::ObjectiveB,
        Metric::SolveTimeS,
    ];

    fn of(self, row: &ResultRow) -> Option<f64> {
        match self {
            Metric::MinSinrDb => row.min_sinr_db,
            Metric::MeanSinrDb => row.mean_sinr_db,
            Metric::MaxSinrDb => row.max_sinr_db,
            Metric::ObjectiveB => row.objective_b,
            Metric::SolveTimeS => row.solve_time_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schema: String,
    pub nodes: usize,
    pub method: Method,
    pub metric: Metric,
    pub n: usize,
    pub mean: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub schema: String,
    pub instance: String,
    pub nodes: usize,
    pub method: Method,
    pub metric: Metric,
    pub value: f64,
}

/// Means and 95% intervals per (node count, method, metric) over successful
/// rows, plus one long-format row per (row, metric).
pub fn summarize(rows: &[ResultRow]) -> (Vec<SummaryRow>, Vec<LongRow>) {
    let ok: Vec<&ResultRow> = rows.iter().filter(|r| r.status == Status::Ok).collect();
    let mut grouped: BTreeMap<(usize, Method), Vec<&ResultRow>> = BTreeMap::new();
    for r in &ok {
        if let Some(n) = r.nodes {
            grouped.entry((n, r.method)).or_default().push(r);
        }
    }
    let mut summary = Vec::new();
    for ((nodes, method), group) in &grouped {
        for metric in Metric::ALL {
            let samples: Vec<f64> = group.iter().filter_map(|r| metric.of(r)).collect();
            if samples.is_empty() {
                continue;
            }
            let ci = mean_ci(&samples);
            summary.push(SummaryRow {
                schema: SUMMARY_SCHEMA.to_string(),
                nodes: *nodes,
                method: *method,
                metric,
                n: ci.n,
                mean: ci.mean,
                ci_low: ci.lower(),
                ci_high: ci.upper(),
                half_width: ci.half_width,
            });
        }
    }
    let long = ok
        .iter()
        .flat_map(|r| {
            Metric::ALL.into_iter().filter_map(move |metric| {
                Some(LongRow {
                    schema: LONG_SCHEMA.to_string(),
                    instance: r.instance.clone(),
                    nodes: r.nodes?,
                    method: r.method,
                    metric,
                    value: metric.of(r)?,
                })
            })
        })
        .collect();
    (summary, long)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_csv(
        path,
        rows,
        &["schema", "nodes", "method", "metric", "n", "mean", "ci_low", "ci_high", "half_width"],
    )
}

pub fn write_long(path: &Path, rows: &[LongRow]) -> Result<()> {
    write_csv(path, rows, &["schema", "instance", "nodes", "method", "metric", "value"])
}
