//! Mode dispatch, parallel chains and output assembly.

use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use scalemix::gsm::{recommend_mixing, run_chain, GsmRun};
use scalemix::mixed::{run_mixed_chain, MixedData, MixedRun};
use scalemix::sim::{self, SignTable};
use scalemix::{PosteriorSummary, SummaryAccumulator};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ColumnSchema, ConfigFile, Mode, RunConfig, SimModel, SimPreset, SimulateSettings};
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest, read_table, Dataset};
use crate::output::{self, write};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SCALEMIX_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub mode: Mode,
    /// Files written, relative to the output directory, in write order.
    pub files: Vec<String>,
    /// Short human-readable result line.
    pub message: String,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> CliResult<()> {
        write(self.dir, name, contents)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

pub fn worker_threads() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

/// Runs `f(seed_k)` for every chain, in parallel, returning results in
/// chain order.
fn run_chains<T, F>(cfg: &RunConfig, f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> CliResult<T> + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_threads()? {
        builder = builder.num_threads(n.min(cfg.chains));
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| {
        (0..cfg.chains)
            .into_par_iter()
            .map(|k| f(cfg.chain_seed(k)))
            .collect()
    })
}

fn merge<'a>(accs: impl IntoIterator<Item = &'a SummaryAccumulator>) -> CliResult<SummaryAccumulator> {
    let mut it = accs.into_iter();
    let mut out = it.next().expect("at least one chain").clone();
    for a in it {
        out.merge(a)?;
    }
    Ok(out)
}

pub fn orchestrate(cfg: &RunConfig) -> CliResult<RunReport> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    let mut w = Writer {
        dir: &cfg.output_dir,
        files: Vec::new(),
    };
    let message = match cfg.mode {
        Mode::FitContinuous => fit_continuous(cfg, &mut w)?,
        Mode::FitMixed => fit_mixed(cfg, &mut w)?,
        Mode::Simulate => simulate(cfg, &mut w)?,
        Mode::Evaluate => evaluate(cfg, &mut w)?,
        Mode::DiagnoseTails => diagnose_tails(cfg, &mut w)?,
    };
    Ok(RunReport {
        mode: cfg.mode,
        files: w.files,
        message,
    })
}

fn load(cfg: &RunConfig) -> CliResult<Dataset> {
    ingest(cfg.data_path()?, cfg.file.columns.as_deref(), cfg.standardize)
}

fn load_truth(cfg: &RunConfig, q: usize) -> CliResult<Option<DMatrix<f64>>> {
    let Some(path) = &cfg.truth else {
        return Ok(None);
    };
    let t = read_table(path)?.values;
    if t.shape() != (q, q) {
        return Err(CliError::SchemaMismatch(format!(
            "truth is {}x{}, expected {q}x{q}",
            t.nrows(),
            t.ncols()
        )));
    }
    Ok(Some(t))
}

fn table_json(t: &SignTable) -> Value {
    let [zero, pos, neg] = t.ratios();
    json!({
        "counts": t,
        "ratios": { "zero": zero, "positive": pos, "negative": neg },
    })
}

fn sign_counts(m: &DMatrix<i8>) -> Value {
    let count = |s: i8| m.iter().filter(|&&x| x == s).count();
    json!({ "zero": count(0), "positive": count(1), "negative": count(-1) })
}

/// Writes the outputs shared by both fitted models.
fn write_fit(
    cfg: &RunConfig,
    w: &mut Writer,
    model: &str,
    ds: &Dataset,
    summary: &PosteriorSummary,
    acceptance: Vec<Value>,
) -> CliResult<String> {
    let names = &ds.names;
    w.put("edge_prob.csv", &output::matrix_csv(names, &summary.edge_prob))?;
    w.put("mean_precision.csv", &output::matrix_csv(names, &summary.mean_precision))?;
    w.put("sign_class.csv", &output::int_matrix_csv(names, &summary.sign_class))?;
    w.put("loglik_trace.csv", &output::trace_csv(&summary.loglik_trace))?;
    let edges = summary.selected_edges();
    w.put("edges.txt", &output::edge_list(&edges))?;

    let mut s = json!({
        "mode": cfg.mode.name(),
        "model": model,
        "num_rows": ds.values.nrows(),
        "num_vars": ds.values.ncols(),
        "variables": names,
        "iters": cfg.iters,
        "burnin": cfg.burnin,
        "chains": cfg.chains,
        "seeds": (0..cfg.chains).map(|k| cfg.chain_seed(k)).collect::<Vec<_>>(),
        "standardize": cfg.standardize,
        "threshold": summary.threshold,
        "num_samples": summary.num_samples,
        "num_edges": edges.len(),
        "sign_counts": sign_counts(&summary.sign_class),
        "acceptance": acceptance,
    });
    let mut message = format!(
        "{model}: {} edges above {} from {} draws",
        edges.len(),
        summary.threshold,
        summary.num_samples
    );
    if let Some(truth) = load_truth(cfg, ds.values.ncols())? {
        let t = sim::sign_detection_table(&summary.sign_class, &truth)?;
        let [z, p, n] = t.ratios();
        message.push_str(&format!("; sign ratios {z:.4} {p:.4} {n:.4}"));
        s["sign_table"] = table_json(&t);
    }
    w.put("summary.json", &output::json(&s)?)?;
    Ok(message)
}

fn fit_continuous(cfg: &RunConfig, w: &mut Writer) -> CliResult<String> {
    let ds = load(cfg)?;
    if let Some(&j) = ds.discrete_indices().first() {
        return Err(CliError::SchemaMismatch(format!(
            "fit-continuous needs continuous columns; {:?} is discrete (use fit-mixed)",
            ds.names[j]
        )));
    }
    let margins: Vec<_> = ds.columns.iter().map(ColumnSchema::margin).collect();
    let runs: Vec<GsmRun> = run_chains(cfg, |seed| {
        let c = cfg.file.gsm.build(margins.clone(), cfg.iters, cfg.burnin, seed)?;
        Ok(run_chain(&ds.values, &c)?)
    })?;
    let summary = merge(runs.iter().map(|r| &r.accumulator))?.summarize(cfg.threshold)?;
    w.put(
        "scales.csv",
        &output::row_csv(&ds.names, summary.scale_means.as_slice()),
    )?;
    let acceptance = runs
        .iter()
        .enumerate()
        .map(|(k, r)| {
            json!({
                "seed": cfg.chain_seed(k),
                "graph": r.diagnostics.graph_acceptance,
                "scales": r.diagnostics.scale_acceptance,
            })
        })
        .collect();
    write_fit(cfg, w, "gsm", &ds, &summary, acceptance)
}

/// Reorders `m` from discrete-first back to file order.
fn unpermute<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>, perm: &[usize]) -> DMatrix<T> {
    let mut out = m.clone();
    for a in 0..perm.len() {
        for b in 0..perm.len() {
            out[(perm[a], perm[b])] = m[(a, b)];
        }
    }
    out
}

fn fit_mixed(cfg: &RunConfig, w: &mut Writer) -> CliResult<String> {
    let ds = load(cfg)?;
    if let Some(c) = ds.columns.iter().find(|c| c.mixing.is_some() || c.skew.is_some()) {
        return Err(CliError::SchemaMismatch(format!(
            "fit-mixed treats continuous columns as Gaussian; {:?} carries a mixing law or skew",
            c.name
        )));
    }
    let disc = ds.discrete_indices();
    let perm: Vec<usize> = disc.iter().copied().chain(ds.continuous_indices()).collect();
    let centering = match disc.first() {
        None => crate::config::DEFAULT_CENTERING,
        Some(&j) => ds.columns[j].centering(),
    };
    if let Some(&j) = disc.iter().find(|&&j| ds.columns[j].centering() != centering) {
        return Err(CliError::Config(format!(
            "discrete columns must share one centering; {:?} uses {} but {:?} uses {centering}",
            ds.names[j],
            ds.columns[j].centering(),
            ds.names[disc[0]]
        )));
    }
    let n = ds.values.nrows();
    let values = DMatrix::from_fn(n, perm.len(), |i, j| ds.values[(i, perm[j])]);
    let data = MixedData::new(values, disc.len(), centering)?;
    let runs: Vec<MixedRun> = run_chains(cfg, |seed| {
        let c = cfg.file.mixed.build(cfg.iters, cfg.burnin, seed)?;
        Ok(run_mixed_chain(&data, &c)?)
    })?;
    let mut summary = merge(runs.iter().map(|r| &r.accumulator))?.summarize(cfg.threshold)?;
    summary.edge_prob = unpermute(&summary.edge_prob, &perm);
    summary.mean_precision = unpermute(&summary.mean_precision, &perm);
    summary.sign_class = unpermute(&summary.sign_class, &perm);

    if !disc.is_empty() {
        let disc_names: Vec<String> = disc.iter().map(|&j| ds.names[j].clone()).collect();
        w.put("omega.csv", &output::row_csv(&disc_names, summary.scale_means.as_slice()))?;
    }
    let acceptance = runs
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let d = &r.diagnostics;
            json!({
                "seed": cfg.chain_seed(k),
                "omega": d.omega_acceptance,
                "theta": d.theta_acceptance,
                "toggle": d.toggle_acceptance,
                "slab": d.slab_acceptance,
            })
        })
        .collect();
    write_fit(cfg, w, "mixed", &ds, &summary, acceptance)
}

fn simulate(cfg: &RunConfig, w: &mut Writer) -> CliResult<String> {
    let settings = cfg.file.simulate.clone().unwrap_or(SimulateSettings {
        preset: Some(SimPreset::Continuous),
        ..Default::default()
    });
    let plan = settings.resolve()?;
    let truth = plan.truth.build(&mut scalemix::rng_from_seed(cfg.seed))?;
    let q = truth.nrows();
    let names: Vec<String> = (0..q).map(|j| format!("x{j}")).collect();
    let mut schema = ConfigFile::new();
    let (data, precision) = match plan.model {
        SimModel::Gsm => {
            let s = sim::simulate_gsm_data(plan.n, &truth, &plan.margins, cfg.seed)?;
            w.put("scales.csv", &output::row_csv(&names, &s.scales))?;
            schema.columns = Some(
                names
                    .iter()
                    .zip(&plan.margins)
                    .map(|(n, m)| ColumnSchema {
                        mixing: (!m.mixing.is_degenerate()).then_some(m.mixing),
                        skew: (m.skew_alpha != 0.0 || m.skew_beta != 0.0).then_some(crate::config::Skew {
                            alpha: m.skew_alpha,
                            beta: m.skew_beta,
                        }),
                        ..ColumnSchema::continuous(n)
                    })
                    .collect(),
            );
            (s.data, truth)
        }
        SimModel::Mixed => {
            let d = plan.num_discrete;
            let s = sim::simulate_mixed_data(plan.n, &truth, d, plan.pg_shape, cfg.seed)?;
            if d > 0 {
                w.put("omega.csv", &output::row_csv(&names[..d], &s.omega))?;
            }
            schema.columns = Some(
                names
                    .iter()
                    .enumerate()
                    .map(|(j, n)| {
                        if j < d {
                            ColumnSchema {
                                centering: Some(0.0),
                                ..ColumnSchema::discrete(n)
                            }
                        } else {
                            ColumnSchema::continuous(n)
                        }
                    })
                    .collect(),
            );
            (s.values, s.precision)
        }
    };
    w.put("truth.csv", &output::matrix_csv(&names, &precision))?;
    w.put("data.csv", &output::matrix_csv(&names, &data))?;
    w.put("schema.json", &output::json(&schema)?)?;
    let mut message = format!("simulated {} rows of {q} variables", plan.n);
    let constant: Vec<&str> = (0..q)
        .filter(|&j| data.column(j).iter().all(|&v| v == data[(0, j)]))
        .map(|j| names[j].as_str())
        .collect();
    if !constant.is_empty() {
        message.push_str(&format!(
            "\nwarning: constant columns {} will be rejected by fits",
            constant.join(", ")
        ));
    }
    Ok(message)
}

fn evaluate(cfg: &RunConfig, w: &mut Writer) -> CliResult<String> {
    let est = read_table(cfg.data_path()?)?.values;
    let truth_path = cfg
        .truth
        .as_deref()
        .ok_or_else(|| CliError::Config("evaluate needs --truth".into()))?;
    let truth = read_table(truth_path)?.values;
    let t = sim::sign_detection_table(&sim::sign_matrix(&est), &truth)?;
    w.put("sign_table.json", &output::json(&table_json(&t))?)?;
    let [z, p, n] = t.ratios();
    Ok(format!("sign ratios (zero, positive, negative): {z:.4} {p:.4} {n:.4}"))
}

#[derive(Serialize)]
struct TailEntry {
    name: String,
    report: scalemix::gsm::TailReport,
}

fn diagnose_tails(cfg: &RunConfig, w: &mut Writer) -> CliResult<String> {
    let ds = load(cfg)?;
    let cont = ds.continuous_indices();
    if cont.is_empty() {
        return Err(CliError::SchemaMismatch("diagnose-tails needs continuous columns".into()));
    }
    let mut entries = Vec::with_capacity(cont.len());
    let mut suggested = ds.columns.clone();
    for j in cont {
        let name = ds.names[j].clone();
        let report = recommend_mixing(ds.values.column(j).as_slice()).map_err(|source| CliError::Column {
            name: name.clone(),
            source,
        })?;
        suggested[j].mixing = (!report.suggestion.is_degenerate()).then_some(report.suggestion);
        entries.push(TailEntry { name, report });
    }
    let n = entries.len();
    w.put(
        "tails.json",
        &output::json(&json!({ "columns": entries, "suggested_columns": suggested }))?,
    )?;
    Ok(format!("classified {n} columns"))
}
