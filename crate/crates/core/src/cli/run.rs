use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cli::config::{validate, DiagnosticKind, ExperimentKind, RunConfig};
use crate::cli::output::{fmt_f64, render_json, unix_timestamp, write_atomic, CsvTable, Provenance};
use crate::diagnostics::{
    concentration_curve, cumulative_trace, exact_sector_estimates, grover_sweep, haar_scaling_study,
    shallow_sweep, shot_sector_estimates, GroverSweepConfig, ScalingConfig, SectorEstimates,
    ShallowSweepConfig, SweepResult,
};
use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::observables::DiagonalObservable;
use crate::rng;

pub const WEIGHTS_COLUMNS: &[&str] = &["z", "q", "in_good_set", "sector"];
pub const CUMULATIVE_COLUMNS: &[&str] = &["i", "z", "a_z", "contribution", "S"];
pub const SWEEP_COLUMNS: &[&str] = &[
    "param",
    "pi_up",
    "pi_up_err",
    "pi_down",
    "w_up",
    "w_up_err",
    "w_down",
    "w_down_err",
    "c_e",
    "c_e_err",
    "M1",
    "M8",
    "M32",
    "M64",
];
pub const SCALING_COLUMNS: &[&str] = &["n", "median_abs_ce", "se", "draws"];

const SECTOR_SHOT_LABEL: u64 = 0x5ec7;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed_override: Option<u64>,
    pub workers: Option<usize>,
    pub out_dir_override: Option<PathBuf>,
    /// Add a `# generated_unix:` line to CSV headers.
    pub timestamp: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

enum Artifact {
    Csv(&'static str, CsvTable),
    Json(&'static str, String),
}

/// Validates, executes and writes the outputs of one experiment.
pub fn run(mut cfg: RunConfig, opts: &RunOptions) -> Result<RunOutcome> {
    if let Some(seed) = opts.seed_override {
        cfg.master_seed = seed;
    }
    let diags = validate(&cfg);
    if !diags.is_empty() {
        let msg = diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ");
        return Err(match diags.iter().find(|d| d.kind == DiagnosticKind::Capacity) {
            Some(_) => Error::Capacity {
                num_qubits: capacity_culprit(&cfg),
                ceiling: crate::state::DEFAULT_MAX_QUBITS,
            },
            None => Error::Validation(msg),
        });
    }
    let out_dir = opts
        .out_dir_override
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let workers = opts.workers.unwrap_or_else(default_workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("worker pool: {e}")))?;
    let (artifacts, summary) = pool.install(|| execute(&cfg))?;

    let prov = Provenance::new(&cfg.canonical_json(), cfg.master_seed);
    let ts = opts.timestamp.then(unix_timestamp);
    let files = artifacts
        .into_iter()
        .map(|a| match a {
            Artifact::Csv(name, table) => write_atomic(&out_dir, name, &table.render(&prov, ts)),
            Artifact::Json(name, body) => write_atomic(&out_dir, name, &body_with_meta(&prov, &body)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutcome { files, summary })
}

fn capacity_culprit(cfg: &RunConfig) -> usize {
    let ok = |n: usize| (1..=crate::state::DEFAULT_MAX_QUBITS).contains(&n);
    std::iter::once(cfg.ensemble.num_qubits())
        .chain(cfg.n_list.iter().copied())
        .find(|&n| !ok(n))
        .unwrap_or(0)
}

/// Worker count from `QPEAK_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var("QPEAK_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn body_with_meta(prov: &Provenance, body: &str) -> String {
    let value: serde_json::Value = serde_json::from_str(body).expect("artifact body is JSON");
    render_json(prov, &value)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("result serializes")
}

fn observable(cfg: &RunConfig, n: usize) -> Result<DiagonalObservable> {
    cfg.observable
        .as_ref()
        .ok_or_else(|| Error::Validation("observable missing".into()))?
        .build(n)
}

fn execute(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    match cfg.experiment {
        ExperimentKind::Weights => run_weights(cfg),
        ExperimentKind::Cumulative => run_cumulative(cfg),
        ExperimentKind::Sector => run_sector(cfg),
        ExperimentKind::GroverSweep => run_grover_sweep(cfg),
        ExperimentKind::ShallowSweep => run_shallow_sweep(cfg),
        ExperimentKind::HaarScaling => run_haar_scaling(cfg),
    }
}

fn run_weights(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    let state = cfg.ensemble.prepare(cfg.draw_index, cfg.master_seed)?.state;
    let pred = cfg.effective_predicate();
    let mut table = CsvTable::new(WEIGHTS_COLUMNS);
    let q = state.basis_weights();
    for (z, w) in q.iter().enumerate() {
        let good = pred.map_or(String::new(), |p| u8::from(p.contains(z)).to_string());
        table.row(&[
            z.to_string(),
            fmt_f64(*w),
            good,
            cfg.sector_rule.sector_of(z).label().to_string(),
        ]);
    }
    let curve = concentration_curve(&state, &cfg.k_list);
    let masses: Vec<String> = curve
        .points
        .iter()
        .map(|(k, m)| format!("M({k})={}", fmt_f64(*m)))
        .collect();
    let summary = format!("weights: {} basis states, {}", q.len(), masses.join(", "));
    Ok((vec![Artifact::Csv("weights.csv", table)], summary))
}

fn run_cumulative(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    let state = cfg.ensemble.prepare(cfg.draw_index, cfg.master_seed)?.state;
    let obs = observable(cfg, state.num_qubits())?;
    let trace = cumulative_trace(&state, &obs)?;
    let mut table = CsvTable::new(CUMULATIVE_COLUMNS);
    for (i, e) in trace.entries.iter().enumerate() {
        table.row(&[
            i.to_string(),
            e.z.to_string(),
            fmt_f64(e.a_z),
            fmt_f64(e.contribution),
            fmt_f64(e.s),
        ]);
    }
    let summary = format!(
        "cumulative: S(final)={} max|S|={}",
        fmt_f64(trace.final_value()),
        fmt_f64(trace.max_abs_partial_sum())
    );
    Ok((vec![Artifact::Csv("cumulative.csv", table)], summary))
}

#[derive(Serialize)]
struct SectorDraw {
    draw_index: u64,
    exact: SectorEstimates,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<SectorEstimates>,
}

fn run_sector(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    let n = cfg.ensemble.num_qubits();
    let obs = observable(cfg, n)?;
    let mut draws = Vec::with_capacity(cfg.seeds);
    for i in 0..cfg.seeds as u64 {
        let draw_index = cfg.draw_index + i;
        let state = cfg.ensemble.prepare(draw_index, cfg.master_seed)?.state;
        let exact = exact_sector_estimates(&state, &obs, &cfg.sector_rule)?;
        let shots = if cfg.shots > 0 {
            let seed = rng::derive_seed(cfg.master_seed, &[SECTOR_SHOT_LABEL, draw_index]);
            let outcomes = state.sample_shots(cfg.shots, seed);
            Some(shot_sector_estimates(&outcomes, &obs, &cfg.sector_rule)?)
        } else {
            None
        };
        draws.push(SectorDraw {
            draw_index,
            exact,
            shots,
        });
    }
    let first = &draws[0];
    let summary = match &first.shots {
        Some(s) => format!(
            "sector: C_E={} +/- {} ({} shots), exact C_E={}",
            fmt_f64(s.c_e),
            fmt_f64(s.std_errors.map_or(0.0, |e| e.c_e)),
            cfg.shots,
            fmt_f64(first.exact.c_e)
        ),
        None => format!(
            "sector: C_E={} pi_up={} (exact)",
            fmt_f64(first.exact.c_e),
            fmt_f64(first.exact.pi_up)
        ),
    };
    Ok((vec![Artifact::Json("sector.json", to_json(&draws))], summary))
}

fn sweep_table(result: &SweepResult) -> CsvTable {
    let mut table = CsvTable::new(SWEEP_COLUMNS);
    for p in &result.points {
        let (v, e) = match &p.shots {
            Some(s) => (s.mean, s.error_bar()),
            None => (p.exact.fields(), Default::default()),
        };
        let m = |k: usize| {
            p.top_k_mass
                .iter()
                .find(|(kk, _)| *kk == k)
                .map_or(String::new(), |(_, m)| fmt_f64(*m))
        };
        table.row(&[
            p.param.to_string(),
            fmt_f64(v.pi_up),
            fmt_f64(e.pi_up),
            fmt_f64(v.pi_down),
            fmt_f64(v.w_up),
            fmt_f64(e.w_up),
            fmt_f64(v.w_down),
            fmt_f64(e.w_down),
            fmt_f64(v.c_e),
            fmt_f64(e.c_e),
            m(1),
            m(8),
            m(32),
            m(64),
        ]);
    }
    table
}

fn run_grover_sweep(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    let EnsembleSpec::GroverPeaked {
        num_qubits,
        predicate,
        mixing_set,
        ..
    } = &cfg.ensemble
    else {
        return Err(Error::Validation(
            "grover-sweep needs a grover_peaked ensemble".into(),
        ));
    };
    let obs = observable(cfg, *num_qubits)?;
    let sweep_cfg = GroverSweepConfig {
        num_qubits: *num_qubits,
        predicate: predicate.clone(),
        t_list: cfg.t_list.clone(),
        mixing_set: mixing_set.clone(),
        shots: cfg.shots,
        seeds: cfg.seeds,
        master_seed: cfg.master_seed,
    };
    let result = grover_sweep(&sweep_cfg, &obs, &cfg.sector_rule)?;
    let peak = result.peak().expect("non-empty sweep");
    let summary = format!(
        "grover-sweep: peak |C_E| at T={}: C_E={} pi_up={} P_G={}",
        peak.param,
        fmt_f64(peak.exact.c_e),
        fmt_f64(peak.exact.pi_up),
        fmt_f64(peak.good_set_mass.unwrap_or(f64::NAN))
    );
    Ok((
        vec![
            Artifact::Csv("sweep.csv", sweep_table(&result)),
            Artifact::Json("sweep.json", to_json(&result)),
        ],
        summary,
    ))
}

fn run_shallow_sweep(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    let EnsembleSpec::ShallowPeaked(template) = &cfg.ensemble else {
        return Err(Error::Validation(
            "shallow-sweep needs a shallow_peaked ensemble".into(),
        ));
    };
    let obs = observable(cfg, template.num_qubits)?;
    let sweep_cfg = ShallowSweepConfig {
        template: template.clone(),
        d_list: cfg.d_list.clone(),
        shots: cfg.shots,
        seeds: cfg.seeds,
        master_seed: cfg.master_seed,
    };
    let result = shallow_sweep(&sweep_cfg, &obs, &cfg.sector_rule)?;
    let m1: Vec<String> = result
        .points
        .iter()
        .map(|p| format!("d={}:{}", p.param, fmt_f64(p.top_k_mass[0].1)))
        .collect();
    let summary = format!(
        "shallow-sweep: sector_saturated={} M(1) {}",
        result.sector_saturated.unwrap_or(false),
        m1.join(" ")
    );
    Ok((
        vec![
            Artifact::Csv("sweep.csv", sweep_table(&result)),
            Artifact::Json("sweep.json", to_json(&result)),
        ],
        summary,
    ))
}

fn run_haar_scaling(cfg: &RunConfig) -> Result<(Vec<Artifact>, String)> {
    let EnsembleSpec::Haar { seed, .. } = &cfg.ensemble else {
        return Err(Error::Validation("haar-scaling needs a haar ensemble".into()));
    };
    let scfg = ScalingConfig {
        n_list: cfg.n_list.clone(),
        observable: cfg
            .observable
            .clone()
            .ok_or_else(|| Error::Validation("observable missing".into()))?,
        sector_rule: cfg.sector_rule.clone(),
        draws: cfg.draws.unwrap_or(0),
        seed: rng::derive_seed(cfg.master_seed, &[*seed]),
    };
    let result = haar_scaling_study(&scfg)?;
    let mut table = CsvTable::new(SCALING_COLUMNS);
    for p in &result.points {
        table.row(&[
            p.n.to_string(),
            fmt_f64(p.median_abs_ce),
            fmt_f64(p.se),
            p.draws.to_string(),
        ]);
    }
    let summary = match result.slope {
        Some(s) => format!("haar-scaling: slope={} over n={:?}", fmt_f64(s), cfg.n_list),
        None => "haar-scaling: degenerate observable, no fit".to_string(),
    };
    Ok((
        vec![
            Artifact::Csv("scaling.csv", table),
            Artifact::Json("scaling.json", to_json(&result)),
        ],
        summary,
    ))
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    RunConfig::from_json(&text)
}
