//! Parameter sweeps over the Grover iteration count and the shallow
//! shaping depth. Each parameter value is an independent cell whose random
//! streams are keyed by `(master_seed, value index, seed index)`, so the
//! result does not depend on how cells are scheduled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    concentration_curve, exact_sector_estimates, shot_sector_estimates, RunningStats, SectorEstimates,
    SectorFields,
};
use crate::ensembles::{EnsembleSpec, ShallowSpec};
use crate::error::{Error, Result};
use crate::observables::{p_g_ideal, DiagonalObservable, Predicate, SectorRule};
use crate::rng;
use crate::state::ShotSampler;

/// Top-K masses reported in sweep tables.
pub const SWEEP_K: [usize; 4] = [1, 8, 32, 64];
const SHOT_LABEL: u64 = 0x5407;

/// Shot-based statistics aggregated over seeds. `std_over_seeds` is the
/// spread of the per-seed estimates; `mean_std_error` is the average
/// within-run standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotSummary {
    pub mean: SectorFields,
    pub std_over_seeds: SectorFields,
    pub mean_std_error: SectorFields,
    pub n_shots: usize,
    pub seeds: usize,
}

impl ShotSummary {
    /// Error bar used in tables: the across-seed spread when there are at
    /// least two seeds, the within-run standard error otherwise.
    pub fn error_bar(&self) -> SectorFields {
        if self.seeds >= 2 {
            self.std_over_seeds
        } else {
            self.mean_std_error
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: u32,
    /// Exact diagnostics (averaged over draws for stochastic families).
    pub exact: SectorEstimates,
    pub shots: Option<ShotSummary>,
    pub top_k_mass: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_set_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_g_ideal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    pub n_shots: usize,
    pub seeds: usize,
    pub master_seed: u64,
    /// Shallow sweeps only: one sector holds all the mass at every depth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector_saturated: Option<bool>,
}

impl SweepResult {
    /// Point with the largest exact |C_E|.
    pub fn peak(&self) -> Option<&SweepPoint> {
        self.points
            .iter()
            .max_by(|a, b| a.exact.c_e.abs().total_cmp(&b.exact.c_e.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverSweepConfig {
    pub num_qubits: usize,
    pub predicate: Predicate,
    pub t_list: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing_set: Option<Vec<usize>>,
    pub shots: usize,
    pub seeds: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowSweepConfig {
    pub template: ShallowSpec,
    pub d_list: Vec<u32>,
    pub shots: usize,
    pub seeds: usize,
    pub master_seed: u64,
}

struct Cell<'a> {
    index: usize,
    param: u32,
    spec: EnsembleSpec,
    predicate: Option<&'a Predicate>,
}

fn run_cell(
    cell: &Cell<'_>,
    obs: &DiagonalObservable,
    rule: &SectorRule,
    shots: usize,
    seeds: usize,
    master_seed: u64,
) -> Result<SweepPoint> {
    let draws = if cell.spec.is_stochastic() {
        seeds.max(1)
    } else {
        1
    };
    let mut exact_stats = [RunningStats::default(); 6];
    let mut mass_stats = vec![RunningStats::default(); SWEEP_K.len()];
    let mut good_stats = RunningStats::default();
    let mut shot_stats = [RunningStats::default(); 6];
    let mut se_stats = [RunningStats::default(); 6];

    let mut states = Vec::with_capacity(draws);
    for d in 0..draws {
        let state = cell.spec.prepare(d as u64, master_seed)?.state;
        let exact = exact_sector_estimates(&state, obs, rule)?;
        for (s, x) in exact_stats.iter_mut().zip(exact.fields().to_array()) {
            s.push(x);
        }
        let weights = state.basis_weights();
        let curve = concentration_curve(&state, &SWEEP_K);
        for (s, (_, m)) in mass_stats.iter_mut().zip(&curve.points) {
            s.push(*m);
        }
        if let Some(p) = cell.predicate {
            good_stats.push(
                weights
                    .iter()
                    .enumerate()
                    .filter(|(z, _)| p.contains(*z))
                    .map(|(_, w)| w)
                    .sum(),
            );
        }
        states.push(weights);
    }

    if shots > 0 {
        let samplers: Vec<ShotSampler> = states.iter().map(|w| ShotSampler::new(w)).collect();
        for s in 0..seeds.max(1) {
            let sampler = &samplers[s % samplers.len()];
            let mut g = rng::stream(master_seed, &[SHOT_LABEL, cell.index as u64, s as u64]);
            let outcomes = sampler.sample(shots, &mut g);
            let est = shot_sector_estimates(&outcomes, obs, rule)?;
            for (st, x) in shot_stats.iter_mut().zip(est.fields().to_array()) {
                st.push(x);
            }
            let se = est.std_errors.expect("shot estimates carry errors");
            for (st, x) in se_stats.iter_mut().zip(se.to_array()) {
                st.push(x);
            }
        }
    }

    let mean = |s: &[RunningStats; 6]| SectorFields::from_array(std::array::from_fn(|i| s[i].mean()));
    let ef = mean(&exact_stats);
    let exact = SectorEstimates {
        pi_up: ef.pi_up,
        pi_down: ef.pi_down,
        w_up: ef.w_up,
        w_down: ef.w_down,
        c_e: ef.c_e,
        a_avg: ef.a_avg,
        mode: crate::diagnostics::EstimateMode::Exact,
        n_shots: None,
        std_errors: None,
    };
    let shots_summary = (shots > 0).then(|| ShotSummary {
        mean: mean(&shot_stats),
        std_over_seeds: SectorFields::from_array(std::array::from_fn(|i| shot_stats[i].std_dev())),
        mean_std_error: mean(&se_stats),
        n_shots: shots,
        seeds: seeds.max(1),
    });
    let p_g = match cell.predicate {
        Some(p) => {
            let f = p.good_set_fraction();
            (f > 0.0 && f < 1.0)
                .then(|| p_g_ideal(cell.param, f))
                .transpose()?
        }
        None => None,
    };
    Ok(SweepPoint {
        param: cell.param,
        exact,
        shots: shots_summary,
        top_k_mass: SWEEP_K
            .iter()
            .copied()
            .zip(mass_stats.iter().map(|s| s.mean()))
            .collect(),
        good_set_mass: cell.predicate.map(|_| good_stats.mean()),
        p_g_ideal: if matches!(cell.spec, EnsembleSpec::GroverPeaked { .. }) {
            p_g
        } else {
            None
        },
    })
}

fn run_cells(
    cells: &[Cell<'_>],
    obs: &DiagonalObservable,
    rule: &SectorRule,
    shots: usize,
    seeds: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    cells
        .par_iter()
        .map(|c| run_cell(c, obs, rule, shots, seeds, master_seed))
        .collect()
}

fn check_common(n: usize, obs: &DiagonalObservable, rule: &SectorRule, values: usize) -> Result<()> {
    if values == 0 {
        return Err(Error::validation("sweep needs at least one parameter value"));
    }
    if obs.num_qubits() != n {
        return Err(Error::validation(format!(
            "observable arity {} does not match register size {n}",
            obs.num_qubits()
        )));
    }
    rule.validate(n)
}

/// Sweep of the Grover iteration count.
pub fn grover_sweep(
    cfg: &GroverSweepConfig,
    obs: &DiagonalObservable,
    rule: &SectorRule,
) -> Result<SweepResult> {
    check_common(cfg.num_qubits, obs, rule, cfg.t_list.len())?;
    let cells: Vec<Cell<'_>> = cfg
        .t_list
        .iter()
        .enumerate()
        .map(|(index, &t)| Cell {
            index,
            param: t,
            spec: EnsembleSpec::GroverPeaked {
                num_qubits: cfg.num_qubits,
                predicate: cfg.predicate.clone(),
                iterations: t,
                mixing_set: cfg.mixing_set.clone(),
            },
            predicate: Some(&cfg.predicate),
        })
        .collect();
    let points = run_cells(&cells, obs, rule, cfg.shots, cfg.seeds, cfg.master_seed)?;
    Ok(SweepResult {
        parameter: "T".into(),
        points,
        n_shots: cfg.shots,
        seeds: cfg.seeds,
        master_seed: cfg.master_seed,
        sector_saturated: None,
    })
}

/// Sweep of the shallow shaping depth.
pub fn shallow_sweep(
    cfg: &ShallowSweepConfig,
    obs: &DiagonalObservable,
    rule: &SectorRule,
) -> Result<SweepResult> {
    check_common(cfg.template.num_qubits, obs, rule, cfg.d_list.len())?;
    let cells: Vec<Cell<'_>> = cfg
        .d_list
        .iter()
        .enumerate()
        .map(|(index, &d)| Cell {
            index,
            param: d,
            spec: EnsembleSpec::ShallowPeaked(ShallowSpec {
                depth: d,
                ..cfg.template.clone()
            }),
            predicate: None,
        })
        .collect();
    let points = run_cells(&cells, obs, rule, cfg.shots, cfg.seeds, cfg.master_seed)?;
    let saturated = points.iter().all(|p| p.exact.pi_up >= 1.0 - 1e-12)
        || points.iter().all(|p| p.exact.pi_down >= 1.0 - 1e-12);
    Ok(SweepResult {
        parameter: "d".into(),
        points,
        n_shots: cfg.shots,
        seeds: cfg.seeds,
        master_seed: cfg.master_seed,
        sector_saturated: Some(saturated),
    })
}
