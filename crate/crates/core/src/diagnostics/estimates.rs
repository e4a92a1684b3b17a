use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{sector_of_mask, DiagonalObservable, Sector, SectorRule};
use crate::state::{BasisIndex, QuantumState};

/// Per-field values of the sector diagnostic bundle; also used for
/// standard errors and across-seed spreads.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SectorFields {
    pub pi_up: f64,
    pub pi_down: f64,
    pub w_up: f64,
    pub w_down: f64,
    pub c_e: f64,
    pub a_avg: f64,
}

impl SectorFields {
    pub fn to_array(self) -> [f64; 6] {
        [
            self.pi_up,
            self.pi_down,
            self.w_up,
            self.w_down,
            self.c_e,
            self.a_avg,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            pi_up: a[0],
            pi_down: a[1],
            w_up: a[2],
            w_down: a[3],
            c_e: a[4],
            a_avg: a[5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Exact,
    ShotBased,
}

/// Sector masses, sector-resolved signed sums, contrast `c_e = w_up - w_down`
/// and the plain expectation `a_avg = w_up + w_down`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorEstimates {
    pub pi_up: f64,
    pub pi_down: f64,
    pub w_up: f64,
    pub w_down: f64,
    pub c_e: f64,
    pub a_avg: f64,
    pub mode: EstimateMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<SectorFields>,
}

impl SectorEstimates {
    fn from_sums(pi_up: f64, pi_down: f64, w_up: f64, w_down: f64, mode: EstimateMode) -> Self {
        Self {
            pi_up,
            pi_down,
            w_up,
            w_down,
            c_e: w_up - w_down,
            a_avg: w_up + w_down,
            mode,
            n_shots: None,
            std_errors: None,
        }
    }

    pub fn fields(&self) -> SectorFields {
        SectorFields {
            pi_up: self.pi_up,
            pi_down: self.pi_down,
            w_up: self.w_up,
            w_down: self.w_down,
            c_e: self.c_e,
            a_avg: self.a_avg,
        }
    }
}

pub(crate) fn check_arity(state_n: usize, obs: &DiagonalObservable, rule: &SectorRule) -> Result<()> {
    if obs.num_qubits() != state_n {
        return Err(Error::validation(format!(
            "observable arity {} does not match register size {state_n}",
            obs.num_qubits()
        )));
    }
    rule.validate(state_n)
}

/// Sector diagnostics over the full weight table `q_z`.
pub fn exact_sector_estimates(
    state: &QuantumState,
    obs: &DiagonalObservable,
    rule: &SectorRule,
) -> Result<SectorEstimates> {
    check_arity(state.num_qubits(), obs, rule)?;
    let mask = rule.mask();
    let (mut pi_up, mut pi_down, mut w_up, mut w_down) = (0.0, 0.0, 0.0, 0.0);
    for (z, amp) in state.amplitudes().iter().enumerate() {
        let q = amp.norm_sqr();
        let a = obs.eval_profile(z);
        match sector_of_mask(mask, z) {
            Sector::Up => {
                pi_up += q;
                w_up += q * a;
            }
            Sector::Down => {
                pi_down += q;
                w_down += q * a;
            }
        }
    }
    // divide out rounding drift in the norm; an unpopulated sector is then
    // exactly 0 and its complement exactly 1
    let total = pi_up + pi_down;
    let est = SectorEstimates::from_sums(
        pi_up / total,
        pi_down / total,
        w_up / total,
        w_down / total,
        EstimateMode::Exact,
    );
    debug_assert!(
        (est.c_e - composed_contrast(state, obs, rule)).abs() <= 1e-9 * obs.max_abs_profile().max(1.0),
        "two-sector contrast disagrees with <A Z_S>"
    );
    Ok(est)
}

/// `<r|A|r> = sum_z q_z a_z`.
pub fn expectation(state: &QuantumState, obs: &DiagonalObservable) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(z, amp)| amp.norm_sqr() * obs.eval_profile(z))
        .sum()
}

/// Contrast as the expectation of the composed observable `A * Z_S`, where
/// `Z_S` is the Z-string on the rule's qubits (`Z_k` for a single qubit).
pub fn composed_contrast(state: &QuantumState, obs: &DiagonalObservable, rule: &SectorRule) -> f64 {
    expectation(state, &obs.times_z_mask(rule.mask()))
}

/// Contrast from projected weights: `2 sum_j p_j a_j - <A>` with
/// `p_j = |<r|P_up|z_j>|^2`.
pub fn structural_form_contrast(state: &QuantumState, obs: &DiagonalObservable, rule: &SectorRule) -> f64 {
    let projected = state.amplitudes().iter().enumerate().map(|(z, amp)| {
        if rule.sector_of(z) == Sector::Up {
            *amp
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    });
    let weighted: f64 = projected
        .enumerate()
        .map(|(z, p_amp)| p_amp.norm_sqr() * obs.eval_profile(z))
        .sum();
    2.0 * weighted - expectation(state, obs)
}

/// Streaming mean and variance (Welford). Constant samples give an exact
/// zero variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Shot-based sector diagnostics. Standard errors come from the sample
/// variance of the per-shot signed terms.
pub fn shot_sector_estimates(
    shots: &[BasisIndex],
    obs: &DiagonalObservable,
    rule: &SectorRule,
) -> Result<SectorEstimates> {
    if shots.is_empty() {
        return Err(Error::EmptyShots);
    }
    let n = obs.num_qubits();
    rule.validate(n)?;
    let dim = 1usize << n;
    let mask = rule.mask();
    let mut stats = [RunningStats::default(); 6];
    for &z in shots {
        if z >= dim {
            return Err(Error::validation(format!(
                "shot outcome {z} outside a {n}-qubit register"
            )));
        }
        let a = obs.eval_profile(z);
        let up = sector_of_mask(mask, z) == Sector::Up;
        let (u, d) = if up { (a, 0.0) } else { (0.0, a) };
        let per_shot = [
            if up { 1.0 } else { 0.0 },
            if up { 0.0 } else { 1.0 },
            u,
            d,
            u - d,
            a,
        ];
        for (s, x) in stats.iter_mut().zip(per_shot) {
            s.push(x);
        }
    }
    let up_count = shots
        .iter()
        .filter(|&&z| sector_of_mask(mask, z) == Sector::Up)
        .count();
    let total = shots.len() as f64;
    let mut est = SectorEstimates::from_sums(
        up_count as f64 / total,
        (shots.len() - up_count) as f64 / total,
        stats[2].mean(),
        stats[3].mean(),
        EstimateMode::ShotBased,
    );
    est.n_shots = Some(shots.len());
    est.std_errors = Some(SectorFields::from_array(stats.map(|s| s.std_error())));
    Ok(est)
}
