use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::exact_sector_estimates;
use crate::ensembles::sample_haar_state;
use crate::error::{Error, Result};
use crate::observables::{ObservableSpec, SectorRule};
use crate::rng;

/// Below this many draws per point the result carries a warning flag.
pub const MIN_SCALING_DRAWS: usize = 50;
const BOOTSTRAP_RESAMPLES: usize = 400;
const BOOTSTRAP_LABEL: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub n_list: Vec<usize>,
    /// Observable family; built afresh for every register size.
    pub observable: ObservableSpec,
    pub sector_rule: SectorRule,
    pub draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub median_abs_ce: f64,
    /// Bootstrap standard error of the median.
    pub se: f64,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingResult {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `log2(median |C_E|)` against `n`; absent when
    /// the observable is degenerate.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub insufficient_draws: bool,
    /// `A * Z_S` contains an identity term, so `C_E` carries a constant
    /// offset and the point set is excluded from the fit.
    pub degenerate: bool,
}

pub(crate) fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Bootstrap standard error of the median of `xs`.
pub fn bootstrap_median_se(xs: &[f64], resamples: usize, seed: u64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mut g = rng::from_seed(seed);
    let mut buf = vec![0.0; xs.len()];
    let mut stats = super::RunningStats::default();
    for _ in 0..resamples {
        for b in buf.iter_mut() {
            *b = xs[g.random_range(0..xs.len())];
        }
        stats.push(median(&mut buf));
    }
    stats.std_dev()
}

/// Least-squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// |C_E| for `draws` Haar states on `n` qubits.
pub fn haar_abs_contrasts(
    n: usize,
    observable: &ObservableSpec,
    rule: &SectorRule,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let obs = observable.build(n)?;
    rule.validate(n)?;
    (0..draws as u64)
        .into_par_iter()
        .map(|d| {
            let state = sample_haar_state(n, rng::derive_seed(seed, &[n as u64, d]))?;
            Ok(exact_sector_estimates(&state, &obs, rule)?.c_e.abs())
        })
        .collect()
}

/// Median |C_E| under Haar sampling for each register size, and the
/// fitted exponent of its decay.
pub fn haar_scaling_study(cfg: &ScalingConfig) -> Result<ScalingResult> {
    if cfg.n_list.len() < 4 {
        return Err(Error::validation(format!(
            "scaling study needs at least 4 register sizes, got {}",
            cfg.n_list.len()
        )));
    }
    if cfg.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("n_list must be strictly ascending"));
    }
    if cfg.draws == 0 {
        return Err(Error::validation("scaling study needs at least one draw"));
    }
    let first = cfg.observable.build(cfg.n_list[0])?;
    let degenerate = first.times_z_mask(cfg.sector_rule.mask()).has_identity_term();

    let mut points = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let mut abs_ce = haar_abs_contrasts(n, &cfg.observable, &cfg.sector_rule, cfg.draws, cfg.seed)?;
        let se = bootstrap_median_se(
            &abs_ce,
            BOOTSTRAP_RESAMPLES,
            rng::derive_seed(cfg.seed, &[n as u64, BOOTSTRAP_LABEL]),
        );
        points.push(ScalingPoint {
            n,
            median_abs_ce: median(&mut abs_ce),
            se,
            draws: cfg.draws,
        });
    }

    let (slope, intercept) = if degenerate {
        (None, None)
    } else {
        let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.median_abs_ce.log2()).collect();
        let (s, i) = linear_fit(&xs, &ys);
        (Some(s), Some(i))
    };
    Ok(ScalingResult {
        points,
        slope,
        intercept,
        insufficient_draws: cfg.draws < MIN_SCALING_DRAWS,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::ZStringSpec;

    fn obs(support: Vec<usize>) -> ObservableSpec {
        ObservableSpec {
            num_qubits: None,
            terms: vec![ZStringSpec {
                support,
                coefficient: 1.0,
            }],
        }
    }

    #[test]
    fn median_and_fit() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        let (s, i) = linear_fit(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 5.0, 7.0]);
        assert!((s - 2.0).abs() < 1e-12 && (i + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_observable_is_excluded() {
        let cfg = ScalingConfig {
            n_list: vec![4, 5, 6, 7],
            observable: obs(vec![2]),
            sector_rule: SectorRule::SingleQubit(2),
            draws: 20,
            seed: 1,
        };
        let r = haar_scaling_study(&cfg).unwrap();
        assert!(r.degenerate);
        assert!(r.slope.is_none());
        assert!(r.insufficient_draws);
        for p in &r.points {
            assert!((p.median_abs_ce - 1.0).abs() < 1e-12);
        }
        // every single draw is exactly the identity expectation
        let all = haar_abs_contrasts(6, &cfg.observable, &cfg.sector_rule, 20, 3).unwrap();
        assert!(all.iter().all(|c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn config_errors() {
        let mut cfg = ScalingConfig {
            n_list: vec![4, 6, 8],
            observable: obs(vec![0]),
            sector_rule: SectorRule::SingleQubit(1),
            draws: 60,
            seed: 1,
        };
        assert!(haar_scaling_study(&cfg).is_err());
        cfg.n_list = vec![4, 6, 6, 8];
        assert!(haar_scaling_study(&cfg).is_err());
        cfg.n_list = vec![4, 6, 8, 10];
        let r = haar_scaling_study(&cfg).unwrap();
        assert!(!r.insufficient_draws && !r.degenerate);
    }

    #[test]
    fn doubling_draws_shrinks_median_se() {
        // bootstrap SE of the median scales as draws^{-1/2}
        let o = obs(vec![0]);
        let rule = SectorRule::SingleQubit(1);
        let mut ratios = vec![];
        for n in [6usize, 8] {
            let small = haar_abs_contrasts(n, &o, &rule, 400, 5).unwrap();
            let big = haar_abs_contrasts(n, &o, &rule, 800, 5).unwrap();
            let se_small = bootstrap_median_se(&small, 2000, 17);
            let se_big = bootstrap_median_se(&big, 2000, 17);
            ratios.push(se_big / se_small);
        }
        let ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let expect = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ratio / expect - 1.0).abs() < 0.3, "ratio={ratio}");
    }
}
