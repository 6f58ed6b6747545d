//! Nonparametric CUSUM simulation.
//!
//! Estimates the delay/false-positive trade-off of the detector
//! `S(k) = (S(k−1) + z(k))⁺`, alarm when `S(k) > η`, over a grid of
//! thresholds. The observer `z` is Gaussian with negative mean under normal
//! behavior and positive mean under attack. The statistic resets to zero
//! after every alarm; detection delay is the first post-attack alarm time
//! minus the attack start, conditioned on detection within the run, with the
//! censored fraction reported separately.
//!
//! Every trial draws from its own seeded generator derived from the master
//! seed, so runs are bitwise reproducible and independent of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Delay, TradeoffCurve};

/// Gaussian observer driving the CUSUM statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverModel {
    /// Mean of `z` under normal behavior; must be negative so the statistic
    /// drifts back to zero.
    pub normal_mean: f64,
    /// Mean of `z` under attack; positive so the statistic climbs.
    pub attack_mean: f64,
    pub noise_std: f64,
}

impl ObserverModel {
    pub fn new(normal_mean: f64, attack_mean: f64, noise_std: f64) -> Result<Self> {
        if !normal_mean.is_finite() || normal_mean >= 0.0 {
            return Err(Error::config(format!(
                "normal mean must be finite and negative, got {normal_mean}"
            )));
        }
        if !attack_mean.is_finite() || attack_mean <= 0.0 {
            return Err(Error::config(format!(
                "attack mean must be finite and positive, got {attack_mean}"
            )));
        }
        if !noise_std.is_finite() || noise_std <= 0.0 {
            return Err(Error::config(format!(
                "noise std must be finite and positive, got {noise_std}"
            )));
        }
        Ok(ObserverModel { normal_mean, attack_mean, noise_std })
    }
}

/// Monte-Carlo configuration for [`estimate_curve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Ascending detection thresholds to evaluate.
    pub thresholds: Vec<f64>,
    pub trials: usize,
    /// Timesteps per simulated run.
    pub run_length: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(thresholds: Vec<f64>, trials: usize, run_length: usize, seed: u64) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::config("threshold grid must be non-empty"));
        }
        for (i, eta) in thresholds.iter().enumerate() {
            if !eta.is_finite() || *eta < 0.0 {
                return Err(Error::config(format!(
                    "threshold at index {i} must be finite and ≥ 0, got {eta}"
                )));
            }
            if i > 0 && *eta <= thresholds[i - 1] {
                return Err(Error::config("threshold grid must be strictly ascending"));
            }
        }
        if trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if run_length == 0 {
            return Err(Error::config("run length must be at least 1"));
        }
        Ok(SimConfig { thresholds, trials, run_length, seed })
    }

    /// Attack start used by the delay-estimation runs: mid-run, 1-based.
    pub fn attack_start(&self) -> usize {
        self.run_length / 2 + 1
    }
}

/// One CUSUM step: `S(k) = (S(k−1) + z(k))⁺`.
pub fn cusum_update(s_prev: f64, z: f64) -> f64 {
    let s = s_prev + z;
    if s >= 0.0 {
        s
    } else {
        0.0
    }
}

/// Decision rule output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Attack,
    Normal,
}

/// Alarm iff the statistic strictly exceeds the threshold.
pub fn decide(s: f64, eta: f64) -> Decision {
    if s > eta {
        Decision::Attack
    } else {
        Decision::Normal
    }
}

/// Estimates for one threshold on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub threshold: f64,
    /// Fraction of timesteps with an alarm across normal-only runs.
    pub fp_rate: f64,
    pub fp_stderr: f64,
    /// Mean first-crossing delay over detected attack runs; NaN when no run
    /// detected the attack.
    pub mean_delay: f64,
    pub delay_stderr: f64,
    /// Fraction of attack runs with no detection before the run ended.
    pub censored_fraction: f64,
    pub detected_trials: usize,
}

/// Empirical delay/false-positive curve over a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCurve {
    pub points: Vec<ThresholdEstimate>,
}

impl EmpiricalCurve {
    /// Discretizes the estimates into a solver-grade trade-off curve: delays
    /// round to whole timesteps, the smallest threshold attaining each delay
    /// supplies its false-positive rate, and rates are clamped to the running
    /// minimum so estimation noise cannot break monotonicity. Thresholds with
    /// no detected runs are skipped.
    pub fn to_tradeoff_curve(&self) -> Result<TradeoffCurve> {
        let mut by_delay: Vec<(Delay, f64)> = Vec::new();
        for est in &self.points {
            if est.detected_trials == 0 {
                continue;
            }
            let delay = est.mean_delay.round() as Delay;
            if !by_delay.iter().any(|&(d, _)| d == delay) {
                by_delay.push((delay, est.fp_rate));
            }
        }
        if by_delay.is_empty() {
            return Err(Error::config(
                "no threshold produced detected runs; cannot build a trade-off curve",
            ));
        }
        by_delay.sort_by_key(|&(d, _)| d);
        let mut running_min = f64::INFINITY;
        for (_, fp) in by_delay.iter_mut() {
            running_min = running_min.min(*fp);
            *fp = running_min;
        }
        TradeoffCurve::new(by_delay)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-(threshold, trial, phase) seed, derived so that execution order never
/// affects the stream a trial sees.
fn derive_seed(master: u64, eta_index: u64, trial: u64, phase: u64) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ eta_index);
    s = splitmix64(s ^ trial);
    splitmix64(s ^ phase)
}

const PHASE_NORMAL: u64 = 0;
const PHASE_ATTACK: u64 = 1;

/// Mean and standard error of the mean (sample std, n−1 denominator).
fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var =
        samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Monte-Carlo estimate of the empirical trade-off curve.
pub fn estimate_curve(model: &ObserverModel, cfg: &SimConfig) -> EmpiricalCurve {
    let attack_start = cfg.attack_start();
    let points: Vec<ThresholdEstimate> = cfg
        .thresholds
        .par_iter()
        .enumerate()
        .map(|(eta_index, &eta)| {
            let normal = Normal::new(model.normal_mean, model.noise_std).expect("validated");
            let attack = Normal::new(model.attack_mean, model.noise_std).expect("validated");

            let mut fp_fractions = Vec::with_capacity(cfg.trials);
            let mut delays = Vec::new();
            for trial in 0..cfg.trials {
                // Normal-only run: count alarms, resetting after each one.
                let seed =
                    derive_seed(cfg.seed, eta_index as u64, trial as u64, PHASE_NORMAL);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut s = 0.0;
                let mut alarms = 0usize;
                for _ in 0..cfg.run_length {
                    s = cusum_update(s, normal.sample(&mut rng));
                    if decide(s, eta) == Decision::Attack {
                        alarms += 1;
                        s = 0.0;
                    }
                }
                fp_fractions.push(alarms as f64 / cfg.run_length as f64);

                // Attack run: the observer mean shifts at the attack start;
                // pre-start alarms are false positives (reset and continue),
                // the first post-start alarm is the detection.
                let seed =
                    derive_seed(cfg.seed, eta_index as u64, trial as u64, PHASE_ATTACK);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut s = 0.0;
                for k in 1..=cfg.run_length {
                    let dist = if k >= attack_start { &attack } else { &normal };
                    s = cusum_update(s, dist.sample(&mut rng));
                    if decide(s, eta) == Decision::Attack {
                        if k >= attack_start {
                            delays.push((k - attack_start) as f64);
                            break;
                        }
                        s = 0.0;
                    }
                }
            }

            let (fp_rate, fp_stderr) = mean_stderr(&fp_fractions);
            let (mean_delay, delay_stderr) = mean_stderr(&delays);
            ThresholdEstimate {
                threshold: eta,
                fp_rate,
                fp_stderr,
                mean_delay,
                delay_stderr,
                censored_fraction: (cfg.trials - delays.len()) as f64 / cfg.trials as f64,
                detected_trials: delays.len(),
            }
        })
        .collect();
    EmpiricalCurve { points }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_clamps_at_zero() {
        assert_eq!(cusum_update(0.0, -1.0), 0.0);
        assert_eq!(cusum_update(2.0, 1.5), 3.5);
        assert_eq!(cusum_update(1.0, -3.0), 0.0);
    }

    #[test]
    fn decision_is_strict() {
        assert_eq!(decide(5.0, 5.0), Decision::Normal);
        assert_eq!(decide(0.1, 0.0), Decision::Attack);
        assert_eq!(decide(4.9, 5.0), Decision::Normal);
    }

    #[test]
    fn model_validation() {
        assert!(ObserverModel::new(0.0, 1.0, 1.0).is_err());
        assert!(ObserverModel::new(-1.0, -1.0, 1.0).is_err());
        assert!(ObserverModel::new(-1.0, 1.0, 0.0).is_err());
        assert!(ObserverModel::new(-1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn grid_validation() {
        assert!(SimConfig::new(vec![], 1, 1, 0).is_err());
        assert!(SimConfig::new(vec![1.0, 1.0], 1, 1, 0).is_err());
        assert!(SimConfig::new(vec![-0.5], 1, 1, 0).is_err());
        assert!(SimConfig::new(vec![0.0, 1.0], 0, 10, 0).is_err());
    }

    #[test]
    fn fixed_seed_runs_are_bitwise_reproducible() {
        let model = ObserverModel::new(-1.0, 1.0, 1.0).unwrap();
        let cfg = SimConfig::new(vec![0.0, 1.0, 2.0], 64, 50, 1234).unwrap();
        let a = estimate_curve(&model, &cfg);
        let b = estimate_curve(&model, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_threshold_matches_single_step_alarm_probability() {
        // With η = 0 the statistic is 0 entering every step (either clamped
        // or just reset), so the per-step alarm probability is exactly
        // P(z > 0) = 1 − Φ(1) ≈ 0.15866 for z ~ N(−1, 1).
        let model = ObserverModel::new(-1.0, 1.0, 1.0).unwrap();
        let cfg = SimConfig::new(vec![0.0], 4000, 100, 7).unwrap();
        let curve = estimate_curve(&model, &cfg);
        let est = &curve.points[0];
        let expected = 0.15865525393145707;
        assert!(
            (est.fp_rate - expected).abs() < 4.0 * est.fp_stderr + 1e-3,
            "fp_rate {} vs closed form {expected} (stderr {})",
            est.fp_rate,
            est.fp_stderr
        );
    }

    #[test]
    fn huge_shift_detects_almost_immediately() {
        let model = ObserverModel::new(-1.0, 100.0, 1.0).unwrap();
        let cfg = SimConfig::new(vec![0.5, 1.5], 200, 40, 99).unwrap();
        let curve = estimate_curve(&model, &cfg);
        for est in &curve.points {
            assert!(est.detected_trials > 0);
            assert!(est.mean_delay <= 1.0);
        }
    }

    #[test]
    fn tradeoff_conversion_discretizes_and_stays_monotone() {
        let model = ObserverModel::new(-1.0, 1.0, 1.0).unwrap();
        let cfg = SimConfig::new(
            (0..8).map(|i| i as f64 * 0.75).collect(),
            500,
            80,
            2024,
        )
        .unwrap();
        let curve = estimate_curve(&model, &cfg).to_tradeoff_curve().unwrap();
        assert!(!curve.is_empty());
        let points = curve.points();
        for w in points.windows(2) {
            assert!(w[0].delay < w[1].delay);
            assert!(w[0].fp >= w[1].fp);
        }
    }
}
