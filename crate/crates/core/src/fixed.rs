//! Optimal fixed-threshold solver.
//!
//! Exhaustive search over the attainable delays: for each `δ ∈ Δ` the
//! attacker's best response is found with an incremental sliding-window scan
//! over start times (`O(T)` per delay), and the delay minimizing
//! `C·FP(δ)·T + max_{k_a} P(δ, k_a)` wins. Ties break toward the smaller
//! delay, then the smaller start time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{DamageSeries, Delay, GameConfig, Timestep, TradeoffCurve};

/// Solution of the fixed-threshold game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSolution {
    /// Optimal detection delay `δ*`.
    pub optimal_delay: Delay,
    /// Defender loss `L* = C·FP(δ*)·T + P*`.
    pub defender_loss: f64,
    /// Best-response attack start `k_a*` against `δ*`.
    pub best_response: Timestep,
    /// Attacker payoff `P*` of the best response.
    pub attacker_payoff: f64,
}

/// Attacker payoffs `P(δ, k_a)` for every start time, via the sliding window
/// `P(δ, k_a) = P(δ, k_a−1) − D(k_a−1) + D(k_a+δ)` (the entering term is
/// dropped once the window is clamped at the horizon).
fn payoff_sequence(d: &DamageSeries, delay: Delay) -> Vec<f64> {
    let t = d.horizon();
    let mut payoffs = Vec::with_capacity(t);
    let mut window = 0.0;
    for k in 1..=1usize.saturating_add(delay).min(t) {
        window += d.value(k);
    }
    payoffs.push(window);
    for k_a in 2..=t {
        window -= d.value(k_a - 1);
        let entering = k_a.saturating_add(delay);
        if entering <= t {
            window += d.value(entering);
        }
        payoffs.push(window);
    }
    payoffs
}

/// Best-response attack start against a fixed delay: the smallest `k_a`
/// maximizing `P(δ, k_a)`, with its payoff.
pub fn best_response_fixed(d: &DamageSeries, delay: Delay) -> (Timestep, f64) {
    let payoffs = payoff_sequence(d, delay);
    let mut best_start = 1;
    let mut best = payoffs[0];
    for (i, &p) in payoffs.iter().enumerate().skip(1) {
        if p > best {
            best = p;
            best_start = i + 1;
        }
    }
    (best_start, best)
}

/// Optimal fixed threshold: the delay on the curve minimizing the defender
/// loss against a best-responding attacker.
pub fn solve_fixed(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
) -> Result<FixedSolution> {
    if c.is_empty() {
        return Err(Error::config("trade-off curve has no attainable delays"));
    }
    if g.horizon != d.horizon() {
        return Err(Error::config(format!(
            "config horizon {} does not match damage horizon {}",
            g.horizon,
            d.horizon()
        )));
    }
    let t = d.horizon() as f64;
    let mut best: Option<FixedSolution> = None;
    for point in c.points() {
        let (k_a, payoff) = best_response_fixed(d, point.delay);
        let loss = g.fp_cost * point.fp * t + payoff;
        if best.as_ref().is_none_or(|b| loss < b.defender_loss) {
            best = Some(FixedSolution {
                optimal_delay: point.delay,
                defender_loss: loss,
                best_response: k_a,
                attacker_payoff: payoff,
            });
        }
    }
    Ok(best.expect("curve is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{attacker_payoff_fixed, total_damage};

    fn d123() -> DamageSeries {
        DamageSeries::new(vec![1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn best_response_examples() {
        let d = d123();
        assert_eq!(best_response_fixed(&d, 0), (3, 3.0));
        assert_eq!(best_response_fixed(&d, 1), (2, 5.0));
        let single = DamageSeries::new(vec![5.0]).unwrap();
        assert_eq!(best_response_fixed(&single, 0), (1, 5.0));
    }

    #[test]
    fn best_response_breaks_ties_toward_earliest_start() {
        let d = DamageSeries::new(vec![2.0, 1.0, 2.0]).unwrap();
        assert_eq!(best_response_fixed(&d, 0), (1, 2.0));
    }

    #[test]
    fn sliding_window_matches_direct_sums() {
        // Dyadic damages keep every float operation exact, so the incremental
        // window must reproduce the direct sum bit for bit.
        let d = DamageSeries::new(vec![0.5, 2.25, 0.0, 1.125, 3.0, 0.75]).unwrap();
        for delay in 0..=6 {
            let payoffs = payoff_sequence(&d, delay);
            for k_a in 1..=6 {
                let direct = attacker_payoff_fixed(&d, delay, k_a).unwrap();
                assert_eq!(payoffs[k_a - 1].to_bits(), direct.to_bits());
            }
        }
    }

    #[test]
    fn solve_fixed_toy_instance() {
        let d = d123();
        let c = TradeoffCurve::new(vec![(0, 0.5), (1, 0.1)]).unwrap();
        let g = GameConfig::new(1.0, 0.0, 3).unwrap();
        let sol = solve_fixed(&d, &c, &g).unwrap();
        assert_eq!(sol.optimal_delay, 0);
        assert_eq!(sol.defender_loss, 4.5);
        assert_eq!(sol.best_response, 3);
        assert_eq!(sol.attacker_payoff, 3.0);
    }

    #[test]
    fn solve_fixed_rejects_empty_curve() {
        let d = d123();
        let c = TradeoffCurve::new(vec![]).unwrap();
        let g = GameConfig::new(1.0, 0.0, 3).unwrap();
        assert!(matches!(solve_fixed(&d, &c, &g), Err(Error::Config(_))));
    }

    #[test]
    fn large_delays_behave_as_never_detected() {
        // Any delay ≥ T never detects in-horizon: the payoff is the full tail.
        let d = DamageSeries::new(vec![1.0, 4.0, 2.0, 2.0]).unwrap();
        let (k_a, payoff) = best_response_fixed(&d, 9);
        assert_eq!(payoff, total_damage(&d, 1, 4).unwrap());
        assert_eq!(k_a, 1);
    }
}
