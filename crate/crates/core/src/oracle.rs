//! Brute-force reference solvers.
//!
//! These evaluate the game definitions directly — every `(δ, k_a)` pair for
//! the fixed game, every one of the `|Δ|^T` schedules for the adaptive game —
//! and exist to validate the real solvers on small instances. They refuse
//! instances beyond their configured bounds instead of running forever.

use crate::adaptive::{AdaptiveSolution, MinCostSchedule};
use crate::error::{Error, Result};
use crate::fixed::FixedSolution;
use crate::game::{
    attacker_payoff_adaptive, attacker_payoff_fixed, defender_loss_fixed, schedule_cost,
    DamageSeries, Delay, GameConfig, ThresholdSchedule, Timestep, TradeoffCurve,
};

/// Instance-size limits for the oracles.
#[derive(Debug, Clone, Copy)]
pub struct OracleBounds {
    /// Largest horizon `oracle_fixed` accepts.
    pub max_fixed_horizon: usize,
    /// Largest schedule count `|Δ|^T` the adaptive oracles accept.
    pub max_schedule_count: u128,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { max_fixed_horizon: 12, max_schedule_count: 1_000_000 }
    }
}

fn check_common(d: &DamageSeries, c: &TradeoffCurve, g: &GameConfig) -> Result<()> {
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
    Ok(())
}

/// Exhaustive fixed-threshold solution: scans every `(δ, k_a)` pair with the
/// direct payoff sums. Same tie-breaking as `solve_fixed`.
pub fn oracle_fixed(d: &DamageSeries, c: &TradeoffCurve, g: &GameConfig) -> Result<FixedSolution> {
    oracle_fixed_bounded(d, c, g, OracleBounds::default())
}

pub fn oracle_fixed_bounded(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    bounds: OracleBounds,
) -> Result<FixedSolution> {
    check_common(d, c, g)?;
    let t = d.horizon();
    if t > bounds.max_fixed_horizon {
        return Err(Error::Bound(format!(
            "oracle_fixed refuses horizon {t} > {}",
            bounds.max_fixed_horizon
        )));
    }
    let mut best: Option<FixedSolution> = None;
    for point in c.points() {
        let mut best_start: Timestep = 1;
        let mut best_payoff = attacker_payoff_fixed(d, point.delay, 1)?;
        for k_a in 2..=t {
            let p = attacker_payoff_fixed(d, point.delay, k_a)?;
            if p > best_payoff {
                best_payoff = p;
                best_start = k_a;
            }
        }
        let loss = defender_loss_fixed(d, c, g, point.delay, best_start)?;
        if best.as_ref().is_none_or(|b| loss < b.defender_loss) {
            best = Some(FixedSolution {
                optimal_delay: point.delay,
                defender_loss: loss,
                best_response: best_start,
                attacker_payoff: best_payoff,
            });
        }
    }
    Ok(best.expect("curve is non-empty"))
}

fn schedule_count(n_delays: usize, horizon: usize, bound: u128) -> Result<u128> {
    let mut count: u128 = 1;
    for _ in 0..horizon {
        count = count
            .checked_mul(n_delays as u128)
            .ok_or_else(|| Error::Bound("schedule count overflows u128".to_string()))?;
        if count > bound {
            return Err(Error::Bound(format!(
                "adaptive oracle refuses more than {bound} schedules"
            )));
        }
    }
    Ok(count)
}

/// Calls `visit` with every schedule over the curve's delays, in
/// lexicographic order.
fn for_each_schedule<F>(delays: &[Delay], horizon: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&ThresholdSchedule) -> Result<()>,
{
    let mut indices = vec![0usize; horizon];
    loop {
        let schedule =
            ThresholdSchedule::new(indices.iter().map(|&i| delays[i]).collect())?;
        visit(&schedule)?;
        let mut pos = horizon;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if indices[pos] + 1 < delays.len() {
                indices[pos] += 1;
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Exhaustive adaptive-threshold solution: minimizes
/// `Σ C·FP + N·C_d + max_{k_a} payoff` over every schedule. Ties keep the
/// lexicographically smallest schedule.
pub fn oracle_adaptive(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
) -> Result<AdaptiveSolution> {
    oracle_adaptive_bounded(d, c, g, OracleBounds::default())
}

pub fn oracle_adaptive_bounded(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    bounds: OracleBounds,
) -> Result<AdaptiveSolution> {
    check_common(d, c, g)?;
    schedule_count(c.len(), g.horizon, bounds.max_schedule_count)?;
    let delays: Vec<Delay> = c.delays().collect();
    let mut best: Option<AdaptiveSolution> = None;
    for_each_schedule(&delays, g.horizon, |schedule| {
        let cost = schedule_cost(c, g, schedule)?;
        let (start, payoff) = worst_attack(d, schedule)?;
        let loss = cost + payoff;
        if best.as_ref().is_none_or(|b| loss < b.defender_loss) {
            best = Some(AdaptiveSolution {
                schedule: schedule.clone(),
                total_cost: cost,
                defender_loss: loss,
                best_response: start,
                attacker_payoff: payoff,
                chosen_cap: payoff,
            });
        }
        Ok(())
    })?;
    Ok(best.expect("at least one schedule exists"))
}

/// Exhaustive minimum-cost search: the cheapest schedule whose worst-case
/// payoff stays within the cap, or `None` when no schedule qualifies.
pub fn oracle_min_cost(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    cap: f64,
) -> Result<Option<MinCostSchedule>> {
    oracle_min_cost_bounded(d, c, g, cap, OracleBounds::default())
}

pub fn oracle_min_cost_bounded(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    cap: f64,
    bounds: OracleBounds,
) -> Result<Option<MinCostSchedule>> {
    check_common(d, c, g)?;
    schedule_count(c.len(), g.horizon, bounds.max_schedule_count)?;
    let delays: Vec<Delay> = c.delays().collect();
    let mut best: Option<MinCostSchedule> = None;
    for_each_schedule(&delays, g.horizon, |schedule| {
        let (_, payoff) = worst_attack(d, schedule)?;
        if payoff <= cap {
            let cost = schedule_cost(c, g, schedule)?;
            if best.as_ref().is_none_or(|b| cost < b.total_cost) {
                best = Some(MinCostSchedule { total_cost: cost, schedule: schedule.clone() });
            }
        }
        Ok(())
    })?;
    Ok(best)
}

fn worst_attack(d: &DamageSeries, s: &ThresholdSchedule) -> Result<(Timestep, f64)> {
    let mut best_start = 1;
    let mut best = attacker_payoff_adaptive(d, s, 1)?;
    for k_a in 2..=d.horizon() {
        let p = attacker_payoff_adaptive(d, s, k_a)?;
        if p > best {
            best = p;
            best_start = k_a;
        }
    }
    Ok((best_start, best))
}
