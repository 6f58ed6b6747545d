//! Optimal adaptive-threshold solver.
//!
//! The solver decomposes the problem into a family of constrained
//! subproblems: for a damage cap `P`, `minimum_cost_thresholds` finds the
//! cheapest schedule (false-positive cost plus change cost) such that *no*
//! attack can accrue more than `P` damage, and an outer exhaustive search
//! minimizes `TC(P) + P` over the finite set of attainable damage values.
//!
//! The subproblem is a backward dynamic program over states `(n, m, δ_{n−1})`
//! where `n` is the next timestep to configure and `m` is the pending-window
//! size: attacks started in `{n−m .. n−1}` are still undetected. Choosing
//! delay `δ_n > m` detects nothing at `n` and grows the window; choosing
//! `δ_n ≤ m` detects every pending attack started at or before `n − δ_n`,
//! which is feasible only if the worst of them (the earliest, `n − m`) stays
//! within the cap. Attacks still pending at the horizon accrue damage through
//! `T`, so the terminal state enforces the cap on the remaining window as
//! well. Infeasible states carry cost `+∞` (IEEE infinity, absorbing under
//! addition).
//!
//! The memo table can be filled lazily (only states reachable from the start
//! are evaluated; the default) or eagerly; both modes perform identical
//! per-cell arithmetic and must agree bit for bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    attacker_payoff_adaptive, CurvePoint, DamageSeries, Delay, GameConfig, IntervalSums, Timestep,
    ThresholdSchedule, TradeoffCurve,
};

/// Memo-table fill strategy for the minimum-cost dynamic program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DpMode {
    /// Evaluate states on demand, starting from `(1, 0, arbitrary)`.
    Lazy,
    /// Fill the whole table backward from the horizon.
    Eager,
}

/// A feasible minimum-cost schedule for a damage cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCostSchedule {
    /// `TC(P)`: false-positive cost plus change cost of the schedule.
    pub total_cost: f64,
    pub schedule: ThresholdSchedule,
}

/// Solution of the adaptive-threshold game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSolution {
    pub schedule: ThresholdSchedule,
    /// False-positive plus change cost `TC` of the schedule.
    pub total_cost: f64,
    /// `L* = TC + P*`.
    pub defender_loss: f64,
    /// Best-response attack start against the schedule.
    pub best_response: Timestep,
    /// Attacker payoff `P*` of the best response.
    pub attacker_payoff: f64,
    /// The damage cap whose subproblem produced the schedule.
    pub chosen_cap: f64,
}

/// The damage values `Σ_{k=k_a}^{k_e} D(k)` of all possible attacks,
/// deduplicated and ascending. The optimal cap is always one of these.
pub fn damage_search_space(d: &DamageSeries) -> Vec<f64> {
    let t = d.horizon();
    let intervals = IntervalSums::new(d);
    let mut values = Vec::with_capacity(t * (t + 1) / 2);
    for a in 1..=t {
        for b in a..=t {
            values.push(intervals.sum(a, b));
        }
    }
    values.sort_by(|x, y| x.partial_cmp(y).expect("damage values are finite"));
    values.dedup();
    values
}

const NO_CHOICE: u32 = u32::MAX;

/// Backward-recursion memo for one damage cap.
///
/// A state key is `(n, m, prev)` with `n ∈ {1..T+1}`, `m < n`, and `prev`
/// the curve index of `δ_{n−1}` (or the sentinel "arbitrary" column, used
/// only at `n = 1` where no change can be charged). Each cell stores the
/// minimum cost from `n` to the horizon and the delay index realizing it;
/// unset cells are marked with NaN.
struct Dp<'a> {
    intervals: &'a IntervalSums,
    points: &'a [CurvePoint],
    fp_cost: f64,
    change_cost: f64,
    cap: f64,
    horizon: usize,
    /// Sentinel `prev` column for "no previous delay".
    arbitrary: usize,
    cost: Vec<f64>,
    choice: Vec<u32>,
}

impl<'a> Dp<'a> {
    fn new(
        intervals: &'a IntervalSums,
        curve: &'a TradeoffCurve,
        g: &GameConfig,
        cap: f64,
    ) -> Self {
        let t = g.horizon;
        let nd = curve.len();
        let cells = (t + 1) * (t + 1) * (nd + 1);
        Dp {
            intervals,
            points: curve.points(),
            fp_cost: g.fp_cost,
            change_cost: g.change_cost,
            cap,
            horizon: t,
            arbitrary: nd,
            cost: vec![f64::NAN; cells],
            choice: vec![NO_CHOICE; cells],
        }
    }

    #[inline]
    fn idx(&self, n: usize, m: usize, prev: usize) -> usize {
        ((n - 1) * (self.horizon + 1) + m) * (self.points.len() + 1) + prev
    }

    /// Cost at the horizon boundary: attacks still pending after `T` stay
    /// undetected and accrue damage through `T`, so the window must satisfy
    /// the cap for the state to be feasible.
    fn terminal_cost(&self, m: usize) -> f64 {
        if m == 0 || self.intervals.sum(self.horizon + 1 - m, self.horizon) <= self.cap {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn cell_cost(&mut self, n: usize, m: usize, prev: usize, lazy: bool) -> f64 {
        let cached = self.cost[self.idx(n, m, prev)];
        if !cached.is_nan() {
            return cached;
        }
        debug_assert!(lazy, "eager fill must visit children before parents");
        self.fill_cell(n, m, prev, lazy);
        self.cost[self.idx(n, m, prev)]
    }

    fn fill_cell(&mut self, n: usize, m: usize, prev: usize, lazy: bool) {
        let mut choice = NO_CHOICE;
        let value = if n == self.horizon + 1 {
            self.terminal_cost(m)
        } else {
            let mut best = f64::INFINITY;
            for i in 0..self.points.len() {
                let CurvePoint { delay, fp } = self.points[i];
                let mut s = if delay > m {
                    // Nothing detected at n; the pending window grows.
                    self.cell_cost(n + 1, m + 1, i, lazy) + self.fp_cost * fp
                } else if self.intervals.sum(n - m, n) <= self.cap {
                    // Every attack started at or before n − δ is detected at
                    // n; the earliest pending one is the worst.
                    self.cell_cost(n + 1, delay, i, lazy) + self.fp_cost * fp
                } else {
                    f64::INFINITY
                };
                if n > 1 && i != prev {
                    s += self.change_cost;
                }
                if s < best {
                    best = s;
                    choice = i as u32;
                }
            }
            best
        };
        let idx = self.idx(n, m, prev);
        self.cost[idx] = value;
        self.choice[idx] = choice;
    }

    fn fill_eager(&mut self) {
        let t = self.horizon;
        let nd = self.points.len();
        for m in 0..=t {
            for prev in 0..=nd {
                self.fill_cell(t + 1, m, prev, false);
            }
        }
        for n in (2..=t).rev() {
            for m in 0..n {
                for prev in 0..nd {
                    self.fill_cell(n, m, prev, false);
                }
            }
        }
        self.fill_cell(1, 0, self.arbitrary, false);
    }

    /// Replays the stored argmin choices forward, rebuilding the schedule and
    /// the pending-window evolution `m ← min(m+1, δ_n)`.
    fn recover_schedule(&self) -> Vec<Delay> {
        let mut delays = Vec::with_capacity(self.horizon);
        let mut m = 0;
        let mut prev = self.arbitrary;
        for n in 1..=self.horizon {
            let i = self.choice[self.idx(n, m, prev)];
            debug_assert_ne!(i, NO_CHOICE, "feasible DP must have stored a choice");
            let delay = self.points[i as usize].delay;
            delays.push(delay);
            m = (m + 1).min(delay);
            prev = i as usize;
        }
        delays
    }
}

fn run_dp(
    intervals: &IntervalSums,
    curve: &TradeoffCurve,
    g: &GameConfig,
    cap: f64,
    mode: DpMode,
) -> Option<(f64, Vec<Delay>)> {
    let mut dp = Dp::new(intervals, curve, g, cap);
    let total = match mode {
        DpMode::Lazy => dp.cell_cost(1, 0, dp.arbitrary, true),
        DpMode::Eager => {
            dp.fill_eager();
            dp.cost[dp.idx(1, 0, dp.arbitrary)]
        }
    };
    if total.is_infinite() {
        return None;
    }
    Some((total, dp.recover_schedule()))
}

fn check_instance(d: &DamageSeries, c: &TradeoffCurve, g: &GameConfig) -> Result<()> {
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

/// Minimum-cost schedule subject to a damage cap: the cheapest schedule (in
/// `Σ C·FP + N·C_d`) such that every attack's payoff stays ≤ `cap`, or
/// `None` when no schedule satisfies the cap.
pub fn minimum_cost_thresholds(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    cap: f64,
) -> Result<Option<MinCostSchedule>> {
    minimum_cost_thresholds_with(d, c, g, cap, DpMode::Lazy)
}

/// As [`minimum_cost_thresholds`], with an explicit table-fill mode.
pub fn minimum_cost_thresholds_with(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    cap: f64,
    mode: DpMode,
) -> Result<Option<MinCostSchedule>> {
    check_instance(d, c, g)?;
    if !cap.is_finite() || cap < 0.0 {
        return Err(Error::config(format!("damage cap must be finite and ≥ 0, got {cap}")));
    }
    let intervals = IntervalSums::new(d);
    Ok(run_dp(&intervals, c, g, cap, mode).map(|(total_cost, delays)| MinCostSchedule {
        total_cost,
        schedule: ThresholdSchedule::new(delays).expect("horizon ≥ 1"),
    }))
}

/// Best-response attack start against a schedule: the smallest `k_a`
/// maximizing the attacker payoff, with its payoff.
pub fn best_response_adaptive(d: &DamageSeries, s: &ThresholdSchedule) -> Result<(Timestep, f64)> {
    if d.horizon() != s.horizon() {
        return Err(Error::contract(format!(
            "damage horizon {} does not match schedule horizon {}",
            d.horizon(),
            s.horizon()
        )));
    }
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

/// Optimal adaptive threshold schedule (lazy DP).
pub fn solve_adaptive(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
) -> Result<AdaptiveSolution> {
    solve_adaptive_with(d, c, g, DpMode::Lazy)
}

/// Optimal adaptive threshold schedule with an explicit DP mode.
///
/// Evaluates `TC(P)` for every attainable damage value `P` (in parallel; the
/// reduction is ordered, so results do not depend on thread count) and keeps
/// the cap minimizing `TC(P) + P`, ties toward the smaller cap. The best
/// response is recomputed against the returned schedule.
pub fn solve_adaptive_with(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    mode: DpMode,
) -> Result<AdaptiveSolution> {
    check_instance(d, c, g)?;
    let caps = damage_search_space(d);
    let intervals = IntervalSums::new(d);
    let results: Vec<Option<(f64, Vec<Delay>)>> = caps
        .par_iter()
        .map(|&cap| run_dp(&intervals, c, g, cap, mode))
        .collect();

    let mut best: Option<(f64, f64, usize)> = None; // (TC + P, TC, index)
    for (i, result) in results.iter().enumerate() {
        if let Some((total_cost, _)) = result {
            let objective = total_cost + caps[i];
            if best.is_none_or(|(b, _, _)| objective < b) {
                best = Some((objective, *total_cost, i));
            }
        }
    }
    // The largest damage value bounds every attack, so it is always feasible.
    let (_, total_cost, index) =
        best.expect("the maximal damage value admits every schedule");
    let (_, delays) = results[index].clone().expect("chosen cap is feasible");
    let schedule = ThresholdSchedule::new(delays).expect("horizon ≥ 1");
    let (best_start, payoff) = best_response_adaptive(d, &schedule)?;
    Ok(AdaptiveSolution {
        defender_loss: total_cost + payoff,
        total_cost,
        best_response: best_start,
        attacker_payoff: payoff,
        chosen_cap: caps[index],
        schedule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (DamageSeries, TradeoffCurve, GameConfig) {
        (
            DamageSeries::new(vec![1.0, 2.0, 3.0]).unwrap(),
            TradeoffCurve::new(vec![(0, 0.5), (1, 0.1)]).unwrap(),
            GameConfig::new(1.0, 0.1, 3).unwrap(),
        )
    }

    #[test]
    fn search_space_examples() {
        let d = DamageSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(damage_search_space(&d), vec![1.0, 2.0, 3.0, 5.0, 6.0]);
        let zeros = DamageSeries::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(damage_search_space(&zeros), vec![0.0]);
        let single = DamageSeries::new(vec![4.0]).unwrap();
        assert_eq!(damage_search_space(&single), vec![4.0]);
    }

    #[test]
    fn min_cost_toy_caps() {
        let (d, c, g) = toy();

        let feasible = minimum_cost_thresholds(&d, &c, &g, 3.0).unwrap().unwrap();
        assert_eq!(feasible.schedule.delays(), &[1, 0, 1]);
        // N·C_d + Σ C·FP = 0.2 + 0.7 ≈ 0.9, written as the formula to pin the
        // exact double.
        assert_eq!(feasible.total_cost, 2.0 * 0.1 + (0.1 + 0.5 + 0.1));

        // Every schedule leaves the k_a = 3 attack with payoff ≥ D(3) = 3.
        assert!(minimum_cost_thresholds(&d, &c, &g, 2.0).unwrap().is_none());

        // A loose cap never binds: cheapest row, no changes.
        let loose = minimum_cost_thresholds(&d, &c, &g, 6.0).unwrap().unwrap();
        assert_eq!(loose.schedule.delays(), &[1, 1, 1]);
        assert_eq!(loose.total_cost, 0.1 + 0.1 + 0.1);
    }

    #[test]
    fn solve_adaptive_toy() {
        let (d, c, g) = toy();
        let sol = solve_adaptive(&d, &c, &g).unwrap();
        assert_eq!(sol.schedule.delays(), &[1, 0, 1]);
        assert_eq!(sol.defender_loss, 3.9);
        assert_eq!(sol.attacker_payoff, 3.0);
        assert_eq!(sol.chosen_cap, 3.0);
        assert_eq!(sol.best_response, 1);
        assert_eq!(sol.total_cost + sol.attacker_payoff, sol.defender_loss);
    }

    #[test]
    fn best_response_adaptive_examples() {
        let d = DamageSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        let s = ThresholdSchedule::new(vec![1, 0, 1]).unwrap();
        assert_eq!(best_response_adaptive(&d, &s).unwrap(), (1, 3.0));
        let ones = ThresholdSchedule::new(vec![1, 1, 1]).unwrap();
        assert_eq!(best_response_adaptive(&d, &ones).unwrap(), (2, 5.0));
        let single = DamageSeries::new(vec![5.0]).unwrap();
        let zero = ThresholdSchedule::new(vec![0]).unwrap();
        assert_eq!(best_response_adaptive(&single, &zero).unwrap(), (1, 5.0));
    }

    #[test]
    fn lazy_and_eager_agree_bitwise() {
        let d = DamageSeries::new(vec![0.5, 3.25, 1.0, 0.125, 2.0, 2.75]).unwrap();
        let c = TradeoffCurve::new(vec![(0, 0.875), (1, 0.5), (3, 0.0625)]).unwrap();
        let g = GameConfig::new(1.5, 0.25, 6).unwrap();
        let lazy = solve_adaptive_with(&d, &c, &g, DpMode::Lazy).unwrap();
        let eager = solve_adaptive_with(&d, &c, &g, DpMode::Eager).unwrap();
        assert_eq!(lazy, eager);
        for cap in damage_search_space(&d) {
            let a = minimum_cost_thresholds_with(&d, &c, &g, cap, DpMode::Lazy).unwrap();
            let b = minimum_cost_thresholds_with(&d, &c, &g, cap, DpMode::Eager).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn high_change_cost_forces_constant_schedule() {
        let (d, c, _) = toy();
        let g = GameConfig::new(1.0, 100.0, 3).unwrap();
        let sol = solve_adaptive(&d, &c, &g).unwrap();
        assert_eq!(sol.schedule.change_count(), 0);
        assert_eq!(sol.schedule.delays(), &[0, 0, 0]);
        assert_eq!(sol.defender_loss, 4.5);
    }

    #[test]
    fn single_timestep_instance() {
        let d = DamageSeries::new(vec![4.0]).unwrap();
        let c = TradeoffCurve::new(vec![(0, 0.5), (2, 0.25)]).unwrap();
        let g = GameConfig::new(1.0, 1.0, 1).unwrap();
        let sol = solve_adaptive(&d, &c, &g).unwrap();
        // Both delays leave payoff 4 (single step, clamped); the cheaper fp row wins.
        assert_eq!(sol.schedule.delays(), &[2]);
        assert_eq!(sol.defender_loss, 0.25 + 4.0);
    }

    #[test]
    fn cap_is_respected_by_best_response() {
        let (d, c, g) = toy();
        for cap in damage_search_space(&d) {
            if let Some(mc) = minimum_cost_thresholds(&d, &c, &g, cap).unwrap() {
                let (_, payoff) = best_response_adaptive(&d, &mc.schedule).unwrap();
                assert!(payoff <= cap);
            }
        }
    }
}
