//! Domain types and closed-form evaluators for the threshold-selection game.
//!
//! The defender runs an anomaly detector whose sensitivity is encoded in
//! *delay space*: each attainable detection delay `δ` (in timesteps) maps to
//! the false-positive rate `FP(δ)` of the largest threshold achieving that
//! delay. The attacker picks a start time `k_a` over a finite horizon
//! `{1..T}` and never stops before detection, so an attack started at `k_a`
//! against a per-timestep delay schedule is detected at the first `k ≥ k_a`
//! with `delays[k] ≤ k − k_a`, and accrues the damage `D(k)` of every
//! timestep up to and including that one.
//!
//! Damage outside the horizon is undefined, so sums clamp at `T`: an attack
//! still undetected at the horizon accrues damage through `T` and no further.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based time index into the horizon `{1..T}`.
pub type Timestep = usize;

/// Detection delay in whole timesteps.
pub type Delay = usize;

/// Expected damage `D(k)` per timestep over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DamageSeries {
    values: Vec<f64>,
}

impl DamageSeries {
    /// Builds a series from per-timestep damages; `values[0]` is `D(1)`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("damage series must cover at least one timestep"));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::contract(format!(
                    "damage at k={} must be finite and non-negative, got {v}",
                    i + 1
                )));
            }
        }
        Ok(DamageSeries { values })
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// `D(k)` for `k ∈ {1..T}`.
    pub fn value(&self, k: Timestep) -> f64 {
        self.values[k - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Total damage `Σ_{k=k_a}^{k_e} D(k)` of an undetected attack over `[k_a, k_e]`.
pub fn total_damage(d: &DamageSeries, k_a: Timestep, k_e: Timestep) -> Result<f64> {
    let t = d.horizon();
    if k_a < 1 || k_e > t || k_a > k_e {
        return Err(Error::contract(format!(
            "attack interval [{k_a}, {k_e}] not within 1 ≤ k_a ≤ k_e ≤ {t}"
        )));
    }
    let mut sum = 0.0;
    for k in k_a..=k_e {
        sum += d.value(k);
    }
    Ok(sum)
}

/// All interval sums of a damage series, tabulated once.
///
/// Each row accumulates left to right, so `sum(a, b)` is bit-identical to
/// `total_damage(d, a, b)` for every input; the solvers rely on that to stay
/// exactly consistent with the payoff evaluators.
#[derive(Debug, Clone)]
pub(crate) struct IntervalSums {
    horizon: usize,
    row_offsets: Vec<usize>,
    sums: Vec<f64>,
}

impl IntervalSums {
    pub(crate) fn new(d: &DamageSeries) -> Self {
        let t = d.horizon();
        let mut row_offsets = Vec::with_capacity(t + 1);
        let mut sums = Vec::with_capacity(t * (t + 1) / 2);
        let mut offset = 0;
        row_offsets.push(0); // unused slot for 1-based rows
        for a in 1..=t {
            row_offsets.push(offset);
            let mut acc = 0.0;
            for b in a..=t {
                acc += d.value(b);
                sums.push(acc);
            }
            offset += t - a + 1;
        }
        IntervalSums { horizon: t, row_offsets, sums }
    }

    /// `Σ_{k=a}^{b} D(k)` for `1 ≤ a ≤ b ≤ T`.
    pub(crate) fn sum(&self, a: Timestep, b: Timestep) -> f64 {
        debug_assert!(1 <= a && a <= b && b <= self.horizon);
        self.sums[self.row_offsets[a] + (b - a)]
    }
}

/// One attainable operating point of the detector: a detection delay and the
/// false-positive rate of the maximal threshold achieving it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub delay: Delay,
    pub fp: f64,
}

/// The attainable set Δ of detection delays with their false-positive rates.
///
/// Delays are strictly increasing and `fp` is non-increasing (ties allowed),
/// mirroring the usual threshold trade-off: a less sensitive detector alarms
/// later but less often. The curve is the artifact's threshold encoding; all
/// game quantities depend on a threshold only through `(δ, FP(δ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    points: Vec<CurvePoint>,
}

impl TradeoffCurve {
    pub fn new(points: Vec<(Delay, f64)>) -> Result<Self> {
        let points: Vec<CurvePoint> =
            points.into_iter().map(|(delay, fp)| CurvePoint { delay, fp }).collect();
        Self::from_points(points)
    }

    pub fn from_points(points: Vec<CurvePoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.fp.is_finite() || p.fp < 0.0 || p.fp > 1.0 {
                return Err(Error::contract(format!(
                    "fp rate at delay {} must lie in [0, 1], got {}",
                    p.delay, p.fp
                )));
            }
            if i > 0 {
                let prev = &points[i - 1];
                if p.delay <= prev.delay {
                    return Err(Error::contract(format!(
                        "delays must be strictly increasing: {} after {}",
                        p.delay, prev.delay
                    )));
                }
                if p.fp > prev.fp {
                    return Err(Error::contract(format!(
                        "fp must be non-increasing in delay: fp({}) = {} > fp({}) = {}",
                        p.delay, p.fp, prev.delay, prev.fp
                    )));
                }
            }
        }
        Ok(TradeoffCurve { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn delays(&self) -> impl Iterator<Item = Delay> + '_ {
        self.points.iter().map(|p| p.delay)
    }

    /// `FP(δ)`, or `None` when `δ` is not an attainable delay.
    pub fn fp(&self, delay: Delay) -> Option<f64> {
        self.points
            .binary_search_by_key(&delay, |p| p.delay)
            .ok()
            .map(|i| self.points[i].fp)
    }

    pub fn contains(&self, delay: Delay) -> bool {
        self.fp(delay).is_some()
    }
}

/// Game parameters: false-alarm cost, threshold-change cost, horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Cost `C` per unit false-positive rate per timestep.
    pub fp_cost: f64,
    /// Cost `C_d` charged for each threshold change.
    pub change_cost: f64,
    /// Horizon `T`; must match the damage series.
    pub horizon: usize,
}

impl GameConfig {
    pub fn new(fp_cost: f64, change_cost: f64, horizon: usize) -> Result<Self> {
        if !fp_cost.is_finite() || fp_cost < 0.0 {
            return Err(Error::config(format!("fp cost must be finite and ≥ 0, got {fp_cost}")));
        }
        if !change_cost.is_finite() || change_cost < 0.0 {
            return Err(Error::config(format!(
                "change cost must be finite and ≥ 0, got {change_cost}"
            )));
        }
        if horizon == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        Ok(GameConfig { fp_cost, change_cost, horizon })
    }
}

/// A per-timestep detection-delay schedule (the adaptive strategy).
///
/// Entry `k` is the delay of the threshold in force at timestep `k`. A fixed
/// strategy is simply a constant schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    delays: Vec<Delay>,
}

impl ThresholdSchedule {
    pub fn new(delays: Vec<Delay>) -> Result<Self> {
        if delays.is_empty() {
            return Err(Error::contract("schedule must cover at least one timestep"));
        }
        Ok(ThresholdSchedule { delays })
    }

    pub fn constant(delay: Delay, horizon: usize) -> Result<Self> {
        Self::new(vec![delay; horizon])
    }

    pub fn horizon(&self) -> usize {
        self.delays.len()
    }

    pub fn delays(&self) -> &[Delay] {
        &self.delays
    }

    /// Delay in force at timestep `k ∈ {1..T}`.
    pub fn delay_at(&self, k: Timestep) -> Delay {
        self.delays[k - 1]
    }

    /// Number of threshold changes `N`: adjacent pairs with unequal delays.
    pub fn change_count(&self) -> usize {
        self.delays.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Checks that every entry is an attainable delay on the curve.
    pub fn validate_on_curve(&self, curve: &TradeoffCurve) -> Result<()> {
        for (i, &delay) in self.delays.iter().enumerate() {
            if !curve.contains(delay) {
                return Err(Error::contract(format!(
                    "schedule entry at k={} has delay {delay} not on the trade-off curve",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// An attack start time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub start: Timestep,
}

impl AttackPlan {
    pub fn new(start: Timestep, horizon: usize) -> Result<Self> {
        if start < 1 || start > horizon {
            return Err(Error::contract(format!(
                "attack start {start} outside horizon 1..={horizon}"
            )));
        }
        Ok(AttackPlan { start })
    }
}

/// Outcome of running a schedule against an attack start.
///
/// `accrual_end` is the last timestep whose damage counts toward the attacker
/// payoff: the detection time when detected, the horizon otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectionOutcome {
    Detected { time: Timestep },
    Undetected { horizon: Timestep },
}

impl DetectionOutcome {
    pub fn is_detected(&self) -> bool {
        matches!(self, DetectionOutcome::Detected { .. })
    }

    pub fn time(&self) -> Option<Timestep> {
        match self {
            DetectionOutcome::Detected { time } => Some(*time),
            DetectionOutcome::Undetected { .. } => None,
        }
    }

    pub fn accrual_end(&self) -> Timestep {
        match self {
            DetectionOutcome::Detected { time } => *time,
            DetectionOutcome::Undetected { horizon } => *horizon,
        }
    }
}

fn check_start(k_a: Timestep, horizon: usize) -> Result<()> {
    if k_a < 1 || k_a > horizon {
        return Err(Error::contract(format!("attack start {k_a} outside horizon 1..={horizon}")));
    }
    Ok(())
}

/// Detection time `σ`: the first `k ∈ {k_a..T}` with `delays[k] ≤ k − k_a`,
/// or undetected when no such timestep exists within the horizon.
pub fn detection_time(s: &ThresholdSchedule, k_a: Timestep) -> Result<DetectionOutcome> {
    let t = s.horizon();
    check_start(k_a, t)?;
    for k in k_a..=t {
        if s.delay_at(k) <= k - k_a {
            return Ok(DetectionOutcome::Detected { time: k });
        }
    }
    Ok(DetectionOutcome::Undetected { horizon: t })
}

/// Attacker payoff against a schedule: damage accrued from `k_a` through the
/// detection time (or through the horizon when never detected).
pub fn attacker_payoff_adaptive(
    d: &DamageSeries,
    s: &ThresholdSchedule,
    k_a: Timestep,
) -> Result<f64> {
    if d.horizon() != s.horizon() {
        return Err(Error::contract(format!(
            "damage horizon {} does not match schedule horizon {}",
            d.horizon(),
            s.horizon()
        )));
    }
    let outcome = detection_time(s, k_a)?;
    total_damage(d, k_a, outcome.accrual_end())
}

/// False-positive and threshold-change cost of a schedule:
/// `N·C_d + Σ_{k=1}^{T} C·FP(delays[k])`.
pub fn schedule_cost(c: &TradeoffCurve, g: &GameConfig, s: &ThresholdSchedule) -> Result<f64> {
    if g.horizon != s.horizon() {
        return Err(Error::contract(format!(
            "config horizon {} does not match schedule horizon {}",
            g.horizon,
            s.horizon()
        )));
    }
    let mut fp_total = 0.0;
    for &delay in s.delays() {
        let fp = c.fp(delay).ok_or_else(|| {
            Error::contract(format!("schedule delay {delay} not on the trade-off curve"))
        })?;
        fp_total += g.fp_cost * fp;
    }
    Ok(s.change_count() as f64 * g.change_cost + fp_total)
}

/// Defender loss for an adaptive strategy:
/// `N·C_d + Σ_k C·FP(delays[k]) + payoff(k_a)`.
pub fn defender_loss_adaptive(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    s: &ThresholdSchedule,
    k_a: Timestep,
) -> Result<f64> {
    Ok(schedule_cost(c, g, s)? + attacker_payoff_adaptive(d, s, k_a)?)
}

/// Attacker payoff against a fixed delay: `Σ_{k=k_a}^{min(k_a+δ, T)} D(k)`.
pub fn attacker_payoff_fixed(d: &DamageSeries, delay: Delay, k_a: Timestep) -> Result<f64> {
    let t = d.horizon();
    check_start(k_a, t)?;
    total_damage(d, k_a, k_a.saturating_add(delay).min(t))
}

/// Defender loss for a fixed strategy: `C·FP(δ)·T + payoff(k_a)`.
pub fn defender_loss_fixed(
    d: &DamageSeries,
    c: &TradeoffCurve,
    g: &GameConfig,
    delay: Delay,
    k_a: Timestep,
) -> Result<f64> {
    if g.horizon != d.horizon() {
        return Err(Error::contract(format!(
            "config horizon {} does not match damage horizon {}",
            g.horizon,
            d.horizon()
        )));
    }
    let fp = c
        .fp(delay)
        .ok_or_else(|| Error::contract(format!("delay {delay} not on the trade-off curve")))?;
    Ok(g.fp_cost * fp * g.horizon as f64 + attacker_payoff_fixed(d, delay, k_a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d123() -> DamageSeries {
        DamageSeries::new(vec![1.0, 2.0, 3.0]).unwrap()
    }

    fn toy_curve() -> TradeoffCurve {
        TradeoffCurve::new(vec![(0, 0.5), (1, 0.1)]).unwrap()
    }

    #[test]
    fn total_damage_sums_intervals() {
        let d = d123();
        assert_eq!(total_damage(&d, 1, 3).unwrap(), 6.0);
        assert_eq!(total_damage(&d, 2, 2).unwrap(), 2.0);
        assert_eq!(total_damage(&d, 2, 3).unwrap(), 5.0);
    }

    #[test]
    fn total_damage_rejects_bad_intervals() {
        let d = d123();
        assert!(total_damage(&d, 0, 2).is_err());
        assert!(total_damage(&d, 1, 4).is_err());
        assert!(total_damage(&d, 3, 2).is_err());
    }

    #[test]
    fn interval_sums_match_total_damage_bitwise() {
        // Irrational-ish values on purpose: the table must agree on every bit.
        let d = DamageSeries::new(vec![0.1, 0.7, 1.3, 2.9, 0.01, 5.5, 0.333]).unwrap();
        let table = IntervalSums::new(&d);
        for a in 1..=7 {
            for b in a..=7 {
                assert_eq!(table.sum(a, b).to_bits(), total_damage(&d, a, b).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn curve_validation() {
        assert!(TradeoffCurve::new(vec![(0, 0.5), (1, 0.6)]).is_err()); // fp increases
        assert!(TradeoffCurve::new(vec![(0, 0.5), (0, 0.4)]).is_err()); // duplicate delay
        assert!(TradeoffCurve::new(vec![(0, 1.5)]).is_err()); // fp out of range
        let c = toy_curve();
        assert_eq!(c.fp(0), Some(0.5));
        assert_eq!(c.fp(1), Some(0.1));
        assert_eq!(c.fp(2), None);
    }

    #[test]
    fn detection_time_examples() {
        let zero = ThresholdSchedule::new(vec![0, 0, 0]).unwrap();
        assert_eq!(detection_time(&zero, 2).unwrap(), DetectionOutcome::Detected { time: 2 });

        let ones = ThresholdSchedule::new(vec![1, 1, 1]).unwrap();
        assert_eq!(detection_time(&ones, 1).unwrap(), DetectionOutcome::Detected { time: 2 });
        assert_eq!(detection_time(&ones, 3).unwrap(), DetectionOutcome::Undetected { horizon: 3 });
        assert_eq!(detection_time(&ones, 3).unwrap().accrual_end(), 3);
    }

    #[test]
    fn adaptive_payoff_examples() {
        let d = d123();
        let s = ThresholdSchedule::new(vec![1, 0, 1]).unwrap();
        assert_eq!(attacker_payoff_adaptive(&d, &s, 1).unwrap(), 3.0); // detected at 2
        assert_eq!(attacker_payoff_adaptive(&d, &s, 3).unwrap(), 3.0); // undetected
        let zero = ThresholdSchedule::new(vec![0, 0, 0]).unwrap();
        assert_eq!(attacker_payoff_adaptive(&d, &zero, 3).unwrap(), 3.0);
    }

    #[test]
    fn adaptive_loss_examples() {
        let d = d123();
        let c = toy_curve();
        let g = GameConfig::new(1.0, 0.1, 3).unwrap();
        let s = ThresholdSchedule::new(vec![1, 0, 1]).unwrap();
        assert_eq!(defender_loss_adaptive(&d, &c, &g, &s, 3).unwrap(), 3.9);
        let zero = ThresholdSchedule::new(vec![0, 0, 0]).unwrap();
        assert_eq!(defender_loss_adaptive(&d, &c, &g, &zero, 3).unwrap(), 4.5);
    }

    #[test]
    fn adaptive_loss_rejects_off_curve_schedule() {
        let d = d123();
        let c = toy_curve();
        let g = GameConfig::new(1.0, 0.1, 3).unwrap();
        let s = ThresholdSchedule::new(vec![1, 2, 1]).unwrap();
        assert!(defender_loss_adaptive(&d, &c, &g, &s, 1).is_err());
    }

    #[test]
    fn fixed_payoff_clamps_at_horizon() {
        let d = d123();
        assert_eq!(attacker_payoff_fixed(&d, 0, 3).unwrap(), 3.0);
        assert_eq!(attacker_payoff_fixed(&d, 1, 2).unwrap(), 5.0);
        assert_eq!(attacker_payoff_fixed(&d, 1, 3).unwrap(), 3.0); // clamped
        assert_eq!(attacker_payoff_fixed(&d, usize::MAX, 1).unwrap(), 6.0); // no overflow
    }

    #[test]
    fn fixed_loss_examples() {
        let d = d123();
        let c = toy_curve();
        let g = GameConfig::new(1.0, 0.0, 3).unwrap();
        assert_eq!(defender_loss_fixed(&d, &c, &g, 0, 3).unwrap(), 4.5);
        assert_eq!(defender_loss_fixed(&d, &c, &g, 1, 2).unwrap(), 5.3);
        assert!(defender_loss_fixed(&d, &c, &g, 7, 1).is_err()); // off-curve delay
    }

    #[test]
    fn change_count_examples() {
        assert_eq!(ThresholdSchedule::new(vec![5, 5, 5]).unwrap().change_count(), 0);
        assert_eq!(ThresholdSchedule::new(vec![1, 0, 1]).unwrap().change_count(), 2);
        // The case-study shape: one long plateau, a sensitive window, a third level.
        let mut delays = vec![23; 11];
        delays.extend([1, 1, 1, 1]);
        delays.extend([3; 9]);
        assert_eq!(ThresholdSchedule::new(delays).unwrap().change_count(), 2);
    }

    #[test]
    fn constant_schedule_matches_fixed_game() {
        // For a constant schedule the adaptive and fixed payoffs coincide, and
        // the losses differ only through N = 0 and Σ C·FP = C·FP·T.
        let d = DamageSeries::new(vec![2.0, 0.5, 4.0, 1.0, 3.0]).unwrap();
        let c = TradeoffCurve::new(vec![(0, 0.75), (2, 0.25), (4, 0.125)]).unwrap();
        let g = GameConfig::new(2.0, 1.0, 5).unwrap();
        for &delay in &[0, 2, 4] {
            let s = ThresholdSchedule::constant(delay, 5).unwrap();
            for k_a in 1..=5 {
                let fixed = attacker_payoff_fixed(&d, delay, k_a).unwrap();
                let adaptive = attacker_payoff_adaptive(&d, &s, k_a).unwrap();
                assert_eq!(fixed, adaptive);
                let lf = defender_loss_fixed(&d, &c, &g, delay, k_a).unwrap();
                let la = defender_loss_adaptive(&d, &c, &g, &s, k_a).unwrap();
                assert_eq!(lf, la); // dyadic fp rates keep both routes exact
            }
        }
    }

    #[test]
    fn payoff_lower_bound_holds() {
        let d = DamageSeries::new(vec![1.5, 0.0, 2.25, 0.5]).unwrap();
        let s = ThresholdSchedule::new(vec![3, 1, 0, 2]).unwrap();
        for k_a in 1..=4 {
            let p = attacker_payoff_adaptive(&d, &s, k_a).unwrap();
            assert!(p >= d.value(k_a));
        }
    }
}
