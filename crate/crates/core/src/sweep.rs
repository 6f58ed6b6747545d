//! Parameter sweeps: re-solve both games over a grid of cost values and emit
//! the loss curves (the data behind loss-vs-change-cost and
//! loss-vs-false-alarm-cost plots).

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::adaptive::{solve_adaptive_with, DpMode};
use crate::error::{Error, Result};
use crate::fixed::solve_fixed;
use crate::game::{DamageSeries, Delay, GameConfig, TradeoffCurve};

/// Which game parameter the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    /// False-alarm cost `C`.
    FpCost,
    /// Threshold-change cost `C_d`.
    ChangeCost,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(SweepParam::FpCost),
            "Cd" | "cd" | "CD" => Ok(SweepParam::ChangeCost),
            other => Err(Error::config(format!("unknown sweep parameter `{other}` (use C or Cd)"))),
        }
    }
}

/// Fixed and adaptive solutions at one grid value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub fixed_delay: Delay,
    pub fixed_loss: f64,
    pub adaptive_changes: usize,
    pub adaptive_loss: f64,
    pub adaptive_cap: f64,
}

/// Parses a `a:b:step` range, endpoints inclusive (the upper endpoint within
/// a small tolerance of the step grid).
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("range `{spec}` must have the form a:b:step")));
    }
    let mut nums = [0.0f64; 3];
    for (i, part) in parts.iter().enumerate() {
        nums[i] = part
            .parse()
            .map_err(|_| Error::config(format!("invalid number `{part}` in range `{spec}`")))?;
    }
    let [start, end, step] = nums;
    if !start.is_finite() || !end.is_finite() || !step.is_finite() || step <= 0.0 || end < start {
        return Err(Error::config(format!("range `{spec}` requires a ≤ b and step > 0")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Solves both games at every grid value of the swept parameter.
pub fn sweep(
    d: &DamageSeries,
    c: &TradeoffCurve,
    base: &GameConfig,
    param: SweepParam,
    values: &[f64],
    mode: DpMode,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("sweep grid is empty"));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let g = match param {
            SweepParam::FpCost => GameConfig::new(value, base.change_cost, base.horizon)?,
            SweepParam::ChangeCost => GameConfig::new(base.fp_cost, value, base.horizon)?,
        };
        let fixed = solve_fixed(d, c, &g)?;
        let adaptive = solve_adaptive_with(d, c, &g, mode)?;
        rows.push(SweepRow {
            value,
            fixed_delay: fixed.optimal_delay,
            fixed_loss: fixed.defender_loss,
            adaptive_changes: adaptive.schedule.change_count(),
            adaptive_loss: adaptive.defender_loss,
            adaptive_cap: adaptive.chosen_cap,
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(mut w: W, param: SweepParam, rows: &[SweepRow]) -> Result<()> {
    let name = match param {
        SweepParam::FpCost => "C",
        SweepParam::ChangeCost => "Cd",
    };
    writeln!(w, "{name},fixed_delay,fixed_loss,adaptive_changes,adaptive_loss,adaptive_cap")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.value, r.fixed_delay, r.fixed_loss, r.adaptive_changes, r.adaptive_loss, r.adaptive_cap
        )?;
    }
    Ok(())
}
