//! CSV ingestion and emission, trade-off-curve fitting, and the bundled
//! case-study dataset (a digitized hourly water-demand profile over one day).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::cusum::{EmpiricalCurve, ThresholdEstimate};
use crate::error::{Error, Result};
use crate::game::{DamageSeries, Delay, TradeoffCurve};

/// The bundled case-study demand: 24 hourly values, header `k,demand`.
///
/// The series is a digitized approximation of a daily municipal
/// water-demand profile (night trough, midday peak, evening bump); expected
/// damage is `D(k) = α·d(k)` for a damage-per-demand scale `α`.
pub const CASE_STUDY_DEMAND_CSV: &str = include_str!("../data/daily_demand.csv");

/// Raw case-study demand (α = 1).
pub fn case_study_demand() -> DamageSeries {
    parse_damage_csv(CASE_STUDY_DEMAND_CSV.as_bytes(), Some(1.0)).expect("bundled data is valid")
}

/// Case-study damage series `D(k) = α·d(k)`.
pub fn case_study_damage(alpha: f64) -> Result<DamageSeries> {
    parse_damage_csv(CASE_STUDY_DEMAND_CSV.as_bytes(), Some(alpha))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

/// Loads a damage series from CSV.
///
/// Header `k,damage` takes the values as-is (no `alpha` allowed); header
/// `k,demand` requires `alpha > 0` and scales each value. Timesteps must be
/// contiguous from 1.
pub fn load_damage_csv(path: &Path, alpha: Option<f64>) -> Result<DamageSeries> {
    parse_damage_csv(File::open(path)?, alpha)
}

fn parse_damage_csv<R: Read>(r: R, alpha: Option<f64>) -> Result<DamageSeries> {
    let mut reader = csv_reader(r);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let scale = match (headers.iter().collect::<Vec<_>>().as_slice(), alpha) {
        (["k", "damage"], None) => 1.0,
        (["k", "damage"], Some(_)) => {
            return Err(Error::config("alpha applies only to demand data (header `k,demand`)"))
        }
        (["k", "demand"], Some(a)) if a.is_finite() && a > 0.0 => a,
        (["k", "demand"], Some(a)) => {
            return Err(Error::config(format!("alpha must be finite and > 0, got {a}")))
        }
        (["k", "demand"], None) => {
            return Err(Error::config("demand data (header `k,demand`) requires alpha"))
        }
        (other, _) => {
            return Err(Error::Parse(format!(
                "expected header `k,damage` or `k,demand`, got `{}`",
                other.join(",")
            )))
        }
    };

    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // header is row 1
        let record = record.map_err(|e| Error::parse_at(row, e))?;
        if record.len() != 2 {
            return Err(Error::parse_at(row, format!("expected 2 fields, got {}", record.len())));
        }
        let k: usize = record[0]
            .parse()
            .map_err(|_| Error::parse_at(row, format!("invalid timestep `{}`", &record[0])))?;
        let expected = values.len() + 1;
        if k > expected {
            return Err(Error::parse_at(row, format!("missing k={expected}")));
        }
        if k < expected {
            return Err(Error::parse_at(row, format!("duplicate or out-of-order k={k}")));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse_at(row, format!("invalid value `{}`", &record[1])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::parse_at(row, format!("value must be finite and ≥ 0, got {value}")));
        }
        values.push(scale * value);
    }
    if values.is_empty() {
        return Err(Error::Parse("no data rows".to_string()));
    }
    DamageSeries::new(values)
}

/// Loads a trade-off curve from CSV with header `delay,fp`.
pub fn load_curve_csv(path: &Path) -> Result<TradeoffCurve> {
    parse_curve_csv(File::open(path)?)
}

fn parse_curve_csv<R: Read>(r: R) -> Result<TradeoffCurve> {
    let mut reader = csv_reader(r);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["delay", "fp"] {
        return Err(Error::Parse(format!(
            "expected header `delay,fp`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points: Vec<(Delay, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::parse_at(row, e))?;
        if record.len() != 2 {
            return Err(Error::parse_at(row, format!("expected 2 fields, got {}", record.len())));
        }
        let delay: Delay = record[0]
            .parse()
            .map_err(|_| Error::parse_at(row, format!("invalid delay `{}`", &record[0])))?;
        let fp: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse_at(row, format!("invalid fp `{}`", &record[1])))?;
        if !fp.is_finite() || !(0.0..=1.0).contains(&fp) {
            return Err(Error::parse_at(row, format!("fp must lie in [0, 1], got {fp}")));
        }
        if let Some(&(prev_delay, prev_fp)) = points.last() {
            if delay == prev_delay {
                return Err(Error::parse_at(row, format!("duplicate delay {delay}")));
            }
            if delay < prev_delay {
                return Err(Error::parse_at(row, format!("delays must be ascending, got {delay}")));
            }
            if fp > prev_fp {
                return Err(Error::parse_at(
                    row,
                    format!("fp must be non-increasing, got {fp} after {prev_fp}"),
                ));
            }
        }
        points.push((delay, fp));
    }
    if points.is_empty() {
        return Err(Error::Parse("no data rows".to_string()));
    }
    TradeoffCurve::new(points)
}

/// Two-point exponential fit `FP(δ) = fp0·exp(−b·δ)` with
/// `b = ln(fp0/fp_max)/max_delay`, tabulated at every integer delay in
/// `{0..max_delay}`. Useful when only the endpoints of a trade-off curve are
/// known.
pub fn fit_curve_exponential(fp0: f64, max_delay: Delay, fp_max: f64) -> Result<TradeoffCurve> {
    if !(fp0.is_finite() && fp_max.is_finite() && 0.0 < fp_max && fp_max < fp0 && fp0 <= 1.0) {
        return Err(Error::config(format!(
            "exponential fit requires 0 < fp_max < fp0 ≤ 1, got fp0={fp0}, fp_max={fp_max}"
        )));
    }
    if max_delay < 1 {
        return Err(Error::config("exponential fit requires max_delay ≥ 1"));
    }
    let rate = (fp0 / fp_max).ln() / max_delay as f64;
    let points = (0..=max_delay)
        .map(|delay| (delay, fp0 * (-rate * delay as f64).exp()))
        .collect();
    TradeoffCurve::new(points)
}

pub fn write_damage_csv<W: Write>(mut w: W, d: &DamageSeries) -> Result<()> {
    writeln!(w, "k,damage")?;
    for (i, v) in d.values().iter().enumerate() {
        writeln!(w, "{},{}", i + 1, v)?;
    }
    Ok(())
}

pub fn write_curve_csv<W: Write>(mut w: W, c: &TradeoffCurve) -> Result<()> {
    writeln!(w, "delay,fp")?;
    for p in c.points() {
        writeln!(w, "{},{}", p.delay, p.fp)?;
    }
    Ok(())
}

/// Emits an empirical curve with the simulator's standard columns.
pub fn write_empirical_csv<W: Write>(mut w: W, curve: &EmpiricalCurve) -> Result<()> {
    writeln!(w, "eta,fp_rate,fp_stderr,mean_delay,delay_stderr,censored_fraction")?;
    for p in &curve.points {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.threshold, p.fp_rate, p.fp_stderr, p.mean_delay, p.delay_stderr, p.censored_fraction
        )?;
    }
    Ok(())
}

/// Reads simulator output back in. The per-threshold detection counts are not
/// part of the CSV; a row counts as detected when its censored fraction is
/// below 1 (all the discretization needs).
pub fn read_empirical_csv(path: &Path) -> Result<EmpiricalCurve> {
    parse_empirical_csv(File::open(path)?)
}

fn parse_empirical_csv<R: Read>(r: R) -> Result<EmpiricalCurve> {
    let mut reader = csv_reader(r);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let expected = ["eta", "fp_rate", "fp_stderr", "mean_delay", "delay_stderr", "censored_fraction"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!(
            "expected header `{}`, got `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::parse_at(row, e))?;
        if record.len() != 6 {
            return Err(Error::parse_at(row, format!("expected 6 fields, got {}", record.len())));
        }
        let field = |idx: usize| -> Result<f64> {
            record[idx]
                .parse()
                .map_err(|_| Error::parse_at(row, format!("invalid number `{}`", &record[idx])))
        };
        let censored_fraction = field(5)?;
        points.push(ThresholdEstimate {
            threshold: field(0)?,
            fp_rate: field(1)?,
            fp_stderr: field(2)?,
            mean_delay: field(3)?,
            delay_stderr: field(4)?,
            censored_fraction,
            detected_trials: if censored_fraction < 1.0 { 1 } else { 0 },
        });
    }
    if points.is_empty() {
        return Err(Error::Parse("no data rows".to_string()));
    }
    Ok(EmpiricalCurve { points })
}

/// Loads simulator output and discretizes it into a solver-grade curve.
pub fn load_sim_curve_csv(path: &Path) -> Result<TradeoffCurve> {
    read_empirical_csv(path)?.to_tradeoff_curve()
}
