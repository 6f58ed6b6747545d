//! Solver library for optimal anomaly-detection thresholds against a
//! strategic attacker.
//!
//! The defender tunes a change detector whose sensitivity trades detection
//! delay against false-positive rate; the attacker observes the configuration
//! and picks the most damaging start time over a finite horizon with
//! time-varying expected damage. The library computes:
//!
//! - the optimal **fixed** threshold (one operating point for the whole
//!   horizon), by exhaustive search with an incremental best-response scan;
//! - the optimal **adaptive** threshold schedule (per-timestep operating
//!   points with a cost per change), by a dynamic program over damage caps;
//! - **brute-force oracles** for both games, used by the test suites;
//! - an empirical **CUSUM simulator** that estimates delay/false-positive
//!   trade-off curves from synthetic observer streams;
//! - CSV/JSON ingestion and reporting, including a bundled daily-demand
//!   case-study dataset.

pub mod adaptive;
pub mod cusum;
pub mod error;
pub mod fixed;
pub mod game;
pub mod io;
pub mod oracle;
pub mod report;
pub mod sweep;

pub use adaptive::{
    best_response_adaptive, damage_search_space, minimum_cost_thresholds,
    minimum_cost_thresholds_with, solve_adaptive, solve_adaptive_with, AdaptiveSolution, DpMode,
    MinCostSchedule,
};
pub use cusum::{
    cusum_update, decide, estimate_curve, Decision, EmpiricalCurve, ObserverModel, SimConfig,
    ThresholdEstimate,
};
pub use error::{Error, Result};
pub use fixed::{best_response_fixed, solve_fixed, FixedSolution};
pub use game::{
    attacker_payoff_adaptive, attacker_payoff_fixed, defender_loss_adaptive, defender_loss_fixed,
    detection_time, schedule_cost, total_damage, AttackPlan, CurvePoint, DamageSeries, Delay,
    DetectionOutcome, GameConfig, ThresholdSchedule, Timestep, TradeoffCurve,
};
pub use oracle::{oracle_adaptive, oracle_fixed, oracle_min_cost, OracleBounds};
