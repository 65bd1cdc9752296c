//! Subcommand implementations behind the `thz-ris` binary. Each command
//! returns the CSV rows it would print plus an outcome that maps to the
//! process exit code.

pub mod config;
pub mod report;
pub mod sweep;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::montecarlo::{estimate_ergodic_rate, McEstimate};

pub use config::ScenarioConfig;
pub use report::{to_csv_string, write_csv, Row, HEADER};
pub use sweep::{parse_list, SweepParam, SweepSpec};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NUMERIC: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const PARTIAL_SWEEP: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ValidationFailed,
    PartialFailure,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => exit::OK,
            Outcome::ValidationFailed => exit::VALIDATION,
            Outcome::PartialFailure => exit::PARTIAL_SWEEP,
        }
    }
}

/// Exit code for an error that aborted a command.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Io(_) => exit::USAGE,
        _ => exit::NUMERIC,
    }
}

/// Relative gap `|a - mc| / |mc|` and the pass decision
/// `|a - mc| <= max(tol_rel·|mc|, 4·stderr)`.
pub fn compare(analytic: f64, mc: &McEstimate, tol_rel: f64) -> (f64, bool) {
    let diff = (analytic - mc.mean).abs();
    let rel_gap = if mc.mean == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / mc.mean.abs()
    };
    let pass = diff <= (tol_rel * mc.mean.abs()).max(4.0 * mc.std_error);
    (rel_gap, pass)
}

pub fn run_capacity(cfg: &ScenarioConfig) -> Result<Vec<Row>> {
    let model = cfg.model()?;
    let c = model.ergodic_capacity(&cfg.quad)?;
    Ok(vec![Row {
        capacity_bits: Some(c.capacity_bits),
        quad_err: Some(c.quad_err),
        ..Row::default()
    }])
}

pub fn run_mc(cfg: &ScenarioConfig) -> Result<Vec<Row>> {
    let model = cfg.model()?;
    let est = estimate_ergodic_rate(&model, &cfg.mc)?;
    Ok(vec![Row {
        mc_mean: Some(est.mean),
        mc_stderr: Some(est.std_error),
        ..Row::default()
    }])
}

pub fn run_validate(cfg: &ScenarioConfig) -> Result<(Vec<Row>, Outcome)> {
    let model = cfg.model()?;
    let c = model.ergodic_capacity(&cfg.quad)?;
    let est = estimate_ergodic_rate(&model, &cfg.mc)?;
    let (rel_gap, pass) = compare(c.capacity_bits, &est, cfg.tol_rel);
    let row = Row {
        capacity_bits: Some(c.capacity_bits),
        quad_err: Some(c.quad_err),
        mc_mean: Some(est.mean),
        mc_stderr: Some(est.std_error),
        rel_gap: Some(rel_gap),
        error: (!pass).then(|| format!("validation failed: rel_gap {rel_gap:.3e} exceeds tol_rel {} and 4 standard errors", cfg.tol_rel)),
        ..Row::default()
    };
    let outcome = if pass { Outcome::Ok } else { Outcome::ValidationFailed };
    Ok((vec![row], outcome))
}

fn sweep_point(cfg: &ScenarioConfig, param: SweepParam, value: f64, with_mc: bool) -> Result<Row> {
    let point = param.apply(cfg, value)?;
    let model = point.model()?;
    let c = model.ergodic_capacity(&point.quad)?;
    let mut row = Row {
        param: Some(param.name().to_string()),
        value: Some(value),
        capacity_bits: Some(c.capacity_bits),
        quad_err: Some(c.quad_err),
        ..Row::default()
    };
    if with_mc {
        let est = estimate_ergodic_rate(&model, &point.mc)?;
        row.mc_mean = Some(est.mean);
        row.mc_stderr = Some(est.std_error);
        row.rel_gap = Some(compare(c.capacity_bits, &est, point.tol_rel).0);
    }
    Ok(row)
}

/// Evaluates every grid point (concurrently); rows come back in grid order.
/// A failing point gets an `error` cell and the sweep carries on.
pub fn run_sweep(cfg: &ScenarioConfig, sweep: &SweepSpec, with_mc: bool) -> (Vec<Row>, Outcome) {
    let rows: Vec<Row> = sweep
        .values
        .par_iter()
        .map(|&v| {
            sweep_point(cfg, sweep.param, v, with_mc).unwrap_or_else(|e| Row {
                param: Some(sweep.param.name().to_string()),
                value: Some(v),
                error: Some(e.to_string()),
                ..Row::default()
            })
        })
        .collect();
    let outcome = if rows.iter().any(|r| r.error.is_some()) {
        Outcome::PartialFailure
    } else {
        Outcome::Ok
    };
    (rows, outcome)
}
