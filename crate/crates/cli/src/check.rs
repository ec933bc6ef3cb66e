//! Relation checks on shared horizon draws: put-call parity and the
//! Bachelier/Black-Scholes call gap against its bound.

use std::str::FromStr;

use rayon::prelude::*;
use subdiff_core::subordinated::{bachelier_gap_and_bound, parity_residual};

use crate::config::{field_error, ConfigError, ExperimentConfig};
use crate::experiment::{sample_horizons, thread_pool};
use crate::output::CheckRow;

/// Largest parity residual accepted on shared draws.
pub const PARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `P - C - K E e^{-rS(T)} + Z₀ = 0`.
    Parity,
    /// `0 <= C^Ba - C <= bound`; needs `r = 0` and `σ^Ba = σ Z₀`.
    GapBound,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Parity => "parity",
            Relation::GapBound => "gap-bound",
        }
    }
}

impl FromStr for Relation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "parity" => Ok(Relation::Parity),
            "gap-bound" | "gap" | "bound" => Ok(Relation::GapBound),
            _ => Err(format!(
                "unknown check `{s}` (expected parity or gap-bound)"
            )),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    /// Checks that could not be evaluated, e.g. outside their regime.
    pub errors: Vec<String>,
}

impl CheckReport {
    /// True when every requested check ran and passed.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.rows.iter().all(|r| r.pass)
    }
}

fn check_alpha(
    cfg: &ExperimentConfig,
    relations: &[Relation],
    alpha: f64,
) -> (Vec<CheckRow>, Vec<String>) {
    let mp = cfg.market();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let hs = match cfg
        .family
        .spec(alpha, cfg.lambda)
        .and_then(|spec| sample_horizons(&spec, mp.horizon, &cfg.mc))
    {
        Ok(hs) => hs,
        Err(e) => {
            errors.push(format!("alpha={alpha}: {e}"));
            return (rows, errors);
        }
    };
    for &relation in relations {
        match relation {
            Relation::Parity => {
                let residual = parity_residual(&hs, &mp);
                rows.push(CheckRow {
                    check: relation.as_str().into(),
                    alpha,
                    value: residual,
                    std_error: 0.0,
                    limit: PARITY_TOLERANCE,
                    pass: residual.abs() < PARITY_TOLERANCE,
                });
            }
            Relation::GapBound => match bachelier_gap_and_bound(&hs, &mp) {
                Ok((gap, bound)) => rows.push(CheckRow {
                    check: relation.as_str().into(),
                    alpha,
                    value: gap.value,
                    std_error: gap.std_error,
                    limit: bound,
                    pass: gap.value >= -3.0 * gap.std_error
                        && gap.value <= bound + 3.0 * gap.std_error,
                }),
                Err(e) => errors.push(format!("alpha={alpha}: {} check: {e}", relation.as_str())),
            },
        }
    }
    (rows, errors)
}

/// Evaluates `relations` at every alpha of `cfg` on one set of draws per alpha.
pub fn check_relations(
    cfg: &ExperimentConfig,
    relations: &[Relation],
) -> Result<CheckReport, ConfigError> {
    cfg.validate()?;
    if relations.is_empty() {
        return Err(field_error("checks", "must not be empty"));
    }
    let pool = thread_pool().map_err(|e| field_error("threads", e))?;
    let parts: Vec<_> = pool.install(|| {
        cfg.alpha_grid
            .par_iter()
            .map(|&a| check_alpha(cfg, relations, a))
            .collect()
    });
    let mut report = CheckReport::default();
    for (rows, errors) in parts {
        report.rows.extend(rows);
        report.errors.extend(errors);
    }
    Ok(report)
}
