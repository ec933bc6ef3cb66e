//! Price-versus-alpha sweeps.
//!
//! For each alpha the horizon draws are sampled once and shared by every
//! method that averages over them, so the columns of a row differ only by
//! method error. A method's reported time is its own pricing time plus, for
//! draw-based methods, the time spent sampling the shared draws.

use std::time::{Duration, Instant};

use anyhow::{anyhow, bail};
use rayon::prelude::*;
use serde_json::json;
use subdiff_core::pde::{solve_frac_bs_call, FractionalOrder};
use subdiff_core::subordinated::{
    call_subordinated, draw_horizon, lookback_path_sample, price_crr_on, price_lookback_closed_on,
    put_subordinated, uniform_grid,
};
use subdiff_core::subordinator::{Family, LaplaceExponentSpec};
use subdiff_core::{HorizonSampleSet, MarketParams, McConfig, PriceEstimate};

use crate::config::{ConfigError, ExperimentConfig, Method, Payoff};
use crate::output::{Record, ResultRow};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SUBDIFF_THREADS";

/// Worker count: the machine's parallelism, capped by `SUBDIFF_THREADS`.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => cap.min(available),
        _ => available,
    }
}

pub fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| anyhow!("starting worker pool: {e}"))
}

/// Draws of `S(T)` spread over the current pool. Each draw has its own
/// stream, so the result does not depend on the number of workers.
pub fn sample_horizons(
    spec: &LaplaceExponentSpec,
    horizon: f64,
    mc: &McConfig,
) -> subdiff_core::Result<HorizonSampleSet> {
    mc.validate()?;
    let draws = (0..mc.samples)
        .into_par_iter()
        .map(|i| draw_horizon(spec, horizon, mc, i))
        .collect::<subdiff_core::Result<Vec<_>>>()?;
    HorizonSampleSet::from_draws(*spec, horizon, draws, mc.antithetic)
}

/// Lookback price from simulated paths, spread over the current pool.
pub fn lookback_path_mc(
    spec: &LaplaceExponentSpec,
    mp: &MarketParams,
    grid_size: usize,
    mc: &McConfig,
) -> subdiff_core::Result<PriceEstimate> {
    mc.validate()?;
    if grid_size < 2 {
        return Err(subdiff_core::Error::InvalidConfig(
            "path grid needs at least 2 points",
        ));
    }
    let grid = uniform_grid(mp.horizon, grid_size);
    let values = (0..mc.samples)
        .into_par_iter()
        .map(|i| lookback_path_sample(spec, mp, &grid, mc, i))
        .collect::<subdiff_core::Result<Vec<_>>>()?;
    Ok(PriceEstimate::from_values(&values, mc.antithetic))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub alpha: f64,
    pub method: Method,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    /// Successful cells in `(alpha, method)` order.
    pub records: Vec<Record>,
    pub errors: Vec<CellError>,
}

impl ExperimentOutcome {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.records.iter().map(Record::row).collect()
    }

    pub fn is_success(&self) -> bool {
        self.errors.is_empty()
    }

    /// Record for `(alpha, method)`, if that cell succeeded.
    pub fn get(&self, alpha: f64, method: Method) -> Option<&Record> {
        self.records
            .iter()
            .find(|r| r.alpha == alpha && r.method == method.as_str())
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn params(cfg: &ExperimentConfig, method: Method) -> serde_json::Value {
    let mp = cfg.market();
    let mut p = json!({
        "option": cfg.payoff.name(),
        "family": cfg.family.as_str(),
        "z0": mp.z0,
        "strike": mp.strike,
        "rate": mp.rate,
        "sigma": mp.sigma,
        "sigma_ba": mp.sigma_ba,
        "horizon": mp.horizon,
    });
    let extra = match method {
        Method::McClosedForm => json!({ "seed": cfg.mc.seed, "delta": cfg.mc.delta }),
        Method::McCrr => {
            json!({ "seed": cfg.mc.seed, "delta": cfg.mc.delta, "tree_steps": cfg.tree.steps() })
        }
        Method::FdPde => json!({
            "space_nodes": cfg.pde.space_nodes,
            "time_nodes": cfg.pde.time_nodes,
            "x_min": cfg.pde.x_min,
            "x_max": cfg.pde.x_max,
            "theta": cfg.pde.theta,
        }),
        Method::PathMc => {
            json!({ "seed": cfg.mc.seed, "delta": cfg.mc.delta, "path_grid": cfg.path_grid })
        }
    };
    if let (Some(p), serde_json::Value::Object(e)) = (p.as_object_mut(), extra) {
        p.extend(e);
    }
    p
}

fn price_cell(
    cfg: &ExperimentConfig,
    method: Method,
    alpha: f64,
    spec: &LaplaceExponentSpec,
    draws: Option<&HorizonSampleSet>,
) -> anyhow::Result<PriceEstimate> {
    let mp = cfg.market();
    let hs = || draws.ok_or_else(|| anyhow!("horizon draws unavailable"));
    let est = match method {
        Method::McClosedForm => match cfg.payoff {
            Payoff::Call => call_subordinated(hs()?, &mp),
            Payoff::Put => put_subordinated(hs()?, &mp),
            Payoff::Lookback => price_lookback_closed_on(hs()?, &mp)?,
            Payoff::AmericanPut => bail!("the American put has no closed form; use MC-CRR"),
        },
        Method::McCrr => price_crr_on(hs()?, &mp, &cfg.payoff.option_spec(), &cfg.tree)?,
        Method::FdPde => {
            if cfg.payoff != Payoff::Call {
                bail!("the fractional PDE solver prices European calls only");
            }
            let order = match spec.family() {
                Family::Identity => 1.0,
                Family::AlphaStable => alpha,
                Family::TemperedStable => bail!("the fractional PDE models the stable clock only"),
            };
            let sol = solve_frac_bs_call(&mp, FractionalOrder::new(order)?, &cfg.pde)?;
            PriceEstimate::exact(sol.price_at(mp.z0), 0)
        }
        Method::PathMc => {
            if cfg.payoff != Payoff::Lookback {
                bail!("path simulation is implemented for the lookback payoff");
            }
            lookback_path_mc(spec, &mp, cfg.path_grid, &cfg.mc)?
        }
    };
    Ok(est)
}

type CellResult = Result<Record, CellError>;

fn run_alpha(cfg: &ExperimentConfig, alpha: f64) -> Vec<CellResult> {
    let fail = |method: Method, message: String| CellError {
        alpha,
        method,
        message,
    };
    let spec = match cfg.family.spec(alpha, cfg.lambda) {
        Ok(s) => s,
        Err(e) => {
            return cfg
                .methods
                .iter()
                .map(|&m| Err(fail(m, e.to_string())))
                .collect()
        }
    };
    let mut sample_time = Duration::ZERO;
    let draws = if cfg.methods.iter().any(|m| m.uses_horizon_draws()) {
        let start = Instant::now();
        let hs = sample_horizons(&spec, cfg.market().horizon, &cfg.mc);
        sample_time = start.elapsed();
        Some(hs.map_err(|e| e.to_string()))
    } else {
        None
    };
    cfg.methods
        .iter()
        .map(|&method| {
            let shared = match (&draws, method.uses_horizon_draws()) {
                (Some(Err(msg)), true) => return Err(fail(method, msg.clone())),
                (Some(Ok(hs)), true) => Some(hs),
                _ => None,
            };
            let start = Instant::now();
            let est = price_cell(cfg, method, alpha, &spec, shared)
                .map_err(|e| fail(method, format!("{e:#}")))?;
            let mut elapsed = start.elapsed();
            if shared.is_some() {
                elapsed += sample_time;
            }
            Ok(Record {
                method: method.as_str().to_string(),
                alpha,
                lambda: cfg.lambda,
                params: params(cfg, method),
                value: est.value,
                std_error: est.std_error,
                samples: est.samples,
                elapsed_ms: ms(elapsed),
            })
        })
        .collect()
}

/// Runs every `(alpha, method)` cell of `cfg`. Failed cells are reported in
/// [`ExperimentOutcome::errors`]; the others are still returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, ConfigError> {
    cfg.validate()?;
    let pool = thread_pool().map_err(|e| crate::config::field_error("threads", e))?;
    let cells: Vec<Vec<CellResult>> = pool.install(|| {
        cfg.alpha_grid
            .par_iter()
            .map(|&alpha| run_alpha(cfg, alpha))
            .collect()
    });
    let mut out = ExperimentOutcome::default();
    for cell in cells.into_iter().flatten() {
        match cell {
            Ok(r) => out.records.push(r),
            Err(e) => out.errors.push(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Preset;

    #[test]
    fn identity_cell_is_exact() {
        let mut cfg = ExperimentConfig::preset(Preset::Fig2);
        cfg.alpha_grid = vec![1.0];
        cfg.methods = vec![Method::McClosedForm];
        let out = run_experiment(&cfg).unwrap();
        assert!(out.is_success());
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert!((r.value - 1.07923).abs() < 1e-4);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.params["option"], "euro-call");
    }

    #[test]
    fn unsupported_cells_are_errors_not_rows() {
        let mut cfg = ExperimentConfig::preset(Preset::Fig4);
        cfg.alpha_grid = vec![1.0];
        cfg.methods = vec![Method::McCrr, Method::McClosedForm, Method::FdPde];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.errors.len(), 2);
        assert!(out.errors.iter().any(|e| e.method == Method::McCrr));
    }

    #[test]
    fn empty_grid_is_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.alpha_grid.clear();
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn parallel_sampling_matches_sequential() {
        let spec = LaplaceExponentSpec::stable(0.7).unwrap();
        let mc = McConfig::new(64, 3);
        let par = sample_horizons(&spec, 2.0, &mc).unwrap();
        let seq = subdiff_core::subordinated::draw_horizons(&spec, 2.0, &mc).unwrap();
        assert_eq!(par, seq);
        let mp = MarketParams::new(2.0, 2.0, 0.04, 1.0, 1.0).unwrap();
        let a = lookback_path_mc(&spec, &mp, 50, &mc).unwrap();
        let b = subdiff_core::subordinated::price_lookback_path_mc(&spec, &mp, 50, &mc).unwrap();
        assert_eq!(a, b);
    }
}
