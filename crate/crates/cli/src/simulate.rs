//! Sample trajectories of the inverse subordinator and the subordinated
//! GBM / ABM it drives.
//!
//! All three series of a trajectory share one clock path and one Brownian
//! path, `GBM = Z₀ exp((μ - σ²/2) S + σ B(S))` and `ABM = Z₀ + μ S + σ B(S)`,
//! so the prices are flat exactly where the clock is.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use subdiff_core::subordinated::uniform_grid;
use subdiff_core::subordinator::{default_delta, Staircase};
use subdiff_core::RngStream;

use crate::config::{field_error, parse, ConfigError, FamilyChoice, Format};
use crate::output::{write_csv, write_json, PathPoint, TrajectoryPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub family: FamilyChoice,
    pub alpha: f64,
    pub lambda: f64,
    pub z0: f64,
    /// Drift `μ` of the parent processes.
    pub drift: f64,
    pub sigma: f64,
    pub horizon: f64,
    pub grid_points: usize,
    pub count: usize,
    pub seed: u64,
    pub delta: Option<f64>,
}

impl Default for SimulateConfig {
    /// Tempered clock with `α = 0.7`, `λ = 1` and unit spot, drift and volatility.
    fn default() -> Self {
        Self {
            family: FamilyChoice::Tempered,
            alpha: 0.7,
            lambda: 1.0,
            z0: 1.0,
            drift: 1.0,
            sigma: 1.0,
            horizon: 1.0,
            grid_points: 1001,
            count: 1,
            seed: crate::config::DEFAULT_SEED,
            delta: None,
        }
    }
}

impl SimulateConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "family" => self.family = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "lambda" => self.lambda = parse(key, v)?,
            "z0" => self.z0 = parse(key, v)?,
            "drift" => self.drift = parse(key, v)?,
            "sigma" => self.sigma = parse(key, v)?,
            "horizon" => self.horizon = parse(key, v)?,
            "grid_points" => self.grid_points = parse(key, v)?,
            "count" => self.count = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "delta" => {
                self.delta = if v == "auto" {
                    None
                } else {
                    Some(parse(key, v)?)
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (key, value) in crate::config::parse_pairs(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.count < 1 {
            return Err(field_error("count", "must be at least 1"));
        }
        if self.grid_points < 2 {
            return Err(field_error("grid_points", "must be at least 2"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(field_error(
                "horizon",
                format!("must be positive, got {}", self.horizon),
            ));
        }
        if !(self.sigma >= 0.0) || !self.z0.is_finite() || !self.drift.is_finite() {
            return Err(field_error(
                "sigma",
                "parent parameters must be finite with sigma >= 0",
            ));
        }
        self.family
            .spec(self.alpha, self.lambda)
            .map_err(|e| field_error("alpha", e))?;
        Ok(())
    }
}

/// `count` trajectories on the shared grid, path-major.
pub fn simulate_trajectories(cfg: &SimulateConfig) -> Result<Vec<TrajectoryPoint>> {
    cfg.validate()?;
    let spec = cfg.family.spec(cfg.alpha, cfg.lambda)?;
    let grid = uniform_grid(cfg.horizon, cfg.grid_points);
    let scheme = Staircase::new(
        cfg.delta
            .unwrap_or_else(|| default_delta(&spec, cfg.horizon)),
    )?;
    let mut out = Vec::with_capacity(cfg.count * grid.len());
    for path in 0..cfg.count {
        let mut s = RngStream::for_draw(cfg.seed, path as u64).sampler();
        let clock = scheme.inverse_path(&spec, &grid, &mut s)?;
        let mut prev = 0.0;
        let mut brownian = 0.0;
        for (&t, &op) in grid.iter().zip(&clock.values) {
            let ds = op - prev;
            if ds > 0.0 {
                brownian += ds.sqrt() * s.normal();
                prev = op;
            }
            let gbm = cfg.z0
                * ((cfg.drift - 0.5 * cfg.sigma * cfg.sigma) * op + cfg.sigma * brownian).exp();
            let abm = cfg.z0 + cfg.drift * op + cfg.sigma * brownian;
            out.push(TrajectoryPoint {
                path,
                t,
                s_t: op,
                gbm,
                abm,
            });
        }
    }
    Ok(out)
}

/// Writes the trajectories under `dir` and returns the files created.
///
/// CSV output is one `t,S_t` file per path plus `trajectories.csv` with all
/// series; JSON output is a single `trajectories.json`.
pub fn simulate_paths(cfg: &SimulateConfig, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let points = simulate_trajectories(cfg)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let create = |name: String| -> Result<(PathBuf, std::io::BufWriter<std::fs::File>)> {
        let p = dir.join(name);
        let f = std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        Ok((p, std::io::BufWriter::new(f)))
    };
    let mut written = Vec::new();
    match format {
        Format::Csv => {
            for path in 0..cfg.count {
                let rows: Vec<PathPoint> = points
                    .iter()
                    .filter(|p| p.path == path)
                    .map(|p| PathPoint { t: p.t, s_t: p.s_t })
                    .collect();
                let (p, w) = create(format!("inverse_path_{path}.csv"))?;
                write_csv(&rows, w).with_context(|| format!("writing {}", p.display()))?;
                written.push(p);
            }
            let (p, w) = create("trajectories.csv".into())?;
            write_csv(&points, w).with_context(|| format!("writing {}", p.display()))?;
            written.push(p);
        }
        Format::Json => {
            let (p, w) = create("trajectories.json".into())?;
            write_json(&points, w).with_context(|| format!("writing {}", p.display()))?;
            written.push(p);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_clock_is_calendar_time() {
        let cfg = SimulateConfig {
            family: FamilyChoice::Identity,
            grid_points: 11,
            ..Default::default()
        };
        for p in simulate_trajectories(&cfg).unwrap() {
            assert_eq!(p.s_t, p.t);
        }
    }

    #[test]
    fn prices_are_flat_where_the_clock_is() {
        let cfg = SimulateConfig {
            count: 3,
            ..Default::default()
        };
        let pts = simulate_trajectories(&cfg).unwrap();
        let mut flats = 0;
        for w in pts.windows(2).filter(|w| w[0].path == w[1].path) {
            assert!(w[1].s_t >= w[0].s_t);
            if w[1].s_t == w[0].s_t {
                flats += 1;
                assert_eq!(w[1].gbm, w[0].gbm);
                assert_eq!(w[1].abm, w[0].abm);
            }
        }
        assert!(flats > 0);
    }

    #[test]
    fn config_keys() {
        let mut cfg = SimulateConfig::default();
        cfg.apply_text("count = 4\nfamily = stable\ndelta = 0.001")
            .unwrap();
        assert_eq!(
            (cfg.count, cfg.family, cfg.delta),
            (4, FamilyChoice::Stable, Some(0.001))
        );
        cfg.count = 0;
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .starts_with("count:"));
    }
}
