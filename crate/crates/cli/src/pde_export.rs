//! Full-grid export of fractional PDE solutions.

use std::str::FromStr;

use anyhow::Result;
use subdiff_core::pde::{
    solve_frac_bachelier_call, solve_frac_bs_call, Coordinate, FractionalOrder, PdeGrid,
};
use subdiff_core::PdeSolution;

use crate::config::ExperimentConfig;
use crate::output::PdePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    BlackScholes,
    Bachelier,
}

impl FromStr for Equation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bs" | "black-scholes" => Ok(Equation::BlackScholes),
            "bachelier" => Ok(Equation::Bachelier),
            _ => Err(format!("unknown equation `{s}` (expected bs or bachelier)")),
        }
    }
}

/// Solves the chosen call equation with the grid of `cfg`.
///
/// The Bachelier equation needs the price coordinate; when `cfg` holds a
/// log-price grid, the same node counts are laid out on `[0, 10 Z₀]`.
pub fn solve(cfg: &ExperimentConfig, alpha: f64, equation: Equation) -> Result<PdeSolution> {
    cfg.validate()?;
    let mp = cfg.market();
    let order = FractionalOrder::new(alpha)?;
    let sol = match equation {
        Equation::BlackScholes => solve_frac_bs_call(&mp, order, &cfg.pde)?,
        Equation::Bachelier => {
            let grid = match cfg.pde.coordinate {
                Coordinate::Price => cfg.pde,
                Coordinate::LogPrice => PdeGrid {
                    theta: cfg.pde.theta,
                    ..PdeGrid::price(mp.z0, cfg.pde.space_nodes, cfg.pde.time_nodes)
                },
            };
            solve_frac_bachelier_call(&mp, order, &grid)?
        }
    };
    Ok(sol)
}

/// Every grid value as `(t, z, value)`, time-major.
pub fn table(sol: &PdeSolution) -> Vec<PdePoint> {
    let g = &sol.grid;
    sol.values
        .iter()
        .enumerate()
        .flat_map(|(n, row)| {
            let t = sol.time_at(n);
            row.iter().enumerate().map(move |(i, &value)| PdePoint {
                t,
                z: g.price_at(i),
                value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_covers_the_grid() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("pde_space_nodes", "10").unwrap();
        cfg.set("pde_time_nodes", "4").unwrap();
        let sol = solve(&cfg, 0.8, Equation::BlackScholes).unwrap();
        let rows = table(&sol);
        assert_eq!(rows.len(), 5 * 11);
        assert_eq!(rows[0].t, 0.0);
        assert_eq!(rows.last().unwrap().t, 2.0);
        assert!(rows
            .iter()
            .filter(|p| p.z == rows[0].z)
            .all(|p| p.value == 0.0));

        let sol = solve(&cfg, 1.0, Equation::Bachelier).unwrap();
        assert_eq!(sol.grid.coordinate, Coordinate::Price);
        assert_eq!(table(&sol)[0].z, 0.0);
    }
}
