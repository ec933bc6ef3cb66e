//! Finite differences for the time-fractional pricing equations.
//!
//! Solves `ᶜD_t^α v = ½ a(z)² v_zz + r z v_z - r v` with `v(z, 0) = (z - K)^+`,
//! `v(0, t) = 0` and `v ~ z` far out, where `t` is time to expiry and
//! `ᶜD_t^α` is the Caputo derivative. `a(z) = σ z` gives the subdiffusive
//! Black-Scholes equation, `a(z) = σ^Ba` the subdiffusive Bachelier equation.
//!
//! Time is discretised by the L1 scheme,
//! `ᶜD_t^α v(t_n) ≈ Δt^{-α}/Γ(2-α) Σ_{j<n} b_j (v^{n-j} - v^{n-j-1})`,
//! `b_j = (j+1)^{1-α} - j^{1-α}`, which is backward Euler at `α = 1`. Space
//! uses central differences and the spatial operator is weighted by `θ`
//! between the new level (`θ = 0`, fully implicit) and the old one
//! (`θ = 1`, explicit). Each level is one tridiagonal solve.

use alloc::vec;
use alloc::vec::Vec;

use crate::classical::MarketParams;
use crate::error::{domain, Error, Result};
use crate::special::gamma_fn;

/// Spatial variable of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    /// `x = ln z`.
    LogPrice,
    /// `x = z`.
    Price,
}

/// Uniform grid: space nodes `x_0..=x_m`, time levels `t_0..=t_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeGrid {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of space intervals `m`; the grid has `m + 1` nodes.
    pub space_nodes: usize,
    /// Number of time steps `N`; the grid has `N + 1` levels.
    pub time_nodes: usize,
    pub theta: f64,
    pub coordinate: Coordinate,
}

impl PdeGrid {
    /// Log-price grid on `[-20, 10]`, fully implicit.
    pub fn log_price(space_nodes: usize, time_nodes: usize) -> Self {
        Self {
            x_min: -20.0,
            x_max: 10.0,
            space_nodes,
            time_nodes,
            theta: 0.0,
            coordinate: Coordinate::LogPrice,
        }
    }

    /// Price grid on `[0, 10 Z₀]`, fully implicit.
    pub fn price(z0: f64, space_nodes: usize, time_nodes: usize) -> Self {
        Self {
            x_min: 0.0,
            x_max: 10.0 * z0,
            space_nodes,
            time_nodes,
            theta: 0.0,
            coordinate: Coordinate::Price,
        }
    }

    pub fn with_range(mut self, x_min: f64, x_max: f64) -> Self {
        self.x_min = x_min;
        self.x_max = x_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::InvalidGrid("need x_min < x_max"));
        }
        if self.space_nodes < 3 {
            return Err(Error::InvalidGrid("need at least 3 space intervals"));
        }
        if self.time_nodes < 2 {
            return Err(Error::InvalidGrid("need at least 2 time steps"));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidGrid("theta must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.space_nodes as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Underlying price at node `i`.
    pub fn price_at(&self, i: usize) -> f64 {
        match self.coordinate {
            Coordinate::LogPrice => libm::exp(self.node(i)),
            Coordinate::Price => self.node(i),
        }
    }

    fn coordinate_of(&self, z: f64) -> f64 {
        match self.coordinate {
            Coordinate::LogPrice => libm::log(z),
            Coordinate::Price => z,
        }
    }
}

/// Order `α ∈ (0, 1]` of the Caputo derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(domain("fractional order alpha", alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }
}

/// L1 weights `b_0..b_{n-1}`; `b_0 = 1`.
pub fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..n)
        .map(|j| {
            if j == 0 {
                1.0
            } else {
                libm::pow((j + 1) as f64, p) - libm::pow(j as f64, p)
            }
        })
        .collect()
}

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i` in place of `d`.
///
/// `lower[0]` and `upper[n-1]` are ignored. Needs a nonsingular system that
/// does not require pivoting (diagonally dominant systems qualify).
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c_star = vec![0.0; n];
    let mut denom = diag[0];
    c_star[0] = upper[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c_star[i - 1];
        c_star[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c_star[i] * rhs[i + 1];
    }
}

/// Values on the full time × space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution {
    pub grid: PdeGrid,
    pub horizon: f64,
    /// `values[n][i]` at time-to-expiry `t_n`, node `x_i`.
    pub values: Vec<Vec<f64>>,
}

impl PdeSolution {
    pub fn time_at(&self, n: usize) -> f64 {
        self.horizon * n as f64 / self.grid.time_nodes as f64
    }

    /// Bilinear interpolation at underlying price `z` and time-to-expiry `t`.
    pub fn interpolate(&self, z: f64, t: f64) -> f64 {
        let g = &self.grid;
        let x = g.coordinate_of(z).clamp(g.x_min, g.x_max);
        let fi = ((x - g.x_min) / g.dx()).min(g.space_nodes as f64);
        let i = (libm::floor(fi) as usize).min(g.space_nodes - 1);
        let wx = fi - i as f64;
        let ft = (t.clamp(0.0, self.horizon) / self.horizon * g.time_nodes as f64)
            .min(g.time_nodes as f64);
        let n = (libm::floor(ft) as usize).min(g.time_nodes - 1);
        let wt = ft - n as f64;
        let at = |row: &[f64]| row[i] * (1.0 - wx) + row[i + 1] * wx;
        at(&self.values[n]) * (1.0 - wt) + at(&self.values[n + 1]) * wt
    }

    /// Value at spot `z` at expiry horizon.
    pub fn price_at(&self, z: f64) -> f64 {
        self.interpolate(z, self.horizon)
    }
}

/// Drift / diffusion / reaction coefficients of the spatial operator at node `i`,
/// as `(lower, centre, upper)` weights on `v_{i-1}, v_i, v_{i+1}`.
type Stencil = dyn Fn(usize) -> (f64, f64, f64);

fn solve(
    mp: &MarketParams,
    order: FractionalOrder,
    grid: &PdeGrid,
    stencil: &Stencil,
) -> Result<PdeSolution> {
    grid.validate()?;
    if !(mp.horizon > 0.0) {
        return Err(domain("horizon T", mp.horizon));
    }
    let alpha = order.alpha();
    let m = grid.space_nodes;
    let steps = grid.time_nodes;
    let dt = mp.horizon / steps as f64;
    let weights = l1_weights(alpha, steps);
    debug_assert!(weights.iter().all(|&b| b >= 0.0));
    let mu = libm::pow(dt, alpha) * gamma_fn(2.0 - alpha)?;
    let theta = grid.theta;

    let far_price = grid.price_at(m);
    let far_value = |t: f64| {
        if alpha == 1.0 {
            far_price - mp.strike * libm::exp(-mp.rate * t)
        } else {
            far_price
        }
    };
    let blowup = 10.0 * far_price.max(mp.strike);

    let initial: Vec<f64> = (0..=m)
        .map(|i| (grid.price_at(i) - mp.strike).max(0.0))
        .collect();
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    levels.push(initial);

    let interior = m - 1;
    let coeffs: Vec<(f64, f64, f64)> = (1..m).map(stencil).collect();
    let lower: Vec<f64> = coeffs.iter().map(|c| -mu * (1.0 - theta) * c.0).collect();
    let diag: Vec<f64> = coeffs
        .iter()
        .map(|c| 1.0 - mu * (1.0 - theta) * c.1)
        .collect();
    let upper: Vec<f64> = coeffs.iter().map(|c| -mu * (1.0 - theta) * c.2).collect();

    let mut rhs = vec![0.0; interior];
    for n in 1..=steps {
        let t = n as f64 * dt;
        let boundary = far_value(t);
        // history: b_{n-1} v⁰ + Σ_{j=1}^{n-1} (b_{j-1} - b_j) v^{n-j}
        for (k, r) in rhs.iter_mut().enumerate() {
            *r = weights[n - 1] * levels[0][k + 1];
        }
        for j in 1..n {
            let w = weights[j - 1] - weights[j];
            if w != 0.0 {
                let level = &levels[n - j];
                for (k, r) in rhs.iter_mut().enumerate() {
                    *r += w * level[k + 1];
                }
            }
        }
        if theta > 0.0 {
            let prev = &levels[n - 1];
            for (k, r) in rhs.iter_mut().enumerate() {
                let (a, b, c) = coeffs[k];
                *r += mu * theta * (a * prev[k] + b * prev[k + 1] + c * prev[k + 2]);
            }
        }
        // Dirichlet data: v = 0 at x_min, far asymptote at x_max.
        rhs[interior - 1] -= upper[interior - 1] * boundary;

        thomas_solve(&lower, &diag, &upper, &mut rhs);
        let mut level = Vec::with_capacity(m + 1);
        level.push(0.0);
        level.extend_from_slice(&rhs);
        level.push(boundary);
        if let Some(bad) = level.iter().find(|v| !v.is_finite() || v.abs() > blowup) {
            return Err(Error::Unstable {
                step: n,
                value: *bad,
            });
        }
        levels.push(level);
    }
    Ok(PdeSolution {
        grid: *grid,
        horizon: mp.horizon,
        values: levels,
    })
}

/// Call under the subdiffusive Black-Scholes equation.
pub fn solve_frac_bs_call(
    mp: &MarketParams,
    order: FractionalOrder,
    grid: &PdeGrid,
) -> Result<PdeSolution> {
    let dx = grid.dx();
    let (r, s2) = (mp.rate, mp.sigma * mp.sigma);
    match grid.coordinate {
        Coordinate::LogPrice => {
            // ½σ² v_xx + (r - ½σ²) v_x - r v
            let diff = 0.5 * s2 / (dx * dx);
            let conv = (r - 0.5 * s2) / (2.0 * dx);
            let stencil = move |_i: usize| (diff - conv, -2.0 * diff - r, diff + conv);
            solve(mp, order, grid, &stencil)
        }
        Coordinate::Price => {
            if grid.x_min < 0.0 {
                return Err(Error::InvalidGrid(
                    "Black-Scholes price grid must start at z >= 0",
                ));
            }
            let g = *grid;
            let stencil = move |i: usize| {
                let z = g.node(i);
                let diff = 0.5 * s2 * z * z / (dx * dx);
                let conv = r * z / (2.0 * dx);
                (diff - conv, -2.0 * diff - r, diff + conv)
            };
            solve(mp, order, grid, &stencil)
        }
    }
}

/// Call under the subdiffusive Bachelier equation
/// `ᶜD_t^α w = ½(σ^Ba)² w_zz + r z w_z - r w`, in the price coordinate.
///
/// The lower boundary carries `w = 0`. With the default `x_min = 0` this is the
/// condition `w(0, t) = 0`; the ABM is then absorbed at zero. Extending
/// `x_min` well below the strike recovers the unrestricted Bachelier price.
pub fn solve_frac_bachelier_call(
    mp: &MarketParams,
    order: FractionalOrder,
    grid: &PdeGrid,
) -> Result<PdeSolution> {
    if grid.coordinate != Coordinate::Price {
        return Err(Error::InvalidGrid(
            "Bachelier equation is solved in the price coordinate",
        ));
    }
    let dx = grid.dx();
    let r = mp.rate;
    let diff = 0.5 * mp.sigma_ba * mp.sigma_ba / (dx * dx);
    let g = *grid;
    let stencil = move |i: usize| {
        let conv = r * g.node(i) / (2.0 * dx);
        (diff - conv, -2.0 * diff - r, diff + conv)
    };
    solve(mp, order, grid, &stencil)
}
