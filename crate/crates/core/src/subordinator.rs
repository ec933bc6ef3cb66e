//! Subordinators and their inverses.
//!
//! A subordinator `U(τ)` is a strictly increasing Lévy process with
//! `E exp(-u U(τ)) = exp(-τ ψ(u))`. Its first-passage inverse
//! `S(t) = inf{τ > 0 : U(τ) > t}` is the random operational clock that drives
//! the subordinated market models. Two Laplace exponents are supported:
//! `ψ(u) = u^α` (α-stable) and `ψ(u) = (u + λ)^α - λ^α` (tempered stable),
//! plus the degenerate clock `S(t) = t`.
//!
//! Inverses are approximated by the staircase scheme on an operational-time
//! grid of step `δ`: `S_δ(t) = δ (min{k ≥ 1 : U(kδ) > t} - 1)`, which satisfies
//! `S_δ(t) ≤ S(t) ≤ S_δ(t) + δ` pathwise.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::rng::{RngStream, Sampler};
use crate::special::gamma_fn;

/// Default cap on staircase steps for a single first passage.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Expected number of staircase steps targeted by [`default_delta`].
pub const TARGET_STEPS: f64 = 1_000.0;

/// Rejection draws are split so each piece is accepted with at least this probability.
const MIN_ACCEPTANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    AlphaStable,
    TemperedStable,
    Identity,
}

/// Laplace exponent `ψ` identifying the subordinator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceExponentSpec {
    family: Family,
    alpha: f64,
    lambda: f64,
}

impl LaplaceExponentSpec {
    /// `ψ(u) = u^α` with `0 < α < 1`.
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain("stable index alpha (must lie in (0,1))", alpha));
        }
        Ok(Self {
            family: Family::AlphaStable,
            alpha,
            lambda: 0.0,
        })
    }

    /// `ψ(u) = (u + λ)^α - λ^α`. A zero tempering collapses to the stable family.
    pub fn tempered(alpha: f64, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(domain("tempering lambda", lambda));
        }
        let stable = Self::stable(alpha)?;
        if lambda == 0.0 {
            return Ok(stable);
        }
        Ok(Self {
            family: Family::TemperedStable,
            alpha,
            lambda,
        })
    }

    /// The classical clock `S(t) = t`.
    pub fn identity() -> Self {
        Self {
            family: Family::Identity,
            alpha: 1.0,
            lambda: 0.0,
        }
    }

    /// Stable spec for `α < 1`, identity for `α = 1`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(Self::identity())
        } else {
            Self::stable(alpha)
        }
    }

    /// Tempered spec for `α < 1`, identity for `α = 1`.
    pub fn from_alpha_lambda(alpha: f64, lambda: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(Self::identity())
        } else {
            Self::tempered(alpha, lambda)
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `ψ(u)`.
    pub fn laplace_exponent(&self, u: f64) -> f64 {
        match self.family {
            Family::Identity => u,
            Family::AlphaStable => libm::pow(u, self.alpha),
            Family::TemperedStable => {
                libm::pow(u + self.lambda, self.alpha) - libm::pow(self.lambda, self.alpha)
            }
        }
    }

    /// Rough size of `E S(t)`, used to pick the staircase step.
    ///
    /// Exact for the stable and identity clocks. For the tempered clock it
    /// takes the larger of the stable mean and the renewal rate `t / E U(1)`.
    pub fn mean_inverse_scale(&self, t: f64) -> f64 {
        match self.family {
            Family::Identity => t,
            Family::AlphaStable => stable_inverse_mean(self.alpha, t),
            Family::TemperedStable => {
                let renewal = t / (self.alpha * libm::pow(self.lambda, self.alpha - 1.0));
                stable_inverse_mean(self.alpha, t).max(renewal)
            }
        }
    }

    /// Draw of the increment `U(τ + dt) - U(τ)`.
    pub(crate) fn increment(&self, dt: f64, s: &mut Sampler) -> f64 {
        match self.family {
            Family::Identity => dt,
            Family::AlphaStable => libm::pow(dt, 1.0 / self.alpha) * unit_stable(self.alpha, s),
            Family::TemperedStable => tempered(self.alpha, self.lambda, dt, s),
        }
    }
}

fn stable_inverse_mean(alpha: f64, t: f64) -> f64 {
    libm::pow(t, alpha) / libm::tgamma(alpha + 1.0)
}

/// Kanter / Chambers-Mallows-Stuck draw with `E exp(-u X) = exp(-u^α)`.
///
/// `X = [sin(αV)^α sin((1-α)V)^(1-α) / (sin V · W^(1-α))]^(1/α)` with
/// `V ~ U(0, π)` and `W ~ Exp(1)`, evaluated in log form.
#[inline]
fn unit_stable(alpha: f64, s: &mut Sampler) -> f64 {
    let v = PI * s.uniform();
    let w = s.exp1();
    let (sin_v, cos_v) = libm::sincos(v);
    let (sin_av, cos_av) = libm::sincos(alpha * v);
    // sin((1-α)v) by the angle-difference identity
    let sin_bv = sin_v * cos_av - cos_v * sin_av;
    let log_a = libm::log(sin_av / sin_v) + (1.0 - alpha) * libm::log(sin_bv / (sin_av * w));
    libm::exp(log_a / alpha)
}

/// Exponentially tilted stable draw by rejection.
fn tempered(alpha: f64, lambda: f64, dt: f64, s: &mut Sampler) -> f64 {
    // log of the acceptance probability for the whole of dt
    let log_accept = -dt * libm::pow(lambda, alpha);
    let pieces = if log_accept < libm::log(MIN_ACCEPTANCE) {
        libm::ceil(log_accept / libm::log(MIN_ACCEPTANCE)) as u64
    } else {
        1
    };
    let piece = dt / pieces as f64;
    let scale = libm::pow(piece, 1.0 / alpha);
    let mut total = 0.0;
    for _ in 0..pieces {
        loop {
            let x = scale * unit_stable(alpha, s);
            if s.bernoulli(libm::exp(-lambda * x)) {
                total += x;
                break;
            }
        }
    }
    total
}

/// Draw of `U_ψα(dt)`; distributed as `dt^{1/α} U_ψα(1)`.
pub fn sample_stable_subordinator_increment(alpha: f64, dt: f64, rng: RngStream) -> Result<f64> {
    let spec = LaplaceExponentSpec::stable(alpha)?;
    check_positive("dt", dt)?;
    Ok(spec.increment(dt, &mut rng.sampler()))
}

/// Draw with Laplace transform `exp(-dt ((u + λ)^α - λ^α))`.
pub fn sample_tempered_increment(alpha: f64, lambda: f64, dt: f64, rng: RngStream) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(domain("tempering lambda", lambda));
    }
    let spec = LaplaceExponentSpec::tempered(alpha, lambda)?;
    check_positive("dt", dt)?;
    Ok(spec.increment(dt, &mut rng.sampler()))
}

fn check_positive(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(what, x))
    }
}

/// Step `δ` giving about [`TARGET_STEPS`] staircase steps up to `E S(t)`.
pub fn default_delta(spec: &LaplaceExponentSpec, t: f64) -> f64 {
    spec.mean_inverse_scale(t) / TARGET_STEPS
}

/// Staircase first-passage scheme with operational step `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Staircase {
    pub delta: f64,
    pub max_steps: u64,
}

impl Staircase {
    pub fn new(delta: f64) -> Result<Self> {
        check_positive("delta", delta)?;
        Ok(Self {
            delta,
            max_steps: DEFAULT_MAX_STEPS,
        })
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// `S_δ(t)` for one fresh driving path.
    pub fn inverse_at(&self, spec: &LaplaceExponentSpec, t: f64, s: &mut Sampler) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain("time t", t));
        }
        if spec.family == Family::Identity {
            return Ok(t);
        }
        let mut walk = Walk::new(spec, self);
        walk.pass(t, s)
    }

    /// `S_δ` along an increasing grid, all from one driving path.
    pub fn inverse_path(
        &self,
        spec: &LaplaceExponentSpec,
        grid: &[f64],
        s: &mut Sampler,
    ) -> Result<InversePath> {
        validate_grid(grid)?;
        if spec.family == Family::Identity {
            return Ok(InversePath {
                times: grid.to_vec(),
                values: grid.to_vec(),
            });
        }
        let mut walk = Walk::new(spec, self);
        let mut values = Vec::with_capacity(grid.len());
        for &t in grid {
            values.push(walk.pass(t, s)?);
        }
        Ok(InversePath {
            times: grid.to_vec(),
            values,
        })
    }
}

/// Operational-time random walk `k ↦ U(kδ)`.
struct Walk<'a> {
    spec: &'a LaplaceExponentSpec,
    scheme: &'a Staircase,
    stable_scale: f64,
    k: u64,
    level: f64,
}

impl<'a> Walk<'a> {
    fn new(spec: &'a LaplaceExponentSpec, scheme: &'a Staircase) -> Self {
        let stable_scale = libm::pow(scheme.delta, 1.0 / spec.alpha);
        Self {
            spec,
            scheme,
            stable_scale,
            k: 0,
            level: 0.0,
        }
    }

    #[inline]
    fn step(&mut self, s: &mut Sampler) {
        self.level += match self.spec.family {
            Family::AlphaStable => self.stable_scale * unit_stable(self.spec.alpha, s),
            _ => self.spec.increment(self.scheme.delta, s),
        };
        self.k += 1;
    }

    /// Advance until `U(kδ) > t`; returns `δ (k - 1)`.
    fn pass(&mut self, t: f64, s: &mut Sampler) -> Result<f64> {
        while self.k == 0 || self.level <= t {
            if self.k >= self.scheme.max_steps {
                return Err(Error::StepLimit {
                    limit: self.scheme.max_steps,
                    t,
                    delta: self.scheme.delta,
                });
            }
            self.step(s);
        }
        Ok(self.scheme.delta * (self.k - 1) as f64)
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("time grid is empty"));
    }
    if !(grid[0] >= 0.0) {
        return Err(Error::InvalidGrid("time grid must start at or after 0"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("time grid must be strictly increasing"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("time grid must be finite"));
    }
    Ok(())
}

/// `S_δ(t)` with the default step cap.
pub fn sample_inverse_at(
    spec: &LaplaceExponentSpec,
    t: f64,
    delta: f64,
    rng: RngStream,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("time t", t));
    }
    Staircase::new(delta)?.inverse_at(spec, t, &mut rng.sampler())
}

/// Inverse subordinator along `grid` from a single driving realization.
pub fn sample_inverse_path(
    spec: &LaplaceExponentSpec,
    grid: &[f64],
    delta: f64,
    rng: RngStream,
) -> Result<InversePath> {
    Staircase::new(delta)?.inverse_path(spec, grid, &mut rng.sampler())
}

/// `E S(t)^k = t^{kα} Γ(k+1) / Γ(kα+1)` for the α-stable inverse subordinator.
pub fn inverse_moment(alpha: f64, k: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain("alpha", alpha));
    }
    if !(k > 0.0) {
        return Err(domain("moment order k", k));
    }
    if !(t > 0.0) {
        return Err(domain("time t", t));
    }
    Ok(libm::pow(t, k * alpha) * gamma_fn(k + 1.0)? / gamma_fn(k * alpha + 1.0)?)
}

/// Discretised subordinator `U(kδ)`, `k = 0, 1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPath {
    pub step: f64,
    pub values: Vec<f64>,
}

impl SubordinatorPath {
    /// `steps` increments of size `step`, drawn in the same order the staircase
    /// walk draws them.
    pub fn sample(
        spec: &LaplaceExponentSpec,
        step: f64,
        steps: usize,
        rng: RngStream,
    ) -> Result<Self> {
        let scheme = Staircase::new(step)?;
        let mut s = rng.sampler();
        let mut walk = Walk::new(spec, &scheme);
        let mut values = Vec::with_capacity(steps + 1);
        values.push(0.0);
        for _ in 0..steps {
            walk.step(&mut s);
            values.push(walk.level);
        }
        Ok(Self { step, values })
    }

    /// Staircase inverse read off this path, `None` if the path never exceeds `t`.
    pub fn inverse_at(&self, t: f64) -> Option<f64> {
        let first = 1 + self.values[1..].partition_point(|&u| u <= t);
        (first < self.values.len()).then(|| self.step * (first - 1) as f64)
    }

    /// Every `factor`-th point, i.e. the same realization on a coarser step.
    pub fn coarsen(&self, factor: usize) -> Self {
        Self {
            step: self.step * factor as f64,
            values: self.values.iter().step_by(factor).copied().collect(),
        }
    }
}

/// Inverse subordinator sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InversePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl InversePath {
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("inverse path is never empty")
    }
}
