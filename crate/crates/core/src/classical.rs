//! Classical (non-subordinated) pricers.
//!
//! These are evaluated at random horizons `τ = S(T)` by the subordinated
//! engine, so every pricer accepts `τ = 0` and returns the immediate payoff
//! there.

use alloc::sync::Arc;
use alloc::vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{domain, Error, Result};
use crate::special::{normal_cdf, normal_pdf};

/// Market parameters shared by the Bachelier and Black-Scholes models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Spot `Z₀`.
    pub z0: f64,
    /// Strike `K`.
    pub strike: f64,
    /// Risk-free rate `r`.
    pub rate: f64,
    /// Black-Scholes volatility `σ`.
    pub sigma: f64,
    /// Bachelier volatility `σ^Ba`.
    pub sigma_ba: f64,
    /// Expiry `T`.
    pub horizon: f64,
}

impl MarketParams {
    /// Black-Scholes parameters; the Bachelier volatility defaults to `σ Z₀`.
    pub fn new(z0: f64, strike: f64, rate: f64, sigma: f64, horizon: f64) -> Result<Self> {
        let mp = Self {
            z0,
            strike,
            rate,
            sigma,
            sigma_ba: sigma * z0,
            horizon,
        };
        mp.validate()?;
        Ok(mp)
    }

    pub fn with_sigma_ba(mut self, sigma_ba: f64) -> Result<Self> {
        self.sigma_ba = sigma_ba;
        self.validate()?;
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z0 > 0.0 && self.z0.is_finite()) {
            return Err(domain("spot z0", self.z0));
        }
        if !(self.strike >= 0.0 && self.strike.is_finite()) {
            return Err(domain("strike", self.strike));
        }
        if !self.rate.is_finite() {
            return Err(domain("rate", self.rate));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(domain("sigma", self.sigma));
        }
        if !(self.sigma_ba > 0.0 && self.sigma_ba.is_finite()) {
            return Err(domain("sigma_ba", self.sigma_ba));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(domain("horizon", self.horizon));
        }
        Ok(())
    }

    /// At the money, zero rate and `σ^Ba = σ Z₀`: the regime in which the
    /// Bachelier/Black-Scholes gap bound applies.
    pub fn check_gap_regime(&self) -> Result<()> {
        if self.z0 != self.strike {
            return Err(Error::Regime("gap bound needs z0 == strike"));
        }
        if self.rate != 0.0 {
            return Err(Error::Regime("gap bound needs rate == 0"));
        }
        let target = self.sigma * self.z0;
        if (self.sigma_ba - target).abs() > 1e-12 * target {
            return Err(Error::Regime("gap bound needs sigma_ba == sigma * z0"));
        }
        Ok(())
    }
}

/// European payoff with a declared linear growth bound `f(x) ≤ c|x|`.
#[derive(Clone)]
pub struct CustomPayoff {
    payoff: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    growth_bound: f64,
}

impl CustomPayoff {
    /// Spot-checks the growth bound at `x = 10^-3, 10^-2, …, 10^6`. Beyond
    /// these points the bound is taken on trust.
    pub fn new(
        payoff: impl Fn(f64) -> f64 + Send + Sync + 'static,
        growth_bound: f64,
    ) -> Result<Self> {
        if !(growth_bound > 0.0 && growth_bound.is_finite()) {
            return Err(domain("growth bound c", growth_bound));
        }
        for e in -3..=6 {
            let x = libm::pow(10.0, e as f64);
            let fx = payoff(x);
            if !fx.is_finite() || fx > growth_bound * x {
                return Err(Error::InvalidConfig("payoff violates f(x) <= c|x|"));
            }
        }
        Ok(Self {
            payoff: Arc::new(payoff),
            growth_bound,
        })
    }

    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.payoff)(x)
    }
}

impl fmt::Debug for CustomPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPayoff")
            .field("growth_bound", &self.growth_bound)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum OptionSpec {
    EuroCall,
    EuroPut,
    AmericanPut,
    /// Pays `Z(T) - min_{[0,T]} Z`.
    LookbackFloatCall,
    CustomEuropean(CustomPayoff),
}

/// Alias kept for call sites that think of the enum as the option "kind".
pub type OptionKind = OptionSpec;

impl OptionSpec {
    /// Exercise value at spot `z`; `None` for path-dependent payoffs.
    pub fn payoff(&self, z: f64, strike: f64) -> Option<f64> {
        match self {
            OptionSpec::EuroCall => Some((z - strike).max(0.0)),
            OptionSpec::EuroPut | OptionSpec::AmericanPut => Some((strike - z).max(0.0)),
            OptionSpec::LookbackFloatCall => None,
            OptionSpec::CustomEuropean(p) => Some(p.eval(z)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptionSpec::EuroCall => "euro-call",
            OptionSpec::EuroPut => "euro-put",
            OptionSpec::AmericanPut => "american-put",
            OptionSpec::LookbackFloatCall => "lookback-call",
            OptionSpec::CustomEuropean(_) => "custom",
        }
    }
}

/// Number of binomial steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeConfig {
    steps: usize,
}

impl TreeConfig {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig("tree needs at least one step"));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

fn d1_d2(mp: &MarketParams, tau: f64) -> (f64, f64) {
    let vol = mp.sigma * libm::sqrt(tau);
    let d1 = (libm::log(mp.z0 / mp.strike) + (mp.rate + 0.5 * mp.sigma * mp.sigma) * tau) / vol;
    (d1, d1 - vol)
}

/// Black-Scholes call with expiry `tau` (negative `tau` is treated as 0).
pub fn bs_call(mp: &MarketParams, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return (mp.z0 - mp.strike).max(0.0);
    }
    let (d1, d2) = d1_d2(mp, tau);
    mp.z0 * normal_cdf(d1) - mp.strike * libm::exp(-mp.rate * tau) * normal_cdf(d2)
}

/// Black-Scholes put with expiry `tau`.
pub fn bs_put(mp: &MarketParams, tau: f64) -> f64 {
    if !(tau > 0.0) {
        return (mp.strike - mp.z0).max(0.0);
    }
    let (d1, d2) = d1_d2(mp, tau);
    mp.strike * libm::exp(-mp.rate * tau) * normal_cdf(-d2) - mp.z0 * normal_cdf(-d1)
}

/// Zero-rate Bachelier call with volatility `σ^Ba`.
pub fn bachelier_call(mp: &MarketParams, tau: f64) -> Result<f64> {
    if mp.rate != 0.0 {
        return Err(Error::Regime("Bachelier pricer supports rate == 0 only"));
    }
    if !(tau > 0.0) {
        return Ok((mp.z0 - mp.strike).max(0.0));
    }
    let vol = mp.sigma_ba * libm::sqrt(tau);
    let moneyness = mp.z0 - mp.strike;
    if moneyness == 0.0 {
        return Ok(vol / libm::sqrt(2.0 * PI));
    }
    let d = moneyness / vol;
    Ok(moneyness * normal_cdf(d) + vol * normal_pdf(d))
}

/// Cox-Ross-Rubinstein price with `tc.steps()` steps over `[0, tau]`.
///
/// Per-step factors are `u = exp(σ√(τ/n))`, `d = 1/u` and the growth factor is
/// `R = exp(rτ/n)`. A per-step rate of `(1+r)^{1/n}` would not scale with the
/// horizon, and the tree would then fail to converge to the Black-Scholes
/// price for `τ ≠ 1`.
pub fn crr_price(mp: &MarketParams, opt: &OptionSpec, tc: &TreeConfig, tau: f64) -> Result<f64> {
    if matches!(opt, OptionSpec::LookbackFloatCall) {
        return Err(Error::UnsupportedOption(
            "lookback payoff does not satisfy the linear growth bound needed by the tree",
        ));
    }
    let exercise = |z: f64| opt.payoff(z, mp.strike).unwrap_or(0.0);
    if !(tau > 0.0) {
        return Ok(exercise(mp.z0));
    }
    let n = tc.steps();
    let dt = tau / n as f64;
    let up = libm::exp(mp.sigma * libm::sqrt(dt));
    let down = 1.0 / up;
    let growth = libm::exp(mp.rate * dt);
    let q = (growth - down) / (up - down);
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::TreeCalibration { q, steps: n, tau });
    }
    let disc = 1.0 / growth;
    let (pu, pd) = (disc * q, disc * (1.0 - q));
    let up2 = up * up;

    let mut values = vec![0.0; n + 1];
    let mut z = mp.z0 * libm::pow(down, n as f64);
    for v in values.iter_mut() {
        *v = exercise(z);
        z *= up2;
    }
    let american = matches!(opt, OptionSpec::AmericanPut);
    for step in (0..n).rev() {
        let mut z = mp.z0 * libm::pow(down, step as f64);
        for j in 0..=step {
            let cont = pd * values[j] + pu * values[j + 1];
            values[j] = if american {
                cont.max(exercise(z))
            } else {
                cont
            };
            z *= up2;
        }
    }
    Ok(values[0])
}

/// Floating-strike lookback call, continuously monitored, in the
/// Black-Scholes model. Needs `r > 0`.
pub fn lookback_call_closed(mp: &MarketParams, tau: f64) -> Result<f64> {
    if !(mp.rate > 0.0) {
        return Err(domain("rate (lookback closed form needs r > 0)", mp.rate));
    }
    if !(tau > 0.0) {
        return Ok(0.0);
    }
    let (r, s) = (mp.rate, mp.sigma);
    let ratio = s * s / (2.0 * r);
    let sq = libm::sqrt(tau);
    let a1 = (r / s + s / 2.0) * sq;
    let a2 = (r / s - s / 2.0) * sq;
    let z0 = mp.z0;
    Ok(z0 * (1.0 + ratio) * normal_cdf(a1)
        - z0 * libm::exp(-r * tau) * (1.0 - ratio) * normal_cdf(a2)
        - z0 * ratio)
}
