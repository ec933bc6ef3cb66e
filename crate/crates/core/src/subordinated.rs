//! Prices in the subordinated models by Monte Carlo over the random horizon.
//!
//! In the subordinated Black-Scholes model the price of a European claim is
//! the classical price averaged over the operational horizon,
//! `C_S(T) = E C(S(T))`. The estimator draws `M` horizons `S⁽ⁱ⁾(T)`, evaluates a
//! classical pricer at each one and reports the sample mean with its standard
//! error. Horizon draws are kept in a [`HorizonSampleSet`] so that several
//! estimators can share them; identities that hold per horizon (put-call
//! parity, the Bachelier/Black-Scholes gap) then hold for the estimates too.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::time::Duration;

use crate::classical::{
    bachelier_call, bs_call, bs_put, crr_price, lookback_call_closed, MarketParams, OptionSpec,
    TreeConfig,
};
use crate::error::{domain, Error, Result};
use crate::rng::{RngStream, Sampler};
use crate::subordinator::{
    default_delta, inverse_moment, Family, LaplaceExponentSpec, Staircase, DEFAULT_MAX_STEPS,
};

/// Default number of monitoring points for path Monte Carlo.
pub const DEFAULT_PATH_GRID: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Operational-time step of the staircase; `None` picks
    /// [`default_delta`] for the horizon at hand.
    pub delta: Option<f64>,
    /// Pair draw `2i+1` with the mirror image of draw `2i`.
    pub antithetic: bool,
    pub max_steps: u64,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            delta: None,
            antithetic: false,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidConfig(
                "need at least 2 samples for a standard error",
            ));
        }
        if self.antithetic && !self.samples.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "antithetic sampling needs an even sample count",
            ));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(domain("delta", d));
            }
        }
        Ok(())
    }

    /// Staircase used for horizon `t`.
    pub fn staircase(&self, spec: &LaplaceExponentSpec, t: f64) -> Result<Staircase> {
        let delta = self.delta.unwrap_or_else(|| default_delta(spec, t));
        Ok(Staircase::new(delta)?.with_max_steps(self.max_steps))
    }

    /// Sampler for draw `index`. Under antithetic sampling, odd draws mirror
    /// the preceding even draw.
    pub fn sampler(&self, index: usize) -> Sampler {
        if self.antithetic {
            let stream = RngStream::for_draw(self.seed, (index / 2) as u64);
            if index % 2 == 1 {
                stream.mirrored_sampler()
            } else {
                stream.sampler()
            }
        } else {
            RngStream::for_draw(self.seed, index as u64).sampler()
        }
    }
}

/// Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEstimate {
    pub value: f64,
    /// Sample standard deviation over `√samples` (unbiased variance).
    pub std_error: f64,
    pub samples: usize,
    /// Wall-clock cost; zero unless filled in by a timing wrapper.
    pub elapsed: Duration,
}

impl PriceEstimate {
    pub fn exact(value: f64, samples: usize) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples,
            elapsed: Duration::ZERO,
        }
    }

    /// Mean and standard error of `values`, summed in index order.
    ///
    /// With `paired` set, consecutive pairs are averaged first and the error
    /// comes from the pair means.
    pub fn from_values(values: &[f64], paired: bool) -> Self {
        let samples = values.len();
        if paired {
            let means: Vec<f64> = values
                .chunks(2)
                .map(|p| 0.5 * (p[0] + p[p.len() - 1]))
                .collect();
            let mut est = Self::from_values(&means, false);
            est.samples = samples;
            return est;
        }
        if samples == 0 {
            return Self::exact(f64::NAN, 0);
        }
        // Shifted accumulation: constant inputs give the constant back exactly.
        let shift = values[0];
        let n = samples as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for &v in values {
            let d = v - shift;
            sum += d;
            sum_sq += d * d;
        }
        let mean_shift = sum / n;
        let var = if samples > 1 {
            ((sum_sq - sum * mean_shift) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: shift + mean_shift,
            std_error: libm::sqrt(var / n),
            samples,
            elapsed: Duration::ZERO,
        }
    }

    pub fn with_elapsed(mut self, elapsed: Duration) -> Self {
        self.elapsed = elapsed;
        self
    }
}

/// Realizations `S⁽ⁱ⁾(T)` shared across estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonSampleSet {
    pub spec: LaplaceExponentSpec,
    pub horizon: f64,
    pub draws: Vec<f64>,
    /// Draws come in antithetic pairs.
    pub paired: bool,
}

impl HorizonSampleSet {
    pub fn from_draws(
        spec: LaplaceExponentSpec,
        horizon: f64,
        draws: Vec<f64>,
        paired: bool,
    ) -> Result<Self> {
        if draws.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::InvalidConfig("horizon draws must be nonnegative"));
        }
        Ok(Self {
            spec,
            horizon,
            draws,
            paired,
        })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Draw number `index` of `S(T)`; the building block of [`draw_horizons`].
pub fn draw_horizon(
    spec: &LaplaceExponentSpec,
    horizon: f64,
    mc: &McConfig,
    index: usize,
) -> Result<f64> {
    if spec.family() == Family::Identity {
        return Ok(horizon);
    }
    mc.staircase(spec, horizon)?
        .inverse_at(spec, horizon, &mut mc.sampler(index))
}

/// `M` independent draws of `S(T)`, reproducible from `mc.seed`.
pub fn draw_horizons(
    spec: &LaplaceExponentSpec,
    horizon: f64,
    mc: &McConfig,
) -> Result<HorizonSampleSet> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain("horizon T", horizon));
    }
    mc.validate()?;
    let draws = (0..mc.samples)
        .map(|i| draw_horizon(spec, horizon, mc, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(HorizonSampleSet {
        spec: *spec,
        horizon,
        draws,
        paired: mc.antithetic,
    })
}

/// `(1/M) Σ pricer(S⁽ⁱ⁾(T))` with its standard error.
pub fn price_subordinated<F>(hs: &HorizonSampleSet, mut pricer: F) -> Result<PriceEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let values = hs
        .draws
        .iter()
        .enumerate()
        .map(|(index, &tau)| {
            pricer(tau).map_err(|e| Error::Draw {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PriceEstimate::from_values(&values, hs.paired))
}

/// Estimate of `E exp(-r S(T))`.
pub fn discount_factor_subordinated(hs: &HorizonSampleSet, rate: f64) -> PriceEstimate {
    price_subordinated(hs, |tau| Ok(libm::exp(-rate * tau))).expect("discounting is total")
}

/// Subordinated European call by averaging the Black-Scholes formula.
pub fn call_subordinated(hs: &HorizonSampleSet, mp: &MarketParams) -> PriceEstimate {
    price_subordinated(hs, |tau| Ok(bs_call(mp, tau))).expect("bs_call is total")
}

/// Subordinated European put by averaging the Black-Scholes formula.
pub fn put_subordinated(hs: &HorizonSampleSet, mp: &MarketParams) -> PriceEstimate {
    price_subordinated(hs, |tau| Ok(bs_put(mp, tau))).expect("bs_put is total")
}

/// `P̂_S - Ĉ_S - K Ê[e^{-rS(T)}] + Z₀` on shared draws.
///
/// Classical parity holds for every horizon, so on common draws this is zero
/// up to rounding.
pub fn parity_residual(hs: &HorizonSampleSet, mp: &MarketParams) -> f64 {
    let put = put_subordinated(hs, mp).value;
    let call = call_subordinated(hs, mp).value;
    let disc = discount_factor_subordinated(hs, mp.rate).value;
    put - call - mp.strike * disc + mp.z0
}

/// `Z₀ σ³ / (12 √(2π))`, the per-`τ^{3/2}` constant of the gap bound.
pub fn gap_bound_constant(mp: &MarketParams) -> f64 {
    mp.z0 * mp.sigma * mp.sigma * mp.sigma / (12.0 * libm::sqrt(2.0 * PI))
}

/// Gap `C^Ba_S - C_S` on common draws and its upper bound
/// `E S^{3/2}(T) · Z₀σ³/(12√(2π))`.
///
/// The moment is closed form for the stable and identity clocks and a sample
/// mean over the same draws otherwise.
pub fn bachelier_gap_and_bound(
    hs: &HorizonSampleSet,
    mp: &MarketParams,
) -> Result<(PriceEstimate, f64)> {
    mp.check_gap_regime()?;
    let gap = price_subordinated(hs, |tau| Ok(bachelier_call(mp, tau)? - bs_call(mp, tau)))?;
    let moment = match hs.spec.family() {
        Family::Identity => libm::pow(hs.horizon, 1.5),
        Family::AlphaStable => inverse_moment(hs.spec.alpha(), 1.5, hs.horizon)?,
        Family::TemperedStable => price_subordinated(hs, |tau| Ok(libm::pow(tau, 1.5)))?.value,
    };
    Ok((gap, moment * gap_bound_constant(mp)))
}

/// Binomial tree recalibrated to each horizon draw, then averaged.
pub fn price_crr_on(
    hs: &HorizonSampleSet,
    mp: &MarketParams,
    opt: &OptionSpec,
    tc: &TreeConfig,
) -> Result<PriceEstimate> {
    if matches!(opt, OptionSpec::LookbackFloatCall) {
        return Err(Error::UnsupportedOption(
            "subordinated binomial pricing is not justified for lookback payoffs",
        ));
    }
    price_subordinated(hs, |tau| crr_price(mp, opt, tc, tau))
}

/// Subordinated binomial price: fresh horizon draws, then [`price_crr_on`].
pub fn price_subordinated_crr(
    spec: &LaplaceExponentSpec,
    mp: &MarketParams,
    opt: &OptionSpec,
    tc: &TreeConfig,
    mc: &McConfig,
) -> Result<PriceEstimate> {
    if matches!(opt, OptionSpec::LookbackFloatCall) {
        return Err(Error::UnsupportedOption(
            "subordinated binomial pricing is not justified for lookback payoffs",
        ));
    }
    let hs = draw_horizons(spec, mp.horizon, mc)?;
    price_crr_on(&hs, mp, opt, tc)
}

/// Lookback closed form averaged over the horizon draws.
pub fn price_lookback_closed_on(hs: &HorizonSampleSet, mp: &MarketParams) -> Result<PriceEstimate> {
    if !(mp.rate > 0.0) {
        return Err(domain("rate (lookback closed form needs r > 0)", mp.rate));
    }
    price_subordinated(hs, |tau| lookback_call_closed(mp, tau))
}

pub fn price_lookback_subordinated_closed(
    spec: &LaplaceExponentSpec,
    mp: &MarketParams,
    mc: &McConfig,
) -> Result<PriceEstimate> {
    if !(mp.rate > 0.0) {
        return Err(domain("rate (lookback closed form needs r > 0)", mp.rate));
    }
    let hs = draw_horizons(spec, mp.horizon, mc)?;
    price_lookback_closed_on(&hs, mp)
}

/// Uniform monitoring grid `t_j = T j / (n - 1)`.
pub fn uniform_grid(horizon: f64, points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|j| horizon * j as f64 / last).collect()
}

/// One discounted lookback payoff from a subordinated GBM path.
///
/// The parent GBM runs under the classical risk-neutral measure, drift
/// `r - σ²/2`, and is read at the operational times `S(t_j)`. The running
/// minimum is tracked along the grid and the payoff is discounted with
/// `exp(-r S(T))`.
fn lookback_path_payoff(
    spec: &LaplaceExponentSpec,
    mp: &MarketParams,
    grid: &[f64],
    scheme: &Staircase,
    s: &mut Sampler,
) -> Result<f64> {
    let clock = scheme.inverse_path(spec, grid, s)?;
    let drift = mp.rate - 0.5 * mp.sigma * mp.sigma;
    let mut prev_time = 0.0;
    let mut brownian = 0.0;
    let mut log_min = 0.0f64;
    let mut log_z = 0.0;
    for &op_time in &clock.values {
        let dt = op_time - prev_time;
        if dt > 0.0 {
            brownian += libm::sqrt(dt) * s.normal();
            prev_time = op_time;
        }
        log_z = drift * op_time + mp.sigma * brownian;
        log_min = log_min.min(log_z);
    }
    let terminal = clock.terminal();
    let payoff = mp.z0 * (libm::exp(log_z) - libm::exp(log_min));
    Ok(libm::exp(-mp.rate * terminal) * payoff)
}

/// Lookback call by simulating subordinated GBM paths on a uniform grid of
/// `grid_size` points.
pub fn price_lookback_path_mc(
    spec: &LaplaceExponentSpec,
    mp: &MarketParams,
    grid_size: usize,
    mc: &McConfig,
) -> Result<PriceEstimate> {
    if grid_size < 2 {
        return Err(Error::InvalidConfig("path grid needs at least 2 points"));
    }
    if !(mp.horizon > 0.0) {
        return Err(domain("horizon T", mp.horizon));
    }
    mc.validate()?;
    let grid = uniform_grid(mp.horizon, grid_size);
    let scheme = mc.staircase(spec, mp.horizon)?;
    let values = (0..mc.samples)
        .map(|i| lookback_path_payoff(spec, mp, &grid, &scheme, &mut mc.sampler(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PriceEstimate::from_values(&values, mc.antithetic))
}

/// Single path payoff for draw `index`, for callers that spread paths over
/// workers themselves.
pub fn lookback_path_sample(
    spec: &LaplaceExponentSpec,
    mp: &MarketParams,
    grid: &[f64],
    mc: &McConfig,
    index: usize,
) -> Result<f64> {
    let scheme = mc.staircase(spec, mp.horizon)?;
    lookback_path_payoff(spec, mp, grid, &scheme, &mut mc.sampler(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_of_constant_is_exact() {
        let est = PriceEstimate::from_values(&[1.079_216_216_944_695_3; 5], false);
        assert_eq!(est.value, 1.079_216_216_944_695_3);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.samples, 5);
    }

    #[test]
    fn estimate_standard_error() {
        let est = PriceEstimate::from_values(&[1.0, 2.0, 3.0, 4.0], false);
        assert!((est.value - 2.5).abs() < 1e-15);
        // unbiased variance 5/3
        assert!((est.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let paired = PriceEstimate::from_values(&[1.0, 3.0, 2.0, 6.0], true);
        assert_eq!(paired.value, 3.0);
        assert!((paired.std_error - 1.0).abs() < 1e-15);
        assert_eq!(paired.samples, 4);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, 0).validate().is_err());
        assert!(McConfig::new(3, 0)
            .with_antithetic(true)
            .validate()
            .is_err());
        assert!(McConfig::new(4, 0).with_delta(0.0).validate().is_err());
        assert!(McConfig::new(4, 0).with_antithetic(true).validate().is_ok());
    }

    #[test]
    fn identity_horizons_are_the_horizon() {
        let hs =
            draw_horizons(&LaplaceExponentSpec::identity(), 2.0, &McConfig::new(5, 9)).unwrap();
        assert_eq!(hs.draws, [2.0; 5]);
    }

    #[test]
    fn pricer_errors_carry_the_draw_index() {
        let hs = HorizonSampleSet::from_draws(
            LaplaceExponentSpec::identity(),
            1.0,
            alloc::vec![1.0, 2.0, 3.0],
            false,
        )
        .unwrap();
        let err = price_subordinated(&hs, |tau| {
            if tau > 1.5 {
                Err(Error::Regime("x"))
            } else {
                Ok(tau)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Draw { index: 1, .. }));
        assert!(HorizonSampleSet::from_draws(
            LaplaceExponentSpec::identity(),
            1.0,
            alloc::vec![-1.0],
            false
        )
        .is_err());
    }

    #[test]
    fn lookback_rejected_by_tree_pricer() {
        let mp = MarketParams::new(2.0, 2.0, 0.04, 1.0, 1.0).unwrap();
        let spec = LaplaceExponentSpec::stable(0.7).unwrap();
        let r = price_subordinated_crr(
            &spec,
            &mp,
            &OptionSpec::LookbackFloatCall,
            &TreeConfig::new(10).unwrap(),
            &McConfig::new(10, 1),
        );
        assert!(matches!(r, Err(Error::UnsupportedOption(_))));
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(2.0, 5);
        assert_eq!(g, [0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
