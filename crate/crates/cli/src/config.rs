//! Experiment configuration: presets, flat `key = value` files and overrides.
//!
//! A config file holds one `key = value` pair per line; `#` starts a comment.
//! Settings are applied in order: preset, file, then command-line overrides,
//! so later assignments win.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use subdiff_core::pde::{Coordinate, PdeGrid};
use subdiff_core::subordinated::{McConfig, DEFAULT_PATH_GRID};
use subdiff_core::subordinator::LaplaceExponentSpec;
use subdiff_core::{MarketParams, OptionSpec, TreeConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn field_error(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

/// Which price curve an experiment produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    EuroCallSweep,
    AmericanPutSweep,
    LookbackSweep,
    Custom,
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "euro-call" | "EuroCallSweep" => Ok(Figure::EuroCallSweep),
            "american-put" | "AmericanPutSweep" => Ok(Figure::AmericanPutSweep),
            "lookback" | "LookbackSweep" => Ok(Figure::LookbackSweep),
            "custom" | "Custom" => Ok(Figure::Custom),
            _ => Err(format!("unknown figure `{s}`")),
        }
    }
}

/// Contract priced by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payoff {
    Call,
    Put,
    AmericanPut,
    Lookback,
}

impl Payoff {
    pub fn option_spec(self) -> OptionSpec {
        match self {
            Payoff::Call => OptionSpec::EuroCall,
            Payoff::Put => OptionSpec::EuroPut,
            Payoff::AmericanPut => OptionSpec::AmericanPut,
            Payoff::Lookback => OptionSpec::LookbackFloatCall,
        }
    }

    pub fn name(self) -> &'static str {
        self.option_spec().name()
    }
}

impl FromStr for Payoff {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "call" | "euro-call" => Ok(Payoff::Call),
            "put" | "euro-put" => Ok(Payoff::Put),
            "american-put" => Ok(Payoff::AmericanPut),
            "lookback" | "lookback-call" => Ok(Payoff::Lookback),
            _ => Err(format!("unknown option `{s}`")),
        }
    }
}

/// Pricing method of one sweep column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Closed-form classical price averaged over horizon draws.
    McClosedForm,
    /// Binomial tree per horizon draw.
    McCrr,
    /// Finite differences for the fractional equation.
    FdPde,
    /// Simulated subordinated price paths.
    PathMc,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::McClosedForm,
        Method::McCrr,
        Method::FdPde,
        Method::PathMc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::McClosedForm => "MC-closed-form",
            Method::McCrr => "MC-CRR",
            Method::FdPde => "FD-PDE",
            Method::PathMc => "PathMC",
        }
    }

    /// Whether the method averages over horizon draws.
    pub fn uses_horizon_draws(self) -> bool {
        matches!(self, Method::McClosedForm | Method::McCrr)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "mc-closed-form" | "mc" | "closed-form" => Ok(Method::McClosedForm),
            "mc-crr" | "crr" => Ok(Method::McCrr),
            "fd-pde" | "pde" | "fd" => Ok(Method::FdPde),
            "pathmc" | "path-mc" | "path" => Ok(Method::PathMc),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

/// Clock family selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyChoice {
    Stable,
    Tempered,
    Identity,
}

impl FromStr for FamilyChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stable" | "alpha-stable" => Ok(FamilyChoice::Stable),
            "tempered" | "tempered-stable" => Ok(FamilyChoice::Tempered),
            "identity" | "classical" => Ok(FamilyChoice::Identity),
            _ => Err(format!("unknown family `{s}`")),
        }
    }
}

impl FamilyChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyChoice::Stable => "stable",
            FamilyChoice::Tempered => "tempered",
            FamilyChoice::Identity => "identity",
        }
    }

    /// Clock for index `alpha`; `alpha = 1` is always the identity.
    pub fn spec(self, alpha: f64, lambda: f64) -> subdiff_core::Result<LaplaceExponentSpec> {
        match self {
            FamilyChoice::Identity => Ok(LaplaceExponentSpec::identity()),
            FamilyChoice::Stable => LaplaceExponentSpec::from_alpha(alpha),
            FamilyChoice::Tempered => LaplaceExponentSpec::from_alpha_lambda(alpha, lambda),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(format!(
                "unknown preset `{s}` (expected fig2, fig3 or fig4)"
            )),
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub figure: Figure,
    pub payoff: Payoff,
    pub alpha_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub family: FamilyChoice,
    pub lambda: f64,
    pub market: MarketParams,
    pub mc: McConfig,
    pub tree: TreeConfig,
    pub pde: PdeGrid,
    pub path_grid: usize,
    pub output_path: Option<String>,
    pub format: Format,
    sigma_ba_fixed: bool,
}

fn sweep_alphas() -> Vec<f64> {
    (5..=10).map(|k| k as f64 / 10.0).collect()
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let base_market = MarketParams::new(2.0, 2.0, 0.04, 1.0, 2.0).expect("valid preset");
        let base = Self {
            figure: Figure::EuroCallSweep,
            payoff: Payoff::Call,
            alpha_grid: sweep_alphas(),
            methods: vec![Method::McClosedForm, Method::McCrr, Method::FdPde],
            family: FamilyChoice::Stable,
            lambda: 0.0,
            market: base_market,
            mc: McConfig::new(3000, DEFAULT_SEED),
            tree: TreeConfig::new(100).expect("valid preset"),
            pde: PdeGrid::log_price(80, 120),
            path_grid: DEFAULT_PATH_GRID,
            output_path: None,
            format: Format::Csv,
            sigma_ba_fixed: false,
        };
        match preset {
            Preset::Fig2 => base,
            Preset::Fig3 => Self {
                figure: Figure::AmericanPutSweep,
                payoff: Payoff::AmericanPut,
                methods: vec![Method::McCrr],
                market: MarketParams::new(5.0, 2.0, 0.04, 1.0, 2.0).expect("valid preset"),
                pde: PdeGrid::log_price(200, 170),
                ..base
            },
            Preset::Fig4 => Self {
                figure: Figure::LookbackSweep,
                payoff: Payoff::Lookback,
                methods: vec![Method::McClosedForm, Method::PathMc],
                market: MarketParams::new(2.0, 2.0, 0.04, 1.0, 1.0).expect("valid preset"),
                mc: McConfig::new(7000, DEFAULT_SEED),
                tree: TreeConfig::new(80).expect("valid preset"),
                ..base
            },
        }
    }

    /// Applies `key = value` lines from `text`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (key, value) in parse_pairs(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.apply_text(&text)
    }

    /// Sets one key. Field names in errors match the keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "figure" => {
                self.figure = parse(key, v)?;
                self.payoff = match self.figure {
                    Figure::EuroCallSweep => Payoff::Call,
                    Figure::AmericanPutSweep => Payoff::AmericanPut,
                    Figure::LookbackSweep => Payoff::Lookback,
                    Figure::Custom => self.payoff,
                };
            }
            "option" => {
                self.payoff = parse(key, v)?;
                self.figure = match self.payoff {
                    Payoff::Call => Figure::EuroCallSweep,
                    Payoff::AmericanPut => Figure::AmericanPutSweep,
                    Payoff::Lookback => Figure::LookbackSweep,
                    Payoff::Put => Figure::Custom,
                };
            }
            "alpha" | "alpha_grid" => self.alpha_grid = parse_list(key, v)?,
            "methods" => self.methods = parse_list(key, v)?,
            "family" => self.family = parse(key, v)?,
            "lambda" => self.lambda = parse(key, v)?,
            "z0" => self.market.z0 = parse(key, v)?,
            "strike" => self.market.strike = parse(key, v)?,
            "rate" => self.market.rate = parse(key, v)?,
            "sigma" => self.market.sigma = parse(key, v)?,
            "sigma_ba" => {
                self.market.sigma_ba = parse(key, v)?;
                self.sigma_ba_fixed = true;
            }
            "horizon" => self.market.horizon = parse(key, v)?,
            "samples" => self.mc.samples = parse(key, v)?,
            "seed" => self.mc.seed = parse(key, v)?,
            "delta" => {
                self.mc.delta = if v == "auto" {
                    None
                } else {
                    Some(parse(key, v)?)
                };
            }
            "antithetic" => self.mc.antithetic = parse(key, v)?,
            "max_steps" => self.mc.max_steps = parse(key, v)?,
            "tree_steps" => {
                let n: usize = parse(key, v)?;
                self.tree = TreeConfig::new(n).map_err(|e| field_error(key, e))?;
            }
            "pde_space_nodes" => self.pde.space_nodes = parse(key, v)?,
            "pde_time_nodes" => self.pde.time_nodes = parse(key, v)?,
            "x_min" => self.pde.x_min = parse(key, v)?,
            "x_max" => self.pde.x_max = parse(key, v)?,
            "theta" => self.pde.theta = parse(key, v)?,
            "coordinate" => {
                self.pde.coordinate = match v {
                    "log-price" => Coordinate::LogPrice,
                    "price" => Coordinate::Price,
                    _ => {
                        return Err(field_error(
                            key,
                            format!("expected log-price or price, got `{v}`"),
                        ))
                    }
                }
            }
            "path_grid" => self.path_grid = parse(key, v)?,
            "output" => self.output_path = Some(v.to_string()),
            "format" => self.format = parse(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Market parameters with the Bachelier volatility tied to `σ Z₀` unless set.
    pub fn market(&self) -> MarketParams {
        let mut mp = self.market;
        if !self.sigma_ba_fixed {
            mp.sigma_ba = mp.sigma * mp.z0;
        }
        mp
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.alpha_grid.is_empty() {
            return Err(field_error("alpha_grid", "must not be empty"));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(field_error(
                "alpha_grid",
                format!("entry {a} outside (0, 1]"),
            ));
        }
        if self.methods.is_empty() {
            return Err(field_error("methods", "must not be empty"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(field_error(
                "lambda",
                format!("must be >= 0, got {}", self.lambda),
            ));
        }
        self.market()
            .validate()
            .map_err(|e| field_error("market", e))?;
        self.mc.validate().map_err(|e| field_error("samples", e))?;
        self.pde.validate().map_err(|e| field_error("pde", e))?;
        if self.path_grid < 2 {
            return Err(field_error("path_grid", "needs at least 2 points"));
        }
        Ok(())
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Preset::Fig2)
    }
}

/// Splits flat config text into `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splits `key=value` as given to `--set`.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got `{s}`"))
}

pub(crate) fn parse<T: FromStr>(field: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse()
        .map_err(|e: T::Err| field_error(field, format!("`{v}`: {e}")))
}

pub(crate) fn parse_list<T: FromStr>(field: &str, v: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(field, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_carry_figure_parameters() {
        let base = ExperimentConfig::preset(Preset::Fig2);
        assert_eq!(base.market().sigma_ba, 2.0);
        assert_eq!(base.alpha_grid, vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
        assert_eq!((base.pde.space_nodes, base.pde.time_nodes), (80, 120));
        assert_eq!(
            (base.pde.x_min, base.pde.x_max, base.pde.theta),
            (-20.0, 10.0, 0.0)
        );
        let fig3 = ExperimentConfig::preset(Preset::Fig3);
        assert_eq!((fig3.market.z0, fig3.market.strike), (5.0, 2.0));
        assert_eq!((fig3.pde.space_nodes, fig3.pde.time_nodes), (200, 170));
        assert_eq!(fig3.payoff, Payoff::AmericanPut);
        let fig4 = ExperimentConfig::preset(Preset::Fig4);
        assert_eq!(
            (fig4.mc.samples, fig4.tree.steps(), fig4.market.horizon),
            (7000, 80, 1.0)
        );
        for cfg in [base, fig3, fig4] {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn file_text_overrides() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# comment\nalpha = 0.7, 0.9\nmethods = MC-CRR,FD-PDE\n\nz0 = 3 # spot\nseed=7\n",
        )
        .unwrap();
        assert_eq!(cfg.alpha_grid, vec![0.7, 0.9]);
        assert_eq!(cfg.methods, vec![Method::McCrr, Method::FdPde]);
        assert_eq!(cfg.market().z0, 3.0);
        assert_eq!(cfg.market().sigma_ba, 3.0);
        assert_eq!(cfg.mc.seed, 7);
        cfg.set("sigma_ba", "1.5").unwrap();
        cfg.set("z0", "4").unwrap();
        assert_eq!(cfg.market().sigma_ba, 1.5);
    }

    #[test]
    fn errors_name_the_field() {
        let mut cfg = ExperimentConfig::default();
        let err = cfg.set("samples", "many").unwrap_err().to_string();
        assert!(err.starts_with("samples:"), "{err}");
        assert!(matches!(
            cfg.set("colour", "red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            cfg.apply_text("just words"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));

        cfg.alpha_grid.clear();
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .starts_with("alpha_grid:"));
        cfg.set("alpha", "0.5, 1.2").unwrap();
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .starts_with("alpha_grid:"));
        let mut cfg = ExperimentConfig::default();
        cfg.set("horizon", "-1").unwrap();
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .starts_with("market:"));
    }

    #[test]
    fn option_and_figure_stay_consistent() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("option", "lookback").unwrap();
        assert_eq!(cfg.figure, Figure::LookbackSweep);
        cfg.set("figure", "american-put").unwrap();
        assert_eq!(cfg.payoff, Payoff::AmericanPut);
        cfg.set("option", "put").unwrap();
        assert_eq!(cfg.figure, Figure::Custom);
    }
}
