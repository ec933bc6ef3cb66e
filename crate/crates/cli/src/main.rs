use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use subdiff::check::{check_relations, Relation};
use subdiff::config::{
    parse_assignment, ExperimentConfig, FamilyChoice, Format, Method, Payoff, Preset,
};
use subdiff::experiment::run_experiment;
use subdiff::output::emit;
use subdiff::pde_export::{self, Equation};
use subdiff::simulate::{simulate_paths, SimulateConfig};

/// Option pricing under subordinated (subdiffusive) market models.
#[derive(Parser)]
#[command(name = "subdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price one contract with one or more methods.
    Price {
        #[command(flatten)]
        common: CommonArgs,
        /// Pricing method(s): MC-closed-form, MC-CRR, FD-PDE, PathMC.
        #[arg(long, value_delimiter = ',')]
        method: Vec<Method>,
        /// Contract: call, put, american-put, lookback.
        #[arg(long)]
        option: Option<Payoff>,
    },
    /// Write sample trajectories of the clock and the subordinated prices.
    Simulate(SimulateArgs),
    /// Price against a grid of stability indices with several methods.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',')]
        methods: Vec<Method>,
    },
    /// Check put-call parity and the Bachelier/Black-Scholes gap bound.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Relations to check: parity, gap-bound.
        #[arg(long, value_delimiter = ',', default_value = "parity,gap-bound")]
        checks: Vec<Relation>,
    },
    /// Solve the fractional call equation and export the whole grid.
    Pde {
        #[command(flatten)]
        common: CommonArgs,
        /// bs or bachelier.
        #[arg(long, default_value = "bs")]
        equation: Equation,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Named parameter set: fig2, fig3 or fig4.
    #[arg(long)]
    preset: Option<Preset>,
    /// Flat `key = value` config file, applied after the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stability index, or a comma-separated grid.
    #[arg(long)]
    alpha: Option<String>,
    /// Tempering parameter.
    #[arg(long)]
    lambda: Option<f64>,
    /// Clock family: stable, tempered, identity.
    #[arg(long)]
    family: Option<FamilyChoice>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Binomial steps (price, sweep, check) or PDE time steps (pde).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Staircase step in operational time.
    #[arg(long)]
    delta: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Any config key, as key=value. Repeatable.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    family: Option<FamilyChoice>,
    /// Number of trajectories.
    #[arg(long, alias = "samples")]
    count: Option<usize>,
    /// Grid points per trajectory.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
}

impl CommonArgs {
    fn config(&self, steps_key: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::preset(self.preset.unwrap_or(Preset::Fig2));
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (k, v) in &self.set {
            cfg.set(k, v)?;
        }
        let mut flags: Vec<(&str, String)> = Vec::new();
        if let Some(a) = &self.alpha {
            flags.push(("alpha", a.clone()));
        }
        if let Some(x) = self.lambda {
            flags.push(("lambda", x.to_string()));
        }
        if let Some(f) = self.family {
            flags.push(("family", f.as_str().to_string()));
        }
        if let Some(x) = self.samples {
            flags.push(("samples", x.to_string()));
        }
        if let Some(x) = self.steps {
            flags.push((steps_key, x.to_string()));
        }
        if let Some(x) = self.seed {
            flags.push(("seed", x.to_string()));
        }
        if let Some(x) = self.delta {
            flags.push(("delta", x.to_string()));
        }
        for (k, v) in flags {
            cfg.set(k, &v)?;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.display().to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_path(cfg: &ExperimentConfig) -> Option<PathBuf> {
    cfg.output_path.as_ref().map(PathBuf::from)
}

fn sweep(cfg: &ExperimentConfig) -> Result<bool> {
    let outcome = run_experiment(cfg)?;
    emit(
        cfg.format,
        out_path(cfg).as_deref(),
        &outcome.rows(),
        &outcome.records,
    )?;
    for e in &outcome.errors {
        eprintln!(
            "error: alpha={} method={}: {}",
            e.alpha, e.method, e.message
        );
    }
    Ok(outcome.is_success())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Price {
            common,
            method,
            option,
        } => {
            let mut cfg = common.config("tree_steps")?;
            if let Some(p) = option {
                cfg.set("option", p.name())?;
            }
            if !method.is_empty() {
                cfg.methods = method;
            }
            sweep(&cfg)
        }
        Command::Sweep { common, methods } => {
            let mut cfg = common.config("tree_steps")?;
            if !methods.is_empty() {
                cfg.methods = methods;
            }
            sweep(&cfg)
        }
        Command::Check { common, checks } => {
            let cfg = common.config("tree_steps")?;
            let report = check_relations(&cfg, &checks)?;
            emit(
                cfg.format,
                out_path(&cfg).as_deref(),
                &report.rows,
                &report.rows,
            )?;
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            for r in report.rows.iter().filter(|r| !r.pass) {
                eprintln!(
                    "failed: {} at alpha={}: value {} (limit {})",
                    r.check, r.alpha, r.value, r.limit
                );
            }
            Ok(report.passed())
        }
        Command::Pde { common, equation } => {
            let cfg = common.config("pde_time_nodes")?;
            let alpha = cfg.alpha_grid[0];
            let sol = pde_export::solve(&cfg, alpha, equation)?;
            let rows = pde_export::table(&sol);
            emit(cfg.format, out_path(&cfg).as_deref(), &rows, &rows)?;
            eprintln!(
                "value at z0={}: {}",
                cfg.market().z0,
                sol.price_at(cfg.market().z0)
            );
            Ok(true)
        }
        Command::Simulate(args) => {
            let mut cfg = SimulateConfig::default();
            if let Some(path) = &args.config {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                cfg.apply_text(&text)?;
            }
            for (k, v) in &args.set {
                cfg.set(k, v)?;
            }
            if let Some(x) = args.alpha {
                cfg.alpha = x;
            }
            if let Some(x) = args.lambda {
                cfg.lambda = x;
            }
            if let Some(x) = args.family {
                cfg.family = x;
            }
            if let Some(x) = args.count {
                cfg.count = x;
            }
            if let Some(x) = args.steps {
                cfg.grid_points = x;
            }
            if let Some(x) = args.seed {
                cfg.seed = x;
            }
            if let Some(x) = args.delta {
                cfg.delta = Some(x);
            }
            for p in simulate_paths(&cfg, &args.out, args.format)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
