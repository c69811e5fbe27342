use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bsopt::config::{load_components, load_scenario, load_scenario_config};
use bsopt::csv_io::{write_cdf, write_sweep};
use bsopt::harness::{self, CdfLabels, CdfResult, DEFAULT_CDF_LOADS, DEFAULT_STRATEGIES};
use bsopt::{HarnessError, Result};
use bsopt_core::power_model::derive_consumption_params;
use bsopt_core::solver::solve;
use bsopt_core::{
    Configuration, ConsumptionParams, FinalizeMode, Scenario, ScenarioConfig, SnrDistribution, SolverConfig, Strategy,
    TdSavings,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bsopt",
    version,
    about = "Energy-optimal slot, antenna and power allocation for a base station"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the allocation.
    Solve(SolveArgs),
    /// Sweep the load on one fixed radio draw.
    Sweep(SweepArgs),
    /// Monte Carlo CDFs of consumed power.
    Cdf(CdfArgs),
    /// Compare the solver against exhaustive search.
    OracleCheck(OracleArgs),
    /// Fold hardware component parameters into consumption parameters.
    DeriveParams(DeriveArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, default_value = "64t64r", value_parser = parse_preset)]
    preset: Configuration,
    #[arg(long = "td-savings", default_value = "off", value_parser = parse_savings)]
    td_savings: TdSavings,
}

impl ModelArgs {
    fn params(&self) -> ConsumptionParams {
        self.preset.consumption_params(self.td_savings)
    }

    fn labels(&self) -> CdfLabels {
        CdfLabels {
            preset: self.preset.to_string(),
            td_savings: self.td_savings.to_string(),
        }
    }
}

/// Scenario generation: the preset dimensions unless `--config` is given.
#[derive(Args, Clone)]
struct GenArgs {
    /// Scenario-generation config (JSON); replaces the preset dimensions.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Time slots per frame.
    #[arg(long, short = 'n', default_value_t = 100)]
    slots: usize,
    #[arg(long = "snr-lo-db", allow_hyphen_values = true)]
    snr_lo_db: Option<f64>,
    #[arg(long = "snr-hi-db", allow_hyphen_values = true)]
    snr_hi_db: Option<f64>,
}

impl GenArgs {
    fn scenario_config(&self, model: &ModelArgs) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_scenario_config(path)?,
            None => ScenarioConfig::from_preset(model.preset, self.slots),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.snr_lo_db.is_some() || self.snr_hi_db.is_some() {
            let (lo, hi) = match cfg.snr {
                SnrDistribution::UniformDb { lo_db, hi_db } => (lo_db, hi_db),
                SnrDistribution::Constant { db } => (db, db),
            };
            cfg.snr = SnrDistribution::UniformDb {
                lo_db: self.snr_lo_db.unwrap_or(lo),
                hi_db: self.snr_hi_db.unwrap_or(hi),
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    gen: GenArgs,
    /// Scenario file (JSON); otherwise one scenario is drawn from the preset.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Load of the drawn scenario.
    #[arg(long, default_value_t = 0.5)]
    load: f64,
    /// Index of the drawn scenario.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value = "optimized", value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value = "round", value_parser = parse_finalize)]
    finalize: FinalizeMode,
    /// Write the full solver report (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    gen: GenArgs,
    /// Explicit loads (comma separated); default is an even grid.
    #[arg(long, value_delimiter = ',')]
    load: Vec<f64>,
    /// Size of the even load grid.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    strategy: Vec<Strategy>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CdfArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    gen: GenArgs,
    /// Loads (comma separated); default 0.01, 0.06, 0.18.
    #[arg(long, value_delimiter = ',')]
    load: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    strategy: Vec<Strategy>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long, value_delimiter = ',')]
    load: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Args)]
struct DeriveArgs {
    /// Component parameters (JSON); without it the preset values are printed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

fn parse_preset(s: &str) -> std::result::Result<Configuration, String> {
    s.parse().map_err(|e: bsopt_core::Error| e.to_string())
}

fn parse_savings(s: &str) -> std::result::Result<TdSavings, String> {
    s.parse().map_err(|e: bsopt_core::Error| e.to_string())
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: bsopt_core::Error| e.to_string())
}

fn parse_finalize(s: &str) -> std::result::Result<FinalizeMode, String> {
    s.parse().map_err(|e: bsopt_core::Error| e.to_string())
}

/// Buffered CSV destination: a file, or stdout when no path is given.
fn with_output<F>(out: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> csv::Result<()>,
{
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
            let mut w = BufWriter::new(file);
            write(&mut w).map_err(|e| HarnessError::csv(path, e))?;
            w.flush().map_err(|e| HarnessError::io(path, e))
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write(&mut w).map_err(|e| HarnessError::csv("<stdout>", e))?;
            w.flush().map_err(|e| HarnessError::io("<stdout>", e))
        }
    }
}

fn run_solve(a: SolveArgs) -> Result<()> {
    let cp = a.model.params();
    let s: Scenario = match &a.scenario {
        Some(path) => load_scenario(path)?,
        None => a.gen.scenario_config(&a.model)?.draw(a.index)?.at_load(a.load)?,
    };
    let solver = SolverConfig::default().with_finalize(a.finalize);
    let strategy = match (a.strategy, a.finalize) {
        (Strategy::Optimized, FinalizeMode::CeilFloor) => Strategy::OptimizedCeilFloor,
        (st, _) => st,
    };
    let eval = strategy.evaluate(&s, &cp, &solver)?;
    let al = eval.allocation;
    println!(
        "strategy={} n_a={} m_a={} p_a={:e} p_cons={:.6} feasible={} iterations={}",
        strategy, al.n_a, al.m_a, al.p_a, al.p_cons, al.feasible, eval.iterations
    );
    if let Some(path) = &a.report {
        let report = solve(&s, &cp, &solver)?;
        let json = serde_json::to_string_pretty(&report).map_err(|source| HarnessError::Json {
            path: path.clone(),
            source,
        })?;
        std::fs::write(path, json + "\n").map_err(|e| HarnessError::io(path, e))?;
    }
    Ok(())
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let cfg = a.gen.scenario_config(&a.model)?;
    let loads = if a.load.is_empty() {
        harness::even_loads(a.points)
    } else {
        a.load
    };
    let strategies = if a.strategy.is_empty() {
        DEFAULT_STRATEGIES.to_vec()
    } else {
        a.strategy
    };
    let result = harness::sweep_load(
        &cfg,
        &a.model.params(),
        &SolverConfig::default(),
        &loads,
        &strategies,
        a.index,
    )?;
    with_output(a.out.as_deref(), |w| write_sweep(&result, w))
}

fn run_cdf(a: CdfArgs) -> Result<()> {
    let cfg = a.gen.scenario_config(&a.model)?;
    let loads = if a.load.is_empty() {
        DEFAULT_CDF_LOADS.to_vec()
    } else {
        a.load
    };
    let strategies = if a.strategy.is_empty() {
        DEFAULT_STRATEGIES.to_vec()
    } else {
        a.strategy
    };
    let labels = match a.gen.config {
        Some(_) => CdfLabels {
            preset: "custom".into(),
            td_savings: a.model.td_savings.to_string(),
        },
        None => a.model.labels(),
    };
    let solver = SolverConfig::default();
    let mut result = CdfResult::default();
    for load in loads {
        result.extend(harness::monte_carlo_cdf(
            &cfg,
            &a.model.params(),
            &solver,
            &labels,
            load,
            a.trials,
            &strategies,
        )?);
    }
    with_output(a.out.as_deref(), |w| write_cdf(&result, w))
}

fn run_oracle(a: OracleArgs) -> Result<()> {
    let cfg = a.gen.scenario_config(&a.model)?;
    let loads = if a.load.is_empty() {
        DEFAULT_CDF_LOADS.to_vec()
    } else {
        a.load
    };
    let solver = SolverConfig::default();
    for load in loads {
        let g = harness::oracle_check(&cfg, &a.model.params(), &solver, load, a.trials)?;
        println!(
            "load={} trials={} round_max={:e} round_median={:e} ceil_floor_max={:e} ceil_floor_median={:e}",
            load,
            g.trials,
            g.max_round(),
            g.median_round(),
            g.max_ceil_floor(),
            g.median_ceil_floor()
        );
    }
    Ok(())
}

fn run_derive(a: DeriveArgs) -> Result<()> {
    let cp = match &a.config {
        Some(path) => derive_consumption_params(&load_components(path)?)?,
        None => a.model.params(),
    };
    println!(
        "gamma={} alpha={} p0={} p1={} p_sleep={}",
        cp.gamma, cp.alpha, cp.p0, cp.p1, cp.p_sleep
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Cdf(a) => run_cdf(a),
        Command::OracleCheck(a) => run_oracle(a),
        Command::DeriveParams(a) => run_derive(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
