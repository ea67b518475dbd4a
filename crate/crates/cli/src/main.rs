use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use uavrelay::ScenarioConfig;
use uavrelay_cli::{
    cmd_alloc, cmd_analytic, cmd_codebook, cmd_plan, cmd_simulate, cmd_validate, load_config, parse_empty_beam,
    parse_fidelity, parse_footprint, parse_rra, CliError, Overrides, Preset, SweepPlan, SweepSpec, ValidationGrid,
    CONFIG_ENV,
};

#[derive(Parser)]
#[command(name = "uavrelay", version, about = "Access probability and resource assignment for UAV-relayed sidelinks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario config (TOML); defaults to the reference scenario.
    #[arg(long, env = CONFIG_ENV, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// fair | bb
    #[arg(long, global = true)]
    rra: Option<String>,
    /// paper | geometric
    #[arg(long, global = true)]
    footprint_mode: Option<String>,
    /// paper | include-zero
    #[arg(long, global = true)]
    empty_beam: Option<String>,
    /// model | full
    #[arg(long, global = true)]
    fidelity: Option<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// var:start:stop:step with var in altitude_m, density_per_km, gamma_db.
    #[arg(long, conflicts_with = "preset")]
    sweep: Option<String>,
    /// fig3a | fig3b | fig4a | fig4b
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form access probability over a sweep.
    Analytic {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Analytic and Monte Carlo access probability over a sweep.
    Simulate {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Suppress per-point progress on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// Check the analytic model against model-matched simulation on a grid.
    Validate {
        /// e.g. "h=150,250,350;lambda=40,80;gamma=5,10;rra=fair,bb"
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Highest altitude meeting a target access probability.
    Plan {
        #[arg(long, default_value_t = 0.99)]
        target: f64,
        #[arg(long, default_value_t = 50.0)]
        h_min: f64,
        #[arg(long, default_value_t = 600.0)]
        h_max: f64,
        #[arg(long, default_value_t = 10.0)]
        step: f64,
    },
    /// Dump the beam codebook.
    Codebook,
    /// Dump the per-beam resource allocation.
    Alloc,
}

fn overrides(c: &Common) -> Result<Overrides, CliError> {
    fn pick<T>(v: &Option<String>, f: fn(&str) -> Option<T>, what: &str) -> Result<Option<T>, CliError> {
        v.as_deref()
            .map(|s| f(s).ok_or_else(|| CliError::Usage(format!("unknown {what} `{s}`"))))
            .transpose()
    }
    Ok(Overrides {
        rra: pick(&c.rra, parse_rra, "rra")?,
        footprint_mode: pick(&c.footprint_mode, parse_footprint, "footprint mode")?,
        empty_beam_mode: pick(&c.empty_beam, parse_empty_beam, "empty-beam mode")?,
        fidelity: pick(&c.fidelity, parse_fidelity, "fidelity")?,
        ..Default::default()
    })
}

fn sweep_plan(args: &SweepArgs, ov: &Overrides) -> Result<SweepPlan, CliError> {
    if let Some(p) = &args.preset {
        return p.parse::<Preset>()?.plan(ov.clone());
    }
    let sweep = args
        .sweep
        .as_deref()
        .map(|s| SweepSpec::parse(s, Overrides::default()))
        .transpose()?;
    Ok(SweepPlan { sweep, series: Vec::new() })
}

fn with_output(path: &Option<PathBuf>, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.common;
    let ov = overrides(&common)?;
    let base: ScenarioConfig = load_config(common.config.as_deref(), &ov)?;
    match cli.command {
        Command::Analytic { sweep } => {
            let plan = sweep_plan(&sweep, &ov)?;
            with_output(&common.out, |w| cmd_analytic(&base, &plan, w))
        }
        Command::Simulate {
            sweep,
            trials,
            seed,
            quiet,
        } => {
            let plan = sweep_plan(&sweep, &ov)?;
            with_output(&common.out, |w| cmd_simulate(&base, &plan, trials, seed, !quiet, w))
        }
        Command::Validate { grid, trials, seed } => {
            let grid = match grid {
                Some(g) => ValidationGrid::parse(&g)?,
                None => ValidationGrid::default(),
            };
            with_output(&common.out, |w| cmd_validate(&base, &grid, trials, seed, w))
        }
        Command::Plan {
            target,
            h_min,
            h_max,
            step,
        } => with_output(&common.out, |w| cmd_plan(&base, target, (h_min, h_max), step, w)),
        Command::Codebook => with_output(&common.out, |w| cmd_codebook(&base, w)),
        Command::Alloc => with_output(&common.out, |w| cmd_alloc(&base, w)),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size thread pool: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
