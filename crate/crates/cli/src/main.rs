use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use btz_tripartite_cli::acceptance::{self, Context};
use btz_tripartite_cli::config::OutputFormat;
use btz_tripartite_cli::oracle_report::{calibrate, calibration_configuration, write_report};
use btz_tripartite_cli::presets::run_preset;
use btz_tripartite_cli::record::{write_csv, write_json};
use btz_tripartite_cli::{Cache, CliError, CliResult, Columns, Parameter, Preset, Resolution, RunConfig, SweepSpec};
use clap::{Args, Parser, Subcommand};

/// Entanglement harvesting by three static detectors outside a BTZ black hole.
#[derive(Debug, Parser)]
#[command(name = "btz-tripartite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Neither read nor write the correlator cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// P, C and X matrix elements.
    Correlators(PointArgs),
    /// All bipartite and one-vs-rest negativities.
    Negativity(PointArgs),
    /// Negativities and the π-tangle.
    Pitangle(PointArgs),
    /// Every column over a grid; `--vary` is required.
    Sweep(PointArgs),
    /// Regenerate the data behind one figure.
    Figure {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long, value_enum, default_value_t = Resolution::Coarse)]
        resolution: Resolution,
        /// Directory for the panel CSVs.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare the fast path against the brute-force oracle.
    Oracle {
        #[arg(long, default_value = "docs/data")]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Selftest {
        /// Run only these checks (1 to 11).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=11))]
        criterion: Vec<u8>,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one parameter, `name=value`.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,

    /// Sweep `name:min:max:steps[:log]`; repeat for a grid, first outermost.
    #[arg(long, value_name = "SPEC")]
    vary: Vec<SweepSpec>,

    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn load(config: Option<&Path>) -> CliResult<RunConfig> {
    match config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn apply_overrides(mut cfg: RunConfig, set: &[String]) -> CliResult<RunConfig> {
    for s in set {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override '{s}' is not name=value")))?;
        let p: Parameter = name.trim().parse()?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("override '{s}' has a non-numeric value")))?;
        cfg = cfg.with(p, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn points(args: &PointArgs, columns: Columns, workers: usize, cache: &Cache) -> CliResult<bool> {
    let cfg = apply_overrides(load(args.config.as_deref())?, &args.set)?;
    let grid = btz_tripartite_cli::sweep::grid(&cfg, &args.vary)?;
    let records = btz_tripartite_cli::run_points(&grid, workers, cache)?;
    let format = args.format.unwrap_or(cfg.output.format);
    let out = args.out.clone().or(cfg.output.path.clone());
    let render = |w: &mut dyn Write| match format {
        OutputFormat::Csv => write_csv(&records, columns, w),
        OutputFormat::Json => write_json(&records, w),
    };
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            let mut w = std::io::BufWriter::new(file);
            render(&mut w)?;
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
        None => render(&mut std::io::stdout().lock())?,
    }
    Ok(records.iter().all(|r| r.is_ok()))
}

fn run(cli: Cli) -> CliResult<()> {
    let cache = if cli.no_cache { Cache::disabled() } else { Cache::from_env() };
    let columns = match &cli.command {
        Command::Correlators(_) => Some(Columns::Correlators),
        Command::Negativity(_) | Command::Pitangle(_) => Some(Columns::Negativity),
        Command::Sweep(_) => Some(Columns::All),
        _ => None,
    };
    match cli.command {
        Command::Correlators(args) | Command::Negativity(args) | Command::Pitangle(args) | Command::Sweep(args) => {
            if columns == Some(Columns::All) && args.vary.is_empty() {
                return Err(CliError::Config("sweep needs at least one --vary".into()));
            }
            let columns = columns.expect("point commands have columns");
            if !points(&args, columns, cli.workers, &cache)? {
                return Err(CliError::Numerical("some points failed to converge; see the error column".into()));
            }
        }
        Command::Figure {
            preset,
            resolution,
            out,
            config,
        } => {
            let base = load(config.as_deref())?;
            let panels = run_preset(preset, resolution, &base, &out, cli.workers, &cache)?;
            let mut failed = 0;
            for (path, records) in &panels {
                failed += records.iter().filter(|r| !r.is_ok()).count();
                eprintln!("wrote {} ({} points)", path.display(), records.len());
            }
            if failed > 0 {
                return Err(CliError::Numerical(format!("{failed} points failed to converge")));
            }
        }
        Command::Oracle { out, config } => {
            let base = load(config.as_deref())?;
            let report = calibrate(&calibration_configuration(), &base.numerics.correlators, &base.numerics.oracle())?;
            for path in write_report(&report, &out)? {
                eprintln!("wrote {}", path.display());
            }
            if !report.passed() {
                return Err(CliError::Check(format!("oracle disagrees on {}", report.failures().join(", "))));
            }
        }
        Command::Selftest { criterion } => {
            let ctx = Context::new(cli.workers);
            let ids: Vec<u8> = if criterion.is_empty() { (1..=11).collect() } else { criterion };
            let mut failed = Vec::new();
            for id in ids {
                let outcome = acceptance::run_one(id, &ctx);
                println!("{outcome}");
                if !outcome.passed {
                    failed.push(id);
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Check(format!("criteria {failed:?} failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
