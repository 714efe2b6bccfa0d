use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fkdg_cli::config::ExperimentConfig;
use fkdg_cli::presets;
use fkdg_cli::runner;
use fkdg_cli::{CliError, CliResult};

/// LDG / L1 solver for the fractional Feynman-Kac equation: convergence and
/// conditioning studies.
#[derive(Parser)]
#[command(name = "fkdg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a shipped preset.
    Run(RunArgs),
    /// List the shipped presets.
    ListPresets {
        /// Directory holding the preset files.
        #[arg(long)]
        presets_dir: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    ValidateConfig {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(value_name = "FILE", conflicts_with = "config")]
        file: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "preset",
        required_unless_present = "preset"
    )]
    config: Option<PathBuf>,
    /// Name of a shipped preset, e.g. `table1-row1`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    presets_dir: Option<PathBuf>,
    /// Output directory; defaults to `output.dir` of the config, then `out`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Single-threaded run with bitwise reproducible output.
    #[arg(long, conflicts_with = "threads")]
    deterministic: bool,
    /// Worker threads; all cores by default.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Also write a log-log SVG plot.
    #[arg(long)]
    plot: bool,
    /// Compare with the config's expectations; mismatches exit with code 4.
    #[arg(long)]
    check: bool,
}

fn init_threads(n: usize) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure {n} threads: {e}")))
}

fn run(args: RunArgs) -> CliResult<()> {
    let dir = args.presets_dir.unwrap_or_else(presets::presets_dir);
    let config = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => presets::find(&dir, name)?,
        (None, None) => {
            return Err(CliError::Config(
                "either --config or --preset is required".into(),
            ))
        }
    };
    match (args.deterministic, args.threads) {
        (true, _) => init_threads(1)?,
        (false, Some(0)) => return Err(CliError::Config("--threads must be positive".into())),
        (false, Some(n)) => init_threads(n)?,
        (false, None) => {}
    }
    if config.has_central_weight() {
        eprintln!("warning: flux weight 1/2 (central flux); optimal spatial order is not expected for odd degrees");
    }
    let out = runner::run(&config)?;
    print!("{}", runner::text(&config, &out));
    let out_dir = args
        .out
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    for p in runner::write_artifacts(&config, &out, &out_dir, args.plot)? {
        println!("wrote {}", p.display());
    }
    if args.check {
        let lines = runner::check(&config, &out);
        if lines.is_empty() {
            println!("no expectations configured");
        }
        for l in &lines {
            println!("{}", l.render());
        }
        let failed = lines.iter().filter(|l| !l.pass).count();
        if failed > 0 {
            return Err(CliError::Mismatch(failed));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::ListPresets { presets_dir } => {
            let dir = presets_dir.unwrap_or_else(presets::presets_dir);
            presets::load_all(&dir).map(|all| {
                let mut out = std::io::stdout().lock();
                for c in &all {
                    // a closed pipe (e.g. `| head`) ends the listing quietly
                    if writeln!(out, "{}", presets::describe(c)).is_err() {
                        break;
                    }
                }
            })
        }
        Command::ValidateConfig { config, file } => match config.or(file) {
            Some(path) => {
                ExperimentConfig::load(&path).map(|c| println!("{}: ok ({:?})", c.name, c.kind))
            }
            None => Err(CliError::Config("a config path is required".into())),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
