use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinbath_experiments::config::{emit_config, parse_config, ExperimentConfig};
use spinbath_experiments::output::{comparison_table, emit_csv, reshape_long, summary_toml};
use spinbath_experiments::presets::{preset, PRESET_NAMES};
use spinbath_experiments::{benchmark_compare, run, ExperimentError, Result};

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Spin-bath decoherence experiments")]
struct Cli {
    /// Worker threads for the propagators (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one config and write its observable series as CSV.
    Run(RunArgs),
    /// Run the reference, candidate and baseline propagators and print the comparison.
    Compare(RunArgs),
    /// Print a named benchmark geometry as a config.
    Preset {
        /// Preset name, e.g. table1-test3.
        #[arg(long = "preset", value_name = "NAME")]
        name: Option<String>,
        /// Override the bath size.
        #[arg(long)]
        bath_spins: Option<usize>,
        /// Write the config here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reshape a series CSV to long (time, observable, value) rows.
    PlotData {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep only these columns (comma separated).
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long = "preset", value_name = "NAME")]
    preset: Option<String>,
    /// CSV destination; a `.report.toml` summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Model seed; the bath seed becomes this plus one.
    #[arg(long)]
    seed_override: Option<u64>,
    #[arg(long)]
    bath_spins: Option<usize>,
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| ExperimentError::io(path, e))
}

fn load(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => parse_config(&read_file(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(ExperimentError::invalid("--config", "either --config or --preset is required")),
    };
    if let Some(n) = args.bath_spins {
        cfg.model.set_bath_spins(n);
    }
    if let Some(seed) = args.seed_override {
        cfg.override_seed(seed);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report_path(csv: &Path) -> PathBuf {
    csv.with_extension("report.toml")
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::invalid("--threads", e.to_string()))?;
    }
    match cli.command {
        Command::Run(args) => {
            let cfg = load(&args)?;
            let report = run(&cfg)?;
            let out = args.out.or_else(|| cfg.output.csv.clone());
            match out {
                Some(path) => {
                    emit_csv(&report, &path)?;
                    write_file(&report_path(&path), &summary_toml(&report)?)?;
                    log::info!("wrote {}", path.display());
                }
                None => print!("{}", spinbath_experiments::output::csv_string(&report)?),
            }
            eprintln!(
                "{} leaps, {} native ops, setup {:.3}s, propagate {:.3}s, measure {:.3}s",
                report.counts.leaps,
                report.counts.native(),
                report.setup_seconds,
                report.propagate_seconds,
                report.measure_seconds
            );
        }
        Command::Compare(args) => {
            let cfg = load(&args)?;
            let cmp = benchmark_compare(&cfg)?;
            print!("{}", comparison_table(&cmp));
            if let Some(path) = args.out.or_else(|| cfg.output.csv.clone()) {
                for (tag, r) in
                    [("reference", &cmp.reference), ("candidate", &cmp.candidate), ("baseline", &cmp.baseline)]
                {
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
                    let csv = path.with_file_name(format!("{stem}.{tag}.csv"));
                    emit_csv(r, &csv)?;
                    write_file(&report_path(&csv), &summary_toml(r)?)?;
                }
            }
        }
        Command::Preset { name, bath_spins, out } => {
            let Some(name) = name else {
                println!("{}", PRESET_NAMES.join("\n"));
                return Ok(());
            };
            let mut cfg = preset(&name)?;
            if let Some(n) = bath_spins {
                cfg.model.set_bath_spins(n);
                cfg.validate()?;
            }
            let text = emit_config(&cfg)?;
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::PlotData { input, out, columns } => {
            let file = std::fs::File::open(&input).map_err(|e| ExperimentError::io(&input, e))?;
            match out {
                Some(path) => {
                    let w = std::fs::File::create(&path).map_err(|e| ExperimentError::io(&path, e))?;
                    reshape_long(file, std::io::BufWriter::new(w), &columns)?
                }
                None => reshape_long(file, std::io::stdout().lock(), &columns)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
