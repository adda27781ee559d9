use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sphmean_cli::acceptance::{selftest, Faults, Level};
use sphmean_cli::commands::{cmd_forward, cmd_kernel_map, cmd_phantom_render, cmd_reconstruct, DATA_DIR};
use sphmean_cli::config::RunConfig;
use sphmean_cli::CliError;

#[derive(Parser)]
#[command(name = "sphmean", version, about = "Spherical-mean inversion pipelines")]
struct Cli {
    /// Worker threads; overrides the config value (0 uses every core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate spherical-mean or wave data.
    Forward(Run),
    /// Reconstruct from generated data and report the error.
    Reconstruct {
        #[command(flatten)]
        run: Run,
        /// Data directory; `<out>/data` by default.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Write a slice of the smoothing kernel as CSV.
    KernelMap(Run),
    /// Sample the phantom on the reconstruction lattice.
    PhantomRender(Run),
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Deliberately break a component to check that the suite notices.
        #[arg(long, value_enum, hide = true)]
        fault: Option<FaultArg>,
    },
}

#[derive(clap::Args)]
struct Run {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    HilbertSign,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn configure_threads(threads: usize) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("threads: {e}")))
}

fn load(run: &Run, threads: Option<usize>) -> Result<(RunConfig, PathBuf), CliError> {
    let config = RunConfig::load(&run.config)?;
    configure_threads(threads.unwrap_or(config.threads))?;
    let out = config.output_dir(run.out.as_deref());
    Ok((config, out))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Forward(run) => {
            let (config, out) = load(&run, cli.threads)?;
            let dir = cmd_forward(&config, &out)?;
            println!("wrote {}", dir.display());
        }
        Command::Reconstruct { run, data } => {
            let (config, out) = load(&run, cli.threads)?;
            let data = data.unwrap_or_else(|| out.join(DATA_DIR));
            match cmd_reconstruct(&config, &data, &out)? {
                Some(r) => println!(
                    "relative_l2 {:.6e} max_abs {:.6e} runtime {:.2} s",
                    r.relative_l2, r.max_abs, r.runtime
                ),
                None => println!("wrote kernel map to {}", out.display()),
            }
        }
        Command::KernelMap(run) => {
            let (config, out) = load(&run, cli.threads)?;
            println!("wrote {}", cmd_kernel_map(&config, &out)?.display());
        }
        Command::PhantomRender(run) => {
            let (config, out) = load(&run, cli.threads)?;
            println!("wrote {}", cmd_phantom_render(&config, &out)?.display());
        }
        Command::Selftest { level, fault } => {
            configure_threads(cli.threads.unwrap_or(0))?;
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let faults = Faults {
                flip_hilbert_sign: matches!(fault, Some(FaultArg::HilbertSign)),
            };
            selftest(level, faults, |o| println!("{o}"))?;
            println!("all criteria passed");
        }
    }
    Ok(())
}
