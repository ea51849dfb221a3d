//! `cogmimo` CLI: seeded Monte Carlo sweeps over SNR for the hybrid and
//! digital transceiver designs, and single-cell inspection runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cogmimo_sim::export::{parse_snr_range, write_csv, write_json};
use cogmimo_sim::{run_single, run_sweep, Method, Receiver, SweepSpec};

#[derive(Parser)]
#[command(name = "cogmimo", about = "Underlay cognitive-radio hybrid beamforming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and persist the results.
    Sweep {
        /// JSON sweep specification; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for sweep.csv / sweep.json.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subset of digital,hybrid-mi,hybrid-frob.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        /// Either one value or a:b:step, in dB.
        #[arg(long)]
        snr: Option<String>,
        /// Receiver applied to the hybrid methods.
        #[arg(long)]
        receiver: Option<Receiver>,
    },
    /// Run one (method, SNR, trial) cell and print its report.
    Single {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// SNR point in dB.
        #[arg(long)]
        snr: f64,
        #[arg(long)]
        method: Method,
        /// Trial index used for seed derivation.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
}

fn load_spec(config: &Option<PathBuf>) -> Result<SweepSpec, String> {
    match config {
        Some(path) => SweepSpec::from_json_file(path).map_err(|e| e.to_string()),
        None => Ok(SweepSpec::default_64x16()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Sweep {
            config,
            out,
            format,
            trials,
            seed,
            methods,
            snr,
            receiver,
        } => {
            let mut spec = load_spec(&config)?;
            if let Some(trials) = trials {
                spec.num_trials = trials;
            }
            if let Some(seed) = seed {
                spec.base_seed = seed;
            }
            if let Some(methods) = methods {
                spec.methods = methods;
            }
            if let Some(snr) = snr {
                spec.snr_grid_db = parse_snr_range(&snr)?;
            }
            if let Some(receiver) = receiver {
                spec.receiver = receiver;
            }

            let result = run_sweep(&spec).map_err(|e| e.to_string())?;
            std::fs::create_dir_all(&out).map_err(|e| format!("creating {}: {e}", out.display()))?;
            if matches!(format, Format::Csv | Format::Both) {
                let path = out.join("sweep.csv");
                write_csv(&result, &path).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            if matches!(format, Format::Json | Format::Both) {
                let path = out.join("sweep.json");
                write_json(&result, &path).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            for aggregate in &result.aggregates {
                println!(
                    "{:>11} @ {:>6.1} dB: mean SE {:.4} bits/s/Hz (stderr {:.4}, {} trials)",
                    aggregate.method.name(),
                    aggregate.snr_db,
                    aggregate.mean_spectral_efficiency,
                    aggregate.std_error,
                    aggregate.trials
                );
            }
            if result.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "{} of {} trials failed ({:.2}%)",
                    result.failures.len(),
                    result.failures.len() + result.records.len(),
                    100.0 * result.failure_rate()
                );
                for failure in result.failures.iter().take(5) {
                    eprintln!(
                        "  {} @ {} dB trial {}: {}",
                        failure.method.name(),
                        failure.snr_db,
                        failure.trial,
                        failure.error
                    );
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Single {
            config,
            seed,
            snr,
            method,
            trial,
        } => {
            let mut spec = load_spec(&config)?;
            if let Some(seed) = seed {
                spec.base_seed = seed;
            }
            let record = run_single(&spec, method, snr, trial).map_err(|e| e.to_string())?;
            println!("method                 {}", record.method.name());
            println!("snr_db                 {}", record.snr_db);
            println!("trial                  {}", record.trial);
            println!("seed                   {}", record.seed);
            println!("spectral_efficiency    {:.6} bits/s/Hz", record.report.spectral_efficiency);
            println!("tx_power               {:.6e}", record.report.tx_power);
            println!("interference_power     {:.6e}", record.report.interference_power);
            println!("power_violation        {:.3e}", record.report.power_violation);
            println!("interference_violation {:.3e}", record.report.interference_violation);
            println!("effective_streams      {}", record.report.effective_streams);
            if let Some(c) = &record.convergence {
                println!("precoder solve:");
                println!("  termination          {}", c.termination);
                println!("  iterations           {}", c.iterations);
                println!("  restarts             {}", c.restarts);
                println!("  inner iterations     {}", c.inner_iterations);
                println!("  final primal         {:.3e}", c.final_primal_residual);
                println!(
                    "  audit                bounded={} summable={} residual={}",
                    c.bounded_multiplier, c.summable_diffs, c.residual_vanishing
                );
            }
            if let Some(c) = &record.receiver_convergence {
                println!("post-coder solve:");
                println!("  termination          {}", c.termination);
                println!("  iterations           {}", c.iterations);
                println!("  final primal         {:.3e}", c.final_primal_residual);
            }
            println!("solve_seconds          {:.3}", record.solve_seconds);
            Ok(ExitCode::SUCCESS)
        }
    }
}
