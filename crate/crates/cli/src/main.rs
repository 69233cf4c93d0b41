use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use majorant_cli::commands::{self, CertifyOptions, GronwallSpec};
use majorant_cli::config::{OptimizeMode, TheoremKey};
use majorant_cli::{CliError, CliResult, Config};

#[derive(Parser)]
#[command(name = "majorant", version, about = "Guaranteed error bounds for time-domain Maxwell approximations")]
struct Cli {
    /// Worker threads for the numerical kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the approximation and write a snapshot archive.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate the majorant of a snapshot and write report.json/report.csv.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum)]
        theorem: Option<TheoremKey>,
        #[arg(long, value_enum)]
        optimize: Option<OptimizeMode>,
    },
    /// Refinement study on the configured case.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Gronwall bounds against an ODE oracle.
    Gronwall {
        /// JSON check spec; the builtin suite runs when absent or empty.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Solve { config, out } => {
            let path = commands::solve(&Config::load(&config)?, &out)?;
            println!("{}", path.display());
        }
        Command::Certify { config, snapshot, out, theorem, optimize } => {
            let cfg = Config::load(&config)?;
            let res = commands::certify_cmd(&cfg, &snapshot, &out, &CertifyOptions { theorem, optimize });
            if let Ok(file) = &res {
                let s = &file.summary;
                println!(
                    "{} b(T)={} dominates={}",
                    s.theorem,
                    majorant_cli::report::fmt_f64(s.final_bound.0),
                    s.dominates.map_or("n/a".to_string(), |d| d.to_string())
                );
            }
            res?;
        }
        Command::Verify { config, levels, out } => {
            let table = commands::verify(&Config::load(&config)?, levels, out.as_deref())?;
            print!("{}", table.to_csv());
            if let Some(bad) = table.rows.iter().find(|r| !r.dominates) {
                return Err(CliError::Verification(format!("level {} bound does not dominate", bad.level)));
            }
        }
        Command::Gronwall { spec } => {
            let spec = match spec {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                    GronwallSpec::from_json(&text)?
                }
                None => GronwallSpec::default(),
            };
            let lines = commands::gronwall(&spec)?;
            for l in &lines {
                println!("{}: {} ({})", l.name, if l.passed { "PASS" } else { "FAIL" }, l.detail);
            }
            let failed: Vec<&str> = lines.iter().filter(|l| !l.passed).map(|l| l.name).collect();
            if !failed.is_empty() {
                return Err(CliError::Verification(format!("failing cases: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
