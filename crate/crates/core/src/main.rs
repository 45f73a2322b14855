use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cpsg::cli::{self, RunConfig, EXIT_USAGE};
use cpsg::Error;

#[derive(Parser)]
#[command(name = "cpsg", version, about = "Decay-rate scenarios for Crank-Nicolson schemes and inverse generators")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every scenario listed in a TOML config.
    Run {
        config: PathBuf,
        /// Scenario parallelism (CPSG_JOBS takes precedence).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the scenario catalog.
    List {
        /// Also print each scenario's keys and defaults.
        #[arg(long)]
        keys: bool,
    },
    /// Run one catalog scenario and print its checks.
    Check {
        id: String,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the outcome JSON and curves here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn usage(e: Error) -> ExitCode {
    eprintln!("cpsg: {e}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.cmd {
        Cmd::List { keys } => {
            print!("{}", cli::list_catalog());
            if keys {
                for e in cli::catalog() {
                    println!("{}: {}", e.id, cli::describe_keys(e));
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { config, jobs } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let jobs = match cli::resolve_jobs(jobs, cfg.jobs) {
                Ok(j) => j,
                Err(e) => return usage(e),
            };
            match cli::run_config(&cfg, jobs) {
                Ok(m) => {
                    for s in &m.scenarios {
                        println!("{:02} {:<26} {}", s.index, s.scenario_id, s.verdict.as_str());
                        if let Some(err) = &s.error {
                            eprintln!("   error: {err}");
                        }
                    }
                    println!("manifest: {}", cfg.output_dir.join("manifest.json").display());
                    ExitCode::from(m.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("cpsg: {e}");
                    ExitCode::from(cli::EXIT_FAIL as u8)
                }
            }
        }
        Cmd::Check { id, params, seed, out } => {
            let overrides = match params.iter().map(|p| cli::parse_param(p)).collect::<Result<Vec<_>, _>>() {
                Ok(o) => o,
                Err(e) => return usage(e),
            };
            let outcome = match cli::check_scenario(&id, &overrides, seed) {
                Ok(o) => o,
                Err(e) => return usage(e),
            };
            print!("{}", cli::summarize(&outcome));
            if let Some(dir) = out {
                if let Err(e) = std::fs::create_dir_all(&dir)
                    .map_err(Error::from)
                    .and_then(|_| cli::write_outcome(&dir, 1, &outcome))
                {
                    eprintln!("cpsg: {e}");
                    return ExitCode::from(cli::EXIT_FAIL as u8);
                }
            }
            if outcome.verdict == cpsg::rate_lab::Verdict::Fail {
                ExitCode::from(cli::EXIT_FAIL as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
