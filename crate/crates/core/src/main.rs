use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use matchbound::completion::{self, query_words, Limits, Options, Outcome};
use matchbound::{parse_srs, verify, Certificate, Chain, Error};

const EXIT_LIMIT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "matchbound",
    version,
    about = "Matchbound certificates for string rewriting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a matchbound certificate of a rewriting system.
    Prove {
        file: PathBuf,
        #[arg(long, default_value_t = Limits::default().max_steps)]
        max_steps: usize,
        #[arg(long, default_value_t = Limits::default().max_states)]
        max_states: usize,
        #[arg(long, default_value_t = Limits::default().max_height)]
        max_height: u32,
        /// Write the certificate as JSON.
        #[arg(long, value_name = "PATH")]
        emit_cert: Option<PathBuf>,
        /// Write the certificate as Graphviz DOT.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        /// Print engine statistics.
        #[arg(long)]
        stats: bool,
        /// Cross-check every incremental update against full recomputation.
        #[arg(long)]
        full_recompute_check: bool,
        /// Report progress on standard error.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Check a certificate written by `prove --emit-cert`.
    Verify { cert: PathBuf },
    /// Show the multiplication chain used for a rewriting system.
    Chain { file: PathBuf },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Json(_) | Error::EmptyAlphabet | Error::EmptyWord => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Prove {
            file,
            max_steps,
            max_states,
            max_height,
            emit_cert,
            dot,
            stats,
            full_recompute_check,
            verbose,
        } => {
            let srs = parse_srs(&read(&file)?)?;
            let options = Options {
                limits: Limits {
                    max_steps,
                    max_states,
                    max_height,
                },
                check_incremental: full_recompute_check,
                ..Options::default()
            };
            let started = Instant::now();
            let mut state = completion::CompletionState::flower(srs.alphabet, srs.rules, options)?;
            let outcome = state.run_with_progress(|p| {
                if verbose && p.steps % 100 == 0 {
                    eprintln!(
                        "step {}: {} states, height {}",
                        p.steps, p.states, p.max_height
                    );
                }
            })?;
            let elapsed = started.elapsed();

            let code = match &outcome {
                Outcome::Success { bound } => {
                    println!("YES matchbound certificate found");
                    println!("bound {bound}, {} states", state.state_count());
                    0
                }
                Outcome::Limit { kind, .. } => {
                    println!("MAYBE limit {kind} reached");
                    println!("height {}, {} states", state.bound(), state.state_count());
                    EXIT_LIMIT
                }
            };
            let s = state.stats();
            println!("edges {}", state.edge_count());
            println!(
                "steps {} (transitive {}, inverse {})",
                s.steps, s.transitive_edges, s.inverse_edges
            );
            println!("time {:.3}s", elapsed.as_secs_f64());
            if stats {
                let chain = state.automaton().chain();
                println!("chain nodes {}, cost {}", chain.len(), chain.cost());
                println!(
                    "sweeps {}, saturation rounds {}",
                    s.sweeps, s.saturation_rounds
                );
                println!("multiplications {}", s.multiplications);
                println!(
                    "delta entries {} (largest {})",
                    s.delta_entries, s.max_delta
                );
                println!("sweep time {:.3}s", s.delta_time.as_secs_f64());
            }

            if matches!(outcome, Outcome::Success { .. }) {
                let cert = Certificate::from_state(&state);
                if let Some(path) = emit_cert {
                    write(&path, &cert.to_json())?;
                }
                if let Some(path) = dot {
                    write(&path, &cert.to_dot())?;
                }
            }
            Ok(code)
        }
        Command::Verify { cert } => {
            let cert = Certificate::from_json(&read(&cert)?)?;
            let verdict = verify(&cert);
            if verdict.is_ok() {
                println!("OK certificate verified, bound {}", cert.bound);
                Ok(0)
            } else {
                println!("REJECTED {} failures", verdict.failures.len());
                for f in &verdict.failures {
                    println!("  {f}");
                }
                Ok(EXIT_LIMIT)
            }
        }
        Command::Chain { file } => {
            let srs = parse_srs(&read(&file)?)?;
            let words = query_words(&srs.alphabet, &srs.rules);
            let chain = Chain::build(&words)?;
            print!("{chain}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
