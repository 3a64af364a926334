use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use islt_core::cert;
use islt_core::cut::{eliminate, CutError};
use islt_core::hilbert::{check_hilbert, HilbertDerivation};
use islt_core::search::{search, SearchConfig};
use islt_core::semantics::{find_countermodel, DEFAULT_WORLD_BOUND};
use islt_core::{parse, parse_sequent, theta, SearchResult, Sequent};

/// Decision procedure and proof workbench for intuitionistic Strong Löb
/// logic.
#[derive(Parser)]
#[command(name = "islt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a proof and print it as a certificate.
    Prove {
        input: String,
        /// Read the input as a sequent `f1, f2 => g` instead of a formula.
        #[arg(long)]
        sequent: bool,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        /// Unmemoized search with the rule order reshuffled at every node.
        #[arg(long)]
        naive: bool,
        /// Shuffle seed for --naive; random (and printed) if omitted.
        #[arg(long, requires = "naive")]
        seed: Option<u64>,
        /// Node expansion budget; defaults to $ISLT_BUDGET if set.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check a JSON proof certificate.
    Check { cert: PathBuf },
    /// Remove all Cut nodes from a certificate.
    Cutelim {
        cert: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Search the finite models for one refuting the input.
    Countermodel {
        input: String,
        #[arg(long)]
        sequent: bool,
        #[arg(long, default_value_t = DEFAULT_WORLD_BOUND)]
        max_worlds: usize,
    },
    /// Print the termination measure of a sequent.
    Theta { sequent: String },
    /// Check a JSON Hilbert-style derivation.
    HilbertCheck { proof: PathBuf },
}

/// `println!` that ignores a closed stdout, as when piped into `head`.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Failures that map to exit code 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn read_input(input: &str, as_sequent: bool) -> Result<Sequent, Fatal> {
    if as_sequent {
        parse_sequent(input).map_err(|e| Fatal(format!("cannot parse sequent: {e}")))
    } else {
        parse(input).map(Sequent::goal).map_err(|e| Fatal(format!("cannot parse formula: {e}")))
    }
}

fn read_file(path: &PathBuf) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))
}

fn env_budget() -> Result<Option<u64>, Fatal> {
    match std::env::var("ISLT_BUDGET") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Fatal(format!("ISLT_BUDGET is not a number: {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<bool, Fatal> {
    match cli.command {
        Command::Prove { input, sequent, emit, naive, seed, budget } => {
            let s = read_input(&input, sequent)?;
            let mut cfg = if naive {
                let seed = seed.unwrap_or_else(rand::random);
                eprintln!("seed: {seed}");
                SearchConfig::naive(seed)
            } else {
                SearchConfig::default()
            };
            cfg.check_branches = naive;
            cfg.budget = budget.or(env_budget()?);
            let (result, _) = search(&s, &cfg).map_err(|e| Fatal(format!("aborted: {e}")))?;
            match result {
                SearchResult::Proved(d) => {
                    let out = match emit {
                        Emit::Json => cert::to_json(&d),
                        Emit::Text => d.to_text(),
                        Emit::Dot => d.to_dot(),
                    };
                    say!("{}", out.trim_end());
                    Ok(true)
                }
                SearchResult::Unprovable { explored } => {
                    say!("unprovable");
                    eprintln!("explored {explored} sequents");
                    Ok(false)
                }
            }
        }
        Command::Check { cert: path } => {
            let d = cert::from_json(&read_file(&path)?)?;
            match d.check_with_cuts() {
                Ok(()) => {
                    say!("ok: {}", d.sequent);
                    Ok(true)
                }
                Err(v) => {
                    say!("invalid at {}: {}", v.path, v.reason);
                    Ok(false)
                }
            }
        }
        Command::Cutelim { cert: path, output } => {
            let d = cert::from_json(&read_file(&path)?)?;
            match eliminate(&d) {
                Ok(out) => {
                    fs::write(&output, cert::to_json(&out) + "\n")
                        .map_err(|e| Fatal(format!("cannot write {}: {e}", output.display())))?;
                    say!(
                        "eliminated {} cuts; height {} -> {}",
                        d.count_rule(islt_core::Rule::Cut),
                        d.height(),
                        out.height()
                    );
                    Ok(true)
                }
                Err(CutError::InvalidProof(v)) => {
                    say!("invalid at {}: {}", v.path, v.reason);
                    Ok(false)
                }
                Err(e) => Err(Fatal(e.to_string())),
            }
        }
        Command::Countermodel { input, sequent, max_worlds } => {
            let s = read_input(&input, sequent)?;
            match find_countermodel(&s, max_worlds)? {
                Some((m, w)) => {
                    say!("{}", m.to_json());
                    eprintln!("refuted at world {w}");
                    Ok(true)
                }
                None => {
                    say!("no countermodel with at most {max_worlds} worlds");
                    Ok(false)
                }
            }
        }
        Command::Theta { sequent } => {
            let s = parse_sequent(&sequent).map_err(|e| Fatal(format!("cannot parse sequent: {e}")))?;
            say!("{}", theta(&s));
            Ok(true)
        }
        Command::HilbertCheck { proof } => {
            let d = HilbertDerivation::from_json(&read_file(&proof)?)?;
            match check_hilbert(&d) {
                Ok(()) => {
                    say!("ok: {}", d.conclusion);
                    Ok(true)
                }
                Err(v) => {
                    say!("invalid at {}: {}", v.path, v.reason);
                    Ok(false)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    // proof transformations recurse over deep trees
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(move || run(cli));
    match worker.expect("spawn worker").join().expect("worker panicked") {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
