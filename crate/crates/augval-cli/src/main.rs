//! Command-line surface for augmented-valuation chains.
//!
//! Exit codes: 0 pass, 1 semantic mismatch (a failed verdict, violations, or
//! a theorem-violation), 2 input error, 3 inconclusive at the horizon.

mod catalog_doc;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use augval::chain::refine_probe;
use augval::limits::{WitnessOutcome, DEFAULT_WINDOW};
use augval::mobius::{degree_one_probe, transport_chain, transport_equal_check, MobiusMap};
use augval::poly::phi_expand;
use augval::Error;

const EXIT_PASS: u8 = 0;
const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "augval",
    version,
    about = "Exact augmented-valuation chains on K[x]: evaluation, transport, limits",
    long_about = None,
    after_help = "File arguments take `FILE` or `FILE#NAME` to select out of a catalog."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a chain on a polynomial; prints the exact value.
    Eval {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Evaluate a chain on a rational function.
    EvalL {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        ratfn: PathBuf,
    },
    /// Expand a polynomial along powers of a monic key; prints the digits.
    Expand {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Validate a chain; prints `ok` or the violations.
    Validate {
        #[arg(long)]
        chain: String,
    },
    /// Rewrite a chain in a new generator; prints the step table.
    Transport {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transport a chain and check exact equality on sampled functions.
    Compare {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        map: String,
        /// Override the transported chain (diagnostic: verify a claimed transport).
        #[arg(long)]
        transported: Option<String>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate samples in parallel; output is identical either way.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit computations over a continuous family.
    Limit {
        #[command(subcommand)]
        cmd: LimitCmd,
    },
    /// Probe a candidate pool for keys refining one chain toward a target.
    Refine {
        #[arg(long)]
        target: String,
        #[arg(long)]
        chain: String,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare degree-one value maximizers on both sides of a map.
    ProbeDegreeOne {
        #[arg(long)]
        chain: String,
        /// JSON array of rational shifts `c`, probing the keys `x + c`.
        #[arg(long)]
        candidates: PathBuf,
        /// Defaults to the inversion `x -> 1/x`.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
}

#[derive(Subcommand)]
enum LimitCmd {
    /// Evaluate a limit augmentation on a polynomial.
    Eval {
        /// A limit-augmentation document (family + limit_key + gamma).
        #[arg(long)]
        family: String,
        #[arg(long)]
        poly: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Walk member values of a family until they stabilize.
    Stabilize {
        #[arg(long)]
        family: String,
        #[arg(long)]
        poly: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// Cap the walk below the family's own horizon.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Euclidean-division witness that a polynomial is not eventually
    /// divisible by a key along the family.
    Witness {
        #[arg(long)]
        family: String,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

/// Library errors sort into the exit-code contract.
fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Horizon { .. } => EXIT_INCONCLUSIVE,
        Error::TheoremViolation(_) => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval { chain, poly } => {
            let chain = catalog_doc::load_chain(&chain).map_err(|e| e.to_string())?;
            let f = catalog_doc::load_poly_file(poly.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let v = chain.eval(&f).map_err(|e| e.to_string())?;
            println!("{v}");
            Ok(EXIT_PASS)
        }
        Command::EvalL { chain, ratfn } => {
            let chain = catalog_doc::load_chain(&chain).map_err(|e| e.to_string())?;
            let fr = catalog_doc::load_ratfn_file(ratfn.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let v = chain.eval_ratfn(&fr).map_err(|e| e.to_string())?;
            println!("{v}");
            Ok(EXIT_PASS)
        }
        Command::Expand { poly, phi } => {
            let f = catalog_doc::load_poly_file(poly.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let key = catalog_doc::load_poly_file(phi.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let expansion = phi_expand(&f, &key).map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::to_string(&expansion.digits).expect("digits serialize")
            );
            Ok(EXIT_PASS)
        }
        Command::Validate { chain } => {
            let chain = catalog_doc::load_chain_lenient(&chain)?;
            let report = chain.validate();
            println!("{report}");
            Ok(if report.is_ok() { EXIT_PASS } else { EXIT_MISMATCH })
        }
        Command::Transport { chain, map, out } => {
            let chain = catalog_doc::load_chain(&chain).map_err(|e| e.to_string())?;
            let map = catalog_doc::load_map(&map).map_err(|e| e.to_string())?;
            match transport_chain(&chain, &map) {
                Ok(report) => {
                    print_transport(&report);
                    if let Some(path) = out {
                        catalog_doc::write_out(&path, &report.to_json())
                            .map_err(|e| e.to_string())?;
                    }
                    Ok(if report.verdict.passed() { EXIT_PASS } else { EXIT_MISMATCH })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(exit_for(&e))
                }
            }
        }
        Command::Compare {
            chain,
            map,
            transported,
            samples,
            seed,
            parallel,
            out,
        } => {
            let chain = catalog_doc::load_chain(&chain).map_err(|e| e.to_string())?;
            let map = catalog_doc::load_map(&map).map_err(|e| e.to_string())?;
            let mut report = match transport_chain(&chain, &map) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(exit_for(&e));
                }
            };
            if let Some(selector) = transported {
                report.transported =
                    catalog_doc::load_chain(&selector).map_err(|e| e.to_string())?;
            }
            let verdict = transport_equal_check(&chain, &report, samples, seed, parallel)
                .map_err(|e| e.to_string())?;
            report.verdict = verdict.clone();
            print_transport(&report);
            println!("samples: {samples}  seed: {seed}");
            if let Some(path) = out {
                catalog_doc::write_out(&path, &report.to_json()).map_err(|e| e.to_string())?;
            }
            Ok(if verdict.passed() { EXIT_PASS } else { EXIT_MISMATCH })
        }
        Command::Limit { cmd } => run_limit(cmd),
        Command::Refine {
            target,
            chain,
            candidates,
            out,
        } => {
            let target = catalog_doc::load_chain(&target).map_err(|e| e.to_string())?;
            let current = catalog_doc::load_chain(&chain).map_err(|e| e.to_string())?;
            let pool = catalog_doc::load_poly_list(candidates.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let report = refine_probe(&target, &current, &pool).map_err(|e| e.to_string())?;
            for row in &report.rows {
                println!(
                    "{}  current {}  target {}  {}",
                    row.candidate,
                    row.current_value,
                    row.target_value,
                    if row.member { "member" } else { "-" }
                );
            }
            match report.minimal_degree {
                Some(d) => println!("minimal member degree: {d}"),
                None => println!("no members in the pool"),
            }
            if let Some(path) = out {
                catalog_doc::write_out(&path, &report.to_json()).map_err(|e| e.to_string())?;
            }
            Ok(EXIT_PASS)
        }
        Command::ProbeDegreeOne {
            chain,
            candidates,
            map,
            out,
        } => {
            let chain = catalog_doc::load_chain(&chain).map_err(|e| e.to_string())?;
            let map = match map {
                Some(selector) => catalog_doc::load_map(&selector).map_err(|e| e.to_string())?,
                None => MobiusMap::inversion(),
            };
            let shifts = catalog_doc::load_rational_list(candidates.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let report = degree_one_probe(&chain, &shifts, &map).map_err(|e| e.to_string())?;
            for row in &report.rows {
                println!(
                    "{}  value {}  ->  {}  value {}",
                    row.key, row.value, row.transported_key, row.transported_value
                );
            }
            println!(
                "source max {}  transported max {}  correspondence: {}",
                report.source_max,
                report.transported_max,
                if report.correspondence { "yes" } else { "NO" }
            );
            if let Some(path) = out {
                catalog_doc::write_out(&path, &report.to_json()).map_err(|e| e.to_string())?;
            }
            Ok(if report.correspondence { EXIT_PASS } else { EXIT_MISMATCH })
        }
    }
}

fn run_limit(cmd: LimitCmd) -> Result<u8, String> {
    match cmd {
        LimitCmd::Eval {
            family,
            poly,
            window,
        } => {
            let aug = catalog_doc::load_augmentation(&family).map_err(|e| e.to_string())?;
            let f = catalog_doc::load_poly_file(poly.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            match aug.eval(&f, window.window) {
                Ok(v) => {
                    println!("{v}");
                    Ok(EXIT_PASS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(exit_for(&e))
                }
            }
        }
        LimitCmd::Stabilize {
            family,
            poly,
            window,
            horizon,
        } => {
            let mut fam = catalog_doc::load_family(&family).map_err(|e| e.to_string())?;
            if let Some(h) = horizon {
                fam.shape.horizon = fam.shape.horizon.min(h);
            }
            let f = catalog_doc::load_poly_file(poly.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let s = fam
                .stabilized_value(&f, window.window)
                .map_err(|e| e.to_string())?;
            if s.stabilized {
                println!(
                    "{}, stabilized at t={}",
                    s.value,
                    s.first_stable.unwrap_or(0)
                );
                Ok(EXIT_PASS)
            } else {
                println!("{}, non-stabilized at horizon {}", s.value, fam.shape.horizon);
                Ok(EXIT_INCONCLUSIVE)
            }
        }
        LimitCmd::Witness {
            family,
            phi,
            poly,
            window,
        } => {
            let fam = catalog_doc::load_family(&family).map_err(|e| e.to_string())?;
            let key = catalog_doc::load_poly_file(phi.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let f = catalog_doc::load_poly_file(poly.to_str().unwrap_or_default())
                .map_err(|e| e.to_string())?;
            let report = fam
                .divisibility_witness(&key, &f, window.window)
                .map_err(|e| e.to_string())?;
            println!("q = {}", report.quotient);
            println!("r = {}", report.remainder);
            println!("{}", report.outcome);
            Ok(match report.outcome {
                WitnessOutcome::NotEventuallyDivisible { .. } => EXIT_PASS,
                WitnessOutcome::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
    }
}

fn print_transport(report: &augval::mobius::TransportReport) {
    println!("map: {}", report.map);
    println!("word: {}", report.word);
    if let Some(step) = &report.prepended {
        println!("prepended: ({}, {})", step.phi.fmt_with_var("y"), step.gamma);
    }
    for row in &report.rows {
        println!(
            "({}, {})  ->  ({}, {})",
            row.source_phi,
            row.source_gamma,
            row.transported_phi.fmt_with_var("y"),
            row.transported_gamma
        );
    }
    println!("verdict: {}", report.verdict);
}
