//! Command-line interface.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver non-convergence,
//! 4 counterexample reference-value mismatch.

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qcorr::channels::run_counterexample;
use qcorr::coords::{density_to_eta, density_to_theta, random_theta};
use qcorr::correlations::decompose_with_gap;
use qcorr::hermitian::{relative_entropy, von_neumann_entropy};
use qcorr::io::{counterexample_to_json, report_to_json, round_sig, StateSpec};
use qcorr::maxent::{extract_constraints, project, SolverOptions};
use qcorr::oracle::{classical_connected_info, ipf_project, JointDistribution};
use qcorr::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Irreducible multiparty correlation in multi-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetRepr {
    Theta,
    Eta,
    Matrix,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation hierarchy of a state, by both definitions.
    Decompose {
        /// State spec JSON file.
        #[arg(long)]
        input: PathBuf,
        /// Marginal residual at which projections count as converged.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Report in bits instead of nats.
        #[arg(long)]
        bits: bool,
        /// Log per-iteration solver residuals to stderr.
        #[arg(long)]
        verbose_trace: bool,
    },
    /// Convert a state spec between theta, eta and matrix form.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: TargetRepr,
    },
    /// Reproduce the CNOT correlation-creation scenario and check its
    /// reference values.
    Counterexample {
        /// Absolute tolerance for the 3-decimal theta reference values.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Compact single-line JSON output.
        #[arg(long)]
        json: bool,
    },
    /// Project a state onto the exponential family E_k.
    Project {
        #[arg(long)]
        input: PathBuf,
        /// Family order k (largest interaction weight kept).
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long)]
        verbose_trace: bool,
    },
    /// Von Neumann entropy of a state.
    Entropy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        bits: bool,
    },
    /// Relative entropy S(rho || sigma).
    Relent {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        bits: bool,
    },
    /// Generate a reproducible random full-rank state (Gaussian theta).
    Random {
        /// Party count; capped at 4 to keep downstream decompositions quick.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        scale: f64,
    },
    /// Classical IPF fit of a joint distribution (debugging aid).
    #[command(hide = true)]
    Oracle {
        /// JSON file {"n": 3, "p": [ ... 2^n probabilities ... ]}.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10000)]
        max_iter: usize,
    },
}

fn read_spec(path: &Path) -> Result<StateSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
    StateSpec::parse(&text)
}

fn solver_options(tol: f64, max_iter: usize, verbose_trace: bool) -> SolverOptions {
    SolverOptions {
        tolerance: tol,
        max_iterations: max_iter,
        verbose_trace,
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NoConvergence { .. } => 3,
        Error::ProjectionFailed { source, .. } => exit_code_for(source),
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Decompose {
            input,
            tol,
            max_iter,
            bits,
            verbose_trace,
        } => {
            let rho = read_spec(&input)?.to_density()?;
            let mut report =
                decompose_with_gap(&rho, &solver_options(tol, max_iter, verbose_trace))?;
            if bits {
                for v in report.c_k.values_mut() {
                    *v /= LN_2;
                }
                report.c_total /= LN_2;
                for v in report.projected_entropies.values_mut() {
                    *v /= LN_2;
                }
                report.definition_gap = report.definition_gap.map(|g| g / LN_2);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report_to_json(&report)).unwrap()
            );
            Ok(0)
        }
        Command::Convert { input, to } => {
            let spec = read_spec(&input)?;
            let rho = spec.to_density()?;
            let converted = match to {
                TargetRepr::Theta => StateSpec::from_theta(&density_to_theta(&rho)?),
                TargetRepr::Eta => StateSpec::from_eta(&density_to_eta(&rho)?),
                TargetRepr::Matrix => StateSpec::from_density(&rho),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&converted.to_json()).unwrap()
            );
            Ok(0)
        }
        Command::Counterexample { tol, json } => {
            let report = run_counterexample(&SolverOptions::default())?;
            let value = counterexample_to_json(&report);
            if json {
                println!("{value}");
            } else {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
            if let Some(failure) = report.first_failure(tol) {
                eprintln!("reference-value assertion failed: {failure}");
                return Ok(4);
            }
            Ok(0)
        }
        Command::Project {
            input,
            order,
            tol,
            max_iter,
            verbose_trace,
        } => {
            let rho = read_spec(&input)?.to_density()?;
            let constraints = extract_constraints(&rho, order)?;
            let result = project(&constraints, &solver_options(tol, max_iter, verbose_trace))?;
            let mut value = StateSpec::from_theta(&result.theta).to_json();
            let obj = value.as_object_mut().unwrap();
            obj.insert("order".into(), json!(result.order));
            obj.insert("iterations".into(), json!(result.iterations));
            obj.insert(
                "final_residual".into(),
                json!(round_sig(result.final_residual)),
            );
            obj.insert("converged".into(), json!(result.converged));
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            Ok(0)
        }
        Command::Entropy { input, bits } => {
            let rho = read_spec(&input)?.to_density()?;
            let mut s = von_neumann_entropy(&rho);
            if bits {
                s /= LN_2;
            }
            println!("{}", round_sig(s));
            Ok(0)
        }
        Command::Relent { rho, sigma, bits } => {
            let rho = read_spec(&rho)?.to_density()?;
            let sigma = read_spec(&sigma)?.to_density()?;
            let mut s = relative_entropy(&rho, &sigma)?;
            if bits {
                s /= LN_2;
            }
            println!("{}", round_sig(s));
            Ok(0)
        }
        Command::Random { n, seed, scale } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let theta = random_theta(n as usize, scale, &mut rng)?;
            qcorr::coords::theta_to_density(&theta)?; // must materialize as a valid state
            println!(
                "{}",
                serde_json::to_string_pretty(&StateSpec::from_theta(&theta).to_json()).unwrap()
            );
            Ok(0)
        }
        Command::Oracle {
            input,
            order,
            tol,
            max_iter,
        } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::InvalidSpec(format!("{}: {e}", input.display())))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let n = value["n"]
                .as_u64()
                .ok_or_else(|| Error::InvalidSpec("missing \"n\"".into()))?
                as usize;
            let probs: Vec<f64> = value["p"]
                .as_array()
                .ok_or_else(|| Error::InvalidSpec("missing \"p\" array".into()))?
                .iter()
                .map(|v| v.as_f64().unwrap_or(f64::NAN))
                .collect();
            let p = JointDistribution::new(n, probs)?;
            let fit = ipf_project(&p, order, tol, max_iter)?;
            let connected = classical_connected_info(&p)?;
            let out = json!({
                "n": n,
                "order": order,
                "fit": fit.probabilities().iter().map(|&v| round_sig(v)).collect::<Vec<_>>(),
                "entropy": round_sig(fit.shannon_entropy()),
                "connected_info": connected
                    .iter()
                    .map(|(k, &v)| (format!("c{k}"), json!(round_sig(v))))
                    .collect::<serde_json::Map<_, _>>(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
