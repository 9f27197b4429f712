//! Command-line front door: compile circuits to Hamiltonian instances,
//! measure ground energies, certify completeness/soundness, embed CNF
//! formulas, and report null-space angles.
//!
//! Exit codes: 0 pass, 1 fail, 2 parse/usage error, 3 dimension guard,
//! 4 promise violated.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use clockham::circuit::{parse_circuit, parse_state_vector, Circuit, StateVector};
use clockham::operators::{parse_dense_matrix, parse_interchange, write_dense_matrix, write_interchange};
use clockham::reduction::{
    build_3local, build_reference, parse_dimacs, sat_to_hamiltonian, Mode, ReductionParams,
};
use clockham::spectra::{dense_min_eigenvalue, min_eigenvalue_seeded};
use clockham::verify::{angle_diagnostic, verify_completeness, verify_soundness, Verdict};
use clockham::{fmt_f64, Error};

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DIMENSION: u8 = 3;
const EXIT_PROMISE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "clockham",
    about = "Compile verifier circuits into clock Hamiltonians and certify their spectra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Destination path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (only `text` exists).
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit file into a Hamiltonian instance.
    Compile {
        circuit: PathBuf,
        /// `3local` (term list) or `reference` (dense matrix dump).
        #[arg(long, default_value = "3local")]
        mode: String,
        /// Clock penalty is T^exponent.
        #[arg(long, default_value_t = 12)]
        penalty_exponent: u32,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Smallest eigenvalue of an instance file.
    Spectrum {
        hamiltonian: PathBuf,
        /// Start-vector seed for the iterative path.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certify the completeness or soundness bound for a circuit.
    Verify {
        circuit: PathBuf,
        /// Witness-proof vector file (2^m lines of `re,im`); checks the
        /// accepting-side bound.
        #[arg(long, conflicts_with = "sound")]
        complete: Option<PathBuf>,
        /// Check the rejecting-side chain instead.
        #[arg(long)]
        sound: bool,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 12)]
        penalty_exponent: u32,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Embed a DIMACS CNF formula as a diagonal instance.
    Sat2ham {
        dimacs: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Null-space angle diagnostics for a circuit.
    Angle { circuit: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Parse(_) => EXIT_PARSE,
                Error::DimensionGuard(_) => EXIT_DIMENSION,
                _ => EXIT_FAIL,
            })
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Compile {
            circuit,
            mode,
            penalty_exponent,
            common,
        } => cmd_compile(&circuit, &mode, penalty_exponent, &common),
        Command::Spectrum { hamiltonian, seed } => cmd_spectrum(&hamiltonian, seed),
        Command::Verify {
            circuit,
            complete,
            sound,
            epsilon,
            penalty_exponent,
            common,
        } => cmd_verify(&circuit, complete, sound, epsilon, penalty_exponent, &common),
        Command::Sat2ham { dimacs, common } => cmd_sat2ham(&dimacs, &common),
        Command::Angle { circuit } => cmd_angle(&circuit),
    }
}

fn load_circuit(path: &PathBuf) -> Result<Circuit, Error> {
    let text = fs::read_to_string(path)?;
    let circuit = parse_circuit(&text)?;
    if !circuit.meets_time_assumption() {
        eprintln!(
            "note: T = {} < N = {}; the norm budget 4T is only claimed for T >= N",
            circuit.steps(),
            circuit.n_qubits()
        );
    }
    Ok(circuit)
}

fn check_common(common: &CommonOpts) -> Result<(), Error> {
    if common.format != "text" {
        return Err(Error::Parse(format!(
            "unknown format '{}' (only 'text' exists)",
            common.format
        )));
    }
    Ok(())
}

fn emit(common: &CommonOpts, content: &str) -> Result<(), Error> {
    match &common.out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn params_with(penalty_exponent: u32, mode: Mode) -> Result<ReductionParams, Error> {
    if penalty_exponent == 0 {
        return Err(Error::Parse("--penalty-exponent must be >= 1".into()));
    }
    Ok(ReductionParams {
        mode,
        penalty_exponent,
        penalty_override: None,
    })
}

fn cmd_compile(
    circuit_path: &PathBuf,
    mode: &str,
    penalty_exponent: u32,
    common: &CommonOpts,
) -> Result<u8, Error> {
    check_common(common)?;
    let mode: Mode = mode.parse()?;
    let circuit = load_circuit(circuit_path)?;
    let params = params_with(penalty_exponent, mode)?;
    let content = match mode {
        Mode::ThreeLocal => {
            let h = build_3local(&circuit, &params)?;
            write_interchange(&h)
        }
        Mode::Reference => {
            let reference = build_reference(&circuit)?;
            write_dense_matrix(&reference.total())
        }
    };
    emit(common, &content)?;
    Ok(0)
}

fn cmd_spectrum(path: &PathBuf, seed: u64) -> Result<u8, Error> {
    let text = fs::read_to_string(path)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    let result = if first.starts_with("dim ") {
        let m = parse_dense_matrix(&text)?;
        dense_min_eigenvalue(&m)?
    } else {
        let h = parse_interchange(&text)?;
        min_eigenvalue_seeded(&h, 1e-10, seed)?
    };
    println!("lambda_min = {}", fmt_f64(result.lambda_min));
    println!("residual = {}", fmt_f64(result.residual));
    Ok(0)
}

/// Proof vector file: one `re,im` line per amplitude, 2^m lines total.
fn load_proof(path: &PathBuf, proof_qubits: usize) -> Result<StateVector, Error> {
    let text = fs::read_to_string(path)?;
    let (state, norm) = parse_state_vector(&text, proof_qubits)?;
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: proof vector norm was {norm:.9}; normalized on load");
    }
    Ok(state)
}

fn cmd_verify(
    circuit_path: &PathBuf,
    complete: Option<PathBuf>,
    sound: bool,
    epsilon: f64,
    penalty_exponent: u32,
    common: &CommonOpts,
) -> Result<u8, Error> {
    check_common(common)?;
    if complete.is_none() && !sound {
        return Err(Error::Parse(
            "choose --complete <proof-file> or --sound".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0 / 3.0) {
        return Err(Error::Parse(format!(
            "--epsilon must lie in (0, 1/3], got {epsilon}"
        )));
    }
    let circuit = load_circuit(circuit_path)?;
    let params = params_with(penalty_exponent, Mode::ThreeLocal)?;
    let id = circuit_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());

    let report = match complete {
        Some(proof_path) => {
            let proof = load_proof(&proof_path, circuit.proof_qubits())?;
            verify_completeness(&id, &circuit, &proof, epsilon, &params)?
        }
        None => verify_soundness(&id, &circuit, epsilon, &params)?,
    };
    emit(common, &report.to_text())?;
    if common.out.is_some() {
        println!("{}", report.summary());
    }
    Ok(match report.verdict {
        Verdict::CompleteOk | Verdict::SoundOk => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::PromiseViolated => EXIT_PROMISE,
    })
}

fn cmd_sat2ham(dimacs_path: &PathBuf, common: &CommonOpts) -> Result<u8, Error> {
    check_common(common)?;
    let text = fs::read_to_string(dimacs_path)?;
    let (vars, clauses) = parse_dimacs(&text)?;
    let h = sat_to_hamiltonian(&clauses, vars)?;
    emit(common, &write_interchange(&h))?;
    Ok(0)
}

fn cmd_angle(circuit_path: &PathBuf) -> Result<u8, Error> {
    let circuit = load_circuit(circuit_path)?;
    let (cos_theta, sin2_theta_t) = angle_diagnostic(&circuit)?;
    println!("cos_theta = {}", fmt_f64(cos_theta));
    println!("sin2_theta_T = {}", fmt_f64(sin2_theta_t));
    Ok(0)
}

