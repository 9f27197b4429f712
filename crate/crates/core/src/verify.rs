//! Certify the completeness and soundness bounds on concrete instances and
//! produce machine-readable reports.
//!
//! For an accepting circuit the history state must push the ground energy
//! of the 3-local instance below `eps/(T+1)`; for a rejecting circuit the
//! ground energy must stay within `9/T^4` of the reference construction's,
//! whose positive gap is reported as `c_est = lambda_min(ref) * T^3`.

use std::fmt;

use nalgebra::DMatrix;

use crate::circuit::{acceptance_probability, optimal_acceptance, Circuit, StateVector};
use crate::linalg::max_abs_entry;
use crate::operators::{assemble, term_norm, LocalHamiltonian, TermGroup};
use crate::reduction::{
    build_3local, build_reference, compress_legal, history_state_unary, is_unary_clock,
    ReductionParams,
};
use crate::spectra::{
    dense_min_eigenvalue, min_eigenvalue, nullspace_basis, principal_angle, rayleigh,
    NULLSPACE_TOL,
};
use crate::{fmt_f64, Error, Result};

const PASS_TOL_TIGHT: f64 = 1e-10;
const PASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CompleteOk,
    SoundOk,
    Fail,
    PromiseViolated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::CompleteOk => "complete-ok",
            Verdict::SoundOk => "sound-ok",
            Verdict::Fail => "fail",
            Verdict::PromiseViolated => "promise-violated",
        };
        write!(f, "{s}")
    }
}

/// Measured spectral quantities of one instance against the bounds they
/// must satisfy.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub instance_id: String,
    pub mode: String,
    pub n_qubits: usize,
    pub proof_qubits: usize,
    pub steps: usize,
    pub epsilon: f64,
    pub p_max: f64,
    pub lambda_min_3local: f64,
    pub lambda_min_reference: f64,
    /// Completeness threshold `epsilon / (T+1)`.
    pub a: f64,
    /// `lambda_min(3local) - (lambda_min(ref) - 9/T^4)`.
    pub chain_slack: f64,
    /// `lambda_min(ref) * T^3`; the soundness constant is existential, so
    /// it is reported rather than thresholded.
    pub c_est: f64,
    pub sin2_theta_t: f64,
    pub penalty_floor_ok: bool,
    pub equivalence_maxdiff: f64,
    pub verdict: Verdict,
}

impl VerificationReport {
    /// One `key = value` line per field.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("instance_id = {}\n", self.instance_id));
        out.push_str(&format!("mode = {}\n", self.mode));
        out.push_str(&format!("N = {}\n", self.n_qubits));
        out.push_str(&format!("m = {}\n", self.proof_qubits));
        out.push_str(&format!("T = {}\n", self.steps));
        out.push_str(&format!("epsilon = {}\n", fmt_f64(self.epsilon)));
        out.push_str(&format!("p_max = {}\n", fmt_f64(self.p_max)));
        out.push_str(&format!(
            "lambda_min_3local = {}\n",
            fmt_f64(self.lambda_min_3local)
        ));
        out.push_str(&format!(
            "lambda_min_reference = {}\n",
            fmt_f64(self.lambda_min_reference)
        ));
        out.push_str(&format!("a = {}\n", fmt_f64(self.a)));
        out.push_str(&format!("chain_slack = {}\n", fmt_f64(self.chain_slack)));
        out.push_str(&format!("c_est = {}\n", fmt_f64(self.c_est)));
        out.push_str(&format!("sin2_theta_T = {}\n", fmt_f64(self.sin2_theta_t)));
        out.push_str(&format!("penalty_floor_ok = {}\n", self.penalty_floor_ok));
        out.push_str(&format!(
            "equivalence_maxdiff = {}\n",
            fmt_f64(self.equivalence_maxdiff)
        ));
        out.push_str(&format!("verdict = {}\n", self.verdict));
        out
    }

    /// Single-line machine summary.
    pub fn summary(&self) -> String {
        format!(
            "{} verdict={} N={} m={} T={} lambda3={} lambdaref={} c_est={}",
            self.instance_id,
            self.verdict,
            self.n_qubits,
            self.proof_qubits,
            self.steps,
            fmt_f64(self.lambda_min_3local),
            fmt_f64(self.lambda_min_reference),
            fmt_f64(self.c_est)
        )
    }
}

/// Everything both verifiers need: spectra of both constructions, the
/// basis-renaming equivalence defect, clock audit, and null-space angle.
struct InstanceAnalysis {
    dense3: DMatrix<crate::linalg::C64>,
    lambda3: f64,
    lambda_ref: f64,
    equivalence_maxdiff: f64,
    penalty_floor_ok: bool,
    sin2_theta_t: f64,
}

fn analyze(circuit: &Circuit, params: &ReductionParams) -> Result<InstanceAnalysis> {
    let steps = circuit.steps();
    let h3 = build_3local(circuit, params)?;
    let dense3 = assemble(&h3)?;
    let lambda3 = dense_min_eigenvalue(&dense3)?.lambda_min;

    let reference = build_reference(circuit)?;
    let lambda_ref = dense_min_eigenvalue(&reference.total())?.lambda_min;

    let comp = h3.group_subset(&[TermGroup::In, TermGroup::Out, TermGroup::Prop]);
    let compressed = compress_legal(&assemble(&comp)?, circuit.n_qubits(), steps)?;
    let equivalence_maxdiff = max_abs_entry(&(compressed - reference.total()));

    let penalty = params.penalty_weight(steps)?;
    let audit = clock_penalty_audit(&h3, steps, penalty)?;

    let (_, sin2_theta_t) = angle_diagnostic(circuit)?;

    Ok(InstanceAnalysis {
        dense3,
        lambda3,
        lambda_ref,
        equivalence_maxdiff,
        penalty_floor_ok: audit.passed(),
        sin2_theta_t,
    })
}

fn base_report(
    id: &str,
    circuit: &Circuit,
    epsilon: f64,
    p_max: f64,
    analysis: &InstanceAnalysis,
) -> VerificationReport {
    let steps = circuit.steps();
    let t4 = (steps as f64).powi(4);
    VerificationReport {
        instance_id: id.to_string(),
        mode: "3local".to_string(),
        n_qubits: circuit.n_qubits(),
        proof_qubits: circuit.proof_qubits(),
        steps,
        epsilon,
        p_max,
        lambda_min_3local: analysis.lambda3,
        lambda_min_reference: analysis.lambda_ref,
        a: epsilon / (steps as f64 + 1.0),
        chain_slack: analysis.lambda3 - (analysis.lambda_ref - 9.0 / t4),
        c_est: analysis.lambda_ref * (steps as f64).powi(3),
        sin2_theta_t: analysis.sin2_theta_t,
        penalty_floor_ok: analysis.penalty_floor_ok,
        equivalence_maxdiff: analysis.equivalence_maxdiff,
        verdict: Verdict::Fail,
    }
}

/// Check the accepting-side bound: with a witness proof accepted with
/// probability above `1 - epsilon`, both the history-state energy and the
/// ground energy of the 3-local instance must be at most `epsilon/(T+1)`.
pub fn verify_completeness(
    id: &str,
    circuit: &Circuit,
    proof: &StateVector,
    epsilon: f64,
    params: &ReductionParams,
) -> Result<VerificationReport> {
    validate_epsilon(epsilon)?;
    let analysis = analyze(circuit, params)?;
    let (p_max, _) = optimal_acceptance(circuit)?;
    let mut report = base_report(id, circuit, epsilon, p_max, &analysis);

    let p_acc = acceptance_probability(circuit, proof)?;
    if !(p_acc > 1.0 - epsilon) {
        report.verdict = Verdict::PromiseViolated;
        return Ok(report);
    }
    let eta = history_state_unary(circuit, proof)?;
    let energy = rayleigh(&analysis.dense3, eta.amplitudes())?;
    let bound = report.a + PASS_TOL_TIGHT;
    report.verdict = if energy <= bound && analysis.lambda3 <= bound {
        Verdict::CompleteOk
    } else {
        Verdict::Fail
    };
    Ok(report)
}

/// Check the rejecting-side chain: with every proof accepted with
/// probability below `epsilon`, the reference ground energy must be
/// positive and the 3-local ground energy within `9/T^4` of it.
pub fn verify_soundness(
    id: &str,
    circuit: &Circuit,
    epsilon: f64,
    params: &ReductionParams,
) -> Result<VerificationReport> {
    validate_epsilon(epsilon)?;
    let analysis = analyze(circuit, params)?;
    let (p_max, _) = optimal_acceptance(circuit)?;
    let mut report = base_report(id, circuit, epsilon, p_max, &analysis);

    if p_max >= epsilon {
        report.verdict = Verdict::PromiseViolated;
        return Ok(report);
    }
    let steps = circuit.steps() as f64;
    let floor = (analysis.lambda_ref - 9.0 / steps.powi(4)).min(1.0);
    report.verdict = if analysis.lambda3 >= floor - PASS_TOL && analysis.lambda_ref > 0.0 {
        Verdict::SoundOk
    } else {
        Verdict::Fail
    };
    Ok(report)
}

fn validate_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0 / 3.0) {
        return Err(Error::Invalid(format!(
            "epsilon must lie in (0, 1/3], got {epsilon}"
        )));
    }
    Ok(())
}

/// Deviation between the history-state energy and `(1 - p_acc)/(T+1)`.
/// The input, propagation, and clock parts all annihilate the history
/// state, so only the output check contributes.
pub fn energy_identity_check(
    circuit: &Circuit,
    proof: &StateVector,
    params: &ReductionParams,
) -> Result<f64> {
    let h3 = build_3local(circuit, params)?;
    let dense = assemble(&h3)?;
    let eta = history_state_unary(circuit, proof)?;
    let energy = rayleigh(&dense, eta.amplitudes())?;
    let p_acc = acceptance_probability(circuit, proof)?;
    let expected = (1.0 - p_acc) / (circuit.steps() as f64 + 1.0);
    Ok((energy - expected).abs())
}

/// Outcome of the clock-penalty audit.
#[derive(Debug, Clone)]
pub struct ClockAudit {
    /// Every illegal clock basis state has penalty energy >= the weight.
    pub illegal_floor_ok: bool,
    /// Every legal clock basis state has exactly zero penalty energy.
    pub legal_zero_ok: bool,
    /// Sum of computation-term spectral norms.
    pub comp_norm_sum: f64,
    /// `comp_norm_sum <= 4T`; only claimed when `T >= N`.
    pub norm_bound_ok: Option<bool>,
}

impl ClockAudit {
    pub fn passed(&self) -> bool {
        self.illegal_floor_ok && self.legal_zero_ok && self.norm_bound_ok.unwrap_or(true)
    }
}

/// Audit the clock penalty floor and the computation-term norm budget of a
/// 3-local instance with `T` clock qubits.
pub fn clock_penalty_audit(
    h: &LocalHamiltonian,
    steps: usize,
    penalty: f64,
) -> Result<ClockAudit> {
    if steps == 0 || steps > h.n_qubits() {
        return Err(Error::Invalid(format!(
            "step count {steps} inconsistent with {} qubits",
            h.n_qubits()
        )));
    }
    let n_comp = h.n_qubits() - steps;
    let clock_terms: Vec<_> = h
        .terms()
        .iter()
        .filter(|t| t.label().group == TermGroup::Clock)
        .collect();

    let mut illegal_floor_ok = true;
    let mut legal_zero_ok = true;
    for clock_bits in 0..(1usize << steps) {
        let basis = clock_bits << n_comp;
        let energy: f64 = clock_terms.iter().map(|t| t.diagonal_energy(basis)).sum();
        if is_unary_clock(clock_bits, steps) {
            if energy != 0.0 {
                legal_zero_ok = false;
            }
        } else if energy < penalty {
            illegal_floor_ok = false;
        }
    }

    let comp_norm_sum: f64 = h
        .terms()
        .iter()
        .filter(|t| {
            matches!(
                t.label().group,
                TermGroup::In | TermGroup::Out | TermGroup::Prop
            )
        })
        .map(term_norm)
        .sum();
    let norm_bound_ok = if steps >= n_comp {
        Some(comp_norm_sum <= 4.0 * steps as f64 + 1e-12)
    } else {
        None
    };

    Ok(ClockAudit {
        illegal_floor_ok,
        legal_zero_ok,
        comp_norm_sum,
        norm_bound_ok,
    })
}

/// Principal angle between the null spaces of the reference input/output
/// checks and the reference propagation term. Returns
/// `(cos theta, sin^2 theta * T)`.
pub fn angle_diagnostic(circuit: &Circuit) -> Result<(f64, f64)> {
    let reference = build_reference(circuit)?;
    let checks_null = nullspace_basis(&reference.checks(), NULLSPACE_TOL)?;
    let prop_null = nullspace_basis(&reference.propagation, NULLSPACE_TOL)?;
    let cos_theta = principal_angle(&checks_null, &prop_null)?;
    let sin2 = (1.0 - cos_theta * cos_theta).max(0.0);
    Ok((cos_theta, sin2 * circuit.steps() as f64))
}

/// Decision outcome for a promise instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Some eigenvalue is at most `a`.
    Yes,
    /// All eigenvalues exceed `b`.
    No,
    /// The measured ground energy landed strictly between the thresholds.
    PromiseViolated,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Yes => write!(f, "1"),
            Decision::No => write!(f, "0"),
            Decision::PromiseViolated => write!(f, "promise-violated"),
        }
    }
}

/// Decide whether the ground energy is at most `a` (yes) or above `b` (no).
pub fn decide(h: &LocalHamiltonian, a: f64, b: f64) -> Result<Decision> {
    if !(b - a > 0.0) {
        return Err(Error::Invalid(format!(
            "thresholds need b - a > 0, got a={a}, b={b}"
        )));
    }
    let lambda = min_eigenvalue(h, 1e-10)?.lambda_min;
    if lambda <= a + PASS_TOL {
        Ok(Decision::Yes)
    } else if lambda > b - PASS_TOL {
        Ok(Decision::No)
    } else {
        Ok(Decision::PromiseViolated)
    }
}
