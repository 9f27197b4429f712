//! Verifier circuits: representation, text format, exact statevector
//! simulation, and the dense acceptance oracle.
//!
//! A circuit acts on `N` computation qubits; the proof occupies qubits
//! `0..m` (so qubit 0, the output qubit, is part of the proof register) and
//! the ancillas `m..N` start in `|0>`. Acceptance means measuring `1` on
//! qubit 0 after all gates ran.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::linalg::{self, c, cr, C64};
use crate::{Error, Result};

const UNITARY_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;

/// Largest proof register the dense acceptance oracle will diagonalize.
pub const MAX_ORACLE_PROOF_QUBITS: usize = 12;

/// Largest simulated register; keeps statevectors comfortably in memory.
pub const MAX_CIRCUIT_QUBITS: usize = 24;

/// A single 1- or 2-qubit unitary gate.
///
/// The matrix is indexed little-endian over the target list: the first
/// listed target is the least significant local bit.
#[derive(Debug, Clone)]
pub struct Gate {
    name: String,
    targets: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl Gate {
    pub fn new(name: impl Into<String>, targets: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let arity = targets.len();
        if arity == 0 || arity > 2 {
            return Err(Error::Invalid(format!(
                "gate must act on 1 or 2 qubits, got {arity}"
            )));
        }
        if arity == 2 && targets[0] == targets[1] {
            return Err(Error::Invalid("gate targets must be distinct".into()));
        }
        let dim = 1usize << arity;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Invalid(format!(
                "gate matrix must be {dim}x{dim} for {arity} target(s)"
            )));
        }
        let defect = linalg::unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::Invalid(format!(
                "gate matrix is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(Gate {
            name: name.into(),
            targets,
            matrix,
        })
    }

    /// Built-in gate by name: I, X, Y, Z, H, S, TG (pi/8), CNOT, CZ.
    pub fn named(name: &str, targets: &[usize]) -> Result<Self> {
        let (matrix, arity) = builtin_matrix(name)
            .ok_or_else(|| Error::Parse(format!("unknown gate name '{name}'")))?;
        if targets.len() != arity {
            return Err(Error::Parse(format!(
                "gate {name} takes {arity} target(s), got {}",
                targets.len()
            )));
        }
        Gate::new(name, targets.to_vec(), matrix)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }
}

fn builtin_matrix(name: &str) -> Option<(DMatrix<C64>, usize)> {
    let h = FRAC_1_SQRT_2;
    let m = match name {
        "I" => DMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(1.0)]),
        "X" => DMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]),
        "Y" => DMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)]),
        "Z" => DMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]),
        "H" => DMatrix::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)]),
        "S" => DMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), c(0.0, 1.0)]),
        "TG" => {
            let p = std::f64::consts::FRAC_PI_4;
            DMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), c(p.cos(), p.sin())])
        }
        // control is the first listed target (local bit 0)
        "CNOT" => {
            let mut m = DMatrix::from_element(4, 4, cr(0.0));
            m[(0, 0)] = cr(1.0);
            m[(2, 2)] = cr(1.0);
            m[(3, 1)] = cr(1.0);
            m[(1, 3)] = cr(1.0);
            m
        }
        "CZ" => {
            let mut m = DMatrix::identity(4, 4);
            m[(3, 3)] = cr(-1.0);
            m
        }
        _ => return None,
    };
    let arity = if m.nrows() == 2 { 1 } else { 2 };
    Some((m, arity))
}

/// Verifier circuit: `N` computation qubits, `m` proof qubits, gate list in
/// application order (`gates[0]` runs first).
#[derive(Debug, Clone)]
pub struct Circuit {
    n_qubits: usize,
    proof_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, proof_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Invalid("circuit needs at least one qubit".into()));
        }
        if n_qubits > MAX_CIRCUIT_QUBITS {
            return Err(Error::DimensionGuard(format!(
                "{n_qubits} qubits exceeds the {MAX_CIRCUIT_QUBITS}-qubit simulator cap"
            )));
        }
        if proof_qubits == 0 || proof_qubits > n_qubits {
            return Err(Error::Invalid(format!(
                "proof register must satisfy 1 <= m <= N (m={proof_qubits}, N={n_qubits})"
            )));
        }
        if gates.is_empty() {
            return Err(Error::Invalid("circuit needs at least one gate".into()));
        }
        for g in &gates {
            if let Some(&q) = g.targets().iter().find(|&&q| q >= n_qubits) {
                return Err(Error::Invalid(format!(
                    "gate {} targets qubit {q}, but the circuit has {n_qubits} qubits",
                    g.name()
                )));
            }
        }
        Ok(Circuit {
            n_qubits,
            proof_qubits,
            gates,
        })
    }

    /// Total computation qubit count `N`.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Proof qubit count `m`.
    pub fn proof_qubits(&self) -> usize {
        self.proof_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.n_qubits - self.proof_qubits
    }

    /// Gate count `T`.
    pub fn steps(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// The clock constructions assume `T >= N`; they stay well defined
    /// without it, so this is surfaced as a note rather than enforced.
    pub fn meets_time_assumption(&self) -> bool {
        self.steps() >= self.n_qubits
    }
}

/// Normalized pure state on `n` qubits.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(n: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n {
            return Err(Error::Invalid(format!(
                "state on {n} qubit(s) needs {} amplitudes, got {}",
                1usize << n,
                amplitudes.len()
            )));
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Invalid(format!(
                "state is not normalized (|norm^2 - 1| = {:.3e})",
                (norm_sq - 1.0).abs()
            )));
        }
        Ok(StateVector { n, amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::Invalid(format!(
                "basis index {index} out of range for {n} qubit(s)"
            )));
        }
        let mut amps = DVector::from_element(dim, cr(0.0));
        amps[index] = cr(1.0);
        StateVector::new(n, amps)
    }

    /// Normalize arbitrary amplitudes; returns the state and the original
    /// norm so callers can warn about denormalized input.
    pub fn normalized(n: usize, amplitudes: DVector<C64>) -> Result<(Self, f64)> {
        let norm = amplitudes.norm();
        if norm < 1e-12 {
            return Err(Error::Invalid("cannot normalize a zero vector".into()));
        }
        let state = StateVector::new(n, amplitudes / cr(norm))?;
        Ok((state, norm))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }
}

/// Parse the circuit text format: `qubits <N>`, `proof <m>`, then one gate
/// per line (`X 0`, `CNOT 0 1`, or explicit `U1`/`U2` with row-major
/// `re im` float pairs). `#` starts a comment.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut n_qubits: Option<usize> = None;
    let mut proof_qubits: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let head = tokens[0];
        match head {
            "qubits" => {
                if n_qubits.is_some() {
                    return Err(Error::Parse(format!("line {line_no}: duplicate 'qubits'")));
                }
                n_qubits = Some(parse_usize(tokens.get(1), line_no, "qubit count")?);
            }
            "proof" => {
                if proof_qubits.is_some() {
                    return Err(Error::Parse(format!("line {line_no}: duplicate 'proof'")));
                }
                proof_qubits = Some(parse_usize(tokens.get(1), line_no, "proof count")?);
            }
            "U1" | "U2" => {
                let arity = if head == "U1" { 1 } else { 2 };
                let dim = 1usize << arity;
                let want = arity + 2 * dim * dim;
                if tokens.len() != 1 + want {
                    return Err(Error::Parse(format!(
                        "line {line_no}: {head} needs {arity} target(s) and {} floats",
                        2 * dim * dim
                    )));
                }
                let targets: Vec<usize> = tokens[1..=arity]
                    .iter()
                    .map(|t| parse_usize(Some(t), line_no, "target"))
                    .collect::<Result<_>>()?;
                let floats: Vec<f64> = tokens[1 + arity..]
                    .iter()
                    .map(|t| {
                        t.parse::<f64>().map_err(|_| {
                            Error::Parse(format!("line {line_no}: bad float '{t}'"))
                        })
                    })
                    .collect::<Result<_>>()?;
                let mut entries = Vec::with_capacity(dim * dim);
                for pair in floats.chunks(2) {
                    entries.push(c(pair[0], pair[1]));
                }
                let matrix = DMatrix::from_row_slice(dim, dim, &entries);
                let gate = Gate::new(head, targets, matrix)
                    .map_err(|e| Error::Parse(format!("line {line_no}: {e}")))?;
                gates.push(gate);
            }
            name => {
                let targets: Vec<usize> = tokens[1..]
                    .iter()
                    .map(|t| parse_usize(Some(t), line_no, "target"))
                    .collect::<Result<_>>()?;
                let gate = Gate::named(name, &targets)
                    .map_err(|e| Error::Parse(format!("line {line_no}: {e}")))?;
                gates.push(gate);
            }
        }
    }

    let n = n_qubits.ok_or_else(|| Error::Parse("missing 'qubits <N>' line".into()))?;
    let m = proof_qubits.ok_or_else(|| Error::Parse("missing 'proof <m>' line".into()))?;
    Circuit::new(n, m, gates).map_err(|e| match e {
        Error::Invalid(msg) => Error::Parse(msg),
        other => other,
    })
}

fn parse_usize(token: Option<&&str>, line_no: usize, what: &str) -> Result<usize> {
    let t = token.ok_or_else(|| Error::Parse(format!("line {line_no}: missing {what}")))?;
    t.parse::<usize>()
        .map_err(|_| Error::Parse(format!("line {line_no}: bad {what} '{t}'")))
}

/// Parse a state-vector text file: one `re,im` line per amplitude, `2^n`
/// lines total, `#` comments allowed. The vector is normalized on load;
/// the original norm is returned so callers can warn when it was off.
pub fn parse_state_vector(text: &str, n_qubits: usize) -> Result<(StateVector, f64)> {
    let mut amps: Vec<C64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected 're,im'", idx + 1)))?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad amplitude '{re}'", idx + 1)))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad amplitude '{im}'", idx + 1)))?;
        amps.push(c(re, im));
    }
    let expect = 1usize << n_qubits;
    if amps.len() != expect {
        return Err(Error::Parse(format!(
            "state file has {} amplitude(s), expected {expect} for {n_qubits} qubit(s)",
            amps.len()
        )));
    }
    StateVector::normalized(n_qubits, DVector::from_vec(amps))
}

/// Run the circuit on `proof (x) |0..0>` and return the final state.
pub fn run_circuit(circuit: &Circuit, proof: &StateVector) -> Result<StateVector> {
    if proof.n_qubits() != circuit.proof_qubits() {
        return Err(Error::Invalid(format!(
            "proof has {} qubit(s), circuit expects {}",
            proof.n_qubits(),
            circuit.proof_qubits()
        )));
    }
    let n = circuit.n_qubits();
    let mut state = DVector::from_element(1usize << n, cr(0.0));
    // proof occupies the low bits; ancillas (high bits) start at zero
    for (i, amp) in proof.amplitudes().iter().enumerate() {
        state[i] = *amp;
    }
    for gate in circuit.gates() {
        state = linalg::apply_local(&state, gate.matrix(), gate.targets(), n);
    }
    StateVector::new(n, state)
}

/// Dense unitary of the whole circuit, `U_T .. U_1`, on `2^N`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<C64>> {
    let n = circuit.n_qubits();
    if n > crate::DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "dense circuit unitary on {n} qubits exceeds the {}-qubit cap",
            crate::DENSE_QUBIT_LIMIT
        )));
    }
    let dim = 1usize << n;
    let mut u = DMatrix::<C64>::identity(dim, dim);
    for gate in circuit.gates() {
        u = linalg::embed_local(gate.matrix(), gate.targets(), n) * u;
    }
    Ok(u)
}

/// Probability that measuring the output qubit after the run yields 1.
pub fn acceptance_probability(circuit: &Circuit, proof: &StateVector) -> Result<f64> {
    let out = run_circuit(circuit, proof)?;
    let mut p = 0.0;
    for (i, amp) in out.amplitudes().iter().enumerate() {
        if i & 1 == 1 {
            p += amp.norm_sqr();
        }
    }
    Ok(p)
}

/// Largest acceptance probability over all proofs, with a maximizing proof.
///
/// Diagonalizes the acceptance operator `A = W^dag P1 W` where column `y` of
/// `W` is the circuit output on basis proof `|y>` and `P1` projects the
/// output qubit onto `|1>`. `A` is Hermitian with spectrum in `[0, 1]`.
pub fn optimal_acceptance(circuit: &Circuit) -> Result<(f64, StateVector)> {
    let m = circuit.proof_qubits();
    if m > MAX_ORACLE_PROOF_QUBITS {
        return Err(Error::DimensionGuard(format!(
            "acceptance oracle is dense; proof register of {m} qubits exceeds \
             the {MAX_ORACLE_PROOF_QUBITS}-qubit cap"
        )));
    }
    let dim_m = 1usize << m;
    let mut outputs: Vec<DVector<C64>> = Vec::with_capacity(dim_m);
    for y in 0..dim_m {
        let proof = StateVector::basis(m, y)?;
        outputs.push(run_circuit(circuit, &proof)?.amplitudes().clone());
    }
    let mut acceptance = DMatrix::from_element(dim_m, dim_m, cr(0.0));
    for x in 0..dim_m {
        for y in 0..dim_m {
            let mut acc = cr(0.0);
            for z in (1..outputs[x].len()).step_by(2) {
                acc += outputs[x][z].conj() * outputs[y][z];
            }
            acceptance[(x, y)] = acc;
        }
    }
    let eig = SymmetricEigen::new(acceptance);
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let p_max = eig.eigenvalues[best].clamp(0.0, 1.0);
    let column = eig.eigenvectors.column(best).clone_owned();
    let (proof, _) = StateVector::normalized(m, column)?;
    Ok((p_max, proof))
}
