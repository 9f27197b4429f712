//! The two circuit-to-Hamiltonian compilers plus supporting machinery.
//!
//! `build_3local` emits a local-term instance on `N + T` qubits whose clock
//! is a unary register: step `t` (1-based) lives on global qubit `N + t - 1`
//! and the legal clock states are `|1..1 0..0>`. Illegal patterns are
//! penalized by pair projectors `|01><01|` with weight `T^penalty_exponent`.
//!
//! `build_reference` emits the same checks on the `2^N (T+1)`-dimensional
//! space with an explicit clock factor `|t>`, `t = 0..T`. Restricting the
//! 3-local computation terms to the legal subspace and renaming the basis
//! (`compress_legal`) reproduces the reference operator entry for entry.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::circuit::{Circuit, StateVector};
use crate::linalg::{cr, C64};
use crate::operators::{LocalHamiltonian, LocalTerm, TermGroup, TermLabel};
use crate::{Error, Result, DENSE_QUBIT_LIMIT, MAX_QUBITS};

/// Default exponent of the illegal-clock penalty weight `T^12`.
pub const DEFAULT_PENALTY_EXPONENT: u32 = 12;

/// Which construction to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ThreeLocal,
    Reference,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::ThreeLocal => write!(f, "3local"),
            Mode::Reference => write!(f, "reference"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3local" => Ok(Mode::ThreeLocal),
            "reference" => Ok(Mode::Reference),
            _ => Err(Error::Parse(format!(
                "unknown mode '{s}' (expected '3local' or 'reference')"
            ))),
        }
    }
}

/// Compilation parameters. The clock penalty weight is
/// `T^penalty_exponent` unless overridden.
#[derive(Debug, Clone)]
pub struct ReductionParams {
    pub mode: Mode,
    pub penalty_exponent: u32,
    pub penalty_override: Option<f64>,
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams {
            mode: Mode::ThreeLocal,
            penalty_exponent: DEFAULT_PENALTY_EXPONENT,
            penalty_override: None,
        }
    }
}

impl ReductionParams {
    pub fn with_penalty_exponent(exponent: u32) -> Self {
        ReductionParams {
            penalty_exponent: exponent,
            ..Default::default()
        }
    }

    /// Effective clock penalty weight for a `T`-step circuit.
    pub fn penalty_weight(&self, steps: usize) -> Result<f64> {
        if self.penalty_exponent == 0 {
            return Err(Error::Invalid("penalty exponent must be >= 1".into()));
        }
        let w = match self.penalty_override {
            Some(w) => w,
            None => (steps as f64).powi(self.penalty_exponent as i32),
        };
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Invalid(format!(
                "clock penalty weight must be positive and finite, got {w}"
            )));
        }
        Ok(w)
    }
}

/// Legal clock value `t` out of `T` steps, encoded as `t` ones then zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockState {
    t: usize,
    steps: usize,
}

impl ClockState {
    pub fn new(t: usize, steps: usize) -> Result<Self> {
        if t > steps {
            return Err(Error::Invalid(format!(
                "clock value {t} out of range for {steps} step(s)"
            )));
        }
        Ok(ClockState { t, steps })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// The unary pattern as an integer over the `T` clock bits.
    pub fn unary_bits(&self) -> usize {
        (1usize << self.t) - 1
    }

    /// Full-register basis index with computation part `x` on `n_comp`
    /// qubits.
    pub fn basis_index(&self, x: usize, n_comp: usize) -> usize {
        x | (self.unary_bits() << n_comp)
    }
}

/// Whether `clock_bits` (an integer over `T` clock bits) is a legal unary
/// pattern `1..1 0..0`.
pub fn is_unary_clock(clock_bits: usize, steps: usize) -> bool {
    debug_assert!(clock_bits < (1usize << steps) || steps == 0);
    (clock_bits + 1).is_power_of_two()
}

fn projector(dim: usize, index: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(dim, dim, cr(0.0));
    m[(index, index)] = cr(1.0);
    m
}

/// `|10><10|` on an ascending clock-qubit pair: first qubit 1, second 0.
fn pair_10() -> DMatrix<C64> {
    projector(4, 0b01)
}

/// `|01><01|` on an ascending clock-qubit pair: first qubit 0, second 1.
fn pair_01() -> DMatrix<C64> {
    projector(4, 0b10)
}

/// `|1><1|` on one qubit.
fn one_1() -> DMatrix<C64> {
    projector(2, 1)
}

/// `|0><0|` on one qubit.
fn one_0() -> DMatrix<C64> {
    projector(2, 0)
}

/// Hopping block `-(U (x) |1><0|_clock + U^dag (x) |0><1|_clock)` with the
/// clock qubit as the most significant local bit. Hermitian by symmetry.
fn hopping_matrix(gate_matrix: &DMatrix<C64>) -> DMatrix<C64> {
    let g = gate_matrix.nrows();
    let mut m = DMatrix::from_element(2 * g, 2 * g, cr(0.0));
    for r in 0..g {
        for c in 0..g {
            m[(r + g, c)] = -gate_matrix[(r, c)];
            m[(c, r + g)] = -gate_matrix[(r, c)].conj();
        }
    }
    m
}

/// Compile a circuit into the 3-local unary-clock instance on `N + T`
/// qubits.
///
/// Term census, in emitted order:
/// * `in`: one 2-local term `|1>_i<1| (x) |0>_clock1<0|` per ancilla,
/// * `out`: one 2-local term `|0>_out<0| (x) |1>_clockT<1|`,
/// * `prop`: per step `t` the clock projector parts (weight 1/2) and one
///   Hermitian hopping term (weight 1/2); boundary steps use single-qubit
///   clock projectors, interior ones the `|10><10|` pairs. For `T = 1` the
///   two boundary forms merge into `1/2 (I - U (x) |1><0| - h.c.)`, stored
///   as an identity part plus the hopping part,
/// * `clock`: `|01>_ij<01|` with the penalty weight, pairs in lexicographic
///   order.
pub fn build_3local(circuit: &Circuit, params: &ReductionParams) -> Result<LocalHamiltonian> {
    let n_comp = circuit.n_qubits();
    let m = circuit.proof_qubits();
    let steps = circuit.steps();
    let n = n_comp + steps;
    if n > MAX_QUBITS {
        return Err(Error::DimensionGuard(format!(
            "instance needs {n} qubits, exceeding the {MAX_QUBITS}-qubit cap"
        )));
    }
    let penalty = params.penalty_weight(steps)?;
    let clock = |t: usize| n_comp + t - 1; // clock step t is 1-based

    let mut terms: Vec<LocalTerm> = Vec::new();

    // ancilla checks: qubit i must be |0> at clock time 0
    for i in m..n_comp {
        let term = LocalTerm::from_unsorted(
            TermLabel::new(TermGroup::In, i),
            &[i, clock(1)],
            &embed_pair(&one_1(), &one_0()),
            1.0,
        )?;
        terms.push(term);
    }

    // output check: qubit 0 must not be |0> at clock time T
    terms.push(LocalTerm::from_unsorted(
        TermLabel::new(TermGroup::Out, 0),
        &[0, clock(steps)],
        &embed_pair(&one_0(), &one_1()),
        1.0,
    )?);

    // propagation checks
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let t = idx + 1;
        let label = TermLabel::new(TermGroup::Prop, t);
        if steps == 1 {
            // merged boundary form: 1/2 (I - U (x) |1><0| - h.c.)
            terms.push(LocalTerm::new(
                label,
                vec![clock(1)],
                DMatrix::identity(2, 2),
                0.5,
            )?);
        } else if t == 1 {
            terms.push(LocalTerm::from_unsorted(
                label,
                &[clock(1), clock(2)],
                &pair_10(),
                0.5,
            )?);
            terms.push(LocalTerm::new(label, vec![clock(1)], one_0(), 0.5)?);
        } else if t == steps {
            terms.push(LocalTerm::new(label, vec![clock(steps)], one_1(), 0.5)?);
            terms.push(LocalTerm::from_unsorted(
                label,
                &[clock(steps - 1), clock(steps)],
                &pair_10(),
                0.5,
            )?);
        } else {
            terms.push(LocalTerm::from_unsorted(
                label,
                &[clock(t), clock(t + 1)],
                &pair_10(),
                0.5,
            )?);
            terms.push(LocalTerm::from_unsorted(
                label,
                &[clock(t - 1), clock(t)],
                &pair_10(),
                0.5,
            )?);
        }
        // hopping on the gate targets plus clock qubit t (clock index is
        // always the largest, so it stays the top local bit after sorting)
        let mut targets: Vec<usize> = gate.targets().to_vec();
        targets.push(clock(t));
        terms.push(LocalTerm::from_unsorted(
            label,
            &targets,
            &hopping_matrix(gate.matrix()),
            0.5,
        )?);
    }

    // illegal-clock penalties
    let mut pair_index = 0usize;
    for i in 1..=steps {
        for j in (i + 1)..=steps {
            terms.push(LocalTerm::from_unsorted(
                TermLabel::new(TermGroup::Clock, pair_index),
                &[clock(i), clock(j)],
                &pair_01(),
                penalty,
            )?);
            pair_index += 1;
        }
    }

    LocalHamiltonian::new(n, terms, None)
}

/// Local matrix `a (x) b` on an ascending 2-qubit support (first support
/// qubit is local bit 0 and carries `a`).
fn embed_pair(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(4, 4, cr(0.0));
    for ra in 0..2 {
        for ca in 0..2 {
            for rb in 0..2 {
                for cb in 0..2 {
                    m[(ra + 2 * rb, ca + 2 * cb)] = a[(ra, ca)] * b[(rb, cb)];
                }
            }
        }
    }
    m
}

/// Reference construction on the `2^N (T+1)`-dimensional space, basis index
/// `t * 2^N + x` (clock blocks ordered by `t`). Kept in parts so the
/// null-space diagnostics can look at `H_in + H_out` and `H_prop`
/// separately.
#[derive(Debug, Clone)]
pub struct ReferenceHamiltonian {
    pub input: DMatrix<C64>,
    pub output: DMatrix<C64>,
    pub propagation: DMatrix<C64>,
}

impl ReferenceHamiltonian {
    pub fn total(&self) -> DMatrix<C64> {
        &self.input + &self.output + &self.propagation
    }

    /// `H_in + H_out`, the input/output checks.
    pub fn checks(&self) -> DMatrix<C64> {
        &self.input + &self.output
    }

    pub fn dim(&self) -> usize {
        self.input.nrows()
    }
}

/// Compile a circuit into the reference instance with an explicit
/// `(T+1)`-valued clock factor.
pub fn build_reference(circuit: &Circuit) -> Result<ReferenceHamiltonian> {
    let n_comp = circuit.n_qubits();
    let steps = circuit.steps();
    let comp_dim = 1usize << n_comp;
    let dim = comp_dim * (steps + 1);
    if dim > (1usize << DENSE_QUBIT_LIMIT) {
        return Err(Error::DimensionGuard(format!(
            "reference instance has dimension {dim}, exceeding the dense cap {}",
            1usize << DENSE_QUBIT_LIMIT
        )));
    }
    let m = circuit.proof_qubits();

    let mut input = DMatrix::from_element(dim, dim, cr(0.0));
    for x in 0..comp_dim {
        let bad_ancillas = (m..n_comp).filter(|&i| x & (1 << i) != 0).count();
        if bad_ancillas > 0 {
            // clock block t = 0
            input[(x, x)] = cr(bad_ancillas as f64);
        }
    }

    let mut output = DMatrix::from_element(dim, dim, cr(0.0));
    let last = steps * comp_dim;
    for x in 0..comp_dim {
        if x & 1 == 0 {
            output[(last + x, last + x)] = cr(1.0);
        }
    }

    let mut propagation = DMatrix::from_element(dim, dim, cr(0.0));
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let t = idx + 1;
        let embedded = crate::linalg::embed_local(gate.matrix(), gate.targets(), n_comp);
        let cur = t * comp_dim;
        let prev = (t - 1) * comp_dim;
        for x in 0..comp_dim {
            propagation[(cur + x, cur + x)] += cr(0.5);
            propagation[(prev + x, prev + x)] += cr(0.5);
        }
        for r in 0..comp_dim {
            for c in 0..comp_dim {
                let u = embedded[(r, c)];
                propagation[(cur + r, prev + c)] += -u * cr(0.5);
                propagation[(prev + c, cur + r)] += -u.conj() * cr(0.5);
            }
        }
    }

    Ok(ReferenceHamiltonian {
        input,
        output,
        propagation,
    })
}

/// History state in the unary-clock layout: the normalized superposition of
/// the partially executed circuit tensored with the matching clock pattern.
pub fn history_state_unary(circuit: &Circuit, proof: &StateVector) -> Result<StateVector> {
    let n_comp = circuit.n_qubits();
    let steps = circuit.steps();
    let n = n_comp + steps;
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "history state on {n} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit dense cap"
        )));
    }
    let snapshots = circuit_snapshots(circuit, proof)?;
    let mut amps = DVector::from_element(1usize << n, cr(0.0));
    let scale = cr(1.0 / ((steps + 1) as f64).sqrt());
    for (t, snap) in snapshots.iter().enumerate() {
        let clock = ClockState::new(t, steps)?;
        for (x, amp) in snap.iter().enumerate() {
            amps[clock.basis_index(x, n_comp)] = amp * scale;
        }
    }
    StateVector::new(n, amps)
}

/// History state in the reference layout (`t * 2^N + x` indexing).
pub fn history_state_reference(circuit: &Circuit, proof: &StateVector) -> Result<DVector<C64>> {
    let n_comp = circuit.n_qubits();
    let steps = circuit.steps();
    let comp_dim = 1usize << n_comp;
    let snapshots = circuit_snapshots(circuit, proof)?;
    let mut amps = DVector::from_element(comp_dim * (steps + 1), cr(0.0));
    let scale = cr(1.0 / ((steps + 1) as f64).sqrt());
    for (t, snap) in snapshots.iter().enumerate() {
        for (x, amp) in snap.iter().enumerate() {
            amps[t * comp_dim + x] = amp * scale;
        }
    }
    Ok(amps)
}

/// States `U_t .. U_1 |proof, 0>` for `t = 0..=T`.
fn circuit_snapshots(circuit: &Circuit, proof: &StateVector) -> Result<Vec<DVector<C64>>> {
    if proof.n_qubits() != circuit.proof_qubits() {
        return Err(Error::Invalid(format!(
            "proof has {} qubit(s), circuit expects {}",
            proof.n_qubits(),
            circuit.proof_qubits()
        )));
    }
    let n = circuit.n_qubits();
    let mut state = DVector::from_element(1usize << n, cr(0.0));
    for (i, amp) in proof.amplitudes().iter().enumerate() {
        state[i] = *amp;
    }
    let mut out = Vec::with_capacity(circuit.steps() + 1);
    out.push(state.clone());
    for gate in circuit.gates() {
        state = crate::linalg::apply_local(&state, gate.matrix(), gate.targets(), n);
        out.push(state.clone());
    }
    Ok(out)
}

/// Orthogonal projector onto the span of basis states whose clock part is a
/// legal unary pattern. `n_comp = 0` is allowed (clock register alone).
pub fn legal_projector(n_comp: usize, steps: usize) -> Result<DMatrix<C64>> {
    let n = n_comp + steps;
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "legal projector on {n} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit dense cap"
        )));
    }
    let dim = 1usize << n;
    let mut p = DMatrix::from_element(dim, dim, cr(0.0));
    for e in 0..dim {
        if is_unary_clock(e >> n_comp, steps) {
            p[(e, e)] = cr(1.0);
        }
    }
    Ok(p)
}

/// Restrict a full unary-layout operator to the legal subspace and rename
/// the basis to the reference layout: entry `(t*2^N + x, t'*2^N + x')` is
/// the full-space entry between the corresponding legal basis states.
pub fn compress_legal(
    full: &DMatrix<C64>,
    n_comp: usize,
    steps: usize,
) -> Result<DMatrix<C64>> {
    let n = n_comp + steps;
    let full_dim = 1usize << n;
    if full.nrows() != full_dim || full.ncols() != full_dim {
        return Err(Error::Invalid(format!(
            "operator has dimension {}, expected {full_dim} for N={n_comp}, T={steps}",
            full.nrows()
        )));
    }
    let comp_dim = 1usize << n_comp;
    let out_dim = comp_dim * (steps + 1);
    let legal_index = |t: usize, x: usize| x | (((1usize << t) - 1) << n_comp);
    let mut out = DMatrix::from_element(out_dim, out_dim, cr(0.0));
    for tr in 0..=steps {
        for xr in 0..comp_dim {
            let gr = legal_index(tr, xr);
            for tc in 0..=steps {
                for xc in 0..comp_dim {
                    out[(tr * comp_dim + xr, tc * comp_dim + xc)] =
                        full[(gr, legal_index(tc, xc))];
                }
            }
        }
    }
    Ok(out)
}

/// Split of a state into normalized legal and illegal parts with real
/// nonnegative coefficients; `alpha_legal^2 + alpha_illegal^2 = 1`. A part
/// with zero amplitude is returned as the zero vector.
#[derive(Debug, Clone)]
pub struct LegalSplit {
    pub alpha_legal: f64,
    pub alpha_illegal: f64,
    pub legal: DVector<C64>,
    pub illegal: DVector<C64>,
}

/// Decompose a unary-layout state along the legal/illegal clock split.
pub fn decompose_legal(state: &StateVector, n_comp: usize, steps: usize) -> Result<LegalSplit> {
    if state.n_qubits() != n_comp + steps {
        return Err(Error::Invalid(format!(
            "state has {} qubits, expected N+T = {}",
            state.n_qubits(),
            n_comp + steps
        )));
    }
    let dim = state.amplitudes().len();
    let mut legal = DVector::from_element(dim, cr(0.0));
    let mut illegal = DVector::from_element(dim, cr(0.0));
    for (e, amp) in state.amplitudes().iter().enumerate() {
        if is_unary_clock(e >> n_comp, steps) {
            legal[e] = *amp;
        } else {
            illegal[e] = *amp;
        }
    }
    let alpha_legal = legal.norm();
    let alpha_illegal = illegal.norm();
    if alpha_legal > 0.0 {
        legal /= cr(alpha_legal);
    }
    if alpha_illegal > 0.0 {
        illegal /= cr(alpha_illegal);
    }
    Ok(LegalSplit {
        alpha_legal,
        alpha_illegal,
        legal,
        illegal,
    })
}

/// One clause of at most three literals over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    /// `(variable, negated)` pairs, 0-based.
    pub literals: Vec<(usize, bool)>,
}

impl Clause {
    pub fn new(literals: Vec<(usize, bool)>) -> Result<Self> {
        if literals.is_empty() || literals.len() > 3 {
            return Err(Error::Invalid(format!(
                "clause must have 1..=3 literals, got {}",
                literals.len()
            )));
        }
        for (i, (v, _)) in literals.iter().enumerate() {
            if literals[i + 1..].iter().any(|(w, _)| w == v) {
                return Err(Error::Invalid(format!(
                    "clause repeats variable {}",
                    v + 1
                )));
            }
        }
        Ok(Clause { literals })
    }

    /// True if the assignment (bit `v` of `bits` is variable `v`) satisfies
    /// the clause.
    pub fn satisfied_by(&self, bits: usize) -> bool {
        self.literals
            .iter()
            .any(|&(v, neg)| ((bits >> v) & 1 == 1) != neg)
    }
}

/// Parse DIMACS-style CNF text: a `p cnf <vars> <clauses>` header, then
/// clauses as signed 1-based integers terminated by `0`. `c` lines are
/// comments.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<Clause>)> {
    let mut num_vars: Option<usize> = None;
    let mut declared_clauses: Option<usize> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<(usize, bool)> = Vec::new();

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if num_vars.is_some() {
                return Err(Error::Parse("duplicate problem line".into()));
            }
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            if tokens.len() != 3 || tokens[0] != "cnf" {
                return Err(Error::Parse(format!("malformed problem line '{line}'")));
            }
            num_vars = Some(
                tokens[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad variable count '{}'", tokens[1])))?,
            );
            declared_clauses = Some(
                tokens[2]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad clause count '{}'", tokens[2])))?,
            );
            continue;
        }
        let vars = num_vars.ok_or_else(|| Error::Parse("clause before problem line".into()))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad literal '{tok}'")))?;
            if lit == 0 {
                let clause = Clause::new(std::mem::take(&mut current))
                    .map_err(|e| Error::Parse(e.to_string()))?;
                clauses.push(clause);
            } else {
                let var = lit.unsigned_abs() as usize - 1;
                if var >= vars {
                    return Err(Error::Parse(format!(
                        "literal {lit} out of range for {vars} variable(s)"
                    )));
                }
                current.push((var, lit < 0));
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::Parse("unterminated clause (missing 0)".into()));
    }
    let vars = num_vars.ok_or_else(|| Error::Parse("missing problem line".into()))?;
    if let Some(d) = declared_clauses {
        if d != clauses.len() {
            return Err(Error::Parse(format!(
                "header declares {d} clause(s), found {}",
                clauses.len()
            )));
        }
    }
    Ok((vars, clauses))
}

/// Diagonal Hamiltonian with one projector per clause onto its unique
/// violating assignment, so the smallest eigenvalue counts the clauses no
/// assignment can satisfy simultaneously.
pub fn sat_to_hamiltonian(clauses: &[Clause], num_vars: usize) -> Result<LocalHamiltonian> {
    if num_vars == 0 || num_vars > MAX_QUBITS {
        return Err(Error::DimensionGuard(format!(
            "variable count {num_vars} out of range (1..={MAX_QUBITS})"
        )));
    }
    let mut terms = Vec::with_capacity(clauses.len());
    for (idx, clause) in clauses.iter().enumerate() {
        let mut lits = clause.literals.clone();
        lits.sort_by_key(|&(v, _)| v);
        let support: Vec<usize> = lits.iter().map(|&(v, _)| v).collect();
        if let Some(&v) = support.iter().find(|&&v| v >= num_vars) {
            return Err(Error::Invalid(format!(
                "clause {idx} uses variable {v}, out of range"
            )));
        }
        // the clause is violated exactly when every literal is false
        let mut violating = 0usize;
        for (j, &(_, neg)) in lits.iter().enumerate() {
            if neg {
                violating |= 1 << j;
            }
        }
        let dim = 1usize << support.len();
        terms.push(LocalTerm::new(
            TermLabel::new(TermGroup::Sat, idx),
            support,
            projector(dim, violating),
            1.0,
        )?);
    }
    LocalHamiltonian::new(num_vars, terms, None)
}
