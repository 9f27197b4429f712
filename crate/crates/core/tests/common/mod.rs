//! Shared fixtures for the integration and acceptance suites: small circuit
//! catalogs with known acceptance behavior, seeded random generators, and
//! brute-force oracles.

#![allow(dead_code)]

use clockham::circuit::{Circuit, Gate, StateVector};
use clockham::nalgebra::{Complex, DMatrix, DVector};
use clockham::operators::{LocalHamiltonian, LocalTerm, TermGroup, TermLabel};
use clockham::reduction::Clause;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gate(name: &str, targets: &[usize]) -> Gate {
    Gate::named(name, targets).unwrap()
}

fn circuit(n: usize, m: usize, gates: Vec<Gate>) -> Circuit {
    Circuit::new(n, m, gates).unwrap()
}

/// Circuits accepting the all-zero proof with probability exactly 1.
/// Kept at T <= 2 so the T^12 clock weight stays small enough for the
/// ground energy to be resolved at the 1e-10 level by dense
/// diagonalization.
pub fn accepting_catalog() -> Vec<(&'static str, Circuit)> {
    vec![
        ("acc-x", circuit(1, 1, vec![gate("X", &[0])])),
        ("acc-xz", circuit(1, 1, vec![gate("X", &[0]), gate("Z", &[0])])),
        (
            "acc-x-cnot",
            circuit(2, 1, vec![gate("X", &[0]), gate("CNOT", &[0, 1])]),
        ),
        (
            "acc-x-cz",
            circuit(2, 2, vec![gate("X", &[0]), gate("CZ", &[0, 1])]),
        ),
        (
            "acc-x-cnot3",
            circuit(3, 2, vec![gate("X", &[0]), gate("CNOT", &[0, 2])]),
        ),
    ]
}

/// The all-zero proof, the witness for every accepting-catalog circuit.
pub fn zero_proof(c: &Circuit) -> StateVector {
    StateVector::basis(c.proof_qubits(), 0).unwrap()
}

/// Circuits rejecting every proof with probability exactly 0: they erase
/// the output qubit into a fresh ancilla (`CNOT(0,a); CNOT(a,0)` maps
/// `|xi, 0>` to `|0, xi>`), then pad with gates that leave it alone.
/// Step counts cover T = 2, 3, 4.
pub fn rejecting_catalog() -> Vec<(&'static str, Circuit)> {
    vec![
        (
            "rej-t2",
            circuit(2, 1, vec![gate("CNOT", &[0, 1]), gate("CNOT", &[1, 0])]),
        ),
        (
            "rej-t3",
            circuit(
                2,
                1,
                vec![gate("CNOT", &[0, 1]), gate("CNOT", &[1, 0]), gate("Z", &[1])],
            ),
        ),
        (
            "rej-t3-wide",
            circuit(
                3,
                2,
                vec![gate("CNOT", &[0, 2]), gate("CNOT", &[2, 0]), gate("H", &[1])],
            ),
        ),
        (
            "rej-t4",
            circuit(
                2,
                1,
                vec![
                    gate("CNOT", &[0, 1]),
                    gate("CNOT", &[1, 0]),
                    gate("H", &[1]),
                    gate("H", &[1]),
                ],
            ),
        ),
        (
            "rej-t4-wide",
            circuit(
                3,
                1,
                vec![
                    gate("CNOT", &[0, 1]),
                    gate("CNOT", &[1, 0]),
                    gate("CNOT", &[1, 2]),
                    gate("S", &[2]),
                ],
            ),
        ),
    ]
}

/// Ten circuits with N <= 3, T <= 4 mixing every built-in gate kind.
pub fn mixed_catalog() -> Vec<(&'static str, Circuit)> {
    let mut out = vec![
        ("mix-h", circuit(1, 1, vec![gate("H", &[0])])),
        (
            "mix-hth",
            circuit(1, 1, vec![gate("H", &[0]), gate("TG", &[0]), gate("H", &[0])]),
        ),
        (
            "mix-bell-s",
            circuit(
                2,
                1,
                vec![gate("H", &[0]), gate("CNOT", &[0, 1]), gate("S", &[1])],
            ),
        ),
        (
            "mix-y-cz",
            circuit(
                2,
                2,
                vec![
                    gate("Y", &[0]),
                    gate("CZ", &[1, 0]),
                    gate("H", &[1]),
                    gate("X", &[1]),
                ],
            ),
        ),
        (
            "mix-ghz-z",
            circuit(
                3,
                1,
                vec![
                    gate("H", &[0]),
                    gate("CNOT", &[0, 1]),
                    gate("CNOT", &[1, 2]),
                    gate("Z", &[2]),
                ],
            ),
        ),
        (
            "mix-cz-t",
            circuit(
                3,
                3,
                vec![gate("CZ", &[0, 2]), gate("TG", &[1]), gate("CNOT", &[2, 1])],
            ),
        ),
    ];
    out.push(("mix-acc-x-cnot", accepting_catalog().remove(2).1));
    out.push(("mix-rej-t2", rejecting_catalog().remove(0).1));
    out.push(("mix-rej-t3-wide", rejecting_catalog().remove(2).1));
    out.push(("mix-acc-x", accepting_catalog().remove(0).1));
    out
}

/// Haar-ish random unitary via QR of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    m.qr().q()
}

/// Random circuit over the built-in gates plus explicit random unitaries.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize, m: usize, steps: usize) -> Circuit {
    const ONE_QUBIT: [&str; 7] = ["I", "X", "Y", "Z", "H", "S", "TG"];
    const TWO_QUBIT: [&str; 2] = ["CNOT", "CZ"];
    let mut gates = Vec::with_capacity(steps);
    for _ in 0..steps {
        let two = n >= 2 && rng.gen_bool(0.5);
        let g = match (two, rng.gen_bool(0.25)) {
            (false, false) => gate(ONE_QUBIT[rng.gen_range(0..ONE_QUBIT.len())], &[
                rng.gen_range(0..n),
            ]),
            (false, true) => {
                Gate::new("U1", vec![rng.gen_range(0..n)], random_unitary(rng, 2)).unwrap()
            }
            (true, explicit) => {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                if explicit {
                    Gate::new("U2", vec![a, b], random_unitary(rng, 4)).unwrap()
                } else {
                    gate(TWO_QUBIT[rng.gen_range(0..TWO_QUBIT.len())], &[a, b])
                }
            }
        };
        gates.push(g);
    }
    circuit(n, m, gates)
}

/// Random normalized proof state.
pub fn random_proof(rng: &mut ChaCha8Rng, m: usize) -> StateVector {
    let amps = DVector::from_fn(1usize << m, |_, _| {
        Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    StateVector::normalized(m, amps).unwrap().0
}

/// Random 3-CNF over `vars` variables: distinct variables per clause,
/// random polarities.
pub fn random_3sat(rng: &mut ChaCha8Rng, vars: usize, clauses: usize) -> Vec<Clause> {
    (0..clauses)
        .map(|_| {
            let mut picked: Vec<usize> = Vec::with_capacity(3);
            while picked.len() < 3 {
                let v = rng.gen_range(0..vars);
                if !picked.contains(&v) {
                    picked.push(v);
                }
            }
            Clause::new(picked.into_iter().map(|v| (v, rng.gen_bool(0.5))).collect()).unwrap()
        })
        .collect()
}

/// Smallest number of violated clauses over all assignments, by
/// enumeration. `#clauses - maxsat` in other words.
pub fn min_violations(clauses: &[Clause], vars: usize) -> usize {
    (0..1usize << vars)
        .map(|bits| clauses.iter().filter(|c| !c.satisfied_by(bits)).count())
        .min()
        .expect("at least one assignment")
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0)
    });
    (&a + a.adjoint()) * cr(0.5)
}

/// Random local Hamiltonian on `n` qubits with `terms` weighted Hermitian
/// terms on random supports.
pub fn random_local_hamiltonian(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> LocalHamiltonian {
    let built: Vec<LocalTerm> = (0..terms)
        .map(|idx| {
            let k = rng.gen_range(1..=n.min(3));
            let mut support: Vec<usize> = Vec::with_capacity(k);
            while support.len() < k {
                let q = rng.gen_range(0..n);
                if !support.contains(&q) {
                    support.push(q);
                }
            }
            support.sort_unstable();
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let weight = sign * (0.25 + 1.75 * rng.gen::<f64>());
            LocalTerm::new(
                TermLabel::new(TermGroup::Other, idx),
                support,
                random_hermitian(rng, 1 << k),
                weight,
            )
            .unwrap()
        })
        .collect();
    LocalHamiltonian::new(n, built, None).unwrap()
}
