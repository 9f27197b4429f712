//! Small dense complex linear algebra helpers shared by the circuit
//! simulator and the local-operator algebra.
//!
//! Bit convention: qubit `i` is bit `i` of a basis index (LSB first). For a
//! local matrix on targets `[q0, q1, ..]`, local bit `j` is qubit `qj`.

use nalgebra::{Complex, DMatrix, DVector};

pub(crate) type C64 = Complex<f64>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub(crate) fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub(crate) fn max_abs_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Max-entry deviation of `M^dag M` from the identity.
pub(crate) fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let p = m.adjoint() * m;
    let n = p.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for col in 0..n {
            let expect = if r == col { cr(1.0) } else { cr(0.0) };
            worst = worst.max((p[(r, col)] - expect).norm());
        }
    }
    worst
}

/// Max-entry deviation of `M` from `M^dag`.
pub(crate) fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            worst = worst.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    worst
}

/// Global index offsets reached by setting local bits on the given targets:
/// entry `l` is the OR of `1 << targets[j]` over the set bits `j` of `l`.
fn local_patterns(targets: &[usize]) -> Vec<usize> {
    let dim = 1usize << targets.len();
    (0..dim)
        .map(|l| {
            let mut p = 0usize;
            for (j, &q) in targets.iter().enumerate() {
                if l & (1 << j) != 0 {
                    p |= 1 << q;
                }
            }
            p
        })
        .collect()
}

/// Apply `matrix` (dimension `2^k`) to the target qubits of an `n`-qubit
/// state, acting as the identity elsewhere. Targets must be distinct and
/// `< n`; callers validate this.
pub(crate) fn apply_local(
    state: &DVector<C64>,
    matrix: &DMatrix<C64>,
    targets: &[usize],
    n: usize,
) -> DVector<C64> {
    let k = targets.len();
    let dim_local = 1usize << k;
    debug_assert_eq!(state.len(), 1usize << n);
    debug_assert_eq!(matrix.nrows(), dim_local);

    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let free: Vec<usize> = (0..n).filter(|b| mask & (1 << b) == 0).collect();
    let patterns = local_patterns(targets);

    let mut out = DVector::from_element(1usize << n, cr(0.0));
    let mut sub = vec![cr(0.0); dim_local];
    for i in 0..(1usize << free.len()) {
        let mut base = 0usize;
        for (j, &fb) in free.iter().enumerate() {
            if i & (1 << j) != 0 {
                base |= 1 << fb;
            }
        }
        for (l, p) in patterns.iter().enumerate() {
            sub[l] = state[base | p];
        }
        for (r, pr) in patterns.iter().enumerate() {
            let mut acc = cr(0.0);
            for (l, s) in sub.iter().enumerate() {
                acc += matrix[(r, l)] * s;
            }
            out[base | pr] = acc;
        }
    }
    out
}

/// Dense embedding of a `2^k` matrix on the given targets into the full
/// `2^n` space (identity on the remaining qubits).
pub(crate) fn embed_local(matrix: &DMatrix<C64>, targets: &[usize], n: usize) -> DMatrix<C64> {
    let k = targets.len();
    let dim_local = 1usize << k;
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let free: Vec<usize> = (0..n).filter(|b| mask & (1 << b) == 0).collect();
    let patterns = local_patterns(targets);

    let full = 1usize << n;
    let mut out = DMatrix::from_element(full, full, cr(0.0));
    for i in 0..(1usize << free.len()) {
        let mut base = 0usize;
        for (j, &fb) in free.iter().enumerate() {
            if i & (1 << j) != 0 {
                base |= 1 << fb;
            }
        }
        for r in 0..dim_local {
            for col in 0..dim_local {
                out[(base | patterns[r], base | patterns[col])] = matrix[(r, col)];
            }
        }
    }
    out
}

/// Add `weight * matrix` on the given targets into a full-space operator
/// in place, avoiding a per-term dense temporary.
pub(crate) fn add_local_into(
    out: &mut DMatrix<C64>,
    matrix: &DMatrix<C64>,
    weight: f64,
    targets: &[usize],
    n: usize,
) {
    let k = targets.len();
    let dim_local = 1usize << k;
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let free: Vec<usize> = (0..n).filter(|b| mask & (1 << b) == 0).collect();
    let patterns = local_patterns(targets);
    let w = cr(weight);
    for i in 0..(1usize << free.len()) {
        let mut base = 0usize;
        for (j, &fb) in free.iter().enumerate() {
            if i & (1 << j) != 0 {
                base |= 1 << fb;
            }
        }
        for r in 0..dim_local {
            for col in 0..dim_local {
                out[(base | patterns[r], base | patterns[col])] += w * matrix[(r, col)];
            }
        }
    }
}

/// Reorder a local matrix given in listing order onto ascending targets.
/// Returns the sorted target list and the matrix permuted to match it.
pub(crate) fn sort_targets(targets: &[usize], matrix: &DMatrix<C64>) -> (Vec<usize>, DMatrix<C64>) {
    let k = targets.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&j| targets[j]);
    if order.iter().enumerate().all(|(a, &b)| a == b) {
        return (targets.to_vec(), matrix.clone());
    }
    let sorted: Vec<usize> = order.iter().map(|&j| targets[j]).collect();
    // new local bit j' carries the qubit that was local bit order[j']
    let remap = |lp: usize| -> usize {
        let mut l = 0usize;
        for (jp, &old) in order.iter().enumerate() {
            if lp & (1 << jp) != 0 {
                l |= 1 << old;
            }
        }
        l
    };
    let dim = 1usize << k;
    let mut out = DMatrix::from_element(dim, dim, cr(0.0));
    for rp in 0..dim {
        for cp in 0..dim {
            out[(rp, cp)] = matrix[(remap(rp), remap(cp))];
        }
    }
    (sorted, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj1() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)])
    }

    #[test]
    fn embed_projector_on_each_qubit() {
        // |1><1| on qubit 0 of two qubits: diagonal on odd indices
        let e0 = embed_local(&proj1(), &[0], 2);
        let d0: Vec<f64> = (0..4).map(|i| e0[(i, i)].re).collect();
        assert_eq!(d0, vec![0.0, 1.0, 0.0, 1.0]);
        let e1 = embed_local(&proj1(), &[1], 2);
        let d1: Vec<f64> = (0..4).map(|i| e1[(i, i)].re).collect();
        assert_eq!(d1, vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn embed_pair_projector_bit_order() {
        // |01> on targets (0,1) means qubit0=0, qubit1=1: global index 2.
        let mut m = DMatrix::from_element(4, 4, cr(0.0));
        m[(2, 2)] = cr(1.0);
        let e = embed_local(&m, &[0, 1], 2);
        let d: Vec<f64> = (0..4).map(|i| e[(i, i)].re).collect();
        assert_eq!(d, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn apply_matches_embed() {
        let x = DMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        let v = DVector::from_fn(8, |i, _| c(i as f64 + 0.5, 0.25 * i as f64));
        for q in 0..3 {
            let via_apply = apply_local(&v, &x, &[q], 3);
            let via_embed = embed_local(&x, &[q], 3) * &v;
            assert!((via_apply - via_embed).norm() < 1e-12);
        }
    }

    #[test]
    fn sort_targets_swaps_local_bits() {
        // CNOT with control listed second: reordering must preserve action.
        let cnot = DMatrix::from_row_slice(
            4,
            4,
            &[
                cr(1.0),
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(0.0),
                cr(1.0),
                cr(0.0),
                cr(0.0),
                cr(1.0),
                cr(0.0),
                cr(0.0),
                cr(1.0),
                cr(0.0),
                cr(0.0),
            ],
        );
        let (sorted, perm) = sort_targets(&[1, 0], &cnot);
        assert_eq!(sorted, vec![0, 1]);
        let direct = embed_local(&cnot, &[1, 0], 2);
        let sorted_embed = embed_local(&perm, &[0, 1], 2);
        assert!((direct - sorted_embed).iter().all(|z| z.norm() < 1e-15));
    }
}
