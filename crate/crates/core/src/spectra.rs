//! Spectral engine: smallest eigenvalues, Rayleigh quotients, null-space
//! bases, and principal angles between subspaces.
//!
//! Operators up to dimension [`DENSE_DIM_LIMIT`] go through a dense
//! Hermitian eigendecomposition; anything larger runs a seeded Lanczos
//! iteration with full reorthogonalization on matrix-vector products only.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c, cr, hermiticity_defect, max_abs_entry, C64};
use crate::operators::{assemble, LocalHamiltonian};
use crate::{Error, Result, DENSE_QUBIT_LIMIT};

/// Largest dimension handled by dense eigendecomposition.
pub const DENSE_DIM_LIMIT: usize = 1 << DENSE_QUBIT_LIMIT;

/// Default absolute tolerance for null-space membership. Instances here are
/// exactly constructed with spectral gaps of order `1/T^2`, far above it.
pub const NULLSPACE_TOL: f64 = 1e-8;

const LANCZOS_MAX_ITER: usize = 600;
const HERMITIAN_CHECK_TOL: f64 = 1e-9;

/// Hermitian operator exposed through matrix-vector products, with an
/// optional dense form when small enough to materialize.
pub trait HermitianOp {
    fn dim(&self) -> usize;
    fn apply(&self, v: &DVector<C64>) -> DVector<C64>;
    fn to_dense(&self) -> Option<DMatrix<C64>>;
}

impl HermitianOp for DMatrix<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        self * v
    }

    fn to_dense(&self) -> Option<DMatrix<C64>> {
        Some(self.clone())
    }
}

impl HermitianOp for LocalHamiltonian {
    fn dim(&self) -> usize {
        1usize << self.n_qubits()
    }

    fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        LocalHamiltonian::apply(self, v)
    }

    fn to_dense(&self) -> Option<DMatrix<C64>> {
        if self.n_qubits() <= DENSE_QUBIT_LIMIT {
            assemble(self).ok()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    Iterative,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dense => write!(f, "dense"),
            Method::Iterative => write!(f, "iterative"),
        }
    }
}

/// Smallest eigenvalue plus the evidence for it.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub lambda_min: f64,
    /// `||H v - lambda v||` for the returned eigenpair.
    pub residual: f64,
    pub method: Method,
    /// Krylov dimension used (0 for the dense path).
    pub iterations: usize,
}

/// Smallest eigenvalue with the default seed 0 for the iterative start
/// vector.
pub fn min_eigenvalue(op: &dyn HermitianOp, tol: f64) -> Result<SpectralResult> {
    min_eigenvalue_seeded(op, tol, 0)
}

/// Smallest eigenvalue; `seed` fixes the Lanczos start vector so repeated
/// runs are reproducible.
pub fn min_eigenvalue_seeded(op: &dyn HermitianOp, tol: f64, seed: u64) -> Result<SpectralResult> {
    if op.dim() == 0 {
        return Err(Error::Invalid("operator has dimension 0".into()));
    }
    if op.dim() <= DENSE_DIM_LIMIT {
        if let Some(dense) = op.to_dense() {
            return dense_min_eigenvalue(&dense);
        }
    }
    lanczos_min(op, tol, seed, LANCZOS_MAX_ITER)
}

/// Dense path: full Hermitian eigendecomposition. An exactly diagonal
/// operator (clause penalties, projector sums) decomposes in place.
pub fn dense_min_eigenvalue(matrix: &DMatrix<C64>) -> Result<SpectralResult> {
    check_hermitian(matrix)?;
    if let Some(result) = diagonal_min(matrix) {
        return Ok(result);
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let lambda = eig.eigenvalues[best];
    let v = eig.eigenvectors.column(best).clone_owned();
    let residual = (matrix * &v - &v * cr(lambda)).norm();
    Ok(SpectralResult {
        lambda_min: lambda,
        residual,
        method: Method::Dense,
        iterations: 0,
    })
}

/// Trivial eigendecomposition when every off-diagonal entry is exactly
/// zero: the basis vectors are the eigenvectors.
fn diagonal_min(matrix: &DMatrix<C64>) -> Option<SpectralResult> {
    let dim = matrix.nrows();
    for r in 0..dim {
        for c in 0..dim {
            if r != c && matrix[(r, c)] != cr(0.0) {
                return None;
            }
        }
    }
    let best = (0..dim).min_by(|&a, &b| matrix[(a, a)].re.total_cmp(&matrix[(b, b)].re))?;
    Some(SpectralResult {
        lambda_min: matrix[(best, best)].re,
        residual: matrix[(best, best)].im.abs(),
        method: Method::Dense,
        iterations: 0,
    })
}

fn check_hermitian(matrix: &DMatrix<C64>) -> Result<()> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::Invalid("operator must be square".into()));
    }
    let scale = max_abs_entry(matrix).max(1.0);
    let defect = hermiticity_defect(matrix);
    if defect > HERMITIAN_CHECK_TOL * scale {
        return Err(Error::Invalid(format!(
            "operator is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Lanczos with full reorthogonalization for the smallest eigenvalue.
///
/// Deterministic for a fixed seed. Converges when the residual bound
/// `beta_j |s_last|` drops below `tol * max(1, |theta|_max)`; failing that
/// within `max_iter` steps is an error carrying the best estimate.
pub fn lanczos_min(
    op: &dyn HermitianOp,
    tol: f64,
    seed: u64,
    max_iter: usize,
) -> Result<SpectralResult> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::Invalid("operator has dimension 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v0 = DVector::from_fn(dim, |_, _| {
        c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    v0 /= cr(v0.norm());

    let cap = max_iter.max(1).min(dim);
    let mut basis: Vec<DVector<C64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut exhausted = false;
    for j in 0..cap {
        let vj = basis[j].clone();
        let mut w = op.apply(&vj);
        if j > 0 {
            w -= &basis[j - 1] * cr(betas[j - 1]);
        }
        let alpha = vj.dotc(&w).re;
        alphas.push(alpha);
        w -= &vj * cr(alpha);
        // full reorthogonalization, twice for good measure
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&w);
                w -= b * overlap;
            }
        }
        let beta = w.norm();
        let scale = alphas
            .iter()
            .map(|a| a.abs())
            .chain(betas.iter().map(|b| b.abs()))
            .fold(1.0f64, f64::max);
        if beta <= 1e-14 * scale || j + 1 == cap {
            if beta <= 1e-14 * scale {
                exhausted = true; // invariant subspace: Ritz values exact
            }
            betas.push(beta);
            break;
        }
        betas.push(beta);
        basis.push(w / cr(beta));
        // periodic convergence probe
        if (j + 1) % 8 == 0 {
            let (theta, s) = tridiag_min(&alphas, &betas[..j]);
            let bound = betas[j] * s[s.len() - 1].abs();
            if bound <= tol * scale {
                break;
            }
            let _ = theta;
        }
    }

    let m = alphas.len();
    let (theta, s) = tridiag_min(&alphas, &betas[..m - 1]);
    let mut ritz = DVector::from_element(dim, cr(0.0));
    for (j, coeff) in s.iter().enumerate() {
        ritz += &basis[j] * cr(*coeff);
    }
    ritz /= cr(ritz.norm());
    let residual = (op.apply(&ritz) - &ritz * cr(theta)).norm();
    let scale = alphas
        .iter()
        .map(|a| a.abs())
        .chain(betas.iter().map(|b| b.abs()))
        .fold(1.0f64, f64::max);
    if residual > tol * scale && !exhausted && m == cap && cap < dim {
        return Err(Error::NoConvergence {
            iterations: m,
            lambda_min: theta,
            residual,
        });
    }
    Ok(SpectralResult {
        lambda_min: theta,
        residual,
        method: Method::Iterative,
        iterations: m,
    })
}

/// Smallest eigenpair of the real symmetric tridiagonal with diagonal
/// `alphas` and off-diagonal `betas`.
fn tridiag_min(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let theta = eig.eigenvalues[best];
    let s = eig.eigenvectors.column(best).iter().cloned().collect();
    (theta, s)
}

/// Rayleigh quotient `<v|H|v> / <v|v>`, real for Hermitian input.
pub fn rayleigh(op: &dyn HermitianOp, v: &DVector<C64>) -> Result<f64> {
    let norm_sq = v.norm_squared();
    if norm_sq <= 0.0 || !norm_sq.is_finite() {
        return Err(Error::Invalid(
            "Rayleigh quotient of a zero vector is undefined".into(),
        ));
    }
    let hv = op.apply(v);
    Ok(v.dotc(&hv).re / norm_sq)
}

/// Orthonormal basis (as matrix columns) of the eigenspace with
/// `|eigenvalue| <= tol`. Dense only.
pub fn nullspace_basis(matrix: &DMatrix<C64>, tol: f64) -> Result<DMatrix<C64>> {
    if matrix.nrows() > DENSE_DIM_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "null-space basis needs a dense decomposition; dimension {} exceeds {DENSE_DIM_LIMIT}",
            matrix.nrows()
        )));
    }
    check_hermitian(matrix)?;
    let dim = matrix.nrows();
    let eig = SymmetricEigen::new(matrix.clone());
    let keep: Vec<usize> = (0..dim)
        .filter(|&i| eig.eigenvalues[i].abs() <= tol)
        .collect();
    let mut basis = DMatrix::from_element(dim, keep.len(), cr(0.0));
    for (out_col, &i) in keep.iter().enumerate() {
        basis.set_column(out_col, &eig.eigenvectors.column(i));
    }
    Ok(basis)
}

/// Cosine of the principal angle between the column spans of two
/// orthonormal bases: the largest singular value of `A^dag B`, clamped to
/// `[0, 1]`.
pub fn principal_angle(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<f64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return Err(Error::Invalid(
            "principal angle of an empty subspace is undefined".into(),
        ));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::Invalid(format!(
            "subspace bases live in different spaces ({} vs {})",
            a.nrows(),
            b.nrows()
        )));
    }
    let overlap = a.adjoint() * b;
    let svd = SVD::new(overlap, false, false);
    let top = svd
        .singular_values
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    Ok(top.clamp(0.0, 1.0))
}
