//! Local-operator algebra: weighted Hermitian terms on up to three qubits,
//! assembly into full-space matrices, norm and locality audits, the
//! spectrum-preserving normalization onto `[0, 1]` terms, and the text
//! interchange format.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::linalg::{self, c, cr, C64};
use crate::{fmt_f64, Error, Result, DENSE_QUBIT_LIMIT, MAX_QUBITS};

const HERMITIAN_TOL: f64 = 1e-12;

/// Maximum support size of a single term.
pub const MAX_TERM_QUBITS: usize = 3;

/// Which part of a Hamiltonian a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermGroup {
    /// Ancilla-initialization checks.
    In,
    /// Output-acceptance check.
    Out,
    /// Propagation checks, one group index per time step.
    Prop,
    /// Illegal-clock penalties.
    Clock,
    /// Clause penalties of a satisfiability embedding.
    Sat,
    Other,
}

impl TermGroup {
    fn as_str(self) -> &'static str {
        match self {
            TermGroup::In => "in",
            TermGroup::Out => "out",
            TermGroup::Prop => "prop",
            TermGroup::Clock => "clock",
            TermGroup::Sat => "sat",
            TermGroup::Other => "other",
        }
    }
}

/// Group tag plus an index, e.g. `prop3` for the step-3 propagation terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermLabel {
    pub group: TermGroup,
    pub index: usize,
}

impl TermLabel {
    pub fn new(group: TermGroup, index: usize) -> Self {
        TermLabel { group, index }
    }
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.group.as_str(), self.index)
    }
}

impl FromStr for TermLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let split = s.find(|ch: char| ch.is_ascii_digit()).unwrap_or(s.len());
        let (name, digits) = s.split_at(split);
        let group = match name {
            "in" => TermGroup::In,
            "out" => TermGroup::Out,
            "prop" => TermGroup::Prop,
            "clock" => TermGroup::Clock,
            "sat" => TermGroup::Sat,
            "other" => TermGroup::Other,
            _ => return Err(Error::Parse(format!("unknown term label '{s}'"))),
        };
        let index = digits
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("term label '{s}' needs an index")))?;
        Ok(TermLabel { group, index })
    }
}

/// One weighted Hermitian operator on at most [`MAX_TERM_QUBITS`] qubits.
///
/// The stored matrix is indexed little-endian over the (ascending) support;
/// the scalar weight is kept separate so large penalty factors never enter
/// the matrix entries themselves.
#[derive(Debug, Clone)]
pub struct LocalTerm {
    label: TermLabel,
    support: Vec<usize>,
    matrix: DMatrix<C64>,
    weight: f64,
}

impl LocalTerm {
    /// Support must be strictly ascending. See [`LocalTerm::from_unsorted`]
    /// for targets in gate listing order.
    pub fn new(
        label: TermLabel,
        support: Vec<usize>,
        matrix: DMatrix<C64>,
        weight: f64,
    ) -> Result<Self> {
        let k = support.len();
        if k == 0 || k > MAX_TERM_QUBITS {
            return Err(Error::Invalid(format!(
                "term support must have 1..={MAX_TERM_QUBITS} qubits, got {k}"
            )));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!(
                "term support must be strictly ascending, got {support:?}"
            )));
        }
        let dim = 1usize << k;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Invalid(format!(
                "term matrix must be {dim}x{dim} for {k} support qubit(s)"
            )));
        }
        if !weight.is_finite() {
            return Err(Error::Invalid("term weight must be finite".into()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::Invalid(format!(
                "term matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(LocalTerm {
            label,
            support,
            matrix,
            weight,
        })
    }

    /// Build a term from targets in listing order, permuting the matrix onto
    /// the ascending support.
    pub fn from_unsorted(
        label: TermLabel,
        targets: &[usize],
        matrix: &DMatrix<C64>,
        weight: f64,
    ) -> Result<Self> {
        let (support, permuted) = linalg::sort_targets(targets, matrix);
        LocalTerm::new(label, support, permuted, weight)
    }

    pub fn label(&self) -> TermLabel {
        self.label
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Spectral norm of `weight * matrix`, exact via dense diagonalization.
    pub fn norm(&self) -> f64 {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let max_abs = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
        self.weight.abs() * max_abs
    }

    /// Diagonal matrix element `<e| weight * term |e>` for a full-space
    /// basis state `e` (off-support bits are ignored).
    pub fn diagonal_energy(&self, basis_state: usize) -> f64 {
        let mut local = 0usize;
        for (j, &q) in self.support.iter().enumerate() {
            if basis_state & (1 << q) != 0 {
                local |= 1 << j;
            }
        }
        self.weight * self.matrix[(local, local)].re
    }
}

/// A sum of local terms on `n` qubits, with optional decision thresholds
/// `(a, b)`.
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    n: usize,
    terms: Vec<LocalTerm>,
    thresholds: Option<(f64, f64)>,
}

impl LocalHamiltonian {
    pub fn new(n: usize, terms: Vec<LocalTerm>, thresholds: Option<(f64, f64)>) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::DimensionGuard(format!(
                "{n} qubits exceeds the {MAX_QUBITS}-qubit cap"
            )));
        }
        for t in &terms {
            if let Some(&q) = t.support().iter().find(|&&q| q >= n) {
                return Err(Error::Invalid(format!(
                    "term {} touches qubit {q}, but the Hamiltonian has {n} qubits",
                    t.label()
                )));
            }
        }
        if let Some((a, b)) = thresholds {
            if !(b - a > 0.0) {
                return Err(Error::Invalid(format!(
                    "thresholds need b - a > 0, got a={a}, b={b}"
                )));
            }
        }
        Ok(LocalHamiltonian {
            n,
            terms,
            thresholds,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn thresholds(&self) -> Option<(f64, f64)> {
        self.thresholds
    }

    pub fn with_thresholds(mut self, a: f64, b: f64) -> Result<Self> {
        if !(b - a > 0.0) {
            return Err(Error::Invalid(format!(
                "thresholds need b - a > 0, got a={a}, b={b}"
            )));
        }
        self.thresholds = Some((a, b));
        Ok(self)
    }

    /// Sub-Hamiltonian keeping only the terms of the given groups.
    pub fn group_subset(&self, groups: &[TermGroup]) -> LocalHamiltonian {
        let terms = self
            .terms
            .iter()
            .filter(|t| groups.contains(&t.label().group))
            .cloned()
            .collect();
        LocalHamiltonian {
            n: self.n,
            terms,
            thresholds: None,
        }
    }

    /// Matrix-vector product without materializing the full operator.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::from_element(v.len(), cr(0.0));
        for t in &self.terms {
            let part = linalg::apply_local(v, t.matrix(), t.support(), self.n);
            out += part * cr(t.weight());
        }
        out
    }
}

/// Dense full-space embedding of a single term (weight included).
pub fn embed(term: &LocalTerm, n: usize) -> Result<DMatrix<C64>> {
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "dense embedding on {n} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit cap"
        )));
    }
    if let Some(&q) = term.support().iter().find(|&&q| q >= n) {
        return Err(Error::Invalid(format!(
            "term touches qubit {q}, out of range for {n} qubits"
        )));
    }
    Ok(linalg::embed_local(term.matrix(), term.support(), n) * cr(term.weight()))
}

/// Dense sum of all embedded terms.
pub fn assemble(h: &LocalHamiltonian) -> Result<DMatrix<C64>> {
    let n = h.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "dense assembly on {n} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit cap"
        )));
    }
    let dim = h.dim();
    let mut out = DMatrix::from_element(dim, dim, cr(0.0));
    for t in h.terms() {
        linalg::add_local_into(&mut out, t.matrix(), t.weight(), t.support(), n);
    }
    Ok(out)
}

/// Largest support size over all terms (0 for an empty term list).
pub fn locality(h: &LocalHamiltonian) -> usize {
    h.terms().iter().map(|t| t.support().len()).max().unwrap_or(0)
}

/// Spectral norm of a single weighted term.
pub fn term_norm(term: &LocalTerm) -> f64 {
    term.norm()
}

/// Rescale so every term obeys `0 <= term <= 1`, mapping the thresholds
/// along: each term becomes `s * w * M + I/2` with `s = 1/(2 max_j ||H_j||)`
/// and the thresholds become `s*a + r/2`, `s*b + r/2`. The decision under
/// the mapped thresholds is unchanged because the full spectrum maps
/// affinely.
pub fn normalize_terms(
    h: &LocalHamiltonian,
    a: f64,
    b: f64,
) -> Result<(LocalHamiltonian, f64, f64)> {
    let r = h.terms().len();
    let max_norm = h.terms().iter().map(term_norm).fold(0.0f64, f64::max);
    if r == 0 || max_norm <= 0.0 {
        return Err(Error::Invalid(
            "cannot normalize a zero Hamiltonian (no scale)".into(),
        ));
    }
    let scale = 1.0 / (2.0 * max_norm);
    let terms = h
        .terms()
        .iter()
        .map(|t| {
            let dim = t.matrix().nrows();
            let m = t.matrix() * cr(scale * t.weight()) + DMatrix::identity(dim, dim) * cr(0.5);
            LocalTerm::new(t.label(), t.support().to_vec(), m, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let shift = r as f64 / 2.0;
    let a_new = scale * a + shift;
    let b_new = scale * b + shift;
    let out = LocalHamiltonian::new(h.n_qubits(), terms, Some((a_new, b_new)))?;
    Ok((out, a_new, b_new))
}

/// Serialize to the interchange text format. Term order is preserved;
/// builders emit `in`, `out`, `prop` (by step), `clock` (pairs in
/// lexicographic order) so identical instances give identical bytes.
pub fn write_interchange(h: &LocalHamiltonian) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", h.n_qubits()));
    out.push_str(&format!("terms {}\n", h.terms().len()));
    for t in h.terms() {
        let k = t.support().len();
        let qubits: Vec<String> = t.support().iter().map(|q| q.to_string()).collect();
        out.push_str(&format!(
            "{} k {} q {} w {}\n",
            t.label(),
            k,
            qubits.join(" "),
            fmt_f64(t.weight())
        ));
        let dim = 1usize << k;
        for r in 0..dim {
            let row: Vec<String> = (0..dim)
                .map(|cix| {
                    let z = t.matrix()[(r, cix)];
                    format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parse the interchange text format back into a Hamiltonian.
pub fn parse_interchange(text: &str) -> Result<LocalHamiltonian> {
    let mut lines = text
        .lines()
        .map(|l| match l.find('#') {
            Some(p) => &l[..p],
            None => l,
        })
        .map(str::trim)
        .filter(|l| !l.is_empty());

    let n = parse_header(lines.next(), "n")?;
    let r = parse_header(lines.next(), "terms")?;
    let mut terms = Vec::with_capacity(r);
    for _ in 0..r {
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("unexpected end of file in term header".into()))?;
        let tokens: Vec<&str> = head.split_whitespace().collect();
        // <label> k <k> q <i1..ik> w <weight>
        if tokens.len() < 6 || tokens[1] != "k" {
            return Err(Error::Parse(format!("malformed term header '{head}'")));
        }
        let label: TermLabel = tokens[0].parse()?;
        let k: usize = tokens[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad support size in '{head}'")))?;
        if tokens.len() != 6 + k || tokens[3] != "q" || tokens[4 + k] != "w" {
            return Err(Error::Parse(format!("malformed term header '{head}'")));
        }
        let support: Vec<usize> = tokens[4..4 + k]
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad qubit index '{t}'")))
            })
            .collect::<Result<_>>()?;
        let weight: f64 = tokens[5 + k]
            .parse()
            .map_err(|_| Error::Parse(format!("bad weight in '{head}'")))?;
        let dim = 1usize << k;
        let mut matrix = DMatrix::from_element(dim, dim, cr(0.0));
        for row in 0..dim {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of file in term matrix".into()))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != dim {
                return Err(Error::Parse(format!(
                    "term row has {} entries, expected {dim}",
                    entries.len()
                )));
            }
            for (cix, e) in entries.iter().enumerate() {
                let (re, im) = e
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad complex entry '{e}'")))?;
                let re: f64 = re
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad complex entry '{e}'")))?;
                let im: f64 = im
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad complex entry '{e}'")))?;
                matrix[(row, cix)] = c(re, im);
            }
        }
        terms.push(
            LocalTerm::new(label, support, matrix, weight)
                .map_err(|e| Error::Parse(format!("invalid term: {e}")))?,
        );
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing content after final term".into()));
    }
    LocalHamiltonian::new(n, terms, None).map_err(|e| match e {
        Error::Invalid(msg) => Error::Parse(msg),
        other => other,
    })
}

/// Dense matrix dump: `dim <d>` header, then `d` rows of `re,im` entries.
/// Used for reference-mode instances, which are not sums of small terms.
pub fn write_dense_matrix(m: &DMatrix<C64>) -> String {
    let dim = m.nrows();
    let mut out = format!("dim {dim}\n");
    for r in 0..dim {
        let row: Vec<String> = (0..dim)
            .map(|cix| {
                let z = m[(r, cix)];
                format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parse a dense matrix dump written by [`write_dense_matrix`].
pub fn parse_dense_matrix(text: &str) -> Result<DMatrix<C64>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let head = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix dump".into()))?;
    let dim: usize = head
        .strip_prefix("dim ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected 'dim <d>' header, got '{head}'")))?;
    if dim > 1usize << DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard(format!(
            "matrix dump of dimension {dim} exceeds the dense cap"
        )));
    }
    let mut m = DMatrix::from_element(dim, dim, cr(0.0));
    for r in 0..dim {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("matrix dump ended early".into()))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != dim {
            return Err(Error::Parse(format!(
                "matrix row {r} has {} entries, expected {dim}",
                entries.len()
            )));
        }
        for (cix, e) in entries.iter().enumerate() {
            let (re, im) = e
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad complex entry '{e}'")))?;
            let re: f64 = re
                .parse()
                .map_err(|_| Error::Parse(format!("bad complex entry '{e}'")))?;
            let im: f64 = im
                .parse()
                .map_err(|_| Error::Parse(format!("bad complex entry '{e}'")))?;
            m[(r, cix)] = c(re, im);
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing content after matrix dump".into()));
    }
    Ok(m)
}

fn parse_header(line: Option<&str>, key: &str) -> Result<usize> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing '{key}' header")))?;
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(Error::Parse(format!("expected '{key}' header, got '{line}'")));
    }
    let value = it
        .next()
        .ok_or_else(|| Error::Parse(format!("missing value in '{key}' header")))?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("trailing tokens in '{key}' header")));
    }
    value
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad value in '{key}' header")))
}
