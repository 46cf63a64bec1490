//! Rank factorizations M_xy = <u_x, v_y> and their verification.

use crate::error::{Error, Result};
use crate::linalg::{dot, svd, DenseMat};
use crate::matrix::{numerical_rank, SignMatrix};
use crate::scalar::Scalar;

/// Reconstruction tolerance for factorizations of sign matrices. Downstream
/// sign decisions only depend on values of magnitude exactly 1, so 1e-6 is
/// comfortable.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;

/// Inner-product factorization of a sign matrix: one vector per row (u_x) and
/// one per column (v_y), all in R^dim, with <u_x, v_y> = M_xy.
///
/// A norm-bound certificate is attached by `john::john_rescale`; it records
/// the ellipsoid slack eps under which all norms are at most dim^(1/4)(1+eps).
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<S> {
    dim: usize,
    left: Vec<Vec<S>>,
    right: Vec<Vec<S>>,
    certificate: Option<NormCertificate<S>>,
}

/// Certificate that `john::john_rescale` ran with the given slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCertificate<S> {
    pub eps: S,
}

impl<S: Scalar> Factorization<S> {
    /// Wraps externally supplied vectors. No span or reconstruction check is
    /// performed here; `verify_factorization` and `john_rescale` do that.
    pub fn from_vectors(dim: usize, left: Vec<Vec<S>>, right: Vec<Vec<S>>) -> Result<Self> {
        if left.iter().chain(right.iter()).any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: format!("vectors of length {dim}"),
                found: "mixed lengths".into(),
            });
        }
        Ok(Factorization { dim, left, right, certificate: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.left.len()
    }

    pub fn n_cols(&self) -> usize {
        self.right.len()
    }

    pub fn left_vector(&self, x: usize) -> &[S] {
        &self.left[x]
    }

    pub fn right_vector(&self, y: usize) -> &[S] {
        &self.right[y]
    }

    pub fn left_vectors(&self) -> &[Vec<S>] {
        &self.left
    }

    pub fn right_vectors(&self) -> &[Vec<S>] {
        &self.right
    }

    pub fn inner_product(&self, x: usize, y: usize) -> S {
        dot(&self.left[x], &self.right[y])
    }

    pub fn norm_bound_certified(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn certificate(&self) -> Option<NormCertificate<S>> {
        self.certificate
    }

    pub(crate) fn set_certificate(&mut self, eps: S) {
        self.certificate = Some(NormCertificate { eps });
    }

    /// Largest left/right vector norms.
    pub fn max_norms(&self) -> (S, S) {
        let max_of = |vs: &[Vec<S>]| {
            vs.iter().map(|v| dot(v, v).sqrt()).fold(S::zero(), S::max)
        };
        (max_of(&self.left), max_of(&self.right))
    }

    /// Dimension of span{u_x}, at relative tolerance `tol` on the singular
    /// values of the stacked left vectors.
    pub fn left_span_dim(&self, tol: S) -> usize {
        let stacked = DenseMat::from_fn(self.left.len(), self.dim, |i, j| self.left[i][j]);
        let d = svd(&stacked);
        let top = d.sigma[0];
        if top <= S::zero() {
            return 0;
        }
        d.sigma.iter().filter(|&&s| s > tol * top).count()
    }

    /// Re-expresses all vectors in an orthonormal basis of span{u_x},
    /// dropping dimensions the left vectors do not reach. Inner products are
    /// unchanged because right vectors only act through that span.
    pub fn reproject_to_left_span(&self, tol: S) -> Factorization<S> {
        let stacked = DenseMat::from_fn(self.left.len(), self.dim, |i, j| self.left[i][j]);
        let d = svd(&stacked);
        let top = d.sigma[0];
        let keep = if top <= S::zero() {
            0
        } else {
            d.sigma.iter().filter(|&&s| s > tol * top).count()
        };
        let basis: Vec<Vec<S>> = (0..keep).map(|k| d.v.col_vec(k)).collect();
        let project = |v: &[S]| -> Vec<S> { basis.iter().map(|b| dot(b, v)).collect() };
        Factorization {
            dim: keep,
            left: self.left.iter().map(|v| project(v)).collect(),
            right: self.right.iter().map(|v| project(v)).collect(),
            certificate: None,
        }
    }
}

/// Factorizes via SVD truncated at the numerical rank, splitting each
/// singular value as sqrt(sigma) into both factors for balance.
pub fn rank_factorization<S: Scalar>(m: &SignMatrix, tol: S) -> Factorization<S> {
    let r = numerical_rank(m, tol);
    let d = svd(&m.as_dense::<S>());
    let mut left = Vec::with_capacity(m.n_rows());
    for x in 0..m.n_rows() {
        left.push((0..r).map(|k| d.u.get(x, k) * d.sigma[k].sqrt()).collect());
    }
    let mut right = Vec::with_capacity(m.n_cols());
    for y in 0..m.n_cols() {
        right.push((0..r).map(|k| d.v.get(y, k) * d.sigma[k].sqrt()).collect());
    }
    Factorization { dim: r, left, right, certificate: None }
}

/// Outcome of checking a factorization against its source matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport<S> {
    pub max_error: S,
    pub ok: bool,
}

/// Entrywise check max |<u_x, v_y> - M_xy| against `tol`.
pub fn verify_factorization<S: Scalar>(
    m: &SignMatrix,
    f: &Factorization<S>,
    tol: S,
) -> Result<VerifyReport<S>> {
    if f.n_rows() != m.n_rows() || f.n_cols() != m.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} x {}", m.n_rows(), m.n_cols()),
            found: format!("{} x {}", f.n_rows(), f.n_cols()),
        });
    }
    let mut max_error = S::zero();
    for x in 0..m.n_rows() {
        for y in 0..m.n_cols() {
            let err = (f.inner_product(x, y) - m.value::<S>(x, y)).abs();
            if err > max_error {
                max_error = err;
            }
        }
    }
    Ok(VerifyReport { max_error, ok: max_error <= tol })
}

// ---------------------------------------------------------------------------
// Text format: line 1 = "<n_rows> <n_cols> <r>", then n_rows lines of r
// decimals (the u vectors) followed by n_cols lines of r decimals (the v
// vectors).
// ---------------------------------------------------------------------------

/// Writes the factorization text format.
pub fn format_factorization<S: Scalar>(f: &Factorization<S>) -> String {
    let mut out = format!("{} {} {}\n", f.n_rows(), f.n_cols(), f.dim());
    for v in f.left_vectors().iter().chain(f.right_vectors().iter()) {
        let row: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the factorization text format. The result is uncertified.
pub fn parse_factorization<S: Scalar>(text: &str) -> Result<Factorization<S>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty input".into(),
    })?;
    let mut it = header.split_whitespace();
    let mut field = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or(Error::Parse {
            line: 1,
            col: header.len() + 1,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: 1,
            col: header.find(tok).map(|p| p + 1).unwrap_or(1),
            msg: format!("invalid {what}: {tok:?}"),
        })
    };
    let n_rows = field("row count")?;
    let n_cols = field("column count")?;
    let dim = field("dimension")?;
    let mut vectors = Vec::with_capacity(n_rows + n_cols);
    for _ in 0..(n_rows + n_cols) {
        let (idx, line) = lines.next().ok_or(Error::Parse {
            line: n_rows + n_cols + 2,
            col: 1,
            msg: format!("expected {} vector lines", n_rows + n_cols),
        })?;
        let line_no = idx + 1;
        let mut v = Vec::with_capacity(dim);
        for tok in line.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                col: line.find(tok).map(|p| p + 1).unwrap_or(1),
                msg: format!("invalid coordinate {tok:?}"),
            })?;
            v.push(S::from_f64_lossy(x));
        }
        if v.len() != dim {
            return Err(Error::Parse {
                line: line_no,
                col: 1,
                msg: format!("expected {dim} coordinates, found {}", v.len()),
            });
        }
        vectors.push(v);
    }
    let right = vectors.split_off(n_rows);
    Factorization::from_vectors(dim, vectors, right)
}
