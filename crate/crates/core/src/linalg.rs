//! Small dense linear algebra kernels.
//!
//! Everything here targets desk-scale matrices (dimensions in the tens), so
//! the implementations favour simplicity and determinism over asymptotics:
//! one-sided Jacobi for the SVD, cyclic Jacobi for symmetric eigenvalues and
//! Cholesky for SPD solves.

use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(self.cols, x.len(), "matvec shape");
        (0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    /// Quadratic form x^T A x.
    pub fn quad_form(&self, x: &[S]) -> S {
        dot(&self.matvec(x), x)
    }

    /// Largest absolute asymmetry |A_ij - A_ji|.
    pub fn max_asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += *x * *y;
    }
    acc
}

pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Singular value decomposition A = U diag(sigma) V^T with singular values
/// sorted in decreasing order. `u` is rows x k and `v` is cols x k where
/// k = min(rows, cols); columns of `u`/`v` for zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd<S> {
    pub u: DenseMat<S>,
    pub sigma: Vec<S>,
    pub v: DenseMat<S>,
}

/// One-sided Jacobi SVD.
pub fn svd<S: Scalar>(a: &DenseMat<S>) -> Svd<S> {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd { u: t.v, sigma: t.sigma, v: t.u };
    }
    let n = a.rows;
    let m = a.cols;
    // Work on n x m columns; v accumulates the right rotations.
    let mut w = a.clone();
    let mut v = DenseMat::<S>::identity(m);
    let conv = S::epsilon() * S::from_f64_lossy(8.0);
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..m.saturating_sub(1) {
            for j in (i + 1)..m {
                let mut aa = S::zero();
                let mut bb = S::zero();
                let mut d = S::zero();
                for r in 0..n {
                    let wi = w.get(r, i);
                    let wj = w.get(r, j);
                    aa += wi * wi;
                    bb += wj * wj;
                    d += wi * wj;
                }
                if d.abs() <= conv * (aa * bb).sqrt() || d == S::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (bb - aa) / (d + d);
                let t = if zeta >= S::zero() {
                    S::one() / (zeta + (S::one() + zeta * zeta).sqrt())
                } else {
                    -S::one() / (-zeta + (S::one() + zeta * zeta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                for r in 0..n {
                    let wi = w.get(r, i);
                    let wj = w.get(r, j);
                    w.set(r, i, c * wi - s * wj);
                    w.set(r, j, s * wi + c * wj);
                }
                for r in 0..m {
                    let vi = v.get(r, i);
                    let vj = v.get(r, j);
                    v.set(r, i, c * vi - s * vj);
                    v.set(r, j, s * vi + c * vj);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    // Column norms are the singular values; sort decreasing.
    let mut order: Vec<usize> = (0..m).collect();
    let norms: Vec<S> = (0..m).map(|j| norm2(&w.col_vec(j))).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));
    let mut u = DenseMat::<S>::zeros(n, m);
    let mut vv = DenseMat::<S>::zeros(m, m);
    let mut sigma = vec![S::zero(); m];
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma[dst] = s;
        if s > S::zero() {
            for r in 0..n {
                u.set(r, dst, w.get(r, src) / s);
            }
        }
        for r in 0..m {
            vv.set(r, dst, v.get(r, src));
        }
    }
    Svd { u, sigma, v: vv }
}

/// Symmetric eigendecomposition A = Q diag(lambda) Q^T by cyclic Jacobi.
/// Eigenvalues are returned in decreasing order.
pub fn sym_eigen<S: Scalar>(a: &DenseMat<S>) -> (Vec<S>, DenseMat<S>) {
    assert_eq!(a.rows, a.cols, "sym_eigen needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut q = DenseMat::<S>::identity(n);
    let tol = S::epsilon() * S::from_f64_lossy(4.0);
    for _ in 0..100 {
        // Largest off-diagonal magnitude decides convergence.
        let mut off = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m.get(i, j).abs());
            }
        }
        let scale = (0..n).map(|i| m.get(i, i).abs()).fold(S::zero(), S::max);
        if off <= tol * scale.max(S::one()) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for qi in (p + 1)..n {
                let apq = m.get(p, qi);
                if apq.abs() <= tol * scale.max(S::one()) {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(qi, qi);
                let theta = (aqq - app) / (apq + apq);
                let t = if theta >= S::zero() {
                    S::one() / (theta + (S::one() + theta * theta).sqrt())
                } else {
                    -S::one() / (-theta + (S::one() + theta * theta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, qi);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, qi, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(qi, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(qi, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkq = q.get(k, qi);
                    q.set(k, p, c * qkp - s * qkq);
                    q.set(k, qi, s * qkp + c * qkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<S> = (0..n).map(|i| m.get(i, i)).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap().then(x.cmp(&y)));
    let eigvals: Vec<S> = order.iter().map(|&i| diag[i]).collect();
    let mut eigvecs = DenseMat::<S>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigvecs.set(r, dst, q.get(r, src));
        }
    }
    (eigvals, eigvecs)
}

/// Cholesky factor L of an SPD matrix (A = L L^T), or None if not positive
/// definite up to roundoff.
pub fn cholesky<S: Scalar>(a: &DenseMat<S>) -> Option<DenseMat<S>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut l = DenseMat::<S>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= S::zero() {
                    return None;
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// Inverse of an SPD matrix through its Cholesky factor.
pub fn inv_spd<S: Scalar>(a: &DenseMat<S>) -> Option<DenseMat<S>> {
    let l = cholesky(a)?;
    let n = a.rows;
    let mut inv = DenseMat::<S>::zeros(n, n);
    // Solve L L^T x = e_j column by column.
    for j in 0..n {
        let mut y = vec![S::zero(); n];
        for i in 0..n {
            let mut sum = if i == j { S::one() } else { S::zero() };
            for k in 0..i {
                sum -= l.get(i, k) * y[k];
            }
            y[i] = sum / l.get(i, i);
        }
        let mut x = vec![S::zero(); n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= l.get(k, i) * x[k];
            }
            x[i] = sum / l.get(i, i);
        }
        for i in 0..n {
            inv.set(i, j, x[i]);
        }
    }
    Some(inv)
}

/// log(det A) for SPD A, via Cholesky.
pub fn log_det_spd<S: Scalar>(a: &DenseMat<S>) -> Option<S> {
    let l = cholesky(a)?;
    let mut acc = S::zero();
    for i in 0..a.rows {
        acc += l.get(i, i).ln();
    }
    Some(acc + acc)
}
