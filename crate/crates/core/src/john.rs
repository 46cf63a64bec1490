//! Minimum-volume enclosing ellipsoids for symmetric point sets, and the
//! factorization rescaling that bounds every vector norm by dim^(1/4).
//!
//! For an origin-symmetric point set {+-p_i} the minimum-volume enclosing
//! ellipsoid E satisfies (1/sqrt(r)) E <= conv{+-p_i} <= E, so mapping E to a
//! ball of radius r^(1/4) squeezes the convex hull between r^(-1/4)B and
//! r^(1/4)B. Applying that map to the left vectors of a factorization (and
//! its inverse transpose to the right vectors) leaves all inner products
//! unchanged while capping both vector families at norm r^(1/4).

use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::linalg::{dot, inv_spd, log_det_spd, sym_eigen, DenseMat};
use crate::scalar::Scalar;

/// Default slack for the ellipsoid computation.
pub const DEFAULT_EPS: f64 = 1e-3;

/// Default iteration budget for the coordinate ascent.
pub const DEFAULT_MAX_ITERS: usize = 200_000;

/// Origin-centered ellipsoid E = { z : z^T A z <= 1 } with A symmetric
/// positive definite, plus the optimality gap certified at termination:
/// max_p p^T A p - 1 <= gap.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidForm<S> {
    pub a: DenseMat<S>,
    pub optimality_gap: S,
}

impl<S: Scalar> EllipsoidForm<S> {
    /// log of the ellipsoid volume up to the dimension-only ball constant:
    /// vol(E) = vol(B_r) / sqrt(det A).
    pub fn log_volume_rel(&self) -> S {
        -log_det_spd(&self.a).expect("ellipsoid matrix is SPD") / S::from_f64_lossy(2.0)
    }
}

/// Minimum-volume ellipsoid enclosing {+-p : p in points}, to relative slack
/// `eps`, with the default iteration budget.
pub fn mvee_symmetric<S: Scalar>(points: &[Vec<S>], eps: S) -> Result<EllipsoidForm<S>> {
    mvee_symmetric_with_budget(points, eps, DEFAULT_MAX_ITERS)
}

/// Khachiyan coordinate ascent on the design weights u (one per point),
/// maximizing log det of M(u) = sum u_i p_i p_i^T. Termination certificate:
/// with A = M(u)^{-1} / r, every point satisfies p^T A p <= 1 + eps, and the
/// duality gap bounds the volume to within (1+eps)^{r/2} of the optimum.
///
/// Away steps (shrinking the weight of the point with the smallest leverage
/// inside the support) are taken when they close more of the gap than the
/// classical add step.
pub fn mvee_symmetric_with_budget<S: Scalar>(
    points: &[Vec<S>],
    eps: S,
    max_iters: usize,
) -> Result<EllipsoidForm<S>> {
    assert!(eps > S::zero(), "eps must be positive");
    let n = points.len();
    if n == 0 {
        return Err(Error::DegeneratePointSet);
    }
    let r = points[0].len();
    let rf = S::from_count(r);
    if points.iter().any(|p| p.len() != r) {
        return Err(Error::DimensionMismatch {
            expected: format!("points of dimension {r}"),
            found: "mixed dimensions".into(),
        });
    }

    let design_matrix = |u: &[S]| -> DenseMat<S> {
        let mut m = DenseMat::<S>::zeros(r, r);
        for (w, p) in u.iter().zip(points.iter()) {
            if *w == S::zero() {
                continue;
            }
            for i in 0..r {
                let wi = *w * p[i];
                for j in 0..r {
                    let v = m.get(i, j) + wi * p[j];
                    m.set(i, j, v);
                }
            }
        }
        m
    };

    let mut u = vec![S::one() / S::from_count(n); n];
    let mut m_inv = inv_spd(&design_matrix(&u)).ok_or(Error::DegeneratePointSet)?;

    let mut leverages = vec![S::zero(); n];
    let refresh_every = 64;
    let mut iter = 0usize;
    loop {
        // Leverages g_i = p_i^T M^{-1} p_i; optimal design has g_i = r on the
        // support and g_i <= r everywhere.
        for (g, p) in leverages.iter_mut().zip(points.iter()) {
            *g = m_inv.quad_form(p);
        }
        let (mut j_max, mut g_max) = (0usize, leverages[0]);
        for (i, &g) in leverages.iter().enumerate() {
            if g > g_max {
                j_max = i;
                g_max = g;
            }
        }
        let (mut j_min, mut g_min) = (usize::MAX, S::infinity());
        for (i, &g) in leverages.iter().enumerate() {
            if u[i] > S::zero() && g < g_min {
                j_min = i;
                g_min = g;
            }
        }

        let add_gap = g_max / rf - S::one();
        if add_gap <= eps {
            let a = DenseMat::from_fn(r, r, |i, j| {
                (m_inv.get(i, j) + m_inv.get(j, i)) / (rf + rf)
            });
            return Ok(EllipsoidForm { a, optimality_gap: add_gap.max(S::zero()) });
        }
        if iter >= max_iters {
            // Out of budget: return the current certificate honestly.
            let a = DenseMat::from_fn(r, r, |i, j| {
                (m_inv.get(i, j) + m_inv.get(j, i)) / (rf + rf)
            });
            return Ok(EllipsoidForm { a, optimality_gap: add_gap });
        }
        iter += 1;

        // Pick the step with the larger leverage violation.
        let away_gap = S::one() - g_min / rf;
        let (j, kappa, is_away) = if away_gap > add_gap && j_min != usize::MAX {
            (j_min, g_min, true)
        } else {
            (j_max, g_max, false)
        };
        let mut beta = if is_away {
            // Away step cannot push u_j below zero: beta >= -u_j/(1-u_j).
            let floor = -u[j] / (S::one() - u[j]).max(S::epsilon());
            if kappa > S::one() {
                // Stationary point of log det along the away direction.
                ((kappa - rf) / (rf * (kappa - S::one()))).max(floor)
            } else {
                // Leverage at or below 1: log det increases all the way to the
                // boundary, so drop the point.
                floor
            }
        } else {
            (kappa - rf) / (rf * (kappa - S::one()))
        };
        if !beta.is_finite() {
            beta = S::zero();
        }
        if beta == S::zero() {
            let a = DenseMat::from_fn(r, r, |i, j| {
                (m_inv.get(i, j) + m_inv.get(j, i)) / (rf + rf)
            });
            return Ok(EllipsoidForm { a, optimality_gap: add_gap });
        }

        for w in u.iter_mut() {
            *w *= S::one() - beta;
        }
        u[j] += beta;
        if u[j] < S::zero() {
            u[j] = S::zero();
        }

        if iter.is_multiple_of(refresh_every) {
            m_inv = inv_spd(&design_matrix(&u)).ok_or(Error::DegeneratePointSet)?;
        } else {
            // Sherman-Morrison update of M^{-1} for
            // M_new = (1-beta) M + beta p p^T.
            let p = &points[j];
            let minv_p = m_inv.matvec(p);
            let g_j = dot(&minv_p, p);
            let one_minus = S::one() - beta;
            let denom = one_minus + beta * g_j;
            let coef = beta / denom;
            for i in 0..r {
                for k in 0..r {
                    let v = (m_inv.get(i, k) - coef * minv_p[i] * minv_p[k]) / one_minus;
                    m_inv.set(i, k, v);
                }
            }
        }
    }
}

/// Report from `verify_norm_bounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBoundReport<S> {
    pub max_left_norm: S,
    pub max_right_norm: S,
    /// min over entries of |<u_x, v_y>| / (||u_x|| ||v_y||).
    pub min_normalized_gap: S,
    pub ok: bool,
}

/// Rescales a factorization so every vector has norm at most dim^(1/4)(1+eps)
/// while preserving all inner products, and attaches the certificate.
///
/// A deficient left span (possible with user-supplied factorizations) is
/// repaired by reprojecting onto span{u_x}, which lowers the ambient
/// dimension before the ellipsoid is computed.
pub fn john_rescale<S: Scalar>(f: &Factorization<S>, eps: S) -> Result<Factorization<S>> {
    let span_tol = S::from_f64_lossy(1e-9);
    let mut work = if f.left_span_dim(span_tol) < f.dim() {
        f.reproject_to_left_span(span_tol)
    } else {
        f.clone()
    };
    let r = work.dim();
    if r == 0 {
        return Err(Error::DegeneratePointSet);
    }
    if r == 1 {
        // Scalars: divide the left side by its largest magnitude, multiply
        // the right side by it. Both families end up within the unit interval
        // exactly when all |<u, v>| <= 1.
        let scale = work
            .left_vectors()
            .iter()
            .map(|v| v[0].abs())
            .fold(S::zero(), S::max);
        if scale == S::zero() {
            return Err(Error::DegeneratePointSet);
        }
        let left: Vec<Vec<S>> = work.left_vectors().iter().map(|v| vec![v[0] / scale]).collect();
        let right: Vec<Vec<S>> = work.right_vectors().iter().map(|v| vec![v[0] * scale]).collect();
        let mut out = Factorization::from_vectors(1, left, right)?;
        out.set_certificate(eps);
        return Ok(out);
    }

    let ellipsoid = mvee_symmetric(work.left_vectors(), eps)?;
    // T = r^(1/4) A^(1/2); symmetric, so T^{-T} = T^{-1}.
    let (eigvals, q) = sym_eigen(&ellipsoid.a);
    if eigvals.iter().any(|&l| l <= S::zero()) {
        return Err(Error::DegeneratePointSet);
    }
    let quarter = S::from_count(r).powf(S::from_f64_lossy(0.25));
    let fwd = map_with_spectrum(&q, &eigvals, |l| quarter * l.sqrt());
    let inv = map_with_spectrum(&q, &eigvals, |l| (quarter * l.sqrt()).recip());
    let left: Vec<Vec<S>> = work.left_vectors().iter().map(|u| fwd.matvec(u)).collect();
    let right: Vec<Vec<S>> = work.right_vectors().iter().map(|v| inv.matvec(v)).collect();
    work = Factorization::from_vectors(r, left, right)?;
    work.set_certificate(eps);
    Ok(work)
}

/// Q f(diag) Q^T for a symmetric eigendecomposition.
fn map_with_spectrum<S: Scalar>(
    q: &DenseMat<S>,
    eigvals: &[S],
    f: impl Fn(S) -> S,
) -> DenseMat<S> {
    let n = q.rows;
    DenseMat::from_fn(n, n, |i, j| {
        let mut acc = S::zero();
        for (k, &l) in eigvals.iter().enumerate() {
            acc += q.get(i, k) * f(l) * q.get(j, k);
        }
        acc
    })
}

/// Checks the certified norm bounds and the normalized inner-product gap:
/// norms at most dim^(1/4)(1+eps) on both sides, and the gap at least
/// (1-2 eps)/sqrt(dim).
pub fn verify_norm_bounds<S: Scalar>(f: &Factorization<S>) -> Result<NormBoundReport<S>> {
    let cert = f.certificate().ok_or(Error::NotCertified)?;
    let (max_left, max_right) = f.max_norms();
    let r = S::from_count(f.dim().max(1));
    let mut min_gap = S::infinity();
    for x in 0..f.n_rows() {
        let nu = dot(f.left_vector(x), f.left_vector(x)).sqrt();
        for y in 0..f.n_cols() {
            let nv = dot(f.right_vector(y), f.right_vector(y)).sqrt();
            let gap = f.inner_product(x, y).abs() / (nu * nv);
            if gap < min_gap {
                min_gap = gap;
            }
        }
    }
    let bound = r.powf(S::from_f64_lossy(0.25)) * (S::one() + cert.eps);
    let gap_floor = (S::one() - cert.eps - cert.eps) / r.sqrt();
    Ok(NormBoundReport {
        max_left_norm: max_left,
        max_right_norm: max_right,
        min_normalized_gap: min_gap,
        ok: max_left <= bound && max_right <= bound && min_gap >= gap_floor,
    })
}
