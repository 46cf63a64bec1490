//! Gaussian hyperplane rounding: Sheppard's formula, the multi-hyperplane
//! intersection and single-cap samplers, and the driver that searches for an
//! almost-monochromatic rectangle by repeated seeded sampling.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::linalg::{dot, norm2};
use crate::matrix::{class_mass, EntryMeasure, Rectangle, Sign, SignMatrix};
use crate::rng::{mix_seed, Rng, RNG_ALGORITHM};
use crate::scalar::Scalar;

/// Which rounding construction an attempt uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingVariant {
    /// Intersection of the positive sides of T independent hyperplanes.
    MultiHyperplane,
    /// Single Gaussian with a spherical-cap threshold.
    SingleCap,
}

impl fmt::Display for RoundingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundingVariant::MultiHyperplane => write!(f, "multi_hyperplane"),
            RoundingVariant::SingleCap => write!(f, "single_cap"),
        }
    }
}

/// Parameters of a rounding run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingConfig<S> {
    /// Error tolerance delta in (0,1): the returned rectangle should have
    /// minority mass at most delta times its total mass.
    pub delta: S,
    /// Constant in the hyperplane-count formula. 7 matches exact norm
    /// bounds; the default 7.1 absorbs the (1+eps)^2 ellipsoid slack.
    pub constant_c7: S,
    pub max_attempts: usize,
    pub master_seed: u64,
    pub variant: RoundingVariant,
    /// Cap threshold multiplier, used only by the single-cap variant.
    pub cap_constant: S,
    /// Worker threads for attempt execution; 0 means available parallelism.
    pub threads: usize,
}

impl<S: Scalar> RoundingConfig<S> {
    pub fn new(delta: S, master_seed: u64) -> Self {
        assert!(delta > S::zero() && delta < S::one(), "delta must lie in (0,1)");
        RoundingConfig {
            delta,
            constant_c7: S::from_f64_lossy(7.1),
            max_attempts: 10_000,
            master_seed,
            variant: RoundingVariant::MultiHyperplane,
            cap_constant: S::one(),
            threads: 1,
        }
    }
}

/// Result of one rounding attempt (or of the best attempt of a search).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingOutcome<S> {
    pub rectangle: Rectangle,
    /// mu(R).
    pub mass: S,
    /// mu(R intersect Q_minus).
    pub error_mass: S,
    /// mu(R intersect Q_plus) - (1/delta) mu(R intersect Q_minus).
    pub objective: S,
    pub attempts_used: usize,
}

/// Probability that a random Gaussian hyperplane leaves two unit vectors with
/// inner product `alpha` both on its nonnegative side:
/// (1/2)(1 - arccos(alpha)/pi).
pub fn sheppard_probability<S: Scalar>(alpha: S) -> Result<S> {
    let one = S::one();
    let slack = S::from_f64_lossy(1e-12);
    if alpha.abs() > one + slack {
        return Err(Error::OutOfDomain(format!("|alpha| = {} exceeds 1", alpha.abs())));
    }
    let clamped = alpha.min(one).max(-one);
    let half = S::from_f64_lossy(0.5);
    Ok(half * (one - clamped.acos() / S::PI()))
}

/// Number of hyperplanes T = ceil(c7 ln(2/delta) sqrt(r)).
///
/// A 1e-9 slack guards the ceiling against floating-point noise when the
/// product lands exactly on an integer.
pub fn hyperplane_count<S: Scalar>(delta: S, r: usize, c7: S) -> usize {
    assert!(delta > S::zero() && delta < S::one(), "delta must lie in (0,1)");
    let t = c7 * (S::from_f64_lossy(2.0) / delta).ln() * S::from_count(r).sqrt();
    let adjusted = t - S::from_f64_lossy(1e-9);
    let count = adjusted.ceil().to_usize().unwrap_or(1);
    count.max(1)
}

fn normalized<S: Scalar>(v: &[S]) -> Vec<S> {
    let n = norm2(v);
    if n == S::zero() {
        v.to_vec()
    } else {
        v.iter().map(|&x| x / n).collect()
    }
}

/// The normalized vectors of a factorization, computed once per search.
struct UnitVectors<S> {
    left: Vec<Vec<S>>,
    right: Vec<Vec<S>>,
}

impl<S: Scalar> UnitVectors<S> {
    fn of(f: &Factorization<S>) -> Self {
        UnitVectors {
            left: f.left_vectors().iter().map(|v| normalized(v)).collect(),
            right: f.right_vectors().iter().map(|v| normalized(v)).collect(),
        }
    }

    /// Rows x with <u_x/||u_x||, g> >= threshold and columns y likewise.
    /// Ties at exactly the threshold count as inside.
    fn threshold_rectangle(&self, g: &[S], threshold: S) -> Rectangle {
        let rows = (0..self.left.len())
            .filter(|&x| dot(&self.left[x], g) >= threshold)
            .collect();
        let cols = (0..self.right.len())
            .filter(|&y| dot(&self.right[y], g) >= threshold)
            .collect();
        Rectangle::new(rows, cols)
    }
}

fn threshold_rectangle<S: Scalar>(f: &Factorization<S>, g: &[S], threshold: S) -> Rectangle {
    UnitVectors::of(f).threshold_rectangle(g, threshold)
}

/// Halfspace rectangle of a single Gaussian at threshold zero:
/// rows with <u_x/||u_x||, g> >= 0 times columns with <v_y/||v_y||, g> >= 0.
pub fn halfspace_rectangle<S: Scalar>(f: &Factorization<S>, g: &[S]) -> Rectangle {
    threshold_rectangle(f, g, S::zero())
}

fn gaussian<S: Scalar>(rng: &mut Rng, dim: usize) -> Vec<S> {
    (0..dim).map(|_| S::from_f64_lossy(rng.next_normal())).collect()
}

fn outcome_for<S: Scalar>(
    m: &SignMatrix,
    mu: &EntryMeasure<S>,
    delta: S,
    rectangle: Rectangle,
    attempts_used: usize,
) -> RoundingOutcome<S> {
    let plus = class_mass(m, mu, &rectangle, Sign::Plus);
    let minus = class_mass(m, mu, &rectangle, Sign::Minus);
    RoundingOutcome {
        rectangle,
        mass: plus + minus,
        error_mass: minus,
        objective: plus - minus / delta,
        attempts_used,
    }
}

/// One multi-hyperplane attempt: draws T = hyperplane_count(delta, dim, c7)
/// Gaussians from the stream seeded by (master_seed, attempt_index) and
/// returns the full T-fold intersection rectangle with its masses.
pub fn sample_multi_hyperplane<S: Scalar>(
    m: &SignMatrix,
    f: &Factorization<S>,
    mu: &EntryMeasure<S>,
    config: &RoundingConfig<S>,
    attempt_index: usize,
) -> Result<RoundingOutcome<S>> {
    if !f.norm_bound_certified() {
        return Err(Error::NotCertified);
    }
    let t = hyperplane_count(config.delta, f.dim(), config.constant_c7);
    let units = UnitVectors::of(f);
    let mut rng = Rng::new(mix_seed(config.master_seed, attempt_index as u64));
    let mut rect = Rectangle::new((0..f.n_rows()).collect(), (0..f.n_cols()).collect());
    for _ in 0..t {
        let g = gaussian::<S>(&mut rng, f.dim());
        rect = rect.intersect(&units.threshold_rectangle(&g, S::zero()));
    }
    Ok(outcome_for(m, mu, config.delta, rect, 1))
}

/// One single-cap attempt: a single Gaussian with threshold
/// s = cap_constant * dim^(1/4) sqrt(ln dim) (s = cap_constant when dim = 1,
/// where the formula degenerates).
pub fn sample_single_cap<S: Scalar>(
    m: &SignMatrix,
    f: &Factorization<S>,
    mu: &EntryMeasure<S>,
    config: &RoundingConfig<S>,
    attempt_index: usize,
) -> Result<RoundingOutcome<S>> {
    if !f.norm_bound_certified() {
        return Err(Error::NotCertified);
    }
    let s = cap_threshold(f.dim(), config.cap_constant);
    let mut rng = Rng::new(mix_seed(config.master_seed, attempt_index as u64));
    let g = gaussian::<S>(&mut rng, f.dim());
    let rect = threshold_rectangle(f, &g, s);
    Ok(outcome_for(m, mu, config.delta, rect, 1))
}

/// Cap threshold s for ambient dimension r.
pub fn cap_threshold<S: Scalar>(r: usize, cap_constant: S) -> S {
    if r <= 1 {
        cap_constant
    } else {
        let rf = S::from_count(r);
        cap_constant * rf.powf(S::from_f64_lossy(0.25)) * rf.ln().sqrt()
    }
}

/// Search failure: every examined rectangle had objective <= 0. Carries the
/// best attempt for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct NoQualifyingRectangle<S> {
    pub best: RoundingOutcome<S>,
}

impl<S: Scalar> fmt::Display for NoQualifyingRectangle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no qualifying rectangle found (best objective {}, mass {})",
            self.best.objective, self.best.mass
        )
    }
}

impl<S: Scalar> std::error::Error for NoQualifyingRectangle<S> {}

/// Candidate ranking: higher objective wins; ties go to the earlier attempt,
/// then to the shallower intersection (larger rectangle).
fn better<S: Scalar>(
    a: &(RoundingOutcome<S>, usize, usize),
    b: &(RoundingOutcome<S>, usize, usize),
) -> bool {
    if a.0.objective != b.0.objective {
        return a.0.objective > b.0.objective;
    }
    (a.1, a.2) < (b.1, b.2)
}

/// Finds a rectangle with objective mu(R & Q_plus) - (1/delta) mu(R & Q_minus)
/// strictly positive, which forces mu(R & Q_minus) <= delta mu(R).
///
/// Each attempt draws an independent Gaussian stream. For the
/// multi-hyperplane variant the attempt walks the intersection chain
/// R_1 & ... & R_t for every depth t = 0..=T and scores each prefix; a raw
/// T-fold intersection is empty except with probability about 2^-T, so
/// scanning depths is what makes the positive expectation reachable by
/// sampling. The single-cap variant scores its one rectangle per attempt.
///
/// Deterministic for fixed (inputs, config) regardless of thread count.
pub fn find_almost_monochromatic<S: Scalar>(
    m: &SignMatrix,
    f: &Factorization<S>,
    mu: &EntryMeasure<S>,
    config: &RoundingConfig<S>,
) -> std::result::Result<RoundingOutcome<S>, FindError<S>> {
    if !f.norm_bound_certified() {
        return Err(FindError::Domain(Error::NotCertified));
    }
    let plus_total = class_mass(m, mu, &m.full_rectangle(), Sign::Plus);
    if plus_total < config.delta {
        return Err(FindError::Domain(Error::PlusMassBelowDelta {
            plus_mass: plus_total.to_f64().unwrap_or(f64::NAN),
            delta: config.delta.to_f64().unwrap_or(f64::NAN),
        }));
    }

    let units = UnitVectors::of(f);
    let t = hyperplane_count(config.delta, f.dim(), config.constant_c7);
    let cap = cap_threshold(f.dim(), config.cap_constant);
    let run_attempt = |attempt: usize| -> (RoundingOutcome<S>, usize, usize) {
        let mut rng = Rng::new(mix_seed(config.master_seed, attempt as u64));
        match config.variant {
            RoundingVariant::MultiHyperplane => {
                let mut rect =
                    Rectangle::new((0..f.n_rows()).collect(), (0..f.n_cols()).collect());
                let mut best = (outcome_for(m, mu, config.delta, rect.clone(), 1), attempt, 0);
                for depth in 1..=t {
                    let g = gaussian::<S>(&mut rng, f.dim());
                    rect = rect.intersect(&units.threshold_rectangle(&g, S::zero()));
                    let cand = (outcome_for(m, mu, config.delta, rect.clone(), 1), attempt, depth);
                    if better(&cand, &best) {
                        best = cand;
                    }
                    if rect.is_empty() {
                        break;
                    }
                }
                best
            }
            RoundingVariant::SingleCap => {
                let g = gaussian::<S>(&mut rng, f.dim());
                let rect = units.threshold_rectangle(&g, cap);
                (outcome_for(m, mu, config.delta, rect, 1), attempt, 0)
            }
        }
    };

    let attempts = config.max_attempts.max(1);
    let threads = if config.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        config.threads
    };
    let threads = threads.min(attempts).max(1);

    let best = if threads == 1 {
        let mut best = run_attempt(0);
        for attempt in 1..attempts {
            let cand = run_attempt(attempt);
            if better(&cand, &best) {
                best = cand;
            }
        }
        best
    } else {
        // Work-stealing over attempt indices; the max-by-objective reduction
        // is associative and tie-broken by attempt index, so the result does
        // not depend on scheduling.
        let counter = AtomicU64::new(0);
        let global: Mutex<Option<(RoundingOutcome<S>, usize, usize)>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| {
                    let mut local: Option<(RoundingOutcome<S>, usize, usize)> = None;
                    loop {
                        let attempt = counter.fetch_add(1, Ordering::Relaxed) as usize;
                        if attempt >= attempts {
                            break;
                        }
                        let cand = run_attempt(attempt);
                        if local.as_ref().is_none_or(|b| better(&cand, b)) {
                            local = Some(cand);
                        }
                    }
                    if let Some(cand) = local {
                        let mut slot = global.lock().unwrap();
                        if slot.as_ref().is_none_or(|b| better(&cand, b)) {
                            *slot = Some(cand);
                        }
                    }
                });
            }
        });
        global.into_inner().unwrap().expect("at least one attempt ran")
    };

    let mut outcome = best.0;
    outcome.attempts_used = attempts;
    if outcome.objective > S::zero() {
        Ok(outcome)
    } else {
        Err(FindError::NoQualifyingRectangle(NoQualifyingRectangle { best: outcome }))
    }
}

/// Errors from `find_almost_monochromatic`.
#[derive(Debug, Clone, PartialEq)]
pub enum FindError<S> {
    /// Precondition failure (certificate missing, mu(Q_1) < delta).
    Domain(Error),
    NoQualifyingRectangle(NoQualifyingRectangle<S>),
}

impl<S: Scalar> fmt::Display for FindError<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FindError::Domain(e) => write!(f, "{e}"),
            FindError::NoQualifyingRectangle(e) => write!(f, "{e}"),
        }
    }
}

impl<S: Scalar> std::error::Error for FindError<S> {}

/// Formats a number with 12 significant digits, for stable reports.
pub fn fmt_sig12<S: Scalar>(v: S) -> String {
    format!("{:.11e}", v.to_f64().unwrap_or(f64::NAN))
}

/// Line-oriented key=value run report for a rounding search.
pub fn run_report<S: Scalar>(
    config: &RoundingConfig<S>,
    dim: usize,
    outcome: &RoundingOutcome<S>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("variant={}\n", config.variant));
    out.push_str(&format!("r={dim}\n"));
    out.push_str(&format!("delta={}\n", fmt_sig12(config.delta)));
    match config.variant {
        RoundingVariant::MultiHyperplane => {
            let t = hyperplane_count(config.delta, dim, config.constant_c7);
            out.push_str(&format!("T={t}\n"));
        }
        RoundingVariant::SingleCap => {
            out.push_str(&format!("s={}\n", fmt_sig12(cap_threshold(dim, config.cap_constant))));
        }
    }
    out.push_str(&format!("attempts={}\n", outcome.attempts_used));
    out.push_str(&format!("best_objective={}\n", fmt_sig12(outcome.objective)));
    out.push_str(&format!("mass={}\n", fmt_sig12(outcome.mass)));
    out.push_str(&format!("error_mass={}\n", fmt_sig12(outcome.error_mass)));
    out.push_str(&format!("seed={}\n", config.master_seed));
    out.push_str(&format!("rng_algorithm={RNG_ALGORITHM}\n"));
    out
}
