//! Rectangle discrepancy: single-Gaussian lower-bound witnesses, an exact
//! best-response oracle over rectangles, and a multiplicative-weights
//! approximation of the discrepancy game value.

use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::matrix::{class_mass, EntryMeasure, Rectangle, Sign, SignMatrix};
use crate::rectangle::ORACLE_DIM_LIMIT;
use crate::rng::{mix_seed, Rng};
use crate::rounding::halfspace_rectangle;
use crate::scalar::Scalar;

/// Outcome of a witness search.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport<S> {
    pub rectangle: Rectangle,
    /// Best mu(R & Q_plus) - mu(R & Q_minus) across trials.
    pub best_value: S,
    /// Empirical mean of the trial values.
    pub mean_value: S,
    pub trials: usize,
}

/// Samples `trials` zero-threshold single-Gaussian rectangles and returns the
/// one with the largest signed mass difference mu(R & Q_plus) - mu(R & Q_minus),
/// together with the mean across trials.
///
/// Requires mu(Q_plus) >= 1/2; when the majority class is -1 the caller
/// negates the matrix first. Trials use the per-index seeding contract, so
/// the report does not depend on the thread count.
pub fn discrepancy_witness<S: Scalar>(
    m: &SignMatrix,
    f: &Factorization<S>,
    mu: &EntryMeasure<S>,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<WitnessReport<S>> {
    if !f.norm_bound_certified() {
        return Err(Error::NotCertified);
    }
    let full = m.full_rectangle();
    let half = S::from_f64_lossy(0.5);
    if class_mass(m, mu, &full, Sign::Plus) < half {
        return Err(Error::MajorityClassNegative);
    }
    assert!(trials >= 1);

    let run_trial = |trial: usize| -> (S, Rectangle) {
        let mut rng = Rng::new(mix_seed(seed, trial as u64));
        let g: Vec<S> =
            (0..f.dim()).map(|_| S::from_f64_lossy(rng.next_normal())).collect();
        let rect = halfspace_rectangle(f, &g);
        let plus = class_mass(m, mu, &rect, Sign::Plus);
        let minus = class_mass(m, mu, &rect, Sign::Minus);
        (plus - minus, rect)
    };

    let threads = if threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        threads
    };
    let threads = threads.min(trials).max(1);

    // Values are collected per index so the sequential sum (and therefore the
    // mean) is bitwise independent of the thread layout.
    let mut values = vec![S::zero(); trials];
    let mut best: (S, usize, Option<Rectangle>) = (S::neg_infinity(), usize::MAX, None);
    if threads == 1 {
        for trial in 0..trials {
            let (v, rect) = run_trial(trial);
            values[trial] = v;
            if v > best.0 || (v == best.0 && trial < best.1) {
                best = (v, trial, Some(rect));
            }
        }
    } else {
        let chunk = trials.div_ceil(threads);
        let mut slots: Vec<(S, usize, Option<Rectangle>)> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (t, values_chunk) in values.chunks_mut(chunk).enumerate() {
                let start = t * chunk;
                handles.push(scope.spawn(move || {
                    let mut local: (S, usize, Option<Rectangle>) =
                        (S::neg_infinity(), usize::MAX, None);
                    for (offset, slot) in values_chunk.iter_mut().enumerate() {
                        let trial = start + offset;
                        let (v, rect) = run_trial(trial);
                        *slot = v;
                        if v > local.0 || (v == local.0 && trial < local.1) {
                            local = (v, trial, Some(rect));
                        }
                    }
                    local
                }));
            }
            for h in handles {
                slots.push(h.join().expect("witness worker panicked"));
            }
        });
        for cand in slots {
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                best = cand;
            }
        }
    }
    let mut sum = S::zero();
    for v in &values {
        sum += *v;
    }
    Ok(WitnessReport {
        rectangle: best.2.expect("at least one trial ran"),
        best_value: best.0,
        mean_value: sum / S::from_count(trials),
        trials,
    })
}

/// Exact maximizer of |sum_{(x,y) in R} weights_xy M_xy| over rectangles,
/// by enumerating subsets of the smaller dimension; for a fixed subset the
/// optimal complementary lines are those with positive (respectively
/// negative) restricted contribution.
pub fn best_rectangle_response<S: Scalar>(
    m: &SignMatrix,
    weights: &[S],
) -> Result<(Rectangle, S)> {
    if weights.len() != m.n_entries() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} weights", m.n_entries()),
            found: format!("{}", weights.len()),
        });
    }
    let min_dim = m.n_rows().min(m.n_cols());
    if min_dim > ORACLE_DIM_LIMIT {
        return Err(Error::InstanceTooLarge { min_dim, limit: ORACLE_DIM_LIMIT });
    }
    let cols_smaller = m.n_cols() <= m.n_rows();
    let k = if cols_smaller { m.n_cols() } else { m.n_rows() };
    let n_other = if cols_smaller { m.n_rows() } else { m.n_cols() };
    let signed = |x: usize, y: usize| -> S {
        weights[x * m.n_cols() + y] * m.value::<S>(x, y)
    };

    let mut best_rect = Rectangle::empty();
    let mut best_value = S::zero();
    let mut subset = Vec::with_capacity(k);
    for mask in 1u32..(1u32 << k) {
        subset.clear();
        for i in 0..k {
            if mask & (1 << i) != 0 {
                subset.push(i);
            }
        }
        // Contribution of each complementary line restricted to the subset.
        let mut contrib = vec![S::zero(); n_other];
        for (i, c) in contrib.iter_mut().enumerate() {
            for &j in &subset {
                let (x, y) = if cols_smaller { (i, j) } else { (j, i) };
                *c += signed(x, y);
            }
        }
        // Maximization and minimization passes; the larger magnitude wins.
        for positive_pass in [true, false] {
            let lines: Vec<usize> = (0..n_other)
                .filter(|&i| if positive_pass { contrib[i] > S::zero() } else { contrib[i] < S::zero() })
                .collect();
            if lines.is_empty() {
                continue;
            }
            let total: S = lines.iter().map(|&i| contrib[i]).sum();
            let magnitude = total.abs();
            if magnitude > best_value {
                best_value = magnitude;
                best_rect = if cols_smaller {
                    Rectangle::new(lines, subset.clone())
                } else {
                    Rectangle::new(subset.clone(), lines)
                };
            }
        }
    }
    Ok((best_rect, best_value))
}

/// Exact max over rectangles of |mu(R & Q_plus) - mu(R & Q_minus)|.
pub fn brute_force_rectangle_discrepancy<S: Scalar>(
    m: &SignMatrix,
    mu: &EntryMeasure<S>,
) -> Result<S> {
    let (_, value) = best_rectangle_response(m, mu.weights())?;
    Ok(value)
}

/// Multiplicative-weights approximation of
/// disc(f) = min_mu max_R |mu(R & Q_plus) - mu(R & Q_minus)|.
///
/// The measure player runs multiplicative weights against the exact best
/// response; each iteration's response value upper-bounds disc(f), so the
/// running minimum converges toward it from above at rate
/// O(sqrt(log(nm)/iterations)). Returns that minimum and the measure
/// attaining it.
pub fn game_discrepancy<S: Scalar>(
    m: &SignMatrix,
    iterations: usize,
) -> Result<(S, EntryMeasure<S>)> {
    assert!(iterations >= 1);
    let n = m.n_rows();
    let cols = m.n_cols();
    let entries = n * cols;
    let eta = (S::from_count(entries).ln() / S::from_count(iterations)).sqrt();
    let mut weights = vec![S::one(); entries];
    let mut best_value = S::infinity();
    let mut best_measure: Option<EntryMeasure<S>> = None;
    for _ in 0..iterations {
        let mu = EntryMeasure::normalized(n, cols, weights.clone())
            .expect("weights stay positive");
        let (rect, value) = best_rectangle_response(m, mu.weights())?;
        if value < best_value {
            best_value = value;
            best_measure = Some(mu.clone());
        }
        // The response pays |signed mass|; push measure away from entries
        // that contributed to it.
        let signed_total: S = rect
            .rows()
            .iter()
            .flat_map(|&x| rect.cols().iter().map(move |&y| (x, y)))
            .map(|(x, y)| mu.weight(x, y) * m.value::<S>(x, y))
            .sum();
        let orientation = if signed_total >= S::zero() { S::one() } else { -S::one() };
        for &x in rect.rows() {
            for &y in rect.cols() {
                let loss = orientation * m.value::<S>(x, y);
                weights[x * cols + y] *= (-eta * loss).exp();
            }
        }
        // The measure only sees weight ratios; renormalize by the largest
        // weight each round so long runs cannot underflow to zero.
        let max_w = weights.iter().copied().fold(S::zero(), S::max);
        for w in &mut weights {
            *w /= max_w;
        }
    }
    Ok((best_value, best_measure.expect("at least one iteration ran")))
}
