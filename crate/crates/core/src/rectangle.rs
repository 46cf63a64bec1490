//! Monochromatic sub-rectangle extraction and brute-force rectangle oracles
//! for small instances.

use crate::error::{Error, Result};
use crate::matrix::{EntryMeasure, Rectangle, Sign, SignMatrix};
use crate::scalar::Scalar;

/// Dimension guard for the exponential oracles.
pub const ORACLE_DIM_LIMIT: usize = 20;

/// Shrinks a rectangle to a fully monochromatic one of the target sign.
///
/// Greedy deletion: while an off-sign entry remains, delete the row or column
/// with the highest fraction of off-sign entries (rows win ties against
/// columns, lower index wins within a side). The greedy result is floored by
/// the two single-axis wipes (drop all dirty rows, or all dirty columns),
/// which the greedy walk alone can undercut. The result is empty only when
/// the rectangle has no target-sign entry at all.
pub fn extract_monochromatic_subrectangle(
    m: &SignMatrix,
    r: &Rectangle,
    target: Sign,
) -> Rectangle {
    let greedy = greedy_deletion(m, r, target);
    let (row_wipe, col_wipe) = single_axis_wipes(m, r, target);
    let mut best = greedy;
    for cand in [row_wipe, col_wipe] {
        if cand.area() > best.area() {
            best = cand;
        }
    }
    best
}

fn greedy_deletion(m: &SignMatrix, r: &Rectangle, target: Sign) -> Rectangle {
    let mut rows: Vec<usize> = r.rows().to_vec();
    let mut cols: Vec<usize> = r.cols().to_vec();
    loop {
        if rows.is_empty() || cols.is_empty() {
            return Rectangle::empty();
        }
        let mut row_bad = vec![0usize; rows.len()];
        let mut col_bad = vec![0usize; cols.len()];
        let mut total_bad = 0usize;
        for (i, &x) in rows.iter().enumerate() {
            for (j, &y) in cols.iter().enumerate() {
                if m.sign(x, y) != target {
                    row_bad[i] += 1;
                    col_bad[j] += 1;
                    total_bad += 1;
                }
            }
        }
        if total_bad == 0 {
            return Rectangle::new(rows, cols);
        }
        // Compare fractions bad/len as cross products to stay in integers.
        let (mut best_is_row, mut best_idx, mut best_num, mut best_den) = (true, 0usize, 0usize, 1usize);
        for (i, &bad) in row_bad.iter().enumerate() {
            if bad * best_den > best_num * cols.len() {
                best_is_row = true;
                best_idx = i;
                best_num = bad;
                best_den = cols.len();
            }
        }
        for (j, &bad) in col_bad.iter().enumerate() {
            if bad * best_den > best_num * rows.len() {
                best_is_row = false;
                best_idx = j;
                best_num = bad;
                best_den = rows.len();
            }
        }
        if best_is_row {
            rows.remove(best_idx);
        } else {
            cols.remove(best_idx);
        }
    }
}

/// The two single-axis wipes: keep only the rows clean on all of R's
/// columns, respectively only the columns clean on all of R's rows. Both are
/// monochromatic by construction.
fn single_axis_wipes(m: &SignMatrix, r: &Rectangle, target: Sign) -> (Rectangle, Rectangle) {
    let clean_rows: Vec<usize> = r
        .rows()
        .iter()
        .copied()
        .filter(|&x| r.cols().iter().all(|&y| m.sign(x, y) == target))
        .collect();
    let clean_cols: Vec<usize> = r
        .cols()
        .iter()
        .copied()
        .filter(|&y| r.rows().iter().all(|&x| m.sign(x, y) == target))
        .collect();
    let row_wipe = if clean_rows.is_empty() {
        Rectangle::empty()
    } else {
        Rectangle::new(clean_rows, r.cols().to_vec())
    };
    let col_wipe = if clean_cols.is_empty() {
        Rectangle::empty()
    } else {
        Rectangle::new(r.rows().to_vec(), clean_cols)
    };
    (row_wipe, col_wipe)
}

/// Area of the better single-axis wipe: a lower bound the extraction clears.
pub fn single_axis_wipe_area(m: &SignMatrix, r: &Rectangle, target: Sign) -> usize {
    let (row_wipe, col_wipe) = single_axis_wipes(m, r, target);
    row_wipe.area().max(col_wipe.area())
}

fn check_oracle_guard(m: &SignMatrix) -> Result<()> {
    let min_dim = m.n_rows().min(m.n_cols());
    if min_dim > ORACLE_DIM_LIMIT {
        return Err(Error::InstanceTooLarge { min_dim, limit: ORACLE_DIM_LIMIT });
    }
    Ok(())
}

/// Iterates over the subsets of the smaller dimension; the closure receives
/// the subset as sorted indices. Returns nothing; the closure accumulates.
fn for_each_small_side_subset(
    m: &SignMatrix,
    mut visit: impl FnMut(&[usize], bool),
) {
    let cols_smaller = m.n_cols() <= m.n_rows();
    let k = if cols_smaller { m.n_cols() } else { m.n_rows() };
    let mut subset = Vec::with_capacity(k);
    for mask in 0u32..(1u32 << k) {
        subset.clear();
        for i in 0..k {
            if mask & (1 << i) != 0 {
                subset.push(i);
            }
        }
        visit(&subset, cols_smaller);
    }
}

/// Exact maximum-area rectangle whose entries all equal `target`, by
/// enumerating subsets of the smaller dimension and keeping, for each, every
/// line of the other dimension that is clean on it. Deterministic: among
/// optima the lexicographically smallest (rows, cols) pair is returned.
pub fn brute_force_max_monochromatic(m: &SignMatrix, target: Sign) -> Result<Rectangle> {
    check_oracle_guard(m)?;
    let mut best = Rectangle::empty();
    let mut best_area = 0usize;
    for_each_small_side_subset(m, |subset, cols_smaller| {
        if subset.is_empty() {
            return;
        }
        let other: Vec<usize> = if cols_smaller {
            (0..m.n_rows())
                .filter(|&x| subset.iter().all(|&y| m.sign(x, y) == target))
                .collect()
        } else {
            (0..m.n_cols())
                .filter(|&y| subset.iter().all(|&x| m.sign(x, y) == target))
                .collect()
        };
        let area = other.len() * subset.len();
        if area == 0 {
            return;
        }
        let cand = if cols_smaller {
            Rectangle::new(other, subset.to_vec())
        } else {
            Rectangle::new(subset.to_vec(), other)
        };
        let better = area > best_area
            || (area == best_area
                && (cand.rows(), cand.cols()) < (best.rows(), best.cols()));
        if better {
            best_area = area;
            best = cand;
        }
    });
    Ok(best)
}

/// Exact maximizer of mu(R) over rectangles with
/// mu(R & Q_minus) <= delta * mu(R).
///
/// Column subsets of the smaller dimension are enumerated; for each, rows are
/// chosen optimally: a row with error at most delta times its mass always
/// helps, and the remaining rows form a knapsack over the slack budget,
/// solved exactly by meet-in-the-middle. The knapsack side needs its own
/// guard, so both dimensions are capped here.
pub fn brute_force_best_almost_mono<S: Scalar>(
    m: &SignMatrix,
    mu: &EntryMeasure<S>,
    delta: S,
) -> Result<Rectangle> {
    check_oracle_guard(m)?;
    let max_dim = m.n_rows().max(m.n_cols());
    if max_dim > 32 {
        return Err(Error::InstanceTooLarge { min_dim: max_dim, limit: 32 });
    }
    let mut best = Rectangle::empty();
    let mut best_mass = S::zero();
    for_each_small_side_subset(m, |subset, cols_smaller| {
        if subset.is_empty() {
            return;
        }
        let n_other = if cols_smaller { m.n_rows() } else { m.n_cols() };
        // Per line of the other dimension: total mass and slack
        // w = error - delta * mass restricted to the subset.
        let mut masses = Vec::with_capacity(n_other);
        let mut slacks = Vec::with_capacity(n_other);
        for i in 0..n_other {
            let mut mass = S::zero();
            let mut err = S::zero();
            for &j in subset {
                let (x, y) = if cols_smaller { (i, j) } else { (j, i) };
                let w = mu.weight(x, y);
                mass += w;
                if m.sign(x, y) == Sign::Minus {
                    err += w;
                }
            }
            masses.push(mass);
            slacks.push(err - delta * mass);
        }
        // Lines with nonpositive slack always go in.
        let mut chosen: Vec<usize> = Vec::new();
        let mut budget = S::zero();
        let mut mass_sum = S::zero();
        let mut positive: Vec<usize> = Vec::new();
        for i in 0..n_other {
            if slacks[i] <= S::zero() {
                chosen.push(i);
                budget -= slacks[i];
                mass_sum += masses[i];
            } else {
                positive.push(i);
            }
        }
        // Knapsack over positive-slack lines: maximize added mass subject to
        // total slack <= budget, exactly via meet-in-the-middle.
        let (extra_mass, extra_lines) = knapsack_max_mass(&positive, &masses, &slacks, budget);
        let total_mass = mass_sum + extra_mass;
        if chosen.is_empty() && extra_lines.is_empty() {
            return;
        }
        if total_mass > best_mass {
            best_mass = total_mass;
            let mut lines = chosen;
            lines.extend(extra_lines);
            best = if cols_smaller {
                Rectangle::new(lines, subset.to_vec())
            } else {
                Rectangle::new(subset.to_vec(), lines)
            };
        }
    });
    Ok(best)
}

/// Exact maximum of sum(mass) over subsets with sum(slack) <= budget.
fn knapsack_max_mass<S: Scalar>(
    items: &[usize],
    masses: &[S],
    slacks: &[S],
    budget: S,
) -> (S, Vec<usize>) {
    if items.is_empty() {
        return (S::zero(), Vec::new());
    }
    let (first, second) = items.split_at(items.len() / 2);
    let enumerate = |half: &[usize]| -> Vec<(S, S, u64)> {
        // (slack, mass, bitmask within half)
        let mut out = Vec::with_capacity(1 << half.len());
        for mask in 0u64..(1u64 << half.len()) {
            let mut s = S::zero();
            let mut m = S::zero();
            for (bit, &idx) in half.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    s += slacks[idx];
                    m += masses[idx];
                }
            }
            out.push((s, m, mask));
        }
        out
    };
    let a = enumerate(first);
    let mut b = enumerate(second);
    // Sort by slack and keep prefix maxima of mass for O(log) lookups.
    b.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.2.cmp(&y.2)));
    let mut prefix_best: Vec<usize> = Vec::with_capacity(b.len());
    let mut best_so_far = 0usize;
    for (i, entry) in b.iter().enumerate() {
        if entry.1 > b[best_so_far].1 {
            best_so_far = i;
        }
        prefix_best.push(best_so_far);
    }
    let mut best_mass = S::neg_infinity();
    let mut best_pair = (0u64, 0u64);
    for &(sa, ma, mask_a) in &a {
        let remaining = budget - sa;
        if remaining < S::zero() {
            continue;
        }
        // Largest index in b with slack <= remaining.
        let mut lo = 0usize;
        let mut hi = b.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if b[mid].0 <= remaining {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            continue;
        }
        let j = prefix_best[lo - 1];
        let total = ma + b[j].1;
        if total > best_mass {
            best_mass = total;
            best_pair = (mask_a, b[j].2);
        }
    }
    if best_mass == S::neg_infinity() {
        return (S::zero(), Vec::new());
    }
    let mut lines = Vec::new();
    for (bit, &idx) in first.iter().enumerate() {
        if best_pair.0 & (1 << bit) != 0 {
            lines.push(idx);
        }
    }
    for (bit, &idx) in second.iter().enumerate() {
        if best_pair.1 & (1 << bit) != 0 {
            lines.push(idx);
        }
    }
    (best_mass, lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{class_mass, restrict};

    fn is_monochromatic(m: &SignMatrix, r: &Rectangle, target: Sign) -> bool {
        r.rows().iter().all(|&x| r.cols().iter().all(|&y| m.sign(x, y) == target))
    }

    fn equality(n: usize) -> SignMatrix {
        SignMatrix::from_fn(n, n, |x, y| if x == y { Sign::Plus } else { Sign::Minus })
    }

    #[test]
    fn extract_is_identity_on_monochromatic_input() {
        let m = SignMatrix::from_fn(3, 4, |_, _| Sign::Plus);
        let full = m.full_rectangle();
        assert_eq!(extract_monochromatic_subrectangle(&m, &full, Sign::Plus), full);
    }

    #[test]
    fn extract_single_off_sign_in_4x4() {
        let m = SignMatrix::from_fn(4, 4, |x, y| {
            if (x, y) == (1, 2) { Sign::Minus } else { Sign::Plus }
        });
        let full = m.full_rectangle();
        let got = extract_monochromatic_subrectangle(&m, &full, Sign::Plus);
        assert!(is_monochromatic(&m, &got, Sign::Plus));
        assert!(got.area() >= 12, "area {}", got.area());
        // Brute force confirms 12 is the optimum.
        let opt = brute_force_max_monochromatic(&m, Sign::Plus).unwrap();
        assert_eq!(opt.area(), 12);
    }

    #[test]
    fn extract_checkerboard_keeps_one_cell() {
        let m = SignMatrix::from_fn(2, 2, |x, y| {
            if (x + y) % 2 == 0 { Sign::Plus } else { Sign::Minus }
        });
        let got = extract_monochromatic_subrectangle(&m, &m.full_rectangle(), Sign::Plus);
        assert!(is_monochromatic(&m, &got, Sign::Plus));
        assert_eq!(got.area(), 1);
    }

    #[test]
    fn extract_with_no_target_entries_is_empty() {
        let m = SignMatrix::from_fn(2, 3, |_, _| Sign::Minus);
        let got = extract_monochromatic_subrectangle(&m, &m.full_rectangle(), Sign::Plus);
        assert!(got.is_empty());
    }

    #[test]
    fn extract_beats_single_axis_wipe_on_random_instances() {
        let mut rng = crate::rng::Rng::new(314);
        for _ in 0..200 {
            let n = 2 + (rng.next_below(7) as usize);
            let mm = 2 + (rng.next_below(7) as usize);
            let m = SignMatrix::from_fn(n, mm, |_, _| {
                if rng.next_below(4) == 0 { Sign::Minus } else { Sign::Plus }
            });
            let full = m.full_rectangle();
            let got = extract_monochromatic_subrectangle(&m, &full, Sign::Plus);
            assert!(is_monochromatic(&m, &got, Sign::Plus));
            let wipe = single_axis_wipe_area(&m, &full, Sign::Plus);
            assert!(got.area() >= wipe, "greedy {} < wipe {wipe}", got.area());
            // And never better than the exact oracle.
            let opt = brute_force_max_monochromatic(&m, Sign::Plus).unwrap();
            assert!(opt.area() >= got.area());
        }
    }

    #[test]
    fn oracle_on_all_plus_returns_everything() {
        let m = SignMatrix::from_fn(3, 5, |_, _| Sign::Plus);
        let got = brute_force_max_monochromatic(&m, Sign::Plus).unwrap();
        assert_eq!(got, m.full_rectangle());
    }

    #[test]
    fn oracle_on_equality_pattern_minus_blocks() {
        let m = equality(4);
        let got = brute_force_max_monochromatic(&m, Sign::Minus).unwrap();
        assert_eq!(got.area(), 4);
        assert!(is_monochromatic(&m, &got, Sign::Minus));
    }

    #[test]
    fn oracle_guard_rejects_large_instances() {
        let m = SignMatrix::from_fn(21, 21, |_, _| Sign::Plus);
        assert!(matches!(
            brute_force_max_monochromatic(&m, Sign::Plus),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn almost_mono_with_delta_one_is_the_full_matrix() {
        let m = equality(3);
        let mu = EntryMeasure::<f64>::uniform(3, 3);
        let got = brute_force_best_almost_mono(&m, &mu, 1.0).unwrap();
        assert_eq!(got, m.full_rectangle());
    }

    #[test]
    fn almost_mono_all_plus_any_delta() {
        let m = SignMatrix::from_fn(2, 4, |_, _| Sign::Plus);
        let mu = EntryMeasure::<f64>::uniform(2, 4);
        let got = brute_force_best_almost_mono(&m, &mu, 0.01).unwrap();
        assert_eq!(got, m.full_rectangle());
    }

    #[test]
    fn almost_mono_two_block_delta_zero_takes_one_cell() {
        let m = equality(2);
        let mu = EntryMeasure::<f64>::uniform(2, 2);
        let got = brute_force_best_almost_mono(&m, &mu, 0.0).unwrap();
        assert_eq!(got.area(), 1);
        let mass = mu.rectangle_mass(&got);
        assert!((mass - 0.25).abs() < 1e-15);
        assert_eq!(class_mass(&m, &mu, &got, Sign::Minus), 0.0);
    }

    #[test]
    fn almost_mono_matches_full_enumeration_on_small_instances() {
        let mut rng = crate::rng::Rng::new(2718);
        for _ in 0..40 {
            let n = 2 + (rng.next_below(4) as usize);
            let mm = 2 + (rng.next_below(4) as usize);
            let m = SignMatrix::from_fn(n, mm, |_, _| {
                if rng.next_below(3) == 0 { Sign::Minus } else { Sign::Plus }
            });
            let weights: Vec<f64> = (0..n * mm).map(|_| rng.next_f64() + 0.01).collect();
            let mu = EntryMeasure::normalized(n, mm, weights).unwrap();
            let delta = 0.2;
            let got = brute_force_best_almost_mono(&m, &mu, delta).unwrap();
            // Exhaustive reference over all row and column subsets.
            let mut best_mass = 0.0f64;
            for rmask in 1u32..(1 << n) {
                for cmask in 1u32..(1 << mm) {
                    let rows: Vec<usize> = (0..n).filter(|i| rmask & (1 << i) != 0).collect();
                    let cols: Vec<usize> = (0..mm).filter(|j| cmask & (1 << j) != 0).collect();
                    let rect = Rectangle::new(rows, cols);
                    let mass = mu.rectangle_mass(&rect);
                    let err = class_mass(&m, &mu, &rect, Sign::Minus);
                    if err <= delta * mass && mass > best_mass {
                        best_mass = mass;
                    }
                }
            }
            let got_mass = mu.rectangle_mass(&got);
            let got_err = class_mass(&m, &mu, &got, Sign::Minus);
            assert!(got_err <= delta * got_mass + 1e-12);
            assert!(
                (got_mass - best_mass).abs() < 1e-9,
                "oracle mass {got_mass} vs exhaustive {best_mass}"
            );
        }
    }

    #[test]
    fn restricted_extraction_stays_inside_the_rectangle() {
        let m = equality(5);
        let r = Rectangle::new(vec![1, 2, 4], vec![0, 2, 3]);
        let got = extract_monochromatic_subrectangle(&m, &r, Sign::Minus);
        assert!(got.is_subset_of(&r));
        assert!(is_monochromatic(&m, &got, Sign::Minus));
        // Cross-check against the oracle on the restricted matrix.
        let sub = restrict(&m, &r).unwrap();
        let opt = brute_force_max_monochromatic(&sub, Sign::Minus).unwrap();
        assert!(opt.area() >= got.area());
    }
}
