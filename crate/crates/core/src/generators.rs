//! Test-matrix generators: the explicit Kotlov-Lovasz low-rank instance with
//! many distinct rows, random bounded-rank matrices from rectangle
//! partitions, and the full-rank equality pattern.

use crate::error::{Error, Result};
use crate::factorize::Factorization;
use crate::matrix::{Sign, SignMatrix};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Memory guard on the family size 2 * C(2r, r) * 2r.
pub const FAMILY_SIZE_LIMIT: usize = 4096;

/// The set-family structure behind the Kotlov-Lovasz matrix.
///
/// The ground set has 8r symbols split into four blocks a_block, a_prime,
/// b_block, b_prime of 2r symbols each (indices [0,2r), [2r,4r), [4r,6r),
/// [6r,8r)). Row sets take r symbols from one A-side block plus one from the
/// matching B-side block; column sets do the reverse, arranged so that any
/// row set and column set intersect in at most one symbol.
#[derive(Debug, Clone)]
pub struct SetFamilyInstance {
    pub r: usize,
    /// Row family: sorted symbol lists.
    pub row_sets: Vec<Vec<usize>>,
    /// Column family: sorted symbol lists.
    pub col_sets: Vec<Vec<usize>>,
}

impl SetFamilyInstance {
    pub fn ground_set_size(&self) -> usize {
        8 * self.r
    }

    pub fn intersection_size(&self, a: usize, b: usize) -> usize {
        let (sa, sb) = (&self.row_sets[a], &self.col_sets[b]);
        let mut count = 0;
        let (mut i, mut j) = (0, 0);
        while i < sa.len() && j < sb.len() {
            match sa[i].cmp(&sb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Exact integer reconstruction check of M_ab = 2|a & b| - 1 against the
    /// matrix; returns the largest absolute deviation (0 when consistent).
    pub fn exact_reconstruction_error(&self, m: &SignMatrix) -> i64 {
        let mut worst = 0i64;
        for a in 0..self.row_sets.len() {
            for b in 0..self.col_sets.len() {
                let want = 2 * self.intersection_size(a, b) as i64 - 1;
                let got = m.sign(a, b).value_i8() as i64;
                worst = worst.max((want - got).abs());
            }
        }
        worst
    }
}

/// All size-k subsets of `pool` in lexicographic order.
fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > pool.len() {
        return if k == 0 { vec![Vec::new()] } else { out };
    }
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        // Advance the last index that can move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + pool.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Builds the Kotlov-Lovasz instance for parameter r: an
/// N x N sign matrix with N = 2 C(2r, r) 2r, entries
/// M_ab = 2|a & b| - 1, together with its explicit factorization by the
/// vectors (sqrt(2) 1_a, -1) and (sqrt(2) 1_b, +1) in R^(8r+1), and the
/// underlying set families. The rank is at most 8r+1 while all rows and all
/// columns are pairwise distinct.
pub fn kotlov_lovasz<S: Scalar>(
    r: usize,
) -> Result<(SignMatrix, Factorization<S>, SetFamilyInstance)> {
    assert!(r >= 1, "r must be at least 1");
    let family_size = 2 * binomial(2 * r, r) * 2 * r;
    if family_size > FAMILY_SIZE_LIMIT {
        return Err(Error::GeneratorTooLarge { requested: family_size, limit: FAMILY_SIZE_LIMIT });
    }

    let block: Vec<Vec<usize>> = (0..4).map(|b| (2 * r * b..2 * r * (b + 1)).collect()).collect();
    let (a_block, a_prime, b_block, b_prime) = (&block[0], &block[1], &block[2], &block[3]);

    // Row family: r from A plus 1 from B, then r from A' plus 1 from B'.
    let mut row_sets = Vec::with_capacity(family_size);
    for (main, single) in [(a_block, b_block), (a_prime, b_prime)] {
        for combo in combinations(main, r) {
            for &extra in single.iter() {
                let mut s = combo.clone();
                s.push(extra);
                s.sort_unstable();
                row_sets.push(s);
            }
        }
    }
    // Column family: r from B plus 1 from A', then r from B' plus 1 from A.
    let mut col_sets = Vec::with_capacity(family_size);
    for (main, single) in [(b_block, a_prime), (b_prime, a_block)] {
        for combo in combinations(main, r) {
            for &extra in single.iter() {
                let mut s = combo.clone();
                s.push(extra);
                s.sort_unstable();
                col_sets.push(s);
            }
        }
    }

    let instance = SetFamilyInstance { r, row_sets, col_sets };
    let n = instance.row_sets.len();
    let matrix = SignMatrix::from_fn(n, n, |a, b| {
        match instance.intersection_size(a, b) {
            0 => Sign::Minus,
            1 => Sign::Plus,
            k => panic!("intersection size {k} violates the construction"),
        }
    });

    // Explicit factorization in R^(8r+1): sqrt(2) times the incidence vector,
    // with a trailing -1 on the left and +1 on the right, so that
    // <u_a, v_b> = 2|a & b| - 1.
    let dim = 8 * r + 1;
    let sqrt2 = S::from_f64_lossy(2.0).sqrt();
    let embed = |s: &[usize], last: S| -> Vec<S> {
        let mut v = vec![S::zero(); dim];
        for &sym in s {
            v[sym] = sqrt2;
        }
        v[dim - 1] = last;
        v
    };
    let left: Vec<Vec<S>> = instance.row_sets.iter().map(|s| embed(s, -S::one())).collect();
    let right: Vec<Vec<S>> = instance.col_sets.iter().map(|s| embed(s, S::one())).collect();
    let factorization = Factorization::from_vectors(dim, left, right)?;

    Ok((matrix, factorization, instance))
}

/// Random sign matrix of rank at most k: splits X x Y into k rectangles by
/// recursive binary cuts (uniform choice of splittable leaf, axis and
/// position), then assigns each leaf an independent uniform sign.
pub fn rectangle_partition_random(n: usize, m: usize, k: usize, seed: u64) -> SignMatrix {
    assert!(n >= 1 && m >= 1 && k >= 1);
    let mut rng = Rng::new(seed);
    // Leaves as (row_start, row_end, col_start, col_end), half-open.
    let mut leaves = vec![(0usize, n, 0usize, m)];
    while leaves.len() < k {
        let splittable: Vec<usize> = leaves
            .iter()
            .enumerate()
            .filter(|(_, &(r0, r1, c0, c1))| r1 - r0 > 1 || c1 - c0 > 1)
            .map(|(i, _)| i)
            .collect();
        if splittable.is_empty() {
            break;
        }
        let pick = splittable[rng.next_below(splittable.len() as u64) as usize];
        let (r0, r1, c0, c1) = leaves[pick];
        let can_split_rows = r1 - r0 > 1;
        let can_split_cols = c1 - c0 > 1;
        let split_rows = if can_split_rows && can_split_cols {
            rng.next_below(2) == 0
        } else {
            can_split_rows
        };
        leaves.swap_remove(pick);
        if split_rows {
            let cut = r0 + 1 + rng.next_below((r1 - r0 - 1) as u64) as usize;
            leaves.push((r0, cut, c0, c1));
            leaves.push((cut, r1, c0, c1));
        } else {
            let cut = c0 + 1 + rng.next_below((c1 - c0 - 1) as u64) as usize;
            leaves.push((r0, r1, c0, cut));
            leaves.push((r0, r1, cut, c1));
        }
    }
    let mut entries = vec![Sign::Plus; n * m];
    for &(r0, r1, c0, c1) in &leaves {
        let sign = if rng.next_below(2) == 0 { Sign::Plus } else { Sign::Minus };
        for x in r0..r1 {
            for y in c0..c1 {
                entries[x * m + y] = sign;
            }
        }
    }
    SignMatrix::new(n, m, entries).expect("dimensions are positive")
}

/// Equality pattern 2I - J: +1 on the diagonal, -1 elsewhere. Full rank for
/// every n except n = 2, where 2I - J is singular.
pub fn equality_matrix(n: usize) -> SignMatrix {
    assert!(n >= 1);
    SignMatrix::from_fn(n, n, |x, y| if x == y { Sign::Plus } else { Sign::Minus })
}

/// A random measure with strictly positive weights, normalized to mass 1.
pub fn random_measure<S: Scalar>(n: usize, m: usize, seed: u64) -> crate::matrix::EntryMeasure<S> {
    let mut rng = Rng::new(seed);
    let weights: Vec<S> = (0..n * m)
        .map(|_| S::from_f64_lossy(rng.next_f64() + 1e-3))
        .collect();
    crate::matrix::EntryMeasure::normalized(n, m, weights).expect("positive weights")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorize::verify_factorization;
    use crate::matrix::rank;

    #[test]
    fn kl_r1_has_the_documented_shape() {
        let (m, f, inst) = kotlov_lovasz::<f64>(1).unwrap();
        assert_eq!(inst.row_sets.len(), 8);
        assert_eq!(inst.col_sets.len(), 8);
        assert_eq!(m.n_rows(), 8);
        assert_eq!(m.n_cols(), 8);
        assert_eq!(f.dim(), 9);
        assert!(rank::<f64>(&m) <= 9);
        assert_eq!(inst.exact_reconstruction_error(&m), 0);
        // Entry classes derived independently by counting intersections.
        let mut plus = 0;
        for a in 0..8 {
            for b in 0..8 {
                let s = inst.intersection_size(a, b);
                assert!(s <= 1);
                if s == 1 {
                    plus += 1;
                }
            }
        }
        let (p, mi) = crate::matrix::entry_classes(&m);
        assert_eq!(p.len(), plus);
        assert_eq!(mi.len(), 64 - plus);
    }

    #[test]
    fn kl_r2_counts_and_rank_bound() {
        let (m, f, inst) = kotlov_lovasz::<f64>(2).unwrap();
        assert_eq!(inst.row_sets.len(), 48);
        assert_eq!(m.n_rows(), 48);
        assert!(rank::<f64>(&m) <= 17);
        assert_eq!(inst.exact_reconstruction_error(&m), 0);
        let rep = verify_factorization(&m, &f, 1e-9).unwrap();
        assert!(rep.ok, "float reconstruction error {}", rep.max_error);
    }

    #[test]
    fn kl_rows_and_columns_are_pairwise_distinct() {
        for r in 1..=2 {
            let (m, _, _) = kotlov_lovasz::<f64>(r).unwrap();
            let n = m.n_rows();
            for a in 0..n {
                for a2 in (a + 1)..n {
                    assert!(
                        (0..n).any(|b| m.sign(a, b) != m.sign(a2, b)),
                        "rows {a} and {a2} coincide at r = {r}"
                    );
                }
            }
            for b in 0..n {
                for b2 in (b + 1)..n {
                    assert!(
                        (0..n).any(|a| m.sign(a, b) != m.sign(a, b2)),
                        "columns {b} and {b2} coincide at r = {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn kl_guard_rejects_huge_instances() {
        assert!(matches!(
            kotlov_lovasz::<f64>(6),
            Err(Error::GeneratorTooLarge { .. })
        ));
    }

    #[test]
    fn partition_rank_is_bounded_by_leaf_count() {
        for (k, seed) in [(1usize, 1u64), (2, 5), (6, 7), (8, 99)] {
            let m = rectangle_partition_random(32, 32, k, seed);
            assert!(rank::<f64>(&m) <= k, "rank exceeded k = {k}");
        }
        // k = 1 is a constant matrix.
        let m = rectangle_partition_random(5, 9, 1, 3);
        assert!(m.is_constant().is_some());
    }

    #[test]
    fn partition_is_reproducible() {
        let a = rectangle_partition_random(16, 16, 5, 42);
        let b = rectangle_partition_random(16, 16, 5, 42);
        assert_eq!(a, b);
    }

    #[test]
    fn equality_matrix_shapes() {
        let m = equality_matrix(1);
        assert_eq!(m.sign(0, 0), Sign::Plus);
        let m = equality_matrix(2);
        assert_eq!(m.sign(0, 1), Sign::Minus);
        assert_eq!(rank::<f64>(&equality_matrix(4)), 4);
    }
}
