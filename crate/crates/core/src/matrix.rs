//! Shared data model: sign matrices, rectangles, entry measures and the
//! elementary queries every other module builds on.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{svd, DenseMat};
use crate::scalar::Scalar;

/// Matrix entry sign, +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn value<S: Scalar>(self) -> S {
        match self {
            Sign::Plus => S::one(),
            Sign::Minus => -S::one(),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// Dense matrix with entries in {+1, -1} over index sets X (rows) and Y
/// (columns). Restrictions keep maps back to the original indices so that a
/// submatrix can still report where its rows and columns came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<i8>,
    row_ids: Vec<usize>,
    col_ids: Vec<usize>,
}

impl SignMatrix {
    /// Builds a matrix from row-major signs; fails on empty dimensions.
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<Sign>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::DimensionMismatch {
                expected: "n_rows >= 1 and n_cols >= 1".into(),
                found: format!("{n_rows} x {n_cols}"),
            });
        }
        if entries.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", n_rows * n_cols),
                found: format!("{}", entries.len()),
            });
        }
        Ok(SignMatrix {
            n_rows,
            n_cols,
            entries: entries.into_iter().map(Sign::value_i8).collect(),
            row_ids: (0..n_rows).collect(),
            col_ids: (0..n_cols).collect(),
        })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Sign) -> Self {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for x in 0..n_rows {
            for y in 0..n_cols {
                entries.push(f(x, y));
            }
        }
        Self::new(n_rows, n_cols, entries).expect("from_fn dimensions are positive")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_entries(&self) -> usize {
        self.n_rows * self.n_cols
    }

    #[inline]
    pub fn sign(&self, x: usize, y: usize) -> Sign {
        if self.entries[x * self.n_cols + y] > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    #[inline]
    pub fn value<S: Scalar>(&self, x: usize, y: usize) -> S {
        self.sign(x, y).value()
    }

    /// Original row indices this matrix's rows map back to.
    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[usize] {
        &self.col_ids
    }

    /// Matrix with every sign flipped, same index maps.
    pub fn negated(&self) -> SignMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = -*e;
        }
        out
    }

    pub fn is_constant(&self) -> Option<Sign> {
        let first = self.entries[0];
        if self.entries.iter().all(|&e| e == first) {
            Sign::from_i8(first)
        } else {
            None
        }
    }

    /// Full rectangle X x Y.
    pub fn full_rectangle(&self) -> Rectangle {
        Rectangle::new((0..self.n_rows).collect(), (0..self.n_cols).collect())
    }

    pub fn as_dense<S: Scalar>(&self) -> DenseMat<S> {
        DenseMat::from_fn(self.n_rows, self.n_cols, |i, j| self.value(i, j))
    }
}

/// Combinatorial rectangle: a subset of rows times a subset of columns.
/// Index lists are kept sorted and deduplicated; empty sides are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rectangle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Rectangle {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Rectangle { rows, cols }
    }

    pub fn empty() -> Self {
        Rectangle { rows: Vec::new(), cols: Vec::new() }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    /// Number of entries |rows| * |cols|.
    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows.binary_search(&x).is_ok() && self.cols.binary_search(&y).is_ok()
    }

    pub fn intersect(&self, other: &Rectangle) -> Rectangle {
        let rows = self.rows.iter().copied().filter(|r| other.rows.binary_search(r).is_ok()).collect();
        let cols = self.cols.iter().copied().filter(|c| other.cols.binary_search(c).is_ok()).collect();
        Rectangle { rows, cols }
    }

    pub fn is_subset_of(&self, other: &Rectangle) -> bool {
        self.rows.iter().all(|r| other.rows.binary_search(r).is_ok())
            && self.cols.iter().all(|c| other.cols.binary_search(c).is_ok())
    }
}

/// Probability measure on the entries of an n x m grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryMeasure<S> {
    n_rows: usize,
    n_cols: usize,
    weights: Vec<S>,
}

/// Weights smaller than this are treated as zero support.
pub const SUPPORT_EPS: f64 = 1e-15;

/// Tolerance on the total mass of a measure.
pub const MASS_TOL: f64 = 1e-9;

impl<S: Scalar> EntryMeasure<S> {
    /// Validates nonnegativity and unit total mass (tolerance 1e-9).
    pub fn new(n_rows: usize, n_cols: usize, weights: Vec<S>) -> Result<Self> {
        if weights.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} weights", n_rows * n_cols),
                found: format!("{}", weights.len()),
            });
        }
        if let Some(w) = weights.iter().find(|w| **w < S::zero()) {
            return Err(Error::InvalidMeasure(format!("negative weight {w}")));
        }
        let total: S = weights.iter().copied().sum();
        if (total - S::one()).abs() > S::from_f64_lossy(MASS_TOL) {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        Ok(EntryMeasure { n_rows, n_cols, weights })
    }

    /// Uniform measure on all entries.
    pub fn uniform(n_rows: usize, n_cols: usize) -> Self {
        let w = S::one() / S::from_count(n_rows * n_cols);
        EntryMeasure { n_rows, n_cols, weights: vec![w; n_rows * n_cols] }
    }

    /// Normalizes arbitrary nonnegative weights to total mass 1.
    pub fn normalized(n_rows: usize, n_cols: usize, weights: Vec<S>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| **w < S::zero()) {
            return Err(Error::InvalidMeasure(format!("negative weight {w}")));
        }
        let total: S = weights.iter().copied().sum();
        if total <= S::zero() {
            return Err(Error::InvalidMeasure("total mass is zero".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(EntryMeasure { n_rows, n_cols, weights })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn weight(&self, x: usize, y: usize) -> S {
        let w = self.weights[x * self.n_cols + y];
        if w < S::from_f64_lossy(SUPPORT_EPS) {
            S::zero()
        } else {
            w
        }
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// Total mass of a rectangle, summed in row-major order.
    pub fn rectangle_mass(&self, r: &Rectangle) -> S {
        let mut acc = S::zero();
        for &x in r.rows() {
            for &y in r.cols() {
                acc += self.weight(x, y);
            }
        }
        acc
    }
}

/// One side of the sign partition: the label i and the entry set Q_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryClass {
    pub sign: Sign,
    pub entries: Vec<(usize, usize)>,
}

impl EntryClass {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Partition of all entries by sign: (Q_plus, Q_minus).
pub fn entry_classes(m: &SignMatrix) -> (EntryClass, EntryClass) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for x in 0..m.n_rows() {
        for y in 0..m.n_cols() {
            match m.sign(x, y) {
                Sign::Plus => plus.push((x, y)),
                Sign::Minus => minus.push((x, y)),
            }
        }
    }
    (
        EntryClass { sign: Sign::Plus, entries: plus },
        EntryClass { sign: Sign::Minus, entries: minus },
    )
}

/// Mass of the entries of `r` whose sign equals `class`, summed in row-major
/// order over the rectangle.
pub fn class_mass<S: Scalar>(
    m: &SignMatrix,
    mu: &EntryMeasure<S>,
    r: &Rectangle,
    class: Sign,
) -> S {
    let mut acc = S::zero();
    for &x in r.rows() {
        for &y in r.cols() {
            if m.sign(x, y) == class {
                acc += mu.weight(x, y);
            }
        }
    }
    acc
}

/// Expectation of the matrix sign under `mu` conditioned on the rectangle:
/// (mass of +1 entries - mass of -1 entries) / mu(R).
pub fn rectangle_bias<S: Scalar>(
    m: &SignMatrix,
    mu: &EntryMeasure<S>,
    r: &Rectangle,
) -> Result<S> {
    let plus = class_mass(m, mu, r, Sign::Plus);
    let minus = class_mass(m, mu, r, Sign::Minus);
    let total = plus + minus;
    if total < S::from_f64_lossy(SUPPORT_EPS) {
        return Err(Error::EmptySupport);
    }
    Ok((plus - minus) / total)
}

/// Submatrix spanned by a nonempty rectangle; index maps compose so that the
/// result still knows its original row/column ids.
pub fn restrict(m: &SignMatrix, r: &Rectangle) -> Result<SignMatrix> {
    if r.is_empty() {
        return Err(Error::EmptyRectangle);
    }
    let mut entries = Vec::with_capacity(r.area());
    for &x in r.rows() {
        for &y in r.cols() {
            entries.push(m.sign(x, y).value_i8());
        }
    }
    Ok(SignMatrix {
        n_rows: r.rows().len(),
        n_cols: r.cols().len(),
        entries,
        row_ids: r.rows().iter().map(|&x| m.row_ids[x]).collect(),
        col_ids: r.cols().iter().map(|&y| m.col_ids[y]).collect(),
    })
}

/// Number of singular values above `tol` times the largest singular value.
pub fn numerical_rank<S: Scalar>(m: &SignMatrix, tol: S) -> usize {
    assert!(tol > S::zero(), "rank tolerance must be positive");
    let d = svd(&m.as_dense::<S>());
    let top = d.sigma[0];
    if top <= S::zero() {
        return 0;
    }
    d.sigma.iter().filter(|&&s| s > tol * top).count()
}

/// Default relative tolerance for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Numerical rank at the default tolerance.
pub fn rank<S: Scalar>(m: &SignMatrix) -> usize {
    numerical_rank(m, S::from_f64_lossy(RANK_TOL))
}

// ---------------------------------------------------------------------------
// Text formats.
//
// Matrix: line 1 = "<n_rows> <n_cols>", then n_rows lines of n_cols characters
// from {+,-} with no separators.
// Measure: line 1 = "<n_rows> <n_cols>", then row-major whitespace-separated
// decimal weights.
// ---------------------------------------------------------------------------

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let parse_field = |tok: Option<&str>, what: &str| -> Result<usize> {
        let tok = tok.ok_or(Error::Parse {
            line: line_no,
            col: line.len() + 1,
            msg: format!("missing {what}"),
        })?;
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line: line_no,
            // Column of the offending token.
            col: line.find(tok).map(|p| p + 1).unwrap_or(1),
            msg: format!("invalid {what}: {tok:?}"),
        })
    };
    let rows = parse_field(it.next(), "row count")?;
    let cols = parse_field(it.next(), "column count")?;
    if let Some(extra) = it.next() {
        return Err(Error::Parse {
            line: line_no,
            col: line.find(extra).map(|p| p + 1).unwrap_or(1),
            msg: format!("unexpected trailing token {extra:?}"),
        });
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            line: line_no,
            col: 1,
            msg: "dimensions must be at least 1".into(),
        });
    }
    Ok((rows, cols))
}

/// Parses the matrix text format.
pub fn parse_sign_matrix(text: &str) -> Result<SignMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty input".into(),
    })?;
    let (n_rows, n_cols) = parse_header(header, 1)?;
    let mut entries = Vec::with_capacity(n_rows * n_cols);
    for x in 0..n_rows {
        let line_no = x + 2;
        let line = lines.next().ok_or(Error::Parse {
            line: line_no,
            col: 1,
            msg: format!("expected {n_rows} matrix rows, found {x}"),
        })?;
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != n_cols {
            return Err(Error::Parse {
                line: line_no,
                col: chars.len().min(n_cols) + 1,
                msg: format!("expected {n_cols} characters, found {}", chars.len()),
            });
        }
        for (y, c) in chars.iter().enumerate() {
            match c {
                '+' => entries.push(Sign::Plus),
                '-' => entries.push(Sign::Minus),
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        col: y + 1,
                        msg: format!("expected '+' or '-', found {other:?}"),
                    })
                }
            }
        }
    }
    if let Some(extra) = lines.next() {
        if !extra.trim().is_empty() {
            return Err(Error::Parse {
                line: n_rows + 2,
                col: 1,
                msg: "unexpected content after matrix rows".into(),
            });
        }
    }
    SignMatrix::new(n_rows, n_cols, entries)
}

/// Writes the matrix text format.
pub fn format_sign_matrix(m: &SignMatrix) -> String {
    let mut out = format!("{} {}\n", m.n_rows(), m.n_cols());
    for x in 0..m.n_rows() {
        for y in 0..m.n_cols() {
            out.push(match m.sign(x, y) {
                Sign::Plus => '+',
                Sign::Minus => '-',
            });
        }
        out.push('\n');
    }
    out
}

/// Parses the measure text format.
pub fn parse_measure<S: Scalar>(text: &str) -> Result<EntryMeasure<S>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty input".into(),
    })?;
    let (n_rows, n_cols) = parse_header(header, 1)?;
    let mut weights = Vec::with_capacity(n_rows * n_cols);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let mut byte = 0usize;
        for tok in line.split_whitespace() {
            let col = line[byte..].find(tok).map(|p| byte + p + 1).unwrap_or(1);
            byte = col - 1 + tok.len();
            if weights.len() == n_rows * n_cols {
                return Err(Error::Parse {
                    line: line_no,
                    col,
                    msg: format!("more than {} weights", n_rows * n_cols),
                });
            }
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                col,
                msg: format!("invalid weight {tok:?}"),
            })?;
            weights.push(S::from_f64_lossy(v));
        }
    }
    if weights.len() != n_rows * n_cols {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: format!("expected {} weights, found {}", n_rows * n_cols, weights.len()),
        });
    }
    EntryMeasure::new(n_rows, n_cols, weights)
}

/// Writes the measure text format (one matrix row per line).
pub fn format_measure<S: Scalar>(mu: &EntryMeasure<S>) -> String {
    let mut out = format!("{} {}\n", mu.n_rows(), mu.n_cols());
    for x in 0..mu.n_rows() {
        let row: Vec<String> = (0..mu.n_cols()).map(|y| format!("{}", mu.weight(x, y))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_plus(n: usize, m: usize) -> SignMatrix {
        SignMatrix::from_fn(n, m, |_, _| Sign::Plus)
    }

    /// +1 diagonal, -1 off-diagonal.
    fn equality(n: usize) -> SignMatrix {
        SignMatrix::from_fn(n, n, |x, y| if x == y { Sign::Plus } else { Sign::Minus })
    }

    #[test]
    fn entry_classes_constant_and_checkerboard() {
        let (p, m) = entry_classes(&all_plus(2, 2));
        assert_eq!(p.len(), 4);
        assert_eq!(m.len(), 0);

        let (p, m) = entry_classes(&equality(2));
        assert_eq!(p.len(), 2);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn class_masses_sum_to_rectangle_mass() {
        let mat = equality(2);
        let mu = EntryMeasure::<f64>::uniform(2, 2);
        let full = mat.full_rectangle();
        assert_eq!(class_mass(&mat, &mu, &full, Sign::Plus), 0.5);
        assert_eq!(class_mass(&mat, &mu, &full, Sign::Minus), 0.5);

        let cell = Rectangle::new(vec![0], vec![0]);
        assert_eq!(class_mass(&mat, &mu, &cell, Sign::Plus), 0.25);
        assert_eq!(class_mass(&mat, &mu, &cell, Sign::Minus), 0.0);

        let mu1 = EntryMeasure::<f64>::uniform(2, 2);
        let plus = class_mass(&mat, &mu1, &full, Sign::Plus);
        let minus = class_mass(&mat, &mu1, &full, Sign::Minus);
        assert!((plus + minus - mu1.rectangle_mass(&full)).abs() <= 1e-12);
    }

    #[test]
    fn bias_of_monochromatic_rectangles() {
        let mu = EntryMeasure::<f64>::uniform(2, 2);
        assert_eq!(rectangle_bias(&all_plus(2, 2), &mu, &all_plus(2, 2).full_rectangle()).unwrap(), 1.0);
        let neg = all_plus(2, 2).negated();
        assert_eq!(rectangle_bias(&neg, &mu, &neg.full_rectangle()).unwrap(), -1.0);
    }

    #[test]
    fn bias_three_plus_one_minus() {
        // 2x2 with a single -1: bias (0.75 - 0.25) / 1 = 0.5 under uniform mu.
        let mat = SignMatrix::from_fn(2, 2, |x, y| {
            if (x, y) == (1, 1) { Sign::Minus } else { Sign::Plus }
        });
        let mu = EntryMeasure::<f64>::uniform(2, 2);
        let bias = rectangle_bias(&mat, &mu, &mat.full_rectangle()).unwrap();
        assert!((bias - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bias_errors_on_empty_support() {
        let mat = all_plus(2, 2);
        let mu = EntryMeasure::<f64>::new(2, 2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let bottom = Rectangle::new(vec![1], vec![0, 1]);
        assert_eq!(rectangle_bias(&mat, &mu, &bottom), Err(Error::EmptySupport));
    }

    #[test]
    fn restrict_identity_and_cell() {
        let mat = equality(2);
        let full = restrict(&mat, &mat.full_rectangle()).unwrap();
        assert_eq!(full, mat);

        let cell = restrict(&mat, &Rectangle::new(vec![0], vec![1])).unwrap();
        assert_eq!(cell.n_rows(), 1);
        assert_eq!(cell.n_cols(), 1);
        assert_eq!(cell.sign(0, 0), Sign::Minus);
        assert_eq!(cell.row_ids(), &[0]);
        assert_eq!(cell.col_ids(), &[1]);

        assert_eq!(restrict(&mat, &Rectangle::empty()), Err(Error::EmptyRectangle));
    }

    #[test]
    fn restrict_composes_to_intersection() {
        let mat = equality(4);
        let r1 = Rectangle::new(vec![0, 1, 2], vec![1, 2, 3]);
        let first = restrict(&mat, &r1).unwrap();
        // In the restricted matrix, local rows {1,2} are original {1,2} and
        // local cols {0,1} are original {1,2}.
        let r2 = Rectangle::new(vec![1, 2], vec![0, 1]);
        let second = restrict(&first, &r2).unwrap();
        let direct = restrict(&mat, &Rectangle::new(vec![1, 2], vec![1, 2])).unwrap();
        assert_eq!(second, direct);
    }

    #[test]
    fn rank_of_simple_patterns() {
        assert_eq!(rank::<f64>(&all_plus(3, 5)), 1);
        assert_eq!(rank::<f64>(&equality(4)), 4);
        // 2I - J is singular exactly at n = 2.
        assert_eq!(rank::<f64>(&equality(2)), 1);
    }

    #[test]
    fn rank_is_permutation_invariant() {
        let mat = SignMatrix::from_fn(5, 6, |x, y| {
            if (x * 7 + y * 3) % 4 < 2 { Sign::Plus } else { Sign::Minus }
        });
        let base = rank::<f64>(&mat);
        let perm_rows = [4, 2, 0, 3, 1];
        let perm_cols = [5, 0, 3, 1, 4, 2];
        let permuted = SignMatrix::from_fn(5, 6, |x, y| mat.sign(perm_rows[x], perm_cols[y]));
        assert_eq!(rank::<f64>(&permuted), base);
    }

    #[test]
    fn matrix_format_round_trip_and_errors() {
        let mat = equality(3);
        let text = format_sign_matrix(&mat);
        assert_eq!(text, "3 3\n+--\n-+-\n--+\n");
        assert_eq!(parse_sign_matrix(&text).unwrap(), mat);

        let bad_char = parse_sign_matrix("2 2\n+-\n+x\n");
        match bad_char {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!((line, col), (3, 2));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        let short_row = parse_sign_matrix("2 3\n+-\n+--\n");
        assert!(matches!(short_row, Err(Error::Parse { line: 2, .. })));

        let missing_row = parse_sign_matrix("2 2\n+-\n");
        assert!(matches!(missing_row, Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn measure_format_round_trip_and_validation() {
        let mu = EntryMeasure::<f64>::new(1, 2, vec![0.25, 0.75]).unwrap();
        let text = format_measure(&mu);
        let back = parse_measure::<f64>(&text).unwrap();
        assert_eq!(back, mu);

        assert!(matches!(
            parse_measure::<f64>("1 2\n0.25 x\n"),
            Err(Error::Parse { line: 2, col: 6, .. })
        ));
        assert!(matches!(
            parse_measure::<f64>("1 2\n0.25 0.25\n"),
            Err(Error::InvalidMeasure(_))
        ));
        assert!(matches!(
            parse_measure::<f64>("1 2\n-0.25 1.25\n"),
            Err(Error::InvalidMeasure(_))
        ));
    }

    #[test]
    fn measure_with_tiny_weights_is_zero_support() {
        let w = 1e-16;
        let mu = EntryMeasure::<f64>::new(1, 2, vec![1.0 - w, w]).unwrap();
        assert_eq!(mu.weight(0, 1), 0.0);
    }
}
