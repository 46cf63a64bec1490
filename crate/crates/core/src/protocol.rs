//! Deterministic protocol trees built from the rectangle finder.
//!
//! The recursion on a submatrix X' x Y' finds a monochromatic rectangle
//! A x B, then branches the way the two players would communicate: Alice
//! sends one bit for "x in A"; on yes, Bob sends one bit for "y in B". The
//! (yes, yes) inputs land on a leaf, the (yes, no) inputs recurse on
//! A x (Y' \ B), and the (no, *) inputs recurse on (X' \ A) x Y' without
//! Bob having spoken. Edge costs are therefore 2, 2 and 1 bits.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::factorize::rank_factorization;
use crate::john::john_rescale;
use crate::matrix::{rank, restrict, EntryMeasure, Rectangle, Sign, SignMatrix, RANK_TOL};
use crate::rectangle::{brute_force_max_monochromatic, extract_monochromatic_subrectangle, ORACLE_DIM_LIMIT};
use crate::rng::stable_hash;
use crate::rounding::{find_almost_monochromatic, RoundingConfig, RoundingVariant};
use crate::scalar::Scalar;

/// Bits consumed entering the (yes, yes) leaf or the (yes, no) subtree.
const BITS_BOTH: u32 = 2;
/// Bits consumed entering the (no, *) subtree: only Alice has spoken.
const BITS_OTHER: u32 = 1;

/// A node of the protocol tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf(Sign),
    Split {
        /// Queried row set A, in original row ids.
        rows: Vec<usize>,
        /// Queried column set B, in original column ids.
        cols: Vec<usize>,
        /// Inputs in A x B: always a leaf by construction.
        on_both: Box<Node>,
        /// Inputs with x in A, y outside B.
        on_row_residual: Box<Node>,
        /// Inputs with x outside A.
        on_other: Box<Node>,
    },
}

/// Complete deterministic protocol for a sign matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolTree {
    root: Node,
    n_rows: usize,
    n_cols: usize,
    worst_case_cost: u32,
}

/// Counters reported by `protocol_stats`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolStats {
    pub leaves: usize,
    pub worst_case_cost: u32,
    pub depth: usize,
}

/// Knobs for the rectangle search inside the recursion. The error tolerance
/// delta is not configurable: each level uses 1/(8 rank) of its own
/// submatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig<S> {
    pub master_seed: u64,
    pub max_attempts: usize,
    pub variant: RoundingVariant,
    pub constant_c7: S,
    pub cap_constant: S,
    pub threads: usize,
}

impl<S: Scalar> Default for ProtocolConfig<S> {
    fn default() -> Self {
        ProtocolConfig {
            master_seed: 0,
            max_attempts: 256,
            variant: RoundingVariant::MultiHyperplane,
            constant_c7: S::from_f64_lossy(7.1),
            cap_constant: S::one(),
            threads: 1,
        }
    }
}

/// Submatrices at or below this many entries are split directly.
const DIRECT_SPLIT_FLOOR: usize = 4;

fn node_seed(master: u64, rows: &[usize], cols: &[usize]) -> u64 {
    let mut bytes = Vec::with_capacity(8 * (rows.len() + cols.len() + 2));
    bytes.extend_from_slice(&master.to_le_bytes());
    bytes.extend_from_slice(&(rows.len() as u64).to_le_bytes());
    for &r in rows {
        bytes.extend_from_slice(&(r as u64).to_le_bytes());
    }
    for &c in cols {
        bytes.extend_from_slice(&(c as u64).to_le_bytes());
    }
    stable_hash(&bytes)
}

/// First entry of the majority sign, as a 1 x 1 rectangle in local ids.
fn first_cell_of_sign(m: &SignMatrix, sign: Sign) -> Rectangle {
    for x in 0..m.n_rows() {
        for y in 0..m.n_cols() {
            if m.sign(x, y) == sign {
                return Rectangle::new(vec![x], vec![y]);
            }
        }
    }
    unreachable!("majority sign must appear in the matrix");
}

/// Monochromatic rectangle of the majority sign on `work` (local ids),
/// searched by the rounding pipeline with oracle and single-cell fallbacks.
fn monochromatic_block<S: Scalar>(
    work: &SignMatrix,
    sub_rank: usize,
    seed: u64,
    config: &ProtocolConfig<S>,
) -> Rectangle {
    if work.n_entries() > DIRECT_SPLIT_FLOOR {
        let delta = S::one() / S::from_count(8 * sub_rank.max(1));
        let rounding = RoundingConfig {
            delta,
            constant_c7: config.constant_c7,
            max_attempts: config.max_attempts,
            master_seed: seed,
            variant: config.variant,
            cap_constant: config.cap_constant,
            threads: config.threads,
        };
        let f = rank_factorization(work, S::from_f64_lossy(RANK_TOL));
        if let Ok(f) = john_rescale(&f, S::from_f64_lossy(crate::john::DEFAULT_EPS)) {
            let mu = EntryMeasure::<S>::uniform(work.n_rows(), work.n_cols());
            if let Ok(outcome) = find_almost_monochromatic(work, &f, &mu, &rounding) {
                let block =
                    extract_monochromatic_subrectangle(work, &outcome.rectangle, Sign::Plus);
                if !block.is_empty() {
                    return block;
                }
            }
        }
    }
    // Fallbacks: exact oracle at oracle scale, else any +1 cell.
    if work.n_rows().min(work.n_cols()) <= ORACLE_DIM_LIMIT {
        if let Ok(block) = brute_force_max_monochromatic(work, Sign::Plus) {
            if !block.is_empty() {
                return block;
            }
        }
    }
    first_cell_of_sign(work, Sign::Plus)
}

fn build_node<S: Scalar>(
    m: &SignMatrix,
    rect: &Rectangle,
    config: &ProtocolConfig<S>,
) -> Node {
    let sub = restrict(m, rect).expect("recursion keeps rectangles nonempty");
    if let Some(sign) = sub.is_constant() {
        return Node::Leaf(sign);
    }
    let sub_rank = rank::<S>(&sub);
    // Majority sign under the uniform measure; the finder then works on the
    // matrix oriented so that +1 is the majority.
    let plus_entries = (0..sub.n_rows())
        .flat_map(|x| (0..sub.n_cols()).map(move |y| (x, y)))
        .filter(|&(x, y)| sub.sign(x, y) == Sign::Plus)
        .count();
    let majority = if 2 * plus_entries >= sub.n_entries() { Sign::Plus } else { Sign::Minus };
    let work = match majority {
        Sign::Plus => sub.clone(),
        Sign::Minus => sub.negated(),
    };
    let seed = node_seed(config.master_seed, rect.rows(), rect.cols());
    let block_local = monochromatic_block(&work, sub_rank, seed, config);

    // Lift local indices back to the original matrix.
    let block_rows: Vec<usize> =
        block_local.rows().iter().map(|&i| sub.row_ids()[i]).collect();
    let block_cols: Vec<usize> =
        block_local.cols().iter().map(|&j| sub.col_ids()[j]).collect();
    let rows_residual: Vec<usize> = rect
        .rows()
        .iter()
        .copied()
        .filter(|r| !block_rows.contains(r))
        .collect();
    let cols_residual: Vec<usize> = rect
        .cols()
        .iter()
        .copied()
        .filter(|c| !block_cols.contains(c))
        .collect();

    let on_both = Box::new(Node::Leaf(majority));
    let on_row_residual = if cols_residual.is_empty() {
        // Unreachable branch: every y of the current rectangle lies in B.
        Box::new(Node::Leaf(majority))
    } else {
        let child = Rectangle::new(block_rows.clone(), cols_residual);
        Box::new(build_node(m, &child, config))
    };
    let on_other = if rows_residual.is_empty() {
        Box::new(Node::Leaf(majority))
    } else {
        let child = Rectangle::new(rows_residual, rect.cols().to_vec());
        Box::new(build_node(m, &child, config))
    };
    Node::Split {
        rows: block_rows,
        cols: block_cols,
        on_both,
        on_row_residual,
        on_other,
    }
}

fn cost_of(node: &Node) -> u32 {
    match node {
        Node::Leaf(_) => 0,
        Node::Split { on_both, on_row_residual, on_other, .. } => (BITS_BOTH
            + cost_of(on_both))
        .max(BITS_BOTH + cost_of(on_row_residual))
        .max(BITS_OTHER + cost_of(on_other)),
    }
}

/// Builds a complete protocol tree whose leaves are monochromatic rectangles
/// partitioning X x Y. Deterministic given the config's master seed.
pub fn build_protocol<S: Scalar>(m: &SignMatrix, config: &ProtocolConfig<S>) -> ProtocolTree {
    let root = build_node(m, &m.full_rectangle(), config);
    let worst_case_cost = cost_of(&root);
    ProtocolTree { root, n_rows: m.n_rows(), n_cols: m.n_cols(), worst_case_cost }
}

impl ProtocolTree {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn worst_case_cost(&self) -> u32 {
        self.worst_case_cost
    }

    /// Leaf label for input (x, y), with the bits spent along the path.
    pub fn evaluate_with_cost(&self, x: usize, y: usize) -> Result<(Sign, u32)> {
        if x >= self.n_rows || y >= self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: format!("x < {}, y < {}", self.n_rows, self.n_cols),
                found: format!("({x}, {y})"),
            });
        }
        let mut node = &self.root;
        let mut bits = 0u32;
        loop {
            match node {
                Node::Leaf(sign) => return Ok((*sign, bits)),
                Node::Split { rows, cols, on_both, on_row_residual, on_other } => {
                    if rows.binary_search(&x).is_ok() {
                        if cols.binary_search(&y).is_ok() {
                            bits += BITS_BOTH;
                            node = on_both;
                        } else {
                            bits += BITS_BOTH;
                            node = on_row_residual;
                        }
                    } else {
                        bits += BITS_OTHER;
                        node = on_other;
                    }
                }
            }
        }
    }

    /// Leaf label for input (x, y).
    pub fn evaluate(&self, x: usize, y: usize) -> Result<Sign> {
        self.evaluate_with_cost(x, y).map(|(sign, _)| sign)
    }

    /// All leaf rectangles with their labels, in pre-order. Unreachable
    /// branches contribute empty rectangles.
    pub fn leaf_rectangles(&self) -> Vec<(Rectangle, Sign)> {
        let mut out = Vec::new();
        let full = Rectangle::new((0..self.n_rows).collect(), (0..self.n_cols).collect());
        collect_leaves(&self.root, &full, &mut out);
        out
    }
}

fn collect_leaves(node: &Node, rect: &Rectangle, out: &mut Vec<(Rectangle, Sign)>) {
    match node {
        Node::Leaf(sign) => out.push((rect.clone(), *sign)),
        Node::Split { rows, cols, on_both, on_row_residual, on_other } => {
            let both = Rectangle::new(rows.clone(), cols.clone());
            collect_leaves(on_both, &both, out);
            let cols_residual: Vec<usize> = rect
                .cols()
                .iter()
                .copied()
                .filter(|c| cols.binary_search(c).is_err())
                .collect();
            let row_rect = Rectangle::new(rows.clone(), cols_residual);
            collect_leaves(on_row_residual, &row_rect, out);
            let rows_residual: Vec<usize> = rect
                .rows()
                .iter()
                .copied()
                .filter(|r| rows.binary_search(r).is_err())
                .collect();
            let other_rect = Rectangle::new(rows_residual, rect.cols().to_vec());
            collect_leaves(on_other, &other_rect, out);
        }
    }
}

/// Tree statistics: leaf count, worst-case bits, internal-node depth.
pub fn protocol_stats(tree: &ProtocolTree) -> ProtocolStats {
    fn walk(node: &Node) -> (usize, usize) {
        match node {
            Node::Leaf(_) => (1, 0),
            Node::Split { on_both, on_row_residual, on_other, .. } => {
                let a = walk(on_both);
                let b = walk(on_row_residual);
                let c = walk(on_other);
                (a.0 + b.0 + c.0, 1 + a.1.max(b.1).max(c.1))
            }
        }
    }
    let (leaves, depth) = walk(&tree.root);
    ProtocolStats { leaves, worst_case_cost: tree.worst_case_cost, depth }
}

// ---------------------------------------------------------------------------
// Serialization: pre-order, one node per line.
//   NODE <rows-bitmask-hex> <cols-bitmask-hex>
//   LEAF <+1|-1>
// Children of a NODE follow in the order (yes,yes), (yes,no), (no,*). Masks
// cover the original index sets, least significant bit = index 0, fixed width
// ceil(n/4) hex digits.
// ---------------------------------------------------------------------------

fn mask_hex(indices: &[usize], width_bits: usize) -> String {
    let nibbles = width_bits.div_ceil(4);
    let mut limbs = vec![0u8; nibbles];
    for &i in indices {
        limbs[i / 4] |= 1 << (i % 4);
    }
    let mut out = String::with_capacity(nibbles);
    for limb in limbs.iter().rev() {
        write!(out, "{limb:x}").unwrap();
    }
    out
}

fn hex_mask_indices(hex: &str, line: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let nibbles = hex.len();
    for (pos, c) in hex.chars().enumerate() {
        let v = c.to_digit(16).ok_or(Error::Parse {
            line,
            col: pos + 1,
            msg: format!("invalid hex digit {c:?}"),
        })? as usize;
        let base = (nibbles - 1 - pos) * 4;
        for bit in 0..4 {
            if v & (1 << bit) != 0 {
                out.push(base + bit);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Pre-order text dump of the tree.
pub fn serialize_tree(tree: &ProtocolTree) -> String {
    fn walk(node: &Node, n_rows: usize, n_cols: usize, out: &mut String) {
        match node {
            Node::Leaf(sign) => {
                out.push_str("LEAF ");
                out.push_str(match sign {
                    Sign::Plus => "+1",
                    Sign::Minus => "-1",
                });
                out.push('\n');
            }
            Node::Split { rows, cols, on_both, on_row_residual, on_other } => {
                out.push_str("NODE ");
                out.push_str(&mask_hex(rows, n_rows));
                out.push(' ');
                out.push_str(&mask_hex(cols, n_cols));
                out.push('\n');
                walk(on_both, n_rows, n_cols, out);
                walk(on_row_residual, n_rows, n_cols, out);
                walk(on_other, n_rows, n_cols, out);
            }
        }
    }
    let mut out = String::new();
    walk(&tree.root, tree.n_rows, tree.n_cols, &mut out);
    out
}

/// Parses a pre-order dump back into a tree over the given index sets.
pub fn parse_tree(text: &str, n_rows: usize, n_cols: usize) -> Result<ProtocolTree> {
    fn read_node<'a>(
        lines: &mut impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<Node> {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            col: 1,
            msg: "unexpected end of tree".into(),
        })?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("LEAF") => {
                let sign = match parts.next() {
                    Some("+1") => Sign::Plus,
                    Some("-1") => Sign::Minus,
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            col: 6,
                            msg: format!("expected +1 or -1, found {other:?}"),
                        })
                    }
                };
                Ok(Node::Leaf(sign))
            }
            Some("NODE") => {
                let rows_hex = parts.next().ok_or(Error::Parse {
                    line: line_no,
                    col: 6,
                    msg: "missing row mask".into(),
                })?;
                let cols_hex = parts.next().ok_or(Error::Parse {
                    line: line_no,
                    col: 6 + rows_hex.len() + 1,
                    msg: "missing column mask".into(),
                })?;
                let rows = hex_mask_indices(rows_hex, line_no)?;
                let cols = hex_mask_indices(cols_hex, line_no)?;
                let on_both = Box::new(read_node(lines)?);
                let on_row_residual = Box::new(read_node(lines)?);
                let on_other = Box::new(read_node(lines)?);
                Ok(Node::Split { rows, cols, on_both, on_row_residual, on_other })
            }
            other => Err(Error::Parse {
                line: line_no,
                col: 1,
                msg: format!("expected NODE or LEAF, found {other:?}"),
            }),
        }
    }
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let root = read_node(&mut lines)?;
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            col: 1,
            msg: "unexpected content after the tree".into(),
        });
    }
    let worst_case_cost = cost_of(&root);
    Ok(ProtocolTree { root, n_rows, n_cols, worst_case_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{equality_matrix, kotlov_lovasz, rectangle_partition_random};
    use crate::matrix::rank;

    fn check_tree(m: &SignMatrix, tree: &ProtocolTree) {
        // Exhaustive correctness.
        for x in 0..m.n_rows() {
            for y in 0..m.n_cols() {
                let (sign, bits) = tree.evaluate_with_cost(x, y).unwrap();
                assert_eq!(sign, m.sign(x, y), "wrong label at ({x},{y})");
                assert!(bits <= tree.worst_case_cost());
            }
        }
        // Leaves partition the domain and are monochromatic.
        let mut seen = vec![false; m.n_rows() * m.n_cols()];
        for (rect, sign) in tree.leaf_rectangles() {
            for &x in rect.rows() {
                for &y in rect.cols() {
                    assert!(!seen[x * m.n_cols() + y], "overlap at ({x},{y})");
                    seen[x * m.n_cols() + y] = true;
                    assert_eq!(m.sign(x, y), sign);
                }
            }
        }
        assert!(seen.iter().all(|&b| b), "leaves do not cover the domain");
        // Rank lower bounds.
        let stats = protocol_stats(tree);
        let r = rank::<f64>(m);
        assert!(stats.leaves >= r, "{} leaves < rank {r}", stats.leaves);
        assert!(
            f64::from(stats.worst_case_cost) >= (r as f64).log2() - 1e-9,
            "cost {} < log2 rank {}",
            stats.worst_case_cost,
            (r as f64).log2()
        );
    }

    #[test]
    fn constant_matrix_is_a_single_leaf() {
        let m = SignMatrix::from_fn(4, 6, |_, _| Sign::Plus);
        let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
        assert_eq!(tree.worst_case_cost(), 0);
        let stats = protocol_stats(&tree);
        assert_eq!(stats.leaves, 1);
        assert_eq!(stats.depth, 0);
        check_tree(&m, &tree);
    }

    #[test]
    fn single_row_matrices_cost_a_few_bits() {
        for n in [2usize, 5, 9] {
            let m = SignMatrix::from_fn(1, n, |_, y| if y % 2 == 0 { Sign::Plus } else { Sign::Minus });
            let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
            check_tree(&m, &tree);
            // Two column classes: a constant number of bits suffices.
            assert!(tree.worst_case_cost() <= 4, "cost {}", tree.worst_case_cost());
        }
    }

    #[test]
    fn equality_pattern_trees_are_correct() {
        for n in [3usize, 4, 6] {
            let m = equality_matrix(n);
            let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
            check_tree(&m, &tree);
        }
    }

    #[test]
    fn kotlov_lovasz_r1_tree_is_exhaustively_correct() {
        let (m, _, _) = kotlov_lovasz::<f64>(1).unwrap();
        let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
        check_tree(&m, &tree);
    }

    #[test]
    fn random_partition_trees_are_correct() {
        for seed in 0..6 {
            let m = rectangle_partition_random(10, 12, 5, seed);
            let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
            check_tree(&m, &tree);
        }
    }

    #[test]
    fn build_is_deterministic() {
        let m = rectangle_partition_random(9, 9, 4, 3);
        let mut config = ProtocolConfig::<f64>::default();
        config.master_seed = 11;
        let a = build_protocol(&m, &config);
        config.threads = 4;
        let b = build_protocol(&m, &config);
        assert_eq!(serialize_tree(&a), serialize_tree(&b));
    }

    #[test]
    fn serialization_round_trips() {
        let m = rectangle_partition_random(7, 5, 4, 9);
        let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
        let text = serialize_tree(&tree);
        let back = parse_tree(&text, m.n_rows(), m.n_cols()).unwrap();
        assert_eq!(tree, back);
        assert_eq!(serialize_tree(&back), text);
    }

    #[test]
    fn golden_serialization_of_a_tiny_tree() {
        // 1x2 matrix [+, -]: the split queries row {0} and column {0}.
        let m = SignMatrix::from_fn(1, 2, |_, y| if y == 0 { Sign::Plus } else { Sign::Minus });
        let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
        let text = serialize_tree(&tree);
        assert_eq!(text, "NODE 1 1\nLEAF +1\nLEAF -1\nLEAF +1\n");
    }

    #[test]
    fn parse_rejects_malformed_trees() {
        assert!(matches!(parse_tree("LEAF ?\n", 2, 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_tree("NODE 1\nLEAF +1\n", 2, 2), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_tree("NODE 1 1\nLEAF +1\nLEAF -1\n", 2, 2),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_tree("LEAF +1\nLEAF -1\n", 2, 2),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn cost_trend_over_controlled_ranks_is_reported() {
        // Measured cost against the sqrt(r) log^2(r) shape. The constants in
        // the asymptotic bound are unknown, so this prints rather than
        // asserts; only correctness is enforced.
        for k in [2usize, 4, 8, 16] {
            let m = rectangle_partition_random(32, 32, k, 2025 + k as u64);
            let r = rank::<f64>(&m).max(2);
            let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
            check_tree(&m, &tree);
            let shape = (r as f64).sqrt() * (r as f64).log2().powi(2);
            println!(
                "cost trend: rank {r} cost {} sqrt(r)log2(r)^2 {:.2} ratio {:.3}",
                tree.worst_case_cost(),
                shape,
                f64::from(tree.worst_case_cost()) / shape
            );
        }
    }

    #[test]
    fn evaluate_rejects_out_of_range() {
        let m = equality_matrix(3);
        let tree = build_protocol(&m, &ProtocolConfig::<f64>::default());
        assert!(tree.evaluate(3, 0).is_err());
        assert!(tree.evaluate(0, 3).is_err());
    }
}
