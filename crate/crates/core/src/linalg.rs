//! Exact dense linear algebra on small intersection matrices: determinants
//! via fraction-free Bareiss elimination, cofactors, negative definiteness
//! through leading principal minors, and rational linear solves.
//!
//! Intersection matrices of curve configurations are sparse (banded for
//! chains), so the elimination loops skip structurally zero work; everything
//! stays exact.

use crate::graph::FoliatedDualGraph;
use crate::rat::{Int, Rat};
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub n: usize,
    entries: Vec<Int>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not negative definite")]
    NotNegativeDefinite,
    #[error("index out of range")]
    IndexOutOfRange,
    #[error("dimension mismatch: matrix is {0}x{0}, vector has length {1}")]
    DimensionMismatch(usize, usize),
    #[error("graph is not a tree with simple edges")]
    NotSimpleTree,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![Int::zero(); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut m = IntMatrix::zero(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix rows must be square");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, Int::from(v));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Minor with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(self.n - 1);
        let mut r = 0;
        for a in 0..self.n {
            if a == i {
                continue;
            }
            let mut c = 0;
            for b in 0..self.n {
                if b == j {
                    continue;
                }
                m.set(r, c, self.get(a, b).clone());
                c += 1;
            }
            r += 1;
        }
        m
    }

    /// Negated copy (used for the positive-definite continuant convention).
    pub fn negated(&self) -> IntMatrix {
        IntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Submatrix on the given index set, in order.
    pub fn submatrix(&self, keep: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zero(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                m.set(i, j, self.get(a, b).clone());
            }
        }
        m
    }
}

/// A[i][i] = E_i^2; A[i][j] = total edge multiplicity between E_i and E_j.
pub fn intersection_matrix(g: &FoliatedDualGraph) -> IntMatrix {
    let n = g.vertices.len();
    let mut m = IntMatrix::zero(n);
    for (i, v) in g.vertices.iter().enumerate() {
        m.set(i, i, Int::from(v.self_int));
    }
    for e in &g.edges {
        let (Some(i), Some(j)) = (g.index_of(&e.a), g.index_of(&e.b)) else {
            continue;
        };
        if i == j {
            continue;
        }
        let add = Int::from(e.mult);
        m.set(i, j, m.get(i, j) + &add);
        m.set(j, i, m.get(j, i) + &add);
    }
    m
}

/// Outcome of a fraction-free elimination pass.
struct Elimination {
    rows: Vec<Vec<Int>>,
    /// True pivot values in elimination order; without row swaps these are
    /// the leading principal minors.
    pivots: Vec<Int>,
    sign: i64,
    /// Column at which no pivot could be found, if any.
    stuck: Option<usize>,
}

/// Fraction-free Gaussian elimination with lazy per-row rescaling: a row
/// untouched for several steps carries a stale denominator state and is
/// caught up (exactly, by the bordered-minor identity) only when it finally
/// participates. Banded systems therefore cost O(n * bandwidth^2) instead of
/// O(n^3).
#[allow(clippy::needless_range_loop)]
fn eliminate(mut rows: Vec<Vec<Int>>, pivot_cols: usize, allow_swaps: bool) -> Elimination {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut state: Vec<Int> = vec![Int::one(); nrows];
    let mut prev = Int::one();
    let mut sign = 1i64;
    let mut pivots = Vec::with_capacity(pivot_cols);
    let catch_up = |row: &mut Vec<Int>, st: &mut Int, prev: &Int| {
        if st != prev {
            for e in row.iter_mut() {
                if !e.is_zero() {
                    *e = &*e * prev / &*st;
                }
            }
            *st = prev.clone();
        }
    };
    for k in 0..pivot_cols.min(nrows) {
        if rows[k][k].is_zero() {
            let found = ((k + 1)..nrows).find(|&i| !rows[i][k].is_zero());
            match found {
                Some(i) if allow_swaps => {
                    rows.swap(k, i);
                    state.swap(k, i);
                    sign = -sign;
                }
                _ => {
                    return Elimination {
                        rows,
                        pivots,
                        sign,
                        stuck: Some(k),
                    };
                }
            }
        }
        {
            let (st, row) = (&mut state[k], &mut rows[k]);
            catch_up(row, st, &prev);
        }
        let pivot = rows[k][k].clone();
        for i in (k + 1)..nrows {
            if rows[i][k].is_zero() {
                continue;
            }
            {
                let (st, row) = (&mut state[i], &mut rows[i]);
                catch_up(row, st, &prev);
            }
            let lead = rows[i][k].clone();
            for j in k..ncols {
                if rows[i][j].is_zero() && rows[k][j].is_zero() {
                    continue;
                }
                let pivot_row_entry = rows[k][j].clone();
                let v = &rows[i][j] * &pivot - &lead * pivot_row_entry;
                rows[i][j] = v / &prev;
            }
            state[i] = pivot.clone();
        }
        prev = pivot.clone();
        pivots.push(pivot);
    }
    Elimination {
        rows,
        pivots,
        sign,
        stuck: None,
    }
}

/// Exact determinant by fraction-free Bareiss elimination. The determinant
/// of the empty matrix is 1.
pub fn det_exact(a: &IntMatrix) -> Int {
    let n = a.n;
    if n == 0 {
        return Int::one();
    }
    let rows: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).clone()).collect())
        .collect();
    let e = eliminate(rows, n, true);
    if e.stuck.is_some() {
        return Int::zero();
    }
    let d = e.pivots.last().expect("n >= 1").clone();
    if e.sign < 0 {
        -d
    } else {
        d
    }
}

/// Standard (i, j)-cofactor: (-1)^{i+j} times the determinant of the minor.
pub fn cofactor(a: &IntMatrix, i: usize, j: usize) -> Result<Int, LinalgError> {
    if i >= a.n || j >= a.n {
        return Err(LinalgError::IndexOutOfRange);
    }
    let d = det_exact(&a.minor(i, j));
    Ok(if (i + j).is_multiple_of(2) { d } else { -d })
}

/// Sylvester test via one elimination pass: without row swaps the true
/// pivots are the leading principal minors, so negative definiteness is
/// their strict sign alternation.
pub fn is_negative_definite(a: &IntMatrix) -> bool {
    if !a.is_symmetric() {
        return false;
    }
    if a.n == 0 {
        return true;
    }
    let rows: Vec<Vec<Int>> = (0..a.n)
        .map(|i| (0..a.n).map(|j| a.get(i, j).clone()).collect())
        .collect();
    let e = eliminate(rows, a.n, false);
    if e.stuck.is_some() {
        return false;
    }
    e.pivots.iter().enumerate().all(|(k, p)| {
        // (-1)^{k+1} * minor > 0.
        if k % 2 == 0 {
            p.is_negative()
        } else {
            p.is_positive()
        }
    })
}

/// Exact rational solve of A x = d: denominators are cleared, the integer
/// system is triangularized fraction-free, and one rational back-substitution
/// recovers x. The result is verified by substitution before it is returned.
pub fn solve(a: &IntMatrix, d: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
    solve_inner(a, d, true).map(|(x, _)| x)
}

/// One-pass variant for the pullback systems: solves A x = d and certifies
/// negative definiteness from the same elimination (without row swaps the
/// true pivots are the leading principal minors).
pub fn solve_negative_definite(a: &IntMatrix, d: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
    if !a.is_symmetric() {
        return Err(LinalgError::NotNegativeDefinite);
    }
    let (x, pivots) = solve_inner(a, d, false).map_err(|_| LinalgError::NotNegativeDefinite)?;
    let alternating = pivots.iter().enumerate().all(|(k, p)| {
        if k % 2 == 0 {
            p.is_negative()
        } else {
            p.is_positive()
        }
    });
    if !alternating {
        return Err(LinalgError::NotNegativeDefinite);
    }
    Ok(x)
}

#[allow(clippy::needless_range_loop)]
fn solve_inner(
    a: &IntMatrix,
    d: &[Rat],
    allow_swaps: bool,
) -> Result<(Vec<Rat>, Vec<Int>), LinalgError> {
    let n = a.n;
    if d.len() != n {
        return Err(LinalgError::DimensionMismatch(n, d.len()));
    }
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let mut scale = Int::one();
    for v in d {
        scale = num::Integer::lcm(&scale, v.denom());
    }
    let rows: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut row: Vec<Int> = (0..n).map(|j| a.get(i, j).clone()).collect();
            row.push(d[i].numer() * (&scale / d[i].denom()));
            row
        })
        .collect();
    let e = eliminate(rows, n, allow_swaps);
    if e.stuck.is_some() {
        return Err(LinalgError::Singular);
    }
    // Cramer scaling keeps everything integral: y = x * scale * det solves
    // the triangle in integers (each surviving row is an exact scalar
    // multiple of a valid equation), and one normalization per entry at the
    // end produces the rational solution.
    let det = {
        let p = e.pivots.last().expect("n >= 1").clone();
        if e.sign < 0 {
            -p
        } else {
            p
        }
    };
    let mut y = vec![Int::zero(); n];
    for k in (0..n).rev() {
        let row = &e.rows[k];
        let mut acc = &row[n] * &det;
        for (j, yj) in y.iter().enumerate().skip(k + 1) {
            if !row[j].is_zero() && !yj.is_zero() {
                acc -= &row[j] * yj;
            }
        }
        y[k] = acc / &row[k];
    }
    // Exact arithmetic: reconstruction must be on the nose (A y = scale*det*d).
    for i in 0..n {
        let mut acc = Int::zero();
        for (j, yj) in y.iter().enumerate() {
            let aij = a.get(i, j);
            if !aij.is_zero() && !yj.is_zero() {
                acc += aij * yj;
            }
        }
        let expect = d[i].numer() * (&scale / d[i].denom()) * &det;
        debug_assert_eq!(acc, expect, "back-substitution check failed");
        if acc != expect {
            return Err(LinalgError::Singular);
        }
    }
    let denom = &scale * &det;
    let x: Vec<Rat> = y.into_iter().map(|yk| Rat::new(yk, denom.clone())).collect();
    Ok((x, e.pivots))
}

fn check_simple_tree(g: &FoliatedDualGraph) -> Result<(), LinalgError> {
    let n = g.vertices.len();
    let simple = g.edges.iter().all(|e| e.mult == 1 && e.a != e.b);
    let tree = simple && g.edges.len() == n.saturating_sub(1) && g.is_connected();
    if !tree {
        return Err(LinalgError::NotSimpleTree);
    }
    Ok(())
}

/// Determinant of a subgraph via the weighted continuant convention:
/// det of minus-the-intersection-matrix on the kept vertices.
fn subgraph_det(g: &FoliatedDualGraph, full: &IntMatrix, removed: &[usize]) -> Int {
    let keep: Vec<usize> = (0..g.vertices.len())
        .filter(|i| !removed.contains(i))
        .collect();
    det_exact(&full.negated().submatrix(&keep))
}

/// Tree-determinant recursion on a pivot vertex: weight times the graph
/// minus the pivot, minus the sum over neighbours of the graph minus both.
/// For negative definite trees this equals |det| of the intersection matrix.
pub fn delta_recursive(g: &FoliatedDualGraph, pivot: &str) -> Result<Int, LinalgError> {
    check_simple_tree(g)?;
    let p = g
        .index_of(pivot)
        .ok_or_else(|| LinalgError::UnknownVertex(pivot.to_string()))?;
    let full = intersection_matrix(g);
    let weight = Int::from(-g.vertices[p].self_int);
    let mut acc = weight * subgraph_det(g, &full, &[p]);
    for nb in g.neighbors(pivot) {
        let q = g.index_of(nb).unwrap();
        acc -= subgraph_det(g, &full, &[p, q]);
    }
    Ok(acc)
}

/// Unique path between two vertices of a tree, inclusive of both endpoints.
pub fn tree_path(g: &FoliatedDualGraph, from: &str, to: &str) -> Option<Vec<usize>> {
    let start = g.index_of(from)?;
    let goal = g.index_of(to)?;
    let mut stack = vec![vec![start]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == goal {
            return Some(path);
        }
        for nb in g.neighbors(&g.vertices[last].id) {
            let q = g.index_of(nb).unwrap();
            if !path.contains(&q) {
                let mut next = path.clone();
                next.push(q);
                stack.push(next);
            }
        }
    }
    None
}

/// Cofactor of the intersection matrix through the tree-path formula:
/// (-1)^{n+1} times the determinant of the graph minus the path between the
/// two vertices. Must agree with `cofactor` on the same matrix.
pub fn cofactor_path(g: &FoliatedDualGraph, from: &str, to: &str) -> Result<Int, LinalgError> {
    check_simple_tree(g)?;
    let path =
        tree_path(g, from, to).ok_or_else(|| LinalgError::UnknownVertex(from.to_string()))?;
    let full = intersection_matrix(g);
    let d = subgraph_det(g, &full, &path);
    let n = g.vertices.len();
    Ok(if (n + 1).is_multiple_of(2) { d } else { -d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::rat::{frac, rat};

    fn chain(weights: &[i64]) -> FoliatedDualGraph {
        let mut b = GraphBuilder::new();
        for (i, w) in weights.iter().enumerate() {
            b = b.invariant(&format!("E{}", i + 1), -w, 0, 2);
        }
        for i in 1..weights.len() {
            b = b.edge(&format!("E{i}"), &format!("E{}", i + 1));
        }
        b.build()
    }

    #[test]
    fn intersection_matrix_examples() {
        let g = chain(&[3, 2, 3]);
        let m = intersection_matrix(&g);
        assert_eq!(
            m,
            IntMatrix::from_rows(&[vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -3]])
        );
        let cyc = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -2, 0, 2)
            .invariant("C", -3, 0, 2)
            .edge("A", "B")
            .edge("B", "C")
            .edge("C", "A")
            .build();
        assert_eq!(
            intersection_matrix(&cyc),
            IntMatrix::from_rows(&[vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -3]])
        );
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_exact(&IntMatrix::from_rows(&[vec![-2]])), Int::from(-2));
        assert_eq!(det_exact(&IntMatrix::zero(0)), Int::from(1));
        // A chain of n (-2)-vertices has |det| = n + 1.
        for n in 1..=6 {
            let g = chain(&vec![2; n]);
            let d = det_exact(&intersection_matrix(&g));
            let expect = Int::from((n + 1) as i64) * if n % 2 == 1 { -Int::one() } else { Int::one() };
            assert_eq!(d, expect);
        }
    }

    #[test]
    fn delta_recursive_examples() {
        let single = chain(&[5]);
        assert_eq!(delta_recursive(&single, "E1").unwrap(), Int::from(5));
        let two = chain(&[2, 2]);
        assert_eq!(delta_recursive(&two, "E1").unwrap(), Int::from(3));
        let three = chain(&[3, 2, 3]);
        assert_eq!(delta_recursive(&three, "E2").unwrap(), Int::from(12));
        assert_eq!(
            det_exact(&intersection_matrix(&three)),
            Int::from(-12)
        );
    }

    #[test]
    fn delta_recursive_rejects_multi_edges() {
        let g = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -3, 0, 2)
            .edge_full("A", "B", 2, true)
            .build();
        assert_eq!(delta_recursive(&g, "A"), Err(LinalgError::NotSimpleTree));
    }

    #[test]
    fn cofactor_examples() {
        let one = IntMatrix::from_rows(&[vec![-2]]);
        assert_eq!(cofactor(&one, 0, 0).unwrap(), Int::one());
        let g = chain(&[2, 2, 2]);
        let m = intersection_matrix(&g);
        assert_eq!(cofactor(&m, 0, 2).unwrap(), Int::one());
        assert_eq!(cofactor(&m, 0, 0).unwrap(), Int::from(3));
        assert!(cofactor(&m, 0, 3).is_err());
        // Path formula agrees.
        assert_eq!(cofactor_path(&g, "E1", "E3").unwrap(), Int::one());
        assert_eq!(cofactor_path(&g, "E1", "E1").unwrap(), Int::from(3));
    }

    #[test]
    fn negative_definite_examples() {
        assert!(is_negative_definite(&IntMatrix::from_rows(&[vec![-2]])));
        assert!(!is_negative_definite(&IntMatrix::from_rows(&[
            vec![-1, 1],
            vec![1, -1]
        ])));
        let cyc = IntMatrix::from_rows(&[vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -3]]);
        assert!(is_negative_definite(&cyc));
    }

    #[test]
    fn det_and_solve_with_zero_leading_entries() {
        // Paths that need row swaps.
        assert_eq!(
            det_exact(&IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])),
            Int::from(-1)
        );
        assert_eq!(
            det_exact(&IntMatrix::from_rows(&[vec![0, 2], vec![3, 0]])),
            Int::from(-6)
        );
        assert_eq!(
            det_exact(&IntMatrix::from_rows(&[vec![0, 0], vec![0, 5]])),
            Int::zero()
        );
        let m = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(solve(&m, &[rat(1), rat(2)]).unwrap(), vec![rat(2), rat(1)]);
        // The one-pass definite solver refuses indefinite systems.
        assert_eq!(
            solve_negative_definite(&m, &[rat(1), rat(2)]),
            Err(LinalgError::NotNegativeDefinite)
        );
    }

    #[test]
    fn solve_examples() {
        let m = IntMatrix::from_rows(&[vec![-2]]);
        assert_eq!(solve(&m, &[rat(-1)]).unwrap(), vec![frac(1, 2)]);

        let m = IntMatrix::from_rows(&[vec![-2, 1], vec![1, -2]]);
        assert_eq!(
            solve(&m, &[rat(-1), rat(0)]).unwrap(),
            vec![frac(2, 3), frac(1, 3)]
        );

        let m = IntMatrix::from_rows(&[vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -3]]);
        assert_eq!(
            solve(&m, &[rat(-1), rat(0), rat(0)]).unwrap(),
            vec![frac(5, 12), frac(1, 4), frac(1, 12)]
        );

        let sing = IntMatrix::from_rows(&[vec![-1, 1], vec![1, -1]]);
        assert_eq!(solve(&sing, &[rat(1), rat(0)]), Err(LinalgError::Singular));
    }
}
