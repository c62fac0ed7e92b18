//! Connected loopless undirected multigraphs stored as symmetric
//! multiplicity matrices.

use std::collections::VecDeque;


use crate::error::{Error, Result};
use crate::scalar::Int;

/// Symmetric matrix of edge multiplicities with a zero diagonal.
///
/// Vertices are indexed from 0. Values are immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multigraph<T> {
    n: usize,
    delta: Vec<T>,
}

/// Zeroes the diagonal in place and returns the indices that carried loops.
///
/// A loop at vertex `i` only shifts `d_i`, so the structures of a graph and
/// of its loopless version correspond one to one.
pub fn strip_loops<T: Int>(matrix: &mut [Vec<T>]) -> Vec<usize> {
    let mut stripped = Vec::new();
    for (i, row) in matrix.iter_mut().enumerate() {
        if let Some(x) = row.get_mut(i) {
            if !x.is_zero() {
                *x = T::zero();
                stripped.push(i);
            }
        }
    }
    stripped
}

impl<T: Int> Multigraph<T> {
    /// Builds a graph from a square multiplicity matrix. Loops are dropped.
    pub fn from_matrix(mut matrix: Vec<Vec<T>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::TooSmall { what: "graph", min: 1, n });
        }
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::NotSquare);
        }
        strip_loops(&mut matrix);
        for i in 0..n {
            for j in 0..n {
                if matrix[i][j].is_negative() {
                    return Err(Error::NegativeMultiplicity { i, j });
                }
                if j > i && matrix[i][j] != matrix[j][i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { n, delta: matrix.into_iter().flatten().collect() })
    }

    /// Builds a graph on `n` vertices from `(i, j, multiplicity)` triples with
    /// 0-based `i != j`. Repeated pairs are rejected by the caller.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooSmall { what: "graph", min: 1, n });
        }
        let mut delta = vec![T::zero(); n * n];
        for (i, j, m) in edges {
            let (i, j) = (*i, *j);
            for v in [i, j] {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
            }
            if m.is_negative() {
                return Err(Error::NegativeMultiplicity { i, j });
            }
            if i == j {
                continue;
            }
            delta[i * n + j] = m.clone();
            delta[j * n + i] = m.clone();
        }
        Ok(Self { n, delta })
    }

    /// `mK_n`: every pair of distinct vertices joined by `m` edges.
    pub fn complete(n: usize, m: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { what: "complete multigraph", min: 2, n });
        }
        if !m.is_positive() {
            return Err(Error::NotPositive { index: 0 });
        }
        let mut delta = vec![m; n * n];
        for i in 0..n {
            delta[i * n + i] = T::zero();
        }
        Ok(Self { n, delta })
    }

    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { what: "path", min: 2, n });
        }
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, T::one())).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooSmall { what: "cycle", min: 3, n });
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, T::one())).collect();
        edges.push((n - 1, 0, T::one()));
        Self::from_edges(n, &edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Multiplicity between `i` and `j`. Panics on an out-of-range index.
    #[inline]
    pub fn mult(&self, i: usize, j: usize) -> &T {
        &self.delta[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.delta[i * self.n..(i + 1) * self.n]
    }

    pub fn to_matrix(&self) -> Vec<Vec<T>> {
        self.delta.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Edges counted with multiplicity.
    pub fn edge_count(&self) -> T {
        let mut total = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                total = total + self.mult(i, j).clone();
            }
        }
        total
    }

    pub fn degree(&self, i: usize) -> Result<T> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(self.row(i).iter().fold(T::zero(), |acc, x| acc + x.clone()))
    }

    pub fn degrees(&self) -> Vec<T> {
        (0..self.n).map(|i| self.degree(i).expect("index in range")).collect()
    }

    /// Neighbours of `i` (positive multiplicity), ascending.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().filter(|(_, m)| m.is_positive()).map(|(j, _)| j)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.n
    }

    /// Same graph over another scalar type.
    pub fn convert<U: Int>(&self) -> Result<Multigraph<U>> {
        Ok(Multigraph {
            n: self.n,
            delta: crate::scalar::convert_vec(&self.delta)?,
        })
    }

    /// `Some(m)` when every off-diagonal multiplicity equals `m`.
    pub fn uniform_multiplicity(&self) -> Option<T> {
        if self.n < 2 {
            return None;
        }
        let m = self.mult(0, 1).clone();
        let uniform = (0..self.n)
            .all(|i| (0..self.n).all(|j| i == j || *self.mult(i, j) == m));
        uniform.then_some(m)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    /// The 7-vertex, 9-edge example graph used across the golden tests.
    pub(crate) fn house_with_triangle<T: Int>() -> Multigraph<T> {
        let edges = [(1, 2), (2, 3), (2, 4), (3, 4), (4, 1), (5, 1), (5, 6), (5, 7), (6, 7)];
        let edges: Vec<_> = edges.iter().map(|&(i, j)| (i - 1, j - 1, T::one())).collect();
        Multigraph::from_edges(7, &edges).unwrap()
    }

    fn assert_well_formed<T: Int>(g: &Multigraph<T>) {
        for i in 0..g.n() {
            assert!(g.mult(i, i).is_zero());
            for j in 0..g.n() {
                assert_eq!(g.mult(i, j), g.mult(j, i));
            }
        }
    }

    #[test]
    fn matrix_constructor() {
        let k2 = Multigraph::from_matrix(vec![vec![0i64, 1], vec![1, 0]]).unwrap();
        assert_eq!(k2, Multigraph::complete(2, 1).unwrap());

        let looped = Multigraph::from_matrix(vec![vec![2i64, 1], vec![1, 0]]).unwrap();
        assert_eq!(looped, k2);

        assert_eq!(
            Multigraph::from_matrix(vec![vec![0i64, 1], vec![2, 0]]),
            Err(Error::NotSymmetric { i: 0, j: 1 })
        );
        assert_eq!(Multigraph::from_matrix(vec![vec![0i64, 1]]), Err(Error::NotSquare));
        assert!(Multigraph::<i64>::from_matrix(vec![]).is_err());
    }

    #[test]
    fn strip_loops_reports_vertices() {
        let mut m = vec![vec![2i64, 1, 0], vec![1, 0, 1], vec![0, 1, 5]];
        assert_eq!(strip_loops(&mut m), vec![0, 2]);
        assert!(m[0][0] == 0 && m[2][2] == 0);
    }

    #[test]
    fn families() {
        let triple = Multigraph::complete(2, 3i64).unwrap();
        assert_eq!(triple.edge_count(), 3);
        assert_eq!(Multigraph::complete(4, 1i64).unwrap().edge_count(), 6);
        let two_k3 = Multigraph::complete(3, 2i64).unwrap();
        assert_eq!(two_k3.to_matrix(), vec![vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]);

        let p3 = Multigraph::<i64>::path(3).unwrap();
        assert_eq!(p3.to_matrix(), vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]);
        assert_eq!(Multigraph::<i64>::path(2).unwrap(), Multigraph::complete(2, 1).unwrap());
        assert_eq!(Multigraph::<i64>::cycle(3).unwrap(), Multigraph::complete(3, 1).unwrap());
        assert!(matches!(Multigraph::<i64>::path(1), Err(Error::TooSmall { .. })));
        assert!(matches!(Multigraph::<i64>::cycle(2), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn degrees_and_connectivity() {
        let k4 = Multigraph::complete(4, 1i64).unwrap();
        assert!((0..4).all(|i| k4.degree(i).unwrap() == 3));
        assert!(matches!(k4.degree(4), Err(Error::IndexOutOfRange { .. })));

        let g = house_with_triangle::<i64>();
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.degree(4).unwrap(), 3);
        assert!(g.is_connected());

        let two_edges = Multigraph::from_edges(4, &[(0, 1, 1i64), (2, 3, 1)]).unwrap();
        assert!(!two_edges.is_connected());
    }

    #[test]
    fn uniform_multiplicity_detects_complete_graphs() {
        assert_eq!(Multigraph::complete(4, 3i64).unwrap().uniform_multiplicity(), Some(3));
        assert_eq!(Multigraph::<i64>::path(3).unwrap().uniform_multiplicity(), None);
    }

    #[test]
    fn complete_edge_counts() {
        for n in 2..=8usize {
            for m in 1..=10i64 {
                let g = Multigraph::complete(n, m).unwrap();
                assert_well_formed(&g);
                assert_eq!(g.edge_count(), m * (n * (n - 1) / 2) as i64);
            }
        }
    }

    proptest! {
        #[test]
        fn handshake_and_symmetry(n in 1usize..8, entries in proptest::collection::vec(0i64..5, 64)) {
            let mut m = vec![vec![0i64; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    m[i][j] = entries[k];
                    m[j][i] = entries[k];
                    k += 1;
                }
            }
            let g = Multigraph::from_matrix(m).unwrap();
            assert_well_formed(&g);
            let total: i64 = g.degrees().iter().sum();
            prop_assert_eq!(total, 2 * g.edge_count());
            let big: Multigraph<BigInt> = g.convert().unwrap();
            prop_assert_eq!(big.edge_count(), BigInt::from(g.edge_count()));
        }
    }
}
