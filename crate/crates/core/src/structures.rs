//! Arithmetical structures `(r, d)`: verification, recovery of `d` from `r`,
//! the generalized Laplacian and its exact null space.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::scalar::{gcd_all, Int};

/// A candidate pair `(r, d)`. Whether it is an arithmetical structure on a
/// given graph is decided by [`verify`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArithStructure<T> {
    pub r: Vec<T>,
    pub d: Vec<T>,
}

impl<T: Int> ArithStructure<T> {
    pub fn new(r: Vec<T>, d: Vec<T>) -> Self {
        Self { r, d }
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    /// True when `r` is non-increasing.
    pub fn is_decreasing(&self) -> bool {
        self.r.windows(2).all(|w| w[0] >= w[1])
    }

    /// Reorders both vectors by the same vertex permutation.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            r: order.iter().map(|&i| self.r[i].clone()).collect(),
            d: order.iter().map(|&i| self.d[i].clone()).collect(),
        }
    }

    pub fn convert<U: Int>(&self) -> Result<ArithStructure<U>> {
        Ok(ArithStructure {
            r: crate::scalar::convert_vec(&self.r)?,
            d: crate::scalar::convert_vec(&self.d)?,
        })
    }
}

impl<T: fmt::Display> fmt::Display for ArithStructure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "r=({}) d=({})", join(&self.r), join(&self.d))
    }
}

/// `sum_{j != i} delta_ij * r_j`.
pub(crate) fn neighbor_sum<T: Int>(g: &Multigraph<T>, r: &[T], i: usize) -> Result<T> {
    let mut s = T::zero();
    for (j, m) in g.row(i).iter().enumerate() {
        if j != i && !m.is_zero() {
            s = s.add_c(&m.mul_c(&r[j])?)?;
        }
    }
    Ok(s)
}

fn check_len<T>(g_n: usize, v: &[T]) -> Result<()> {
    if v.len() != g_n {
        return Err(Error::LengthMismatch { expected: g_n, found: v.len() });
    }
    Ok(())
}

/// Recovers `d` from `r`. Fails when some `r_i` does not divide its
/// neighbour sum or when `gcd(r) > 1`.
pub fn d_from_r<T: Int>(g: &Multigraph<T>, r: &[T]) -> Result<ArithStructure<T>> {
    check_len(g.n(), r)?;
    if let Some(index) = r.iter().position(|x| !x.is_positive()) {
        return Err(Error::NotPositive { index });
    }
    if !gcd_all(r).is_one() {
        return Err(Error::GcdNotOne);
    }
    let mut d = Vec::with_capacity(r.len());
    for i in 0..g.n() {
        let (q, rem) = neighbor_sum(g, r, i)?.div_rem(&r[i]);
        if !rem.is_zero() {
            return Err(Error::NotDivisible { vertex: i });
        }
        if !q.is_positive() {
            // only an isolated vertex has an empty neighbour sum
            return Err(Error::Disconnected);
        }
        d.push(q);
    }
    Ok(ArithStructure { r: r.to_vec(), d })
}

/// `r_i d_i - sum_{j != i} delta_ij r_j` for every vertex.
pub fn residuals<T: Int>(g: &Multigraph<T>, s: &ArithStructure<T>) -> Result<Vec<T>> {
    check_len(g.n(), &s.r)?;
    check_len(g.n(), &s.d)?;
    (0..g.n())
        .map(|i| s.r[i].mul_c(&s.d[i])?.sub_c(&neighbor_sum(g, &s.r, i)?))
        .collect()
}

/// True iff every entry is positive, every vertex equation holds exactly and
/// `gcd(r) = 1`.
pub fn verify<T: Int>(g: &Multigraph<T>, s: &ArithStructure<T>) -> Result<bool> {
    let res = residuals(g, s)?;
    let positive = s.r.iter().chain(&s.d).all(|x| x.is_positive());
    Ok(positive && res.iter().all(|x| x.is_zero()) && gcd_all(&s.r).is_one())
}

/// Matrix with `-d_i` on the diagonal and `delta_ij` elsewhere.
pub fn generalized_laplacian<T: Int>(g: &Multigraph<T>, d: &[T]) -> Result<Vec<Vec<T>>> {
    check_len(g.n(), d)?;
    let mut m = g.to_matrix();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = -d[i].clone();
    }
    Ok(m)
}

/// Rank over the rationals and, when the null space is a line, its primitive
/// integer generator with positive leading entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullSpace<T> {
    pub rank: usize,
    pub generator: Option<Vec<T>>,
}

fn primitive<T: Int>(v: &mut [T]) {
    let g = gcd_all(v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = x.clone() / g.clone();
        }
    }
}

/// Exact rank and null-space generator by fraction-free Gauss-Jordan
/// elimination. Rows are kept primitive to bound entry growth.
pub fn nullspace_rank_check<T: Int>(m: &[Vec<T>]) -> Result<NullSpace<T>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::NotSquare);
    }
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by(|&x, &y| a[x][c].abs().cmp(&a[y][c].abs()))
        else {
            continue;
        };
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        let pv = pivot_row[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[c]);
            let (mul_self, mul_piv) = (pv.clone() / g.clone(), row[c].clone() / g);
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.mul_c(&mul_self)?.sub_c(&y.mul_c(&mul_piv)?)?;
            }
            primitive(row);
        }
        pivots.push(c);
        rank += 1;
    }
    if cols == 0 || cols - rank != 1 {
        return Ok(NullSpace { rank, generator: None });
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).expect("one free column");
    let mut scale = T::one();
    for (i, &c) in pivots.iter().enumerate() {
        scale = scale.lcm(&a[i][c]);
    }
    let mut x = vec![T::zero(); cols];
    x[free] = scale.clone();
    for (i, &c) in pivots.iter().enumerate() {
        // a_ic * x_c + a_i,free * x_free = 0
        let num = a[i][free].mul_c(&scale)?;
        x[c] = -(num / a[i][c].clone());
    }
    primitive(&mut x);
    if x.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
        for v in x.iter_mut() {
            *v = -v.clone();
        }
    }
    Ok(NullSpace { rank, generator: Some(x) })
}

/// Which enumerator produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Reduction-and-lift recursion.
    Recursive,
    /// Unit-fraction search through the complete-graph bijection.
    Egyptian,
    /// Bounded exhaustive search over `r`.
    Brute,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Recursive => "recursive",
            Method::Egyptian => "egyptian",
            Method::Brute => "brute",
        })
    }
}

/// Structures in canonical (lexicographic by `r`) order.
#[derive(Clone, Debug)]
pub struct EnumerationResult<T> {
    pub method: Method,
    /// False when the search range was not certified to cover every structure.
    pub complete: bool,
    pub structures: Vec<ArithStructure<T>>,
    pub elapsed: Duration,
}

impl<T: Int> EnumerationResult<T> {
    pub fn count(&self) -> usize {
        self.structures.len()
    }

    /// Number of structures with non-increasing `r`.
    pub fn decreasing_count(&self) -> usize {
        self.structures.iter().filter(|s| s.is_decreasing()).count()
    }
}
