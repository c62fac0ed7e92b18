//! Vertex removal `G(v_i, s)` and the induced map on arithmetical
//! structures, plus the general lift enumerator that inverts it.
//!
//! Removing `v_i` with scaling `s` leaves `n - 1` vertices joined by
//! `delta'_jk = delta_ij * delta_ik + s * delta_jk`. With `s = d_i` the
//! remaining `r` values, divided by their gcd `g`, form a structure on the
//! smaller graph with `d'_j = d_i d_j - delta_ij^2`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;


use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::scalar::{gcd_all, Int};
use crate::structures::{d_from_r, neighbor_sum, verify, ArithStructure};

/// Bookkeeping for one structure-induced reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep<T> {
    pub removed_vertex: usize,
    /// Scaling used for the surviving edges; equals `d_i`.
    pub s: T,
    /// gcd of the surviving `r` entries.
    pub g: T,
}

/// `G(v_i, s)`. Surviving vertices keep their relative order.
pub fn reduce_graph<T: Int>(g: &Multigraph<T>, i: usize, s: &T) -> Result<Multigraph<T>> {
    let n = g.n();
    if n < 3 {
        return Err(Error::TooFewVertices { n });
    }
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if !s.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mut m = vec![vec![T::zero(); n - 1]; n - 1];
    for (a, &j) in keep.iter().enumerate() {
        for (b, &k) in keep.iter().enumerate().skip(a + 1) {
            let v = g.mult(i, j).mul_c(g.mult(i, k))?.add_c(&s.mul_c(g.mult(j, k))?)?;
            m[a][b] = v.clone();
            m[b][a] = v;
        }
    }
    Multigraph::from_matrix(m)
}

/// Reduces a verified structure at vertex `i`, returning the smaller graph,
/// the induced structure and the step data.
pub fn reduce_structure<T: Int>(
    g: &Multigraph<T>,
    st: &ArithStructure<T>,
    i: usize,
) -> Result<(Multigraph<T>, ArithStructure<T>, ReductionStep<T>)> {
    if g.n() < 3 {
        return Err(Error::TooFewVertices { n: g.n() });
    }
    if i >= g.n() {
        return Err(Error::IndexOutOfRange { index: i, n: g.n() });
    }
    if !verify(g, st)? {
        return Err(Error::InvalidStructure);
    }
    let di = &st.d[i];
    let reduced = reduce_graph(g, i, di)?;
    let rest: Vec<T> = (0..g.n()).filter(|&j| j != i).map(|j| st.r[j].clone()).collect();
    let gcd = gcd_all(&rest);
    let r: Vec<T> = rest.iter().map(|x| x.clone() / gcd.clone()).collect();
    let mut d = Vec::with_capacity(r.len());
    for j in (0..g.n()).filter(|&j| j != i) {
        let dij = g.mult(i, j);
        d.push(di.mul_c(&st.d[j])?.sub_c(&dij.mul_c(dij)?)?);
    }
    let closed_form = ArithStructure::new(r, d);
    // double entry: the closed form must agree with direct recovery
    let recovered = d_from_r(&reduced, &closed_form.r)
        .map_err(|e| Error::Internal(format!("reduced r rejected: {e}")))?;
    if recovered != closed_form {
        return Err(Error::Internal(format!(
            "closed-form d' {:?} disagrees with recovered {:?}",
            closed_form.d, recovered.d
        )));
    }
    let step = ReductionStep { removed_vertex: i, s: di.clone(), g: gcd };
    Ok((reduced, closed_form, step))
}

/// One link of a reduction chain: the new graph, its structure and the step.
pub type ChainStep<T> = (Multigraph<T>, ArithStructure<T>, ReductionStep<T>);

/// Applies [`reduce_structure`] repeatedly. `order` lists the vertex to
/// remove at each step, indexed in the graph current at that step.
pub fn reduce_chain<T: Int>(
    g: &Multigraph<T>,
    st: &ArithStructure<T>,
    order: &[usize],
) -> Result<Vec<ChainStep<T>>> {
    let mut out = Vec::with_capacity(order.len());
    let (mut cur_g, mut cur_s) = (g.clone(), st.clone());
    for &i in order {
        let (ng, ns, step) = reduce_structure(&cur_g, &cur_s, i)?;
        out.push((ng.clone(), ns.clone(), step));
        cur_g = ng;
        cur_s = ns;
    }
    Ok(out)
}

/// Exact enumeration of every structure on a connected graph by lifting
/// structures from the reductions `G(v_i, d_i)`.
///
/// The vertex holding the largest `r` has `d_i <= deg(v_i)`, and the gcd
/// `g` of the other entries divides every `delta_ij`, so each structure is
/// reached from some `(i, d_i, g, r')`. `budget` caps the number of
/// candidate lifts examined over the whole recursion.
pub struct LiftEnumerator<T: Int> {
    memo: HashMap<Multigraph<T>, Arc<Vec<Vec<T>>>>,
    budget: u64,
    spent: u64,
}

impl<T: Int> LiftEnumerator<T> {
    pub fn new(budget: u64) -> Self {
        Self { memo: HashMap::new(), budget, spent: 0 }
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    /// Sorted `r` vectors of every structure on `g`.
    pub fn structures(&mut self, g: &Multigraph<T>) -> Result<Arc<Vec<Vec<T>>>> {
        if let Some(hit) = self.memo.get(g) {
            return Ok(hit.clone());
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let found = match g.n() {
            1 => Vec::new(),
            2 => {
                let mut v: Vec<Vec<T>> = crate::arith::coprime_divisor_pairs(g.mult(0, 1))?
                    .into_iter()
                    .map(|(a, b)| vec![a, b])
                    .collect();
                v.sort();
                v
            }
            _ => self.lift_all(g)?,
        };
        let found = Arc::new(found);
        self.memo.insert(g.clone(), found.clone());
        Ok(found)
    }

    fn lift_all(&mut self, g: &Multigraph<T>) -> Result<Vec<Vec<T>>> {
        let n = g.n();
        let mut out = BTreeSet::new();
        for i in 0..n {
            let deg = g.degree(i)?;
            let row_gcd = gcd_all(g.row(i));
            let scales = divisors(&row_gcd)?;
            let mut d = T::one();
            while d <= deg {
                let reduced = reduce_graph(g, i, &d)?;
                let subs = self.structures(&reduced)?;
                for sub in subs.iter() {
                    for scale in &scales {
                        self.spent += 1;
                        if self.spent > self.budget {
                            return Err(Error::BudgetExceeded(self.budget));
                        }
                        if let Some(r) = try_lift(g, i, &d, sub, scale)? {
                            out.insert(r);
                        }
                    }
                }
                d = d + T::one();
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// Inserts `r_i = scale * sum_j delta_ij r'_j / d` in front of the scaled
/// tail and keeps it when it is the maximum and the result is a structure.
fn try_lift<T: Int>(
    g: &Multigraph<T>,
    i: usize,
    d: &T,
    sub: &[T],
    scale: &T,
) -> Result<Option<Vec<T>>> {
    let mut r = Vec::with_capacity(g.n());
    for (k, x) in sub.iter().enumerate() {
        if k == i {
            r.push(T::zero());
        }
        r.push(x.mul_c(scale)?);
    }
    if i == sub.len() {
        r.push(T::zero());
    }
    let (ri, rem) = neighbor_sum(g, &r, i)?.div_rem(d);
    if !rem.is_zero() || r.iter().any(|x| *x > ri) {
        return Ok(None);
    }
    r[i] = ri;
    if !gcd_all(&r).is_one() {
        return Ok(None);
    }
    for j in 0..g.n() {
        if j != i && !neighbor_sum(g, &r, j)?.is_multiple_of(&r[j]) {
            return Ok(None);
        }
    }
    Ok(Some(r))
}
