//! Bounded exhaustive search over `r`, used as an independent oracle.
//!
//! Vertices are assigned in a fixed order. Once every neighbour of a vertex
//! `v` is assigned, `r_v` must divide its neighbour sum; when the last
//! missing neighbour is `u`, that is a linear congruence on `r_u`. All such
//! congruences for `u` are merged into one arithmetic progression before
//! `r_u` is enumerated, so the search only visits values compatible with
//! every closed vertex.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arith::{divisors, isqrt};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::reduction::{reduce_graph, LiftEnumerator};
use crate::scalar::{gcd_all, Int};
use crate::structures::{d_from_r, ArithStructure, EnumerationResult, Method};

/// Lift checks allowed when certifying a search range.
pub const DEFAULT_CERT_BUDGET: u64 = 50_000_000;

/// Which `r` vectors the search visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    All,
    /// Only `r_1 >= r_2 >= ... >= r_n` in vertex order.
    NonIncreasing,
}

/// Every structure on `g` with `max(r) <= r_max`, sorted by `r`.
///
/// `complete` is set when `r_max` reaches [`certified_r_max`] computed with
/// [`DEFAULT_CERT_BUDGET`].
pub fn enumerate_brute<T: Int>(g: &Multigraph<T>, r_max: &T) -> Result<EnumerationResult<T>> {
    let cert = certified_r_max(g, DEFAULT_CERT_BUDGET)?;
    enumerate_brute_with(g, r_max, cert.as_ref(), Scope::All)
}

/// As [`enumerate_brute`] with a precomputed certificate and a scope.
pub fn enumerate_brute_with<T: Int>(
    g: &Multigraph<T>,
    r_max: &T,
    cert: Option<&T>,
    scope: Scope,
) -> Result<EnumerationResult<T>> {
    let start = Instant::now();
    let structures = search_scoped(g, r_max, scope)?;
    Ok(EnumerationResult {
        method: Method::Brute,
        complete: cert.is_some_and(|c| r_max >= c),
        structures,
        elapsed: start.elapsed(),
    })
}

/// Raw search without certification.
pub fn search<T: Int>(g: &Multigraph<T>, r_max: &T) -> Result<Vec<ArithStructure<T>>> {
    search_scoped(g, r_max, Scope::All)
}

/// Runs on `i64` when the graph and range fit, and on `T` otherwise or
/// after an overflow.
pub fn search_scoped<T: Int>(g: &Multigraph<T>, r_max: &T, scope: Scope) -> Result<Vec<ArithStructure<T>>> {
    if let (Ok(small), Some(top)) = (g.convert::<i64>(), r_max.to_i64()) {
        match search_typed(&small, &top, scope) {
            Ok(found) => return found.iter().map(ArithStructure::convert).collect(),
            Err(Error::Overflow) => {}
            Err(e) => return Err(e),
        }
    }
    search_typed(g, r_max, scope)
}

fn search_typed<T: Int>(g: &Multigraph<T>, r_max: &T, scope: Scope) -> Result<Vec<ArithStructure<T>>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if !r_max.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    let n = g.n();
    if n == 1 {
        return Ok(Vec::new());
    }
    let top = r_max
        .to_u64()
        .ok_or_else(|| Error::TooLarge(format!("r_max {r_max} exceeds the search range")))?;
    let plan = Plan::new(g);
    let found: Vec<Vec<Vec<T>>> = (1..=top)
        .into_par_iter()
        .map(|x| {
            let mut st = State::new(&plan, r_max.clone(), scope);
            st.assign(plan.order[0], T::try_from_u64(x)?)?;
            st.descend(1)?;
            Ok(st.out)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for r in found.into_iter().flatten() {
        out.push(d_from_r(g, &r)?);
    }
    out.sort_by(|a, b| a.r.cmp(&b.r));
    Ok(out)
}

struct Plan<'g, T> {
    g: &'g Multigraph<T>,
    order: Vec<usize>,
    /// Earlier vertices whose last unassigned neighbour is `order[k]`.
    closers: Vec<Vec<usize>>,
    /// Whether every neighbour of `order[k]` precedes it.
    self_closed: Vec<bool>,
}

impl<'g, T: Int> Plan<'g, T> {
    fn new(g: &'g Multigraph<T>) -> Self {
        let order = elimination_order(g);
        let n = g.n();
        let mut pos = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut closers = vec![Vec::new(); n];
        let mut self_closed = vec![false; n];
        for v in 0..n {
            let last = g.neighbors(v).map(|u| pos[u]).max().unwrap_or(0);
            if last > pos[v] {
                closers[last].push(v);
            } else {
                self_closed[pos[v]] = true;
            }
        }
        Self { g, order, closers, self_closed }
    }
}

/// Starts at a vertex of largest degree, then repeatedly takes the vertex
/// that closes the most assigned vertices, breaking ties by the number of
/// assigned neighbours and then by degree.
fn elimination_order<T: Int>(g: &Multigraph<T>) -> Vec<usize> {
    let n = g.n();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    let deg = |v: usize| (nbrs[v].len(), g.row(v).iter().fold(T::zero(), |a, x| a + x.clone()));
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let first = (0..n).max_by(|&a, &b| deg(a).cmp(&deg(b)).then(b.cmp(&a))).unwrap_or(0);
    placed[first] = true;
    order.push(first);
    while order.len() < n {
        let score = |u: usize| {
            let closes = nbrs[u]
                .iter()
                .filter(|&&v| placed[v] && nbrs[v].iter().all(|&w| w == u || placed[w]))
                .count();
            let seen = nbrs[u].iter().filter(|&&v| placed[v]).count();
            (closes, seen, deg(u))
        };
        let u = (0..n)
            .filter(|&u| !placed[u])
            .max_by(|&a, &b| score(a).cmp(&score(b)).then(b.cmp(&a)))
            .unwrap_or(0);
        placed[u] = true;
        order.push(u);
    }
    order
}

struct State<'p, 'g, T> {
    plan: &'p Plan<'g, T>,
    r_max: T,
    scope: Scope,
    r: Vec<T>,
    /// Neighbour sums over assigned vertices.
    sums: Vec<T>,
    out: Vec<Vec<T>>,
}

/// Solutions of the merged congruences in `1..=r_max`.
enum Candidates<T> {
    Progression { residue: T, modulus: T },
    Single(Option<T>),
}

impl<'p, 'g, T: Int> State<'p, 'g, T> {
    fn new(plan: &'p Plan<'g, T>, r_max: T, scope: Scope) -> Self {
        let n = plan.g.n();
        Self { plan, r_max, scope, r: vec![T::zero(); n], sums: vec![T::zero(); n], out: Vec::new() }
    }

    fn assign(&mut self, u: usize, x: T) -> Result<()> {
        for v in self.plan.g.neighbors(u) {
            let add = self.plan.g.mult(u, v).mul_c(&x)?;
            self.sums[v] = self.sums[v].add_c(&add)?;
        }
        self.r[u] = x;
        Ok(())
    }

    fn unassign(&mut self, u: usize) {
        for v in self.plan.g.neighbors(u) {
            let sub = self.plan.g.mult(u, v).clone() * self.r[u].clone();
            self.sums[v] = self.sums[v].clone() - sub;
        }
        self.r[u] = T::zero();
    }

    fn descend(&mut self, k: usize) -> Result<()> {
        let plan = self.plan;
        if k == plan.order.len() {
            if gcd_all(&self.r).is_one() {
                self.out.push(self.r.clone());
            }
            return Ok(());
        }
        let u = plan.order[k];
        let (lo, hi) = self.window(u);
        let Some(cands) = self.merge(u, &plan.closers[k], &hi)? else {
            return Ok(());
        };
        let values = if plan.self_closed[k] {
            self.divisor_candidates(u, cands)?
        } else {
            self.progression(cands, &lo, &hi)
        };
        for x in values {
            if x < lo || x > hi {
                continue;
            }
            self.assign(u, x)?;
            self.descend(k + 1)?;
            self.unassign(u);
        }
        Ok(())
    }

    /// Range allowed for `r_u` by the scope, given the assigned entries.
    fn window(&self, u: usize) -> (T, T) {
        let (mut lo, mut hi) = (T::one(), self.r_max.clone());
        if self.scope == Scope::NonIncreasing {
            for (v, x) in self.r.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if v < u && *x < hi {
                    hi = x.clone();
                } else if v > u && *x > lo {
                    lo = x.clone();
                }
            }
        }
        (lo, hi)
    }

    /// Merges `delta_vu x = -sums_v (mod r_v)` over the closers `v` of `u`,
    /// keeping solutions up to `hi`. `None` when there are none.
    fn merge(&self, u: usize, closers: &[usize], hi: &T) -> Result<Option<Candidates<T>>> {
        let mut cur = Candidates::Progression { residue: T::zero(), modulus: T::one() };
        for &v in closers {
            let (rv, dv) = (&self.r[v], self.plan.g.mult(u, v));
            cur = match cur {
                Candidates::Single(None) => return Ok(None),
                Candidates::Single(Some(x)) => {
                    let ok = (dv.mul_c(&x)?.add_c(&self.sums[v])?).is_multiple_of(rv);
                    Candidates::Single(ok.then_some(x))
                }
                Candidates::Progression { residue, modulus } => {
                    let Some((a, m)) = solve_linear(dv, &(-self.sums[v].clone()), rv) else {
                        return Ok(None);
                    };
                    match crt(&residue, &modulus, &a, &m)? {
                        None => return Ok(None),
                        Some((res, modl)) if modl > *hi => {
                            let x = if res.is_zero() { modl } else { res };
                            Candidates::Single((x <= *hi).then_some(x))
                        }
                        Some((res, modl)) => Candidates::Progression { residue: res, modulus: modl },
                    }
                }
            };
        }
        Ok(match cur {
            Candidates::Single(None) => None,
            c => Some(c),
        })
    }

    /// Members of the candidate set in `lo..=hi`.
    fn progression(&self, c: Candidates<T>, lo: &T, hi: &T) -> Vec<T> {
        match c {
            Candidates::Single(x) => x.into_iter().collect(),
            Candidates::Progression { residue, modulus } => {
                let shift = (residue - lo.clone()).mod_floor(&modulus);
                let mut x = lo.clone() + shift;
                let mut v = Vec::new();
                while x <= *hi {
                    v.push(x.clone());
                    x = x + modulus.clone();
                }
                v
            }
        }
    }

    /// Values for a vertex whose neighbour sum is already complete: divisors
    /// of that sum lying in the progression.
    fn divisor_candidates(&self, u: usize, c: Candidates<T>) -> Result<Vec<T>> {
        let s = &self.sums[u];
        let in_range = |x: &T| *x <= self.r_max;
        let mut out = match c {
            Candidates::Single(x) => x.into_iter().filter(|x| s.is_multiple_of(x)).collect(),
            Candidates::Progression { residue, modulus } => {
                let span = self.r_max.clone() / modulus.clone();
                let root = isqrt(s);
                if span <= root {
                    let fits = |x: &T| s.is_multiple_of(x);
                    self.progression(Candidates::Progression { residue, modulus }, &T::one(), &self.r_max)
                        .into_iter()
                        .filter(fits)
                        .collect()
                } else {
                    let mut v = Vec::new();
                    let mut q = T::one();
                    while q <= root {
                        if s.is_multiple_of(&q) {
                            for x in [q.clone(), s.clone() / q.clone()] {
                                if in_range(&x) && x.mod_floor(&modulus) == residue.mod_floor(&modulus) {
                                    v.push(x);
                                }
                            }
                        }
                        q = q + T::one();
                    }
                    v
                }
            }
        };
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Solutions of `a x = b (mod m)` as `x = residue (mod modulus)`.
fn solve_linear<T: Int>(a: &T, b: &T, m: &T) -> Option<(T, T)> {
    let g = a.gcd(m);
    if !b.is_multiple_of(&g) {
        return None;
    }
    let (a, b, m) = (a.clone() / g.clone(), b.clone() / g.clone(), m.clone() / g);
    if m.is_one() {
        return Some((T::zero(), T::one()));
    }
    let inv = a.extended_gcd(&m).x.mod_floor(&m);
    Some(((b.mod_floor(&m) * inv).mod_floor(&m), m))
}

/// Combines two congruences with possibly non-coprime moduli.
fn crt<T: Int>(a1: &T, m1: &T, a2: &T, m2: &T) -> Result<Option<(T, T)>> {
    let g = m1.gcd(m2);
    let diff = a2.clone() - a1.clone();
    if !diff.is_multiple_of(&g) {
        return Ok(None);
    }
    let (m1g, m2g) = (m1.clone() / g.clone(), m2.clone() / g.clone());
    let lcm = m1g.mul_c(m2)?;
    if m2g.is_one() {
        return Ok(Some((a1.mod_floor(&lcm), lcm)));
    }
    let inv = m1g.extended_gcd(&m2g).x.mod_floor(&m2g);
    let t = (diff / g).mod_floor(&m2g).mul_c(&inv)?.mod_floor(&m2g);
    let x = a1.add_c(&m1.mul_c(&t)?)?.mod_floor(&lcm);
    Ok(Some((x, lcm)))
}

/// A value that every `r_i` of every structure on `g` is at most, or `None`
/// when neither certificate is available.
///
/// Two certificates are tried and the smaller is used. The first looks one
/// reduction step down: if `r_i` is the maximum then `d_i <= deg(v_i)`, the
/// other entries are `g r'` for some structure `r'` on `G(v_i, d_i)` and some
/// `g` dividing every `delta_ij`, and `r_i = g sum_j delta_ij r'_j / d_i`.
/// Maximising the right-hand side over the choices where it is an integer
/// coprime to `g` and at least `g max(r')` bounds `r_i`; the
/// lower structures come from [`LiftEnumerator`] within `budget`. The second
/// is the closed form [`crate::bounds::r1_bound`], used when it fits in 64
/// bits.
pub fn certified_r_max<T: Int>(g: &Multigraph<T>, budget: u64) -> Result<Option<T>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let one_step = match g.n() {
        1 => Some(T::one()),
        2 => Some(g.mult(0, 1).clone()),
        _ => match one_step_bound(g, budget) {
            Ok(b) => Some(b),
            Err(Error::BudgetExceeded(_) | Error::Overflow) => None,
            Err(e) => return Err(e),
        },
    };
    let closed = closed_form_bound(g)?;
    Ok(match (one_step, closed) {
        (Some(a), Some(b)) => Some(if a < b { a } else { b }),
        (a, b) => a.or(b),
    })
}

fn one_step_bound<T: Int>(g: &Multigraph<T>, budget: u64) -> Result<T> {
    let mut lifts = LiftEnumerator::new(budget);
    let mut best = T::one();
    for i in 0..g.n() {
        let scales = divisors(&gcd_all(g.row(i)))?;
        let weights: Vec<&T> = (0..g.n()).filter(|&j| j != i).map(|j| g.mult(i, j)).collect();
        let deg = g.degree(i)?;
        let mut d = T::one();
        while d <= deg {
            let reduced = reduce_graph(g, i, &d)?;
            for sub in lifts.structures(&reduced)?.iter() {
                let mut s = T::zero();
                for (w, x) in weights.iter().zip(sub) {
                    s = s.add_c(&w.mul_c(x)?)?;
                }
                let top = sub.iter().max().cloned().unwrap_or_else(T::zero);
                for c in &scales {
                    let (ri, rem) = c.mul_c(&s)?.div_rem(&d);
                    if rem.is_zero() && ri >= c.mul_c(&top)? && ri.gcd(c).is_one() && ri > best {
                        best = ri;
                    }
                }
            }
            d = d + T::one();
        }
    }
    Ok(best)
}

fn closed_form_bound<T: Int>(g: &Multigraph<T>) -> Result<Option<T>> {
    let edges = g.edge_count().to_big();
    let bound = crate::bounds::r1_bound(g.n(), &edges)?;
    let floor: BigInt = bound.floor().to_integer();
    Ok(floor.to_u64().and_then(|v| T::from_u64(v)))
}
