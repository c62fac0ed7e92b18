//! Representations `a/m = 1/x_1 + ... + 1/x_n` with `x_1 <= ... <= x_n`,
//! and their correspondence with structures on `mK_n`.
//!
//! For `a = 1`, a structure `(r, d)` on `mK_n` gives the representation
//! `x = sort(d + m)`. Conversely `q_i = prod_{j != i} x_j` spans the null
//! space of the generalized Laplacian, so `r = q / gcd(q)` and
//! `d_i = x_i - m`.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::scalar::{gcd_all, Int};
use crate::structures::{verify, ArithStructure};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitFractionRep<T> {
    pub a: T,
    pub m: T,
    /// Non-decreasing denominators.
    pub x: Vec<T>,
}

impl<T: Int> UnitFractionRep<T> {
    /// Checks `sum 1/x_i = a/m` by cross-multiplication and the ordering.
    pub fn is_valid(&self) -> bool {
        if self.x.iter().any(|v| !v.is_positive()) || self.x.windows(2).any(|w| w[0] > w[1]) {
            return false;
        }
        let xs: Vec<BigInt> = self.x.iter().map(Int::to_big).collect();
        let prod: BigInt = xs.iter().product();
        let lhs: BigInt = xs.iter().map(|v| &prod / v).sum::<BigInt>() * self.m.to_big();
        lhs == self.a.to_big() * prod
    }
}

/// All `n`-term representations of `a/m`, sorted lexicographically.
pub fn enumerate_unit_fractions<T: Int>(n: usize, a: &T, m: &T) -> Result<Vec<UnitFractionRep<T>>> {
    if n == 0 {
        return Err(Error::TooSmall { what: "term count", min: 1, n });
    }
    if !a.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    if !m.is_positive() {
        return Err(Error::NotPositive { index: 1 });
    }
    let g = a.gcd(m);
    let (p, q) = (a.clone() / g.clone(), m.clone() / g);
    let wrap = |x: Vec<T>| UnitFractionRep { a: a.clone(), m: m.clone(), x };
    if n == 1 {
        return Ok(if p.is_one() { vec![wrap(vec![q])] } else { Vec::new() });
    }
    let (lo, hi) = term_range(n, &p, &q, &T::one())?;
    let firsts = values(&lo, &hi);
    let mut out: Vec<UnitFractionRep<T>> = firsts
        .into_par_iter()
        .map(|x| {
            let mut found = Vec::new();
            if let Some((p2, q2)) = subtract(&p, &q, &x)? {
                let mut prefix = vec![x.clone()];
                search(n - 1, &p2, &q2, &x, &mut prefix, &mut found)?;
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(wrap)
        .collect();
    out.sort();
    Ok(out)
}

/// `f_n(a, m)`: the number of representations.
pub fn f_n_count<T: Int>(n: usize, a: &T, m: &T) -> Result<usize> {
    Ok(enumerate_unit_fractions(n, a, m)?.len())
}

fn values<T: Int>(lo: &T, hi: &T) -> Vec<T> {
    let mut v = Vec::new();
    let mut x = lo.clone();
    while x <= *hi {
        v.push(x.clone());
        x = x + T::one();
    }
    v
}

/// Admissible range for the next term when `k` terms must sum to `p/q` and
/// none may be smaller than `t`.
fn term_range<T: Int>(k: usize, p: &T, q: &T, t: &T) -> Result<(T, T)> {
    let ceil = q.div_ceil(p);
    let lo = if ceil > *t { ceil } else { t.clone() };
    let hi = T::try_from_u64(k as u64)?.mul_c(q)? / p.clone();
    Ok((lo, hi))
}

/// `p/q - 1/x` in lowest terms, or `None` unless it is positive.
fn subtract<T: Int>(p: &T, q: &T, x: &T) -> Result<Option<(T, T)>> {
    let num = p.mul_c(x)?.sub_c(q)?;
    if !num.is_positive() {
        return Ok(None);
    }
    let den = q.mul_c(x)?;
    let g = num.gcd(&den);
    Ok(Some((num / g.clone(), den / g)))
}

fn search<T: Int>(k: usize, p: &T, q: &T, t: &T, prefix: &mut Vec<T>, out: &mut Vec<Vec<T>>) -> Result<()> {
    if k == 1 {
        if p.is_one() && q >= t {
            let mut x = prefix.clone();
            x.push(q.clone());
            out.push(x);
        }
        return Ok(());
    }
    let (lo, hi) = term_range(k, p, q, t)?;
    let mut x = lo;
    while x <= hi {
        if let Some((p2, q2)) = subtract(p, q, &x)? {
            prefix.push(x.clone());
            search(k - 1, &p2, &q2, &x, prefix, out)?;
            prefix.pop();
        }
        x = x + T::one();
    }
    Ok(())
}

/// The representation of `1/m` attached to a structure on `mK_n`.
pub fn structure_to_fractions<T: Int>(m: &T, s: &ArithStructure<T>) -> Result<UnitFractionRep<T>> {
    let g = Multigraph::complete(s.n(), m.clone())?;
    if !verify(&g, s)? {
        return Err(Error::InvalidStructure);
    }
    let mut x = s.d.iter().map(|d| d.add_c(m)).collect::<Result<Vec<_>>>()?;
    x.sort();
    Ok(UnitFractionRep { a: T::one(), m: m.clone(), x })
}

/// The structure on `mK_n` attached to a representation of `1/m`, with
/// vertices in the order of `x` (so `d` ascends and `r` descends).
pub fn fractions_to_structure<T: Int>(rep: &UnitFractionRep<T>) -> Result<ArithStructure<T>> {
    if !rep.a.is_one() {
        return Err(Error::Domain("only representations of 1/m correspond to structures".into()));
    }
    if !rep.is_valid() {
        return Err(Error::InvalidStructure);
    }
    if let Some(i) = rep.x.iter().position(|x| *x <= rep.m) {
        return Err(Error::DegenerateRep { index: i });
    }
    let xs: Vec<BigInt> = rep.x.iter().map(Int::to_big).collect();
    let prod: BigInt = xs.iter().product();
    let q: Vec<BigInt> = xs.iter().map(|x| &prod / x).collect();
    let g = gcd_all(&q);
    let r = q
        .iter()
        .map(|v| T::from_big(&(v / &g)).ok_or(Error::Overflow))
        .collect::<Result<Vec<_>>>()?;
    let d = rep.x.iter().map(|x| x.sub_c(&rep.m)).collect::<Result<Vec<_>>>()?;
    let s = ArithStructure::new(r, d);
    let graph = Multigraph::complete(rep.x.len(), rep.m.clone())?;
    if !verify(&graph, &s)? {
        return Err(Error::Internal(format!("{s} does not verify on the complete graph")));
    }
    Ok(s)
}
