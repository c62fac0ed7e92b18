//! Structures with non-increasing `r` on the complete multigraph `mK_n`.
//!
//! Removing the vertex with the largest `r` (and `d_1 <= (n-1)m`) from `mK_n`
//! leaves `(m^2 + d_1 m)K_{n-1}`, and the remaining entries are `g r'` with
//! `r'` a structure there and `g | m`. The enumeration runs this backwards:
//! for each `d_1`, each reduced structure and each divisor `g` of `m`, the
//! candidate `r_1 = m sum(g r') / d_1` is kept when it gives a structure.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use parking_lot::Mutex;
use rayon::prelude::*;

use crate::arith::{coprime_pairs_from, divisors, factorize, merge_factors};
use crate::error::{Error, Result};
use crate::scalar::{gcd_all, sum_c, Int};
use crate::structures::{ArithStructure, EnumerationResult, Method};

/// A structure on `mK_n` with `r` non-increasing (so `d` non-decreasing).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecStructure<T> {
    pub n: usize,
    pub m: T,
    pub r: Vec<T>,
    pub d: Vec<T>,
}

impl<T: Int> DecStructure<T> {
    pub fn structure(&self) -> ArithStructure<T> {
        ArithStructure::new(self.r.clone(), self.d.clone())
    }
}

/// `d` for `r` on `mK_n`, or `None` if some entry is not integral.
fn complete_d<T: Int>(m: &T, r: &[T]) -> Result<Option<Vec<T>>> {
    let total = sum_c(r)?;
    let mut d = Vec::with_capacity(r.len());
    for x in r {
        let (q, rem) = m.mul_c(&total.sub_c(x)?)?.div_rem(x);
        if !rem.is_zero() {
            return Ok(None);
        }
        d.push(q);
    }
    Ok(Some(d))
}

/// Non-increasing structures on `MK_2`: coprime `r_1 >= r_2` dividing `M`.
pub fn enumerate_mk2<T: Int>(big_m: &T) -> Result<Vec<DecStructure<T>>> {
    if !big_m.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    mk2_from_factors(big_m, &factorize(big_m, None)?)
}

fn mk2_from_factors<T: Int>(big_m: &T, factors: &[(T, u32)]) -> Result<Vec<DecStructure<T>>> {
    let mut out = Vec::new();
    for (a, b) in coprime_pairs_from(factors)? {
        if a >= b {
            let d = vec![big_m.clone() * b.clone() / a.clone(), big_m.clone() * a.clone() / b.clone()];
            out.push(DecStructure { n: 2, m: big_m.clone(), r: vec![a, b], d });
        }
    }
    out.sort_by(|x, y| x.r.cmp(&y.r));
    Ok(out)
}

/// Tries to extend `tail` (a scaled structure on `(m^2 + d1 m)K_{n-1}`) by
/// a new largest entry `r_1 = m sum(tail) / d1`.
pub fn lift_check<T: Int>(n: usize, m: &T, d1: &T, tail: &[T]) -> Result<Option<DecStructure<T>>> {
    if tail.len() + 1 != n {
        return Err(Error::LengthMismatch { expected: n - 1, found: tail.len() });
    }
    let s = sum_c(tail)?;
    let (r1, rem) = m.mul_c(&s)?.div_rem(d1);
    if !rem.is_zero() {
        return Ok(None);
    }
    if tail.iter().any(|x| *x > r1) {
        return Ok(None);
    }
    let mut r = Vec::with_capacity(n);
    r.push(r1);
    r.extend_from_slice(tail);
    if !gcd_all(&r).is_one() {
        return Ok(None);
    }
    let Some(d) = complete_d(m, &r)? else {
        return Ok(None);
    };
    if d[0] != *d1 {
        return Err(Error::Internal(format!("lift of {tail:?} gives d_1 {} not {d1}", d[0])));
    }
    r[1..].sort_by(|a, b| b.cmp(a));
    let d = complete_d(m, &r)?.ok_or_else(|| Error::Internal("reordering broke d".into()))?;
    Ok(Some(DecStructure { n, m: m.clone(), r, d }))
}

type Memo<T> = Mutex<HashMap<(usize, T), Arc<Vec<Vec<T>>>>>;

/// Recursive enumeration of `A_dec(mK_n)`.
pub struct MknEnumerator<T: Int> {
    memo: Memo<T>,
}

impl<T: Int> Default for MknEnumerator<T> {
    fn default() -> Self {
        Self { memo: Mutex::new(HashMap::new()) }
    }
}

impl<T: Int> MknEnumerator<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorted `r` vectors (each non-increasing) of `A_dec(mK_n)`.
    pub fn dec_rs(&self, n: usize, m: &T) -> Result<Arc<Vec<Vec<T>>>> {
        self.dec_rs_product(n, m, &T::one())
    }

    /// [`Self::dec_rs`] for multiplicity `a b`; the two factors are
    /// factored separately when `n = 2`.
    fn dec_rs_product(&self, n: usize, a: &T, b: &T) -> Result<Arc<Vec<Vec<T>>>> {
        if n < 2 {
            return Err(Error::TooSmall { what: "vertex count", min: 2, n });
        }
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::NotPositive { index: 0 });
        }
        let m = &a.mul_c(b)?;
        if n == 2 {
            let factors = merge_factors(&factorize(a, None)?, &factorize(b, None)?);
            let mut found: Vec<Vec<T>> =
                coprime_pairs_from(&factors)?.into_iter().filter(|(x, y)| x >= y).map(|(x, y)| vec![x, y]).collect();
            found.sort();
            return Ok(Arc::new(found));
        }
        let key = (n, m.clone());
        if let Some(hit) = self.memo.lock().get(&key) {
            return Ok(hit.clone());
        }
        let found = Arc::new(self.lift_level(n, m)?);
        self.memo.lock().insert(key, found.clone());
        Ok(found)
    }

    fn lift_level(&self, n: usize, m: &T) -> Result<Vec<Vec<T>>> {
        let top = T::try_from_u64(n as u64 - 1)?.mul_c(m)?;
        let mut d1s = Vec::new();
        let mut d1 = T::one();
        while d1 <= top {
            d1s.push(d1.clone());
            d1 = d1 + T::one();
        }
        let scales = divisors(m)?;
        let branches: Vec<Vec<Vec<T>>> = d1s
            .into_par_iter()
            .map(|d1| {
                let subs = self.dec_rs_product(n - 1, m, &m.add_c(&d1)?)?;
                let mut out = Vec::new();
                for tail in subs.iter() {
                    let ms = m.mul_c(&sum_c(tail)?)?;
                    if ms < d1.mul_c(&tail[0])? {
                        continue;
                    }
                    let mut hits = 0;
                    for g in &scales {
                        if !ms.mul_c(g)?.is_multiple_of(&d1) {
                            continue;
                        }
                        let scaled = tail.iter().map(|x| x.mul_c(g)).collect::<Result<Vec<_>>>()?;
                        if let Some(s) = lift_check(n, m, &d1, &scaled)? {
                            hits += 1;
                            out.push(s.r);
                        }
                    }
                    if hits > 1 {
                        return Err(Error::Internal(format!(
                            "{hits} lifts of {tail:?} with d_1 = {d1}"
                        )));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let set: BTreeSet<Vec<T>> = branches.into_iter().flatten().collect();
        Ok(set.into_iter().collect())
    }

    /// Full structures of `A_dec(mK_n)`, sorted by `r`.
    pub fn dec_structures(&self, n: usize, m: &T) -> Result<Vec<DecStructure<T>>> {
        self.dec_rs(n, m)?
            .iter()
            .map(|r| {
                let d = complete_d(m, r)?.ok_or_else(|| Error::Internal(format!("{r:?} has no d")))?;
                Ok(DecStructure { n, m: m.clone(), r: r.clone(), d })
            })
            .collect()
    }
}

/// `A_dec(mK_n)` with timing, as an [`EnumerationResult`].
pub fn enumerate_dec_mkn<T: Int>(n: usize, m: &T) -> Result<EnumerationResult<T>> {
    let start = Instant::now();
    let structures = MknEnumerator::new()
        .dec_structures(n, m)?
        .into_iter()
        .map(|s| s.structure())
        .collect();
    Ok(EnumerationResult {
        method: Method::Recursive,
        complete: true,
        structures,
        elapsed: start.elapsed(),
    })
}
