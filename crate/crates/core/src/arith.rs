//! Trial-division number theory: factorizations, divisor lists, coprime
//! divisor pairs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Int;

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order.
///
/// `budget` caps the number of trial divisors tried; when the cofactor left
/// after the budget is not provably prime the call fails with
/// [`Error::TooLarge`].
pub fn factorize<T: Int>(n: &T, budget: Option<u64>) -> Result<Vec<(T, u32)>> {
    if !n.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    let two = T::small(2);
    let mut p = two.clone();
    let mut tried = 0u64;
    loop {
        if p.mul_c(&p).map_or(true, |sq| sq > rest) {
            break;
        }
        if let Some(b) = budget {
            if tried >= b {
                return Err(Error::TooLarge(format!(
                    "cofactor {rest} of {n} not resolved within {b} trial divisions"
                )));
            }
        }
        tried += 1;
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p = if p == two { T::small(3) } else { p + two.clone() };
    }
    if !rest.is_one() {
        out.push((rest, 1));
    }
    Ok(out)
}

/// Number of positive divisors from a factorization.
pub fn divisor_count_of(factors: &[(impl Int, u32)]) -> u64 {
    factors.iter().map(|(_, e)| u64::from(*e) + 1).product()
}

/// Factorization of `a b` from factorizations of `a` and `b`.
pub fn merge_factors<T: Int>(a: &[(T, u32)], b: &[(T, u32)]) -> Vec<(T, u32)> {
    let mut all: BTreeMap<T, u32> = BTreeMap::new();
    for (p, e) in a.iter().chain(b) {
        *all.entry(p.clone()).or_default() += e;
    }
    all.into_iter().collect()
}

/// All positive divisors, sorted ascending.
pub fn divisors<T: Int>(n: &T) -> Result<Vec<T>> {
    let factors = factorize(n, None)?;
    let mut out = vec![T::one()];
    for (p, e) in &factors {
        let len = out.len();
        let mut pk = T::one();
        for _ in 0..*e {
            pk = pk.mul_c(p)?;
            for i in 0..len {
                out.push(out[i].mul_c(&pk)?);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// All ordered pairs `(a, b)` with `a | n`, `b | n` and `gcd(a, b) = 1`.
///
/// For each prime power `p^e` exactly dividing `n` the prime goes wholly to
/// one side with exponent `1..=e` or to neither, so there are
/// `prod (2e + 1) = sigma0(n^2)` pairs.
pub fn coprime_divisor_pairs<T: Int>(n: &T) -> Result<Vec<(T, T)>> {
    coprime_pairs_from(&factorize(n, None)?)
}

/// [`coprime_divisor_pairs`] for the number with the given factorization.
pub fn coprime_pairs_from<T: Int>(factors: &[(T, u32)]) -> Result<Vec<(T, T)>> {
    let mut out = vec![(T::one(), T::one())];
    for (p, e) in factors {
        let mut powers = Vec::with_capacity(*e as usize);
        let mut pk = T::one();
        for _ in 0..*e {
            pk = pk.mul_c(p)?;
            powers.push(pk.clone());
        }
        let mut next = Vec::with_capacity(out.len() * (2 * *e as usize + 1));
        for (a, b) in &out {
            next.push((a.clone(), b.clone()));
            for pk in &powers {
                next.push((a.mul_c(pk)?, b.clone()));
                next.push((a.clone(), b.mul_c(pk)?));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Integer square root (floor) of a non-negative value.
pub fn isqrt<T: Int>(n: &T) -> T {
    if n.is_zero() || n.is_one() {
        return n.clone();
    }
    let two = T::small(2);
    // Newton iteration from an upper starting point.
    let mut x = n.clone();
    let mut y = (x.clone() + n.clone() / x.clone()) / two.clone();
    while y < x {
        x = y;
        y = (x.clone() + n.clone() / x.clone()) / two.clone();
    }
    x
}
