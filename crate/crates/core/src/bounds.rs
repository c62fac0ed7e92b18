//! Upper bounds on the number and size of arithmetical structures.
//!
//! The divisor function is bounded by `f(x) = x^{1.538 ln 2 / ln ln x}`.
//! Every bound below feeds `f` an astronomically large argument, so the
//! argument is carried as its logarithm and the whole expression is
//! evaluated with multi-precision floats. A floor whose pre-floor value lies
//! within `2^-20` of an integer is recomputed at doubled precision; if it
//! stays that close the report says so through `boundary_flag`.

use astro_float::{BigFloat, Consts, RoundingMode, Word};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{divisor_count_of, factorize};
use crate::error::{Error, Result};

/// Working precision used when none is requested.
pub const DEFAULT_PRECISION_BITS: usize = 128;
/// Environment variable overriding [`DEFAULT_PRECISION_BITS`].
pub const PRECISION_ENV: &str = "ARITHSTRUCT_PRECISION_BITS";
/// Trial divisions allowed in [`divisor_count`]; enough for `M <= 10^12`.
pub const FACTOR_BUDGET: u64 = 1_000_000;

const BOUNDARY_BITS: i32 = 20;
const MAX_DOUBLINGS: u32 = 4;
const MAX_LOG2_EXPONENT: u32 = 24;

const RM: RoundingMode = RoundingMode::ToEven;

/// `sigma_0(M)` by trial division.
pub fn divisor_count(m: &BigInt) -> Result<BigInt> {
    let f = factorize(m, Some(FACTOR_BUDGET))?;
    Ok(BigInt::from(divisor_count_of(&f)))
}

/// The precision from [`PRECISION_ENV`] if set and valid, else the default.
pub fn default_precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&p: &usize| p >= 64)
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

/// Arbitrary-precision evaluation context.
pub struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    pub fn new(p: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Internal(format!("float constants: {e:?}")))?;
        Ok(Self { p, cc })
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn int(&mut self, v: &BigInt) -> BigFloat {
        BigFloat::parse(&v.to_string(), astro_float::Radix::Dec, self.p, RM, &mut self.cc)
    }

    pub fn small(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.p)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.p, RM, &mut self.cc)
    }

    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(self.p, RM, &mut self.cc)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    /// `ln f(x)` given `ln x`: `(1.538 ln 2 / ln ln x) ln x`.
    pub fn nicolas_f(&mut self, log_x: &BigFloat) -> Result<BigFloat> {
        if log_x.cmp(&self.small(1)).is_none_or(|c| c <= 0) {
            return Err(Error::Domain("ln f needs ln x > 1".into()));
        }
        let ln2 = self.ln(&self.small(2));
        let c = self.div(&self.mul(&self.small(1538), &ln2), &self.small(1000));
        let lnln = self.ln(log_x);
        Ok(self.mul(&self.div(&c, &lnln), log_x))
    }
}

/// Floor of a finite non-negative float, and whether its fractional part is
/// within `2^-20` of 0 or 1.
pub fn floor_with_flag(x: &BigFloat, ctx: &Ctx) -> Result<(BigInt, bool)> {
    if x.is_nan() || x.is_inf() || x.is_negative() {
        return Err(Error::Internal(format!("cannot floor {x}")));
    }
    let fl = x.floor();
    let frac = x.sub(&fl, ctx.p, RM);
    let eps = BigFloat::from_u64(1, ctx.p);
    let eps = eps.div(&BigFloat::from_u64(1 << BOUNDARY_BITS, ctx.p), ctx.p, RM);
    let one = BigFloat::from_u64(1, ctx.p);
    let near = frac.cmp(&eps).is_some_and(|c| c < 0)
        || one.sub(&frac, ctx.p, RM).cmp(&eps).is_some_and(|c| c < 0);
    Ok((to_bigint(&fl)?, near))
}

/// Exact conversion of an integral float.
fn to_bigint(x: &BigFloat) -> Result<BigInt> {
    if x.is_zero() {
        return Ok(BigInt::zero());
    }
    let (words, _, sign, e, _) =
        x.as_raw_parts().ok_or_else(|| Error::Internal("non-finite value".into()))?;
    let bits = (words.len() * Word::BITS as usize) as i64;
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        let w = *w;
        digits.push(w as u32);
        if Word::BITS == 64 {
            digits.push((w >> 32) as u32);
        }
    }
    let m = BigUint::new(digits);
    let e = e as i64;
    let mag = if e >= bits { m << (e - bits) as usize } else if e <= 0 { BigUint::zero() } else { m >> (bits - e) as usize };
    let sign = if sign == astro_float::Sign::Neg { Sign::Minus } else { Sign::Plus };
    Ok(BigInt::from_biguint(sign, mag))
}

/// Result of evaluating one floor with precision escalation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Floored {
    pub value: BigInt,
    pub precision_bits: usize,
    pub boundary_flag: bool,
}

/// Evaluates `eval` at `p` bits and doubles the precision while the result
/// sits on an integer boundary.
pub fn floor_escalating(
    p: usize,
    mut eval: impl FnMut(&mut Ctx) -> Result<BigFloat>,
) -> Result<Floored> {
    let mut p = p.max(64);
    let mut last = None;
    for _ in 0..=MAX_DOUBLINGS {
        let mut ctx = Ctx::new(p)?;
        let x = eval(&mut ctx)?;
        let (value, near) = floor_with_flag(&x, &ctx)?;
        if !near {
            return Ok(Floored { value, precision_bits: p, boundary_flag: false });
        }
        last = Some(value);
        p *= 2;
    }
    let value = last.ok_or_else(|| Error::Internal("no evaluation".into()))?;
    Ok(Floored { value, precision_bits: p / 2, boundary_flag: true })
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

fn pow2(k: usize) -> Result<u64> {
    if k as u32 > MAX_LOG2_EXPONENT {
        return Err(Error::TooLarge(format!("exponent 2^{k} is out of range")));
    }
    Ok(1u64 << k)
}

/// `E^{3 2^{n-2} - 2} / (n-1)!`, an upper bound on every `r_i` of every
/// structure on a connected graph with `n` vertices and `E` edges.
pub fn r1_bound(n: usize, edges: &BigInt) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::TooSmall { what: "vertex count", min: 2, n });
    }
    if !edges.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    let exp = 3 * pow2(n - 2)? - 2;
    let bits = edges.bits().saturating_mul(exp);
    if bits > 1 << MAX_LOG2_EXPONENT {
        return Err(Error::TooLarge(format!("{bits}-bit bound")));
    }
    let num = num_traits::pow(edges.clone(), exp as usize);
    Ok(BigRational::new(num, factorial(n as u64 - 1)))
}

/// `n!/2 E^{2^{n-2}-1} f(E^{2^{n-1}})`, floored, bounding `#A(G)`.
pub fn general_bound(n: usize, edges: &BigInt, p: usize) -> Result<Floored> {
    if n < 2 {
        return Err(Error::TooSmall { what: "vertex count", min: 2, n });
    }
    if !edges.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    if edges.is_one() {
        return Err(Error::Domain("ln ln of 1 is undefined".into()));
    }
    let poly = factorial(n as u64) * num_traits::pow(edges.clone(), (pow2(n - 2)? - 1) as usize);
    let scale = pow2(n - 1)?;
    floor_escalating(p, |ctx| {
        let e = ctx.int(edges);
        let ln_e = ctx.ln(&e);
        let log_x = ctx.mul(&ctx.small(scale), &ln_e);
        let ln_f = ctx.nicolas_f(&log_x)?;
        let f = ctx.exp(&ln_f);
        let poly = ctx.int(&poly);
        Ok(ctx.div(&ctx.mul(&poly, &f), &ctx.small(2)))
    })
}

/// `(n-1)!/2 prod_{k=0}^{n-4} (n-k)^{2^{n-3-k}-1} m^{2^{n-2}-1} (f(X) + 1)`
/// with `X = m^{2^{n-1}} prod_{k=3}^n k^{2^{k-2}}`, floored, bounding
/// `#A_dec(mK_n)` for `n >= 3`.
pub fn mkn_bound(n: usize, m: &BigInt, p: usize) -> Result<Floored> {
    if n < 3 {
        return Err(Error::TooSmall { what: "vertex count", min: 3, n });
    }
    if !m.is_positive() {
        return Err(Error::NotPositive { index: 0 });
    }
    let mut poly = factorial(n as u64 - 1) * num_traits::pow(m.clone(), (pow2(n - 2)? - 1) as usize);
    for k in 0..=n.saturating_sub(4) {
        if n < 4 {
            break;
        }
        let e = pow2(n - 3 - k)? - 1;
        poly *= num_traits::pow(BigInt::from(n - k), e as usize);
    }
    let m_scale = pow2(n - 1)?;
    let k_scales: Vec<(u64, u64)> = (3..=n as u64).map(|k| Ok((k, pow2(k as usize - 2)?))).collect::<Result<_>>()?;
    floor_escalating(p, |ctx| {
        let m = ctx.int(m);
        let ln_m = ctx.ln(&m);
        let mut log_x = ctx.mul(&ctx.small(m_scale), &ln_m);
        for &(k, s) in &k_scales {
            let ln_k = ctx.ln(&ctx.small(k));
            let term = ctx.mul(&ctx.small(s), &ln_k);
            log_x = ctx.add(&log_x, &term);
        }
        let ln_f = ctx.nicolas_f(&log_x)?;
        let f = ctx.exp(&ln_f);
        let f1 = ctx.add(&f, &ctx.small(1));
        let poly = ctx.int(&poly);
        Ok(ctx.div(&ctx.mul(&poly, &f1), &ctx.small(2)))
    })
}

/// Everything the `bounds` command reports for one graph size.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub edge_count: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    /// Floor of the general bound on `#A(G)`, or `sigma_0(E^2)` when the
    /// formula is inapplicable (`n = 2`, `E = 1`).
    pub general_bound: String,
    pub general_bound_formula_applies: bool,
    /// Exact rational, written `p/q` or as an integer.
    pub r1_bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mkn_bound: Option<String>,
    pub precision_bits: usize,
    pub boundary_flag: bool,
}

/// Report for a graph with `n` vertices and `edges` edges. With `m` the
/// graph is taken to be `mK_n` and the complete-graph bound is added.
pub fn report(n: usize, edges: &BigInt, m: Option<&BigInt>, p: usize) -> Result<BoundReport> {
    let (general, applies, mut bits, mut flag) = match general_bound(n, edges, p) {
        Ok(f) => (f.value, true, f.precision_bits, f.boundary_flag),
        Err(Error::Domain(_)) if n == 2 => (divisor_count(&(edges * edges))?, false, p, false),
        Err(e) => return Err(e),
    };
    let r1 = r1_bound(n, edges)?;
    let mkn = match m {
        Some(m) if n >= 3 => {
            let f = mkn_bound(n, m, p)?;
            bits = bits.max(f.precision_bits);
            flag |= f.boundary_flag;
            Some(f.value.to_string())
        }
        Some(m) => Some(((divisor_count(&(m * m))? + 1u32) / 2u32).to_string()),
        None => None,
    };
    Ok(BoundReport {
        n,
        edge_count: edges.to_string(),
        m: m.map(|m| m.to_string()),
        general_bound: general.to_string(),
        general_bound_formula_applies: applies,
        r1_bound: r1.to_string(),
        mkn_bound: mkn,
        precision_bits: bits,
        boundary_flag: flag,
    })
}

/// Edge count of `mK_n`.
pub fn complete_edge_count(n: usize, m: &BigInt) -> BigInt {
    m * BigInt::from(n) * BigInt::from(n.saturating_sub(1)) / 2
}

/// `ceil` of an exact rational; used where an integer cap is needed.
pub fn ceil_rational(q: &BigRational) -> BigInt {
    let (d, r) = q.numer().div_rem(q.denom());
    if r.is_positive() { d + 1 } else { d }
}

/// `sigma_0` for machine integers, for comparisons against `f`.
pub fn divisor_count_u64(m: u64) -> u64 {
    divisor_count(&BigInt::from(m)).ok().and_then(|v| v.to_u64()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(&b(1)).unwrap(), b(1));
        assert_eq!(divisor_count(&b(9)).unwrap(), b(3));
        assert_eq!(divisor_count(&b(36)).unwrap(), b(9));
        assert!(matches!(divisor_count(&(b(2_100_001) * b(2_100_011))), Err(Error::TooLarge(_))));
    }

    #[test]
    fn table_bounds_three_vertices() {
        let want = [20, 56, 127, 229, 362, 526, 720, 946, 1201, 1487];
        for (m, w) in (1..=10).zip(want) {
            let f = mkn_bound(3, &b(m), 128).unwrap();
            assert_eq!(f.value, b(w), "m = {m}");
            assert!(!f.boundary_flag);
        }
        assert_eq!(mkn_bound(3, &b(100), 128).unwrap().value, b(142796));
        assert_eq!(mkn_bound(3, &b(101), 128).unwrap().value, b(145584));
    }

    #[test]
    fn table_bounds_four_and_five_vertices() {
        let want = [688, 23028, 173664, 717812, 2141953, 5209709, 11012969, 21019441, 37117341, 61657730];
        for (m, w) in (1..=10).zip(want) {
            assert_eq!(mkn_bound(4, &b(m), 128).unwrap().value, b(w), "m = {m}");
        }
        assert_eq!(mkn_bound(5, &b(1), 128).unwrap().value, b(8567815));
    }

    #[test]
    fn doubling_precision_is_stable() {
        for m in 1..=6 {
            let lo = mkn_bound(4, &b(m), 128).unwrap();
            let hi = mkn_bound(4, &b(m), 512).unwrap();
            assert_eq!(lo.value, hi.value);
        }
    }

    #[test]
    fn general_bound_examples() {
        assert_eq!(general_bound(2, &b(3), 128).unwrap().value, b(19));
        assert!(matches!(general_bound(2, &b(1), 128), Err(Error::Domain(_))));
        let r = report(2, &b(1), None, 128).unwrap();
        assert!(!r.general_bound_formula_applies);
        assert_eq!(r.general_bound, "1");
    }

    #[test]
    fn ln_f_at_nine() {
        let mut ctx = Ctx::new(128).unwrap();
        let log9 = ctx.ln(&ctx.small(9));
        let v = ctx.nicolas_f(&log9).unwrap();
        let scaled = ctx.mul(&v, &ctx.small(10_000));
        assert_eq!(floor_with_flag(&scaled, &ctx).unwrap().0, b(29755));
        let one = ctx.small(1);
        assert!(matches!(ctx.nicolas_f(&one), Err(Error::Domain(_))));
    }

    #[test]
    fn r1_bound_examples() {
        assert_eq!(r1_bound(2, &b(7)).unwrap(), BigRational::from_integer(b(7)));
        assert_eq!(r1_bound(3, &b(3)).unwrap(), BigRational::new(b(81), b(2)));
        assert_eq!(r1_bound(4, &b(6)).unwrap(), BigRational::new(num_traits::pow(b(6), 10), b(6)));
        assert_eq!(ceil_rational(&r1_bound(3, &b(3)).unwrap()), b(41));
    }

    #[test]
    fn integer_extraction() {
        let ctx = Ctx::new(256).unwrap();
        for v in [0u64, 1, 5, 1 << 40, u64::MAX] {
            let x = BigFloat::from_u64(v, ctx.p);
            assert_eq!(to_bigint(&x).unwrap(), b(v));
        }
        let big = num_traits::pow(b(10), 40) + 7;
        let mut ctx = ctx;
        assert_eq!(to_bigint(&ctx.int(&big)).unwrap(), big);
    }

    #[test]
    fn f_dominates_divisor_count() {
        // sampled; tests/invariants.rs covers every M up to 10^6
        let mut ctx = Ctx::new(128).unwrap();
        for m in (3u64..5000).chain([720720, 997920, 983040]) {
            let lm = ctx.ln(&ctx.small(m));
            let lf = ctx.nicolas_f(&lm).unwrap();
            let f = ctx.exp(&lf);
            let s = ctx.small(divisor_count_u64(m));
            assert!(s.cmp(&f).is_some_and(|c| c <= 0), "M = {m}");
        }
    }
}
