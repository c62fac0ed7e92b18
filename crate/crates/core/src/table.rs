//! Count and bound columns for complete multigraphs, laid out as CSV.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::bounds::mkn_bound;
use crate::egyptian::{enumerate_unit_fractions, fractions_to_structure};
use crate::error::{Error, Result};
use crate::mkn::MknEnumerator;
use crate::scalar::Int;
use crate::structures::{ArithStructure, Method};

/// Runs `f` on `i128` and repeats it on `BigInt` if that overflowed.
pub fn with_fallback<R>(
    f_small: impl FnOnce() -> Result<R>,
    f_big: impl FnOnce() -> Result<R>,
) -> Result<R> {
    match f_small() {
        Err(Error::Overflow) => {
            log::info!("machine integers overflowed; retrying with big integers");
            f_big()
        }
        other => other,
    }
}

/// `A_dec(mK_n)` through the unit-fraction bijection, sorted by `r`.
pub fn dec_structures_egyptian<T: Int>(n: usize, m: &T) -> Result<Vec<ArithStructure<T>>> {
    let mut out = enumerate_unit_fractions(n, &T::one(), m)?
        .iter()
        .map(fractions_to_structure)
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.r.cmp(&b.r));
    Ok(out)
}

/// `#A_dec(mK_n)` by the recursive lift or by the unit-fraction search.
pub fn dec_count(n: usize, m: u64, method: Method) -> Result<usize> {
    match method {
        Method::Recursive => with_fallback(
            || Ok(MknEnumerator::<i128>::new().dec_rs(n, &i128::from(m))?.len()),
            || Ok(MknEnumerator::<BigInt>::new().dec_rs(n, &BigInt::from(m))?.len()),
        ),
        Method::Egyptian => with_fallback(
            || Ok(dec_structures_egyptian(n, &i128::from(m))?.len()),
            || Ok(dec_structures_egyptian(n, &BigInt::from(m))?.len()),
        ),
        Method::Brute => Err(Error::Domain("tables use the recursive or egyptian method".into())),
    }
}

/// Which cells of the table to fill.
#[derive(Clone, Debug)]
pub struct TableSpec {
    pub n_list: Vec<usize>,
    pub ms: Vec<u64>,
    /// Largest `m` computed for a given `n`; other cells are left empty.
    pub limits: BTreeMap<usize, u64>,
    pub method: Method,
    pub precision_bits: usize,
}

impl TableSpec {
    fn wanted(&self, n: usize, m: u64) -> bool {
        self.limits.get(&n).is_none_or(|&lim| m <= lim)
    }
}

/// CSV with columns `m,count_n<N>,bound_n<N>,...`. The bound column for
/// `n = 2` holds the exact count.
pub fn build_table(spec: &TableSpec) -> Result<String> {
    let mut out = String::from("m");
    for n in &spec.n_list {
        out.push_str(&format!(",count_n{n},bound_n{n}"));
    }
    out.push('\n');
    let enumerators: BTreeMap<usize, MknEnumerator<i128>> =
        spec.n_list.iter().map(|&n| (n, MknEnumerator::new())).collect();
    for &m in &spec.ms {
        let mut row = m.to_string();
        for &n in &spec.n_list {
            if !spec.wanted(n, m) {
                row.push_str(",,");
                continue;
            }
            let count = match spec.method {
                Method::Recursive => with_fallback(
                    || Ok(enumerators[&n].dec_rs(n, &i128::from(m))?.len()),
                    || dec_count(n, m, Method::Recursive),
                )?,
                method => dec_count(n, m, method)?,
            };
            let bound = if n >= 3 {
                let b = mkn_bound(n, &BigInt::from(m), spec.precision_bits)?;
                if b.boundary_flag {
                    log::warn!("bound for n={n}, m={m} is within 2^-20 of an integer");
                }
                b.value.to_string()
            } else {
                count.to_string()
            };
            row.push_str(&format!(",{count},{bound}"));
        }
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n_list: Vec<usize>, ms: Vec<u64>) -> TableSpec {
        TableSpec { n_list, ms, limits: BTreeMap::new(), method: Method::Recursive, precision_bits: 128 }
    }

    #[test]
    fn empty_range_is_header_only() {
        assert_eq!(build_table(&spec(vec![3, 4], vec![])).unwrap(), "m,count_n3,bound_n3,count_n4,bound_n4\n");
    }

    #[test]
    fn small_table() {
        let mut s = spec(vec![3, 4], vec![1, 2]);
        s.limits.insert(4, 1);
        let want = "m,count_n3,bound_n3,count_n4,bound_n4\n1,3,20,14,688\n2,10,56,,\n";
        assert_eq!(build_table(&s).unwrap(), want);
        s.method = Method::Egyptian;
        assert_eq!(build_table(&s).unwrap(), want);
    }

    #[test]
    fn methods_agree_on_counts() {
        for m in 1..=5 {
            assert_eq!(dec_count(3, m, Method::Recursive).unwrap(), dec_count(3, m, Method::Egyptian).unwrap());
        }
        assert!(dec_count(3, 1, Method::Brute).is_err());
    }

    #[test]
    fn egyptian_structures_are_decreasing() {
        let v = dec_structures_egyptian(4, &1i64).unwrap();
        assert_eq!(v.len(), 14);
        assert!(v.iter().all(|s| s.is_decreasing()));
    }
}
