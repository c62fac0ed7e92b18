//! Integer scalars the exact algorithms are generic over.
//!
//! Every algorithm in the crate is written against [`Int`], so it can run on
//! machine integers (`i64`, `i128`) when the values are known to stay small
//! and on [`BigInt`] otherwise. Arithmetic that can grow goes through the
//! checked helpers below, which turn fixed-width overflow into
//! [`Error::Overflow`] instead of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub trait Int:
    Integer
    + Signed
    + Clone
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + 'static
{
    /// Converts from a big integer, `None` when it does not fit.
    fn from_big(v: &BigInt) -> Option<Self>;

    fn to_big(&self) -> BigInt;

    /// Small non-negative literal; always representable.
    fn small(v: u32) -> Self {
        Self::from_u32(v).expect("u32 fits every Int")
    }

    fn try_from_u64(v: u64) -> Result<Self> {
        Self::from_u64(v).ok_or(Error::Overflow)
    }

    fn add_c(&self, other: &Self) -> Result<Self> {
        self.checked_add(other).ok_or(Error::Overflow)
    }

    fn sub_c(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other).ok_or(Error::Overflow)
    }

    fn mul_c(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other).ok_or(Error::Overflow)
    }
}

macro_rules! impl_int_machine {
    ($($t:ty),*) => {$(
        impl Int for $t {
            fn from_big(v: &BigInt) -> Option<Self> {
                <$t as num_traits::cast::FromPrimitive>::from_i128(v.to_i128()?)
            }

            fn to_big(&self) -> BigInt {
                BigInt::from(*self)
            }
        }
    )*};
}

impl_int_machine!(i64, i128);

impl Int for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Checked sum of a sequence.
pub fn sum_c<'a, T: Int>(items: impl IntoIterator<Item = &'a T>) -> Result<T> {
    items.into_iter().try_fold(T::zero(), |acc, x| acc.add_c(x))
}

/// gcd of all entries; zero for an empty slice.
pub fn gcd_all<T: Int>(items: &[T]) -> T {
    let mut g = T::zero();
    for x in items {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Converts a vector between scalar types, failing when a value does not fit.
pub fn convert_vec<S: Int, T: Int>(v: &[S]) -> Result<Vec<T>> {
    v.iter()
        .map(|x| T::from_big(&x.to_big()).ok_or(Error::Overflow))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_ops_report_overflow() {
        let big = i64::MAX;
        assert_eq!(big.add_c(&1), Err(Error::Overflow));
        assert_eq!(big.mul_c(&2), Err(Error::Overflow));
        assert_eq!(3i64.mul_c(&4), Ok(12));
    }

    #[test]
    fn big_round_trip() {
        let v = BigInt::from(i64::MAX) * 4;
        assert_eq!(i64::from_big(&v), None);
        assert_eq!(i128::from_big(&v), Some(i64::MAX as i128 * 4));
        assert_eq!(BigInt::from_big(&v), Some(v.clone()));
    }

    #[test]
    fn gcd_of_slices() {
        assert_eq!(gcd_all(&[6i64, 4, 10]), 2);
        assert_eq!(gcd_all::<i64>(&[]), 0);
        assert_eq!(gcd_all(&[3i64, 2, 1]), 1);
    }
}
