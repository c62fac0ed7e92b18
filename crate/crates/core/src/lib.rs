//! Arithmetical structures on multigraphs.
//!
//! An arithmetical structure on a connected multigraph `G` with multiplicity
//! matrix `delta` is a pair of positive integer vectors `(r, d)` with
//! `gcd(r) = 1` and `r_i d_i = sum_{j != i} delta_ij r_j` at every vertex.
//! This crate verifies, reduces and enumerates them, with a dedicated
//! recursion for the complete multigraphs `mK_n`, a bijection with Egyptian
//! fraction representations, and upper bounds on their number.
//!
//! Algorithms are generic over [`Int`]; `i64`, `i128` and
//! [`num_bigint::BigInt`] are supported. Checked arithmetic reports
//! [`Error::Overflow`] instead of wrapping.

pub mod arith;
pub mod bounds;
pub mod brute;
pub mod egyptian;
pub mod error;
pub mod io;
pub mod mkn;
pub mod multigraph;
pub mod reduction;
pub mod scalar;
pub mod structures;
pub mod table;

pub use error::{Error, Result};
pub use multigraph::Multigraph;
pub use scalar::Int;
pub use structures::{d_from_r, verify, ArithStructure, EnumerationResult, Method};

use num_bigint::BigInt;

pub type Multigraph64 = Multigraph<i64>;
pub type Multigraph128 = Multigraph<i128>;
pub type BigMultigraph = Multigraph<BigInt>;
pub type Structure64 = ArithStructure<i64>;
pub type Structure128 = ArithStructure<i128>;
pub type BigStructure = ArithStructure<BigInt>;
