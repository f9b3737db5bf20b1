//! Exact Euler-Maclaurin asymptotics for toric quantization.
//!
//! For a Delzant polytope (or one of the noncompact toric models) this crate
//! computes the multiplicities `m(lambda, k)`, builds the Todd-twisted
//! Duistermaat-Heckman distributions `DH_n`, and checks that
//! `sum_lambda m(lambda, k) f(lambda / k) ~ k^d sum_n k^{-n} <DH_n, f>`,
//! exactly for polynomial `f` and to the expected order for smooth `f`.

pub mod algebra;
pub mod asymptotics;
pub mod characters;
pub mod dh;
pub mod error;
pub mod model;
pub mod partition;

pub use error::{Error, Result};
pub mod polytope;
pub mod todd;
