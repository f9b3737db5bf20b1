//! Exact scalar substrate: rationals, Bernoulli numbers, multivariate
//! polynomials, linear-form combinations and Laurent series.

pub mod bernoulli;
pub mod laurent;
pub mod linear_combo;
pub mod poly;
pub mod rational;

pub use bernoulli::{bernoulli, bernoulli_table};
pub use laurent::{inv_one_minus_exp, Coefficient, LaurentSeries};
pub use linear_combo::RationalLinearCombo;
pub use poly::{ambient_vars, parse_poly, Monomial, MultiPoly};
pub use rational::{int, rat, Rational};
