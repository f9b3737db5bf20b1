//! Truncated Laurent series in one variable over a commutative coefficient ring.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::linear_combo::RationalLinearCombo;
use super::rational::{self, Rational};

pub trait Coefficient: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn to_json(&self) -> Value;
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn to_json(&self) -> Value {
        rational::to_json(self)
    }
}

impl Coefficient for RationalLinearCombo {
    fn zero() -> Self {
        RationalLinearCombo::zero()
    }
    fn one() -> Self {
        RationalLinearCombo::one()
    }
    fn is_zero(&self) -> bool {
        RationalLinearCombo::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RationalLinearCombo::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalLinearCombo::mul(self, o)
    }
    fn neg(&self) -> Self {
        RationalLinearCombo::neg(self)
    }
    fn inverse(&self) -> Option<Self> {
        RationalLinearCombo::inverse(self)
    }
    fn to_json(&self) -> Value {
        RationalLinearCombo::to_json(self)
    }
}

/// `sum_e c_e q^e`, known exactly for exponents `<= truncation`; a `None`
/// truncation means the series is an exact Laurent polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<C: Coefficient> {
    pub variable: String,
    coeffs: BTreeMap<i64, C>,
    truncation: Option<i64>,
}

impl<C: Coefficient> LaurentSeries<C> {
    pub fn new(variable: &str, truncation: Option<i64>) -> Self {
        LaurentSeries { variable: variable.to_string(), coeffs: BTreeMap::new(), truncation }
    }

    pub fn monomial(variable: &str, exp: i64, c: C, truncation: Option<i64>) -> Self {
        let mut s = Self::new(variable, truncation);
        s.set(exp, c);
        s
    }

    pub fn one(variable: &str) -> Self {
        Self::monomial(variable, 0, C::one(), None)
    }

    pub fn set(&mut self, exp: i64, c: C) {
        if self.truncation.is_some_and(|t| exp > t) || c.is_zero() {
            self.coeffs.remove(&exp);
        } else {
            self.coeffs.insert(exp, c);
        }
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.coeffs.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncation(&self) -> Option<i64> {
        self.truncation
    }

    /// Lowest exponent with nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &C)> {
        self.coeffs.iter()
    }

    pub fn truncate(&self, t: i64) -> Self {
        let t = self.truncation.map_or(t, |s| s.min(t));
        let mut r = Self::new(&self.variable, Some(t));
        for (e, c) in &self.coeffs {
            r.set(*e, c.clone());
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.variable, o.variable, "series in different variables");
        let t = match (self.truncation, o.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut r = Self::new(&self.variable, t);
        for (e, c) in self.coeffs.iter().chain(o.coeffs.iter()) {
            let v = r.coeff(*e).add(c);
            r.set(*e, v);
        }
        r
    }

    pub fn neg(&self) -> Self {
        let mut r = Self::new(&self.variable, self.truncation);
        for (e, c) in &self.coeffs {
            r.set(*e, c.neg());
        }
        r
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::new(&self.variable, self.truncation);
        for (e, x) in &self.coeffs {
            r.set(*e, x.mul(c));
        }
        r
    }

    /// Product. The result is known up to `min(t_a + v_b, t_b + v_a)`, which
    /// reduces to the smaller truncation when both valuations are zero.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.variable, o.variable, "series in different variables");
        let va = self.valuation();
        let vb = o.valuation();
        let t = match (va, vb) {
            (Some(va), Some(vb)) => {
                let ta = self.truncation.map(|t| t + vb);
                let tb = o.truncation.map(|t| t + va);
                match (ta, tb) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            }
            // a zero factor: product is zero to the sharper of the two bounds
            _ => match (self.truncation, o.truncation) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        };
        let mut r = Self::new(&self.variable, t);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                let e = ea + eb;
                if t.is_some_and(|t| e > t) {
                    continue;
                }
                let v = r.coeff(e).add(&ca.mul(cb));
                r.set(e, v);
            }
        }
        r
    }

    /// Multiplicative inverse for a series whose leading coefficient is a
    /// unit. Exact Laurent polynomials are inverted to relative order `order`.
    pub fn inverse(&self, order: i64) -> Option<Self> {
        let v = self.valuation()?;
        let lead_inv = self.coeff(v).inverse()?;
        let rel = match self.truncation {
            Some(t) => (t - v).min(order + v),
            None => order + v,
        };
        // self = lead q^v (1 + r), r with positive exponents
        let mut r = Self::new(&self.variable, Some(rel));
        for (e, c) in &self.coeffs {
            if *e > v {
                r.set(e - v, c.mul(&lead_inv));
            }
        }
        let mut acc = Self::monomial(&self.variable, 0, C::one(), Some(rel));
        let mut pw = acc.clone();
        let neg_r = r.neg();
        for _ in 0..rel.max(0) {
            pw = pw.mul(&neg_r);
            acc = acc.add(&pw);
        }
        let shifted = {
            let mut s = Self::new(&self.variable, Some(rel - v));
            for (e, c) in &acc.coeffs {
                s.set(e - v, c.mul(&lead_inv));
            }
            s
        };
        Some(shifted)
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self.coeffs.iter().map(|(e, c)| json!([e, c.to_json()])).collect();
        json!({ "variable": self.variable, "truncation": self.truncation, "coefficients": coeffs })
    }
}

/// Laurent expansion of `1/(1 - e^{q y})` where `y = <form, X>`, through `q^order`:
/// `sum_{n>=0} -(B_n/n!) q^{n-1} y^{n-1} = -1/(q y) + 1/2 - q y/12 + ...`.
pub fn inv_one_minus_exp(form: &[i64], order: i64) -> LaurentSeries<RationalLinearCombo> {
    assert!(order >= -1, "order must be at least -1");
    let n_max = (order + 1) as usize;
    let b = super::bernoulli::bernoulli_table(n_max);
    let mut s = LaurentSeries::new("q", Some(order));
    for (n, bn) in b.iter().enumerate() {
        let c = -bn / Rational::from_integer(rational::factorial(n as u32));
        s.set(n as i64 - 1, RationalLinearCombo::form_power(c, form, n as i32 - 1));
    }
    s
}

/// Expansion of `e^{q c}` through `q^order` with rational `c`.
pub fn exp_series(c: &Rational, order: i64) -> LaurentSeries<Rational> {
    let mut s = LaurentSeries::new("s", Some(order));
    let mut term = rational::int(1);
    for n in 0..=order.max(0) {
        if n > 0 {
            term = term * c / rational::int(n);
        }
        s.set(n, term.clone());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn q(e: i64, c: Rational) -> LaurentSeries<Rational> {
        LaurentSeries::monomial("q", e, c, None)
    }

    #[test]
    fn basic_products() {
        assert_eq!(q(-1, int(1)).mul(&q(1, int(1))), LaurentSeries::one("q"));
        let a = q(-1, int(1)).add(&q(0, rat(1, 2)));
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(-2), int(1));
        assert_eq!(sq.coeff(-1), int(1));
        assert_eq!(sq.coeff(0), rat(1, 4));
        assert_eq!(sq.valuation(), Some(-2));
    }

    #[test]
    fn inv_one_minus_exp_coefficients() {
        let s = inv_one_minus_exp(&[1], 4);
        assert_eq!(s.coeff(-1), RationalLinearCombo::form_power(int(-1), &[1], -1));
        assert_eq!(s.coeff(0), RationalLinearCombo::constant(rat(1, 2)));
        assert_eq!(s.coeff(1), RationalLinearCombo::form_power(rat(-1, 12), &[1], 1));
        assert!(s.coeff(2).is_zero());
        assert_eq!(s.coeff(3), RationalLinearCombo::form_power(rat(1, 720), &[1], 3));
    }

    #[test]
    fn square_of_inv_one_minus_exp() {
        // hand expansion of (-1/(qy) + 1/2 - qy/12 + ...)^2:
        // q^-2 y^-2 - q^-1 y^-1 + (1/4 + 1/6) + q (-1/12 y) + ...
        let s = inv_one_minus_exp(&[1], 3);
        let sq = s.mul(&s);
        assert_eq!(sq.truncation(), Some(2));
        assert_eq!(sq.coeff(-2), RationalLinearCombo::form_power(int(1), &[1], -2));
        assert_eq!(sq.coeff(-1), RationalLinearCombo::form_power(int(-1), &[1], -1));
        assert_eq!(sq.coeff(0), RationalLinearCombo::constant(rat(5, 12)));
        assert_eq!(sq.coeff(1), RationalLinearCombo::form_power(rat(-1, 12), &[1], 1));
        // q^2: 2*(-1)(1/720) y^2 + 2*(1/2)*0 + (1/144) y^2 = (1/144 - 1/360) y^2
        assert_eq!(sq.coeff(2), RationalLinearCombo::form_power(rat(1, 144) - rat(1, 360), &[1], 2));
    }

    #[test]
    fn inverse_round_trip() {
        let s = inv_one_minus_exp(&[2], 6);
        let inv = s.inverse(6).unwrap();
        let prod = s.mul(&inv);
        let t = prod.truncation().unwrap();
        assert!(t >= 5);
        for e in -3..=t {
            let expect = if e == 0 { RationalLinearCombo::one() } else { RationalLinearCombo::zero() };
            assert_eq!(prod.coeff(e), expect, "q^{e}");
        }
        // rational coefficients: 1/(1 - q) = sum q^n
        let a = q(0, int(1)).add(&q(1, int(-1)));
        let ia = a.inverse(5).unwrap();
        for e in 0..=5 {
            assert_eq!(ia.coeff(e), int(1));
        }
    }
}
