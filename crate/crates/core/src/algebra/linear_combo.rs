//! Rational combinations of products of integer linear forms with signed
//! exponents, e.g. `-1/12 <a,X> + 1/2 <b,X>^{-2}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::rational::{self, int, Rational};

/// Sorted `(primitive form, exponent)` pairs; exponents never zero.
pub type FormMonomial = Vec<(Vec<i64>, i32)>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalLinearCombo {
    terms: BTreeMap<FormMonomial, Rational>,
}

/// Splits an integer form into `(scale, primitive)` with the primitive's first
/// nonzero entry positive. Panics on the zero form.
pub fn normalize_form(v: &[i64]) -> (i64, Vec<i64>) {
    let g = rational::gcd_vec(v);
    assert!(g != 0, "zero linear form");
    let first = *v.iter().find(|x| **x != 0).unwrap();
    let s = if first < 0 { -g } else { g };
    (s, v.iter().map(|x| x / s).collect())
}

impl RationalLinearCombo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut r = Self::zero();
        r.add_term(Vec::new(), c);
        r
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `c * <form, X>^exp`.
    pub fn form_power(c: Rational, form: &[i64], exp: i32) -> Self {
        if exp == 0 {
            return Self::constant(c);
        }
        let (s, prim) = normalize_form(form);
        let factor = rational::pow_signed(&int(s), exp).expect("nonzero scale");
        let mut r = Self::zero();
        r.add_term(vec![(prim, exp)], c * factor);
        r
    }

    fn add_term(&mut self, m: FormMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Vec::is_empty)
    }

    pub fn constant_part(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        RationalLinearCombo { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut r = Self::zero();
        for (m, x) in &self.terms {
            r.add_term(m.clone(), x * c);
        }
        r
    }

    fn mul_monomials(a: &FormMonomial, b: &FormMonomial) -> FormMonomial {
        let mut map: BTreeMap<Vec<i64>, i32> = a.iter().cloned().collect();
        for (f, e) in b {
            *map.entry(f.clone()).or_insert(0) += e;
        }
        map.into_iter().filter(|(_, e)| *e != 0).collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(Self::mul_monomials(ma, mb), ca * cb);
            }
        }
        r
    }

    /// Inverse of a single-term combination.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let inv_m: FormMonomial = m.iter().map(|(f, e)| (f.clone(), -e)).collect();
        let mut r = Self::zero();
        r.add_term(inv_m, c.recip());
        Some(r)
    }

    /// Value at `x`; `None` if some form with negative exponent vanishes there.
    pub fn evaluate(&self, x: &[Rational]) -> Option<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (f, e) in m {
                let y = rational::dot_ir(f, x);
                t *= rational::pow_signed(&y, *e)?;
            }
            total += t;
        }
        Some(total)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors: Vec<Value> = m.iter().map(|(f, e)| json!([f, e])).collect();
                json!([rational::to_string(c), factors])
            })
            .collect();
        Value::Array(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn forms_normalize() {
        assert_eq!(normalize_form(&[-2, 4]), (-2, vec![1, -2]));
        let a = RationalLinearCombo::form_power(int(1), &[-2], -1);
        // 1/(-2y) = -1/2 * y^{-1}
        assert_eq!(a, RationalLinearCombo::form_power(rat(-1, 2), &[1], -1));
    }

    #[test]
    fn product_merges_exponents() {
        let y = RationalLinearCombo::form_power(int(1), &[1], 1);
        let inv = RationalLinearCombo::form_power(int(1), &[1], -1);
        assert_eq!(y.mul(&inv), RationalLinearCombo::one());
        assert_eq!(inv.inverse().unwrap(), y);
        assert_eq!(y.add(&inv).inverse(), None);
        assert_eq!(inv.evaluate(&[int(0)]), None);
        assert_eq!(inv.evaluate(&[int(4)]), Some(rat(1, 4)));
    }
}
