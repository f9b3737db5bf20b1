//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::rational::{self, int, Rational};
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

/// Conventional coordinate names for an ambient space of dimension `g`.
pub fn ambient_vars(g: usize) -> Vec<String> {
    match g {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=g).map(|i| format!("x{i}")).collect(),
    }
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, c: Rational) -> Self {
        let n = vars.len();
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; n]), c);
        }
        p
    }

    pub fn one(vars: Vec<String>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: Vec<String>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial(e), Rational::one());
        p
    }

    /// The linear form `c + sum_i a_i x_i`.
    pub fn linear(vars: Vec<String>, a: &[Rational], c: Rational) -> Self {
        let mut p = Self::constant(vars.clone(), c);
        for (i, ai) in a.iter().enumerate() {
            p = &p + &Self::var(vars.clone(), i).scale(ai);
        }
        p
    }

    pub fn from_terms<I>(vars: Vec<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(&Monomial(e.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars()])
    }

    /// Re-expresses the polynomial over `new_vars`, which must contain every
    /// variable that occurs with nonzero exponent.
    pub fn with_vars(&self, new_vars: &[String]) -> Self {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| new_vars.iter().position(|w| w == v).unwrap_or(usize::MAX))
            .collect();
        let mut p = Self::zero(new_vars.to_vec());
        for (m, c) in &self.terms {
            let mut e = vec![0; new_vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    assert!(map[i] != usize::MAX, "variable {} dropped", self.vars[i]);
                    e[map[i]] += k;
                }
            }
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut v = a.to_vec();
        for x in b {
            if !v.contains(x) {
                v.push(x.clone());
            }
        }
        v
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let u = Self::union_vars(&a.vars, &b.vars);
        (a.with_vars(&u), b.with_vars(&u))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.vars.clone());
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "evaluation point dimension");
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter().zip(point).fold(c.clone(), |acc, (&k, x)| acc * rational::pow(x, k))
            })
            .sum()
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter().zip(point).fold(rational::to_f64(c), |acc, (&k, x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// `order`-fold partial derivative in variable `i`.
    pub fn partial(&self, i: usize, order: u32) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[i];
            if k < order {
                continue;
            }
            let falling: i64 = (0..order).map(|j| (k - j) as i64).product();
            let mut e = m.0.clone();
            e[i] -= order;
            p.add_term(Monomial(e), c * int(falling));
        }
        p
    }

    /// Iterated directional derivative `(sum_i dir_i d/dx_i)^order`.
    pub fn directional(&self, dir: &[i64], order: u32) -> Self {
        assert_eq!(dir.len(), self.nvars(), "direction dimension");
        let mut p = self.clone();
        for _ in 0..order {
            let mut next = Self::zero(self.vars.clone());
            for (i, &d) in dir.iter().enumerate() {
                if d != 0 {
                    next = &next + &p.partial(i, 1).scale(&int(d));
                }
            }
            p = next;
        }
        p
    }

    /// Antiderivative in variable `i` with zero constant of integration.
    pub fn antiderivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e[i] += 1;
            let k = e[i] as i64;
            p.add_term(Monomial(e), c / int(k));
        }
        p
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one
    /// variable list, which becomes the result's.
    pub fn compose(&self, subs: &[MultiPoly]) -> Self {
        assert_eq!(subs.len(), self.nvars(), "one substitute per variable");
        let target = subs.first().map(|s| s.vars.clone()).unwrap_or_default();
        let mut p = Self::zero(target.clone());
        // cache powers per variable
        let mut powers: Vec<Vec<MultiPoly>> = subs.iter().map(|s| vec![Self::one(s.vars.clone()), s.clone()]).collect();
        for (m, c) in &self.terms {
            let mut t = Self::constant(target.clone(), c.clone());
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            p = &p + &t;
        }
        p
    }

    /// Substitutes the single variable `i` by `sub` (expressed over `self.vars`).
    pub fn substitute(&self, i: usize, sub: &MultiPoly) -> Self {
        let subs: Vec<MultiPoly> = (0..self.nvars())
            .map(|j| if j == i { sub.with_vars(&self.vars) } else { Self::var(self.vars.clone(), j) })
            .collect();
        self.compose(&subs)
    }

    pub fn to_json(&self) -> Value {
        // canonical order: descending grlex
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| json!([m.0, rational::to_string(c)]))
            .collect();
        json!({ "vars": self.vars, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let vars: Vec<String> = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("polynomial needs \"vars\"".into()))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Invalid("variable name".into())))
            .collect::<Result<_>>()?;
        let mut p = Self::zero(vars);
        for t in v.get("terms").and_then(Value::as_array).into_iter().flatten() {
            let arr = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Invalid("term must be [exps, coeff]".into()))?;
            let e: Vec<u32> = arr[0]
                .as_array()
                .ok_or_else(|| Error::Invalid("exponent vector".into()))?
                .iter()
                .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| Error::Invalid("exponent".into())))
                .collect::<Result<_>>()?;
            if e.len() != p.nvars() {
                return Err(Error::DimensionMismatch { expected: p.nvars(), got: e.len() });
            }
            p.add_term(Monomial(e), rational::from_json(&arr[1])?);
        }
        Ok(p)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .0
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let neg = c < &Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", rational::to_string(&a))?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", rational::to_string(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let (mut a, b) = MultiPoly::aligned(self, rhs);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let (a, b) = MultiPoly::aligned(self, rhs);
        let mut p = MultiPoly::zero(a.vars.clone());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                p.add_term(Monomial(e), ca * cb);
            }
        }
        p
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

/// Parses expressions like `x^2 - 1/2*x*y + 3` over the given variables.
/// Supports `+ - * ^`, parentheses, and rational literals `a/b` or decimals.
pub fn parse_poly(src: &str, vars: &[String]) -> Result<MultiPoly> {
    let mut p = Parser { s: src.as_bytes(), i: 0, vars };
    let e = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(Error::Invalid(format!("unexpected input at byte {} in {src:?}", p.i)));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.i += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.i += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.ws();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.i])
                .unwrap()
                .parse()
                .map_err(|_| Error::Invalid("exponent must be a nonnegative integer".into()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Invalid("missing ')'".into()));
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.' || self.s[self.i] == b'/') {
                    self.i += 1;
                }
                let lit = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                Ok(MultiPoly::constant(self.vars.to_vec(), rational::parse(lit)?))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let idx = self
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Invalid(format!("unknown variable {name:?}; expected one of {:?}", self.vars)))?;
                Ok(MultiPoly::var(self.vars.to_vec(), idx))
            }
            _ => Err(Error::Invalid(format!("unexpected token at byte {}", self.i))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use proptest::prelude::*;

    fn v2() -> Vec<String> {
        ambient_vars(2)
    }

    fn p(src: &str) -> MultiPoly {
        parse_poly(src, &v2()).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let xi = p("x");
        assert_eq!(&xi * &xi, p("x^2"));
        assert_eq!(&p("2+x") + &p("2-x"), p("4"));
        assert_eq!(&p("1+x") * &p("1+y"), p("1 + x + y + x*y"));
        assert_eq!((&p("x+y") * &p("x-y")).degree(), Some(2));
        assert!((&xi - &xi).is_zero());
        assert_eq!((&xi - &xi).degree(), None);
    }

    #[test]
    fn differentiation() {
        let sq = p("x^2");
        assert_eq!(sq.directional(&[1, 0], 1), p("2*x"));
        assert!(sq.directional(&[1, 0], 3).is_zero());
        assert_eq!(p("x*y").directional(&[1, 1], 1), p("x+y"));
        assert_eq!(p("x^3").antiderivative(0), p("1/4*x^4"));
    }

    #[test]
    fn composition_and_eval() {
        let q = p("x^2 + y");
        let t = vec!["t".to_string()];
        let s = q.compose(&[parse_poly("t+1", &t).unwrap(), parse_poly("2*t", &t).unwrap()]);
        assert_eq!(s, parse_poly("t^2 + 4*t + 1", &t).unwrap());
        assert_eq!(q.eval(&[rat(1, 2), int(3)]), rat(13, 4));
        assert_eq!(q.substitute(1, &p("x")), p("x^2 + x"));
    }

    #[test]
    fn variable_union() {
        let a = parse_poly("x", &["x".to_string()]).unwrap();
        let b = parse_poly("y", &["y".to_string()]).unwrap();
        let s = &a + &b;
        assert_eq!(s.vars(), &["x".to_string(), "y".to_string()]);
        assert_eq!(s, p("x+y"));
    }

    #[test]
    fn json_round_trip_and_display() {
        let q = p("-1/2*x^2*y + 3*x - 7");
        assert_eq!(MultiPoly::from_json(&q.to_json()).unwrap(), q);
        assert_eq!(q.to_string(), "-1/2*x^2*y + 3*x - 7");
        assert_eq!(q.to_json().to_string(), q.clone().to_json().to_string());
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(((0u32..3, 0u32..3), -5i64..6, 1i64..4), 0..5).prop_map(|ts| {
            MultiPoly::from_terms(ambient_vars(2), ts.into_iter().map(|((a, b), n, d)| (vec![a, b], rat(n, d))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() && !b.is_zero() {
                prop_assert_eq!((&a * &b).degree().unwrap(), a.degree().unwrap() + b.degree().unwrap());
            }
        }
    }
}
