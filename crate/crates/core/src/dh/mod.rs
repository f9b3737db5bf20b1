//! Distributions built from polynomial densities on faces and cones, plus
//! transverse derivative operators; the twisted Duistermaat-Heckman
//! distributions `DH_n` and their pairings with test functions.

mod construct;
mod convolve;
mod numeric;
mod oracle;
mod regularized;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, int, Rational};
use crate::error::{Error, Result};
use crate::polytope::{parse_ivec, parse_rvec, LatticePolytope};

pub use construct::{
    dh_box, dh_cone_direct, dh_delzant, dh_halfline, dh_interval, dh_p1p1, dh_ray, dh_tensor, dh_vertex_cone, ray_coefficient,
};
pub use convolve::dh_convolve;
pub use numeric::{gauss_legendre, integrate_adaptive, ProductBump, SmoothTest, TestFunction};
pub use oracle::{dh_moment_oracle, fit_k_expansion};
pub use regularized::{exp_pairing, pair_regularized};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extent {
    /// `t in [0, L]`.
    Bounded(Rational),
    /// `t in [0, inf)`.
    Ray,
    /// `t in R`.
    Line,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub direction: Vec<i64>,
    pub extent: Extent,
}

impl Edge {
    pub fn new(direction: Vec<i64>, extent: Extent) -> Self {
        Edge { direction, extent }
    }
}

/// `f -> int density(xi) (D f)(xi) dt` over `xi = apex + sum_j t_j e_j`, where
/// `D` is the product of the directional derivatives `(v . grad)^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhTerm {
    pub apex: Vec<Rational>,
    pub edges: Vec<Edge>,
    /// Polynomial in the ambient coordinates.
    pub density: MultiPoly,
    pub derivatives: Vec<(Vec<i64>, u32)>,
}

impl DhTerm {
    pub fn point(apex: Vec<Rational>, c: Rational, derivatives: Vec<(Vec<i64>, u32)>) -> Self {
        let g = apex.len();
        let derivatives = derivatives.into_iter().filter(|(_, o)| *o > 0).collect();
        DhTerm { apex, edges: Vec::new(), density: MultiPoly::constant(ambient_vars(g), c), derivatives }
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn is_bounded(&self) -> bool {
        self.edges.iter().all(|e| matches!(e.extent, Extent::Bounded(_)))
    }

    pub fn derivative_order(&self) -> u32 {
        self.derivatives.iter().map(|(_, o)| o).sum()
    }

    /// Applies the derivative operators to a polynomial.
    pub fn apply_derivatives(&self, f: &MultiPoly) -> MultiPoly {
        self.derivatives.iter().fold(f.clone(), |acc, (v, o)| acc.directional(v, *o))
    }

    /// `xi_i = apex_i + sum_j t_j e_j[i]` as polynomials in `t_1..t_m`.
    fn parametrization(&self) -> (Vec<String>, Vec<MultiPoly>) {
        let m = self.edges.len();
        let tvars: Vec<String> = (1..=m).map(|j| format!("t{j}")).collect();
        let subs = (0..self.dim())
            .map(|i| {
                let a: Vec<Rational> = self.edges.iter().map(|e| int(e.direction[i])).collect();
                MultiPoly::linear(tvars.clone(), &a, self.apex[i].clone())
            })
            .collect();
        (tvars, subs)
    }

    /// Exact pairing with a polynomial; only bounded supports are accepted.
    pub fn pair_polynomial(&self, f: &MultiPoly) -> Result<Rational> {
        if !self.is_bounded() {
            return Err(Error::DivergentPairing("polynomial test function against an unbounded support".into()));
        }
        let g = self.dim();
        let f = f.with_vars(&ambient_vars(g));
        let integrand = &self.density.with_vars(&ambient_vars(g)) * &self.apply_derivatives(&f);
        if self.edges.is_empty() {
            return Ok(integrand.eval(&self.apex));
        }
        let (tvars, subs) = self.parametrization();
        let mut p = integrand.compose(&subs);
        for (j, e) in self.edges.iter().enumerate() {
            let Extent::Bounded(len) = &e.extent else { unreachable!() };
            let anti = p.antiderivative(j);
            let hi = anti.substitute(j, &MultiPoly::constant(tvars.clone(), len.clone()));
            let lo = anti.substitute(j, &MultiPoly::zero(tvars.clone()));
            p = &hi - &lo;
        }
        Ok(p.constant_term())
    }

    pub fn translate(&self, v: &[Rational]) -> Self {
        let g = self.dim();
        let vars = ambient_vars(g);
        let subs: Vec<MultiPoly> = (0..g).map(|i| MultiPoly::linear(vars.clone(), &unit(g, i), -v[i].clone())).collect();
        DhTerm {
            apex: self.apex.iter().zip(v).map(|(a, b)| a + b).collect(),
            edges: self.edges.clone(),
            density: self.density.with_vars(&vars).compose(&subs),
            derivatives: self.derivatives.clone(),
        }
    }

    /// Every point of the support lies in `p` (rays and lines never do for a polytope).
    pub fn support_within(&self, p: &LatticePolytope) -> bool {
        if !self.is_bounded() {
            return false;
        }
        let m = self.edges.len();
        (0..1u32 << m).all(|mask| {
            let mut x = self.apex.clone();
            for (j, e) in self.edges.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    let Extent::Bounded(len) = &e.extent else { unreachable!() };
                    for (xi, d) in x.iter_mut().zip(&e.direction) {
                        *xi += len * int(*d);
                    }
                }
            }
            p.contains(&x)
        })
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| {
                let extent = match &e.extent {
                    Extent::Bounded(l) => Value::String(rational::to_string(l)),
                    Extent::Ray => Value::String("ray".into()),
                    Extent::Line => Value::String("line".into()),
                };
                json!({ "direction": e.direction, "extent": extent })
            })
            .collect();
        json!({
            "apex": self.apex.iter().map(rational::to_json).collect::<Vec<_>>(),
            "edges": edges,
            "density": self.density.to_string(),
            "derivatives": self.derivatives.iter().map(|(v, o)| json!([v, o])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, dim: usize) -> Result<Self> {
        let apex = parse_rvec(v.get("apex").ok_or_else(|| Error::Invalid("term needs \"apex\"".into()))?)?;
        if apex.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: apex.len() });
        }
        let mut edges = Vec::new();
        for e in v.get("edges").and_then(Value::as_array).into_iter().flatten() {
            let direction = parse_ivec(e.get("direction").ok_or_else(|| Error::Invalid("edge needs \"direction\"".into()))?)?;
            let extent = match e.get("extent") {
                Some(Value::String(s)) if s == "ray" => Extent::Ray,
                Some(Value::String(s)) if s == "line" => Extent::Line,
                Some(x) => Extent::Bounded(rational::from_json(x)?),
                None => return Err(Error::Invalid("edge needs \"extent\"".into())),
            };
            edges.push(Edge::new(direction, extent));
        }
        let density = match v.get("density") {
            Some(Value::String(s)) => crate::algebra::parse_poly(s, &ambient_vars(dim))?,
            Some(obj @ Value::Object(_)) => MultiPoly::from_json(obj)?.with_vars(&ambient_vars(dim)),
            Some(x) => MultiPoly::constant(ambient_vars(dim), rational::from_json(x)?),
            None => return Err(Error::Invalid("term needs \"density\"".into())),
        };
        let mut derivatives = Vec::new();
        for d in v.get("derivatives").and_then(Value::as_array).into_iter().flatten() {
            let pair = d.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Invalid("derivative must be [v, order]".into()))?;
            let order = pair[1].as_u64().ok_or_else(|| Error::Invalid("derivative order".into()))? as u32;
            derivatives.push((parse_ivec(&pair[0])?, order));
        }
        Ok(DhTerm { apex, edges, density, derivatives })
    }
}

impl fmt::Display for DhTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let apex = self.apex.iter().map(rational::to_string).collect::<Vec<_>>().join(",");
        let ops: String = self.derivatives.iter().map(|(v, o)| format!(" D{v:?}^{o}")).collect();
        if self.edges.is_empty() {
            write!(f, "{} *{} f at ({apex})", self.density, ops)
        } else {
            let edges: Vec<String> = self
                .edges
                .iter()
                .map(|e| match &e.extent {
                    Extent::Bounded(l) => format!("{:?}x[0,{}]", e.direction, rational::to_string(l)),
                    Extent::Ray => format!("{:?}x[0,inf)", e.direction),
                    Extent::Line => format!("{:?}xR", e.direction),
                })
                .collect();
            write!(f, "int ({}) *{} f over ({apex}) + {}", self.density, ops, edges.join(" + "))
        }
    }
}

pub(crate) fn unit(g: usize, i: usize) -> Vec<Rational> {
    (0..g).map(|j| int(i64::from(i == j))).collect()
}

/// Result of pairing with a test function.
#[derive(Clone, Debug, PartialEq)]
pub enum PairingValue {
    Exact(Rational),
    Numeric { value: f64, error_estimate: f64 },
}

impl PairingValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            PairingValue::Exact(r) => rational::to_f64(r),
            PairingValue::Numeric { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            PairingValue::Exact(r) => Some(r),
            PairingValue::Numeric { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            PairingValue::Exact(r) => json!({ "exact": rational::to_string(r), "approx": rational::to_f64(r) }),
            PairingValue::Numeric { value, error_estimate } => json!({ "value": value, "error_estimate": error_estimate }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDistribution {
    pub dim: usize,
    pub terms: Vec<DhTerm>,
}

impl FaceDistribution {
    pub fn zero(dim: usize) -> Self {
        FaceDistribution { dim, terms: Vec::new() }
    }

    pub fn from_terms(dim: usize, terms: Vec<DhTerm>) -> Self {
        FaceDistribution { dim, terms: terms.into_iter().filter(|t| !t.density.is_zero()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "distributions of different dimension");
        FaceDistribution { dim: self.dim, terms: self.terms.iter().chain(&o.terms).cloned().collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let terms = self.terms.iter().map(|t| DhTerm { density: t.density.scale(c), ..t.clone() }).collect();
        Self::from_terms(self.dim, terms)
    }

    pub fn translate(&self, v: &[Rational]) -> Self {
        FaceDistribution { dim: self.dim, terms: self.terms.iter().map(|t| t.translate(v)).collect() }
    }

    pub fn is_bounded(&self) -> bool {
        self.terms.iter().all(DhTerm::is_bounded)
    }

    /// Exact termwise pairing with a polynomial.
    pub fn pair_polynomial(&self, f: &MultiPoly) -> Result<Rational> {
        self.terms.iter().map(|t| t.pair_polynomial(f)).sum()
    }

    pub fn pair(&self, f: &TestFunction) -> Result<PairingValue> {
        match f {
            TestFunction::Polynomial(p) => Ok(PairingValue::Exact(self.pair_polynomial(p)?)),
            TestFunction::Numeric(s) => {
                let (value, error_estimate) = numeric::pair_numeric(self, s.as_ref())?;
                Ok(PairingValue::Numeric { value, error_estimate })
            }
        }
    }

    pub fn support_within(&self, p: &LatticePolytope) -> bool {
        self.terms.iter().all(|t| t.support_within(p))
    }

    /// Merges terms with identical support and operators. In one dimension
    /// additionally integrates derivatives off segments and rewrites the
    /// segment part as disjoint pieces, giving a canonical form.
    pub fn simplify(&self) -> Self {
        if self.dim == 1 {
            return canonical_1d(self);
        }
        let mut merged: Vec<DhTerm> = Vec::new();
        for t in &self.terms {
            let mut t = t.clone();
            t.derivatives.sort();
            if let Some(m) = merged.iter_mut().find(|m| m.apex == t.apex && m.edges == t.edges && m.derivatives == t.derivatives) {
                m.density = &m.density + &t.density;
            } else {
                merged.push(t);
            }
        }
        Self::from_terms(self.dim, merged)
    }

    /// `true` if every term is a point mass (possibly with derivatives).
    pub fn is_point_supported(&self) -> bool {
        self.terms.iter().all(|t| t.edges.is_empty())
    }

    pub fn to_json(&self) -> Value {
        json!({ "dim": self.dim, "terms": self.terms.iter().map(DhTerm::to_json).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Invalid("distribution needs \"dim\"".into()))? as usize;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("distribution needs \"terms\"".into()))?
            .iter()
            .map(|t| DhTerm::from_json(t, dim))
            .collect::<Result<_>>()?;
        Ok(FaceDistribution { dim, terms })
    }
}

impl fmt::Display for FaceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A one-dimensional support as `[lo, hi]`, `None` meaning infinite.
pub(crate) type Interval = (Option<Rational>, Option<Rational>);

pub(crate) fn term_interval(t: &DhTerm) -> Option<Interval> {
    match t.edges.as_slice() {
        [] => None,
        [e] => {
            let d = e.direction[0];
            assert!(d == 1 || d == -1, "one-dimensional edges are primitive");
            let a = t.apex[0].clone();
            Some(match (&e.extent, d) {
                (Extent::Bounded(l), 1) => (Some(a.clone()), Some(a + l)),
                (Extent::Bounded(l), _) => (Some(&a - l), Some(a)),
                (Extent::Ray, 1) => (Some(a), None),
                (Extent::Ray, _) => (None, Some(a)),
                (Extent::Line, _) => (None, None),
            })
        }
        _ => panic!("one-dimensional term with several edges"),
    }
}

pub(crate) fn interval_term(lo: Option<Rational>, hi: Option<Rational>, density: MultiPoly) -> DhTerm {
    let (apex, edge) = match (lo, hi) {
        (Some(a), Some(b)) => {
            let len = &b - &a;
            (a, Edge::new(vec![1], Extent::Bounded(len)))
        }
        (Some(a), None) => (a, Edge::new(vec![1], Extent::Ray)),
        (None, Some(b)) => (b, Edge::new(vec![-1], Extent::Ray)),
        (None, None) => (int(0), Edge::new(vec![1], Extent::Line)),
    };
    DhTerm { apex: vec![apex], edges: vec![edge], density: density.with_vars(&ambient_vars(1)), derivatives: Vec::new() }
}

/// Total order and sign of the derivative operators of a 1D term.
fn signed_order(t: &DhTerm) -> (u32, Rational) {
    let mut order = 0;
    let mut sign = int(1);
    for (v, o) in &t.derivatives {
        order += o;
        sign *= rational::pow(&int(v[0]), *o);
    }
    (order, sign)
}

fn canonical_1d(d: &FaceDistribution) -> FaceDistribution {
    let vars = ambient_vars(1);
    let mut points: BTreeMap<(Rational, u32), Rational> = BTreeMap::new();
    let mut pieces: Vec<(Interval, MultiPoly)> = Vec::new();
    for t in &d.terms {
        let (order, sign) = signed_order(t);
        match term_interval(t) {
            None => {
                let c = t.density.with_vars(&vars).eval(&t.apex) * sign;
                *points.entry((t.apex[0].clone(), order)).or_insert_with(Rational::zero) += c;
            }
            Some((lo, hi)) => {
                // int_lo^hi p f^(r) = [p f^(r-1)]_lo^hi - int p' f^(r-1)
                let mut p = t.density.with_vars(&vars).scale(&sign);
                let mut r = order;
                while r > 0 {
                    if let Some(b) = &hi {
                        *points.entry((b.clone(), r - 1)).or_insert_with(Rational::zero) += p.eval(std::slice::from_ref(b));
                    }
                    if let Some(a) = &lo {
                        *points.entry((a.clone(), r - 1)).or_insert_with(Rational::zero) -= p.eval(std::slice::from_ref(a));
                    }
                    p = -&p.partial(0, 1);
                    r -= 1;
                }
                if !p.is_zero() {
                    pieces.push(((lo, hi), p));
                }
            }
        }
    }
    let mut breaks: Vec<Rational> = pieces.iter().flat_map(|((lo, hi), _)| lo.iter().chain(hi.iter()).cloned()).collect();
    breaks.sort();
    breaks.dedup();
    let mut cells: Vec<Interval> = Vec::new();
    if breaks.is_empty() {
        if !pieces.is_empty() {
            cells.push((None, None));
        }
    } else {
        cells.push((None, Some(breaks[0].clone())));
        for w in breaks.windows(2) {
            cells.push((Some(w[0].clone()), Some(w[1].clone())));
        }
        cells.push((Some(breaks.last().unwrap().clone()), None));
    }
    let covers = |outer: &Interval, inner: &Interval| {
        let lo_ok = match (&outer.0, &inner.0) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        let hi_ok = match (&outer.1, &inner.1) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a >= b,
        };
        lo_ok && hi_ok
    };
    let mut merged: Vec<(Interval, MultiPoly)> = Vec::new();
    for cell in cells {
        let dens = pieces
            .iter()
            .filter(|(iv, _)| covers(iv, &cell))
            .fold(MultiPoly::zero(vars.clone()), |acc, (_, p)| &acc + p);
        if dens.is_zero() {
            continue;
        }
        if let Some(((_, last_hi), last_p)) = merged.last_mut() {
            if *last_p == dens && last_hi.is_some() && *last_hi == cell.0 {
                *last_hi = cell.1.clone();
                continue;
            }
        }
        merged.push((cell, dens));
    }
    let mut terms: Vec<DhTerm> = merged.into_iter().map(|((lo, hi), p)| interval_term(lo, hi, p)).collect();
    for ((a, r), c) in points {
        if !c.is_zero() {
            terms.push(DhTerm::point(vec![a], c, vec![(vec![1], r)]));
        }
    }
    FaceDistribution::from_terms(1, terms)
}

/// Map from the canonical 1D point part to `(apex, order) -> coefficient`.
pub fn point_masses_1d(d: &FaceDistribution) -> BTreeMap<(Rational, u32), Rational> {
    let mut out = BTreeMap::new();
    for t in &canonical_1d(d).terms {
        if t.edges.is_empty() {
            let (r, s) = signed_order(t);
            out.insert((t.apex[0].clone(), r), t.density.constant_term() * s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::algebra::rational::rat;

    fn px(s: &str) -> MultiPoly {
        parse_poly(s, &ambient_vars(1)).unwrap()
    }

    #[test]
    fn exact_pairings() {
        let dh2 = FaceDistribution::from_terms(1, vec![
            DhTerm::point(vec![int(-2)], rat(5, 12), vec![]),
            DhTerm::point(vec![int(0)], rat(1, 6), vec![]),
            DhTerm::point(vec![int(2)], rat(5, 12), vec![]),
        ]);
        assert_eq!(dh2.pair_polynomial(&px("1")).unwrap(), int(1));
        let dh3 = FaceDistribution::from_terms(1, vec![
            DhTerm::point(vec![int(-2)], rat(-1, 12), vec![(vec![1], 1)]),
            DhTerm::point(vec![int(2)], rat(1, 12), vec![(vec![1], 1)]),
        ]);
        assert_eq!(dh3.pair_polynomial(&px("x^2")).unwrap(), rat(2, 3));
        let leb = FaceDistribution::from_terms(1, vec![interval_term(Some(int(-2)), Some(int(2)), px("1"))]);
        assert_eq!(leb.pair_polynomial(&px("1")).unwrap(), int(4));
        assert_eq!(leb.pair_polynomial(&px("x^2")).unwrap(), rat(16, 3));
        let ray = FaceDistribution::from_terms(1, vec![interval_term(Some(int(0)), None, px("1"))]);
        assert!(matches!(ray.pair_polynomial(&px("1")), Err(Error::DivergentPairing(_))));
    }

    #[test]
    fn square_pairing() {
        let vars = ambient_vars(2);
        let t = DhTerm {
            apex: vec![int(0), int(0)],
            edges: vec![Edge::new(vec![1, 0], Extent::Bounded(int(1))), Edge::new(vec![0, 1], Extent::Bounded(int(1)))],
            density: MultiPoly::one(vars.clone()),
            derivatives: vec![],
        };
        let d = FaceDistribution::from_terms(2, vec![t]);
        assert_eq!(d.pair_polynomial(&parse_poly("x*y", &vars).unwrap()).unwrap(), rat(1, 4));
        assert!(d.support_within(&LatticePolytope::unit_cube(2)));
        let shifted = d.translate(&[int(1), int(0)]);
        assert!(!shifted.support_within(&LatticePolytope::unit_cube(2)));
        assert_eq!(shifted.pair_polynomial(&parse_poly("x", &vars).unwrap()).unwrap(), rat(3, 2));
    }

    #[test]
    fn canonical_form_merges_rays() {
        // ray[0, inf) - ray[1, inf) = segment [0, 1]
        let d = FaceDistribution::from_terms(1, vec![
            interval_term(Some(int(0)), None, px("1")),
            interval_term(Some(int(1)), None, px("-1")),
        ]);
        let c = d.simplify();
        assert_eq!(c.terms, vec![interval_term(Some(int(0)), Some(int(1)), px("1"))]);
        // derivative on a segment integrates to boundary values
        let mut t = interval_term(Some(int(0)), Some(int(2)), px("x"));
        t.derivatives.push((vec![1], 1));
        let c = FaceDistribution::from_terms(1, vec![t.clone()]).simplify();
        let f = px("x^3 + x");
        assert_eq!(c.pair_polynomial(&f).unwrap(), FaceDistribution::from_terms(1, vec![t]).pair_polynomial(&f).unwrap());
        assert_eq!(point_masses_1d(&c).get(&(int(2), 0)), Some(&int(2)));
    }

    #[test]
    fn json_round_trip() {
        let mut t = interval_term(Some(int(-2)), Some(int(0)), px("2 + x"));
        t.derivatives.push((vec![1], 2));
        let d = FaceDistribution::from_terms(1, vec![t, DhTerm::point(vec![rat(1, 2)], rat(-1, 12), vec![(vec![-1], 1)])]);
        assert_eq!(FaceDistribution::from_json(&d.to_json()).unwrap(), d);
    }
}
