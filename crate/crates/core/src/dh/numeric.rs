//! Smooth compactly supported test functions and numeric pairing by adaptive
//! Gauss-Legendre quadrature.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use super::{DhTerm, Extent, FaceDistribution};
use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, Rational};
use crate::error::{Error, Result};

/// A smooth function with compact support and computable partial derivatives.
pub trait SmoothTest: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    /// Closed box outside which the function and all derivatives vanish.
    fn support_box(&self) -> (Vec<f64>, Vec<f64>);
    /// `d^orders f (x)` with one order per coordinate.
    fn partial(&self, x: &[f64], orders: &[u32]) -> f64;
    fn to_json(&self) -> Value;

    fn value(&self, x: &[f64]) -> f64 {
        self.partial(x, &vec![0; self.dim()])
    }
}

#[derive(Clone, Debug)]
pub enum TestFunction {
    Polynomial(MultiPoly),
    Numeric(Arc<dyn SmoothTest>),
}

impl TestFunction {
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Polynomial(p) => p.eval_f64(x),
            TestFunction::Numeric(s) => s.value(x),
        }
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Option<Rational> {
        match self {
            TestFunction::Polynomial(p) => Some(p.with_vars(&ambient_vars(x.len())).eval(x)),
            TestFunction::Numeric(_) => None,
        }
    }

    pub fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            TestFunction::Polynomial(_) => None,
            TestFunction::Numeric(s) => Some(s.support_box()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TestFunction::Polynomial(p) => json!({ "kind": "polynomial", "expression": p.to_string() }),
            TestFunction::Numeric(s) => s.to_json(),
        }
    }

    /// `{"kind": "bump", "center": [...], "radius": [...], "amplitude": a}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        match v.get("kind").and_then(Value::as_str) {
            Some("bump") => Ok(TestFunction::Numeric(Arc::new(ProductBump::from_json(v)?))),
            Some("polynomial") => {
                let e = v.get("expression").and_then(Value::as_str).ok_or_else(|| Error::Invalid("polynomial needs \"expression\"".into()))?;
                let dim = v.get("dim").and_then(Value::as_u64).unwrap_or(1) as usize;
                Ok(TestFunction::Polynomial(crate::algebra::parse_poly(e, &ambient_vars(dim))?))
            }
            _ => Err(Error::Invalid("test function needs \"kind\": \"bump\" or \"polynomial\"".into())),
        }
    }
}

/// `amplitude * prod_i phi((x_i - c_i) / r_i)` with `phi(u) = exp(-1/(1-u^2))` on `|u| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductBump {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
    pub amplitude: f64,
}

impl ProductBump {
    pub fn new(center: Vec<f64>, radius: Vec<f64>) -> Self {
        assert_eq!(center.len(), radius.len());
        assert!(radius.iter().all(|r| *r > 0.0), "bump radius must be positive");
        ProductBump { center, radius, amplitude: 1.0 }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let vec = |key: &str| -> Result<Vec<f64>> {
            match v.get(key) {
                Some(Value::Array(a)) => a.iter().map(|x| x.as_f64().ok_or_else(|| Error::Invalid(format!("\"{key}\" entries must be numbers")))).collect(),
                Some(x) => Ok(vec![x.as_f64().ok_or_else(|| Error::Invalid(format!("\"{key}\" must be a number")))?]),
                None => Err(Error::Invalid(format!("bump needs \"{key}\""))),
            }
        };
        let center = vec("center")?;
        let radius = vec("radius")?;
        if center.len() != radius.len() || radius.iter().any(|r| *r <= 0.0) {
            return Err(Error::Invalid("bump center/radius mismatch or nonpositive radius".into()));
        }
        let amplitude = v.get("amplitude").and_then(Value::as_f64).unwrap_or(1.0);
        Ok(ProductBump { center, radius, amplitude })
    }

    /// Derivatives `phi^(0..=n)` of the 1D factor at `x`.
    fn factor_derivatives(&self, i: usize, x: f64, n: usize) -> Vec<f64> {
        let r = self.radius[i];
        let u0 = (x - self.center[i]) / r;
        if u0.abs() >= 1.0 {
            return vec![0.0; n + 1];
        }
        // Taylor jets in h = x - x0
        let mut u = vec![0.0; n + 1];
        u[0] = u0;
        if n >= 1 {
            u[1] = 1.0 / r;
        }
        let uu = jet_mul(&u, &u);
        let s: Vec<f64> = uu.iter().enumerate().map(|(k, c)| if k == 0 { 1.0 - c } else { -c }).collect();
        let inv = jet_recip(&s);
        let e = jet_exp(&inv.iter().map(|c| -c).collect::<Vec<_>>());
        let mut fact = 1.0;
        e.iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }
}

impl SmoothTest for ProductBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.center.iter().zip(&self.radius).map(|(c, r)| c - r).collect(),
            self.center.iter().zip(&self.radius).map(|(c, r)| c + r).collect(),
        )
    }

    fn partial(&self, x: &[f64], orders: &[u32]) -> f64 {
        let mut v = self.amplitude;
        for i in 0..self.dim() {
            let d = self.factor_derivatives(i, x[i], orders[i] as usize);
            v *= d[orders[i] as usize];
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }

    fn to_json(&self) -> Value {
        json!({ "kind": "bump", "center": self.center, "radius": self.radius, "amplitude": self.amplitude })
    }
}

fn jet_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|n| (0..=n).map(|k| a[k] * b[n - k]).sum()).collect()
}

fn jet_recip(a: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0; a.len()];
    b[0] = 1.0 / a[0];
    for n in 1..a.len() {
        b[n] = -(1..=n).map(|k| a[k] * b[n - k]).sum::<f64>() / a[0];
    }
    b
}

fn jet_exp(a: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; a.len()];
    e[0] = a[0].exp();
    for n in 1..a.len() {
        e[n] = (1..=n).map(|k| k as f64 * a[k] * e[n - k]).sum::<f64>() / n as f64;
    }
    e
}

const GL_POINTS: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

fn gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(w).map(|(xi, wi)| wi * f(m + h * xi)).sum::<f64>() * h
}

/// Adaptive bisection on a 16-point Gauss-Legendre rule; returns `(value, error estimate)`.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> (f64, f64) {
        let m = (a + b) / 2.0;
        let (l, r) = (gl(f, a, m), gl(f, m, b));
        let err = (l + r - whole).abs();
        if err <= tol || depth >= 30 {
            return (l + r, err);
        }
        let (lv, le) = rec(f, a, m, l, tol / 2.0, depth + 1);
        let (rv, re) = rec(f, m, b, r, tol / 2.0, depth + 1);
        (lv + rv, le + re)
    }
    if b <= a {
        return (0.0, 0.0);
    }
    rec(f, a, b, gl(f, a, b), tol, 0)
}

const QUAD_TOL: f64 = 1e-13;

/// Expands `prod (v . grad)^o` into `sum coeff * d^alpha`.
fn expand_operators(ops: &[(Vec<i64>, u32)], g: usize) -> Vec<(Vec<u32>, f64)> {
    let mut acc: Vec<(Vec<u32>, f64)> = vec![(vec![0; g], 1.0)];
    for (v, o) in ops {
        for _ in 0..*o {
            let mut next: Vec<(Vec<u32>, f64)> = Vec::new();
            for (alpha, c) in &acc {
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0 {
                        continue;
                    }
                    let mut a = alpha.clone();
                    a[i] += 1;
                    let c2 = c * vi as f64;
                    match next.iter_mut().find(|(b, _)| *b == a) {
                        Some(e) => e.1 += c2,
                        None => next.push((a, c2)),
                    }
                }
            }
            acc = next;
        }
    }
    acc
}

/// Range of the edge parameters `t` on which `apex + E t` can meet the box.
fn parameter_ranges(t: &DhTerm, lo: &[f64], hi: &[f64]) -> Option<Vec<(f64, f64)>> {
    let g = t.dim();
    let m = t.edges.len();
    let apex: Vec<f64> = t.apex.iter().map(rational::to_f64).collect();
    // choose m independent rows of the g x m edge matrix
    let cols: Vec<Vec<Rational>> = (0..g).map(|i| t.edges.iter().map(|e| rational::int(e.direction[i])).collect()).collect();
    let mut rows: Vec<usize> = Vec::new();
    for i in 0..g {
        let mut trial: Vec<Vec<Rational>> = rows.iter().map(|&r| cols[r].clone()).collect();
        trial.push(cols[i].clone());
        if rational::rank(&trial) > rows.len() {
            rows.push(i);
        }
    }
    assert_eq!(rows.len(), m, "edges must be independent");
    let sub: Vec<Vec<Rational>> = rows.iter().map(|&r| cols[r].clone()).collect();
    // inverse by solving against unit vectors
    let inv: Vec<Vec<f64>> = (0..m)
        .map(|c| {
            let e: Vec<Rational> = (0..m).map(|k| rational::int(i64::from(k == c))).collect();
            rational::solve(&sub, &e).unwrap().iter().map(rational::to_f64).collect()
        })
        .collect();
    // inv[c][j] = (E_S^{-1})_{j c}
    let mut ranges = Vec::with_capacity(m);
    for j in 0..m {
        let (mut tmin, mut tmax) = (0.0f64, 0.0f64);
        for (c, &r) in rows.iter().enumerate() {
            let coef = inv[c][j];
            let a = coef * (lo[r] - apex[r]);
            let b = coef * (hi[r] - apex[r]);
            tmin += a.min(b);
            tmax += a.max(b);
        }
        let (emin, emax) = match &t.edges[j].extent {
            Extent::Bounded(l) => (0.0, rational::to_f64(l)),
            Extent::Ray => (0.0, f64::INFINITY),
            Extent::Line => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let (a, b) = (tmin.max(emin), tmax.min(emax));
        if a >= b {
            return None;
        }
        ranges.push((a, b));
    }
    Some(ranges)
}

/// `(value, error estimate)` of the pairing with a smooth test function.
pub(crate) fn pair_numeric(d: &FaceDistribution, f: &dyn SmoothTest) -> Result<(f64, f64)> {
    if f.dim() != d.dim {
        return Err(Error::DimensionMismatch { expected: d.dim, got: f.dim() });
    }
    let (lo, hi) = f.support_box();
    let mut total = 0.0;
    let mut err = 0.0;
    for t in &d.terms {
        let ops = expand_operators(&t.derivatives, d.dim);
        let density = t.density.with_vars(&ambient_vars(d.dim));
        let integrand = |x: &[f64]| -> f64 {
            let df: f64 = ops.iter().map(|(alpha, c)| c * f.partial(x, alpha)).sum();
            if df == 0.0 {
                0.0
            } else {
                density.eval_f64(x) * df
            }
        };
        let apex: Vec<f64> = t.apex.iter().map(rational::to_f64).collect();
        if t.edges.is_empty() {
            total += integrand(&apex);
            continue;
        }
        let Some(ranges) = parameter_ranges(t, &lo, &hi) else { continue };
        let dirs: Vec<Vec<f64>> = t.edges.iter().map(|e| e.direction.iter().map(|&x| x as f64).collect()).collect();
        let (v, e) = nested(&integrand, &apex, &dirs, &ranges, &mut Vec::new());
        total += v;
        err += e;
    }
    Ok((total, err))
}

fn nested(f: &dyn Fn(&[f64]) -> f64, apex: &[f64], dirs: &[Vec<f64>], ranges: &[(f64, f64)], fixed: &mut Vec<f64>) -> (f64, f64) {
    let j = fixed.len();
    if j == ranges.len() {
        let mut x = apex.to_vec();
        for (t, d) in fixed.iter().zip(dirs) {
            for (xi, di) in x.iter_mut().zip(d) {
                *xi += t * di;
            }
        }
        return (f(&x), 0.0);
    }
    let inner_err = std::cell::Cell::new(0.0f64);
    let base = fixed.clone();
    let h = |t: f64| {
        let mut fx = base.clone();
        fx.push(t);
        let (v, e) = nested(f, apex, dirs, ranges, &mut fx);
        inner_err.set(inner_err.get().max(e));
        v
    };
    let (a, b) = ranges[j];
    let (v, e) = integrate_adaptive(&h, a, b, QUAD_TOL);
    (v, e + inner_err.get() * (b - a))
}
