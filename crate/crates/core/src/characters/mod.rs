//! Multiplicity functions `m(lambda, k)`, their finite characters, and
//! decompositions into cone-supported pieces.

mod cone;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::rational::{self, int, Rational};
use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, MAX_LATTICE_POINTS};

pub use cone::{
    brion_decomposition, character_eval_pieces, cone_piece_closed_form, generic_functional, paradan_pieces_p1p1, pieces_agree,
    matches_on_box, sum_pieces, wall_independence_check, ConeCharacter, QuasiPolynomial,
};

/// Where `m(., k)` may be nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportBound {
    /// Integer box `lo <= lambda <= hi`.
    Finite { lo: Vec<i64>, hi: Vec<i64> },
    Unbounded(String),
}

type Evaluator = Arc<dyn Fn(&[i64], i64) -> i64 + Send + Sync>;
type SupportRule = Arc<dyn Fn(i64) -> SupportBound + Send + Sync>;

#[derive(Clone)]
pub struct MultiplicityFunction {
    rank: usize,
    pub name: String,
    eval: Evaluator,
    support: SupportRule,
    pub warnings: Vec<String>,
}

impl fmt::Debug for MultiplicityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicityFunction").field("rank", &self.rank).field("name", &self.name).finish()
    }
}

impl MultiplicityFunction {
    pub fn new(
        rank: usize,
        name: impl Into<String>,
        eval: impl Fn(&[i64], i64) -> i64 + Send + Sync + 'static,
        support: impl Fn(i64) -> SupportBound + Send + Sync + 'static,
    ) -> Self {
        MultiplicityFunction { rank, name: name.into(), eval: Arc::new(eval), support: Arc::new(support), warnings: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eval(&self, lambda: &[i64], k: i64) -> i64 {
        assert_eq!(lambda.len(), self.rank, "lattice point of wrong rank");
        (self.eval)(lambda, k)
    }

    pub fn support(&self, k: i64) -> SupportBound {
        (self.support)(k)
    }

    /// `(lambda, m(lambda, k))` for every nonzero value, lexicographically sorted.
    pub fn nonzero_points(&self, k: i64) -> Result<Vec<(Vec<i64>, i64)>> {
        let (lo, hi) = match self.support(k) {
            SupportBound::Finite { lo, hi } => (lo, hi),
            SupportBound::Unbounded(why) => {
                return Err(Error::InfiniteSupport(format!("{why}; evaluate through cone pieces instead")))
            }
        };
        let mut out = Vec::new();
        let mut visited = 0usize;
        for_each_in_box(&lo, &hi, &mut |lambda| {
            visited += 1;
            if visited > MAX_LATTICE_POINTS {
                return Err(Error::SizeCap(MAX_LATTICE_POINTS));
            }
            let m = self.eval(lambda, k);
            if m != 0 {
                out.push((lambda.to_vec(), m));
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// `sum_lambda m(lambda, k)`.
    pub fn total(&self, k: i64) -> Result<i64> {
        Ok(self.nonzero_points(k)?.iter().map(|(_, m)| m).sum())
    }
}

pub fn for_each_in_box(lo: &[i64], hi: &[i64], f: &mut dyn FnMut(&[i64]) -> Result<()>) -> Result<()> {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Ok(());
    }
    let mut cur = lo.to_vec();
    loop {
        f(&cur)?;
        let mut i = cur.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

/// `m(lambda, k) = 1` iff `lambda` lies in `kP`. Works for unbounded polyhedra
/// too, with an unbounded support.
pub fn lattice_indicator(p: &LatticePolytope) -> MultiplicityFunction {
    let hs: Vec<(Vec<i64>, Rational)> = p.halfspaces().iter().map(|h| (h.normal.clone(), h.offset.clone())).collect();
    let eval_hs = hs.clone();
    let eval = move |lambda: &[i64], k: i64| -> i64 {
        let x: Vec<Rational> = lambda.iter().map(|&v| int(v)).collect();
        i64::from(eval_hs.iter().all(|(u, c)| rational::dot_ir(u, &x) <= c * int(k)))
    };
    let bounded = p.is_bounded();
    let dim = p.dim();
    let bbox = if bounded { p.bounding_box().ok() } else { None };
    let support = move |k: i64| match &bbox {
        Some((lo, hi)) => SupportBound::Finite {
            lo: lo.iter().map(|x| rational::ceil_i64(&(x * int(k)))).collect(),
            hi: hi.iter().map(|x| rational::floor_i64(&(x * int(k)))).collect(),
        },
        None if bounded => SupportBound::Finite { lo: vec![0; dim], hi: vec![-1; dim] },
        None => SupportBound::Unbounded("polyhedron is unbounded".into()),
    };
    MultiplicityFunction::new(p.dim(), "lattice indicator", eval, support)
}

/// Lattice-point indicator of `kP`; a non-Delzant `P` is accepted with a warning.
pub fn toric_multiplicity(p: &LatticePolytope) -> MultiplicityFunction {
    let mut m = lattice_indicator(p);
    m.name = "toric multiplicity".into();
    match p.is_delzant() {
        Ok(v) if v.is_delzant => {}
        Ok(v) => m.warnings.push(format!("polytope is not Delzant: {}", v.witness.unwrap_or_default())),
        Err(e) => m.warnings.push(format!("polytope is not Delzant: {e}")),
    }
    m
}

/// `delta_0`: 1 at the origin for every `k`.
pub fn delta_multiplicity(rank: usize) -> MultiplicityFunction {
    MultiplicityFunction::new(
        rank,
        "delta",
        |lambda: &[i64], _k| i64::from(lambda.iter().all(|&x| x == 0)),
        move |_k| SupportBound::Finite { lo: vec![0; rank], hi: vec![0; rank] },
    )
}

/// `(a * b)(lambda, k) = sum_mu a(mu, k) b(lambda - mu, k)`.
pub fn convolve_multiplicities(a: &MultiplicityFunction, b: &MultiplicityFunction) -> Result<MultiplicityFunction> {
    if a.rank != b.rank {
        return Err(Error::DimensionMismatch { expected: a.rank, got: b.rank });
    }
    for (f, label) in [(a, "left"), (b, "right")] {
        if let SupportBound::Unbounded(why) = f.support(1) {
            return Err(Error::InfiniteSupport(format!("{label} factor of convolution: {why}")));
        }
    }
    let (a2, b2) = (a.clone(), b.clone());
    let eval = move |lambda: &[i64], k: i64| -> i64 {
        let SupportBound::Finite { lo, hi } = a2.support(k) else { return 0 };
        let mut total = 0;
        let _ = for_each_in_box(&lo, &hi, &mut |mu| {
            let am = a2.eval(mu, k);
            if am != 0 {
                let rest: Vec<i64> = lambda.iter().zip(mu).map(|(l, m)| l - m).collect();
                total += am * b2.eval(&rest, k);
            }
            Ok(())
        });
        total
    };
    let (a3, b3) = (a.clone(), b.clone());
    let support = move |k: i64| match (a3.support(k), b3.support(k)) {
        (SupportBound::Finite { lo: l1, hi: h1 }, SupportBound::Finite { lo: l2, hi: h2 }) => SupportBound::Finite {
            lo: l1.iter().zip(&l2).map(|(x, y)| x + y).collect(),
            hi: h1.iter().zip(&h2).map(|(x, y)| x + y).collect(),
        },
        _ => SupportBound::Unbounded("convolution factor became unbounded".into()),
    };
    let mut m = MultiplicityFunction::new(a.rank, format!("({}) * ({})", a.name, b.name), eval, support);
    m.warnings = a.warnings.iter().chain(&b.warnings).cloned().collect();
    Ok(m)
}

/// Tent `2k + 1 - |j|` on `[-2k, 2k]`, zero outside.
pub fn p1p1_multiplicity() -> MultiplicityFunction {
    MultiplicityFunction::new(
        1,
        "P1xP1 diagonal",
        |lambda: &[i64], k| {
            let j = lambda[0];
            if j < -2 * k || j > 2 * k {
                0
            } else if j <= 0 {
                2 * k + 1 + j
            } else {
                2 * k + 1 - j
            }
        },
        |k| SupportBound::Finite { lo: vec![-2 * k], hi: vec![2 * k] },
    )
}

/// Product `m(lambda, k) = a(lambda_A, k) b(lambda_B, k)` on disjoint coordinate blocks.
pub fn tensor_multiplicities(a: &MultiplicityFunction, b: &MultiplicityFunction) -> MultiplicityFunction {
    let ra = a.rank;
    let (a2, b2) = (a.clone(), b.clone());
    let (a3, b3) = (a.clone(), b.clone());
    MultiplicityFunction::new(
        a.rank + b.rank,
        format!("({}) x ({})", a.name, b.name),
        move |lambda: &[i64], k| {
            let x = a2.eval(&lambda[..ra], k);
            if x == 0 {
                0
            } else {
                x * b2.eval(&lambda[ra..], k)
            }
        },
        move |k| match (a3.support(k), b3.support(k)) {
            (SupportBound::Finite { lo: l1, hi: h1 }, SupportBound::Finite { lo: l2, hi: h2 }) => {
                SupportBound::Finite { lo: [l1, l2].concat(), hi: [h1, h2].concat() }
            }
            (SupportBound::Unbounded(w), _) | (_, SupportBound::Unbounded(w)) => SupportBound::Unbounded(w),
        },
    )
}

/// `sum_lambda m(lambda, k) prod_i g_i^{lambda_i}`, exactly.
pub fn character_eval(m: &MultiplicityFunction, k: i64, g_point: &[Rational]) -> Result<Rational> {
    if g_point.len() != m.rank {
        return Err(Error::DimensionMismatch { expected: m.rank, got: g_point.len() });
    }
    let mut total = Rational::zero();
    for (lambda, mult) in m.nonzero_points(k)? {
        total += int(mult) * monomial_value(g_point, &lambda)?;
    }
    Ok(total)
}

/// `prod_i g_i^{lambda_i}`; a zero base with negative exponent is a pole.
pub(crate) fn monomial_value(g: &[Rational], lambda: &[i64]) -> Result<Rational> {
    let mut v = Rational::one();
    for (gi, &li) in g.iter().zip(lambda) {
        v *= rational::pow_signed(gi, li as i32).ok_or(Error::Pole)?;
    }
    Ok(v)
}
