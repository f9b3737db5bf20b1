//! Constructions of `DH_n`: rays, intervals, products, vertex cones and their
//! assembly over a Delzant polytope.

use num_traits::Zero;

use super::{convolve::dh_convolve, DhTerm, Edge, Extent, FaceDistribution};
use crate::algebra::laurent::{inv_one_minus_exp, LaurentSeries};
use crate::algebra::linear_combo::{normalize_form, RationalLinearCombo};
use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, int, rat, Rational};
use crate::characters::brion_decomposition;
use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, VertexCone};

/// Coefficient of the `n`-th term of `sum_{t >= 0} f(a + t v / k)` (or `t >= 1`
/// when `open`): 1 for the ray measure at `n = 0`, `+-1/2` at `n = 1`, and
/// `-B_n / n!` in front of the `(n-1)`-th derivative at the apex for `n >= 2`.
pub fn ray_coefficient(n: u32, open: bool) -> Rational {
    match n {
        0 => int(1),
        1 if open => rat(-1, 2),
        1 => rat(1, 2),
        _ => -crate::algebra::bernoulli(n as usize) / Rational::from_integer(rational::factorial(n)),
    }
}

fn ray_term(apex: Vec<Rational>, dir: Vec<i64>, open: bool, n: u32) -> Option<DhTerm> {
    let g = apex.len();
    let c = ray_coefficient(n, open);
    if c.is_zero() {
        return None;
    }
    Some(if n == 0 {
        DhTerm { apex, edges: vec![Edge::new(dir, Extent::Ray)], density: MultiPoly::one(ambient_vars(g)), derivatives: Vec::new() }
    } else {
        DhTerm::point(apex, c, vec![(dir, n - 1)])
    })
}

/// `DH_n` of the lattice points `apex + t dir`, `t >= 0` (`t >= 1` when `open`).
pub fn dh_ray(apex: Vec<Rational>, dir: Vec<i64>, open: bool, n: u32) -> FaceDistribution {
    let g = apex.len();
    FaceDistribution::from_terms(g, ray_term(apex, dir, open, n).into_iter().collect())
}

/// `DH_n` of `j >= k a` (direction `+1`) or `j <= k a` (direction `-1`).
pub fn dh_halfline(a: Rational, direction: i64, n: u32) -> FaceDistribution {
    assert!(direction == 1 || direction == -1, "direction must be +1 or -1");
    dh_ray(vec![a], vec![direction], false, n)
}

/// `DH_n` of `[a, b]`: Lebesgue, then `(delta_a + delta_b)/2`, then
/// `(B_n/n!) (f^(n-1)(b) - f^(n-1)(a))`.
pub fn dh_interval(a: Rational, b: Rational, n: u32) -> FaceDistribution {
    assert!(a < b, "interval needs a < b");
    let terms = match n {
        0 => vec![super::interval_term(Some(a), Some(b), MultiPoly::one(ambient_vars(1)))],
        1 => vec![DhTerm::point(vec![a], rat(1, 2), vec![]), DhTerm::point(vec![b], rat(1, 2), vec![])],
        _ => {
            let c = crate::algebra::bernoulli(n as usize) / Rational::from_integer(rational::factorial(n));
            if c.is_zero() {
                vec![]
            } else {
                vec![DhTerm::point(vec![a], -c.clone(), vec![(vec![1], n - 1)]), DhTerm::point(vec![b], c, vec![(vec![1], n - 1)])]
            }
        }
    };
    FaceDistribution::from_terms(1, terms)
}

/// Product distribution on `R^{gA} x R^{gB}`.
pub fn dh_tensor(a: &FaceDistribution, b: &FaceDistribution) -> FaceDistribution {
    let (ga, gb) = (a.dim, b.dim);
    let g = ga + gb;
    let vars = ambient_vars(g);
    let embed = |v: &[i64], first: bool| -> Vec<i64> {
        if first {
            v.iter().copied().chain(std::iter::repeat(0).take(gb)).collect()
        } else {
            std::iter::repeat(0).take(ga).chain(v.iter().copied()).collect()
        }
    };
    let lift = |p: &MultiPoly, src: usize, offset: usize| -> MultiPoly {
        let subs: Vec<MultiPoly> = (0..src).map(|i| MultiPoly::var(vars.clone(), offset + i)).collect();
        p.with_vars(&ambient_vars(src)).compose(&subs)
    };
    let mut terms = Vec::new();
    for s in &a.terms {
        for t in &b.terms {
            let edges = s
                .edges
                .iter()
                .map(|e| Edge::new(embed(&e.direction, true), e.extent.clone()))
                .chain(t.edges.iter().map(|e| Edge::new(embed(&e.direction, false), e.extent.clone())))
                .collect();
            let derivatives = s
                .derivatives
                .iter()
                .map(|(v, o)| (embed(v, true), *o))
                .chain(t.derivatives.iter().map(|(v, o)| (embed(v, false), *o)))
                .collect();
            terms.push(DhTerm {
                apex: s.apex.iter().chain(&t.apex).cloned().collect(),
                edges,
                density: &lift(&s.density, ga, 0) * &lift(&t.density, gb, ga),
                derivatives,
            });
        }
    }
    FaceDistribution::from_terms(g, terms)
}

/// Compositions of `n` into `parts` nonnegative parts.
pub(crate) fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `DH_n` of an axis-aligned box as a sum of tensor products of intervals.
pub fn dh_box(lo: &[Rational], hi: &[Rational], n: u32) -> FaceDistribution {
    let g = lo.len();
    let mut total = FaceDistribution::zero(g);
    for parts in compositions(n, g) {
        let mut acc: Option<FaceDistribution> = None;
        for (i, &ni) in parts.iter().enumerate() {
            let f = dh_interval(lo[i].clone(), hi[i].clone(), ni);
            acc = Some(match acc {
                None => f,
                Some(a) => dh_tensor(&a, &f),
            });
        }
        total = total.add(&acc.unwrap());
    }
    total.simplify()
}

/// Unimodular cone with apex `v`: the lattice points are `v + sum t_i g_i`, so
/// `DH_n` is the sum over `n_1 + ... + n_g = n` of products of ray terms.
pub fn dh_cone_direct(cone: &VertexCone, open: &[bool], n: u32) -> Result<FaceDistribution> {
    check_unimodular(cone)?;
    let g = cone.dim();
    let mut terms = Vec::new();
    for parts in compositions(n, g) {
        let mut coeff = int(1);
        let mut edges = Vec::new();
        let mut derivatives = Vec::new();
        for (i, &ni) in parts.iter().enumerate() {
            coeff *= ray_coefficient(ni, open[i]);
            if ni == 0 {
                edges.push(Edge::new(cone.generators[i].clone(), Extent::Ray));
            } else if ni > 1 {
                derivatives.push((cone.generators[i].clone(), ni - 1));
            }
        }
        if coeff.is_zero() {
            continue;
        }
        terms.push(DhTerm { apex: cone.vertex.clone(), edges, density: MultiPoly::constant(ambient_vars(g), coeff), derivatives });
    }
    Ok(FaceDistribution::from_terms(g, terms).simplify())
}

fn check_unimodular(cone: &VertexCone) -> Result<()> {
    if !cone.is_unimodular() {
        return Err(Error::Unsupported(format!("cone with generators {:?} is not unimodular", cone.generators)));
    }
    Ok(())
}

/// The `q^{n-g}` coefficient of `prod_i 1/(1 - e^{q <g_i, X>})` (with
/// `e^{q y}/(1 - e^{q y})` for open generators), read back through the 1D
/// dictionary: `y^m` is the `m`-th derivative at the apex along the generator
/// and `y^{-m}` is `(-1)^m` times the `m`-fold convolution of ray measures.
pub fn dh_vertex_cone(cone: &VertexCone, open: &[bool], n: u32) -> Result<FaceDistribution> {
    check_unimodular(cone)?;
    let g = cone.dim();
    let order = i64::from(n) + 1;
    let mut series: LaurentSeries<RationalLinearCombo> = LaurentSeries::one("q");
    for (gen, &op) in cone.generators.iter().zip(open) {
        let mut s = inv_one_minus_exp(gen, order);
        if op {
            s = s.add(&LaurentSeries::monomial("q", 0, RationalLinearCombo::one().neg(), None));
        }
        series = series.mul(&s);
    }
    let target = i64::from(n) - g as i64;
    assert!(series.truncation().is_none_or(|t| t >= target), "series truncated below the requested order");
    let coeff = series.coeff(target);
    decode_cone_coefficient(&coeff, &cone.vertex, &cone.generators)
}

/// Translates a combination of products of generator forms into distribution terms.
pub(crate) fn decode_cone_coefficient(c: &RationalLinearCombo, apex: &[Rational], gens: &[Vec<i64>]) -> Result<FaceDistribution> {
    let g = apex.len();
    let vars = ambient_vars(g);
    let prims: Vec<(i64, Vec<i64>)> = gens.iter().map(|v| normalize_form(v)).collect();
    // coordinates along the generators: t = G^{-1} (xi - apex)
    let gmat: Vec<Vec<Rational>> = (0..g).map(|i| gens.iter().map(|v| int(v[i])).collect()).collect();
    let coord = |i: usize| -> MultiPoly {
        let e: Vec<Rational> = (0..g).map(|k| int(i64::from(k == i))).collect();
        // row i of G^{-1} solves G^T r = e_i
        let gt: Vec<Vec<Rational>> = (0..g).map(|r| (0..g).map(|k| gmat[k][r].clone()).collect()).collect();
        let row = rational::solve(&gt, &e).expect("unimodular basis");
        let shift: Rational = row.iter().zip(apex).map(|(a, b)| a * b).sum();
        MultiPoly::linear(vars.clone(), &row, -shift)
    };
    let mut terms = Vec::new();
    for (mono, coeff) in c.terms() {
        let mut k = coeff.clone();
        let mut edges = Vec::new();
        let mut derivatives = Vec::new();
        let mut density = MultiPoly::one(vars.clone());
        for (form, e) in mono {
            let i = prims
                .iter()
                .position(|(_, p)| p == form)
                .ok_or_else(|| Error::Unsupported(format!("form {form:?} is not a cone generator")))?;
            let s = prims[i].0;
            k *= rational::pow_signed(&int(s), *e).expect("unit scale");
            if *e > 0 {
                derivatives.push((gens[i].clone(), *e as u32));
            } else {
                let m = (-*e) as u32;
                if m % 2 == 1 {
                    k = -k;
                }
                edges.push((i, Edge::new(gens[i].clone(), Extent::Ray)));
                if m > 1 {
                    let t = coord(i).pow(m - 1).scale(&Rational::from_integer(rational::factorial(m - 1)).recip());
                    density = &density * &t;
                }
            }
        }
        edges.sort_by_key(|(i, _)| *i);
        terms.push(DhTerm {
            apex: apex.to_vec(),
            edges: edges.into_iter().map(|(_, e)| e).collect(),
            density: density.scale(&k),
            derivatives,
        });
    }
    Ok(FaceDistribution::from_terms(g, terms).simplify())
}

/// `DH_n` of a Delzant polytope as the signed sum of its half-open vertex cones.
pub fn dh_delzant(p: &LatticePolytope, n: u32) -> Result<FaceDistribution> {
    let mut total = FaceDistribution::zero(p.dim());
    for piece in brion_decomposition(p)? {
        let cone = VertexCone::new(piece.apex.clone(), piece.generators.clone());
        let d = dh_vertex_cone(&cone, &piece.open, n)?;
        total = total.add(&d.scale(&int(i64::from(piece.sign))));
    }
    Ok(total.simplify())
}

/// `DH_n` of the diagonal P1 x P1 character as `sum_{i+j=n} DH_i[-2,0] * DH_j[0,2]`.
pub fn dh_p1p1(n: u32) -> Result<FaceDistribution> {
    let mut total = FaceDistribution::zero(1);
    for i in 0..=n {
        let a = dh_interval(int(-2), int(0), i);
        let b = dh_interval(int(0), int(2), n - i);
        total = total.add(&dh_convolve(&a, &b)?);
    }
    Ok(total.simplify())
}
