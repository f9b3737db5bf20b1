//! Convolutions of ray measures (cone splines) and the distributions `D_n`.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::VectorList;
use crate::algebra::laurent::{inv_one_minus_exp, LaurentSeries};
use crate::algebra::linear_combo::{normalize_form, RationalLinearCombo};
use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, int, Rational};
use crate::dh::{DhTerm, Edge, Extent, FaceDistribution};
use crate::error::{Error, Result};

fn det2(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `det(xi, u)` as a linear polynomial in the ambient coordinates.
fn det_form(vars: &[String], u: &[i64], scale: &Rational) -> MultiPoly {
    MultiPoly::linear(vars.to_vec(), &[int(u[1]) * scale, int(-u[0]) * scale], Rational::zero())
}

fn inv_factorial(m: u32) -> Rational {
    Rational::from_integer(rational::factorial(m)).recip()
}

/// Directions sorted counterclockwise; valid for vectors in an open half-plane.
fn angle_sort(dirs: &mut [Vec<i64>]) {
    dirs.sort_by(|a, b| match det2(a, b) {
        d if d > 0 => Ordering::Less,
        d if d < 0 => Ordering::Greater,
        _ => Ordering::Equal,
    });
}

/// Sector `cone(lo, hi)` of a planar fan with its polynomial density.
type Sector = (Vec<i64>, Vec<i64>, MultiPoly);

fn sector_containing<'a>(sectors: &'a [Sector], p: &[Rational]) -> Option<&'a Sector> {
    sectors.iter().find(|(lo, hi, _)| {
        let d = int(det2(lo, hi));
        let t_lo = (&p[0] * int(hi[1]) - &p[1] * int(hi[0])) / &d;
        let t_hi = (int(lo[0]) * &p[1] - int(lo[1]) * &p[0]) / &d;
        t_lo.is_positive() && t_hi.is_positive()
    })
}

/// Adds the `m`-fold ray measure along `v` to a planar spline:
/// `T_new(xi) = int_0^inf t^{m-1}/(m-1)! T_old(xi - t v) dt`.
fn convolve_ray(sectors: &[Sector], v: &[i64], m: u32) -> Result<Vec<Sector>> {
    let vars = ambient_vars(2);
    let v3: Vec<String> = vec![vars[0].clone(), vars[1].clone(), "t".into()];
    let x = MultiPoly::var(v3.clone(), 0);
    let y = MultiPoly::var(v3.clone(), 1);
    let t = MultiPoly::var(v3.clone(), 2);
    let shift = [&x - &t.scale(&int(v[0])), &y - &t.scale(&int(v[1]))];
    let weight = t.pow(m - 1).scale(&inv_factorial(m - 1));

    let mut old_dirs: Vec<Vec<i64>> = Vec::new();
    for (lo, hi, _) in sectors {
        for d in [lo, hi] {
            if !old_dirs.contains(d) {
                old_dirs.push(d.clone());
            }
        }
    }
    let mut dirs = old_dirs.clone();
    dirs.push(v.to_vec());
    angle_sort(&mut dirs);

    let mut out = Vec::new();
    for w in dirs.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let rep: Vec<i64> = vec![lo[0] + hi[0], lo[1] + hi[1]];
        let mut breaks: Vec<(Rational, Option<&Vec<i64>>)> = vec![(Rational::zero(), None)];
        for u in &old_dirs {
            let dv = det2(v, u);
            if dv == 0 {
                continue;
            }
            let tu = Rational::new(det2(&rep, u).into(), dv.into());
            if !tu.is_positive() {
                continue;
            }
            let p: Vec<Rational> = rep.iter().zip(v).map(|(r, vi)| int(*r) - &tu * int(*vi)).collect();
            if rational::dot_ir(u, &p).is_positive() {
                breaks.push((tu, Some(u)));
            }
        }
        breaks.sort_by(|a, b| a.0.cmp(&b.0));
        let bound = |b: &Option<&Vec<i64>>| -> MultiPoly {
            match b {
                None => MultiPoly::zero(v3.clone()),
                Some(u) => det_form(&v3[..2], u, &Rational::new(1.into(), det2(v, u).into()))
                    .with_vars(&v3),
            }
        };
        let mut density = MultiPoly::zero(vars.clone());
        for (i, (b0, u0)) in breaks.iter().enumerate() {
            let mid = match breaks.get(i + 1) {
                Some((b1, _)) => (b0 + b1) / int(2),
                None => b0 + int(1),
            };
            let p: Vec<Rational> = rep.iter().zip(v).map(|(r, vi)| int(*r) - &mid * int(*vi)).collect();
            let Some((_, _, poly)) = sector_containing(sectors, &p) else { continue };
            let Some((_, u1)) = breaks.get(i + 1) else {
                return Err(Error::NotPointed);
            };
            let integrand = &poly.compose(&shift) * &weight;
            let anti = integrand.antiderivative(2);
            let piece = &anti.substitute(2, &bound(u1)) - &anti.substitute(2, &bound(u0));
            density = &density + &piece.with_vars(&vars);
        }
        if !density.is_zero() {
            out.push((lo.clone(), hi.clone(), density));
        }
    }
    Ok(out)
}

/// Convolution of `m`-fold ray measures `t^{m-1}/(m-1)! dt` along each
/// listed direction (pairwise non-parallel, in an open half-space).
pub fn cone_spline(dirs: &[(Vec<i64>, u32)]) -> Result<FaceDistribution> {
    let g = dirs.first().map(|(d, _)| d.len()).ok_or_else(|| Error::Invalid("no directions".into()))?;
    let vars = ambient_vars(g);
    if dirs.len() == 1 {
        let (v, m) = &dirs[0];
        let norm: i64 = v.iter().map(|x| x * x).sum();
        let coord: Vec<Rational> = v.iter().map(|&x| Rational::new(x.into(), norm.into())).collect();
        let density = MultiPoly::linear(vars.clone(), &coord, Rational::zero()).pow(m - 1).scale(&inv_factorial(m - 1));
        let term = DhTerm { apex: vec![Rational::zero(); g], edges: vec![Edge::new(v.clone(), Extent::Ray)], density, derivatives: vec![] };
        return Ok(FaceDistribution::from_terms(g, vec![term]));
    }
    if g != 2 {
        return Err(Error::Unsupported("several ray directions outside the plane".into()));
    }
    let (a, ma) = &dirs[0];
    let (b, mb) = &dirs[1];
    let (lo, mlo, hi, mhi) = if det2(a, b) > 0 { (a, *ma, b, *mb) } else { (b, *mb, a, *ma) };
    let d = det2(lo, hi);
    if d == 0 {
        return Err(Error::Invalid("parallel directions".into()));
    }
    let dr = Rational::from_integer(d.into());
    let t_lo = det_form(&vars, hi, &dr.recip());
    let t_hi = det_form(&vars, lo, &dr.recip()).scale(&int(-1));
    let base = &t_lo.pow(mlo - 1).scale(&inv_factorial(mlo - 1)) * &t_hi.pow(mhi - 1).scale(&inv_factorial(mhi - 1));
    let mut sectors = vec![(lo.clone(), hi.clone(), base.scale(&rational::abs(&dr).recip()))];
    for (v, m) in &dirs[2..] {
        sectors = convolve_ray(&sectors, v, *m)?;
    }
    let terms = sectors
        .into_iter()
        .map(|(lo, hi, density)| DhTerm {
            apex: vec![Rational::zero(); 2],
            edges: vec![Edge::new(lo, Extent::Ray), Edge::new(hi, Extent::Ray)],
            density,
            derivatives: vec![],
        })
        .collect();
    Ok(FaceDistribution::from_terms(2, terms))
}

/// `D_0, ..., D_{n_max}`: `D_n` is read off the `q^{n - |list|}` coefficient of
/// `prod_alpha 1/(1 - e^{q <alpha, X>})`, where `<alpha,X>^{-m}` becomes
/// `(-1)^m` times the `m`-fold ray measure along `alpha` (convolved over
/// directions) and `<alpha,X>^e` the `e`-th derivative along `alpha`.
pub fn d_series(list: &VectorList, n_max: u32) -> Result<Vec<FaceDistribution>> {
    let g = list.rank();
    let total = list.len() as i64;
    let order = i64::from(n_max) + 1;
    let mut series: LaurentSeries<RationalLinearCombo> = LaurentSeries::one("q");
    for alpha in list.vectors() {
        series = series.mul(&inv_one_minus_exp(alpha, order));
    }
    let distinct: Vec<(i64, Vec<i64>, Vec<i64>)> = list
        .distinct()
        .into_iter()
        .map(|(a, _)| {
            let (s, p) = normalize_form(&a);
            (s, p, a)
        })
        .collect();
    let mut out = Vec::new();
    for n in 0..=n_max {
        let coeff = series.coeff(i64::from(n) - total);
        let mut terms = Vec::new();
        for (mono, c) in coeff.terms() {
            let mut k = c.clone();
            let mut rays: Vec<(Vec<i64>, u32)> = Vec::new();
            let mut derivatives = Vec::new();
            for (form, e) in mono {
                let (s, _, alpha) = distinct
                    .iter()
                    .find(|(_, p, _)| p == form)
                    .ok_or_else(|| Error::Invalid(format!("form {form:?} not in the list")))?;
                if s.abs() != 1 {
                    return Err(Error::NotUnimodular(format!("vector {alpha:?} is not primitive")));
                }
                if *s < 0 && e % 2 != 0 {
                    k = -k;
                }
                if *e > 0 {
                    derivatives.push((alpha.clone(), *e as u32));
                } else {
                    let m = (-*e) as u32;
                    if m % 2 == 1 {
                        k = -k;
                    }
                    rays.push((alpha.clone(), m));
                }
            }
            let base = if rays.is_empty() {
                FaceDistribution::from_terms(g, vec![DhTerm::point(vec![Rational::zero(); g], int(1), vec![])])
            } else {
                cone_spline(&rays)?
            };
            for mut t in base.scale(&k).terms {
                t.derivatives.extend(derivatives.iter().cloned());
                terms.push(t);
            }
        }
        out.push(FaceDistribution::from_terms(g, terms).simplify());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::dh::point_masses_1d;

    fn p2(s: &str) -> MultiPoly {
        parse_poly(s, &ambient_vars(2)).unwrap()
    }

    #[test]
    fn one_dimensional_series() {
        let l = VectorList::new(vec![vec![1]]).unwrap();
        let d = d_series(&l, 2).unwrap();
        assert_eq!(d[0].terms.len(), 1);
        assert_eq!(d[0].terms[0].edges, vec![Edge::new(vec![1], Extent::Ray)]);
        assert_eq!(point_masses_1d(&d[1]).get(&(int(0), 0)), Some(&rational::rat(1, 2)));
        let twice = VectorList::new(vec![vec![1], vec![1]]).unwrap();
        let d = d_series(&twice, 1).unwrap();
        assert_eq!(d[0].terms[0].density, parse_poly("x", &ambient_vars(1)).unwrap());
        assert_eq!(d[1].terms[0].density, parse_poly("1", &ambient_vars(1)).unwrap());
    }

    #[test]
    fn a2_leading_term_is_min() {
        let l = VectorList::new(vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let d0 = &d_series(&l, 0).unwrap()[0];
        assert_eq!(d0.terms.len(), 2);
        for t in &d0.terms {
            let (lo, hi) = (&t.edges[0].direction, &t.edges[1].direction);
            if lo == &vec![1, 0] {
                assert_eq!(hi, &vec![1, 1]);
                assert_eq!(t.density, p2("y"));
            } else {
                assert_eq!((lo, hi), (&vec![1, 1], &vec![0, 1]));
                assert_eq!(t.density, p2("x"));
            }
        }
    }

    #[test]
    fn four_vectors() {
        let l = VectorList::new(vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 0]]).unwrap();
        let d0 = &d_series(&l, 0).unwrap()[0];
        // T(xi) = int_0^inf min(x - t, y) 1[t <= x] dt on the cone, checked at (3, 1)
        let val: Rational = d0
            .terms
            .iter()
            .filter(|t| {
                let (lo, hi) = (&t.edges[0].direction, &t.edges[1].direction);
                det2(lo, &[3, 1]) > 0 && det2(&[3, 1], hi) > 0
            })
            .map(|t| t.density.eval(&[int(3), int(1)]))
            .sum();
        // int_0^2 1 dt + int_2^3 (3 - t) dt = 2 + 1/2
        assert_eq!(val, rational::rat(5, 2));
    }
}
