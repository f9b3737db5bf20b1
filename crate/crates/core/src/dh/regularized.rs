//! Exact polynomial pairings for sums of cone-supported terms whose individual
//! pairings diverge. Each term is paired with `e^{s <xi, Y>}` as a Laurent
//! series in `s` (rays contribute their meromorphic continuation
//! `a! / (-c s)^{a+1}`, full lines contribute 0); for a compactly supported
//! total the negative powers cancel and `<D, <xi,Y>^m> = m! [s^m]`.

use num_traits::Zero;

use super::{DhTerm, Extent, FaceDistribution};
use crate::algebra::laurent::{exp_series, LaurentSeries};
use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, int, rat, Rational};
use crate::error::{Error, Result};

/// Laurent series in `s` of `<term, e^{s <xi, Y>}>`, exact through `s^order`.
pub fn exp_pairing(t: &DhTerm, y: &[Rational], order: i64) -> Result<LaurentSeries<Rational>> {
    let g = t.dim();
    let density = t.density.with_vars(&ambient_vars(g));
    let deg = i64::from(density.degree().unwrap_or(0));
    let m = t.edges.len() as i64;
    let trunc = order + deg + m + 1;
    let mut acc = exp_series(&t.apex.iter().zip(y).map(|(a, b)| a * b).sum(), trunc);
    let mut s_power = 0i64;
    let mut d_coeff = int(1);
    for (v, o) in &t.derivatives {
        d_coeff *= rational::pow(&rational::dot_ir(v, y), *o);
        s_power += i64::from(*o);
    }
    acc = acc.mul(&LaurentSeries::monomial("s", s_power, d_coeff, None));
    if t.edges.is_empty() {
        return Ok(acc.scale(&density.eval(&t.apex)));
    }
    let (_, subs) = t.parametrization();
    let p = density.compose(&subs);
    let c: Vec<Rational> = t.edges.iter().map(|e| rational::dot_ir(&e.direction, y)).collect();
    let mut integral: LaurentSeries<Rational> = LaurentSeries::new("s", None);
    for (mono, coef) in p.terms() {
        let mut f = LaurentSeries::monomial("s", 0, coef.clone(), None);
        for (j, e) in t.edges.iter().enumerate() {
            let a = mono.0[j];
            let factor = match &e.extent {
                Extent::Line => return Ok(LaurentSeries::new("s", Some(order))),
                Extent::Ray => {
                    if c[j].is_zero() {
                        return Err(Error::NonGenericDirection);
                    }
                    // int_0^inf t^a e^{c s t} dt = a! / (-c s)^{a+1}
                    let val = Rational::from_integer(rational::factorial(a)) / rational::pow(&(-c[j].clone()), a + 1);
                    LaurentSeries::monomial("s", -(i64::from(a) + 1), val, None)
                }
                Extent::Bounded(len) => {
                    let mut ser = LaurentSeries::new("s", Some(trunc));
                    let mut cr = int(1);
                    for r in 0..=trunc.max(0) {
                        if r > 0 {
                            cr = cr * &c[j] / int(r);
                        }
                        let k = i64::from(a) + r + 1;
                        ser.set(r, &cr * rational::pow(len, k as u32) / int(k));
                    }
                    ser
                }
            };
            f = f.mul(&factor);
        }
        integral = integral.add(&f);
    }
    Ok(acc.mul(&integral))
}

/// `<D, <xi, Y>^m>` from the summed exponential pairings.
fn power_pairing(d: &FaceDistribution, y: &[Rational], m: u32) -> Result<Rational> {
    let mut total: LaurentSeries<Rational> = LaurentSeries::new("s", None);
    for t in &d.terms {
        total = total.add(&exp_pairing(t, y, i64::from(m))?);
    }
    if total.truncation().is_some_and(|tr| tr < i64::from(m)) {
        return Err(Error::Verification("exponential pairing truncated too early".into()));
    }
    for (e, c) in total.iter() {
        if *e < 0 && !c.is_zero() {
            return Err(Error::DivergentPairing("assembled distribution is not compactly supported".into()));
        }
    }
    Ok(total.coeff(i64::from(m)) * Rational::from_integer(rational::factorial(m)))
}

fn monomials_of_degree(g: usize, m: u32) -> Vec<Vec<u32>> {
    if g == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for first in (0..=m).rev() {
        for mut rest in monomials_of_degree(g - 1, m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Points `Y = (1, y_2, ..., y_g)` on an affine image of the principal lattice
/// of degree `m`, which interpolate homogeneous degree-`m` forms.
fn sample_directions(g: usize, m: u32, attempt: i64) -> Vec<Vec<Rational>> {
    let lattice: Vec<Vec<u32>> = if g == 1 {
        vec![vec![]]
    } else {
        (0..=m).flat_map(|s| monomials_of_degree(g - 1, s)).collect()
    };
    lattice
        .iter()
        .map(|idx| {
            let mut y = vec![int(1)];
            for (k, &i) in idx.iter().enumerate() {
                let off = rat(attempt + 1, 7 + k as i64) + rat(1, 1013);
                let skew: Rational = idx[..k].iter().map(|&l| rat(i64::from(l), 31)).sum();
                y.push(off + int(i64::from(i)) + skew);
            }
            y
        })
        .collect()
}

/// Exact pairing of a (possibly termwise divergent) assembly with a polynomial.
pub fn pair_regularized(d: &FaceDistribution, f: &MultiPoly) -> Result<Rational> {
    let g = d.dim;
    let f = f.with_vars(&ambient_vars(g));
    let mut total = Rational::zero();
    let max_deg = f.degree().unwrap_or(0);
    for m in 0..=max_deg {
        let part = f.homogeneous_part(m);
        if part.is_zero() {
            continue;
        }
        let monos = monomials_of_degree(g, m);
        let mut solved = None;
        for attempt in 0..8 {
            let ys = sample_directions(g, m, attempt);
            let mut rows = Vec::with_capacity(ys.len());
            let mut rhs = Vec::with_capacity(ys.len());
            let mut ok = true;
            for y in &ys {
                match power_pairing(d, y, m) {
                    Ok(v) => rhs.push(v),
                    Err(Error::NonGenericDirection) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
                rows.push(
                    monos
                        .iter()
                        .map(|alpha| {
                            let mult = Rational::from_integer(rational::factorial(m))
                                / alpha.iter().map(|&a| Rational::from_integer(rational::factorial(a))).product::<Rational>();
                            alpha.iter().zip(y).fold(mult, |acc, (&a, yi)| acc * rational::pow(yi, a))
                        })
                        .collect::<Vec<_>>(),
                );
            }
            if !ok {
                continue;
            }
            if let Some(u) = rational::solve(&rows, &rhs) {
                solved = Some(u);
                break;
            }
        }
        let u = solved.ok_or(Error::NonGenericDirection)?;
        for (alpha, ua) in monos.iter().zip(&u) {
            total += part.coeff(alpha) * ua;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::dh::{interval_term, Edge};

    #[test]
    fn rays_cancel_to_segment() {
        let one = MultiPoly::one(ambient_vars(1));
        let d = FaceDistribution::from_terms(1, vec![
            interval_term(Some(int(0)), None, one.clone()),
            interval_term(Some(int(3)), None, one.scale(&int(-1))),
        ]);
        let seg = FaceDistribution::from_terms(1, vec![interval_term(Some(int(0)), Some(int(3)), one)]);
        for m in 0..6 {
            let f = parse_poly(&format!("x^{m} + 2*x"), &ambient_vars(1)).unwrap();
            assert_eq!(pair_regularized(&d, &f).unwrap(), seg.pair_polynomial(&f).unwrap());
        }
        let lone = FaceDistribution::from_terms(1, vec![d.terms[0].clone()]);
        assert!(matches!(pair_regularized(&lone, &parse_poly("1", &ambient_vars(1)).unwrap()), Err(Error::DivergentPairing(_))));
    }

    #[test]
    fn quadrant_differences_give_square() {
        // [0,1]^2 = Q(0,0) - Q(1,0) - Q(0,1) + Q(1,1) with Q the quadrant
        let vars = ambient_vars(2);
        let q = |a: i64, b: i64, s: i64| DhTerm {
            apex: vec![int(a), int(b)],
            edges: vec![Edge::new(vec![1, 0], Extent::Ray), Edge::new(vec![0, 1], Extent::Ray)],
            density: MultiPoly::constant(vars.clone(), int(s)),
            derivatives: vec![],
        };
        let d = FaceDistribution::from_terms(2, vec![q(0, 0, 1), q(1, 0, -1), q(0, 1, -1), q(1, 1, 1)]);
        let f = parse_poly("x^2*y + 3*y^3 - x + 1", &vars).unwrap();
        // int_0^1 int_0^1 f = 1/6 + 3/4 - 1/2 + 1
        assert_eq!(pair_regularized(&d, &f).unwrap(), rat(1, 6) + rat(3, 4) - rat(1, 2) + int(1));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(sample_directions(3, 2, 0).len(), 6);
        assert_eq!(sample_directions(2, 4, 0).len(), 5);
    }
}
