//! Convolution of one-dimensional distributions.

use super::{interval_term, term_interval, DhTerm, FaceDistribution, Interval};
use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{int, Rational};
use crate::error::{Error, Result};

/// `<A * B, f> = <A_x, <B_y, f(x + y)>>` for one-dimensional `A` and `B`.
/// Densities on segments and rays are convolved piecewise; a ray towards
/// `-inf` against one towards `+inf` diverges and is rejected.
pub fn dh_convolve(a: &FaceDistribution, b: &FaceDistribution) -> Result<FaceDistribution> {
    if a.dim != 1 || b.dim != 1 {
        return Err(Error::Unsupported("convolution is implemented in dimension one".into()));
    }
    let (a, b) = (a.simplify(), b.simplify());
    let mut terms = Vec::new();
    for s in &a.terms {
        for t in &b.terms {
            terms.extend(convolve_terms(s, t)?);
        }
    }
    Ok(FaceDistribution::from_terms(1, terms).simplify())
}

fn convolve_terms(s: &DhTerm, t: &DhTerm) -> Result<Vec<DhTerm>> {
    match (s.edges.is_empty(), t.edges.is_empty()) {
        (true, _) => Ok(vec![shifted(t, s)]),
        (false, true) => Ok(vec![shifted(s, t)]),
        (false, false) => {
            let (iv1, iv2) = (term_interval(s).unwrap(), term_interval(t).unwrap());
            if matches!(iv1, (None, None)) || matches!(iv2, (None, None)) {
                return Err(Error::Unsupported("convolution with a full line".into()));
            }
            let vars = ambient_vars(1);
            let mut out = convolve_densities(&iv1, &s.density.with_vars(&vars), &iv2, &t.density.with_vars(&vars))?;
            let derivatives: Vec<(Vec<i64>, u32)> = s.derivatives.iter().chain(&t.derivatives).cloned().collect();
            for term in &mut out {
                term.derivatives = derivatives.clone();
            }
            Ok(out)
        }
    }
}

/// `term * (c delta_a^{(r)})`: translate `term` by `a`, scale by `c` and add
/// the derivatives.
fn shifted(term: &DhTerm, point: &DhTerm) -> DhTerm {
    let mut out = term.translate(&point.apex);
    out.density = out.density.scale(&point.density.constant_term());
    out.derivatives.extend(point.derivatives.iter().cloned());
    out
}

fn add_opt(a: &Option<Rational>, b: &Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// `h(xi) = int_{max(lo1, xi - hi2)}^{min(hi1, xi - lo2)} p(u) q(xi - u) du`,
/// polynomial between consecutive sums of endpoints.
fn convolve_densities(iv1: &Interval, p: &MultiPoly, iv2: &Interval, q: &MultiPoly) -> Result<Vec<DhTerm>> {
    let vars = ambient_vars(1);
    let uv: Vec<String> = vec!["u".into(), vars[0].clone()];
    let u = MultiPoly::var(uv.clone(), 0);
    let x = MultiPoly::var(uv.clone(), 1);
    let integrand = &p.compose(std::slice::from_ref(&u)) * &q.compose(&[&x - &u]);
    let anti = integrand.antiderivative(0);

    let mut breaks: Vec<Rational> = [
        add_opt(&iv1.0, &iv2.0),
        add_opt(&iv1.0, &iv2.1),
        add_opt(&iv1.1, &iv2.0),
        add_opt(&iv1.1, &iv2.1),
    ]
    .into_iter()
    .flatten()
    .collect();
    breaks.sort();
    breaks.dedup();
    let mut cells: Vec<Interval> = vec![(None, breaks.first().cloned())];
    for w in breaks.windows(2) {
        cells.push((Some(w[0].clone()), Some(w[1].clone())));
    }
    if let Some(last) = breaks.last() {
        cells.push((Some(last.clone()), None));
    }

    let mut out = Vec::new();
    for cell in cells {
        let rep = match &cell {
            (Some(a), Some(b)) => (a + b) / int(2),
            (None, Some(b)) => b - int(1),
            (Some(a), None) => a + int(1),
            (None, None) => int(0),
        };
        // candidate bounds as (value at rep, bound as a polynomial in x)
        let mut lower: Option<(Rational, MultiPoly)> = None;
        let mut upper: Option<(Rational, MultiPoly)> = None;
        if let Some(l) = &iv1.0 {
            lower = Some((l.clone(), MultiPoly::constant(uv.clone(), l.clone())));
        }
        if let Some(h) = &iv2.1 {
            let v = &rep - h;
            if lower.as_ref().is_none_or(|(w, _)| v > *w) {
                lower = Some((v, &x - &MultiPoly::constant(uv.clone(), h.clone())));
            }
        }
        if let Some(h) = &iv1.1 {
            upper = Some((h.clone(), MultiPoly::constant(uv.clone(), h.clone())));
        }
        if let Some(l) = &iv2.0 {
            let v = &rep - l;
            if upper.as_ref().is_none_or(|(w, _)| v < *w) {
                upper = Some((v, &x - &MultiPoly::constant(uv.clone(), l.clone())));
            }
        }
        let (lo, hi) = match (lower, upper) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::DivergentPairing("convolution of rays pointing in opposite directions".into())),
        };
        if lo.0 >= hi.0 {
            continue;
        }
        let at = |bound: &MultiPoly| anti.compose(&[bound.clone(), x.clone()]).with_vars(&vars);
        let density = &at(&hi.1) - &at(&lo.1);
        if !density.is_zero() {
            out.push(interval_term(cell.0, cell.1, density));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::algebra::rational::rat;
    use crate::dh::dh_interval;

    fn px(s: &str) -> MultiPoly {
        parse_poly(s, &ambient_vars(1)).unwrap()
    }

    #[test]
    fn lebesgue_squares_to_tent() {
        let a = dh_interval(int(0), int(1), 0);
        let c = dh_convolve(&a, &a).unwrap();
        assert_eq!(c.terms, vec![interval_term(Some(int(0)), Some(int(1)), px("x")), interval_term(Some(int(1)), Some(int(2)), px("2 - x"))]);
    }

    #[test]
    fn moments_multiply() {
        // int (x + y)^2 dA dB with A = Leb[0,1] and B = Leb[0,2]
        let a = dh_interval(int(0), int(1), 0);
        let b = dh_interval(int(0), int(2), 0);
        let c = dh_convolve(&a, &b).unwrap();
        assert_eq!(c.pair_polynomial(&px("1")).unwrap(), int(2));
        // E = 2 * (1/3 + 2 * 1/2 * 1 + 4/3) = 2 * (1/3 + 1 + 4/3)
        assert_eq!(c.pair_polynomial(&px("x^2")).unwrap(), int(2) * (rat(1, 3) + int(1) + rat(4, 3)));
    }

    #[test]
    fn points_shift_and_differentiate() {
        let a = dh_interval(int(0), int(1), 3);
        assert!(dh_convolve(&a, &dh_interval(int(0), int(1), 0)).unwrap().is_zero());
        let d2 = dh_interval(int(0), int(1), 2);
        let leb = dh_interval(int(5), int(6), 0);
        let c = dh_convolve(&d2, &leb).unwrap();
        // <D2 * Leb, x^2> = <D2_x, int_5^6 (x+y)^2 dy> with D2 = (f'(1) - f'(0))/12
        let deriv = |x: Rational| (&x + int(6)) * (&x + int(6)) - (&x + int(5)) * (&x + int(5));
        assert_eq!(c.pair_polynomial(&px("x^2")).unwrap(), (deriv(int(1)) - deriv(int(0))) / int(12));
    }

    #[test]
    fn rays() {
        let r = FaceDistribution::from_terms(1, vec![interval_term(Some(int(0)), None, px("1"))]);
        let c = dh_convolve(&r, &dh_interval(int(0), int(1), 0)).unwrap();
        assert_eq!(c.terms, vec![interval_term(Some(int(0)), Some(int(1)), px("x")), interval_term(Some(int(1)), None, px("1"))]);
        let rr = dh_convolve(&r, &r).unwrap();
        assert_eq!(rr.terms, vec![interval_term(Some(int(0)), None, px("x"))]);
        let l = FaceDistribution::from_terms(1, vec![interval_term(None, Some(int(0)), px("1"))]);
        assert!(dh_convolve(&r, &l).is_err());
    }
}
