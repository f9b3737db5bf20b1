//! Exact moments `<DH_n, P>` read off from lattice sums.

use num_traits::Zero;

use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, int, Rational};
use crate::characters::MultiplicityFunction;
use crate::error::{Error, Result};

/// Fits `s(k) = sum_{n < count} c_n k^{top - n}` exactly on the first `count`
/// samples and checks every remaining sample; the first disagreeing `k` is
/// reported.
pub fn fit_k_expansion(ks: &[i64], values: &[Rational], top: i64, count: usize) -> Result<Vec<Rational>> {
    assert_eq!(ks.len(), values.len());
    if ks.len() < count {
        return Err(Error::Invalid(format!("need at least {count} samples, got {}", ks.len())));
    }
    let row = |k: i64| -> Vec<Rational> {
        (0..count)
            .map(|n| rational::pow_signed(&int(k), (top - n as i64) as i32).expect("k is nonzero"))
            .collect()
    };
    let a: Vec<Vec<Rational>> = ks[..count].iter().map(|&k| row(k)).collect();
    let c = rational::solve(&a, &values[..count]).ok_or_else(|| Error::Invalid("sample points do not determine the fit".into()))?;
    for (&k, v) in ks.iter().zip(values).skip(count) {
        let pred: Rational = row(k).iter().zip(&c).map(|(x, y)| x * y).sum();
        if pred != *v {
            return Err(Error::NotQuasiPolynomial { k });
        }
    }
    Ok(c)
}

/// `S(k) = sum_lambda m(lambda, k) P(lambda / k)`.
pub(crate) fn scaled_sum(m: &MultiplicityFunction, p: &MultiPoly, k: i64) -> Result<Rational> {
    let vars = ambient_vars(m.rank());
    let p = p.with_vars(&vars);
    let mut s = Rational::zero();
    for (lambda, mult) in m.nonzero_points(k)? {
        let x: Vec<Rational> = lambda.iter().map(|&l| rational::rat(l, k)).collect();
        s += p.eval(&x) * int(mult);
    }
    Ok(s)
}

/// `<DH_n, P>` for `n = 0..=N+d` where `N = deg P`, from the exact identity
/// `S(k) = sum_n c_n k^{d-n}`: the sums at `k = 1..N+d+1` determine the
/// coefficients and `k = N+d+2` must agree.
pub fn dh_moment_oracle(m: &MultiplicityFunction, p: &MultiPoly, d: i64, n_deg: u32) -> Result<Vec<Rational>> {
    let count = (i64::from(n_deg) + d + 1) as usize;
    let ks: Vec<i64> = (1..=count as i64 + 1).collect();
    let values = ks.iter().map(|&k| scaled_sum(m, p, k)).collect::<Result<Vec<_>>>()?;
    fit_k_expansion(&ks, &values, d, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::algebra::rational::rat;
    use crate::characters::{lattice_indicator, p1p1_multiplicity};
    use crate::polytope::LatticePolytope;

    #[test]
    fn p1p1_moments() {
        let m = p1p1_multiplicity();
        let one = parse_poly("1", &ambient_vars(1)).unwrap();
        assert_eq!(dh_moment_oracle(&m, &one, 2, 0).unwrap(), vec![int(4), int(4), int(1)]);
        let sq = parse_poly("x^2", &ambient_vars(1)).unwrap();
        assert_eq!(dh_moment_oracle(&m, &sq, 2, 2).unwrap(), vec![rat(8, 3), rat(16, 3), rat(10, 3), rat(2, 3), int(0)]);
    }

    #[test]
    fn square_counts() {
        let m = lattice_indicator(&LatticePolytope::unit_cube(2));
        let one = MultiPoly::one(ambient_vars(2));
        assert_eq!(dh_moment_oracle(&m, &one, 2, 0).unwrap(), vec![int(1), int(2), int(1)]);
    }

    #[test]
    fn residual_detected() {
        // floor(k/2)^0-like periodic data: s(k) = k + (k mod 2)
        let ks: Vec<i64> = (1..=4).collect();
        let vals: Vec<Rational> = ks.iter().map(|k| int(k + k % 2)).collect();
        assert!(matches!(fit_k_expansion(&ks, &vals, 1, 2), Err(Error::NotQuasiPolynomial { k: 3 })));
    }
}
