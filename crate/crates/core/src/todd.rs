//! Graded Todd expansions.
//!
//! One variable: `y/(1 - e^{-y}) = sum t_n y^n`. Torus weights `a_i`: the
//! product `prod_i y_i/(1 - e^{-y_i})` with `y_i = <a_i, X>`, split by degree.
//! Matrices: the degree-`n` part `B_n(A)` of `det(A/(e^A - 1))` written in the
//! power sums `p_m = tr(A^m)`.
//!
//! The two conventions differ by `A -> -A`: for `A = -diag(y_i)` one has
//! `B_n(A) = Todd_n(y)`, so `B_n(diag(y)) = (-1)^n Todd_n(y)`.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::rational::{self, factorial, int, Rational};
use crate::algebra::{bernoulli_table, MultiPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ToddSeries1D {
    pub coefficients: Vec<Rational>,
}

impl ToddSeries1D {
    pub fn coeff(&self, n: usize) -> Rational {
        self.coefficients.get(n).cloned().unwrap_or_else(Rational::zero)
    }
}

/// `t_n = (-1)^n B_n / n!` for `n = 0..=order`.
pub fn todd_1d(order: usize) -> ToddSeries1D {
    let b = bernoulli_table(order);
    let coefficients = b
        .iter()
        .enumerate()
        .map(|(n, bn)| {
            let s = if n % 2 == 1 { -bn.clone() } else { bn.clone() };
            s / Rational::from_integer(factorial(n as u32))
        })
        .collect();
    ToddSeries1D { coefficients }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedToddDiagonal {
    pub weights: Vec<Vec<i64>>,
    /// `components[n]` is homogeneous of degree `n` in `X`.
    pub components: Vec<MultiPoly>,
}

impl GradedToddDiagonal {
    pub fn component(&self, n: usize) -> &MultiPoly {
        &self.components[n]
    }

    /// Graded (Cauchy) product, as for the concatenation of weight lists.
    pub fn graded_product(&self, other: &Self) -> Self {
        let n_max = self.components.len().min(other.components.len());
        let components = (0..n_max)
            .map(|n| {
                (0..=n).fold(MultiPoly::zero(self.components[0].vars().to_vec()), |acc, i| {
                    &acc + &(&self.components[i] * &other.components[n - i])
                })
            })
            .collect();
        let mut weights = self.weights.clone();
        weights.extend(other.weights.iter().cloned());
        GradedToddDiagonal { weights, components }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weights": self.weights,
            "components": self.components.iter().enumerate()
                .map(|(n, p)| json!({ "degree": n, "polynomial": p.to_json() }))
                .collect::<Vec<_>>(),
        })
    }
}

/// Expands `prod_i y_i/(1 - e^{-y_i})` through degree `n_max`.
pub fn graded_todd_diagonal(weights: &[Vec<i64>], n_max: usize) -> Result<GradedToddDiagonal> {
    let Some(first) = weights.first() else {
        return Err(Error::Invalid("weights must be nonempty".into()));
    };
    let g = first.len();
    if weights.iter().any(|w| w.len() != g) {
        return Err(Error::Invalid("weights must share one dimension".into()));
    }
    let vars = crate::algebra::ambient_vars(g);
    let t = todd_1d(n_max);
    let mut comps: Vec<MultiPoly> = (0..=n_max)
        .map(|n| if n == 0 { MultiPoly::one(vars.clone()) } else { MultiPoly::zero(vars.clone()) })
        .collect();
    for w in weights {
        let y = MultiPoly::linear(vars.clone(), &w.iter().map(|&a| int(a)).collect::<Vec<_>>(), Rational::zero());
        let mut y_pows = vec![MultiPoly::one(vars.clone())];
        for i in 1..=n_max {
            let next = &y_pows[i - 1] * &y;
            y_pows.push(next);
        }
        let factor: Vec<MultiPoly> = (0..=n_max).map(|n| y_pows[n].scale(&t.coeff(n))).collect();
        comps = (0..=n_max)
            .map(|n| (0..=n).fold(MultiPoly::zero(vars.clone()), |acc, i| &acc + &(&comps[i] * &factor[n - i])))
            .collect();
    }
    Ok(GradedToddDiagonal { weights: weights.to_vec(), components: comps })
}

/// `B_n` as a polynomial in the power-sum symbols `p1, ..., pn`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantToddPolynomial {
    pub n: usize,
    pub expression: MultiPoly,
}

fn power_sum_vars(n: usize) -> Vec<String> {
    (1..=n.max(1)).map(|m| format!("p{m}")).collect()
}

fn weighted_degree(e: &[u32]) -> usize {
    e.iter().enumerate().map(|(i, k)| (i + 1) * *k as usize).sum()
}

fn truncate_weighted(p: &MultiPoly, n: usize) -> MultiPoly {
    MultiPoly::from_terms(
        p.vars().to_vec(),
        p.terms().filter(|(m, _)| weighted_degree(&m.0) <= n).map(|(m, c)| (m.0.clone(), c.clone())),
    )
}

/// `B_n(A)` from `det(A/(e^A - 1)) = exp(-p1/2 - sum_{m>=2} B_m p_m / (m m!))`.
pub fn graded_todd_matrix(n: usize, dim: usize) -> Result<InvariantToddPolynomial> {
    if n > 6 || dim > 4 || dim == 0 {
        return Err(Error::Unsupported(format!("graded_todd_matrix limited to n <= 6, 1 <= dim <= 4 (got n={n}, dim={dim})")));
    }
    let vars = power_sum_vars(n);
    if n == 0 {
        return Ok(InvariantToddPolynomial { n, expression: MultiPoly::one(vars) });
    }
    let b = bernoulli_table(n);
    // s = -tr log((e^A - 1)/A)
    let mut s = MultiPoly::var(vars.clone(), 0).scale(&rational::rat(-1, 2));
    for m in 2..=n {
        let c = -&b[m] / (int(m as i64) * Rational::from_integer(factorial(m as u32)));
        s = &s + &MultiPoly::var(vars.clone(), m - 1).scale(&c);
    }
    let mut total = MultiPoly::one(vars.clone());
    let mut pw = MultiPoly::one(vars.clone());
    for j in 1..=n {
        pw = truncate_weighted(&(&pw * &s), n);
        total = &total + &pw.scale(&Rational::from_integer(factorial(j as u32)).recip());
    }
    let expression = MultiPoly::from_terms(
        vars.clone(),
        total.terms().filter(|(m, _)| weighted_degree(&m.0) == n).map(|(m, c)| (m.0.clone(), c.clone())),
    );
    Ok(InvariantToddPolynomial { n, expression })
}

impl InvariantToddPolynomial {
    /// Substitutes given power sums `p_1..p_n` (any coefficient polynomials).
    pub fn evaluate_power_sums(&self, p: &[MultiPoly]) -> MultiPoly {
        self.expression.compose(&p[..self.expression.nvars()])
    }

    /// Value at a rational square matrix.
    pub fn evaluate_matrix(&self, a: &[Vec<Rational>]) -> Rational {
        let d = a.len();
        let mut pw: Vec<Vec<Rational>> = (0..d).map(|i| (0..d).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect();
        let mut sums = Vec::new();
        for _ in 0..self.expression.nvars() {
            pw = matmul(&pw, a);
            sums.push((0..d).map(|i| pw[i][i].clone()).sum::<Rational>());
        }
        self.expression.eval(&sums)
    }
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

/// Power sums `sum_i (s <a_i, X>)^m` for `m = 1..=n`, as polynomials in `X`.
pub fn diagonal_power_sums(weights: &[Vec<i64>], n: usize, sign: i64) -> Vec<MultiPoly> {
    let g = weights[0].len();
    let vars = crate::algebra::ambient_vars(g);
    (1..=n.max(1))
        .map(|m| {
            weights.iter().fold(MultiPoly::zero(vars.clone()), |acc, w| {
                let y = MultiPoly::linear(vars.clone(), &w.iter().map(|&a| int(sign * a)).collect::<Vec<_>>(), Rational::zero());
                &acc + &y.pow(m as u32)
            })
        })
        .collect()
}

/// `sum_{n<=N} Todd_n(X0)` in floating point, for convergence checks.
pub fn partial_sum_f64(todd: &GradedToddDiagonal, x0: &[f64], n: usize) -> f64 {
    todd.components.iter().take(n + 1).map(|c| c.eval_f64(x0)).sum()
}

pub fn exact_product_f64(weights: &[Vec<i64>], x0: &[f64]) -> f64 {
    weights
        .iter()
        .map(|w| {
            let y: f64 = w.iter().zip(x0).map(|(a, x)| *a as f64 * x).sum();
            if y.abs() < 1e-300 {
                1.0
            } else {
                y / (1.0 - (-y).exp())
            }
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::algebra::{ambient_vars, parse_poly};

    #[test]
    fn one_dimensional_coefficients() {
        assert_eq!(todd_1d(0).coefficients, vec![int(1)]);
        let t = todd_1d(8);
        assert_eq!(t.coeff(1), rat(1, 2));
        assert_eq!(t.coeff(2), rat(1, 12));
        assert_eq!(t.coeff(4), rat(-1, 720));
        for m in 1..4 {
            assert!(t.coeff(2 * m + 1).is_zero());
        }
    }

    #[test]
    fn diagonal_examples() {
        let v1 = vec!["x".to_string()];
        let d = graded_todd_diagonal(&[vec![1]], 2).unwrap();
        assert_eq!(d.components, vec![
            parse_poly("1", &v1).unwrap(),
            parse_poly("1/2*x", &v1).unwrap(),
            parse_poly("1/12*x^2", &v1).unwrap(),
        ]);
        let dd = graded_todd_diagonal(&[vec![1], vec![1]], 3).unwrap();
        assert_eq!(dd.components[1], parse_poly("x", &v1).unwrap());
        for (n, c) in dd.components.iter().enumerate() {
            assert!(c.is_homogeneous(n as u32));
        }
        let w = graded_todd_diagonal(&[vec![1, 2], vec![-3, 1], vec![0, 1]], 4).unwrap();
        assert_eq!(w.components[0], MultiPoly::one(ambient_vars(2)));
    }

    #[test]
    fn matrix_examples() {
        let v = power_sum_vars(2);
        assert_eq!(graded_todd_matrix(1, 2).unwrap().expression, parse_poly("-1/2*p1", &power_sum_vars(1)).unwrap());
        assert_eq!(graded_todd_matrix(2, 2).unwrap().expression, parse_poly("1/8*p1^2 - 1/24*p2", &v).unwrap());
        assert_eq!(graded_todd_matrix(0, 1).unwrap().expression, MultiPoly::one(power_sum_vars(0)));
        assert!(graded_todd_matrix(7, 2).is_err());
    }

    #[test]
    fn matrix_invariance_on_triangular() {
        // upper-triangular with diagonal (1/2, -1/3, 2): same value as the diagonal
        let tri = vec![
            vec![rat(1, 2), int(5), int(-7)],
            vec![int(0), rat(-1, 3), int(4)],
            vec![int(0), int(0), int(2)],
        ];
        let diag = vec![
            vec![rat(1, 2), int(0), int(0)],
            vec![int(0), rat(-1, 3), int(0)],
            vec![int(0), int(0), int(2)],
        ];
        for n in 0..=6 {
            let b = graded_todd_matrix(n, 3).unwrap();
            assert_eq!(b.evaluate_matrix(&tri), b.evaluate_matrix(&diag), "n={n}");
        }
    }

    #[test]
    fn multiplicativity() {
        let a = vec![vec![1, 0], vec![1, 1]];
        let b = vec![vec![0, 1], vec![2, -1]];
        let ta = graded_todd_diagonal(&a, 5).unwrap();
        let tb = graded_todd_diagonal(&b, 5).unwrap();
        let mut ab = a.clone();
        ab.extend(b.clone());
        assert_eq!(ta.graded_product(&tb).components, graded_todd_diagonal(&ab, 5).unwrap().components);
    }

    #[test]
    fn numeric_convergence() {
        let w = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let t = graded_todd_diagonal(&w, 10).unwrap();
        let x0 = [0.3, -0.2];
        let exact = exact_product_f64(&w, &x0);
        let errs: Vec<f64> = [2, 4, 6, 8, 10].iter().map(|&n| (partial_sum_f64(&t, &x0, n) - exact).abs()).collect();
        for pair in errs.windows(2) {
            assert!(pair[1] < pair[0], "{errs:?}");
        }
        assert!(errs[4] < 1e-9);
    }
}

