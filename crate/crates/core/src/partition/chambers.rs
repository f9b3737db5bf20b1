//! Chambers of a vector list and the polynomial pieces of `T = sum_n D_n`.

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::{kostant_count, spline::d_series, VectorList};
use crate::algebra::linear_combo::normalize_form;
use crate::algebra::poly::{ambient_vars, MultiPoly};
use crate::algebra::rational::{self, int, Rational};
use crate::dh::{DhTerm, Extent};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Chamber {
    /// An interior lattice point.
    pub representative: Vec<i64>,
    /// Bounding rays (counterclockwise) for rank 2.
    pub rays: Option<(Vec<i64>, Vec<i64>)>,
    /// The polynomial of `D_n` on the chamber, `n = 0..=n_max`.
    pub polynomials: Vec<MultiPoly>,
    pub total: MultiPoly,
}

#[derive(Clone, Debug)]
pub struct ChamberComplex {
    pub rank: usize,
    /// Primitive spanning vectors of the walls (`[1]` for the origin in rank 1).
    pub walls: Vec<Vec<i64>>,
    pub chambers: Vec<Chamber>,
}

impl ChamberComplex {
    fn sign_vector(&self, p: &[i64]) -> Vec<i64> {
        match self.rank {
            1 => vec![p[0].signum()],
            _ => self.walls.iter().map(|w| (p[0] * w[1] - p[1] * w[0]).signum()).collect(),
        }
    }

    /// Chamber containing `lambda + t eps` for all small `t > 0`.
    pub fn locate_limit(&self, lambda: &[i64], eps: &[Rational]) -> Result<&Chamber> {
        let mut signs = Vec::new();
        let walls: Vec<Vec<i64>> = if self.rank == 1 { vec![vec![1]] } else { self.walls.clone() };
        for w in &walls {
            let (on_l, on_e) = if self.rank == 1 {
                (int(lambda[0]), eps[0].clone())
            } else {
                (int(lambda[0] * w[1] - lambda[1] * w[0]), &eps[0] * int(w[1]) - &eps[1] * int(w[0]))
            };
            let s = if !on_l.is_zero() { rational::sign(&on_l) } else { rational::sign(&on_e) };
            if s == 0 {
                return Err(Error::NonGenericDirection);
            }
            signs.push(i64::from(s));
        }
        self.chambers
            .iter()
            .find(|c| self.sign_vector(&c.representative) == signs)
            .ok_or_else(|| Error::Invalid("no chamber matches the limit direction".into()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "walls": self.walls,
            "chambers": self.chambers.iter().map(|c| json!({
                "representative": c.representative,
                "rays": c.rays.as_ref().map(|(a, b)| json!([a, b])),
                "d_n": c.polynomials.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "total": c.total.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Whether `p` lies in the relative interior of a full-dimensional term.
fn interior(t: &DhTerm, p: &[i64]) -> bool {
    let g = t.dim();
    if t.edges.len() != g {
        return false;
    }
    let a: Vec<Vec<Rational>> = (0..g).map(|i| t.edges.iter().map(|e| int(e.direction[i])).collect()).collect();
    let rhs: Vec<Rational> = p.iter().zip(&t.apex).map(|(x, a)| int(*x) - a).collect();
    let Some(coords) = rational::solve(&a, &rhs) else { return false };
    coords.iter().zip(&t.edges).all(|(c, e)| {
        c.is_positive()
            && match &e.extent {
                Extent::Bounded(l) => c < l,
                _ => true,
            }
    })
}

/// Chamber polynomials of `D_0..D_{n_max}`: on an open chamber each term acts
/// as the function `(-1)^r D(density)`.
pub fn t_piecewise(list: &VectorList, n_max: u32) -> Result<ChamberComplex> {
    let g = list.rank();
    let vars = ambient_vars(g);
    let ds = d_series(list, n_max)?;
    let (walls, frames): (Vec<Vec<i64>>, Vec<(Vec<i64>, Option<(Vec<i64>, Vec<i64>)>)>) = if g == 1 {
        (vec![vec![1]], vec![(vec![-1], None), (vec![1], None)])
    } else {
        let mut walls: Vec<Vec<i64>> = Vec::new();
        for (a, _) in list.distinct() {
            let p = normalize_form(&a).1;
            if !walls.contains(&p) {
                walls.push(p);
            }
        }
        let mut dirs: Vec<Vec<i64>> = walls.iter().flat_map(|w| [w.clone(), w.iter().map(|x| -x).collect()]).collect();
        dirs.sort_by(|a, b| {
            let ta = (a[1] as f64).atan2(a[0] as f64);
            let tb = (b[1] as f64).atan2(b[0] as f64);
            ta.partial_cmp(&tb).unwrap()
        });
        let n = dirs.len();
        let frames = (0..n)
            .map(|i| {
                let (lo, hi) = (dirs[i].clone(), dirs[(i + 1) % n].clone());
                (vec![lo[0] + hi[0], lo[1] + hi[1]], Some((lo, hi)))
            })
            .collect();
        (walls, frames)
    };
    let chambers = frames
        .into_iter()
        .map(|(rep, rays)| {
            let polynomials: Vec<MultiPoly> = ds
                .iter()
                .map(|d| {
                    d.terms.iter().filter(|t| interior(t, &rep)).fold(MultiPoly::zero(vars.clone()), |acc, t| {
                        let sign = if t.derivative_order() % 2 == 0 { int(1) } else { int(-1) };
                        &acc + &t.apply_derivatives(&t.density.with_vars(&vars)).scale(&sign)
                    })
                })
                .collect();
            let total = polynomials.iter().fold(MultiPoly::zero(vars.clone()), |acc, p| &acc + p);
            Chamber { representative: rep, rays, polynomials, total }
        })
        .collect();
    Ok(ChamberComplex { rank: g, walls, chambers })
}

fn strictly_inside(list: &VectorList, eps: &[Rational]) -> bool {
    if list.rank() == 1 {
        return rational::sign(&eps[0]) as i64 == list.vectors()[0][0].signum();
    }
    let mut dirs: Vec<Vec<i64>> = list.distinct().into_iter().map(|(a, _)| a).collect();
    dirs.sort_by(|a, b| (b[0] * a[1] - b[1] * a[0]).cmp(&0));
    let (first, last) = (&dirs[0], &dirs[dirs.len() - 1]);
    let d1 = int(first[0]) * &eps[1] - int(first[1]) * &eps[0];
    let d2 = &eps[0] * int(last[1]) - &eps[1] * int(last[0]);
    d1.is_positive() && d2.is_positive()
}

/// `(K(lambda), lim_{t -> 0+} T(lambda + t eps))`.
pub fn continuity_values(list: &VectorList, lambda: &[i64], eps: &[Rational]) -> Result<(u64, Rational)> {
    let g = list.rank();
    if lambda.len() != g || eps.len() != g {
        return Err(Error::DimensionMismatch { expected: g, got: lambda.len().min(eps.len()) });
    }
    let n_max = (list.len() - g) as u32;
    let complex = t_piecewise(list, n_max)?;
    if g == 2 {
        for w in &complex.walls {
            if (&eps[0] * int(w[1]) - &eps[1] * int(w[0])).is_zero() {
                return Err(Error::NonGenericDirection);
            }
        }
    }
    if !strictly_inside(list, eps) {
        return Err(Error::Invalid("limit direction must point into the cone of the list".into()));
    }
    let chamber = complex.locate_limit(lambda, eps)?;
    let point: Vec<Rational> = lambda.iter().map(|&x| int(x)).collect();
    Ok((kostant_count(list, lambda)?, chamber.total.eval(&point)))
}

pub fn continuity_check(list: &VectorList, lambda: &[i64], eps: &[Rational]) -> Result<bool> {
    let (k, t) = continuity_values(list, lambda, eps)?;
    Ok(int(k as i64) == t)
}
