//! Kostant partition functions of unimodular vector lists, the distributions
//! `D_n` of `prod_alpha 1/(1 - e^{q <alpha, X>})`, and the piecewise
//! polynomial `T = sum_n D_n` on the chambers of the list.

mod chambers;
mod spline;

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::rational::{self, int, Rational};
use crate::dh::TestFunction;
use crate::error::{Error, Result};

pub use chambers::{continuity_check, continuity_values, t_piecewise, Chamber, ChamberComplex};
pub use spline::{cone_spline, d_series};

/// A pointed list of nonzero integer vectors spanning `Z^g` in which every
/// basis has determinant `+-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorList {
    vectors: Vec<Vec<i64>>,
    rank: usize,
    witness: Vec<Rational>,
}

impl VectorList {
    pub fn new(vectors: Vec<Vec<i64>>) -> Result<Self> {
        let rank = vectors.first().map(Vec::len).ok_or_else(|| Error::Invalid("empty vector list".into()))?;
        if rank == 0 || rank > 2 {
            return Err(Error::Unsupported(format!("vector lists of rank {rank}; ranks 1 and 2 are supported")));
        }
        for v in &vectors {
            if v.len() != rank {
                return Err(Error::DimensionMismatch { expected: rank, got: v.len() });
            }
            if v.iter().all(|&x| x == 0) {
                return Err(Error::Invalid("zero vector in list".into()));
            }
        }
        let rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
        if rational::rank(&rows) != rank {
            return Err(Error::Degenerate { found: rational::rank(&rows), ambient: rank });
        }
        for idx in crate::polytope::combinations(vectors.len(), rank) {
            let cols: Vec<Vec<i64>> = idx.iter().map(|&i| vectors[i].clone()).collect();
            let d = rational::det_i64(&cols);
            if d != 0 && d.abs() != 1 {
                return Err(Error::NotUnimodular(format!("basis {cols:?} has determinant {d}")));
            }
        }
        let witness = pointed_witness(&vectors).ok_or(Error::NotPointed)?;
        Ok(VectorList { vectors, rank, witness })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Invalid("vector list must be a JSON array".into()))?;
        let vectors = arr
            .iter()
            .map(|x| match x {
                Value::Number(_) => x.as_i64().map(|n| vec![n]).ok_or_else(|| Error::Invalid("integer expected".into())),
                _ => crate::polytope::parse_ivec(x),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `gamma` with `<alpha, gamma> > 0` for every vector.
    pub fn witness(&self) -> &[Rational] {
        &self.witness
    }

    /// The distinct vectors with their multiplicities, in input order.
    pub fn distinct(&self) -> Vec<(Vec<i64>, u32)> {
        let mut out: Vec<(Vec<i64>, u32)> = Vec::new();
        for v in &self.vectors {
            match out.iter_mut().find(|(w, _)| w == v) {
                Some((_, m)) => *m += 1,
                None => out.push((v.clone(), 1)),
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!(self.vectors)
    }
}

fn pointed_witness(vectors: &[Vec<i64>]) -> Option<Vec<Rational>> {
    let dot = |a: &[i64], g: &[Rational]| rational::dot_ir(a, g);
    if vectors[0].len() == 1 {
        let s = vectors[0][0].signum();
        return vectors.iter().all(|v| v[0].signum() == s).then(|| vec![int(s)]);
    }
    // a supporting normal through an extreme vector, tilted towards it
    for a in vectors {
        for sign in [1, -1] {
            let g0 = vec![int(-a[1] * sign), int(a[0] * sign)];
            let vals: Vec<Rational> = vectors.iter().map(|v| dot(v, &g0)).collect();
            if vals.iter().any(|x| x.is_negative()) {
                continue;
            }
            if vectors.iter().zip(&vals).any(|(v, x)| x.is_zero() && v[0] * a[0] + v[1] * a[1] <= 0) {
                continue;
            }
            let min_pos = vals.iter().filter(|x| x.is_positive()).min().cloned().unwrap_or_else(|| int(1));
            let spread: i64 = vectors.iter().map(|v| (v[0] * a[0] + v[1] * a[1]).abs()).sum();
            let delta = min_pos / int(1 + spread);
            let g = vec![&g0[0] + &delta * int(a[0]), &g0[1] + &delta * int(a[1])];
            if vectors.iter().all(|v| dot(v, &g).is_positive()) {
                return Some(g);
            }
        }
    }
    None
}

/// Memoized Kostant counts for one vector list.
pub struct KostantTable<'a> {
    list: &'a VectorList,
    /// Integer multiple of the witness and its values on the vectors.
    gamma: Vec<i64>,
    heights: Vec<i64>,
    memo: HashMap<(usize, Vec<i64>), u64>,
}

impl<'a> KostantTable<'a> {
    pub fn new(list: &'a VectorList) -> Self {
        let den = list.witness.iter().fold(num_bigint::BigInt::from(1), |acc, r| num_integer::Integer::lcm(&acc, r.denom()));
        let gamma: Vec<i64> = list
            .witness
            .iter()
            .map(|r| i64::try_from(r.numer() * (&den / r.denom())).expect("witness fits in i64"))
            .collect();
        let heights = list.vectors.iter().map(|v| v.iter().zip(&gamma).map(|(a, b)| a * b).sum()).collect();
        KostantTable { list, gamma, heights, memo: HashMap::new() }
    }

    /// Number of ways to write `lambda` as a nonnegative integer combination.
    pub fn count(&mut self, lambda: &[i64]) -> u64 {
        self.count_from(0, lambda.to_vec())
    }

    fn count_from(&mut self, i: usize, lambda: Vec<i64>) -> u64 {
        let vs = &self.list.vectors;
        let height: i64 = lambda.iter().zip(&self.gamma).map(|(a, b)| a * b).sum();
        if height < 0 {
            return 0;
        }
        let steps = height / self.heights[i];
        if i + 1 == vs.len() {
            let hit = height % self.heights[i] == 0 && lambda.iter().zip(&vs[i]).all(|(l, a)| *l == steps * a);
            return u64::from(hit);
        }
        if let Some(&c) = self.memo.get(&(i, lambda.clone())) {
            return c;
        }
        let alpha = vs[i].clone();
        let mut total = 0u64;
        for n in 0..=steps {
            let rest: Vec<i64> = lambda.iter().zip(&alpha).map(|(l, a)| l - n * a).collect();
            total += self.count_from(i + 1, rest);
        }
        self.memo.insert((i, lambda), total);
        total
    }
}

/// `(k^{-|list|} sum_lambda K(lambda) f(lambda / k), <D_0, f>)` for a compactly
/// supported `f`; the two agree as `k -> infinity`.
pub fn d0_bridge(list: &VectorList, f: &TestFunction, k: i64) -> Result<(f64, f64)> {
    let (lo, hi) = f.support_box().ok_or_else(|| Error::InfiniteSupport("test function needs a compact support box".into()))?;
    if lo.len() != list.rank {
        return Err(Error::DimensionMismatch { expected: list.rank, got: lo.len() });
    }
    let kf = k as f64;
    let lo_i: Vec<i64> = lo.iter().map(|x| (x * kf).ceil() as i64).collect();
    let hi_i: Vec<i64> = hi.iter().map(|x| (x * kf).floor() as i64).collect();
    let mut table = KostantTable::new(list);
    let mut sum = 0.0;
    crate::characters::for_each_in_box(&lo_i, &hi_i, &mut |lambda| {
        let c = table.count(lambda);
        if c > 0 {
            let x: Vec<f64> = lambda.iter().map(|&l| l as f64 / kf).collect();
            sum += c as f64 * f.eval_f64(&x);
        }
        Ok(())
    })?;
    let lattice = sum / kf.powi(list.len() as i32);
    let d0 = d_series(list, 0)?.remove(0);
    Ok((lattice, d0.pair(f)?.to_f64()))
}

pub fn kostant_count(list: &VectorList, lambda: &[i64]) -> Result<u64> {
    if lambda.len() != list.rank {
        return Err(Error::DimensionMismatch { expected: list.rank, got: lambda.len() });
    }
    Ok(KostantTable::new(list).count(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> VectorList {
        VectorList::new(vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn counts() {
        let one = VectorList::new(vec![vec![1]]).unwrap();
        assert_eq!(kostant_count(&one, &[5]).unwrap(), 1);
        assert_eq!(kostant_count(&one, &[-1]).unwrap(), 0);
        assert_eq!(kostant_count(&a2(), &[3, 2]).unwrap(), 3);
        assert_eq!(kostant_count(&a2(), &[2, 2]).unwrap(), 3);
        assert_eq!(kostant_count(&a2(), &[3, 1]).unwrap(), 2);
        let quad = VectorList::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(kostant_count(&quad, &[-1, 0]).unwrap(), 0);
        let twice = VectorList::new(vec![vec![1], vec![1]]).unwrap();
        assert_eq!(kostant_count(&twice, &[4]).unwrap(), 5);
    }

    #[test]
    fn order_independent() {
        let a = VectorList::new(vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 1]]).unwrap();
        let b = VectorList::new(vec![vec![1, 1], vec![0, 1], vec![1, 1], vec![1, 0]]).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(kostant_count(&a, &[x, y]).unwrap(), kostant_count(&b, &[x, y]).unwrap());
            }
        }
    }

    #[test]
    fn leading_term_matches_scaled_counts() {
        // the first correction is <D_1, f> / k, small relative to <D_0, f> away from the walls
        use crate::dh::ProductBump;
        use std::sync::Arc;
        let f = TestFunction::Numeric(Arc::new(ProductBump::new(vec![4.0, 3.0], vec![1.0, 1.0])));
        let (lattice, d0) = d0_bridge(&a2(), &f, 64).unwrap();
        assert!(((lattice - d0) / d0).abs() < 0.01, "{lattice} vs {d0}");
        let twice = VectorList::new(vec![vec![1], vec![1]]).unwrap();
        let g = TestFunction::Numeric(Arc::new(ProductBump::new(vec![3.0], vec![1.0])));
        let (lattice, d0) = d0_bridge(&twice, &g, 64).unwrap();
        assert!(((lattice - d0) / d0).abs() < 0.01, "{lattice} vs {d0}");
    }

    #[test]
    fn rejects_bad_lists() {
        assert!(matches!(VectorList::new(vec![vec![1], vec![-1]]), Err(Error::NotPointed)));
        assert!(matches!(VectorList::new(vec![vec![1, 0], vec![1, 2]]), Err(Error::NotUnimodular(_))));
        assert!(matches!(VectorList::new(vec![vec![1, 0], vec![2, 0]]), Err(Error::Degenerate { .. })));
        assert!(matches!(VectorList::new(vec![vec![1, 0], vec![0, 1], vec![-1, 0]]), Err(Error::NotPointed)));
        let l = VectorList::new(vec![vec![1, -1], vec![0, 1], vec![1, 0]]).unwrap();
        for v in l.vectors() {
            assert!(rational::dot_ir(v, l.witness()).is_positive());
        }
    }
}
