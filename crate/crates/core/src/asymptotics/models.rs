//! The standard toric models.

use super::ThetaModel;
use crate::algebra::rational::{self, int, Rational};
use crate::characters::{convolve_multiplicities, lattice_indicator, p1p1_multiplicity, toric_multiplicity, MultiplicityFunction, SupportBound};
use crate::dh::{dh_box, dh_convolve, dh_delzant, dh_halfline, dh_interval, dh_p1p1, dh_vertex_cone, FaceDistribution};
use crate::error::{Error, Result};
use crate::partition::{d_series, kostant_count, VectorList};
use crate::polytope::{LatticePolytope, VertexCone};

/// Lattice points of `kP` with `d = dim P`.
pub fn polytope_model(p: &LatticePolytope) -> Result<ThetaModel> {
    let m = toric_multiplicity(p);
    let q = p.clone();
    let cuboid = p.as_cuboid();
    let dh = move |n: u32| match &cuboid {
        Some((lo, hi)) => Ok(dh_box(lo, hi, n)),
        None => dh_delzant(&q, n),
    };
    Ok(ThetaModel::new("polytope", m, p.dim() as i64, Some(p.clone()), dh))
}

/// The diagonal circle action on P1 x P1 in its one-dimensional moment
/// coordinate, with `d = 2`.
pub fn p1p1_model() -> ThetaModel {
    let image = LatticePolytope::interval(int(-2), int(2)).expect("valid interval");
    ThetaModel::new("p1p1", p1p1_multiplicity(), 2, Some(image), dh_p1p1)
}

fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Convolution of the lattice indicators of intervals `[a_i, b_i]`; one unit
/// of `d` per factor.
pub fn convolution_model(intervals: &[(Rational, Rational)]) -> Result<ThetaModel> {
    if intervals.is_empty() {
        return Err(Error::Invalid("convolution model needs at least one interval".into()));
    }
    let mut m: Option<MultiplicityFunction> = None;
    for (a, b) in intervals {
        let f = lattice_indicator(&LatticePolytope::interval(a.clone(), b.clone())?);
        m = Some(match m {
            None => f,
            Some(acc) => convolve_multiplicities(&acc, &f)?,
        });
    }
    let lo: Rational = intervals.iter().map(|(a, _)| a.clone()).sum();
    let hi: Rational = intervals.iter().map(|(_, b)| b.clone()).sum();
    let ivs = intervals.to_vec();
    let dh = move |n: u32| -> Result<FaceDistribution> {
        let mut total = FaceDistribution::zero(1);
        for parts in compositions(n, ivs.len()) {
            let mut acc: Option<FaceDistribution> = None;
            for ((a, b), &ni) in ivs.iter().zip(&parts) {
                let f = dh_interval(a.clone(), b.clone(), ni);
                acc = Some(match acc {
                    None => f,
                    Some(x) => dh_convolve(&x, &f)?,
                });
            }
            total = total.add(&acc.expect("at least one factor"));
        }
        Ok(total.simplify())
    };
    let mut model = ThetaModel::new("convolution", m.expect("nonempty"), intervals.len() as i64, LatticePolytope::interval(lo, hi).ok(), dh);
    model.multiplicity.name = format!("convolution of {} intervals", intervals.len());
    Ok(model)
}

/// `m = 1` on `j >= k a` (direction `+1`) or `j <= k a` (direction `-1`), `d = 1`.
pub fn halfline_model(a: Rational, direction: i64) -> Result<ThetaModel> {
    if direction != 1 && direction != -1 {
        return Err(Error::Invalid("direction must be +1 or -1".into()));
    }
    let p = LatticePolytope::from_halfspaces(1, vec![(vec![-direction], -&a * int(direction))])?;
    let m = lattice_indicator(&p);
    Ok(ThetaModel::new("halfline", m, 1, Some(p), move |n| Ok(dh_halfline(a.clone(), direction, n))))
}

/// Lattice points of `k v + cone(generators)` for a unimodular cone, `d = g`.
pub fn cone_model(vertex: Vec<Rational>, generators: Vec<Vec<i64>>) -> Result<ThetaModel> {
    let g = vertex.len();
    if generators.len() != g || generators.iter().any(|v| v.len() != g) {
        return Err(Error::DimensionMismatch { expected: g, got: generators.len() });
    }
    let cone = VertexCone::new(vertex.clone(), generators.clone());
    if !cone.is_unimodular() {
        return Err(Error::NotUnimodular(format!("generators {generators:?} have |det| = {}", cone.abs_det())));
    }
    // facet normals are the rows of the inverse generator matrix
    let gt: Vec<Vec<Rational>> = (0..g).map(|r| (0..g).map(|c| int(generators[r][c])).collect()).collect();
    let mut halfspaces = Vec::new();
    for i in 0..g {
        let e: Vec<Rational> = (0..g).map(|k| int(i64::from(k == i))).collect();
        let row = rational::solve(&gt, &e).ok_or_else(|| Error::Invalid("generators are dependent".into()))?;
        let normal: Vec<i64> = row.iter().map(|x| -rational::floor_i64(x)).collect();
        let offset = rational::dot_ir(&normal, &vertex);
        halfspaces.push((normal, offset));
    }
    let p = LatticePolytope::from_halfspaces(g, halfspaces)?;
    let m = lattice_indicator(&p);
    let open = vec![false; g];
    Ok(ThetaModel::new("cone", m, g as i64, Some(p), move |n| dh_vertex_cone(&cone, &open, n)))
}

/// `m(lambda, k) = K(lambda)` for a unimodular list; `d = |list|`, `DH_n = D_n`.
pub fn partition_model(list: &VectorList) -> ThetaModel {
    let l = list.clone();
    let m = MultiplicityFunction::new(
        list.rank(),
        "Kostant partition function",
        move |lambda: &[i64], _k| kostant_count(&l, lambda).map(|c| c as i64).unwrap_or(0),
        |_k| SupportBound::Unbounded("partition functions have conical support".into()),
    );
    let l = list.clone();
    ThetaModel::new("partition", m, list.len() as i64, None, move |n| Ok(d_series(&l, n)?.swap_remove(n as usize)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::algebra::poly::ambient_vars;
    use crate::asymptotics::verify_exact;

    #[test]
    fn convolution_of_two_intervals_is_p1p1() {
        let c = convolution_model(&[(int(-2), int(0)), (int(0), int(2))]).unwrap();
        for k in 1..4 {
            for j in -2 * k - 2..=2 * k + 2 {
                assert_eq!(c.multiplicity.eval(&[j], k), p1p1_multiplicity().eval(&[j], k));
            }
        }
        for n in 0..4 {
            assert_eq!(c.dh(n).unwrap(), dh_p1p1(n).unwrap());
        }
    }

    #[test]
    fn quadrant_cone_counts() {
        let q = cone_model(vec![int(1), int(0)], vec![vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(q.multiplicity.eval(&[2, 1], 1), 1);
        assert_eq!(q.multiplicity.eval(&[1, 1], 1), 0);
        assert_eq!(q.multiplicity.eval(&[3, 1], 2), 1);
        assert_eq!(q.multiplicity.eval(&[2, -1], 1), 0);
    }

    #[test]
    fn convolution_model_exact() {
        let c = convolution_model(&[(int(0), int(1)), (int(0), int(2)), (int(-1), int(0))]).unwrap();
        let p = parse_poly("x^2 + x", &ambient_vars(1)).unwrap();
        assert!(verify_exact(&c, &p, &[1, 2, 3, 4, 5]).unwrap().passed());
    }
}
