//! Face lattice (as vertex sets) and hull-to-facet conversion.

use std::collections::BTreeSet;

use num_traits::Signed;
use serde_json::{json, Value};

use super::{affine_dim, combinations, null_vector, LatticePolytope};
use crate::algebra::rational::{self, int, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Constraints tight on the whole face.
    pub active_constraints: Vec<usize>,
    pub dim: usize,
    /// Indices into `vertices_of`.
    pub vertex_indices: Vec<usize>,
    pub vertices: Vec<Vec<Rational>>,
    /// Primitive integer directions spanning the face.
    pub affine_basis: Vec<Vec<i64>>,
}

impl Face {
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "active_constraints": self.active_constraints,
            "vertices": self.vertices.iter().map(|v| v.iter().map(rational::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "affine_basis": self.affine_basis,
        })
    }
}

/// All nonempty faces including `P` itself, sorted by decreasing dimension.
pub fn faces(p: &LatticePolytope) -> Result<Vec<Face>> {
    let verts = p.vertices_of()?;
    let g = p.dim();
    let tight: Vec<Vec<usize>> = verts.iter().map(|v| p.tight(v)).collect();
    let all: BTreeSet<usize> = (0..verts.len()).collect();
    let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    sets.insert(all);
    for j in 0..p.halfspaces().len() {
        let s: BTreeSet<usize> = (0..verts.len()).filter(|&i| tight[i].contains(&j)).collect();
        let pts: Vec<Vec<Rational>> = s.iter().map(|&i| verts[i].clone()).collect();
        if !s.is_empty() && affine_dim(&pts) + 1 == g {
            sets.insert(s);
        }
    }
    loop {
        let current: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
        let mut grew = false;
        for a in 0..current.len() {
            for b in a + 1..current.len() {
                let i: BTreeSet<usize> = current[a].intersection(&current[b]).copied().collect();
                if !i.is_empty() && sets.insert(i) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<Face> = sets
        .into_iter()
        .map(|s| {
            let idx: Vec<usize> = s.into_iter().collect();
            let pts: Vec<Vec<Rational>> = idx.iter().map(|&i| verts[i].clone()).collect();
            let active: Vec<usize> = (0..p.halfspaces().len()).filter(|j| idx.iter().all(|&i| tight[i].contains(j))).collect();
            let mut basis: Vec<Vec<i64>> = Vec::new();
            for q in &pts[1..] {
                let d: Vec<Rational> = q.iter().zip(&pts[0]).map(|(a, b)| a - b).collect();
                let mut trial: Vec<Vec<Rational>> = basis.iter().map(|b| b.iter().map(|&x| int(x)).collect()).collect();
                trial.push(d.clone());
                if rational::rank(&trial) > basis.len() {
                    basis.push(rational::primitive_from_rational(&d));
                }
            }
            Face { active_constraints: active, dim: affine_dim(&pts), vertex_indices: idx, vertices: pts, affine_basis: basis }
        })
        .collect();
    out.sort_by(|a, b| b.dim.cmp(&a.dim).then(a.vertex_indices.cmp(&b.vertex_indices)));
    Ok(out)
}

/// `sum_F (-1)^{dim F}` over all nonempty faces including `P`.
pub fn euler_characteristic(faces: &[Face]) -> i64 {
    faces.iter().map(|f| if f.dim % 2 == 0 { 1 } else { -1 }).sum()
}

/// Facet inequalities of the convex hull of full-dimensional `points`.
pub(crate) fn hull_facets(points: &[Vec<Rational>], dim: usize) -> Result<Vec<(Vec<i64>, Rational)>> {
    let found = affine_dim(points);
    if found < dim {
        return Err(Error::Degenerate { found, ambient: dim });
    }
    let mut out: Vec<(Vec<i64>, Rational)> = Vec::new();
    for subset in combinations(points.len(), dim) {
        let base = &points[subset[0]];
        let diffs: Vec<Vec<Rational>> = subset[1..].iter().map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        let normal = if dim == 1 {
            Some(vec![int(1)])
        } else {
            null_vector(&diffs, dim)
        };
        let Some(normal) = normal else { continue };
        let u = rational::primitive_from_rational(&normal);
        let c = rational::dot_ir(&u, base);
        let side: Vec<Rational> = points.iter().map(|p| rational::dot_ir(&u, p) - &c).collect();
        let facet = if side.iter().all(|s| !s.is_positive()) {
            (u, c)
        } else if side.iter().all(|s| !s.is_negative()) {
            (u.iter().map(|x| -x).collect(), -c)
        } else {
            continue;
        };
        if !out.contains(&facet) {
            out.push(facet);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(fs: &[Face], g: usize) -> Vec<usize> {
        (0..=g).map(|d| fs.iter().filter(|f| f.dim == d).count()).collect()
    }

    #[test]
    fn square_and_cube() {
        let fs = faces(&LatticePolytope::unit_cube(2)).unwrap();
        assert_eq!(counts(&fs, 2), vec![4, 4, 1]);
        assert_eq!(euler_characteristic(&fs), 1);
        let fs = faces(&LatticePolytope::unit_cube(3)).unwrap();
        assert_eq!(counts(&fs, 3), vec![8, 12, 6, 1]);
        assert_eq!(euler_characteristic(&fs), 1);
    }

    #[test]
    fn simplex_faces() {
        let fs = faces(&LatticePolytope::standard_simplex(3)).unwrap();
        assert_eq!(counts(&fs, 3), vec![4, 6, 4, 1]);
        for f in &fs {
            assert_eq!(f.affine_basis.len(), f.dim);
            let rows: Vec<Vec<Rational>> = f
                .active_constraints
                .iter()
                .map(|&j| LatticePolytope::standard_simplex(3).halfspaces()[j].normal.iter().map(|&x| int(x)).collect())
                .collect();
            assert_eq!(f.dim, 3 - rational::rank(&rows));
        }
    }

    #[test]
    fn segment_faces() {
        let seg = LatticePolytope::interval(int(-2), int(0)).unwrap();
        let fs = faces(&seg).unwrap();
        assert_eq!(counts(&fs, 1), vec![2, 1]);
        assert_eq!(euler_characteristic(&fs), 1);
    }
}
