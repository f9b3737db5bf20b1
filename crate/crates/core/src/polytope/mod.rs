//! Rational polytopes in H-representation with lattice-aware operations:
//! vertices, Delzant test, dilation, tangent cones, lattice points, faces.

mod enumerate;
mod face;

use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::rational::{self, int, Rational};
use crate::error::{Error, Result};

pub use enumerate::{lattice_points, lattice_points_capped, MAX_LATTICE_POINTS};
pub use face::{euler_characteristic, faces, Face};

/// `<normal, xi> <= offset`, with `normal` primitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: Rational,
}

#[derive(Debug)]
pub struct LatticePolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: OnceLock<Result<Vec<Vec<Rational>>>>,
}

impl Clone for LatticePolytope {
    fn clone(&self) -> Self {
        LatticePolytope { dim: self.dim, halfspaces: self.halfspaces.clone(), vertices: OnceLock::new() }
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.halfspaces == other.halfspaces
    }
}

/// Tangent cone at a vertex: `vertex + cone(generators)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCone {
    pub vertex: Vec<Rational>,
    pub generators: Vec<Vec<i64>>,
}

impl VertexCone {
    pub fn new(vertex: Vec<Rational>, generators: Vec<Vec<i64>>) -> Self {
        VertexCone { vertex, generators }
    }

    pub fn dim(&self) -> usize {
        self.vertex.len()
    }

    /// `|det|` of the generator matrix; 0 unless there are exactly `dim` generators.
    pub fn abs_det(&self) -> i64 {
        if self.generators.len() != self.dim() {
            return 0;
        }
        rational::det_i64(&self.generators).abs()
    }

    pub fn is_unimodular(&self) -> bool {
        self.abs_det() == 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertex": self.vertex.iter().map(rational::to_json).collect::<Vec<_>>(),
            "generators": self.generators,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantVerdict {
    pub is_delzant: bool,
    pub witness: Option<String>,
}

impl LatticePolytope {
    /// Builds `{xi : <u_j, xi> <= c_j}`; normals are reduced to primitive form.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<(Vec<i64>, Rational)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let mut hs = Vec::with_capacity(halfspaces.len());
        for (u, c) in halfspaces {
            if u.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: u.len() });
            }
            let g = rational::gcd_vec(&u);
            if g == 0 {
                return Err(Error::Invalid("zero normal vector".into()));
            }
            let h = Halfspace { normal: u.iter().map(|x| x / g).collect(), offset: c / int(g) };
            if !hs.contains(&h) {
                hs.push(h);
            }
        }
        Ok(LatticePolytope { dim, halfspaces: hs, vertices: OnceLock::new() })
    }

    /// Convex hull of the given points, converted to facets (`dim <= 3`).
    pub fn from_vertices(points: &[Vec<Rational>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::Invalid("no vertices".into()))?;
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Invalid("vertices of mixed dimension".into()));
        }
        let facets = face::hull_facets(points, dim)?;
        let p = Self::from_halfspaces(dim, facets)?;
        Ok(p)
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::from_halfspaces(1, vec![(vec![-1], -a), (vec![1], b)])
    }

    /// Axis-aligned box `prod [lo_i, hi_i]`.
    pub fn cuboid(lo: &[Rational], hi: &[Rational]) -> Result<Self> {
        let g = lo.len();
        let mut hs = Vec::new();
        for i in 0..g {
            let mut e = vec![0; g];
            e[i] = 1;
            hs.push((e.clone(), hi[i].clone()));
            e[i] = -1;
            hs.push((e, -lo[i].clone()));
        }
        Self::from_halfspaces(g, hs)
    }

    pub fn unit_cube(g: usize) -> Self {
        Self::cuboid(&vec![int(0); g], &vec![int(1); g]).expect("unit cube")
    }

    /// `{xi >= 0, sum xi <= 1}`.
    pub fn standard_simplex(g: usize) -> Self {
        let mut hs: Vec<(Vec<i64>, Rational)> = (0..g)
            .map(|i| {
                let mut e = vec![0; g];
                e[i] = -1;
                (e, int(0))
            })
            .collect();
        hs.push((vec![1; g], int(1)));
        Self::from_halfspaces(g, hs).expect("simplex")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| rational::dot_ir(&h.normal, x) <= h.offset)
    }

    pub fn contains_lattice(&self, x: &[i64]) -> bool {
        let xr: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        self.contains(&xr)
    }

    /// Indices of constraints tight at `x`.
    pub fn tight(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.halfspaces.len())
            .filter(|&j| rational::dot_ir(&self.halfspaces[j].normal, x) == self.halfspaces[j].offset)
            .collect()
    }

    /// Bounded iff no nonzero direction `d` has `<u_j, d> <= 0` for all `j`.
    pub fn is_bounded(&self) -> bool {
        let g = self.dim;
        let rows: Vec<Vec<Rational>> = self.halfspaces.iter().map(|h| h.normal.iter().map(|&x| int(x)).collect()).collect();
        if rational::rank(&rows) < g {
            return false;
        }
        let m = self.halfspaces.len();
        let check = |d: &[Rational]| self.halfspaces.iter().all(|h| rational::dot_ir(&h.normal, d) <= Rational::zero());
        if g == 1 {
            return !(check(&[int(1)]) || check(&[int(-1)]));
        }
        // extreme rays of the recession cone are cut out by g-1 tight constraints
        for subset in combinations(m, g - 1) {
            let sub: Vec<Vec<Rational>> = subset.iter().map(|&j| rows[j].clone()).collect();
            if let Some(d) = null_vector(&sub, g) {
                let neg: Vec<Rational> = d.iter().map(|x| -x).collect();
                if check(&d) || check(&neg) {
                    return false;
                }
            }
        }
        true
    }

    /// All vertices, deduplicated and lexicographically sorted.
    pub fn vertices_of(&self) -> Result<Vec<Vec<Rational>>> {
        self.vertices.get_or_init(|| self.compute_vertices()).clone()
    }

    fn compute_vertices(&self) -> Result<Vec<Vec<Rational>>> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let g = self.dim;
        let m = self.halfspaces.len();
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for subset in combinations(m, g) {
            let a: Vec<Vec<Rational>> = subset.iter().map(|&j| self.halfspaces[j].normal.iter().map(|&x| int(x)).collect()).collect();
            let b: Vec<Rational> = subset.iter().map(|&j| self.halfspaces[j].offset.clone()).collect();
            if let Some(x) = rational::solve(&a, &b) {
                if self.contains(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        let found = affine_dim(&out);
        if found < g {
            return Err(Error::Degenerate { found, ambient: g });
        }
        out.sort();
        Ok(out)
    }

    /// Offsets scaled by `k`.
    pub fn dilate(&self, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Invalid(format!("dilation factor must be >= 1, got {k}")));
        }
        Ok(LatticePolytope {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace { normal: h.normal.clone(), offset: &h.offset * int(k) })
                .collect(),
            vertices: OnceLock::new(),
        })
    }

    /// Primitive edge directions leaving vertex `v`.
    pub fn tangent_cone(&self, v: &[Rational]) -> Result<VertexCone> {
        let verts = self.vertices_of()?;
        if !verts.iter().any(|w| w.as_slice() == v) {
            return Err(Error::NotAVertex(v.iter().map(rational::to_string).collect()));
        }
        let tight_v = self.tight(v);
        let mut gens = Vec::new();
        for w in &verts {
            if w.as_slice() == v {
                continue;
            }
            // [v, w] is an edge iff the constraints tight at both cut out a line
            let common: Vec<usize> = tight_v.iter().copied().filter(|j| self.tight(w).contains(j)).collect();
            let rows: Vec<Vec<Rational>> = common.iter().map(|&j| self.halfspaces[j].normal.iter().map(|&x| int(x)).collect()).collect();
            if rational::rank(&rows) != self.dim - 1 {
                continue;
            }
            let diff: Vec<Rational> = w.iter().zip(v).map(|(a, b)| a - b).collect();
            gens.push(rational::primitive_from_rational(&diff));
        }
        gens.sort();
        Ok(VertexCone::new(v.to_vec(), gens))
    }

    pub fn is_delzant(&self) -> Result<DelzantVerdict> {
        let verts = self.vertices_of()?;
        for v in &verts {
            let name = v.iter().map(rational::to_string).collect::<Vec<_>>().join(",");
            if !v.iter().all(rational::is_integral) {
                return Ok(DelzantVerdict { is_delzant: false, witness: Some(format!("vertex ({name}) is not a lattice point")) });
            }
            let cone = self.tangent_cone(v)?;
            if cone.generators.len() != self.dim {
                return Ok(DelzantVerdict {
                    is_delzant: false,
                    witness: Some(format!("vertex ({name}) is not simple: {} edges", cone.generators.len())),
                });
            }
            let d = cone.abs_det();
            if d != 1 {
                return Ok(DelzantVerdict {
                    is_delzant: false,
                    witness: Some(format!("vertex ({name}): generators {:?} have |det| = {d}", cone.generators)),
                });
            }
        }
        Ok(DelzantVerdict { is_delzant: true, witness: None })
    }

    /// Box bounds `[floor(min), ceil(max)]` per coordinate over the vertices.
    pub fn bounding_box(&self) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let verts = self.vertices_of()?;
        let g = self.dim;
        let lo = (0..g).map(|i| verts.iter().map(|v| v[i].clone()).min().unwrap()).collect();
        let hi = (0..g).map(|i| verts.iter().map(|v| v[i].clone()).max().unwrap()).collect();
        Ok((lo, hi))
    }

    /// `Some((lo, hi))` when the polytope is an axis-aligned box.
    pub fn as_cuboid(&self) -> Option<(Vec<Rational>, Vec<Rational>)> {
        if self.halfspaces.iter().any(|h| h.normal.iter().filter(|x| **x != 0).count() != 1) {
            return None;
        }
        let (lo, hi) = self.bounding_box().ok()?;
        let c = Self::cuboid(&lo, &hi).ok()?;
        let same = c.halfspaces.iter().all(|h| self.halfspaces.contains(h)) && self.halfspaces.iter().all(|h| c.halfspaces.contains(h));
        same.then_some((lo, hi))
    }

    pub fn to_json(&self) -> Value {
        let hs: Vec<Value> = self.halfspaces.iter().map(|h| json!([h.normal, rational::to_string(&h.offset)])).collect();
        let mut v = json!({ "dim": self.dim, "halfspaces": hs });
        if let Ok(verts) = self.vertices_of() {
            v["vertices"] = Value::Array(verts.iter().map(|p| Value::Array(p.iter().map(rational::to_json).collect())).collect());
        }
        v
    }

    /// Accepts `{"dim", "halfspaces"}` and/or `{"vertices"}`; when both are
    /// given they must describe the same set.
    pub fn from_json(v: &Value) -> Result<Self> {
        let hs = v.get("halfspaces");
        let vs = v.get("vertices");
        let from_h = match hs {
            Some(hs) => {
                let arr = hs.as_array().ok_or_else(|| Error::Invalid("\"halfspaces\" must be an array".into()))?;
                let mut list = Vec::new();
                for (i, h) in arr.iter().enumerate() {
                    let pair = h.as_array().filter(|p| p.len() == 2).ok_or_else(|| Error::Invalid(format!("halfspaces[{i}] must be [u, c]")))?;
                    let u = parse_ivec(&pair[0]).map_err(|e| Error::Invalid(format!("halfspaces[{i}]: {e}")))?;
                    let c = rational::from_json(&pair[1]).map_err(|e| Error::Invalid(format!("halfspaces[{i}]: {e}")))?;
                    list.push((u, c));
                }
                let dim = match v.get("dim") {
                    Some(d) => d.as_u64().ok_or_else(|| Error::Invalid("\"dim\" must be a positive integer".into()))? as usize,
                    None => list.first().map(|(u, _)| u.len()).ok_or_else(|| Error::Invalid("empty halfspace list".into()))?,
                };
                Some(Self::from_halfspaces(dim, list)?)
            }
            None => None,
        };
        let from_v = match vs {
            Some(vs) => {
                let arr = vs.as_array().ok_or_else(|| Error::Invalid("\"vertices\" must be an array".into()))?;
                let pts: Vec<Vec<Rational>> = arr.iter().map(parse_rvec).collect::<Result<_>>()?;
                Some(pts)
            }
            None => None,
        };
        match (from_h, from_v) {
            (Some(p), Some(pts)) => {
                let mut expect = pts.clone();
                expect.sort();
                expect.dedup();
                let got = p.vertices_of()?;
                if got != expect {
                    return Err(Error::Invalid("halfspaces and vertices describe different polytopes".into()));
                }
                Ok(p)
            }
            (Some(p), None) => Ok(p),
            (None, Some(pts)) => Self::from_vertices(&pts),
            (None, None) => Err(Error::Invalid("polytope needs \"halfspaces\" or \"vertices\"".into())),
        }
    }
}

pub(crate) fn parse_ivec(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("expected integer vector, got {v}")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::Invalid(format!("expected integer, got {x}"))))
        .collect()
}

pub(crate) fn parse_rvec(v: &Value) -> Result<Vec<Rational>> {
    match v {
        Value::Array(a) => a.iter().map(rational::from_json).collect(),
        other => Ok(vec![rational::from_json(other)?]),
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A nonzero vector orthogonal to all rows when they have rank `g - 1`.
pub(crate) fn null_vector(rows: &[Vec<Rational>], g: usize) -> Option<Vec<Rational>> {
    if rational::rank(rows) != g - 1 {
        return None;
    }
    // generalized cross product: cofactors along an extra row
    let mut basis_rows: Vec<Vec<Rational>> = Vec::new();
    for r in rows {
        let mut trial = basis_rows.clone();
        trial.push(r.clone());
        if rational::rank(&trial) > basis_rows.len() {
            basis_rows = trial;
        }
    }
    let d: Vec<Rational> = (0..g)
        .map(|i| {
            let minor: Vec<Vec<Rational>> = basis_rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect())
                .collect();
            let s = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
            s * rational::det(&minor)
        })
        .collect();
    d.iter().any(|x| !x.is_zero()).then_some(d)
}

pub(crate) fn affine_dim(points: &[Vec<Rational>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    rational::rank(&diffs)
}
