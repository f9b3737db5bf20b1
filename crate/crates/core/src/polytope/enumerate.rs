//! Lattice points by recursive coordinate bounding: Fourier-Motzkin projection
//! gives exact bounds on the leading coordinate, then recurse on the slice.

use num_traits::{Signed, Zero};

use super::LatticePolytope;
use crate::algebra::rational::{self, int, Rational};
use crate::error::{Error, Result};

pub const MAX_LATTICE_POINTS: usize = 1_000_000;

type Constraint = (Vec<Rational>, Rational);

/// `Λ ∩ P`, lexicographically sorted, capped at [`MAX_LATTICE_POINTS`].
pub fn lattice_points(p: &LatticePolytope) -> Result<Vec<Vec<i64>>> {
    lattice_points_capped(p, MAX_LATTICE_POINTS)
}

pub fn lattice_points_capped(p: &LatticePolytope, cap: usize) -> Result<Vec<Vec<i64>>> {
    if !p.is_bounded() {
        return Err(Error::Unbounded);
    }
    let cons: Vec<Constraint> = p
        .halfspaces()
        .iter()
        .map(|h| (h.normal.iter().map(|&x| int(x)).collect(), h.offset.clone()))
        .collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(p.dim());
    recurse(&cons, &mut prefix, &mut out, cap)?;
    Ok(out)
}

fn recurse(cons: &[Constraint], prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>, cap: usize) -> Result<()> {
    let n = cons.first().map_or(0, |c| c.0.len());
    if n == 0 {
        if cons.iter().all(|(_, c)| !c.is_negative()) {
            if out.len() >= cap {
                return Err(Error::SizeCap(cap));
            }
            out.push(prefix.clone());
        }
        return Ok(());
    }
    // project onto the first remaining coordinate
    let mut proj = cons.to_vec();
    for _ in 1..n {
        proj = eliminate_last(&proj);
    }
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for (a, c) in &proj {
        let a0 = &a[0];
        if a0.is_zero() {
            if c.is_negative() {
                return Ok(());
            }
        } else if a0.is_positive() {
            let b = c / a0;
            hi = Some(hi.map_or(b.clone(), |h| h.min(b)));
        } else {
            let b = c / a0;
            lo = Some(lo.map_or(b.clone(), |l| l.max(b)));
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::Unbounded);
    };
    for x in rational::ceil_i64(&lo)..=rational::floor_i64(&hi) {
        let xr = int(x);
        let slice: Vec<Constraint> = cons.iter().map(|(a, c)| (a[1..].to_vec(), c - &a[0] * &xr)).collect();
        prefix.push(x);
        recurse(&slice, prefix, out, cap)?;
        prefix.pop();
    }
    Ok(())
}

/// Fourier-Motzkin elimination of the last variable.
fn eliminate_last(cons: &[Constraint]) -> Vec<Constraint> {
    let last = cons[0].0.len() - 1;
    let mut keep: Vec<Constraint> = Vec::new();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (a, c) in cons {
        let t = &a[last];
        if t.is_zero() {
            keep.push((a[..last].to_vec(), c.clone()));
        } else {
            let s = rational::abs(t);
            let scaled: Constraint = (a[..last].iter().map(|x| x / &s).collect(), c / &s);
            if t.is_positive() {
                pos.push(scaled);
            } else {
                neg.push(scaled);
            }
        }
    }
    for (ap, cp) in &pos {
        for (an, cn) in &neg {
            let a: Vec<Rational> = ap.iter().zip(an).map(|(x, y)| x + y).collect();
            keep.push((a, cp + cn));
        }
    }
    keep.sort();
    keep.dedup();
    keep
}
