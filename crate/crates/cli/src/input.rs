//! Reading models, vector lists, windows and test functions from flags.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use toric_em::algebra::rational::{self, Rational};
use toric_em::algebra::{ambient_vars, parse_poly, MultiPoly};
use toric_em::dh::TestFunction;
use toric_em::model::ModelSpec;
use toric_em::partition::VectorList;

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file.
fn json_text(arg: &str) -> Result<(String, String)> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(("<inline>".into(), arg.to_string()));
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))?;
    Ok((arg.to_string(), text))
}

pub fn load_model(arg: &str) -> Result<ModelSpec> {
    let (source, text) = json_text(arg)?;
    ModelSpec::parse(&text).map_err(|e| anyhow!("{source}: {e}"))
}

pub fn load_json(arg: &str) -> Result<Value> {
    let (source, text) = json_text(arg)?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{source}: {e}"))
}

pub fn load_delta(arg: &str) -> Result<VectorList> {
    let v = load_json(arg)?;
    Ok(VectorList::from_json(&v).context("--delta")?)
}

pub fn parse_ints(s: &str, flag: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| anyhow!("{flag}: `{x}` is not an integer ({e})")))
        .collect()
}

pub fn parse_rationals(s: &str, flag: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|x| rational::parse(x.trim()).map_err(|e| anyhow!("{flag}: {e}"))).collect()
}

/// `a,b[,c,d,...]` as per-axis bounds `([a, c, ..], [b, d, ..])`.
pub fn parse_window(s: &str, rank: usize) -> Result<(Vec<i64>, Vec<i64>)> {
    let v = parse_ints(s, "--window")?;
    if v.len() != 2 * rank {
        bail!("--window needs {} integers for rank {rank}, got {}", 2 * rank, v.len());
    }
    let lo: Vec<i64> = v.iter().step_by(2).copied().collect();
    let hi: Vec<i64> = v.iter().skip(1).step_by(2).copied().collect();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        bail!("--window bounds must satisfy lower <= upper");
    }
    Ok((lo, hi))
}

pub fn parse_polynomial(expr: &str, rank: usize) -> Result<MultiPoly> {
    parse_poly(expr, &ambient_vars(rank)).map_err(|e| anyhow!("--pair `{expr}`: {e}"))
}

/// A test-function file or inline JSON, else a polynomial expression.
pub fn parse_test_function(arg: &str, rank: usize) -> Result<TestFunction> {
    let t = arg.trim_start();
    if t.starts_with('{') || Path::new(arg).is_file() {
        let v = load_json(arg)?;
        return Ok(TestFunction::from_json(&v).context("--pair")?);
    }
    Ok(TestFunction::Polynomial(parse_polynomial(arg, rank)?))
}

/// Every monomial of total degree `<= max_degree` in `rank` variables.
pub fn monomials(rank: usize, max_degree: u32) -> Vec<MultiPoly> {
    let vars = ambient_vars(rank);
    let mut exps: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..rank {
        exps = exps
            .into_iter()
            .flat_map(|e| {
                let used: u32 = e.iter().sum();
                (0..=max_degree - used).map(move |a| {
                    let mut f = e.clone();
                    f.push(a);
                    f
                })
            })
            .collect();
    }
    exps.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    exps.into_iter()
        .map(|e| e.iter().enumerate().fold(MultiPoly::one(vars.clone()), |acc, (i, &a)| &acc * &MultiPoly::var(vars.clone(), i).pow(a)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert_eq!(parse_window("-1,3", 1).unwrap(), (vec![-1], vec![3]));
        assert_eq!(parse_window("0,5,1,2", 2).unwrap(), (vec![0, 1], vec![5, 2]));
        assert!(parse_window("0,5", 2).is_err());
        assert!(parse_window("3,1", 1).is_err());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(1, 3).len(), 4);
        assert_eq!(monomials(2, 3).len(), 10);
        assert_eq!(monomials(2, 1).iter().map(|m| m.to_string()).collect::<Vec<_>>(), ["1", "x", "y"]);
    }
}
