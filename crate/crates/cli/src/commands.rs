use anyhow::{bail, Result};
use serde_json::{json, Value};
use toric_em::algebra::rational::{self, int, rat, Rational};
use toric_em::asymptotics::{riemann_roch_number, verify_asymptotic_order, verify_exact, ThetaModel};
use toric_em::characters::{for_each_in_box, matches_on_box, p1p1_multiplicity, paradan_pieces_p1p1, pieces_agree, SupportBound};
use toric_em::dh::{ProductBump, TestFunction};
use toric_em::model::{corpus, ModelSpec};
use toric_em::partition::{continuity_values, kostant_count, t_piecewise, VectorList};
use toric_em::todd::{graded_todd_diagonal, graded_todd_matrix};

use crate::input::{monomials, parse_polynomial, parse_rationals, parse_test_function, parse_window};
use crate::output::{Output, Table};

fn lambda_header(rank: usize) -> Vec<String> {
    if rank == 1 {
        vec!["lambda".into()]
    } else {
        (1..=rank).map(|i| format!("lambda{i}")).collect()
    }
}

fn window_or_support(model: &ThetaModel, k: i64, window: Option<&str>) -> Result<(Vec<i64>, Vec<i64>)> {
    match (window, model.multiplicity.support(k)) {
        (Some(w), _) => parse_window(w, model.rank()),
        (None, SupportBound::Finite { lo, hi }) => Ok((lo, hi)),
        (None, SupportBound::Unbounded(why)) => bail!("{why}; pass --window"),
    }
}

fn grid(model: &ThetaModel, k: i64, window: Option<&str>, keep_zeros: bool) -> Result<Output> {
    if k < 1 {
        bail!("--k must be a positive integer");
    }
    let (lo, hi) = window_or_support(model, k, window)?;
    let mut header = lambda_header(model.rank());
    header.push("multiplicity".into());
    let mut table = Table { header, rows: Vec::new() };
    for_each_in_box(&lo, &hi, &mut |lambda| {
        let m = model.multiplicity.eval(lambda, k);
        if keep_zeros || m != 0 {
            let mut row: Vec<String> = lambda.iter().map(i64::to_string).collect();
            row.push(m.to_string());
            table.rows.push(row);
        }
        Ok(())
    })?;
    Ok(Output::table(table))
}

/// Nonzero multiplicities, over the support or a window.
pub fn enumerate(spec: &ModelSpec, k: i64, window: Option<&str>) -> Result<Output> {
    grid(&spec.build()?, k, window, false)
}

/// Every lattice point of the window with its multiplicity, zeros included.
pub fn character(spec: &ModelSpec, k: i64, window: Option<&str>) -> Result<Output> {
    grid(&spec.build()?, k, window, true)
}

pub fn dh(spec: &ModelSpec, n: u32, pair: Option<&str>) -> Result<Output> {
    let model = spec.build()?;
    let dist = model.dh(n)?;
    let mut v = json!({
        "model": spec.to_json(),
        "n": n,
        "distribution": dist.to_json(),
    });
    if let Some(arg) = pair {
        let f = parse_test_function(arg, model.rank())?;
        let value = match &f {
            TestFunction::Polynomial(p) => json!({ "exact": rational::to_string(&model.dh_moment(n, p)?) }),
            _ => dist.pair(&f)?.to_json(),
        };
        v["pairing"] = json!({ "test_function": f.to_json(), "value": value });
    }
    Ok(Output::json(v))
}

pub fn partition(list: &VectorList, lambda: Option<&str>, chambers: bool, n: Option<u32>) -> Result<Output> {
    if chambers {
        let n_max = n.unwrap_or((list.len() - list.rank()) as u32);
        let complex = t_piecewise(list, n_max)?;
        let mut v = complex.to_json();
        v["delta"] = list.to_json();
        return Ok(Output::json(v));
    }
    let Some(lambda) = lambda else { bail!("pass --lambda or --chambers") };
    let lambda = crate::input::parse_ints(lambda, "--lambda")?;
    let count = kostant_count(list, &lambda)?;
    let mut header = lambda_header(list.rank());
    header.push("count".into());
    let mut row: Vec<String> = lambda.iter().map(i64::to_string).collect();
    row.push(count.to_string());
    Ok(Output {
        json: Some(json!({ "delta": list.to_json(), "lambda": lambda, "count": count })),
        table: Some(Table { header, rows: vec![row] }),
        passed: true,
    })
}

pub fn todd(n: usize, weights: Option<Vec<Vec<i64>>>, dim: Option<usize>) -> Result<Output> {
    if let Some(dim) = dim {
        let b = graded_todd_matrix(n, dim)?;
        return Ok(Output::json(json!({ "n": n, "dim": dim, "power_sum_expression": b.expression.to_json() })));
    }
    let weights = weights.unwrap_or_else(|| vec![vec![1]]);
    Ok(Output::json(graded_todd_diagonal(&weights, n)?.to_json()))
}

fn named_models(model: Option<&ModelSpec>) -> Vec<(String, ModelSpec)> {
    match model {
        Some(m) => vec![("model".into(), m.clone())],
        None => corpus().into_iter().map(|(n, m)| (n.to_string(), m)).collect(),
    }
}

pub fn verify_exact_suite(model: Option<&ModelSpec>, pair: Option<&str>, k_max: i64) -> Result<Output> {
    if k_max < 1 {
        bail!("--k must be a positive integer");
    }
    let ks: Vec<i64> = (1..=k_max).collect();
    let mut reports = Vec::new();
    let mut table = Table::new(&["model", "polynomial", "k", "lhs", "rhs", "error"]);
    let mut first_failure = Value::Null;
    for (name, spec) in named_models(model) {
        let m = spec.build()?;
        let polys = match pair {
            Some(expr) => vec![parse_polynomial(expr, m.rank())?],
            None => monomials(m.rank(), 3),
        };
        for p in polys {
            let r = verify_exact(&m, &p, &ks)?;
            for row in r.csv_rows() {
                let mut full = vec![name.clone(), r.polynomial.clone()];
                full.extend(row);
                table.rows.push(full);
            }
            if !r.passed() && first_failure.is_null() {
                first_failure = json!({ "model": name, "polynomial": r.polynomial, "k": r.first_failure });
            }
            let mut v = r.to_json();
            v["model"] = json!(name);
            reports.push(v);
        }
    }
    let passed = first_failure.is_null();
    Ok(Output {
        json: Some(json!({ "suite": "exact", "k_max": k_max, "reports": reports, "first_failure": first_failure, "passed": passed })),
        table: Some(table),
        passed,
    })
}

/// Default asymptotic cases: a smooth bump across the end of a half-line at
/// `N = 2`, and across all of `[-2, 2]` for P1 x P1 at `N = 1`.
pub fn default_asymptotic_cases() -> Vec<(String, ModelSpec, TestFunction, u32)> {
    let bump = |c: f64, r: f64| TestFunction::Numeric(std::sync::Arc::new(ProductBump::new(vec![c], vec![r])));
    vec![
        ("halfline".into(), ModelSpec::Halfline { a: json!(0), direction: 1, d: None }, bump(0.3, 1.0), 2),
        ("p1p1".into(), ModelSpec::P1p1 { d: None }, bump(0.0, 3.0), 1),
    ]
}

pub fn verify_asymptotic_suite(cases: Vec<(String, ModelSpec, TestFunction, u32)>, ks: &[i64]) -> Result<Output> {
    let mut reports = Vec::new();
    let mut table = Table::new(&["model", "k", "theta", "expansion", "error"]);
    let mut passed = true;
    for (name, spec, f, n) in cases {
        let r = verify_asymptotic_order(&spec.build()?, &f, n, ks)?;
        for row in r.csv_rows() {
            let mut full = vec![name.clone()];
            full.extend(row);
            table.rows.push(full);
        }
        passed &= r.passed();
        let mut v = r.to_json();
        v["model"] = json!(name);
        v["test_function"] = f.to_json();
        reports.push(v);
    }
    Ok(Output { json: Some(json!({ "suite": "asymptotic", "ks": ks, "reports": reports, "passed": passed })), table: Some(table), passed })
}

pub fn verify_rr_suite(model: Option<&ModelSpec>, k: Option<i64>) -> Result<Output> {
    let cases: Vec<(String, ModelSpec, i64)> = match model {
        Some(m) => vec![("model".into(), m.clone(), k.unwrap_or(1))],
        None => {
            let c = corpus();
            let pick = |name: &str| c.iter().find(|(n, _)| *n == name).expect("corpus entry").1.clone();
            vec![("p1p1".into(), pick("p1p1"), 1), ("unit square".into(), pick("unit square"), 2), ("2-simplex".into(), pick("2-simplex"), 3)]
        }
    };
    let mut reports = Vec::new();
    let mut table = Table::new(&["model", "k", "count", "dh_side"]);
    let mut passed = true;
    for (name, spec, k) in cases {
        if k < 1 {
            bail!("--k must be a positive integer");
        }
        let r = riemann_roch_number(&spec.build()?, k)?;
        table.rows.push(vec![name.clone(), k.to_string(), r.count.to_string(), rational::to_string(&r.dh_side)]);
        passed &= r.passed();
        let mut v = r.to_json();
        v["model"] = json!(name);
        reports.push(v);
    }
    Ok(Output { json: Some(json!({ "suite": "rr", "reports": reports, "passed": passed })), table: Some(table), passed })
}

pub fn verify_walls_suite(rs: &[Rational], k_max: i64) -> Result<Output> {
    if rs.len() < 2 {
        bail!("--r needs at least two regular values");
    }
    if k_max < 1 {
        bail!("--k must be a positive integer");
    }
    let m = p1p1_multiplicity();
    let mut table = Table::new(&["r", "k", "matches_multiplicity"]);
    let mut pieces = Vec::new();
    let mut matches = Vec::new();
    for r in rs {
        let ps = paradan_pieces_p1p1(r)?;
        for k in 1..=k_max {
            let ok = matches_on_box(&m, &ps, &[-5 * k], &[5 * k], k);
            table.rows.push(vec![rational::to_string(r), k.to_string(), ok.to_string()]);
            matches.push(json!({ "r": rational::to_json(r), "k": k, "equal": ok }));
        }
        pieces.push(json!({ "r": rational::to_json(r), "pieces": ps.iter().map(|p| p.to_json()).collect::<Vec<_>>() }));
    }
    let first = paradan_pieces_p1p1(&rs[0])?;
    let mut independent = true;
    for r in &rs[1..] {
        independent &= pieces_agree(&first, &paradan_pieces_p1p1(r)?, k_max);
    }
    let passed = independent && matches.iter().all(|m| m["equal"] == json!(true));
    Ok(Output {
        json: Some(json!({
            "suite": "walls",
            "k_max": k_max,
            "window": "|j| <= 5k",
            "decompositions": pieces,
            "matches": matches,
            "independent": independent,
            "passed": passed,
        })),
        table: Some(table),
        passed,
    })
}

pub fn default_walls() -> Vec<Rational> {
    vec![rat(-1, 2), rat(-3, 2)]
}

pub fn default_directions() -> Vec<Vec<Rational>> {
    vec![vec![int(2), int(1)], vec![int(1), int(3)]]
}

pub fn verify_continuity_suite(list: &VectorList, window: Option<&str>, eps: &[String]) -> Result<Output> {
    let g = list.rank();
    let (lo, hi) = match window {
        Some(w) => parse_window(w, g)?,
        None => (vec![0; g], vec![5; g]),
    };
    let dirs: Vec<Vec<Rational>> = if eps.is_empty() {
        if g != 2 {
            bail!("pass --eps for a rank {g} list");
        }
        default_directions()
    } else {
        eps.iter().map(|e| parse_rationals(e, "--eps")).collect::<Result<_>>()?
    };
    let mut header = lambda_header(g);
    header.extend(["eps".to_string(), "count".into(), "limit".into(), "equal".into()]);
    let mut table = Table { header, rows: Vec::new() };
    let mut rows = Vec::new();
    let mut passed = true;
    let mut failure: Option<toric_em::Error> = None;
    for_each_in_box(&lo, &hi, &mut |lambda| {
        for e in &dirs {
            let (count, limit) = match continuity_values(list, lambda, e) {
                Ok(x) => x,
                Err(err) => {
                    failure.get_or_insert(err);
                    return Ok(());
                }
            };
            let equal = int(count as i64) == limit;
            passed &= equal;
            let eps_s = e.iter().map(rational::to_string).collect::<Vec<_>>().join(",");
            let mut row: Vec<String> = lambda.iter().map(i64::to_string).collect();
            row.extend([eps_s.clone(), count.to_string(), rational::to_string(&limit), equal.to_string()]);
            table.rows.push(row);
            rows.push(json!({ "lambda": lambda, "eps": eps_s, "count": count, "limit": rational::to_json(&limit), "equal": equal }));
        }
        Ok(())
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(Output {
        json: Some(json!({ "suite": "continuity", "delta": list.to_json(), "rows": rows, "passed": passed })),
        table: Some(table),
        passed,
    })
}
