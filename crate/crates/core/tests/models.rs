use toric_em::algebra::poly::ambient_vars;
use toric_em::algebra::rational::int;
use toric_em::algebra::MultiPoly;
use toric_em::asymptotics::{p1p1_model, theta, verify_exact};
use toric_em::characters::character_eval;
use toric_em::dh::TestFunction;
use toric_em::model::{corpus, ModelSpec};

fn monomials(g: usize) -> Vec<MultiPoly> {
    let vars = ambient_vars(g);
    let x = |i: usize, e: u32| MultiPoly::var(vars.clone(), i).pow(e);
    match g {
        1 => (0..=3).map(|e| x(0, e)).collect(),
        _ => (0..=3u32).flat_map(|a| (0..=3 - a).map(move |b| (a, b))).map(|(a, b)| &x(0, a) * &x(1, b)).collect(),
    }
}

#[test]
fn corpus_is_exact_for_cubic_monomials() {
    let ks: Vec<i64> = (1..=8).collect();
    for (name, spec) in corpus() {
        let model = spec.build().unwrap();
        for p in monomials(model.rank()) {
            let r = verify_exact(&model, &p, &ks).unwrap();
            assert!(r.passed(), "{name}: {p} fails at {:?}", r.first_failure);
        }
    }
}

#[test]
fn theta_of_one_is_the_character_at_the_identity() {
    let model = p1p1_model();
    let one = TestFunction::Polynomial(MultiPoly::one(ambient_vars(1)));
    for k in 1..=6 {
        let t = theta(&model, k, &one).unwrap();
        assert_eq!(t.exact().unwrap(), &character_eval(&model.multiplicity, k, &[int(1)]).unwrap());
        assert_eq!(t.exact().unwrap(), &int((2 * k + 1) * (2 * k + 1)));
    }
}

#[test]
fn model_documents_round_trip() {
    for entry in std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../../models")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let Ok(spec) = ModelSpec::parse(&text) else { continue };
        assert_eq!(ModelSpec::from_json(&spec.to_json()).unwrap(), spec);
        spec.build().unwrap();
    }
}
