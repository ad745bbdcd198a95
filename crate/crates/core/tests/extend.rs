mod common;

use std::sync::Arc;

use rootsurf::base::{make_circle, make_interval, make_torus2, SelfMap};
use rootsurf::bundle::{build_bundle, MonicPolynomial, RootBundle};
use rootsurf::extend::{
    ah_fit, branch_tests, bundles, corollary3_check, decide_ah, decide_lift, enumerate_lifts, enumerate_lifts_between,
    lemma4_test, recheck_certificate, root_implies_extendable_check, validate_lift, Answer, Bundles, Certificate,
    Finiteness, Lift, DEFAULT_MAX_LIFTS,
};
use rootsurf::funcspec::parse;
use rootsurf::Error;

use common::builtin;

fn poly(base: &Arc<rootsurf::base::BaseSpace>, coeffs: &[&str]) -> Arc<MonicPolynomial> {
    Arc::new(MonicPolynomial::from_coeff_exprs(base.clone(), coeffs.iter().map(|c| parse(c).unwrap()).collect()).unwrap())
}

fn identity(base: &Arc<rootsurf::base::BaseSpace>) -> Arc<SelfMap> {
    Arc::new(SelfMap::identity(base.clone()))
}

/// Counts maps `g_x` from source sheets to target sheets at every sample
/// with `g_y ∘ σᴬ = σᴮ ∘ g_x` on every edge, by exhaustion.
fn brute_force_lifts(a: &RootBundle, b: &RootBundle) -> usize {
    let (n, na, nb) = (a.base.len(), a.degree(), b.degree());
    let per_sample = nb.pow(na as u32);
    let decode = |mut code: usize| -> Vec<usize> {
        (0..na)
            .map(|_| {
                let s = code % nb;
                code /= nb;
                s
            })
            .collect()
    };
    let mut count = 0;
    for code in 0..per_sample.pow(n as u32) {
        let g: Vec<Vec<usize>> = (0..n).map(|x| decode(code / per_sample.pow(x as u32) % per_sample)).collect();
        let ok = a.base.edges.iter().enumerate().all(|(e, edge)| {
            (0..na).all(|s| g[edge.head][a.edge_perms[e].apply(s)] == b.edge_perms[e].apply(g[edge.tail][s]))
        });
        count += usize::from(ok);
    }
    count
}

#[test]
fn identity_lifts_on_a_three_sample_circle_match_exhaustion() {
    let base = Arc::new(make_circle(3).unwrap());
    let p = poly(&base, &["-4", "0"]);
    let Bundles { source, target } = bundles(&p, &identity(&base)).unwrap();
    let expected = brute_force_lifts(&source, &target);
    assert_eq!(expected, 4);
    let lifts = enumerate_lifts(&p, &identity(&base), 100).unwrap();
    assert_eq!(lifts.len(), expected);
    let bijective = lifts.iter().filter(|l| l.sheets.iter().all(|row| row[0] != row[1])).count();
    assert_eq!(bijective, 2);
}

#[test]
fn identity_map_lifts_by_the_root_coordinate() {
    let base = Arc::new(make_circle(200).unwrap());
    let p = poly(&base, &["-exp(1i*theta)", "0"]);
    let v = decide_lift(&build_bundle(p.clone()).unwrap(), &build_bundle(p.clone()).unwrap(), 8).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    let Bundles { source, .. } = bundles(&p, &identity(&base)).unwrap();
    assert_eq!(v.witness.unwrap().values, source.fibers);
}

fn example1() -> (RootBundle, RootBundle, Vec<Lift>) {
    let (p, map) = builtin("example1", 2001);
    let Bundles { source, target } = bundles(&p, &map).unwrap();
    let (lifts, truncated) = enumerate_lifts_between(&source, &target, DEFAULT_MAX_LIFTS).unwrap();
    assert!(!truncated);
    (source, target, lifts)
}

fn r(x: f64) -> f64 {
    (3.0 * x - 1.0) * (3.0 * x - 2.0).powi(2)
}

#[test]
fn example1_constant_lift_fits_with_the_pulled_back_root() {
    let (a, b, lifts) = example1();
    let xs: Vec<f64> = a.base.samples.iter().map(|c| a.base.parameter(c).unwrap()).collect();
    let constant = lifts
        .iter()
        .find(|l| l.values.iter().zip(&xs).all(|(v, &x)| v.iter().all(|z| (z - r(1.0 - x)).norm() < 1e-9)))
        .expect("f = r(1 − x) is a lift");
    let fit = ah_fit(&a, &constant.values).unwrap();
    assert!(fit.accepted());
    for (q, &x) in fit.coeffs.iter().zip(&xs) {
        let Some(q) = q else { continue };
        assert!((q[0] - r(1.0 - x)).norm() < 1e-9);
        assert!(q[1].norm() < 1e-9);
    }
    assert!(branch_tests(&a, &b, constant).unwrap().iter().all(|t| t.verdict == Finiteness::Finite));
}

#[test]
fn example1_sign_matched_lift_is_refused_and_diverges_at_two_thirds() {
    let (a, b, lifts) = example1();
    let xs: Vec<f64> = a.base.samples.iter().map(|c| a.base.parameter(c).unwrap()).collect();
    let signed = lifts
        .iter()
        .find(|l| {
            xs.iter().enumerate().filter(|(_, &x)| r(x).abs() > 1e-3).all(|(i, &x)| {
                (0..2).all(|s| (l.values[i][s] - a.fibers[i][s] / r(x) * r(1.0 - x)).norm() < 1e-9)
            })
        })
        .expect("f(x, ±r(x)) = ±r(1 − x) is a lift");
    let fit = ah_fit(&a, &signed.values).unwrap();
    assert_eq!(fit.refusal.as_ref().map(|r| r.kind.as_str()), Some("jump"));
    let tests = branch_tests(&a, &b, signed).unwrap();
    let near = a.base.nearest_sample(2.0 / 3.0).unwrap();
    let at = tests.iter().find(|t| t.sample == near).unwrap();
    assert_eq!(at.verdict, Finiteness::Divergent);
    let third = tests.iter().find(|t| t.sample == a.base.nearest_sample(1.0 / 3.0).unwrap()).unwrap();
    assert_eq!(third.verdict, Finiteness::Finite);
}

#[test]
fn root_coordinate_has_unit_divided_difference() {
    let (p, _) = builtin("example1", 2001);
    let Bundles { source, target } = bundles(&p, &identity(&p.base)).unwrap();
    let lift = Lift {
        sheets: (0..source.base.len()).map(|_| vec![0, 1]).collect(),
        values: source.fibers.clone(),
    };
    validate_lift(&source, &target, &lift).unwrap();
    for bp in &source.branch_points {
        let t = lemma4_test(&source, &target, &lift, bp).unwrap();
        assert_eq!(t.verdict, Finiteness::Finite);
        for side in &t.sides {
            assert!((side.quotients.last().unwrap().1 - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn example2_has_one_lift_and_example3_none() {
    let (p, map) = builtin("example2", 2000);
    assert_eq!(enumerate_lifts(&p, &map, 16).unwrap().len(), 1);
    let (p, map) = builtin("example3", 2000);
    assert!(enumerate_lifts(&p, &map, 16).unwrap().is_empty());
}

#[test]
fn consistency_reports_for_the_three_examples() {
    let expected = [
        ("example1", 2001, Answer::Yes, Answer::Yes),
        ("example2", 2000, Answer::No, Answer::Yes),
        ("example3", 2000, Answer::No, Answer::No),
    ];
    for (name, n, ah, cole) in expected {
        let (p, map) = builtin(name, n);
        let r = corollary3_check(&p, &map).unwrap();
        assert_eq!((r.ah, r.cole, r.consistent), (ah, cole, true), "{name}");
    }
}

#[test]
fn a_root_of_the_pullback_forces_extension() {
    let (p, map) = builtin("example1", 2001);
    let r = root_implies_extendable_check(&p, &map).unwrap();
    assert_eq!((r.pullback_root, r.ah, r.consistent), (Answer::Yes, Answer::Yes, true));

    let base = Arc::new(make_circle(128).unwrap());
    let constant = poly(&base, &["-4", "0"]);
    let half_turn = Arc::new(SelfMap::from_exprs(base.clone(), vec![parse("theta + pi").unwrap()], 2.0).unwrap());
    for map in [identity(&base), half_turn] {
        let r = root_implies_extendable_check(&constant, &map).unwrap();
        assert_eq!((r.pullback_root, r.ah), (Answer::Yes, Answer::Yes));
    }

    let sqrt = poly(&base, &["-exp(1i*theta)", "0"]);
    let r = root_implies_extendable_check(&sqrt, &identity(&base)).unwrap();
    assert_eq!((r.pullback_root, r.ah, r.consistent), (Answer::No, Answer::Yes, true));
}

#[test]
fn negative_certificates_recheck() {
    let base = Arc::new(make_circle(120).unwrap());
    let square = build_bundle(poly(&base, &["-exp(1i*theta)", "0"])).unwrap();
    let cube = build_bundle(poly(&base, &["-exp(1i*theta)", "0", "0"])).unwrap();
    let v = decide_lift(&square, &cube, 1).unwrap();
    assert!(matches!(v.certificate, Certificate::StripDivisibility { source_winding: 2, .. }));
    assert!(recheck_certificate(&square, &cube, &v.certificate));
    assert!(!recheck_certificate(&square, &square, &v.certificate));

    let torus = Arc::new(make_torus2(16, 16).unwrap());
    let p = poly(&torus, &["-exp(1i*theta1)", "0"]);
    let swap = Arc::new(SelfMap::from_exprs(torus.clone(), vec![parse("theta2").unwrap(), parse("theta1").unwrap()], 2.0).unwrap());
    let Bundles { source, target } = bundles(&p, &swap).unwrap();
    let v = decide_lift(&source, &target, 1).unwrap();
    assert_eq!(v.certificate.kind(), "csp_exhausted");
    assert!(recheck_certificate(&source, &target, &v.certificate));
}

#[test]
fn verdict_json_has_the_published_fields() {
    let (p, map) = builtin("example3", 400);
    let Bundles { source, target } = bundles(&p, &map).unwrap();
    let j = decide_lift(&source, &target, 1).unwrap().to_json();
    let mut keys: Vec<&str> = j.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["answer", "certificate_data", "certificate_kind", "resolution", "tolerances", "witness_ref"]);
    assert_eq!(j["answer"], "no");
    assert_eq!(j["certificate_kind"], "fiber_count");
    assert_eq!(j["certificate_data"]["source_distinct"], 4);
    assert_eq!(j["resolution"], 400);
}

#[test]
fn inadmissible_and_malformed_inputs_are_rejected() {
    let base = Arc::new(make_interval(50).unwrap());
    let double = poly(&base, &["0", "0"]);
    assert!(matches!(bundles(&double, &identity(&base)), Err(Error::Inadmissible(_))));

    let cusp = poly(&base, &["-x", "0", "0"]);
    let Bundles { source, target } = bundles(&cusp, &identity(&base)).unwrap();
    let bp = source.branch_points.first().expect("three sheets meet at 0");
    let lift = Lift { sheets: vec![vec![0, 1, 2]; base.len()], values: source.fibers.clone() };
    assert!(matches!(lemma4_test(&source, &target, &lift, bp), Err(Error::NotTwoSheeted { sheets: 3, .. })));

    let torus = Arc::new(make_torus2(8, 8).unwrap());
    let p = poly(&torus, &["-4", "0"]);
    let Bundles { source, target } = bundles(&p, &identity(&torus)).unwrap();
    let bogus = rootsurf::bundle::BranchPoint {
        sample: 0,
        location: torus.sample_location(0),
        gap: 0.0,
        groups: vec![vec![0, 1]],
    };
    let lift = Lift { sheets: vec![vec![0, 1]; torus.len()], values: source.fibers.clone() };
    assert!(matches!(lemma4_test(&source, &target, &lift, &bogus), Err(Error::WrongBaseKind { .. })));
    assert_eq!(decide_ah(&source, &target, 8).unwrap().answer, Answer::Yes);
}
