use std::sync::Arc;

use proptest::prelude::*;
use rootsurf::base::{make_circle, make_graph, make_interval};
use rootsurf::bundle::MonicPolynomial;
use rootsurf::closedness::{closedness_report, contains_circle, has_root, root_values};
use rootsurf::extend::Answer;
use rootsurf::funcspec::parse;
use rootsurf::Error;

fn poly(base: &Arc<rootsurf::base::BaseSpace>, coeffs: &[&str]) -> Arc<MonicPolynomial> {
    Arc::new(MonicPolynomial::from_coeff_exprs(base.clone(), coeffs.iter().map(|c| parse(c).unwrap()).collect()).unwrap())
}

#[test]
fn constant_square_has_a_constant_root() {
    let base = Arc::new(make_circle(64).unwrap());
    let v = has_root(&poly(&base, &["-4", "0"])).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    let r = root_values(&v).unwrap();
    assert!(r.iter().all(|z| (z.re.abs() - 2.0).abs() < 1e-12 && z.im.abs() < 1e-12));
    assert!(r.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn square_root_of_the_circle_coordinate_has_no_root() {
    let base = Arc::new(make_circle(64).unwrap());
    assert_eq!(has_root(&poly(&base, &["-exp(1i*theta)", "0"])).unwrap().answer, Answer::No);
}

#[test]
fn factored_interval_quadratic_has_its_root() {
    let base = Arc::new(make_interval(2001).unwrap());
    let r = "(3*x - 1)*(3*x - 2)^2";
    let p = Arc::new(
        MonicPolynomial::from_root_exprs(base.clone(), vec![parse(r).unwrap(), parse(&format!("-({r})")).unwrap()])
            .unwrap(),
    );
    let v = has_root(&p).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    let root = root_values(&v).unwrap();
    for (i, z) in root.iter().enumerate() {
        let x = i as f64 / 2000.0;
        let expected = (3.0 * x - 1.0) * (3.0 * x - 2.0f64).powi(2);
        let c = p.coeffs_at_sample(i);
        assert!((z * z + c[1] * z + c[0]).norm() < 1e-9);
        assert!((z.re.abs() - expected.abs()).abs() < 1e-9);
    }
}

#[test]
fn cycles_are_found_on_small_graphs() {
    let triangle = make_graph(3, &[(0, 1), (1, 2), (2, 0)], 1).unwrap();
    let r = contains_circle(&triangle).unwrap();
    assert!(r.has_cycle && !r.algebraically_closed_verdict);
    assert_eq!(r.witness_cycle.unwrap().len(), 3);
    let r = closedness_report(&Arc::new(triangle), 1, 0).unwrap();
    assert_eq!(r.witnesses[0].root, Answer::No);
    assert_eq!(r.transplanted_rotation, Some(Answer::No));

    let path = make_graph(4, &[(0, 1), (1, 2), (2, 3)], 3).unwrap();
    let r = contains_circle(&path).unwrap();
    assert!(!r.has_cycle && r.witness_cycle.is_none());

    let eight = make_graph(1, &[(0, 0), (0, 0)], 4).unwrap();
    assert_eq!(contains_circle(&eight).unwrap().independent_cycles, 2);

    assert!(matches!(contains_circle(&make_circle(8).unwrap()), Err(Error::WrongBaseKind { .. })));
}

#[test]
fn witness_cycles_are_closed_walks() {
    let base = Arc::new(make_graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)], 6).unwrap());
    let r = closedness_report(&base, 5, 0).unwrap();
    assert_eq!(r.witnesses.len(), 2);
    for (w, l) in r.witnesses.iter().zip(&base.loop_basis) {
        assert!(l.is_closed(&base));
        assert_eq!(w.cycle_edges, l.steps.iter().map(|s| s.edge).collect::<Vec<_>>());
        assert!(w.admissible);
        assert_eq!(w.root, Answer::No);
    }
    assert_eq!(r.transplanted_rotation, Some(Answer::No));
}

/// A random tree on `parents.len() + 1` vertices, vertex `i + 1` hanging
/// off `parents[i] % (i + 1)`, optionally closed into a cycle.
fn graph(parents: &[usize], close: bool) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
    if close {
        let last = parents.len();
        let back = edges[last - 1].0;
        if back != 0 {
            edges.push((last, 0));
        } else {
            edges.push((0, 0));
        }
    }
    edges
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closedness_verdict_is_the_absence_of_cycles(parents in prop::collection::vec(0usize..8, 1..7), close: bool, seed: u64) {
        let edges = graph(&parents, close);
        let base = Arc::new(make_graph(parents.len() + 1, &edges, 4).unwrap());
        let r = closedness_report(&base, 3, seed).unwrap();
        prop_assert_eq!(r.algebraically_closed_verdict, !contains_circle(&base).unwrap().has_cycle);
        if let Some(t) = &r.trials {
            prop_assert_eq!(t.with_root, t.trials);
            prop_assert!(t.max_residual < 1e-9);
        }
    }
}
