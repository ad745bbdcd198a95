#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rootsurf::base::{BaseSpace, SelfMap};
use rootsurf::bundle::MonicPolynomial;
use rootsurf::cli::{build_map, build_polynomial, Scenario};
use rootsurf::funcspec::parse;
use rootsurf::Complex64;

/// Polynomial and self-map of a builtin scenario at `n` samples.
pub fn builtin(name: &str, n: usize) -> (Arc<MonicPolynomial>, Arc<SelfMap>) {
    let s = Scenario::builtin(name).unwrap().with_samples(n);
    let base = s.build_base().unwrap();
    let p = build_polynomial(s.polynomial.as_ref().unwrap(), &base).unwrap();
    let map = build_map(s.map.as_ref(), &base).unwrap();
    (p, map)
}

fn complex(rng: &mut ChaCha8Rng) -> String {
    format!("({} + ({})*1i)", rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// A random trigonometric coefficient `a + b e^{iu} + c e^{−iu}` in the
/// base's scalar variable, or a random quadratic in `x` on intervals.
pub fn random_coefficient(base: &BaseSpace, rng: &mut ChaCha8Rng) -> String {
    let (a, b, c) = (complex(rng), complex(rng), complex(rng));
    match base.kind.variables()[0] {
        "theta" => format!("{a} + {b}*exp(1i*theta) + {c}*exp(-1i*theta)"),
        _ => format!("{a} + {b}*x + {c}*x^2"),
    }
}

pub fn random_polynomial(base: &Arc<BaseSpace>, degree: usize, rng: &mut ChaCha8Rng) -> Arc<MonicPolynomial> {
    let exprs = (0..degree).map(|_| parse(&random_coefficient(base, rng)).unwrap()).collect();
    Arc::new(MonicPolynomial::from_coeff_exprs(base.clone(), exprs).unwrap())
}

/// `θ ↦ dθ + ε sin θ + c` with `d ∈ {−2, …, 2}`.
pub fn random_circle_map(base: &Arc<BaseSpace>, rng: &mut ChaCha8Rng) -> Arc<SelfMap> {
    let d: i32 = rng.gen_range(-2..=2);
    let eps: f64 = rng.gen_range(0.0..0.5);
    let c: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let e = parse(&format!("({d})*theta + {eps}*sin(theta) + {c}")).unwrap();
    Arc::new(SelfMap::from_exprs(base.clone(), vec![e], d.abs() as f64 + 2.0).unwrap())
}

pub fn max_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
