//! Expression language for coefficient functions and self-maps, and the
//! sampled functions obtained by evaluating expressions on a base.

mod expr;
mod parser;
mod sampled;

pub use expr::{BinOp, CmpOp, Expr, Func, VARIABLES};
pub use parser::parse;
pub use sampled::{eval_at, evaluate, SampledFunction};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::base::{make_circle, make_interval, Coord, Location};
    use crate::Error;

    const R: &str = "(3*x-1)*(3*x-2)^2";

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn evaluates_cubic() {
        let e = parse(R).unwrap();
        assert_eq!(e.eval_coord(&Coord::Interval(0.0)).unwrap(), Complex64::new(-4.0, 0.0));
        let zero = parse("theta - theta").unwrap();
        assert_eq!(zero.eval_coord(&Coord::Circle(1.3)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reports_duplicated_operator() {
        match parse("(3*x-1)*(3*x-2)^^2") {
            Err(Error::Syntax { line: 1, column: 17, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_positions_and_identifiers() {
        assert!(matches!(parse("x +\n  foo"), Err(Error::UnknownIdentifier { line: 2, column: 3, .. })));
        assert!(matches!(parse("sin(x, x)"), Err(Error::Arity { expected: 1, got: 2, .. })));
        assert!(matches!(parse("piecewise(x <= 1, 2)"), Err(Error::Arity { expected: 3, got: 2, .. })));
        assert!(matches!(parse("x^1.5"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("piecewise(x <= x, 1, 2)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x x"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn sampled_values() {
        let b = Arc::new(make_interval(4).unwrap());
        let one = evaluate(&parse("1+0i").unwrap(), &b).unwrap();
        assert!(one.values.iter().all(|&z| z == Complex64::new(1.0, 0.0)));
        let r = evaluate(&parse(R).unwrap(), &b).unwrap();
        let want = [-4.0, 0.0, 0.0, 2.0];
        for (z, w) in r.values.iter().zip(want) {
            assert!(close(*z, Complex64::new(w, 0.0)), "{z} vs {w}");
        }
        let c = Arc::new(make_circle(4).unwrap());
        let u = evaluate(&parse("exp(1i*theta)").unwrap(), &c).unwrap();
        let want = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()];
        for (z, w) in u.values.iter().zip(want) {
            assert!(close(*z, w));
        }
    }

    #[test]
    fn mismatches_and_non_finite() {
        let c = Arc::new(make_circle(4).unwrap());
        assert!(matches!(evaluate(&parse("x").unwrap(), &c), Err(Error::VariableMismatch { .. })));
        let b = Arc::new(make_interval(3).unwrap());
        assert!(matches!(evaluate(&parse("1/x").unwrap(), &b), Err(Error::NonFinite { sample: 0 })));
    }

    #[test]
    fn exact_evaluation_at_locations() {
        let b = make_interval(5).unwrap();
        let x = parse("x").unwrap();
        assert_eq!(eval_at(&x, &b, &Location { edge: 1, t: 0.5 }).unwrap(), Complex64::new(0.375, 0.0));
        let r = parse(R).unwrap();
        assert!(r.eval_coord(&Coord::Interval(2.0 / 3.0)).unwrap().norm() < 1e-15);
        let c = make_circle(4).unwrap();
        let u = parse("exp(1i*theta)").unwrap();
        let z = eval_at(&u, &c, &Location { edge: 1, t: 1.0 }).unwrap();
        assert!(close(z, Complex64::new(-1.0, 0.0)));
        assert!(close(u.eval_coord(&Coord::Circle(PI)).unwrap(), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn evaluate_matches_eval_at() {
        let b = Arc::new(make_circle(17).unwrap());
        let e = parse("piecewise(theta <= pi, sqrt(pi - theta), cos(theta)^3 - 2i)").unwrap();
        let f = evaluate(&e, &b).unwrap();
        for i in 0..b.len() {
            let loc = b.sample_location(i);
            assert_eq!(eval_at(&e, &b, &loc).unwrap(), f.values[i]);
        }
    }

    #[test]
    fn principal_square_root_ignores_zero_sign() {
        let a = parse("sqrt(-4)").unwrap().eval_const().unwrap();
        let b = parse("sqrt(-(4+0i))").unwrap().eval_const().unwrap();
        assert_eq!(a, Complex64::new(0.0, 2.0));
        assert_eq!(a, b);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|k| Expr::Real(k as f64 / 8.0)),
            (0u32..100).prop_map(|k| Expr::Imag(k as f64 / 4.0)),
            Just(Expr::Pi),
            prop::sample::select(vec!["x", "theta", "s"]).prop_map(|v| Expr::Var(v.into())),
        ];
        leaf.prop_recursive(5, 48, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone(), prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]))
                    .prop_map(|(a, b, op)| Expr::Bin(op, Box::new(a), Box::new(b))),
                (inner.clone(), 0u32..5).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
                (inner.clone(), prop::sample::select(vec![Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs]))
                    .prop_map(|(a, f)| Expr::Call(f, Box::new(a))),
                (inner.clone(), inner, 0u32..7, any::<bool>()).prop_map(|(a, b, c, le)| Expr::Piecewise {
                    var: "x".into(),
                    op: if le { CmpOp::Le } else { CmpOp::Ge },
                    bound: Box::new(Expr::Real(c as f64 / 2.0)),
                    then: Box::new(a),
                    otherwise: Box::new(b),
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_print_is_stable(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
        }

        #[test]
        fn evaluation_is_deterministic(e in arb_expr(), x in 0.0f64..1.0) {
            let lookup = |v: &str| match v { "x" | "theta" | "s" => Some(x), _ => None };
            let a = e.eval_with(&lookup).unwrap();
            let b = e.eval_with(&lookup).unwrap();
            prop_assert!(a.re.to_bits() == b.re.to_bits() || (a.re.is_nan() && b.re.is_nan()));
            prop_assert!(a.im.to_bits() == b.im.to_bits() || (a.im.is_nan() && b.im.is_nan()));
        }
    }
}
