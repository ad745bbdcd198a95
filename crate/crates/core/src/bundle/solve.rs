//! Simultaneous root finding (Aberth–Ehrlich) with Newton polishing.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::poly::FiberInput;
use crate::{Error, Result};

/// Residual bound after polishing, for coefficients of magnitude up to 10.
pub const ROOT_TOL: f64 = 1e-9;
/// Real parts closer than this are ordered by imaginary part.
pub const ORDER_TIE: f64 = 1e-12;

const MAX_ITER: usize = 800;

/// Value and derivative of the monic polynomial with lower coefficients `c`.
pub fn eval_monic(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// `|p(z)|` scaled so coefficients of magnitude up to 10 are judged absolutely.
pub fn scaled_residual(c: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = eval_monic(c, z);
    let r = z.norm();
    let mut scale = r.powi(c.len() as i32);
    for (k, ck) in c.iter().enumerate() {
        scale = scale.max(ck.norm() * r.powi(k as i32));
    }
    p.norm() / (scale / 10.0).max(1.0)
}

/// Sorts lexicographically by `(Re, Im)`; real parts within [`ORDER_TIE`]
/// of their neighbor count as equal.
pub fn canonical_sort(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)));
    let mut start = 0;
    while start < roots.len() {
        let mut end = start + 1;
        while end < roots.len() && roots[end].re - roots[end - 1].re <= ORDER_TIE {
            end += 1;
        }
        roots[start..end].sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal));
        start = end;
    }
}

fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    // Cauchy bound on root moduli.
    let radius = 1.0 + c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let center = -c[n - 1] / n as f64;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();
    for _ in 0..MAX_ITER {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval_monic(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        sum += d.inv();
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

fn polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = eval_monic(c, z).0.norm();
    for _ in 0..8 {
        let (p, dp) = eval_monic(c, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let r = eval_monic(c, next).0.norm();
        if !(r < best) {
            break;
        }
        z = next;
        best = r;
    }
    z
}

/// All roots of `t^n + c_{n−1}t^{n−1} + … + c₀`, with multiplicity, in
/// canonical order.
pub fn solve_fiber(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len();
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { sample: usize::MAX });
    }
    let mut roots = match n {
        0 => Vec::new(),
        1 => vec![-c[0]],
        _ => aberth(c).into_iter().map(|z| polish(c, z)).collect(),
    };
    let worst = roots.iter().map(|&z| scaled_residual(c, z)).fold(0.0, f64::max);
    if !(worst < ROOT_TOL) {
        return Err(Error::NonConvergent { iterations: MAX_ITER, residual: worst });
    }
    canonical_sort(&mut roots);
    Ok(roots)
}

/// Fiber for a solver input. Closed-form roots are used as given after a
/// residual check against their expanded coefficients.
pub fn solve_input(input: &FiberInput) -> Result<Vec<Complex64>> {
    match input {
        FiberInput::Coeffs(c) => solve_fiber(c),
        FiberInput::Roots(r) => {
            let mut roots = r.clone();
            let c = input.coefficients();
            let worst = roots.iter().map(|&z| scaled_residual(&c, z)).fold(0.0, f64::max);
            if !(worst < ROOT_TOL) {
                return Err(Error::NonConvergent { iterations: 0, residual: worst });
            }
            canonical_sort(&mut roots);
            Ok(roots)
        }
    }
}

/// Smallest pairwise distance within a fiber (infinite for one root).
pub fn min_gap(fiber: &[Complex64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..fiber.len() {
        for j in i + 1..fiber.len() {
            g = g.min((fiber[i] - fiber[j]).norm());
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn simple_quadratics() {
        assert_eq!(solve_fiber(&[re(-1.0), re(0.0)]).unwrap(), vec![re(-1.0), re(1.0)]);
        let z = solve_fiber(&[re(0.0), re(0.0)]).unwrap();
        assert!(z.iter().all(|r| r.norm() < 1e-8));
        let z = solve_fiber(&[re(-16.0), re(0.0)]).unwrap();
        assert!((z[0] - re(-4.0)).norm() < 1e-12 && (z[1] - re(4.0)).norm() < 1e-12);
    }

    #[test]
    fn ties_ordered_by_imaginary_part() {
        let mut v = vec![Complex64::new(1e-13, 1.0), Complex64::new(0.0, -1.0), re(-1.0)];
        canonical_sort(&mut v);
        assert_eq!(v, vec![re(-1.0), Complex64::new(0.0, -1.0), Complex64::new(1e-13, 1.0)]);
    }

    #[test]
    fn multiple_roots_converge() {
        // (t-1)^3 (t+2)
        let c = super::super::poly::expand_roots(&[re(1.0), re(1.0), re(1.0), re(-2.0)]);
        let z = solve_fiber(&c).unwrap();
        assert!((z[0] - re(-2.0)).norm() < 1e-9);
        assert!(z[1..].iter().all(|r| (r - re(1.0)).norm() < 1e-4));
    }

    proptest! {
        #[test]
        fn residuals_below_tolerance(
            parts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..=6)
        ) {
            let c: Vec<Complex64> = parts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let z = solve_fiber(&c).unwrap();
            prop_assert_eq!(z.len(), c.len());
            for r in z {
                prop_assert!(eval_monic(&c, r).0.norm() < ROOT_TOL * 10f64.powi(c.len() as i32));
                prop_assert!(scaled_residual(&c, r) < ROOT_TOL);
            }
        }
    }
}
