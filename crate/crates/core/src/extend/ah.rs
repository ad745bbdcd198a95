//! Membership of a lift in the algebra generated by the root coordinate:
//! pointwise Vandermonde fitting and the divided-difference test at branch
//! points.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::base::{BaseKind, SelfMap};
use crate::bundle::{assign, min_gap, solve_input, BranchPoint, MonicPolynomial, RootBundle};
use crate::perm::Perm;
use crate::{Error, Result};

use super::cole::{bundles, enumerate_lifts_between, tolerances, Bundles, DEFAULT_MAX_LIFTS};
use super::verdict::{Answer, Certificate, Lift, Verdict};

/// Jump allowance factor for fitted coefficients.
pub const JUMP_FACTOR: f64 = 50.0;
/// Fitted coefficients must stay below this multiple of `1 + max|cₖ|`.
pub const BOUND_FACTOR: f64 = 1e6;
pub const DIVERGENCE_BOUND: f64 = 1e6;
pub const CAUCHY_TOL: f64 = 1e-4;
pub const DYADIC_LEVELS: usize = 24;
const MONOTONE_LEVELS: usize = 5;

/// Coefficients `q₀, …, q_{n−1}` with `Σ q_k λ_i^k = f_i`, by Newton
/// divided differences (the Björck–Pereyra scheme).
pub fn vandermonde_solve(nodes: &[Complex64], values: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = nodes.len();
    let mut c = values.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            let d = nodes[i] - nodes[i - k];
            if d.norm() == 0.0 {
                return None;
            }
            c[i] = (c[i] - c[i - 1]) / d;
        }
    }
    // Newton form to monomial form.
    for k in (0..n.saturating_sub(1)).rev() {
        for i in k..n - 1 {
            let v = c[i + 1];
            c[i] -= nodes[k] * v;
        }
    }
    Some(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct FitRefusal {
    /// `"jump"` or `"unbounded"`.
    pub kind: String,
    pub sample: usize,
    pub neighbor: Option<usize>,
    pub coefficient: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct FitResult {
    /// Per sample, the fitted coefficients (`None` at branch-flagged samples).
    pub coeffs: Vec<Option<Vec<Complex64>>>,
    pub max_coefficient: f64,
    pub max_jump: f64,
    pub jump_bound: f64,
    pub refusal: Option<FitRefusal>,
}

impl FitResult {
    pub fn accepted(&self) -> bool {
        self.refusal.is_none()
    }
}

/// Fits `f = Σ q_k(x) λ^k` pointwise and checks the coefficients for
/// discrete continuity and boundedness.
pub fn ah_fit(a: &RootBundle, values: &[Vec<Complex64>]) -> Result<FitResult> {
    let base = &a.base;
    let n = a.degree();
    let mut coeffs = Vec::with_capacity(base.len());
    for x in 0..base.len() {
        if a.branch_flags[x] {
            coeffs.push(None);
            continue;
        }
        let q = vandermonde_solve(&a.fibers[x], &values[x]).ok_or(Error::SingularVandermonde { sample: x })?;
        coeffs.push(Some(q));
    }
    let mut osc = 0.0f64;
    let mut scale = 0.0f64;
    for c in &a.poly.coeffs {
        for e in &base.edges {
            osc = osc.max((c.values[e.tail] - c.values[e.head]).norm());
        }
        scale = scale.max(c.values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let jump_bound = JUMP_FACTOR * osc.max(1e-9 * (1.0 + scale)) * n as f64;
    let bound = BOUND_FACTOR * (1.0 + scale);
    let mut refusal = None;
    let mut max_coefficient = 0.0f64;
    let mut max_jump = 0.0f64;
    for (x, q) in coeffs.iter().enumerate() {
        let Some(q) = q else { continue };
        for (k, v) in q.iter().enumerate() {
            max_coefficient = max_coefficient.max(v.norm());
            if refusal.is_none() && !(v.norm() <= bound) {
                refusal = Some(FitRefusal {
                    kind: "unbounded".into(),
                    sample: x,
                    neighbor: None,
                    coefficient: k,
                    value: v.norm(),
                    bound,
                });
            }
        }
    }
    for e in &base.edges {
        let (Some(qa), Some(qb)) = (&coeffs[e.tail], &coeffs[e.head]) else { continue };
        for k in 0..n {
            let jump = (qa[k] - qb[k]).norm();
            max_jump = max_jump.max(jump);
            if refusal.is_none() && !(jump <= jump_bound) {
                refusal = Some(FitRefusal {
                    kind: "jump".into(),
                    sample: e.tail,
                    neighbor: Some(e.head),
                    coefficient: k,
                    value: jump,
                    bound: jump_bound,
                });
            }
        }
    }
    Ok(FitResult { coeffs, max_coefficient, max_jump, jump_bound, refusal })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SideQuotients {
    /// `-1` approaches from below, `+1` from above.
    pub side: i32,
    pub start_sample: usize,
    pub quotients: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma4Result {
    pub verdict: Finiteness,
    pub sample: usize,
    /// Base parameter of the refined branch point.
    pub parameter: f64,
    pub sides: Vec<SideQuotients>,
}

fn wrapped_offset(kind: BaseKind, from: f64, to: f64) -> f64 {
    let d = to - from;
    if kind == BaseKind::Circle {
        let t = std::f64::consts::TAU;
        let d = d.rem_euclid(t);
        if d > t / 2.0 {
            d - t
        } else {
            d
        }
    } else {
        d
    }
}

fn side_quotients(
    a: &RootBundle,
    b: &RootBundle,
    lift: &Lift,
    bp: &BranchPoint,
    u0: f64,
    side: i32,
) -> Result<Option<SideQuotients>> {
    let base = &a.base;
    let h = base.spacing().expect("one-dimensional base");
    let n = base.len();
    // First sample on this side at least half a spacing away.
    let mut x0 = bp.sample;
    let mut steps = 0;
    loop {
        let off = wrapped_offset(base.kind, u0, base.parameter(&base.samples[x0]).unwrap());
        if off * side as f64 >= 0.5 * h {
            break;
        }
        let next = x0 as i64 + side as i64;
        x0 = match base.kind {
            BaseKind::Circle => next.rem_euclid(n as i64) as usize,
            _ if next < 0 || next >= n as i64 => return Ok(None),
            _ => next as usize,
        };
        steps += 1;
        if steps > 3 {
            return Ok(None);
        }
    }
    let dist = wrapped_offset(base.kind, u0, base.parameter(&base.samples[x0]).unwrap()).abs();
    let mut fa = a.fibers[x0].clone();
    let mut fb = b.fibers[x0].clone();
    let mut g: Vec<usize> = lift.sheets[x0].clone();
    let deg = a.degree();
    // cum maps sheets at x0 to sheets at the current level.
    let mut cum = Perm::identity(deg);
    let mut levels: Vec<(f64, Vec<Complex64>, Vec<Complex64>, Vec<usize>, Perm)> = Vec::new();
    for k in 1..=DYADIC_LEVELS {
        let y = u0 + side as f64 * dist * 0.5f64.powi(k as i32);
        let loc = base.location_at_parameter(y)?;
        let na = solve_input(&a.poly.input_at(&loc)?)?;
        let nb = solve_input(&b.poly.input_at(&loc)?)?;
        let pa = assign(&fa, &na).perm;
        let pb = assign(&fb, &nb).perm;
        let inv = pa.inverse();
        g = (0..deg).map(|s| pb.apply(g[inv.apply(s)])).collect();
        cum = cum.then(&pa);
        fa = na;
        fb = nb;
        levels.push((y, fa.clone(), fb.clone(), g.clone(), cum.clone()));
    }
    let (_, last_a, _, _, last_cum) = levels.last().expect("at least one level");
    let mut pair = (0, 1);
    let mut best = f64::INFINITY;
    for i in 0..deg {
        for j in i + 1..deg {
            let d = (last_a[i] - last_a[j]).norm();
            if d < best {
                best = d;
                pair = (i, j);
            }
        }
    }
    let (i0, j0) = (last_cum.inverse().apply(pair.0), last_cum.inverse().apply(pair.1));
    let quotients = levels
        .iter()
        .map(|(y, fa, fb, g, cum)| {
            let (i, j) = (cum.apply(i0), cum.apply(j0));
            let q = (fb[g[i]] - fb[g[j]]) / (fa[i] - fa[j]);
            (*y, q.norm())
        })
        .collect();
    Ok(Some(SideQuotients { side, start_sample: x0, quotients }))
}

fn classify_side(q: &[(f64, f64)]) -> Finiteness {
    let m = q.len();
    let last = q[m - 1].1;
    if !last.is_finite() {
        return Finiteness::Inconclusive;
    }
    let growing = q[m - MONOTONE_LEVELS..].windows(2).all(|w| w[1].1 > w[0].1);
    if last > DIVERGENCE_BOUND && growing {
        return Finiteness::Divergent;
    }
    if (q[m - 1].1 - q[m - 2].1).abs() <= CAUCHY_TOL * last.max(1.0) {
        return Finiteness::Finite;
    }
    Finiteness::Inconclusive
}

/// Tracks the divided difference `(f(y,λ₁) − f(y,λ₂)) / (λ₁ − λ₂)` of a lift
/// toward a two-sheet branch point from both sides.
///
/// Quotients are compared in modulus, which makes the test independent of
/// the order of the pair.
pub fn lemma4_test(a: &RootBundle, b: &RootBundle, lift: &Lift, bp: &BranchPoint) -> Result<Lemma4Result> {
    let base = &a.base;
    if !matches!(base.kind, BaseKind::Interval | BaseKind::Circle) {
        return Err(Error::WrongBaseKind { expected: "interval or circle".into(), got: base.kind.to_string() });
    }
    let merging: usize = bp.groups.iter().map(Vec::len).sum();
    if bp.groups.len() != 1 || merging != 2 {
        return Err(Error::NotTwoSheeted { sample: bp.sample, sheets: merging });
    }
    let u0 = base.parameter(&base.coord_at(&bp.location)).expect("one-dimensional base");
    let mut sides = Vec::new();
    for side in [-1, 1] {
        if let Some(s) = side_quotients(a, b, lift, bp, u0, side)? {
            sides.push(s);
        }
    }
    let classes: Vec<Finiteness> = sides.iter().map(|s| classify_side(&s.quotients)).collect();
    let verdict = if sides.is_empty() {
        Finiteness::Inconclusive
    } else if classes.contains(&Finiteness::Divergent) {
        Finiteness::Divergent
    } else if classes.iter().all(|&c| c == Finiteness::Finite) {
        let limits: Vec<f64> = sides.iter().map(|s| s.quotients.last().unwrap().1).collect();
        let agree = limits.windows(2).all(|w| (w[0] - w[1]).abs() <= CAUCHY_TOL * w[0].max(w[1]).max(1.0));
        if agree {
            Finiteness::Finite
        } else {
            // Different one-sided limits: no continuous extension exists.
            Finiteness::Divergent
        }
    } else {
        Finiteness::Inconclusive
    };
    Ok(Lemma4Result { verdict, sample: bp.sample, parameter: u0, sides })
}

/// Lemma-4 results for every two-sheet branch point of `a`.
pub fn branch_tests(a: &RootBundle, b: &RootBundle, lift: &Lift) -> Result<Vec<Lemma4Result>> {
    if !matches!(a.base.kind, BaseKind::Interval | BaseKind::Circle) {
        return Ok(Vec::new());
    }
    a.branch_points
        .iter()
        .filter(|bp| bp.groups.len() == 1 && bp.groups[0].len() == 2)
        .map(|bp| lemma4_test(a, b, lift, bp))
        .collect()
}

/// Decides extension to the Arens-Hoffman extension from the bundles.
pub fn decide_ah(a: &RootBundle, b: &RootBundle, max_count: usize) -> Result<Verdict> {
    let (lifts, truncated) = enumerate_lifts_between(a, b, max_count)?;
    let verdict = |answer, certificate, witness| Verdict {
        answer,
        certificate,
        witness,
        witness_ref: None,
        tolerances: ah_tolerances(a),
        resolution: a.base.len(),
    };
    if lifts.is_empty() {
        return Ok(verdict(Answer::No, Certificate::NoLift, None));
    }
    let mut divergence = None;
    let mut refusal = None;
    let mut inconclusive = false;
    for (index, lift) in lifts.iter().enumerate() {
        let fit = ah_fit(a, &lift.values)?;
        let tests = branch_tests(a, b, lift)?;
        let all_finite = tests.iter().all(|t| t.verdict == Finiteness::Finite);
        if fit.accepted() && all_finite {
            return Ok(verdict(
                Answer::Yes,
                Certificate::Fit {
                    lift_index: index,
                    max_coefficient: fit.max_coefficient,
                    max_jump: fit.max_jump,
                    branch_points_tested: tests.len(),
                },
                Some(lift.clone()),
            ));
        }
        inconclusive |= tests.iter().any(|t| t.verdict == Finiteness::Inconclusive);
        if divergence.is_none() {
            if let Some(t) = tests.iter().find(|t| t.verdict == Finiteness::Divergent) {
                let side = t
                    .sides
                    .iter()
                    .find(|s| classify_side(&s.quotients) == Finiteness::Divergent)
                    .or(t.sides.first())
                    .expect("divergent result has a side");
                divergence = Some(Certificate::DividedDifference {
                    lift_index: index,
                    sample: t.sample,
                    parameter: t.parameter,
                    last_quotient: side.quotients.last().unwrap().1,
                    side: if side.side < 0 { "below".into() } else { "above".into() },
                });
            }
        }
        if refusal.is_none() {
            if let Some(r) = &fit.refusal {
                refusal = Some(Certificate::FitRefused { lift_index: index, reason: json!(r) });
            }
        }
    }
    if truncated || inconclusive {
        let reason = if truncated { "lift enumeration truncated" } else { "a divided-difference test was inconclusive" };
        return Ok(verdict(Answer::Inconclusive, Certificate::Undecided { reason: reason.into() }, None));
    }
    let certificate = divergence
        .or(refusal)
        .unwrap_or(Certificate::Undecided { reason: "no lift passed".into() });
    Ok(verdict(Answer::No, certificate, None))
}

fn ah_tolerances(a: &RootBundle) -> std::collections::BTreeMap<String, f64> {
    let mut t = tolerances(a);
    t.insert("fit_jump_factor".into(), JUMP_FACTOR);
    t.insert("fit_bound_factor".into(), BOUND_FACTOR);
    t.insert("divergence_bound".into(), DIVERGENCE_BOUND);
    t.insert("cauchy_tol".into(), CAUCHY_TOL);
    t
}

/// Whether `T` extends to the Arens-Hoffman extension.
pub fn ah_extendable(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<Verdict> {
    let Bundles { source, target } = bundles(p, map)?;
    decide_ah(&source, &target, DEFAULT_MAX_LIFTS)
}

/// Smallest root gap at a branch point, for diagnostics.
pub fn branch_gap(a: &RootBundle, bp: &BranchPoint) -> Result<f64> {
    Ok(min_gap(&solve_input(&a.poly.input_at(&bp.location)?)?))
}
