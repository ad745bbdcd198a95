//! Existence of continuous lifts `f` on the root surface of `p` with
//! `(x, f(x, λ))` on the root surface of `p^(T)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::base::{BaseKind, SelfMap};
use crate::bundle::{build_bundle, is_admissible, pullback, MonicPolynomial, RootBundle, DEFAULT_WINDOW, DEFAULT_ZERO_TOL};
use crate::monodromy::{monodromy, strips, StripDecomposition};
use crate::{Error, Result};

use super::csp::{validate_lift, LiftProblem};
use super::verdict::{Answer, Certificate, Lift, Verdict};

pub const DEFAULT_MAX_LIFTS: usize = 256;

/// Source and target bundles of an extension problem.
pub struct Bundles {
    pub source: RootBundle,
    pub target: RootBundle,
}

/// Builds `A = X_p` and `B = X_{p^(T)}` after checking admissibility.
pub fn bundles(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<Bundles> {
    let source = build_bundle(p.clone())?;
    let report = is_admissible(&source, DEFAULT_ZERO_TOL, DEFAULT_WINDOW);
    if !report.admissible {
        return Err(Error::Inadmissible(if report.degree < 2 {
            format!("degree {} is below 2", report.degree)
        } else {
            format!("discriminant vanishes on {} run(s) of samples", report.offending_runs.len())
        }));
    }
    let target = pullback(p, map)?;
    Ok(Bundles { source, target })
}

pub(crate) fn tolerances(a: &RootBundle) -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    t.insert("branch_tol".to_string(), a.options.branch_tol);
    t.insert("root_tol".to_string(), crate::bundle::ROOT_TOL);
    t.insert("matching_margin".to_string(), a.options.margin);
    t.insert("admissibility_zero_tol".to_string(), DEFAULT_ZERO_TOL);
    t
}

/// Strips of `A` whose winding no strip of `B` divides.
fn divisibility_failure(sa: &StripDecomposition, sb: &StripDecomposition) -> Option<usize> {
    let wb = sb.windings();
    sa.windings().into_iter().find(|&a| !wb.iter().any(|&b| a % b == 0))
}

/// Pairs (target strip, source strip) where the target strip is the only
/// divisibility-compatible target of that source strip, provided every
/// target strip is covered this way.
fn forced_cover(sa: &StripDecomposition, sb: &StripDecomposition) -> Option<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (j, tb) in sb.strips.iter().enumerate() {
        let forcing = sa.strips.iter().enumerate().find(|(_, ta)| {
            let compatible: Vec<usize> =
                (0..sb.strips.len()).filter(|&k| ta.winding % sb.strips[k].winding == 0).collect();
            compatible == vec![j] && ta.winding % tb.winding == 0
        });
        pairs.push((j, forcing?.0));
    }
    Some(pairs)
}

fn fiber_count_certificate(a: &RootBundle, b: &RootBundle) -> Option<Certificate> {
    if a.base.kind != BaseKind::Circle {
        return None;
    }
    let (sa, sb) = (strips(a).ok()?, strips(b).ok()?);
    let forced_pairs = forced_cover(&sa, &sb)?;
    let tol = a.options.branch_tol;
    (0..a.base.len()).find_map(|x| {
        let (ca, cb) = (a.distinct_count(x, tol), b.distinct_count(x, tol));
        (ca < cb).then(|| Certificate::FiberCount {
            sample: x,
            coordinate: a.base.samples[x].components(),
            source_distinct: ca,
            target_distinct: cb,
            tolerance: tol,
            source_windings: sa.windings(),
            target_windings: sb.windings(),
            forced_pairs: forced_pairs.clone(),
        })
    })
}

fn validated(a: &RootBundle, b: &RootBundle, problem: &LiftProblem, solution: &[usize]) -> Result<Lift> {
    let lift = problem.witness(solution);
    validate_lift(a, b, &lift).map_err(|e| Error::Polynomial(format!("lift failed validation: {e}")))?;
    Ok(lift)
}

/// All lifts up to `max_count`, each validated.
pub fn enumerate_lifts_between(a: &RootBundle, b: &RootBundle, max_count: usize) -> Result<(Vec<Lift>, bool)> {
    let problem = LiftProblem::new(a, b);
    let found = problem.search(max_count, false);
    let lifts = found.solutions.iter().map(|s| validated(a, b, &problem, s)).collect::<Result<_>>()?;
    Ok((lifts, found.truncated))
}

/// Decides lift existence between two bundles on one base.
pub fn decide_lift(a: &RootBundle, b: &RootBundle, max_count: usize) -> Result<Verdict> {
    let verdict = |answer, certificate, witness| Verdict {
        answer,
        certificate,
        witness,
        witness_ref: None,
        tolerances: tolerances(a),
        resolution: a.base.len(),
    };
    if a.base.kind == BaseKind::Circle && a.is_branch_free() && b.is_branch_free() {
        let (sa, sb) = (strips(a)?, strips(b)?);
        if let Some(w) = divisibility_failure(&sa, &sb) {
            return Ok(verdict(
                Answer::No,
                Certificate::StripDivisibility { source_winding: w, target_windings: sb.windings() },
                None,
            ));
        }
    }
    let problem = LiftProblem::new(a, b);
    let found = problem.search(max_count.max(1), false);
    if let Some(first) = found.solutions.first() {
        let lift = validated(a, b, &problem, first)?;
        for s in &found.solutions[1..] {
            validated(a, b, &problem, s)?;
        }
        return Ok(verdict(
            Answer::Yes,
            Certificate::Lift { solution_count: found.solutions.len(), truncated: found.truncated },
            Some(lift),
        ));
    }
    let certificate = fiber_count_certificate(a, b).unwrap_or_else(|| {
        let pairs = match (monodromy(a), monodromy(b)) {
            (Ok(ma), Ok(mb)) => ma.iter().zip(&mb).map(|(x, y)| (x.images().to_vec(), y.images().to_vec())).collect(),
            _ => Vec::new(),
        };
        Certificate::CspExhausted {
            variables: problem.variable_count(),
            constraints: problem.constraint_count(),
            nodes: found.nodes,
            monodromy: pairs,
        }
    });
    Ok(verdict(Answer::No, certificate, None))
}

/// Whether `T` extends to the Cole extension, i.e. a lift exists.
pub fn cole_extendable(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<Verdict> {
    let Bundles { source, target } = bundles(p, map)?;
    decide_lift(&source, &target, DEFAULT_MAX_LIFTS)
}

pub fn enumerate_lifts(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>, max_count: usize) -> Result<Vec<Lift>> {
    let Bundles { source, target } = bundles(p, map)?;
    Ok(enumerate_lifts_between(&source, &target, max_count)?.0)
}

/// Re-derives a negative certificate from the bundles. Counts are redone
/// at a tenth of the recorded tolerance and strips are recomputed.
pub fn recheck_certificate(a: &RootBundle, b: &RootBundle, certificate: &Certificate) -> bool {
    match certificate {
        Certificate::StripDivisibility { source_winding, target_windings } => {
            let (Ok(sa), Ok(sb)) = (strips(a), strips(b)) else { return false };
            sb.windings() == *target_windings
                && sa.windings().contains(source_winding)
                && !sb.windings().iter().any(|w| source_winding % w == 0)
        }
        Certificate::FiberCount { sample, source_distinct, target_distinct, tolerance, forced_pairs, .. } => {
            let (Ok(sa), Ok(sb)) = (strips(a), strips(b)) else { return false };
            let strict = 0.1 * tolerance;
            let ca = a.distinct_count(*sample, strict);
            let cb = b.distinct_count(*sample, strict);
            ca == *source_distinct && cb == *target_distinct && ca < cb && forced_cover(&sa, &sb).as_ref() == Some(forced_pairs)
        }
        Certificate::CspExhausted { .. } => LiftProblem::new(a, b).search(1, true).solutions.is_empty(),
        Certificate::NoLift => LiftProblem::new(a, b).search(1, true).solutions.is_empty(),
        _ => false,
    }
}
