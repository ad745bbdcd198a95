//! Root existence for polynomials over a base, and the cycle criterion for
//! algebraic closedness at graph scale.

use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::{make_graph, BaseKind, BaseSpace, Coord, Loop, SelfMap, DEFAULT_CONTINUITY_BOUND};
use crate::bundle::{build_bundle, is_admissible, pullback, MonicPolynomial, RootBundle, DEFAULT_WINDOW, DEFAULT_ZERO_TOL};
use crate::extend::{decide_lift, Answer, Verdict};
use crate::funcspec::{parse, SampledFunction};
use crate::{Error, Result};

/// Roots of a quintic over the circle whose bundle splits into a 2-strip
/// and a 3-strip touching once at `θ = π`. Rotating the circle by `π`
/// admits no lift.
pub const STRIP_QUINTIC_ROOTS: [&str; 5] = [
    "1 + 1i - 1i*exp(2i*pi*((theta + pi - 1)/(4*pi - 2)))",
    "piecewise(theta <= pi - 1, 1 + 1i - 1i*exp(2i*pi*((theta + 3*pi - 1)/(4*pi - 2))), \
     piecewise(theta <= pi + 1, (theta - pi)^2, 1 + 1i - 1i*exp(2i*pi*((theta - pi - 1)/(4*pi - 2)))))",
    "-1 - 1i + 1i*exp(2i*pi*((theta + pi - 1)/(6*pi - 2)))",
    "-1 - 1i + 1i*exp(2i*pi*((theta + 3*pi - 1)/(6*pi - 2)))",
    "piecewise(theta <= pi - 1, -1 - 1i + 1i*exp(2i*pi*((theta + 5*pi - 1)/(6*pi - 2))), \
     piecewise(theta <= pi + 1, -(theta - pi)^2, -1 - 1i + 1i*exp(2i*pi*((theta - pi - 1)/(6*pi - 2)))))",
];

/// Whether a bundle has a continuous section, found as a lift from the
/// one-sheet bundle `t − 0`. The witness value is the section.
pub fn section(bundle: &RootBundle) -> Result<Verdict> {
    let trivial = build_bundle(Arc::new(MonicPolynomial::constant(bundle.base.clone(), &[Complex64::new(0.0, 0.0)])?))?;
    decide_lift(&trivial, bundle, 1)
}

/// Whether `p` has a root in the continuous functions on its base.
pub fn has_root(p: &Arc<MonicPolynomial>) -> Result<Verdict> {
    let bundle = build_bundle(p.clone())?;
    let report = is_admissible(&bundle, DEFAULT_ZERO_TOL, DEFAULT_WINDOW);
    if !report.admissible {
        return Err(Error::Inadmissible(format!("degree {} or vanishing discriminant", report.degree)));
    }
    section(&bundle)
}

/// The sampled root of a positive `has_root` verdict.
pub fn root_values(verdict: &Verdict) -> Option<Vec<Complex64>> {
    verdict.witness.as_ref().map(|w| w.values.iter().map(|v| v[0]).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleWitness {
    /// Sample-level edges of the closed walk.
    pub cycle_edges: Vec<usize>,
    pub cycle_samples: Vec<usize>,
    /// `t² − g` with `g` of unit modulus winding once along the cycle.
    pub polynomial: String,
    pub admissible: bool,
    /// Section search on the witness polynomial.
    pub root: Answer,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub trials: usize,
    pub with_root: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphReport {
    pub has_cycle: bool,
    pub independent_cycles: usize,
    /// Edges of the first cycle, when present.
    pub witness_cycle: Option<Vec<usize>>,
    pub algebraically_closed_verdict: bool,
    pub witnesses: Vec<CycleWitness>,
    /// Lift search for the strip quintic and rotation by half the cycle,
    /// transplanted onto the first cycle.
    pub transplanted_rotation: Option<Answer>,
    /// Samples per edge of the graph the transplant ran on.
    pub transplant_samples_per_edge: Option<usize>,
    pub trials: Option<TrialSummary>,
}

fn require_graph(base: &BaseSpace) -> Result<()> {
    if base.kind != BaseKind::Graph {
        return Err(Error::WrongBaseKind { expected: "graph".into(), got: base.kind.to_string() });
    }
    Ok(())
}

pub fn contains_circle(base: &BaseSpace) -> Result<GraphReport> {
    require_graph(base)?;
    let has_cycle = !base.loop_basis.is_empty();
    Ok(GraphReport {
        has_cycle,
        independent_cycles: base.loop_basis.len(),
        witness_cycle: base.loop_basis.first().map(|l| l.steps.iter().map(|s| s.edge).collect()),
        algebraically_closed_verdict: !has_cycle,
        witnesses: Vec::new(),
        transplanted_rotation: None,
        transplant_samples_per_edge: None,
        trials: None,
    })
}

/// Angle along `walk` for every sample: cycle samples get `2πk/L`, the rest
/// inherit the angle of the nearest cycle sample.
fn cycle_angles(base: &BaseSpace, walk: &Loop) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut visited = walk.samples(base)?;
    visited.pop();
    let len = visited.len();
    let mut angle = vec![f64::NAN; base.len()];
    let mut owner = vec![usize::MAX; base.len()];
    let mut queue = VecDeque::new();
    for (k, &x) in visited.iter().enumerate() {
        angle[x] = TAU * k as f64 / len as f64;
        owner[x] = k;
        queue.push_back(x);
    }
    while let Some(x) = queue.pop_front() {
        for &(_, y) in base.neighbors(x) {
            if owner[y] == usize::MAX {
                owner[y] = owner[x];
                angle[y] = angle[x];
                queue.push_back(y);
            }
        }
    }
    Ok((angle, owner))
}

fn cycle_witness(base: &Arc<BaseSpace>, walk: &Loop) -> Result<CycleWitness> {
    let (angle, _) = cycle_angles(base, walk)?;
    let g: Vec<Complex64> = angle.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let coeffs = vec![
        SampledFunction::new(base.clone(), g.iter().map(|z| -z).collect())?,
        SampledFunction::constant(base.clone(), Complex64::new(0.0, 0.0)),
    ];
    let p = Arc::new(MonicPolynomial::from_coeffs(base.clone(), coeffs)?);
    let bundle = build_bundle(p)?;
    let admissible = is_admissible(&bundle, DEFAULT_ZERO_TOL, DEFAULT_WINDOW).admissible;
    let mut cycle_samples = walk.samples(base)?;
    cycle_samples.pop();
    Ok(CycleWitness {
        cycle_edges: walk.steps.iter().map(|s| s.edge).collect(),
        cycle_samples,
        polynomial: "t^2 - exp(i*angle along cycle)".into(),
        admissible,
        root: section(&bundle)?.answer,
    })
}

/// Lift search for the strip quintic pulled back along the cycle angle,
/// under rotation of the cycle by half a turn.
pub fn transplanted_rotation(base: &Arc<BaseSpace>, walk: &Loop) -> Result<Answer> {
    let (angle, owner) = cycle_angles(base, walk)?;
    let mut visited = walk.samples(base)?;
    visited.pop();
    let len = visited.len();
    if len % 2 != 0 {
        return Err(Error::InvalidBase("half-turn rotation needs a cycle with an even number of samples".into()));
    }
    let exprs = STRIP_QUINTIC_ROOTS.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
    let roots = exprs
        .iter()
        .map(|e| {
            let values = angle
                .iter()
                .map(|&a| e.eval_with(&|v| (v == "theta").then_some(a)))
                .collect::<Result<Vec<_>>>()?;
            SampledFunction::new(base.clone(), values)
        })
        .collect::<Result<Vec<_>>>()?;
    let p = Arc::new(MonicPolynomial::from_roots(base.clone(), roots)?);
    let images = owner.iter().map(|&k| base.sample_location(visited[(k + len / 2) % len])).collect();
    let map = Arc::new(SelfMap::from_table(base.clone(), images, DEFAULT_CONTINUITY_BOUND)?);
    let a = build_bundle(p.clone())?;
    let b = pullback(&p, &map)?;
    Ok(decide_lift(&a, &b, 1)?.answer)
}

/// Minimum cycle length for the transplanted quintic; its roots move too
/// far between samples on coarser cycles to be matched.
pub const TRANSPLANT_CYCLE_SAMPLES: usize = 256;

/// The graph itself when its first cycle has at least
/// [`TRANSPLANT_CYCLE_SAMPLES`] samples (an even number), otherwise the same
/// graph with finer, even subdivision.
fn refined(base: &Arc<BaseSpace>) -> Result<Arc<BaseSpace>> {
    let len = base.loop_basis[0].steps.len();
    if len >= TRANSPLANT_CYCLE_SAMPLES && len.is_multiple_of(2) {
        return Ok(base.clone());
    }
    let k = base.samples_per_edge().expect("graph base");
    let comb = base.combinatorial_edges().expect("graph base");
    let per_cycle = (len / k).max(1);
    let mut fine = TRANSPLANT_CYCLE_SAMPLES.div_ceil(per_cycle).max(k);
    fine += fine % 2;
    let vertices = comb.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0) + 1;
    Ok(Arc::new(make_graph(vertices, comb, fine)?))
}

/// A random quadratic on a graph: coefficients interpolate random vertex
/// values along each edge plus a random bump inside the edge.
pub fn random_quadratic(base: &Arc<BaseSpace>, rng: &mut ChaCha8Rng) -> Result<Arc<MonicPolynomial>> {
    let comb = base.combinatorial_edges().ok_or_else(|| Error::WrongBaseKind {
        expected: "graph".into(),
        got: base.kind.to_string(),
    })?;
    let vertices = comb.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0) + 1;
    let draw = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let mut coeffs = Vec::new();
    for _ in 0..2 {
        let at_vertex: Vec<Complex64> = (0..vertices).map(|_| draw(rng)).collect();
        let bump: Vec<Complex64> = comb.iter().map(|_| draw(rng)).collect();
        let values = base
            .samples
            .iter()
            .map(|c| match *c {
                Coord::Graph { edge, s } => {
                    let (u, v) = comb[edge];
                    at_vertex[u] * (1.0 - s) + at_vertex[v] * s + bump[edge] * (4.0 * s * (1.0 - s))
                }
                _ => unreachable!("graph samples carry graph coordinates"),
            })
            .collect();
        coeffs.push(SampledFunction::new(base.clone(), values)?);
    }
    Ok(Arc::new(MonicPolynomial::from_coeffs(base.clone(), coeffs)?))
}

fn residual(p: &MonicPolynomial, x: usize, r: Complex64) -> f64 {
    let c = p.coeffs_at_sample(x);
    let mut v = Complex64::new(1.0, 0.0);
    for k in (0..c.len()).rev() {
        v = v * r + c[k];
    }
    v.norm()
}

/// Random-trial section search; trial `i` uses stream `i` of the seed.
pub fn root_trials(base: &Arc<BaseSpace>, trials: usize, seed: u64) -> Result<TrialSummary> {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Option<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            // Redraw until admissible; generic draws almost always are.
            for _ in 0..16 {
                let p = random_quadratic(base, &mut rng)?;
                match has_root(&p) {
                    Ok(v) => {
                        return Ok(root_values(&v).map(|r| {
                            r.iter().enumerate().map(|(x, &z)| residual(&p, x, z)).fold(0.0, f64::max)
                        }))
                    }
                    Err(Error::Inadmissible(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::Inadmissible("no admissible draw in 16 attempts".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary {
        seed,
        trials,
        with_root: outcomes.iter().filter(|o| o.is_some()).count(),
        max_residual: outcomes.iter().flatten().fold(0.0, |m, &r| m.max(r)),
    })
}

/// Cycle witnesses when the graph has cycles, random root trials when it
/// is a tree.
pub fn closedness_report(base: &Arc<BaseSpace>, trials: usize, seed: u64) -> Result<GraphReport> {
    let mut report = contains_circle(base)?;
    if report.has_cycle {
        report.witnesses = base.loop_basis.iter().map(|l| cycle_witness(base, l)).collect::<Result<_>>()?;
        let fine = refined(base)?;
        report.transplanted_rotation = Some(transplanted_rotation(&fine, &fine.loop_basis[0])?);
        report.transplant_samples_per_edge = fine.samples_per_edge();
        report.algebraically_closed_verdict = false;
    } else {
        let summary = root_trials(base, trials, seed)?;
        report.algebraically_closed_verdict = summary.with_root == summary.trials;
        report.trials = Some(summary);
    }
    Ok(report)
}
