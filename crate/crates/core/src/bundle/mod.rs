//! The discretized root surface `X_p = {(x, λ) : p(x)(λ) = 0}`: root fibers
//! at every sample, matched along edges into sheets, with branch points
//! located by refinement between samples.

mod discriminant;
mod matching;
mod poly;
mod solve;

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use discriminant::{
    determinant, discriminant, discriminant_by_resultant, discriminant_of_roots, is_admissible, resultant,
    AdmissibilityReport, DEFAULT_WINDOW, DEFAULT_ZERO_TOL,
};
pub use matching::{assign, Assignment};
pub use poly::{expand_roots, FiberInput, MonicPolynomial, PolySource, MAX_DEGREE};
pub use solve::{canonical_sort, eval_monic, min_gap, scaled_residual, solve_fiber, solve_input, ORDER_TIE, ROOT_TOL};

use crate::base::{BaseKind, BaseSpace, Location, SelfMap};
use crate::funcspec::SampledFunction;
use crate::perm::Perm;
use crate::{Error, Result};

pub const DEFAULT_BRANCH_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_DEPTH: usize = 12;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BundleOptions {
    /// Root gap below which sheets count as merged.
    pub branch_tol: f64,
    /// Required ratio between the runner-up and the best matching cost.
    pub margin: f64,
    /// Maximum bisection depth when a matching is ambiguous.
    pub max_depth: usize,
}

impl Default for BundleOptions {
    fn default() -> Self {
        Self { branch_tol: DEFAULT_BRANCH_TOL, margin: 2.0, max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// A point where sheets coalesce, attributed to its nearest sample.
#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub sample: usize,
    pub location: Location,
    /// Smallest root gap found at `location`.
    pub gap: f64,
    /// Sheets of the sample's fiber that merge at `location`.
    pub groups: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct RootBundle {
    pub base: Arc<BaseSpace>,
    pub poly: Arc<MonicPolynomial>,
    /// Roots at each sample in canonical order.
    pub fibers: Vec<Vec<Complex64>>,
    /// Per edge, tail sheet `i` continues to head sheet `edge_perms[e].apply(i)`.
    pub edge_perms: Vec<Perm>,
    pub branch_flags: Vec<bool>,
    pub branch_points: Vec<BranchPoint>,
    /// Per edge, the parameters of extra fibers solved while matching.
    pub refinement: Vec<Vec<f64>>,
    /// Per sample, a cluster id for every sheet; sheets sharing an id are
    /// merged. Ids are numbered by first occurrence.
    pub clusters: Vec<Vec<usize>>,
    pub options: BundleOptions,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Class ids numbered by first occurrence.
    fn labels(&mut self) -> Vec<usize> {
        let n = self.0.len();
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        let mut out = vec![0; n];
        for i in 0..n {
            let r = self.find(i);
            if ids[r] == usize::MAX {
                ids[r] = next;
                next += 1;
            }
            out[i] = ids[r];
        }
        out
    }
}

/// Groups of at least two roots closer than `tol`, transitively.
fn coincident_groups(fiber: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = fiber.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if (fiber[i] - fiber[j]).norm() < tol {
                uf.union(i, j);
            }
        }
    }
    let labels = uf.labels();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        groups[l].push(i);
    }
    groups.retain(|g| g.len() >= 2);
    groups
}

impl RootBundle {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// Permutation carrying sheets across `edge` in the given direction.
    pub fn step_perm(&self, edge: usize, forward: bool) -> Perm {
        if forward {
            self.edge_perms[edge].clone()
        } else {
            self.edge_perms[edge].inverse()
        }
    }

    pub fn is_branch_free(&self) -> bool {
        !self.branch_flags.iter().any(|&f| f)
    }

    pub fn cluster_count(&self, sample: usize) -> usize {
        self.clusters[sample].iter().max().map_or(0, |m| m + 1)
    }

    /// Number of distinct root values at a sample, counting roots closer
    /// than `tol` (transitively) as one.
    pub fn distinct_count(&self, sample: usize, tol: f64) -> usize {
        let fiber = &self.fibers[sample];
        let merged: usize = coincident_groups(fiber, tol).iter().map(|g| g.len() - 1).sum();
        fiber.len() - merged
    }

    pub fn branch_point_at(&self, sample: usize) -> Option<&BranchPoint> {
        self.branch_points.iter().find(|b| b.sample == sample)
    }

    /// Writes `sample_index, coordinate(s), sheet_index, root_re, root_im,
    /// branch_flag` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let coords = match self.base.kind {
            BaseKind::Interval => "x",
            BaseKind::Circle => "theta",
            BaseKind::Torus2 => "theta1,theta2",
            BaseKind::Graph => "edge,s",
        };
        writeln!(w, "sample_index,{coords},sheet_index,root_re,root_im,branch_flag")?;
        for (i, fiber) in self.fibers.iter().enumerate() {
            let c: Vec<String> = self.base.samples[i].components().iter().map(|v| v.to_string()).collect();
            let c = c.join(",");
            for (k, z) in fiber.iter().enumerate() {
                writeln!(w, "{i},{c},{k},{},{},{}", z.re, z.im, u8::from(self.branch_flags[i]))?;
            }
        }
        Ok(())
    }
}

fn solve_at(poly: &MonicPolynomial, loc: &Location) -> Result<Vec<Complex64>> {
    solve_input(&poly.input_at(loc)?)
}

fn with_sample(e: Error, sample: usize) -> Error {
    match e {
        Error::NonFinite { .. } => Error::NonFinite { sample },
        other => other,
    }
}

/// Golden-section minimization of the root gap over `t ∈ [0, 1]` on `edge`.
fn minimize_gap(poly: &MonicPolynomial, edge: usize) -> Result<(f64, f64)> {
    let g = |t: f64| -> Result<f64> { Ok(min_gap(&solve_at(poly, &Location { edge, t })?)) };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    let mut best = (0.0, g(0.0)?);
    let end = g(1.0)?;
    if end < best.1 {
        best = (1.0, end);
    }
    for _ in 0..80 {
        if b - a < 1e-14 {
            break;
        }
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d)?;
        }
        for (t, v) in [(c, gc), (d, gd)] {
            if v < best.1 {
                best = (t, v);
            }
        }
    }
    Ok(best)
}

fn detect_branches(
    poly: &MonicPolynomial,
    fibers: &[Vec<Complex64>],
    tol: f64,
) -> Result<(Vec<bool>, Vec<BranchPoint>)> {
    let base = &poly.base;
    let gaps: Vec<f64> = fibers.iter().map(|f| min_gap(f)).collect();
    let found: Vec<Option<BranchPoint>> = (0..base.len())
        .into_par_iter()
        .map(|i| -> Result<Option<BranchPoint>> {
            let nb = base.neighbors(i);
            let nb_max = nb.iter().map(|&(_, j)| gaps[j]).fold(0.0, f64::max);
            let local_min = nb.iter().all(|&(_, j)| gaps[i] <= gaps[j]);
            let mut best: Option<(Location, f64)> = None;
            if gaps[i] < 1e-14 || (gaps[i] < tol && !local_min) {
                best = Some((base.sample_location(i), gaps[i]));
            } else if local_min && (gaps[i] < 0.9 * nb_max || gaps[i] < tol) {
                best = Some((base.sample_location(i), gaps[i]));
                for &(edge, _) in nb {
                    let (t, g) = minimize_gap(poly, edge)?;
                    // Only minima on the half-edge nearest this sample belong to it.
                    let near = if base.edges[edge].tail == i { t < 0.5 } else { t >= 0.5 };
                    if near && g < best.map_or(f64::INFINITY, |b| b.1) {
                        best = Some((Location { edge, t }, g));
                    }
                }
            }
            let Some((location, gap)) = best else { return Ok(None) };
            if gap >= tol {
                return Ok(None);
            }
            let at = solve_at(poly, &location).map_err(|e| with_sample(e, i))?;
            let back = assign(&at, &fibers[i]).perm;
            let groups = coincident_groups(&at, tol)
                .into_iter()
                .map(|g| {
                    let mut g: Vec<usize> = g.into_iter().map(|k| back.apply(k)).collect();
                    g.sort_unstable();
                    g
                })
                .collect();
            Ok(Some(BranchPoint { sample: i, location, gap, groups }))
        })
        .collect::<Result<_>>()?;
    let mut flags = vec![false; base.len()];
    let mut points = Vec::new();
    for bp in found.into_iter().flatten() {
        flags[bp.sample] = true;
        points.push(bp);
    }
    Ok((flags, points))
}

struct EdgeMatch {
    perm: Perm,
    micro: Vec<f64>,
}

fn match_edge(
    poly: &MonicPolynomial,
    fibers: &[Vec<Complex64>],
    flags: &[bool],
    edge: usize,
    opts: &BundleOptions,
) -> Result<EdgeMatch> {
    let e = poly.base.edges[edge];
    let first = assign(&fibers[e.tail], &fibers[e.head]);
    if flags[e.tail] || flags[e.head] || first.is_clear(opts.margin) {
        return Ok(EdgeMatch { perm: first.perm, micro: Vec::new() });
    }
    let mut micro = Vec::new();
    let perm = bisect(poly, edge, (0.0, &fibers[e.tail]), (1.0, &fibers[e.head]), 1, opts, &mut micro)?;
    micro.sort_by(f64::total_cmp);
    Ok(EdgeMatch { perm, micro })
}

fn bisect(
    poly: &MonicPolynomial,
    edge: usize,
    lo: (f64, &[Complex64]),
    hi: (f64, &[Complex64]),
    depth: usize,
    opts: &BundleOptions,
    micro: &mut Vec<f64>,
) -> Result<Perm> {
    if depth > opts.max_depth {
        return Err(Error::AmbiguousMatching { edge, depth: opts.max_depth });
    }
    let t = 0.5 * (lo.0 + hi.0);
    let mid = solve_at(poly, &Location { edge, t }).map_err(|e| with_sample(e, poly.base.edges[edge].tail))?;
    micro.push(t);
    let half = |a: (f64, &[Complex64]), b: (f64, &[Complex64]), micro: &mut Vec<f64>| -> Result<Perm> {
        let m = assign(a.1, b.1);
        if m.is_clear(opts.margin) {
            Ok(m.perm)
        } else {
            bisect(poly, edge, a, b, depth + 1, opts, micro)
        }
    };
    let left = half(lo, (t, &mid), micro)?;
    let right = half((t, &mid), hi, micro)?;
    Ok(left.then(&right))
}

/// Across a run of flagged samples on a 1-dimensional base whose fibers
/// contain coincident roots, sheets continue as matched directly between
/// the unflagged samples on either side of the run.
fn bridge_coincidences(base: &BaseSpace, fibers: &[Vec<Complex64>], flags: &[bool], perms: &mut [Perm], tol: f64) {
    if !matches!(base.kind, BaseKind::Interval | BaseKind::Circle) {
        return;
    }
    let n = base.len();
    let circular = base.kind == BaseKind::Circle;
    if flags.iter().all(|&f| f) {
        return;
    }
    let next = |i: usize| if circular { Some((i + 1) % n) } else if i + 1 < n { Some(i + 1) } else { None };
    for a in 0..n {
        if flags[a] {
            continue;
        }
        let Some(first) = next(a) else { continue };
        if !flags[first] {
            continue;
        }
        let mut path = vec![a, first];
        let mut coincident = min_gap(&fibers[first]) < tol;
        let mut at = first;
        let c = loop {
            match next(at) {
                Some(j) if !flags[j] => break Some(j),
                Some(j) if j != a => {
                    coincident |= min_gap(&fibers[j]) < tol;
                    path.push(j);
                    at = j;
                }
                _ => break None,
            }
        };
        let Some(c) = c else { continue };
        if !coincident {
            continue;
        }
        path.push(c);
        let direct = assign(&fibers[a], &fibers[c]).perm;
        let mut prefix = Perm::identity(fibers[a].len());
        for w in path.windows(2).take(path.len() - 2) {
            let (edge, forward) = base.edge_between(w[0], w[1]).expect("consecutive samples are adjacent");
            let step = if forward { perms[edge].clone() } else { perms[edge].inverse() };
            prefix = prefix.then(&step);
        }
        let last = prefix.inverse().then(&direct);
        let (edge, forward) = base.edge_between(path[path.len() - 2], c).expect("adjacent");
        perms[edge] = if forward { last } else { last.inverse() };
    }
}

fn cluster_labels(fiber: &[Complex64], branch: Option<&BranchPoint>, tol: f64) -> Vec<usize> {
    let mut uf = UnionFind::new(fiber.len());
    for g in coincident_groups(fiber, tol) {
        for w in g.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    if let Some(bp) = branch {
        for g in &bp.groups {
            for w in g.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    uf.labels()
}

pub fn build_bundle(poly: Arc<MonicPolynomial>) -> Result<RootBundle> {
    build_bundle_with(poly, BundleOptions::default())
}

pub fn build_bundle_with(poly: Arc<MonicPolynomial>, options: BundleOptions) -> Result<RootBundle> {
    let base = poly.base.clone();
    let fibers: Vec<Vec<Complex64>> = (0..base.len())
        .into_par_iter()
        .map(|i| poly.input_at_sample(i).and_then(|inp| solve_input(&inp)).map_err(|e| with_sample(e, i)))
        .collect::<Result<_>>()?;
    let (branch_flags, branch_points) = detect_branches(&poly, &fibers, options.branch_tol)?;
    let matches: Vec<EdgeMatch> = (0..base.edges.len())
        .into_par_iter()
        .map(|e| match_edge(&poly, &fibers, &branch_flags, e, &options))
        .collect::<Result<_>>()?;
    let (mut edge_perms, refinement): (Vec<Perm>, Vec<Vec<f64>>) = matches.into_iter().map(|m| (m.perm, m.micro)).unzip();
    bridge_coincidences(&base, &fibers, &branch_flags, &mut edge_perms, options.branch_tol);
    let clusters = (0..base.len())
        .map(|i| cluster_labels(&fibers[i], branch_points.iter().find(|b| b.sample == i), options.branch_tol))
        .collect();
    Ok(RootBundle { base, poly, fibers, edge_perms, branch_flags, branch_points, refinement, clusters, options })
}

/// The bundle of `p^(T)`, whose fiber over `x` is the fiber of `p` at `φ(x)`.
pub fn pullback(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<RootBundle> {
    pullback_with(p, map, BundleOptions::default())
}

pub fn pullback_with(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>, options: BundleOptions) -> Result<RootBundle> {
    build_bundle_with(Arc::new(MonicPolynomial::pullback(p, map)?), options)
}

/// `Σ q_k(x) λ^k` at every bundle point `(x, λ)`.
pub fn evaluate_poly_on_bundle(q: &[SampledFunction], bundle: &RootBundle) -> Vec<Vec<Complex64>> {
    bundle
        .fibers
        .iter()
        .enumerate()
        .map(|(i, fiber)| {
            fiber
                .iter()
                .map(|&lambda| q.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * lambda + c.values[i]))
                .collect()
        })
        .collect()
}
