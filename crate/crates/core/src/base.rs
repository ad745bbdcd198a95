//! Discretized compact base spaces and continuous self-maps sampled on them.
//!
//! A [`BaseSpace`] is a finite 1-complex: samples joined by oriented edges,
//! together with a list of closed edge-walks generating its loops. Points
//! between samples are addressed by a [`Location`] (edge plus parameter), so
//! self-map images need not land on samples.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::funcspec::Expr;
use crate::{Error, Result};

/// Snap threshold for edge parameters close to an endpoint.
const SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Interval,
    Circle,
    Graph,
    Torus2,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BaseKind::Interval => "interval",
            BaseKind::Circle => "circle",
            BaseKind::Graph => "graph",
            BaseKind::Torus2 => "torus2",
        };
        f.write_str(s)
    }
}

impl BaseKind {
    /// Expression variables bound on this kind of base.
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            BaseKind::Interval => &["x"],
            BaseKind::Circle => &["theta"],
            BaseKind::Graph => &["edge", "s"],
            BaseKind::Torus2 => &["theta1", "theta2"],
        }
    }
}

/// Coordinate of a point of a base.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Coord {
    /// `x ∈ [0, 1]`.
    Interval(f64),
    /// `θ ∈ [0, 2π)`.
    Circle(f64),
    /// Parameter `s ∈ [0, 1]` along combinatorial edge `edge`.
    Graph { edge: usize, s: f64 },
    /// `(θ₁, θ₂) ∈ [0, 2π)²`.
    Torus(f64, f64),
}

impl Coord {
    pub fn variable(&self, name: &str) -> Option<f64> {
        match (self, name) {
            (Coord::Interval(x), "x") => Some(*x),
            (Coord::Circle(t), "theta") => Some(*t),
            (Coord::Graph { edge, .. }, "edge") => Some(*edge as f64),
            (Coord::Graph { s, .. }, "s") => Some(*s),
            (Coord::Torus(a, _), "theta1") => Some(*a),
            (Coord::Torus(_, b), "theta2") => Some(*b),
            _ => None,
        }
    }

    /// Coordinate values in CSV column order.
    pub fn components(&self) -> Vec<f64> {
        match *self {
            Coord::Interval(x) | Coord::Circle(x) => vec![x],
            Coord::Graph { edge, s } => vec![edge as f64, s],
            Coord::Torus(a, b) => vec![a, b],
        }
    }
}

/// Oriented edge between two distinct samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

/// A point on edge `edge` at parameter `t`: `t = 0` is the tail, `t = 1` the head.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub edge: usize,
    pub t: f64,
}

/// One traversal of an edge inside a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

/// A walk along edges starting at sample `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loop {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl Loop {
    /// Sample sequence visited, including the start and end.
    pub fn samples(&self, base: &BaseSpace) -> Result<Vec<usize>> {
        let mut at = self.start;
        let mut out = vec![at];
        for step in &self.steps {
            let e = base.edges.get(step.edge).ok_or(Error::OpenWalk)?;
            let (from, to) = if step.forward { (e.tail, e.head) } else { (e.head, e.tail) };
            if from != at {
                return Err(Error::OpenWalk);
            }
            at = to;
            out.push(at);
        }
        Ok(out)
    }

    pub fn is_closed(&self, base: &BaseSpace) -> bool {
        matches!(self.samples(base), Ok(s) if s.last() == Some(&self.start))
    }

    /// The same closed walk started from its `k`-th visited sample.
    pub fn rotated(&self, base: &BaseSpace, k: usize) -> Result<Loop> {
        let visited = self.samples(base)?;
        let k = k % self.steps.len().max(1);
        let mut steps = self.steps[k..].to_vec();
        steps.extend_from_slice(&self.steps[..k]);
        Ok(Loop { start: visited[k], steps })
    }
}

/// Bookkeeping for graph bases: how sample-level edges sit inside the
/// combinatorial edges.
#[derive(Clone, Debug)]
struct GraphLayout {
    combinatorial_edges: Vec<(usize, usize)>,
    /// Sample-level edges of each combinatorial edge, ordered by `s`.
    segments: Vec<Vec<usize>>,
    /// Combinatorial edge and `(s_tail, s_head)` of each sample-level edge.
    segment_of: Vec<(usize, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct BaseSpace {
    pub kind: BaseKind,
    pub samples: Vec<Coord>,
    pub edges: Vec<Edge>,
    pub loop_basis: Vec<Loop>,
    /// `(edge, neighbor)` pairs per sample.
    adjacency: Vec<Vec<(usize, usize)>>,
    grid: (usize, usize),
    graph: Option<GraphLayout>,
}

fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        adj[e.tail].push((id, e.head));
        adj[e.head].push((id, e.tail));
    }
    adj
}

pub fn make_interval(n: usize) -> Result<BaseSpace> {
    if n < 2 {
        return Err(Error::InvalidBase(format!("interval needs at least 2 samples, got {n}")));
    }
    let samples = (0..n).map(|i| Coord::Interval(i as f64 / (n - 1) as f64)).collect();
    let edges: Vec<Edge> = (0..n - 1).map(|i| Edge { tail: i, head: i + 1 }).collect();
    Ok(BaseSpace {
        kind: BaseKind::Interval,
        samples,
        adjacency: adjacency(n, &edges),
        edges,
        loop_basis: Vec::new(),
        grid: (n, 1),
        graph: None,
    })
}

pub fn make_circle(n: usize) -> Result<BaseSpace> {
    if n < 3 {
        return Err(Error::InvalidBase(format!("circle needs at least 3 samples, got {n}")));
    }
    // Written as π·(2i/n) so that θ = π is an exact sample for even n.
    let samples = (0..n).map(|i| Coord::Circle(PI * (2.0 * i as f64 / n as f64))).collect();
    let edges: Vec<Edge> = (0..n).map(|i| Edge { tail: i, head: (i + 1) % n }).collect();
    let whole = Loop {
        start: 0,
        steps: (0..n).map(|edge| Step { edge, forward: true }).collect(),
    };
    Ok(BaseSpace {
        kind: BaseKind::Circle,
        samples,
        adjacency: adjacency(n, &edges),
        edges,
        loop_basis: vec![whole],
        grid: (n, 1),
        graph: None,
    })
}

/// `n × m` grid with wraparound; sample `(i, j)` has index `j·n + i` and
/// coordinate `(2πi/n, 2πj/m)`. Edges `0..nm` run in the θ₁ direction,
/// `nm..2nm` in the θ₂ direction.
pub fn make_torus2(n: usize, m: usize) -> Result<BaseSpace> {
    if n < 3 || m < 3 {
        return Err(Error::InvalidBase(format!("torus grid needs n, m ≥ 3, got {n}×{m}")));
    }
    let idx = |i: usize, j: usize| (j % m) * n + (i % n);
    let mut samples = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            samples.push(Coord::Torus(PI * (2.0 * i as f64 / n as f64), PI * (2.0 * j as f64 / m as f64)));
        }
    }
    let mut edges = Vec::with_capacity(2 * n * m);
    for j in 0..m {
        for i in 0..n {
            edges.push(Edge { tail: idx(i, j), head: idx(i + 1, j) });
        }
    }
    for j in 0..m {
        for i in 0..n {
            edges.push(Edge { tail: idx(i, j), head: idx(i, j + 1) });
        }
    }
    let first = Loop {
        start: 0,
        steps: (0..n).map(|i| Step { edge: i, forward: true }).collect(),
    };
    let second = Loop {
        start: 0,
        steps: (0..m).map(|j| Step { edge: n * m + j * n, forward: true }).collect(),
    };
    Ok(BaseSpace {
        kind: BaseKind::Torus2,
        adjacency: adjacency(n * m, &edges),
        samples,
        edges,
        loop_basis: vec![first, second],
        grid: (n, m),
        graph: None,
    })
}

/// Subdivides each combinatorial edge of a connected multigraph into
/// `samples_per_edge` segments. Vertices become samples `0..vertices`.
pub fn make_graph(
    vertices: usize,
    combinatorial_edges: &[(usize, usize)],
    samples_per_edge: usize,
) -> Result<BaseSpace> {
    if vertices == 0 || combinatorial_edges.is_empty() {
        return Err(Error::InvalidBase("graph needs at least one vertex and one edge".into()));
    }
    if samples_per_edge == 0 {
        return Err(Error::InvalidBase("samples_per_edge must be positive".into()));
    }
    for &(u, v) in combinatorial_edges {
        if u >= vertices || v >= vertices {
            return Err(Error::InvalidBase(format!("edge ({u}, {v}) names a missing vertex")));
        }
        if u == v && samples_per_edge < 3 {
            return Err(Error::InvalidBase(
                "self-loops need at least 3 samples per edge".into(),
            ));
        }
    }
    if samples_per_edge < 2 {
        let mut pairs: Vec<(usize, usize)> =
            combinatorial_edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBase(
                "parallel edges need at least 2 samples per edge".into(),
            ));
        }
    }

    // Connectivity on the combinatorial graph.
    let mut comb_adj = vec![Vec::new(); vertices];
    for (id, &(u, v)) in combinatorial_edges.iter().enumerate() {
        comb_adj[u].push((id, v));
        comb_adj[v].push((id, u));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; vertices];
    let mut depth = vec![usize::MAX; vertices];
    depth[0] = 0;
    let mut tree_edge = vec![false; combinatorial_edges.len()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(id, v) in &comb_adj[u] {
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                parent[v] = Some((id, u));
                tree_edge[id] = true;
                queue.push_back(v);
            }
        }
    }
    if depth.contains(&usize::MAX) {
        return Err(Error::InvalidBase("graph is disconnected".into()));
    }

    let mut samples: Vec<Coord> = Vec::new();
    for v in 0..vertices {
        let (edge, &(a, _)) = combinatorial_edges
            .iter()
            .enumerate()
            .find(|(_, &(a, b))| a == v || b == v)
            .expect("connected graph with an edge has no isolated vertex");
        samples.push(Coord::Graph { edge, s: if a == v { 0.0 } else { 1.0 } });
    }
    let mut edges = Vec::new();
    let mut segments = Vec::new();
    let mut segment_of = Vec::new();
    for (id, &(u, v)) in combinatorial_edges.iter().enumerate() {
        let k = samples_per_edge;
        let mut chain = vec![u];
        for j in 1..k {
            chain.push(samples.len());
            samples.push(Coord::Graph { edge: id, s: j as f64 / k as f64 });
        }
        chain.push(v);
        let mut segs = Vec::new();
        for j in 0..k {
            segs.push(edges.len());
            segment_of.push((id, j as f64 / k as f64, (j + 1) as f64 / k as f64));
            edges.push(Edge { tail: chain[j], head: chain[j + 1] });
        }
        segments.push(segs);
    }

    // One basis loop per co-tree edge: the edge itself, then the tree path
    // back to its tail.
    let path_up = |mut v: usize| {
        let mut path = Vec::new();
        while let Some((id, p)) = parent[v] {
            path.push((id, v, p));
            v = p;
        }
        path
    };
    let mut loop_basis = Vec::new();
    for (id, &(u, v)) in combinatorial_edges.iter().enumerate() {
        if tree_edge[id] {
            continue;
        }
        let mut steps: Vec<Step> = segments[id].iter().map(|&e| Step { edge: e, forward: true }).collect();
        let up_v = path_up(v);
        let up_u = path_up(u);
        // Strip the common part above the lowest common ancestor.
        let mut common = 0;
        while common < up_v.len()
            && common < up_u.len()
            && up_v[up_v.len() - 1 - common] == up_u[up_u.len() - 1 - common]
        {
            common += 1;
        }
        let climb = &up_v[..up_v.len() - common];
        let descend = &up_u[..up_u.len() - common];
        for &(cid, child, _) in climb {
            let child_is_tail = combinatorial_edges[cid].0 == child;
            let segs = &segments[cid];
            if child_is_tail {
                steps.extend(segs.iter().map(|&e| Step { edge: e, forward: true }));
            } else {
                steps.extend(segs.iter().rev().map(|&e| Step { edge: e, forward: false }));
            }
        }
        for &(cid, child, _) in descend.iter().rev() {
            let child_is_head = combinatorial_edges[cid].1 == child;
            let segs = &segments[cid];
            if child_is_head {
                steps.extend(segs.iter().map(|&e| Step { edge: e, forward: true }));
            } else {
                steps.extend(segs.iter().rev().map(|&e| Step { edge: e, forward: false }));
            }
        }
        loop_basis.push(Loop { start: u, steps });
    }

    Ok(BaseSpace {
        kind: BaseKind::Graph,
        adjacency: adjacency(samples.len(), &edges),
        samples,
        edges,
        loop_basis,
        grid: (vertices, combinatorial_edges.len()),
        graph: Some(GraphLayout {
            combinatorial_edges: combinatorial_edges.to_vec(),
            segments,
            segment_of,
        }),
    })
}

fn wrap_delta(d: f64) -> f64 {
    let d = d.rem_euclid(TAU);
    if d > TAU / 2.0 {
        d - TAU
    } else {
        d
    }
}

fn lerp_angle(a: f64, b: f64, t: f64) -> f64 {
    (a + t * wrap_delta(b - a)).rem_euclid(TAU)
}

fn split(u: f64, cells: usize) -> (usize, f64) {
    let scaled = u * cells as f64;
    let mut i = scaled.floor();
    let mut t = scaled - i;
    if t > 1.0 - SNAP {
        i += 1.0;
        t = 0.0;
    } else if t < SNAP {
        t = 0.0;
    }
    (i as usize, t)
}

impl BaseSpace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn neighbors(&self, sample: usize) -> &[(usize, usize)] {
        &self.adjacency[sample]
    }

    /// `(n, m)` for torus grids; `(n, 1)` for intervals and circles;
    /// `(vertices, combinatorial edges)` for graphs.
    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    /// Combinatorial edges of a graph base.
    pub fn combinatorial_edges(&self) -> Option<&[(usize, usize)]> {
        self.graph.as_ref().map(|g| g.combinatorial_edges.as_slice())
    }

    /// Segments per combinatorial edge of a graph base.
    pub fn samples_per_edge(&self) -> Option<usize> {
        self.graph.as_ref().map(|g| g.segments[0].len())
    }

    /// The location of a sample itself, on one of its incident edges.
    pub fn sample_location(&self, sample: usize) -> Location {
        let (edge, _) = self.adjacency[sample][0];
        let t = if self.edges[edge].tail == sample { 0.0 } else { 1.0 };
        Location { edge, t }
    }

    /// Edge joining `a` and `b`, with `true` when it is oriented `a → b`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<(usize, bool)> {
        self.adjacency[a]
            .iter()
            .find(|&&(_, other)| other == b)
            .map(|&(e, _)| (e, self.edges[e].tail == a))
    }

    pub fn coord_at(&self, loc: &Location) -> Coord {
        let e = self.edges[loc.edge];
        if loc.t == 0.0 {
            return self.samples[e.tail];
        }
        if loc.t == 1.0 {
            return self.samples[e.head];
        }
        let t = loc.t;
        match (self.samples[e.tail], self.samples[e.head]) {
            (Coord::Interval(a), Coord::Interval(b)) => Coord::Interval(a + t * (b - a)),
            (Coord::Circle(a), Coord::Circle(b)) => Coord::Circle(lerp_angle(a, b, t)),
            (Coord::Torus(a1, a2), Coord::Torus(b1, b2)) => {
                Coord::Torus(lerp_angle(a1, b1, t), lerp_angle(a2, b2, t))
            }
            _ => {
                let layout = self.graph.as_ref().expect("graph coordinates on a graph base");
                let (edge, s0, s1) = layout.segment_of[loc.edge];
                Coord::Graph { edge, s: s0 + t * (s1 - s0) }
            }
        }
    }

    /// Interpolates between two coordinates of this base (angles wrap).
    pub fn lerp_coord(&self, a: &Coord, b: &Coord, t: f64) -> Coord {
        match (*a, *b) {
            (Coord::Interval(x), Coord::Interval(y)) => Coord::Interval(x + t * (y - x)),
            (Coord::Circle(x), Coord::Circle(y)) => Coord::Circle(lerp_angle(x, y, t)),
            (Coord::Torus(x1, x2), Coord::Torus(y1, y2)) => {
                Coord::Torus(lerp_angle(x1, y1, t), lerp_angle(x2, y2, t))
            }
            (Coord::Graph { edge: e1, s: s1 }, Coord::Graph { edge: e2, s: s2 }) if e1 == e2 => {
                Coord::Graph { edge: e1, s: s1 + t * (s2 - s1) }
            }
            _ => {
                if t < 0.5 {
                    *a
                } else {
                    *b
                }
            }
        }
    }

    /// Edge location of a coordinate. Torus points are placed on the θ₁-edge
    /// of the nearest grid row.
    pub fn locate(&self, coord: &Coord) -> Result<Location> {
        let outside = |detail: String| Error::ImageOutsideBase { sample: usize::MAX, detail };
        match (self.kind, *coord) {
            (BaseKind::Interval, Coord::Interval(x)) => {
                if !(-SNAP..=1.0 + SNAP).contains(&x) {
                    return Err(outside(format!("x = {x} not in [0, 1]")));
                }
                let n = self.samples.len();
                let (i, t) = split(x.clamp(0.0, 1.0), n - 1);
                Ok(if i >= n - 1 { Location { edge: n - 2, t: 1.0 } } else { Location { edge: i, t } })
            }
            (BaseKind::Circle, Coord::Circle(theta)) => {
                let n = self.samples.len();
                let (i, t) = split(theta.rem_euclid(TAU) / TAU, n);
                Ok(Location { edge: i % n, t })
            }
            (BaseKind::Torus2, Coord::Torus(a, b)) => {
                let (n, m) = self.grid;
                let (i, t) = split(a.rem_euclid(TAU) / TAU, n);
                let j = ((b.rem_euclid(TAU) / TAU) * m as f64).round() as usize % m;
                Ok(Location { edge: j * n + (i % n), t })
            }
            (BaseKind::Graph, Coord::Graph { edge, s }) => {
                let layout = self.graph.as_ref().expect("graph layout");
                let segs = layout
                    .segments
                    .get(edge)
                    .ok_or_else(|| outside(format!("no combinatorial edge {edge}")))?;
                if !(-SNAP..=1.0 + SNAP).contains(&s) {
                    return Err(outside(format!("s = {s} not in [0, 1]")));
                }
                let (j, t) = split(s.clamp(0.0, 1.0), segs.len());
                Ok(if j >= segs.len() {
                    Location { edge: *segs.last().unwrap(), t: 1.0 }
                } else {
                    Location { edge: segs[j], t }
                })
            }
            (kind, c) => Err(outside(format!("coordinate {c:?} does not belong to a {kind} base"))),
        }
    }

    /// Path length (in edges) between two locations, or `f64::INFINITY` when
    /// it exceeds `limit`.
    pub fn edge_distance(&self, a: &Location, b: &Location, limit: f64) -> f64 {
        if a.edge == b.edge {
            return (a.t - b.t).abs();
        }
        let ea = self.edges[a.edge];
        let eb = self.edges[b.edge];
        let max_hops = limit.ceil() as usize + 2;
        let mut best = f64::INFINITY;
        for (start, off_a) in [(ea.tail, a.t), (ea.head, 1.0 - a.t)] {
            let hops = self.bounded_bfs(start, max_hops);
            for (end, off_b) in [(eb.tail, b.t), (eb.head, 1.0 - b.t)] {
                if let Some(&(_, h)) = hops.iter().find(|(s, _)| *s == end) {
                    best = best.min(off_a + h as f64 + off_b);
                }
            }
        }
        if best > limit {
            f64::INFINITY
        } else {
            best
        }
    }

    fn bounded_bfs(&self, start: usize, max_hops: usize) -> Vec<(usize, usize)> {
        let mut seen = vec![(start, 0usize)];
        let mut frontier = vec![start];
        for d in 1..=max_hops {
            let mut next = Vec::new();
            for &s in &frontier {
                for &(_, nb) in &self.adjacency[s] {
                    if !seen.iter().any(|&(x, _)| x == nb) {
                        seen.push((nb, d));
                        next.push(nb);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        seen
    }

    /// Scalar parameter of a 1-dimensional base (`x` or `θ`).
    pub fn parameter(&self, coord: &Coord) -> Option<f64> {
        match *coord {
            Coord::Interval(x) | Coord::Circle(x) => Some(x),
            _ => None,
        }
    }

    /// Location at scalar parameter `u` on an interval or circle base.
    pub fn location_at_parameter(&self, u: f64) -> Result<Location> {
        match self.kind {
            BaseKind::Interval => self.locate(&Coord::Interval(u)),
            BaseKind::Circle => self.locate(&Coord::Circle(u)),
            k => Err(Error::WrongBaseKind { expected: "interval or circle".into(), got: k.to_string() }),
        }
    }

    /// Sample spacing of an interval or circle base.
    pub fn spacing(&self) -> Option<f64> {
        let n = self.samples.len();
        match self.kind {
            BaseKind::Interval => Some(1.0 / (n - 1) as f64),
            BaseKind::Circle => Some(TAU / n as f64),
            _ => None,
        }
    }

    /// Sample nearest to a scalar parameter on an interval or circle base.
    pub fn nearest_sample(&self, u: f64) -> Option<usize> {
        let n = self.samples.len();
        match self.kind {
            BaseKind::Interval => Some(((u.clamp(0.0, 1.0)) * (n - 1) as f64).round() as usize),
            BaseKind::Circle => Some(((u.rem_euclid(TAU) / TAU) * n as f64).round() as usize % n),
            _ => None,
        }
    }
}

/// Where the self-map's values come from between samples.
#[derive(Clone, Debug)]
pub enum MapSource {
    /// One expression per output coordinate, evaluated exactly.
    Exprs(Vec<Expr>),
    /// Images given only at samples; interpolated along edges.
    Table,
}

pub const DEFAULT_CONTINUITY_BOUND: f64 = 2.0;

/// A continuous self-map of a base, sampled at every sample.
#[derive(Clone, Debug)]
pub struct SelfMap {
    pub base: Arc<BaseSpace>,
    pub images: Vec<Location>,
    pub image_coords: Vec<Coord>,
    pub source: MapSource,
    pub continuity_bound: f64,
}

fn coord_from_values(kind: BaseKind, values: &[Complex64], sample: usize) -> Result<Coord> {
    let outside = |detail: String| Error::ImageOutsideBase { sample, detail };
    let real = |z: Complex64| -> Result<f64> {
        if !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > 1e-9 * (1.0 + z.re.abs()) {
            return Err(outside(format!("image value {z} is not a finite real number")));
        }
        Ok(z.re)
    };
    match kind {
        BaseKind::Interval => {
            let x = real(values[0])?;
            if !(-1e-12..=1.0 + 1e-12).contains(&x) {
                return Err(outside(format!("x = {x} not in [0, 1]")));
            }
            Ok(Coord::Interval(x.clamp(0.0, 1.0)))
        }
        BaseKind::Circle => Ok(Coord::Circle(real(values[0])?.rem_euclid(TAU))),
        BaseKind::Torus2 => {
            Ok(Coord::Torus(real(values[0])?.rem_euclid(TAU), real(values[1])?.rem_euclid(TAU)))
        }
        BaseKind::Graph => Err(outside("graph self-maps are given by tables".into())),
    }
}

impl SelfMap {
    pub fn identity(base: Arc<BaseSpace>) -> Self {
        let images = (0..base.len()).map(|i| base.sample_location(i)).collect();
        let image_coords = base.samples.clone();
        Self { base, images, image_coords, source: MapSource::Table, continuity_bound: DEFAULT_CONTINUITY_BOUND }
    }

    /// Samples a self-map given by one expression per output coordinate:
    /// `x ↦ expr` on intervals, `θ ↦ expr` (an angle) on circles and two
    /// angle expressions on tori.
    pub fn from_exprs(base: Arc<BaseSpace>, exprs: Vec<Expr>, continuity_bound: f64) -> Result<Self> {
        let expected = match base.kind {
            BaseKind::Interval | BaseKind::Circle => 1,
            BaseKind::Torus2 => 2,
            BaseKind::Graph => {
                return Err(Error::InvalidBase("graph self-maps must be given as tables".into()))
            }
        };
        if exprs.len() != expected {
            return Err(Error::InvalidBase(format!(
                "a {} self-map needs {expected} expression(s), got {}",
                base.kind,
                exprs.len()
            )));
        }
        for e in &exprs {
            e.check_variables(base.kind)?;
        }
        let mut images = Vec::with_capacity(base.len());
        let mut image_coords = Vec::with_capacity(base.len());
        for (i, c) in base.samples.iter().enumerate() {
            let values: Vec<Complex64> = exprs.iter().map(|e| e.eval_coord(c)).collect::<Result<_>>()?;
            let coord = coord_from_values(base.kind, &values, i)?;
            let loc = base.locate(&coord).map_err(|e| match e {
                Error::ImageOutsideBase { detail, .. } => Error::ImageOutsideBase { sample: i, detail },
                other => other,
            })?;
            images.push(loc);
            image_coords.push(coord);
        }
        let map = Self { base, images, image_coords, source: MapSource::Exprs(exprs), continuity_bound };
        map.check_continuity()?;
        Ok(map)
    }

    /// Samples a self-map from explicit image locations.
    pub fn from_table(base: Arc<BaseSpace>, images: Vec<Location>, continuity_bound: f64) -> Result<Self> {
        if images.len() != base.len() {
            return Err(Error::InvalidBase(format!(
                "self-map table has {} entries for {} samples",
                images.len(),
                base.len()
            )));
        }
        for (i, loc) in images.iter().enumerate() {
            if loc.edge >= base.edges.len() || !(0.0..=1.0).contains(&loc.t) {
                return Err(Error::ImageOutsideBase { sample: i, detail: format!("invalid location {loc:?}") });
            }
        }
        let image_coords = images.iter().map(|l| base.coord_at(l)).collect();
        let map = Self { base, images, image_coords, source: MapSource::Table, continuity_bound };
        map.check_continuity()?;
        Ok(map)
    }

    fn check_continuity(&self) -> Result<()> {
        for (id, e) in self.base.edges.iter().enumerate() {
            let d = self.base.edge_distance(&self.images[e.tail], &self.images[e.head], self.continuity_bound);
            if d > self.continuity_bound + 1e-9 {
                return Err(Error::Discontinuous { edge: id, distance: d, bound: self.continuity_bound });
            }
        }
        Ok(())
    }

    /// Image coordinate of an arbitrary location.
    pub fn image_coord_at(&self, loc: &Location) -> Result<Coord> {
        let e = self.base.edges[loc.edge];
        if loc.t == 0.0 {
            return Ok(self.image_coords[e.tail]);
        }
        if loc.t == 1.0 {
            return Ok(self.image_coords[e.head]);
        }
        match &self.source {
            MapSource::Exprs(exprs) => {
                let c = self.base.coord_at(loc);
                let values: Vec<Complex64> = exprs.iter().map(|x| x.eval_coord(&c)).collect::<Result<_>>()?;
                coord_from_values(self.base.kind, &values, e.tail)
            }
            MapSource::Table => {
                Ok(self.base.lerp_coord(&self.image_coords[e.tail], &self.image_coords[e.head], loc.t))
            }
        }
    }
}
