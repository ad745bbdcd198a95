//! Lift search as a finite constraint problem.
//!
//! One variable per (sample, merged cluster of source sheets); its domain is
//! the set of target clusters at that sample. For an edge `x → y` and a
//! source sheet `s`, the pair (value at `s`'s cluster over `x`, value at
//! `σᴬ(s)`'s cluster over `y`) must be realized by some target sheet `b`
//! as (cluster of `b`, cluster of `σᴮ(b)`). Merged source sheets share a
//! variable, so they are sent to one target cluster.

use std::collections::VecDeque;

use crate::bundle::RootBundle;

use super::verdict::Lift;

type Mask = u32;

/// Allowed cluster transitions across one edge.
#[derive(Clone, Debug)]
struct Relation {
    /// `forward[β]`: clusters at the head reachable from cluster `β` at the tail.
    forward: Vec<Mask>,
    /// `backward[β′]`: clusters at the tail reaching cluster `β′` at the head.
    backward: Vec<Mask>,
}

#[derive(Clone, Copy, Debug)]
struct Constraint {
    tail_var: usize,
    head_var: usize,
    edge: usize,
}

/// The lift problem between a source bundle `A` and a target bundle `B`
/// over the same base. Degrees may differ.
pub struct LiftProblem<'a> {
    pub source: &'a RootBundle,
    pub target: &'a RootBundle,
    /// `var_of[x][s]`: variable of source sheet `s` over sample `x`.
    var_of: Vec<Vec<usize>>,
    var_sample: Vec<usize>,
    initial: Vec<Mask>,
    relations: Vec<Relation>,
    constraints: Vec<Constraint>,
    incident: Vec<Vec<usize>>,
    /// Preferred value order per variable.
    order: Vec<Vec<usize>>,
    priority: Vec<usize>,
}

/// Outcome of a search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Solutions as one target cluster per variable.
    pub solutions: Vec<Vec<usize>>,
    /// The search stopped at the solution limit.
    pub truncated: bool,
    pub nodes: usize,
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| m & (1 << i) != 0)
}

fn relation(target: &RootBundle, edge: usize) -> Relation {
    let e = target.base.edges[edge];
    let (ct, ch) = (&target.clusters[e.tail], &target.clusters[e.head]);
    let (nt, nh) = (target.cluster_count(e.tail), target.cluster_count(e.head));
    let mut forward = vec![0; nt];
    let mut backward = vec![0; nh];
    for b in 0..target.degree() {
        let (beta, beta2) = (ct[b], ch[target.edge_perms[edge].apply(b)]);
        forward[beta] |= 1 << beta2;
        backward[beta2] |= 1 << beta;
    }
    Relation { forward, backward }
}

impl<'a> LiftProblem<'a> {
    pub fn new(source: &'a RootBundle, target: &'a RootBundle) -> Self {
        assert!(std::sync::Arc::ptr_eq(&source.base, &target.base) || source.base.len() == target.base.len());
        let base = &source.base;
        let mut var_of = Vec::with_capacity(base.len());
        let mut var_sample = Vec::new();
        let mut initial = Vec::new();
        let mut order = Vec::new();
        let mut priority = Vec::new();
        for x in 0..base.len() {
            let k = source.cluster_count(x);
            let first = var_sample.len();
            let mut row = vec![0; source.degree()];
            for (s, &c) in source.clusters[x].iter().enumerate() {
                row[s] = first + c;
            }
            let nb = target.cluster_count(x);
            for c in 0..k {
                let s = source.clusters[x].iter().position(|&cc| cc == c).expect("cluster ids are dense");
                var_sample.push(x);
                initial.push(if nb >= 32 { Mask::MAX } else { (1 << nb) - 1 });
                let a = source.fibers[x][s];
                let mut values: Vec<usize> = (0..nb).collect();
                let rep = |beta: usize| {
                    let b = target.clusters[x].iter().position(|&cc| cc == beta).expect("dense");
                    target.fibers[x][b]
                };
                values.sort_by(|&u, &v| (rep(u) - a).norm().total_cmp(&(rep(v) - a).norm()).then(u.cmp(&v)));
                order.push(values);
                priority.push(source.distinct_count(x, source.options.branch_tol));
            }
            var_of.push(row);
        }
        let relations: Vec<Relation> = (0..base.edges.len()).map(|e| relation(target, e)).collect();
        let mut constraints = Vec::new();
        let mut incident = vec![Vec::new(); var_sample.len()];
        for (edge, e) in base.edges.iter().enumerate() {
            let mut seen = Vec::new();
            for s in 0..source.degree() {
                let tail_var = var_of[e.tail][s];
                let head_var = var_of[e.head][source.edge_perms[edge].apply(s)];
                if seen.contains(&(tail_var, head_var)) {
                    continue;
                }
                seen.push((tail_var, head_var));
                incident[tail_var].push(constraints.len());
                incident[head_var].push(constraints.len());
                constraints.push(Constraint { tail_var, head_var, edge });
            }
        }
        Self { source, target, var_of, var_sample, initial, relations, constraints, incident, order, priority }
    }

    pub fn variable_count(&self) -> usize {
        self.var_sample.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Prunes `domains` to arc consistency; `false` on a wipe-out.
    fn propagate(&self, domains: &mut [Mask], mut queue: VecDeque<usize>, queued: &mut [bool]) -> bool {
        while let Some(ci) = queue.pop_front() {
            queued[ci] = false;
            let c = self.constraints[ci];
            let rel = &self.relations[c.edge];
            for (var, other, table) in [
                (c.tail_var, c.head_var, &rel.forward),
                (c.head_var, c.tail_var, &rel.backward),
            ] {
                let before = domains[var];
                let mut after = 0;
                for beta in bits(before) {
                    if table[beta] & domains[other] != 0 {
                        after |= 1 << beta;
                    }
                }
                if after == before {
                    continue;
                }
                domains[var] = after;
                if after == 0 {
                    return false;
                }
                for &cj in &self.incident[var] {
                    if cj != ci && !queued[cj] {
                        queued[cj] = true;
                        queue.push_back(cj);
                    }
                }
            }
        }
        true
    }

    /// Enumerates solutions up to `max_count`. With `plain_order` the
    /// variables are taken in index order and values in index order.
    pub fn search(&self, max_count: usize, plain_order: bool) -> SearchResult {
        let mut domains = self.initial.clone();
        let mut queued = vec![true; self.constraints.len()];
        let queue: VecDeque<usize> = (0..self.constraints.len()).collect();
        let mut result = SearchResult { solutions: Vec::new(), truncated: false, nodes: 0 };
        if !domains.iter().any(|&d| d == 0) && self.propagate(&mut domains, queue, &mut queued) {
            self.descend(domains, max_count, plain_order, &mut result);
        }
        result
    }

    fn pick(&self, domains: &[Mask], plain_order: bool) -> Option<usize> {
        let open = (0..domains.len()).filter(|&v| domains[v].count_ones() > 1);
        if plain_order {
            return open.into_iter().next();
        }
        open.min_by_key(|&v| (domains[v].count_ones(), self.priority[v], v))
    }

    fn descend(&self, domains: Vec<Mask>, max_count: usize, plain_order: bool, out: &mut SearchResult) {
        out.nodes += 1;
        let Some(var) = self.pick(&domains, plain_order) else {
            out.solutions.push(domains.iter().map(|d| d.trailing_zeros() as usize).collect());
            return;
        };
        let values: Vec<usize> = if plain_order {
            bits(domains[var]).collect()
        } else {
            self.order[var].iter().copied().filter(|&b| domains[var] & (1 << b) != 0).collect()
        };
        for beta in values {
            if out.solutions.len() >= max_count {
                out.truncated = true;
                return;
            }
            let mut next = domains.clone();
            next[var] = 1 << beta;
            let mut queued = vec![false; self.constraints.len()];
            let mut queue = VecDeque::new();
            for &ci in &self.incident[var] {
                queued[ci] = true;
                queue.push_back(ci);
            }
            if self.propagate(&mut next, queue, &mut queued) {
                self.descend(next, max_count, plain_order, out);
            }
        }
    }

    /// Reads a cluster-level solution as a sheet-level lift.
    pub fn witness(&self, solution: &[usize]) -> Lift {
        let (a, b) = (self.source, self.target);
        let base = &a.base;
        let cluster_sheets = |x: usize, beta: usize| -> Vec<usize> {
            (0..b.degree()).filter(|&t| b.clusters[x][t] == beta).collect()
        };
        let mut sheets = vec![vec![0; a.degree()]; base.len()];
        for x in 0..base.len() {
            for s in 0..a.degree() {
                let beta = solution[self.var_of[x][s]];
                let members = cluster_sheets(x, beta);
                let mut choice = members[0];
                if members.len() > 1 {
                    // Prefer the sheet continuing a neighbor's forced choice.
                    'edges: for &(edge, y) in base.neighbors(x) {
                        let forward = base.edges[edge].tail == x;
                        let pa = a.step_perm(edge, forward);
                        let pb = b.step_perm(edge, forward);
                        let there = cluster_sheets(y, solution[self.var_of[y][pa.apply(s)]]);
                        if there.len() == 1 {
                            let back = pb.inverse().apply(there[0]);
                            if members.contains(&back) {
                                choice = back;
                                break 'edges;
                            }
                        }
                    }
                }
                sheets[x][s] = choice;
            }
        }
        let values = sheets
            .iter()
            .enumerate()
            .map(|(x, row)| row.iter().map(|&t| b.fibers[x][t]).collect())
            .collect();
        Lift { sheets, values }
    }
}

/// Checks a lift against the constraints, recomputing transitions from the
/// bundles' edge permutations and clusters. Returns the first violation.
pub fn validate_lift(source: &RootBundle, target: &RootBundle, lift: &Lift) -> Result<(), String> {
    let base = &source.base;
    if lift.sheets.len() != base.len() {
        return Err("lift has the wrong number of samples".into());
    }
    for x in 0..base.len() {
        for s in 0..source.degree() {
            let t = lift.sheets[x][s];
            if t >= target.degree() {
                return Err(format!("sample {x}: sheet {t} out of range"));
            }
            if lift.values[x][s] != target.fibers[x][t] {
                return Err(format!("sample {x}: value is not the chosen target root"));
            }
            for s2 in s + 1..source.degree() {
                let merged = source.clusters[x][s] == source.clusters[x][s2];
                let t2 = lift.sheets[x][s2];
                if merged && target.clusters[x][t] != target.clusters[x][t2] {
                    return Err(format!("sample {x}: merged sheets {s}, {s2} sent to different points"));
                }
            }
        }
    }
    for (edge, e) in base.edges.iter().enumerate() {
        let pa = &source.edge_perms[edge];
        let pb = &target.edge_perms[edge];
        for s in 0..source.degree() {
            let from = target.clusters[e.tail][lift.sheets[e.tail][s]];
            let to = target.clusters[e.head][lift.sheets[e.head][pa.apply(s)]];
            let realized = (0..target.degree())
                .any(|b| target.clusters[e.tail][b] == from && target.clusters[e.head][pb.apply(b)] == to);
            if !realized {
                return Err(format!("edge {edge}: sheet {s} jumps between target sheets"));
            }
        }
    }
    Ok(())
}
