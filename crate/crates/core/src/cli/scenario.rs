//! Scenario files: a base, a polynomial, a self-map and the analyses to run.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};

use crate::base::{make_circle, make_graph, make_interval, make_torus2, BaseKind, BaseSpace, SelfMap, DEFAULT_CONTINUITY_BOUND};
use crate::bundle::MonicPolynomial;
use crate::extend::Answer;
use crate::funcspec::{parse, Expr};

pub const BUILTINS: [(&str, &str); 5] = [
    ("example1", include_str!("../../scenarios/example1.json")),
    ("example2", include_str!("../../scenarios/example2.json")),
    ("example3", include_str!("../../scenarios/example3.json")),
    ("torus", include_str!("../../scenarios/torus.json")),
    ("graphdemo", include_str!("../../scenarios/graphdemo.json")),
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub base: BaseSpec,
    #[serde(default)]
    pub polynomial: Option<PolySpec>,
    /// Image coordinates as expressions; the identity when absent.
    #[serde(default)]
    pub map: Option<MapSpec>,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default)]
    pub seed: u64,
    /// Random trials for the closedness analysis on trees.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Further (polynomial, map) pairs decided on the same base.
    #[serde(default)]
    pub controls: Vec<Control>,
    /// Numerical constraints on factored-form roots, asserted at load.
    #[serde(default)]
    pub checks: Vec<RootCheck>,
}

fn default_trials() -> usize {
    20
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BaseSpec {
    Interval { samples: usize },
    Circle { samples: usize },
    Torus2 { samples: [usize; 2] },
    Graph { vertices: usize, edges: Vec<(usize, usize)>, samples_per_edge: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PolySpec {
    /// `c₀, …, c_{n−1}` of a monic polynomial.
    Coefficients(Vec<String>),
    /// Root functions, expanded to a monic polynomial.
    Roots(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub exprs: Vec<String>,
    #[serde(default = "default_bound")]
    pub continuity_bound: f64,
}

fn default_bound() -> f64 {
    DEFAULT_CONTINUITY_BOUND
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Bundle,
    Strips,
    Cole,
    Ah,
    Lifts,
    Corollary3,
    Closedness,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default)]
    pub cole: Option<Answer>,
    #[serde(default)]
    pub ah: Option<Answer>,
    /// Expected algebraic closedness of a graph base.
    #[serde(default)]
    pub closed: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Control {
    pub name: String,
    /// Defaults to the scenario polynomial.
    #[serde(default)]
    pub polynomial: Option<PolySpec>,
    /// The identity when absent.
    #[serde(default)]
    pub map: Option<MapSpec>,
    pub expect_cole: Answer,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RootCheck {
    /// `λ_i(a) = λ_j(b)`.
    Equal { left: (usize, String), right: (usize, String) },
    /// `λ_i = formula` at every sample with parameter in `[from, to]`.
    Local { root: usize, from: String, to: String, formula: String },
    /// Pairs of roots meet (within `1e-6`) only at the listed parameters.
    Crossings { at: Vec<(usize, usize, String)> },
}

impl Scenario {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow::anyhow!("scenario does not match the schema at {path}: {}", e.into_inner())
        })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn builtin(name: &str) -> anyhow::Result<Self> {
        let Some((_, text)) = BUILTINS.iter().find(|(n, _)| *n == name) else {
            let names: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
            bail!("unknown builtin {name:?}; available: {}", names.join(", "));
        };
        Self::from_json(text)
    }

    pub fn kind(&self) -> BaseKind {
        match self.base {
            BaseSpec::Interval { .. } => BaseKind::Interval,
            BaseSpec::Circle { .. } => BaseKind::Circle,
            BaseSpec::Torus2 { .. } => BaseKind::Torus2,
            BaseSpec::Graph { .. } => BaseKind::Graph,
        }
    }

    /// Sample count along one axis (per edge on graphs).
    pub fn samples(&self) -> usize {
        match &self.base {
            BaseSpec::Interval { samples } | BaseSpec::Circle { samples } => *samples,
            BaseSpec::Torus2 { samples } => samples[0],
            BaseSpec::Graph { samples_per_edge, .. } => *samples_per_edge,
        }
    }

    /// The same scenario at `n` samples along each axis.
    pub fn with_samples(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.base = match &self.base {
            BaseSpec::Interval { .. } => BaseSpec::Interval { samples: n },
            BaseSpec::Circle { .. } => BaseSpec::Circle { samples: n },
            BaseSpec::Torus2 { .. } => BaseSpec::Torus2 { samples: [n, n] },
            BaseSpec::Graph { vertices, edges, .. } => {
                BaseSpec::Graph { vertices: *vertices, edges: edges.clone(), samples_per_edge: n }
            }
        };
        s
    }

    /// Resolutions for stability re-runs: `n`, `2n`, `4n`, keeping the
    /// interval endpoints and midpoints on the grid.
    pub fn stability_resolutions(&self) -> Vec<usize> {
        let n = self.samples();
        match self.base {
            BaseSpec::Interval { .. } => vec![n, 2 * (n - 1) + 1, 4 * (n - 1) + 1],
            _ => vec![n, 2 * n, 4 * n],
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let kind = self.kind();
        for a in &self.analyses {
            match a {
                Analysis::Strips => ensure!(kind == BaseKind::Circle, "analysis \"strips\" needs a circle base, got {kind}"),
                Analysis::Closedness => {
                    ensure!(kind == BaseKind::Graph, "analysis \"closedness\" needs a graph base, got {kind}")
                }
                _ => ensure!(self.polynomial.is_some(), "analysis {a:?} needs a polynomial"),
            }
        }
        if kind == BaseKind::Graph {
            ensure!(self.map.is_none(), "graph self-maps cannot be given by expressions");
        }
        if !self.checks.is_empty() {
            ensure!(matches!(self.polynomial, Some(PolySpec::Roots(_))), "root checks need a factored polynomial");
        }
        Ok(())
    }

    pub fn build_base(&self) -> anyhow::Result<Arc<BaseSpace>> {
        let base = match &self.base {
            BaseSpec::Interval { samples } => make_interval(*samples)?,
            BaseSpec::Circle { samples } => make_circle(*samples)?,
            BaseSpec::Torus2 { samples } => make_torus2(samples[0], samples[1])?,
            BaseSpec::Graph { vertices, edges, samples_per_edge } => make_graph(*vertices, edges, *samples_per_edge)?,
        };
        Ok(Arc::new(base))
    }
}

fn parse_all(exprs: &[String], kind: BaseKind) -> anyhow::Result<Vec<Expr>> {
    exprs
        .iter()
        .map(|s| {
            let e = parse(s).with_context(|| format!("parsing {s:?}"))?;
            e.check_variables(kind)?;
            Ok(e)
        })
        .collect()
}

pub fn build_polynomial(spec: &PolySpec, base: &Arc<BaseSpace>) -> anyhow::Result<Arc<MonicPolynomial>> {
    let p = match spec {
        PolySpec::Coefficients(c) => MonicPolynomial::from_coeff_exprs(base.clone(), parse_all(c, base.kind)?)?,
        PolySpec::Roots(r) => MonicPolynomial::from_root_exprs(base.clone(), parse_all(r, base.kind)?)?,
    };
    Ok(Arc::new(p))
}

pub fn build_map(spec: Option<&MapSpec>, base: &Arc<BaseSpace>) -> anyhow::Result<Arc<SelfMap>> {
    Ok(Arc::new(match spec {
        None => SelfMap::identity(base.clone()),
        Some(m) => SelfMap::from_exprs(base.clone(), parse_all(&m.exprs, base.kind)?, m.continuity_bound)?,
    }))
}

const CHECK_TOL: f64 = 1e-9;
const CROSSING_TOL: f64 = 1e-6;

/// Asserts the scenario's root constraints on the sampled base.
pub fn run_checks(scenario: &Scenario, base: &BaseSpace) -> anyhow::Result<()> {
    let Some(PolySpec::Roots(roots)) = &scenario.polynomial else { return Ok(()) };
    let kind = base.kind;
    let exprs = parse_all(roots, kind)?;
    let var = kind.variables()[0];
    let at = |i: usize, u: f64| exprs[i].eval_with(&|v| (v == var).then_some(u));
    let constant = |s: &str| -> anyhow::Result<f64> { Ok(parse(s)?.eval_const()?.re) };
    let root = |i: usize| -> anyhow::Result<&Expr> {
        exprs.get(i).with_context(|| format!("check names root {i} of {}", exprs.len()))
    };
    let params: Vec<f64> = base.samples.iter().map(|c| base.parameter(c).unwrap_or(f64::NAN)).collect();
    for check in &scenario.checks {
        match check {
            RootCheck::Equal { left, right } => {
                root(left.0)?;
                root(right.0)?;
                let (a, b) = (at(left.0, constant(&left.1)?)?, at(right.0, constant(&right.1)?)?);
                ensure!((a - b).norm() < CHECK_TOL, "check failed: root {} at {} = {a}, root {} at {} = {b}", left.0, left.1, right.0, right.1);
            }
            RootCheck::Local { root: i, from, to, formula } => {
                let r = root(*i)?;
                let f = parse(formula)?;
                let (lo, hi) = (constant(from)?, constant(to)?);
                for &u in params.iter().filter(|u| (lo..=hi).contains(*u)) {
                    let lookup = |v: &str| (v == var).then_some(u);
                    let (a, b) = (r.eval_with(&lookup)?, f.eval_with(&lookup)?);
                    ensure!((a - b).norm() < CHECK_TOL, "check failed: root {i} differs from {formula} at {u}");
                }
            }
            RootCheck::Crossings { at: listed } => {
                let h = base.spacing().context("crossing checks need an interval or circle base")?;
                let listed: Vec<(usize, usize, f64)> =
                    listed.iter().map(|(i, j, s)| Ok((*i, *j, constant(s)?))).collect::<anyhow::Result<_>>()?;
                for &(i, j, u) in &listed {
                    ensure!((at(i, u)? - at(j, u)?).norm() < CHECK_TOL, "check failed: roots {i}, {j} do not meet at {u}");
                }
                for &u in &params {
                    for i in 0..exprs.len() {
                        for j in i + 1..exprs.len() {
                            if (at(i, u)? - at(j, u)?).norm() >= CROSSING_TOL {
                                continue;
                            }
                            let allowed = listed.iter().any(|&(a, b, w)| {
                                ((a, b) == (i, j) || (b, a) == (i, j)) && (u - w).abs() <= h
                            });
                            ensure!(allowed, "check failed: roots {i}, {j} meet at {u}, which is not listed");
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_validate() {
        for (name, _) in BUILTINS {
            let s = Scenario::builtin(name).unwrap();
            s.validate().unwrap();
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn schema_errors_name_the_path() {
        let err = Scenario::from_json(r#"{"name":"x","base":{"kind":"circle","samples":"many"},"analyses":[]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("base"), "{err}");
    }

    #[test]
    fn strip_quintic_constraints_hold() {
        let s = Scenario::builtin("example2").unwrap();
        let base = s.build_base().unwrap();
        run_checks(&s, &base).unwrap();
        let mut broken = s.clone();
        broken.checks.push(RootCheck::Crossings { at: vec![] });
        assert!(run_checks(&broken, &base).is_err());
    }
}
