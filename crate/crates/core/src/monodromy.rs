//! Loop monodromy, strip decomposition over the circle and connected
//! components of a root bundle.

use serde::Serialize;

use crate::base::{BaseKind, Loop};
use crate::bundle::RootBundle;
use crate::perm::Perm;
use crate::{Error, Result};

/// Composition of edge permutations along a closed walk, acting on the
/// sheets at the walk's start.
pub fn loop_monodromy(bundle: &RootBundle, walk: &Loop) -> Result<Perm> {
    if !walk.is_closed(&bundle.base) {
        return Err(Error::OpenWalk);
    }
    let mut perm = Perm::identity(bundle.degree());
    for step in &walk.steps {
        perm = perm.then(&bundle.step_perm(step.edge, step.forward));
    }
    Ok(perm)
}

/// Monodromy of every loop in the base's loop basis.
pub fn monodromy(bundle: &RootBundle) -> Result<Vec<Perm>> {
    bundle.base.loop_basis.iter().map(|l| loop_monodromy(bundle, l)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Strip {
    /// Sheets at the basepoint, in the order the loop visits them.
    pub sheets: Vec<usize>,
    /// Number of times the strip winds around the circle.
    pub winding: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StripDecomposition {
    pub strips: Vec<Strip>,
}

impl StripDecomposition {
    /// Sorted winding numbers.
    pub fn windings(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.strips.iter().map(|s| s.winding).collect();
        w.sort_unstable();
        w
    }

    /// Strip containing `sheet` at the basepoint.
    pub fn strip_of(&self, sheet: usize) -> usize {
        self.strips.iter().position(|s| s.sheets.contains(&sheet)).expect("strips partition the sheets")
    }
}

/// Cycles of the monodromy around the circle.
pub fn strips(bundle: &RootBundle) -> Result<StripDecomposition> {
    if bundle.base.kind != BaseKind::Circle {
        return Err(Error::WrongBaseKind { expected: "circle".into(), got: bundle.base.kind.to_string() });
    }
    let perm = loop_monodromy(bundle, &bundle.base.loop_basis[0])?;
    let strips = perm.cycles().into_iter().map(|sheets| Strip { winding: sheets.len(), sheets }).collect();
    Ok(StripDecomposition { strips })
}

#[derive(Clone, Debug, Serialize)]
pub struct Components {
    pub count: usize,
    /// Component id of every bundle point, indexed `[sample][sheet]`.
    pub labels: Vec<Vec<usize>>,
}

/// Connected components of the bundle: sheets joined along edges and at
/// merged points.
pub fn components(bundle: &RootBundle) -> Components {
    let n = bundle.degree();
    let total = bundle.base.len() * n;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra.max(rb)] = ra.min(rb);
        }
    };
    for (id, e) in bundle.base.edges.iter().enumerate() {
        for s in 0..n {
            union(&mut parent, e.tail * n + s, e.head * n + bundle.edge_perms[id].apply(s));
        }
    }
    for (x, labels) in bundle.clusters.iter().enumerate() {
        for s in 0..n {
            for t in s + 1..n {
                if labels[s] == labels[t] {
                    union(&mut parent, x * n + s, x * n + t);
                }
            }
        }
    }
    let mut ids = vec![usize::MAX; total];
    let mut count = 0;
    let mut labels = vec![vec![0; n]; bundle.base.len()];
    for x in 0..bundle.base.len() {
        for s in 0..n {
            let r = find(&mut parent, x * n + s);
            if ids[r] == usize::MAX {
                ids[r] = count;
                count += 1;
            }
            labels[x][s] = ids[r];
        }
    }
    Components { count, labels }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::base::{make_circle, make_interval, Step};
    use crate::bundle::{build_bundle, MonicPolynomial};
    use crate::funcspec::parse;

    fn bundle(base: crate::base::BaseSpace, coeffs: &[&str]) -> RootBundle {
        let exprs = coeffs.iter().map(|s| parse(s).unwrap()).collect();
        build_bundle(Arc::new(MonicPolynomial::from_coeff_exprs(Arc::new(base), exprs).unwrap())).unwrap()
    }

    #[test]
    fn constant_polynomial_has_trivial_monodromy() {
        let b = bundle(make_circle(32).unwrap(), &["-4", "0"]);
        assert!(loop_monodromy(&b, &b.base.loop_basis[0]).unwrap().is_identity());
        assert_eq!(strips(&b).unwrap().windings(), vec![1, 1]);
        assert_eq!(components(&b).count, 2);
    }

    #[test]
    fn square_root_of_the_circle_swaps() {
        let b = bundle(make_circle(64).unwrap(), &["-exp(1i*theta)", "0"]);
        let m = loop_monodromy(&b, &b.base.loop_basis[0]).unwrap();
        assert_eq!(m.images(), &[1, 0]);
        assert_eq!(strips(&b).unwrap().windings(), vec![2]);
        assert_eq!(components(&b).count, 1);
        for k in [1, 17, 40] {
            let walk = b.base.loop_basis[0].rotated(&b.base, k).unwrap();
            assert_eq!(loop_monodromy(&b, &walk).unwrap().cycle_type(), m.cycle_type());
        }
    }

    #[test]
    fn interval_walks_are_trivial() {
        let b = bundle(make_interval(30).unwrap(), &["-x", "0"]);
        let mut steps: Vec<Step> = (0..29).map(|edge| Step { edge, forward: true }).collect();
        steps.extend((0..29).rev().map(|edge| Step { edge, forward: false }));
        assert!(loop_monodromy(&b, &Loop { start: 0, steps }).unwrap().is_identity());
        let open = Loop { start: 0, steps: vec![Step { edge: 0, forward: true }] };
        assert!(matches!(loop_monodromy(&b, &open), Err(Error::OpenWalk)));
        assert!(matches!(strips(&b), Err(Error::WrongBaseKind { .. })));
    }

    #[test]
    fn crossing_sheets_form_one_component() {
        let base = Arc::new(make_interval(2001).unwrap());
        let r = "(3*x-1)*(3*x-2)^2";
        let exprs = vec![parse(r).unwrap(), parse(&format!("-({r})")).unwrap()];
        let b = build_bundle(Arc::new(MonicPolynomial::from_root_exprs(base, exprs).unwrap())).unwrap();
        assert_eq!(components(&b).count, 1);
    }
}
