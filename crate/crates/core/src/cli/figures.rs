//! Deterministic SVG plots of root bundles over an interval or circle.
//!
//! Two panels share the parameter axis: real parts on top, imaginary parts
//! below. Each curve follows one sheet from the first sample along the
//! edge permutations, so crossings and endpoint identifications show as
//! they are tracked.

use std::fmt::Write;

use crate::base::BaseKind;
use crate::bundle::RootBundle;
use crate::{Error, Result};

const WIDTH: f64 = 800.0;
const PANEL: f64 = 260.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];
const STYLE_VERSION: u32 = 1;

/// Sheet positions of every curve at every sample.
fn curves(bundle: &RootBundle) -> Vec<Vec<usize>> {
    let n = bundle.base.len();
    let mut pos: Vec<usize> = (0..bundle.degree()).collect();
    let mut out = vec![pos.clone()];
    for x in 0..n - 1 {
        let (edge, forward) = bundle.base.edge_between(x, x + 1).expect("consecutive samples are adjacent");
        let perm = bundle.step_perm(edge, forward);
        pos = pos.iter().map(|&s| perm.apply(s)).collect();
        out.push(pos.clone());
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = ((hi - lo) * 0.05).max(1e-3);
    (lo - pad, hi + pad)
}

pub fn bundle_svg(bundle: &RootBundle, title: &str) -> Result<String> {
    let base = &bundle.base;
    let (u_max, axis) = match base.kind {
        BaseKind::Interval => (1.0, "x"),
        BaseKind::Circle => (std::f64::consts::TAU, "theta"),
        k => return Err(Error::WrongBaseKind { expected: "interval or circle".into(), got: k.to_string() }),
    };
    let params: Vec<f64> = base.samples.iter().map(|c| base.parameter(c).expect("one-dimensional base")).collect();
    let tracks = curves(bundle);
    let height = 2.0 * PANEL + 3.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\" data-style=\"{STYLE_VERSION}\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(svg, "<text x=\"{MARGIN}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{}</text>", title.replace('&', "&amp;").replace('<', "&lt;"));
    let sx = |u: f64| MARGIN + u / u_max * (WIDTH - 2.0 * MARGIN);
    for (panel, label) in [(0usize, "Re"), (1, "Im")] {
        let part = |x: usize, s: usize| {
            let z = bundle.fibers[x][s];
            if panel == 0 {
                z.re
            } else {
                z.im
            }
        };
        let (lo, hi) = range((0..base.len()).flat_map(|x| (0..bundle.degree()).map(move |s| (x, s))).map(|(x, s)| part(x, s)));
        let top = MARGIN + panel as f64 * (PANEL + MARGIN);
        let sy = |v: f64| top + PANEL - (v - lo) / (hi - lo) * PANEL;
        let _ = writeln!(
            svg,
            "<rect x=\"{MARGIN}\" y=\"{top}\" width=\"{}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#999\"/>",
            WIDTH - 2.0 * MARGIN
        );
        let _ = writeln!(
            svg,
            "<text x=\"5\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>",
            top + PANEL / 2.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\">[{lo:.3}, {hi:.3}] vs {axis}</text>",
            WIDTH - MARGIN - 200.0,
            top - 4.0
        );
        for curve in 0..bundle.degree() {
            let mut points = String::new();
            for (x, pos) in tracks.iter().enumerate() {
                let _ = write!(points, "{:.2},{:.2} ", sx(params[x]), sy(part(x, pos[curve])));
            }
            let color = PALETTE[curve % PALETTE.len()];
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                points.trim_end()
            );
            if panel == 0 {
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{color}\" font-family=\"sans-serif\" font-size=\"11\">sheet {}</text>",
                    sx(params[0]) + 4.0,
                    sy(part(0, tracks[0][curve])) - 4.0,
                    curve + 1
                );
            }
        }
        for bp in &bundle.branch_points {
            let u = base.parameter(&base.coord_at(&bp.location)).expect("one-dimensional base");
            let s = bp.groups.first().and_then(|g| g.first()).copied().unwrap_or(0);
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"none\" stroke=\"black\"/>",
                sx(u),
                sy(part(bp.sample, s))
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::base::{make_circle, make_torus2};
    use crate::bundle::{build_bundle, MonicPolynomial};
    use crate::Complex64;

    #[test]
    fn constant_roots_are_horizontal_lines() {
        let base = Arc::new(make_circle(16).unwrap());
        let p = MonicPolynomial::constant(base, &[Complex64::new(-4.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let svg = bundle_svg(&build_bundle(Arc::new(p)).unwrap(), "t^2 - 4").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        for line in svg.lines().filter(|l| l.starts_with("<polyline")) {
            let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
            let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
            assert!(ys.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn torus_is_not_plotted() {
        let base = Arc::new(make_torus2(4, 4).unwrap());
        let p = MonicPolynomial::constant(base, &[Complex64::new(-4.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(bundle_svg(&build_bundle(Arc::new(p)).unwrap(), "x").is_err());
    }
}
