//! Discriminants by the root-product formula, cross-checked by resultants.

use num_complex::Complex64;
use serde::Serialize;

use super::RootBundle;
use crate::base::BaseSpace;
use crate::funcspec::SampledFunction;

pub const DEFAULT_ZERO_TOL: f64 = 1e-14;
pub const DEFAULT_WINDOW: usize = 5;

/// `∏_{i<j} (λ_i − λ_j)²`.
pub fn discriminant_of_roots(roots: &[Complex64]) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let diff = roots[i] - roots[j];
            d *= diff * diff;
        }
    }
    d
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("non-empty range");
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
        }
    }
    det
}

/// Resultant of two polynomials given by full coefficient lists, lowest
/// degree first, via the Sylvester determinant.
pub fn resultant(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![zero; size];
        for (k, &c) in f.iter().rev().enumerate() {
            row[shift + k] = c;
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![zero; size];
        for (k, &c) in g.iter().rev().enumerate() {
            row[shift + k] = c;
        }
        rows.push(row);
    }
    determinant(rows)
}

/// `(−1)^{n(n−1)/2} Res(p, p′)` for monic `p` with lower coefficients `c`.
pub fn discriminant_by_resultant(c: &[Complex64]) -> Complex64 {
    let n = c.len();
    let mut p: Vec<Complex64> = c.to_vec();
    p.push(Complex64::new(1.0, 0.0));
    let dp: Vec<Complex64> = (1..=n).map(|k| p[k] * k as f64).collect();
    let r = resultant(&p, &dp);
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Discriminant of the bundle's polynomial at every sample.
pub fn discriminant(bundle: &RootBundle) -> SampledFunction {
    let values = bundle.fibers.iter().map(|f| discriminant_of_roots(f)).collect();
    SampledFunction { base: bundle.base.clone(), values }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub degree: usize,
    pub zero_tol: f64,
    pub window: usize,
    /// Connected sets of samples with `|D| < zero_tol` containing a path of
    /// `window` samples.
    pub offending_runs: Vec<Vec<usize>>,
}

fn has_path_of(base: &BaseSpace, inside: &[bool], start: usize, len: usize) -> bool {
    fn dfs(base: &BaseSpace, inside: &[bool], at: usize, remaining: usize, path: &mut Vec<usize>) -> bool {
        if remaining == 0 {
            return true;
        }
        for &(_, nb) in base.neighbors(at) {
            if inside[nb] && !path.contains(&nb) {
                path.push(nb);
                if dfs(base, inside, nb, remaining - 1, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let mut path = vec![start];
    dfs(base, inside, start, len.saturating_sub(1), &mut path)
}

/// Sampled proxy for "the zero set of the discriminant has empty interior".
pub fn is_admissible(bundle: &RootBundle, zero_tol: f64, window: usize) -> AdmissibilityReport {
    let base = &bundle.base;
    let d = discriminant(bundle);
    let inside: Vec<bool> = d.values.iter().map(|z| z.norm() < zero_tol).collect();
    let mut seen = vec![false; base.len()];
    let mut offending_runs = Vec::new();
    for s in 0..base.len() {
        if !inside[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            for &(_, nb) in base.neighbors(comp[i]) {
                if inside[nb] && !seen[nb] {
                    seen[nb] = true;
                    comp.push(nb);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        if comp.len() >= window && comp.iter().any(|&v| has_path_of(base, &inside, v, window)) {
            offending_runs.push(comp);
        }
    }
    let degree = bundle.degree();
    AdmissibilityReport { admissible: degree >= 2 && offending_runs.is_empty(), degree, zero_tol, window, offending_runs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn quadratic_discriminants() {
        // t² − c has discriminant 4c.
        for c in [1.0, -2.5, 7.0] {
            let d = discriminant_by_resultant(&[re(-c), re(0.0)]);
            assert!((d - re(4.0 * c)).norm() < 1e-12);
        }
        let d = discriminant_of_roots(&[Complex64::i(), -Complex64::i()]);
        assert!((d - re(-4.0)).norm() < 1e-15);
    }

    #[test]
    fn product_matches_resultant_for_cubics() {
        let roots = [re(1.0), Complex64::new(-0.5, 2.0), Complex64::new(0.3, -1.0)];
        let c = super::super::poly::expand_roots(&roots);
        let a = discriminant_of_roots(&roots);
        let b = discriminant_by_resultant(&c);
        assert!((a - b).norm() / a.norm() < 1e-12, "{a} vs {b}");
    }
}
