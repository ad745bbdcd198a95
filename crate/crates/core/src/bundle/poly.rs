use std::sync::Arc;

use num_complex::Complex64;

use crate::base::{BaseSpace, Coord, Location, SelfMap};
use crate::funcspec::{evaluate, Expr, SampledFunction};
use crate::{Error, Result};

/// Largest supported degree; sheet matching enumerates permutations.
pub const MAX_DEGREE: usize = 8;

/// Where a polynomial's values at non-sample points come from.
#[derive(Clone, Debug)]
pub enum PolySource {
    /// Coefficient expressions `c₀, …, c_{n−1}`.
    CoeffExprs(Vec<Expr>),
    /// Root expressions `λ₁, …, λ_n` of the factored form `∏ (t − λ_j)`.
    RootExprs(Vec<Expr>),
    /// Sampled coefficients, linearly interpolated along edges.
    SampledCoeffs,
    /// Sampled roots, linearly interpolated along edges.
    SampledRoots(Vec<SampledFunction>),
    /// `p^(T)`: the polynomial read at the self-map image.
    Pullback { inner: Arc<MonicPolynomial>, map: Arc<SelfMap> },
}

/// What a root solver needs at one point of the base.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberInput {
    /// Lower coefficients `c₀, …, c_{n−1}` of a monic polynomial.
    Coeffs(Vec<Complex64>),
    /// The roots themselves, known in closed form.
    Roots(Vec<Complex64>),
}

impl FiberInput {
    pub fn coefficients(&self) -> Vec<Complex64> {
        match self {
            FiberInput::Coeffs(c) => c.clone(),
            FiberInput::Roots(r) => expand_roots(r),
        }
    }
}

/// Lower coefficients of `∏ (t − λ_j)`.
pub fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    // poly[k] is the coefficient of t^k; starts as the constant 1.
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        poly = next;
    }
    poly.pop();
    poly
}

/// Monic polynomial `t^n + c_{n−1} t^{n−1} + … + c₀` with coefficients in
/// the sampled continuous functions on a base.
#[derive(Clone, Debug)]
pub struct MonicPolynomial {
    pub base: Arc<BaseSpace>,
    pub coeffs: Vec<SampledFunction>,
    pub source: PolySource,
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Polynomial("degree must be at least 1".into()));
    }
    if n > MAX_DEGREE {
        return Err(Error::Polynomial(format!("degree {n} exceeds the supported maximum {MAX_DEGREE}")));
    }
    Ok(())
}

fn transpose(base: &Arc<BaseSpace>, per_sample: Vec<Vec<Complex64>>, n: usize) -> Result<Vec<SampledFunction>> {
    (0..n)
        .map(|k| SampledFunction::new(base.clone(), per_sample.iter().map(|v| v[k]).collect()))
        .collect()
}

impl MonicPolynomial {
    pub fn from_coeff_exprs(base: Arc<BaseSpace>, exprs: Vec<Expr>) -> Result<Self> {
        check_degree(exprs.len())?;
        let coeffs = exprs.iter().map(|e| evaluate(e, &base)).collect::<Result<_>>()?;
        Ok(Self { base, coeffs, source: PolySource::CoeffExprs(exprs) })
    }

    pub fn from_root_exprs(base: Arc<BaseSpace>, exprs: Vec<Expr>) -> Result<Self> {
        check_degree(exprs.len())?;
        let roots: Vec<SampledFunction> = exprs.iter().map(|e| evaluate(e, &base)).collect::<Result<_>>()?;
        let per_sample: Vec<Vec<Complex64>> =
            (0..base.len()).map(|i| expand_roots(&roots.iter().map(|r| r.values[i]).collect::<Vec<_>>())).collect();
        let coeffs = transpose(&base, per_sample, exprs.len())?;
        Ok(Self { base, coeffs, source: PolySource::RootExprs(exprs) })
    }

    pub fn from_coeffs(base: Arc<BaseSpace>, coeffs: Vec<SampledFunction>) -> Result<Self> {
        check_degree(coeffs.len())?;
        if coeffs.iter().any(|c| !Arc::ptr_eq(&c.base, &base)) {
            return Err(Error::Polynomial("coefficients live on different bases".into()));
        }
        Ok(Self { base, coeffs, source: PolySource::SampledCoeffs })
    }

    pub fn from_roots(base: Arc<BaseSpace>, roots: Vec<SampledFunction>) -> Result<Self> {
        check_degree(roots.len())?;
        let per_sample: Vec<Vec<Complex64>> =
            (0..base.len()).map(|i| expand_roots(&roots.iter().map(|r| r.values[i]).collect::<Vec<_>>())).collect();
        let coeffs = transpose(&base, per_sample, roots.len())?;
        Ok(Self { base, coeffs, source: PolySource::SampledRoots(roots) })
    }

    /// Constant-coefficient polynomial.
    pub fn constant(base: Arc<BaseSpace>, lower: &[Complex64]) -> Result<Self> {
        let coeffs = lower.iter().map(|&c| SampledFunction::constant(base.clone(), c)).collect();
        Self::from_coeffs(base, coeffs)
    }

    /// `p^(T)`, whose fiber over `x` is the fiber of `p` over `φ(x)`.
    pub fn pullback(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<Self> {
        if !Arc::ptr_eq(&p.base, &map.base) {
            return Err(Error::Polynomial("self-map and polynomial live on different bases".into()));
        }
        let base = p.base.clone();
        let per_sample: Vec<Vec<Complex64>> = map
            .image_coords
            .iter()
            .map(|c| p.input_at_coord(c).map(|inp| inp.coefficients()))
            .collect::<Result<_>>()?;
        let coeffs = transpose(&base, per_sample, p.degree())?;
        Ok(Self { base, coeffs, source: PolySource::Pullback { inner: p.clone(), map: map.clone() } })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs_at_sample(&self, sample: usize) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.values[sample]).collect()
    }

    /// Solver input at a sample.
    pub fn input_at_sample(&self, sample: usize) -> Result<FiberInput> {
        match &self.source {
            PolySource::CoeffExprs(_) | PolySource::SampledCoeffs => Ok(FiberInput::Coeffs(self.coeffs_at_sample(sample))),
            PolySource::RootExprs(exprs) => Ok(FiberInput::Roots(
                exprs.iter().map(|e| e.eval_coord(&self.base.samples[sample])).collect::<Result<_>>()?,
            )),
            PolySource::SampledRoots(roots) => Ok(FiberInput::Roots(roots.iter().map(|r| r.values[sample]).collect())),
            PolySource::Pullback { inner, map } => inner.input_at_coord(&map.image_coords[sample]),
        }
    }

    /// Solver input at an edge location, evaluating exactly where possible.
    pub fn input_at(&self, loc: &Location) -> Result<FiberInput> {
        let e = self.base.edges[loc.edge];
        if loc.t == 0.0 {
            return self.input_at_sample(e.tail);
        }
        if loc.t == 1.0 {
            return self.input_at_sample(e.head);
        }
        match &self.source {
            PolySource::CoeffExprs(_) | PolySource::RootExprs(_) => self.input_at_coord(&self.base.coord_at(loc)),
            PolySource::SampledCoeffs => Ok(FiberInput::Coeffs(self.coeffs.iter().map(|c| c.interpolate(loc)).collect())),
            PolySource::SampledRoots(roots) => Ok(FiberInput::Roots(roots.iter().map(|r| r.interpolate(loc)).collect())),
            PolySource::Pullback { inner, map } => inner.input_at_coord(&map.image_coord_at(loc)?),
        }
    }

    /// Solver input at an arbitrary coordinate of the base.
    pub fn input_at_coord(&self, coord: &Coord) -> Result<FiberInput> {
        let eval = |exprs: &[Expr]| -> Result<Vec<Complex64>> {
            exprs
                .iter()
                .map(|e| {
                    let z = e.eval_coord(coord)?;
                    if z.re.is_finite() && z.im.is_finite() {
                        Ok(z)
                    } else {
                        Err(Error::NonFinite { sample: usize::MAX })
                    }
                })
                .collect()
        };
        match &self.source {
            PolySource::CoeffExprs(exprs) => Ok(FiberInput::Coeffs(eval(exprs)?)),
            PolySource::RootExprs(exprs) => Ok(FiberInput::Roots(eval(exprs)?)),
            _ => {
                let loc = self.base.locate(coord)?;
                self.input_at(&loc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_roots() {
        let one = Complex64::new(1.0, 0.0);
        let c = expand_roots(&[one, -one]);
        assert_eq!(c, vec![-one, Complex64::new(0.0, 0.0)]);
        let c = expand_roots(&[one, one * 2.0, one * 3.0]);
        assert_eq!(c, vec![-one * 6.0, one * 11.0, -one * 6.0]);
    }
}
