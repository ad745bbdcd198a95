use std::sync::Arc;

use num_complex::Complex64;

use super::expr::Expr;
use crate::base::{BaseSpace, Location};
use crate::{Error, Result};

/// A complex-valued function given by its values at the samples of a base.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub base: Arc<BaseSpace>,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(base: Arc<BaseSpace>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != base.len() {
            return Err(Error::Polynomial(format!(
                "{} values for a base with {} samples",
                values.len(),
                base.len()
            )));
        }
        if let Some(sample) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { sample });
        }
        Ok(Self { base, values })
    }

    pub fn constant(base: Arc<BaseSpace>, value: Complex64) -> Self {
        let values = vec![value; base.len()];
        Self { base, values }
    }

    /// Linear interpolation along the edge of `loc`.
    pub fn interpolate(&self, loc: &Location) -> Complex64 {
        let e = self.base.edges[loc.edge];
        let (a, b) = (self.values[e.tail], self.values[e.head]);
        if loc.t == 0.0 {
            a
        } else if loc.t == 1.0 {
            b
        } else {
            a + (b - a) * loc.t
        }
    }
}

/// Evaluates `expr` at every sample of `base`.
pub fn evaluate(expr: &Expr, base: &Arc<BaseSpace>) -> Result<SampledFunction> {
    expr.check_variables(base.kind)?;
    let mut values = Vec::with_capacity(base.len());
    for (sample, c) in base.samples.iter().enumerate() {
        let z = expr.eval_coord(c)?;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { sample });
        }
        values.push(z);
    }
    Ok(SampledFunction { base: base.clone(), values })
}

/// Exact evaluation at an edge location (not interpolation of sampled values).
pub fn eval_at(expr: &Expr, base: &BaseSpace, loc: &Location) -> Result<Complex64> {
    expr.check_variables(base.kind)?;
    let z = expr.eval_coord(&base.coord_at(loc))?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite { sample: base.edges[loc.edge].tail });
    }
    Ok(z)
}
