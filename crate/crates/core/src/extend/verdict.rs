use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

/// A lift `f` on the source bundle: `sheets[x][s]` is the target sheet that
/// source sheet `s` is sent to over sample `x`, `values[x][s]` its root value.
#[derive(Clone, Debug, PartialEq)]
pub struct Lift {
    pub sheets: Vec<Vec<usize>>,
    pub values: Vec<Vec<Complex64>>,
}

/// Evidence attached to a verdict.
#[derive(Clone, Debug, Serialize)]
pub enum Certificate {
    /// A lift was found and validated.
    Lift { solution_count: usize, truncated: bool },
    /// A source strip of winding `source_winding` has no target strip whose
    /// winding divides it.
    StripDivisibility { source_winding: usize, target_windings: Vec<usize> },
    /// Every lift must be surjective, yet the source fiber at `sample` has
    /// fewer distinct points than the target fiber.
    FiberCount {
        sample: usize,
        coordinate: Vec<f64>,
        source_distinct: usize,
        target_distinct: usize,
        tolerance: f64,
        source_windings: Vec<usize>,
        target_windings: Vec<usize>,
        /// Each target strip paired with the unique source strip that must
        /// cover it.
        forced_pairs: Vec<(usize, usize)>,
    },
    /// The exhaustive lift search found no solution.
    CspExhausted { variables: usize, constraints: usize, nodes: usize, monodromy: Vec<(Vec<usize>, Vec<usize>)> },
    /// A lift whose fitted coefficients are continuous, bounded and pass the
    /// divided-difference test at every two-sheet branch point.
    Fit { lift_index: usize, max_coefficient: f64, max_jump: f64, branch_points_tested: usize },
    /// The divided difference of a lift across a branch point diverges.
    DividedDifference { lift_index: usize, sample: usize, parameter: f64, last_quotient: f64, side: String },
    /// Coefficient fitting failed for every lift; the first lift's reason.
    FitRefused { lift_index: usize, reason: Value },
    /// No lift exists at all.
    NoLift,
    /// Nothing decisive.
    Undecided { reason: String },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Lift { .. } => "lift",
            Certificate::StripDivisibility { .. } => "strip_divisibility",
            Certificate::FiberCount { .. } => "fiber_count",
            Certificate::CspExhausted { .. } => "csp_exhausted",
            Certificate::Fit { .. } => "fit",
            Certificate::DividedDifference { .. } => "divided_difference",
            Certificate::FitRefused { .. } => "fit_refused",
            Certificate::NoLift => "no_lift",
            Certificate::Undecided { .. } => "undecided",
        }
    }

    pub fn data(&self) -> Value {
        match serde_json::to_value(self).expect("certificates serialize") {
            Value::Object(map) => map.into_iter().next().map(|(_, v)| v).unwrap_or(Value::Null),
            _ => Value::Null,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub answer: Answer,
    pub certificate: Certificate,
    pub witness: Option<Lift>,
    pub witness_ref: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
    /// Number of samples of the base.
    pub resolution: usize,
}

impl Verdict {
    pub fn to_json(&self) -> Value {
        json!({
            "answer": self.answer,
            "certificate_kind": self.certificate.kind(),
            "certificate_data": self.certificate.data(),
            "witness_ref": self.witness_ref,
            "tolerances": self.tolerances,
            "resolution": self.resolution,
        })
    }
}
