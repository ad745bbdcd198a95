//! The two extension problems for a self-map `T` of the base: extension to
//! the algebra of all continuous functions on the root surface (decided by
//! lift search) and to the algebra generated by the root coordinate
//! (decided by coefficient fitting and divided differences).

mod ah;
mod cole;
mod csp;
mod verdict;

use std::sync::Arc;

use serde::Serialize;

use crate::base::SelfMap;
use crate::bundle::MonicPolynomial;
use crate::Result;

pub use ah::{
    ah_extendable, ah_fit, branch_gap, branch_tests, decide_ah, lemma4_test, vandermonde_solve, FitRefusal, FitResult,
    Finiteness, Lemma4Result, SideQuotients, BOUND_FACTOR, CAUCHY_TOL, DIVERGENCE_BOUND, DYADIC_LEVELS, JUMP_FACTOR,
};
pub use cole::{
    bundles, cole_extendable, decide_lift, enumerate_lifts, enumerate_lifts_between, recheck_certificate, Bundles,
    DEFAULT_MAX_LIFTS,
};
pub use csp::{validate_lift, LiftProblem, SearchResult};
pub use verdict::{Answer, Certificate, Lift, Verdict};

/// Both verdicts for one instance and whether they are consistent.
#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub ah: Answer,
    pub cole: Answer,
    pub consistent: bool,
}

/// An Arens-Hoffman extension always yields a Cole extension, so
/// (yes, no) is the only inconsistent pair.
pub fn corollary3_check(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<ConsistencyReport> {
    let Bundles { source, target } = bundles(p, map)?;
    let ah = decide_ah(&source, &target, DEFAULT_MAX_LIFTS)?.answer;
    let cole = decide_lift(&source, &target, DEFAULT_MAX_LIFTS)?.answer;
    Ok(ConsistencyReport { ah, cole, consistent: !(ah == Answer::Yes && cole == Answer::No) })
}

#[derive(Clone, Debug, Serialize)]
pub struct RootReport {
    /// Whether the pulled-back polynomial has a continuous root.
    pub pullback_root: Answer,
    pub ah: Answer,
    /// A root of the pullback forces an Arens-Hoffman extension.
    pub consistent: bool,
}

pub fn root_implies_extendable_check(p: &Arc<MonicPolynomial>, map: &Arc<SelfMap>) -> Result<RootReport> {
    let Bundles { source, target } = bundles(p, map)?;
    let pullback_root = crate::closedness::section(&target)?.answer;
    let ah = decide_ah(&source, &target, DEFAULT_MAX_LIFTS)?.answer;
    Ok(RootReport { pullback_root, ah, consistent: pullback_root != Answer::Yes || ah == Answer::Yes })
}
