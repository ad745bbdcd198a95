//! Root surfaces of monic polynomials with continuous coefficients over
//! discretized compact spaces, and the two endomorphism-extension problems
//! they pose: extension to the full function algebra on the root surface
//! (the Cole extension) and to the algebra generated by the root coordinate
//! (the Arens-Hoffman extension).
//!
//! The pipeline is
//! [`base`] (sampled spaces and self-maps) →
//! [`funcspec`] (coefficient expressions) →
//! [`bundle`] (root fibers matched along edges) →
//! [`monodromy`] (sheet permutations, strips, components) →
//! [`extend`] (lift search, coefficient fitting, divided differences) →
//! [`closedness`] (root existence and circle detection on graphs).

pub mod base;
pub mod bundle;
pub mod cli;
pub mod closedness;
pub mod error;
pub mod extend;
pub mod funcspec;
pub mod monodromy;
pub mod perm;

pub use error::{Error, Result};
pub use num_complex::Complex64;
