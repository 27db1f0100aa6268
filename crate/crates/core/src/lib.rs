//! Thermodynamic formalism on truncated Markov shifts, with two applications:
//! joint spectral radii of matrix families and maximal Lyapunov exponents of
//! planar expanding repellers.
//!
//! The pipeline, bottom to top:
//!
//! * [`shift`]: finite mixing shift spaces, word enumeration, truncations of
//!   a countable-alphabet shift;
//! * [`potential`]: cylinder-constant almost-additive potentials (scalar
//!   weights, matrix norm cocycles, singular values) and their certified
//!   almost-additivity constants;
//! * [`pressure`]: Gurevich pressure with two-sided certified brackets and
//!   accelerated point estimates;
//! * [`gibbs`]: cylinder measures, Gibbs-ratio certificates, tightness of
//!   tails across temperatures;
//! * [`zerotemp`]: cooling schedules, monotonicity checks and extraction of
//!   the zero-temperature maximising measure;
//! * [`jsr`] / [`lyapunov`]: the two applications, each reduced to a
//!   zero-temperature run plus independent certified bounds;
//! * [`model`] / [`cli`] / [`verify`]: JSON model ingestion, the command-line
//!   front end and the self-check battery.
//!
//! Everything is deterministic: fixed enumeration orders, fixed reduction
//! trees, and parallelism only across independent temperatures whose results
//! are merged in schedule order.

pub mod cli;
pub mod error;
pub mod gibbs;
pub mod jsr;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod numerics;
pub mod potential;
pub mod pressure;
pub mod shift;
pub mod verify;
pub mod zerotemp;

pub use error::{Error, Result};
pub use gibbs::{CylinderMeasure, GibbsCertificate, TightnessReport};
pub use jsr::{CountableFamily, CountableJsr, JsrConfig, JsrResult};
pub use lyapunov::{Hypotheses, LyapunovResult, RepellerSpec};
pub use model::ModelFile;
pub use potential::{CertifiedConstants, MatrixCocycle, NormKind, Potential};
pub use pressure::{PressureEstimate, SlopeEstimate};
pub use shift::{ShiftSpace, Symbol, Word};
pub use verify::VerifyReport;
pub use zerotemp::{MaximisationResult, MonotonicityReport, PathConfig};
