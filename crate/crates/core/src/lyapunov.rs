//! Piecewise-affine planar repellers: derivative cocycles from branch
//! matrices, hypothesis checks (positivity / dominated splitting), and the
//! maximal Lyapunov exponent through the zero-temperature pipeline. The top
//! singular value is exactly the spectral norm, so the heavy lifting is the
//! jsr machinery under that norm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jsr::{thermo_jsr, JsrConfig, JsrResult};
use crate::linalg::{singular_values_2x2, Mat};
use crate::potential::{MatrixCocycle, NormKind};
use crate::shift::ShiftSpace;

#[derive(Debug, Clone)]
pub struct RepellerSpec {
    /// constant derivative matrix per branch (2x2)
    pub branches: Vec<Mat>,
    pub coding: ShiftSpace,
    /// accept branches whose smallest singular value is <= 1
    pub allow_nonexpanding: bool,
    /// run even when check_hypotheses returns Neither (experimental mode)
    pub allow_unverified_hypotheses: bool,
}

impl RepellerSpec {
    pub fn new(branches: Vec<Mat>, coding: ShiftSpace) -> Self {
        RepellerSpec {
            branches,
            coding,
            allow_nonexpanding: false,
            allow_unverified_hypotheses: false,
        }
    }
}

/// Validate the spec and package the branch derivatives as a cocycle. Word
/// products then realize the derivative of f^n along codings, later branches
/// multiplying on the left.
pub fn build_cocycle(spec: &RepellerSpec) -> Result<MatrixCocycle> {
    if spec.branches.len() != spec.coding.alphabet_len() {
        return Err(Error::AlphabetMismatch {
            shift: spec.coding.alphabet_len(),
            potential: spec.branches.len(),
        });
    }
    let cocycle = MatrixCocycle::new(spec.branches.clone())?;
    if cocycle.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: cocycle.dim(),
        });
    }
    cocycle.require_nonsingular()?;
    if !spec.allow_nonexpanding {
        for (i, m) in spec.branches.iter().enumerate() {
            let (_, s2) = singular_values_2x2(m)?;
            if s2 <= 1.0 {
                return Err(Error::NotExpanding {
                    branch: i + 1,
                    sv: s2,
                });
            }
        }
    }
    Ok(cocycle)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Hypotheses {
    Positive,
    Dominated { gap: f64 },
    Neither,
}

/// Sufficient conditions only: Positive means every entry of every branch is
/// strictly positive; Dominated is certified for families of a common
/// diagonal/triangular shape with per-generator singular-value gap > 1,
/// cross-checked by a product scan to length 10. Neither means "not
/// certified", not "not dominated".
pub fn check_hypotheses(cocycle: &MatrixCocycle) -> Result<Hypotheses> {
    if cocycle.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: cocycle.dim(),
        });
    }
    if cocycle.mats().iter().all(|m| m.is_positive()) {
        return Ok(Hypotheses::Positive);
    }
    let mats = cocycle.mats();
    let same_shape = mats.iter().all(|m| m.is_diagonal())
        || mats.iter().all(|m| m.is_upper_triangular())
        || mats.iter().all(|m| m.is_lower_triangular());
    if !same_shape {
        return Ok(Hypotheses::Neither);
    }
    let mut gap = f64::INFINITY;
    for m in mats {
        let (s1, s2) = singular_values_2x2(m)?;
        if s2 <= 0.0 {
            return Ok(Hypotheses::Neither);
        }
        gap = gap.min(s1 / s2);
    }
    if gap <= 1.0 + 1e-9 {
        return Ok(Hypotheses::Neither);
    }
    if !scan_gap(mats, 10) {
        return Ok(Hypotheses::Neither);
    }
    Ok(Hypotheses::Dominated { gap })
}

/// Every product up to the given length must keep per-step singular-value
/// growth (s1/s2)^(1/n) above 1.
fn scan_gap(mats: &[Mat], max_len: usize) -> bool {
    fn descend(mats: &[Mat], prod: &Mat, len: usize, max_len: usize) -> bool {
        for m in mats {
            let p = m.mul(prod);
            let n = len + 1;
            match singular_values_2x2(&p) {
                Ok((s1, s2)) => {
                    if s2 <= 0.0 || (s1 / s2).powf(1.0 / n as f64) <= 1.0 + 1e-9 {
                        return false;
                    }
                }
                Err(_) => return false,
            }
            if n < max_len && !descend(mats, &p, n, max_len) {
                return false;
            }
        }
        true
    }
    // budget: k^10 closed-form products, trim for wide families
    let len = if mats.len() <= 3 { max_len } else { 6 };
    descend(mats, &Mat::identity(2), 1, len)
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovResult {
    pub hypotheses: Hypotheses,
    /// maximal Lyapunov exponent estimate (log of the spectral-norm JSR)
    pub alpha: f64,
    /// log of the smallest branch singular value: alpha never sits below it
    pub expansion_floor: f64,
    pub jsr: JsrResult,
}

/// Maximise the top Lyapunov exponent over invariant measures of the coding.
pub fn max_lyapunov(spec: &RepellerSpec, cfg: &JsrConfig) -> Result<LyapunovResult> {
    let cocycle = build_cocycle(spec)?;
    let hypotheses = check_hypotheses(&cocycle)?;
    if hypotheses == Hypotheses::Neither && !spec.allow_unverified_hypotheses {
        return Err(Error::NotAlmostAdditive {
            reason: "family is neither positive nor certifiably dominated; \
                     enable allow_unverified_hypotheses to run in empirical mode"
                .into(),
        });
    }
    let mut jcfg = cfg.clone();
    jcfg.norm = NormKind::Spectral;
    let jsr = thermo_jsr(&cocycle, &spec.coding, &jcfg)?;
    let expansion_floor = spec
        .branches
        .iter()
        .map(|m| singular_values_2x2(m).map(|(_, s2)| s2.ln()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(LyapunovResult {
        hypotheses,
        alpha: jsr.thermo.alpha,
        expansion_floor,
        jsr,
    })
}
