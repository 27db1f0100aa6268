//! JSON model files: the single input format of the CLI. A model declares a
//! shift, exactly one of a potential / repeller / countable family, and the
//! run configuration (schedule, depths, tail cutoff).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsr::{CountableFamily, JsrConfig};
use crate::linalg::Mat;
use crate::lyapunov::RepellerSpec;
use crate::potential::{
    summability_report, GeometricTail, MatrixCocycle, NormKind, Potential, SummabilityReport,
    WORD_BUDGET,
};
use crate::shift::{ShiftSpace, Symbol};
use crate::zerotemp::PathConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub shift: ShiftSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeller: Option<RepellerFileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub countable: Option<CountableSpec>,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<f64>,
    #[serde(default)]
    pub depths: DepthSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_cutoff_j: Option<Symbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn default_schedule() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShiftSpec {
    Full { alphabet: usize },
    Matrix { transition: Vec<Vec<u8>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Scalar {
        weights: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailSpec>,
    },
    Matrix {
        matrices: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        norm: NormSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailSpec>,
    },
    Singular {
        matrices: Vec<Vec<Vec<f64>>>,
        sv_index: usize,
    },
}

/// Declared geometric decay of the first-level sups, v_i = v_from * ratio^(i-from).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    pub ratio: f64,
    pub from: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpec {
    #[default]
    Sum,
    Spectral,
}

impl From<NormSpec> for NormKind {
    fn from(n: NormSpec) -> NormKind {
        match n {
            NormSpec::Sum => NormKind::EntrySum,
            NormSpec::Spectral => NormKind::Spectral,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepellerFileSpec {
    pub branches: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub allow_nonexpanding: bool,
    #[serde(default)]
    pub allow_unverified_hypotheses: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountableSpec {
    pub base: Vec<Vec<f64>>,
    /// A_i = base * ratio^i; omit for the constant family
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthSpec {
    #[serde(default = "d_n_max")]
    pub n_max: usize,
    /// measure depth; omit for the per-alphabet default
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default = "d_max_period")]
    pub max_period: usize,
    #[serde(default = "d_scan_len")]
    pub scan_len: usize,
    #[serde(default = "d_brute")]
    pub brute_depth: usize,
}

fn d_n_max() -> usize {
    12
}
fn d_max_period() -> usize {
    8
}
fn d_scan_len() -> usize {
    6
}
fn d_brute() -> usize {
    12
}

impl Default for DepthSpec {
    fn default() -> Self {
        DepthSpec {
            n_max: d_n_max(),
            depth: None,
            max_period: d_max_period(),
            scan_len: d_scan_len(),
            brute_depth: d_brute(),
        }
    }
}

fn parse_mat(rows: &[Vec<f64>]) -> Result<Mat> {
    Mat::from_rows(rows)
}

fn parse_mats(list: &[Vec<Vec<f64>>]) -> Result<Vec<Mat>> {
    list.iter().map(|m| parse_mat(m)).collect()
}

impl ModelFile {
    pub fn from_path(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path)?;
        let model: ModelFile = serde_json::from_str(&text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::BadModel {
                reason: format!(
                    "unsupported schema_version {} (expected {})",
                    self.schema_version, SCHEMA_VERSION
                ),
            });
        }
        let sections = [
            self.potential.is_some(),
            self.repeller.is_some(),
            self.countable.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if sections != 1 {
            return Err(Error::BadModel {
                reason: "exactly one of potential, repeller, countable must be present".into(),
            });
        }
        if self.schedule.is_empty()
            || self.schedule.windows(2).any(|w| w[0] >= w[1])
            || self.schedule.iter().any(|t| !t.is_finite() || *t < 0.0)
        {
            return Err(Error::BadModel {
                reason: "schedule must be strictly increasing, nonnegative and finite".into(),
            });
        }
        if let ShiftSpec::Full { alphabet } = self.shift {
            if alphabet == 0 {
                return Err(Error::BadModel {
                    reason: "alphabet must have at least one symbol".into(),
                });
            }
        }
        let shift = self.build_shift()?;
        if self.potential.is_some() || self.repeller.is_some() {
            // raw measure depth is the binding enumeration cost
            let cfg = self.path_config(&shift);
            let words = shift.word_count(cfg.raw_depth());
            if words > WORD_BUDGET {
                return Err(Error::BudgetExceeded {
                    words,
                    budget: WORD_BUDGET,
                });
            }
        }
        Ok(())
    }

    pub fn build_shift(&self) -> Result<ShiftSpace> {
        match &self.shift {
            ShiftSpec::Full { alphabet } => Ok(ShiftSpace::full(*alphabet)),
            ShiftSpec::Matrix { transition } => ShiftSpace::from_matrix(transition),
        }
    }

    pub fn build_potential(&self) -> Result<Potential> {
        let spec = self.potential.as_ref().ok_or(Error::BadModel {
            reason: "model has no potential section".into(),
        })?;
        match spec {
            PotentialSpec::Scalar { weights, .. } => Potential::scalar(weights.clone()),
            PotentialSpec::Matrix { matrices, norm, .. } => {
                let cocycle = MatrixCocycle::new(parse_mats(matrices)?)?;
                Potential::matrix_norm(cocycle, (*norm).into())
            }
            PotentialSpec::Singular { matrices, sv_index } => {
                let cocycle = MatrixCocycle::new(parse_mats(matrices)?)?;
                Potential::singular_value(cocycle, *sv_index)
            }
        }
    }

    /// Summability report when the model declares a tail for its potential.
    pub fn summability(&self) -> Result<Option<SummabilityReport>> {
        let tail = match &self.potential {
            Some(PotentialSpec::Scalar { tail, .. }) => *tail,
            Some(PotentialSpec::Matrix { tail, .. }) => *tail,
            _ => None,
        };
        let Some(t) = tail else {
            return Ok(None);
        };
        let pot = self.build_potential()?;
        let sups: Vec<f64> = (1..=pot.alphabet_len() as Symbol)
            .map(|i| pot.f1_log_sup(i).exp())
            .collect();
        let report = summability_report(
            &sups,
            Some(GeometricTail {
                ratio: t.ratio,
                from_index: t.from,
            }),
        )?;
        Ok(Some(report))
    }

    pub fn build_repeller(&self) -> Result<RepellerSpec> {
        let spec = self.repeller.as_ref().ok_or(Error::BadModel {
            reason: "model has no repeller section".into(),
        })?;
        let mut r = RepellerSpec::new(parse_mats(&spec.branches)?, self.build_shift()?);
        r.allow_nonexpanding = spec.allow_nonexpanding;
        r.allow_unverified_hypotheses = spec.allow_unverified_hypotheses;
        Ok(r)
    }

    pub fn build_countable(&self) -> Result<(CountableFamily, Vec<usize>)> {
        let spec = self.countable.as_ref().ok_or(Error::BadModel {
            reason: "model has no countable section".into(),
        })?;
        let base = parse_mat(&spec.base)?;
        let family = match spec.ratio {
            Some(r) => CountableFamily::Geometric { base, ratio: r },
            None => CountableFamily::Constant { base },
        };
        Ok((family, spec.levels.clone()))
    }

    /// The norm declared for a matrix potential (entry-sum when absent).
    pub fn norm_kind(&self) -> NormKind {
        match &self.potential {
            Some(PotentialSpec::Matrix { norm, .. }) => (*norm).into(),
            _ => NormKind::EntrySum,
        }
    }

    pub fn path_config(&self, shift: &ShiftSpace) -> PathConfig {
        let mut cfg = PathConfig::defaults(shift.alphabet_len());
        cfg.schedule = self.schedule.clone();
        if let Some(d) = self.depths.depth {
            cfg.depth = d;
        }
        cfg.n_max = self.depths.n_max;
        cfg.max_period = self.depths.max_period;
        if let Some(j) = self.tail_cutoff_j {
            cfg.j_cutoff = j;
        }
        cfg
    }

    pub fn jsr_config(&self) -> JsrConfig {
        JsrConfig {
            norm: self.norm_kind(),
            schedule: self.schedule.clone(),
            depth: self.depths.depth,
            n_max: self.depths.n_max,
            max_period: self.depths.max_period,
            brute_depth: self.depths.brute_depth,
            scan_len: self.depths.scan_len,
            c_cap: 100.0,
            tail_j: self.tail_cutoff_j,
        }
    }
}
