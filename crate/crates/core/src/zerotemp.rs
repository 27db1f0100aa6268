//! Zero-temperature machinery: run the Gibbs approximants along an
//! increasing temperature schedule, then extract the maximising value
//! alpha(F) with a certified bracket.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::{cesaro_invariantize, nu_weights, CylinderMeasure};
use crate::numerics::REL_FLOOR;
use crate::potential::{CertifiedConstants, Potential, WORD_BUDGET};
use crate::pressure::{asymptotic_slope, gurevich_pressure, PressureEstimate, SlopeEstimate};
use crate::shift::{ShiftSpace, Symbol, Word};

#[derive(Debug, Clone)]
pub struct PathConfig {
    pub schedule: Vec<f64>,
    /// target depth of the invariantized measures
    pub depth: usize,
    /// pressure partition-sum levels
    pub n_max: usize,
    pub anchor: Symbol,
    /// tail-mass cutoff symbol
    pub j_cutoff: Symbol,
    /// period cap for the brute-force periodic search
    pub max_period: usize,
}

impl PathConfig {
    /// Defaults per alphabet size: depth 10 for two symbols, 8 for three,
    /// smaller for wider alphabets to respect the enumeration budget.
    pub fn defaults(alphabet: usize) -> Self {
        let depth = match alphabet {
            1 => 8,
            2 => 10,
            3 => 8,
            4..=6 => 5,
            _ => 3,
        };
        PathConfig {
            schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            depth,
            n_max: 12.min(depth + 4),
            anchor: 1,
            j_cutoff: alphabet as Symbol,
            max_period: 8,
        }
    }

    /// Cesaro horizon: half the target depth.
    pub fn horizon(&self) -> usize {
        (self.depth / 2).max(1)
    }

    /// Depth of the raw measure the averaging consumes.
    pub fn raw_depth(&self) -> usize {
        self.depth + self.horizon()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TemperaturePathRecord {
    pub t: f64,
    pub pressure: PressureEstimate,
    pub energy: f64,
    pub energy_bias: f64,
    pub entropy_rate: f64,
    pub tail_mass: f64,
    pub top_cylinders: Vec<(String, f64)>,
    #[serde(skip)]
    pub measure: CylinderMeasure,
}

fn record_at(
    shift: &ShiftSpace,
    pot: &Potential,
    consts: &CertifiedConstants,
    cfg: &PathConfig,
    t: f64,
) -> Result<TemperaturePathRecord> {
    let pressure = gurevich_pressure(shift, pot, t, cfg.n_max, cfg.anchor, consts)?;
    let raw = nu_weights(shift, pot, t, cfg.raw_depth())?;
    let measure = cesaro_invariantize(&raw, cfg.horizon(), cfg.depth)?;
    let (energy, energy_bias) = measure.energy_with_bias(pot, consts.c);
    let entropy_rate = measure.entropy_rate();
    let tail_mass = measure.tail_mass(cfg.j_cutoff);
    let top_cylinders = measure
        .top_k(5)
        .into_iter()
        .map(|(w, v)| (w.to_string(), v))
        .collect();
    Ok(TemperaturePathRecord {
        t,
        pressure,
        energy,
        energy_bias,
        entropy_rate,
        tail_mass,
        top_cylinders,
        measure,
    })
}

/// One record per schedule temperature; failures are collected per t and do
/// not abort the rest of the schedule. Temperatures run in parallel, each one
/// internally sequential, so the thread count cannot change any output.
pub fn run_path(
    shift: &ShiftSpace,
    pot: &Potential,
    consts: &CertifiedConstants,
    cfg: &PathConfig,
) -> Result<(Vec<TemperaturePathRecord>, Vec<(f64, Error)>)> {
    pot.check_alphabet(shift)?;
    if cfg.schedule.is_empty() || cfg.schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadModel {
            reason: "temperature schedule must be strictly increasing and nonempty".into(),
        });
    }
    if cfg.schedule.iter().any(|t| *t < 0.0) {
        return Err(Error::NegativeTemperature {
            t: cfg.schedule[0],
        });
    }
    let words = shift.word_count(cfg.raw_depth());
    if words > WORD_BUDGET {
        return Err(Error::BudgetExceeded {
            words,
            budget: WORD_BUDGET,
        });
    }
    let outcomes: Vec<(f64, Result<TemperaturePathRecord>)> = cfg
        .schedule
        .par_iter()
        .map(|&t| (t, record_at(shift, pot, consts, cfg, t)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (t, r) in outcomes {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push((t, e)),
        }
    }
    Ok((records, failures))
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteAlpha {
    /// best repeat-filled periodic average of eval
    pub value: f64,
    pub word: Word,
    /// value with the almost-additivity correction: a certified lower bound
    /// for alpha(F)
    pub certified_floor: f64,
    /// C / (filled length): how far `value` may sit above the orbit limit
    pub slack: f64,
}

/// Max over cyclically admissible words up to `max_period` of the repeat-
/// filled average eval(w^m) / (m |w|), m = floor(max_period / |w|). Repeating
/// the cycle before averaging washes out the additivity defect: the average
/// lies within C / (m |w|) of the true orbit value, and subtracting that
/// defect gives a certified floor. Candidates are ranked by the certified
/// value, not the raw average: the raw average carries a bias of up to
/// C / (m |w|), which would otherwise hand the win to short words whose fill
/// count m is 1.
pub fn brute_force_alpha(
    shift: &ShiftSpace,
    pot: &Potential,
    max_period: usize,
    c: f64,
) -> Result<BruteAlpha> {
    pot.check_alphabet(shift)?;
    if max_period == 0 {
        return Err(Error::BadModel {
            reason: "periodic search needs max_period >= 1".into(),
        });
    }
    let mut best: Option<(f64, Word, f64, f64)> = None;
    let mut floor = f64::NEG_INFINITY;
    for p in 1..=max_period {
        for a in 1..=shift.alphabet_len() as Symbol {
            for w in shift.periodic_words(p, a) {
                let m = (max_period / p).max(1);
                let filled: Vec<Symbol> = (0..m * p).map(|i| w.symbols()[i % p]).collect();
                let len = (m * p) as f64;
                let avg = pot.eval(&filled) / len;
                if !avg.is_finite() {
                    continue;
                }
                let certified = avg - c / len;
                floor = floor.max(certified);
                let better = match &best {
                    None => true,
                    Some((_, _, cert, _)) => certified > *cert + 1e-15,
                };
                if better {
                    best = Some((avg, w.clone(), certified, c / len));
                }
            }
        }
    }
    let (value, word, _, slack) = best.ok_or(Error::BadModel {
        reason: "no finite-energy periodic orbit found".into(),
    })?;
    Ok(BruteAlpha {
        value,
        word,
        certified_floor: floor,
        slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlphaSource {
    TerminalEnergy,
    PressureSlope,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximisationResult {
    pub alpha: f64,
    pub alpha_bracket: (f64, f64),
    pub alpha_source: AlphaSource,
    pub alpha_uncertainty: f64,
    /// depth-n cylinders carrying at least 95% of the terminal mass
    pub argmax_cylinders: Vec<(String, f64)>,
    pub best_periodic_orbit: Word,
    pub best_periodic_value: f64,
    pub certified_periodic_floor: f64,
    pub agreement_flag: bool,
    pub terminal_energy: f64,
    pub terminal_entropy: f64,
    pub slope: SlopeEstimate,
}

/// Reconcile the two alpha estimators. The terminal energy carries the
/// norm-constant bias C/n, which never decays along the schedule; the
/// pressure slope carries extrapolation noise instead. Whichever claims the
/// smaller uncertainty wins, and the certified bracket clamps the answer.
pub fn extract_maximiser(
    path: &[TemperaturePathRecord],
    shift: &ShiftSpace,
    pot: &Potential,
    consts: &CertifiedConstants,
    max_period: usize,
) -> Result<MaximisationResult> {
    if path.len() < 3 {
        return Err(Error::InsufficientCurve { len: path.len() });
    }
    let brute = brute_force_alpha(shift, pot, max_period, consts.c)?;
    let curve: Vec<PressureEstimate> = path.iter().map(|r| r.pressure.clone()).collect();
    let slope = asymptotic_slope(&curve, Some(brute.certified_floor))?;

    let last = &path[path.len() - 1];
    let prev = &path[path.len() - 2];
    let energy_unc = last.energy_bias + (last.energy - prev.energy).abs() + REL_FLOOR;
    let slope_unc = slope.uncertainty;

    let lower = brute.certified_floor;
    let upper = slope.upper;
    let tol = 1e-6 + energy_unc.min(slope_unc);
    if lower > upper + tol {
        return Err(Error::InconsistentBracket { lower, upper });
    }

    let (raw_alpha, source, unc) = if energy_unc <= slope_unc {
        (last.energy, AlphaSource::TerminalEnergy, energy_unc)
    } else {
        (slope.value, AlphaSource::PressureSlope, slope_unc)
    };
    let alpha = raw_alpha.clamp(lower, upper.max(lower));

    let argmax_cylinders = last
        .measure
        .support_cover(0.95)
        .into_iter()
        .map(|(w, v)| (w.to_string(), v))
        .collect();
    let agreement_flag = (alpha - brute.value).abs() <= brute.slack + unc + 1e-6;

    Ok(MaximisationResult {
        alpha,
        alpha_bracket: (lower, upper),
        alpha_source: source,
        alpha_uncertainty: unc,
        argmax_cylinders,
        best_periodic_orbit: brute.word.clone(),
        best_periodic_value: brute.value,
        certified_periodic_floor: brute.certified_floor,
        agreement_flag,
        terminal_energy: last.energy,
        terminal_entropy: last.entropy_rate,
        slope,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub entropy_nonincreasing: bool,
    pub entropy_worst_step: f64,
    pub energy_nondecreasing: bool,
    pub energy_worst_step: f64,
    pub energy_bounded: bool,
    pub energy_bound: f64,
    pub sandwich_ok: bool,
    pub sandwich_worst: f64,
}

impl MonotonicityReport {
    pub fn all_pass(&self) -> bool {
        self.entropy_nonincreasing
            && self.energy_nondecreasing
            && self.energy_bounded
            && self.sandwich_ok
    }
}

/// Structural facts along the path: entropy falls, energy rises, energy
/// stays under the uniform first-level bound, and at every t the pressure
/// ratio sits between energy and energy + h(t_first)/t, all up to computed
/// slacks. Diagnostic: returns flags, never errors.
pub fn check_monotonicities(
    path: &[TemperaturePathRecord],
    pot: &Potential,
    consts: &CertifiedConstants,
) -> MonotonicityReport {
    let slack = 1e-9;
    let mut entropy_worst = 0.0f64;
    let mut energy_worst = 0.0f64;
    for w in path.windows(2) {
        entropy_worst = entropy_worst.max(w[1].entropy_rate - w[0].entropy_rate);
        energy_worst = energy_worst.max(w[0].energy - w[1].energy);
    }
    let bias = path.iter().map(|r| r.energy_bias).fold(0.0, f64::max);
    let entropy_nonincreasing = entropy_worst <= slack;
    let energy_nondecreasing = energy_worst <= 2.0 * bias + slack;

    let f1_max = (1..=pot.alphabet_len() as Symbol)
        .map(|i| pot.f1_log_sup(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let energy_bound = f1_max + consts.c;
    let energy_bounded = path.iter().all(|r| r.energy <= energy_bound + slack);

    let h_first = path.first().map(|r| r.entropy_rate).unwrap_or(0.0);
    let mut sandwich_worst = 0.0f64;
    for r in path {
        if r.t <= 0.0 {
            continue;
        }
        let ratio = r.pressure.point / r.t;
        let s = r.energy_bias + (r.pressure.width() + r.pressure.point_uncertainty) / r.t + slack;
        sandwich_worst = sandwich_worst.max(r.energy - ratio - s);
        sandwich_worst = sandwich_worst.max(ratio - (r.energy + h_first / r.t) - s);
    }
    let sandwich_ok = sandwich_worst <= 0.0;

    MonotonicityReport {
        entropy_nonincreasing,
        entropy_worst_step: entropy_worst,
        energy_nondecreasing,
        energy_worst_step: energy_worst,
        energy_bounded,
        energy_bound,
        sandwich_ok,
        sandwich_worst,
    }
}
