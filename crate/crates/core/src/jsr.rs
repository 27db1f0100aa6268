//! Joint spectral radius by three routes: brute-force norm maxima (upper
//! bounds), periodic spectral radii (lower bounds), and the thermodynamic
//! asymptotic slope, cross-validated against each other.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, Mat, ScaledMat};
use crate::potential::{
    certify_constants, summability_report, CSource, GeometricTail, MatrixCocycle, NormKind,
    Potential, SummabilityReport, WORD_BUDGET,
};
use crate::shift::{ShiftSpace, Symbol, Word};
use crate::zerotemp::{extract_maximiser, run_path, MaximisationResult, PathConfig};

#[derive(Debug, Clone)]
pub struct JsrConfig {
    pub norm: NormKind,
    pub schedule: Vec<f64>,
    /// measure depth; None picks the per-alphabet default
    pub depth: Option<usize>,
    /// pressure levels (capped by the enumeration budget)
    pub n_max: usize,
    pub max_period: usize,
    /// brute-force word depth (capped by the enumeration budget)
    pub brute_depth: usize,
    /// almost-additivity scan length
    pub scan_len: usize,
    /// refuse families whose empirical defect constant exceeds this
    pub c_cap: f64,
    pub tail_j: Option<Symbol>,
}

impl Default for JsrConfig {
    fn default() -> Self {
        JsrConfig {
            norm: NormKind::EntrySum,
            schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            depth: None,
            n_max: 12,
            max_period: 8,
            brute_depth: 12,
            scan_len: 6,
            c_cap: 100.0,
            tail_j: None,
        }
    }
}

/// Largest depth <= requested whose cumulative word count stays inside the
/// enumeration budget.
fn capped_depth(shift: &ShiftSpace, requested: usize) -> Result<usize> {
    let mut total: u128 = 0;
    let mut d = 0;
    for n in 1..=requested {
        total = total.saturating_add(shift.word_count(n));
        if total > WORD_BUDGET {
            break;
        }
        d = n;
    }
    if d == 0 {
        return Err(Error::BudgetExceeded {
            words: shift.word_count(1),
            budget: WORD_BUDGET,
        });
    }
    Ok(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteJsr {
    /// (n, rho_n): max over admissible length-n words of ||product||^(1/n)
    pub levels: Vec<(usize, f64)>,
    /// min over levels; a true upper bound since the norms in use are
    /// submultiplicative, so the max-log sequence is subadditive
    pub upper: f64,
    pub witness: Word,
    pub witness_n: usize,
}

fn log_norm(state: &ScaledMat, norm: NormKind) -> f64 {
    match norm {
        NormKind::EntrySum => state.log_entry_sum(),
        NormKind::Spectral => state.log_spectral_norm(),
    }
}

fn brute_descend(
    shift: &ShiftSpace,
    mats: &[Mat],
    norm: NormKind,
    depth: usize,
    prefix: &mut Vec<Symbol>,
    state: &ScaledMat,
    best: &mut [f64],
    witness: &mut Option<Word>,
) {
    let last = prefix.last().copied();
    for s in 1..=shift.alphabet_len() as Symbol {
        if let Some(p) = last {
            if !shift.allows(p, s) {
                continue;
            }
        }
        let next = state.lmul(&mats[(s - 1) as usize]);
        prefix.push(s);
        let len = prefix.len();
        let v = log_norm(&next, norm) / len as f64;
        if v > best[len - 1] {
            best[len - 1] = v;
            if len == depth {
                *witness = Some(Word(prefix.clone()));
            }
        }
        if len < depth {
            brute_descend(shift, mats, norm, depth, prefix, &next, best, witness);
        }
        prefix.pop();
    }
}

/// rho_n for every n up to `n_max` (budget-capped), with incremental product
/// reuse down the word tree, plus the certified upper bound min_n rho_n.
pub fn brute_force_jsr(
    cocycle: &MatrixCocycle,
    shift: &ShiftSpace,
    norm: NormKind,
    n_max: usize,
) -> Result<BruteJsr> {
    if cocycle.len() != shift.alphabet_len() {
        return Err(Error::AlphabetMismatch {
            shift: shift.alphabet_len(),
            potential: cocycle.len(),
        });
    }
    if n_max == 0 {
        return Err(Error::BadModel {
            reason: "brute-force depth must be >= 1".into(),
        });
    }
    let depth = capped_depth(shift, n_max)?;
    let mut best = vec![f64::NEG_INFINITY; depth];
    let mut witness = None;
    let mut prefix = Vec::with_capacity(depth);
    brute_descend(
        shift,
        cocycle.mats(),
        norm,
        depth,
        &mut prefix,
        &ScaledMat::identity(cocycle.dim()),
        &mut best,
        &mut witness,
    );
    let witness = witness.ok_or(Error::BadModel {
        reason: "no admissible word reached the brute-force depth".into(),
    })?;
    let log_upper = best.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BruteJsr {
        levels: best.iter().enumerate().map(|(i, v)| (i + 1, v.exp())).collect(),
        upper: log_upper.exp(),
        witness,
        witness_n: depth,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicLower {
    /// max over cyclically admissible words of rho(product)^(1/|w|); always a
    /// valid lower bound for the JSR
    pub value: f64,
    pub witness: Word,
    pub period: usize,
}

pub fn periodic_lower_bound(
    cocycle: &MatrixCocycle,
    shift: &ShiftSpace,
    max_period: usize,
) -> Result<PeriodicLower> {
    if cocycle.len() != shift.alphabet_len() {
        return Err(Error::AlphabetMismatch {
            shift: shift.alphabet_len(),
            potential: cocycle.len(),
        });
    }
    if max_period == 0 {
        return Err(Error::BadModel {
            reason: "periodic search needs max_period >= 1".into(),
        });
    }
    let cap = capped_depth(shift, max_period)?;
    let mut best: Option<(f64, Word, usize)> = None;
    for p in 1..=cap {
        for a in 1..=shift.alphabet_len() as Symbol {
            for w in shift.periodic_words(p, a) {
                let mut state = ScaledMat::identity(cocycle.dim());
                for &s in w.symbols() {
                    state = state.lmul(cocycle.mat(s));
                }
                let rho = spectral_radius(&state.mat);
                if rho <= 0.0 {
                    continue;
                }
                let log_v = (state.log_scale + rho.ln()) / p as f64;
                let better = match &best {
                    None => true,
                    Some((v, ..)) => log_v > *v + 1e-15,
                };
                if better {
                    best = Some((log_v, w, p));
                }
            }
        }
    }
    let (log_v, witness, period) = best.ok_or(Error::BadModel {
        reason: "every periodic product was nilpotent".into(),
    })?;
    Ok(PeriodicLower {
        value: log_v.exp(),
        witness,
        period,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermoJsr {
    pub value: f64,
    /// (periodic lower, brute upper): both certified, value clamped inside
    pub bracket: (f64, f64),
    pub alpha: f64,
    pub c: f64,
    pub c_source: CSource,
    pub norm: NormKind,
    pub maximiser: MaximisationResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsrResult {
    pub brute: BruteJsr,
    pub periodic: PeriodicLower,
    pub thermo: ThermoJsr,
    pub ordering_ok: bool,
}

/// Full three-route pipeline. The zero-temperature alpha lands between two
/// independently certified bounds (periodic spectral radii from below, norm
/// minima from above) and is clamped into that bracket, so the ordering
/// invariant holds by construction whenever the routes are consistent.
pub fn thermo_jsr(
    cocycle: &MatrixCocycle,
    shift: &ShiftSpace,
    cfg: &JsrConfig,
) -> Result<JsrResult> {
    let pot = Potential::matrix_norm(cocycle.clone(), cfg.norm)?;
    let scan = capped_depth(shift, cfg.scan_len)?.max(2);
    let consts = certify_constants(&pot, shift, scan)?;
    if consts.source == CSource::Empirical && consts.c > cfg.c_cap {
        return Err(Error::NotAlmostAdditive {
            reason: format!(
                "empirical defect constant {:.3} exceeds the configured cap {:.3}",
                consts.c, cfg.c_cap
            ),
        });
    }
    let brute = brute_force_jsr(cocycle, shift, cfg.norm, cfg.brute_depth)?;
    let periodic = periodic_lower_bound(cocycle, shift, cfg.max_period)?;

    let mut pcfg = PathConfig::defaults(shift.alphabet_len());
    pcfg.schedule = cfg.schedule.clone();
    if let Some(d) = cfg.depth {
        pcfg.depth = d;
    }
    pcfg.n_max = capped_depth(shift, cfg.n_max)?.max(4);
    pcfg.max_period = cfg.max_period;
    if let Some(j) = cfg.tail_j {
        pcfg.j_cutoff = j;
    }
    let (records, failures) = run_path(shift, &pot, &consts, &pcfg)?;
    if records.len() < 3 {
        return match failures.into_iter().next() {
            Some((_, e)) => Err(e),
            None => Err(Error::InsufficientCurve {
                len: records.len(),
            }),
        };
    }
    let maximiser = extract_maximiser(&records, shift, &pot, &consts, cfg.max_period)?;

    let log_lo = periodic.value.ln();
    let log_hi = brute.upper.ln();
    if log_lo > log_hi + 1e-9 {
        return Err(Error::InconsistentBracket {
            lower: log_lo,
            upper: log_hi,
        });
    }
    let alpha = maximiser.alpha.clamp(log_lo, log_hi.max(log_lo));
    let value = alpha.exp();
    let ordering_ok =
        periodic.value <= value * (1.0 + 1e-12) && value <= brute.upper * (1.0 + 1e-12);

    Ok(JsrResult {
        thermo: ThermoJsr {
            value,
            bracket: (periodic.value, brute.upper),
            alpha,
            c: consts.c,
            c_source: consts.source,
            norm: cfg.norm,
            maximiser,
        },
        brute,
        periodic,
        ordering_ok,
    })
}

/// A countable matrix family given by a generator rule.
#[derive(Debug, Clone)]
pub enum CountableFamily {
    /// A_i = base * ratio^i
    Geometric { base: Mat, ratio: f64 },
    /// A_i = base for every i
    Constant { base: Mat },
}

impl CountableFamily {
    pub fn mat(&self, i: usize) -> Mat {
        match self {
            CountableFamily::Geometric { base, ratio } => base.scale(ratio.powi(i as i32)),
            CountableFamily::Constant { base } => base.clone(),
        }
    }

    fn tail(&self) -> Option<GeometricTail> {
        match self {
            CountableFamily::Geometric { ratio, .. } => Some(GeometricTail {
                ratio: *ratio,
                from_index: 1,
            }),
            CountableFamily::Constant { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountableLevel {
    pub level: usize,
    /// closed-form sum over i > level of sup f_1 on the i-th cylinder
    pub tail_sup_sum: Option<f64>,
    pub result: JsrResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountableJsr {
    pub levels: Vec<CountableLevel>,
    /// thermo deltas between consecutive levels
    pub deltas: Vec<f64>,
    pub summability: Option<SummabilityReport>,
    /// the countable route optimises over invariant measures, which can in
    /// principle differ from the orbitwise supremum; results are labeled so
    pub label: String,
}

/// Truncation scheme: run the full pipeline on the first `level` matrices for
/// each requested level. Positivity of every member is required, and a
/// geometric family must certify summability (class R) before any level runs.
pub fn countable_jsr(
    family: &CountableFamily,
    levels: &[usize],
    cfg: &JsrConfig,
) -> Result<CountableJsr> {
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) || levels[0] == 0 {
        return Err(Error::BadModel {
            reason: "truncation levels must be strictly increasing and positive".into(),
        });
    }
    if let CountableFamily::Geometric { ratio, .. } = family {
        if !ratio.is_finite() || *ratio <= 0.0 {
            return Err(Error::BadModel {
                reason: "geometric ratio must be positive and finite".into(),
            });
        }
        if *ratio >= 1.0 {
            return Err(Error::NotInClassR);
        }
    }
    let top = *levels.last().unwrap();
    let norm_of = |m: &Mat| match cfg.norm {
        NormKind::EntrySum => m.entry_sum_norm(),
        NormKind::Spectral => crate::linalg::spectral_norm(m),
    };
    let summability = match family.tail() {
        Some(tail) => {
            let sups: Vec<f64> = (1..=top).map(|i| norm_of(&family.mat(i))).collect();
            let report = summability_report(&sups, Some(tail))?;
            if !report.in_class_r {
                return Err(Error::NotInClassR);
            }
            Some(report)
        }
        None => None,
    };

    let mut out_levels = Vec::new();
    for &l in levels {
        let mats: Vec<Mat> = (1..=l).map(|i| family.mat(i)).collect();
        let cocycle = MatrixCocycle::new(mats)?;
        if cocycle.positivity_ratio().is_none() {
            return Err(Error::NoPositivityRatio);
        }
        let shift = ShiftSpace::full(l);
        let result = thermo_jsr(&cocycle, &shift, cfg)?;
        let tail_sup_sum = match family {
            CountableFamily::Geometric { ratio, .. } => {
                // sum_{i>l} v_1 r^(i-1) with v_i = ||A_i||
                let v_next = norm_of(&family.mat(l + 1));
                Some(v_next / (1.0 - ratio))
            }
            CountableFamily::Constant { .. } => None,
        };
        out_levels.push(CountableLevel {
            level: l,
            tail_sup_sum,
            result,
        });
    }
    let deltas = out_levels
        .windows(2)
        .map(|w| w[1].result.thermo.value - w[0].result.thermo.value)
        .collect();
    Ok(CountableJsr {
        levels: out_levels,
        deltas,
        summability,
        label: "sup over invariant measures of the truncated family".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::golden_mean;

    fn golden_pair() -> MatrixCocycle {
        MatrixCocycle::new(vec![
            Mat::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap(),
            Mat::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap(),
        ])
        .unwrap()
    }

    fn positive_pair() -> MatrixCocycle {
        MatrixCocycle::new(vec![
            Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap(),
        ])
        .unwrap()
    }

    fn scalar_pair() -> MatrixCocycle {
        MatrixCocycle::new(vec![
            Mat::identity(2).scale(2.0),
            Mat::identity(2).scale(3.0),
        ])
        .unwrap()
    }

    const PHI: f64 = 1.618033988749894848;

    #[test]
    fn brute_single_matrix_gelfand() {
        let c = MatrixCocycle::new(vec![Mat::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap()])
            .unwrap();
        let s = ShiftSpace::full(1);
        let b = brute_force_jsr(&c, &s, NormKind::EntrySum, 12).unwrap();
        assert_eq!(b.levels.len(), 12);
        // rho_n = (2^n + 1)^(1/n)
        for (n, v) in &b.levels {
            let expect = (2f64.powi(*n as i32) + 1.0).powf(1.0 / *n as f64);
            assert!((v - expect).abs() < 1e-12 * expect);
        }
        assert!(b.upper >= 2.0 && b.upper < 2.001);
        assert_eq!(b.witness.len(), 12);
    }

    #[test]
    fn brute_homogeneity() {
        let s = ShiftSpace::full(2);
        let a = golden_pair();
        let doubled = MatrixCocycle::new(a.mats().iter().map(|m| m.scale(2.0)).collect()).unwrap();
        let b1 = brute_force_jsr(&a, &s, NormKind::EntrySum, 6).unwrap();
        let b2 = brute_force_jsr(&doubled, &s, NormKind::EntrySum, 6).unwrap();
        for ((_, v1), (_, v2)) in b1.levels.iter().zip(&b2.levels) {
            assert!((v2 / v1 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn brute_golden_pair_level_12() {
        let s = ShiftSpace::full(2);
        let b = brute_force_jsr(&golden_pair(), &s, NormKind::EntrySum, 12).unwrap();
        let rho12 = b.levels[11].1;
        // max product is the alternation, entry sum 610
        assert!((rho12 - 610f64.powf(1.0 / 12.0)).abs() < 1e-12);
        assert!(rho12 > 1.618 && rho12 < 1.75);
    }

    #[test]
    fn brute_subshift_below_full_shift() {
        let full = ShiftSpace::full(2);
        let gm = golden_mean();
        let bf = brute_force_jsr(&golden_pair(), &full, NormKind::EntrySum, 10).unwrap();
        let bg = brute_force_jsr(&golden_pair(), &gm, NormKind::EntrySum, 10).unwrap();
        for ((_, vf), (_, vg)) in bf.levels.iter().zip(&bg.levels) {
            assert!(vg <= &(vf * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn periodic_scalar_pair() {
        let s = ShiftSpace::full(2);
        let p = periodic_lower_bound(&scalar_pair(), &s, 4).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
        assert_eq!(p.witness.to_string(), "2");
        assert_eq!(p.period, 1);
    }

    #[test]
    fn periodic_golden_pair_is_phi() {
        let s = ShiftSpace::full(2);
        let p = periodic_lower_bound(&golden_pair(), &s, 2).unwrap();
        assert!((p.value - PHI).abs() < 1e-9, "{}", p.value);
        assert_eq!(p.witness.to_string(), "12");
        assert_eq!(p.period, 2);
    }

    #[test]
    fn periodic_identity_pair() {
        let c = MatrixCocycle::new(vec![Mat::identity(2), Mat::identity(2)]).unwrap();
        let s = ShiftSpace::full(2);
        let p = periodic_lower_bound(&c, &s, 3).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        assert_eq!(p.witness.to_string(), "1");
    }

    fn quick_cfg() -> JsrConfig {
        JsrConfig {
            schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            depth: Some(6),
            n_max: 10,
            ..JsrConfig::default()
        }
    }

    #[test]
    fn thermo_scalar_pair_is_three() {
        let s = ShiftSpace::full(2);
        let r = thermo_jsr(&scalar_pair(), &s, &quick_cfg()).unwrap();
        assert!((r.thermo.value - 3.0).abs() < 1e-3, "{}", r.thermo.value);
        assert!(r.ordering_ok);
    }

    #[test]
    fn thermo_single_matrix_gelfand() {
        let c = MatrixCocycle::new(vec![Mat::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap()])
            .unwrap();
        let s = ShiftSpace::full(1);
        let mut cfg = quick_cfg();
        cfg.depth = Some(8);
        let r = thermo_jsr(&c, &s, &cfg).unwrap();
        assert!((r.thermo.value - 2.0).abs() < 1e-3, "{}", r.thermo.value);
    }

    #[test]
    fn thermo_positive_pair_ordering_and_value() {
        let s = ShiftSpace::full(2);
        let mut cfg = JsrConfig::default();
        cfg.depth = Some(8);
        let r = thermo_jsr(&positive_pair(), &s, &cfg).unwrap();
        assert_eq!(r.thermo.c_source, CSource::Analytic);
        assert!((r.thermo.c - 4f64.ln()).abs() < 1e-12);
        assert!(r.ordering_ok);
        assert!(r.periodic.value <= r.thermo.value + 1e-12);
        assert!(r.thermo.value <= r.brute.upper + 1e-12);
        let oracle = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((r.thermo.value - oracle).abs() < 2e-2, "{}", r.thermo.value);
    }

    #[test]
    fn thermo_norm_independence_scalar_pair() {
        let s = ShiftSpace::full(2);
        let mut c1 = quick_cfg();
        c1.norm = NormKind::EntrySum;
        let mut c2 = quick_cfg();
        c2.norm = NormKind::Spectral;
        let r1 = thermo_jsr(&scalar_pair(), &s, &c1).unwrap();
        let r2 = thermo_jsr(&scalar_pair(), &s, &c2).unwrap();
        assert!((r1.thermo.value - r2.thermo.value).abs() < 1e-3);
        // spectral norm of scalar matrices has no norm constant at all
        assert!((r2.thermo.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn thermo_golden_pair_runs_in_empirical_mode() {
        let s = ShiftSpace::full(2);
        let mut cfg = quick_cfg();
        cfg.depth = Some(8);
        let r = thermo_jsr(&golden_pair(), &s, &cfg).unwrap();
        assert_eq!(r.thermo.c_source, CSource::Empirical);
        assert!(r.thermo.value >= 1.618 - 1e-9 && r.thermo.value <= 1.75);
    }

    #[test]
    fn thermo_c_cap_rejects() {
        let s = ShiftSpace::full(2);
        let mut cfg = quick_cfg();
        cfg.c_cap = 0.5;
        assert!(matches!(
            thermo_jsr(&golden_pair(), &s, &cfg),
            Err(Error::NotAlmostAdditive { .. })
        ));
    }

    #[test]
    fn countable_geometric_levels() {
        let family = CountableFamily::Geometric {
            base: Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            ratio: 0.5,
        };
        let cfg = JsrConfig {
            schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            ..JsrConfig::default()
        };
        let out = countable_jsr(&family, &[2, 4, 8], &cfg).unwrap();
        assert_eq!(out.levels.len(), 3);
        let oracle = (3.0 + 5f64.sqrt()) / 4.0; // rho(B)/2, dominated by symbol 1
        for lvl in &out.levels {
            assert!(
                (lvl.result.thermo.value - oracle).abs() < 2e-2,
                "level {}: {}",
                lvl.level,
                lvl.result.thermo.value
            );
        }
        // sum_{i>l} 5 * 2^-i = 5 * 2^-l
        for (lvl, expect) in out.levels.iter().zip([1.25, 0.3125, 5.0 / 256.0]) {
            let t = lvl.tail_sup_sum.unwrap();
            assert!((t - expect).abs() < 1e-12, "{t} vs {expect}");
        }
        assert!(out.summability.as_ref().unwrap().in_class_r);
        for d in &out.deltas {
            assert!(d.abs() < 2e-2);
        }
    }

    #[test]
    fn countable_constant_family() {
        let family = CountableFamily::Constant {
            base: Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
        };
        let cfg = JsrConfig {
            schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            depth: Some(6),
            ..JsrConfig::default()
        };
        let out = countable_jsr(&family, &[1, 2], &cfg).unwrap();
        let rho = (3.0 + 5f64.sqrt()) / 2.0;
        for lvl in &out.levels {
            assert!((lvl.result.thermo.value - rho).abs() < 2e-2);
            assert!(lvl.tail_sup_sum.is_none());
        }
        assert!(out.summability.is_none());
    }

    #[test]
    fn countable_divergent_ratio() {
        let family = CountableFamily::Geometric {
            base: Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            ratio: 1.5,
        };
        assert!(matches!(
            countable_jsr(&family, &[2], &JsrConfig::default()),
            Err(Error::NotInClassR)
        ));
    }

    #[test]
    fn countable_requires_positivity() {
        let family = CountableFamily::Geometric {
            base: Mat::identity(2),
            ratio: 0.5,
        };
        assert!(matches!(
            countable_jsr(&family, &[2], &JsrConfig::default()),
            Err(Error::NoPositivityRatio)
        ));
    }
}
