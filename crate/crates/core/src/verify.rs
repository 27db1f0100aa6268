//! The `verify` suite: named end-to-end invariant checks over closed-form
//! and seeded random models. Deterministic by construction (fixed seeds,
//! fixed orders, no wall clock), small enough to run single-threaded in well
//! under five minutes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::gibbs::{gibbs_certificate, nu_weights, tightness_report, CylinderMeasure};
use crate::jsr::{thermo_jsr, JsrConfig};
use crate::linalg::Mat;
use crate::potential::{certify_constants, MatrixCocycle, NormKind, Potential};
use crate::pressure::{free_partition_sum, gurevich_pressure, partition_sum};
use crate::shift::{golden_mean, ShiftSpace, Word};
use crate::zerotemp::{check_monotonicities, extract_maximiser, run_path, PathConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// splitmix64: tiny, seedable, identical on every platform. The suite needs
/// byte-identical reruns, which rules out RNGs whose streams may change
/// across library versions.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn run_check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((true, detail)) => CheckResult {
            name,
            status: CheckStatus::Pass,
            detail,
        },
        Ok((false, detail)) => CheckResult {
            name,
            status: CheckStatus::Fail,
            detail,
        },
        Err(e) => CheckResult {
            name,
            status: CheckStatus::Fail,
            detail: format!("error: {e}"),
        },
    }
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

fn random_scalar(rng: &mut SplitMix64, k: usize) -> Potential {
    let weights: Vec<f64> = (0..k).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
    Potential::scalar(weights).expect("finite weights")
}

fn random_positive_cocycle(rng: &mut SplitMix64) -> MatrixCocycle {
    let mut mats = Vec::new();
    for _ in 0..2 {
        let e: Vec<f64> = (0..4).map(|_| 0.2 + 2.0 * rng.next_f64()).collect();
        mats.push(Mat::from_rows(&[vec![e[0], e[1]], vec![e[2], e[3]]]).unwrap());
    }
    MatrixCocycle::new(mats).expect("positive entries")
}

/// Second divided differences of the pressure curve must not dip below minus
/// three bracket widths (convexity up to certification error).
fn convexity_margin(shift: &ShiftSpace, pot: &Potential, n_max: usize) -> Result<f64> {
    let consts = certify_constants(pot, shift, 4)?;
    let ts = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    let ests: Vec<_> = ts
        .iter()
        .map(|&t| gurevich_pressure(shift, pot, t, n_max, 1, &consts))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = f64::INFINITY;
    for i in 0..ests.len() - 2 {
        let (a, b, c) = (&ests[i], &ests[i + 1], &ests[i + 2]);
        let s1 = (b.point - a.point) / (ts[i + 1] - ts[i]);
        let s2 = (c.point - b.point) / (ts[i + 2] - ts[i + 1]);
        let slack = 3.0 * (a.width() + b.width() + c.width())
            + a.point_uncertainty
            + b.point_uncertainty
            + c.point_uncertainty;
        worst = worst.min((s2 - s1) + slack);
    }
    Ok(worst)
}

fn check_convexity_scalar() -> Result<(bool, String)> {
    let mut rng = SplitMix64(0x5EED_0001);
    let mut worst = f64::INFINITY;
    for i in 0..5 {
        let k = 2 + (i % 2);
        let shift = ShiftSpace::full(k);
        let pot = random_scalar(&mut rng, k);
        worst = worst.min(convexity_margin(&shift, &pot, 10)?);
    }
    Ok((worst >= 0.0, format!("worst margin {worst:.3e}")))
}

fn check_convexity_positive() -> Result<(bool, String)> {
    let mut rng = SplitMix64(0x5EED_0002);
    let shift = ShiftSpace::full(2);
    let mut worst = f64::INFINITY;
    for _ in 0..3 {
        let pot = Potential::matrix_norm(random_positive_cocycle(&mut rng), NormKind::EntrySum)?;
        worst = worst.min(convexity_margin(&shift, &pot, 8)?);
    }
    Ok((worst >= 0.0, format!("worst margin {worst:.3e}")))
}

fn check_energy_monotone() -> Result<(bool, String)> {
    let mut rng = SplitMix64(0x5EED_0003);
    let shift = ShiftSpace::full(2);
    let mut ok = true;
    let mut detail = String::new();
    for pot in [
        Potential::scalar(vec![0.0, 3f64.ln()])?,
        random_scalar(&mut rng, 2),
    ] {
        let consts = certify_constants(&pot, &shift, 4)?;
        let mut cfg = PathConfig::defaults(2);
        cfg.schedule = vec![1.0, 2.0, 4.0, 8.0, 16.0];
        cfg.depth = 6;
        let (records, failures) = run_path(&shift, &pot, &consts, &cfg)?;
        let rep = check_monotonicities(&records, &pot, &consts);
        ok &= failures.is_empty() && rep.energy_nondecreasing && rep.entropy_nonincreasing;
        detail = format!(
            "worst energy step {:.3e}, worst entropy step {:.3e}",
            rep.energy_worst_step, rep.entropy_worst_step
        );
    }
    Ok((ok, detail))
}

fn check_anchor_independence() -> Result<(bool, String)> {
    let shift = golden_mean();
    let pot = Potential::scalar(vec![0.0, 1.0])?;
    let consts = certify_constants(&pot, &shift, 4)?;
    let e1 = gurevich_pressure(&shift, &pot, 2.0, 14, 1, &consts)?;
    let e2 = gurevich_pressure(&shift, &pot, 2.0, 14, 2, &consts)?;
    let diff = (e1.point - e2.point).abs();
    let slack = e1.width() + e2.width() + e1.point_uncertainty + e2.point_uncertainty + 1e-9;
    Ok((diff <= slack, format!("anchor gap {diff:.3e} (slack {slack:.3e})")))
}

fn check_determinant_identity() -> Result<(bool, String)> {
    let mut rng = SplitMix64(0x5EED_0004);
    let shift = ShiftSpace::full(2);
    let mut worst = 0.0f64;
    for cocycle in [positive_pair(), random_positive_cocycle(&mut rng)] {
        let p1 = Potential::singular_value(cocycle.clone(), 1)?;
        let p2 = Potential::singular_value(cocycle.clone(), 2)?;
        for n in 1..=5 {
            for w in shift.words(n, None) {
                let mut logdet = 0.0;
                for &s in w.symbols() {
                    logdet += cocycle.mat(s).log_abs_det();
                }
                let v1 = p1.eval_word(&w);
                let v2 = p2.eval_word(&w);
                // rounding in the accumulated product perturbs its small
                // singular value by about n * eps * (s1/s2), so the identity
                // can only hold to that resolution per word
                let kappa = (v1 - v2).exp().max(1.0);
                let tol = 1e-14 + (n as f64) * kappa * 1e-15;
                worst = worst.max((v1 + v2 - logdet).abs() / tol);
            }
        }
    }
    Ok((
        worst <= 1.0,
        format!("worst deviation at {worst:.3}x its rounding bound"),
    ))
}

fn check_norm_independence() -> Result<(bool, String)> {
    let shift = ShiftSpace::full(2);
    let cfg = |norm| JsrConfig {
        norm,
        schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
        depth: Some(6),
        n_max: 10,
        ..JsrConfig::default()
    };
    let r1 = thermo_jsr(&scalar_pair(), &shift, &cfg(NormKind::EntrySum))?;
    let r2 = thermo_jsr(&scalar_pair(), &shift, &cfg(NormKind::Spectral))?;
    let diff = (r1.thermo.value - r2.thermo.value).abs();
    let slack = 1e-3
        + r1.thermo.maximiser.alpha_uncertainty
        + r2.thermo.maximiser.alpha_uncertainty;
    Ok((diff <= slack, format!("norm gap {diff:.3e}")))
}

fn check_scaling_exactness() -> Result<(bool, String)> {
    let shift = golden_mean();
    let pot = Potential::scalar(vec![0.0, 1.0])?;
    let doubled = pot.scaled(2.0)?;
    let mut ok = true;
    for n in 1..=8 {
        let (a, _) = partition_sum(&shift, &pot, 3.0, n, 1)?;
        let (b, _) = partition_sum(&shift, &doubled, 1.5, n, 1)?;
        ok &= a == b;
        let fa = free_partition_sum(&shift, &pot, 3.0, n)?;
        let fb = free_partition_sum(&shift, &doubled, 1.5, n)?;
        ok &= fa == fb;
    }
    Ok((ok, "partition sums bitwise equal under x2 rescaling".into()))
}

fn positive_pair_measure(
    shift: &ShiftSpace,
    pot: &Potential,
    t: f64,
    corrupt: bool,
) -> Result<CylinderMeasure> {
    let nu = nu_weights(shift, pot, t, 8)?;
    if !corrupt {
        return Ok(nu);
    }
    let mut weights: BTreeMap<Word, f64> = nu.weights().clone();
    let first = weights.keys().next().cloned().expect("nonempty");
    *weights.get_mut(&first).unwrap() *= 2.0;
    CylinderMeasure::from_weights(shift.clone(), 8, weights, nu.provenance())
}

fn check_gibbs_certificates(corrupt: bool) -> Result<(bool, String)> {
    let shift = ShiftSpace::full(2);
    let pot = Potential::matrix_norm(positive_pair(), NormKind::EntrySum)?;
    let consts = certify_constants(&pot, &shift, 6)?;
    let mut ok = true;
    let mut spreads = Vec::new();
    for t in [1.0, 2.0, 4.0] {
        let pressure = gurevich_pressure(&shift, &pot, t, 12, 1, &consts)?;
        let measure = positive_pair_measure(&shift, &pot, t, corrupt)?;
        let cert = gibbs_certificate(&pot, t, &measure, &pressure, &consts)?;
        ok &= cert.pass;
        spreads.push(format!("t={t}: spread {:.3e}", cert.ratio_spread));
    }
    Ok((ok, spreads.join(", ")))
}

fn check_corruption_detector() -> Result<(bool, String)> {
    let shift = ShiftSpace::full(2);
    let pot = Potential::matrix_norm(positive_pair(), NormKind::EntrySum)?;
    let consts = certify_constants(&pot, &shift, 6)?;
    let pressure = gurevich_pressure(&shift, &pot, 1.0, 12, 1, &consts)?;
    let measure = positive_pair_measure(&shift, &pot, 1.0, true)?;
    let cert = gibbs_certificate(&pot, 1.0, &measure, &pressure, &consts)?;
    Ok((
        !cert.pass,
        format!(
            "tampered weight detected: spread {:.3e}",
            cert.ratio_spread
        ),
    ))
}

fn check_zero_temp_monotonicity() -> Result<(bool, String)> {
    let shift = ShiftSpace::full(2);
    let pot = Potential::matrix_norm(scalar_pair(), NormKind::EntrySum)?;
    let consts = certify_constants(&pot, &shift, 6)?;
    let mut cfg = PathConfig::defaults(2);
    cfg.schedule = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    cfg.depth = 6;
    let (records, failures) = run_path(&shift, &pot, &consts, &cfg)?;
    let rep = check_monotonicities(&records, &pot, &consts);
    let last = records.last().expect("records");
    let ok = failures.is_empty()
        && rep.all_pass()
        && last.tail_mass == 0.0
        && last.top_cylinders[0].0 == "222222";
    Ok((ok, format!("sandwich worst {:.3e}", rep.sandwich_worst)))
}

fn check_jsr_ordering() -> Result<(bool, String)> {
    let shift = ShiftSpace::full(2);
    let cfg = JsrConfig {
        depth: Some(8),
        ..JsrConfig::default()
    };
    let r = thermo_jsr(&positive_pair(), &shift, &cfg)?;
    let oracle = (3.0 + 5f64.sqrt()) / 2.0;
    let ok = r.ordering_ok && (r.thermo.value - oracle).abs() < 2e-2;
    Ok((
        ok,
        format!(
            "periodic {:.6} <= thermo {:.6} <= upper {:.6}",
            r.periodic.value, r.thermo.value, r.brute.upper
        ),
    ))
}

fn check_tightness_truncation() -> Result<(bool, String)> {
    let base = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
    let mats: Vec<Mat> = (1..=4).map(|i| base.scale(0.5f64.powi(i))).collect();
    let cocycle = MatrixCocycle::new(mats)?;
    let shift = ShiftSpace::full(4);
    let pot = Potential::matrix_norm(cocycle, NormKind::EntrySum)?;
    let consts = certify_constants(&pot, &shift, 4)?;
    let mut ok = true;
    let mut prev_tail = f64::INFINITY;
    let mut details = Vec::new();
    for t in [1.0, 2.0, 4.0, 8.0] {
        let pressure = gurevich_pressure(&shift, &pot, t, 8, 1, &consts)?;
        let measure = nu_weights(&shift, &pot, t, 4)?;
        let cert = gibbs_certificate(&pot, t, &measure, &pressure, &consts)?;
        let tight = tightness_report(&measure, &pot, &cert, 2)?;
        let tail = measure.tail_mass(2);
        ok &= cert.pass && tight.pass && tail <= prev_tail + 1e-12;
        prev_tail = tail;
        details.push(format!("t={t}: tail {tail:.3e}"));
    }
    Ok((ok, details.join(", ")))
}

fn check_periodic_agreement() -> Result<(bool, String)> {
    let shift = golden_mean();
    let pot = Potential::scalar(vec![0.0, 1.0])?;
    let consts = certify_constants(&pot, &shift, 4)?;
    let mut cfg = PathConfig::defaults(2);
    cfg.schedule = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    cfg.depth = 8;
    let (records, _) = run_path(&shift, &pot, &consts, &cfg)?;
    let m = extract_maximiser(&records, &shift, &pot, &consts, 12)?;
    Ok((
        m.agreement_flag && m.best_periodic_orbit.to_string() == "12",
        format!(
            "alpha {:.6} vs periodic {:.6} ({})",
            m.alpha, m.best_periodic_value, m.best_periodic_orbit
        ),
    ))
}

/// Run the whole battery. `corrupt_measure` injects a doubled cylinder weight
/// into the Gibbs certificate check, which must then fail: the designed-to-
/// fail fixture for exit-code testing.
pub fn verify_suite(corrupt_measure: bool) -> VerifyReport {
    let checks = vec![
        run_check("pressure_convexity_scalar", check_convexity_scalar),
        run_check("pressure_convexity_positive", check_convexity_positive),
        run_check("energy_nondecreasing", check_energy_monotone),
        run_check("anchor_independence", check_anchor_independence),
        run_check("determinant_identity", check_determinant_identity),
        run_check("norm_independence", check_norm_independence),
        run_check("scaling_exactness", check_scaling_exactness),
        run_check("gibbs_certificates", || {
            check_gibbs_certificates(corrupt_measure)
        }),
        run_check("corruption_detector", check_corruption_detector),
        run_check("zero_temp_monotonicity", check_zero_temp_monotonicity),
        run_check("jsr_ordering", check_jsr_ordering),
        run_check("tightness_truncation", check_tightness_truncation),
        run_check("periodic_agreement", check_periodic_agreement),
    ];
    VerifyReport { checks }
}
