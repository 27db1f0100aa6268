//! Gurevich pressure of tF from anchored periodic partition sums, with a
//! certified two-sided bracket and an accelerated point estimate.
//!
//! Bracketing uses two Fekete envelopes. Anchored cyclic words concatenate
//! (the junctions close through the anchor), so b_n = log Z_n satisfies
//! b_{n+m} >= b_n + b_m - tC and every (b_n - tC)/n is a lower bound for P.
//! Unanchored free sums d_n are subadditive the other way: every
//! (d_n + tC)/n is an upper bound. Both envelopes converge to P at rate
//! O(1/n), so the bracket width shrinks like (2tC + spread)/n.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::CylinderMeasure;
use crate::numerics::{extrapolate, log_sum_exp, REL_FLOOR};
use crate::potential::{fold_words, CertifiedConstants, Potential};
use crate::shift::{ShiftSpace, Symbol};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PressureSample {
    pub n: usize,
    pub log_z: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FreeSample {
    pub n: usize,
    pub log_d: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PressureEstimate {
    pub t: f64,
    pub anchor: Symbol,
    pub samples: Vec<PressureSample>,
    pub free_samples: Vec<FreeSample>,
    /// certified lower bound max_n (b_n - tC)/n
    pub lower: f64,
    /// certified upper bound min_n (d_n + tC)/n
    pub upper: f64,
    /// accelerated estimate, clamped into [lower, upper]
    pub point: f64,
    pub point_uncertainty: f64,
    /// true when C came from an analytic bound (the bracket is then fully
    /// certified; empirical C makes it a scan-backed heuristic)
    pub certified: bool,
}

impl PressureEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower - 1e-12 <= v && v <= self.upper + 1e-12
    }
}

fn weight_term(t: f64, eval: f64) -> f64 {
    // f_n^t with t = 0 is 1 even on zero-weight cylinders, so avoid 0 * -inf
    if t == 0.0 {
        0.0
    } else {
        t * eval
    }
}

/// Anchored periodic partition sum: log Z_n over cyclically admissible
/// length-n words starting with `anchor`, each weighted exp(t eval(w)).
pub fn partition_sum(
    shift: &ShiftSpace,
    pot: &Potential,
    t: f64,
    n: usize,
    anchor: Symbol,
) -> Result<(f64, f64)> {
    pot.check_alphabet(shift)?;
    if t < 0.0 {
        return Err(Error::NegativeTemperature { t });
    }
    if n == 0 || anchor == 0 || anchor as usize > shift.alphabet_len() {
        return Err(Error::BadModel {
            reason: format!("partition sum needs n >= 1 and a valid anchor, got n={n}"),
        });
    }
    let mut terms = Vec::new();
    fold_words(shift, pot, n, Some(anchor), true, &mut |_, v| {
        terms.push(weight_term(t, v));
    });
    if terms.is_empty() {
        return Err(Error::EmptyPeriodicSet { n, anchor });
    }
    let log_z = log_sum_exp(&terms);
    Ok((log_z, log_z / n as f64))
}

/// Free partition sum: log over all admissible length-n words (no anchor,
/// no periodicity).
pub fn free_partition_sum(shift: &ShiftSpace, pot: &Potential, t: f64, n: usize) -> Result<f64> {
    pot.check_alphabet(shift)?;
    if t < 0.0 {
        return Err(Error::NegativeTemperature { t });
    }
    let mut terms = Vec::new();
    fold_words(shift, pot, n, None, false, &mut |_, v| {
        terms.push(weight_term(t, v));
    });
    Ok(log_sum_exp(&terms))
}

/// Pressure of tF with certified bracket and an Aitken-accelerated point.
///
/// The point comes from extrapolating the increment sequence
/// q_n = b_n - b_{n-1} (which converges geometrically, unlike b_n/n), then
/// clamping into the bracket.
pub fn gurevich_pressure(
    shift: &ShiftSpace,
    pot: &Potential,
    t: f64,
    n_max: usize,
    anchor: Symbol,
    consts: &CertifiedConstants,
) -> Result<PressureEstimate> {
    if n_max < 4 {
        return Err(Error::BadModel {
            reason: format!("pressure estimation needs n_max >= 4, got {n_max}"),
        });
    }
    let witness = shift.mixing_witness().ok_or(Error::NotMixing {
        cap: shift.alphabet_len() * shift.alphabet_len(),
    })?;
    let tc = t * consts.c;
    let mut samples = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        match partition_sum(shift, pot, t, n, anchor) {
            Ok((log_z, p)) => samples.push(PressureSample { n, log_z, p }),
            Err(Error::EmptyPeriodicSet { .. }) if n <= witness => samples.push(PressureSample {
                n,
                log_z: f64::NEG_INFINITY,
                p: f64::NEG_INFINITY,
            }),
            Err(e) => return Err(e),
        }
    }
    let mut free_samples = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        free_samples.push(FreeSample {
            n,
            log_d: free_partition_sum(shift, pot, t, n)?,
        });
    }

    let lower = samples
        .iter()
        .filter(|s| s.log_z.is_finite())
        .map(|s| (s.log_z - tc) / s.n as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let upper = free_samples
        .iter()
        .map(|s| (s.log_d + tc) / s.n as f64)
        .fold(f64::INFINITY, f64::min);
    if lower > upper + 1e-9 {
        return Err(Error::InconsistentBracket { lower, upper });
    }

    let increments: Vec<f64> = samples
        .windows(2)
        .filter(|w| w[0].log_z.is_finite() && w[1].log_z.is_finite())
        .map(|w| w[1].log_z - w[0].log_z)
        .collect();
    let (raw_point, raw_unc) = if increments.is_empty() {
        (samples.last().unwrap().p, upper - lower)
    } else {
        extrapolate(&increments)
    };
    let point = raw_point.clamp(lower, upper);
    let point_uncertainty = raw_unc + (raw_point - point).abs() + REL_FLOOR;

    Ok(PressureEstimate {
        t,
        anchor,
        samples,
        free_samples,
        lower,
        upper,
        point,
        point_uncertainty,
        certified: matches!(consts.source, crate::potential::CSource::Analytic),
    })
}

/// Central finite difference of t -> P(tF). Refuses to answer when the two
/// point uncertainties are large relative to the step.
pub fn pressure_derivative(
    shift: &ShiftSpace,
    pot: &Potential,
    t: f64,
    h: f64,
    n_max: usize,
    anchor: Symbol,
    consts: &CertifiedConstants,
) -> Result<f64> {
    if h <= 0.0 || t - h <= 0.0 {
        return Err(Error::BadModel {
            reason: format!("derivative step must satisfy 0 < h < t, got t={t} h={h}"),
        });
    }
    let hi = gurevich_pressure(shift, pot, t + h, n_max, anchor, consts)?;
    let lo = gurevich_pressure(shift, pot, t - h, n_max, anchor, consts)?;
    let deriv = (hi.point - lo.point) / (2.0 * h);
    let resolution = (hi.point_uncertainty + lo.point_uncertainty) / (2.0 * h);
    if resolution > 1e-3 * (1.0 + deriv.abs()) {
        // geometric q_n convergence roughly halves the error per extra level
        return Err(Error::BracketTooWide {
            required_n_max: n_max * 2,
        });
    }
    Ok(deriv)
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeEstimate {
    /// estimate of lim P(tF)/t, clamped into [floor, upper]
    pub value: f64,
    pub raw_secant: f64,
    /// min over the curve of upper bracket / t: certified upper bound for
    /// the limit (P(tF)/t is nonincreasing)
    pub upper: f64,
    /// best periodic-orbit average, when the caller has one: certified lower
    pub floor: Option<f64>,
    pub secants: Vec<f64>,
    pub ratios: Vec<f64>,
    pub secants_nondecreasing: bool,
    pub ratios_nonincreasing: bool,
    pub uncertainty: f64,
}

/// Slope of the pressure curve at infinity. Secants of the convex curve
/// increase toward the limit while P(tF)/t decreases toward it, so the two
/// clamp the answer from both sides.
pub fn asymptotic_slope(
    curve: &[PressureEstimate],
    periodic_floor: Option<f64>,
) -> Result<SlopeEstimate> {
    if curve.len() < 3 {
        return Err(Error::InsufficientCurve { len: curve.len() });
    }
    if curve.windows(2).any(|w| w[0].t >= w[1].t) {
        return Err(Error::BadModel {
            reason: "slope estimation needs strictly increasing temperatures".into(),
        });
    }
    let secants: Vec<f64> = curve
        .windows(2)
        .map(|w| (w[1].point - w[0].point) / (w[1].t - w[0].t))
        .collect();
    let ratios: Vec<f64> = curve
        .iter()
        .filter(|e| e.t > 0.0)
        .map(|e| e.point / e.t)
        .collect();
    let upper = curve
        .iter()
        .filter(|e| e.t > 0.0)
        .map(|e| e.upper / e.t)
        .fold(f64::INFINITY, f64::min);
    let slack: Vec<f64> = curve.iter().map(|e| e.width() + e.point_uncertainty).collect();
    let secants_nondecreasing = secants
        .windows(2)
        .enumerate()
        .all(|(i, w)| w[1] >= w[0] - (slack[i] + slack[i + 2]) - 1e-9);
    let ratios_nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-9);

    let raw_secant = *secants.last().unwrap();
    let mut value = raw_secant.min(upper);
    if let Some(f) = periodic_floor {
        value = value.max(f.min(upper));
    }
    let n = curve.len();
    let secant_jitter = (secants[n - 2] - secants[n - 3]).abs();
    let point_term = (curve[n - 1].point_uncertainty + curve[n - 2].point_uncertainty)
        / (curve[n - 1].t - curve[n - 2].t);
    let uncertainty = secant_jitter + point_term + REL_FLOOR;

    Ok(SlopeEstimate {
        value,
        raw_secant,
        upper,
        floor: periodic_floor,
        secants,
        ratios,
        secants_nondecreasing,
        ratios_nonincreasing,
        uncertainty,
    })
}

/// P(tF) minus the variational functional h + t m of a measure. Nonnegative
/// up to bracket width and estimator bias; near zero for the Gibbs measure
/// at the same temperature.
pub fn variational_gap(
    shift: &ShiftSpace,
    pot: &Potential,
    t: f64,
    measure: &CylinderMeasure,
    pressure: &PressureEstimate,
) -> Result<f64> {
    pot.check_alphabet(shift)?;
    if measure.shift() != shift {
        return Err(Error::AlphabetMismatch {
            shift: shift.alphabet_len(),
            potential: measure.shift().alphabet_len(),
        });
    }
    if measure.depth() < 2 {
        return Err(Error::DepthMismatch {
            expected: 2,
            found: measure.depth(),
        });
    }
    let h = measure.entropy_rate();
    let m = measure.energy(pot);
    Ok(pressure.point - (h + t * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::potential::{certify_constants, MatrixCocycle, NormKind};
    use crate::shift::golden_mean;

    const PHI: f64 = 1.618033988749894848;

    fn consts_for(pot: &Potential, shift: &ShiftSpace) -> CertifiedConstants {
        certify_constants(pot, shift, 8).unwrap()
    }

    #[test]
    fn anchored_count_full_shift() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let (log_z, pn) = partition_sum(&s, &p, 1.0, 5, 1).unwrap();
        assert!((log_z - 16f64.ln()).abs() < 1e-12);
        assert!((pn - 0.8 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn weighted_closed_form_full_shift() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let (log_z, _) = partition_sum(&s, &p, 1.0, 3, 1).unwrap();
        assert!((log_z - 50f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_zero_potential_counts() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let (log_z, _) = partition_sum(&s, &p, 1.0, 3, 1).unwrap();
        assert!((log_z - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn empty_periodic_set_reported() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let e = partition_sum(&s, &p, 1.0, 1, 2).unwrap_err();
        assert!(matches!(e, Error::EmptyPeriodicSet { n: 1, anchor: 2 }));
    }

    #[test]
    fn zero_temperature_counts_words() {
        let s = golden_mean();
        let p = Potential::scalar(vec![5.0, -3.0]).unwrap();
        let (log_z, _) = partition_sum(&s, &p, 0.0, 3, 1).unwrap();
        assert!((log_z - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn full_shift_pressure_exact() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let c = consts_for(&p, &s);
        for t in [1.0, 2.0, 4.0] {
            let est = gurevich_pressure(&s, &p, t, 12, 1, &c).unwrap();
            let truth = (2f64.powf(t) + 3f64.powf(t)).ln();
            assert!((est.point - truth).abs() < 1e-10, "t={t}: {} vs {truth}", est.point);
            assert!(est.contains(truth));
            assert!(est.certified);
        }
    }

    #[test]
    fn golden_mean_entropy() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let c = consts_for(&p, &s);
        let est = gurevich_pressure(&s, &p, 1.0, 20, 1, &c).unwrap();
        assert!((est.point - PHI.ln()).abs() < 1e-6);
        assert!(est.contains(PHI.ln()));
    }

    #[test]
    fn single_matrix_gelfand() {
        let s = ShiftSpace::full(1);
        let m = Mat::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cocycle = MatrixCocycle::new(vec![m]).unwrap();
        let p = Potential::matrix_norm(cocycle, NormKind::EntrySum).unwrap();
        let c = consts_for(&p, &s);
        let est = gurevich_pressure(&s, &p, 1.0, 12, 1, &c).unwrap();
        assert!((est.point - 2f64.ln()).abs() < 1e-6, "{}", est.point);
        assert!(est.contains(2f64.ln()));
    }

    #[test]
    fn anchor_independence_golden_mean() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.1, 0.7]).unwrap();
        let c = consts_for(&p, &s);
        let a = gurevich_pressure(&s, &p, 1.0, 16, 1, &c).unwrap();
        let b = gurevich_pressure(&s, &p, 1.0, 16, 2, &c).unwrap();
        let tol = a.width() + b.width() + a.point_uncertainty + b.point_uncertainty;
        assert!((a.point - b.point).abs() <= tol + 1e-9);
    }

    #[test]
    fn early_empty_levels_are_tolerated() {
        // anchor 2 on the golden mean has no period-1 point; the estimate
        // must still come out
        let s = golden_mean();
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let c = consts_for(&p, &s);
        let est = gurevich_pressure(&s, &p, 1.0, 16, 2, &c).unwrap();
        assert!(est.samples[0].log_z.is_infinite());
        assert!((est.point - PHI.ln()).abs() < 1e-4);
    }

    #[test]
    fn scaling_matches_temperature_rescale_exactly() {
        let s = ShiftSpace::full(2);
        let cocycle = MatrixCocycle::new(vec![
            Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap(),
        ])
        .unwrap();
        let p = Potential::matrix_norm(cocycle, NormKind::EntrySum).unwrap();
        let q = p.scaled(2.0).unwrap();
        for n in 1..=8 {
            let (a, _) = partition_sum(&s, &q, 1.5, n, 1).unwrap();
            let (b, _) = partition_sum(&s, &p, 3.0, n, 1).unwrap();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn derivative_closed_form() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 3f64.ln()]).unwrap();
        let c = consts_for(&p, &s);
        let d = pressure_derivative(&s, &p, 1.0, 1e-3, 12, 1, &c).unwrap();
        let truth = 3.0 * 3f64.ln() / 4.0;
        assert!((d - truth).abs() < 1e-4, "{d} vs {truth}");
    }

    #[test]
    fn derivative_of_constant_potential() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.7, 0.7]).unwrap();
        let c = consts_for(&p, &s);
        for t in [1.0, 2.5] {
            let d = pressure_derivative(&s, &p, t, 1e-3, 10, 1, &c).unwrap();
            assert!((d - 0.7).abs() < 1e-9, "{d}");
        }
    }

    #[test]
    fn derivative_scalar_matrices_tends_to_log3() {
        let s = ShiftSpace::full(2);
        let cocycle = MatrixCocycle::new(vec![
            Mat::identity(2).scale(2.0),
            Mat::identity(2).scale(3.0),
        ])
        .unwrap();
        let p = Potential::matrix_norm(cocycle, NormKind::EntrySum).unwrap();
        let c = consts_for(&p, &s);
        let d = pressure_derivative(&s, &p, 12.0, 1e-3, 10, 1, &c).unwrap();
        let truth = (2f64.powf(12.0) * 2f64.ln() + 3f64.powf(12.0) * 3f64.ln())
            / (2f64.powf(12.0) + 3f64.powf(12.0));
        assert!((d - truth).abs() < 1e-5, "{d} vs {truth}");
    }

    #[test]
    fn slope_scalar_weights() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let c = consts_for(&p, &s);
        let curve: Vec<PressureEstimate> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0]
            .iter()
            .map(|&t| gurevich_pressure(&s, &p, t, 12, 1, &c).unwrap())
            .collect();
        let slope = asymptotic_slope(&curve, Some(3f64.ln())).unwrap();
        assert!((slope.value - 3f64.ln()).abs() < 1e-6, "{}", slope.value);
        assert!(slope.secants_nondecreasing);
        assert!(slope.ratios_nonincreasing);
    }

    #[test]
    fn slope_zero_potential_is_zero_from_above() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let c = consts_for(&p, &s);
        let curve: Vec<PressureEstimate> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&t| gurevich_pressure(&s, &p, t, 10, 1, &c).unwrap())
            .collect();
        let slope = asymptotic_slope(&curve, Some(0.0)).unwrap();
        assert!(slope.value.abs() < 1e-9);
        assert!(slope.upper >= 0.0);
    }

    #[test]
    fn slope_needs_three_points() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let c = consts_for(&p, &s);
        let curve: Vec<PressureEstimate> = [1.0, 2.0]
            .iter()
            .map(|&t| gurevich_pressure(&s, &p, t, 8, 1, &c).unwrap())
            .collect();
        assert!(matches!(
            asymptotic_slope(&curve, None),
            Err(Error::InsufficientCurve { len: 2 })
        ));
    }

    #[test]
    fn convexity_of_points() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 3f64.ln()]).unwrap();
        let c = consts_for(&p, &s);
        let pts: Vec<PressureEstimate> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&t| gurevich_pressure(&s, &p, t, 12, 1, &c).unwrap())
            .collect();
        let second = pts[2].point - 2.0 * pts[1].point + pts[0].point;
        let width = pts.iter().map(|e| e.width()).fold(0.0, f64::max);
        assert!(second >= -3.0 * width - 1e-12);
    }

    #[test]
    fn monotone_in_t_for_nonnegative_eval() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.2, 0.9]).unwrap();
        for n in 2..=8 {
            let (_, p1) = partition_sum(&s, &p, 1.0, n, 1).unwrap();
            let (_, p2) = partition_sum(&s, &p, 1.5, n, 1).unwrap();
            assert!(p2 >= p1 - 1e-12);
        }
    }
}
