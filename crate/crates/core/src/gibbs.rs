//! Gibbs cylinder measures at inverse temperature t, their Cesaro
//! invariantizations, the certified Gibbs-ratio bound, entropy and energy
//! functionals, and tail-mass tightness diagnostics.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::log_sum_exp;
use crate::potential::{fold_words, CertifiedConstants, Potential};
use crate::pressure::PressureEstimate;
use crate::shift::{ShiftSpace, Symbol, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    RawNu,
    Cesaro,
    ProductClosedForm,
}

/// A probability measure on depth-n cylinders of a shift. Weights live on
/// admissible words only and sum to 1 after construction.
#[derive(Debug, Clone)]
pub struct CylinderMeasure {
    shift: ShiftSpace,
    depth: usize,
    weights: BTreeMap<Word, f64>,
    provenance: Provenance,
    /// log of the partition normalizer used at construction (0 when not
    /// applicable)
    log_normalizer: f64,
    /// |pre-normalization mass - 1| recorded at the last renormalization
    renorm_drift: f64,
}

impl CylinderMeasure {
    /// Build from explicit nonnegative weights; renormalizes and records the
    /// drift without gating (pipeline operations gate on drift themselves).
    pub fn from_weights(
        shift: ShiftSpace,
        depth: usize,
        weights: BTreeMap<Word, f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if depth == 0 || weights.is_empty() {
            return Err(Error::BadModel {
                reason: "cylinder measure needs depth >= 1 and at least one weight".into(),
            });
        }
        for (w, &v) in &weights {
            if w.len() != depth || !shift.is_admissible(w.symbols()) {
                return Err(Error::BadModel {
                    reason: format!("weighted word {w} is not admissible at depth {depth}"),
                });
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::BadModel {
                    reason: format!("weight of {w} must be finite and nonnegative"),
                });
            }
        }
        let total: f64 = weights.values().sum();
        if total <= 0.0 {
            return Err(Error::BadModel {
                reason: "cylinder weights have zero total mass".into(),
            });
        }
        let weights = weights
            .into_iter()
            .map(|(w, v)| (w, v / total))
            .collect();
        Ok(CylinderMeasure {
            shift,
            depth,
            weights,
            provenance,
            log_normalizer: 0.0,
            renorm_drift: (total - 1.0).abs(),
        })
    }

    /// Bernoulli product measure on the full shift.
    pub fn bernoulli(probs: &[f64], depth: usize) -> Result<Self> {
        let k = probs.len();
        if k == 0 || probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::BadModel {
                reason: "bernoulli probabilities must be nonnegative and finite".into(),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadModel {
                reason: format!("bernoulli probabilities sum to {total}, not 1"),
            });
        }
        let shift = ShiftSpace::full(k);
        let mut weights = BTreeMap::new();
        for w in shift.words(depth, None) {
            let v: f64 = w.symbols().iter().map(|&s| probs[s as usize - 1]).product();
            weights.insert(w, v);
        }
        let mut m = CylinderMeasure::from_weights(shift, depth, weights, Provenance::ProductClosedForm)?;
        m.renorm_drift = 0.0;
        Ok(m)
    }

    /// Point mass on the depth-n truncation of the periodic repetition of a
    /// word.
    pub fn point_mass_on_cycle(shift: ShiftSpace, cycle: &Word, depth: usize) -> Result<Self> {
        if cycle.is_empty() || !shift.is_cyclically_admissible(cycle.symbols()) {
            return Err(Error::BadModel {
                reason: format!("point mass needs a cyclically admissible word, got {cycle}"),
            });
        }
        let syms: Vec<Symbol> = (0..depth)
            .map(|i| cycle.symbols()[i % cycle.len()])
            .collect();
        let mut weights = BTreeMap::new();
        weights.insert(Word(syms), 1.0);
        CylinderMeasure::from_weights(shift, depth, weights, Provenance::ProductClosedForm)
    }

    pub fn shift(&self) -> &ShiftSpace {
        &self.shift
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn renorm_drift(&self) -> f64 {
        self.renorm_drift
    }

    pub fn weights(&self) -> &BTreeMap<Word, f64> {
        &self.weights
    }

    pub fn weight(&self, w: &Word) -> f64 {
        self.weights.get(w).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Prefix marginal at a shallower depth. Gates on renormalization drift.
    pub fn marginal(&self, m: usize) -> Result<CylinderMeasure> {
        if m == 0 || m > self.depth {
            return Err(Error::DepthMismatch {
                expected: self.depth,
                found: m,
            });
        }
        if m == self.depth {
            return Ok(self.clone());
        }
        let mut weights: BTreeMap<Word, f64> = BTreeMap::new();
        for (w, &v) in &self.weights {
            let key = Word(w.symbols()[..m].to_vec());
            *weights.entry(key).or_insert(0.0) += v;
        }
        let total: f64 = weights.values().sum();
        let drift = (total - 1.0).abs();
        if drift > 1e-9 {
            return Err(Error::NormalizationDrift { drift });
        }
        let weights = weights.into_iter().map(|(w, v)| (w, v / total)).collect();
        Ok(CylinderMeasure {
            shift: self.shift.clone(),
            depth: m,
            weights,
            provenance: self.provenance,
            log_normalizer: self.log_normalizer,
            renorm_drift: self.renorm_drift.max(drift),
        })
    }

    /// Block entropy H_m = -sum w log w of the depth-m marginal.
    pub fn block_entropy(&self, m: usize) -> Result<f64> {
        let marg = self.marginal(m)?;
        Ok(marg
            .weights
            .values()
            .map(|&v| if v > 0.0 { -v * v.ln() } else { 0.0 })
            .sum())
    }

    /// Conditional block entropy H_n - H_{n-1}: exact for product measures,
    /// low-bias for Markov-like ones.
    pub fn entropy_rate(&self) -> f64 {
        if self.depth < 2 {
            return self.block_entropy(self.depth).unwrap_or(0.0);
        }
        let hn = self.block_entropy(self.depth).unwrap_or(f64::NAN);
        let hm = self.block_entropy(self.depth - 1).unwrap_or(f64::NAN);
        hn - hm
    }

    /// H_n / n, the cruder estimator, kept for diagnostics.
    pub fn block_entropy_rate(&self) -> f64 {
        self.block_entropy(self.depth).unwrap_or(f64::NAN) / self.depth as f64
    }

    /// (1/n) sum of weights(w) eval(w): the energy estimator at this depth.
    pub fn energy(&self, pot: &Potential) -> f64 {
        let n = self.depth as f64;
        let mut acc = 0.0;
        for (w, &v) in &self.weights {
            if v > 0.0 {
                acc += v * pot.eval(w.symbols());
            }
        }
        acc / n
    }

    /// Energy with the almost-additivity bias bound C/n attached.
    pub fn energy_with_bias(&self, pot: &Potential, c: f64) -> (f64, f64) {
        (self.energy(pot), c / self.depth as f64)
    }

    /// Mass of the depth-1 marginal above symbol cutoff J.
    pub fn tail_mass(&self, j: Symbol) -> f64 {
        let mut acc = 0.0;
        for (w, &v) in &self.weights {
            if w.symbols()[0] > j {
                acc += v;
            }
        }
        acc
    }

    /// Heaviest cylinders, ties broken lexicographically.
    pub fn top_k(&self, k: usize) -> Vec<(Word, f64)> {
        let mut all: Vec<(Word, f64)> = self
            .weights
            .iter()
            .map(|(w, &v)| (w.clone(), v))
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }

    /// Mass needed to cover `fraction`, returned as the covering cylinders.
    pub fn support_cover(&self, fraction: f64) -> Vec<(Word, f64)> {
        let mut acc = 0.0;
        let mut out = Vec::new();
        for (w, v) in self.top_k(self.weights.len()) {
            if acc >= fraction {
                break;
            }
            acc += v;
            out.push((w, v));
        }
        out
    }

    /// sup over depth-(d-1) words of |mass of the shift pullback - marginal
    /// mass|: how far from sigma-invariant the measure is.
    pub fn invariance_defect(&self) -> Result<f64> {
        if self.depth < 2 {
            return Ok(0.0);
        }
        let m = self.depth - 1;
        let mut prepend: BTreeMap<Word, f64> = BTreeMap::new();
        let mut prefix: BTreeMap<Word, f64> = BTreeMap::new();
        for (w, &v) in &self.weights {
            *prepend
                .entry(Word(w.symbols()[1..].to_vec()))
                .or_insert(0.0) += v;
            *prefix
                .entry(Word(w.symbols()[..m].to_vec()))
                .or_insert(0.0) += v;
        }
        let mut worst = 0.0f64;
        for w in self.shift.words(m, None) {
            let a = prepend.get(&w).copied().unwrap_or(0.0);
            let b = prefix.get(&w).copied().unwrap_or(0.0);
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }
}

/// The raw Gibbs approximant: weights(w) proportional to exp(t eval(w)) over
/// admissible depth-l words.
pub fn nu_weights(
    shift: &ShiftSpace,
    pot: &Potential,
    t: f64,
    l: usize,
) -> Result<CylinderMeasure> {
    pot.check_alphabet(shift)?;
    if t < 0.0 {
        return Err(Error::NegativeTemperature { t });
    }
    if l == 0 {
        return Err(Error::BadModel {
            reason: "nu weights need depth >= 1".into(),
        });
    }
    let mut words = Vec::new();
    let mut terms = Vec::new();
    fold_words(shift, pot, l, None, false, &mut |w, v| {
        words.push(Word(w.to_vec()));
        terms.push(if t == 0.0 { 0.0 } else { t * v });
    });
    let log_z = log_sum_exp(&terms);
    let mut weights = BTreeMap::new();
    for (w, &lt) in words.into_iter().zip(terms.iter()) {
        weights.insert(w, (lt - log_z).exp());
    }
    let mut m = CylinderMeasure::from_weights(shift.clone(), l, weights, Provenance::RawNu)?;
    m.log_normalizer = log_z;
    m.renorm_drift = 0.0;
    Ok(m)
}

/// Average the sliding depth-`target` windows of the first m shifts:
/// mu = (1/m) sum_{j<m} nu o sigma^{-j}, restricted to depth `target`.
/// Approximate invariance improves like 1/m.
pub fn cesaro_invariantize(
    measure: &CylinderMeasure,
    m: usize,
    target_depth: usize,
) -> Result<CylinderMeasure> {
    if m == 0 || target_depth == 0 {
        return Err(Error::BadModel {
            reason: "cesaro averaging needs m >= 1 and target depth >= 1".into(),
        });
    }
    let needed = target_depth + m;
    if measure.depth() < needed {
        return Err(Error::DepthTooShallow {
            depth: measure.depth(),
            needed,
        });
    }
    let mut weights: BTreeMap<Word, f64> = BTreeMap::new();
    let share = 1.0 / m as f64;
    for (w, &v) in measure.weights() {
        if v == 0.0 {
            continue;
        }
        for j in 0..m {
            let window = Word(w.symbols()[j..j + target_depth].to_vec());
            *weights.entry(window).or_insert(0.0) += share * v;
        }
    }
    let total: f64 = weights.values().sum();
    let drift = (total - 1.0).abs();
    if drift > 1e-9 {
        return Err(Error::NormalizationDrift { drift });
    }
    let weights: BTreeMap<Word, f64> = weights
        .into_iter()
        .map(|(w, v)| (w, v / total))
        .collect();
    Ok(CylinderMeasure {
        shift: measure.shift().clone(),
        depth: target_depth,
        weights,
        provenance: Provenance::Cesaro,
        log_normalizer: measure.log_normalizer(),
        renorm_drift: drift,
    })
}

/// Certified Gibbs band at temperature t. All bound arithmetic is done in
/// log space: the upper bound overflows f64 well before t reaches 32.
#[derive(Debug, Clone, Serialize)]
pub struct GibbsCertificate {
    pub t: f64,
    pub depth: usize,
    pub c: f64,
    pub m: f64,
    pub k: usize,
    pub log_n_bar: f64,
    pub log_d: f64,
    pub d: f64,
    pub log_upper_bound: f64,
    pub log_lower_band: f64,
    pub observed_log_max_ratio: f64,
    pub observed_log_min_ratio: f64,
    pub ratio_spread: f64,
    pub p_used: f64,
    pub provenance: Provenance,
    pub pass: bool,
    pub fail_reason: Option<String>,
}

/// Evaluate the Gibbs ratio mu(C_w) / (e^{-nP} f_n^t(w)) over every
/// admissible depth-n cylinder and compare against the certified band
/// D = N e^{-3C} / (M^3 e^{(k-1)C} max{S_1, S_1^k}), bound (M e^{6C}/D^5)^t.
///
/// PASS also demands internal consistency: raw and product measures have
/// cylinder-independent ratios (spread near zero), Cesaro measures must
/// respect the lower band D^{2t} e^{-Ct} up to an e^{-2tC} invariantization
/// slack. This is what catches a tampered weight that the generous upper
/// bound would miss.
pub fn gibbs_certificate(
    pot: &Potential,
    t: f64,
    measure: &CylinderMeasure,
    pressure: &PressureEstimate,
    consts: &CertifiedConstants,
) -> Result<GibbsCertificate> {
    let shift = measure.shift();
    pot.check_alphabet(shift)?;
    if t < 0.0 {
        return Err(Error::NegativeTemperature { t });
    }
    let n = measure.depth();
    let conn = shift.connectivity()?;
    let k = conn.connector_len;
    let log_n_bar = conn
        .connector_set
        .iter()
        .map(|w| pot.eval(w.symbols()))
        .fold(f64::INFINITY, f64::min);
    let s1 = pot.sum_sup_f1();
    let log_s1 = s1.ln();
    let log_max_s = log_s1.max(k as f64 * log_s1);
    let c = consts.c;
    let m = consts.m;
    let log_d = log_n_bar - 3.0 * c - 3.0 * m.ln() - (k as f64 - 1.0) * c - log_max_s;
    let log_upper_bound = t * (m.ln() + 6.0 * c - 5.0 * log_d);
    let log_lower_band = t * (2.0 * log_d - c);
    let p = pressure.point;

    let mut log_max = f64::NEG_INFINITY;
    let mut log_min = f64::INFINITY;
    fold_words(shift, pot, n, None, false, &mut |w, v| {
        let mu = measure.weight(&Word(w.to_vec()));
        let log_ratio = if mu > 0.0 {
            mu.ln() + n as f64 * p - if t == 0.0 { 0.0 } else { t * v }
        } else {
            f64::NEG_INFINITY
        };
        log_max = log_max.max(log_ratio);
        log_min = log_min.min(log_ratio);
    });
    let spread = if log_min.is_finite() {
        log_max - log_min
    } else {
        f64::INFINITY
    };

    let mut fail_reason = None;
    if !(log_min > f64::NEG_INFINITY) {
        fail_reason = Some("an admissible cylinder carries zero mass".to_string());
    } else if log_max > log_upper_bound + 1e-9 {
        fail_reason = Some("observed max ratio exceeds the certified bound".to_string());
    } else {
        match measure.provenance() {
            Provenance::RawNu | Provenance::ProductClosedForm => {
                if spread > 1e-6 {
                    fail_reason = Some(
                        "ratio spread inconsistent with a raw Gibbs construction".to_string(),
                    );
                }
            }
            Provenance::Cesaro => {
                let slack = 2.0 * t * c;
                if log_min < log_lower_band - slack - 1e-9 {
                    fail_reason =
                        Some("min ratio fell below the invariantized lower band".to_string());
                }
            }
        }
    }

    Ok(GibbsCertificate {
        t,
        depth: n,
        c,
        m,
        k,
        log_n_bar,
        log_d,
        d: log_d.exp(),
        log_upper_bound,
        log_lower_band,
        observed_log_max_ratio: log_max,
        observed_log_min_ratio: log_min,
        ratio_spread: spread,
        p_used: p,
        provenance: measure.provenance(),
        pass: fail_reason.is_none(),
        fail_reason,
    })
}

/// Asymptotic energy of the lexicographically smallest finite-energy periodic
/// orbit of period <= max_period: the reference value I in the tightness
/// bound. For matrix potentials the per-period value is log rho of the cycle
/// product (Gelfand), which is the exact orbit average.
pub fn finite_energy_reference(
    shift: &ShiftSpace,
    pot: &Potential,
    max_period: usize,
) -> Result<(f64, Word)> {
    pot.check_alphabet(shift)?;
    for p in 1..=max_period {
        for a in 1..=shift.alphabet_len() as Symbol {
            for w in shift.periodic_words(p, a) {
                let val = match pot.cocycle() {
                    None => pot.eval(w.symbols()) / p as f64,
                    Some(cocycle) => {
                        let mut prod = crate::linalg::Mat::identity(cocycle.dim());
                        for &s in w.symbols() {
                            prod = cocycle.mat(s).mul(&prod);
                        }
                        pot.scale() * crate::linalg::spectral_radius(&prod).ln() / p as f64
                    }
                };
                if val.is_finite() {
                    return Ok((val, w));
                }
            }
        }
    }
    Err(Error::BadModel {
        reason: format!("no finite-energy periodic orbit up to period {max_period}"),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TightnessReport {
    pub t: f64,
    pub j: Symbol,
    pub log_tail_mass: f64,
    pub log_bound: f64,
    pub log_n: f64,
    pub i_ref: f64,
    pub i_word: Word,
    pub pass: bool,
}

/// Tail-mass tightness: mass above symbol J obeys
/// tail <= (N e^{-I})^t sum_{i>J} (sup f_1|_{C_i})^t with N = M e^{6C}/D^5.
pub fn tightness_report(
    measure: &CylinderMeasure,
    pot: &Potential,
    cert: &GibbsCertificate,
    j: Symbol,
) -> Result<TightnessReport> {
    let shift = measure.shift();
    let (i_ref, i_word) = finite_energy_reference(shift, pot, 4)?;
    let log_n = cert.m.ln() + 6.0 * cert.c - 5.0 * cert.log_d;
    let t = cert.t;
    let tail_terms: Vec<f64> = ((j + 1)..=shift.alphabet_len() as Symbol)
        .map(|i| {
            let v = pot.f1_log_sup(i);
            if t == 0.0 {
                0.0
            } else {
                t * v
            }
        })
        .collect();
    let log_sum_tail = log_sum_exp(&tail_terms);
    let log_bound = t * (log_n - i_ref) + log_sum_tail;
    let tail = measure.tail_mass(j);
    let log_tail_mass = if tail > 0.0 {
        tail.ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(TightnessReport {
        t,
        j,
        log_tail_mass,
        log_bound,
        log_n,
        i_ref,
        i_word,
        pass: log_tail_mass <= log_bound + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::potential::{certify_constants, MatrixCocycle, NormKind};
    use crate::pressure::gurevich_pressure;
    use crate::shift::golden_mean;

    const TOL: f64 = 1e-12;

    fn w(s: &[Symbol]) -> Word {
        Word(s.to_vec())
    }

    fn positive_pair_potential() -> Potential {
        let c = MatrixCocycle::new(vec![
            Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap(),
        ])
        .unwrap();
        Potential::matrix_norm(c, NormKind::EntrySum).unwrap()
    }

    #[test]
    fn nu_closed_form_weight() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 2).unwrap();
        assert!((nu.weight(&w(&[1, 2])) - 6.0 / 25.0).abs() < TOL);
        assert!((nu.total_mass() - 1.0).abs() < TOL);
    }

    #[test]
    fn nu_uniform_on_golden_mean() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 2).unwrap();
        assert_eq!(nu.weights().len(), 3);
        for v in nu.weights().values() {
            assert!((v - 1.0 / 3.0).abs() < TOL);
        }
        assert_eq!(nu.weight(&w(&[2, 2])), 0.0);
    }

    #[test]
    fn nu_at_zero_temperature_is_uniform() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![-5.0, 40.0]).unwrap();
        let nu = nu_weights(&s, &p, 0.0, 3).unwrap();
        for v in nu.weights().values() {
            assert!((v - 0.125).abs() < TOL);
        }
    }

    #[test]
    fn cesaro_on_product_is_identity() {
        let b = CylinderMeasure::bernoulli(&[0.25, 0.75], 8).unwrap();
        let avg = cesaro_invariantize(&b, 3, 4).unwrap();
        let direct = CylinderMeasure::bernoulli(&[0.25, 0.75], 4).unwrap();
        for (word, &v) in direct.weights() {
            assert!((avg.weight(word) - v).abs() < 1e-12, "{word}");
        }
        assert!(avg.invariance_defect().unwrap() < 1e-12);
    }

    #[test]
    fn cesaro_hand_example() {
        let s = ShiftSpace::full(2);
        let mut weights = BTreeMap::new();
        weights.insert(w(&[1, 2, 1, 2]), 1.0);
        let point = CylinderMeasure::from_weights(s, 4, weights, Provenance::RawNu).unwrap();
        let avg = cesaro_invariantize(&point, 2, 2).unwrap();
        assert!((avg.weight(&w(&[1, 2])) - 0.5).abs() < TOL);
        assert!((avg.weight(&w(&[2, 1])) - 0.5).abs() < TOL);
        assert_eq!(avg.provenance(), Provenance::Cesaro);
    }

    #[test]
    fn cesaro_m_one_is_prefix_marginal() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.0, 1.0]).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 5).unwrap();
        let avg = cesaro_invariantize(&nu, 1, 4).unwrap();
        let marg = nu.marginal(4).unwrap();
        for (word, &v) in marg.weights() {
            assert!((avg.weight(word) - v).abs() < TOL);
        }
    }

    #[test]
    fn cesaro_depth_guard() {
        let b = CylinderMeasure::bernoulli(&[0.5, 0.5], 4).unwrap();
        assert!(matches!(
            cesaro_invariantize(&b, 3, 3),
            Err(Error::DepthTooShallow { depth: 4, needed: 6 })
        ));
    }

    #[test]
    fn invariance_defect_shrinks_with_m() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 2.0]).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 10).unwrap();
        let rough = cesaro_invariantize(&nu, 2, 4).unwrap();
        let fine = cesaro_invariantize(&nu, 6, 4).unwrap();
        let d_rough = rough.invariance_defect().unwrap();
        let d_fine = fine.invariance_defect().unwrap();
        assert!(d_fine <= d_rough + 1e-12);
        assert!(d_fine <= 2.0 / 6.0 + 1e-9);
    }

    #[test]
    fn entropy_of_fair_coin() {
        let b = CylinderMeasure::bernoulli(&[0.5, 0.5], 6).unwrap();
        assert!((b.entropy_rate() - 2f64.ln()).abs() < TOL);
    }

    #[test]
    fn entropy_of_biased_coin() {
        let b = CylinderMeasure::bernoulli(&[0.4, 0.6], 5).unwrap();
        let truth = -(0.4 * 0.4f64.ln() + 0.6 * 0.6f64.ln());
        assert!((b.entropy_rate() - truth).abs() < TOL);
    }

    #[test]
    fn entropy_of_point_mass_is_zero() {
        let s = ShiftSpace::full(2);
        let m = CylinderMeasure::point_mass_on_cycle(s, &w(&[1]), 7).unwrap();
        assert_eq!(m.entropy_rate(), 0.0);
    }

    #[test]
    fn energy_of_product_measure() {
        let p = Potential::scalar(vec![1.0, -2.0]).unwrap();
        for depth in [2, 5, 7] {
            let b = CylinderMeasure::bernoulli(&[0.3, 0.7], depth).unwrap();
            let e = b.energy(&p);
            assert!((e - (0.3 - 1.4)).abs() < 1e-12, "depth {depth}");
        }
    }

    #[test]
    fn energy_of_point_mass() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 3f64.ln()]).unwrap();
        let m = CylinderMeasure::point_mass_on_cycle(s, &w(&[2]), 6).unwrap();
        let (e, bias) = m.energy_with_bias(&p, 0.0);
        assert!((e - 3f64.ln()).abs() < TOL);
        assert_eq!(bias, 0.0);
    }

    #[test]
    fn energy_scalar_matrices_uniform() {
        // eval(w) = log 2 + sum log c: the norm constant enters as log2 / n
        let c = MatrixCocycle::new(vec![
            Mat::identity(2).scale(2.0),
            Mat::identity(2).scale(3.0),
        ])
        .unwrap();
        let p = Potential::matrix_norm(c, NormKind::EntrySum).unwrap();
        let b = CylinderMeasure::bernoulli(&[0.5, 0.5], 6).unwrap();
        let e = b.energy(&p);
        let truth = 6f64.ln() / 2.0 + 2f64.ln() / 6.0;
        assert!((e - truth).abs() < TOL, "{e} vs {truth}");
    }

    #[test]
    fn tail_mass_corners() {
        let b = CylinderMeasure::bernoulli(&[0.5, 0.5], 4).unwrap();
        assert_eq!(b.tail_mass(2), 0.0);
        assert_eq!(b.tail_mass(0), 1.0);
    }

    #[test]
    fn marginal_consistency_band_full_shift() {
        // on a full shift the depth-(l-1) restriction of nu_l matches nu_{l-1}
        // within e^{2tC} per cylinder; scalar potentials have C = 0
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.3, 1.1]).unwrap();
        let t = 1.5;
        let nu3 = nu_weights(&s, &p, t, 3).unwrap();
        let nu2 = nu_weights(&s, &p, t, 2).unwrap();
        let marg = nu3.marginal(2).unwrap();
        for (word, &v) in nu2.weights() {
            let ratio = marg.weight(word) / v;
            assert!(ratio > (1.0 - 1e-9) && ratio < (1.0 + 1e-9), "{word}: {ratio}");
        }
    }

    #[test]
    fn certificate_product_closed_form_passes() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let consts = certify_constants(&p, &s, 6).unwrap();
        let est = gurevich_pressure(&s, &p, 1.0, 12, 1, &consts).unwrap();
        let gibbs = CylinderMeasure::bernoulli(&[0.4, 0.6], 5).unwrap();
        let cert = gibbs_certificate(&p, 1.0, &gibbs, &est, &consts).unwrap();
        assert!(cert.pass, "{:?}", cert.fail_reason);
        assert!(cert.ratio_spread < 1e-9);
        assert!(cert.observed_log_max_ratio.abs() < 1e-9);
    }

    #[test]
    fn certificate_positive_pair_passes() {
        let p = positive_pair_potential();
        let s = ShiftSpace::full(2);
        let consts = certify_constants(&p, &s, 8).unwrap();
        assert!((consts.c - 4f64.ln()).abs() < TOL);
        let est = gurevich_pressure(&s, &p, 2.0, 12, 1, &consts).unwrap();
        let nu = nu_weights(&s, &p, 2.0, 8).unwrap();
        let cert = gibbs_certificate(&p, 2.0, &nu, &est, &consts).unwrap();
        assert!(cert.pass, "{:?}", cert.fail_reason);
        assert!((cert.d - 1.0 / 128.0).abs() < 1e-12);
        assert!(cert.observed_log_max_ratio <= cert.log_upper_bound);
        assert!(cert.observed_log_min_ratio.is_finite());
    }

    #[test]
    fn certificate_catches_corrupted_measure() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let consts = certify_constants(&p, &s, 6).unwrap();
        let est = gurevich_pressure(&s, &p, 1.0, 12, 1, &consts).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 4).unwrap();
        let mut weights = nu.weights().clone();
        let victim = w(&[1, 2, 1, 2]);
        *weights.get_mut(&victim).unwrap() *= 2.0;
        let bad =
            CylinderMeasure::from_weights(s.clone(), 4, weights, Provenance::RawNu).unwrap();
        let cert = gibbs_certificate(&p, 1.0, &bad, &est, &consts).unwrap();
        assert!(!cert.pass);
        assert!(cert.ratio_spread > 0.5);
    }

    #[test]
    fn cesaro_certificate_respects_lower_band() {
        let p = positive_pair_potential();
        let s = ShiftSpace::full(2);
        let consts = certify_constants(&p, &s, 8).unwrap();
        let est = gurevich_pressure(&s, &p, 1.0, 12, 1, &consts).unwrap();
        let raw = nu_weights(&s, &p, 1.0, 9).unwrap();
        let avg = cesaro_invariantize(&raw, 3, 6).unwrap();
        let cert = gibbs_certificate(&p, 1.0, &avg, &est, &consts).unwrap();
        assert!(cert.pass, "{:?}", cert.fail_reason);
        assert!(cert.observed_log_min_ratio >= cert.log_lower_band - 2.0 * cert.c - 1e-9);
    }

    #[test]
    fn finite_energy_reference_prefers_smallest_orbit() {
        let s = golden_mean();
        let p = Potential::scalar(vec![0.25, 1.0]).unwrap();
        let (i, word) = finite_energy_reference(&s, &p, 4).unwrap();
        assert_eq!(word.to_string(), "1");
        assert!((i - 0.25).abs() < TOL);
    }

    #[test]
    fn tightness_bound_holds_on_truncation() {
        // truncated countable family v_i = 2^{-i}: gibbs mass above J decays
        // geometrically and the certified bound is far above it
        let s = ShiftSpace::full(6);
        let weights: Vec<f64> = (1..=6).map(|i| -(i as f64) * 2f64.ln()).collect();
        let p = Potential::scalar(weights).unwrap();
        let consts = certify_constants(&p, &s, 4).unwrap();
        let est = gurevich_pressure(&s, &p, 1.0, 8, 1, &consts).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 3).unwrap();
        let cert = gibbs_certificate(&p, 1.0, &nu, &est, &consts).unwrap();
        let tr = tightness_report(&nu, &p, &cert, 3).unwrap();
        assert!(tr.pass);
        assert!(tr.log_tail_mass < 0.0);
        assert_eq!(tr.i_word.to_string(), "1");
    }

    #[test]
    fn top_k_orders_by_weight_then_word() {
        let s = ShiftSpace::full(2);
        let p = Potential::scalar(vec![0.0, 1.0]).unwrap();
        let nu = nu_weights(&s, &p, 1.0, 2).unwrap();
        let top = nu.top_k(2);
        assert_eq!(top[0].0.to_string(), "22");
        assert_eq!(top[1].0.to_string(), "12");
    }

    #[test]
    fn marginal_depth_guard() {
        let b = CylinderMeasure::bernoulli(&[0.5, 0.5], 3).unwrap();
        assert!(matches!(
            b.marginal(5),
            Err(Error::DepthMismatch { expected: 3, found: 5 })
        ));
    }
}
