//! Cylinder-constant almost-additive potentials: per-symbol scalar weights,
//! matrix-norm cocycles and singular-value cocycles. All evaluators are pure
//! functions of the word; the Bowen bound is therefore always M = 1.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Mat, ScaledMat};
use crate::shift::{ShiftSpace, Symbol, Word};

pub const WORD_BUDGET: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum NormKind {
    EntrySum,
    Spectral,
}

/// Finite family of d x d matrices indexed by symbol (1-based).
#[derive(Debug, Clone)]
pub struct MatrixCocycle {
    mats: Vec<Mat>,
    dim: usize,
    positivity_ratio: Option<f64>,
}

impl MatrixCocycle {
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::BadModel {
                reason: "matrix family is empty".into(),
            });
        }
        let dim = mats[0].dim();
        for (i, m) in mats.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            if m.is_zero() {
                return Err(Error::ZeroMatrix { index: i + 1 });
            }
        }
        let positivity_ratio = if mats.iter().all(|m| m.is_positive()) {
            let r = mats
                .iter()
                .map(|m| m.min_entry() / m.max_entry())
                .fold(f64::INFINITY, f64::min);
            Some(r)
        } else {
            None
        };
        Ok(MatrixCocycle {
            mats,
            dim,
            positivity_ratio,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mat(&self, s: Symbol) -> &Mat {
        &self.mats[s as usize - 1]
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    /// min over the family of (min entry / max entry); present only when
    /// every matrix is strictly positive.
    pub fn positivity_ratio(&self) -> Option<f64> {
        self.positivity_ratio
    }

    pub fn require_nonsingular(&self) -> Result<()> {
        for (i, m) in self.mats.iter().enumerate() {
            if !m.log_abs_det().is_finite() {
                return Err(Error::SingularMatrix { index: i + 1 });
            }
        }
        Ok(())
    }

    /// Scale every matrix by c (used by homogeneity checks).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        MatrixCocycle::new(self.mats.iter().map(|m| m.scale(c)).collect())
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Scalar { weights: Vec<f64> },
    Norm { cocycle: MatrixCocycle, norm: NormKind },
    Singular { cocycle: MatrixCocycle, index: usize },
}

/// Running evaluation state along a word being extended symbol by symbol.
/// Extending word w by symbol s turns the product P(w) into A_s * P(w):
/// the newest symbol multiplies on the left.
#[derive(Debug, Clone)]
pub enum EvalState {
    Sum(f64),
    Product(ScaledMat),
}

#[derive(Debug, Clone)]
pub struct Potential {
    kind: Kind,
    alphabet: usize,
    scale: f64,
}

impl Potential {
    /// Additive potential from one weight per symbol: eval(w) = sum of
    /// weights along w, C = 0 exactly.
    pub fn scalar(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::BadModel {
                reason: "scalar weights must be nonempty and finite".into(),
            });
        }
        let alphabet = weights.len();
        Ok(Potential {
            kind: Kind::Scalar { weights },
            alphabet,
            scale: 1.0,
        })
    }

    /// eval(w) = log ||A_{w_n} ... A_{w_1}|| (reversed order: the product
    /// accumulates on the left as the word grows).
    pub fn matrix_norm(cocycle: MatrixCocycle, norm: NormKind) -> Result<Self> {
        let alphabet = cocycle.len();
        Ok(Potential {
            kind: Kind::Norm { cocycle, norm },
            alphabet,
            scale: 1.0,
        })
    }

    /// eval(w) = log s_index of the product, d = 2 only, index 1 or 2.
    /// Index 1 coincides with the spectral-norm potential.
    pub fn singular_value(cocycle: MatrixCocycle, index: usize) -> Result<Self> {
        if cocycle.dim() != 2 {
            return Err(Error::UnsupportedDimension { dim: cocycle.dim() });
        }
        if index != 1 && index != 2 {
            return Err(Error::BadModel {
                reason: format!("singular value index {index} out of range"),
            });
        }
        cocycle.require_nonsingular()?;
        let alphabet = cocycle.len();
        Ok(Potential {
            kind: Kind::Singular { cocycle, index },
            alphabet,
            scale: 1.0,
        })
    }

    /// Same potential with eval multiplied by c > 0. Doubling (c a power of
    /// two) is exact, which the scaling tests rely on.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::BadModel {
                reason: format!("potential scale {c} must be positive and finite"),
            });
        }
        let mut p = self.clone();
        p.scale = self.scale * c;
        Ok(p)
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn cocycle(&self) -> Option<&MatrixCocycle> {
        match &self.kind {
            Kind::Scalar { .. } => None,
            Kind::Norm { cocycle, .. } | Kind::Singular { cocycle, .. } => Some(cocycle),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self.kind, Kind::Scalar { .. })
    }

    pub fn initial_state(&self) -> EvalState {
        match &self.kind {
            Kind::Scalar { .. } => EvalState::Sum(0.0),
            Kind::Norm { cocycle, .. } | Kind::Singular { cocycle, .. } => {
                EvalState::Product(ScaledMat::identity(cocycle.dim()))
            }
        }
    }

    pub fn extend_state(&self, state: &EvalState, s: Symbol) -> EvalState {
        match (&self.kind, state) {
            (Kind::Scalar { weights }, EvalState::Sum(x)) => {
                EvalState::Sum(x + weights[s as usize - 1])
            }
            (Kind::Norm { cocycle, .. }, EvalState::Product(p))
            | (Kind::Singular { cocycle, .. }, EvalState::Product(p)) => {
                EvalState::Product(p.lmul(cocycle.mat(s)))
            }
            _ => unreachable!("state kind matches potential kind"),
        }
    }

    /// log f_n on the cylinder of the word held in `state`.
    pub fn state_value(&self, state: &EvalState) -> f64 {
        let raw = match (&self.kind, state) {
            (Kind::Scalar { .. }, EvalState::Sum(x)) => *x,
            (Kind::Norm { norm, .. }, EvalState::Product(p)) => match norm {
                NormKind::EntrySum => p.log_entry_sum(),
                NormKind::Spectral => p.log_spectral_norm(),
            },
            (Kind::Singular { index, .. }, EvalState::Product(p)) => p
                .log_singular_value(*index)
                .expect("constructor enforces 2x2"),
            _ => unreachable!("state kind matches potential kind"),
        };
        if self.scale == 1.0 {
            raw
        } else {
            self.scale * raw
        }
    }

    pub fn eval(&self, w: &[Symbol]) -> f64 {
        let mut st = self.initial_state();
        for &s in w {
            st = self.extend_state(&st, s);
        }
        self.state_value(&st)
    }

    pub fn eval_word(&self, w: &Word) -> f64 {
        self.eval(w.symbols())
    }

    /// sup of log f_1 on the 1-cylinder of symbol i (equals the value:
    /// cylinder-constant).
    pub fn f1_log_sup(&self, i: Symbol) -> f64 {
        self.eval(&[i])
    }

    /// S_1 = sum over symbols of sup f_1 restricted to each 1-cylinder.
    pub fn sum_sup_f1(&self) -> f64 {
        (1..=self.alphabet as Symbol)
            .map(|i| self.f1_log_sup(i).exp())
            .sum()
    }

    /// Certified almost-additivity constant available without a scan:
    /// 0 for additive scalar potentials; log(d / r) for strictly positive
    /// families under the entry-sum norm (r the family positivity ratio,
    /// via row-sum comparability of positive products).
    pub fn analytic_c(&self) -> Option<f64> {
        let base = match &self.kind {
            Kind::Scalar { .. } => Some(0.0),
            Kind::Norm { cocycle, norm } => match (norm, cocycle.positivity_ratio()) {
                (NormKind::EntrySum, Some(r)) => Some((cocycle.dim() as f64 / r).ln()),
                _ => None,
            },
            Kind::Singular { .. } => None,
        };
        base.map(|c| self.scale * c)
    }

    pub fn check_alphabet(&self, shift: &ShiftSpace) -> Result<()> {
        if self.alphabet != shift.alphabet_len() {
            return Err(Error::AlphabetMismatch {
                shift: shift.alphabet_len(),
                potential: self.alphabet,
            });
        }
        Ok(())
    }
}

/// Depth-first enumeration of admissible words of a fixed length with the
/// evaluation state carried down the tree, so each node costs one extension.
/// `visit` receives the word symbols and eval(w).
pub fn fold_words<F>(
    shift: &ShiftSpace,
    pot: &Potential,
    len: usize,
    anchor: Option<Symbol>,
    periodic: bool,
    visit: &mut F,
) where
    F: FnMut(&[Symbol], f64),
{
    if len == 0 {
        return;
    }
    let mut word = Vec::with_capacity(len);
    let first: Vec<Symbol> = match anchor {
        Some(a) => vec![a],
        None => (1..=shift.alphabet_len() as Symbol).collect(),
    };
    for s in first {
        word.push(s);
        let st = pot.extend_state(&pot.initial_state(), s);
        descend(shift, pot, len, periodic, &mut word, &st, visit);
        word.pop();
    }
}

fn descend<F>(
    shift: &ShiftSpace,
    pot: &Potential,
    len: usize,
    periodic: bool,
    word: &mut Vec<Symbol>,
    state: &EvalState,
    visit: &mut F,
) where
    F: FnMut(&[Symbol], f64),
{
    if word.len() == len {
        if !periodic || shift.allows(word[len - 1], word[0]) {
            visit(word, pot.state_value(state));
        }
        return;
    }
    let prev = word[word.len() - 1];
    for s in 1..=shift.alphabet_len() as Symbol {
        if shift.allows(prev, s) {
            word.push(s);
            let st = pot.extend_state(state, s);
            descend(shift, pot, len, periodic, word, &st, visit);
            word.pop();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CSource {
    Analytic,
    Empirical,
}

/// Certified constants of the potential on a given shift. `c` is the bound
/// actually used downstream; the scan maximum is kept for diagnostics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertifiedConstants {
    pub c: f64,
    pub source: CSource,
    pub m: f64,
    pub empirical_max: f64,
    pub scan_len: usize,
}

/// Scan every admissible word w with |w| <= max_len and every split w = uv,
/// recording max |eval(uv) - eval(u) - eval(v)|. Returns the analytic C when
/// one exists (and errors if the scan contradicts it), otherwise the scan
/// maximum flagged empirical.
pub fn certify_constants(
    pot: &Potential,
    shift: &ShiftSpace,
    max_len: usize,
) -> Result<CertifiedConstants> {
    pot.check_alphabet(shift)?;
    if max_len < 2 {
        return Err(Error::BadModel {
            reason: "certification scan needs max_len >= 2".into(),
        });
    }
    let total: u128 = (1..=max_len).map(|n| shift.word_count(n)).sum();
    if total > WORD_BUDGET {
        return Err(Error::BudgetExceeded {
            words: total,
            budget: WORD_BUDGET,
        });
    }
    let mut eval: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    for n in 1..=max_len {
        fold_words(shift, pot, n, None, false, &mut |w, v| {
            eval.insert(w.to_vec(), v);
        });
    }
    let mut worst = 0.0f64;
    for (w, &v) in &eval {
        if w.len() < 2 {
            continue;
        }
        if !v.is_finite() {
            return Err(Error::NonPositiveNorm);
        }
        for cut in 1..w.len() {
            let a = eval[&w[..cut]];
            let b = eval[&w[cut..]];
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonPositiveNorm);
            }
            worst = worst.max((v - a - b).abs());
        }
    }
    match pot.analytic_c() {
        Some(c) => {
            if worst > c + 1e-9 {
                return Err(Error::AlmostAdditivityViolated {
                    claimed: c,
                    observed: worst,
                });
            }
            Ok(CertifiedConstants {
                c,
                source: CSource::Analytic,
                m: 1.0,
                empirical_max: worst,
                scan_len: max_len,
            })
        }
        None => Ok(CertifiedConstants {
            c: worst,
            source: CSource::Empirical,
            m: 1.0,
            empirical_max: worst,
            scan_len: max_len,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeometricTail {
    pub ratio: f64,
    pub from_index: usize,
}

/// Summability of a countable family given the finite prefix of first-level
/// sups v_i = sup f_1 on the i-th 1-cylinder plus an optional geometric tail
/// (v_i = v_L ratio^{i-L} beyond the last listed value v_L).
#[derive(Debug, Clone, serde::Serialize)]
pub struct SummabilityReport {
    pub sum_sup_f1: f64,
    pub condition4: f64,
    pub in_class_r: bool,
    pub prefix_len: usize,
    pub tail: Option<GeometricTail>,
}

pub fn summability_report(
    sups: &[f64],
    tail: Option<GeometricTail>,
) -> Result<SummabilityReport> {
    if sups.is_empty() || sups.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::BadModel {
            reason: "first-level sups must be positive and finite".into(),
        });
    }
    if let Some(t) = tail {
        if t.ratio >= 1.0 {
            return Err(Error::DivergentTail { ratio: t.ratio });
        }
        if t.ratio <= 0.0 || t.from_index == 0 || t.from_index > sups.len() {
            return Err(Error::BadModel {
                reason: "geometric tail needs ratio in (0,1) and a valid start index".into(),
            });
        }
        // the listed prefix must already follow the claimed decay
        let i0 = t.from_index - 1;
        for (off, v) in sups[i0..].iter().enumerate() {
            let claimed = sups[i0] * t.ratio.powi(off as i32);
            if (v - claimed).abs() > 1e-9 * claimed.max(1.0) {
                return Err(Error::BadModel {
                    reason: format!(
                        "sup at index {} deviates from the declared geometric tail",
                        i0 + off + 1
                    ),
                });
            }
        }
    }
    let mut sum: f64 = sups.iter().sum();
    let mut cond4: f64 = sups.iter().map(|v| v.ln() * v).sum();
    if let Some(t) = tail {
        let v_l = *sups.last().unwrap();
        let r = t.ratio;
        sum += v_l * r / (1.0 - r);
        // sum over m >= 1 of (ln v_l + m ln r) v_l r^m, closed form
        cond4 += v_l * (v_l.ln() * r / (1.0 - r) + r.ln() * r / ((1.0 - r) * (1.0 - r)));
    }
    let in_class_r = sum.is_finite() && cond4.is_finite();
    Ok(SummabilityReport {
        sum_sup_f1: sum,
        condition4: cond4,
        in_class_r,
        prefix_len: sups.len(),
        tail,
    })
}

/// Finite-alphabet summability of a potential on a shift (tail empty).
pub fn finite_summability(pot: &Potential) -> Result<SummabilityReport> {
    let sups: Vec<f64> = (1..=pot.alphabet_len() as Symbol)
        .map(|i| pot.f1_log_sup(i).exp())
        .collect();
    summability_report(&sups, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::golden_mean;

    const TOL: f64 = 1e-12;

    fn mat2(rows: [[f64; 2]; 2]) -> Mat {
        Mat::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
    }

    fn positive_pair() -> MatrixCocycle {
        MatrixCocycle::new(vec![mat2([[2.0, 1.0], [1.0, 1.0]]), mat2([[1.0, 1.0], [1.0, 2.0]])])
            .unwrap()
    }

    fn golden_pair() -> MatrixCocycle {
        MatrixCocycle::new(vec![mat2([[1.0, 1.0], [0.0, 1.0]]), mat2([[1.0, 0.0], [1.0, 1.0]])])
            .unwrap()
    }

    fn scalar_pair() -> MatrixCocycle {
        MatrixCocycle::new(vec![
            mat2([[2.0, 0.0], [0.0, 2.0]]),
            mat2([[3.0, 0.0], [0.0, 3.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn scalar_zero_weights() {
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        assert_eq!(p.eval(&[1, 2]), 0.0);
    }

    #[test]
    fn scalar_additivity() {
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        assert!((p.eval(&[1, 2, 1]) - 12f64.ln()).abs() < TOL);
    }

    #[test]
    fn scalar_single_symbol() {
        let p = Potential::scalar(vec![1.0]).unwrap();
        assert_eq!(p.eval(&[1, 1, 1]), 3.0);
    }

    #[test]
    fn norm_potential_scalar_matrices() {
        let p = Potential::matrix_norm(scalar_pair(), NormKind::EntrySum).unwrap();
        // product over 12 is 6*I, entry-sum norm 12, plus nothing else
        assert!((p.eval(&[1, 2]) - 12f64.ln()).abs() < TOL);
    }

    #[test]
    fn norm_potential_diagonal_power() {
        let c = MatrixCocycle::new(vec![mat2([[2.0, 0.0], [0.0, 1.0]])]).unwrap();
        let p = Potential::matrix_norm(c, NormKind::EntrySum).unwrap();
        assert!((p.eval(&[1, 1, 1]) - 9f64.ln()).abs() < TOL);
    }

    #[test]
    fn norm_potential_golden_pair_hand_product() {
        let p = Potential::matrix_norm(golden_pair(), NormKind::EntrySum).unwrap();
        // A_2 A_1 = [[1,1],[1,2]], entry sum 5
        assert!((p.eval(&[1, 2]) - 5f64.ln()).abs() < TOL);
    }

    #[test]
    fn singular_value_diagonal() {
        let c = MatrixCocycle::new(vec![
            mat2([[2.0, 0.0], [0.0, 0.5]]),
            mat2([[3.0, 0.0], [0.0, 1.0 / 3.0]]),
        ])
        .unwrap();
        let p1 = Potential::singular_value(c.clone(), 1).unwrap();
        let p2 = Potential::singular_value(c, 2).unwrap();
        assert!((p1.eval(&[1, 2]) - 6f64.ln()).abs() < TOL);
        assert!((p2.eval(&[1, 2]) + 6f64.ln()).abs() < TOL);
    }

    #[test]
    fn singular_value_identity() {
        let c = MatrixCocycle::new(vec![Mat::identity(2)]).unwrap();
        let p = Potential::singular_value(c, 1).unwrap();
        assert_eq!(p.eval(&[1, 1, 1, 1]), 0.0);
    }

    #[test]
    fn singular_rejects_singular_generator() {
        let c = MatrixCocycle::new(vec![mat2([[1.0, 1.0], [1.0, 1.0]])]).unwrap();
        assert!(matches!(
            Potential::singular_value(c, 2),
            Err(Error::SingularMatrix { index: 1 })
        ));
    }

    #[test]
    fn zero_matrix_rejected() {
        let e = MatrixCocycle::new(vec![mat2([[0.0, 0.0], [0.0, 0.0]])]).unwrap_err();
        assert!(matches!(e, Error::ZeroMatrix { index: 1 }));
    }

    #[test]
    fn positivity_ratio_of_positive_pair() {
        assert!((positive_pair().positivity_ratio().unwrap() - 0.5).abs() < TOL);
        assert_eq!(golden_pair().positivity_ratio(), None);
    }

    #[test]
    fn certify_scalar_is_exactly_zero() {
        let p = Potential::scalar(vec![0.3, -1.7]).unwrap();
        let c = certify_constants(&p, &ShiftSpace::full(2), 8).unwrap();
        assert_eq!(c.c, 0.0);
        assert_eq!(c.source, CSource::Analytic);
        assert_eq!(c.m, 1.0);
        assert!(c.empirical_max < 1e-12);
    }

    #[test]
    fn certify_positive_pair_analytic_log4() {
        let p = Potential::matrix_norm(positive_pair(), NormKind::EntrySum).unwrap();
        let c = certify_constants(&p, &ShiftSpace::full(2), 10).unwrap();
        assert!((c.c - 4f64.ln()).abs() < TOL);
        assert_eq!(c.source, CSource::Analytic);
        assert!(c.empirical_max <= c.c + 1e-9);
    }

    #[test]
    fn certify_scalar_matrices_empirical_log2() {
        // ||cI . c'I|| = 2cc' while ||cI|| ||c'I|| = 4cc': every split defects
        // by exactly log 2
        let p = Potential::matrix_norm(scalar_pair(), NormKind::EntrySum).unwrap();
        let c = certify_constants(&p, &ShiftSpace::full(2), 6).unwrap();
        assert_eq!(c.source, CSource::Empirical);
        assert!((c.c - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn certify_respects_subshift_words() {
        let p = Potential::scalar(vec![0.0, 1.0]).unwrap();
        let c = certify_constants(&p, &golden_mean(), 6).unwrap();
        assert_eq!(c.c, 0.0);
    }

    #[test]
    fn fold_matches_direct_eval() {
        let p = Potential::matrix_norm(positive_pair(), NormKind::EntrySum).unwrap();
        let s = ShiftSpace::full(2);
        let mut seen = 0;
        fold_words(&s, &p, 5, Some(1), false, &mut |w, v| {
            assert!((v - p.eval(w)).abs() < 1e-12);
            seen += 1;
        });
        assert_eq!(seen, 16);
    }

    #[test]
    fn fold_periodic_filters_closure() {
        let p = Potential::scalar(vec![0.0, 0.0]).unwrap();
        let s = golden_mean();
        let mut words = Vec::new();
        fold_words(&s, &p, 3, Some(1), true, &mut |w, _| {
            words.push(Word(w.to_vec()).to_string());
        });
        assert_eq!(words, vec!["111", "112", "121"]);
    }

    #[test]
    fn scaled_potential_doubles_exactly() {
        let p = Potential::matrix_norm(positive_pair(), NormKind::EntrySum).unwrap();
        let q = p.scaled(2.0).unwrap();
        for w in ShiftSpace::full(2).words(6, None) {
            let a = p.eval(w.symbols());
            let b = q.eval(w.symbols());
            assert_eq!(b, 2.0 * a);
        }
        assert_eq!(q.analytic_c().unwrap(), 2.0 * p.analytic_c().unwrap());
    }

    #[test]
    fn spectral_norm_agrees_with_top_singular_value() {
        let c = positive_pair();
        let pn = Potential::matrix_norm(c.clone(), NormKind::Spectral).unwrap();
        let ps = Potential::singular_value(c, 1).unwrap();
        for w in ShiftSpace::full(2).words(8, None) {
            let a = pn.eval(w.symbols());
            let b = ps.eval(w.symbols());
            assert!((a - b).abs() < 1e-12, "{w}: {a} vs {b}");
        }
    }

    #[test]
    fn norm_gap_bounded_by_log_d() {
        // entry-sum dominates spectral for nonnegative matrices, by at most d
        let c = positive_pair();
        let pe = Potential::matrix_norm(c.clone(), NormKind::EntrySum).unwrap();
        let ps = Potential::matrix_norm(c, NormKind::Spectral).unwrap();
        for w in ShiftSpace::full(2).words(7, None) {
            let gap = pe.eval(w.symbols()) - ps.eval(w.symbols());
            assert!(gap >= -1e-12 && gap <= 2f64.ln() + 1e-12, "{w}: {gap}");
        }
    }

    #[test]
    fn summability_geometric_halves() {
        let sups: Vec<f64> = (1..=6).map(|i| 0.5f64.powi(i)).collect();
        let r = summability_report(
            &sups,
            Some(GeometricTail {
                ratio: 0.5,
                from_index: 1,
            }),
        )
        .unwrap();
        assert!((r.sum_sup_f1 - 1.0).abs() < TOL);
        assert!((r.condition4 + 2.0 * 2f64.ln()).abs() < 1e-10);
        assert!(r.in_class_r);
    }

    #[test]
    fn summability_divergent_tail() {
        let e = summability_report(
            &[1.0, 1.0],
            Some(GeometricTail {
                ratio: 1.0,
                from_index: 1,
            }),
        )
        .unwrap_err();
        assert!(matches!(e, Error::DivergentTail { .. }));
    }

    #[test]
    fn summability_finite_alphabet() {
        let p = Potential::scalar(vec![2f64.ln(), 3f64.ln()]).unwrap();
        let r = finite_summability(&p).unwrap();
        assert!((r.sum_sup_f1 - 5.0).abs() < TOL);
        assert!(r.in_class_r);
    }

    #[test]
    fn certify_budget_guard() {
        let p = Potential::scalar(vec![0.0; 6]).unwrap();
        let e = certify_constants(&p, &ShiftSpace::full(6), 12).unwrap_err();
        assert!(matches!(e, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn alphabet_mismatch_detected() {
        let p = Potential::scalar(vec![0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            certify_constants(&p, &ShiftSpace::full(2), 4),
            Err(Error::AlphabetMismatch { .. })
        ));
    }
}
