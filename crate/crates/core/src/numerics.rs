//! Log-space summation and sequence extrapolation shared by the pressure and
//! measure code. Everything here is deterministic: fixed-shape pairwise trees,
//! no data-dependent reordering.

/// Relative floor used for convergence and degeneracy decisions.
pub const REL_FLOOR: f64 = 1e-13;

/// log(sum(exp(t))) with max-shift and a fixed pairwise summation tree.
/// NEG_INFINITY entries contribute zero mass; an empty or all-(-inf) input
/// returns NEG_INFINITY.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &t in terms {
        if t > max {
            max = t;
        }
    }
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    let sum = pairwise_exp_sum(terms, max);
    max + sum.ln()
}

fn pairwise_exp_sum(terms: &[f64], max: f64) -> f64 {
    if terms.len() <= 8 {
        let mut acc = 0.0;
        for &t in terms {
            acc += (t - max).exp();
        }
        return acc;
    }
    let mid = terms.len() / 2;
    pairwise_exp_sum(&terms[..mid], max) + pairwise_exp_sum(&terms[mid..], max)
}

/// Aitken delta-squared step on three consecutive terms. None when the second
/// difference is too small to divide by, which is exactly the case where the
/// sequence has already settled.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let d2 = x2 - x1;
    let dd = d2 - (x1 - x0);
    if dd.abs() <= REL_FLOOR * (1.0 + x2.abs()) {
        return None;
    }
    Some(x2 - d2 * d2 / dd)
}

/// Accelerate a sequence that converges geometrically (up to noise): apply
/// Aitken over every window, take the last stable value, and report an
/// uncertainty estimate (not a certificate) from the residual differences.
/// Falls back to the last raw term when Aitken is degenerate everywhere.
pub fn extrapolate(seq: &[f64]) -> (f64, f64) {
    let floor = |x: f64| REL_FLOOR * (1.0 + x.abs());
    match seq.len() {
        0 => (f64::NAN, f64::INFINITY),
        1 => (seq[0], f64::INFINITY),
        _ => {
            let raw_last = seq[seq.len() - 1];
            let raw_unc = (raw_last - seq[seq.len() - 2]).abs();
            let mut acc: Vec<f64> = Vec::new();
            for w in seq.windows(3) {
                if let Some(a) = aitken(w[0], w[1], w[2]) {
                    acc.push(a);
                }
            }
            match acc.len() {
                0 => (raw_last, raw_unc + floor(raw_last)),
                1 => (acc[0], raw_unc + floor(acc[0])),
                n => {
                    let last = acc[n - 1];
                    let unc = (last - acc[n - 2]).abs().min(raw_unc) + floor(last);
                    (last, unc)
                }
            }
        }
    }
}
