//! Small dense matrices (d <= 4 in practice). Hand-rolled on purpose: the
//! cocycle code needs bitwise-reproducible products and log-rescaled
//! accumulation, which is easier to audit on a flat Vec than through a
//! general linear-algebra crate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<f64>, // row-major
}

impl Mat {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.len() / dim.max(1),
            });
        }
        Ok(Mat { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        Ok(Mat {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Mat { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = self.data[i * d + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += aik * other.data[k * d + j];
                }
            }
        }
        Mat { dim: d, data: out }
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.data[i * d + j];
            }
        }
        Mat { dim: d, data: out }
    }

    /// Sum of absolute entries. Submultiplicative, and for nonnegative
    /// matrices within a factor d of the spectral norm.
    pub fn entry_sum_norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| *x > 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| *x >= 0.0)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn is_upper_triangular(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..i).all(|j| self.get(i, j) == 0.0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.transpose().is_upper_triangular()
    }

    /// log|det| via LU with partial pivoting; returns NEG_INFINITY when the
    /// matrix is numerically singular.
    pub fn log_abs_det(&self) -> f64 {
        let d = self.dim;
        if d == 1 {
            return self.data[0].abs().ln();
        }
        if d == 2 {
            return det2(self.data[0], self.data[1], self.data[2], self.data[3])
                .abs()
                .ln();
        }
        let mut a = self.data.clone();
        let mut acc = 0.0_f64;
        for col in 0..d {
            let mut piv = col;
            for r in col + 1..d {
                if a[r * d + col].abs() > a[piv * d + col].abs() {
                    piv = r;
                }
            }
            let p = a[piv * d + col];
            if p == 0.0 {
                return f64::NEG_INFINITY;
            }
            if piv != col {
                for j in 0..d {
                    a.swap(col * d + j, piv * d + j);
                }
            }
            acc += p.abs().ln();
            for r in col + 1..d {
                let f = a[r * d + col] / p;
                if f == 0.0 {
                    continue;
                }
                for j in col..d {
                    a[r * d + j] -= f * a[col * d + j];
                }
            }
        }
        acc
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.data[0],
            2 => det2(self.data[0], self.data[1], self.data[2], self.data[3]),
            _ => {
                // sign not needed by callers beyond 2x2; magnitude from LU
                self.log_abs_det().exp()
            }
        }
    }
}

/// ad - bc with a compensated product (Kahan), accurate to a couple of ulps
/// even when the two terms nearly cancel.
fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = b * c;
    let err = (-b).mul_add(c, w);
    a.mul_add(d, -w) + err
}

/// Both singular values of a 2x2 matrix, largest first. s1 comes from the
/// stable rotated-Frobenius closed form; s2 as |det| / s1, which is
/// algebraically the same as (q - r) / 2 but avoids the cancellation that
/// form suffers when s2 << s1.
pub fn singular_values_2x2(m: &Mat) -> Result<(f64, f64)> {
    if m.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: m.dim() });
    }
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let q = ((a + d) * (a + d) + (b - c) * (b - c)).sqrt();
    let r = ((a - d) * (a - d) + (b + c) * (b + c)).sqrt();
    let s1 = (q + r) / 2.0;
    let s2 = if s1 > 0.0 {
        (det2(a, b, c, d) / s1).abs()
    } else {
        0.0
    };
    Ok((s1, s2))
}

/// Largest singular value. Closed form for 2x2, otherwise symmetric power
/// iteration on A^T A (deterministic start, tolerance 1e-14).
pub fn spectral_norm(m: &Mat) -> f64 {
    let d = m.dim();
    if d == 1 {
        return m.get(0, 0).abs();
    }
    if d == 2 {
        return singular_values_2x2(m).expect("dim checked").0;
    }
    let g = m.transpose().mul(m);
    symmetric_dominant_eigenvalue(&g).max(0.0).sqrt()
}

fn symmetric_dominant_eigenvalue(g: &Mat) -> f64 {
    let d = g.dim();
    let mut v = vec![1.0_f64; d];
    let mut lambda = 0.0_f64;
    for _ in 0..500 {
        let mut w = vec![0.0_f64; d];
        for i in 0..d {
            for j in 0..d {
                w[i] += g.get(i, j) * v[j];
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for x in &mut w {
            *x /= norm;
        }
        let next = norm;
        let done = (next - lambda).abs() <= 1e-14 * (1.0 + next.abs());
        lambda = next;
        v = w;
        if done {
            break;
        }
    }
    lambda
}

/// Spectral radius. Characteristic polynomial for d <= 2; power iteration with
/// convergence tolerance 1e-12 for larger matrices (adequate for the
/// nonnegative products this crate feeds it).
pub fn spectral_radius(m: &Mat) -> f64 {
    let d = m.dim();
    if d == 1 {
        return m.get(0, 0).abs();
    }
    if d == 2 {
        let tr = m.get(0, 0) + m.get(1, 1);
        let det = m.det();
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let s = disc.sqrt();
            return ((tr + s) / 2.0).abs().max(((tr - s) / 2.0).abs());
        }
        // complex pair: |lambda|^2 = det
        return det.sqrt();
    }
    let mut v = vec![1.0_f64; d];
    let mut lambda = 0.0_f64;
    for _ in 0..1000 {
        let mut w = vec![0.0_f64; d];
        for i in 0..d {
            for j in 0..d {
                w[i] += m.get(i, j) * v[j];
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for x in &mut w {
            *x /= norm;
        }
        let done = (norm - lambda).abs() <= 1e-12 * (1.0 + norm);
        lambda = norm;
        v = w;
        if done {
            break;
        }
    }
    lambda
}

/// A matrix product kept in factored form `exp(log_scale) * mat`, rescaled
/// only when entries leave [1e-140, 1e140]. Inside that range products are
/// plain f64 products, so scaling a family by a power of two scales every
/// stored product exactly.
#[derive(Debug, Clone)]
pub struct ScaledMat {
    pub mat: Mat,
    pub log_scale: f64,
}

impl ScaledMat {
    pub fn identity(dim: usize) -> Self {
        ScaledMat {
            mat: Mat::identity(dim),
            log_scale: 0.0,
        }
    }

    /// Left-multiply by `a` (the newest symbol in a word multiplies on the
    /// left).
    pub fn lmul(&self, a: &Mat) -> ScaledMat {
        let mut next = ScaledMat {
            mat: a.mul(&self.mat),
            log_scale: self.log_scale,
        };
        let m = next.mat.max_abs_entry();
        if m != 0.0 && !(1e-140..=1e140).contains(&m) {
            next.mat = next.mat.scale(1.0 / m);
            next.log_scale += m.ln();
        }
        next
    }

    pub fn log_entry_sum(&self) -> f64 {
        self.log_scale + self.mat.entry_sum_norm().ln()
    }

    pub fn log_spectral_norm(&self) -> f64 {
        self.log_scale + spectral_norm(&self.mat).ln()
    }

    pub fn log_singular_value(&self, index: usize) -> Result<f64> {
        let (s1, s2) = singular_values_2x2(&self.mat)?;
        let s = if index == 1 { s1 } else { s2 };
        Ok(self.log_scale + s.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Mat {
        Mat::new(2, vec![a, b, c, d]).unwrap()
    }

    #[test]
    fn entry_sum_norm_counts_all_entries() {
        assert_eq!(m2(2.0, 1.0, 1.0, 1.0).entry_sum_norm(), 5.0);
        assert_eq!(Mat::identity(2).entry_sum_norm(), 2.0);
    }

    #[test]
    fn singular_values_diagonal() {
        let (s1, s2) = singular_values_2x2(&m2(2.0, 0.0, 0.0, 3.0)).unwrap();
        assert!((s1 - 3.0).abs() < 1e-14);
        assert!((s2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_multiply_to_det() {
        let m = m2(2.0, 1.0, 1.0, 1.0);
        let (s1, s2) = singular_values_2x2(&m).unwrap();
        assert!((s1 * s2 - m.det().abs()).abs() < 1e-12);
    }

    #[test]
    fn spectral_radius_2x2_real_and_complex() {
        // [[2,1],[1,1]] has Perron root (3+sqrt(5))/2
        let rho = spectral_radius(&m2(2.0, 1.0, 1.0, 1.0));
        assert!((rho - (3.0 + 5.0_f64.sqrt()) / 2.0).abs() < 1e-14);
        // rotation by 90 degrees scaled by 2: complex pair, |lambda| = 2
        let rho = spectral_radius(&m2(0.0, 2.0, -2.0, 0.0));
        assert!((rho - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_radius_3x3_nonnegative() {
        let m = Mat::new(3, vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]).unwrap();
        // circulant-ish: rho = 2 (row sums all 2, Perron)
        assert!((spectral_radius(&m) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_matches_singular_value() {
        let m = m2(1.0, 2.0, 3.0, 4.0);
        let (s1, _) = singular_values_2x2(&m).unwrap();
        assert!((spectral_norm(&m) - s1).abs() < 1e-12);
    }

    #[test]
    fn scaled_products_track_plain_products_in_range() {
        let a = m2(2.0, 1.0, 1.0, 1.0);
        let b = m2(1.0, 1.0, 1.0, 2.0);
        let p = ScaledMat::identity(2).lmul(&a).lmul(&b); // B * A
        let plain = b.mul(&a);
        assert_eq!(p.log_scale, 0.0);
        assert_eq!(p.mat, plain);
    }

    #[test]
    fn rescaling_keeps_log_norm_consistent() {
        let a = m2(1e80, 0.0, 0.0, 1e80);
        let p = ScaledMat::identity(2).lmul(&a).lmul(&a).lmul(&a);
        // norm = 2 * 1e240
        let expect = (2.0_f64).ln() + 240.0 * (10.0_f64).ln();
        assert!((p.log_entry_sum() - expect).abs() < 1e-9);
    }

    #[test]
    fn log_abs_det_matches_closed_form() {
        let m = Mat::new(3, vec![2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((m.log_abs_det() - 24.0_f64.ln()).abs() < 1e-12);
    }
}
