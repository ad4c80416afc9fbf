//! Dense complex least squares via Householder QR.
//!
//! Problem sizes here are small (hundreds of rows, at most a few dozen
//! columns), so an explicit QR with back-substitution is plenty. Rank
//! deficiency is detected from the ratio of the diagonal of R, with the
//! 1e-12 relative cutoff used throughout the toolkit.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::SpliceError;
use crate::numeric::Real;

/// Relative cutoff below which a pivot is treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Solution of `min ||A x - b||` together with a condition-number estimate
/// (ratio of the largest to smallest |R_ii| of the QR factor).
pub struct Lstsq<F: Real> {
    pub solution: Array1<Complex<F>>,
    pub cond_estimate: F,
}

/// Least-squares solve of an overdetermined complex system.
pub fn lstsq<F: Real>(
    a: &Array2<Complex<F>>,
    b: &Array1<Complex<F>>,
) -> Result<Lstsq<F>, SpliceError> {
    let (m, n) = a.dim();
    if b.len() != m {
        return Err(SpliceError::LengthMismatch {
            expected: m,
            actual: b.len(),
        });
    }
    if n == 0 || m < n {
        return Err(SpliceError::RankDeficient { index: 0 });
    }

    let mut r = a.clone();
    let mut y = b.clone();
    let zero = F::zero();

    // Householder triangularization, applied to the right-hand side as well.
    for k in 0..n {
        let col_norm = {
            let mut s = zero;
            for i in k..m {
                s += r[[i, k]].norm_sqr();
            }
            s.sqrt()
        };
        if col_norm == zero {
            continue; // column already zero; caught by the rank check below
        }
        let x0 = r[[k, k]];
        let phase = if x0.norm() == zero {
            Complex::new(F::one(), zero)
        } else {
            x0 / Complex::new(x0.norm(), zero)
        };
        let alpha = -phase * Complex::new(col_norm, zero);

        // v = x - alpha e1, normalized so the reflector is I - tau v v^H
        let mut v: Vec<Complex<F>> = (k..m).map(|i| r[[i, k]]).collect();
        v[0] -= alpha;
        let v_norm_sqr: F = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sqr == zero {
            continue;
        }
        let tau = F::of(2.0) / v_norm_sqr;

        for j in k..n {
            let mut dot = Complex::new(zero, zero);
            for (off, vi) in v.iter().enumerate() {
                dot += vi.conj() * r[[k + off, j]];
            }
            let scale = dot * Complex::new(tau, zero);
            for (off, vi) in v.iter().enumerate() {
                r[[k + off, j]] -= *vi * scale;
            }
        }
        let mut dot = Complex::new(zero, zero);
        for (off, vi) in v.iter().enumerate() {
            dot += vi.conj() * y[k + off];
        }
        let scale = dot * Complex::new(tau, zero);
        for (off, vi) in v.iter().enumerate() {
            y[k + off] -= *vi * scale;
        }
    }

    let diag: Vec<F> = (0..n).map(|k| r[[k, k]].norm()).collect();
    let dmax = diag.iter().cloned().fold(zero, F::max);
    let cutoff = dmax * F::of(RANK_CUTOFF);
    for (k, d) in diag.iter().enumerate() {
        if *d <= cutoff {
            return Err(SpliceError::RankDeficient { index: k });
        }
    }
    let dmin = diag.iter().cloned().fold(F::infinity(), F::min);

    // Back substitution on the triangular system R x = Q^H b.
    let mut x = Array1::from_elem(n, Complex::new(zero, zero));
    for k in (0..n).rev() {
        let mut acc = y[k];
        for j in k + 1..n {
            acc -= r[[k, j]] * x[j];
        }
        x[k] = acc / r[[k, k]];
    }

    Ok(Lstsq {
        solution: x,
        cond_estimate: dmax / dmin,
    })
}
