//! Trajectory transforms: maps between a `t × m` trajectory and its
//! `T × M` spectrum.
//!
//! Three kinds are supported:
//!
//! * `haar` (default): single-level orthonormal pairwise Haar transform.
//!   `T = t/2`, `M = 2m`; row `k` holds `(a_k, d_k)` per channel with
//!   `a_k = (x_{2k} + x_{2k+1})/√2` and `d_k = (x_{2k} − x_{2k+1})/√2`.
//! * `dft`: unitary discrete Fourier transform, `T = t`, `M = 2m` with
//!   real/imag interleaved per channel. The inverse assumes the spectrum
//!   came from a real trajectory.
//! * `identity`: pass-through, `T = t`, `M = m`.
//!
//! Haar and dft are orthonormal, so spectral energy equals trajectory
//! energy (Parseval) and the inverse is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Which trajectory transform to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    #[default]
    Haar,
    Dft,
    Identity,
}

impl TransformKind {
    /// Spectrum shape `(T, M)` for a `t × m` trajectory.
    pub fn spectrum_shape(self, t: usize, m: usize) -> Result<(usize, usize)> {
        match self {
            TransformKind::Haar => {
                if t % 2 != 0 {
                    return Err(Error::Config(format!(
                        "haar transform needs an even number of steps, got {t}; pad or re-window"
                    )));
                }
                Ok((t / 2, 2 * m))
            }
            TransformKind::Dft => Ok((t, 2 * m)),
            TransformKind::Identity => Ok((t, m)),
        }
    }

    /// Trajectory length recovered from a spectrum row count.
    pub fn trajectory_len(self, spectrum_rows: usize) -> usize {
        match self {
            TransformKind::Haar => 2 * spectrum_rows,
            TransformKind::Dft | TransformKind::Identity => spectrum_rows,
        }
    }
}

/// Transform-domain representation of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpectrum {
    pub coeffs: Tensor,
    pub kind: TransformKind,
}

/// Apply transform `kind` to a `t × m` trajectory.
pub fn forward(trajectory: &Tensor, kind: TransformKind) -> Result<TrajectorySpectrum> {
    if trajectory.shape().len() != 2 {
        return Err(Error::shape("spectrum::forward", trajectory.shape(), &[]));
    }
    let (t, m) = (trajectory.rows(), trajectory.cols());
    let (rows, cols) = kind.spectrum_shape(t, m)?;
    let coeffs = match kind {
        TransformKind::Identity => trajectory.clone(),
        TransformKind::Haar => {
            let mut data = vec![0.0; rows * cols];
            for k in 0..rows {
                for c in 0..m {
                    let lo = trajectory.at(2 * k, c);
                    let hi = trajectory.at(2 * k + 1, c);
                    data[k * cols + 2 * c] = (lo + hi) / SQRT2;
                    data[k * cols + 2 * c + 1] = (lo - hi) / SQRT2;
                }
            }
            Tensor::new(vec![rows, cols], data)?
        }
        TransformKind::Dft => {
            let scale = 1.0 / (t as f64).sqrt();
            let mut data = vec![0.0; rows * cols];
            for k in 0..t {
                for c in 0..m {
                    let (mut re, mut im) = (0.0, 0.0);
                    for n in 0..t {
                        let phi = -2.0 * std::f64::consts::PI * (k * n) as f64 / t as f64;
                        let x = trajectory.at(n, c);
                        re += x * phi.cos();
                        im += x * phi.sin();
                    }
                    data[k * cols + 2 * c] = re * scale;
                    data[k * cols + 2 * c + 1] = im * scale;
                }
            }
            Tensor::new(vec![rows, cols], data)?
        }
    };
    Ok(TrajectorySpectrum { coeffs, kind })
}

/// Invert a spectrum back to a trajectory.
pub fn inverse(spectrum: &TrajectorySpectrum) -> Result<Tensor> {
    inverse_coeffs(&spectrum.coeffs, spectrum.kind)
}

/// Inverse on a raw coefficient matrix (shared with the autodiff op).
pub fn inverse_coeffs(coeffs: &Tensor, kind: TransformKind) -> Result<Tensor> {
    if coeffs.shape().len() != 2 {
        return Err(Error::shape("spectrum::inverse", coeffs.shape(), &[]));
    }
    let (rows, cols) = (coeffs.rows(), coeffs.cols());
    match kind {
        TransformKind::Identity => Ok(coeffs.clone()),
        TransformKind::Haar => {
            if cols % 2 != 0 {
                return Err(Error::shape("haar inverse", coeffs.shape(), &[rows, 2]));
            }
            let m = cols / 2;
            let t = 2 * rows;
            let mut data = vec![0.0; t * m];
            for k in 0..rows {
                for c in 0..m {
                    let a = coeffs.at(k, 2 * c);
                    let d = coeffs.at(k, 2 * c + 1);
                    data[(2 * k) * m + c] = (a + d) / SQRT2;
                    data[(2 * k + 1) * m + c] = (a - d) / SQRT2;
                }
            }
            Tensor::new(vec![t, m], data)
        }
        TransformKind::Dft => {
            if cols % 2 != 0 {
                return Err(Error::shape("dft inverse", coeffs.shape(), &[rows, 2]));
            }
            let m = cols / 2;
            let t = rows;
            let scale = 1.0 / (t as f64).sqrt();
            let mut data = vec![0.0; t * m];
            for n in 0..t {
                for c in 0..m {
                    let mut acc = 0.0;
                    for k in 0..t {
                        let phi = 2.0 * std::f64::consts::PI * (k * n) as f64 / t as f64;
                        let re = coeffs.at(k, 2 * c);
                        let im = coeffs.at(k, 2 * c + 1);
                        acc += re * phi.cos() - im * phi.sin();
                    }
                    data[n * m + c] = acc * scale;
                }
            }
            Tensor::new(vec![t, m], data)
        }
    }
}

/// Adjoint of [`inverse_coeffs`] for reverse-mode differentiation: maps a
/// gradient w.r.t. the trajectory back to a gradient w.r.t. the spectrum.
///
/// Haar is orthonormal so the adjoint of its inverse is its forward map;
/// identity is itself; for dft the adjoint follows from the cos/sin
/// expansion used in `inverse_coeffs`.
pub(crate) fn inverse_adjoint(
    grad_traj: &Tensor,
    kind: TransformKind,
    spectrum_shape: &[usize],
) -> Tensor {
    match kind {
        TransformKind::Identity => grad_traj.clone(),
        TransformKind::Haar => {
            forward(grad_traj, TransformKind::Haar)
                .expect("haar adjoint on even-length gradient")
                .coeffs
        }
        TransformKind::Dft => {
            let (rows, cols) = (spectrum_shape[0], spectrum_shape[1]);
            let m = cols / 2;
            let t = rows;
            let scale = 1.0 / (t as f64).sqrt();
            let mut data = vec![0.0; rows * cols];
            for k in 0..t {
                for c in 0..m {
                    let (mut dre, mut dim) = (0.0, 0.0);
                    for n in 0..t {
                        let phi = 2.0 * std::f64::consts::PI * (k * n) as f64 / t as f64;
                        let g = grad_traj.at(n, c);
                        dre += g * phi.cos();
                        dim -= g * phi.sin();
                    }
                    data[k * cols + 2 * c] = dre * scale;
                    data[k * cols + 2 * c + 1] = dim * scale;
                }
            }
            Tensor::new(vec![rows, cols], data).expect("dft adjoint shape")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(rows: &[[f64; 2]]) -> Tensor {
        Tensor::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn haar_constant_channel() {
        // constant channel c: a_k = c√2, d_k = 0
        let x = traj(&[[3.0, -1.0]; 8]);
        let s = forward(&x, TransformKind::Haar).unwrap();
        assert_eq!(s.coeffs.shape(), &[4, 4]);
        for k in 0..4 {
            assert!((s.coeffs.at(k, 0) - 3.0 * SQRT2).abs() < 1e-12);
            assert!(s.coeffs.at(k, 1).abs() < 1e-12);
            assert!((s.coeffs.at(k, 2) + SQRT2).abs() < 1e-12);
            assert!(s.coeffs.at(k, 3).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_first_pair_matches_2x2_matrix_oracle() {
        // channel (1, 3, ...): a_0 = 4/√2, d_0 = −2/√2
        let x = traj(&[[1.0, 0.0], [3.0, 0.0], [5.0, 0.0], [7.0, 0.0]]);
        let s = forward(&x, TransformKind::Haar).unwrap();
        assert!((s.coeffs.at(0, 0) - 4.0 / SQRT2).abs() < 1e-12);
        assert!((s.coeffs.at(0, 1) + 2.0 / SQRT2).abs() < 1e-12);

        // independent oracle: [a; d] = H [x0; x1] with H = [[1,1],[1,-1]]/√2
        for k in 0..2 {
            let (x0, x1) = (x.at(2 * k, 0), x.at(2 * k + 1, 0));
            let a = (x0 + x1) / SQRT2;
            let d = (x0 - x1) / SQRT2;
            assert_eq!(s.coeffs.at(k, 0), a);
            assert_eq!(s.coeffs.at(k, 1), d);
        }
    }

    #[test]
    fn identity_is_passthrough() {
        let x = traj(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]);
        let s = forward(&x, TransformKind::Identity).unwrap();
        assert_eq!(s.coeffs, x);
        assert_eq!(inverse(&s).unwrap(), x);
    }

    #[test]
    fn haar_rejects_odd_length() {
        let x = traj(&[[0.0, 0.0]; 7]);
        let err = forward(&x, TransformKind::Haar).unwrap_err();
        assert!(err.to_string().contains("pad or re-window"));
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        for kind in [TransformKind::Haar, TransformKind::Dft, TransformKind::Identity] {
            let (rows, cols) = kind.spectrum_shape(8, 2).unwrap();
            let s = TrajectorySpectrum {
                coeffs: Tensor::zeros(&[rows, cols]),
                kind,
            };
            let x = inverse(&s).unwrap();
            assert_eq!(x, Tensor::zeros(&[8, 2]));
        }
    }

    #[test]
    fn parseval_by_direct_summation() {
        let mut seed = 7u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as f64 / (1u64 << 31) as f64) * 4.0 - 2.0
        };
        let x = Tensor::from_fn(&[8, 2], |_| next());
        for kind in [TransformKind::Haar, TransformKind::Dft] {
            let s = forward(&x, kind).unwrap();
            let back = inverse(&s).unwrap();
            assert!((s.coeffs.sq_norm() - x.sq_norm()).abs() < 1e-9, "{kind:?}");
            assert!((s.coeffs.sq_norm() - back.sq_norm()).abs() < 1e-9, "{kind:?}");
            assert!(back.max_abs_diff(&x) < 1e-9, "{kind:?}");
        }
    }
}
