//! The eigen-frame of a saddle cycle's `M_X` and the scalars obtained by
//! projecting `f_Y` onto it.
//!
//! With `λ1 > 1 > λ2 > β ≥ 0`, right eigenvectors `ζ1, ζ2` and left
//! eigenvectors `ω1, ω2` scaled so that `ω_i^T ζ_i = 1`:
//!
//! ```text
//! γ_ij = ω_i^T M_Y ζ_j
//! ψ_i  = ω_i^T (P_Y b - (I - M_Y) x0)
//! c    = γ11 γ22 - γ12 γ21
//! ```

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cycle::compose;
use crate::eigen;
use crate::error::{FrameError, Result};
use crate::map::PwlMap;
use crate::symbolic::Word;

/// Default tolerance for ordering and transversality checks.
pub const DEFAULT_FRAME_TOL: f64 = 1e-9;

/// Relative imaginary part below which an eigenvalue counts as real.
pub const REAL_TOL: f64 = 1e-9;

/// Minimum gap to the rest of the spectrum, relative to the spectral radius.
pub const SIMPLE_GAP: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralFrame {
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
    #[serde(serialize_with = "ser_vec")]
    pub zeta1: DVector<f64>,
    #[serde(serialize_with = "ser_vec")]
    pub zeta2: DVector<f64>,
    #[serde(serialize_with = "ser_vec")]
    pub omega1: DVector<f64>,
    #[serde(serialize_with = "ser_vec")]
    pub omega2: DVector<f64>,
    pub e1_zeta1: f64,
}

pub(crate) fn ser_vec<S: serde::Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

fn is_real(z: &nalgebra::Complex<f64>) -> bool {
    z.im.abs() <= REAL_TOL * (1.0 + z.norm())
}

/// Identifies `λ1, λ2, β` in the spectrum of `m` and normalises the
/// eigenvector quadruple.
pub fn build_frame(m: &DMatrix<f64>, tol: f64) -> Result<SpectralFrame, crate::Error> {
    let values = eigen::eigenvalues(m)?;
    if values.len() < 2 {
        return Err(FrameError::TooSmall.into());
    }
    for (index, z) in values.iter().take(2).enumerate() {
        if !is_real(z) {
            return Err(FrameError::ComplexLeading {
                index: index + 1,
                imag: z.im,
            }
            .into());
        }
    }
    let lambda1 = values[0].re;
    let lambda2 = values[1].re;
    let beta = values.get(2).map_or(0.0, |z| z.norm());

    let ordering = |condition: &'static str, detail: String| -> crate::Error {
        FrameError::Ordering { condition, detail }.into()
    };
    if lambda1 <= 1.0 + tol {
        return Err(ordering("1 < λ1", format!("λ1 = {lambda1}")));
    }
    if lambda2 >= 1.0 - tol {
        return Err(ordering("λ2 < 1", format!("λ2 = {lambda2}")));
    }
    if lambda2 <= beta + tol {
        return Err(ordering("β < λ2", format!("λ2 = {lambda2}, β = {beta}")));
    }

    let radius = eigen::spectral_radius(&values);
    for (i, &lambda) in [lambda1, lambda2].iter().enumerate() {
        let gap = values
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, z)| (z - nalgebra::Complex::new(lambda, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        if gap < SIMPLE_GAP * radius {
            return Err(FrameError::NotSimple { value: lambda, gap }.into());
        }
    }

    let zeta1 = eigen::right_eigenvector(m, lambda1)?;
    let zeta2 = eigen::right_eigenvector(m, lambda2)?;
    let omega1 = eigen::left_eigenvector(m, lambda1)?;
    let omega2 = eigen::left_eigenvector(m, lambda2)?;
    Ok(SpectralFrame::from_eigenvectors(
        lambda1, lambda2, beta, zeta1, zeta2, omega1, omega2, tol,
    )?)
}

impl SpectralFrame {
    /// Normalises arbitrarily scaled eigenvectors: `‖ζ_i‖₂ = 1`,
    /// `e1^T ζ1 > 0`, the largest component of `ζ2` positive, and
    /// `ω_i^T ζ_i = 1`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_eigenvectors(
        lambda1: f64,
        lambda2: f64,
        beta: f64,
        zeta1: DVector<f64>,
        zeta2: DVector<f64>,
        omega1: DVector<f64>,
        omega2: DVector<f64>,
        tol: f64,
    ) -> Result<SpectralFrame, FrameError> {
        let unit = |v: DVector<f64>, value: f64| {
            let norm = v.norm();
            if norm > 0.0 && norm.is_finite() {
                Ok(v / norm)
            } else {
                Err(FrameError::Normalisation { value })
            }
        };
        let mut zeta1 = unit(zeta1, lambda1)?;
        if zeta1[0].abs() <= tol {
            return Err(FrameError::Transversality { value: zeta1[0] });
        }
        if zeta1[0] < 0.0 {
            zeta1 = -zeta1;
        }
        let mut zeta2 = unit(zeta2, lambda2)?;
        let lead = zeta2
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if lead < 0.0 {
            zeta2 = -zeta2;
        }
        let dual = |omega: DVector<f64>, zeta: &DVector<f64>, value: f64| {
            let omega = unit(omega, value)?;
            let p = omega.dot(zeta);
            if p.abs() <= f64::EPSILON {
                return Err(FrameError::Normalisation { value });
            }
            Ok(omega / p)
        };
        let omega1 = dual(omega1, &zeta1, lambda1)?;
        let omega2 = dual(omega2, &zeta2, lambda2)?;
        Ok(SpectralFrame {
            lambda1,
            lambda2,
            beta,
            e1_zeta1: zeta1[0],
            zeta1,
            zeta2,
            omega1,
            omega2,
        })
    }
}

/// `(ω1^T (x - x0), ω2^T (x - x0))`.
pub fn u_project(frame: &SpectralFrame, x0: &DVector<f64>, x: &DVector<f64>) -> (f64, f64) {
    let d = x - x0;
    (frame.omega1.dot(&d), frame.omega2.dot(&d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectedQuantities {
    pub c: f64,
    pub gamma11: f64,
    pub gamma12: f64,
    pub gamma21: f64,
    pub psi1: f64,
    pub psi2: f64,
}

/// Projects `f_Y` onto the frame at the `X`-cycle point `x0`.
pub fn projected_quantities(
    frame: &SpectralFrame,
    f: &PwlMap,
    y: &Word,
    x0: &DVector<f64>,
) -> ProjectedQuantities {
    let comp = compose(f, y);
    let gamma = |i: &DVector<f64>, j: &DVector<f64>| i.dot(&(&comp.m * j));
    let gamma11 = gamma(&frame.omega1, &frame.zeta1);
    let gamma12 = gamma(&frame.omega1, &frame.zeta2);
    let gamma21 = gamma(&frame.omega2, &frame.zeta1);
    let gamma22 = gamma(&frame.omega2, &frame.zeta2);
    let n = x0.len();
    let v = &comp.p * f.b() - (DMatrix::<f64>::identity(n, n) - &comp.m) * x0;
    ProjectedQuantities {
        c: gamma11 * gamma22 - gamma12 * gamma21,
        gamma11,
        gamma12,
        gamma21,
        psi1: frame.omega1.dot(&v),
        psi2: frame.omega2.dot(&v),
    }
}

/// `|ψ2 + a0 (λ1 - λ2) γ21 / (1 - λ2)| / max(1, |ψ2|)`.
pub fn psi2_identity_residual(frame: &SpectralFrame, q: &ProjectedQuantities, a0: f64) -> f64 {
    let predicted = -a0 * (frame.lambda1 - frame.lambda2) * q.gamma21 / (1.0 - frame.lambda2);
    (q.psi2 - predicted).abs() / q.psi2.abs().max(1.0)
}

/// `(λ1 + 1) c / (1 + c)`; admissibility of the `X^kY`-cycles needs it in `(1, λ1)`.
pub fn band_value(frame: &SpectralFrame, c: f64) -> f64 {
    (frame.lambda1 + 1.0) * c / (1.0 + c)
}
