//! The continuous piecewise-linear map
//!
//! ```text
//! f(x) = A_L x + b   if e1^T x <= 0
//!        A_R x + b   if e1^T x >= 0
//! ```
//!
//! with `A_R = A_L + ξ e1^T` so that both pieces agree on the switching
//! manifold `Σ = {e1^T x = 0}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Symbol, Word};

/// Default half-width of the "on Σ" band, relative to `max(1, ‖x‖∞)`.
pub const DEFAULT_TOL_SIGMA: f64 = 1e-9;

/// Default tolerance on columns `2..N` of `A_R - A_L`.
pub const DEFAULT_TOL_CONTINUITY: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PwlMap {
    a_l: DMatrix<f64>,
    a_r: DMatrix<f64>,
    b: DVector<f64>,
}

impl PwlMap {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a_l(&self) -> &DMatrix<f64> {
        &self.a_l
    }

    pub fn a_r(&self) -> &DMatrix<f64> {
        &self.a_r
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn matrix(&self, s: Symbol) -> &DMatrix<f64> {
        match s {
            Symbol::L => &self.a_l,
            Symbol::R => &self.a_r,
        }
    }

    /// `ξ`, the first column of `A_R - A_L`.
    pub fn xi(&self) -> DVector<f64> {
        self.a_r.column(0) - self.a_l.column(0)
    }

    /// `f(x)`. Points exactly on Σ use the L piece; both pieces agree there.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let s = if x[0] <= 0.0 { Symbol::L } else { Symbol::R };
        self.apply_symbol(s, x)
    }

    /// `f_s(x) = A_s x + b`, regardless of which side of Σ `x` is on.
    pub fn apply_symbol(&self, s: Symbol, x: &DVector<f64>) -> DVector<f64> {
        self.matrix(s) * x + &self.b
    }

    /// Iterates `x_{i+1} = f_{w_i}(x_i)` and checks the sign condition of
    /// each `x_i` against `w_i`.
    pub fn follows(&self, x0: &DVector<f64>, w: &Word, tol_sigma: f64) -> FollowOutcome {
        let mut x = x0.clone();
        let mut first_failure = None;
        let mut boundary_indices = Vec::new();
        for (i, &s) in w.symbols().iter().enumerate() {
            let side = classify(&x, tol_sigma).side;
            if side == Side::OnSigma {
                boundary_indices.push(i);
            } else if !side.admits(s) && first_failure.is_none() {
                first_failure = Some(i);
            }
            x = self.apply_symbol(s, &x);
        }
        FollowOutcome {
            first_failure,
            boundary_indices,
        }
    }
}

/// Builds a map, checking that `A_R - A_L` vanishes outside its first column.
pub fn make_map(
    a_l: DMatrix<f64>,
    a_r: DMatrix<f64>,
    b: DVector<f64>,
    tol_continuity: f64,
) -> Result<PwlMap> {
    let n = a_l.nrows();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: n,
        });
    }
    for (m, label) in [(&a_l, 0usize), (&a_r, 1)] {
        let _ = label;
        if m.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let diff = &a_r - &a_l;
    for j in 1..n {
        let magnitude = diff.column(j).amax();
        if magnitude > tol_continuity || magnitude.is_nan() {
            return Err(Error::Continuity {
                column: j + 1,
                magnitude,
            });
        }
    }
    Ok(PwlMap { a_l, a_r, b })
}

/// Coefficients of the three-dimensional border-collision normal form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcnfParams {
    #[serde(rename = "tauL")]
    pub tau_l: f64,
    #[serde(rename = "sigmaL")]
    pub sigma_l: f64,
    #[serde(rename = "deltaL")]
    pub delta_l: f64,
    #[serde(rename = "tauR")]
    pub tau_r: f64,
    #[serde(rename = "sigmaR")]
    pub sigma_r: f64,
    #[serde(rename = "deltaR")]
    pub delta_r: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
}

fn default_mu() -> f64 {
    1.0
}

fn companion(tau: f64, sigma: f64, delta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[tau, 1.0, 0.0, -sigma, 0.0, 1.0, delta, 0.0, 0.0])
}

/// The normal form with pieces `[[τ,1,0],[-σ,0,1],[δ,0,0]]` and `b = (μ,0,0)`.
pub fn bcnf3(p: &BcnfParams) -> PwlMap {
    PwlMap {
        a_l: companion(p.tau_l, p.sigma_l, p.delta_l),
        a_r: companion(p.tau_r, p.sigma_r, p.delta_r),
        b: DVector::from_vec(vec![p.mu, 0.0, 0.0]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    StrictL,
    StrictR,
    OnSigma,
}

impl Side {
    /// Whether a point on this side may carry symbol `s`.
    pub fn admits(self, s: Symbol) -> bool {
        matches!(
            (self, s),
            (Side::OnSigma, _) | (Side::StrictL, Symbol::L) | (Side::StrictR, Symbol::R)
        )
    }

    pub fn tag(self) -> &'static str {
        match self {
            Side::StrictL => "L",
            Side::StrictR => "R",
            Side::OnSigma => "S",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideClassification {
    pub side: Side,
    /// Absolute half-width of the band that was used.
    pub tol: f64,
}

/// Classifies `x` against a band of half-width `tol·max(1, ‖x‖∞)` about Σ.
pub fn classify(x: &DVector<f64>, tol: f64) -> SideClassification {
    let band = tol * x.amax().max(1.0);
    let e1 = x[0];
    let side = if e1 < -band {
        Side::StrictL
    } else if e1 > band {
        Side::StrictR
    } else {
        Side::OnSigma
    };
    SideClassification { side, tol: band }
}

/// `|e1^T x| / max(1, ‖x‖∞)`.
pub fn sigma_residual(x: &DVector<f64>) -> f64 {
    x[0].abs() / x.amax().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FollowOutcome {
    pub first_failure: Option<usize>,
    pub boundary_indices: Vec<usize>,
}

impl FollowOutcome {
    pub fn follows(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Map description read from JSON configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapConfig {
    Bcnf3(BcnfParams),
    Explicit {
        #[serde(rename = "AL")]
        a_l: Vec<Vec<f64>>,
        #[serde(rename = "AR")]
        a_r: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl MapConfig {
    pub fn to_map(&self) -> Result<PwlMap> {
        match self {
            MapConfig::Bcnf3(p) => Ok(bcnf3(p)),
            MapConfig::Explicit { a_l, a_r, b } => make_map(
                rows_to_matrix(a_l)?,
                rows_to_matrix(a_r)?,
                DVector::from_vec(b.clone()),
                DEFAULT_TOL_CONTINUITY,
            ),
        }
    }

    pub fn bcnf_params(&self) -> Option<BcnfParams> {
        match self {
            MapConfig::Bcnf3(p) => Some(*p),
            MapConfig::Explicit { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p9() -> BcnfParams {
        crate::presets::rllr_llr().params
    }

    fn p24() -> BcnfParams {
        crate::presets::rlrlrrlr_lrrlr().params
    }

    #[test]
    fn identical_pieces_give_zero_xi() {
        let i = DMatrix::<f64>::identity(3, 3);
        let f = make_map(i.clone(), i, DVector::zeros(3), 0.0).unwrap();
        assert_eq!(f.xi(), DVector::zeros(3));
    }

    #[test]
    fn first_column_difference_is_xi() {
        let a_l = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, -0.2, 0.0]);
        let mut a_r = a_l.clone();
        a_r[(0, 0)] = -1.5;
        a_r[(1, 0)] = 0.3;
        let f = make_map(a_l, a_r, DVector::from_vec(vec![1.0, 0.0]), 0.0).unwrap();
        assert_eq!(f.xi(), DVector::from_vec(vec![-2.0, 0.5]));
    }

    #[test]
    fn second_column_difference_is_rejected() {
        let a_l = DMatrix::<f64>::identity(3, 3);
        let mut a_r = a_l.clone();
        a_r[(2, 1)] = 1e-3;
        match make_map(a_l, a_r, DVector::zeros(3), 1e-12) {
            Err(Error::Continuity { column, magnitude }) => {
                assert_eq!(column, 2);
                assert_eq!(magnitude, 1e-3);
            }
            other => panic!("expected continuity error, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let a = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            make_map(a.clone(), DMatrix::identity(2, 2), DVector::zeros(3), 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            make_map(a.clone(), a.clone(), DVector::zeros(2), 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            make_map(
                DMatrix::identity(1, 1),
                DMatrix::identity(1, 1),
                DVector::zeros(1),
                0.0
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bcnf3_layout() {
        let f = bcnf3(&p9());
        assert_eq!(
            f.a_l().column(0).as_slice(),
            &[1.1770635074, -1.0, 0.4334058651]
        );
        assert_eq!(f.b().as_slice(), &[1.0, 0.0, 0.0]);

        let zero = BcnfParams {
            tau_l: 0.0,
            sigma_l: 0.0,
            delta_l: 0.0,
            tau_r: 0.0,
            sigma_r: 0.0,
            delta_r: 0.0,
            mu: 1.0,
        };
        let f = bcnf3(&zero);
        let shift = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.a_l(), &shift);
        assert_eq!(f.a_r(), &shift);
        assert_eq!(f.b().as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn bcnf3_param24_is_not_invertible_orientation() {
        let f = bcnf3(&p24());
        assert!(f.a_l().determinant() * f.a_r().determinant() < 0.0);
    }

    #[test]
    fn bcnf3_is_continuous_exactly() {
        let f = bcnf3(&p24());
        make_map(f.a_l().clone(), f.a_r().clone(), f.b().clone(), 0.0).unwrap();
    }

    #[test]
    fn apply_examples() {
        let f = bcnf3(&p9());
        assert_eq!(f.apply(&DVector::zeros(3)).as_slice(), &[1.0, 0.0, 0.0]);
        let x = DVector::from_vec(vec![-1.0, 0.0, 0.0]);
        let p = p9();
        assert_eq!(
            f.apply(&x).as_slice(),
            &[1.0 - p.tau_l, p.sigma_l, -p.delta_l]
        );
        let on = DVector::from_vec(vec![0.0, 0.7, -2.0]);
        assert_eq!(
            f.apply_symbol(Symbol::L, &on),
            f.apply_symbol(Symbol::R, &on)
        );
    }

    #[test]
    fn apply_symbol_forces_branch() {
        let f = bcnf3(&p9());
        let left = DVector::from_vec(vec![-0.3, 1.0, 2.0]);
        assert_eq!(f.apply_symbol(Symbol::L, &left), f.apply(&left));
        assert_eq!(f.apply_symbol(Symbol::R, &DVector::zeros(3)), f.b().clone());
        let right = DVector::from_vec(vec![0.3, 1.0, 2.0]);
        assert_ne!(f.apply_symbol(Symbol::L, &right), f.apply(&right));
    }

    #[test]
    fn follows_examples() {
        let f = bcnf3(&p9());
        let on = DVector::from_vec(vec![0.0, 1.0, 1.0]);
        let out = f.follows(&on, &"R".parse().unwrap(), DEFAULT_TOL_SIGMA);
        assert!(out.follows());
        assert_eq!(out.boundary_indices, vec![0]);

        let right = DVector::from_vec(vec![0.5, 0.0, 0.0]);
        let out = f.follows(&right, &"L".parse().unwrap(), DEFAULT_TOL_SIGMA);
        assert_eq!(out.first_failure, Some(0));
    }

    #[test]
    fn classify_band_scales_with_norm() {
        let x = DVector::from_vec(vec![5e-9, 100.0]);
        assert_eq!(classify(&x, 1e-10).side, Side::OnSigma);
        let x = DVector::from_vec(vec![5e-9, 1.0]);
        assert_eq!(classify(&x, 1e-10).side, Side::StrictR);
        assert_eq!(classify(&-x, 1e-10).side, Side::StrictL);
    }

    #[test]
    fn config_parsing() {
        let cfg: MapConfig = serde_json::from_str(
            r#"{"kind":"bcnf3","tauL":1.1770635074,"sigmaL":1,"deltaL":0.4334058651,
                "tauR":-1.0170722063,"sigmaR":0.5,"deltaR":1,"mu":1.0}"#,
        )
        .unwrap();
        assert_eq!(cfg.bcnf_params(), Some(p9()));

        let cfg: MapConfig = serde_json::from_str(
            r#"{"kind":"explicit","AL":[[0.5,1],[0.1,0]],"AR":[[-0.5,1],[0.3,0]],"b":[1,0]}"#,
        )
        .unwrap();
        let f = cfg.to_map().unwrap();
        assert_eq!(f.dim(), 2);
        assert!(cfg.bcnf_params().is_none());

        let bad: MapConfig = serde_json::from_str(
            r#"{"kind":"explicit","AL":[[0.5,1],[0.1,0]],"AR":[[-0.5,2],[0.3,0]],"b":[1,0]}"#,
        )
        .unwrap();
        assert!(matches!(
            bad.to_map(),
            Err(Error::Continuity { column: 2, .. })
        ));
    }
}
