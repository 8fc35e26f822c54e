//! The homoclinic `S`-orbit with itinerary `X^∞ Y X^∞`, the branch of the
//! unstable manifold it traces out, and the subsumed-connection checks.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, FrameError, Result};
use crate::format::float_fields;
use crate::map::{classify, sigma_residual, PwlMap, Side, SideClassification};
use crate::spectral::{ser_vec, u_project, SpectralFrame};
use crate::symbolic::{
    concat_flip_alpha, homoclinic_window, reinjection_offset, SymbolWindow, Word,
};

/// "On Σ" band used when verifying the connection.
pub const HOMOCLINIC_TOL_SIGMA: f64 = 1e-6;

/// Target size of the backward tail, relative to `max(1, ‖x0‖∞)`.
pub const BACKWARD_FLOOR: f64 = 1e-12;

/// Target size of the forward transient, relative to `max(1, ‖x0‖∞)`.
pub const FORWARD_FLOOR: f64 = 1e-6;

pub const MIN_RETURNS: usize = 2;
pub const MAX_RETURNS: usize = 30;
const MAX_BACKWARD: usize = 400;

/// Consecutive growing returns that mark an orbit as escaping.
pub const DIVERGENCE_RUN: usize = 5;

/// `y0 = E^u(x0) ∩ Σ` and its coordinate `a0` along `ζ1`.
pub fn unstable_intersection(
    frame: &SpectralFrame,
    x0: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    if frame.e1_zeta1.abs() <= f64::EPSILON {
        return Err(FrameError::Transversality {
            value: frame.e1_zeta1,
        }
        .into());
    }
    let a0 = -x0[0] / frame.e1_zeta1;
    let mut y0 = x0 + &frame.zeta1 * a0;
    y0[0] = 0.0;
    Ok((y0, a0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitOptions {
    /// Number of `n`-blocks in the backward tail; adaptive when `None`.
    pub j_back: Option<usize>,
    /// Number of forward steps from `y0`; adaptive when `None`.
    pub steps_fwd: Option<usize>,
    pub tol_sigma: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            j_back: None,
            steps_fwd: None,
            tol_sigma: HOMOCLINIC_TOL_SIGMA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Divergence {
    pub step: i64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomoclinicOrbit {
    pub x: Word,
    pub y: Word,
    pub alpha: usize,
    pub d: usize,
    pub a0: f64,
    pub x0: DVector<f64>,
    pub window: SymbolWindow,
    pub points: Vec<DVector<f64>>,
    pub classifications: Vec<SideClassification>,
    pub admissible: bool,
    pub first_inadmissible: Option<i64>,
    pub boundary_hits: Vec<i64>,
    pub divergence: Option<Divergence>,
}

impl HomoclinicOrbit {
    pub fn i_lo(&self) -> i64 {
        self.window.i_lo()
    }

    pub fn i_hi(&self) -> i64 {
        self.window.i_hi()
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn p(&self) -> usize {
        self.y.len()
    }

    pub fn point(&self, i: i64) -> Option<&DVector<f64>> {
        if i < self.i_lo() || i > self.i_hi() {
            return None;
        }
        self.points.get((i - self.i_lo()) as usize)
    }

    pub fn side(&self, i: i64) -> Option<Side> {
        if i < self.i_lo() || i > self.i_hi() {
            return None;
        }
        Some(self.classifications[(i - self.i_lo()) as usize].side)
    }

    /// Indices `p + jn`, `j ≥ 0`, inside the window.
    pub fn return_indices(&self) -> impl Iterator<Item = i64> + '_ {
        let (p, n) = (self.p() as i64, self.n() as i64);
        (0..)
            .map(move |j| p + j * n)
            .take_while(move |&i| i <= self.i_hi())
    }

    /// Fails with the divergence diagnostic if the forward orbit escaped.
    pub fn check_homoclinic(&self) -> Result<()> {
        match self.divergence {
            Some(div) => Err(Error::NotHomoclinic {
                step: div.step,
                distance: div.distance,
            }),
            None => Ok(()),
        }
    }

    /// `ω1`-projections of the returns `y_{p+jn}`, scaled by `max(1, ‖y‖∞)`.
    pub fn containment(&self, frame: &SpectralFrame) -> Vec<(i64, f64)> {
        self.return_indices()
            .map(|i| {
                let y = self.point(i).expect("index in window");
                let (a, _) = u_project(frame, &self.x0, y);
                (i, a.abs() / y.amax().max(1.0))
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let dim = self.x0.len();
        let mut out = String::from("index,symbol,side");
        for k in 1..=dim {
            out.push_str(&format!(",x_{k}"));
        }
        out.push('\n');
        for (offset, y) in self.points.iter().enumerate() {
            let i = self.i_lo() + offset as i64;
            let symbol = self.window.get(i).expect("index in window");
            out.push_str(&format!(
                "{i},{symbol},{},{}\n",
                self.classifications[offset].side.tag(),
                float_fields(y.as_slice())
            ));
        }
        out
    }
}

fn adaptive_backward(frame: &SpectralFrame, a0: f64, scale: f64) -> usize {
    let mut j = MIN_RETURNS;
    while j < MAX_BACKWARD && a0.abs() * frame.lambda1.powi(-(j as i32)) >= BACKWARD_FLOOR * scale {
        j += 1;
    }
    j
}

fn adaptive_forward(frame: &SpectralFrame, x0: &DVector<f64>, yp: &DVector<f64>) -> usize {
    let scale = x0.amax().max(1.0);
    let (a, s) = u_project(frame, x0, yp);
    let rest = (yp - x0 - &frame.zeta1 * a - &frame.zeta2 * s).amax();
    (MIN_RETURNS..=MAX_RETURNS)
        .find(|&j| {
            s.abs() * frame.lambda2.powi(j as i32) + rest * frame.beta.powi(j as i32)
                <= FORWARD_FLOOR * scale
        })
        .unwrap_or(MAX_RETURNS)
}

/// Builds `{y_i}`: an analytic tail `y_{jn} = x0 + a0 λ1^j ζ1` for `j ≤ 0`,
/// then forced-branch iteration along `S` from `y0`.
pub fn build_s_orbit(
    f: &PwlMap,
    x: &Word,
    y: &Word,
    frame: &SpectralFrame,
    x0: &DVector<f64>,
    opts: &OrbitOptions,
) -> Result<HomoclinicOrbit> {
    let alpha = concat_flip_alpha(x, y)?.ok_or(Error::NoFlipIdentity)?;
    let (n, p) = (x.len(), y.len());
    let d = reinjection_offset(n, p);
    let (y0, a0) = unstable_intersection(frame, x0)?;
    let scale = x0.amax().max(1.0);
    let j_back = opts
        .j_back
        .unwrap_or_else(|| adaptive_backward(frame, a0, scale));
    let i_lo = -((j_back * n) as i64);

    let mut points = Vec::new();
    for j in -(j_back as i64)..0 {
        let mut yi = x0 + &frame.zeta1 * (a0 * frame.lambda1.powi(j as i32));
        for k in 0..n {
            let next = f.apply_symbol(x.symbols()[k], &yi);
            points.push(yi);
            yi = next;
        }
    }
    points.push(y0.clone());

    let mut yi = y0;
    for &s in y.symbols() {
        yi = f.apply_symbol(s, &yi);
    }
    let steps_fwd = opts
        .steps_fwd
        .unwrap_or_else(|| p + n * adaptive_forward(frame, x0, &yi));

    let forward = homoclinic_window(x, y, 0, steps_fwd as i64)?;
    let mut yi = points.last().expect("y0 pushed").clone();
    let mut divergence = None;
    let mut first_distance = None;
    let mut last_distance = f64::INFINITY;
    let mut growing = 0;
    for i in 0..steps_fwd as i64 {
        let s = forward.get(i).expect("index in window");
        yi = f.apply_symbol(s, &yi);
        let idx = i + 1;
        points.push(yi.clone());
        if idx >= p as i64 && (idx - p as i64) % n as i64 == 0 {
            let distance = (&yi - x0).amax();
            let initial = *first_distance.get_or_insert(distance);
            growing = if distance > last_distance {
                growing + 1
            } else {
                0
            };
            last_distance = distance;
            if (growing >= DIVERGENCE_RUN && distance > initial) || !distance.is_finite() {
                divergence = Some(Divergence {
                    step: idx,
                    distance,
                });
                break;
            }
        }
    }

    let i_hi = i_lo + points.len() as i64 - 1;
    let window = homoclinic_window(x, y, i_lo, i_hi)?;
    let classifications: Vec<SideClassification> = points
        .iter()
        .map(|pt| classify(pt, opts.tol_sigma))
        .collect();
    let mut first_inadmissible = None;
    let mut boundary_hits = Vec::new();
    for (offset, class) in classifications.iter().enumerate() {
        let i = i_lo + offset as i64;
        if class.side == Side::OnSigma {
            boundary_hits.push(i);
        } else if !class.side.admits(window.get(i).expect("index in window"))
            && first_inadmissible.is_none()
        {
            first_inadmissible = Some(i);
        }
    }
    Ok(HomoclinicOrbit {
        x: x.clone(),
        y: y.clone(),
        alpha,
        d,
        a0,
        x0: x0.clone(),
        window,
        points,
        classifications,
        admissible: first_inadmissible.is_none(),
        first_inadmissible,
        boundary_hits,
        divergence,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub i: i64,
    #[serde(serialize_with = "ser_vec")]
    pub start: DVector<f64>,
    #[serde(serialize_with = "ser_vec")]
    pub end: DVector<f64>,
}

/// The windowed branch `⋃ L[y_i, y_{i+n}]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifoldBranch {
    pub n: usize,
    pub segments: Vec<Segment>,
}

impl ManifoldBranch {
    pub fn segment(&self, i: i64) -> Option<&Segment> {
        let first = self.segments.first()?.i;
        self.segments.get(usize::try_from(i - first).ok()?)
    }

    pub fn to_csv(&self) -> String {
        let dim = self.segments.first().map_or(0, |s| s.start.len());
        let mut out = String::from("i");
        for k in 1..=dim {
            out.push_str(&format!(",start_{k}"));
        }
        for k in 1..=dim {
            out.push_str(&format!(",end_{k}"));
        }
        out.push('\n');
        for s in &self.segments {
            out.push_str(&format!(
                "{},{},{}\n",
                s.i,
                float_fields(s.start.as_slice()),
                float_fields(s.end.as_slice())
            ));
        }
        out
    }

    /// Largest endpoint mismatch between `f` applied to segment `i - 1` and
    /// segment `i`, relative to `max(1, ‖·‖∞)`.
    pub fn mapping_residual(&self, f: &PwlMap) -> f64 {
        self.segments
            .windows(2)
            .map(|w| {
                let a = (f.apply(&w[0].start) - &w[1].start).amax() / w[1].start.amax().max(1.0);
                let b = (f.apply(&w[0].end) - &w[1].end).amax() / w[1].end.amax().max(1.0);
                a.max(b)
            })
            .fold(0.0, f64::max)
    }
}

pub fn branch_segments(orbit: &HomoclinicOrbit) -> Result<ManifoldBranch> {
    let n = orbit.n();
    let have = orbit.points.len();
    if have < 2 * n + 1 {
        return Err(Error::WindowTooShort {
            needed: 2 * n + 1,
            have,
        });
    }
    let segments = (0..have - n)
        .map(|k| Segment {
            i: orbit.i_lo() + k as i64,
            start: orbit.points[k].clone(),
            end: orbit.points[k + n].clone(),
        })
        .collect();
    Ok(ManifoldBranch { n, segments })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsumedReport {
    pub y0_residual: f64,
    pub y0_on_sigma: bool,
    pub alpha: usize,
    pub y_alpha_residual: f64,
    pub y_alpha_on_sigma: bool,
    pub admissible: bool,
    pub first_inadmissible: Option<i64>,
    pub horizon: i64,
    pub double_hits: Vec<i64>,
    /// Smallest `max(r_i, r_{i+n})` over the horizon, `r` the scaled Σ residual.
    pub double_hit_margin: f64,
    pub boundary_hits: Vec<i64>,
    pub expected_hits: Vec<i64>,
    pub hits_match: bool,
    pub divergence: Option<Divergence>,
    pub tol_sigma: f64,
}

impl SubsumedReport {
    pub fn on_sigma_ok(&self) -> bool {
        self.y0_on_sigma && self.y_alpha_on_sigma
    }

    pub fn no_double_hits(&self) -> bool {
        self.double_hits.is_empty()
    }

    pub fn passes(&self) -> bool {
        self.on_sigma_ok()
            && self.admissible
            && self.no_double_hits()
            && self.hits_match
            && self.divergence.is_none()
    }
}

/// Checks `y0, y_α ∈ Σ`, admissibility, that no `i ≥ 0` has both `y_i` and
/// `y_{i+n}` on Σ, and that the only crossings are at `{0, α}`.
pub fn verify_subsumed(
    orbit: &HomoclinicOrbit,
    horizon: Option<i64>,
    tol_sigma: f64,
) -> SubsumedReport {
    let n = orbit.n() as i64;
    let horizon = horizon.unwrap_or(orbit.i_hi() - n).min(orbit.i_hi() - n);
    let residual = |i: i64| orbit.point(i).map_or(f64::INFINITY, sigma_residual);
    let on_sigma = |i: i64| {
        orbit
            .point(i)
            .is_some_and(|y| classify(y, tol_sigma).side == Side::OnSigma)
    };
    let alpha = orbit.alpha as i64;

    let mut double_hits = Vec::new();
    let mut double_hit_margin = f64::INFINITY;
    for i in 0..=horizon {
        if on_sigma(i) && on_sigma(i + n) {
            double_hits.push(i);
        }
        double_hit_margin = double_hit_margin.min(residual(i).max(residual(i + n)));
    }

    let mut first_inadmissible = None;
    let mut boundary_hits = Vec::new();
    for (offset, y) in orbit.points.iter().enumerate() {
        let i = orbit.i_lo() + offset as i64;
        let side = classify(y, tol_sigma).side;
        if side == Side::OnSigma {
            boundary_hits.push(i);
        } else if !side.admits(orbit.window.get(i).expect("index in window"))
            && first_inadmissible.is_none()
        {
            first_inadmissible = Some(i);
        }
    }
    let expected_hits = vec![0, alpha];
    SubsumedReport {
        y0_residual: residual(0),
        y0_on_sigma: on_sigma(0),
        alpha: orbit.alpha,
        y_alpha_residual: residual(alpha),
        y_alpha_on_sigma: on_sigma(alpha),
        admissible: first_inadmissible.is_none(),
        first_inadmissible,
        horizon,
        double_hits,
        double_hit_margin,
        hits_match: boundary_hits == expected_hits,
        boundary_hits,
        expected_hits,
        divergence: orbit.divergence,
        tol_sigma,
    }
}
