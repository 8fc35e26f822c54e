//! Damped Newton for `γ11 = 0, ψ1 = 0, λ1 λ2 = 1` over `(τ_L, τ_R, δ_L)` of
//! the three-dimensional normal form, plus the hypothesis verifier used to
//! certify a solved point.

use nalgebra::{DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::cycle::{compose, find_cycle, fixed_point, xky_cycle, Cycle};
use crate::error::{Error, Result};
use crate::homoclinic::{
    branch_segments, build_s_orbit, verify_subsumed, OrbitOptions, SubsumedReport,
    HOMOCLINIC_TOL_SIGMA,
};
use crate::map::{bcnf3, BcnfParams, PwlMap, Side, DEFAULT_TOL_SIGMA};
use crate::spectral::{
    band_value, build_frame, projected_quantities, psi2_identity_residual, ProjectedQuantities,
    SpectralFrame, DEFAULT_FRAME_TOL,
};
use crate::symbolic::{check_rotation_flip, concat_flip_alpha, reinjection_offset, Word};

/// Tolerance on `|λ1 λ2 - 1|` when certifying a point.
pub const PRODUCT_TOL: f64 = 1e-8;

/// Absolute margin keeping `c` away from `-1` and `0`.
pub const C_MARGIN: f64 = 1e-8;

/// Tolerance on the scaled `ω1`-offset of `f_{Y^0̄}(x0)`.
pub const STABLE_OFFSET_TOL: f64 = 1e-8;

pub const PSI2_TOL: f64 = 1e-6;

/// Allowed relative deviation of a fitted decay ratio from its prediction.
pub const RATIO_TOL: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual3 {
    pub gamma11: f64,
    pub psi1: f64,
    pub lambda_product: f64,
}

impl Residual3 {
    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.gamma11, self.psi1, self.lambda_product)
    }

    pub fn norm_inf(&self) -> f64 {
        self.gamma11
            .abs()
            .max(self.psi1.abs())
            .max(self.lambda_product.abs())
    }
}

/// Everything derived from the `X`-cycle at one parameter point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub x0: DVector<f64>,
    pub frame: SpectralFrame,
    pub quantities: ProjectedQuantities,
}

impl Evaluation {
    pub fn residual(&self) -> Residual3 {
        Residual3 {
            gamma11: self.quantities.gamma11,
            psi1: self.quantities.psi1,
            lambda_product: self.frame.lambda1 * self.frame.lambda2 - 1.0,
        }
    }
}

pub fn evaluate(f: &PwlMap, x: &Word, y: &Word) -> Result<Evaluation> {
    let comp = compose(f, x);
    let x0 = fixed_point(&comp, f.b())?;
    let frame = build_frame(&comp.m, DEFAULT_FRAME_TOL)?;
    let quantities = projected_quantities(&frame, f, y, &x0);
    Ok(Evaluation {
        x0,
        frame,
        quantities,
    })
}

/// `(γ11, ψ1, λ1 λ2 - 1)` for the normal form at `p`.
pub fn residual(p: &BcnfParams, x: &Word, y: &Word) -> Result<Residual3> {
    let r = evaluate(&bcnf3(p), x, y)?.residual();
    if !r.as_vector().iter().all(|v| v.is_finite()) {
        return Err(Error::Config(format!("non-finite residual at {p:?}")));
    }
    Ok(r)
}

fn free(p: &BcnfParams) -> Vector3<f64> {
    Vector3::new(p.tau_l, p.tau_r, p.delta_l)
}

fn with_free(p: &BcnfParams, v: &Vector3<f64>) -> BcnfParams {
    BcnfParams {
        tau_l: v[0],
        tau_r: v[1],
        delta_l: v[2],
        ..*p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_condition: f64,
    pub max_halvings: usize,
    pub fd_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 50,
            max_condition: 1e12,
            max_halvings: 8,
            fd_step: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub params: BcnfParams,
    pub residual: Residual3,
    pub iterations: usize,
    /// `‖r‖∞` at the start and after each accepted step.
    pub history: Vec<f64>,
}

/// Central-difference Jacobian of the residual in `(τ_L, τ_R, δ_L)`.
pub fn jacobian(p: &BcnfParams, x: &Word, y: &Word, fd_step: f64) -> Result<Matrix3<f64>> {
    let q = free(p);
    let mut jac = Matrix3::zeros();
    for k in 0..3 {
        let h = fd_step * q[k].abs().max(1.0);
        let mut plus = q;
        let mut minus = q;
        plus[k] += h;
        minus[k] -= h;
        let rp = residual(&with_free(p, &plus), x, y)?.as_vector();
        let rm = residual(&with_free(p, &minus), x, y)?.as_vector();
        jac.set_column(k, &((rp - rm) / (2.0 * h)));
    }
    Ok(jac)
}

/// Newton on `(τ_L, τ_R, δ_L)` with `σ_L, σ_R, δ_R, μ` held fixed.
pub fn solve(p0: &BcnfParams, x: &Word, y: &Word, opts: &SolveOptions) -> Result<SolveOutcome> {
    let mut p = *p0;
    let mut r = residual(&p, x, y)?;
    let mut history = vec![r.norm_inf()];
    let lost = |source: Error, last_good: BcnfParams| Error::FrameLost {
        source: Box::new(source),
        last_good,
    };
    for iteration in 0..=opts.max_iter {
        if r.norm_inf() <= opts.tol {
            return Ok(SolveOutcome {
                params: p,
                residual: r,
                iterations: iteration,
                history,
            });
        }
        if iteration == opts.max_iter {
            break;
        }
        let jac = jacobian(&p, x, y, opts.fd_step).map_err(|e| lost(e, p))?;
        let sv = jac.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if condition.is_nan() || condition > opts.max_condition {
            return Err(Error::SingularJacobian { condition });
        }
        let step = jac
            .lu()
            .solve(&(-r.as_vector()))
            .ok_or(Error::SingularJacobian { condition })?;

        let q = free(&p);
        let mut t = 1.0;
        let mut last_error = None;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = with_free(&p, &(q + step * t));
            match residual(&trial, x, y) {
                Ok(rt) if rt.norm_inf() < r.norm_inf() => {
                    accepted = Some((trial, rt));
                    break;
                }
                Ok(_) => {}
                Err(e) => last_error = Some(e),
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                p = trial;
                r = rt;
                history.push(r.norm_inf());
            }
            None => {
                return Err(match last_error {
                    Some(e) => lost(e, p),
                    None => Error::Stalled {
                        halvings: opts.max_halvings,
                        residual: r.norm_inf(),
                    },
                });
            }
        }
    }
    Err(Error::MaxIterations {
        iterations: opts.max_iter,
        residual: r.norm_inf(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All sufficient hypotheses must hold.
    #[default]
    Direct,
    /// An inadmissible `S`-orbit is reported but does not fail the check.
    Converse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

/// One hypothesis. `margin > 0` means it holds by that much.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub statement: &'static str,
    pub status: Status,
    pub value: Option<f64>,
    pub margin: Option<f64>,
    pub detail: String,
}

impl Check {
    fn numeric(
        id: &'static str,
        statement: &'static str,
        value: f64,
        margin: f64,
        detail: String,
    ) -> Check {
        let status = if margin > 0.0 {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            id,
            statement,
            status,
            value: Some(value),
            margin: Some(margin),
            detail,
        }
    }

    fn unavailable(id: &'static str, statement: &'static str, detail: String) -> Check {
        Check {
            id,
            statement,
            status: Status::Indeterminate,
            value: None,
            margin: None,
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub admissibility: String,
    pub stability: String,
    pub max_modulus: Option<f64>,
    pub passes: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// First `k` from which every row up to `k_max` passes.
    pub k_min_observed: Option<usize>,
    pub passes: bool,
}

fn sweep_row(k: usize, cycle: Result<Cycle>) -> SweepRow {
    match cycle {
        Ok(c) => SweepRow {
            k,
            admissibility: c.admissibility.tag().into(),
            stability: c.stability.tag().into(),
            max_modulus: Some(c.max_modulus()),
            passes: c.strictly_admissible()
                && c.stability == crate::cycle::Stability::AsymptoticallyStable,
            error: None,
        },
        Err(e) => SweepRow {
            k,
            admissibility: "error".into(),
            stability: "error".into(),
            max_modulus: None,
            passes: false,
            error: Some(e.to_string()),
        },
    }
}

/// Classifies the `X^kY`-cycles for `k = 0..=k_max`.
pub fn k_sweep(f: &PwlMap, x: &Word, y: &Word, k_max: usize, tol_sigma: f64) -> SweepReport {
    let rows: Vec<SweepRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..=k_max)
            .map(|k| scope.spawn(move || sweep_row(k, xky_cycle(f, x, y, k, tol_sigma))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker"))
            .collect()
    });
    let mut k_min_observed = None;
    for row in rows.iter().rev() {
        if !row.passes {
            break;
        }
        k_min_observed = Some(row.k);
    }
    SweepReport {
        passes: k_min_observed.is_some(),
        rows,
        k_min_observed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub k: usize,
    /// `|ω1^T(x^{X^kY}_{kn} - x0) - a0 (λ1+1) c / (1+c)|`.
    pub a_error: Option<f64>,
    /// `‖x^{X^kY^0̄}_{kn} - y0‖∞`.
    pub b_distance: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub rows: Vec<AsymptoticRow>,
    pub band_value: f64,
    pub band_pass: bool,
    pub a_ratio_fit: Option<f64>,
    pub a_ratio_theory: f64,
    pub a_pass: bool,
    pub b_ratio_fit: Option<f64>,
    pub b_ratio_theory: f64,
    pub b_monotone: bool,
    pub b_pass: bool,
    pub psi2_residual: f64,
    pub psi2_pass: bool,
}

impl AsymptoticReport {
    pub fn passes(&self) -> bool {
        self.band_pass && self.a_pass && self.b_pass && self.psi2_pass
    }
}

/// Least-squares slope of `ln e_k` against `k`, exponentiated.
pub fn fitted_ratio(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0 && e.is_finite())
        .map(|&(k, e)| (k as f64, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

fn within_ratio(fit: Option<f64>, theory: f64) -> bool {
    fit.is_some_and(|r| r < 1.0 && (r / theory - 1.0).abs() <= RATIO_TOL)
}

/// Decay of the `X^kY` and `X^kY^0̄` cycles towards their predicted limits.
pub fn asymptotic_checks(
    f: &PwlMap,
    x: &Word,
    y: &Word,
    eval: &Evaluation,
    k_range: std::ops::RangeInclusive<usize>,
) -> Result<AsymptoticReport> {
    let frame = &eval.frame;
    let q = &eval.quantities;
    let x0 = &eval.x0;
    let (y0, a0) = crate::homoclinic::unstable_intersection(frame, x0)?;
    let band = band_value(frame, q.c);
    let target = a0 * band;
    let y_bar = y.flip(0)?;
    let n = x.len();

    let mut rows = Vec::new();
    for k in k_range {
        let mut row = AsymptoticRow {
            k,
            a_error: None,
            b_distance: None,
            skipped: None,
        };
        match xky_cycle(f, x, y, k, DEFAULT_TOL_SIGMA) {
            Ok(c) => {
                let a = frame.omega1.dot(&(&c.points[k * n] - x0));
                row.a_error = Some((a - target).abs());
            }
            Err(e) => row.skipped = Some(e.to_string()),
        }
        match find_cycle(f, &x.power_then(k, &y_bar), DEFAULT_TOL_SIGMA) {
            Ok(c) => row.b_distance = Some((&c.points[k * n] - &y0).amax()),
            Err(e) => row.skipped = Some(e.to_string()),
        }
        rows.push(row);
    }

    let a_pts: Vec<(usize, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.k, r.a_error?)))
        .collect();
    let b_pts: Vec<(usize, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.k, r.b_distance?)))
        .collect();
    let a_ratio_theory = (1.0 / frame.lambda1).max(frame.lambda1 * frame.beta);
    let b_ratio_theory = 1.0 / frame.lambda1;
    let a_ratio_fit = fitted_ratio(&a_pts);
    let b_ratio_fit = fitted_ratio(&b_pts);
    let b_monotone = b_pts.len() >= 2 && b_pts.windows(2).all(|w| w[1].1 < w[0].1);
    let psi2_residual = psi2_identity_residual(frame, q, a0);
    Ok(AsymptoticReport {
        rows,
        band_value: band,
        band_pass: 1.0 < band && band < frame.lambda1,
        a_ratio_fit,
        a_ratio_theory,
        a_pass: within_ratio(a_ratio_fit, a_ratio_theory),
        b_ratio_fit,
        b_ratio_theory,
        b_monotone,
        b_pass: b_monotone && within_ratio(b_ratio_fit, b_ratio_theory),
        psi2_residual,
        psi2_pass: psi2_residual < PSI2_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub k_max: usize,
    pub tol_sigma: f64,
    pub mode: Mode,
    pub asymptotic_k_lo: usize,
    pub asymptotic_k_hi: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            k_max: 7,
            tol_sigma: DEFAULT_TOL_SIGMA,
            mode: Mode::Direct,
            asymptotic_k_lo: 3,
            asymptotic_k_hi: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub x: String,
    pub y: String,
    pub mode: Mode,
    pub alpha: Option<usize>,
    pub d: usize,
    pub ihat: Option<usize>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub a0: Option<f64>,
    pub residual: Option<Residual3>,
    pub quantities: Option<ProjectedQuantities>,
    /// Conditions sufficient for infinitely many stable `X^kY`-cycles.
    pub sufficient: Vec<Check>,
    /// Extra conditions of the converse statement.
    pub necessary: Vec<Check>,
    pub subsumed: Option<SubsumedReport>,
    pub k_sweep: SweepReport,
    pub asymptotics: Option<AsymptoticReport>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.sufficient
            .iter()
            .chain(&self.necessary)
            .find(|c| c.id == id)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.sufficient
            .iter()
            .chain(&self.necessary)
            .filter(|c| !c.passed())
            .map(|c| c.id)
            .collect()
    }
}

const ST_FLIP: &str = "XY = (YX)^(0̄ ᾱ) for some α in 1..n+p-1";
const ST_FRAME: &str = "0 ≤ β < λ2 < 1 < λ1, both simple, and e1^T ζ1 ≠ 0";
const ST_PRODUCT: &str = "λ1 λ2 = 1";
const ST_C_BAND: &str = "λ2 < c < 1";
const ST_X_CYCLE: &str = "X-cycle admissible with no points on Σ";
const ST_S_ORBIT: &str = "S-orbit admissible, homoclinic, with y0 = E^u ∩ Σ and y_α ∈ Σ";
const ST_DOUBLE: &str = "no i ≥ 0 with y_i ∈ Σ and y_{i+n} ∈ Σ";
const ST_C_SPECIAL: &str = "c ∉ {-1, 0}";
const ST_Y0BAR: &str = "f_{Y^0̄}(x0) ∉ E^s(x0)";

/// Evaluates every hypothesis at `f`, sweeps `k`, and runs the asymptotic
/// checks. Failures are recorded, never raised.
pub fn verify_theorems(f: &PwlMap, x: &Word, y: &Word, opts: &VerifyOptions) -> VerificationReport {
    let (n, p) = (x.len(), y.len());
    let d = reinjection_offset(n, p);
    let alpha = concat_flip_alpha(x, y).ok().flatten();
    let ihat = (0..n).find(|&i| check_rotation_flip(x, d, i));
    let mut sufficient = Vec::new();
    let mut necessary = Vec::new();

    sufficient.push(Check {
        id: "flip_identity",
        statement: ST_FLIP,
        status: if alpha.is_some() {
            Status::Pass
        } else {
            Status::Fail
        },
        value: alpha.map(|a| a as f64),
        margin: None,
        detail: match alpha {
            Some(a) => format!("α = {a}, d = {d}"),
            None => "XY and YX do not differ in exactly {0, α}".into(),
        },
    });

    let eval = evaluate(f, x, y);
    let mut report = VerificationReport {
        x: x.to_string(),
        y: y.to_string(),
        mode: opts.mode,
        alpha,
        d,
        ihat,
        lambda1: None,
        lambda2: None,
        beta: None,
        c: None,
        a0: None,
        residual: None,
        quantities: None,
        sufficient: Vec::new(),
        necessary: Vec::new(),
        subsumed: None,
        k_sweep: k_sweep(f, x, y, opts.k_max, opts.tol_sigma),
        asymptotics: None,
        passed: false,
    };

    match &eval {
        Err(e) => {
            let why = format!("frame unavailable: {e}");
            sufficient.push(Check {
                id: "eigen_frame",
                statement: ST_FRAME,
                status: Status::Fail,
                value: None,
                margin: None,
                detail: e.to_string(),
            });
            for (id, st) in [("lambda_product", ST_PRODUCT), ("c_band", ST_C_BAND)] {
                sufficient.push(Check::unavailable(id, st, why.clone()));
            }
            sufficient.push(x_cycle_check(f, x, opts.tol_sigma));
            for (id, st) in [("s_orbit", ST_S_ORBIT), ("no_double_hits", ST_DOUBLE)] {
                sufficient.push(Check::unavailable(id, st, why.clone()));
            }
            for (id, st) in [
                ("c_not_special", ST_C_SPECIAL),
                ("y0bar_transverse", ST_Y0BAR),
            ] {
                necessary.push(Check::unavailable(id, st, why.clone()));
            }
        }
        Ok(ev) => {
            let fr = &ev.frame;
            let q = &ev.quantities;
            report.lambda1 = Some(fr.lambda1);
            report.lambda2 = Some(fr.lambda2);
            report.beta = Some(fr.beta);
            report.c = Some(q.c);
            report.a0 = Some(-ev.x0[0] / fr.e1_zeta1);
            report.residual = Some(ev.residual());
            report.quantities = Some(*q);

            let frame_margin = (fr.lambda1 - 1.0)
                .min(1.0 - fr.lambda2)
                .min(fr.lambda2 - fr.beta)
                .min(fr.e1_zeta1.abs());
            sufficient.push(Check::numeric(
                "eigen_frame",
                ST_FRAME,
                fr.e1_zeta1,
                frame_margin,
                format!("λ1 = {}, λ2 = {}, β = {}", fr.lambda1, fr.lambda2, fr.beta),
            ));
            let product = (fr.lambda1 * fr.lambda2 - 1.0).abs();
            sufficient.push(Check::numeric(
                "lambda_product",
                ST_PRODUCT,
                product,
                PRODUCT_TOL - product,
                format!("|λ1 λ2 - 1| against {PRODUCT_TOL:e}"),
            ));
            sufficient.push(Check::numeric(
                "c_band",
                ST_C_BAND,
                q.c,
                (q.c - fr.lambda2).min(1.0 - q.c),
                format!("c = {}, λ2 = {}", q.c, fr.lambda2),
            ));
            sufficient.push(x_cycle_check(f, x, opts.tol_sigma));
            let (s_check, d_check, subsumed) = orbit_checks(f, x, y, ev, opts.mode);
            sufficient.push(s_check);
            sufficient.push(d_check);
            report.subsumed = subsumed;

            let c_gap = q.c.abs().min((q.c + 1.0).abs());
            necessary.push(Check::numeric(
                "c_not_special",
                ST_C_SPECIAL,
                q.c,
                c_gap - C_MARGIN,
                format!("distance to {{-1, 0}} is {c_gap}"),
            ));
            necessary.push(match y.flip(0) {
                Ok(y_bar) => {
                    let image = compose(f, &y_bar).apply(&ev.x0, f.b());
                    let offset = fr.omega1.dot(&(image - &ev.x0)).abs() / ev.x0.amax().max(1.0);
                    Check::numeric(
                        "y0bar_transverse",
                        ST_Y0BAR,
                        offset,
                        offset - STABLE_OFFSET_TOL,
                        "scaled |ω1^T(f_{Y^0̄}(x0) - x0)|".into(),
                    )
                }
                Err(e) => Check::unavailable("y0bar_transverse", ST_Y0BAR, e.to_string()),
            });

            let range = opts.asymptotic_k_lo..=opts.asymptotic_k_hi;
            report.asymptotics = asymptotic_checks(f, x, y, ev, range).ok();
        }
    }

    report.sufficient = sufficient;
    report.necessary = necessary;
    report.passed = report.failing().is_empty()
        && report.k_sweep.passes
        && report.asymptotics.as_ref().is_some_and(|a| a.passes());
    report
}

fn x_cycle_check(f: &PwlMap, x: &Word, tol_sigma: f64) -> Check {
    match find_cycle(f, x, tol_sigma) {
        Err(e) => Check::unavailable("x_cycle_admissible", ST_X_CYCLE, e.to_string()),
        Ok(c) => {
            let clearance = c
                .points
                .iter()
                .map(crate::map::sigma_residual)
                .fold(f64::INFINITY, f64::min);
            let margin = clearance - tol_sigma;
            let mut check = Check::numeric(
                "x_cycle_admissible",
                ST_X_CYCLE,
                clearance,
                margin,
                format!(
                    "{}; smallest scaled |e1^T x_i| = {clearance}",
                    c.admissibility.tag()
                ),
            );
            if !c.admissibility.is_admissible() {
                check.status = Status::Fail;
            } else if c.sides.contains(&Side::OnSigma) {
                check.status = Status::Indeterminate;
            }
            check
        }
    }
}

fn orbit_checks(
    f: &PwlMap,
    x: &Word,
    y: &Word,
    ev: &Evaluation,
    mode: Mode,
) -> (Check, Check, Option<SubsumedReport>) {
    let orbit = match build_s_orbit(f, x, y, &ev.frame, &ev.x0, &OrbitOptions::default()) {
        Ok(o) => o,
        Err(e) => {
            return (
                Check::unavailable("s_orbit", ST_S_ORBIT, e.to_string()),
                Check::unavailable("no_double_hits", ST_DOUBLE, e.to_string()),
                None,
            )
        }
    };
    let rep = verify_subsumed(&orbit, None, HOMOCLINIC_TOL_SIGMA);
    let worst = rep.y0_residual.max(rep.y_alpha_residual);
    let mut s_check = Check::numeric(
        "s_orbit",
        ST_S_ORBIT,
        rep.y_alpha_residual,
        HOMOCLINIC_TOL_SIGMA - worst,
        format!(
            "y_α residual {}, admissible {}, boundary hits {:?}, escaped {}",
            rep.y_alpha_residual,
            rep.admissible,
            rep.boundary_hits,
            rep.divergence.is_some()
        ),
    );
    let admissible_ok = rep.admissible || mode == Mode::Converse;
    if !(admissible_ok && rep.divergence.is_none() && rep.hits_match) {
        s_check.status = Status::Fail;
    }
    if branch_segments(&orbit).is_err() {
        s_check.status = Status::Fail;
    }
    let d_check = Check::numeric(
        "no_double_hits",
        ST_DOUBLE,
        rep.double_hits.len() as f64,
        rep.double_hit_margin - HOMOCLINIC_TOL_SIGMA,
        format!("horizon {}, double hits {:?}", rep.horizon, rep.double_hits),
    );
    (s_check, d_check, Some(rep))
}

/// The free coordinates `(τ_L, τ_R, δ_L)` as a plain vector.
pub fn free_parameters(p: &BcnfParams) -> [f64; 3] {
    [p.tau_l, p.tau_r, p.delta_l]
}

pub fn param_distance(a: &BcnfParams, b: &BcnfParams) -> f64 {
    let (a, b) = (free_parameters(a), free_parameters(b));
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
