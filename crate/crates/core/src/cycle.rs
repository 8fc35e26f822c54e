//! Word compositions `f_X(x) = M_X x + P_X b` and the periodic solutions they
//! determine.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::eigen;
use crate::error::{Error, Result};
use crate::map::{classify, PwlMap, Side};
use crate::symbolic::Word;

/// Half-width of the "unit modulus" band used in stability verdicts.
pub const STABILITY_BAND: f64 = 1e-9;

/// Relative distance from 1 below which a multiplier makes a cycle degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct WordComposition {
    pub m: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub word: Word,
}

impl WordComposition {
    /// `f_X(x) = M x + P b`.
    pub fn apply(&self, x: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        &self.m * x + &self.p * b
    }

    /// The composition for `UV` from those of `U` and `V`.
    pub fn then(&self, v: &WordComposition) -> WordComposition {
        WordComposition {
            m: &v.m * &self.m,
            p: &v.m * &self.p + &v.p,
            word: self.word.concat(&v.word),
        }
    }
}

/// Builds `M_X` and `P_X` by folding `P <- A P + I`, `M <- A M` over the word.
pub fn compose(f: &PwlMap, w: &Word) -> WordComposition {
    let n = f.dim();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut m = eye.clone();
    let mut p = DMatrix::<f64>::zeros(n, n);
    for &s in w.symbols() {
        let a = f.matrix(s);
        p = a * &p + &eye;
        m = a * &m;
    }
    WordComposition {
        m,
        p,
        word: w.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    AdmissibleStrict,
    AdmissibleWithBoundary(Vec<usize>),
    NotAdmissible(usize),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::NotAdmissible(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Admissibility::AdmissibleStrict => "admissible_strict",
            Admissibility::AdmissibleWithBoundary(_) => "admissible_with_boundary",
            Admissibility::NotAdmissible(_) => "not_admissible",
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match self {
            Admissibility::AdmissibleStrict => Vec::new(),
            Admissibility::AdmissibleWithBoundary(v) => v.clone(),
            Admissibility::NotAdmissible(i) => vec![*i],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    AsymptoticallyStable,
    StableNonstrict,
    Unstable,
    UndeterminedBoundary,
}

impl Stability {
    pub fn tag(self) -> &'static str {
        match self {
            Stability::AsymptoticallyStable => "asymptotically_stable",
            Stability::StableNonstrict => "stable_nonstrict",
            Stability::Unstable => "unstable",
            Stability::UndeterminedBoundary => "undetermined_boundary",
        }
    }

    /// Verdict from the largest multiplier modulus alone.
    pub fn from_modulus(max_modulus: f64) -> Stability {
        if max_modulus < 1.0 - STABILITY_BAND {
            Stability::AsymptoticallyStable
        } else if max_modulus <= 1.0 + STABILITY_BAND {
            Stability::StableNonstrict
        } else {
            Stability::Unstable
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub word: Word,
    pub points: Vec<DVector<f64>>,
    pub sides: Vec<Side>,
    pub admissibility: Admissibility,
    pub multipliers: Vec<Complex<f64>>,
    pub stability: Stability,
}

impl Cycle {
    pub fn max_modulus(&self) -> f64 {
        eigen::spectral_radius(&self.multipliers)
    }

    /// Admissible with every point strictly off Σ.
    pub fn strictly_admissible(&self) -> bool {
        self.admissibility == Admissibility::AdmissibleStrict
    }

    /// `max_i ‖f_{w_i}(x_i) - x_{i+1}‖∞ / max(1, max_i ‖x_i‖∞)`.
    pub fn closure_residual(&self, f: &PwlMap) -> f64 {
        let n = self.points.len();
        let scale = self.points.iter().map(|x| x.amax()).fold(1.0, f64::max);
        let worst = (0..n)
            .map(|i| {
                let s = self.word.symbols()[i];
                (f.apply_symbol(s, &self.points[i]) - &self.points[(i + 1) % n]).amax()
            })
            .fold(0.0, f64::max);
        worst / scale
    }

    pub fn report(&self) -> CycleReport {
        CycleReport {
            word: self.word.to_string(),
            points: self
                .points
                .iter()
                .map(|x| x.iter().copied().collect())
                .collect(),
            sides: self.sides.iter().map(|s| s.tag()).collect(),
            admissibility: AdmissibilityReport {
                tag: self.admissibility.tag(),
                indices: self.admissibility.indices(),
            },
            multipliers: self.multipliers.iter().map(|z| [z.re, z.im]).collect(),
            stability: self.stability.tag(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub tag: &'static str,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub word: String,
    pub points: Vec<Vec<f64>>,
    pub sides: Vec<&'static str>,
    pub admissibility: AdmissibilityReport,
    pub multipliers: Vec<[f64; 2]>,
    pub stability: &'static str,
}

/// Solves `(I - M) x = P b`, guarding against a unit multiplier: the cycle is
/// degenerate when some multiplier lies within
/// `DEGENERACY_THRESHOLD·max(1, ρ(M))` of 1.
pub fn fixed_point(comp: &WordComposition, b: &DVector<f64>) -> Result<DVector<f64>> {
    let multipliers = eigen::eigenvalues(&comp.m)?;
    fixed_point_with(comp, b, &multipliers)
}

fn fixed_point_with(
    comp: &WordComposition,
    b: &DVector<f64>,
    multipliers: &[Complex<f64>],
) -> Result<DVector<f64>> {
    let n = comp.m.nrows();
    let lu = (DMatrix::<f64>::identity(n, n) - &comp.m).lu();
    let det = lu.determinant();
    let degenerate = || Error::DegenerateCycle {
        word: comp.word.to_string(),
        det,
    };
    let radius = eigen::spectral_radius(multipliers).max(1.0);
    let gap = multipliers
        .iter()
        .map(|z| (z - Complex::new(1.0, 0.0)).norm())
        .fold(f64::INFINITY, f64::min);
    if !det.is_finite() || det == 0.0 || gap < DEGENERACY_THRESHOLD * radius {
        return Err(degenerate());
    }
    let x = lu.solve(&(&comp.p * b)).ok_or_else(degenerate)?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(degenerate());
    }
    Ok(x)
}

/// The `X`-cycle of `w`, classified for admissibility and stability.
pub fn find_cycle(f: &PwlMap, w: &Word, tol_sigma: f64) -> Result<Cycle> {
    let comp = compose(f, w);
    let multipliers = eigen::eigenvalues(&comp.m)?;
    let x0 = fixed_point_with(&comp, f.b(), &multipliers)?;
    let mut points = Vec::with_capacity(w.len());
    let mut x = x0;
    for &s in w.symbols() {
        let next = f.apply_symbol(s, &x);
        points.push(x);
        x = next;
    }
    let sides: Vec<Side> = points.iter().map(|p| classify(p, tol_sigma).side).collect();
    let mut boundary = Vec::new();
    let mut failure = None;
    for (i, (&side, &s)) in sides.iter().zip(w.symbols()).enumerate() {
        if side == Side::OnSigma {
            boundary.push(i);
        } else if !side.admits(s) && failure.is_none() {
            failure = Some(i);
        }
    }
    let admissibility = match failure {
        Some(i) => Admissibility::NotAdmissible(i),
        None if boundary.is_empty() => Admissibility::AdmissibleStrict,
        None => Admissibility::AdmissibleWithBoundary(boundary.clone()),
    };
    let stability = if boundary.is_empty() {
        Stability::from_modulus(eigen::spectral_radius(&multipliers))
    } else {
        Stability::UndeterminedBoundary
    };
    Ok(Cycle {
        word: w.clone(),
        points,
        sides,
        admissibility,
        multipliers,
        stability,
    })
}

/// The cycle of `X^k Y`.
pub fn xky_cycle(f: &PwlMap, x: &Word, y: &Word, k: usize, tol_sigma: f64) -> Result<Cycle> {
    find_cycle(f, &x.power_then(k, y), tol_sigma)
}

/// Eigenvalues of `M_w`, sorted by descending modulus.
pub fn multipliers(f: &PwlMap, w: &Word) -> Result<Vec<Complex<f64>>> {
    eigen::eigenvalues(&compose(f, w).m)
}
