//! Independent eigenvalue oracle: Faddeev-LeVerrier characteristic
//! polynomial, closed-form roots, then Newton polishing on the polynomial.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};

use pwl_homoclinic::presets::Preset;
use pwl_homoclinic::{bcnf3, PwlMap};

/// Coefficients `c` of the monic `λ^N + c[0] λ^{N-1} + ... + c[N-1]`.
pub fn char_poly(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let mut c = Vec::with_capacity(n);
    let mut prev = 1.0;
    for k in 1..=n {
        mk = m * &mk + &id * prev;
        let am = m * &mk;
        let ck = -am.trace() / k as f64;
        c.push(ck);
        prev = ck;
    }
    c
}

fn horner(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(1.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &ck in c {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

fn polish(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    for _ in 0..4 {
        let (p, dp) = horner(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-17 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

fn quadratic(b: f64, c: f64) -> [Complex<f64>; 2] {
    let disc = Complex::new(b * b - 4.0 * c, 0.0).sqrt();
    let q = if b >= 0.0 {
        -(disc + b) / 2.0
    } else {
        (disc - b) / 2.0
    };
    if q.norm() == 0.0 {
        return [Complex::new(0.0, 0.0); 2];
    }
    [q, Complex::new(c, 0.0) / q]
}

fn cubic(a: f64, b: f64, c: f64) -> [Complex<f64>; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let s = Complex::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let mut u3 = Complex::new(-q / 2.0, 0.0) + s;
    if u3.norm() < 1e-300 {
        u3 = Complex::new(-q / 2.0, 0.0) - s;
    }
    let w = Complex::new(-0.5, 3f64.sqrt() / 2.0);
    let shift = Complex::new(a / 3.0, 0.0);
    if u3.norm() < 1e-300 {
        return [-shift; 3];
    }
    let u = u3.powf(1.0 / 3.0);
    let mut roots = [Complex::new(0.0, 0.0); 3];
    let mut wk = Complex::new(1.0, 0.0);
    for r in &mut roots {
        let uk = u * wk;
        *r = uk - Complex::new(p / 3.0, 0.0) / uk - shift;
        wk *= w;
    }
    roots
}

/// Eigenvalues of a 1x1, 2x2 or 3x3 matrix from its characteristic polynomial.
pub fn oracle_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let c = char_poly(m);
    let raw: Vec<Complex<f64>> = match c.len() {
        1 => vec![Complex::new(-c[0], 0.0)],
        2 => quadratic(c[0], c[1]).to_vec(),
        3 => cubic(c[0], c[1], c[2]).to_vec(),
        n => panic!("oracle supports dimension 1..=3, got {n}"),
    };
    raw.into_iter().map(|z| polish(&c, z)).collect()
}

/// Largest distance under a greedy nearest matching of two multisets.
pub fn multiset_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for za in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, zb)| (j, (za - zb).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("unmatched root");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn preset_map(p: &Preset) -> PwlMap {
    bcnf3(&p.params)
}
