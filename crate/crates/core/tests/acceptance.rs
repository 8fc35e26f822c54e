//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pwl_homoclinic::codim3::{self, SolveOptions, VerifyOptions};
use pwl_homoclinic::cycle::find_cycle;
use pwl_homoclinic::homoclinic::{
    build_s_orbit, unstable_intersection, verify_subsumed, OrbitOptions, HOMOCLINIC_TOL_SIGMA,
};
use pwl_homoclinic::presets::{self, Preset};
use pwl_homoclinic::spectral::psi2_identity_residual;
use pwl_homoclinic::symbolic::{
    check_rotation_flip, concat_flip_alpha, gcd, mod_inverse, reinjection_offset, rotational_word,
};
use pwl_homoclinic::{bcnf3, make_map, BcnfParams, Error, Symbol, Word};

use common::{multiset_distance, oracle_eigenvalues, preset_map};

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

/// Preset, k_max, inadmissible k values, first k that must pass.
type SweepExpectation = (Preset, usize, &'static [usize], usize);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn solved(p: &Preset) -> Result<BcnfParams, String> {
    let (x, y) = p.words();
    codim3::solve(&p.params, &x, &y, &SolveOptions::default())
        .map(|o| o.params)
        .map_err(|e| format!("{}: solve failed: {e}", p.name))
}

fn residuals() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in presets::all() {
        let (x, y) = p.words();
        let r = codim3::residual(&p.params, &x, &y).map_err(|e| format!("{}: {e}", p.name))?;
        ensure(r.norm_inf() < 1e-8, || {
            format!("{}: residual {:.3e}", p.name, r.norm_inf())
        })?;
        worst = worst.max(r.norm_inf());
    }
    Ok(format!("max residual {worst:.2e}"))
}

fn solver_recovery() -> Outcome {
    let mut parts = Vec::new();
    for p in presets::all() {
        let (x, y) = p.words();
        let start = BcnfParams {
            tau_l: round2(p.params.tau_l),
            tau_r: round2(p.params.tau_r),
            delta_l: round2(p.params.delta_l),
            ..p.params
        };
        let out = codim3::solve(&start, &x, &y, &SolveOptions::default())
            .map_err(|e| format!("{}: {e}", p.name))?;
        let dist = codim3::param_distance(&out.params, &p.params);
        ensure(dist < 1e-8, || format!("{}: distance {dist:.3e}", p.name))?;
        ensure(out.iterations <= 25, || {
            format!("{}: {} iterations", p.name, out.iterations)
        })?;
        parts.push(format!("{} {} it {:.1e}", p.name, out.iterations, dist));
    }
    Ok(parts.join(", "))
}

fn combinatorics() -> Outcome {
    let cases = [
        ("RLLR", "LLR", 2, 1),
        ("RLR", "LL", 4, 1),
        ("RLRLRRLR", "LRRLR", 1, 3),
    ];
    for (xs, ys, alpha, d) in cases {
        let x: Word = xs.parse().unwrap();
        let y: Word = ys.parse().unwrap();
        let got = concat_flip_alpha(&x, &y).map_err(|e| e.to_string())?;
        let got_d = reinjection_offset(x.len(), y.len());
        ensure(got == Some(alpha) && got_d == d, || {
            format!("{xs}/{ys}: alpha {got:?} d {got_d}")
        })?;
    }
    let d = reinjection_offset(5, 2);
    ensure(d == 3, || format!("RLRLR/LR: d {d}"))?;
    Ok("(2,1) (4,1) (1,3) and d=3".into())
}

fn attractor_counts() -> Outcome {
    let expectations: [SweepExpectation; 3] = [
        (presets::rllr_llr(), 7, &[], 0),
        (presets::rlr_ll(), 9, &[0, 1], 2),
        (presets::rlrlrrlr_lrrlr(), 7, &[], 0),
    ];
    let mut parts = Vec::new();
    for (p, k_max, inadmissible, k_first) in expectations {
        let (x, y) = p.words();
        let sweep = codim3::k_sweep(
            &preset_map(&p),
            &x,
            &y,
            k_max,
            pwl_homoclinic::map::DEFAULT_TOL_SIGMA,
        );
        for row in &sweep.rows {
            if inadmissible.contains(&row.k) {
                ensure(row.admissibility == "not_admissible", || {
                    format!(
                        "{}: k={} expected not admissible, got {}",
                        p.name, row.k, row.admissibility
                    )
                })?;
            } else if row.k >= k_first {
                ensure(row.passes, || {
                    format!(
                        "{}: k={} {} {}",
                        p.name, row.k, row.admissibility, row.stability
                    )
                })?;
            }
        }
        parts.push(format!("{} k_min {:?}", p.name, sweep.k_min_observed));
    }
    Ok(parts.join(", "))
}

fn homoclinic_structure() -> Outcome {
    let mut worst_sigma: f64 = 0.0;
    let mut worst_contain: f64 = 0.0;
    for p in presets::all() {
        let (x, y) = p.words();
        for (label, params) in [("published", p.params), ("solved", solved(&p)?)] {
            let f = bcnf3(&params);
            let eval = codim3::evaluate(&f, &x, &y).map_err(|e| format!("{}: {e}", p.name))?;
            let orbit = build_s_orbit(&f, &x, &y, &eval.frame, &eval.x0, &OrbitOptions::default())
                .map_err(|e| format!("{} {label}: {e}", p.name))?;
            let rep = verify_subsumed(&orbit, None, HOMOCLINIC_TOL_SIGMA);
            ensure(
                rep.y0_residual < 1e-6 && rep.y_alpha_residual < 1e-6,
                || {
                    format!(
                        "{} {label}: y0 {:.2e} y_alpha {:.2e}",
                        p.name, rep.y0_residual, rep.y_alpha_residual
                    )
                },
            )?;
            ensure(rep.no_double_hits(), || {
                format!("{} {label}: double hits {:?}", p.name, rep.double_hits)
            })?;
            worst_sigma = worst_sigma.max(rep.y0_residual).max(rep.y_alpha_residual);
            if label == "solved" {
                let contain = orbit
                    .containment(&eval.frame)
                    .iter()
                    .map(|c| c.1)
                    .fold(0.0, f64::max);
                ensure(contain < 1e-6, || {
                    format!("{} {label}: containment {contain:.2e}", p.name)
                })?;
                worst_contain = worst_contain.max(contain);
            }
        }
    }
    Ok(format!(
        "sigma residual {worst_sigma:.1e}, containment {worst_contain:.1e}"
    ))
}

fn psi2_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in presets::all() {
        let (x, y) = p.words();
        let eval =
            codim3::evaluate(&preset_map(&p), &x, &y).map_err(|e| format!("{}: {e}", p.name))?;
        let (_, a0) = unstable_intersection(&eval.frame, &eval.x0).map_err(|e| e.to_string())?;
        let r = psi2_identity_residual(&eval.frame, &eval.quantities, a0);
        ensure(r < 1e-6, || format!("{}: residual {r:.3e}", p.name))?;
        worst = worst.max(r);
    }
    Ok(format!("max residual {worst:.2e}"))
}

fn asymptotics() -> Outcome {
    let mut parts = Vec::new();
    for p in presets::all() {
        let (x, y) = p.words();
        let f = preset_map(&p);
        let eval = codim3::evaluate(&f, &x, &y).map_err(|e| format!("{}: {e}", p.name))?;
        let rep =
            codim3::asymptotic_checks(&f, &x, &y, &eval, 3..=10).map_err(|e| e.to_string())?;
        ensure(rep.band_pass, || {
            format!("{}: band value {:.6}", p.name, rep.band_value)
        })?;
        if p.name == presets::rllr_llr().name {
            ensure(rep.a_pass, || {
                format!("a ratio {:?} vs {:.4}", rep.a_ratio_fit, rep.a_ratio_theory)
            })?;
            ensure(rep.b_pass, || {
                format!(
                    "b ratio {:?} vs {:.4}, monotone {}",
                    rep.b_ratio_fit, rep.b_ratio_theory, rep.b_monotone
                )
            })?;
            parts.push(format!(
                "a {:.3}/{:.3} b {:.3}/{:.3}",
                rep.a_ratio_fit.unwrap_or(f64::NAN),
                rep.a_ratio_theory,
                rep.b_ratio_fit.unwrap_or(f64::NAN),
                rep.b_ratio_theory
            ));
        }
        parts.push(format!("band {:.4}", rep.band_value));
    }
    Ok(parts.join(", "))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.5..1.5))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2d3d);
    let mut checked = 0;
    let mut degenerate = 0;
    let (mut worst_closure, mut worst_mult): (f64, f64) = (0.0, 0.0);
    for trial in 0..500 {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let a_l = random_matrix(&mut rng, dim);
        let xi = DVector::from_fn(dim, |_, _| rng.random_range(-1.5..1.5));
        let mut a_r = a_l.clone();
        a_r.set_column(0, &(a_l.column(0) + &xi));
        let b = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let f = make_map(a_l, a_r, b, 1e-12).map_err(|e| e.to_string())?;
        let n = rng.random_range(1..=6);
        let symbols: Vec<Symbol> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Symbol::L
                } else {
                    Symbol::R
                }
            })
            .collect();
        let w = Word::new(symbols).unwrap();
        let cycle = match find_cycle(&f, &w, 1e-9) {
            Ok(c) => c,
            Err(Error::DegenerateCycle { .. }) => {
                degenerate += 1;
                continue;
            }
            Err(e) => return Err(format!("trial {trial} {w}: {e}")),
        };
        let scale = cycle.points.iter().map(|x| x.amax()).fold(1.0, f64::max);
        let mut x = cycle.points[0].clone();
        let mut closure: f64 = 0.0;
        for (i, &s) in w.symbols().iter().enumerate() {
            x = f.apply_symbol(s, &x);
            closure = closure.max((&x - &cycle.points[(i + 1) % n]).amax() / scale);
        }
        ensure(closure <= 1e-9, || {
            format!("trial {trial} {w}: closure {closure:.3e}")
        })?;

        let mut m = DMatrix::<f64>::identity(dim, dim);
        for &s in w.symbols() {
            m = f.matrix(s) * m;
        }
        let oracle = oracle_eigenvalues(&m);
        let rho = oracle.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dist = multiset_distance(&cycle.multipliers, &oracle);
        ensure(dist <= 1e-9 * rho.max(1.0), || {
            format!("trial {trial} {w}: multiplier gap {dist:.3e} (rho {rho:.3})")
        })?;
        worst_closure = worst_closure.max(closure);
        worst_mult = worst_mult.max(dist / rho.max(1.0));
        checked += 1;
    }
    Ok(format!(
        "{checked} cycles, {degenerate} degenerate skipped, closure {worst_closure:.1e}, multipliers {worst_mult:.1e}"
    ))
}

fn all_words(n: usize) -> impl Iterator<Item = Word> {
    (0u32..1 << n).map(move |bits| {
        let symbols = (0..n)
            .map(|i| {
                if bits >> i & 1 == 1 {
                    Symbol::R
                } else {
                    Symbol::L
                }
            })
            .collect();
        Word::new(symbols).unwrap()
    })
}

fn symbolic_suite() -> Outcome {
    let mut pairs = 0usize;
    let mut implications = 0usize;
    let mut rotations = 0usize;
    for n in 1..=12 {
        for w in all_words(n) {
            for i in 0..n {
                ensure(w.flip(i).unwrap().flip(i).unwrap() == w, || {
                    format!("flip involution {w} at {i}")
                })?;
                let wi = w.cyclic_perm(i).unwrap();
                for j in 0..n {
                    let lhs = wi.cyclic_perm(j).unwrap();
                    ensure(lhs == w.cyclic_perm((i + j) % n).unwrap(), || {
                        format!("cyclic additivity {w} {i} {j}")
                    })?;
                }
            }
            if w.first() == Symbol::R {
                for d in 1..n {
                    if gcd(d, n) != 1 {
                        continue;
                    }
                    let m = mod_inverse(d, n).unwrap();
                    for ihat in 1..n {
                        if !check_rotation_flip(&w, d, ihat) {
                            continue;
                        }
                        let rot = rotational_word(ihat * m % n, m, n).map_err(|e| e.to_string())?;
                        ensure(w.cyclic_perm(d).unwrap() == rot, || {
                            format!("rotational word {w} d={d} ihat={ihat}: {rot}")
                        })?;
                        rotations += 1;
                    }
                }
            }
        }
    }
    for total in 2..=12 {
        for n in 1..total {
            let p = total - n;
            for x in all_words(n) {
                for y in all_words(p) {
                    if x.first() == y.first() {
                        continue;
                    }
                    pairs += 1;
                    if let Some(alpha) = concat_flip_alpha(&x, &y).map_err(|e| e.to_string())? {
                        let d = reinjection_offset(n, p);
                        ensure(check_rotation_flip(&x, d, alpha % n), || {
                            format!("rotation flip {x}/{y} alpha {alpha} d {d}")
                        })?;
                        implications += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{pairs} pairs, {implications} flip identities, {rotations} rotational words"
    ))
}

fn perturbation() -> Outcome {
    let p = presets::rllr_llr();
    let (x, y) = p.words();
    let params = BcnfParams {
        tau_l: p.params.tau_l + 1e-3,
        ..p.params
    };
    let rep = codim3::verify_theorems(&bcnf3(&params), &x, &y, &VerifyOptions::default());
    ensure(!rep.passed, || "verify passed after perturbation".into())?;
    let margins: Vec<(&str, f64)> = ["lambda_product", "s_orbit"]
        .into_iter()
        .filter_map(|id| Some((id, rep.check(id)?.margin?)))
        .collect();
    ensure(margins.iter().any(|m| m.1 <= -1e-5), || {
        format!("margins {margins:?}")
    })?;
    Ok(margins
        .iter()
        .map(|(id, m)| format!("{id} {m:.2e}"))
        .collect::<Vec<_>>()
        .join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("residual reproduction", residuals),
        ("solver recovery", solver_recovery),
        ("combinatorics", combinatorics),
        ("attractor counts", attractor_counts),
        ("homoclinic structure", homoclinic_structure),
        ("psi2 identity", psi2_identity),
        ("asymptotics", asymptotics),
        ("oracle equivalence", oracle_equivalence),
        ("symbolic property suite", symbolic_suite),
        ("perturbation sensitivity", perturbation),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
