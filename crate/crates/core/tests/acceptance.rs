//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bergman_core::geometry::{polarize, scalar_curvature_at_base, Model, PotentialJet};
use bergman_core::jet::{Jet, JetMatrix};
use bergman_core::kuranishi::{check_identities, good_contour_check, theta_map, ContourCheckConfig};
use bergman_core::oracle::kernels::exact_cp1_kernel;
use bergman_core::oracle::reproducing::{reproducing_sweep, Polynomial, ReproducingConfig};
use bergman_core::oracle::sweep::{expansion_error_sweep, SweepConfig};
use bergman_core::random::{random_bundle_metric, random_quartic_potential, random_vector_expansion, rng};
use bergman_core::recursion::{assemble_kernel, expand, required_potential_degree, verify_negligible};
use bergman_core::scalar::{Coefficient, GaussianRational as Q};
use bergman_core::twisted::{expand_twisted, predicted_b1, BundleMetricJet};
use bergman_core::Result;
use num_complex::Complex64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn flat_exactness() -> Result<Outcome> {
    let order = 4;
    let degree = 2;
    for n in [1, 2] {
        let phi = PotentialJet::<Q>::model(Model::Flat, n, required_potential_degree(order, degree))?;
        let seq = expand(&phi, order, degree)?;
        let b0 = seq.scalar(0);
        if *b0 != Jet::one(2 * n, b0.trunc_degree()) {
            return outcome(false, format!("n={n}: b0 is not identically 1"));
        }
        for m in 1..=order {
            if !seq.scalar(m).is_zero() {
                return outcome(false, format!("n={n}: b{m} has {} nonzero coefficients", seq.scalar(m).len()));
            }
        }
    }
    outcome(true, "n=1,2, N=4: b0 = 1 and b1..b4 = 0 as full jets")
}

fn b1_half_scalar_curvature() -> Result<Outcome> {
    let d = required_potential_degree(1, 0);
    for seed in 0..20u64 {
        let n = 1 + (seed % 2) as usize;
        let phi = random_quartic_potential::<Q>(&mut rng(seed), n, d)?;
        let b1 = expand(&phi, 1, 0)?.scalar_base_values()[1].clone();
        let s = scalar_curvature_at_base(&phi)?;
        if b1 != s.mul_ref(&Q::from_ratio(1, 2)) {
            return outcome(false, format!("seed {seed}: b1 = {b1}, s/2 = {}", s.mul_ref(&Q::from_ratio(1, 2))));
        }
    }
    outcome(true, "20 random potentials (n=1,2): b1(0,0) = s(0)/2 exactly")
}

fn fubini_study_exactness() -> Result<Outcome> {
    let phi = PotentialJet::<Q>::model(Model::FubiniStudy, 1, required_potential_degree(3, 0))?;
    let seq = expand(&phi, 3, 0)?;
    let base = seq.scalar_base_values();
    let expected: Vec<Q> = [1, 1, 0, 0].iter().map(|&v| Q::from_int(v)).collect();
    if base != expected {
        return outcome(false, format!("base values {base:?}"));
    }
    let psi = polarize(&phi);
    let origin = [Complex64::new(0.0, 0.0)];
    let mut worst = 0.0f64;
    for k in [1u32, 5, 20, 100] {
        let expansion = assemble_kernel(&seq, &psi, k as f64, 1.0)?.bergman_function(&origin).value.re;
        let oracle = exact_cp1_kernel(k).bergman_function(&origin);
        worst = worst.max((expansion - oracle).abs() / oracle);
    }
    outcome(
        worst <= 1e-12,
        format!("base values [1, 1, 0, 0]; max relative gap to CP1 oracle {worst:.2e} (tol 1e-12)"),
    )
}

fn decay_rate() -> Result<Outcome> {
    let ks: Vec<u32> = (10..=40).step_by(5).collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for order in 0..=2usize {
        let r = expansion_error_sweep(Model::RadialQuartic { c: 0.1 }, 1, order, &ks, &SweepConfig::default())?;
        let slope = r.slope.unwrap_or(f64::NAN);
        let drift = r.max_drift.unwrap_or(f64::NAN);
        pass &= slope <= -(order as f64 + 0.5) && drift < 1e-10;
        parts.push(format!("N={order} slope {slope:.3} drift {drift:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn negligible_amplitudes() -> Result<Outcome> {
    for seed in 0..100u64 {
        let n = 1 + (seed % 2) as usize;
        let a = random_vector_expansion::<Q>(&mut rng(seed), n, 3, 8);
        let report = verify_negligible(&a)?;
        if report.max_residual() != 0.0 {
            return outcome(false, format!("seed {seed}: residual {:.3e}", report.max_residual()));
        }
    }
    outcome(true, "100 random A (n=1,2, N=3): S(nabla A) vanishes on y = x at every order")
}

fn kuranishi_identities() -> Result<Outcome> {
    let mut potentials = Vec::new();
    for model in [Model::Flat, Model::FubiniStudy] {
        for n in [1, 2] {
            potentials.push((format!("{model} n={n}"), PotentialJet::<Q>::model(model, n, 6)?));
        }
    }
    for seed in 0..10u64 {
        let n = 1 + (seed % 2) as usize;
        potentials.push((format!("random seed {seed}"), random_quartic_potential::<Q>(&mut rng(seed), n, 6)?));
    }
    for (name, phi) in &potentials {
        let r = check_identities(phi, 0.0)?;
        if !r.all_hold() {
            return outcome(false, format!("{name}: {r:?}"));
        }
    }
    outcome(
        true,
        format!("{} potentials: division, diagonal and round-trip identities exact", potentials.len()),
    )
}

fn twisted_b1() -> Result<Outcome> {
    let d = required_potential_degree(1, 0);
    for seed in 0..10u64 {
        let n = 1 + (seed % 2) as usize;
        let mut r = rng(1000 + seed);
        let phi = random_quartic_potential::<Q>(&mut r, n, d)?;
        let g = random_bundle_metric::<Q>(&mut r, n, 2, d)?;
        let got = &expand_twisted(&phi, &g, 1, 0)?.base_values()[1];
        let want = predicted_b1(&phi, &g)?;
        if *got != want {
            return outcome(false, format!("seed {seed}: b1 {got:?} vs {want:?}"));
        }
    }
    for order in 0..=2usize {
        let degree = 1;
        for (label, phi) in [
            ("fubini-study", PotentialJet::<Q>::model(Model::FubiniStudy, 1, required_potential_degree(order, degree))?),
            ("random", random_quartic_potential::<Q>(&mut rng(77), 1, required_potential_degree(order, degree))?),
        ] {
            let plain = expand(&phi, order, degree)?;
            let g = BundleMetricJet::trivial(1, 1, phi.degree());
            let twisted = expand_twisted(&phi, &g, order, degree)?;
            let same = plain.b.iter().zip(&twisted.b).all(|(a, b): (&JetMatrix<Q>, _)| a == b);
            if !same {
                return outcome(false, format!("G = I differs from untwisted for {label} at N={order}"));
            }
        }
    }
    outcome(true, "10 rank-2 pairs: b1 = (s/2)I + Lambda Theta_E exactly; G = I matches untwisted for N = 0..2")
}

fn reproducing_property() -> Result<Outcome> {
    let ks = [10.0, 20.0, 30.0, 40.0, 50.0];
    let mut parts = Vec::new();
    let mut pass = true;
    for j in 0..=2usize {
        for x in [0.0, 0.1] {
            let s = reproducing_sweep(
                &Polynomial::monomial(j),
                Model::Flat,
                Complex64::new(x, 0.0),
                &ks,
                &ReproducingConfig::default(),
            )?;
            pass &= s.decays(0.05);
            if s.at_floor {
                parts.push(format!("u=y^{j} x={x}: cancels to rounding"));
            } else {
                parts.push(format!(
                    "u=y^{j} x={x}: rate {:.3}{}",
                    s.rate.unwrap_or(f64::NAN),
                    if s.monotone { "" } else { " (not monotone)" }
                ));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn good_contour() -> Result<Outcome> {
    let phi = PotentialJet::<Complex64>::model(Model::FubiniStudy, 1, 8)?;
    let psi = polarize(&phi);
    let theta = theta_map(&psi)?;
    let report = good_contour_check(&phi, &psi, &theta, &ContourCheckConfig::default());
    outcome(
        report.violations == 0 && report.samples == 10_000,
        format!("{} samples, {} violations, max slack {:.3e}", report.samples, report.violations, report.max_slack),
    )
}

fn growth_witness() -> Result<Outcome> {
    let mut r = rng(10);
    let mut points = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..50 {
        let rad = 5.0 * r.random::<f64>().sqrt();
        points.push(Complex64::from_polar(rad, 2.0 * PI * r.random::<f64>()));
    }
    let ratios: Vec<f64> = (1..=100u32)
        .map(|k| {
            let ker = exact_cp1_kernel(k);
            points
                .iter()
                .map(|x| ker.bergman_function(&[*x]) / k as f64)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let bounded = ratios.iter().all(|&v| v.is_finite() && v >= 1.0 / PI - 1e-9);
    let last_gap = ratios[99] - 1.0 / PI;
    outcome(
        monotone && bounded && last_gap < 1e-2,
        format!("max B_k/k from {:.6} (k=1) to {:.6} (k=100), 1/pi = {:.6}", ratios[0], ratios[99], 1.0 / PI),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);
    let criteria: [Criterion; 10] = [
        ("flat model exactness", flat_exactness, Duration::from_secs(10)),
        ("b1 = s/2 on random potentials", b1_half_scalar_curvature, Duration::from_secs(120)),
        ("Fubini-Study exactness and CP1 oracle", fubini_study_exactness, Duration::from_secs(30)),
        ("error decay rate on the radial quartic", decay_rate, Duration::from_secs(300)),
        ("negligible amplitudes under S", negligible_amplitudes, Duration::from_secs(60)),
        ("division and inversion identities", kuranishi_identities, Duration::from_secs(60)),
        ("twisted b1 and trivial-bundle reduction", twisted_b1, Duration::from_secs(120)),
        ("reproducing property on the flat weight", reproducing_property, Duration::from_secs(300)),
        ("good-contour sampling on Fubini-Study", good_contour, Duration::from_secs(10)),
        ("B_k <= C k^n witness on CP1", growth_witness, Duration::from_secs(30)),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *limit, o.detail),
            Err(e) => (false, format!("error [{}]: {e}", e.code())),
        };
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs());
        println!(
            "criterion {:>2} {}: {name}: {detail} ({timing})",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
