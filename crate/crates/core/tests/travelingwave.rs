use proptest::prelude::*;
use quench_core::painleve::solve_hastings_mcleod;
use quench_core::solvercore::{Mesh, NewtonReport};
use quench_core::travelingwave::*;
use quench_core::Error;
use std::sync::OnceLock;

fn front() -> &'static FrontSolution {
    static F: OnceLock<FrontSolution> = OnceLock::new();
    F.get_or_init(|| {
        let p = QuenchParams::new(1.2, 0.0025, Ramp::Tanh).unwrap();
        solve_front(&p, &FrontOptions::default(), None).unwrap()
    })
}

#[test]
fn dispersion_branch_point_examples() {
    let d = dispersion_branch_point(1.2, 0.36);
    assert!(d.lambda_br.abs() < 1e-15 && (d.nu_br + 0.6).abs() < 1e-15 && (d.mu_c - 0.36).abs() < 1e-15);
    let d = dispersion_branch_point(0.0, 1.0);
    assert_eq!((d.lambda_br, d.nu_br), (1.0, 0.0));
    let d = dispersion_branch_point(2.0, 1.0);
    assert_eq!((d.lambda_br, d.mu_c), (0.0, 1.0));
}

#[test]
fn equilibrium_eigenvalues_closed_form() {
    let s = equilibrium_eigenpairs(1.2, 0.0);
    assert!((s.left.fast_unstable - 1.76619037896906007).abs() < 1e-14);
    // Linearisation about u = 1, μ = 1: ν² − cν − 2 = 0.
    assert!((s.right.fast_stable + 0.936229149573721700).abs() < 1e-14);
    let s = equilibrium_eigenpairs(0.0, 0.01);
    assert_eq!((s.left.slow, s.right.slow), (0.02, -0.02));
}

#[test]
fn predicted_delay_examples() {
    let v = predicted_delay(1.2, 0.0025).unwrap();
    assert!((v - 0.399261816208613331).abs() < 1e-12);
    assert!((v - 0.39927).abs() < 1e-5);
    assert_eq!(predicted_delay(1.2, 0.0).unwrap(), 0.36);
    let omega = quench_core::specfun::omega0().value;
    let small_c = predicted_delay(1e-4, 1e-3).unwrap();
    assert!((small_c - omega * 1e-2).abs() < 1e-8);
    assert!(predicted_delay(0.0, 1e-3).is_err());
}

fn synthetic(u: Vec<f64>) -> FrontSolution {
    let mesh = Mesh::uniform(-100.0, 100.0, u.len()).unwrap();
    let params = QuenchParams::new(1.2, 0.01, Ramp::Tanh).unwrap();
    let mu = mesh.nodes().iter().map(|&z| params.mu(z)).collect();
    FrontSolution {
        params,
        v: vec![0.0; u.len()],
        mesh,
        log_u: u.iter().map(|v| v.ln()).collect(),
        u,
        mu,
        report: NewtonReport::default(),
        interface: None,
    }
}

#[test]
fn front_location_on_synthetic_profiles() {
    let n = 201;
    let step: Vec<f64> = (0..n).map(|i| if i >= 130 { 0.6 } else { 0.0 }).collect();
    let sol = synthetic(step);
    let zeta0 = sol.mesh.nodes()[130];
    let loc = front_location(&sol).unwrap();
    // Linear interpolation from 0 to 0.6 through 0.3 lands mid-cell.
    let mid = 0.5 * (sol.mu[129] + sol.mu[130]);
    assert!((loc.mu_fr - mid).abs() < 1e-15);
    let exact: Vec<f64> = (0..n).map(|i| if i >= 130 { 0.3 } else { 0.0 }).collect();
    let loc = front_location(&synthetic(exact)).unwrap();
    assert_eq!(loc.mu_fr, (0.01 * zeta0).tanh());
    assert_eq!(loc.zeta_fr, zeta0);
    assert!(matches!(front_location(&synthetic(vec![0.0; n])), Err(Error::NoInterface { .. })));
}

#[test]
fn front_converges_with_delay() {
    let f = front();
    assert!(f.report.converged);
    let mu_fr = f.interface.unwrap().mu_fr;
    assert!(mu_fr > 0.36);
    let pred = predicted_delay(1.2, 0.0025).unwrap() - 0.36;
    assert!(((mu_fr - 0.36) - pred).abs() < 0.2 * pred, "{mu_fr} vs {pred}");
    let (l, r) = f.boundary_residuals();
    assert!(l < 1e-8 && r < 1e-8, "{l} {r}");
}

#[test]
fn front_is_monotone_and_bounded() {
    let f = front();
    let min_step = f.u.windows(2).map(|w| w[1] - w[0]).fold(f64::MAX, f64::min);
    assert!(min_step >= -1e-9, "{min_step}");
    assert!(f.u.iter().all(|&u| (0.0..=1.0 + 1e-6).contains(&u)));
    for (&z, &m) in f.mesh.nodes().iter().zip(&f.mu) {
        assert!((m - (0.0025 * z).tanh()).abs() <= 1e-12);
    }
}

#[test]
fn front_plateaus() {
    let f = front();
    let (mu_c, d) = (0.36, 0.1);
    for (&u, &m) in f.u.iter().zip(&f.mu) {
        if m <= mu_c - d {
            assert!(u < 1e-3, "u = {u} at mu = {m}");
        }
        if m >= mu_c + d {
            assert!((u - m.sqrt()).abs() < 1e-2, "u = {u} at mu = {m}");
        }
    }
}

#[test]
fn interface_is_mesh_converged() {
    let f = front();
    let p = f.params;
    let fine = solve_front(
        &p,
        &FrontOptions {
            nodes: Some(2 * f.u.len()),
            ..Default::default()
        },
        Some(f),
    )
    .unwrap();
    let d = (fine.interface.unwrap().mu_fr - f.interface.unwrap().mu_fr).abs();
    assert!(d < 1e-4, "mu_fr moved by {d}");
}

#[test]
fn stationary_front_matches_rescaled_hastings_mcleod() {
    let hm = solve_hastings_mcleod(12.0, 8.0, 8001).unwrap();
    let p = QuenchParams::new(0.0, 0.00981, Ramp::Tanh).unwrap();
    let f = solve_front(&p, &FrontOptions::default(), None).unwrap();
    assert!(hm_deviation(&f, &hm).unwrap() < 0.05);
    assert!(amplitude_at_pitchfork(&f).unwrap() > 0.0);
}

#[test]
fn amplitude_slope_on_synthetic_data() {
    let eps: Vec<f64> = (0..6).map(|i| 1e-3 * 10f64.powf(i as f64 / 5.0)).collect();
    let cube: Vec<_> = eps.iter().map(|&e| (e, e.powf(1.0 / 3.0), true)).collect();
    assert!((stationary_amplitude_slope(&cube).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let flat: Vec<_> = eps.iter().map(|&e| (e, 0.7, true)).collect();
    assert!(stationary_amplitude_slope(&flat).unwrap().abs() < 1e-12);
    let few: Vec<_> = eps.iter().enumerate().map(|(i, &e)| (e, 1.0, i < 3)).collect();
    assert!(matches!(stationary_amplitude_slope(&few), Err(Error::InsufficientData(_))));
}

#[test]
fn invalid_parameters_rejected() {
    assert!(QuenchParams::new(2.0, 0.01, Ramp::Tanh).is_err());
    assert!(QuenchParams::new(1.0, 0.2, Ramp::Tanh).is_err());
    assert!(QuenchParams::new(1.0, 0.0, Ramp::Tanh).is_err());
    let p = QuenchParams::new(1.2, 0.01, Ramp::Tanh).unwrap();
    let short = FrontOptions {
        half_length: Some(400.0),
        ..Default::default()
    };
    assert!(solve_front(&p, &short, None).is_err());
    let coarse = FrontOptions {
        nodes: Some(1000),
        ..Default::default()
    };
    assert!(solve_front(&p, &coarse, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn frozen_stable_manifold_obeys_trapping_bound(theta in 1e-3f64..=0.05, c in 0.8f64..1.6) {
        let us = stable_manifold_crossing(c, theta).unwrap();
        prop_assert!(us > 0.0);
        prop_assert!(us <= theta / (theta + c * c / 4.0).sqrt());
    }

    #[test]
    fn frozen_stable_manifold_leaves_along_eigenvector(theta in 1e-3f64..=0.05, c in 0.8f64..1.6) {
        let s = stable_manifold_secant(c, theta, 1e-3).unwrap();
        prop_assert!((s - stable_manifold_slope(c, theta)).abs() < 1e-3);
    }

    #[test]
    fn ramp_inverse_round_trips(eps in 1e-4f64..0.1, mu in -0.99f64..0.99) {
        for ramp in [Ramp::Tanh, Ramp::LinearClipped] {
            let z = ramp.inverse(eps, mu);
            prop_assert!((ramp.mu(eps, z) - mu).abs() < 1e-12);
        }
    }
}
