use quench_core::painleve::*;
use quench_core::specfun::{airy, AI_ZERO};
use quench_core::Error;
use std::sync::OnceLock;

fn hm() -> &'static HmSolution {
    static S: OnceLock<HmSolution> = OnceLock::new();
    S.get_or_init(|| solve_hastings_mcleod(12.0, 8.0, 8001).unwrap())
}

fn hm_fine() -> &'static HmSolution {
    static S: OnceLock<HmSolution> = OnceLock::new();
    S.get_or_init(|| solve_hastings_mcleod(12.0, 8.0, 16001).unwrap())
}

#[test]
fn solution_is_positive_decreasing_and_closed() {
    let s = hm();
    assert!(s.report.converged);
    assert!(s.w.iter().all(|&w| w > 0.0));
    assert!(s.wprime.iter().all(|&d| d < 0.0));
    let (l, r) = s.boundary_residuals;
    assert!(l <= 1e-8 && r <= 1e-8, "{l} {r}");
    let max_rise = s.w.windows(2).map(|p| p[1] - p[0]).fold(f64::MIN, f64::max);
    assert!(max_rise <= 1e-9);
}

#[test]
fn value_at_origin_is_stable_and_above_airy() {
    let w0 = hm().eval(0.0).unwrap();
    assert!(w0 >= AI_ZERO, "{w0}");
    assert!((hm_fine().eval(0.0).unwrap() - w0).abs() < 1e-6);
    // Wider window at the same spacing.
    let wide = solve_hastings_mcleod(16.0, 10.0, 10401).unwrap();
    assert!((wide.eval(0.0).unwrap() - w0).abs() < 1e-6);
}

#[test]
fn asymptotic_ends() {
    let s = hm();
    let lp = s.mesh.last();
    let ratio = s.w.last().unwrap() / airy(lp).unwrap().value;
    assert!((ratio - 1.0).abs() < 1e-4, "{ratio}");
    let eta: f64 = -12.0;
    let scaled = s.w[0] * (-eta / 2.0).powf(-0.5);
    assert!((scaled - (1.0 + 1.0 / (8.0 * eta.powi(3)))).abs() < 1e-5);
}

#[test]
fn discrete_residual_is_second_order() {
    // The five-point residual of the three-point solution measures its
    // truncation error.
    let res = |s: &HmSolution| {
        let (x, w, h) = (s.mesh.nodes(), &s.w, s.step());
        (2..w.len() - 2)
            .map(|i| {
                let d2 = (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i] + 16.0 * w[i + 1] - w[i + 2]) / (12.0 * h * h);
                (d2 - x[i] * w[i] - 2.0 * w[i].powi(3)).abs()
            })
            .fold(0.0, f64::max)
    };
    let coarse = solve_hastings_mcleod(12.0, 8.0, 4001).unwrap();
    let order = (res(&coarse) / res(hm())).log2();
    assert!((order - 2.0).abs() <= 0.2, "order {order}");
    let order = (res(hm()) / res(hm_fine())).log2();
    assert!((order - 2.0).abs() <= 0.2, "order {order}");
}

#[test]
fn backward_shooting_reproduces_interior() {
    let s = hm();
    let target = -s.mesh.nodes()[0] / 2.0;
    let shot = shoot_backward(s, Some(hm_fine()), -target).unwrap();
    let bvp = s.eval(-target).unwrap();
    assert!((shot - bvp).abs() < 1e-3, "{shot} vs {bvp}");
}

#[test]
fn certificates_hold_for_converged_solution() {
    let s = hm();
    let c = certify_potential_positive(s).unwrap();
    assert!(c.min_value > 0.0 && c.lower_bound() > 0.0);
    let lb = certify_lower_bound(s).unwrap();
    assert!(lb.min_gap > 0.0);
    certify_monotone(s).unwrap();
    assert!(certify_above_airy_at_origin(s).unwrap() >= AI_ZERO);
    // V ≥ η on η ≥ 0.
    for (&e, &w) in s.mesh.nodes().iter().zip(&s.w) {
        if e >= 0.0 {
            assert!(e + 6.0 * w * w >= e);
        }
    }
}

#[test]
fn halved_profile_fails_potential_certificate() {
    let mut s = hm().clone();
    for (w, &e) in s.w.iter_mut().zip(s.mesh.nodes()) {
        if e < -2.0 {
            *w /= 2.0;
        }
    }
    match certify_potential_positive(&s) {
        Err(Error::Certificate { eta, .. }) => assert!(eta < -2.0),
        other => panic!("expected certificate failure, got {other:?}"),
    }
}

#[test]
fn weak_profile_fails_lower_bound() {
    let mut s = hm().clone();
    for (w, &e) in s.w.iter_mut().zip(s.mesh.nodes()) {
        *w = (-e / 8.0).max(0.0).sqrt();
    }
    match certify_lower_bound(&s) {
        Err(Error::Certificate { eta, .. }) => assert!(eta < 0.0),
        other => panic!("expected failure, got {other:?}"),
    }
}

#[test]
fn linearization_ground_state_is_negative() {
    let spec = linearization_ground_state(hm()).unwrap();
    assert!(spec.largest() < 0.0);
    let fine = linearization_ground_state(hm_fine()).unwrap();
    assert!(fine.largest() < 0.0);
}

fn is_pole(t: &TailClass) -> bool {
    matches!(t, TailClass::Pole { .. })
}

#[test]
fn airy_tails_split_across_the_separatrix() {
    assert_eq!(classify_airy_tail(0.0, 12.0).unwrap(), TailClass::OscillatoryDecay { sign_changes: 0 });
    let below = classify_airy_tail(0.5, 12.0).unwrap();
    let above = classify_airy_tail(1.5, 12.0).unwrap();
    assert_ne!(is_pole(&below), is_pole(&above));
    assert_eq!(classify_airy_tail(-1.0, 12.0).unwrap(), TailClass::Separatrix { sign: -1 });
    // Poles recede as |k| approaches 1 from above.
    let pos = |k: f64| match classify_airy_tail(k, 12.0).unwrap() {
        TailClass::Pole { position, bracket } => {
            assert!(bracket.0 <= position && position <= bracket.1);
            position
        }
        other => panic!("k = {k}: {other:?}"),
    };
    assert!(pos(1.1) < pos(1.5) && pos(1.5) < pos(2.0));
}

#[test]
fn rejects_short_windows() {
    assert!(solve_hastings_mcleod(6.0, 8.0, 8001).is_err());
    assert!(solve_hastings_mcleod(12.0, 4.0, 8001).is_err());
    assert!(solve_hastings_mcleod(12.0, 8.0, 2000).is_err());
    assert!(shoot_backward(hm(), Some(hm()), -1.0).is_err());
}
