use proptest::prelude::*;
use quench_core::pdesim::*;
use quench_core::travelingwave::Ramp;
use quench_core::Error;

fn lab(domain: (f64, f64), n: usize, t_end: f64) -> SimConfig {
    let h = (domain.1 - domain.0) / (n - 1) as f64;
    SimConfig {
        frame: Frame::Lab { alpha: 0.0 },
        epsilon: 0.01,
        ramp: Ramp::Tanh,
        frozen_mu: None,
        domain,
        n,
        mesh: None,
        t_end,
        dt: 0.4 * h * h,
        ic: InitialCondition::Bump {
            center: 0.0,
            width: 1.0,
            amplitude: 0.1,
        },
        snapshot_every: None,
        track_every: 1.0,
        level: DEFAULT_LEVEL,
    }
}

#[test]
fn linear_ramp_path_closed_form() {
    let v = linear_ramp_path(0.005, 0.0, 10.0);
    assert!((v - 2.98142396999971960).abs() < 1e-13);
    let grid: Vec<f64> = (0..=20).map(|i| 10.0 * i as f64).collect();
    let q = predicted_front_path(0.005, Ramp::LinearClipped, 1.5, &grid).unwrap();
    for (t, x) in grid.iter().zip(&q) {
        assert!((x - linear_ramp_path(0.005, 1.5, *t)).abs() < 1e-9, "t = {t}");
    }
    assert_eq!(q[0], 1.5);
}

#[test]
fn tanh_path_self_converges() {
    let coarse: Vec<f64> = (0..=100).map(f64::from).collect();
    let fine: Vec<f64> = (0..=200).map(|i| 0.5 * i as f64).collect();
    let a = *predicted_front_path(0.005, Ramp::Tanh, 0.0, &coarse).unwrap().last().unwrap();
    let b = *predicted_front_path(0.005, Ramp::Tanh, 0.0, &fine).unwrap().last().unwrap();
    assert!((a - b).abs() < 1e-8);
    assert!((a - 92.6771270833511365).abs() < 1e-8);
    assert!(matches!(
        predicted_front_path(0.005, Ramp::Tanh, 0.0, &[-1.0]),
        Err(Error::Domain(_))
    ));
}

#[test]
fn envelope_velocity_examples() {
    assert!((envelope_velocity(-1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
    assert!((envelope_velocity(-0.5, 0.25).unwrap() - 1.0).abs() < 1e-15);
    assert!(matches!(envelope_velocity(0.0, 1.0), Err(Error::Domain(_))));
    let (nu, s) = min_envelope_velocity(0.36).unwrap();
    assert!((nu + 0.6).abs() < 1e-6 && (s - 1.2).abs() < 1e-10);
}

#[test]
fn frozen_unstable_state_spreads_at_two() {
    let mut cfg = lab((-100.0, 100.0), 801, 60.0);
    cfg.frozen_mu = Some(1.0);
    cfg.ic = InitialCondition::Bump {
        center: -90.0,
        width: 1.0,
        amplitude: 0.1,
    };
    let r = simulate(&cfg).unwrap();
    let s = r.track.mean_speed(30.0, 60.0).unwrap();
    assert!((s - 2.0).abs() < 0.05, "speed {s}");
    assert!(r.track.flagged().is_empty());
}

#[test]
fn frozen_stable_state_decays() {
    let mut cfg = lab((-50.0, 50.0), 401, 40.0);
    cfg.frozen_mu = Some(-1.0);
    let r = simulate(&cfg).unwrap();
    assert!(r.final_state.u.iter().all(|v| v.abs() < 1e-6));
}

#[test]
fn dt_bound_and_frame_checks() {
    let mut cfg = lab((-50.0, 50.0), 401, 1.0);
    cfg.dt *= 1.5;
    assert!(matches!(simulate(&cfg), Err(Error::InvalidInput(_))));
    let mut cfg = lab((-50.0, 50.0), 401, 1.0);
    cfg.ic = InitialCondition::FrontSeed;
    assert!(simulate(&cfg).is_err());
}

#[test]
fn unhealthy_initial_data_rejected() {
    let mut cfg = lab((-50.0, 50.0), 401, 5.0);
    cfg.ic = InitialCondition::Profile(vec![2e6; 401]);
    assert!(matches!(simulate(&cfg), Err(Error::InvalidInput(_))));
    let mut bad = vec![0.0; 401];
    bad[200] = f64::NAN;
    cfg.ic = InitialCondition::Profile(bad);
    assert!(matches!(simulate(&cfg), Err(Error::InvalidInput(_))));
}

#[test]
fn large_data_relax_without_abort() {
    let mut cfg = lab((-50.0, 50.0), 401, 5.0);
    cfg.frozen_mu = Some(1.0);
    cfg.ic = InitialCondition::Profile(vec![1e5; 401]);
    let r = simulate(&cfg).unwrap();
    assert!(r.final_state.u.iter().all(|v| (v - 1.0).abs() < 1e-3));
}

#[test]
fn prediction_against_itself_is_zero() {
    let t: Vec<f64> = (0..=50).map(|i| 4.0 * i as f64).collect();
    let x = predicted_front_path(0.005, Ramp::Tanh, 1.0, &t).unwrap();
    let d = difference_series(&t, &x, 0.005, Ramp::Tanh, 1.0, 100.0).unwrap();
    assert!(d.difference.iter().all(|v| *v == 0.0));
}

#[test]
fn quench_front_self_converges() {
    let base = SimConfig::homogeneous_quench(0.005);
    let mut fine = base.clone();
    fine.n = 2 * base.n - 1;
    fine.dt = base.dt / 4.0;
    let a = simulate(&base).unwrap();
    let b = simulate(&fine).unwrap();
    let (xa, xb) = (*a.track.x_fr_num.last().unwrap(), *b.track.x_fr_num.last().unwrap());
    assert!((xa - xb).abs() < 2e-2, "{xa} vs {xb}");
    assert!(!a.boundary_warning);
}

#[test]
fn slower_quench_still_overtakes_prediction() {
    let first_positive = |eps: f64, half: f64, t_end: f64| {
        let mut cfg = SimConfig::homogeneous_quench(eps);
        cfg.domain = (-half, half);
        cfg.n = (8.0 * half) as usize + 1;
        cfg.t_end = t_end;
        let c = compare_homogeneous_quench(&cfg, None).unwrap();
        assert!(c.nonnegative_after_transient(), "eps = {eps}");
        let i = c.difference.iter().rposition(|d| *d < 0.0).unwrap();
        c.times[i + 1]
    };
    let fast = first_positive(0.005, 700.0, 400.0);
    let slow = first_positive(0.0025, 900.0, 560.0);
    assert!(slow > fast, "{slow} <= {fast}");
}

fn ordered_pair(alpha: f64, a1: f64, a2: f64) -> (SimResult, SimResult) {
    let mut cfg = lab((-40.0, 40.0), 161, 30.0);
    cfg.frame = Frame::Lab { alpha };
    cfg.epsilon = 0.05;
    cfg.snapshot_every = Some(5.0);
    cfg.ic = InitialCondition::Bump { center: 0.0, width: 2.0, amplitude: a1 };
    let lo = simulate(&cfg).unwrap();
    cfg.ic = InitialCondition::Bump { center: 0.0, width: 2.0, amplitude: a2 };
    let hi = simulate(&cfg).unwrap();
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ordered_data_stay_ordered(alpha in 0.0f64..2.0, a1 in 0.01f64..1.0, gap in 0.0f64..0.5) {
        let (lo, hi) = ordered_pair(alpha, a1, a1 + gap);
        for (s, t) in lo.snapshots.iter().zip(&hi.snapshots) {
            for (u, v) in s.u.iter().zip(&t.u) {
                prop_assert!(u <= &(v + 1e-12), "t = {}: {u} > {v}", s.t);
            }
        }
    }

    #[test]
    fn sup_norm_stays_in_invariant_region(alpha in 0.0f64..2.0, amp in 0.0f64..1.5) {
        let (run, _) = ordered_pair(alpha, amp, amp);
        let bound = amp.max(1.0) + 1e-6;
        for s in &run.snapshots {
            prop_assert!(s.u.iter().all(|v| v.abs() <= bound));
        }
    }
}
