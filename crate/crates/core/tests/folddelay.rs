use proptest::prelude::*;
use quench_core::folddelay::*;
use quench_core::Error;

#[test]
fn prefactor_closed_form() {
    assert!((predicted_prefactor(1.2) - 2.13145931152342939).abs() < 1e-12);
    assert!((predicted_prefactor(0.4) - 2.33561276368690525).abs() < 1e-12);
    let nf = normal_form_transform(1.2).unwrap();
    assert!((nf.x_scale - 0.954786553541869554).abs() < 1e-14);
    assert!((nf.y_scale - 0.911617362824361337).abs() < 1e-14);
    assert!((nf.g(0.0) + 1.0).abs() < 1e-14);
    assert!(normal_form_transform(2.0).is_err());
}

#[test]
fn blowup_delay_near_prediction() {
    let r = run_fold_passage(1.2, 1e-4, 0.25).unwrap();
    let predicted = 0.00459208988113755;
    let measured = r.theta_blowup.unwrap();
    assert!((measured - predicted).abs() < 0.01 * predicted, "{measured}");
    assert!(r.theta_exit < measured && r.theta_exit > 0.0);
}

#[test]
fn charts_agree_on_section_value() {
    for eps in [1e-4, 1e-3, 1e-2] {
        let direct = run_fold_passage_with(1.2, eps, 0.25, Chart::Direct, 0.0).unwrap();
        let compact = run_fold_passage_with(1.2, eps, 0.25, Chart::Compact, 0.0).unwrap();
        let switched = run_fold_passage(1.2, eps, 0.25).unwrap();
        assert!((direct.theta_exit - compact.theta_exit).abs() < 1e-6);
        assert!((direct.theta_exit - switched.theta_exit).abs() < 1e-6);
        assert!(direct.theta_blowup.is_none() && !direct.compact_chart_used);
        let (a, b) = (compact.theta_blowup.unwrap(), switched.theta_blowup.unwrap());
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn exit_insensitive_to_start_off_slow_manifold() {
    let base = run_fold_passage(1.2, 1e-4, 0.25).unwrap().theta_exit;
    for dz in [-0.05, 0.05] {
        let r = run_fold_passage_with(1.2, 1e-4, 0.25, Chart::Switched, dz).unwrap();
        assert!((r.theta_exit - base).abs() < 1e-8, "dz = {dz}: {}", r.theta_exit - base);
    }
}

#[test]
fn normal_form_reproduces_exit() {
    let nf = normal_form_transform(1.2).unwrap();
    for eps in [1e-4, 1e-3] {
        let direct = run_fold_passage(1.2, eps, 0.25).unwrap().theta_exit;
        let via_nf = nf.theta_exit(eps, 0.25).unwrap();
        assert!((direct - via_nf).abs() < 1e-8, "{direct} vs {via_nf}");
    }
}

fn synthetic(c: f64, eps: &[f64], a: f64, p: f64) -> Vec<FoldDelayRecord> {
    eps.iter()
        .map(|&e| FoldDelayRecord {
            c,
            epsilon: e,
            delta: 0.25,
            theta_exit: a * e.powf(p),
            theta_blowup: Some(a * e.powf(p)),
            compact_chart_used: true,
        })
        .collect()
}

#[test]
fn fit_recovers_synthetic_law() {
    let eps = log_grid(1e-5, 1e-3, 7);
    let f = fit_delay_scaling(&synthetic(1.2, &eps, 2.0, 2.0 / 3.0), DelayMeasure::Blowup).unwrap();
    assert!((f.exponent - 2.0 / 3.0).abs() < 1e-12);
    assert!((f.prefactor - 2.0).abs() < 1e-10);
    assert!((f.prefactor_at_two_thirds - 2.0).abs() < 1e-10);
    assert_eq!(f.count, 7);
}

#[test]
fn fit_rejects_thin_data() {
    let eps = log_grid(1e-5, 1e-3, 4);
    assert!(matches!(
        fit_delay_scaling(&synthetic(1.2, &eps, 2.0, 0.7), DelayMeasure::Blowup),
        Err(Error::InsufficientData(_))
    ));
    let narrow = log_grid(1e-4, 1e-3, 7);
    assert!(fit_delay_scaling(&synthetic(1.2, &narrow, 2.0, 0.7), DelayMeasure::Section).is_err());
    let mut mixed = synthetic(1.2, &log_grid(1e-5, 1e-3, 7), 2.0, 0.7);
    mixed[0].c = 1.0;
    assert!(fit_delay_scaling(&mixed, DelayMeasure::Blowup).is_err());
}

#[test]
fn log_grid_endpoints() {
    let g = log_grid(1e-5, 1e-3, 7);
    assert_eq!(g.len(), 7);
    assert!((g[0] - 1e-5).abs() < 1e-18 && (g[6] - 1e-3).abs() < 1e-15);
    assert!((g[3] - 1e-4).abs() < 1e-16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn delay_shrinks_with_epsilon(e1 in -5.0f64..-2.0, ratio in 0.1f64..0.8) {
        let big = 10f64.powf(e1);
        let small = big * ratio;
        let a = run_fold_passage(1.2, big, 0.25).unwrap();
        let b = run_fold_passage(1.2, small, 0.25).unwrap();
        prop_assert!(b.theta_exit < a.theta_exit);
        prop_assert!(b.theta_blowup.unwrap() < a.theta_blowup.unwrap());
    }
}
