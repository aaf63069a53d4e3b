use proptest::prelude::*;
use quench_core::specfun::*;

// Reference values computed with mpmath at 30 digits.
const AIRY_TABLE: &[(f64, f64, f64)] = &[
    (0.0, 0.355028053887817239260, -0.258819403792806798405),
    (1.0, 0.135292416312881415524, -0.159147441296793212787),
    (-20.0, -0.176406127077984689590, 0.892862856736471238398),
    (-10.0, 0.0402412384864431906894, 0.996265044132790055905),
    (-7.0, 0.184280835250505637280, -0.771008168410126547731),
    (-4.5, 0.292152781055959466882, -0.523362532315747700708),
    (4.5, 3.30250323514308983659e-4, -7.17866567557508888694e-4),
    (6.0, 9.94769436025288957024e-6, -2.47652003970349547542e-5),
    (8.0, 4.69220761609923162565e-8, -1.34143929790678657429e-7),
    (10.0, 1.10475325528986859336e-10, -3.52063367673892363662e-10),
    (20.0, 1.69167286867054031355e-27, -7.58639162574835496052e-27),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn airy_matches_reference_table() {
    for &(x, ai, aip) in AIRY_TABLE {
        let p = airy(x).unwrap();
        let tol = if x.abs() <= 10.0 { 1e-10 } else { 1e-9 };
        assert!(rel(p.value, ai) < tol, "Ai({x}) = {} vs {ai}", p.value);
        assert!(rel(p.derivative, aip) < tol, "Ai'({x}) = {} vs {aip}", p.derivative);
    }
}

#[test]
fn constants_match_reference() {
    assert!((GAMMA_ONE_THIRD - 2.67893853470774763366).abs() < 1e-15);
    assert!((GAMMA_TWO_THIRDS - 1.35411793942640041695).abs() < 1e-15);
    assert!((GAMMA_FOUR_THIRDS - 0.892979511569249211219).abs() < 1e-15);
    assert!((AI_ZERO - 0.355028053887817239260).abs() < 1e-16);
    assert!((AIP_ZERO + 0.258819403792806798405).abs() < 1e-16);
}

#[test]
fn bessel_third_order_at_one() {
    let jm = bessel_j_third(ThirdOrder::Minus, 1.0).unwrap();
    let jp = bessel_j_third(ThirdOrder::Plus, 1.0).unwrap();
    assert!((jm - 0.606887505046529345400).abs() < 1e-13);
    assert!((jp - 0.730876402169448047749).abs() < 1e-13);
}

#[test]
fn omega0_is_first_airy_zero() {
    let o = omega0();
    assert!((o.value - 2.33810741045976703849).abs() < 1e-10);
    assert!((o.value - 2.338107).abs() < 5e-7);
    assert!(airy(-o.value).unwrap().value.abs() < 1e-8);
}

#[test]
fn omega0_brackets_sign_change() {
    let o = omega0().value;
    let comb = |x: f64| {
        bessel_j_third(ThirdOrder::Minus, x).unwrap() + bessel_j_third(ThirdOrder::Plus, x).unwrap()
    };
    // The combination is taken in the Airy argument ζ = (2/3) x^{3/2}.
    let g = |x: f64| comb(2.0 / 3.0 * x.powf(1.5));
    assert!(g(o - 1e-6) * g(o + 1e-6) < 0.0);
}

#[test]
fn rejects_bad_arguments() {
    assert!(airy(f64::NAN).is_err());
    assert!(bessel_j_third(ThirdOrder::Plus, -1.0).is_err());
    assert!(bessel_j_third(ThirdOrder::Minus, 0.0).is_err());
}

proptest! {
    #[test]
    fn wronskian_is_one_over_pi(x in -5.0f64..5.0) {
        let a = airy(x).unwrap();
        let b = airy_bi(x).unwrap();
        let w = a.value * b.derivative - a.derivative * b.value;
        prop_assert!((w - std::f64::consts::FRAC_1_PI).abs() < 1e-9);
    }

    #[test]
    fn airy_solves_its_equation(x in -12.0f64..12.0) {
        // Ai'' = x Ai, checked with a central difference of Ai'.
        let h = 1e-5;
        let d2 = (airy(x + h).unwrap().derivative - airy(x - h).unwrap().derivative) / (2.0 * h);
        let ai = airy(x).unwrap().value;
        let scale = 1.0 + x.abs();
        prop_assert!((d2 - x * ai).abs() < 1e-6 * scale * (ai.abs() + airy(x).unwrap().derivative.abs()).max(1e-12));
    }
}
