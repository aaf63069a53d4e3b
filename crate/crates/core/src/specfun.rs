//! Airy functions, Bessel functions of order ±1/3 and the first Airy zero.
//!
//! Ai is evaluated piecewise:
//!
//! | range          | method                                              |
//! |----------------|-----------------------------------------------------|
//! | x < -7         | oscillatory asymptotic expansion                    |
//! | -7 ≤ x ≤ 2.5   | Maclaurin series                                    |
//! | 2.5 < x < 8    | Taylor continuation from an asymptotic anchor at 8  |
//! | x ≥ 8          | exponential asymptotic expansion                    |
//!
//! The Maclaurin series for Ai cancels catastrophically for large positive
//! arguments (Ai/Bi falls like e^{-4x^{3/2}/3}), so the decaying side is
//! handled by integrating the Airy equation backwards from x = 8. That
//! direction is stable because Ai is the growing solution there.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Ai(0).
pub const AI_ZERO: f64 = 0.355_028_053_887_817_24;
/// Ai'(0).
pub const AIP_ZERO: f64 = -0.258_819_403_792_806_8;
/// Γ(1/3).
pub const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_6;
/// Γ(2/3).
pub const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;
/// Γ(4/3).
pub const GAMMA_FOUR_THIRDS: f64 = 0.892_979_511_569_249_2;

const MACLAURIN_LO: f64 = -7.0;
const MACLAURIN_HI: f64 = 2.5;
const ANCHOR: f64 = 8.0;
const MIN_ARGUMENT: f64 = -1.0e6;
const TAYLOR_HOP: f64 = 0.5;

/// A function value together with its first derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub value: f64,
    pub derivative: f64,
}

/// Which of the two Bessel orders ±1/3 to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThirdOrder {
    Plus,
    Minus,
}

impl ThirdOrder {
    fn nu(self) -> f64 {
        match self {
            ThirdOrder::Plus => 1.0 / 3.0,
            ThirdOrder::Minus => -1.0 / 3.0,
        }
    }
}

/// The first zero Ω₀ of Ai(−z), with the residual of the defining identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega0 {
    pub value: f64,
    /// |J₋₁/₃(t) + J₁/₃(t)| at t = 2Ω₀^{3/2}/3.
    pub residual: f64,
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(domain(format!("airy argument {x} is not finite")));
    }
    if x < MIN_ARGUMENT {
        return Err(domain(format!(
            "airy argument {x} below {MIN_ARGUMENT}; phase of the oscillatory expansion is lost"
        )));
    }
    Ok(())
}

/// Ai(x) and Ai'(x).
///
/// Relative accuracy is about 1e-12 away from the zeros of Ai on the
/// negative axis; underflows to zero for x ≳ 104.
pub fn airy(x: f64) -> Result<AiryPair> {
    check_argument(x)?;
    Ok(if x < MACLAURIN_LO {
        oscillatory(-x).0
    } else if x <= MACLAURIN_HI {
        let m = maclaurin(x);
        AiryPair {
            value: AI_ZERO * m.f + AIP_ZERO * m.g,
            derivative: AI_ZERO * m.df + AIP_ZERO * m.dg,
        }
    } else if x < ANCHOR {
        let anchor = exponential_ai(ANCHOR);
        taylor_walk(ANCHOR, anchor, x)
    } else {
        exponential_ai(x)
    })
}

/// Bi(x) and Bi'(x). Overflows to infinity for x ≳ 104.
pub fn airy_bi(x: f64) -> Result<AiryPair> {
    check_argument(x)?;
    Ok(if x < MACLAURIN_LO {
        oscillatory(-x).1
    } else if x < ANCHOR {
        let m = maclaurin(x);
        let s3 = 3f64.sqrt();
        AiryPair {
            value: s3 * (AI_ZERO * m.f - AIP_ZERO * m.g),
            derivative: s3 * (AI_ZERO * m.df - AIP_ZERO * m.dg),
        }
    } else {
        exponential_bi(x)
    })
}

/// The two power series f, g with Ai = Ai(0) f + Ai'(0) g, and their derivatives.
struct Maclaurin {
    f: f64,
    df: f64,
    g: f64,
    dg: f64,
}

fn maclaurin(x: f64) -> Maclaurin {
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut df, mut dg) = (0.0, 1.0);
    let (mut tf, mut tg) = (1.0, x);
    let (mut tdf, mut tdg) = (x * x / 2.0, 1.0);
    df += tdf;
    for k in 1..400 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tdg *= x3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        f += tf;
        g += tg;
        dg += tdg;
        if k >= 2 {
            tdf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            df += tdf;
        }
        let scale = f.abs() + g.abs() + df.abs() + dg.abs();
        let last = tf.abs() + tg.abs() + tdf.abs() + tdg.abs();
        if k > 3 && last <= 1e-17 * scale {
            break;
        }
    }
    Maclaurin { f, df, g, dg }
}

/// Coefficients u_k, v_k of the Airy asymptotic expansions.
fn asymptotic_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(count);
    let mut v = Vec::with_capacity(count);
    u.push(1.0);
    v.push(1.0);
    for k in 1..count {
        let kf = k as f64;
        let prev = u[k - 1];
        let uk = prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

/// Sum Σ sign^k c_k ζ^{-k} with optimal truncation.
fn asymptotic_sum(coef: &[f64], zeta: f64, alternating: bool) -> f64 {
    let mut sum = coef[0];
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for (k, &c) in coef.iter().enumerate().skip(1) {
        pow /= zeta;
        let sign = if alternating && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * c * pow;
        if term.abs() >= last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn exponential_ai(x: f64) -> AiryPair {
    let (u, v) = asymptotic_coefficients(40);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let q = x.powf(0.25);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    AiryPair {
        value: e / q * asymptotic_sum(&u, zeta, true),
        derivative: -e * q * asymptotic_sum(&v, zeta, true),
    }
}

fn exponential_bi(x: f64) -> AiryPair {
    let (u, v) = asymptotic_coefficients(40);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let q = x.powf(0.25);
    let e = zeta.exp() / PI.sqrt();
    AiryPair {
        value: e / q * asymptotic_sum(&u, zeta, false),
        derivative: e * q * asymptotic_sum(&v, zeta, false),
    }
}

/// Even/odd split of an alternating asymptotic series in 1/ζ:
/// returns (Σ (−1)^k c_{2k} ζ^{−2k}, Σ (−1)^k c_{2k+1} ζ^{−2k−1}).
fn split_sums(coef: &[f64], zeta: f64) -> (f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for (k, &c) in coef.iter().enumerate() {
        let term = c * pow;
        if k > 0 && term.abs() >= last {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            even += sign * term;
        } else {
            odd += sign * term;
        }
        last = term.abs();
        if last < 1e-17 {
            break;
        }
        pow /= zeta;
    }
    (even, odd)
}

/// Ai(−z), Bi(−z) and their x-derivatives for large z > 0.
fn oscillatory(z: f64) -> (AiryPair, AiryPair) {
    let (u, v) = asymptotic_coefficients(40);
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let q = z.powf(0.25);
    let s = PI.sqrt();
    let phase = zeta - PI / 4.0;
    let (sn, cs) = phase.sin_cos();
    let (pu, qu) = split_sums(&u, zeta);
    let (pv, qv) = split_sums(&v, zeta);
    let ai = AiryPair {
        value: (cs * pu + sn * qu) / (s * q),
        derivative: q / s * (sn * pv - cs * qv),
    };
    let bi = AiryPair {
        value: (-sn * pu + cs * qu) / (s * q),
        derivative: q / s * (cs * pv + sn * qv),
    };
    (ai, bi)
}

/// Integrate y'' = x y from `x0` (data `start`) to `target` by repeated
/// Taylor expansions with hops of at most [`TAYLOR_HOP`].
fn taylor_walk(x0: f64, start: AiryPair, target: f64) -> AiryPair {
    let mut x = x0;
    let mut y = start;
    while (target - x).abs() > 0.0 {
        let t = (target - x).clamp(-TAYLOR_HOP, TAYLOR_HOP);
        y = taylor_step(x, y, t);
        x = if (target - x).abs() <= TAYLOR_HOP { target } else { x + t };
    }
    y
}

fn taylor_step(x0: f64, y: AiryPair, t: f64) -> AiryPair {
    // a_{n+2} (n+2)(n+1) = x0 a_n + a_{n-1}
    let mut a_prev2 = 0.0; // a_{n-1}
    let mut a_prev = y.value; // a_n
    let mut a_cur = y.derivative; // a_{n+1}
    let mut value = y.value + y.derivative * t;
    let mut deriv = y.derivative;
    let mut tp = t; // t^{n+1}
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let next = (x0 * a_prev + a_prev2) / ((nf + 2.0) * (nf + 1.0));
        deriv += (nf + 2.0) * next * tp;
        tp *= t;
        value += next * tp;
        a_prev2 = a_prev;
        a_prev = a_cur;
        a_cur = next;
        n += 1;
        let small = (next * tp).abs() <= 1e-18 * value.abs().max(1e-300)
            && (a_prev * tp).abs() <= 1e-18 * value.abs().max(1e-300);
        if (n > 4 && small) || n > 200 {
            break;
        }
    }
    AiryPair {
        value,
        derivative: deriv,
    }
}

/// Bessel J of order ±1/3 for x ≥ 0.
///
/// Power series below x = 12, Hankel's expansion above.
pub fn bessel_j_third(order: ThirdOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(format!("bessel argument {x} must be finite and non-negative")));
    }
    let nu = order.nu();
    if x == 0.0 {
        return match order {
            ThirdOrder::Plus => Ok(0.0),
            ThirdOrder::Minus => Err(domain("J_{-1/3} is singular at 0")),
        };
    }
    if x <= 12.0 {
        Ok(bessel_series(nu, x))
    } else {
        Ok(bessel_hankel(nu, x))
    }
}

fn bessel_series(nu: f64, x: f64) -> f64 {
    let gamma = if nu > 0.0 { GAMMA_FOUR_THIRDS } else { GAMMA_TWO_THIRDS };
    let half = x / 2.0;
    let mut term = half.powf(nu) / gamma;
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn bessel_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(nu) / x^k
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            a *= (mu - odd * odd) / (kf * 8.0 * x);
        }
        if k > 0 && a.abs() >= last {
            break;
        }
        last = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if last < 1e-17 {
            break;
        }
    }
    let chi = x - (nu / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J₋₁/₃(t) + J₁/₃(t) at t = 2z^{3/2}/3; proportional to Ai(−z)/√z.
fn bessel_combination(z: f64) -> Result<f64> {
    let t = 2.0 / 3.0 * z * z.sqrt();
    Ok(bessel_j_third(ThirdOrder::Minus, t)? + bessel_j_third(ThirdOrder::Plus, t)?)
}

/// First zero of Ai(−z), found from the Bessel representation.
///
/// Bisection on [2, 3] to width 1e-12, then one Newton polish with a
/// central-difference slope. Does not touch the Airy routines, so
/// `airy(-omega0().value)` is an independent check.
pub fn omega0() -> Omega0 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    let eval = |z: f64| bessel_combination(z).expect("positive argument");
    let f_lo = eval(lo);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if eval(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    let h = 1e-6;
    let slope = (eval(z + h) - eval(z - h)) / (2.0 * h);
    let step = eval(z) / slope;
    if step.abs() < 1e-10 {
        z -= step;
    }
    Omega0 {
        value: z,
        residual: eval(z).abs(),
    }
}
