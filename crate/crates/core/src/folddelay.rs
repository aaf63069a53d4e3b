//! Slow passage through the fold on the invariant plane u = 0.
//!
//! With z = u'/u and θ = μ − c²/4 the linear dynamics ahead of the front is
//!
//! ```text
//! z' = −z² − θ,    θ' = ε (1 − (θ + c²/4)²).
//! ```
//!
//! For θ < 0 the branch z = √(−θ) is attracting. It disappears in a fold at
//! θ = 0, and the trajectory leaves along z → −∞ only after a delay
//! θ ≈ Ω₀ (1 − c⁴/16)^{2/3} ε^{2/3}. Past z = −1 the integration continues in
//! s = arctan z, where the escape to z = −∞ is the regular crossing
//! s = −π/2.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Error, Result};
use crate::solvercore::fit;
use crate::solvercore::ode::{integrate_ode, Crossing, Event, OdeOptions};
use crate::specfun::omega0;

/// Starting value of θ.
pub const THETA_START: f64 = -0.25;

/// Outcome of one passage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldDelayRecord {
    pub c: f64,
    pub epsilon: f64,
    /// Section z = −δ used for `theta_exit`.
    pub delta: f64,
    /// θ when the trajectory crosses z = −δ.
    pub theta_exit: f64,
    /// θ when z reaches −∞; `None` when the compactified chart was not used.
    pub theta_blowup: Option<f64>,
    pub compact_chart_used: bool,
}

/// Coordinates used for the passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chart {
    /// z until z = −1, then s = arctan z down to s = −π/2.
    #[default]
    Switched,
    /// z only; stops at the section and reports no blow-up value.
    Direct,
    /// s = arctan z from the start.
    Compact,
}

/// Which θ the delay law is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayMeasure {
    /// θ at z = −∞. Free of the O(ε/δ) offset of a finite section.
    #[default]
    Blowup,
    /// θ at the section z = −δ.
    Section,
}

/// (1 − c⁴/16), the factor the fold normal form rescales by.
pub fn fold_factor(c: f64) -> f64 {
    1.0 - c.powi(4) / 16.0
}

/// Ω₀ (1 − c⁴/16)^{2/3}.
pub fn predicted_prefactor(c: f64) -> f64 {
    omega0().value * fold_factor(c).powf(2.0 / 3.0)
}

fn slow_rate(c: f64, theta: f64) -> f64 {
    let m = theta + c * c / 4.0;
    1.0 - m * m
}

/// z on the slow manifold at θ to first order in ε.
pub fn slow_manifold_z(c: f64, epsilon: f64, theta: f64) -> f64 {
    (-theta).sqrt() + epsilon * slow_rate(c, theta) / (4.0 * -theta)
}

fn validate(c: f64, epsilon: f64, delta: f64) -> Result<()> {
    if !(c > 0.0 && c < 2.0) {
        return Err(invalid(format!("fold passage needs 0 < c < 2, got {c}")));
    }
    if !(epsilon > 0.0 && epsilon <= 0.05) {
        return Err(invalid(format!("fold passage needs 0 < eps <= 0.05, got {epsilon}")));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(invalid(format!("section delta must lie in (0, 0.5], got {delta}")));
    }
    Ok(())
}

fn ode_options() -> OdeOptions {
    OdeOptions {
        rtol: 1e-11,
        atol: 1e-13,
        record_steps: false,
        ..Default::default()
    }
}

/// Integrate the passage with the default switched chart.
pub fn run_fold_passage(c: f64, epsilon: f64, delta: f64) -> Result<FoldDelayRecord> {
    run_fold_passage_with(c, epsilon, delta, Chart::Switched, 0.0)
}

/// Integrate the passage in `chart`, starting `z_offset` off the slow manifold.
pub fn run_fold_passage_with(
    c: f64,
    epsilon: f64,
    delta: f64,
    chart: Chart,
    z_offset: f64,
) -> Result<FoldDelayRecord> {
    validate(c, epsilon, delta)?;
    let z0 = slow_manifold_z(c, epsilon, THETA_START) + z_offset;
    let t_max = 8.0 / epsilon;
    let opts = ode_options();
    let missed = || Error::InsufficientData(format!("no exit through z = -{delta} before t = {t_max}"));

    let z_field = |_t: f64, y: &[f64], d: &mut [f64]| {
        d[0] = -y[0] * y[0] - y[1];
        d[1] = epsilon * slow_rate(c, y[1]);
    };
    let s_field = |_t: f64, y: &[f64], d: &mut [f64]| {
        let (sn, cs) = y[0].sin_cos();
        d[0] = -sn * sn - y[1] * cs * cs;
        d[1] = epsilon * slow_rate(c, y[1]);
    };

    let mut record = FoldDelayRecord {
        c,
        epsilon,
        delta,
        theta_exit: f64::NAN,
        theta_blowup: None,
        compact_chart_used: false,
    };
    match chart {
        Chart::Direct | Chart::Switched => {
            let section = |_t: f64, y: &[f64]| y[0] + delta;
            let switch = |_t: f64, y: &[f64]| y[0] + 1.0;
            let events = [
                Event {
                    func: &section,
                    terminal: chart == Chart::Direct,
                    crossing: Crossing::Falling,
                },
                Event {
                    func: &switch,
                    terminal: true,
                    crossing: Crossing::Falling,
                },
            ];
            let tr = integrate_ode(z_field, &[z0, THETA_START], 0.0, t_max, &events, &opts)?;
            let hit = tr.events.iter().find(|e| e.index == 0).ok_or_else(missed)?;
            record.theta_exit = hit.y[1];
            if chart == Chart::Switched {
                let sw = tr.events.iter().find(|e| e.index == 1).ok_or_else(missed)?;
                let s0 = [(-1.0f64).atan(), sw.y[1]];
                let blow = |_t: f64, y: &[f64]| y[0] + FRAC_PI_2;
                let ev = [Event {
                    func: &blow,
                    terminal: true,
                    crossing: Crossing::Falling,
                }];
                let tr2 = integrate_ode(s_field, &s0, sw.t, sw.t + 100.0, &ev, &opts)?;
                if !tr2.terminated {
                    return Err(Error::InsufficientData("no blow-up after the chart switch".into()));
                }
                record.theta_blowup = Some(tr2.last_state()[1]);
                record.compact_chart_used = true;
            }
        }
        Chart::Compact => {
            let s_section = (-delta).atan();
            let section = |_t: f64, y: &[f64]| y[0] - s_section;
            let blow = |_t: f64, y: &[f64]| y[0] + FRAC_PI_2;
            let events = [
                Event {
                    func: &section,
                    terminal: false,
                    crossing: Crossing::Falling,
                },
                Event {
                    func: &blow,
                    terminal: true,
                    crossing: Crossing::Falling,
                },
            ];
            let tr = integrate_ode(s_field, &[z0.atan(), THETA_START], 0.0, t_max, &events, &opts)?;
            let hit = tr.events.iter().find(|e| e.index == 0).ok_or_else(missed)?;
            record.theta_exit = hit.y[1];
            let b = tr.events.iter().find(|e| e.index == 1).ok_or_else(missed)?;
            record.theta_blowup = Some(b.y[1]);
            record.compact_chart_used = true;
        }
    }
    Ok(record)
}

/// Scalings taking the fold to x' = x² − y, y' = ε g(y) with g(0) = −1.
///
/// z = −a^{1/3} x, θ = −a^{2/3} y, dτ = a^{1/3} dζ, with a = 1 − c⁴/16.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub c: f64,
    pub a: f64,
    pub x_scale: f64,
    pub y_scale: f64,
    pub time_scale: f64,
}

pub fn normal_form_transform(c: f64) -> Result<NormalForm> {
    if !(c > 0.0 && c < 2.0) {
        return Err(invalid(format!("normal form needs 0 < c < 2, got {c}")));
    }
    let a = fold_factor(c);
    Ok(NormalForm {
        c,
        a,
        x_scale: a.powf(1.0 / 3.0),
        y_scale: a.powf(2.0 / 3.0),
        time_scale: a.powf(1.0 / 3.0),
    })
}

impl NormalForm {
    /// g(y) = −(1 − (c²/4 − a^{2/3} y)²)/a.
    pub fn g(&self, y: f64) -> f64 {
        let m = self.c * self.c / 4.0 - self.y_scale * y;
        -(1.0 - m * m) / self.a
    }

    /// θ at the section z = −δ, integrated in normal-form coordinates.
    pub fn theta_exit(&self, epsilon: f64, delta: f64) -> Result<f64> {
        validate(self.c, epsilon, delta)?;
        let z0 = slow_manifold_z(self.c, epsilon, THETA_START);
        let y0 = [-z0 / self.x_scale, -THETA_START / self.y_scale];
        let x_exit = delta / self.x_scale;
        let field = |_t: f64, v: &[f64], d: &mut [f64]| {
            d[0] = v[0] * v[0] - v[1];
            d[1] = epsilon * self.g(v[1]);
        };
        let section = |_t: f64, v: &[f64]| v[0] - x_exit;
        let events = [Event {
            func: &section,
            terminal: true,
            crossing: Crossing::Rising,
        }];
        let tr = integrate_ode(field, &y0, 0.0, 8.0 / epsilon, &events, &ode_options())?;
        if !tr.terminated {
            return Err(Error::InsufficientData("normal-form run never reached the section".into()));
        }
        Ok(-self.y_scale * tr.last_state()[1])
    }
}

/// Power law θ = A ε^p fitted to a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayFit {
    pub c: f64,
    pub exponent: f64,
    pub prefactor: f64,
    /// Geometric mean of θ/ε^{2/3}.
    pub prefactor_at_two_thirds: f64,
    pub predicted_prefactor: f64,
    pub measure: DelayMeasure,
    pub count: usize,
}

/// Fit the delay law. Needs ≥ 5 records at one c spanning ≥ 1.5 decades in ε.
pub fn fit_delay_scaling(records: &[FoldDelayRecord], measure: DelayMeasure) -> Result<DelayFit> {
    if records.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} records; at least 5 needed",
            records.len()
        )));
    }
    let c = records[0].c;
    if records.iter().any(|r| r.c != c) {
        return Err(invalid("records mix different speeds c"));
    }
    let lo = records.iter().map(|r| r.epsilon).fold(f64::INFINITY, f64::min);
    let hi = records.iter().map(|r| r.epsilon).fold(0.0, f64::max);
    if (hi / lo).log10() < 1.5 - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "eps spans {:.2} decades; 1.5 needed",
            (hi / lo).log10()
        )));
    }
    let eps: Vec<f64> = records.iter().map(|r| r.epsilon).collect();
    let theta = records
        .iter()
        .map(|r| match measure {
            DelayMeasure::Section => Ok(r.theta_exit),
            DelayMeasure::Blowup => r
                .theta_blowup
                .ok_or_else(|| invalid("record carries no blow-up value")),
        })
        .collect::<Result<Vec<f64>>>()?;
    let (exponent, prefactor) = fit::power_law(&eps, &theta)?;
    let log_mean = eps
        .iter()
        .zip(&theta)
        .map(|(e, t)| (t / e.powf(2.0 / 3.0)).ln())
        .sum::<f64>()
        / eps.len() as f64;
    Ok(DelayFit {
        c,
        exponent,
        prefactor,
        prefactor_at_two_thirds: log_mean.exp(),
        predicted_prefactor: predicted_prefactor(c),
        measure,
        count: records.len(),
    })
}

/// Log-spaced ε values, `points` of them, from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_inputs() {
        assert!(run_fold_passage(0.0, 1e-4, 0.25).is_err());
        assert!(run_fold_passage(1.2, 1e-4, 0.6).is_err());
        assert!(run_fold_passage(1.2, 0.0, 0.25).is_err());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = log_grid(1e-5, 1e-3, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 1e-5).abs() < 1e-20);
        assert!((g[6] - 1e-3).abs() < 1e-17);
    }
}
