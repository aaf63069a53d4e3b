//! Adaptive Dormand–Prince 5(4) integration with event location.
//!
//! Events are located by bisection on the step fraction: each trial point is
//! an honest Runge–Kutta step from the start of the bracketing step, so no
//! interpolant is involved.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
    /// Keep every accepted step in the trajectory (otherwise only the end points).
    pub record_steps: bool,
    /// Absolute width to which event times are bisected.
    pub event_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 2_000_000,
            record_steps: true,
            event_tol: 1e-12,
        }
    }
}

/// Which sign changes of an event function count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Any,
    Rising,
    Falling,
}

/// A scalar event function `g(t, y)`; a hit is a sign change of `g`.
pub struct Event<'a> {
    pub func: &'a dyn Fn(f64, &[f64]) -> f64,
    pub terminal: bool,
    pub crossing: Crossing,
}

impl<'a> Event<'a> {
    pub fn terminal(func: &'a dyn Fn(f64, &[f64]) -> f64) -> Self {
        Self {
            func,
            terminal: true,
            crossing: Crossing::Any,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    /// Index into the event slice.
    pub index: usize,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub events: Vec<EventHit>,
    /// True when a terminal event stopped the integration.
    pub terminated: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last_state(&self) -> &[f64] {
        self.y.last().map(Vec::as_slice).unwrap_or(&[])
    }
    pub fn last_time(&self) -> f64 {
        self.t.last().copied().unwrap_or(f64::NAN)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus the embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<'f, F> {
    field: &'f F,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl<'f, F: Fn(f64, &[f64], &mut [f64])> Stepper<'f, F> {
    fn new(field: &'f F, n: usize) -> Self {
        Self {
            field,
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
        }
    }

    fn stage(&mut self, t: f64, y: &[f64], h: f64, coef: &[(usize, f64)], out: usize) {
        for (i, v) in self.tmp.iter_mut().enumerate() {
            *v = y[i] + h * coef.iter().map(|&(j, a)| a * self.k[j][i]).sum::<f64>();
        }
        (self.field)(t, &self.tmp, &mut self.k[out]);
    }

    /// One step from `(t, y)` with `k[0] = f(t, y)` already set.
    /// Writes the fifth-order solution into `y_new` and returns the error vector norm.
    fn step(&mut self, t: f64, y: &[f64], h: f64, y_new: &mut [f64], opts: &OdeOptions) -> f64 {
        self.stage(t + C2 * h, y, h, &[(0, A21)], 1);
        self.stage(t + C3 * h, y, h, &[(0, A31), (1, A32)], 2);
        self.stage(t + C4 * h, y, h, &[(0, A41), (1, A42), (2, A43)], 3);
        self.stage(t + C5 * h, y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4);
        self.stage(t + h, y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
        for (i, v) in y_new.iter_mut().enumerate() {
            *v = y[i]
                + h * (B1 * self.k[0][i]
                    + B3 * self.k[2][i]
                    + B4 * self.k[3][i]
                    + B5 * self.k[4][i]
                    + B6 * self.k[5][i]);
        }
        (self.field)(t + h, y_new, &mut self.k[6]);
        let mut acc = 0.0;
        for (i, yn) in y_new.iter().enumerate() {
            let e = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(yn.abs());
            acc += (e / sc).powi(2);
        }
        (acc / y.len() as f64).sqrt()
    }
}

/// Integrate `y' = field(t, y)` from `t0` to `t1` (either direction).
///
/// Stops early at the first terminal event. Step-size collapse below
/// `1e-14 max(1, |t|)` is reported as [`Error::StepUnderflow`] with the
/// state reached.
pub fn integrate_ode<F>(
    field: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    events: &[Event<'_>],
    opts: &OdeOptions,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    if n == 0 || !t0.is_finite() || !t1.is_finite() || y0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("ode needs a finite, non-empty initial state and span"));
    }
    if !(opts.rtol > 0.0) || !(opts.atol > 0.0) {
        return Err(invalid("ode tolerances must be positive"));
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory {
        t: vec![t0],
        y: vec![y0.to_vec()],
        ..Default::default()
    };
    if t1 == t0 {
        return Ok(traj);
    }
    let mut stepper = Stepper::new(&field, n);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    field(t, &y, &mut stepper.k[0]);

    let mut h = match opts.initial_step {
        Some(h) => h.abs(),
        None => {
            let f0 = stepper.k[0].iter().map(|v| v * v).sum::<f64>().sqrt();
            let y_n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if f0 > 0.0 {
                (0.01 * (y_n + opts.atol) / f0).min((t1 - t0).abs())
            } else {
                1e-3 * (t1 - t0).abs()
            }
        }
    }
    .min(opts.max_step)
    .max(1e-12);

    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(t, &y)).collect();
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { steps, t });
        }
        steps += 1;
        let last = (t1 - t).abs() <= h;
        let hs = if last { t1 - t } else { dir * h };
        if hs.abs() < 1e-14 * t.abs().max(1.0) && !last {
            return Err(Error::StepUnderflow { t, state: y });
        }
        let err = stepper.step(t, &y, hs, &mut y_new, opts);
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            traj.rejected_steps += 1;
            h = hs.abs() * 0.25;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t, state: y });
            }
            continue;
        }
        if err > 1.0 {
            traj.rejected_steps += 1;
            h = hs.abs() * (0.9 * err.powf(-0.2)).max(0.2);
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t, state: y });
            }
            continue;
        }
        traj.accepted_steps += 1;
        let t_new = if last { t1 } else { t + hs };

        // Events: earliest sign change in this step.
        let mut earliest: Option<(usize, f64, Vec<f64>)> = None;
        let mut hits = Vec::new();
        for (idx, ev) in events.iter().enumerate() {
            let g1 = (ev.func)(t_new, &y_new);
            let g0 = g_prev[idx];
            let crossed = match ev.crossing {
                Crossing::Any => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
                Crossing::Rising => g0 < 0.0 && g1 >= 0.0,
                Crossing::Falling => g0 > 0.0 && g1 <= 0.0,
            };
            g_prev[idx] = g1;
            if crossed {
                let (te, ye) = locate_event(&field, ev, t, &y, t_new - t, g0, opts, n);
                hits.push((idx, te, ye.clone()));
                if ev.terminal && earliest.as_ref().map_or(true, |e| (te - e.1) * dir < 0.0) {
                    earliest = Some((idx, te, ye));
                }
            }
        }
        if let Some((_, te, ye)) = earliest {
            for (idx, th, yh) in hits {
                if (th - te) * dir <= 0.0 {
                    traj.events.push(EventHit { index: idx, t: th, y: yh });
                }
            }
            traj.t.push(te);
            traj.y.push(ye);
            traj.terminated = true;
            return Ok(traj);
        }
        for (idx, th, yh) in hits {
            traj.events.push(EventHit { index: idx, t: th, y: yh });
        }

        t = t_new;
        std::mem::swap(&mut y, &mut y_new);
        stepper.k.swap(0, 6);
        if opts.record_steps || (t1 - t) * dir <= 0.0 {
            traj.t.push(t);
            traj.y.push(y.clone());
        }
        let fac = if err > 0.0 { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) } else { 5.0 };
        h = (hs.abs() * fac).min(opts.max_step);
    }
    Ok(traj)
}

/// Bisect the fraction of the step `(t, y) -> t + h` at which `event` changes sign.
#[allow(clippy::too_many_arguments)]
fn locate_event<F: Fn(f64, &[f64], &mut [f64])>(
    field: &F,
    event: &Event<'_>,
    t: f64,
    y: &[f64],
    h: f64,
    g0: f64,
    opts: &OdeOptions,
    n: usize,
) -> (f64, Vec<f64>) {
    let mut stepper = Stepper::new(field, n);
    let mut y_trial = vec![0.0; n];
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut best = (t + h, Vec::new());
    let mut k0 = vec![0.0; n];
    field(t, y, &mut k0);
    let mut iter = 0;
    while (hi - lo) * h.abs() > opts.event_tol && iter < 200 {
        iter += 1;
        let mid = 0.5 * (lo + hi);
        stepper.k[0].copy_from_slice(&k0);
        stepper.step(t, y, mid * h, &mut y_trial, opts);
        let g = (event.func)(t + mid * h, &y_trial);
        if g == 0.0 || g.signum() != g0.signum() {
            hi = mid;
            best = (t + mid * h, y_trial.clone());
        } else {
            lo = mid;
        }
    }
    if best.1.is_empty() {
        stepper.k[0].copy_from_slice(&k0);
        stepper.step(t, y, hi * h, &mut y_trial, opts);
        best = (t + hi * h, y_trial);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let tr = integrate_ode(|_, y, d| d[0] = -y[0], &[1.0], 0.0, 5.0, &[], &OdeOptions::default()).unwrap();
        assert!((tr.last_state()[0] - (-5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let tr = integrate_ode(|_, y, d| d[0] = y[0], &[1.0], 0.0, -2.0, &[], &OdeOptions::default()).unwrap();
        assert!((tr.last_state()[0] - (-2f64).exp()).abs() < 1e-10);
        assert_eq!(tr.last_time(), -2.0);
    }

    #[test]
    fn terminal_event_stops_integration() {
        let g = |_t: f64, y: &[f64]| y[0] - 0.5;
        let ev = [Event::terminal(&g)];
        let tr = integrate_ode(|_, y, d| d[0] = -y[0], &[1.0], 0.0, 5.0, &ev, &OdeOptions::default()).unwrap();
        assert!(tr.terminated);
        assert!((tr.last_time() - 2f64.ln()).abs() < 1e-10);
    }
}
