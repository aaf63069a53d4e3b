//! Time stepping of u_t = u_xx + a u_x + μ u − u³ and front tracking.
//!
//! Two frames are supported:
//!
//! - comoving, x = ξ = x_lab − ct, with a = c and μ = −ramp(εξ);
//! - lab, with a = 0 and μ = −ramp(ε(αx − t)). For α = 0 the quench is
//!   homogeneous, μ = ramp(εt).
//!
//! A frozen μ overrides either. Each step is a Strang splitting: an exact
//! reaction half-step, a Crank–Nicolson step for diffusion and advection
//! (one banded solve, factorised once), and another reaction half-step.
//! Both ends are Neumann.

use crate::error::{invalid, Error, Result};
use crate::solvercore::banded::{BandedLu, BandedMatrix};
use crate::solvercore::mesh::Mesh;
use crate::solvercore::quadrature;
use crate::travelingwave::{seed_profile, QuenchParams, Ramp};

/// Default tracking level.
pub const DEFAULT_LEVEL: f64 = 0.2;
/// Overflow guard for the abort check.
const BLOWUP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Comoving { c: f64 },
    Lab { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// amplitude · exp(−((x − center)/width)²).
    Bump { center: f64, width: f64, amplitude: f64 },
    /// The front solver's seed, mapped to ξ (comoving frame only).
    FrontSeed,
    Zero,
    /// Nodal values on the simulation mesh.
    Profile(Vec<f64>),
}

/// A simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub frame: Frame,
    pub epsilon: f64,
    pub ramp: Ramp,
    /// Constant μ replacing the ramp.
    pub frozen_mu: Option<f64>,
    /// Uniform mesh on `domain` with `n` nodes unless `mesh` is given.
    pub domain: (f64, f64),
    pub n: usize,
    pub mesh: Option<Mesh>,
    pub t_end: f64,
    pub dt: f64,
    pub ic: InitialCondition,
    /// Snapshot cadence in time; `None` keeps only the final state.
    pub snapshot_every: Option<f64>,
    /// Front-track cadence in time.
    pub track_every: f64,
    pub level: f64,
}

impl SimConfig {
    /// Lab frame, α = 0, bump at the origin; the homogeneous-quench benchmark.
    pub fn homogeneous_quench(epsilon: f64) -> Self {
        Self {
            frame: Frame::Lab { alpha: 0.0 },
            epsilon,
            ramp: Ramp::Tanh,
            frozen_mu: None,
            domain: (-700.0, 700.0),
            n: 5601,
            mesh: None,
            t_end: 400.0,
            dt: 0.025,
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

    /// Build the mesh and check dt ≤ 0.4 h².
    pub fn mesh(&self) -> Result<Mesh> {
        let mesh = match &self.mesh {
            Some(m) => m.clone(),
            None => Mesh::uniform(self.domain.0, self.domain.1, self.n)?,
        };
        let h = mesh.min_spacing();
        if !(self.dt > 0.0) || self.dt > 0.4 * h * h * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "dt = {} violates dt <= 0.4 h^2 = {}",
                self.dt,
                0.4 * h * h
            )));
        }
        if !(self.t_end > 0.0) || !(self.track_every > 0.0) {
            return Err(invalid("t_end and track cadence must be positive"));
        }
        if let Frame::Lab { alpha } = self.frame {
            if !(alpha >= 0.0) {
                return Err(invalid("alpha must be >= 0"));
            }
        }
        Ok(mesh)
    }

    fn advection(&self) -> f64 {
        match self.frame {
            Frame::Comoving { c } => c,
            Frame::Lab { .. } => 0.0,
        }
    }

    /// μ at position `x` and time `t`.
    pub fn mu(&self, x: f64, t: f64) -> f64 {
        if let Some(m) = self.frozen_mu {
            return m;
        }
        match self.frame {
            Frame::Comoving { .. } => -self.ramp.mu(self.epsilon, x),
            Frame::Lab { alpha } => -self.ramp.mu(self.epsilon, alpha * x - t),
        }
    }
}

/// The solution at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Level-set crossings over time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontTrack {
    pub level: f64,
    pub times: Vec<f64>,
    /// Rightmost downward crossing of `level`; NaN when there is none.
    pub x_fr_num: Vec<f64>,
    /// Number of downward crossings at each time; more than one is flagged.
    pub crossings: Vec<usize>,
    /// Comoving runs only: rightmost downward crossing of c/4.
    pub x_fr_threshold: Vec<f64>,
}

impl FrontTrack {
    /// Indices of times with more than one crossing.
    pub fn flagged(&self) -> Vec<usize> {
        self.crossings
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 1)
            .map(|(i, _)| i)
            .collect()
    }

    /// (x(t₂) − x(t₁))/(t₂ − t₁) between the tracked times nearest `t1` and `t2`.
    pub fn mean_speed(&self, t1: f64, t2: f64) -> Option<f64> {
        let near = |t: f64| {
            self.times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map(|(i, _)| i)
        };
        let (i, j) = (near(t1)?, near(t2)?);
        let dx = self.x_fr_num[j] - self.x_fr_num[i];
        let dt = self.times[j] - self.times[i];
        (dt > 0.0 && dx.is_finite()).then_some(dx / dt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub x: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub track: FrontTrack,
    pub final_state: Snapshot,
    /// Set when the tracked front came within 10 units of a boundary.
    pub boundary_warning: bool,
}

/// Downward crossings of `level`: returns (rightmost position, count).
pub fn level_crossings(x: &[f64], u: &[f64], level: f64) -> (f64, usize) {
    let mut count = 0;
    let mut last = f64::NAN;
    for i in 0..x.len() - 1 {
        if u[i] >= level && u[i + 1] < level {
            count += 1;
            let s = (u[i] - level) / (u[i] - u[i + 1]);
            last = x[i] + s * (x[i + 1] - x[i]);
        }
    }
    (last, count)
}

fn initial_state(cfg: &SimConfig, x: &[f64]) -> Result<Vec<f64>> {
    Ok(match &cfg.ic {
        InitialCondition::Bump {
            center,
            width,
            amplitude,
        } => x
            .iter()
            .map(|&xi| amplitude * (-((xi - center) / width).powi(2)).exp())
            .collect(),
        InitialCondition::Zero => vec![0.0; x.len()],
        InitialCondition::Profile(p) => {
            if p.len() != x.len() {
                return Err(invalid("initial profile length differs from the mesh"));
            }
            p.clone()
        }
        InitialCondition::FrontSeed => {
            let Frame::Comoving { c } = cfg.frame else {
                return Err(invalid("front-seed initial condition needs the comoving frame"));
            };
            let params = QuenchParams::new(c, cfg.epsilon, cfg.ramp)?;
            let zeta: Vec<f64> = x.iter().map(|v| -v).collect();
            seed_profile(&params, &zeta)
        }
    })
}

/// Assemble L = ∂² + a∂ with Neumann ends.
///
/// Where the mesh is locally uniform over five nodes the fourth-order
/// centred stencils are used; elsewhere the nonuniform three-point ones.
/// Second-order stencils shift the linear spreading rate by O(h²), which
/// moves a delayed front noticeably.
fn spatial_operator(x: &[f64], a: f64) -> BandedMatrix {
    let n = x.len();
    let mut m = BandedMatrix::zeros(n, 2, 2);
    let uniform = |i: usize| {
        if i < 2 || i + 2 >= n {
            return false;
        }
        let h = x[i + 1] - x[i];
        (i - 2..i + 2).all(|k| ((x[k + 1] - x[k]) - h).abs() <= 1e-9 * h)
    };
    for i in 1..n - 1 {
        if uniform(i) {
            let h = x[i + 1] - x[i];
            let d2 = [-1.0, 16.0, -30.0, 16.0, -1.0].map(|v| v / (12.0 * h * h));
            let d1 = [1.0, -8.0, 0.0, 8.0, -1.0].map(|v| v / (12.0 * h));
            for k in 0..5 {
                m.add(i, i + k - 2, d2[k] + a * d1[k]);
            }
        } else {
            let hm = x[i] - x[i - 1];
            let hp = x[i + 1] - x[i];
            let s = hm + hp;
            let d2 = [2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s)];
            let d1 = [-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s)];
            for k in 0..3 {
                m.add(i, i + k - 1, d2[k] + a * d1[k]);
            }
        }
    }
    // Mirrored ghost node: u_xx = 2(u_1 − u_0)/h², u_x = 0.
    let h0 = x[1] - x[0];
    m.set(0, 0, -2.0 / (h0 * h0));
    m.set(0, 1, 2.0 / (h0 * h0));
    let hn = x[n - 1] - x[n - 2];
    m.set(n - 1, n - 1, -2.0 / (hn * hn));
    m.set(n - 1, n - 2, 2.0 / (hn * hn));
    m
}

/// I + s L.
fn shifted(l: &BandedMatrix, s: f64) -> BandedMatrix {
    let n = l.dim();
    let (kl, ku) = l.bandwidths();
    let mut m = BandedMatrix::zeros(n, kl, ku);
    for i in 0..n {
        for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
            m.set(i, j, s * l.get(i, j) + if i == j { 1.0 } else { 0.0 });
        }
    }
    m
}

/// Exact flow of u' = μu − u³ over time τ.
fn react(u: f64, mu: f64, tau: f64) -> f64 {
    let growth = if mu == 0.0 { 2.0 * tau } else { (2.0 * mu * tau).exp_m1() / mu };
    u * (mu * tau).exp() / (1.0 + u * u * growth).sqrt()
}

/// Crank–Nicolson for the linear part between two exact reaction
/// half-steps (Strang splitting), second order in time.
struct Stepper {
    explicit: BandedMatrix,
    implicit: BandedLu,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(x: &[f64], a: f64, dt: f64) -> Result<Self> {
        let l = spatial_operator(x, a);
        Ok(Self {
            explicit: shifted(&l, 0.5 * dt),
            implicit: shifted(&l, -0.5 * dt).lu()?,
            scratch: vec![0.0; x.len()],
        })
    }

    fn linear(&mut self, u: &mut [f64]) {
        let (kl, ku) = self.explicit.bandwidths();
        let n = u.len();
        for i in 0..n {
            let mut acc = 0.0;
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                acc += self.explicit.get(i, j) * u[j];
            }
            self.scratch[i] = acc;
        }
        u.copy_from_slice(&self.scratch);
        self.implicit.solve_in_place(u);
    }
}

fn check_health(t: f64, u: &[f64], healthy: &Snapshot) -> Result<()> {
    if u.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
        return Err(Error::SimulationAbort {
            t,
            reason: "state became non-finite or exceeded 1e6".into(),
            last_healthy: Box::new(healthy.clone()),
        });
    }
    Ok(())
}

/// Run the simulation.
///
/// Aborts with the last healthy snapshot if the state turns non-finite or
/// exceeds 1e6 in magnitude.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    let mesh = cfg.mesh()?;
    let x = mesh.nodes().to_vec();
    let n = x.len();
    let mut u = initial_state(cfg, &x)?;
    if u.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
        return Err(invalid("initial state must be finite and below 1e6 in magnitude"));
    }
    let mut stepper = Stepper::new(&x, cfg.advection(), cfg.dt)?;
    let half = 0.5 * cfg.dt;
    let threshold_level = match cfg.frame {
        Frame::Comoving { c } if c > 0.0 => Some(c / 4.0),
        _ => None,
    };
    let mut track = FrontTrack {
        level: cfg.level,
        ..Default::default()
    };
    let mut snapshots = Vec::new();
    let mut boundary_warning = false;
    let (xa, xb) = (x[0], x[n - 1]);
    let steps = (cfg.t_end / cfg.dt).round().max(1.0) as usize;
    let track_stride = ((cfg.track_every / cfg.dt).round() as usize).max(1);
    let snap_stride = cfg
        .snapshot_every
        .map(|s| ((s / cfg.dt).round() as usize).max(1));

    let frozen_mu: Option<Vec<f64>> = match (cfg.frozen_mu, cfg.frame) {
        (Some(m), _) => Some(vec![m; n]),
        (None, Frame::Comoving { .. }) => Some(x.iter().map(|&xi| cfg.mu(xi, 0.0)).collect()),
        _ => None,
    };
    let mut record = |k: usize, t: f64, u: &[f64], track: &mut FrontTrack, snaps: &mut Vec<Snapshot>| {
        if k % track_stride == 0 || k == steps {
            let (xf, count) = level_crossings(&x, u, cfg.level);
            if xf.is_finite() && (xf - xa < 10.0 || xb - xf < 10.0) {
                boundary_warning = true;
            }
            track.times.push(t);
            track.x_fr_num.push(xf);
            track.crossings.push(count);
            if let Some(l) = threshold_level {
                track.x_fr_threshold.push(level_crossings(&x, u, l).0);
            }
        }
        if let Some(s) = snap_stride {
            if k % s == 0 {
                snaps.push(Snapshot { t, u: u.to_vec() });
            }
        }
    };
    record(0, 0.0, &u, &mut track, &mut snapshots);
    let mut healthy = Snapshot { t: 0.0, u: u.clone() };
    let mut mu_now = vec![0.0; n];
    for k in 1..=steps {
        let t_old = (k - 1) as f64 * cfg.dt;
        for quarter in [0.25, 0.75] {
            let mu = match &frozen_mu {
                Some(m) => m.as_slice(),
                None => {
                    let tm = t_old + quarter * cfg.dt;
                    for (m, &xi) in mu_now.iter_mut().zip(&x) {
                        *m = cfg.mu(xi, tm);
                    }
                    mu_now.as_slice()
                }
            };
            for (ui, &m) in u.iter_mut().zip(mu) {
                *ui = react(*ui, m, half);
            }
            if quarter == 0.25 {
                stepper.linear(&mut u);
            }
        }
        let t = k as f64 * cfg.dt;
        check_health(t, &u, &healthy)?;
        record(k, t, &u, &mut track, &mut snapshots);
        if k % track_stride == 0 {
            healthy = Snapshot { t, u: u.clone() };
        }
    }
    let t_final = steps as f64 * cfg.dt;
    Ok(SimResult {
        x,
        snapshots,
        track,
        final_state: Snapshot { t: t_final, u },
        boundary_warning,
    })
}

fn ramp_mu(ramp: Ramp, epsilon: f64, t: f64) -> f64 {
    ramp.mu(epsilon, t)
}

/// x₀ + ∫₀ᵗ 2√μ(σ) dσ on `t_grid`, for μ(σ) = ramp(εσ).
///
/// The substitution σ = s² removes the square-root behaviour at σ = 0.
pub fn predicted_front_path(epsilon: f64, ramp: Ramp, x0: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    if !(epsilon > 0.0) {
        return Err(invalid("predicted path needs eps > 0"));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let mut acc = 0.0;
    let mut s_prev = 0.0;
    let mut t_prev = 0.0;
    for &t in t_grid {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("mu(t) < 0 at t = {t}; start the clock at mu = 0")));
        }
        let s = t.sqrt();
        if t >= t_prev {
            acc += quadrature::integrate(
                |s: f64| 4.0 * s * ramp_mu(ramp, epsilon, s * s).max(0.0).sqrt(),
                s_prev,
                s,
                1e-13,
            );
        } else {
            acc = quadrature::integrate(
                |s: f64| 4.0 * s * ramp_mu(ramp, epsilon, s * s).max(0.0).sqrt(),
                0.0,
                s,
                1e-13,
            );
        }
        s_prev = s;
        t_prev = t;
        out.push(x0 + acc);
    }
    Ok(out)
}

/// Closed form x₀ + (4/3)√ε t^{3/2} for the linear ramp before it clips.
pub fn linear_ramp_path(epsilon: f64, x0: f64, t: f64) -> f64 {
    x0 + 4.0 / 3.0 * epsilon.sqrt() * t.powf(1.5)
}

/// s_env(ν) = −(ν² + μ)/ν.
pub fn envelope_velocity(nu: f64, mu: f64) -> Result<f64> {
    if nu == 0.0 || !nu.is_finite() {
        return Err(Error::Domain("envelope velocity needs nu != 0".into()));
    }
    Ok(-(nu * nu + mu) / nu)
}

/// Minimum of s_env over ν < 0 by golden-section search: (ν*, s*).
pub fn min_envelope_velocity(mu: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0) {
        return Err(Error::Domain("envelope minimum needs mu > 0".into()));
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-10.0 * (1.0 + mu.sqrt()), -1e-9);
    let f = |nu: f64| -(nu * nu + mu) / nu;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while (b - a).abs() > 1e-12 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let nu = 0.5 * (a + b);
    Ok((nu, f(nu)))
}

/// Measured minus predicted front positions after the transient.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchComparison {
    pub times: Vec<f64>,
    pub x_num: Vec<f64>,
    pub x_pred: Vec<f64>,
    pub difference: Vec<f64>,
    pub transient_end: f64,
    pub x0: f64,
    pub boundary_warning: bool,
}

impl QuenchComparison {
    fn after(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.difference)
            .filter(move |(t, _)| **t >= self.transient_end)
            .map(|(t, d)| (*t, *d))
    }

    /// Every post-transient difference is ≥ 0.
    pub fn nonnegative_after_transient(&self) -> bool {
        let mut any = false;
        for (_, d) in self.after() {
            any = true;
            if !(d >= 0.0) {
                return false;
            }
        }
        any
    }

    /// Least-squares slope of the difference against t after the transient.
    pub fn growth_rate(&self) -> Option<f64> {
        let (t, d): (Vec<f64>, Vec<f64>) = self.after().unzip();
        crate::solvercore::fit::line(&t, &d).ok().map(|f| f.slope)
    }
}

/// Pair measured positions with the prediction started at `x0`.
pub fn difference_series(
    times: &[f64],
    x_num: &[f64],
    epsilon: f64,
    ramp: Ramp,
    x0: f64,
    transient_end: f64,
) -> Result<QuenchComparison> {
    let keep: Vec<usize> = (0..times.len()).filter(|&i| x_num[i].is_finite()).collect();
    let times: Vec<f64> = keep.iter().map(|&i| times[i]).collect();
    let x_num: Vec<f64> = keep.iter().map(|&i| x_num[i]).collect();
    let x_pred = predicted_front_path(epsilon, ramp, x0, &times)?;
    let difference = x_num.iter().zip(&x_pred).map(|(a, b)| a - b).collect();
    Ok(QuenchComparison {
        times,
        x_num,
        x_pred,
        difference,
        transient_end,
        x0,
        boundary_warning: false,
    })
}

/// Simulate a homogeneous quench and compare with the characteristic prediction.
///
/// The prediction starts at the bump's edge, x₀ = center + width. The
/// transient defaults to the first half of the run.
pub fn compare_homogeneous_quench(cfg: &SimConfig, transient_end: Option<f64>) -> Result<QuenchComparison> {
    let Frame::Lab { alpha } = cfg.frame else {
        return Err(invalid("homogeneous quench runs in the lab frame"));
    };
    if alpha != 0.0 || cfg.frozen_mu.is_some() {
        return Err(invalid("homogeneous quench needs alpha = 0 and no frozen mu"));
    }
    let InitialCondition::Bump { center, width, .. } = cfg.ic else {
        return Err(invalid("homogeneous quench needs a bump initial condition"));
    };
    let run = simulate(cfg)?;
    let transient = transient_end.unwrap_or(0.5 * cfg.t_end);
    let mut cmp = difference_series(
        &run.track.times,
        &run.track.x_fr_num,
        cfg.epsilon,
        cfg.ramp,
        center + width,
        transient,
    )?;
    cmp.boundary_warning = run.boundary_warning;
    Ok(cmp)
}
