//! Parameter continuation of solution branches.
//!
//! Natural-parameter mode steps the parameter directly, predicting the next
//! solution with the secant through the last two points. Pseudo-arclength
//! mode adds the arclength constraint and solves the bordered system by
//! block elimination, so it can follow a branch around a fold.

use super::banded::BandedMatrix;
use super::newton::{solve_bvp, DiscreteSystem, NewtonOptions, NewtonReport};
use crate::error::{invalid, Error, Result};

/// `F(x, p) = 0` with a banded Jacobian in `x`.
pub trait ParameterizedSystem {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[f64], p: f64, out: &mut [f64]);
    fn jacobian(&self, x: &[f64], p: f64) -> BandedMatrix;

    /// `∂F/∂p`; central differences unless overridden.
    fn param_derivative(&self, x: &[f64], p: f64, out: &mut [f64]) {
        let h = 1e-7 * (1.0 + p.abs());
        let mut lo = vec![0.0; out.len()];
        self.residual(x, p + h, out);
        self.residual(x, p - h, &mut lo);
        for (o, l) in out.iter_mut().zip(&lo) {
            *o = (*o - l) / (2.0 * h);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuationMode {
    Natural,
    Arclength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationOptions {
    /// Initial step; its sign is irrelevant in natural mode, where the
    /// direction comes from the target parameter.
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub growth: f64,
    /// Consecutive successes before the step grows.
    pub successes_before_growth: usize,
    pub mode: ContinuationMode,
    pub newton: NewtonOptions,
    /// Parameter values the natural-mode branch must land on exactly.
    pub checkpoints: Vec<f64>,
    /// Hard cap on the number of branch points (arclength mode).
    pub max_points: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-10,
            max_step: 0.5,
            growth: 1.3,
            successes_before_growth: 3,
            mode: ContinuationMode::Natural,
            newton: NewtonOptions::default(),
            checkpoints: Vec::new(),
            max_points: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchEntry {
    pub param: f64,
    pub solution: Vec<f64>,
    pub report: NewtonReport,
}

/// A computed branch. Every entry is a converged solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationBranch {
    pub entries: Vec<BranchEntry>,
    /// Signed parameter step attempted at each stage, failures included.
    pub step_history: Vec<f64>,
    /// +1 or -1: direction of travel in the parameter at the start.
    pub direction: f64,
    /// True when the step fell below `min_step` before the target was reached.
    pub stalled: bool,
}

impl ContinuationBranch {
    /// Entry whose parameter equals `p` to within `tol`.
    pub fn at(&self, p: f64, tol: f64) -> Option<&BranchEntry> {
        self.entries.iter().find(|e| (e.param - p).abs() <= tol)
    }
}

struct Frozen<'a, S: ?Sized> {
    system: &'a S,
    p: f64,
}

impl<S: ParameterizedSystem + ?Sized> DiscreteSystem for Frozen<'_, S> {
    fn dim(&self) -> usize {
        self.system.dim()
    }
    fn residual(&self, x: &[f64], out: &mut [f64]) {
        self.system.residual(x, self.p, out)
    }
    fn jacobian(&self, x: &[f64]) -> BandedMatrix {
        self.system.jacobian(x, self.p)
    }
}

/// Follow the branch through `(x0, p0)` towards `p_end`.
pub fn continue_branch<S: ParameterizedSystem + ?Sized>(
    system: &S,
    x0: Vec<f64>,
    p0: f64,
    p_end: f64,
    options: &ContinuationOptions,
) -> Result<ContinuationBranch> {
    if x0.len() != system.dim() {
        return Err(invalid("initial solution has wrong length"));
    }
    if !(options.min_step > 0.0) || options.max_step < options.min_step || options.growth < 1.0 {
        return Err(invalid("invalid continuation step controls"));
    }
    let first = Frozen { system, p: p0 };
    let (x, report) = solve_bvp(&first, x0, &options.newton)
        .map_err(|e| Error::ContinuationStart(e.to_string()))?;
    if !report.converged {
        return Err(Error::ContinuationStart(format!(
            "newton residual {:.3e} after {} iterations at p = {p0}",
            report.final_residual, report.iterations
        )));
    }
    let direction = if p_end >= p0 { 1.0 } else { -1.0 };
    let mut branch = ContinuationBranch {
        entries: vec![BranchEntry {
            param: p0,
            solution: x,
            report,
        }],
        step_history: Vec::new(),
        direction,
        stalled: false,
    };
    match options.mode {
        ContinuationMode::Natural => natural(system, &mut branch, p_end, options),
        ContinuationMode::Arclength => arclength(system, &mut branch, p_end, options),
    }
    Ok(branch)
}

fn natural<S: ParameterizedSystem + ?Sized>(
    system: &S,
    branch: &mut ContinuationBranch,
    p_end: f64,
    options: &ContinuationOptions,
) {
    let dir = branch.direction;
    let mut stops: Vec<f64> = options
        .checkpoints
        .iter()
        .copied()
        .filter(|&c| (c - branch.entries[0].param) * dir > 0.0 && (p_end - c) * dir >= 0.0)
        .collect();
    stops.push(p_end);
    stops.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    stops.dedup();

    let mut step = options.initial_step.abs().clamp(options.min_step, options.max_step);
    let mut streak = 0usize;
    let mut stop_idx = 0usize;
    while stop_idx < stops.len() {
        let last = branch.entries.last().expect("branch starts non-empty");
        let p = last.param;
        let target = stops[stop_idx];
        let remaining = (target - p) * dir;
        let trial_step = step.min(remaining);
        let p_next = if trial_step >= remaining { target } else { p + dir * trial_step };
        branch.step_history.push(p_next - p);

        let guess = match branch.entries.len() {
            1 => last.solution.clone(),
            m => {
                let prev = &branch.entries[m - 2];
                let r = (p_next - p) / (p - prev.param);
                last.solution
                    .iter()
                    .zip(&prev.solution)
                    .map(|(a, b)| a + r * (a - b))
                    .collect()
            }
        };
        let frozen = Frozen { system, p: p_next };
        let outcome = solve_bvp(&frozen, guess, &options.newton);
        match outcome {
            Ok((x, report)) if report.converged => {
                branch.entries.push(BranchEntry {
                    param: p_next,
                    solution: x,
                    report,
                });
                if p_next == target {
                    stop_idx += 1;
                }
                streak += 1;
                if streak >= options.successes_before_growth {
                    step = (step * options.growth).min(options.max_step);
                    streak = 0;
                }
            }
            _ => {
                streak = 0;
                step = trial_step * 0.5;
                if step < options.min_step {
                    branch.stalled = true;
                    return;
                }
            }
        }
    }
}

fn normalise(tx: &mut [f64], tp: &mut f64) {
    let n = (tx.iter().map(|v| v * v).sum::<f64>() + *tp * *tp).sqrt();
    tx.iter_mut().for_each(|v| *v /= n);
    *tp /= n;
}

fn arclength<S: ParameterizedSystem + ?Sized>(
    system: &S,
    branch: &mut ContinuationBranch,
    p_end: f64,
    options: &ContinuationOptions,
) {
    let n = system.dim();
    let dir = branch.direction;
    let p_start = branch.entries[0].param;

    // Initial tangent from J b = F_p: dx/dp = -b.
    let (mut tx, mut tp) = {
        let e = &branch.entries[0];
        let mut fp = vec![0.0; n];
        system.param_derivative(&e.solution, e.param, &mut fp);
        match system.jacobian(&e.solution, e.param).solve(&fp) {
            Ok(b) => (b.iter().map(|v| -v * dir).collect::<Vec<_>>(), dir),
            Err(_) => (vec![0.0; n], dir),
        }
    };
    normalise(&mut tx, &mut tp);

    let mut ds = options.initial_step.abs().clamp(options.min_step, options.max_step);
    let mut streak = 0usize;
    while branch.entries.len() < options.max_points {
        let last = branch.entries.last().expect("non-empty");
        if (last.param - p_end) * dir >= 0.0 || (last.param - p_start) * dir < 0.0 && branch.entries.len() > 2 {
            return;
        }
        branch.step_history.push(ds * tp);
        let px: Vec<f64> = last.solution.iter().zip(&tx).map(|(x, t)| x + ds * t).collect();
        let pp = last.param + ds * tp;
        match arclength_correct(system, px, pp, &tx, tp, options) {
            Some((x, p, report)) => {
                let mut ntx: Vec<f64> = x.iter().zip(&last.solution).map(|(a, b)| a - b).collect();
                let mut ntp = p - last.param;
                normalise(&mut ntx, &mut ntp);
                tx = ntx;
                tp = ntp;
                branch.entries.push(BranchEntry {
                    param: p,
                    solution: x,
                    report,
                });
                streak += 1;
                if streak >= options.successes_before_growth {
                    ds = (ds * options.growth).min(options.max_step);
                    streak = 0;
                }
            }
            None => {
                streak = 0;
                ds *= 0.5;
                if ds < options.min_step {
                    branch.stalled = true;
                    return;
                }
            }
        }
    }
}

/// Newton on `F(x, p) = 0`, `t·((x, p) - predictor) = 0`.
fn arclength_correct<S: ParameterizedSystem + ?Sized>(
    system: &S,
    pred_x: Vec<f64>,
    pred_p: f64,
    tx: &[f64],
    tp: f64,
    options: &ContinuationOptions,
) -> Option<(Vec<f64>, f64, NewtonReport)> {
    let n = system.dim();
    let mut x = pred_x.clone();
    let mut p = pred_p;
    let mut f = vec![0.0; n];
    let mut fp = vec![0.0; n];
    let mut report = NewtonReport::default();
    let constraint = |x: &[f64], p: f64| -> f64 {
        x.iter().zip(&pred_x).zip(tx).map(|((a, b), t)| (a - b) * t).sum::<f64>() + (p - pred_p) * tp
    };
    for _ in 0..options.newton.max_iter {
        system.residual(&x, p, &mut f);
        let g = constraint(&x, p);
        let res = f.iter().fold(g.abs(), |m, v| m.max(v.abs()));
        report.residual_history.push(res);
        report.final_residual = res;
        if !res.is_finite() {
            return None;
        }
        if res <= options.newton.tol {
            report.converged = true;
            return Some((x, p, report));
        }
        system.param_derivative(&x, p, &mut fp);
        let lu = system.jacobian(&x, p).lu().ok()?;
        let mut a: Vec<f64> = f.iter().map(|v| -v).collect();
        lu.solve_in_place(&mut a);
        let mut b = fp.clone();
        lu.solve_in_place(&mut b);
        let ta: f64 = tx.iter().zip(&a).map(|(t, v)| t * v).sum();
        let tb: f64 = tx.iter().zip(&b).map(|(t, v)| t * v).sum();
        let denom = tp - tb;
        if denom.abs() < 1e-300 {
            return None;
        }
        let dp = (-g - ta) / denom;
        for ((xi, ai), bi) in x.iter_mut().zip(&a).zip(&b) {
            *xi += ai - dp * bi;
        }
        p += dp;
        report.iterations += 1;
        report.damping_history.push(1.0);
    }
    None
}
