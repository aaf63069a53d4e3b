use super::{load_config, par_map};
use crate::error::CliError;
use crate::output::{num, opt, Outputs, Table};
use crate::settings::Settings;
use crate::SweepArgs;
use quench_core::folddelay::{fit_delay_scaling, log_grid, predicted_prefactor, run_fold_passage, DelayMeasure};
use quench_core::solvercore::fit::power_law;
use quench_core::travelingwave::{front_branch, predicted_delay, solve_front, FrontOptions, QuenchParams, Ramp};
use quench_core::FrontSolution;
use serde::Serialize;
use std::path::Path;

/// Share of converged points below which the sweep counts as failed.
const MIN_CONVERGED: f64 = 0.8;

#[derive(Serialize)]
struct FitSummary {
    mode: &'static str,
    c: f64,
    points: usize,
    converged: usize,
    exponent: Option<f64>,
    prefactor: Option<f64>,
    predicted_exponent: f64,
    predicted_prefactor: f64,
    /// Why no fit was made.
    refused: Option<String>,
}

pub fn settings(a: &SweepArgs) -> Result<Settings, CliError> {
    let mut s = Settings::new(
        "delay-sweep",
        &[
            ("c", "1.2"),
            ("eps-decade", "2.5e-4:2.5e-3"),
            ("points", "10"),
            ("eps", ""),
            ("ramp", "tanh"),
            ("fold", "false"),
            ("delta", "0.25"),
        ],
    );
    load_config(&mut s, a.config.as_deref())?;
    s.flag("c", a.c);
    s.flag("eps-decade", a.eps_decade.clone());
    s.flag("points", a.points);
    s.flag("eps", a.eps.clone());
    s.flag("ramp", a.ramp.clone());
    s.flag("fold", a.fold.then_some(true));
    s.flag("delta", a.delta);
    Ok(s)
}

fn epsilons(s: &Settings) -> Result<Vec<f64>, CliError> {
    let listed = s.list("eps")?;
    let eps = if listed.is_empty() {
        let (lo, hi) = s.pair("eps-decade")?;
        let points: usize = s.get("points")?;
        if points == 0 || !(lo > 0.0 && hi >= lo) {
            return Err(CliError::Usage("eps-decade needs 0 < lo <= hi and points >= 1".into()));
        }
        log_grid(lo, hi, points)
    } else {
        listed
    };
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::Usage("every eps must be positive".into()));
    }
    Ok(eps)
}

pub fn run(a: SweepArgs, out: &Path) -> Result<(), CliError> {
    let s = settings(&a)?;
    let jobs = a.jobs.unwrap_or(1);
    let c: f64 = s.get("c")?;
    let eps = epsilons(&s)?;
    let mut files = Outputs::new(out)?;
    let (converged, summary) = if s.get::<bool>("fold")? {
        fold_sweep(&s, c, &eps, jobs, &mut files)?
    } else {
        front_sweep(&s, c, &eps, jobs, &mut files)?
    };
    files.json("delay_fit.json", &summary)?;
    match (summary.exponent, summary.prefactor) {
        (Some(p), Some(a)) => println!(
            "fitted exponent {p:.4}, prefactor {a:.4}  (predicted {:.4}, {:.4}); {converged}/{} converged",
            summary.predicted_exponent,
            summary.predicted_prefactor,
            eps.len()
        ),
        _ => println!(
            "no fit: {}; {converged}/{} converged",
            summary.refused.as_deref().unwrap_or("-"),
            eps.len()
        ),
    }
    let share = converged as f64 / eps.len() as f64;
    files.manifest(&s)?;
    if share < MIN_CONVERGED {
        return Err(CliError::Solver(format!(
            "only {converged} of {} points converged",
            eps.len()
        )));
    }
    Ok(())
}

fn fold_sweep(
    s: &Settings,
    c: f64,
    eps: &[f64],
    jobs: usize,
    files: &mut Outputs,
) -> Result<(usize, FitSummary), CliError> {
    let delta: f64 = s.get("delta")?;
    let results = par_map(eps, jobs, |&e| run_fold_passage(c, e, delta));
    if let Some(Err(e @ quench_core::Error::InvalidInput(_))) = results.first() {
        return Err(CliError::Usage(e.to_string()));
    }
    let pre = predicted_prefactor(c);
    let mut table = Table::new(&["eps", "theta_exit", "theta_blowup", "theta_predicted", "status"]);
    let mut records = Vec::new();
    for (&e, r) in eps.iter().zip(&results) {
        let predicted = num(pre * e.powf(2.0 / 3.0));
        match r {
            Ok(rec) => {
                table.push(vec![num(e), num(rec.theta_exit), opt(rec.theta_blowup), predicted, "ok".into()]);
                records.push(*rec);
            }
            Err(err) => table.push(vec![num(e), String::new(), String::new(), predicted, status(err)]),
        }
    }
    files.csv("delay_sweep.csv", &s.metadata(), &table)?;
    let (exponent, prefactor, refused) = match fit_delay_scaling(&records, DelayMeasure::Blowup) {
        Ok(fit) => (Some(fit.exponent), Some(fit.prefactor), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok((
        records.len(),
        FitSummary {
            mode: "fold",
            c,
            points: eps.len(),
            converged: records.len(),
            exponent,
            prefactor,
            predicted_exponent: 2.0 / 3.0,
            predicted_prefactor: pre,
            refused,
        },
    ))
}

fn front_sweep(
    s: &Settings,
    c: f64,
    eps: &[f64],
    jobs: usize,
    files: &mut Outputs,
) -> Result<(usize, FitSummary), CliError> {
    let ramp: Ramp = s.raw("ramp").parse()?;
    for &e in eps {
        QuenchParams::new(c, e, ramp)?;
    }
    if c == 0.0 {
        return Err(CliError::Usage("the front delay needs c > 0".into()));
    }
    let options = FrontOptions::default();
    // One continuation branch shares a mesh across ε; fall back to
    // independent solves, each allowed to fail, if it breaks down.
    let fronts: Vec<Result<FrontSolution, String>> = match front_branch(c, ramp, eps, &options) {
        Ok(fs) => fs.into_iter().map(Ok).collect(),
        Err(_) => par_map(eps, jobs, |&e| {
            let p = QuenchParams::new(c, e, ramp).map_err(|e| status(&e))?;
            solve_front(&p, &options, None).map_err(|e| status(&e))
        }),
    };
    let mu_c = c * c / 4.0;
    let mut table = Table::new(&[
        "eps",
        "mu_fr",
        "delay",
        "delay_predicted",
        "zeta_fr",
        "newton_iterations",
        "final_residual",
        "status",
    ]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut converged = 0;
    for (&e, f) in eps.iter().zip(&fronts) {
        let predicted = num(predicted_delay(c, e)? - mu_c);
        match f {
            Ok(front) => {
                converged += 1;
                let iface = front.interface;
                let delay = iface.map(|i| i.mu_fr - mu_c);
                if let Some(d) = delay.filter(|d| *d > 0.0) {
                    xs.push(e);
                    ys.push(d);
                }
                table.push(vec![
                    num(e),
                    opt(iface.map(|i| i.mu_fr)),
                    opt(delay),
                    predicted,
                    opt(iface.map(|i| i.zeta_fr)),
                    front.report.iterations.to_string(),
                    num(front.report.final_residual),
                    "ok".into(),
                ]);
            }
            Err(msg) => table.push(vec![
                num(e),
                String::new(),
                String::new(),
                predicted,
                String::new(),
                String::new(),
                String::new(),
                msg.clone(),
            ]),
        }
    }
    files.csv("delay_sweep.csv", &s.metadata(), &table)?;
    let (exponent, prefactor, refused) = if xs.len() < 3 {
        (None, None, Some(format!("{} usable points; at least 3 needed", xs.len())))
    } else {
        match power_law(&xs, &ys) {
            Ok((p, a)) => (Some(p), Some(a), None),
            Err(e) => (None, None, Some(e.to_string())),
        }
    };
    Ok((
        converged,
        FitSummary {
            mode: "front",
            c,
            points: eps.len(),
            converged,
            exponent,
            prefactor,
            predicted_exponent: 2.0 / 3.0,
            predicted_prefactor: predicted_prefactor(c),
            refused,
        },
    ))
}

/// Single-token status cell for a failed point.
fn status(e: &quench_core::Error) -> String {
    use quench_core::Error::*;
    match e {
        NewtonFailed(_) => "newton_failed",
        StepUnderflow { .. } => "step_underflow",
        TooManySteps { .. } => "too_many_steps",
        InsufficientData(_) => "no_exit",
        InvalidInput(_) | Domain(_) => "invalid",
        _ => "failed",
    }
    .into()
}
