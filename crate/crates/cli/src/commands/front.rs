use super::load_config;
use crate::error::CliError;
use crate::output::{finite, num, opt, Outputs, Table};
use crate::settings::Settings;
use crate::FrontArgs;
use quench_core::painleve::solve_hastings_mcleod;
use quench_core::travelingwave::{
    amplitude_at_pitchfork, hm_deviation, predicted_delay, solve_front, FrontOptions, FrontSolution, QuenchParams,
    Ramp,
};
use quench_core::{Error, NewtonReport};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct Diagnostics {
    c: f64,
    eps: f64,
    half_length: f64,
    nodes: usize,
    newton_iterations: usize,
    final_residual: f64,
    left_boundary_residual: f64,
    right_boundary_residual: f64,
    mu_c: f64,
    mu_fr: Option<f64>,
    zeta_fr: Option<f64>,
    mu_fr_predicted: Option<f64>,
    amplitude_at_pitchfork: Option<f64>,
    hm_deviation: Option<f64>,
}

#[derive(Serialize)]
struct Failure<'a> {
    converged: bool,
    iterations: usize,
    final_residual: f64,
    residual_history: &'a [f64],
    damping_history: &'a [f64],
}

pub fn settings(a: &FrontArgs) -> Result<Settings, CliError> {
    let mut s = Settings::new(
        "front",
        &[
            ("c", "1.2"),
            ("eps", "0.0025"),
            ("ramp", "tanh"),
            ("half-length", "auto"),
            ("n", "auto"),
        ],
    );
    load_config(&mut s, a.config.as_deref())?;
    s.flag("c", a.c);
    s.flag("eps", a.eps);
    s.flag("ramp", a.ramp.clone());
    s.flag("half-length", a.half_length);
    s.flag("n", a.n);
    Ok(s)
}

pub fn run(a: FrontArgs, out: &Path) -> Result<(), CliError> {
    let s = settings(&a)?;
    let ramp: Ramp = s.raw("ramp").parse()?;
    let params = QuenchParams::new(s.get("c")?, s.get("eps")?, ramp)?;
    let options = FrontOptions {
        half_length: s.optional("half-length")?,
        nodes: s.optional("n")?,
        ..Default::default()
    };
    let mut files = Outputs::new(out)?;
    let front = match solve_front(&params, &options, None) {
        Ok(f) => f,
        Err(Error::NewtonFailed(report)) => return Err(report_failure(&mut files, &report)),
        Err(e) => return Err(e.into()),
    };

    let stationary = params.c == 0.0;
    let hm = if stationary {
        Some(solve_hastings_mcleod(12.0, 8.0, 8001)?)
    } else {
        None
    };
    let (xi, u, du) = front.profile_xi();
    let mu: Vec<f64> = front.mu.iter().rev().copied().collect();
    let scale = params.epsilon.powf(1.0 / 3.0);
    let mut table = if stationary {
        Table::new(&["xi", "u", "u_xi", "mu", "u_hm", "deviation"])
    } else {
        Table::new(&["xi", "u", "u_xi", "mu"])
    };
    for i in 0..xi.len() {
        let mut row = vec![num(xi[i]), num(u[i]), num(du[i]), num(mu[i])];
        if let Some(hm) = &hm {
            let scaled = hm.eval(scale * xi[i]).map(|w| 2f64.sqrt() * scale * w);
            row.push(opt(scaled));
            row.push(opt(scaled.map(|v| u[i] - v)));
        }
        table.push(row);
    }
    files.csv("front_profile.csv", &s.metadata(), &table)?;

    let diag = diagnostics(&front, hm.as_ref())?;
    files.json("front_diagnostics.json", &diag)?;
    match (diag.mu_fr, diag.mu_fr_predicted) {
        (Some(m), Some(p)) => println!(
            "mu_fr = {m:.6}  (mu_c = {:.6}, delay {:.6e}, predicted delay {:.6e})",
            diag.mu_c,
            m - diag.mu_c,
            p - diag.mu_c
        ),
        _ => println!(
            "u(0) = {:.6e}  sup |u - sqrt(2) eps^(1/3) w_HM| = {:.3e}  (2 eps^(2/3) = {:.3e})",
            diag.amplitude_at_pitchfork.unwrap_or(f64::NAN),
            diag.hm_deviation.unwrap_or(f64::NAN),
            2.0 * params.epsilon.powf(2.0 / 3.0)
        ),
    }
    files.manifest(&s)?;
    Ok(())
}

fn diagnostics(front: &FrontSolution, hm: Option<&quench_core::HmSolution>) -> Result<Diagnostics, CliError> {
    let p = front.params;
    let (left, right) = front.boundary_residuals();
    let predicted = if p.c > 0.0 {
        Some(predicted_delay(p.c, p.epsilon)?)
    } else {
        None
    };
    Ok(Diagnostics {
        c: p.c,
        eps: p.epsilon,
        half_length: front.half_length(),
        nodes: front.u.len(),
        newton_iterations: front.report.iterations,
        final_residual: front.report.final_residual,
        left_boundary_residual: left,
        right_boundary_residual: right,
        mu_c: p.mu_critical(),
        mu_fr: front.interface.map(|i| i.mu_fr),
        zeta_fr: front.interface.map(|i| i.zeta_fr),
        mu_fr_predicted: predicted,
        amplitude_at_pitchfork: amplitude_at_pitchfork(front).ok().and_then(finite),
        hm_deviation: match hm {
            Some(hm) => Some(hm_deviation(front, hm)?),
            None => None,
        },
    })
}

fn report_failure(files: &mut Outputs, report: &NewtonReport) -> CliError {
    let failure = Failure {
        converged: report.converged,
        iterations: report.iterations,
        final_residual: report.final_residual,
        residual_history: &report.residual_history,
        damping_history: &report.damping_history,
    };
    match files.json("front_failure.json", &failure) {
        Ok(path) => CliError::Solver(format!(
            "newton stopped after {} iterations at residual {:.3e}; report in {}",
            report.iterations,
            report.final_residual,
            path.display()
        )),
        Err(e) => e,
    }
}
