use super::load_config;
use crate::error::CliError;
use crate::output::{num, Outputs, Table};
use crate::settings::Settings;
use crate::PainleveArgs;
use quench_core::painleve::{
    certify_above_airy_at_origin, certify_lower_bound, certify_monotone, certify_potential_positive,
    classify_airy_tail, linearization_ground_state, solve_hastings_mcleod,
};
use quench_core::specfun::AI_ZERO;
use quench_core::TailClass;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize, Default)]
struct Certificates {
    l_minus: f64,
    l_plus: f64,
    nodes: usize,
    newton_iterations: usize,
    final_residual: f64,
    left_boundary_residual: f64,
    right_boundary_residual: f64,
    /// w(−L₋)/√(L₋/2) against 1 + 1/(8η³).
    boundary_series_defect: f64,
    w_at_zero: Option<f64>,
    potential_min: Option<f64>,
    potential_lipschitz: Option<f64>,
    potential_lower_bound: Option<f64>,
    lower_bound_gap: Option<f64>,
    ground_state: Option<f64>,
    failures: Vec<String>,
}

pub fn settings(a: &PainleveArgs) -> Result<Settings, CliError> {
    let mut s = Settings::new("painleve", &[("window", "12:8"), ("n", "8001"), ("classify", "")]);
    load_config(&mut s, a.config.as_deref())?;
    s.flag("window", a.window.as_ref().map(|w| format!("{}:{}", w[0], w[1])));
    s.flag("n", a.n);
    s.flag("classify", a.classify.clone());
    Ok(s)
}

fn record<T>(failures: &mut Vec<String>, r: quench_core::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ quench_core::Error::Certificate { .. }) => {
            failures.push(e.to_string());
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run(a: PainleveArgs, out: &Path) -> Result<(), CliError> {
    let s = settings(&a)?;
    let (l_minus, l_plus) = s.pair("window")?;
    let n: usize = s.get("n")?;
    let ks = s.list("classify")?;
    let sol = solve_hastings_mcleod(l_minus, l_plus, n)?;
    let mut files = Outputs::new(out)?;

    let mut table = Table::new(&["eta", "w", "w_eta", "sqrt_neg_eta_over_6"]);
    for ((&eta, &w), &wp) in sol.mesh.nodes().iter().zip(&sol.w).zip(&sol.wprime) {
        let bound = if eta <= 0.0 { num((-eta / 6.0).sqrt()) } else { String::new() };
        table.push(vec![num(eta), num(w), num(wp), bound]);
    }
    files.csv("painleve_solution.csv", &s.metadata(), &table)?;

    let eta_left = -l_minus;
    let mut cert = Certificates {
        l_minus,
        l_plus,
        nodes: sol.w.len(),
        newton_iterations: sol.report.iterations,
        final_residual: sol.report.final_residual,
        left_boundary_residual: sol.boundary_residuals.0,
        right_boundary_residual: sol.boundary_residuals.1,
        boundary_series_defect: sol.w[0] / (l_minus / 2.0).sqrt() - (1.0 + 1.0 / (8.0 * eta_left.powi(3))),
        ..Default::default()
    };
    let mut failures = Vec::new();
    cert.w_at_zero = record(&mut failures, certify_above_airy_at_origin(&sol))?;
    if let Some(p) = record(&mut failures, certify_potential_positive(&sol))? {
        cert.potential_min = Some(p.min_value);
        cert.potential_lipschitz = Some(p.lipschitz);
        cert.potential_lower_bound = Some(p.lower_bound());
    }
    cert.lower_bound_gap = record(&mut failures, certify_lower_bound(&sol))?.map(|c| c.min_gap);
    record(&mut failures, certify_monotone(&sol))?;
    cert.ground_state = record(&mut failures, linearization_ground_state(&sol))?.map(|s| s.largest());
    cert.failures = failures;
    files.json("painleve_certificates.json", &cert)?;

    if let Some(w0) = cert.w_at_zero {
        println!("w(0) = {w0:.7} >= Ai(0) = {AI_ZERO:.7}");
    }
    if let (Some(m), Some(lb)) = (cert.potential_min, cert.potential_lower_bound) {
        println!("min(eta + 6 w^2) = {m:.6}, certified lower bound {lb:.6}");
    }
    if let Some(g) = cert.lower_bound_gap {
        println!("w - sqrt(-eta/6) >= {g:.6} on eta <= 0");
    }
    if let Some(g) = cert.ground_state {
        println!("linearization ground state {g:.6}");
    }
    println!(
        "boundary residuals {:.3e} {:.3e}, boundary series defect {:.3e}",
        cert.left_boundary_residual, cert.right_boundary_residual, cert.boundary_series_defect
    );

    if !ks.is_empty() {
        let mut table = Table::new(&["k", "class", "detail"]);
        for &k in &ks {
            let (class, detail) = match classify_airy_tail(k, l_minus)? {
                TailClass::OscillatoryDecay { sign_changes } => ("oscillatory_decay", sign_changes.to_string()),
                TailClass::Pole { position, .. } => ("pole", num(position)),
                TailClass::Separatrix { sign } => ("separatrix", sign.to_string()),
            };
            println!("k = {k}: {class} {detail}");
            table.push(vec![num(k), class.into(), detail]);
        }
        files.csv("painleve_classify.csv", &s.metadata(), &table)?;
    }

    if !cert.failures.is_empty() {
        return Err(CliError::Certificate(cert.failures.join("; ")));
    }
    files.manifest(&s)?;
    Ok(())
}
