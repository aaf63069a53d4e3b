use super::load_config;
use crate::error::CliError;
use crate::output::{finite, num, Outputs, Table};
use crate::settings::Settings;
use crate::PdeArgs;
use quench_core::pdesim::{difference_series, predicted_front_path, simulate, Frame, InitialCondition, SimConfig, SimResult, Snapshot};
use quench_core::travelingwave::Ramp;
use quench_core::Error;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize, Default)]
struct Summary {
    boundary_warning: bool,
    /// Track samples with more than one level crossing.
    multi_crossing_samples: usize,
    final_front: Option<f64>,
    /// Frozen μ: mean front speed and the linear spreading speed 2√μ.
    speed: Option<f64>,
    speed_window: Option<(f64, f64)>,
    linear_speed: Option<f64>,
    /// Homogeneous quench: comparison with the characteristic prediction.
    transient_end: Option<f64>,
    nonnegative_after_transient: Option<bool>,
    final_difference: Option<f64>,
    difference_growth_rate: Option<f64>,
}

pub fn settings(a: &PdeArgs) -> Result<Settings, CliError> {
    let mut s = Settings::new(
        "pde",
        &[
            ("frame", "lab"),
            ("alpha", "0"),
            ("c", "1.2"),
            ("eps", "0.005"),
            ("ramp", "tanh"),
            ("frozen-mu", "none"),
            ("domain", "-700:700"),
            ("n", "5601"),
            ("t-end", "400"),
            ("dt", "0.025"),
            ("ic", "bump"),
            ("ic-center", "0"),
            ("ic-width", "1"),
            ("ic-amplitude", "0.1"),
            ("snapshot-every", "none"),
            ("track-every", "1"),
            ("level", "0.2"),
            ("transient", "auto"),
        ],
    );
    load_config(&mut s, a.config.as_deref())?;
    s.flag("frame", a.frame.clone());
    s.flag("alpha", a.alpha);
    s.flag("c", a.c);
    s.flag("eps", a.eps);
    s.flag("ramp", a.ramp.clone());
    s.flag("frozen-mu", a.frozen_mu);
    s.flag("domain", a.domain.clone());
    s.flag("n", a.n);
    s.flag("t-end", a.t_end);
    s.flag("dt", a.dt);
    s.flag("ic", a.ic.clone());
    s.flag("ic-center", a.ic_center);
    s.flag("ic-width", a.ic_width);
    s.flag("ic-amplitude", a.ic_amplitude);
    s.flag("snapshot-every", a.snapshot_every);
    s.flag("track-every", a.track_every);
    s.flag("level", a.level);
    s.flag("transient", a.transient);
    Ok(s)
}

fn config(s: &Settings) -> Result<SimConfig, CliError> {
    let frame = match s.raw("frame") {
        "lab" => Frame::Lab { alpha: s.get("alpha")? },
        "comoving" => Frame::Comoving { c: s.get("c")? },
        other => return Err(CliError::Usage(format!("frame must be lab or comoving, got '{other}'"))),
    };
    let ic = match s.raw("ic") {
        "bump" => InitialCondition::Bump {
            center: s.get("ic-center")?,
            width: s.get("ic-width")?,
            amplitude: s.get("ic-amplitude")?,
        },
        "seed" => InitialCondition::FrontSeed,
        "zero" => InitialCondition::Zero,
        other => return Err(CliError::Usage(format!("ic must be bump, seed or zero, got '{other}'"))),
    };
    let ramp: Ramp = s.raw("ramp").parse()?;
    Ok(SimConfig {
        frame,
        epsilon: s.get("eps")?,
        ramp,
        frozen_mu: s.optional("frozen-mu")?,
        domain: s.pair("domain")?,
        n: s.get("n")?,
        mesh: None,
        t_end: s.get("t-end")?,
        dt: s.get("dt")?,
        ic,
        snapshot_every: s.optional("snapshot-every")?,
        track_every: s.get("track-every")?,
        level: s.get("level")?,
    })
}

pub fn run(a: PdeArgs, out: &Path) -> Result<(), CliError> {
    let s = settings(&a)?;
    let cfg = config(&s)?;
    cfg.mesh()?;
    let mut files = Outputs::new(out)?;
    let run = match simulate(&cfg) {
        Ok(r) => r,
        Err(Error::SimulationAbort { t, reason, last_healthy }) => {
            let x = cfg.mesh()?.nodes().to_vec();
            let path = write_state(&mut files, "pde_abort.csv", &s, &x, &last_healthy)?;
            return Err(CliError::Abort(format!(
                "at t = {t}: {reason}; last healthy state (t = {}) in {}",
                last_healthy.t,
                path.display()
            )));
        }
        Err(e) => return Err(e.into()),
    };

    let mut summary = Summary {
        boundary_warning: run.boundary_warning,
        multi_crossing_samples: run.track.flagged().len(),
        final_front: run.track.x_fr_num.last().copied().and_then(finite),
        ..Default::default()
    };
    let quench = homogeneous_quench(&cfg, &s, &run, &mut summary)?;
    let track = &run.track;
    let threshold = !track.x_fr_threshold.is_empty();
    let mut columns = vec!["t", "x_fr_num", "crossings"];
    if threshold {
        columns.push("x_fr_threshold");
    }
    if quench.is_some() {
        columns.extend(["x_fr_pred", "difference"]);
    }
    let mut table = Table::new(&columns);
    for i in 0..track.times.len() {
        let mut row = vec![num(track.times[i]), num(track.x_fr_num[i]), track.crossings[i].to_string()];
        if threshold {
            row.push(num(track.x_fr_threshold[i]));
        }
        if let Some(pred) = &quench {
            row.push(num(pred[i]));
            row.push(num(track.x_fr_num[i] - pred[i]));
        }
        table.push(row);
    }
    files.csv("pde_track.csv", &s.metadata(), &table)?;
    if !run.snapshots.is_empty() {
        let mut table = Table::new(&["t", "x", "u"]);
        for snap in &run.snapshots {
            for (x, u) in run.x.iter().zip(&snap.u) {
                table.push(vec![num(snap.t), num(*x), num(*u)]);
            }
        }
        files.csv("pde_snapshots.csv", &s.metadata(), &table)?;
    }
    write_state(&mut files, "pde_final.csv", &s, &run.x, &run.final_state)?;

    if let Some(mu) = cfg.frozen_mu {
        frozen_speed(&cfg, &run, mu, &mut summary);
    }
    files.json("pde_summary.json", &summary)?;

    if let Some(x) = summary.final_front {
        println!("front at t = {}: x = {x:.4}", run.final_state.t);
    }
    if let (Some(v), Some(v0)) = (summary.speed, summary.linear_speed) {
        println!("front speed {v:.4}  (linear spreading speed {v0:.4})");
    }
    if let (Some(ok), Some(d), Some(t0)) = (
        summary.nonnegative_after_transient,
        summary.final_difference,
        summary.transient_end,
    ) {
        println!("x_fr_num - x_fr_pred >= 0 for t >= {t0}: {ok}  (final difference {d:.4})");
    }
    if run.boundary_warning {
        eprintln!("warning: the solution reached the domain boundary");
    }
    files.manifest(&s)?;
    Ok(())
}

fn write_state(
    files: &mut Outputs,
    name: &str,
    s: &Settings,
    x: &[f64],
    snap: &Snapshot,
) -> Result<std::path::PathBuf, CliError> {
    let mut table = Table::new(&["x", "u"]);
    for (x, u) in x.iter().zip(&snap.u) {
        table.push(vec![num(*x), num(*u)]);
    }
    files.csv(name, &format!("{} t={}", s.metadata(), snap.t), &table)
}

/// The characteristic prediction at every tracked time, when the run is a
/// homogeneous quench (lab frame, α = 0, no frozen μ, bump start).
fn homogeneous_quench(
    cfg: &SimConfig,
    s: &Settings,
    run: &SimResult,
    summary: &mut Summary,
) -> Result<Option<Vec<f64>>, CliError> {
    let (Frame::Lab { alpha }, None, InitialCondition::Bump { center, width, .. }) = (cfg.frame, cfg.frozen_mu, &cfg.ic)
    else {
        return Ok(None);
    };
    if alpha != 0.0 {
        return Ok(None);
    }
    let transient = s.optional("transient")?.unwrap_or(0.5 * cfg.t_end);
    let cmp = difference_series(
        &run.track.times,
        &run.track.x_fr_num,
        cfg.epsilon,
        cfg.ramp,
        center + width,
        transient,
    )?;
    summary.transient_end = Some(transient);
    summary.nonnegative_after_transient = Some(cmp.nonnegative_after_transient());
    summary.final_difference = cmp.difference.last().copied().and_then(finite);
    summary.difference_growth_rate = cmp.growth_rate().and_then(finite);
    Ok(Some(predicted_front_path(cfg.epsilon, cfg.ramp, center + width, &run.track.times)?))
}

/// Mean speed over the second half of the time the front spends inside
/// 90% of the domain, so the boundary does not bias it.
fn frozen_speed(cfg: &SimConfig, run: &SimResult, mu: f64, summary: &mut Summary) {
    if mu <= 0.0 {
        return;
    }
    summary.linear_speed = Some(2.0 * mu.sqrt());
    let (a, b) = cfg.domain;
    let limit = b - 0.1 * (b - a);
    let t = &run.track.times;
    let inside = run
        .track
        .x_fr_num
        .iter()
        .position(|x| *x > limit)
        .unwrap_or(t.len());
    if inside < 2 {
        return;
    }
    let t2 = t[inside - 1];
    let t1 = 0.5 * t2;
    summary.speed = run.track.mean_speed(t1, t2).and_then(finite);
    summary.speed_window = Some((t1, t2));
}
