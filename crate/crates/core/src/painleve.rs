//! The Hastings–McLeod solution of Painlevé II, w'' = ηw + 2w³.
//!
//! It is the unique solution with w ~ Ai(η) as η → +∞ and
//! w ~ √(−η/2) as η → −∞. On a finite window [−L₋, L₊] it is the solution
//! of a two-point problem: Dirichlet data from the trans-series on the
//! left, and w'/w = Ai'/Ai on the right, which kills the Bi component.

use crate::error::{invalid, Error, Result};
use crate::solvercore::banded::BandedMatrix;
use crate::solvercore::eigen::eig_tridiag_symmetric;
use crate::solvercore::interp;
use crate::solvercore::mesh::Mesh;
use crate::solvercore::newton::{solve_bvp, DiscreteSystem, NewtonOptions, NewtonReport};
use crate::solvercore::ode::{integrate_ode, Event, OdeOptions};
use crate::specfun::{airy, AI_ZERO};
use crate::stability::{OperatorTag, Spectrum};

/// Smallest admissible left half-width.
pub const MIN_L_MINUS: f64 = 8.0;
/// Smallest admissible right half-width.
pub const MIN_L_PLUS: f64 = 6.0;
/// Smallest admissible node count.
pub const MIN_NODES: usize = 4001;
/// Right end used for tail classification.
pub const CLASSIFY_L_PLUS: f64 = 8.0;

/// A converged Hastings–McLeod profile on a uniform mesh.
#[derive(Debug, Clone)]
pub struct HmSolution {
    pub mesh: Mesh,
    pub w: Vec<f64>,
    /// Central differences inside, the boundary data at the ends.
    pub wprime: Vec<f64>,
    pub report: NewtonReport,
    /// (left Dirichlet defect, right Robin defect) of the discrete solution.
    pub boundary_residuals: (f64, f64),
}

impl HmSolution {
    pub fn step(&self) -> f64 {
        self.mesh.spacing(0)
    }

    /// w(η) by cubic Hermite interpolation; `None` outside the window.
    pub fn eval(&self, eta: f64) -> Option<f64> {
        interp::hermite(&self.mesh, &self.w, &self.wprime, eta)
    }
}

/// Two-term trans-series value √(L/2)(1 + 1/(8η³) − 73/(128η⁶)) at η = −L.
pub fn left_boundary_value(l_minus: f64) -> f64 {
    let eta = -l_minus;
    (l_minus / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * eta.powi(3)) - 73.0 / (128.0 * eta.powi(6)))
}

struct HmSystem {
    eta: Vec<f64>,
    h: f64,
    left: f64,
    rho: f64,
}

/// Interior rows are multiplied through by h².
impl DiscreteSystem for HmSystem {
    fn dim(&self) -> usize {
        self.eta.len()
    }

    fn residual(&self, w: &[f64], out: &mut [f64]) {
        let n = w.len();
        let h2 = self.h * self.h;
        out[0] = w[0] - self.left;
        for i in 1..n - 1 {
            out[i] = w[i + 1] - 2.0 * w[i] + w[i - 1] - h2 * (self.eta[i] * w[i] + 2.0 * w[i].powi(3));
        }
        // Ghost node eliminated with the Robin condition (w_{n} - w_{n-2}) / 2h = ρ w_{n-1}.
        let m = n - 1;
        out[m] = 2.0 * w[m - 1] + 2.0 * self.h * self.rho * w[m] - 2.0 * w[m]
            - h2 * (self.eta[m] * w[m] + 2.0 * w[m].powi(3));
    }

    fn jacobian(&self, w: &[f64]) -> BandedMatrix {
        let n = w.len();
        let h2 = self.h * self.h;
        let mut j = BandedMatrix::zeros(n, 1, 1);
        j.set(0, 0, 1.0);
        for i in 1..n - 1 {
            j.set(i, i - 1, 1.0);
            j.set(i, i, -2.0 - h2 * (self.eta[i] + 6.0 * w[i] * w[i]));
            j.set(i, i + 1, 1.0);
        }
        let m = n - 1;
        j.set(m, m - 1, 2.0);
        j.set(m, m, 2.0 * self.h * self.rho - 2.0 - h2 * (self.eta[m] + 6.0 * w[m] * w[m]));
        j
    }
}

/// Solve the Hastings–McLeod boundary-value problem on [−L₋, L₊] with `n` nodes.
///
/// Requires L₋ ≥ 8, L₊ ≥ 6, n ≥ 4001. A profile that grows past
/// 10√(L₋/2) has left the separatrix and is reported as such.
pub fn solve_hastings_mcleod(l_minus: f64, l_plus: f64, n: usize) -> Result<HmSolution> {
    if !(l_minus >= MIN_L_MINUS) || !(l_plus >= MIN_L_PLUS) {
        return Err(invalid(format!(
            "window [-{l_minus}, {l_plus}] needs L- >= {MIN_L_MINUS}, L+ >= {MIN_L_PLUS}"
        )));
    }
    if n < MIN_NODES {
        return Err(invalid(format!("need >= {MIN_NODES} nodes, got {n}")));
    }
    let mesh = Mesh::uniform(-l_minus, l_plus, n)?;
    let h = mesh.spacing(0);
    let a = airy(l_plus)?;
    let system = HmSystem {
        eta: mesh.nodes().to_vec(),
        h,
        left: left_boundary_value(l_minus),
        rho: a.derivative / a.value,
    };
    let guess: Vec<f64> = mesh
        .nodes()
        .iter()
        .map(|&e| {
            let ai = airy(e).map(|p| p.value).unwrap_or(0.0);
            (e.min(0.0).abs() / 2.0).sqrt().max(ai)
        })
        .collect();
    // Rows are scaled by h², so the tolerance sits near roundoff.
    let opts = NewtonOptions {
        tol: 1e-13,
        max_iter: 60,
        ..Default::default()
    };
    let (w, report) = solve_bvp(&system, guess, &opts)?;
    let bound = 10.0 * (l_minus / 2.0).sqrt();
    if let Some(i) = w.iter().position(|v| !v.is_finite() || v.abs() > bound) {
        return Err(Error::SeparatrixMissed {
            eta: mesh.nodes()[i],
            value: w[i].abs(),
        });
    }
    if !report.converged {
        return Err(Error::NewtonFailed(Box::new(report)));
    }
    let m = n - 1;
    let mut wprime = vec![0.0; n];
    wprime[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
    for i in 1..m {
        wprime[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
    }
    wprime[m] = system.rho * w[m];
    let ghost = h * h * (system.eta[m] * w[m] + 2.0 * w[m].powi(3)) + 2.0 * w[m] - w[m - 1];
    let boundary_residuals = (
        (w[0] - system.left).abs(),
        ((ghost - w[m - 1]) / (2.0 * h) - system.rho * w[m]).abs(),
    );
    Ok(HmSolution {
        mesh,
        w,
        wprime,
        report,
        boundary_residuals,
    })
}

/// Integrate w'' = ηw + 2w³ backward from the right end of `sol` to `eta_to`.
///
/// The start value is w(L₊), Richardson-extrapolated against `fine` (the
/// same window with 2n − 1 nodes) when given, and w'(L₊) follows from the
/// Airy ratio. The separatrix amplifies start errors strongly, so the
/// O(h²) error of a single mesh is usually too large to reach η ≈ −L₋/2.
pub fn shoot_backward(sol: &HmSolution, fine: Option<&HmSolution>, eta_to: f64) -> Result<f64> {
    let lp = sol.mesh.last();
    let mut w = *sol.w.last().expect("non-empty solution");
    if let Some(f) = fine {
        if f.w.len() != 2 * sol.w.len() - 1 || f.mesh.last() != lp || f.mesh.first() != sol.mesh.first() {
            return Err(invalid("refined solution must use the same window with 2n - 1 nodes"));
        }
        w = (4.0 * f.w.last().expect("non-empty solution") - w) / 3.0;
    }
    let a = airy(lp)?;
    let field = |eta: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = eta * y[0] + 2.0 * y[0].powi(3);
    };
    let opts = OdeOptions {
        rtol: 1e-13,
        atol: 1e-16,
        record_steps: false,
        ..Default::default()
    };
    let tr = integrate_ode(field, &[w, w * a.derivative / a.value], lp, eta_to, &[], &opts)?;
    Ok(tr.last_state()[0])
}

/// Bound certifying V = η + 6w² > 0 on the whole window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialCertificate {
    /// Smallest nodal value of V.
    pub min_value: f64,
    pub argmin: f64,
    /// Global Lipschitz constant of V used between nodes.
    pub lipschitz: f64,
    /// Largest possible dip of V below its nodal values, `lipschitz · h / 2`.
    pub margin_bound: f64,
}

impl PotentialCertificate {
    /// Certified lower bound for V on the window.
    pub fn lower_bound(&self) -> f64 {
        self.min_value - self.margin_bound
    }
}

/// Certify V = η + 6w² > 0 between nodes using |V'| ≤ 1 + 12 max|w| max|w'|.
pub fn certify_potential_positive(sol: &HmSolution) -> Result<PotentialCertificate> {
    let eta = sol.mesh.nodes();
    let h = sol.mesh.max_spacing();
    let wmax = sol.w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let dmax = sol.wprime.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lipschitz = 1.0 + 12.0 * wmax * dmax;
    let margin_bound = 0.5 * lipschitz * h;
    let mut cert = PotentialCertificate {
        min_value: f64::INFINITY,
        argmin: f64::NAN,
        lipschitz,
        margin_bound,
    };
    for (&e, &w) in eta.iter().zip(&sol.w) {
        let v = e + 6.0 * w * w;
        if v < cert.min_value {
            cert.min_value = v;
            cert.argmin = e;
        }
    }
    if !(cert.lower_bound() > 0.0) {
        return Err(Error::Certificate {
            eta: cert.argmin,
            reason: format!(
                "V = {:.6e} at a node, margin {:.3e}; positivity not certified",
                cert.min_value, margin_bound
            ),
        });
    }
    Ok(cert)
}

/// Bound certifying w > √(−η/6) on η ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundCertificate {
    /// Smallest certified gap between w and √(−η/6) over all cells.
    pub min_gap: f64,
    pub argmin: f64,
}

/// Certify w(η) > √(−η/6) for η ≤ 0.
///
/// On each cell [a, b] the certified lower bound for w is
/// min(w(a), w(b)) − max|w'| h/2, and √(−η/6) is at most its value at a,
/// since it decreases in η.
pub fn certify_lower_bound(sol: &HmSolution) -> Result<LowerBoundCertificate> {
    let eta = sol.mesh.nodes();
    let dmax = sol.wprime.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut cert = LowerBoundCertificate {
        min_gap: f64::INFINITY,
        argmin: f64::NAN,
    };
    for i in 0..eta.len() - 1 {
        let (a, b) = (eta[i], eta[i + 1]);
        if a > 0.0 {
            break;
        }
        let w_low = sol.w[i].min(sol.w[i + 1]) - 0.5 * dmax * (b - a);
        let gap = w_low - (-a / 6.0).sqrt();
        if gap < cert.min_gap {
            cert.min_gap = gap;
            cert.argmin = a;
        }
    }
    if !(cert.min_gap > 0.0) {
        return Err(Error::Certificate {
            eta: cert.argmin,
            reason: format!("w - sqrt(-eta/6) >= {:.3e} is not positive", cert.min_gap),
        });
    }
    Ok(cert)
}

/// Certify that w decreases strictly from node to node.
pub fn certify_monotone(sol: &HmSolution) -> Result<()> {
    match sol.w.windows(2).position(|p| !(p[1] < p[0])) {
        None => Ok(()),
        Some(i) => Err(Error::Certificate {
            eta: sol.mesh.nodes()[i],
            reason: "w is not strictly decreasing".into(),
        }),
    }
}

/// Check w(0) ≥ Ai(0); returns w(0).
pub fn certify_above_airy_at_origin(sol: &HmSolution) -> Result<f64> {
    let w0 = sol.eval(0.0).ok_or_else(|| invalid("window does not contain 0"))?;
    if w0 >= AI_ZERO {
        Ok(w0)
    } else {
        Err(Error::Certificate {
            eta: 0.0,
            reason: format!("w(0) = {w0} below Ai(0) = {AI_ZERO}"),
        })
    }
}

/// The `k` largest Dirichlet eigenvalues of ∂² − q on a uniform grid.
///
/// `q` holds the potential at the interior nodes, spaced `h` apart.
pub fn dirichlet_spectrum(q: &[f64], h: f64, k: usize, tag: OperatorTag) -> Result<Spectrum> {
    let diag: Vec<f64> = q.iter().map(|v| -2.0 / (h * h) - v).collect();
    let off = vec![1.0 / (h * h); q.len().saturating_sub(1)];
    let eigenvalues = eig_tridiag_symmetric(&diag, &off, k)?;
    Ok(Spectrum {
        eigenvalues,
        n: q.len(),
        domain_halflength: 0.5 * h * (q.len() + 1) as f64,
        operator: tag,
    })
}

/// Top of the spectrum of ∂² − (η + 6w²) with Dirichlet ends.
///
/// The ground state must be negative; otherwise the linearisation is not
/// invertible and that is reported as a certificate failure.
pub fn linearization_ground_state(sol: &HmSolution) -> Result<Spectrum> {
    let eta = sol.mesh.nodes();
    let n = eta.len();
    let q: Vec<f64> = (1..n - 1).map(|i| eta[i] + 6.0 * sol.w[i] * sol.w[i]).collect();
    let spec = dirichlet_spectrum(&q, sol.step(), 5.min(q.len()), OperatorTag::PainleveLinearization)?;
    if spec.eigenvalues[0] >= 0.0 {
        return Err(Error::Certificate {
            eta: f64::NAN,
            reason: format!("ground state {} is not negative", spec.eigenvalues[0]),
        });
    }
    Ok(spec)
}

/// Fate of the solution w ~ k Ai(η) followed towards η → −∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// Bounded, oscillating about zero.
    OscillatoryDecay { sign_changes: usize },
    /// Blows up at a finite η.
    Pole { position: f64, bracket: (f64, f64) },
    /// Tracks ±√(−η/2) across the whole window.
    Separatrix { sign: i8 },
}

/// Integrate w ~ k Ai(η) backwards from η = 8 and classify the outcome.
///
/// |k| = 1 is the separatrix itself and is answered by the boundary-value
/// solver (k = −1 by the symmetry w → −w). Blow-up is detected at |w| = 1e3
/// and the pole placed using w ≈ 1/(η − η_p).
pub fn classify_airy_tail(k: f64, l_minus: f64) -> Result<TailClass> {
    if !k.is_finite() || !(l_minus >= MIN_L_MINUS) {
        return Err(invalid(format!("classify needs finite k and L- >= {MIN_L_MINUS}")));
    }
    if (k.abs() - 1.0).abs() < 1e-12 {
        solve_hastings_mcleod(l_minus, CLASSIFY_L_PLUS, 8001)?;
        return Ok(TailClass::Separatrix {
            sign: if k > 0.0 { 1 } else { -1 },
        });
    }
    if k == 0.0 {
        return Ok(TailClass::OscillatoryDecay { sign_changes: 0 });
    }
    let a = airy(CLASSIFY_L_PLUS)?;
    let y0 = [k * a.value, k * a.derivative];
    let blowup = |_t: f64, y: &[f64]| y[0].abs() - 1e3;
    let events = [Event::terminal(&blowup)];
    let opts = OdeOptions {
        rtol: 1e-11,
        atol: 1e-14,
        ..Default::default()
    };
    let field = |t: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = t * y[0] + 2.0 * y[0].powi(3);
    };
    let traj = integrate_ode(field, &y0, CLASSIFY_L_PLUS, -l_minus, &events, &opts)?;
    if traj.terminated {
        let te = traj.last_time();
        let we = traj.last_state()[0].abs();
        let position = te - 1.0 / we;
        return Ok(TailClass::Pole {
            position,
            bracket: (te - 2.0 / we, te),
        });
    }
    let end = traj.last_state()[0];
    let target = (l_minus / 2.0).sqrt();
    if (end.abs() - target).abs() < 0.25 * target {
        return Ok(TailClass::Separatrix {
            sign: if end > 0.0 { 1 } else { -1 },
        });
    }
    let sign_changes = traj.y.windows(2).filter(|p| p[0][0] * p[1][0] < 0.0).count();
    Ok(TailClass::OscillatoryDecay { sign_changes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_preconditions() {
        assert!(solve_hastings_mcleod(6.0, 8.0, 8001).is_err());
        assert!(solve_hastings_mcleod(12.0, 4.0, 8001).is_err());
        assert!(solve_hastings_mcleod(12.0, 8.0, 1000).is_err());
    }

    #[test]
    fn trans_series_value() {
        let v = left_boundary_value(12.0);
        let expect = 6f64.sqrt() * (1.0 - 1.0 / (8.0 * 1728.0) - 73.0 / (128.0 * 1728.0 * 1728.0));
        assert!((v - expect).abs() < 1e-15);
    }
}
