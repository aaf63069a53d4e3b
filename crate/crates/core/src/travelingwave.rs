//! Traveling fronts of the slowly quenched Allen–Cahn equation.
//!
//! In the comoving variable ξ = x − ct the front satisfies
//! u_ξξ + c u_ξ + μ(ξ) u − u³ = 0 with μ(ξ) = −tanh(εξ). Everything here
//! is computed in ζ = −ξ, where the profile runs from the trivial state at
//! ζ → −∞ (μ = −1) up to the plateau u = √μ at ζ → +∞:
//!
//! ```text
//! u'' − c u' + μ(ζ) u − u³ = 0,   μ(ζ) = tanh(εζ)
//! ```
//!
//! The discretisation works with w = ln u. On the pre-front plateau u is
//! exponentially small and its size is exponentially sensitive to where the
//! front sits, which defeats Newton in the original variable once ε drops
//! below a few thousandths. In w the same problem is mildly nonlinear.

use crate::error::{invalid, Error, Result};
use crate::painleve::HmSolution;
use crate::solvercore::banded::BandedMatrix;
use crate::solvercore::continuation::{continue_branch, ContinuationOptions, ParameterizedSystem};
use crate::solvercore::fit;
use crate::solvercore::interp;
use crate::solvercore::mesh::{GradedSpec, Mesh};
use crate::solvercore::newton::{solve_bvp, DiscreteSystem, NewtonOptions, NewtonReport};
use crate::solvercore::ode::{integrate_ode, Event, OdeOptions};
use crate::specfun::omega0;

/// Shape of the quench μ(ζ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ramp {
    /// μ = tanh(εζ).
    #[default]
    Tanh,
    /// μ = clamp(εζ, −1, 1).
    LinearClipped,
}

impl Ramp {
    /// μ at `zeta`.
    pub fn mu(self, epsilon: f64, zeta: f64) -> f64 {
        match self {
            Ramp::Tanh => (epsilon * zeta).tanh(),
            Ramp::LinearClipped => (epsilon * zeta).clamp(-1.0, 1.0),
        }
    }

    /// The ζ at which the ramp takes the value `mu` (|mu| < 1).
    pub fn inverse(self, epsilon: f64, mu: f64) -> f64 {
        match self {
            Ramp::Tanh => mu.atanh() / epsilon,
            Ramp::LinearClipped => mu / epsilon,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ramp::Tanh => "tanh",
            Ramp::LinearClipped => "linear",
        }
    }
}

impl std::str::FromStr for Ramp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Ramp::Tanh),
            "linear" | "linear-clipped" => Ok(Ramp::LinearClipped),
            other => Err(invalid(format!("unknown ramp '{other}' (tanh|linear)"))),
        }
    }
}

/// Front speed, quench rate and ramp shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchParams {
    pub c: f64,
    pub epsilon: f64,
    pub ramp: Ramp,
}

impl QuenchParams {
    /// Requires 0 ≤ c < 2 and 0 < ε ≤ 0.1.
    pub fn new(c: f64, epsilon: f64, ramp: Ramp) -> Result<Self> {
        if !(0.0..2.0).contains(&c) {
            return Err(invalid(format!("front speed c = {c} outside [0, 2)")));
        }
        if !(epsilon > 0.0 && epsilon <= 0.1) {
            return Err(invalid(format!("quench rate eps = {epsilon} outside (0, 0.1]")));
        }
        Ok(Self { c, epsilon, ramp })
    }

    /// μ_c = c²/4, where the trivial state turns from node to focus.
    pub fn mu_critical(&self) -> f64 {
        self.c * self.c / 4.0
    }

    pub fn mu(&self, zeta: f64) -> f64 {
        self.ramp.mu(self.epsilon, zeta)
    }
}

/// Branch point of the dispersion relation d(λ, ν) = ν² + cν + μ − λ of
/// the trivial state in the comoving frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    /// λ_br = μ − c²/4.
    pub lambda_br: f64,
    /// ν_br = −c/2.
    pub nu_br: f64,
    /// μ at which λ_br vanishes, c²/4.
    pub mu_c: f64,
}

/// Solve d = 0 and ∂_ν d = 0 in closed form.
pub fn dispersion_branch_point(c: f64, mu: f64) -> DispersionPoint {
    let mu_c = c * c / 4.0;
    DispersionPoint {
        lambda_br: mu - mu_c,
        nu_br: -c / 2.0,
        mu_c,
    }
}

/// Eigenvalues of one end state of the three-dimensional front system
/// (u, u', μ): the slow ramp direction and the two fast ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndState {
    pub slow: f64,
    pub fast_unstable: f64,
    pub fast_stable: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSpectra {
    /// (u, u', μ) = (0, 0, −1).
    pub left: EndState,
    /// (u, u', μ) = (1, 0, 1).
    pub right: EndState,
}

/// Linearisation of the end states in ζ.
///
/// Fast eigenvectors are (1, ν, 0); the slow one is (0, 0, 1).
pub fn equilibrium_eigenpairs(c: f64, epsilon: f64) -> EquilibriumSpectra {
    let h = c / 2.0;
    let l = (h * h + 1.0).sqrt();
    let r = (h * h + 2.0).sqrt();
    EquilibriumSpectra {
        left: EndState {
            slow: 2.0 * epsilon,
            fast_unstable: h + l,
            fast_stable: h - l,
        },
        right: EndState {
            slow: -2.0 * epsilon,
            fast_unstable: h + r,
            fast_stable: h - r,
        },
    }
}

/// μ_c + Ω₀ (1 − c⁴/16)^{2/3} ε^{2/3}, the predicted front position in μ.
pub fn predicted_delay(c: f64, epsilon: f64) -> Result<f64> {
    if !(c > 0.0 && c < 2.0) {
        return Err(invalid(format!("predicted delay needs 0 < c < 2, got {c}")));
    }
    if !(epsilon >= 0.0) {
        return Err(invalid(format!("predicted delay needs eps >= 0, got {epsilon}")));
    }
    let a = 1.0 - c.powi(4) / 16.0;
    Ok(c * c / 4.0 + omega0().value * a.powf(2.0 / 3.0) * epsilon.powf(2.0 / 3.0))
}

/// Where the profile first rises through u = c/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub mu_fr: f64,
    pub zeta_fr: f64,
}

/// Resolution and extent of a front solve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontOptions {
    /// Half-length L of the domain [−L, L]; defaults to 5.5/ε.
    pub half_length: Option<f64>,
    /// Target node count. When `None` the finest spacing is [`DEFAULT_H_MIN`].
    pub nodes: Option<usize>,
    pub newton: NewtonOptions,
}

/// Finest mesh spacing of the default front mesh.
pub const DEFAULT_H_MIN: f64 = 0.1;
/// Smallest admissible node count.
pub const MIN_NODES: usize = 2001;
const H_MAX_FACTOR: f64 = 20.0;
const GROWTH: f64 = 1.05;

/// A converged front on a ζ-mesh.
#[derive(Debug, Clone)]
pub struct FrontSolution {
    pub params: QuenchParams,
    pub mesh: Mesh,
    pub u: Vec<f64>,
    /// ln u, the Newton unknown; finite where u underflows.
    pub log_u: Vec<f64>,
    /// u' = du/dζ.
    pub v: Vec<f64>,
    pub mu: Vec<f64>,
    pub report: NewtonReport,
    /// `None` when c = 0, where the interface is not defined.
    pub interface: Option<Interface>,
}

impl FrontSolution {
    pub fn half_length(&self) -> f64 {
        self.mesh.last()
    }

    /// u(ζ) by cubic Hermite interpolation.
    pub fn u_at(&self, zeta: f64) -> Option<f64> {
        interp::hermite(&self.mesh, &self.u, &self.v, zeta)
    }

    /// The profile in the comoving variable ξ = −ζ, ascending in ξ:
    /// `(ξ, u, u_ξ)`.
    pub fn profile_xi(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let xi = self.mesh.nodes().iter().rev().map(|z| -z).collect();
        let u = self.u.iter().rev().copied().collect();
        let du = self.v.iter().rev().map(|v| -v).collect();
        (xi, u, du)
    }

    /// Residuals of the two projection boundary conditions.
    pub fn boundary_residuals(&self) -> (f64, f64) {
        let n = self.u.len();
        let c = self.params.c;
        let (nu_u, nu_s, u_plus) = projections(c, self.mu[0], self.mu[n - 1]);
        (
            (self.v[0] - nu_u * self.u[0]).abs(),
            (self.v[n - 1] - nu_s * (self.u[n - 1] - u_plus)).abs(),
        )
    }
}

/// (ν_u, ν_s, u₊) for the left and right projections.
fn projections(c: f64, mu_left: f64, mu_right: f64) -> (f64, f64, f64) {
    let h = c / 2.0;
    (
        h + (h * h - mu_left).sqrt(),
        h - (h * h + 2.0 * mu_right).sqrt(),
        mu_right.max(0.0).sqrt(),
    )
}

/// Centre of the fine window: the predicted interface, or ζ = 0 when c = 0.
fn window_centre(params: &QuenchParams) -> f64 {
    if params.c > 0.0 {
        let mu = predicted_delay(params.c, params.epsilon).unwrap_or(params.mu_critical());
        params.ramp.inverse(params.epsilon, mu.min(0.999))
    } else {
        0.0
    }
}

fn window_half_width(epsilon: f64) -> f64 {
    (25.0 * epsilon.powf(-1.0 / 3.0)).max(60.0)
}

fn front_mesh_spec(lo: f64, hi: f64, fine: (f64, f64), h_min: f64) -> GradedSpec {
    GradedSpec {
        lo,
        hi,
        fine_lo: fine.0,
        fine_hi: fine.1,
        h_min,
        h_max: H_MAX_FACTOR * h_min,
        growth: GROWTH,
    }
}

/// Graded mesh on [−L, L] refined on `fine`, with about `nodes` nodes
/// (at least `nodes`), or spacing [`DEFAULT_H_MIN`] when `nodes` is `None`.
fn build_mesh(half_length: f64, fine: (f64, f64), nodes: Option<usize>) -> Result<Mesh> {
    let make = |h: f64| Mesh::graded(&front_mesh_spec(-half_length, half_length, fine, h));
    let Some(target) = nodes else {
        return make(DEFAULT_H_MIN);
    };
    // Node count decreases with h_min; bisect in log h for the coarsest mesh
    // with at least `target` nodes.
    let (mut lo, mut hi) = (1e-4_f64.ln(), (half_length / 10.0).ln());
    if make(hi.exp())?.len() >= target {
        return make(hi.exp());
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if make(mid.exp())?.len() >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    make(lo.exp())
}

/// Nonuniform three-point stencils at each interior node, with the row
/// scale h₋h₊ that keeps the discrete residual near unit size.
#[derive(Debug, Clone)]
struct Stencils {
    d2: Vec<[f64; 3]>,
    d1: Vec<[f64; 3]>,
    scale: Vec<f64>,
}

impl Stencils {
    fn new(x: &[f64]) -> Self {
        let n = x.len();
        let mut d2 = Vec::with_capacity(n - 2);
        let mut d1 = Vec::with_capacity(n - 2);
        let mut scale = Vec::with_capacity(n - 2);
        for i in 1..n - 1 {
            let hm = x[i] - x[i - 1];
            let hp = x[i + 1] - x[i];
            let s = hp + hm;
            let a2p = 2.0 / (hp * s);
            let a2m = 2.0 / (hm * s);
            d2.push([a2m, -a2p - a2m, a2p]);
            d1.push([-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s)]);
            scale.push(hm * hp);
        }
        Self { d2, d1, scale }
    }

    fn apply(st: &[f64; 3], w: &[f64], i: usize) -> f64 {
        st[0] * w[i - 1] + st[1] * w[i] + st[2] * w[i + 1]
    }
}

/// The log-variable front equations on a fixed mesh; ε enters through μ
/// and the boundary projections.
struct LogFront<'a> {
    zeta: &'a [f64],
    stencils: Stencils,
    c: f64,
    ramp: Ramp,
}

impl<'a> LogFront<'a> {
    fn new(mesh: &'a Mesh, c: f64, ramp: Ramp) -> Self {
        Self {
            zeta: mesh.nodes(),
            stencils: Stencils::new(mesh.nodes()),
            c,
            ramp,
        }
    }

    fn residual_at(&self, w: &[f64], eps: f64, out: &mut [f64]) {
        let n = w.len();
        let z = self.zeta;
        let (nu_u, nu_s, u_plus) =
            projections(self.c, self.ramp.mu(eps, z[0]), self.ramp.mu(eps, z[n - 1]));
        out[0] = w[1] - w[0] - (z[1] - z[0]) * nu_u;
        for i in 1..n - 1 {
            let d2 = Stencils::apply(&self.stencils.d2[i - 1], w, i);
            let d1 = Stencils::apply(&self.stencils.d1[i - 1], w, i);
            out[i] = self.stencils.scale[i - 1]
                * (d2 + d1 * d1 - self.c * d1 + self.ramp.mu(eps, z[i]) - (2.0 * w[i]).exp());
        }
        let h = z[n - 1] - z[n - 2];
        let e = w[n - 1].exp();
        let dw = (w[n - 1] - w[n - 2]) / h;
        out[n - 1] = e * (dw - nu_s) + nu_s * u_plus;
    }

    fn jacobian_at(&self, w: &[f64], eps: f64) -> BandedMatrix {
        let n = w.len();
        let z = self.zeta;
        let (_, nu_s, _) = projections(self.c, self.ramp.mu(eps, z[0]), self.ramp.mu(eps, z[n - 1]));
        let mut j = BandedMatrix::zeros(n, 1, 1);
        j.set(0, 0, -1.0);
        j.set(0, 1, 1.0);
        for i in 1..n - 1 {
            let s2 = &self.stencils.d2[i - 1];
            let s1 = &self.stencils.d1[i - 1];
            let d1 = Stencils::apply(s1, w, i);
            let k = 2.0 * d1 - self.c;
            let sc = self.stencils.scale[i - 1];
            j.set(i, i - 1, sc * (s2[0] + k * s1[0]));
            j.set(i, i, sc * (s2[1] + k * s1[1] - 2.0 * (2.0 * w[i]).exp()));
            j.set(i, i + 1, sc * (s2[2] + k * s1[2]));
        }
        let h = z[n - 1] - z[n - 2];
        let e = w[n - 1].exp();
        let dw = (w[n - 1] - w[n - 2]) / h;
        j.set(n - 1, n - 1, e * (dw - nu_s) + e / h);
        j.set(n - 1, n - 2, -e / h);
        j
    }
}

struct AtEpsilon<'a, 'b> {
    front: &'b LogFront<'a>,
    eps: f64,
}

impl DiscreteSystem for AtEpsilon<'_, '_> {
    fn dim(&self) -> usize {
        self.front.zeta.len()
    }
    fn residual(&self, x: &[f64], out: &mut [f64]) {
        self.front.residual_at(x, self.eps, out)
    }
    fn jacobian(&self, x: &[f64]) -> BandedMatrix {
        self.front.jacobian_at(x, self.eps)
    }
}

/// Continuation parameter p = ln ε.
impl ParameterizedSystem for LogFront<'_> {
    fn dim(&self) -> usize {
        self.zeta.len()
    }
    fn residual(&self, x: &[f64], p: f64, out: &mut [f64]) {
        self.residual_at(x, p.exp(), out)
    }
    fn jacobian(&self, x: &[f64], p: f64) -> BandedMatrix {
        self.jacobian_at(x, p.exp())
    }
}

/// Initial guess in w = ln u: a tanh step onto √μ at ζ₀, with an
/// exponential tail to the left of it.
fn seed(mesh: &Mesh, params: &QuenchParams, zeta0: f64) -> Vec<f64> {
    seed_w(mesh.nodes(), params, zeta0)
}

/// The Newton seed as u(ζ) on arbitrary nodes, centred on the predicted
/// interface. Used as a PDE initial condition.
pub fn seed_profile(params: &QuenchParams, zeta: &[f64]) -> Vec<f64> {
    let centre = window_centre(params);
    seed_w(zeta, params, centre).into_iter().map(f64::exp).collect()
}

fn seed_w(zeta: &[f64], params: &QuenchParams, zeta0: f64) -> Vec<f64> {
    let floor = if params.c > 0.0 {
        params.mu_critical()
    } else {
        0.1 * params.epsilon.powf(2.0 / 3.0)
    };
    let rate = params.c / 2.0 + 0.3;
    zeta.iter()
        .map(|&z| {
            if z > zeta0 {
                0.5 * params.mu(z).max(floor).ln() + (0.5 * (1.0 + (z - zeta0).tanh())).ln()
            } else {
                0.5 * floor.ln() - 2f64.ln() + rate * (z - zeta0)
            }
        })
        .collect()
}

/// Transfer ln u of `other` onto `mesh`, extrapolating linearly in ζ.
fn transfer(other: &FrontSolution, mesh: &Mesh) -> Vec<f64> {
    let w = &other.log_u;
    let src = &other.mesh;
    let n = w.len();
    let s0 = (w[1] - w[0]) / src.spacing(0);
    let s1 = (w[n - 1] - w[n - 2]) / src.spacing(n - 2);
    mesh.nodes()
        .iter()
        .map(|&z| {
            if z <= src.first() {
                w[0] + s0 * (z - src.first())
            } else if z >= src.last() {
                w[n - 1] + s1 * (z - src.last())
            } else {
                interp::linear(src, w, z).expect("inside source mesh")
            }
        })
        .collect()
}

fn assemble(params: QuenchParams, mesh: Mesh, w: &[f64], report: NewtonReport) -> FrontSolution {
    let n = w.len();
    let z = mesh.nodes();
    let u: Vec<f64> = w.iter().map(|x| x.exp()).collect();
    let mu: Vec<f64> = z.iter().map(|&x| params.mu(x)).collect();
    let st = Stencils::new(z);
    let mut v = vec![0.0; n];
    v[0] = u[0] * (w[1] - w[0]) / (z[1] - z[0]);
    for i in 1..n - 1 {
        v[i] = u[i] * Stencils::apply(&st.d1[i - 1], w, i);
    }
    v[n - 1] = u[n - 1] * (w[n - 1] - w[n - 2]) / (z[n - 1] - z[n - 2]);
    let mut sol = FrontSolution {
        params,
        mesh,
        u,
        log_u: w.to_vec(),
        v,
        mu,
        report,
        interface: None,
    };
    if params.c > 0.0 {
        sol.interface = front_location(&sol).ok();
    }
    sol
}

fn check_extent(params: &QuenchParams, half_length: f64, nodes: Option<usize>) -> Result<()> {
    if half_length < 5.0 / params.epsilon * (1.0 - 1e-12) {
        return Err(invalid(format!(
            "half-length {half_length} below 5/eps = {}",
            5.0 / params.epsilon
        )));
    }
    if let Some(n) = nodes {
        if n < MIN_NODES {
            return Err(invalid(format!("front mesh needs >= {MIN_NODES} nodes, got {n}")));
        }
    }
    Ok(())
}

/// Solve for the front with damped Newton in w = ln u.
///
/// `guess` may live on any mesh; it is transferred onto the new one. Without
/// a guess the tanh seed centred on the predicted interface is used.
pub fn solve_front(
    params: &QuenchParams,
    options: &FrontOptions,
    guess: Option<&FrontSolution>,
) -> Result<FrontSolution> {
    let half_length = options.half_length.unwrap_or(5.5 / params.epsilon);
    check_extent(params, half_length, options.nodes)?;
    let centre = window_centre(params);
    let hw = window_half_width(params.epsilon);
    let mesh = build_mesh(half_length, (centre - hw, centre + hw), options.nodes)?;
    let w0 = match guess {
        Some(g) => transfer(g, &mesh),
        None => seed(&mesh, params, centre),
    };
    let front = LogFront::new(&mesh, params.c, params.ramp);
    let system = AtEpsilon {
        front: &front,
        eps: params.epsilon,
    };
    let (w, report) = solve_bvp(&system, w0, &options.newton)?;
    if !report.converged {
        return Err(Error::NewtonFailed(Box::new(report)));
    }
    Ok(assemble(*params, mesh, &w, report))
}

/// Fronts at several ε by continuation in ln ε on one shared mesh.
///
/// The branch starts from a direct solve at `max(0.05, max ε)` and lands
/// exactly on each requested ε. Results come back in the order requested.
pub fn front_branch(
    c: f64,
    ramp: Ramp,
    epsilons: &[f64],
    options: &FrontOptions,
) -> Result<Vec<FrontSolution>> {
    if epsilons.is_empty() {
        return Err(invalid("no epsilon values requested"));
    }
    let eps_min = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let eps_max = epsilons.iter().copied().fold(0.0, f64::max);
    let start = eps_max.max(0.05);
    let p_lo = QuenchParams::new(c, eps_min, ramp)?;
    let p_hi = QuenchParams::new(c, start, ramp)?;
    let half_length = options.half_length.unwrap_or(5.5 / eps_min);
    check_extent(&p_lo, half_length, options.nodes)?;

    let fine = (
        window_centre(&p_hi) - window_half_width(start),
        window_centre(&p_lo) + window_half_width(eps_min),
    );
    let mesh = build_mesh(half_length, fine, options.nodes)?;
    let front = LogFront::new(&mesh, c, ramp);
    let w0 = seed(&mesh, &p_hi, window_centre(&p_hi));
    let copts = ContinuationOptions {
        initial_step: 0.1,
        max_step: 0.4,
        newton: options.newton,
        checkpoints: epsilons.iter().map(|e| e.ln()).collect(),
        ..Default::default()
    };
    let branch = continue_branch(&front, w0, start.ln(), eps_min.ln(), &copts)?;
    if branch.stalled {
        let last = branch.entries.last().expect("non-empty branch");
        return Err(Error::NewtonFailed(Box::new(NewtonReport {
            converged: false,
            ..last.report.clone()
        })));
    }
    epsilons
        .iter()
        .map(|&eps| {
            let entry = branch
                .at(eps.ln(), 1e-12)
                .ok_or_else(|| invalid(format!("branch missed eps = {eps}")))?;
            let params = QuenchParams::new(c, eps, ramp)?;
            Ok(assemble(params, mesh.clone(), &entry.solution, entry.report.clone()))
        })
        .collect()
}

/// First mesh crossing of u through c/4, scanning up in ζ.
///
/// μ is interpolated linearly between the bracketing nodes and ζ follows
/// from the inverse ramp. A node sitting exactly on the threshold counts
/// as the crossing.
pub fn front_location(sol: &FrontSolution) -> Result<Interface> {
    let c = sol.params.c;
    if !(c > 0.0) {
        return Err(invalid("front location needs c > 0"));
    }
    let thr = c / 4.0;
    let i = sol
        .u
        .iter()
        .position(|&u| u >= thr)
        .ok_or(Error::NoInterface { threshold: thr })?;
    let mu_fr = if i == 0 || sol.u[i] == thr {
        sol.mu[i]
    } else {
        let s = (thr - sol.u[i - 1]) / (sol.u[i] - sol.u[i - 1]);
        sol.mu[i - 1] + s * (sol.mu[i] - sol.mu[i - 1])
    };
    let zeta_fr = if sol.u[i] == thr || i == 0 {
        sol.mesh.nodes()[i]
    } else {
        sol.params.ramp.inverse(sol.params.epsilon, mu_fr)
    };
    Ok(Interface { mu_fr, zeta_fr })
}

/// u at ξ = 0, the pitchfork point of the stationary front.
pub fn amplitude_at_pitchfork(sol: &FrontSolution) -> Result<f64> {
    sol.u_at(0.0).ok_or_else(|| invalid("ζ = 0 outside the front mesh"))
}

/// sup over |ξ| ≤ ε^{-1/3} of |u(ξ) − √2 ε^{1/3} w(ε^{1/3} ξ)| for the
/// stationary (c = 0) front against the Hastings–McLeod solution `hm`.
pub fn hm_deviation(sol: &FrontSolution, hm: &HmSolution) -> Result<f64> {
    if sol.params.c != 0.0 {
        return Err(invalid("the Hastings-McLeod comparison applies to c = 0"));
    }
    let eps = sol.params.epsilon;
    let scale = eps.powf(1.0 / 3.0);
    let reach = 1.0 / scale;
    let mut worst = 0.0_f64;
    for (&zeta, &u) in sol.mesh.nodes().iter().zip(&sol.u) {
        if zeta.abs() > reach {
            continue;
        }
        let xi = -zeta;
        let w = hm
            .eval(scale * xi)
            .ok_or_else(|| invalid("scaled window leaves the Hastings-McLeod domain"))?;
        worst = worst.max((u - 2f64.sqrt() * scale * w).abs());
    }
    Ok(worst)
}

/// Slope of ln u(ξ=0) against ln ε over the stationary branch.
///
/// Non-converged samples are dropped; at least four must remain.
pub fn stationary_amplitude_slope(samples: &[(f64, f64, bool)]) -> Result<f64> {
    let kept: Vec<(f64, f64)> = samples.iter().filter(|s| s.2).map(|s| (s.0, s.1)).collect();
    if kept.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} converged samples; at least 4 needed",
            kept.len()
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = kept.into_iter().unzip();
    Ok(fit::power_law(&x, &y)?.0)
}

/// The ε = 0 reduced system at fixed θ: z' = −z² − θ + u², u' = (z + c/2)u.
fn frozen_zu(c: f64, theta: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |_t, y, d| {
        d[0] = -y[0] * y[0] - theta + y[1] * y[1];
        d[1] = (y[0] + c / 2.0) * y[1];
    }
}

/// The saddle (z*, u*) = (−c/2, √(θ + c²/4)) of the frozen system.
pub fn frozen_saddle(c: f64, theta: f64) -> Result<(f64, f64)> {
    if !(theta + c * c / 4.0 > 0.0) {
        return Err(Error::Domain(format!("no saddle for theta = {theta}, c = {c}")));
    }
    Ok((-c / 2.0, (theta + c * c / 4.0).sqrt()))
}

/// Closed-form slope du/dz of the saddle's stable manifold at the saddle.
pub fn stable_manifold_slope(c: f64, theta: f64) -> f64 {
    let r = (3.0 * c * c + 8.0 * theta).sqrt();
    -(c + r) / (2.0 * (c * c + 4.0 * theta).sqrt())
}

/// Shoot the frozen stable manifold backward from the saddle, starting
/// `offset` away along its eigenvector toward z > z*, until `stop(z, u)`
/// changes sign. Returns (z, u) at the stop.
fn shoot_stable(c: f64, theta: f64, offset: f64, stop: &dyn Fn(f64, &[f64]) -> f64) -> Result<[f64; 2]> {
    let (zs, us) = frozen_saddle(c, theta)?;
    let nu = c / 2.0 - (0.75 * c * c + 2.0 * theta).sqrt();
    let (vz, vu) = (nu / us, 1.0);
    let norm = vz.hypot(vu);
    // Orient toward z > z*.
    let sgn = if vz < 0.0 { -1.0 } else { 1.0 };
    let y0 = [zs + sgn * offset * vz / norm, us + sgn * offset * vu / norm];
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        record_steps: false,
        ..Default::default()
    };
    let events = [Event::terminal(stop)];
    let traj = integrate_ode(frozen_zu(c, theta), &y0, 0.0, -1e3, &events, &opts)?;
    match traj.events.first() {
        Some(hit) => Ok([hit.y[0], hit.y[1]]),
        None => Err(Error::NoInterface { threshold: 0.0 }),
    }
}

/// u where the frozen stable manifold of (z*, u*) first meets z = 0,
/// found by backward shooting.
pub fn stable_manifold_crossing(c: f64, theta: f64) -> Result<f64> {
    Ok(shoot_stable(c, theta, 1e-9, &|_t, y| y[0])?[1])
}

/// Secant slope (u − u*)/(z − z*) of the backward-shot stable manifold at
/// Euclidean distance `distance` from the saddle.
pub fn stable_manifold_secant(c: f64, theta: f64, distance: f64) -> Result<f64> {
    let (zs, us) = frozen_saddle(c, theta)?;
    let stop = move |_t: f64, y: &[f64]| (y[0] - zs).hypot(y[1] - us) - distance;
    let [z, u] = shoot_stable(c, theta, 1e-3 * distance, &stop)?;
    Ok((u - us) / (z - zs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(QuenchParams::new(2.0, 0.01, Ramp::Tanh).is_err());
        assert!(QuenchParams::new(1.0, 0.0, Ramp::Tanh).is_err());
        assert!(QuenchParams::new(1.0, 0.2, Ramp::Tanh).is_err());
        assert!(QuenchParams::new(0.0, 0.1, Ramp::LinearClipped).is_ok());
    }

    #[test]
    fn ramp_inverse_round_trips() {
        for ramp in [Ramp::Tanh, Ramp::LinearClipped] {
            let z = ramp.inverse(0.01, 0.37);
            assert!((ramp.mu(0.01, z) - 0.37).abs() < 1e-14);
        }
    }

    #[test]
    fn mesh_hits_requested_count() {
        let m = build_mesh(1100.0, (-20.0, 80.0), Some(4000)).unwrap();
        assert!(m.len() >= 4000 && m.len() < 4100, "{}", m.len());
    }

    #[test]
    fn rejects_short_domain() {
        let p = QuenchParams::new(1.2, 0.01, Ramp::Tanh).unwrap();
        let o = FrontOptions {
            half_length: Some(100.0),
            ..Default::default()
        };
        assert!(solve_front(&p, &o, None).is_err());
    }
}
