//! Point spectrum of the linearisation about a traveling front.
//!
//! Linearising the comoving equation about a front u* gives
//! L₀ = ∂² − c∂ + (μ − 3u*²) in ζ. The weight e^{cζ/2} conjugates it to the
//! self-adjoint operator
//!
//! ```text
//! L_c = ∂² + (μ − c²/4 − 3u*²),
//! ```
//!
//! whose discretisation is a symmetric tridiagonal matrix handled by Sturm
//! bisection. Both operators share their point spectrum.

use crate::error::{invalid, Result};
use crate::solvercore::banded::TridiagonalLu;
use crate::solvercore::eigen::eig_tridiag_symmetric;
use crate::travelingwave::FrontSolution;

/// Which operator a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    Lc,
    L0,
    PainleveLinearization,
    Custom,
}

/// Leading eigenvalues of a discretised operator, in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Matrix dimension.
    pub n: usize,
    pub domain_halflength: f64,
    pub operator: OperatorTag,
}

impl Spectrum {
    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// ∂² + q on a uniform grid with Dirichlet ends.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    /// Interior nodes.
    pub zeta: Vec<f64>,
    pub h: f64,
    pub potential: Vec<f64>,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub tag: OperatorTag,
}

impl TridiagonalOperator {
    /// Build from the potential at interior nodes `zeta` (uniform spacing `h`).
    pub fn from_potential(zeta: Vec<f64>, h: f64, potential: Vec<f64>, tag: OperatorTag) -> Result<Self> {
        if zeta.len() != potential.len() || zeta.len() < 3 {
            return Err(invalid("operator needs matching nodes and potential, at least 3"));
        }
        let diag = potential.iter().map(|q| q - 2.0 / (h * h)).collect();
        let off = vec![1.0 / (h * h); zeta.len() - 1];
        Ok(Self {
            zeta,
            h,
            potential,
            diag,
            off,
            tag,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn halflength(&self) -> f64 {
        0.5 * (self.zeta[self.len() - 1] - self.zeta[0] + 2.0 * self.h)
    }
}

/// Resample the front onto a uniform grid of spacing `h` (default: the
/// finest spacing of the front mesh) and assemble L_c with Dirichlet ends.
///
/// The grid spans the whole BVP domain. The ground state of L_c sits on
/// the pre-front plateau where u* is exponentially small, so the domain is
/// not trimmed. u* is interpolated as a cubic Hermite spline in (u*, u*').
pub fn build_lc(front: &FrontSolution, h: Option<f64>) -> Result<TridiagonalOperator> {
    let h = h.unwrap_or_else(|| front.mesh.min_spacing());
    if !(h > 0.0) {
        return Err(invalid("resample spacing must be positive"));
    }
    let (a, b) = (front.mesh.first(), front.mesh.last());
    let cells = ((b - a) / h).round() as usize;
    if cells < 4 {
        return Err(invalid("resample spacing too coarse for the domain"));
    }
    let h = (b - a) / cells as f64;
    let p = front.params;
    let shift = p.c * p.c / 4.0;
    let mut zeta = Vec::with_capacity(cells - 1);
    let mut q = Vec::with_capacity(cells - 1);
    for i in 1..cells {
        let z = a + h * i as f64;
        let u = front.u_at(z).ok_or_else(|| invalid("resample node outside front mesh"))?;
        zeta.push(z);
        q.push(p.mu(z) - shift - 3.0 * u * u);
    }
    TridiagonalOperator::from_potential(zeta, h, q, OperatorTag::Lc)
}

/// The `k` largest eigenvalues of `op`.
pub fn leading_eigenvalues(op: &TridiagonalOperator, k: usize) -> Result<Spectrum> {
    let eigenvalues = eig_tridiag_symmetric(&op.diag, &op.off, k)?;
    Ok(Spectrum {
        eigenvalues,
        n: op.len(),
        domain_halflength: op.halflength(),
        operator: op.tag,
    })
}

/// Unit eigenvector for the eigenvalue `lambda` by inverse iteration.
pub fn eigenvector(op: &TridiagonalOperator, lambda: f64) -> Result<Vec<f64>> {
    let n = op.len();
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let diag: Vec<f64> = op.diag.iter().map(|d| d - shift).collect();
    let lu = TridiagonalLu::new(&op.off, &diag, &op.off)?;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..4 {
        lu.solve_in_place(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(x)
}

/// Right edges of the essential spectra contributed by each end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialEdges {
    /// L_c: (edge from ζ → +∞, edge from ζ → −∞) = (−2 − c²/4, −1 − c²/4).
    pub lc: (f64, f64),
    /// L₀: (−2, −1), the real parts of its dispersion curves' tips.
    pub l0: (f64, f64),
}

/// Essential-spectrum edges of L_c and L₀ for speed `c`.
pub fn essential_spectrum_edges(c: f64) -> EssentialEdges {
    let s = c * c / 4.0;
    EssentialEdges {
        lc: (-2.0 - s, -1.0 - s),
        l0: (-2.0, -1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_at_zero_speed_coincide() {
        let e = essential_spectrum_edges(0.0);
        assert_eq!(e.lc, (-2.0, -1.0));
        assert_eq!(e.l0, (-2.0, -1.0));
    }

    #[test]
    fn constant_potential_box() {
        let n = 999;
        let h = 20.0 / (n + 1) as f64;
        let zeta: Vec<f64> = (1..=n).map(|i| -10.0 + h * i as f64).collect();
        let op = TridiagonalOperator::from_potential(zeta, h, vec![-1.0; n], OperatorTag::Custom).unwrap();
        let s = leading_eigenvalues(&op, 2).unwrap();
        let k = std::f64::consts::PI / 20.0;
        let discrete = -1.0 - 4.0 / (h * h) * (0.5 * k * h).sin().powi(2);
        assert!((s.largest() - discrete).abs() < 1e-10);
        assert!((op.halflength() - 10.0).abs() < 1e-12);
    }
}
