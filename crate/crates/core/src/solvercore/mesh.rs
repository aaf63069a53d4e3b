//! One-dimensional meshes.

use crate::error::{invalid, Result};

/// A strictly increasing set of nodes.
///
/// Construction enforces at least [`Mesh::MIN_NODES`] nodes and a ratio of
/// at most [`Mesh::MAX_RATIO`] between neighbouring interval lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
}

/// Parameters of a graded mesh: uniform spacing `h_min` on the window
/// `[fine_lo, fine_hi]`, geometric growth outside it, capped at `h_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedSpec {
    pub lo: f64,
    pub hi: f64,
    pub fine_lo: f64,
    pub fine_hi: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub growth: f64,
}

impl Mesh {
    pub const MIN_NODES: usize = 11;
    pub const MAX_RATIO: f64 = 4.0;

    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < Self::MIN_NODES {
            return Err(invalid(format!(
                "mesh needs at least {} nodes, got {}",
                Self::MIN_NODES,
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(invalid("mesh nodes must be finite"));
        }
        let mut prev_h: Option<f64> = None;
        for (i, w) in nodes.windows(2).enumerate() {
            let h = w[1] - w[0];
            if h <= 0.0 {
                return Err(invalid(format!("mesh not strictly increasing at node {i}")));
            }
            if let Some(p) = prev_h {
                let r = if h > p { h / p } else { p / h };
                if r > Self::MAX_RATIO {
                    return Err(invalid(format!("spacing ratio {r:.3} at node {i} exceeds 4")));
                }
            }
            prev_h = Some(h);
        }
        Ok(Self { nodes })
    }

    /// `n` equally spaced nodes on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) {
            return Err(invalid(format!("empty interval [{a}, {b}]")));
        }
        if n < 2 {
            return Err(invalid("uniform mesh needs at least 2 nodes"));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        nodes[n - 1] = b;
        Self::new(nodes)
    }

    /// Graded mesh following `spec`. The window is clipped to `[lo, hi]`.
    pub fn graded(spec: &GradedSpec) -> Result<Self> {
        let GradedSpec { lo, hi, h_min, h_max, growth, .. } = *spec;
        if !(hi > lo) || !(h_min > 0.0) || h_max < h_min || !(1.0..=2.0).contains(&growth) {
            return Err(invalid(format!("invalid graded mesh spec {spec:?}")));
        }
        let mut f_lo = spec.fine_lo.clamp(lo, hi);
        let mut f_hi = spec.fine_hi.clamp(lo, hi).max(f_lo);
        // Absorb slivers at either end into the fine window.
        if f_lo - lo < 2.0 * h_min {
            f_lo = lo;
        }
        if hi - f_hi < 2.0 * h_min {
            f_hi = hi;
        }
        let cells = ((f_hi - f_lo) / h_min).ceil().max(1.0) as usize;
        let h_fine = if f_hi > f_lo { (f_hi - f_lo) / cells as f64 } else { h_min };
        let mut centre: Vec<f64> = if f_hi > f_lo {
            (0..=cells).map(|i| f_lo + h_fine * i as f64).collect()
        } else {
            vec![f_lo]
        };
        *centre.last_mut().unwrap() = f_hi;

        let right = grade_outwards(f_hi, hi, h_fine, h_max, growth);
        let left = grade_outwards(-f_lo, -lo, h_fine, h_max, growth);

        let mut nodes = Vec::with_capacity(left.len() + centre.len() + right.len());
        nodes.extend(left.iter().rev().map(|x| -x));
        nodes.extend(centre);
        nodes.extend(right);
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Length of interval `i`, i.e. `x[i+1] - x[i]`.
    pub fn spacing(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index `i` of the interval `[x[i], x[i+1]]` containing `x`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.first() && x <= self.last()) {
            return None;
        }
        let i = self.nodes.partition_point(|&v| v <= x);
        Some(i.saturating_sub(1).min(self.nodes.len() - 2))
    }
}

/// Nodes strictly beyond `start` up to and including `end`, growing from `h0`.
fn grade_outwards(start: f64, end: f64, h0: f64, h_max: f64, growth: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if end <= start {
        return out;
    }
    let mut x = start;
    let mut h = h0;
    loop {
        h = (h * growth).min(h_max);
        if x + 1.5 * h >= end {
            // The remainder exceeds half the previous interval, so the ratio bound holds.
            out.push(end);
            break;
        }
        x += h;
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_nodes() {
        assert!(Mesh::new(vec![0.0, 1.0]).is_err());
        let mut v: Vec<f64> = (0..20).map(f64::from).collect();
        v[5] = v[4];
        assert!(Mesh::new(v).is_err());
        let mut w: Vec<f64> = (0..20).map(f64::from).collect();
        w[10] = 9.1;
        assert!(Mesh::new(w).is_err());
    }

    #[test]
    fn graded_mesh_respects_bounds() {
        let spec = GradedSpec {
            lo: -1000.0,
            hi: 1000.0,
            fine_lo: 100.0,
            fine_hi: 400.0,
            h_min: 0.1,
            h_max: 2.0,
            growth: 1.05,
        };
        let m = Mesh::graded(&spec).unwrap();
        assert_eq!(m.first(), -1000.0);
        assert_eq!(m.last(), 1000.0);
        assert!(m.min_spacing() > 0.099);
        assert!(m.max_spacing() < 3.0 + 1e-12);
    }

    #[test]
    fn locate_finds_cell() {
        let m = Mesh::uniform(0.0, 1.0, 11).unwrap();
        assert_eq!(m.locate(0.0), Some(0));
        assert_eq!(m.locate(0.55), Some(5));
        assert_eq!(m.locate(1.0), Some(9));
        assert_eq!(m.locate(1.5), None);
    }
}
