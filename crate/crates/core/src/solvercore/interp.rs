//! Piecewise cubic Hermite interpolation from values and slopes.

use super::mesh::Mesh;

/// Value of the cubic Hermite interpolant of `(y, dy)` on `mesh` at `x`.
/// `None` outside the mesh.
pub fn hermite(mesh: &Mesh, y: &[f64], dy: &[f64], x: f64) -> Option<f64> {
    let i = mesh.locate(x)?;
    let nodes = mesh.nodes();
    let h = nodes[i + 1] - nodes[i];
    let s = (x - nodes[i]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    Some(h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1])
}

/// Piecewise linear interpolation; `None` outside the mesh.
pub fn linear(mesh: &Mesh, y: &[f64], x: f64) -> Option<f64> {
    let i = mesh.locate(x)?;
    let nodes = mesh.nodes();
    let s = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    Some(y[i] + s * (y[i + 1] - y[i]))
}
