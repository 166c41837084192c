//! The test maps `phi_a = A + aB` of a curve, their energy, and the
//! function `F(a)` bounding `lambda_1 * Area` for plane quartics.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bounds::{self, Surd};
use crate::error::Result;
use crate::hermitian::Herm3;
use crate::mesh::{ConformalFactor, CurveMesh};
use crate::spectral;

/// `A + a B`.
pub fn phi(a_mat: &Herm3, b_mat: &Herm3, a: f64) -> Herm3 {
    *a_mat + a * *b_mat
}

/// `|phi_a - I/3|^2`, the same at every point of the curve.
pub fn radius_sq(a: f64) -> f64 {
    4.0 / 3.0 * (3.0 * a * a - 3.0 * a + 1.0)
}

/// `|grad phi_a|^2 = 2(1 - 2a)^2 + 2 a^2 |sigma|^2`.
pub fn energy_density(sigma2: f64, a: f64) -> f64 {
    2.0 * (1.0 - 2.0 * a).powi(2) + 2.0 * a * a * sigma2
}

/// Energy of `phi_a` on a smooth curve of genus `g` and degree `d`.
pub fn total_energy(g: u32, d: u32, a: f64) -> f64 {
    let (g, d) = (g as f64, d as f64);
    8.0 * PI * (2.0 * (3.0 * d + g - 1.0) * a * a - 4.0 * d * a + d)
}

/// Energy over mean squared radius, for any genus and degree.
pub fn f_general(g: u32, d: u32, a: f64) -> f64 {
    total_energy(g, d, a) / radius_sq(a)
}

/// `F(a) = 24 pi (7a^2 - 4a + 1) / (3a^2 - 3a + 1)`.
pub fn f_value(a: f64) -> f64 {
    24.0 * PI * (7.0 * a * a - 4.0 * a + 1.0) / (3.0 * a * a - 3.0 * a + 1.0)
}

/// `F` at a surd argument, in units of `pi`.
pub fn f_exact(a: Surd) -> Surd {
    let n = a * a * 7 - a * 4 + Surd::int(1);
    let d = a * a * 3 - a * 3 + Surd::int(1);
    n * 24 / d
}

/// Sign of `F(x) - F(y)` without cancellation.
///
/// `F(x) - F(y)` has the sign of `(x - y)(-9xy + 4(x + y) - 1)`.
pub fn compare_f(x: f64, y: f64) -> std::cmp::Ordering {
    let g = -9.0 * x * y + 4.0 * (x + y) - 1.0;
    ((x - y) * g).total_cmp(&0.0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Minimizer {
    pub a1: Surd,
    /// `F(a1) / pi`.
    pub value_over_pi: Surd,
    pub a1_f64: f64,
    pub value: f64,
}

/// The exact minimum of `F`: `a1 = (4 - sqrt 7)/9`, `F(a1) = 16(4 - sqrt 7) pi`.
pub fn minimize_f() -> Minimizer {
    let a1 = bounds::a1();
    let v = f_exact(a1);
    Minimizer { a1, value_over_pi: v, a1_f64: a1.to_f64(), value: v.to_f64() * PI }
}

/// Golden-section search for the minimizer of `F` on `[lo, hi]`.
pub fn golden_section_min(mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if compare_f(x1, x2).is_lt() {
            hi = x2;
            x2 = x1;
            x1 = hi - r * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + r * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Values of `phi_a` at the mesh vertices.
pub fn phi_values(mesh: &CurveMesh, a: f64) -> Vec<Herm3> {
    mesh.vertices.iter().map(|v| phi(&v.a, &v.b, a)).collect()
}

/// Dirichlet energy of `phi_a` by the cotangent stiffness form.
pub fn mesh_energy(mesh: &CurveMesh, a: f64) -> Result<f64> {
    let k = spectral::assemble_stiffness(&mesh.topo)?;
    Ok(spectral::map_energy(&k, &phi_values(mesh, a)))
}

/// Dirichlet energy of `phi_a` by quadrature of the pointwise density.
pub fn mesh_energy_pointwise(mesh: &CurveMesh, a: f64) -> Result<f64> {
    let dens: Vec<f64> = mesh.vertices.iter().map(|v| energy_density(v.sigma2, a)).collect();
    crate::mesh::integrate(mesh, &dens, None)
}

/// Mean of `|phi_a - I/3|^2` in the given measure.
pub fn mean_radius_sq(mesh: &CurveMesh, factor: Option<&ConformalFactor>, a: f64) -> f64 {
    let w = mesh.weights(factor);
    let area: f64 = w.iter().sum();
    phi_values(mesh, a)
        .iter()
        .zip(&w)
        .map(|(h, m)| m * (*h - Herm3::third_identity()).norm_sq())
        .sum::<f64>()
        / area
}

/// Energy divided by the mean of `|phi_a - I/3|^2` in the given measure.
pub fn mesh_f(mesh: &CurveMesh, factor: Option<&ConformalFactor>, a: f64) -> Result<f64> {
    Ok(mesh_energy(mesh, a)? / mean_radius_sq(mesh, factor, a))
}

/// Population variance of `|phi_a - I/3|^2` over the vertices.
pub fn radius_variance(mesh: &CurveMesh, a: f64) -> f64 {
    let r: Vec<f64> = phi_values(mesh, a)
        .iter()
        .map(|h| (*h - Herm3::third_identity()).norm_sq())
        .collect();
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / r.len() as f64
}

fn gram(p: &[Herm3; 3]) -> [f64; 3] {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    [e1.inner(&e1), e1.inner(&e2), e2.inner(&e2)]
}

/// Per-triangle deviation of the pulled-back metric of `phi_a` from a
/// multiple of the mesh metric: `(l+ - l-)/(l+ + l-)` for the eigenvalues of
/// the relative metric tensor. Zero for a conformal map.
pub fn conformality_defects(mesh: &CurveMesh, a: f64) -> Vec<f64> {
    let values = phi_values(mesh, a);
    mesh.topo
        .triangles
        .iter()
        .map(|t| {
            let g = gram(&t.map(|i| mesh.vertices[i].a));
            let h = gram(&t.map(|i| values[i]));
            let det_g = g[0] * g[2] - g[1] * g[1];
            // trace and determinant of G^{-1} H
            let tr = (g[2] * h[0] - 2.0 * g[1] * h[1] + g[0] * h[2]) / det_g;
            let det = (h[0] * h[2] - h[1] * h[1]) / det_g;
            let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
            if tr > 0.0 {
                disc / (0.5 * tr)
            } else {
                0.0
            }
        })
        .collect()
}
