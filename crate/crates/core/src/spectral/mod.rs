//! Cotangent finite elements for the Laplace-Beltrami operator of conformal
//! metrics, and Rayleigh quotients of balanced test maps.

mod eigen;
mod sparse;

pub use eigen::{clusters, lowest_eigenpairs, EigenOptions, ShiftInvert, SpectralResult};
pub use sparse::{CholeskyFactor, SparseSym};

use crate::balance;
use crate::error::{Error, Result};
use crate::hermitian::Herm3;
use crate::mesh::{ConformalFactor, CurveMesh, Triangulation};

/// Degenerate-triangle threshold on the absolute triangle area.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Default number of eigenpairs, counting the constant mode.
pub const DEFAULT_K: usize = 6;

/// Cotangent stiffness matrix, built from edge lengths only.
pub fn assemble_stiffness(topo: &Triangulation) -> Result<SparseSym> {
    let mut trip = Vec::with_capacity(topo.triangles.len() * 9);
    for (t, tri) in topo.triangles.iter().enumerate() {
        let l = topo.lengths[t];
        if l[0] > l[1] + l[2] || l[1] > l[0] + l[2] || l[2] > l[0] + l[1] {
            return Err(Error::TriangleInequality(t));
        }
        let area = crate::mesh::heron(l);
        if !(area >= MIN_TRIANGLE_AREA) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        let cot = topo.cotangents(t);
        for k in 0..3 {
            // corner k faces the edge between the other two vertices
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let w = 0.5 * cot[k];
            trip.push((i, j, -w));
            trip.push((j, i, -w));
            trip.push((i, i, w));
            trip.push((j, j, w));
        }
    }
    Ok(SparseSym::from_triplets(topo.n_vertices, trip))
}

/// Lumped mass `e^{2u}` times one third of the adjacent triangle areas.
pub fn assemble_mass(topo: &Triangulation, factor: Option<&ConformalFactor>) -> Result<SparseSym> {
    Ok(SparseSym::diagonal(mass_diagonal(topo, factor)?))
}

pub fn mass_diagonal(topo: &Triangulation, factor: Option<&ConformalFactor>) -> Result<Vec<f64>> {
    let m = topo.lumped_areas();
    match factor {
        Some(f) if f.u.len() != m.len() => Err(Error::Dimension { expected: m.len(), found: f.u.len() }),
        Some(f) => Ok(f.weights(&m)),
        None => Ok(m),
    }
}

/// `lambda_1 * Area` of the metric `e^{2u}` times the mesh metric.
pub fn lambda1_area(topo: &Triangulation, factor: Option<&ConformalFactor>) -> Result<f64> {
    let k = assemble_stiffness(topo)?;
    let m = assemble_mass(topo, factor)?;
    Ok(lowest_eigenpairs(&k, &m, 2)?.product)
}

/// Dirichlet energy of the map `phi_a = A + aB` into `HM(3)`, summed over
/// the eight coordinates of the traceless part.
pub fn map_energy(stiffness: &SparseSym, values: &[Herm3]) -> f64 {
    let coords: Vec<[f64; 8]> = values.iter().map(|h| h.traceless_coords()).collect();
    (0..8)
        .map(|c| {
            let x: Vec<f64> = coords.iter().map(|v| v[c]).collect();
            stiffness.quadratic_form(&x)
        })
        .sum()
}

/// Terms of the Rayleigh quotient of the coordinates of `phi_a - I/3`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RayleighBound {
    /// Sum of the stiffness energies of the coordinates.
    pub energy: f64,
    /// Sum of their squared mass norms.
    pub mass_norm: f64,
    pub area: f64,
    /// `energy / mass_norm * area`.
    pub value: f64,
}

/// Balance residual accepted by [`rayleigh_bound`].
pub const RAYLEIGH_BALANCE_TOL: f64 = 1e-7;

/// Upper bound for `lambda_1 * Area` from the test functions of a balanced mesh.
pub fn rayleigh_bound(mesh: &CurveMesh, factor: Option<&ConformalFactor>, a: f64) -> Result<RayleighBound> {
    let phi = balance::center_of_mass(mesh, factor, a)?;
    let r = (phi - Herm3::third_identity()).norm();
    if !(r < RAYLEIGH_BALANCE_TOL) {
        return Err(Error::NotBalanced(r));
    }
    let k = assemble_stiffness(&mesh.topo)?;
    let w = mass_diagonal(&mesh.topo, factor)?;
    let values: Vec<Herm3> = mesh.vertices.iter().map(|v| v.a + a * v.b).collect();
    let energy = map_energy(&k, &values);
    let mass_norm: f64 = values
        .iter()
        .zip(&w)
        .map(|(h, m)| m * (*h - Herm3::third_identity()).norm_sq())
        .sum();
    let area: f64 = w.iter().sum();
    Ok(RayleighBound { energy, mass_norm, area, value: energy / mass_norm * area })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SphereMesh;

    #[test]
    fn equilateral_cotan_weights() {
        let t = Triangulation { n_vertices: 3, triangles: vec![[0, 1, 2]], lengths: vec![[1.0; 3]] };
        let k = assemble_stiffness(&t).unwrap();
        let w = 1.0 / (2.0 * 3f64.sqrt());
        assert!((k.get(0, 1) + w).abs() < 1e-15);
        assert!((k.get(0, 0) - 2.0 * w).abs() < 1e-15);
    }

    #[test]
    fn degenerate_triangle_is_named() {
        let t = Triangulation {
            n_vertices: 4,
            triangles: vec![[0, 1, 2], [0, 2, 3]],
            lengths: vec![[1.0; 3], [1.0, 0.5, 0.5]],
        };
        assert!(matches!(assemble_stiffness(&t), Err(Error::DegenerateTriangle { index: 1, .. })));
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        let s = SphereMesh::icosphere(3).unwrap();
        let k = assemble_stiffness(&Triangulation::from_sphere(&s, 1.0)).unwrap();
        let ones = vec![1.0; k.n()];
        assert!(k.matvec(&ones).iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn mass_scales_with_constant_factor() {
        let s = SphereMesh::icosphere(2).unwrap();
        let t = Triangulation::from_sphere(&s, 1.0);
        let m0: f64 = mass_diagonal(&t, None).unwrap().iter().sum();
        let f = ConformalFactor::new(vec![0.3; t.n_vertices]).unwrap();
        let m1: f64 = mass_diagonal(&t, Some(&f)).unwrap().iter().sum();
        assert!((m1 / m0 - 0.6f64.exp()).abs() < 1e-14);
    }
}
