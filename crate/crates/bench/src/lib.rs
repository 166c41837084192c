//! Shared fixtures for the benchmarks.

use quartic_core::{ConformalFactor, CurveMesh, PlaneCurve};

/// Klein quartic mesh at `level`, built with seed 0.
pub fn klein_mesh(level: u32) -> CurveMesh {
    CurveMesh::build(&PlaneCurve::klein_quartic(), level, 0).expect("Klein quartic meshes build")
}

/// A smooth random factor of amplitude 1 on `mesh`.
pub fn random_factor(mesh: &CurveMesh, seed: u64) -> ConformalFactor {
    ConformalFactor::random_smooth(mesh, seed, 1.0)
}
