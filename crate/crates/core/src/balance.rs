//! Center of mass of the test maps under projective transformations, and
//! the search for a transformation that balances it at `I/3`.

use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::hermitian::{cnorm_sq, cscale, hdot, projector_unit, row_mul, CVec3, Herm3, ProjPoint, C64};
use crate::mesh::{ConformalFactor, CurveMesh};

/// Residual at which the Newton iteration stops.
pub const BALANCE_TOL: f64 = 1e-8;
/// Residual required when the balance is re-checked on the pushed mesh.
pub const VERIFY_TOL: f64 = 1e-7;
const FD_STEP: f64 = 1e-5;
const MAX_ITER: usize = 60;
const START_OFFSET: f64 = 0.5;

/// Mean of `A + aB` in the measure `e^{2u} dA`.
pub fn center_of_mass(mesh: &CurveMesh, factor: Option<&ConformalFactor>, a: f64) -> Result<Herm3> {
    let w = mesh.weights(factor);
    weighted_mean(mesh.vertices.iter().map(|v| (v.a, v.b)), &w, a)
}

fn weighted_mean(ab: impl Iterator<Item = (Herm3, Herm3)>, w: &[f64], a: f64) -> Result<Herm3> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMeasure);
    }
    let mut s = Herm3::zero();
    for ((am, bm), wi) in ab.zip(w) {
        s += *wi * (am + a * bm);
    }
    Ok((1.0 / total) * s)
}

/// Point and tangent vector moved by `z -> zP`, tangent re-orthonormalized.
fn push_frame(z: &CVec3, v: &CVec3, pm: &crate::hermitian::CMat3) -> Result<(ProjPoint, CVec3)> {
    let zp = ProjPoint::new(row_mul(z, pm))?;
    let u = zp.coords();
    let vp = row_mul(v, pm);
    let c = hdot(u, &vp);
    let w = [vp[0] - u[0] * c, vp[1] - u[1] * c, vp[2] - u[2] * c];
    let n = cnorm_sq(&w).sqrt();
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok((zp, cscale(&w, C64::from(1.0 / n))))
}

fn is_scalar(p: &Herm3) -> bool {
    p.off.iter().all(|c| *c == C64::new(0.0, 0.0)) && p.diag[0] == p.diag[1] && p.diag[1] == p.diag[2]
}

/// The image curve under `f_P`, with all geometric fields recomputed.
pub fn pushforward(mesh: &CurveMesh, p: &Herm3) -> Result<CurveMesh> {
    if !p.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    if is_scalar(p) {
        return Ok(mesh.clone());
    }
    let pm = p.to_matrix();
    let mut points = Vec::with_capacity(mesh.n_vertices());
    let mut tangents = Vec::with_capacity(mesh.n_vertices());
    for v in &mesh.vertices {
        let (z, t) = push_frame(v.point.coords(), &v.tangent, &pm)?;
        points.push(z);
        tangents.push(t);
    }
    CurveMesh::from_frames(
        mesh.degree,
        points,
        tangents,
        mesh.vertices.iter().map(|v| v.is_branch).collect(),
        mesh.topo.triangles.clone(),
    )
}

/// Conformal factor on `pushed` giving every vertex the same measure it had
/// on `mesh` with `factor`.
pub fn transport_factor(
    mesh: &CurveMesh,
    factor: Option<&ConformalFactor>,
    pushed: &CurveMesh,
) -> ConformalFactor {
    let w = mesh.weights(factor);
    let m = pushed.lumped_areas();
    ConformalFactor { u: w.iter().zip(&m).map(|(w, m)| 0.5 * (w / m).ln()).collect() }
}

/// `exp(X) / tr exp(X)` for traceless Hermitian `X` given by its coordinates.
pub fn exp_param(x: &[f64; 8]) -> Herm3 {
    if x.iter().all(|c| *c == 0.0) {
        return Herm3::third_identity();
    }
    let e = Herm3::from_traceless_coords(x, 0.0).exp();
    (1.0 / e.trace()) * e
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    #[serde(rename = "P")]
    pub p: Herm3,
    /// Traceless logarithm of `P`, up to scale.
    pub x: [f64; 8],
    pub residual: f64,
    pub iterations: usize,
    pub a: f64,
    pub guaranteed_regime: bool,
    /// Further balancing transformations found from other starts.
    pub others: Vec<Herm3>,
}

/// Whether `0 <= a < sqrt(3)/6`, where a balancing point is known to exist.
pub fn guaranteed_regime(a: f64) -> bool {
    (0.0..bounds::balance_threshold().to_f64()).contains(&a)
}

struct Problem<'a> {
    mesh: &'a CurveMesh,
    weights: Vec<f64>,
    a: f64,
}

impl Problem<'_> {
    fn phi(&self, x: &[f64; 8]) -> Result<Herm3> {
        let p = exp_param(x);
        if x.iter().all(|c| *c == 0.0) {
            return weighted_mean(self.mesh.vertices.iter().map(|v| (v.a, v.b)), &self.weights, self.a);
        }
        let pm = p.to_matrix();
        let mut frames = Vec::with_capacity(self.mesh.n_vertices());
        for v in &self.mesh.vertices {
            let (z, t) = push_frame(v.point.coords(), &v.tangent, &pm)?;
            let am = z.projector();
            frames.push((am, projector_unit(&t) - am));
        }
        weighted_mean(frames.into_iter(), &self.weights, self.a)
    }

    fn residual(&self, x: &[f64; 8]) -> Result<SVector<f64, 8>> {
        let d = self.phi(x)? - Herm3::third_identity();
        Ok(SVector::from(d.traceless_coords()))
    }

    /// Damped Newton from `x`; returns the final point, residual and iteration count.
    fn newton(&self, mut x: [f64; 8]) -> Result<([f64; 8], f64, usize)> {
        let mut r = self.residual(&x)?;
        let mut it = 0;
        while it < MAX_ITER && r.norm() >= BALANCE_TOL {
            it += 1;
            let mut jac = SMatrix::<f64, 8, 8>::zeros();
            for c in 0..8 {
                let mut xp = x;
                let mut xm = x;
                xp[c] += FD_STEP;
                xm[c] -= FD_STEP;
                let col = (self.residual(&xp)? - self.residual(&xm)?) / (2.0 * FD_STEP);
                jac.set_column(c, &col);
            }
            let step = match jac.lu().solve(&(-r)) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => jac.svd(true, true).solve(&(-r), 1e-12).map_err(|e| Error::Invalid(e.to_string()))?,
            };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let mut xn = x;
                for c in 0..8 {
                    xn[c] += t * step[c];
                }
                if let Ok(rn) = self.residual(&xn) {
                    if rn.norm() < r.norm() {
                        x = xn;
                        r = rn;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok((x, r.norm(), it))
    }
}

/// Finds `P` in the interior of the hull with `Phi_a(P) = I/3`.
///
/// Newton runs from `X = 0` and from a perturbation along each coordinate;
/// the solution with the smallest `|X|` is reported.
pub fn solve_balance(mesh: &CurveMesh, factor: Option<&ConformalFactor>, a: f64) -> Result<BalanceReport> {
    let prob = Problem { mesh, weights: mesh.weights(factor), a };
    if !(prob.weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::ZeroMeasure);
    }
    let mut starts = vec![[0.0; 8]];
    for c in 0..8 {
        let mut x = [0.0; 8];
        x[c] = START_OFFSET;
        starts.push(x);
    }
    let mut solutions: Vec<([f64; 8], f64, usize)> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for s in starts {
        let Ok((x, res, it)) = prob.newton(s) else { continue };
        best_residual = best_residual.min(res);
        if res < BALANCE_TOL {
            let dup = solutions.iter().any(|(y, _, _)| {
                x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() < 1e-6
            });
            if !dup {
                solutions.push((x, res, it));
            }
        }
    }
    if solutions.is_empty() {
        return Err(Error::BalanceNoConvergence(best_residual));
    }
    let norm = |x: &[f64; 8]| x.iter().map(|v| v * v).sum::<f64>();
    solutions.sort_by(|p, q| norm(&p.0).total_cmp(&norm(&q.0)));
    let (x, residual, iterations) = solutions[0];
    Ok(BalanceReport {
        p: exp_param(&x),
        x,
        residual,
        iterations,
        a,
        guaranteed_regime: guaranteed_regime(a),
        others: solutions[1..].iter().map(|s| exp_param(&s.0)).collect(),
    })
}

/// A mesh replaced by its balanced image, carrying the transported measure.
#[derive(Clone, Debug)]
pub struct BalancedMesh {
    pub mesh: CurveMesh,
    pub factor: ConformalFactor,
    pub report: BalanceReport,
    /// `|Phi_a - I/3|` re-evaluated by quadrature on the pushed mesh.
    pub verified_residual: f64,
}

/// Balances, pushes the mesh forward and checks the balance by quadrature.
pub fn balance_mesh(mesh: &CurveMesh, factor: Option<&ConformalFactor>, a: f64) -> Result<BalancedMesh> {
    let report = solve_balance(mesh, factor, a)?;
    let pushed = pushforward(mesh, &report.p)?;
    let f = transport_factor(mesh, factor, &pushed);
    let phi = center_of_mass(&pushed, Some(&f), a)?;
    let verified_residual = (phi - Herm3::third_identity()).norm();
    if !(verified_residual < VERIFY_TOL) {
        return Err(Error::NotBalanced(verified_residual));
    }
    Ok(BalancedMesh { mesh: pushed, factor: f, report, verified_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_param_is_interior() {
        let x = [0.3, -1.2, 0.5, 0.1, -0.7, 2.0, 0.0, 0.4];
        let p = exp_param(&x);
        assert!((p.trace() - 1.0).abs() < 1e-14);
        assert!(p.is_positive_definite());
        assert_eq!(exp_param(&[0.0; 8]), Herm3::third_identity());
    }

    #[test]
    fn regime_flag() {
        assert!(guaranteed_regime(0.15));
        assert!(guaranteed_regime(0.0));
        assert!(!guaranteed_regime(0.3));
        assert!(!guaranteed_regime(-0.1));
    }
}
