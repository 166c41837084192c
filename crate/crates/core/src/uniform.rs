//! Discrete uniformization: conformal factors of constant curvature.
//!
//! With cotangent stiffness `L`, lumped areas `m` and angle defects `d`, the
//! factor `u` of a metric of constant curvature `k` solves
//! `L u + d - k m e^{2u} = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{ConformalFactor, CurveMesh, Triangulation};
use crate::spectral::{
    assemble_stiffness, CholeskyFactor, EigenOptions, ShiftInvert, SparseSym, SpectralResult,
};

pub const RESIDUAL_TOL: f64 = 1e-8;
pub const LINEAR_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: usize = 30;

#[derive(Clone, Debug, Serialize)]
pub struct UniformizationResult {
    #[serde(serialize_with = "ser_factor")]
    pub u: ConformalFactor,
    pub target_k: f64,
    /// Final residual in the lumped l1 norm.
    pub residual_norm: f64,
    pub newton_iterations: usize,
    /// Area of the new metric.
    pub area: f64,
    pub residual_history: Vec<f64>,
    /// Positive curvature only: l1 norm of the part of the equation absorbed
    /// by the Moebius gauge multipliers. Zero otherwise.
    pub gauge_defect: f64,
}

fn ser_factor<S: serde::Serializer>(f: &ConformalFactor, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    f.u.serialize(s)
}

struct System<'a> {
    l: &'a SparseSym,
    m: Vec<f64>,
    d: Vec<f64>,
    k: f64,
}

impl System<'_> {
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.l.matvec(u);
        for i in 0..r.len() {
            r[i] += self.d[i] - self.k * self.m[i] * (2.0 * u[i]).exp();
        }
        r
    }

    /// Diagonal part `-2 k m e^{2u}` of the Jacobian.
    fn jacobian_shift(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.m).map(|(u, m)| -2.0 * self.k * m * (2.0 * u).exp()).collect()
    }
}

fn l1(r: &[f64]) -> f64 {
    r.iter().map(|x| x.abs()).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients for a symmetric positive definite `a`.
///
/// With `project`, `a` may have the constants as kernel: the right-hand side
/// and all iterates are kept at zero mean.
pub fn pcg(
    a: &SparseSym,
    b: &[f64],
    tol: f64,
    project: bool,
    precond: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<Vec<f64>> {
    let n = b.len();
    let center = |v: &mut Vec<f64>| {
        if project {
            let mean = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= mean);
        }
    };
    let mut r = b.to_vec();
    center(&mut r);
    let bnorm = dot(&r, &r).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut z = precond(&r);
    center(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    for _ in 0..(10 * n).max(1000) {
        a.matvec_into(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        center(&mut r);
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok(x);
        }
        z = precond(&r);
        center(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve(dot(&r, &r).sqrt() / bnorm))
}

/// Diagonal (Jacobi) preconditioner of `a`.
pub fn jacobi(a: &SparseSym) -> impl Fn(&[f64]) -> Vec<f64> {
    let d = a.diag();
    move |r| r.iter().zip(&d).map(|(r, d)| r / d).collect()
}

/// Preconditioned MINRES for a symmetric, possibly indefinite `a`, with a
/// symmetric positive definite preconditioner. Restarted on the true
/// residual until the normwise backward error `|r| / (|A||x| + |b|)` is
/// below `tol`; near-singular systems cannot do better than that.
pub fn minres(a: &SparseSym, b: &[f64], tol: f64, precond: impl Fn(&[f64]) -> Vec<f64>) -> Result<Vec<f64>> {
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; b.len()];
    if bnorm == 0.0 {
        return Ok(x);
    }
    // max absolute row sum bounds the 2-norm of a symmetric matrix
    let anorm = (0..a.n()).map(|i| a.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut rel = 1.0;
    for _ in 0..5 {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        rel = dot(&r, &r).sqrt() / (anorm * dot(&x, &x).sqrt() + bnorm);
        if rel <= tol {
            return Ok(x);
        }
        let dx = minres_pass(a, &r, tol, &precond);
        x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
    }
    Err(Error::LinearSolve(rel))
}

/// One MINRES run from zero, stopped by the recurrence estimate of the
/// residual in the preconditioner's norm.
fn minres_pass(a: &SparseSym, b: &[f64], tol: f64, precond: &impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y = precond(&r1);
    let beta1 = dot(&r1, &y).sqrt();
    if beta1 == 0.0 {
        return x;
    }
    let (mut oldb, mut beta, mut dbar, mut epsln, mut phibar) = (0.0, beta1, 0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut r2 = r1.clone();
    let mut v = vec![0.0; n];
    for itn in 1..=(10 * n).max(1000) {
        for i in 0..n {
            v[i] = y[i] / beta;
        }
        a.matvec_into(&v, &mut y);
        if itn >= 2 {
            for i in 0..n {
                y[i] -= (beta / oldb) * r1[i];
            }
        }
        let alfa = dot(&v, &y);
        for i in 0..n {
            y[i] -= (alfa / beta) * r2[i];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        y = precond(&r2);
        oldb = beta;
        beta = dot(&r2, &y).sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        for i in 0..n {
            let w1 = w2[i];
            w2[i] = w[i];
            w[i] = (v[i] - oldeps * w1 - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        if phibar <= 0.1 * tol * beta1 || !(beta > 0.0) {
            break;
        }
    }
    x
}

/// Checks that constant curvature `target_k` is compatible with Euler characteristic `chi`.
pub fn check_gauss_bonnet(target_k: f64, chi: i64) -> Result<()> {
    let ok = if target_k < 0.0 {
        chi < 0
    } else if target_k > 0.0 {
        chi > 0
    } else {
        chi == 0
    };
    if ok {
        Ok(())
    } else {
        Err(Error::GaussBonnet { target: target_k, genus: (2 - chi) / 2 })
    }
}

/// Solves for the factor of constant curvature `target_k`, starting from `u = 0`.
pub fn uniformize(mesh: &CurveMesh, target_k: f64) -> Result<UniformizationResult> {
    uniformize_topo(&mesh.topo, target_k, None)
}

/// Same as [`uniformize`] on a bare triangulation, optionally from a given start.
pub fn uniformize_topo(topo: &Triangulation, target_k: f64, start: Option<&[f64]>) -> Result<UniformizationResult> {
    let chi = topo.euler_characteristic();
    check_gauss_bonnet(target_k, chi)?;
    let l = assemble_stiffness(topo)?;
    let sys = System { l: &l, m: topo.lumped_areas(), d: topo.angle_defects(), k: target_k };
    let n = topo.n_vertices;
    let mut u = match start {
        Some(s) if s.len() == n => s.to_vec(),
        Some(s) => return Err(Error::Dimension { expected: n, found: s.len() }),
        None => vec![0.0; n],
    };

    if target_k == 0.0 {
        // linear: L u = -d, normalized to zero mean in the lumped measure
        let pinned = CholeskyFactor::new(&l, Some(0))?;
        let rhs: Vec<f64> = sys.d.iter().map(|d| -d).collect();
        let mut x = pcg(&l, &rhs, LINEAR_TOL, true, |r| pinned.solve(r))?;
        let mean = dot(&x, &sys.m) / sys.m.iter().sum::<f64>();
        x.iter_mut().for_each(|v| *v -= mean);
        let res = l1(&sys.residual(&x));
        return Ok(UniformizationResult {
            area: sys.m.iter().sum(),
            u: ConformalFactor::new(x)?,
            target_k,
            residual_norm: res,
            newton_iterations: 1,
            residual_history: vec![res],
            gauge_defect: 0.0,
        });
    }
    if target_k > 0.0 {
        return uniformize_sphere(topo, &sys, u);
    }

    let mut r = sys.residual(&u);
    let mut norm = l1(&r);
    let mut history = vec![norm];
    let mut iterations = 0;
    let mut chol: Option<CholeskyFactor> = None;
    while norm >= RESIDUAL_TOL {
        if iterations == MAX_NEWTON {
            return Err(Error::NewtonStagnation(history));
        }
        iterations += 1;
        let jac = l.add_diagonal(&sys.jacobian_shift(&u));
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        match chol.as_mut() {
            Some(c) => c.refactor(&jac)?,
            None => chol = Some(CholeskyFactor::new(&jac, None)?),
        }
        let c = chol.as_ref().expect("factor was just built");
        let step = pcg(&jac, &rhs, LINEAR_TOL, false, |v| c.solve(v))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(u, s)| u + t * s).collect();
            let rt = sys.residual(&trial);
            let nt = l1(&rt);
            if nt < norm {
                u = trial;
                r = rt;
                norm = nt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        history.push(norm);
        if !accepted {
            return Err(Error::NewtonStagnation(history));
        }
    }
    let area = u.iter().zip(&sys.m).map(|(u, m)| m * (2.0 * u).exp()).sum();
    Ok(UniformizationResult {
        u: ConformalFactor::new(u)?,
        target_k,
        residual_norm: norm,
        newton_iterations: iterations,
        area,
        residual_history: history,
        gauge_defect: 0.0,
    })
}

/// Positive curvature on a sphere. Solutions come in a three-parameter
/// Moebius family, so the system is bordered: multipliers `c` on the three
/// lowest nonconstant eigenfunctions `psi` of the mesh, and the centering
/// constraint `sum psi m e^{2u} = 0`.
fn uniformize_sphere(topo: &Triangulation, sys: &System, mut u: Vec<f64>) -> Result<UniformizationResult> {
    let n = topo.n_vertices;
    let psi: Vec<Vec<f64>> = ShiftInvert::new(sys.l)?
        .solve(&sys.m, 4, &EigenOptions::default())?
        .eigenvectors
        .into_iter()
        .skip(1)
        .collect();
    let mpsi: Vec<Vec<f64>> = psi.iter().map(|p| p.iter().zip(&sys.m).map(|(p, m)| p * m).collect()).collect();
    let residual = |u: &[f64], c: &[f64; 3]| -> Vec<f64> {
        let mut r = sys.residual(u);
        for (j, mp) in mpsi.iter().enumerate() {
            r.iter_mut().zip(mp).for_each(|(r, v)| *r -= c[j] * v);
        }
        let e: Vec<f64> = u.iter().zip(&sys.m).map(|(u, m)| m * (2.0 * u).exp()).collect();
        r.extend(psi.iter().map(|p| dot(p, &e)));
        r
    };
    let mut c = [0.0; 3];
    let mut chol: Option<CholeskyFactor> = None;
    let mut r = residual(&u, &c);
    let mut norm = l1(&r);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm >= RESIDUAL_TOL {
        if iterations == MAX_NEWTON {
            return Err(Error::NewtonStagnation(history));
        }
        iterations += 1;
        let e2u: Vec<f64> = u.iter().map(|u| (2.0 * u).exp()).collect();
        let shift = sys.jacobian_shift(&u);
        let jac = sys.l.add_diagonal(&shift);
        let spd = sys.l.add_diagonal(&shift.iter().map(|s| s.abs()).collect::<Vec<_>>());
        match chol.as_mut() {
            Some(f) => f.refactor(&spd)?,
            None => chol = Some(CholeskyFactor::new(&spd, None)?),
        }
        let pre = chol.as_ref().expect("factor was just built");
        let solve = |b: &[f64]| minres(&jac, b, LINEAR_TOL, |v| pre.solve(v));
        // bordered operator [[J, -M psi], [2 psi^T M e^{2u}, 0]]
        let cols: Vec<Vec<f64>> = mpsi.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        let rows: Vec<Vec<f64>> = mpsi.iter().map(|v| v.iter().zip(&e2u).map(|(x, e)| 2.0 * x * e).collect()).collect();
        let apply = |x: &[f64]| -> Vec<f64> {
            let mut y = jac.matvec(&x[..n]);
            for j in 0..3 {
                y.iter_mut().zip(&cols[j]).for_each(|(y, b)| *y += b * x[n + j]);
            }
            y.extend(rows.iter().map(|r| dot(r, &x[..n])));
            y
        };
        // Schur complement on the three multipliers
        let jinv_b = cols.iter().map(|b| solve(b)).collect::<Result<Vec<_>>>()?;
        let schur = nalgebra::Matrix3::from_fn(|i, j| dot(&rows[i], &jinv_b[j]));
        let schur_lu = schur.lu();
        let bordered_solve = |rhs: &[f64]| -> Result<Vec<f64>> {
            let y = solve(&rhs[..n])?;
            let g = nalgebra::Vector3::from_fn(|i, _| dot(&rows[i], &y) - rhs[n + i]);
            let c = schur_lu.solve(&g).ok_or(Error::LinearSolve(f64::INFINITY))?;
            let mut s = y;
            for j in 0..3 {
                s.iter_mut().zip(&jinv_b[j]).for_each(|(s, v)| *s -= c[j] * v);
            }
            s.extend(c.iter());
            Ok(s)
        };
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let mut step = bordered_solve(&rhs)?;
        let ax = apply(&step);
        let res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let d = bordered_solve(&res)?;
        step.iter_mut().zip(d).for_each(|(s, d)| *s += d);
        if !step.iter().all(|v| v.is_finite()) {
            return Err(Error::LinearSolve(f64::INFINITY));
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(u, s)| u + t * s).collect();
            let ct = [c[0] + t * step[n], c[1] + t * step[n + 1], c[2] + t * step[n + 2]];
            let rt = residual(&trial, &ct);
            let nt = l1(&rt);
            if nt < norm {
                u = trial;
                c = ct;
                r = rt;
                norm = nt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        history.push(norm);
        if !accepted {
            return Err(Error::NewtonStagnation(history));
        }
    }
    let mut defect = vec![0.0; n];
    for (j, mp) in mpsi.iter().enumerate() {
        defect.iter_mut().zip(mp).for_each(|(d, v)| *d += c[j] * v);
    }
    let area = u.iter().zip(&sys.m).map(|(u, m)| m * (2.0 * u).exp()).sum();
    Ok(UniformizationResult {
        u: ConformalFactor::new(u)?,
        target_k: sys.k,
        residual_norm: norm,
        newton_iterations: iterations,
        area,
        residual_history: history,
        gauge_defect: l1(&defect),
    })
}

/// Alternative Newton start: `-ln(1 + |sigma|^2) / 2`, smoothed by
/// `passes` rounds of neighbour averaging.
pub fn sigma_start(mesh: &CurveMesh, passes: usize) -> Vec<f64> {
    let n = mesh.n_vertices();
    let mut u: Vec<f64> = mesh.vertices.iter().map(|v| -0.5 * (1.0 + v.sigma2).ln()).collect();
    let edges = mesh.topo.edges();
    for _ in 0..passes {
        let mut sum = u.clone();
        let mut cnt = vec![1.0; n];
        for [i, j] in &edges {
            sum[*i] += u[*j];
            sum[*j] += u[*i];
            cnt[*i] += 1.0;
            cnt[*j] += 1.0;
        }
        u = sum.iter().zip(&cnt).map(|(s, c)| s / c).collect();
    }
    u
}

/// Curvature of the metric `e^{2u} g`: `(d + L u) / (m e^{2u})` per vertex.
pub fn curvature_of_factor(topo: &Triangulation, factor: &ConformalFactor) -> Result<Vec<f64>> {
    let l = assemble_stiffness(topo)?;
    let lu = l.matvec(&factor.u);
    let d = topo.angle_defects();
    let m = topo.lumped_areas();
    Ok((0..topo.n_vertices)
        .map(|i| (d[i] + lu[i]) / (m[i] * (2.0 * factor.u[i]).exp()))
        .collect())
}

/// Spectrum of the constant-curvature `-1` metric on a curve mesh.
#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicSpectrum {
    pub uniformization: UniformizationResult,
    pub spectrum: SpectralResult,
}

pub fn hyperbolic_spectrum(mesh: &CurveMesh, count: usize) -> Result<HyperbolicSpectrum> {
    let uniformization = uniformize(mesh, -1.0)?;
    let l = assemble_stiffness(&mesh.topo)?;
    let mass = uniformization.u.weights(&mesh.lumped_areas());
    let spectrum = ShiftInvert::new(&l)?.solve(&mass, count, &EigenOptions::default())?;
    Ok(HyperbolicSpectrum { uniformization, spectrum })
}

/// Richardson extrapolation of values on three successive refinements.
///
/// Returns the limit and the order used: the observed order when it lies in
/// `[1, 3]`, otherwise 2.
pub fn richardson(v: [f64; 3]) -> (f64, f64) {
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    let observed = (d1 / d2).log2();
    let p = if observed.is_finite() && (1.0..=3.0).contains(&observed) { observed } else { 2.0 };
    (v[2] + d2 / (2f64.powf(p) - 1.0), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_bonnet_signs() {
        assert!(check_gauss_bonnet(-1.0, -4).is_ok());
        assert!(check_gauss_bonnet(1.0, 2).is_ok());
        assert!(check_gauss_bonnet(0.0, 0).is_ok());
        assert!(matches!(check_gauss_bonnet(1.0, -4), Err(Error::GaussBonnet { genus: 3, .. })));
        assert!(check_gauss_bonnet(-1.0, 2).is_err());
    }

    #[test]
    fn richardson_exact_for_power_law() {
        // v(h) = 3 + h^2 at h = 1, 1/2, 1/4
        let (lim, p) = richardson([4.0, 3.25, 3.0625]);
        assert!((lim - 3.0).abs() < 1e-12);
        assert!((p - 2.0).abs() < 1e-12);
    }

    fn path_laplacian(n: usize) -> SparseSym {
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        SparseSym::from_triplets(n, t)
    }

    #[test]
    fn linear_solvers() {
        let n = 200;
        let l = path_laplacian(n);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.05).sin()).collect();
        // definite
        let a = l.add_diagonal(&vec![0.5; n]);
        let y = pcg(&a, &a.matvec(&x), 1e-12, false, jacobi(&a)).unwrap();
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-8));
        // singular with constant kernel
        let mean = x.iter().sum::<f64>() / n as f64;
        let y = pcg(&l, &l.matvec(&x), 1e-12, true, jacobi(&l)).unwrap();
        assert!(x.iter().zip(&y).all(|(p, q)| (p - mean - q).abs() < 1e-7));
        // indefinite, preconditioned by the definite shift
        let a = l.add_diagonal(&vec![-0.3; n]);
        let p = CholeskyFactor::new(&l.add_diagonal(&vec![0.3; n]), None).unwrap();
        let y = minres(&a, &a.matvec(&x), 1e-12, |v| p.solve(v)).unwrap();
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-9));
    }
}
