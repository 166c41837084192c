//! Hermitian 3x3 matrices as the ambient space of the complex projective plane.
//!
//! `HM(3)` carries the Euclidean metric `<A, B> = 2 tr(AB)`. The projective
//! plane sits inside the trace-one hyperplane as the rank-one orthogonal
//! projectors `A = z^* z / |z|^2` (row-vector convention), and its convex hull
//! is the set of trace-one positive semidefinite matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// A complex row vector `(z0, z1, z2)`.
pub type CVec3 = [C64; 3];
/// General complex 3x3 matrix acting on row vectors from the right.
pub type CMat3 = Matrix3<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Tolerance for eigenvalue signs in [`hull_classify`].
pub const HULL_TOL: f64 = 1e-10;

/// Offdiagonal index pairs in storage order.
const OFF: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[inline]
fn off_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => unreachable!("diagonal index has no offdiagonal slot"),
    }
}

/// A 3x3 complex Hermitian matrix, stored as its real diagonal and upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Herm3 {
    pub diag: [f64; 3],
    /// Entries `(0,1)`, `(0,2)`, `(1,2)`.
    pub off: [C64; 3],
}

impl Herm3 {
    pub const fn zero() -> Self {
        Herm3 { diag: [0.0; 3], off: [ZERO; 3] }
    }

    pub const fn identity() -> Self {
        Herm3::from_diag([1.0, 1.0, 1.0])
    }

    /// `I/3`, the center of the convex hull.
    pub const fn third_identity() -> Self {
        let t = 1.0 / 3.0;
        Herm3::from_diag([t, t, t])
    }

    pub const fn from_diag(diag: [f64; 3]) -> Self {
        Herm3 { diag, off: [ZERO; 3] }
    }

    /// Builds from a full matrix, rejecting asymmetry larger than `tol`.
    pub fn from_matrix(m: &CMat3, tol: f64) -> Result<Self> {
        let mut asym = 0.0f64;
        for i in 0..3 {
            asym = asym.max(m[(i, i)].im.abs());
            for j in (i + 1)..3 {
                asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asym > tol {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    /// Hermitian part of the upper triangle of `m`; no symmetry check.
    pub fn from_matrix_unchecked(m: &CMat3) -> Self {
        let mut h = Herm3::zero();
        for i in 0..3 {
            h.diag[i] = m[(i, i)].re;
        }
        for (s, &(i, j)) in OFF.iter().enumerate() {
            h.off[s] = m[(i, j)];
        }
        h
    }

    pub fn to_matrix(&self) -> CMat3 {
        CMat3::from_fn(|i, j| self.get(i, j))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i == j {
            C64::new(self.diag[i], 0.0)
        } else if i < j {
            self.off[off_slot(i, j)]
        } else {
            self.off[off_slot(i, j)].conj()
        }
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.diag[0] + self.diag[1] + self.diag[2]
    }

    /// `<A, B> = 2 tr(AB)`.
    #[inline]
    pub fn inner(&self, other: &Herm3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            s += self.diag[i] * other.diag[i];
        }
        for k in 0..3 {
            let a = self.off[k];
            let b = other.off[k];
            s += 2.0 * (a.re * b.re + a.im * b.im);
        }
        2.0 * s
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Matrix product `self * other` (not Hermitian in general).
    pub fn matmul(&self, other: &Herm3) -> CMat3 {
        self.to_matrix() * other.to_matrix()
    }

    /// Coordinates in an orthonormal basis of the traceless subspace.
    ///
    /// The basis is `diag(1,-1,0)/2`, `diag(1,1,-2)/(2 sqrt 3)` and, for each
    /// offdiagonal slot, `(E_ij + E_ji)/2` and `i(E_ij - E_ji)/2`. The identity
    /// component is dropped.
    pub fn traceless_coords(&self) -> [f64; 8] {
        let d = &self.diag;
        let s3 = 3f64.sqrt();
        let mut c = [0.0; 8];
        c[0] = d[0] - d[1];
        c[1] = (d[0] + d[1] - 2.0 * d[2]) / s3;
        for k in 0..3 {
            c[2 + 2 * k] = 2.0 * self.off[k].re;
            c[3 + 2 * k] = 2.0 * self.off[k].im;
        }
        c
    }

    /// Inverse of [`Herm3::traceless_coords`] plus `trace/3 * I`.
    pub fn from_traceless_coords(c: &[f64; 8], trace: f64) -> Self {
        let s3 = 3f64.sqrt();
        let t = trace / 3.0;
        let a = c[0] / 2.0;
        let b = c[1] / (2.0 * s3);
        let mut h = Herm3::from_diag([t + a + b, t - a + b, t - 2.0 * b]);
        for k in 0..3 {
            h.off[k] = C64::new(c[2 + 2 * k] / 2.0, c[3 + 2 * k] / 2.0);
        }
        h
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let ev = self.to_matrix().symmetric_eigenvalues();
        let mut e = [ev[0], ev[1], ev[2]];
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// Matrix exponential through the spectral decomposition.
    pub fn exp(&self) -> Herm3 {
        let eig = SymmetricEigen::new(self.to_matrix());
        let v = eig.eigenvectors;
        let d = CMat3::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.exp(), 0.0)));
        Herm3::from_matrix_unchecked(&(v * d * v.adjoint()))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }
}

impl Add for Herm3 {
    type Output = Herm3;
    fn add(mut self, rhs: Herm3) -> Herm3 {
        self += rhs;
        self
    }
}

impl AddAssign for Herm3 {
    fn add_assign(&mut self, rhs: Herm3) {
        for i in 0..3 {
            self.diag[i] += rhs.diag[i];
            self.off[i] += rhs.off[i];
        }
    }
}

impl Sub for Herm3 {
    type Output = Herm3;
    fn sub(mut self, rhs: Herm3) -> Herm3 {
        self -= rhs;
        self
    }
}

impl SubAssign for Herm3 {
    fn sub_assign(&mut self, rhs: Herm3) {
        for i in 0..3 {
            self.diag[i] -= rhs.diag[i];
            self.off[i] -= rhs.off[i];
        }
    }
}

impl Mul<Herm3> for f64 {
    type Output = Herm3;
    fn mul(self, rhs: Herm3) -> Herm3 {
        let mut h = rhs;
        for i in 0..3 {
            h.diag[i] *= self;
            h.off[i] *= self;
        }
        h
    }
}

impl Neg for Herm3 {
    type Output = Herm3;
    fn neg(self) -> Herm3 {
        -1.0 * self
    }
}

impl fmt::Display for Herm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Symmetry tolerance applied when reading serialized matrices.
pub const SERDE_HERMITIAN_TOL: f64 = 1e-12;

impl Serialize for Herm3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut entries = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                let z = self.get(i, j);
                entries.push([z.re, z.im]);
            }
        }
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Herm3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if entries.len() != 9 {
            return Err(D::Error::custom(format!(
                "expected 9 complex entries, got {}",
                entries.len()
            )));
        }
        let m = CMat3::from_fn(|i, j| {
            let [re, im] = entries[3 * i + j];
            C64::new(re, im)
        });
        Herm3::from_matrix(&m, SERDE_HERMITIAN_TOL).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// complex 3-vectors

#[inline]
pub fn cdot(a: &CVec3, b: &CVec3) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Hermitian product `sum conj(a_i) b_i`.
#[inline]
pub fn hdot(a: &CVec3, b: &CVec3) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

#[inline]
pub fn cnorm_sq(a: &CVec3) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

/// Bilinear cross product; the result is annihilated by both arguments under `cdot`.
#[inline]
pub fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn cconj(a: &CVec3) -> CVec3 {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

#[inline]
pub fn cscale(a: &CVec3, s: C64) -> CVec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Row vector times matrix, `(zM)_j = sum_i z_i M_ij`.
#[inline]
pub fn row_mul(z: &CVec3, m: &CMat3) -> CVec3 {
    let mut w = [ZERO; 3];
    for (j, wj) in w.iter_mut().enumerate() {
        *wj = z[0] * m[(0, j)] + z[1] * m[(1, j)] + z[2] * m[(2, j)];
    }
    w
}

// ---------------------------------------------------------------------------
// projective points

/// A point of the projective plane: a unit representative whose first
/// nonzero coordinate is real and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint {
    z: CVec3,
}

/// Components below this modulus are treated as zero for phase normalization.
const PHASE_ZERO: f64 = 1e-12;

impl ProjPoint {
    pub fn new(z: CVec3) -> Result<Self> {
        let n = cnorm_sq(&z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let k = z.iter().position(|c| c.norm() > PHASE_ZERO * n).unwrap_or(0);
        let pivot = z[k];
        let phase = pivot.conj() / (pivot.norm() * n);
        let mut out = cscale(&z, phase);
        out[k] = C64::new(pivot.norm() / n, 0.0);
        Ok(ProjPoint { z: out })
    }

    /// Recovers the point from a rank-one trace-one projector.
    pub fn from_projector(a: &Herm3) -> Result<Self> {
        let i = (0..3)
            .max_by(|&p, &q| a.diag[p].total_cmp(&a.diag[q]))
            .unwrap_or(0);
        // row i of conj(z)^T z is conj(z_i) z
        ProjPoint::new([a.get(i, 0), a.get(i, 1), a.get(i, 2)])
    }

    /// Wraps a representative that is already unit and phase-normalized.
    pub(crate) fn from_normalized(z: CVec3) -> Self {
        ProjPoint { z }
    }

    #[inline]
    pub fn coords(&self) -> &CVec3 {
        &self.z
    }

    /// The projector `z^* z`.
    pub fn projector(&self) -> Herm3 {
        projector_unit(&self.z)
    }
}

/// Projector of a unit vector (no normalization or checks).
#[inline]
pub(crate) fn projector_unit(z: &CVec3) -> Herm3 {
    let mut h = Herm3::zero();
    for i in 0..3 {
        h.diag[i] = z[i].norm_sqr();
    }
    for (s, &(i, j)) in OFF.iter().enumerate() {
        h.off[s] = z[i].conj() * z[j];
    }
    h
}

/// The embedding `z -> z^* z / |z|^2` of the projective plane into `HM_1(3)`.
pub fn project(z: &CVec3) -> Result<Herm3> {
    let n2 = cnorm_sq(z);
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::ZeroVector);
    }
    let inv = 1.0 / n2;
    let mut h = projector_unit(z);
    for i in 0..3 {
        h.diag[i] *= inv;
        h.off[i] *= inv;
    }
    Ok(h)
}

/// The projectivity `[z] -> [zM]` for any invertible `M`, acting on a projector.
pub fn apply_linear(m: &CMat3, a: &Herm3) -> Result<Herm3> {
    let p = ProjPoint::from_projector(a)?;
    project(&row_mul(p.coords(), m))
}

/// The projectivity `f_P` for a positive definite Hermitian `P`.
pub fn apply_projectivity(p: &Herm3, a: &Herm3) -> Result<Herm3> {
    if !p.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    if (a.trace() - 1.0).abs() > 1e-10 {
        return Err(Error::TraceNotOne(a.trace()));
    }
    apply_linear(&p.to_matrix(), a)
}

/// The unitary action `A -> U^* A U`.
pub fn conjugate_unitary(u: &CMat3, a: &Herm3) -> Result<Herm3> {
    let defect = (u * u.adjoint() - CMat3::identity()).norm();
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    Ok(Herm3::from_matrix_unchecked(&(u.adjoint() * a.to_matrix() * u)))
}

/// Position of a trace-one matrix relative to the convex hull of the projective plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullClass {
    Interior,
    Boundary,
    Outside,
}

/// Classifies a trace-one Hermitian matrix by the signs of its eigenvalues.
pub fn hull_classify(a: &Herm3) -> Result<HullClass> {
    if (a.trace() - 1.0).abs() >= 1e-12 {
        return Err(Error::TraceNotOne(a.trace()));
    }
    let e = a.eigenvalues();
    Ok(if e[0] < -HULL_TOL {
        HullClass::Outside
    } else if e[0] > HULL_TOL {
        HullClass::Interior
    } else {
        HullClass::Boundary
    })
}

/// Distance from `I/3` to the boundary of the hull, attained at `diag(0, 1/2, 1/2)`.
pub fn hull_boundary_distance() -> f64 {
    (Herm3::from_diag([0.0, 0.5, 0.5]) - Herm3::third_identity()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng) -> CVec3 {
        [0, 1, 2].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_pd(rng: &mut ChaCha8Rng) -> Herm3 {
        let coords: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let p = Herm3::from_traceless_coords(&coords, 0.0).exp();
        (1.0 / p.trace()) * p
    }

    #[test]
    fn inner_product_values() {
        let i = Herm3::identity();
        assert_eq!(i.inner(&i), 6.0);
        assert_eq!(Herm3::from_diag([1.0, 0.0, 0.0]).inner(&i), 2.0);
        let mut b = Herm3::zero();
        b.off[1] = c(0.3, -2.0);
        assert_eq!(Herm3::zero().inner(&b), 0.0);
    }

    #[test]
    fn inner_matches_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_pd(&mut rng);
            let b = Herm3::from_traceless_coords(&std::array::from_fn(|_| rng.gen()), 0.7);
            let tr = (a.to_matrix() * b.to_matrix()).trace();
            assert!((a.inner(&b) - 2.0 * tr.re).abs() < 1e-13);
            assert!(tr.im.abs() < 1e-13);
        }
    }

    #[test]
    fn traceless_coords_are_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c0: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let h = Herm3::from_traceless_coords(&c0, 0.0);
        assert!(h.trace().abs() < 1e-15);
        let back = h.traceless_coords();
        for k in 0..8 {
            assert!((back[k] - c0[k]).abs() < 1e-14);
        }
        let n2: f64 = c0.iter().map(|x| x * x).sum();
        assert!((h.norm_sq() - n2).abs() < 1e-12);
    }

    #[test]
    fn project_examples() {
        let a = project(&[c(1.0, 0.0), ZERO, ZERO]).unwrap();
        assert_eq!(a, Herm3::from_diag([1.0, 0.0, 0.0]));
        let b = project(&[ZERO, ZERO, c(2.0, 0.0)]).unwrap();
        assert_eq!(b, Herm3::from_diag([0.0, 0.0, 1.0]));
        let h = project(&[c(1.0, 0.0), c(1.0, 0.0), ZERO]).unwrap();
        let m = h.to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i < 2 && j < 2 { 0.5 } else { 0.0 };
                assert!((m[(i, j)] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
        assert!(matches!(project(&[ZERO; 3]), Err(Error::ZeroVector)));
    }

    #[test]
    fn projector_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let z = random_vec(&mut rng);
            let a = project(&z).unwrap();
            let m = a.to_matrix();
            assert!((m * m - m).norm() < 1e-12);
            assert!((a.trace() - 1.0).abs() < 1e-12);
            assert!((a.norm_sq() - 2.0).abs() < 1e-12);
            assert_eq!(hull_classify(&a).unwrap(), HullClass::Boundary);
            // scaling invariance
            let s = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let a2 = project(&cscale(&z, s)).unwrap();
            assert!((a - a2).norm() < 1e-12);
            // round trip through the projector
            let p = ProjPoint::from_projector(&a).unwrap();
            assert!((p.projector() - a).norm() < 1e-12);
            let q = ProjPoint::new(z).unwrap();
            for i in 0..3 {
                assert!((p.coords()[i] - q.coords()[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn proj_point_phase_normalized() {
        let p = ProjPoint::new([ZERO, c(0.0, 2.0), c(1.0, 1.0)]).unwrap();
        let z = p.coords();
        assert!((cnorm_sq(z) - 1.0).abs() < 1e-15);
        assert_eq!(z[0], ZERO);
        assert!(z[1].im.abs() < 1e-15 && z[1].re > 0.0);
    }

    #[test]
    fn projectivity_examples() {
        let a = project(&[c(1.0, 0.0), c(1.0, 0.0), ZERO]).unwrap();
        assert_eq!(apply_projectivity(&Herm3::identity(), &a).unwrap(), a);
        let p = Herm3::from_diag([2.0, 1.0, 1.0]);
        let got = apply_projectivity(&p, &a).unwrap();
        let mut expect = Herm3::from_diag([0.8, 0.2, 0.0]);
        expect.off[0] = c(0.4, 0.0);
        assert!((got - expect).norm() < 1e-15);
        let not_pd = Herm3::from_diag([1.0, -1.0, 1.0]);
        assert!(matches!(
            apply_projectivity(&not_pd, &a),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn projectivity_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = random_pd(&mut rng);
            let q = random_pd(&mut rng);
            let z = random_vec(&mut rng);
            let a = project(&z).unwrap();
            let lhs = apply_projectivity(&p, &apply_projectivity(&q, &a).unwrap()).unwrap();
            // oracle: compose the linear maps on z, then project
            let w = row_mul(&row_mul(&z, &q.to_matrix()), &p.to_matrix());
            let rhs = project(&w).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            let composite = q.to_matrix() * p.to_matrix();
            assert!((apply_linear(&composite, &a).unwrap() - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn unitary_conjugation_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = Herm3::from_traceless_coords(&std::array::from_fn(|_| rng.gen()), 0.0);
            // exp(iX) is unitary
            let eig = SymmetricEigen::new(x.to_matrix());
            let d = CMat3::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, l).exp()));
            let u = eig.eigenvectors * d * eig.eigenvectors.adjoint();
            let a = project(&random_vec(&mut rng)).unwrap();
            let b = project(&random_vec(&mut rng)).unwrap();
            let ua = conjugate_unitary(&u, &a).unwrap();
            let ub = conjugate_unitary(&u, &b).unwrap();
            assert!((ua.inner(&ub) - a.inner(&b)).abs() < 1e-12);
            // the unitary action is the projectivity of U
            assert!((apply_linear(&u, &a).unwrap() - ua).norm() < 1e-12);
        }
        assert!(conjugate_unitary(&(CMat3::identity() * c(2.0, 0.0)), &Herm3::identity()).is_err());
    }

    #[test]
    fn hull_classification() {
        assert_eq!(hull_classify(&Herm3::third_identity()).unwrap(), HullClass::Interior);
        assert_eq!(
            hull_classify(&Herm3::from_diag([0.0, 0.5, 0.5])).unwrap(),
            HullClass::Boundary
        );
        assert_eq!(
            hull_classify(&Herm3::from_diag([1.0, 0.5, -0.5])).unwrap(),
            HullClass::Outside
        );
        assert!(matches!(
            hull_classify(&Herm3::identity()),
            Err(Error::TraceNotOne(_))
        ));
    }

    #[test]
    fn boundary_distance() {
        let d = hull_boundary_distance();
        assert!((d - 3f64.sqrt() / 3.0).abs() < 1e-15);
        let q = Herm3::from_diag([0.0, 0.5, 0.5]) - Herm3::third_identity();
        assert!((q.inner(&q) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_boundary_points_are_no_closer() {
        // rank <= 2 trace-one PSD matrices: mixtures of two orthogonal projectors
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let center = Herm3::third_identity();
        let mut min = f64::INFINITY;
        for _ in 0..100_000 {
            let u = random_vec(&mut rng);
            let w = random_vec(&mut rng);
            // Gram-Schmidt w against u
            let un = cscale(&u, C64::from(1.0 / cnorm_sq(&u).sqrt()));
            let proj = hdot(&un, &w);
            let w = [w[0] - un[0] * proj, w[1] - un[1] * proj, w[2] - un[2] * proj];
            let t: f64 = rng.gen();
            let q = t * project(&un).unwrap() + (1.0 - t) * project(&w).unwrap();
            assert_ne!(hull_classify(&q).unwrap(), HullClass::Interior);
            min = min.min((q - center).norm());
        }
        assert!(min >= hull_boundary_distance() - 1e-9, "min = {min}");
    }

    #[test]
    fn serde_round_trip_and_symmetry_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_pd(&mut rng);
        let s = serde_json::to_string(&h).unwrap();
        let back: Herm3 = serde_json::from_str(&s).unwrap();
        assert_eq!(h, back);
        let bad = "[[1,0],[0,1],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]";
        assert!(serde_json::from_str::<Herm3>(bad).is_err());
    }

    #[test]
    fn exponential_of_diagonal() {
        let x = Herm3::from_diag([0.0, 1.0, -1.0]);
        let e = x.exp();
        assert!((e.diag[1] - 1f64.exp()).abs() < 1e-14);
        assert!(e.off.iter().all(|z| z.norm() < 1e-14));
    }
}
