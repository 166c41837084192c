//! Triangulated models of plane curves, decorated with the embedding, Gauss
//! map and curvature fields.

mod io;
mod lift;
mod sphere;

use std::collections::HashMap;
use std::f64::consts::PI;

pub use io::{content_hash, MeshFile, MeshFileVertex};
pub use lift::{lift, LiftedCover};
pub use sphere::{SphereMesh, MAX_LEVEL};

use crate::curve::{choose_center, tangent_line_unchecked, BranchPoint, Pencil, PlaneCurve};
use crate::error::{Error, Result};
use crate::hermitian::{projector_unit, CVec3, Herm3, ProjPoint};

/// Triangles below this area (relative to the mean) are rejected.
const DEGENERATE_AREA: f64 = 1e-14;

/// Combinatorics plus per-triangle edge lengths.
///
/// `lengths[t][k]` is the length of the edge opposite corner `k` of `triangles[t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    pub n_vertices: usize,
    pub triangles: Vec<[usize; 3]>,
    pub lengths: Vec<[f64; 3]>,
}

/// Area of a triangle from its side lengths (Kahan's stable Heron formula).
pub fn heron(l: [f64; 3]) -> f64 {
    let mut s = l;
    s.sort_by(|a, b| b.total_cmp(a));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

impl Triangulation {
    /// Chordal lengths from vertex positions under a distance function.
    pub fn from_distance<F: Fn(usize, usize) -> f64>(
        n_vertices: usize,
        triangles: Vec<[usize; 3]>,
        dist: F,
    ) -> Self {
        let lengths = triangles
            .iter()
            .map(|t| [dist(t[1], t[2]), dist(t[2], t[0]), dist(t[0], t[1])])
            .collect();
        Triangulation { n_vertices, triangles, lengths }
    }

    /// The sphere mesh with Euclidean chord lengths, scaled by `radius`.
    pub fn from_sphere(m: &SphereMesh, radius: f64) -> Self {
        Self::from_distance(m.points.len(), m.triangles.clone(), |i, j| {
            radius * sphere::dist(&m.points[i], &m.points[j])
        })
    }

    pub fn triangle_areas(&self) -> Vec<f64> {
        self.lengths.iter().map(|&l| heron(l)).collect()
    }

    /// One third of the adjacent triangle areas at every vertex.
    pub fn lumped_areas(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_vertices];
        for (t, l) in self.triangles.iter().zip(&self.lengths) {
            let a = heron(*l) / 3.0;
            for &v in t {
                w[v] += a;
            }
        }
        w
    }

    /// Interior angles at the three corners.
    pub fn angles(&self, t: usize) -> [f64; 3] {
        let l = self.lengths[t];
        let area4 = 4.0 * heron(l);
        std::array::from_fn(|k| {
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            area4.atan2(b * b + c * c - a * a)
        })
    }

    /// Cotangents of the three corner angles.
    pub fn cotangents(&self, t: usize) -> [f64; 3] {
        let l = self.lengths[t];
        let area4 = 4.0 * heron(l);
        std::array::from_fn(|k| {
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            (b * b + c * c - a * a) / area4
        })
    }

    /// `2 pi` minus the angle sum at every vertex.
    pub fn angle_defects(&self) -> Vec<f64> {
        let mut d = vec![2.0 * PI; self.n_vertices];
        for t in 0..self.triangles.len() {
            let ang = self.angles(t);
            for (k, &v) in self.triangles[t].iter().enumerate() {
                d[v] -= ang[k];
            }
        }
        d
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    /// Undirected edges, each once with the smaller index first.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut e: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| [t[k], t[(k + 1) % 3]]))
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.n_edges() as i64 + self.triangles.len() as i64
    }

    /// Closed, consistently oriented 2-manifold whose vertex links are single cycles.
    pub fn check_manifold(&self) -> Result<()> {
        let mut next: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || t.iter().any(|&v| v >= self.n_vertices) {
                return Err(Error::NonManifold(format!("malformed triangle {t:?}")));
            }
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if next.insert(e, t[(k + 2) % 3]).is_some() {
                    return Err(Error::NonManifold(format!(
                        "edge ({}, {}) used twice with the same orientation",
                        e.0, e.1
                    )));
                }
            }
        }
        for &(a, b) in next.keys() {
            if !next.contains_key(&(b, a)) {
                return Err(Error::NonManifold(format!("edge ({a}, {b}) lies in only one triangle")));
            }
        }
        // the link of v is walked through (v, w) -> (v, next[(v, w)])
        let mut link_size = vec![0usize; self.n_vertices];
        let mut start = vec![usize::MAX; self.n_vertices];
        for &(a, b) in next.keys() {
            link_size[a] += 1;
            if b < start[a] {
                start[a] = b;
            }
        }
        for v in 0..self.n_vertices {
            if link_size[v] == 0 {
                return Err(Error::NonManifold(format!("vertex {v} is isolated")));
            }
            let mut w = start[v];
            let mut steps = 0;
            loop {
                w = next[&(v, w)];
                steps += 1;
                if w == start[v] || steps > link_size[v] {
                    break;
                }
            }
            if steps != link_size[v] {
                return Err(Error::NonManifold(format!("vertex {v} has a disconnected link")));
            }
        }
        Ok(())
    }

    /// Rejects triangles violating the triangle inequality or of vanishing area.
    pub fn check_metric(&self) -> Result<()> {
        let areas = self.triangle_areas();
        let mean = areas.iter().sum::<f64>() / areas.len().max(1) as f64;
        for (t, l) in self.lengths.iter().enumerate() {
            if !l.iter().all(|&x| x > 0.0 && x.is_finite()) {
                return Err(Error::DegenerateTriangle { index: t, area: areas[t] });
            }
            if l[0] > l[1] + l[2] || l[1] > l[0] + l[2] || l[2] > l[0] + l[1] {
                return Err(Error::TriangleInequality(t));
            }
            if !(areas[t] > DEGENERATE_AREA * mean) {
                return Err(Error::DegenerateTriangle { index: t, area: areas[t] });
            }
        }
        Ok(())
    }

    /// Uniform rescaling of all lengths.
    pub fn scaled(&self, s: f64) -> Self {
        Triangulation {
            n_vertices: self.n_vertices,
            triangles: self.triangles.clone(),
            lengths: self.lengths.iter().map(|l| l.map(|x| x * s)).collect(),
        }
    }
}

/// A conformal change of metric `e^{2u} g`, stored per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalFactor {
    pub u: Vec<f64>,
}

impl ConformalFactor {
    pub fn zero(n: usize) -> Self {
        ConformalFactor { u: vec![0.0; n] }
    }

    pub fn new(u: Vec<f64>) -> Result<Self> {
        if let Some(i) = u.iter().position(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("conformal factor not finite at vertex {i}")));
        }
        Ok(ConformalFactor { u })
    }

    /// Quadrature weights `e^{2u} m` for lumped areas `m`.
    pub fn weights(&self, lumped: &[f64]) -> Vec<f64> {
        lumped
            .iter()
            .zip(&self.u)
            .map(|(m, u)| m * (2.0 * u).exp())
            .collect()
    }

    /// A smooth random factor on a curve mesh with `max |u| = amplitude`.
    ///
    /// `u` is a random quadratic polynomial in the entries of the embedding
    /// `A`, so it is the restriction of a smooth function on projective space.
    pub fn random_smooth(mesh: &CurveMesh, seed: u64, amplitude: f64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut herm = || {
            let mut c = [0.0; 8];
            c.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
            Herm3::from_traceless_coords(&c, 0.0)
        };
        let (h1, h2, h3) = (herm(), herm(), herm());
        let raw: Vec<f64> = mesh
            .vertices
            .iter()
            .map(|v| v.a.inner(&h1) + v.a.inner(&h2) * v.a.inner(&h3))
            .collect();
        let max = raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let s = if max > 0.0 { amplitude / max } else { 0.0 };
        ConformalFactor { u: raw.iter().map(|x| x * s).collect() }
    }
}

/// A decorated vertex of a curve mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshVertex {
    pub point: ProjPoint,
    /// Unit spanning vector of the tangent line orthogonal to `point`.
    pub tangent: CVec3,
    pub a: Herm3,
    pub b: Herm3,
    pub k: f64,
    pub sigma2: f64,
    pub is_branch: bool,
}

/// A closed triangulated curve in `CP^2` with the fields of its induced metric.
#[derive(Clone, Debug)]
pub struct CurveMesh {
    pub degree: u32,
    pub vertices: Vec<MeshVertex>,
    pub topo: Triangulation,
}

/// The refined base sphere together with the branch points inserted as vertices.
pub fn build_base(
    level: u32,
    branch: &[BranchPoint],
) -> Result<(SphereMesh, Vec<(usize, BranchPoint)>)> {
    let mut m = SphereMesh::icosphere(level)?;
    let pts: Vec<[f64; 3]> = branch.iter().map(|b| b.base).collect();
    let idx = m.insert_points(&pts)?;
    Ok((m, idx.into_iter().zip(branch.iter().copied()).collect()))
}

/// Expected Euler characteristic of a smooth plane curve of degree `d`.
pub fn expected_euler(degree: u32) -> i64 {
    let d = degree as i64;
    2 - (d - 1) * (d - 2)
}

impl CurveMesh {
    /// Chooses a projection center from `seed`, meshes the base sphere at
    /// `level`, lifts and decorates.
    pub fn build(curve: &PlaneCurve, level: u32, seed: u64) -> Result<Self> {
        let (pencil, branch) = choose_center(curve, seed)?;
        Self::build_with_pencil(curve, &pencil, &branch, level)
    }

    pub fn build_with_pencil(
        curve: &PlaneCurve,
        pencil: &Pencil,
        branch: &[BranchPoint],
        level: u32,
    ) -> Result<Self> {
        let (base, bverts) = build_base(level, branch)?;
        let cover = lift(curve, pencil, &base, &bverts)?;
        decorate(&cover, curve)
    }

    /// Assembles a mesh from unit points and unit tangent vectors.
    pub fn from_frames(
        degree: u32,
        points: Vec<ProjPoint>,
        tangents: Vec<CVec3>,
        is_branch: Vec<bool>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let n = points.len();
        let a: Vec<Herm3> = points.iter().map(|p| p.projector()).collect();
        let topo = Triangulation::from_distance(n, triangles, |i, j| (a[i] - a[j]).norm());
        let found = topo.euler_characteristic();
        let expected = expected_euler(degree);
        if found != expected {
            return Err(Error::EulerMismatch { expected, found });
        }
        topo.check_manifold()?;
        topo.check_metric()?;
        let defects = topo.angle_defects();
        let lumped = topo.lumped_areas();
        let vertices = (0..n)
            .map(|i| {
                let k = defects[i] / lumped[i];
                MeshVertex {
                    point: points[i],
                    tangent: tangents[i],
                    a: a[i],
                    b: projector_unit(&tangents[i]) - a[i],
                    k,
                    sigma2: (2.0 * (1.0 - k)).max(0.0),
                    is_branch: is_branch[i],
                }
            })
            .collect();
        Ok(CurveMesh { degree, vertices, topo })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.topo.euler_characteristic()
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    pub fn lumped_areas(&self) -> Vec<f64> {
        self.topo.lumped_areas()
    }

    /// Quadrature weights, including the conformal factor when given.
    pub fn weights(&self, factor: Option<&ConformalFactor>) -> Vec<f64> {
        let m = self.topo.lumped_areas();
        match factor {
            Some(f) => f.weights(&m),
            None => m,
        }
    }

    pub fn area(&self, factor: Option<&ConformalFactor>) -> f64 {
        self.weights(factor).iter().sum()
    }

    pub fn sigma2(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.sigma2).collect()
    }

    pub fn curvature(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.k).collect()
    }

    pub fn angle_defects(&self) -> Vec<f64> {
        self.topo.angle_defects()
    }

    /// Largest `|F|` over vertices, with `F` normalized by its coefficient scale.
    pub fn max_curve_residual(&self, curve: &PlaneCurve) -> f64 {
        self.vertices
            .iter()
            .map(|v| curve.normalized_value(v.point.coords()))
            .fold(0.0, f64::max)
    }
}

/// Computes `A`, `B`, edge lengths and curvature of a lifted cover.
pub fn decorate(cover: &LiftedCover, curve: &PlaneCurve) -> Result<CurveMesh> {
    let mut points = Vec::with_capacity(cover.points.len());
    let mut tangents = Vec::with_capacity(cover.points.len());
    for z in &cover.points {
        let p = ProjPoint::new(*z)?;
        let t = tangent_line_unchecked(curve, p.coords())?;
        points.push(p);
        tangents.push(t.v);
    }
    CurveMesh::from_frames(
        curve.degree(),
        points,
        tangents,
        cover.is_branch.clone(),
        cover.triangles.clone(),
    )
}

/// Vertex-lumped quadrature of a per-vertex field.
pub fn integrate(mesh: &CurveMesh, field: &[f64], factor: Option<&ConformalFactor>) -> Result<f64> {
    integrate_weights(&mesh.weights(factor), field)
}

pub fn integrate_weights(weights: &[f64], field: &[f64]) -> Result<f64> {
    if weights.len() != field.len() {
        return Err(Error::Dimension { expected: weights.len(), found: field.len() });
    }
    if let Some(i) = field.iter().position(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("field not finite at vertex {i}")));
    }
    Ok(weights.iter().zip(field).map(|(w, f)| w * f).sum())
}
