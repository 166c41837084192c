//! Icosahedral meshes of the unit sphere with exact local insertion of
//! prescribed points.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest accepted subdivision level.
pub const MAX_LEVEL: u32 = 9;

/// A triangulated unit sphere; triangles are counter-clockwise seen from outside.
#[derive(Clone, Debug)]
pub struct SphereMesh {
    pub points: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

#[inline]
fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(&a, &a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

#[inline]
pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = sub(a, b);
    dot(&d, &d).sqrt()
}

/// `det(a, b, c)`.
#[inline]
fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    dot(&cross(a, b), c)
}

impl SphereMesh {
    /// Regular icosahedron refined `level` times by midpoint subdivision.
    pub fn icosphere(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::LevelTooLarge(level));
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ];
        let mut points: Vec<[f64; 3]> = raw.iter().map(|p| normalize(*p)).collect();
        let mut triangles = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            let mut midpoint = |a: usize, b: usize, points: &mut Vec<[f64; 3]>| -> usize {
                let key = (a.min(b), a.max(b));
                *mid.entry(key).or_insert_with(|| {
                    let (pa, pb) = (points[a], points[b]);
                    points.push(normalize([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]));
                    points.len() - 1
                })
            };
            for &[a, b, c] in &triangles {
                let ab = midpoint(a, b, &mut points);
                let bc = midpoint(b, c, &mut points);
                let ca = midpoint(c, a, &mut points);
                next.push([a, ab, ca]);
                next.push([b, bc, ab]);
                next.push([c, ca, bc]);
                next.push([ab, bc, ca]);
            }
            triangles = next;
        }
        Ok(SphereMesh { points, triangles })
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.points.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Inserts each point as a mesh vertex and restores the Delaunay property
    /// locally. A point very close to an existing vertex moves that vertex
    /// instead. Returns the vertex index of every point.
    pub fn insert_points(&mut self, pts: &[[f64; 3]]) -> Result<Vec<usize>> {
        let mut ins = Inserter::new(self);
        let mut out = Vec::with_capacity(pts.len());
        for p in pts {
            let v = ins.insert(normalize(*p), &out)?;
            out.push(v);
        }
        Ok(out)
    }
}

struct Inserter<'a> {
    mesh: &'a mut SphereMesh,
    /// directed edge -> triangle holding it in counter-clockwise order
    edge_tri: HashMap<(usize, usize), usize>,
}

impl<'a> Inserter<'a> {
    fn new(mesh: &'a mut SphereMesh) -> Self {
        let mut edge_tri = HashMap::with_capacity(mesh.triangles.len() * 3);
        for (i, t) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                edge_tri.insert((t[k], t[(k + 1) % 3]), i);
            }
        }
        Inserter { mesh, edge_tri }
    }

    fn set_tri(&mut self, idx: usize, t: [usize; 3]) {
        if idx < self.mesh.triangles.len() {
            let old = self.mesh.triangles[idx];
            for k in 0..3 {
                let e = (old[k], old[(k + 1) % 3]);
                if self.edge_tri.get(&e) == Some(&idx) {
                    self.edge_tri.remove(&e);
                }
            }
            self.mesh.triangles[idx] = t;
        } else {
            self.mesh.triangles.push(t);
        }
        for k in 0..3 {
            self.edge_tri.insert((t[k], t[(k + 1) % 3]), idx);
        }
    }

    fn mean_edge_at(&self, v: usize) -> f64 {
        let p = &self.mesh.points;
        let mut s = 0.0;
        let mut n = 0;
        for (&(a, b), _) in self.edge_tri.iter().filter(|(e, _)| e.0 == v) {
            s += dist(&p[a], &p[b]);
            n += 1;
        }
        if n == 0 {
            0.0
        } else {
            s / n as f64
        }
    }

    fn insert(&mut self, p: [f64; 3], taken: &[usize]) -> Result<usize> {
        let pts = &self.mesh.points;
        let (near, dnear) = pts
            .iter()
            .enumerate()
            .map(|(i, q)| (i, dist(q, &p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty mesh");
        if !taken.contains(&near) && dnear < 0.3 * self.mean_edge_at(near) {
            let old = self.mesh.points[near];
            self.mesh.points[near] = p;
            if self.star_is_valid(near) {
                let link: Vec<(usize, usize)> = self
                    .edge_tri
                    .iter()
                    .filter(|(e, _)| e.0 == near)
                    .map(|(_, &t)| {
                        let tri = self.mesh.triangles[t];
                        let k = tri.iter().position(|&x| x == near).unwrap();
                        (tri[(k + 1) % 3], tri[(k + 2) % 3])
                    })
                    .collect();
                for e in link {
                    self.legalize(near, e);
                }
                return Ok(near);
            }
            // moving the vertex folded its star; undo and insert instead
            self.mesh.points[near] = old;
        }
        let (t, bary) = self.locate(&p)?;
        let v = self.mesh.points.len();
        self.mesh.points.push(p);
        let [a, b, c] = self.mesh.triangles[t];
        let total = bary.iter().sum::<f64>();
        let kmin = (0..3)
            .min_by(|&i, &j| bary[i].total_cmp(&bary[j]))
            .unwrap();
        let mut todo = Vec::new();
        if bary[kmin] < 1e-9 * total {
            // on the edge opposite corner kmin: split both neighbours
            let tri = [a, b, c];
            let (ea, eb, ec) = (tri[(kmin + 1) % 3], tri[(kmin + 2) % 3], tri[kmin]);
            let t2 = *self
                .edge_tri
                .get(&(eb, ea))
                .ok_or_else(|| Error::NonManifold("open edge in base mesh".into()))?;
            let other = self.mesh.triangles[t2];
            let ko = other.iter().position(|&x| x != ea && x != eb).unwrap();
            let ed = other[ko];
            self.set_tri(t, [v, ec, ea]);
            self.set_tri(t2, [v, eb, ec]);
            let n = self.mesh.triangles.len();
            self.set_tri(n, [v, ed, eb]);
            self.set_tri(n + 1, [v, ea, ed]);
            todo.extend([(ec, ea), (eb, ec), (ed, eb), (ea, ed)]);
        } else {
            self.set_tri(t, [v, a, b]);
            let n = self.mesh.triangles.len();
            self.set_tri(n, [v, b, c]);
            self.set_tri(n + 1, [v, c, a]);
            todo.extend([(a, b), (b, c), (c, a)]);
        }
        for e in todo {
            self.legalize(v, e);
        }
        Ok(v)
    }

    /// Every triangle around `v` still faces outward.
    fn star_is_valid(&self, v: usize) -> bool {
        let p = &self.mesh.points;
        self.edge_tri.iter().filter(|(e, _)| e.0 == v).all(|(_, &t)| {
            let [a, b, c] = self.mesh.triangles[t];
            let n = cross(&sub(&p[b], &p[a]), &sub(&p[c], &p[a]));
            dot(&n, &p[a]) > 0.0
        })
    }

    /// Triangle containing `p` and its unnormalized barycentric weights.
    fn locate(&self, p: &[f64; 3]) -> Result<(usize, [f64; 3])> {
        let pts = &self.mesh.points;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for (i, &[a, b, c]) in self.mesh.triangles.iter().enumerate() {
            let (pa, pb, pc) = (&pts[a], &pts[b], &pts[c]);
            if dot(p, &[pa[0] + pb[0] + pc[0], pa[1] + pb[1] + pc[1], pa[2] + pb[2] + pc[2]]) <= 0.0 {
                continue;
            }
            // weight of corner a is det(b, c, p), etc.
            let w = [det3(pb, pc, p), det3(pc, pa, p), det3(pa, pb, p)];
            let total: f64 = w.iter().sum();
            let score = w.iter().cloned().fold(f64::INFINITY, f64::min) / total.abs().max(1e-300);
            if best.as_ref().map_or(true, |b| score > b.2) {
                best = Some((i, w, score));
            }
        }
        match best {
            Some((i, w, score)) if score > -1e-12 => Ok((i, w.map(|x| x.max(0.0)))),
            _ => Err(Error::Invalid("point not located in base mesh".into())),
        }
    }

    /// Lawson flip of edge `(a, b)` of triangle `(v, a, b)` if the opposite
    /// vertex lies inside its circumcircle.
    fn legalize(&mut self, v: usize, e: (usize, usize)) {
        let mut stack = vec![e];
        let mut guard = 0;
        while let Some((a, b)) = stack.pop() {
            guard += 1;
            if guard > 10_000 {
                break;
            }
            let (Some(&t1), Some(&t2)) = (self.edge_tri.get(&(a, b)), self.edge_tri.get(&(b, a)))
            else {
                continue;
            };
            let tri1 = self.mesh.triangles[t1];
            if !tri1.contains(&v) {
                continue;
            }
            let other = self.mesh.triangles[t2];
            let d = other.iter().copied().find(|&x| x != a && x != b).unwrap();
            if d == v {
                continue;
            }
            let pts = &self.mesh.points;
            let n = cross(&sub(&pts[a], &pts[v]), &sub(&pts[b], &pts[v]));
            if dot(&n, &sub(&pts[d], &pts[v])) <= 1e-15 {
                continue;
            }
            // the flipped pair must stay outward oriented
            let ok = |x: usize, y: usize, z: usize| {
                let nn = cross(&sub(&pts[y], &pts[x]), &sub(&pts[z], &pts[x]));
                dot(&nn, &pts[x]) > 0.0
            };
            if !(ok(v, a, d) && ok(v, d, b)) {
                continue;
            }
            self.set_tri(t1, [v, a, d]);
            self.set_tri(t2, [v, d, b]);
            stack.push((a, d));
            stack.push((d, b));
        }
    }
}
