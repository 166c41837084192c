//! Lifting a base-sphere triangulation to the branched cover cut out by a
//! plane curve.

use std::collections::HashMap;

use super::sphere::SphereMesh;
use crate::curve::{sphere_to_pencil, BranchPoint, Pencil, PlaneCurve};
use crate::error::{Error, Result};
use crate::hermitian::{hdot, CVec3};

/// Ratio required between the best and second-best squared projective
/// distance when matching fibers along an edge.
const MATCH_RATIO: f64 = 0.25;
const MAX_DEPTH: u32 = 30;

/// Combinatorial triangulation of the curve with unit-vector vertices.
#[derive(Clone, Debug)]
pub struct LiftedCover {
    pub points: Vec<CVec3>,
    pub is_branch: Vec<bool>,
    pub triangles: Vec<[usize; 3]>,
}

#[inline]
fn pdist(z: &CVec3, w: &CVec3) -> f64 {
    (1.0 - hdot(z, w).norm_sqr()).max(0.0)
}

fn fiber_at(curve: &PlaneCurve, pencil: &Pencil, x: &[f64; 3]) -> Vec<CVec3> {
    pencil.fiber(curve, &sphere_to_pencil(x))
}

fn midpoint(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    [m[0] / n, m[1] / n, m[2] / n]
}

/// Nearest-point assignment from `fa` into `fb`. With `merged = Some(k)`,
/// exactly two points must land on `k`; otherwise it must be a bijection
/// whose choices are all unambiguous.
fn assign(fa: &[CVec3], fb: &[CVec3], merged: Option<usize>) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(fa.len());
    let mut hits = vec![0usize; fb.len()];
    for z in fa {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = f64::INFINITY;
        for (j, w) in fb.iter().enumerate() {
            let d = pdist(z, w);
            if d < best.1 {
                second = best.1;
                best = (j, d);
            } else if d < second {
                second = d;
            }
        }
        if Some(best.0) != merged && !(best.1 <= MATCH_RATIO * second) {
            return None;
        }
        hits[best.0] += 1;
        out.push(best.0);
    }
    let ok = hits
        .iter()
        .enumerate()
        .all(|(j, &h)| h == if Some(j) == merged { 2 } else { 1 });
    ok.then_some(out)
}

struct Tracker<'a> {
    curve: &'a PlaneCurve,
    pencil: &'a Pencil,
}

impl Tracker<'_> {
    /// Sheet correspondence from a regular fiber to another regular fiber.
    fn regular(&self, xa: &[f64; 3], fa: &[CVec3], xb: &[f64; 3], fb: &[CVec3], depth: u32) -> Option<Vec<usize>> {
        if let Some(m) = assign(fa, fb, None) {
            return Some(m);
        }
        if depth >= MAX_DEPTH {
            return None;
        }
        let xm = midpoint(xa, xb);
        let fm = fiber_at(self.curve, self.pencil, &xm);
        let m1 = self.regular(xa, fa, &xm, &fm, depth + 1)?;
        let m2 = self.regular(&xm, &fm, xb, fb, depth + 1)?;
        Some(m1.into_iter().map(|j| m2[j]).collect())
    }

    /// Sheet correspondence from a regular fiber into a branch fiber.
    fn into_branch(&self, xa: &[f64; 3], fa: &[CVec3], xb: &[f64; 3], fb: &[CVec3], merged: usize, depth: u32) -> Option<Vec<usize>> {
        if let Some(m) = assign(fa, fb, Some(merged)) {
            return Some(m);
        }
        if depth >= MAX_DEPTH {
            return None;
        }
        let xm = midpoint(xa, xb);
        let fm = fiber_at(self.curve, self.pencil, &xm);
        let m1 = self.regular(xa, fa, &xm, &fm, depth + 1)?;
        let m2 = self.into_branch(&xm, &fm, xb, fb, merged, depth + 1)?;
        Some(m1.into_iter().map(|j| m2[j]).collect())
    }
}

/// Fiber over a branch vertex: the branch point replaces the two nearest roots.
fn branch_fiber(mut roots: Vec<CVec3>, bp: &BranchPoint) -> (Vec<CVec3>, usize) {
    roots.sort_by(|a, b| pdist(a, &bp.point).total_cmp(&pdist(b, &bp.point)));
    roots.drain(0..2);
    roots.insert(0, bp.point);
    (roots, 0)
}

/// Lifts `base` to the `d`-sheeted cover of the sphere given by `pencil`.
///
/// `branch` pairs a base vertex index with the branch point inserted there.
pub fn lift(
    curve: &PlaneCurve,
    pencil: &Pencil,
    base: &SphereMesh,
    branch: &[(usize, BranchPoint)],
) -> Result<LiftedCover> {
    let d = curve.degree() as usize;
    let nb = base.points.len();
    let mut branch_of: Vec<Option<&BranchPoint>> = vec![None; nb];
    for (v, bp) in branch {
        branch_of[*v] = Some(bp);
    }

    let mut fibers: Vec<Vec<CVec3>> = Vec::with_capacity(nb);
    let mut merged: Vec<Option<usize>> = vec![None; nb];
    for (v, x) in base.points.iter().enumerate() {
        let roots = fiber_at(curve, pencil, x);
        if roots.len() != d {
            return Err(Error::Invalid(format!("fiber of size {} at base vertex {v}", roots.len())));
        }
        match branch_of[v] {
            Some(bp) => {
                let (f, k) = branch_fiber(roots, bp);
                merged[v] = Some(k);
                fibers.push(f);
            }
            None => fibers.push(roots),
        }
    }

    let mut offsets = Vec::with_capacity(nb + 1);
    offsets.push(0);
    for f in &fibers {
        offsets.push(offsets.last().unwrap() + f.len());
    }

    let tracker = Tracker { curve, pencil };
    let mut maps: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for t in &base.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if a > b || maps.contains_key(&(a, b)) || maps.contains_key(&(b, a)) {
                continue;
            }
            let (pa, pb) = (&base.points[a], &base.points[b]);
            match (merged[a], merged[b]) {
                (None, None) => {
                    let m = tracker
                        .regular(pa, &fibers[a], pb, &fibers[b], 0)
                        .ok_or(Error::RootTrackingAmbiguity(a, b))?;
                    let mut inv = vec![0; m.len()];
                    for (i, &j) in m.iter().enumerate() {
                        inv[j] = i;
                    }
                    maps.insert((a, b), m);
                    maps.insert((b, a), inv);
                }
                (None, Some(k)) => {
                    let m = tracker
                        .into_branch(pa, &fibers[a], pb, &fibers[b], k, 0)
                        .ok_or(Error::RootTrackingAmbiguity(a, b))?;
                    maps.insert((a, b), m);
                }
                (Some(k), None) => {
                    let m = tracker
                        .into_branch(pb, &fibers[b], pa, &fibers[a], k, 0)
                        .ok_or(Error::RootTrackingAmbiguity(b, a))?;
                    maps.insert((b, a), m);
                }
                (Some(_), Some(_)) => {}
            }
        }
    }

    let mut triangles = Vec::with_capacity(base.triangles.len() * d);
    for (ti, t) in base.triangles.iter().enumerate() {
        let r = (0..3)
            .find(|&r| merged[t[r]].is_none())
            .ok_or(Error::Monodromy(ti))?;
        let (a, b, c) = (t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
        let mab = &maps[&(a, b)];
        let mac = &maps[&(a, c)];
        for i in 0..d {
            let (j, k) = (mab[i], mac[i]);
            let closes = if merged[b].is_none() {
                maps[&(b, c)][j] == k
            } else if merged[c].is_none() {
                maps[&(c, b)][k] == j
            } else {
                true
            };
            if !closes {
                return Err(Error::Monodromy(ti));
            }
            let mut tri = [0; 3];
            tri[r] = offsets[a] + i;
            tri[(r + 1) % 3] = offsets[b] + j;
            tri[(r + 2) % 3] = offsets[c] + k;
            triangles.push(tri);
        }
    }

    let mut points = Vec::with_capacity(offsets[nb]);
    let mut is_branch = Vec::with_capacity(offsets[nb]);
    for (v, f) in fibers.into_iter().enumerate() {
        for (i, z) in f.into_iter().enumerate() {
            points.push(z);
            is_branch.push(merged[v] == Some(i));
        }
    }
    Ok(LiftedCover { points, is_branch, triangles })
}
