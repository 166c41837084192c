//! JSON mesh files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use super::CurveMesh;
use crate::curve::{tangent_line_unchecked, PlaneCurve};
use crate::error::Result;
use crate::hermitian::{cnorm_sq, CVec3, ProjPoint, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFileVertex {
    /// `[re z0, im z0, re z1, im z1, re z2, im z2]`
    pub z: [f64; 6],
    #[serde(rename = "K")]
    pub k: f64,
    pub sigma2: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub branch: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertices: Vec<MeshFileVertex>,
    pub triangles: Vec<[usize; 3]>,
}

/// Git blob object id (SHA-1 of `"blob <len>\0"` followed by the bytes).
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    let mut out = String::with_capacity(40);
    for b in h.finalize() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

impl CurveMesh {
    pub fn to_file(&self) -> MeshFile {
        MeshFile {
            vertices: self
                .vertices
                .iter()
                .map(|v| {
                    let z = v.point.coords();
                    MeshFileVertex {
                        z: [z[0].re, z[0].im, z[1].re, z[1].im, z[2].re, z[2].im],
                        k: v.k,
                        sigma2: v.sigma2,
                        branch: v.is_branch,
                    }
                })
                .collect(),
            triangles: self.topo.triangles.clone(),
        }
    }

    /// Rebuilds a mesh of `curve` from a file. Tangent lines and `A`, `B`
    /// are recomputed; stored curvature fields are kept as written.
    pub fn from_file(file: &MeshFile, curve: &PlaneCurve) -> Result<Self> {
        let mut points = Vec::with_capacity(file.vertices.len());
        let mut tangents = Vec::with_capacity(file.vertices.len());
        for v in &file.vertices {
            let z: CVec3 = [
                C64::new(v.z[0], v.z[1]),
                C64::new(v.z[2], v.z[3]),
                C64::new(v.z[4], v.z[5]),
            ];
            let p = if (cnorm_sq(&z) - 1.0).abs() < 1e-12 {
                ProjPoint::from_normalized(z)
            } else {
                ProjPoint::new(z)?
            };
            tangents.push(tangent_line_unchecked(curve, p.coords())?.v);
            points.push(p);
        }
        let mut mesh = CurveMesh::from_frames(
            curve.degree(),
            points,
            tangents,
            file.vertices.iter().map(|v| v.branch).collect(),
            file.triangles.clone(),
        )?;
        for (m, f) in mesh.vertices.iter_mut().zip(&file.vertices) {
            m.k = f.k;
            m.sigma2 = f.sigma2;
        }
        Ok(mesh)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(s: &str, curve: &PlaneCurve) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(s)?;
        Self::from_file(&file, curve)
    }

    pub fn save(&self, path: &Path) -> Result<String> {
        let s = self.to_json()?;
        std::fs::write(path, &s)?;
        Ok(content_hash(s.as_bytes()))
    }

    pub fn load(path: &Path, curve: &PlaneCurve) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, curve)
    }

    /// Hash of the serialized mesh.
    pub fn content_hash(&self) -> Result<String> {
        Ok(content_hash(self.to_json()?.as_bytes()))
    }
}
