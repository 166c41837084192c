//! Geometry and numerics for first-eigenvalue bounds on genus-three plane
//! quartics.

pub mod balance;
pub mod bounds;
pub mod curve;
pub mod error;
pub mod hermitian;
pub mod mesh;
pub mod poly;
pub mod spectral;
pub mod testmap;
pub mod uniform;

pub use curve::{PlaneCurve, TangentLine};
pub use error::{Error, Result};
pub use hermitian::{Herm3, HullClass, ProjPoint, C64, CVec3};
pub use mesh::{ConformalFactor, CurveMesh, Triangulation};
