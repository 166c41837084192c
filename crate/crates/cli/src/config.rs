//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quartic_core::{testmap, ConformalFactor, CurveMesh, PlaneCurve};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Pointwise matrix identities at sampled curve points.
    pub identity: f64,
    /// Relative error of the mesh area.
    pub area_rel: f64,
    /// Relative error of the curvature integrals.
    pub integral_rel: f64,
    /// Relative agreement of closed-form and mesh energy quotients.
    pub energy_rel: f64,
    /// Newton residual of the balancing solve.
    pub balance: f64,
    /// Balance residual re-checked on the pushed mesh.
    pub balance_verify: f64,
    /// Relative slack allowed on top of the closed-form bound.
    pub chain_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-9,
            area_rel: 1e-3,
            integral_rel: 1e-2,
            energy_rel: 1e-2,
            balance: 1e-8,
            balance_verify: 1e-7,
            chain_slack: 0.02,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `klein`, `fermat`, `conic`, `cubic`, or a path to a curve JSON file.
    pub curve: String,
    pub level: u32,
    /// Test-map parameter; the minimizer of `F` when absent.
    pub a: Option<f64>,
    /// `induced`, `hyperbolic`, `random`, or a path to a factor JSON file.
    pub metric: String,
    pub seed: u64,
    pub out: PathBuf,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            curve: "klein".into(),
            level: 5,
            a: None,
            metric: "induced".into(),
            seed: 0,
            out: PathBuf::from("out"),
            tolerances: Tolerances::default(),
        }
    }
}

/// Flag values that override the configuration file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub curve: Option<String>,
    pub level: Option<u32>,
    pub a: Option<f64>,
    pub metric: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = flags.curve {
            cfg.curve = v;
        }
        if let Some(v) = flags.level {
            cfg.level = v;
        }
        if flags.a.is_some() {
            cfg.a = flags.a;
        }
        if let Some(v) = flags.metric {
            cfg.metric = v;
        }
        if let Some(v) = flags.seed {
            cfg.seed = v;
        }
        if let Some(v) = flags.out {
            cfg.out = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.level > quartic_core::mesh::MAX_LEVEL {
            bail!("level {} exceeds the maximum of {}", self.level, quartic_core::mesh::MAX_LEVEL);
        }
        if let Some(a) = self.a {
            if !a.is_finite() {
                bail!("parameter a must be finite");
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("identity", t.identity),
            ("area_rel", t.area_rel),
            ("integral_rel", t.integral_rel),
            ("energy_rel", t.energy_rel),
            ("balance", t.balance),
            ("balance_verify", t.balance_verify),
            ("chain_slack", t.chain_slack),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("tolerance {name} must be positive, got {v}");
            }
        }
        self.curve()?;
        Ok(())
    }

    pub fn curve(&self) -> Result<PlaneCurve> {
        Ok(match self.curve.as_str() {
            "klein" => PlaneCurve::klein_quartic(),
            "fermat" => PlaneCurve::fermat(4)?,
            "cubic" => PlaneCurve::fermat(3)?,
            "conic" => PlaneCurve::conic(),
            path => PlaneCurve::load(Path::new(path)).with_context(|| format!("loading curve {path}"))?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a.unwrap_or_else(|| testmap::minimize_f().a1_f64)
    }

    pub fn mesh(&self) -> Result<CurveMesh> {
        let curve = self.curve()?;
        CurveMesh::build(&curve, self.level, self.seed)
            .with_context(|| format!("building {} mesh at level {}", self.curve, self.level))
    }

    /// Conformal factor selected by `metric`, `None` for the induced metric.
    pub fn factor(&self, mesh: &CurveMesh) -> Result<Option<ConformalFactor>> {
        Ok(match self.metric.as_str() {
            "induced" => None,
            "random" => Some(ConformalFactor::random_smooth(mesh, self.seed, 1.0)),
            "hyperbolic" => Some(quartic_core::uniform::uniformize(mesh, -1.0)?.u),
            path => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading factor {path}"))?;
                let u: Vec<f64> = serde_json::from_str(&text).with_context(|| format!("parsing factor {path}"))?;
                if u.len() != mesh.n_vertices() {
                    bail!("factor {path} has {} values, mesh has {} vertices", u.len(), mesh.n_vertices());
                }
                Some(ConformalFactor::new(u)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"curve": "fermat", "level": 3, "seed": 7}"#).unwrap();
        let cfg = RunConfig::load(Some(&p), Overrides { level: Some(2), ..Default::default() }).unwrap();
        assert_eq!(cfg.curve, "fermat");
        assert_eq!(cfg.level, 2);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tolerances, Tolerances::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"curve": "klein", "levle": 3}"#).unwrap();
        assert!(RunConfig::load(Some(&p), Overrides::default()).is_err());
        std::fs::write(&p, r#"{"tolerances": {"identity": 1e-9, "extra": 1}}"#).unwrap();
        assert!(RunConfig::load(Some(&p), Overrides::default()).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let flags = |level| Overrides { level: Some(level), ..Default::default() };
        assert!(RunConfig::load(None, flags(10)).is_err());
        let bad_curve = Overrides { curve: Some("no-such-curve.json".into()), ..Default::default() };
        assert!(RunConfig::load(None, bad_curve).is_err());
    }
}
