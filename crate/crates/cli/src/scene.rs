//! Scene files: one JSON document holding the objects a command works on.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

use nevanlinna::admissibility::ZGrid;
use nevanlinna::figure::FigureSpec;
use nevanlinna::torus::TorusMeasure;
use nevanlinna::{Axis, DiskPoint, HalfPlanePoint, Measure, Region, RepresentationParams};

pub const SCENE_VERSION: u32 = 1;

/// Per-command inputs; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<HalfPlanePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<DiskPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(Axis, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag_at_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ZGrid>,
    /// Classify the region's preimage on the torus instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub version: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<RepresentationParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_measure: Option<TorusMeasure>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: SceneOptions,
}

fn is_default(o: &SceneOptions) -> bool {
    *o == SceneOptions::default()
}

impl Scene {
    pub fn parse(text: &str) -> Result<Scene> {
        let scene: Scene = serde_json::from_str(text).context("invalid scene")?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Scene::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCENE_VERSION {
            bail!("unsupported scene version {} (expected {SCENE_VERSION})", self.version);
        }
        let dims = [
            self.params.as_ref().map(|p| ("params", p.n())),
            self.measure.as_ref().map(|m| ("measure", m.n())),
            self.region.as_ref().map(|r| ("region", r.dim())),
            self.torus_measure.as_ref().map(|t| ("torus_measure", t.n())),
            self.options.z.as_ref().map(|z| ("options.z", z.dim())),
            self.options.w.as_ref().map(|w| ("options.w", w.dim())),
        ];
        for (name, dim) in dims.into_iter().flatten() {
            if dim != self.n {
                bail!("{name} has dimension {dim}, scene declares n = {}", self.n);
            }
        }
        if let Some(r) = &self.region {
            r.validate()?;
        }
        Ok(())
    }

    /// Representation parameters, taken from `params` or built as `(0, 0, measure)`.
    pub fn representation(&self) -> Result<RepresentationParams> {
        match (&self.params, &self.measure) {
            (Some(p), None) => Ok(p.clone()),
            (None, Some(m)) => Ok(RepresentationParams::from_measure(m.clone())),
            (Some(_), Some(_)) => bail!("scene has both params and measure; keep one"),
            (None, None) => bail!("scene needs params or measure"),
        }
    }

    pub fn half_plane_measure(&self) -> Result<Measure> {
        Ok(self.representation()?.mu().clone())
    }

    pub fn region(&self) -> Result<&Region> {
        self.region.as_ref().context("scene needs a region")
    }

    pub fn torus_measure(&self) -> Result<&TorusMeasure> {
        self.torus_measure.as_ref().context("scene needs a torus_measure")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_versions() {
        assert!(Scene::parse(r#"{"version":1,"n":1,"extra":0}"#).is_err());
        assert!(Scene::parse(r#"{"version":2,"n":1}"#).is_err());
        assert!(Scene::parse(r#"{"version":1,"n":1,"options":{"zz":1}}"#).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let text =
            r#"{"version":1,"n":2,"measure":{"n":1,"components":[{"kind":"point_mass","location":[0],"weight":1}]}}"#;
        assert!(Scene::parse(text).is_err());
    }

    #[test]
    fn representation_sources() {
        let m = r#"{"n":1,"components":[]}"#;
        let both = format!(r#"{{"version":1,"n":1,"measure":{m},"params":{{"n":1,"a":0,"b":[0],"mu":{m}}}}}"#);
        assert!(Scene::parse(&both).unwrap().representation().is_err());
        let none = Scene::parse(r#"{"version":1,"n":1}"#).unwrap();
        assert!(none.representation().is_err());
    }
}
