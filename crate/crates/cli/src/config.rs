//! JSON run configuration.

use serde::{Deserialize, Serialize};
use vortex_images::{
    CircularDomain, Complex, Cylinder, FlowSpec, Gauge, SpherePoint, Strictness,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderConfig {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexConfig {
    pub position: [f64; 2],
    pub circulation: f64,
}

/// Seed of the limit-set point cloud: a point `[re, im]` or `"infinity"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedConfig {
    Point([f64; 2]),
    Named(NamedSeed),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NamedSeed {
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Numerics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Boundary distance used by the error certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<f64>,
    /// `[xmin, xmax, ymin, ymax]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    /// `[nx, ny]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nq: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_seed: Option<SeedConfig>,
    /// Radius of the far circle for the circulation at infinity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RunConfig {
    #[serde(default)]
    pub cylinders: Vec<CylinderConfig>,
    #[serde(default)]
    pub vortices: Vec<VortexConfig>,
    #[serde(default)]
    pub gamma_infinity: f64,
    /// Prescribed circulation around each cylinder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circulations: Option<Vec<f64>>,
    /// Explicit center-vortex strengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_strengths: Option<Vec<f64>>,
    /// Report the stream function with zero value on this cylinder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_cylinder: Option<usize>,
    /// Accept touching cylinders. Only the limit-set export works on such
    /// domains.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_touching: bool,
    #[serde(default)]
    pub numerics: Numerics,
}

fn point(p: [f64; 2]) -> Complex {
    Complex::new(p[0], p[1])
}

fn schema(key: &str, message: impl Into<String>) -> CliError {
    CliError::Schema {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Strict parse of a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => {
                let message = inner.to_string();
                let key = message
                    .strip_prefix("unknown field `")
                    .and_then(|m| m.split('`').next())
                    .map(|k| {
                        if path == "." || path == k {
                            k.to_string()
                        } else if path.ends_with(&format!(".{k}")) {
                            path.clone()
                        } else {
                            format!("{path}.{k}")
                        }
                    })
                    .unwrap_or(path);
                CliError::Schema { key, message }
            }
            _ => CliError::Parse {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            },
        }
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Schema-level checks that do not need geometry.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.circulations.is_some() && self.center_strengths.is_some() {
            return Err(schema(
                "centerStrengths",
                "\"circulations\" and \"centerStrengths\" are mutually exclusive",
            ));
        }
        let k = self.cylinders.len();
        for (key, v) in [("circulations", &self.circulations), ("centerStrengths", &self.center_strengths)] {
            if let Some(v) = v {
                if v.len() != k {
                    return Err(schema(key, format!("expected {k} values, got {}", v.len())));
                }
            }
        }
        if let Some(i) = self.reference_cylinder {
            if i >= k {
                return Err(schema("referenceCylinder", format!("no cylinder {i}")));
            }
        }
        let n = &self.numerics;
        if n.level.is_some() && n.tolerance.is_some() {
            return Err(schema("numerics.tolerance", "give either a level or a tolerance, not both"));
        }
        let positive = |key: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(schema(key, format!("must be positive, got {x}")))
            }
            _ => Ok(()),
        };
        positive("numerics.tolerance", n.tolerance)?;
        positive("numerics.minDistance", n.min_distance)?;
        positive("numerics.dt", n.dt)?;
        positive("numerics.farRadius", n.far_radius)?;
        if let Some(b) = n.bbox {
            check_bbox(&b).map_err(|m| schema("numerics.bbox", m))?;
        }
        if let Some(r) = n.resolution {
            check_resolution(&r).map_err(|m| schema("numerics.resolution", m))?;
        }
        if n.nq == Some(0) {
            return Err(schema("numerics.nq", "must be positive"));
        }
        if n.steps == Some(0) {
            return Err(schema("numerics.steps", "must be positive"));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<CircularDomain, CliError> {
        let strictness = if self.allow_touching {
            Strictness::Lax
        } else {
            Strictness::Strict
        };
        let cylinders = self
            .cylinders
            .iter()
            .map(|c| Cylinder::new(point(c.center), c.radius))
            .collect();
        CircularDomain::new(cylinders, strictness).map_err(CliError::Input)
    }

    pub fn flow_spec(&self) -> Result<FlowSpec, CliError> {
        let mut spec = FlowSpec::new(self.domain()?).with_infinity(self.gamma_infinity);
        for v in &self.vortices {
            spec = spec.with_vortex(point(v.position), v.circulation);
        }
        if let Some(g) = &self.circulations {
            spec = spec.with_circulations(g.clone());
        }
        if let Some(s) = &self.center_strengths {
            spec = spec.with_center_strengths(s.clone());
        }
        if let Some(i) = self.reference_cylinder {
            spec = spec.with_gauge(Gauge::ZeroOnCylinder(i));
        }
        spec.validate().map_err(CliError::Input)?;
        Ok(spec)
    }

    pub fn limit_seed(&self) -> SpherePoint {
        match self.numerics.limit_seed {
            Some(SeedConfig::Point(p)) => SpherePoint::Finite(point(p)),
            Some(SeedConfig::Named(NamedSeed::Infinity)) => SpherePoint::Infinity,
            None => self
                .vortices
                .first()
                .map_or(SpherePoint::Infinity, |v| SpherePoint::Finite(point(v.position))),
        }
    }
}

pub(crate) fn check_bbox(b: &[f64; 4]) -> Result<(), String> {
    if b.iter().all(|x| x.is_finite()) && b[1] > b[0] && b[3] > b[2] {
        Ok(())
    } else {
        Err(format!("expected xmin < xmax and ymin < ymax, got {b:?}"))
    }
}

pub(crate) fn check_resolution(r: &[usize; 2]) -> Result<(), String> {
    if r[0] >= 2 && r[1] >= 2 {
        Ok(())
    } else {
        Err(format!("each resolution must be at least 2, got {r:?}"))
    }
}
