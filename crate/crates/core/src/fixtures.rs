//! Reference configurations and values.

use std::f64::consts::PI;

use crate::geometry::{CircularDomain, Cylinder};
use crate::stream::{FlowSpec, Gauge};
use crate::Complex;

/// A reference value of the stream function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub z: Complex,
    /// Elliptic-function reference solution.
    pub theta_method: f64,
    /// Reference image-method value.
    pub image_method: f64,
}

/// Two-level comparison point for the five-cylinder row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelComparison {
    pub z: Complex,
    pub level5: f64,
    pub level10: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoCylinderFixture {
    pub spec: FlowSpec,
    pub points: Vec<ReferencePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiveCylinderFixture {
    pub spec: FlowSpec,
    pub points: Vec<LevelComparison>,
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn domain(cyl: &[(Complex, f64)]) -> CircularDomain {
    CircularDomain::strict(cyl.iter().map(|&(c, r)| Cylinder::new(c, r)).collect())
        .expect("fixture domains are disjoint")
}

/// Cylinders `(0, 1)` and `(3, 0.5)`, unit vortex at `2i`, `Gamma_inf = -1`
/// (zero circulation on both cylinders). Values are reported with the stream
/// function zero on the first cylinder.
pub fn two_cylinder_fixture() -> TwoCylinderFixture {
    let spec = FlowSpec::new(domain(&[(c(0.0, 0.0), 1.0), (c(3.0, 0.0), 0.5)]))
        .with_vortex(c(0.0, 2.0), 1.0)
        .with_infinity(-1.0)
        .with_gauge(Gauge::ZeroOnCylinder(0));
    let points = vec![
        ReferencePoint { z: c(-3.5, -3.5), theta_method: -0.174608512540543, image_method: -0.174608618004631 },
        ReferencePoint { z: c(0.5, -1.5), theta_method: -0.047561219605849, image_method: -0.047561611378318 },
        ReferencePoint { z: c(2.5, 3.5), theta_method: -0.073398543207433, image_method: -0.073398504917044 },
        ReferencePoint { z: c(1.5, 0.5), theta_method: -0.020268684918721, image_method: -0.020268607383453 },
    ];
    TwoCylinderFixture { spec, points }
}

/// Five cylinders of radius 0.5 at `-4, -2, 0, 2, 4`, unit vortex at `2i`,
/// circulations `0, -1, 1, -1, 0`, `Gamma_inf = 0`.
pub fn five_cylinder_fixture() -> FiveCylinderFixture {
    let spec = FlowSpec::new(five_in_a_row())
        .with_vortex(c(0.0, 2.0), 1.0)
        .with_circulations(vec![0.0, -1.0, 1.0, -1.0, 0.0])
        .with_gauge(Gauge::ZeroOnCylinder(0));
    let points = vec![
        LevelComparison { z: c(-2.0, -2.0), level5: -1.039510891688030, level10: -1.039511060181374 },
        LevelComparison { z: c(0.0, 4.0), level5: -1.127511567288519, level10: -1.127516103881800 },
        LevelComparison { z: c(4.0, -2.0), level5: -1.193405902645471, level10: -1.193403567442811 },
    ];
    FiveCylinderFixture { spec, points }
}

fn five_in_a_row() -> CircularDomain {
    domain(&[-4.0, -2.0, 0.0, 2.0, 4.0].map(|x| (c(x, 0.0), 0.5)))
}

fn symmetric_pair() -> CircularDomain {
    domain(&[(c(-2.0, 0.0), 1.0), (c(2.0, 0.0), 1.0)])
}

fn triangle() -> CircularDomain {
    let cyl: Vec<(Complex, f64)> = (0..3)
        .map(|j| (Complex::from_polar(1.0, 2.0 * PI * j as f64 / 3.0), 0.5))
        .collect();
    domain(&cyl)
}

fn uneven_triple() -> CircularDomain {
    domain(&[(c(1.0, 1.0), 0.5), (c(-1.0, 1.0), 0.75), (c(-0.5, -1.0), 0.5)])
}

/// Named sample configurations.
pub fn named_specs() -> Vec<(&'static str, FlowSpec)> {
    let unit = |d: CircularDomain, z: Complex| FlowSpec::new(d).with_vortex(z, 1.0);
    vec![
        ("pair_no_circulation", unit(symmetric_pair(), c(0.0, 2.0)).with_circulations(vec![0.0, 0.0])),
        ("pair_opposite_circulation", unit(symmetric_pair(), c(0.0, 2.0)).with_circulations(vec![0.5, -0.5])),
        ("pair_equal_circulation", unit(symmetric_pair(), c(0.0, 2.0)).with_circulations(vec![0.5, 0.5])),
        ("triangle", unit(triangle(), c(0.0, 0.0)).with_circulations(vec![0.0; 3])),
        ("triangle_circulation", unit(triangle(), c(0.0, 0.0)).with_circulations(vec![-1.0 / 3.0; 3])),
        ("uneven_triple", unit(uneven_triple(), c(0.0, 0.0)).with_circulations(vec![0.0; 3])),
        ("uneven_triple_circulation", unit(uneven_triple(), c(0.0, 2.0)).with_circulations(vec![0.0, -1.0, 1.0])),
        ("five_in_a_row", five_cylinder_fixture().spec),
    ]
}

pub fn named_spec(name: &str) -> Option<FlowSpec> {
    named_specs().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}
