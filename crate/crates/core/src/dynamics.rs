//! Vortex motion under the image-induced velocity.
//!
//! Each vortex is advected by the full field minus its own singular term:
//! its own images, the other vortices and their images, and the infinity and
//! center generators all contribute.

use crate::error::{Error, Result};
use crate::field::{velocity, velocity_excluding};
use crate::stream::{assemble_flow, FlowModel, FlowSpec, Generator, Truncation};
use crate::Complex;

/// Vortices closer than this fraction of the smallest radius to a boundary
/// stop the integration.
pub const COLLISION_FRACTION: f64 = 1e-3;

fn desingularized(model: &FlowModel, position: Complex) -> Result<(f64, f64)> {
    let own = model.ledger().iter().find_map(|r| match r.generator {
        Generator::Vortex { position: p, .. } if p == position => Some(r.sources.start),
        _ => None,
    });
    match own {
        Some(skip) => velocity_excluding(model, position, skip),
        None => velocity(model, position),
    }
}

/// Advection velocity of every vortex of `spec` at truncation level `level`.
pub fn advection_velocities(spec: &FlowSpec, level: usize) -> Result<Vec<(f64, f64)>> {
    let model = assemble_flow(spec, Truncation::Level(level))?;
    spec.vortices
        .iter()
        .map(|v| desingularized(&model, v.position))
        .collect()
}

/// Advection velocity of vortex `index`.
pub fn vortex_velocity(spec: &FlowSpec, index: usize, level: usize) -> Result<(f64, f64)> {
    let v = spec.vortices.get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: spec.vortices.len(),
    })?;
    let model = assemble_flow(spec, Truncation::Level(level))?;
    desingularized(&model, v.position)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Halt {
    /// A vortex came within the collision distance of cylinder `cylinder`.
    BoundaryCollision { vortex: usize, cylinder: usize, time: f64 },
}

/// Recorded vortex paths. `positions[v][s]` is vortex `v` at `times[s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<Complex>>,
    pub circulations: Vec<f64>,
    pub halt: Option<Halt>,
}

fn near_boundary(spec: &FlowSpec, z: &[Complex]) -> Option<(usize, usize)> {
    let guard = spec.domain.min_radius()? * COLLISION_FRACTION;
    for (v, p) in z.iter().enumerate() {
        for (c, cyl) in spec.domain.cylinders().iter().enumerate() {
            if cyl.boundary_distance(*p) < guard {
                return Some((v, c));
            }
        }
    }
    None
}

fn stage_velocity(spec: &FlowSpec, z: &[Complex], level: usize) -> Result<Vec<Complex>> {
    let mut s = spec.clone();
    for (v, p) in s.vortices.iter_mut().zip(z) {
        v.position = *p;
    }
    Ok(advection_velocities(&s, level)?
        .into_iter()
        .map(|(u, v)| Complex::new(u, v))
        .collect())
}

/// Classical fourth-order Runge-Kutta on all vortex positions, with the
/// image trees rebuilt at every stage. Stops early, keeping the recorded
/// steps, if a vortex approaches a boundary.
pub fn advect(spec: &FlowSpec, dt: f64, steps: usize, truncation: Truncation) -> Result<TrajectorySet> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    spec.validate()?;
    let level = spec.resolve_level(truncation)?;
    let mut z: Vec<Complex> = spec.vortices.iter().map(|v| v.position).collect();
    let mut set = TrajectorySet {
        times: vec![0.0],
        positions: z.iter().map(|p| vec![*p]).collect(),
        circulations: spec.vortices.iter().map(|v| v.circulation).collect(),
        halt: None,
    };
    if let Some((vortex, cylinder)) = near_boundary(spec, &z) {
        set.halt = Some(Halt::BoundaryCollision { vortex, cylinder, time: 0.0 });
        return Ok(set);
    }

    let shifted = |base: &[Complex], k: &[Complex], h: f64| -> Vec<Complex> {
        base.iter().zip(k).map(|(p, v)| p + v * h).collect()
    };
    for step in 1..=steps {
        let t = step as f64 * dt;
        let stages = (|| -> Result<Vec<Complex>> {
            let k1 = stage_velocity(spec, &z, level)?;
            let k2 = stage_velocity(spec, &shifted(&z, &k1, 0.5 * dt), level)?;
            let k3 = stage_velocity(spec, &shifted(&z, &k2, 0.5 * dt), level)?;
            let k4 = stage_velocity(spec, &shifted(&z, &k3, dt), level)?;
            Ok((0..z.len())
                .map(|i| z[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
                .collect())
        })();
        let next = match stages {
            Ok(next) => next,
            // an intermediate stage left the domain
            Err(Error::InvalidSpec(_)) if !spec.domain.is_empty() => {
                let (vortex, cylinder) = near_boundary(spec, &z).unwrap_or((0, 0));
                set.halt = Some(Halt::BoundaryCollision { vortex, cylinder, time: t });
                return Ok(set);
            }
            Err(e) => return Err(e),
        };
        if let Some((vortex, cylinder)) = near_boundary(spec, &next) {
            set.halt = Some(Halt::BoundaryCollision { vortex, cylinder, time: t });
            return Ok(set);
        }
        z = next;
        set.times.push(t);
        for (path, p) in set.positions.iter_mut().zip(&z) {
            path.push(*p);
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CircularDomain, Cylinder};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn lone_vortex_is_stationary() {
        let spec = FlowSpec::new(CircularDomain::empty()).with_vortex(c(0.3, 0.4), 1.0);
        assert_eq!(vortex_velocity(&spec, 0, 3).unwrap(), (0.0, 0.0));
        let t = advect(&spec, 0.1, 10, Truncation::Level(3)).unwrap();
        assert!(t.positions[0].iter().all(|p| *p == c(0.3, 0.4)));
    }

    #[test]
    fn two_vortex_speed() {
        let d = 0.5;
        let spec = FlowSpec::new(CircularDomain::empty())
            .with_vortex(c(-d, 0.0), 1.0)
            .with_vortex(c(d, 0.0), 1.0);
        let v = advection_velocities(&spec, 1).unwrap();
        let speed = 1.0 / (4.0 * PI * d);
        assert!((v[0].1 + speed).abs() < 1e-15 && v[0].0.abs() < 1e-15);
        assert!((v[1].1 - speed).abs() < 1e-15);
    }

    #[test]
    fn one_cylinder_velocity_is_tangential() {
        let d = CircularDomain::strict(vec![Cylinder::new(c(1.0, -1.0), 1.0)]).unwrap();
        let spec = FlowSpec::new(d).with_vortex(c(2.5, 0.5), 1.0);
        let (u, v) = vortex_velocity(&spec, 0, 4).unwrap();
        let r = c(2.5, 0.5) - c(1.0, -1.0);
        let radial = (u * r.re + v * r.im) / r.norm();
        assert!(radial.abs() < 1e-14);
        assert!((u * u + v * v).sqrt() > 1e-3);
    }

    #[test]
    fn collision_guard_halts() {
        let d = CircularDomain::strict(vec![Cylinder::new(c(0.0, 0.0), 1.0)]).unwrap();
        let spec = FlowSpec::new(d).with_vortex(c(1.0005, 0.0), 1.0);
        let t = advect(&spec, 0.01, 10, Truncation::Level(2)).unwrap();
        assert_eq!(t.times, vec![0.0]);
        assert!(matches!(
            t.halt,
            Some(Halt::BoundaryCollision { vortex: 0, cylinder: 0, .. })
        ));
    }
}
