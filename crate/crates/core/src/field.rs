//! Velocity, contour circulation and gridded samples of an assembled flow.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stream::{FlowModel, LogSource};
use crate::Complex;

/// `dw/dz = sum s / (2 pi i (z - p))`, skipping `skip` if given.
fn complex_velocity(sources: &[LogSource], z: Complex, skip: Option<usize>) -> Result<Complex> {
    let mut acc = Complex::new(0.0, 0.0);
    for (i, s) in sources.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d = z - s.position;
        if d.re == 0.0 && d.im == 0.0 {
            return Err(Error::SingularPoint);
        }
        acc += s.strength * d.conj() / d.norm_sqr();
    }
    // 1 / (2 pi i) = -i / (2 pi)
    Ok(acc * Complex::new(0.0, -1.0 / (2.0 * PI)))
}

/// Velocity `(u, v)` with `u = dpsi/dy`, `v = -dpsi/dx`.
pub fn velocity(model: &FlowModel, z: Complex) -> Result<(f64, f64)> {
    let w = complex_velocity(model.sources(), z, None)?;
    Ok((w.re, -w.im))
}

/// Velocity with the source at `skip` removed from the sum.
pub(crate) fn velocity_excluding(model: &FlowModel, z: Complex, skip: usize) -> Result<(f64, f64)> {
    let w = complex_velocity(model.sources(), z, Some(skip))?;
    Ok((w.re, -w.im))
}

/// Counterclockwise circulation along the circle `|z - center| = radius`
/// by the trapezoidal rule on `nq` equispaced nodes.
pub fn circulation_on_contour(model: &FlowModel, center: Complex, radius: f64, nq: usize) -> Result<f64> {
    if nq == 0 || !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "contour needs nq > 0 and radius > 0 (nq = {nq}, radius = {radius})"
        )));
    }
    let closest = model
        .sources()
        .iter()
        .map(|s| ((s.position - center).norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    if closest < 1e-9 {
        return Err(Error::ContourThroughSingularity { distance: closest });
    }
    let h = 2.0 * PI / nq as f64;
    let mut total = 0.0;
    for k in 0..nq {
        let e = Complex::from_polar(1.0, h * k as f64);
        let z = center + radius * e;
        let w = complex_velocity(model.sources(), z, None)?;
        // Re(w'(z) dz), dz = i r e^{i theta} dtheta
        total += (w * Complex::new(0.0, radius) * e).re;
    }
    Ok(total * h)
}

/// Circulation of every cylinder, measured on its boundary inflated by
/// `1e-6 R_j`.
pub fn cylinder_circulations(model: &FlowModel, nq: usize) -> Result<Vec<f64>> {
    model
        .domain()
        .cylinders()
        .iter()
        .map(|c| circulation_on_contour(model, c.center, c.radius * (1.0 + 1e-6), nq))
        .collect()
}

/// Circulation around the point at infinity: clockwise along the circle
/// `|z| = radius`, which must enclose every cylinder and vortex.
pub fn circulation_at_infinity(model: &FlowModel, radius: f64, nq: usize) -> Result<f64> {
    Ok(-circulation_on_contour(model, Complex::new(0.0, 0.0), radius, nq)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Stream,
    Velocity,
}

/// Axis-aligned sampling box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridValues {
    Stream(Vec<f64>),
    Velocity(Vec<(f64, f64)>),
}

/// Row-major cell-centred samples; index `j * nx + i` is column `i`, row `j`.
/// Masked cells (strictly inside a cylinder) hold NaN. Velocity at an exact
/// source position is NaN; the stream function there is a signed infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub bbox: BoundingBox,
    pub nx: usize,
    pub ny: usize,
    pub values: GridValues,
    pub mask: Vec<bool>,
}

impl FieldGrid {
    pub fn point(&self, i: usize, j: usize) -> Complex {
        cell_center(&self.bbox, self.nx, self.ny, i, j)
    }
}

fn cell_center(b: &BoundingBox, nx: usize, ny: usize, i: usize, j: usize) -> Complex {
    Complex::new(
        b.xmin + (i as f64 + 0.5) * (b.xmax - b.xmin) / nx as f64,
        b.ymin + (j as f64 + 0.5) * (b.ymax - b.ymin) / ny as f64,
    )
}

pub fn sample_grid(model: &FlowModel, bbox: BoundingBox, nx: usize, ny: usize, kind: GridKind) -> Result<FieldGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!("grid needs nx, ny >= 2, got {nx}x{ny}")));
    }
    if !(bbox.xmax > bbox.xmin && bbox.ymax > bbox.ymin) {
        return Err(Error::InvalidArgument("empty bounding box".into()));
    }
    let domain = model.domain();
    let rows: Vec<(Vec<bool>, Vec<(f64, f64)>)> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let mut mask = Vec::with_capacity(nx);
            let mut vals = Vec::with_capacity(nx);
            for i in 0..nx {
                let z = cell_center(&bbox, nx, ny, i, j);
                let masked = domain.is_masked(z);
                mask.push(masked);
                vals.push(if masked {
                    (f64::NAN, f64::NAN)
                } else {
                    match kind {
                        GridKind::Stream => (model.eval(z), 0.0),
                        GridKind::Velocity => velocity(model, z).unwrap_or((f64::NAN, f64::NAN)),
                    }
                });
            }
            (mask, vals)
        })
        .collect();
    let mut mask = Vec::with_capacity(nx * ny);
    let mut vals = Vec::with_capacity(nx * ny);
    for (m, v) in rows {
        mask.extend(m);
        vals.extend(v);
    }
    let values = match kind {
        GridKind::Stream => GridValues::Stream(vals.into_iter().map(|v| v.0).collect()),
        GridKind::Velocity => GridValues::Velocity(vals),
    };
    Ok(FieldGrid {
        bbox,
        nx,
        ny,
        values,
        mask,
    })
}
