//! Stream functions, velocities and circulations of point-vortex flows in
//! the exterior of several disjoint circular cylinders.
//!
//! The flow is built by the method of images: the vortex is reflected
//! through every boundary circle, the reflections are reflected again, and
//! so on. The truncated image sums are averaged so that they converge
//! geometrically whenever `(K - 1) P^2 < 1`, with an explicit error bound.

pub mod circulation;
pub mod dynamics;
mod error;
pub mod field;
pub mod fixtures;
pub mod geometry;
pub mod images;
pub mod stream;

pub use num_complex::Complex64 as Complex;

pub use circulation::{predicted_ledger, solve_center_strengths, CirculationLedger};
pub use dynamics::{advect, vortex_velocity, Halt, TrajectorySet};
pub use error::{Error, Result};
pub use field::{
    circulation_at_infinity, circulation_on_contour, cylinder_circulations, sample_grid, velocity,
    BoundingBox, FieldGrid, GridKind, GridValues,
};
pub use geometry::{invert, CircularDomain, Cylinder, SeparationReport, SpherePoint, Strictness};
pub use images::{
    build_image_tree, fixed_points_doubly_connected, level_counts, limit_set_points, ImagePoint,
    ImageTree,
};
pub use stream::{
    assemble_center_vortex, assemble_flow, assemble_infinity_vortex, assemble_single_vortex,
    error_bound, eval_stream, eval_stream_streaming, levels_for_tolerance, BoundaryCirculation,
    FlowModel, FlowSpec, Gauge, Generator, LogSource, PointVortex, Truncation,
};
