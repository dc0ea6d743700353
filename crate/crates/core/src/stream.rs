//! Stream functions assembled from weighted logarithmic sources.
//!
//! The averaged truncation `((K-1) psi_N + psi_{N+1}) / K` equals the plain
//! level-`N` image sum plus the level-`N+1` images at `1/K` of their parity
//! strength, so a truncated flow is a flat list of [`LogSource`]s.

use std::f64::consts::PI;
use std::ops::Range;

use rayon::prelude::*;

use crate::circulation::solve_center_strengths;
use crate::error::{Error, Result};
use crate::geometry::{CircularDomain, SeparationReport, SpherePoint};
use crate::images::{self, build_image_tree, for_each_descendant};
use crate::Complex;

/// Cap on the number of materialised sources in one model.
pub const DEFAULT_SOURCE_BUDGET: u64 = 10_000_000;

/// Boundary samples used to pin the additive constant of a gauge.
pub const GAUGE_SAMPLES: usize = 4;

/// Logarithmic singularity contributing `-(strength / 2 pi) log|z - position|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSource {
    pub position: Complex,
    pub strength: f64,
}

impl LogSource {
    #[inline]
    pub fn stream_at(&self, z: Complex) -> f64 {
        -self.strength / (4.0 * PI) * (z - self.position).norm_sqr().ln()
    }
}

/// A point vortex in the flow region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointVortex {
    pub position: Complex,
    pub circulation: f64,
}

impl PointVortex {
    pub fn new(position: Complex, circulation: f64) -> Self {
        Self {
            position,
            circulation,
        }
    }
}

/// Root of one image system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Vortex at a finite exterior point.
    Vortex { position: Complex, circulation: f64 },
    /// Vortex at the point at infinity; its own term is omitted.
    Infinity { circulation: f64 },
    /// Vortex at the center of cylinder `index`.
    Center { index: usize, circulation: f64 },
}

impl Generator {
    pub fn circulation(&self) -> f64 {
        match *self {
            Generator::Vortex { circulation, .. }
            | Generator::Infinity { circulation }
            | Generator::Center { circulation, .. } => circulation,
        }
    }

    pub fn seed(&self, domain: &CircularDomain) -> Result<SpherePoint> {
        Ok(match *self {
            Generator::Vortex { position, .. } => SpherePoint::Finite(position),
            Generator::Infinity { .. } => SpherePoint::Infinity,
            Generator::Center { index, .. } => SpherePoint::Finite(domain.cylinder(index)?.center),
        })
    }

    /// Whether the seed itself carries a source.
    fn emits_seed(&self) -> bool {
        !matches!(self, Generator::Infinity { .. })
    }

    fn validate(&self, domain: &CircularDomain) -> Result<()> {
        domain.require_strict()?;
        match *self {
            Generator::Vortex { position, .. } => domain.check_exterior(position),
            Generator::Infinity { .. } if domain.is_empty() => Err(Error::InvalidSpec(
                "a vortex at infinity needs at least one cylinder".into(),
            )),
            Generator::Infinity { .. } => Ok(()),
            Generator::Center { index, .. } => domain.cylinder(index).map(|_| ()),
        }
    }
}

/// Strength multiplier of a level-`m` image at truncation level `n`.
#[inline]
fn level_weight(m: usize, n: usize, k: usize) -> f64 {
    let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
    if m == n + 1 {
        parity / k as f64
    } else {
        parity
    }
}

/// One generator's slice of a [`FlowModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRecord {
    pub generator: Generator,
    pub seed: SpherePoint,
    /// Range of this generator's entries in [`FlowModel::sources`]. For
    /// finite seeds the first entry is the seed itself.
    pub sources: Range<usize>,
    pub report: SeparationReport,
}

/// Additive normalisation of the stream function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gauge {
    /// Plain image sum.
    #[default]
    Raw,
    /// Shift so the stream function vanishes on the given cylinder.
    ZeroOnCylinder(usize),
}

/// Assembled, immutable truncated flow.
#[derive(Debug, Clone)]
pub struct FlowModel {
    domain: CircularDomain,
    sources: Vec<LogSource>,
    level: usize,
    ledger: Vec<GeneratorRecord>,
    offset: f64,
}

impl FlowModel {
    fn empty(domain: CircularDomain, level: usize) -> Self {
        Self {
            domain,
            sources: Vec::new(),
            level,
            ledger: Vec::new(),
            offset: 0.0,
        }
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn sources(&self) -> &[LogSource] {
        &self.sources
    }

    /// Truncation level `N`.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ledger(&self) -> &[GeneratorRecord] {
        &self.ledger
    }

    /// Additive constant included in [`FlowModel::eval`].
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Worst-case separation over all generators.
    pub fn worst_report(&self) -> Option<SeparationReport> {
        SeparationReport::worst(self.ledger.iter().map(|r| &r.report))
    }

    /// `false` when some generator has `(K-1)P^2 >= 1`; values are still
    /// computed but carry no certificate.
    pub fn converges(&self) -> bool {
        self.ledger.iter().all(|r| r.report.converges)
    }

    /// Upper bound on `|psi*_N - psi*_M|` for every `M > N` at points whose
    /// boundary distance is at least `min_distance`. `None` without
    /// convergence.
    pub fn certified_bound(&self, min_distance: f64) -> Option<f64> {
        certified_bound(&self.ledger, self.level, min_distance)
    }

    /// Stream function at `z`; signed infinity at a source position.
    pub fn eval(&self, z: Complex) -> f64 {
        self.offset + raw_stream(&self.sources, z)
    }

    /// Concatenates models over the same domain and truncation level.
    pub fn superpose(domain: CircularDomain, level: usize, parts: Vec<FlowModel>) -> Self {
        let mut model = FlowModel::empty(domain, level);
        for part in parts {
            let base = model.sources.len();
            model.sources.extend_from_slice(&part.sources);
            model.ledger.extend(part.ledger.into_iter().map(|mut r| {
                r.sources = r.sources.start + base..r.sources.end + base;
                r
            }));
            model.offset += part.offset;
        }
        model
    }
}

fn certified_bound(ledger: &[GeneratorRecord], level: usize, min_distance: f64) -> Option<f64> {
    ledger.iter().try_fold(0.0, |acc, r| {
        let b = error_bound(&r.report, level, min_distance).ok()?;
        Some(acc + r.generator.circulation().abs() * b)
    })
}

#[inline]
fn raw_stream(sources: &[LogSource], z: Complex) -> f64 {
    let acc: f64 = sources
        .iter()
        .map(|s| s.strength * (z - s.position).norm_sqr().ln())
        .sum();
    -acc / (4.0 * PI)
}

/// Free function form of [`FlowModel::eval`].
pub fn eval_stream(model: &FlowModel, z: Complex) -> f64 {
    model.eval(z)
}

fn assemble_generator(
    domain: &CircularDomain,
    generator: Generator,
    level: usize,
    budget: u64,
) -> Result<FlowModel> {
    generator.validate(domain)?;
    let seed = generator.seed(domain)?;
    let report = domain.separation_report(seed)?;
    let k = domain.len();
    let gamma = generator.circulation();

    let mut sources = Vec::new();
    if generator.emits_seed() {
        if let SpherePoint::Finite(z) = seed {
            sources.push(LogSource {
                position: z,
                strength: gamma,
            });
        }
    }
    if k > 0 {
        let total: u128 = (1..=level + 1).map(|m| images::level_counts(k, m)).sum();
        if total > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: total,
                budget,
            });
        }
        let tree = build_image_tree(domain, seed, level + 1)?;
        for (m, points) in tree.levels().iter().enumerate().skip(1) {
            let strength = gamma * level_weight(m, level, k);
            sources.extend(points.iter().filter_map(|p| {
                p.position.finite().map(|position| LogSource { position, strength })
            }));
        }
    }
    let n = sources.len();
    Ok(FlowModel {
        domain: domain.clone(),
        sources,
        level,
        ledger: vec![GeneratorRecord {
            generator,
            seed,
            sources: 0..n,
            report,
        }],
        offset: 0.0,
    })
}

/// Image system of a single vortex at a finite exterior point.
pub fn assemble_single_vortex(
    domain: &CircularDomain,
    position: Complex,
    circulation: f64,
    level: usize,
) -> Result<FlowModel> {
    assemble_generator(
        domain,
        Generator::Vortex {
            position,
            circulation,
        },
        level,
        DEFAULT_SOURCE_BUDGET,
    )
}

/// Image system of a vortex at infinity. Its level-1 images are the centers.
pub fn assemble_infinity_vortex(
    domain: &CircularDomain,
    circulation: f64,
    level: usize,
) -> Result<FlowModel> {
    assemble_generator(
        domain,
        Generator::Infinity { circulation },
        level,
        DEFAULT_SOURCE_BUDGET,
    )
}

/// Image system of a vortex at the center of cylinder `index`.
pub fn assemble_center_vortex(
    domain: &CircularDomain,
    index: usize,
    circulation: f64,
    level: usize,
) -> Result<FlowModel> {
    domain.cylinder(index)?;
    assemble_generator(
        domain,
        Generator::Center { index, circulation },
        level,
        DEFAULT_SOURCE_BUDGET,
    )
}

/// How the circulations around the cylinders are fixed.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum BoundaryCirculation {
    /// No center vortices; each cylinder carries whatever the other
    /// generators induce.
    #[default]
    Unspecified,
    /// Target circulation per cylinder; center strengths are solved for.
    Prescribed(Vec<f64>),
    /// Explicit center-vortex strengths.
    CenterStrengths(Vec<f64>),
}

/// Full description of a flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub domain: CircularDomain,
    pub vortices: Vec<PointVortex>,
    pub infinity_circulation: f64,
    pub boundary: BoundaryCirculation,
    pub gauge: Gauge,
}

impl FlowSpec {
    pub fn new(domain: CircularDomain) -> Self {
        Self {
            domain,
            vortices: Vec::new(),
            infinity_circulation: 0.0,
            boundary: BoundaryCirculation::Unspecified,
            gauge: Gauge::Raw,
        }
    }

    pub fn with_vortex(mut self, position: Complex, circulation: f64) -> Self {
        self.vortices.push(PointVortex::new(position, circulation));
        self
    }

    pub fn with_infinity(mut self, circulation: f64) -> Self {
        self.infinity_circulation = circulation;
        self
    }

    pub fn with_circulations(mut self, gamma: Vec<f64>) -> Self {
        self.boundary = BoundaryCirculation::Prescribed(gamma);
        self
    }

    pub fn with_center_strengths(mut self, strengths: Vec<f64>) -> Self {
        self.boundary = BoundaryCirculation::CenterStrengths(strengths);
        self
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.require_strict()?;
        let k = self.domain.len();
        for (i, v) in self.vortices.iter().enumerate() {
            if !(v.position.re.is_finite() && v.position.im.is_finite() && v.circulation.is_finite()) {
                return Err(Error::InvalidSpec(format!("vortex {i} is not finite")));
            }
            self.domain.check_exterior(v.position).map_err(|_| {
                Error::InvalidSpec(format!("vortex {i} is not strictly exterior to the cylinders"))
            })?;
            if self.vortices[..i].iter().any(|w| w.position == v.position) {
                return Err(Error::InvalidSpec(format!("vortex {i} coincides with another vortex")));
            }
        }
        match &self.boundary {
            BoundaryCirculation::Prescribed(v) | BoundaryCirculation::CenterStrengths(v)
                if v.len() != k =>
            {
                return Err(Error::InvalidSpec(format!(
                    "expected {k} per-cylinder values, got {}",
                    v.len()
                )));
            }
            _ => {}
        }
        if k == 0 && self.infinity_circulation != 0.0 {
            return Err(Error::InvalidSpec(
                "a vortex at infinity needs at least one cylinder".into(),
            ));
        }
        if let Gauge::ZeroOnCylinder(i) = self.gauge {
            self.domain.cylinder(i)?;
        }
        Ok(())
    }

    pub fn vortex_circulation_sum(&self) -> f64 {
        self.vortices.iter().map(|v| v.circulation).sum()
    }

    /// Center-vortex strengths: solved, explicit, or all zero.
    pub fn center_strengths(&self) -> Vec<f64> {
        let k = self.domain.len();
        match &self.boundary {
            BoundaryCirculation::Unspecified => vec![0.0; k],
            BoundaryCirculation::CenterStrengths(s) => s.clone(),
            BoundaryCirculation::Prescribed(gamma) => solve_center_strengths(
                gamma,
                self.vortex_circulation_sum(),
                self.infinity_circulation,
            ),
        }
    }

    /// Every generator with non-zero circulation, in the order finite
    /// vortices, infinity, centers.
    pub fn generators(&self) -> Vec<Generator> {
        let mut g: Vec<Generator> = self
            .vortices
            .iter()
            .map(|v| Generator::Vortex {
                position: v.position,
                circulation: v.circulation,
            })
            .collect();
        if self.infinity_circulation != 0.0 {
            g.push(Generator::Infinity {
                circulation: self.infinity_circulation,
            });
        }
        g.extend(
            self.center_strengths()
                .into_iter()
                .enumerate()
                .map(|(index, circulation)| Generator::Center { index, circulation }),
        );
        g.retain(|g| g.circulation() != 0.0);
        g
    }

    /// Per-generator separation reports.
    pub fn reports(&self) -> Result<Vec<SeparationReport>> {
        self.generators()
            .iter()
            .map(|g| self.domain.separation_report(g.seed(&self.domain)?))
            .collect()
    }

    /// Truncation level for a request: the smallest `N >= 1` whose summed
    /// certificate `sum |Gamma_g| error_bound(report_g, N, R)` meets `tol`.
    pub fn resolve_level(&self, truncation: Truncation) -> Result<usize> {
        match truncation {
            Truncation::Level(n) => Ok(n),
            Truncation::Tolerance { tol, min_distance } => {
                if !(tol > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "tolerance must be positive, got {tol}"
                    )));
                }
                let weighted: Vec<(f64, SeparationReport)> = self
                    .generators()
                    .iter()
                    .zip(self.reports()?)
                    .map(|(g, r)| (g.circulation().abs(), r))
                    .collect();
                let total = |n: usize| -> Result<f64> {
                    weighted
                        .iter()
                        .map(|(gamma, r)| Ok(gamma * error_bound(r, n, min_distance)?))
                        .sum()
                };
                let mut n = 1;
                while total(n)? > tol {
                    n += 1;
                }
                Ok(n)
            }
        }
    }
}

/// Requested truncation: a fixed level, or the smallest level whose
/// certificate meets `tol` at boundary distance `min_distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Level(usize),
    Tolerance { tol: f64, min_distance: f64 },
}

/// Superposes all generators of `spec` at one shared truncation level.
pub fn assemble_flow(spec: &FlowSpec, truncation: Truncation) -> Result<FlowModel> {
    assemble_flow_with_budget(spec, truncation, DEFAULT_SOURCE_BUDGET)
}

pub fn assemble_flow_with_budget(
    spec: &FlowSpec,
    truncation: Truncation,
    budget: u64,
) -> Result<FlowModel> {
    spec.validate()?;
    let level = spec.resolve_level(truncation)?;
    let generators = spec.generators();
    let k = spec.domain.len() as u128;
    let per_tree: u128 = if k == 0 {
        1
    } else {
        1 + (1..=level + 1).map(|m| images::level_counts(k as usize, m)).sum::<u128>()
    };
    let required = per_tree.saturating_mul(generators.len() as u128);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let parts = generators
        .into_iter()
        .map(|g| assemble_generator(&spec.domain, g, level, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut model = FlowModel::superpose(spec.domain.clone(), level, parts);
    if let Gauge::ZeroOnCylinder(i) = spec.gauge {
        let samples = gauge_samples(&spec.domain, i)?;
        let mean = samples.iter().map(|&z| raw_stream(&model.sources, z)).sum::<f64>()
            / samples.len() as f64;
        model.offset = -mean;
    }
    Ok(model)
}

fn gauge_samples(domain: &CircularDomain, index: usize) -> Result<Vec<Complex>> {
    let c = domain.cylinder(index)?;
    Ok((0..GAUGE_SAMPLES)
        .map(|s| c.boundary_point(2.0 * PI * s as f64 / GAUGE_SAMPLES as f64))
        .collect())
}

/// Evaluates the stream function of `spec` at `points` by walking the image
/// trees depth first, without materialising the sources. Memory stays
/// bounded by the tree depth, so deep truncations that exceed the source
/// budget can still be evaluated. The per-level point budget of the image
/// trees still applies.
pub fn eval_stream_streaming(
    spec: &FlowSpec,
    truncation: Truncation,
    points: &[Complex],
) -> Result<Vec<f64>> {
    spec.validate()?;
    let level = spec.resolve_level(truncation)?;
    let domain = &spec.domain;
    let k = domain.len();
    images::check_budget(k, level + 1, images::DEFAULT_POINT_BUDGET)?;

    let mut targets: Vec<Complex> = points.to_vec();
    let gauge = match spec.gauge {
        Gauge::ZeroOnCylinder(i) => Some(gauge_samples(domain, i)?),
        Gauge::Raw => None,
    };
    if let Some(g) = &gauge {
        targets.extend_from_slice(g);
    }

    // Work units: each generator's seed term plus one subtree per first-level
    // child. Partial sums are reduced in unit order for determinism.
    struct Unit {
        gamma: f64,
        root: SpherePoint,
        last: Option<usize>,
        root_level: usize,
        include_root: bool,
    }
    let mut units = Vec::new();
    for g in spec.generators() {
        let seed = g.seed(domain)?;
        domain.separation_report(seed)?;
        let gamma = g.circulation();
        if g.emits_seed() {
            units.push(Unit {
                gamma,
                root: seed,
                last: None,
                root_level: 0,
                include_root: true,
            });
        }
        for j in 0..k {
            units.push(Unit {
                gamma,
                root: domain.cylinders()[j].invert(seed),
                last: Some(j),
                root_level: 1,
                include_root: true,
            });
        }
    }

    let partials: Vec<Vec<f64>> = units
        .par_iter()
        .map(|u| {
            let mut acc = vec![0.0; targets.len()];
            let mut add = |m: usize, p: Complex| {
                let s = u.gamma * if m == 0 { 1.0 } else { level_weight(m, level, k) };
                for (a, &z) in acc.iter_mut().zip(&targets) {
                    *a += s * (z - p).norm_sqr().ln();
                }
            };
            if u.include_root && (u.root_level == 0 || u.root_level <= level + 1) {
                if let SpherePoint::Finite(p) = u.root {
                    add(u.root_level, p);
                }
            }
            if u.root_level >= 1 {
                for_each_descendant(domain, u.root, u.last, u.root_level, level + 1, &mut add);
            }
            acc
        })
        .collect();

    let mut totals = vec![0.0; targets.len()];
    for p in &partials {
        for (t, v) in totals.iter_mut().zip(p) {
            *t += v;
        }
    }
    let mut values: Vec<f64> = totals.into_iter().map(|a| -a / (4.0 * PI)).collect();
    if let Some(g) = gauge {
        let tail = values.split_off(points.len());
        let offset = -tail.iter().sum::<f64>() / g.len() as f64;
        for v in &mut values {
            *v += offset;
        }
    }
    Ok(values)
}

/// `q^(N1+1) D / (2 pi R (1 - q))`: bound on `|psi*_N1 - psi*_N2|`, `N2 > N1`,
/// for a unit-circulation generator at points with boundary distance `R`.
pub fn error_bound(report: &SeparationReport, n1: usize, min_distance: f64) -> Result<f64> {
    let q = report.contraction_factor;
    if !(q < 1.0) {
        return Err(Error::NonconvergentConfiguration { q });
    }
    if !(min_distance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "boundary distance must be positive, got {min_distance}"
        )));
    }
    if q == 0.0 || report.seed_displacement == 0.0 {
        return Ok(0.0);
    }
    let exp = i32::try_from(n1 + 1).unwrap_or(i32::MAX);
    Ok(q.powi(exp) * report.seed_displacement / (2.0 * PI * min_distance * (1.0 - q)))
}

/// Smallest `N >= 1` with `error_bound(report, N, min_distance) <= tol`.
pub fn levels_for_tolerance(report: &SeparationReport, tol: f64, min_distance: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut n = 1;
    while error_bound(report, n, min_distance)? > tol {
        n += 1;
    }
    Ok(n)
}
