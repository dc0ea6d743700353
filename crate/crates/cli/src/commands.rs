//! Command implementations. Each returns its primary output as a string;
//! the caller decides where it goes.

use std::fmt::Write;

use serde::Serialize;
use vortex_images::fixtures::{five_cylinder_fixture, two_cylinder_fixture};
use vortex_images::{
    advect, assemble_flow, circulation_at_infinity, cylinder_circulations, error_bound,
    eval_stream_streaming, limit_set_points, predicted_ledger, sample_grid, velocity,
    BoundingBox, CircularDomain, Complex, Error, FlowSpec, Generator, GridKind, GridValues, Halt,
    SeparationReport, Truncation,
};

use crate::config::RunConfig;
use crate::error::CliError;

/// Truncation level used when neither a level nor a tolerance is given.
pub const DEFAULT_LEVEL: usize = 8;
pub const DEFAULT_RESOLUTION: [usize; 2] = [100, 100];
pub const DEFAULT_NQ: usize = 512;
pub const DEFAULT_FAR_RADIUS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Separation parameters and recommended truncation.
    Check,
    /// Stream function (and velocity) at points.
    Eval,
    /// Stream function or velocity on a grid, as CSV.
    Grid,
    /// Quadrature circulations against the predicted ledger.
    Circulation,
    /// Image point cloud, as CSV.
    Limitset,
    /// Vortex trajectories, as CSV.
    Advect,
    /// Reproduce the embedded reference tables.
    Validate,
}

/// Per-run overrides. Each takes precedence over the matching
/// configuration entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub level: Option<usize>,
    pub tol: Option<f64>,
    pub min_distance: Option<f64>,
    pub points: Option<Vec<[f64; 2]>>,
    pub bbox: Option<[f64; 4]>,
    pub res: Option<[usize; 2]>,
    pub nq: Option<usize>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub strict: bool,
    pub velocity: bool,
}

/// Result of a command: its primary output, exit code and any messages
/// for the error stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn ok(output: String, diagnostics: Vec<String>) -> Self {
        Self {
            output,
            exit_code: 0,
            diagnostics,
        }
    }
}

pub fn run_command(cmd: Command, config: Option<&RunConfig>, opts: &Options) -> Result<Outcome, CliError> {
    if cmd == Command::Validate {
        return Ok(validate());
    }
    let config = config.ok_or_else(|| CliError::Usage(format!("{cmd:?} needs --config").to_lowercase()))?;
    let run = Run { config, opts };
    match cmd {
        Command::Check => run.check(),
        Command::Eval => run.eval(),
        Command::Grid => run.grid(),
        Command::Circulation => run.circulation(),
        Command::Limitset => run.limitset(),
        Command::Advect => run.advect(),
        Command::Validate => unreachable!(),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Default boundary distance for certificates: the narrowest gap, else the
/// smallest radius.
fn default_min_distance(domain: &CircularDomain) -> f64 {
    domain.min_gap().or(domain.min_radius()).unwrap_or(1.0)
}

/// `sum |Gamma_g| error_bound(report_g, level, R)`, or `None` when some
/// generator is not well separated.
fn certificate(spec: &FlowSpec, level: usize, min_distance: f64) -> Option<f64> {
    let reports = spec.reports().ok()?;
    spec.generators()
        .iter()
        .zip(&reports)
        .map(|(g, r)| error_bound(r, level, min_distance).ok().map(|b| g.circulation().abs() * b))
        .sum()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReportJson {
    p: f64,
    per_cylinder: Vec<f64>,
    q: f64,
    seed_displacement: f64,
    converges: bool,
}

impl From<&SeparationReport> for ReportJson {
    fn from(r: &SeparationReport) -> Self {
        Self {
            p: r.p,
            per_cylinder: r.per_cylinder.clone(),
            q: r.contraction_factor,
            seed_displacement: r.seed_displacement,
            converges: r.converges,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GeneratorJson {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cylinder: Option<usize>,
    circulation: f64,
    report: ReportJson,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GapJson {
    first: usize,
    second: usize,
    width: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LedgerJson {
    per_cylinder: Vec<f64>,
    at_infinity: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckJson {
    cylinders: usize,
    gaps: Vec<GapJson>,
    p: f64,
    per_cylinder: Vec<f64>,
    q: f64,
    seed_displacement: f64,
    converges: bool,
    generators: Vec<GeneratorJson>,
    center_strengths: Vec<f64>,
    predicted_circulations: LedgerJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recommended_level: Option<usize>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EvalPointJson {
    z: [f64; 2],
    masked: bool,
    psi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<Option<f64>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EvalJson {
    level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified_bound: Option<f64>,
    min_distance: f64,
    points: Vec<EvalPointJson>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CirculationEntryJson {
    index: usize,
    measured: f64,
    predicted: f64,
    difference: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct InfinityJson {
    radius: f64,
    measured: f64,
    predicted: f64,
    difference: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CirculationJson {
    level: usize,
    nq: usize,
    cylinders: Vec<CirculationEntryJson>,
    infinity: InfinityJson,
}

struct Run<'a> {
    config: &'a RunConfig,
    opts: &'a Options,
}

impl Run<'_> {
    fn numerics(&self) -> &crate::config::Numerics {
        &self.config.numerics
    }

    fn tolerance(&self) -> Option<f64> {
        self.opts.tol.or(self.numerics().tolerance)
    }

    fn truncation(&self, default_min_distance: f64) -> Result<Truncation, CliError> {
        let min_distance = self.opts.min_distance.or(self.numerics().min_distance).unwrap_or(default_min_distance);
        // a flag overrides the configuration even across the two forms
        Ok(match (self.opts.level, self.opts.tol, self.numerics().level, self.numerics().tolerance) {
            (Some(n), ..) => Truncation::Level(n),
            (None, Some(tol), ..) => Truncation::Tolerance { tol, min_distance },
            (None, None, Some(n), _) => Truncation::Level(n),
            (None, None, None, Some(tol)) => Truncation::Tolerance { tol, min_distance },
            (None, None, None, None) => Truncation::Level(DEFAULT_LEVEL),
        })
    }

    /// Warns about, or with `--strict` refuses, configurations without a
    /// convergence guarantee.
    fn gate(&self, spec: &FlowSpec, diagnostics: &mut Vec<String>) -> Result<(), CliError> {
        let reports = spec.reports()?;
        if let Some(w) = SeparationReport::worst(&reports) {
            if !w.converges {
                if self.opts.strict {
                    return Err(CliError::Nonconvergent { q: w.contraction_factor });
                }
                diagnostics.push(format!(
                    "warning: configuration is not well separated (q = {}); results carry no error certificate",
                    w.contraction_factor
                ));
            }
        }
        Ok(())
    }

    fn check(&self) -> Result<Outcome, CliError> {
        let spec = self.config.flow_spec()?;
        let mut diagnostics = Vec::new();
        let generators = spec.generators();
        let reports = spec.reports()?;
        let worst = SeparationReport::worst(&reports).unwrap_or_else(|| {
            spec.domain
                .separation_report(vortex_images::SpherePoint::Infinity)
                .expect("strict domain")
        });
        let tolerance = self.tolerance();
        let min_distance = tolerance.map(|_| {
            self.opts.min_distance.or(self.numerics().min_distance).unwrap_or(default_min_distance(&spec.domain))
        });
        let recommended_level = match (tolerance, min_distance) {
            (Some(tol), Some(md)) => match spec.resolve_level(Truncation::Tolerance { tol, min_distance: md }) {
                Ok(n) => Some(n),
                Err(e) => {
                    diagnostics.push(format!("no recommended level: {e}"));
                    None
                }
            },
            _ => None,
        };
        let ledger = predicted_ledger(&spec);
        let report = CheckJson {
            cylinders: spec.domain.len(),
            gaps: spec
                .domain
                .gaps()
                .iter()
                .map(|g| GapJson { first: g.first, second: g.second, width: g.width })
                .collect(),
            p: worst.p,
            per_cylinder: worst.per_cylinder.clone(),
            q: worst.contraction_factor,
            seed_displacement: worst.seed_displacement,
            converges: worst.converges,
            generators: generators
                .iter()
                .zip(&reports)
                .map(|(g, r)| {
                    let (kind, position, cylinder) = match *g {
                        Generator::Vortex { position, .. } => ("vortex", Some([position.re, position.im]), None),
                        Generator::Infinity { .. } => ("infinity", None, None),
                        Generator::Center { index, .. } => ("center", None, Some(index)),
                    };
                    GeneratorJson { kind, position, cylinder, circulation: g.circulation(), report: r.into() }
                })
                .collect(),
            center_strengths: spec.center_strengths(),
            predicted_circulations: LedgerJson {
                per_cylinder: ledger.per_cylinder,
                at_infinity: ledger.at_infinity,
            },
            tolerance,
            min_distance,
            recommended_level,
        };
        let mut outcome = Outcome::ok(json(&report), diagnostics);
        if !worst.converges {
            if self.opts.strict {
                outcome.exit_code = 1;
                outcome.diagnostics.push(CliError::Nonconvergent { q: worst.contraction_factor }.to_string());
            } else {
                outcome.diagnostics.push(format!(
                    "warning: configuration is not well separated (q = {})",
                    worst.contraction_factor
                ));
            }
        }
        Ok(outcome)
    }

    fn eval(&self) -> Result<Outcome, CliError> {
        let spec = self.config.flow_spec()?;
        let mut diagnostics = Vec::new();
        self.gate(&spec, &mut diagnostics)?;
        let points = self
            .opts
            .points
            .clone()
            .or_else(|| self.numerics().points.clone())
            .ok_or_else(|| CliError::Usage("eval needs --points or numerics.points".into()))?;
        let z: Vec<Complex> = points.iter().map(|p| Complex::new(p[0], p[1])).collect();
        let nearest = z
            .iter()
            .map(|&p| spec.domain.min_boundary_distance(p))
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min);
        let default_md = if nearest.is_finite() { nearest } else { default_min_distance(&spec.domain) };
        let truncation = self.truncation(default_md)?;
        let min_distance = match truncation {
            Truncation::Tolerance { min_distance, .. } => min_distance,
            Truncation::Level(_) => self.opts.min_distance.or(self.numerics().min_distance).unwrap_or(default_md),
        };
        let level = spec.resolve_level(truncation)?;
        let masked: Vec<bool> = z.iter().map(|&p| spec.domain.is_masked(p)).collect();

        let (psi, vel): (Vec<f64>, Option<Vec<Option<(f64, f64)>>>) =
            match assemble_flow(&spec, Truncation::Level(level)) {
                Ok(model) => (
                    z.iter().map(|&p| model.eval(p)).collect(),
                    self.opts.velocity.then(|| z.iter().map(|&p| velocity(&model, p).ok()).collect()),
                ),
                Err(Error::BudgetExceeded { .. }) if !self.opts.velocity => {
                    (eval_stream_streaming(&spec, Truncation::Level(level), &z)?, None)
                }
                Err(e) => return Err(e.into()),
            };
        let report = EvalJson {
            level,
            certified_bound: certificate(&spec, level, min_distance),
            min_distance,
            points: z
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let (psi, uv) = if masked[i] {
                        (None, vel.as_ref().map(|_| None))
                    } else {
                        (finite(psi[i]), vel.as_ref().map(|v| v[i]))
                    };
                    EvalPointJson {
                        z: [p.re, p.im],
                        masked: masked[i],
                        psi,
                        u: uv.map(|o| o.map(|w| w.0)),
                        v: uv.map(|o| o.map(|w| w.1)),
                    }
                })
                .collect(),
        };
        Ok(Outcome::ok(json(&report), diagnostics))
    }

    fn grid(&self) -> Result<Outcome, CliError> {
        let spec = self.config.flow_spec()?;
        let mut diagnostics = Vec::new();
        self.gate(&spec, &mut diagnostics)?;
        let b = self
            .opts
            .bbox
            .or(self.numerics().bbox)
            .ok_or_else(|| CliError::Usage("grid needs --bbox or numerics.bbox".into()))?;
        let [nx, ny] = self.opts.res.or(self.numerics().resolution).unwrap_or(DEFAULT_RESOLUTION);
        let model = assemble_flow(&spec, self.truncation(default_min_distance(&spec.domain))?)?;
        let bbox = BoundingBox { xmin: b[0], xmax: b[1], ymin: b[2], ymax: b[3] };
        let kind = if self.opts.velocity { GridKind::Velocity } else { GridKind::Stream };
        let grid = sample_grid(&model, bbox, nx, ny, kind)?;
        let mut out = String::new();
        match &grid.values {
            GridValues::Stream(v) => {
                out.push_str("x,y,psi,mask\n");
                for j in 0..ny {
                    for i in 0..nx {
                        let z = grid.point(i, j);
                        let k = j * nx + i;
                        writeln!(out, "{:.16e},{:.16e},{:.16e},{}", z.re, z.im, v[k], u8::from(grid.mask[k])).unwrap();
                    }
                }
            }
            GridValues::Velocity(v) => {
                out.push_str("x,y,u,v,mask\n");
                for j in 0..ny {
                    for i in 0..nx {
                        let z = grid.point(i, j);
                        let k = j * nx + i;
                        writeln!(
                            out,
                            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
                            z.re,
                            z.im,
                            v[k].0,
                            v[k].1,
                            u8::from(grid.mask[k])
                        )
                        .unwrap();
                    }
                }
            }
        }
        Ok(Outcome::ok(out, diagnostics))
    }

    fn circulation(&self) -> Result<Outcome, CliError> {
        let spec = self.config.flow_spec()?;
        let mut diagnostics = Vec::new();
        self.gate(&spec, &mut diagnostics)?;
        let nq = self.opts.nq.or(self.numerics().nq).unwrap_or(DEFAULT_NQ);
        let model = assemble_flow(&spec, self.truncation(default_min_distance(&spec.domain))?)?;
        let extent = spec
            .domain
            .cylinders()
            .iter()
            .map(|c| c.center.norm() + c.radius)
            .chain(spec.vortices.iter().map(|v| v.position.norm()))
            .fold(0.0, f64::max);
        let radius = self.numerics().far_radius.unwrap_or(DEFAULT_FAR_RADIUS.max(2.0 * extent));
        if radius <= extent {
            return Err(CliError::Schema {
                key: "numerics.farRadius".into(),
                message: format!("far circle must enclose everything (extent {extent})"),
            });
        }
        let measured = cylinder_circulations(&model, nq)?;
        let far = circulation_at_infinity(&model, radius, nq)?;
        let predicted = predicted_ledger(&spec);
        let report = CirculationJson {
            level: model.level(),
            nq,
            cylinders: measured
                .iter()
                .zip(&predicted.per_cylinder)
                .enumerate()
                .map(|(index, (&m, &p))| CirculationEntryJson { index, measured: m, predicted: p, difference: m - p })
                .collect(),
            infinity: InfinityJson {
                radius,
                measured: far,
                predicted: predicted.at_infinity,
                difference: far - predicted.at_infinity,
            },
        };
        Ok(Outcome::ok(json(&report), diagnostics))
    }

    fn limitset(&self) -> Result<Outcome, CliError> {
        let domain = self.config.domain()?;
        let level = self.opts.level.or(self.numerics().level).unwrap_or(DEFAULT_LEVEL);
        let points = limit_set_points(&domain, self.config.limit_seed(), level)?;
        let mut out = String::from("x,y,level\n");
        for (z, m) in points {
            writeln!(out, "{:.16e},{:.16e},{m}", z.re, z.im).unwrap();
        }
        Ok(Outcome::ok(out, Vec::new()))
    }

    fn advect(&self) -> Result<Outcome, CliError> {
        let spec = self.config.flow_spec()?;
        let mut diagnostics = Vec::new();
        self.gate(&spec, &mut diagnostics)?;
        let dt = self
            .opts
            .dt
            .or(self.numerics().dt)
            .ok_or_else(|| CliError::Usage("advect needs --dt or numerics.dt".into()))?;
        let steps = self
            .opts
            .steps
            .or(self.numerics().steps)
            .ok_or_else(|| CliError::Usage("advect needs --steps or numerics.steps".into()))?;
        let t = advect(&spec, dt, steps, self.truncation(default_min_distance(&spec.domain))?)?;
        let mut out = String::from("t,vortex,x,y\n");
        for (s, time) in t.times.iter().enumerate() {
            for (v, path) in t.positions.iter().enumerate() {
                writeln!(out, "{:.16e},{v},{:.16e},{:.16e}", time, path[s].re, path[s].im).unwrap();
            }
        }
        let mut outcome = Outcome::ok(out, diagnostics);
        if let Some(Halt::BoundaryCollision { vortex, cylinder, time }) = t.halt {
            outcome.exit_code = 1;
            outcome
                .diagnostics
                .push(format!("vortex {vortex} reached cylinder {cylinder} at t = {time}; integration stopped"));
        }
        Ok(outcome)
    }
}

/// Tolerances of the embedded fixtures.
pub const TWO_CYLINDER_THETA_TOL: f64 = 5e-6;
pub const TWO_CYLINDER_REFERENCE_TOL: f64 = 1e-5;
pub const FIVE_CYLINDER_TOL: f64 = 1e-4;
pub const FIVE_CYLINDER_LEVEL_TOL: f64 = 1e-5;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn validate() -> Outcome {
    let mut out = String::new();
    let mut diagnostics = Vec::new();
    let mut all_ok = true;

    let fx = two_cylinder_fixture();
    let rmin = fx
        .points
        .iter()
        .map(|p| fx.spec.domain.min_boundary_distance(p.z))
        .fold(f64::INFINITY, f64::min);
    let truncation = Truncation::Tolerance { tol: 1e-8, min_distance: rmin };
    match fx.spec.resolve_level(truncation).and_then(|n| Ok((n, assemble_flow(&fx.spec, truncation)?))) {
        Ok((level, model)) => {
            writeln!(out, "two cylinders, zero on cylinder 0, N = {level} (tolerance 1e-8)").unwrap();
            for p in &fx.points {
                let psi = model.eval(p.z);
                let dt = psi - p.theta_method;
                let dp = psi - p.image_method;
                let ok = dt.abs() <= TWO_CYLINDER_THETA_TOL && dp.abs() <= TWO_CYLINDER_REFERENCE_TOL;
                all_ok &= ok;
                writeln!(
                    out,
                    "  z = {:>4} {:+}i  psi = {psi:+.15}  vs theta {dt:+.3e}  vs reference {dp:+.3e}  {}",
                    p.z.re,
                    p.z.im,
                    verdict(ok)
                )
                .unwrap();
            }
        }
        Err(e) => {
            all_ok = false;
            diagnostics.push(format!("two-cylinder fixture failed: {e}"));
        }
    }

    let fx = five_cylinder_fixture();
    writeln!(out, "five cylinders, zero on cylinder 0, gammaInfinity = 0 (assumed)").unwrap();
    let z: Vec<Complex> = fx.points.iter().map(|p| p.z).collect();
    let levels = eval_stream_streaming(&fx.spec, Truncation::Level(5), &z)
        .and_then(|a| Ok((a, eval_stream_streaming(&fx.spec, Truncation::Level(10), &z)?)));
    match levels {
        Ok((psi5, psi10)) => {
            for ((p, a), b) in fx.points.iter().zip(&psi5).zip(&psi10) {
                let (d5, d10, internal) = (a - p.level5, b - p.level10, a - b);
                let ok = d5.abs() <= FIVE_CYLINDER_TOL
                    && d10.abs() <= FIVE_CYLINDER_TOL
                    && internal.abs() <= FIVE_CYLINDER_LEVEL_TOL;
                all_ok &= ok;
                writeln!(
                    out,
                    "  z = {:>4} {:+}i  N=5 {a:+.15} ({d5:+.3e})  N=10 {b:+.15} ({d10:+.3e})  |N5-N10| {:.3e}  {}",
                    p.z.re,
                    p.z.im,
                    internal.abs(),
                    verdict(ok)
                )
                .unwrap();
            }
        }
        Err(e) => {
            all_ok = false;
            diagnostics.push(format!("five-cylinder fixture failed: {e}"));
        }
    }
    writeln!(out, "{}", if all_ok { "all fixtures within tolerance" } else { "some fixtures out of tolerance" }).unwrap();
    Outcome {
        output: out,
        exit_code: if all_ok { 0 } else { 1 },
        diagnostics,
    }
}
