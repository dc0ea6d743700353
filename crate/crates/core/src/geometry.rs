//! Circular domains, inversion through their boundary circles, and the
//! separation parameters that control convergence of the image sums.

use crate::error::{Error, Result};
use crate::Complex;

/// A solid circular cylinder `|z - center| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub center: Complex,
    pub radius: f64,
}

impl Cylinder {
    pub fn new(center: Complex, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Reflection through the boundary circle. Total on the Riemann sphere:
    /// the center and infinity are exchanged.
    pub fn invert(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => SpherePoint::Finite(self.center),
            SpherePoint::Finite(z) => {
                let d = z - self.center;
                if d.re == 0.0 && d.im == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.invert_finite(z))
                }
            }
        }
    }

    /// `c + R^2 / conj(z - c)` for `z != c`.
    #[inline]
    pub fn invert_finite(&self, z: Complex) -> Complex {
        let d = z - self.center;
        // R^2 / conj(d) = R^2 d / |d|^2
        self.center + d * (self.radius * self.radius / d.norm_sqr())
    }

    /// Signed distance from `z` to the boundary circle, negative inside.
    pub fn boundary_distance(&self, z: Complex) -> f64 {
        (z - self.center).norm() - self.radius
    }

    pub fn contains_strictly(&self, z: Complex) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Point on the boundary circle at polar angle `theta`.
    pub fn boundary_point(&self, theta: f64) -> Complex {
        self.center + Complex::from_polar(self.radius, theta)
    }
}

/// Point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

impl From<Complex> for SpherePoint {
    fn from(z: Complex) -> Self {
        SpherePoint::Finite(z)
    }
}

/// Free function form of [`Cylinder::invert`].
pub fn invert(cylinder: &Cylinder, z: SpherePoint) -> SpherePoint {
    cylinder.invert(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Pairwise disjoint, non-touching circles. Required for flow computations.
    #[default]
    Strict,
    /// Touching circles allowed. Limit-set exploration only.
    Lax,
}

/// Gap between two cylinders: center distance minus the radius sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub first: usize,
    pub second: usize,
    pub width: f64,
}

/// Exterior of a finite set of disjoint disks.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularDomain {
    cylinders: Vec<Cylinder>,
    strictness: Strictness,
    gaps: Vec<Gap>,
}

impl CircularDomain {
    /// Validates radii and pairwise disjointness under the given mode.
    pub fn new(cylinders: Vec<Cylinder>, strictness: Strictness) -> Result<Self> {
        for (index, c) in cylinders.iter().enumerate() {
            if !(c.radius > 0.0) || !c.radius.is_finite() {
                return Err(Error::NonpositiveRadius {
                    index,
                    radius: c.radius,
                });
            }
            if !c.center.re.is_finite() || !c.center.im.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "cylinder {index} has a non-finite center"
                )));
            }
        }
        let mut gaps = Vec::new();
        for i in 0..cylinders.len() {
            for j in i + 1..cylinders.len() {
                let distance = (cylinders[i].center - cylinders[j].center).norm();
                let radius_sum = cylinders[i].radius + cylinders[j].radius;
                let ok = match strictness {
                    Strictness::Strict => distance > radius_sum,
                    Strictness::Lax => distance >= radius_sum,
                };
                if !ok {
                    return Err(Error::Overlap {
                        first: i,
                        second: j,
                        distance,
                        radius_sum,
                    });
                }
                gaps.push(Gap {
                    first: i,
                    second: j,
                    width: distance - radius_sum,
                });
            }
        }
        Ok(Self {
            cylinders,
            strictness,
            gaps,
        })
    }

    pub fn strict(cylinders: Vec<Cylinder>) -> Result<Self> {
        Self::new(cylinders, Strictness::Strict)
    }

    pub fn empty() -> Self {
        Self {
            cylinders: Vec::new(),
            strictness: Strictness::Strict,
            gaps: Vec::new(),
        }
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn cylinder(&self, index: usize) -> Result<&Cylinder> {
        self.cylinders.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.cylinders.len(),
        })
    }

    /// Number of cylinders, `K`.
    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn strictness(&self) -> Strictness {
        self.strictness
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.gaps.iter().map(|g| g.width).reduce(f64::min)
    }

    pub fn min_radius(&self) -> Option<f64> {
        self.cylinders.iter().map(|c| c.radius).reduce(f64::min)
    }

    pub(crate) fn require_strict(&self) -> Result<()> {
        match self.strictness {
            Strictness::Strict => Ok(()),
            Strictness::Lax => Err(Error::LaxDomain),
        }
    }

    /// `true` when `z` lies strictly inside some cylinder.
    pub fn is_masked(&self, z: Complex) -> bool {
        self.cylinders.iter().any(|c| c.contains_strictly(z))
    }

    /// Index of the cylinder whose center is exactly `z`, if any.
    pub fn center_index(&self, z: Complex) -> Option<usize> {
        self.cylinders.iter().position(|c| c.center == z)
    }

    /// Checks a seed is usable as an image-tree root: infinity, a center, or
    /// strictly exterior to every cylinder.
    pub fn check_seed(&self, seed: SpherePoint) -> Result<()> {
        let SpherePoint::Finite(z) = seed else {
            return Ok(());
        };
        if self.center_index(z).is_some() {
            return Ok(());
        }
        self.check_exterior(z)
    }

    /// Checks `z` is strictly exterior to every cylinder.
    pub fn check_exterior(&self, z: Complex) -> Result<()> {
        match self
            .cylinders
            .iter()
            .position(|c| c.boundary_distance(z) <= 0.0)
        {
            Some(index) => Err(Error::SeedInsideCylinder { index }),
            None => Ok(()),
        }
    }

    /// Shortest distance from `z` to the union of the boundary circles,
    /// clamped at zero inside a cylinder. `+inf` for the free plane.
    pub fn min_boundary_distance(&self, z: Complex) -> f64 {
        self.cylinders
            .iter()
            .map(|c| c.boundary_distance(z).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Separation parameters of the image construction rooted at `seed`.
    pub fn separation_report(&self, seed: SpherePoint) -> Result<SeparationReport> {
        self.require_strict()?;
        self.check_seed(seed)?;
        let k = self.len();
        let seed_center = seed.finite().and_then(|z| self.center_index(z));

        let per_cylinder: Vec<f64> = (0..k)
            .map(|j| {
                let cj = &self.cylinders[j];
                let seed_term = match seed {
                    SpherePoint::Infinity => 0.0,
                    SpherePoint::Finite(_) if seed_center == Some(j) => 0.0,
                    SpherePoint::Finite(z) => cj.radius / (z - cj.center).norm(),
                };
                (0..k)
                    .filter(|&l| l != j)
                    .map(|l| {
                        let cl = &self.cylinders[l];
                        cj.radius / ((cj.center - cl.center).norm() - cl.radius)
                    })
                    .fold(seed_term, f64::max)
            })
            .collect();
        let p = per_cylinder.iter().copied().fold(0.0, f64::max);

        let seed_displacement = match seed {
            SpherePoint::Infinity => {
                let spread = self
                    .cylinders
                    .iter()
                    .flat_map(|a| self.cylinders.iter().map(move |b| (a.center - b.center).norm()))
                    .fold(0.0, f64::max);
                let rmax = self.cylinders.iter().map(|c| c.radius).fold(0.0, f64::max);
                if k == 0 {
                    0.0
                } else {
                    spread + rmax
                }
            }
            SpherePoint::Finite(z) => self
                .cylinders
                .iter()
                .enumerate()
                .filter(|&(j, _)| seed_center != Some(j))
                .map(|(_, c)| (c.invert_finite(z) - z).norm())
                .fold(0.0, f64::max),
        };

        let contraction_factor = if k <= 1 {
            0.0
        } else {
            (k as f64 - 1.0) * p * p
        };
        Ok(SeparationReport {
            per_cylinder,
            p,
            contraction_factor,
            seed_displacement,
            converges: contraction_factor < 1.0,
        })
    }
}

/// Well-separatedness of a domain as seen from one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    /// `P_j` per cylinder.
    pub per_cylinder: Vec<f64>,
    /// `P = max_j P_j`.
    pub p: f64,
    /// `q = (K - 1) P^2`.
    pub contraction_factor: f64,
    /// `D`, the largest first-level displacement of the seed.
    pub seed_displacement: f64,
    /// `q < 1`.
    pub converges: bool,
}

impl SeparationReport {
    /// Elementwise worst case of several reports over the same domain.
    pub fn worst<'a>(reports: impl IntoIterator<Item = &'a SeparationReport>) -> Option<Self> {
        let mut it = reports.into_iter();
        let mut acc = it.next()?.clone();
        for r in it {
            for (a, b) in acc.per_cylinder.iter_mut().zip(&r.per_cylinder) {
                *a = a.max(*b);
            }
            acc.p = acc.p.max(r.p);
            acc.contraction_factor = acc.contraction_factor.max(r.contraction_factor);
            acc.seed_displacement = acc.seed_displacement.max(r.seed_displacement);
        }
        acc.converges = acc.contraction_factor < 1.0;
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn two_cylinders() -> CircularDomain {
        CircularDomain::strict(vec![
            Cylinder::new(c(0.0, 0.0), 1.0),
            Cylinder::new(c(3.0, 0.0), 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn validation_modes() {
        let d = two_cylinders();
        assert_eq!(d.gaps().len(), 1);
        assert!((d.gaps()[0].width - 1.5).abs() < 1e-15);

        let overlap = CircularDomain::strict(vec![
            Cylinder::new(c(0.0, 0.0), 1.0),
            Cylinder::new(c(1.4, 0.0), 0.5),
        ]);
        assert!(matches!(overlap, Err(Error::Overlap { .. })));

        let touching = vec![
            Cylinder::new(c(0.0, 0.0), 1.0),
            Cylinder::new(c(1.5, 0.0), 0.5),
        ];
        assert!(CircularDomain::strict(touching.clone()).is_err());
        assert!(CircularDomain::new(touching, Strictness::Lax).is_ok());

        let bad = CircularDomain::strict(vec![Cylinder::new(c(0.0, 0.0), 0.0)]);
        assert!(matches!(bad, Err(Error::NonpositiveRadius { index: 0, .. })));
    }

    #[test]
    fn inversion_examples() {
        let unit = Cylinder::new(c(0.0, 0.0), 1.0);
        assert_eq!(unit.invert(c(2.0, 0.0).into()), SpherePoint::Finite(c(0.5, 0.0)));
        assert_eq!(unit.invert(c(0.0, 0.0).into()), SpherePoint::Infinity);
        assert_eq!(unit.invert(SpherePoint::Infinity), SpherePoint::Finite(c(0.0, 0.0)));

        // 3 + 0.25 (-3 + 2i) / 13
        let small = Cylinder::new(c(3.0, 0.0), 0.5);
        let w = small.invert(c(0.0, 2.0).into()).finite().unwrap();
        assert!((w - c(3.0 - 0.75 / 13.0, 0.5 / 13.0)).norm() < 1e-15);
        assert!((w - c(2.942308, 0.038462)).norm() < 1e-6);
    }

    #[test]
    fn separation_two_cylinders() {
        let r = two_cylinders().separation_report(c(0.0, 2.0).into()).unwrap();
        assert!((r.per_cylinder[0] - 0.5).abs() < 1e-15);
        assert!((r.per_cylinder[1] - 0.25).abs() < 1e-15);
        assert!((r.p - 0.5).abs() < 1e-15);
        assert!((r.contraction_factor - 0.25).abs() < 1e-15);
        assert!(r.converges);
        // |T_2(2i) - 2i| dominates |T_1(2i) - 2i| = 1.5
        let d2 = (c(3.0 - 0.75 / 13.0, 0.5 / 13.0) - c(0.0, 2.0)).norm();
        assert!((r.seed_displacement - d2).abs() < 1e-14);
        assert!((r.seed_displacement - 3.5355).abs() < 1e-3);
    }

    #[test]
    fn separation_five_in_a_row() {
        let cyl = [-4.0, -2.0, 0.0, 2.0, 4.0]
            .iter()
            .map(|&x| Cylinder::new(c(x, 0.0), 0.5))
            .collect();
        let r = CircularDomain::strict(cyl)
            .unwrap()
            .separation_report(c(0.0, 2.0).into())
            .unwrap();
        assert!((r.p - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.contraction_factor - 4.0 / 9.0).abs() < 1e-15);
        assert!(r.converges);
    }

    #[test]
    fn separation_special_seeds() {
        let d = two_cylinders();
        let single = CircularDomain::strict(vec![Cylinder::new(c(1.0, 1.0), 2.0)]).unwrap();
        let r = single.separation_report(c(10.0, 0.0).into()).unwrap();
        assert_eq!(r.contraction_factor, 0.0);
        assert!(r.converges);

        let inf = d.separation_report(SpherePoint::Infinity).unwrap();
        assert!((inf.seed_displacement - 4.0).abs() < 1e-15);
        assert!((inf.per_cylinder[0] - 0.4).abs() < 1e-15);

        let center = d.separation_report(c(0.0, 0.0).into()).unwrap();
        // seed term for cylinder 0 omitted; cylinder 1 sees R_2/|c_1 - c_2|
        assert!((center.per_cylinder[0] - 0.4).abs() < 1e-15);
        assert!((center.per_cylinder[1] - 0.25).abs() < 1e-15);
        assert!((center.seed_displacement - (3.0 - 0.25 / 3.0)).abs() < 1e-14);

        assert!(matches!(
            d.separation_report(c(0.5, 0.0).into()),
            Err(Error::SeedInsideCylinder { index: 0 })
        ));
        assert!(matches!(
            d.separation_report(c(1.0, 0.0).into()),
            Err(Error::SeedInsideCylinder { index: 0 })
        ));
    }

    #[test]
    fn boundary_distance() {
        let d = two_cylinders();
        let r = d.min_boundary_distance(c(0.5, -1.5));
        assert!((r - (2.5f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((r - 0.5811).abs() < 1e-4);
        assert_eq!(d.min_boundary_distance(c(0.0, 1.0)), 0.0);
        assert_eq!(d.min_boundary_distance(c(0.1, 0.1)), 0.0);
        assert_eq!(CircularDomain::empty().min_boundary_distance(c(1.0, 1.0)), f64::INFINITY);
    }

    #[test]
    fn lax_domain_rejects_flow_reports() {
        let d = CircularDomain::new(
            vec![Cylinder::new(c(0.0, 0.0), 1.0), Cylinder::new(c(2.0, 0.0), 1.0)],
            Strictness::Lax,
        )
        .unwrap();
        assert_eq!(d.separation_report(SpherePoint::Infinity), Err(Error::LaxDomain));
    }
}
