//! Symmetry points generated by repeated inversion through the boundary
//! circles, organised by level.
//!
//! A level-`M` point is `T_{i_1} ... T_{i_M}(seed)` with no two consecutive
//! indices equal, so there are `K (K-1)^(M-1)` of them. Cylinder indices are
//! zero-based throughout.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{CircularDomain, SpherePoint};
use crate::Complex;

/// Default cap on the size of the deepest tree level.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;

const PARALLEL_LEVEL_THRESHOLD: usize = 4096;

/// `K (K-1)^(N-1)`, the number of level-`N` points (`N >= 1`).
pub fn level_counts(k: usize, n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    if k == 0 {
        return 0;
    }
    let mut count = k as u128;
    for _ in 1..n {
        count = count.saturating_mul(k as u128 - 1);
        if count == 0 {
            break;
        }
    }
    count
}

pub(crate) fn check_budget(k: usize, max_level: usize, budget: u64) -> Result<()> {
    let required = level_counts(k, max_level.max(1));
    if required > budget as u128 {
        Err(Error::BudgetExceeded { required, budget })
    } else {
        Ok(())
    }
}

/// One node of the image tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePoint {
    pub position: SpherePoint,
    pub level: usize,
    /// Last inversion applied, `None` for the seed.
    pub last_index: Option<usize>,
    /// Index of the parent within the previous level.
    pub parent: Option<usize>,
}

impl ImagePoint {
    /// `(-1)^level`.
    pub fn parity(&self) -> f64 {
        if self.level % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Points at infinity generate children but carry no source.
    pub fn contributes(&self) -> bool {
        !self.position.is_infinity()
    }
}

/// Breadth-first, level-ordered image tree. Children are ordered by parent,
/// then by ascending cylinder index.
#[derive(Debug, Clone)]
pub struct ImageTree {
    seed: SpherePoint,
    levels: Vec<Vec<ImagePoint>>,
}

impl ImageTree {
    pub fn seed(&self) -> SpherePoint {
        self.seed
    }

    pub fn levels(&self) -> &[Vec<ImagePoint>] {
        &self.levels
    }

    pub fn level(&self, m: usize) -> &[ImagePoint] {
        self.levels.get(m).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Index word `(i_1, ..., i_M)` of a point, outermost inversion first.
    pub fn word(&self, level: usize, index: usize) -> Vec<usize> {
        let mut word = Vec::with_capacity(level);
        let (mut m, mut i) = (level, index);
        while m > 0 {
            let p = &self.levels[m][i];
            word.push(p.last_index.expect("non-seed point has an index"));
            i = p.parent.expect("non-seed point has a parent");
            m -= 1;
        }
        word
    }
}

/// Builds levels `0..=max_level` for a strict domain.
pub fn build_image_tree(
    domain: &CircularDomain,
    seed: SpherePoint,
    max_level: usize,
) -> Result<ImageTree> {
    build_image_tree_with_budget(domain, seed, max_level, DEFAULT_POINT_BUDGET)
}

pub fn build_image_tree_with_budget(
    domain: &CircularDomain,
    seed: SpherePoint,
    max_level: usize,
    budget: u64,
) -> Result<ImageTree> {
    domain.require_strict()?;
    domain.check_seed(seed)?;
    build_unchecked(domain, seed, max_level, budget)
}

fn build_unchecked(
    domain: &CircularDomain,
    seed: SpherePoint,
    max_level: usize,
    budget: u64,
) -> Result<ImageTree> {
    let k = domain.len();
    check_budget(k, max_level, budget)?;
    let cylinders = domain.cylinders();

    let mut levels = Vec::with_capacity(max_level + 1);
    levels.push(vec![ImagePoint {
        position: seed,
        level: 0,
        last_index: None,
        parent: None,
    }]);

    for m in 1..=max_level {
        let prev: &Vec<ImagePoint> = &levels[m - 1];
        let children = |(pi, p): (usize, &ImagePoint)| {
            let parent_pos = p.position;
            let last = p.last_index;
            (0..k).filter(move |&j| Some(j) != last).map(move |j| ImagePoint {
                position: cylinders[j].invert(parent_pos),
                level: m,
                last_index: Some(j),
                parent: Some(pi),
            })
        };
        let next: Vec<ImagePoint> = if prev.len() >= PARALLEL_LEVEL_THRESHOLD {
            prev.par_iter().enumerate().flat_map_iter(children).collect()
        } else {
            prev.iter().enumerate().flat_map(children).collect()
        };
        levels.push(next);
    }
    Ok(ImageTree { seed, levels })
}

/// Depth-first walk reporting every finite descendant of `root` (levels
/// `root_level + 1 ..= max_level`) exactly once.
pub fn for_each_descendant<F>(
    domain: &CircularDomain,
    root: SpherePoint,
    root_last: Option<usize>,
    root_level: usize,
    max_level: usize,
    mut visit: F,
) where
    F: FnMut(usize, Complex),
{
    let cylinders = domain.cylinders();
    let k = cylinders.len();
    let mut stack: Vec<(SpherePoint, Option<usize>, usize)> = Vec::with_capacity(64);
    stack.push((root, root_last, root_level));
    while let Some((pos, last, level)) = stack.pop() {
        if level > root_level {
            if let SpherePoint::Finite(z) = pos {
                visit(level, z);
            }
        }
        if level >= max_level {
            continue;
        }
        for j in (0..k).rev() {
            if Some(j) != last {
                stack.push((cylinders[j].invert(pos), Some(j), level + 1));
            }
        }
    }
}

/// Fixed points of `T_1 T_2` inside `L_1` and of `T_2 T_1` inside `L_2` for a
/// two-cylinder domain.
pub fn fixed_points_doubly_connected(domain: &CircularDomain) -> Result<(Complex, Complex)> {
    domain.require_strict()?;
    if domain.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "fixed points need exactly two cylinders, got {}",
            domain.len()
        )));
    }
    let [a, b] = [domain.cylinders()[0], domain.cylinders()[1]];
    let z1 = composed_fixed_point(&a, &b)?;
    let z2 = composed_fixed_point(&b, &a)?;
    Ok((z1, z2))
}

/// Fixed point of `T_outer T_inner` lying inside the outer circle.
fn composed_fixed_point(
    outer: &crate::geometry::Cylinder,
    inner: &crate::geometry::Cylinder,
) -> Result<Complex> {
    // T_o(T_i(z)) = c_o + R_o^2 (z - c_i) / (delta (z - c_i) + R_i^2),
    // delta = conj(c_i) - conj(c_o); a Mobius map (a z + b) / (c z + d).
    let (co, ro2) = (outer.center, outer.radius * outer.radius);
    let (ci, ri2) = (inner.center, inner.radius * inner.radius);
    let delta = ci.conj() - co.conj();
    let a = co * delta + ro2;
    let b = co * (ri2 - delta * ci) - ro2 * ci;
    let c = delta;
    let d = ri2 - delta * ci;

    // c z^2 + (d - a) z - b = 0
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
    if c.norm() <= f64::EPSILON * scale {
        return Err(Error::DegenerateComposition);
    }
    let p = d - a;
    let disc = (p * p + 4.0 * c * b).sqrt();
    // choose the sign that avoids cancellation, then Vieta for the other root
    let q = if (p.conj() * disc).re >= 0.0 {
        -0.5 * (p + disc)
    } else {
        -0.5 * (p - disc)
    };
    if q.norm() == 0.0 {
        return Err(Error::DegenerateComposition);
    }
    let roots = [q / c, -b / q];
    roots
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .filter(|z| outer.contains_strictly(*z))
        .min_by(|x, y| {
            let fx = (outer.invert_finite(inner.invert_finite(*x)) - x).norm();
            let fy = (outer.invert_finite(inner.invert_finite(*y)) - y).norm();
            fx.total_cmp(&fy)
        })
        .ok_or(Error::DegenerateComposition)
}

/// Finite image points of levels `1..=level`, with their levels, in tree
/// order. Accepts lax (touching) domains.
pub fn limit_set_points(
    domain: &CircularDomain,
    seed: SpherePoint,
    level: usize,
) -> Result<Vec<(Complex, usize)>> {
    limit_set_points_with_budget(domain, seed, level, DEFAULT_POINT_BUDGET)
}

pub fn limit_set_points_with_budget(
    domain: &CircularDomain,
    seed: SpherePoint,
    level: usize,
    budget: u64,
) -> Result<Vec<(Complex, usize)>> {
    domain.check_seed(seed)?;
    let tree = build_unchecked(domain, seed, level, budget)?;
    Ok(tree
        .levels
        .iter()
        .skip(1)
        .flat_map(|lvl| {
            lvl.iter()
                .filter_map(|p| p.position.finite().map(|z| (z, p.level)))
        })
        .collect())
}
