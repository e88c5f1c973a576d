//! Planar soft-disk geometry.

mod boundary;

pub use boundary::{boundary_walk, BoundaryWalk};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::lambda_bar_root;
use crate::error::{Error, Interval, Result};
use crate::montecarlo::{union_measure_mc, McEstimate};
use crate::packing::{pairwise_limit, require_valid, Inflation, Packing, DEFAULT_TOL};
use crate::table::{fmt12, CsvTable};

fn check_radius_dist(r: f64, dist: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NegativeInput { name: "r", value: r });
    }
    if !(dist >= 0.0) || !dist.is_finite() {
        return Err(Error::NegativeInput { name: "dist", value: dist });
    }
    Ok(())
}

pub(crate) fn require_dim(p: &Packing, d: usize) -> Result<()> {
    if p.dim() != d {
        return Err(Error::WrongDimension { expected: d, found: p.dim() });
    }
    Ok(())
}

/// Area of the intersection of two radius-`r` disks whose centers are
/// `dist` apart.
pub fn lens_area(r: f64, dist: f64) -> Result<f64> {
    check_radius_dist(r, dist)?;
    Ok(lens_area_unchecked(r, dist))
}

pub(crate) fn lens_area_unchecked(r: f64, s: f64) -> f64 {
    if s >= 2.0 * r {
        return 0.0;
    }
    2.0 * r * r * (s / (2.0 * r)).acos() - 0.5 * s * (4.0 * r * r - s * s).sqrt()
}

/// d(lens area)/d(dist); zero once the disks separate.
pub(crate) fn lens_area_slope(r: f64, s: f64) -> f64 {
    if s >= 2.0 * r {
        0.0
    } else {
        -(4.0 * r * r - s * s).sqrt()
    }
}

/// `λ̄² arccos(1/λ̄) − √(λ̄² − 1)`, half the lens of two λ̄-disks at distance 2.
pub(crate) fn half_lens_at_contact(lambda_bar: f64) -> f64 {
    let lb2 = lambda_bar * lambda_bar;
    lb2 * (1.0 / lambda_bar).min(1.0).acos() - (lb2 - 1.0).max(0.0).sqrt()
}

/// `[1, 2/√3]`.
pub fn hexdisk_domain() -> Interval {
    Interval::closed(1.0, pairwise_limit())
}

/// Area of the regular hexagon circumscribed about the unit disk intersected
/// with the concentric disk of radius λ̄.
pub fn hexdisk_area(lambda_bar: f64) -> Result<f64> {
    hexdisk_domain().check("lambda_bar", lambda_bar)?;
    Ok(hexdisk_unchecked(lambda_bar))
}

fn hexdisk_unchecked(lb: f64) -> f64 {
    let lb2 = lb * lb;
    lb2 * (PI - 6.0 * (1.0 / lb).min(1.0).acos()) + 6.0 * (lb2 - 1.0).max(0.0).sqrt()
}

/// Area of the union of the inflated disks, exact by inclusion–exclusion
/// because no three inflated disks meet in the pairwise regime.
pub fn union_area_exact(p: &Packing, infl: &Inflation) -> Result<f64> {
    require_dim(p, 2)?;
    infl.require_pairwise()?;
    require_valid(p, DEFAULT_TOL)?;
    Ok(union_area_unchecked(p, infl.lambda_bar))
}

pub(crate) fn union_area_unchecked(p: &Packing, lb: f64) -> f64 {
    let lenses: f64 = p.pairs().map(|(_, _, s)| lens_area_unchecked(lb, s)).sum();
    p.len() as f64 * PI * lb * lb - lenses
}

pub fn union_area_mc(p: &Packing, infl: &Inflation, samples: u64, seed: u64) -> Result<McEstimate> {
    require_dim(p, 2)?;
    union_measure_mc(p, infl.lambda_bar, samples, seed)
}

/// Perimeter of the convex hull of the inflated disks.
pub fn hull_perimeter_inflated(p: &Packing, lambda_bar: f64) -> Result<f64> {
    require_dim(p, 2)?;
    if p.is_empty() {
        return Err(Error::EmptyPacking);
    }
    if !(lambda_bar >= 0.0) {
        return Err(Error::NegativeInput { name: "lambda_bar", value: lambda_bar });
    }
    let hull = convex_hull(p.centers().map(|c| [c[0], c[1]]).collect());
    let mut perim = 0.0;
    if hull.len() > 1 {
        for (k, a) in hull.iter().enumerate() {
            let b = hull[(k + 1) % hull.len()];
            perim += (a[0] - b[0]).hypot(a[1] - b[1]);
        }
    }
    Ok(perim + 2.0 * PI * lambda_bar)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

// Andrew's monotone chain; collinear points are dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn planar_lambda_domain() -> Interval {
    Interval::closed_open(0.0, pairwise_limit() - 1.0)
}

/// π / hexdisk_area(1 + λ) on the open pairwise range.
pub fn delta2_exact(lambda: f64) -> Result<f64> {
    Interval::open(0.0, pairwise_limit() - 1.0).check("lambda", lambda)?;
    Ok(PI / hexdisk_unchecked(1.0 + lambda))
}

/// Ratio of the three unit sectors to the three λ̄-sectors in the edge-2
/// triangle.
pub fn sigma2(lambda: f64) -> Result<f64> {
    planar_lambda_domain().check("lambda", lambda)?;
    let lb = 1.0 + lambda;
    Ok(PI / (PI * lb * lb - 3.0 * lens_area_unchecked(lb, 2.0)))
}

/// Fraction of the edge-2 triangle covered by the λ̄-disks at its vertices.
pub fn sigma_bar2(lambda: f64) -> Result<f64> {
    planar_lambda_domain().check("lambda", lambda)?;
    let lb = 1.0 + lambda;
    Ok((0.5 * PI * lb * lb - 1.5 * lens_area_unchecked(lb, 2.0)) / 3f64.sqrt())
}

/// Rows of (λ, δ₂, σ₂, σ̄₂); entries outside their domain are written as NaN.
pub fn planar_density_table(lambdas: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(["lambda", "delta2", "sigma2", "sigma_bar2"]);
    for &l in lambdas {
        let cell = |r: Result<f64>| fmt12(r.unwrap_or(f64::NAN));
        t.push(vec![fmt12(l), cell(delta2_exact(l)), cell(sigma2(l)), cell(sigma_bar2(l))]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroemerVariant {
    /// Pairwise regime, `1 ≤ λ̄ ≤ 2/√3`.
    Theorem6,
    /// `2/√3 ≤ λ̄ ≤ Λ̄`.
    RemarkGroemer2,
}

impl GroemerVariant {
    pub fn domain(self) -> Result<Interval> {
        Ok(match self {
            GroemerVariant::Theorem6 => hexdisk_domain(),
            GroemerVariant::RemarkGroemer2 => Interval::closed(pairwise_limit(), lambda_bar_root()?),
        })
    }
}

/// Per-unit-perimeter coefficient and per-center area of the lower bound.
fn groemer_terms(lambda_bar: f64, variant: GroemerVariant) -> Result<(f64, f64)> {
    variant.domain()?.check("lambda_bar", lambda_bar)?;
    let lb = lambda_bar;
    Ok(match variant {
        GroemerVariant::Theorem6 => (hexdisk_unchecked(lb), half_lens_at_contact(lb)),
        GroemerVariant::RemarkGroemer2 => {
            let coef = 0.5 * (lb * lb * (PI / 2.0 - (1.0 / lb).acos()) + (lb * lb - 1.0).sqrt() - 3f64.sqrt());
            (12f64.sqrt(), coef)
        }
    })
}

/// Lower bound for the area of the inflated union of `n` disks whose
/// λ-intersection graph has boundary length `perim`.
///
/// The additive constant is `λ̄²π − cell`, one uncovered ring of a single
/// cell; the constant `λ̄²π` in the printed statement is available from
/// [`groemer_rhs_printed`].
pub fn groemer_rhs(n: usize, perim: f64, lambda_bar: f64, variant: GroemerVariant) -> Result<f64> {
    if !(perim >= 0.0) {
        return Err(Error::NegativeInput { name: "perim", value: perim });
    }
    let (cell, coef) = groemer_terms(lambda_bar, variant)?;
    Ok(cell * n as f64 + coef * perim + (lambda_bar * lambda_bar * PI - cell))
}

/// Same as [`groemer_rhs`] with additive constant `λ̄²π`. This exceeds the
/// area of a single disk, so it is only reported, never used as a check.
pub fn groemer_rhs_printed(n: usize, perim: f64, lambda_bar: f64, variant: GroemerVariant) -> Result<f64> {
    if !(perim >= 0.0) {
        return Err(Error::NegativeInput { name: "perim", value: perim });
    }
    let (cell, coef) = groemer_terms(lambda_bar, variant)?;
    Ok(cell * n as f64 + coef * perim + lambda_bar * lambda_bar * PI)
}
