//! Soft balls in three dimensions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bounds::{phi0, theorem5_bound, theorem8_bound};
use crate::error::{Error, Interval, Result};
use crate::geom2d::require_dim;
use crate::montecarlo::{estimate_fraction, union_measure_mc, BallRegion, BoxRegion, McEstimate, Region};
use crate::packing::{pairwise_limit, require_valid, Inflation, LatticeKind, Packing, DEFAULT_TOL};
use crate::table::{fmt12, CsvTable};

/// Volume of the intersection of two radius-`r` balls whose centers are
/// `dist` apart.
pub fn lens_volume(r: f64, dist: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NegativeInput { name: "r", value: r });
    }
    if !(dist >= 0.0) || !dist.is_finite() {
        return Err(Error::NegativeInput { name: "dist", value: dist });
    }
    Ok(lens_volume_unchecked(r, dist))
}

pub(crate) fn lens_volume_unchecked(r: f64, s: f64) -> f64 {
    if s >= 2.0 * r {
        return 0.0;
    }
    PI / 12.0 * (4.0 * r + s) * (2.0 * r - s).powi(2)
}

pub(crate) fn lens_volume_slope(r: f64, s: f64) -> f64 {
    if s >= 2.0 * r {
        0.0
    } else {
        -PI / 4.0 * (4.0 * r * r - s * s)
    }
}

/// `π(2λ̄³/3 − λ̄²x + x³/3)`: the cap cut from a λ̄-ball by a plane at
/// distance `x` from its center.
pub fn cap_cone_term(lambda_bar: f64, x: f64) -> Result<f64> {
    if !(lambda_bar >= 1.0) {
        return Err(Error::Domain {
            what: "lambda_bar",
            value: lambda_bar,
            domain: Interval::closed(1.0, f64::INFINITY),
        });
    }
    Interval::closed(1.0, lambda_bar).check("x", x)?;
    Ok(cap_unchecked(lambda_bar, x))
}

pub(crate) fn cap_unchecked(lb: f64, x: f64) -> f64 {
    PI * (2.0 / 3.0 * lb.powi(3) - lb * lb * x + x.powi(3) / 3.0)
}

fn face_domain() -> Interval {
    Interval::closed(1.0, pairwise_limit())
}

/// Area of the central projection onto the unit sphere of the planar Rogers
/// triangle (face foot, edge midpoint, vertex) of a face at distance `x`.
pub fn spherical_triangle_area(x: f64) -> Result<f64> {
    face_domain().check("x", x)?;
    Ok((1.0 / (3.0 - x * x).sqrt()).atan() + ((4.0 - x * x).sqrt() / x).atan() - PI / 2.0)
}

/// `arccot` with values in `(0, π)`.
pub fn arccot(z: f64) -> f64 {
    PI / 2.0 - z.atan()
}

/// The Hajós face function `f(x)`.
pub fn hajos_f(x: f64) -> Result<f64> {
    face_domain().check("x", x)?;
    Ok(hajos_f_unchecked(x))
}

fn hajos_f_unchecked(x: f64) -> f64 {
    let a = 3.0 - x * x;
    let b = 4.0 - x * x;
    let inner = (1.0 / a.sqrt()).atan();
    let z = x * a.sqrt() * (5.0 * inner).tan() / b.sqrt();
    10.0 / 3.0 * (b.sqrt() / x).atan() - 2.0 / 3.0 * arccot(z) - 2.0 / 3.0 * PI
}

/// `F(x, λ̄) = f(x) − C·cap(λ̄, x)` with `C` chosen so that `F(1, λ̄) = 0`.
pub fn hajos_big_f(x: f64, lambda_bar: f64) -> Result<f64> {
    Interval::open(1.0, pairwise_limit()).check("lambda_bar", lambda_bar)?;
    Interval::closed(1.0, lambda_bar).check("x", x)?;
    Ok(hajos_big_f_unchecked(x, lambda_bar))
}

pub(crate) fn hajos_big_f_unchecked(x: f64, lb: f64) -> f64 {
    let c = hajos_f_unchecked(1.0) / cap_unchecked(lb, 1.0);
    hajos_f_unchecked(x) - c * cap_unchecked(lb, x)
}

/// Volume of the union of the inflated balls, exact in the pairwise regime.
pub fn union_volume_exact(p: &Packing, infl: &Inflation) -> Result<f64> {
    require_dim(p, 3)?;
    infl.require_pairwise()?;
    require_valid(p, DEFAULT_TOL)?;
    Ok(union_volume_unchecked(p, infl.lambda_bar))
}

pub(crate) fn union_volume_unchecked(p: &Packing, lb: f64) -> f64 {
    let lenses: f64 = p.pairs().map(|(_, _, s)| lens_volume_unchecked(lb, s)).sum();
    p.len() as f64 * 4.0 / 3.0 * PI * lb.powi(3) - lenses
}

pub fn union_volume_mc(p: &Packing, infl: &Inflation, samples: u64, seed: u64) -> Result<McEstimate> {
    require_dim(p, 3)?;
    union_measure_mc(p, infl.lambda_bar, samples, seed)
}

/// Solid angle at a vertex of the regular tetrahedron.
pub fn tetra_vertex_solid_angle() -> f64 {
    6.0 * phi0() - PI
}

/// Volume of the regular tetrahedron of edge 2.
pub fn tetra_volume() -> f64 {
    2.0 * 2f64.sqrt() / 3.0
}

/// Volume of the edge-2 regular tetrahedron covered by the λ̄-balls at its
/// vertices: four vertex sectors minus the six edge lenses, each cut to the
/// tetrahedron's dihedral wedge.
pub fn tetra_union_volume(lambda_bar: f64) -> Result<f64> {
    Interval::closed_open(1.0, pairwise_limit()).check("lambda_bar", lambda_bar)?;
    Ok(tetra_union_unchecked(lambda_bar))
}

fn tetra_union_unchecked(lb: f64) -> f64 {
    let omega = tetra_vertex_solid_angle();
    let dihedral = 2.0 * phi0();
    4.0 * omega / 3.0 * lb.powi(3) - 6.0 * dihedral / (2.0 * PI) * lens_volume_unchecked(lb, 2.0)
}

fn pairwise_lambda() -> Interval {
    Interval::closed_open(0.0, pairwise_limit() - 1.0)
}

pub fn sigma3(lambda: f64) -> Result<f64> {
    pairwise_lambda().check("lambda", lambda)?;
    Ok(4.0 * tetra_vertex_solid_angle() / 3.0 / tetra_union_unchecked(1.0 + lambda))
}

pub fn sigma_bar3(lambda: f64) -> Result<f64> {
    pairwise_lambda().check("lambda", lambda)?;
    Ok(tetra_union_unchecked(1.0 + lambda) / tetra_volume())
}

/// The cubic-over-cubic form of σ₃ with coefficients
/// `{π, 3π − 9φ₀, 3π − 18φ₀, π − 6φ₀}`.
pub fn sigma3_printed(lambda: f64) -> Result<f64> {
    pairwise_lambda().check("lambda", lambda)?;
    let f = phi0();
    let l = lambda;
    let c0 = PI - 6.0 * f;
    Ok(c0 / (PI * l.powi(3) + (3.0 * PI - 9.0 * f) * l * l + (3.0 * PI - 18.0 * f) * l + c0))
}

/// Rows of (λ, σ₃, σ̄₃, theorem5, theorem8, τ̄₃, τ̄₃ stderr).
pub fn density3_table(lambdas: &[f64], samples: u64, seed: u64) -> Result<CsvTable> {
    let mut t =
        CsvTable::new(["lambda", "sigma3", "sigma_bar3", "theorem5", "theorem8", "tau_bar3", "tau_bar3_stderr"])
            .meta("samples", samples)
            .meta("seed", seed);
    let dodeca = dodecahedron_model();
    for &l in lambdas {
        let cell = |r: Result<f64>| fmt12(r.unwrap_or(f64::NAN));
        let (tb, tse) = match dodeca.tau_bar3(l, samples, seed) {
            Ok(e) => (e.value, e.stderr),
            Err(Error::Domain { .. }) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        t.push(vec![
            fmt12(l),
            cell(sigma3(l)),
            cell(sigma_bar3(l)),
            cell(theorem5_bound(l)),
            cell(theorem8_bound(l)),
            fmt12(tb),
            fmt12(tse),
        ]);
    }
    Ok(t)
}

/// Regular dodecahedron circumscribed about the unit ball.
#[derive(Debug, Clone, Serialize)]
pub struct Dodecahedron {
    pub vertices: Vec<[f64; 3]>,
    /// Outward unit normals; every face plane is `n·x = 1`.
    pub normals: Vec<[f64; 3]>,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cyclic(v: [f64; 3]) -> [[f64; 3]; 3] {
    [v, [v[2], v[0], v[1]], [v[1], v[2], v[0]]]
}

pub fn dodecahedron_model() -> Dodecahedron {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices = Vec::with_capacity(20);
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                vertices.push([sx, sy, sz]);
            }
        }
    }
    let mut normals = Vec::with_capacity(12);
    for sa in [-1.0, 1.0] {
        for sb in [-1.0, 1.0] {
            vertices.extend(cyclic([0.0, sa / phi, sb * phi]));
            normals.extend(cyclic([0.0, sa * phi, sb]));
        }
    }
    let norm = (1.0 + phi * phi).sqrt();
    for n in normals.iter_mut() {
        *n = n.map(|x| x / norm);
    }
    let inradius = vertices.iter().map(|&v| dot(v, normals[0])).fold(f64::MIN, f64::max);
    for v in vertices.iter_mut() {
        *v = v.map(|x| x / inradius);
    }
    Dodecahedron { vertices, normals }
}

impl Dodecahedron {
    pub fn contains(&self, x: &[f64]) -> bool {
        let x = [x[0], x[1], x[2]];
        self.normals.iter().all(|&n| dot(n, x) <= 1.0)
    }

    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|&v| dot(v, v).sqrt()).fold(0.0, f64::max)
    }

    /// Distance from the center to the edge midpoints.
    pub fn midradius(&self) -> f64 {
        let v0 = self.vertices[0];
        let edge = self
            .vertices
            .iter()
            .skip(1)
            .map(|&v| (dot(v, v) + dot(v0, v0) - 2.0 * dot(v, v0)).sqrt())
            .fold(f64::INFINITY, f64::min);
        (self.circumradius().powi(2) - edge * edge / 4.0).sqrt()
    }

    /// Twelve pyramids of height 1 over regular pentagons.
    pub fn volume(&self) -> f64 {
        let face_circumradius2 = self.circumradius().powi(2) - 1.0;
        let face_area = 2.5 * face_circumradius2 * (2.0 * PI / 5.0).sin();
        12.0 * face_area / 3.0
    }

    /// `vol(D ∩ λ̄B)` while the λ̄-sphere crosses only the faces, i.e. for
    /// `1 ≤ λ̄ ≤ midradius`; `None` beyond that.
    pub fn ball_section_volume_exact(&self, lambda_bar: f64) -> Option<f64> {
        if !(1.0..=self.midradius()).contains(&lambda_bar) {
            return None;
        }
        Some(4.0 / 3.0 * PI * lambda_bar.powi(3) - 12.0 * cap_unchecked(lambda_bar, 1.0))
    }

    pub fn lambda_domain(&self) -> Interval {
        Interval::closed(0.0, self.circumradius() - 1.0)
    }

    /// Estimate of `vol(D ∩ λ̄B)`, sampling the ball of radius
    /// `min(λ̄, circumradius)`.
    pub fn ball_section_volume(&self, lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
        self.lambda_domain().check("lambda", lambda)?;
        let r = (1.0 + lambda).min(self.circumradius());
        let ball = BallRegion::centered(3, r)?;
        estimate_fraction(&ball, |x| self.contains(x), samples, seed)
    }

    /// `τ₃(λ) = vol(B³) / vol(D ∩ λ̄B³)`.
    pub fn tau3(&self, lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
        let v = self.ball_section_volume(lambda, samples, seed)?;
        let omega = 4.0 / 3.0 * PI;
        Ok(McEstimate { value: omega / v.value, stderr: omega * v.stderr / (v.value * v.value), ..v })
    }

    /// `τ̄₃(λ) = vol(D ∩ λ̄B³) / vol(D)`.
    pub fn tau_bar3(&self, lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
        let v = self.ball_section_volume(lambda, samples, seed)?;
        let vol = self.volume();
        Ok(McEstimate { value: v.value / vol, stderr: v.stderr / vol, ..v })
    }
}

pub fn tau3(lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    dodecahedron_model().tau3(lambda, samples, seed)
}

pub fn tau_bar3(lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    dodecahedron_model().tau_bar3(lambda, samples, seed)
}

/// Density of the fcc lattice packing of unit balls from its basis
/// determinant.
pub fn fcc_density_check() -> f64 {
    LatticeKind::Fcc3d.density()
}

/// Fraction of a cubic cell of the bcc lattice (nearest-neighbor distance 2)
/// lying within `lambda_bar` of some lattice point.
pub fn bcc_covering_check(lambda_bar: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    if !(lambda_bar > 0.0) || !lambda_bar.is_finite() {
        return Err(Error::NegativeInput { name: "lambda_bar", value: lambda_bar });
    }
    let a = 4.0 / 3f64.sqrt();
    // corners and body centers of the cell and its 26 neighbors
    let mut points = Vec::new();
    for i in -1..=2 {
        for j in -1..=2 {
            for k in -1..=2 {
                points.push([i as f64 * a, j as f64 * a, k as f64 * a]);
                if i < 2 && j < 2 && k < 2 {
                    points.push([(i as f64 + 0.5) * a, (j as f64 + 0.5) * a, (k as f64 + 0.5) * a]);
                }
            }
        }
    }
    let r2 = lambda_bar * lambda_bar;
    let cell = BoxRegion::new(vec![(0.0, a); 3])?;
    let vol = cell.measure();
    let covered = estimate_fraction(
        &cell,
        |x| points.iter().any(|c| (c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2) + (c[2] - x[2]).powi(2) <= r2),
        samples,
        seed,
    )?;
    Ok(McEstimate { value: covered.value / vol, stderr: covered.stderr / vol, ..covered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::SimplexRegion;
    use crate::packing::{classify_regime, lattice_patch};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lens_volume_examples() {
        assert_eq!(lens_volume(1.0, 2.0).unwrap(), 0.0);
        assert!(close(lens_volume(1.0, 0.0).unwrap(), 4.0 * PI / 3.0, 1e-15));
        assert!(close(lens_volume(1.1, 2.0).unwrap(), 0.067020643277, 1e-12));
        assert!(lens_volume(1.0, -1.0).is_err());
    }

    #[test]
    fn lens_volume_by_disk_slices() {
        // integrate the area of the circular cross-sections along the axis
        let (r, s) = (1.1f64, 2.0f64);
        let n = 100_000;
        let half = r - s / 2.0;
        let h = 2.0 * half / n as f64;
        let v: f64 = (0..n)
            .map(|k| {
                let t = -half + (k as f64 + 0.5) * h;
                let rho2 = r * r - (s / 2.0 + t.abs()).powi(2);
                PI * rho2.max(0.0) * h
            })
            .sum();
        assert!(close(v, lens_volume(r, s).unwrap(), 1e-9));
    }

    #[test]
    fn lens_volume_slope_matches_difference_quotient() {
        for &s in &[0.5, 1.5, 2.15] {
            let h = 1e-6;
            let fd = (lens_volume_unchecked(1.1, s + h) - lens_volume_unchecked(1.1, s - h)) / (2.0 * h);
            assert!(close(fd, lens_volume_slope(1.1, s), 1e-8));
        }
    }

    // spherical cap of height h: πh²(3R − h)/3
    fn cap_oracle(lb: f64, x: f64) -> f64 {
        let h = lb - x;
        PI * h * h * (3.0 * lb - h) / 3.0
    }

    #[test]
    fn cap_examples() {
        assert!(close(cap_cone_term(1.1, 1.1).unwrap(), 0.0, 1e-15));
        assert!(close(cap_cone_term(1.1, 1.0).unwrap(), 0.033510321638, 1e-12));
        assert!(close(cap_cone_term(1.15, 1.05).unwrap(), cap_oracle(1.15, 1.05), 1e-12));
        assert!(cap_cone_term(1.1, 0.9).is_err());
        assert!(cap_cone_term(1.1, 1.2).is_err());
    }

    #[test]
    fn cap_nonnegative_and_decreasing() {
        let lb = 1.15;
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let x = 1.0 + (lb - 1.0) * k as f64 / 100.0;
            let c = cap_cone_term(lb, x).unwrap();
            assert!(c >= 0.0 && c <= prev);
            prev = c;
        }
    }

    #[test]
    fn spherical_triangle_examples() {
        let f0 = phi0();
        assert!(close(spherical_triangle_area(1.0).unwrap(), f0 + PI / 3.0 - PI / 2.0, 1e-15));
        assert!(close(spherical_triangle_area(1.0).unwrap(), 0.091880933072, 1e-12));
        assert!(close(spherical_triangle_area(2.0 / 3f64.sqrt()).unwrap(), 0.043578327156, 1e-12));
        assert!(spherical_triangle_area(0.5).is_err());
    }

    #[test]
    fn hajos_f_examples() {
        let psi0 = crate::bounds::psi0();
        assert!(close(hajos_f(1.0).unwrap(), PI / 9.0 - 2.0 / 3.0 * psi0, 1e-14));
        assert!(close(hajos_f(1.0).unwrap(), 0.314107003233, 1e-12));
        assert!(close(hajos_f(2.0 / 3f64.sqrt()).unwrap(), 0.136455874661, 1e-12));
        assert!(close(hajos_f(1.1).unwrap(), 0.192957905625, 1e-12));
        let z = (2.0f64 / 3.0).sqrt() * (5.0 * phi0()).tan();
        assert!(close(arccot(z), PI / 2.0 + psi0, 1e-12));
    }

    #[test]
    fn hajos_big_f_examples() {
        assert!(close(hajos_big_f(1.0, 1.1).unwrap(), 0.0, 1e-15));
        assert!(close(hajos_big_f(1.1, 1.1).unwrap(), hajos_f(1.1).unwrap(), 1e-12));
        assert!(hajos_big_f(1.1, 1.1).unwrap() > 0.0);
        assert!(hajos_big_f(1.0, 1.0).is_err());
        assert!(hajos_big_f(1.2, 1.1).is_err());
    }

    #[test]
    fn union_volume_examples() {
        let infl = classify_regime(3, 0.1).unwrap();
        let one = Packing::new(3, &[vec![0.0; 3]]).unwrap();
        assert!(close(union_volume_exact(&one, &infl).unwrap(), 4.0 * PI / 3.0 * 1.331, 1e-12));
        let two = Packing::new(3, &[vec![0.0; 3], vec![2.0, 0.0, 0.0]]).unwrap();
        let expect = 2.0 * 4.0 * PI / 3.0 * 1.331 - 0.067020643277;
        assert!(close(union_volume_exact(&two, &infl).unwrap(), expect, 1e-11));
        let beyond = classify_regime(3, 0.2).unwrap();
        assert!(union_volume_exact(&two, &beyond).is_err());
    }

    #[test]
    fn fcc_patch_union_against_mc() {
        let p = lattice_patch(LatticeKind::Fcc3d, 1).unwrap();
        let infl = classify_regime(3, 0.05).unwrap();
        let exact = union_volume_exact(&p, &infl).unwrap();
        let est = union_volume_mc(&p, &infl, 1_000_000, 8).unwrap();
        assert!(est.within_sigma(exact, 3.0), "{est:?} vs {exact}");
    }

    fn tetra_vertices() -> Vec<Vec<f64>> {
        let s = 0.5f64.sqrt();
        vec![vec![s, s, s], vec![s, -s, -s], vec![-s, s, -s], vec![-s, -s, s]]
    }

    #[test]
    fn tetra_closed_form() {
        assert!(close(tetra_union_volume(1.0).unwrap(), 0.735047464577, 1e-12));
        assert!(close(tetra_union_volume(1.1).unwrap(), 0.899566772642, 1e-12));
        assert!(tetra_union_volume(pairwise_limit() - 1e-12).unwrap() < tetra_volume());
        assert!(close(tetra_vertex_solid_angle(), 3.0 * (1.0f64 / 3.0).acos() - PI, 1e-14));
        assert!(tetra_union_volume(pairwise_limit()).is_err());
    }

    #[test]
    fn tetra_closed_form_against_mc() {
        let verts = tetra_vertices();
        let edge = crate::packing::Packing::new(3, &verts).unwrap().dist(0, 1);
        assert!(close(edge, 2.0, 1e-12));
        let region = SimplexRegion::new(verts.clone()).unwrap();
        for lb in [1.0, 1.1] {
            let est = estimate_fraction(
                &region,
                |x| verts.iter().any(|v| v.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= lb * lb),
                1_000_000,
                12,
            )
            .unwrap();
            let exact = tetra_union_volume(lb).unwrap();
            assert!(est.within_sigma(exact, 3.0), "λ̄={lb}: {est:?} vs {exact}");
        }
    }

    #[test]
    fn sigma3_values() {
        assert!(close(sigma3(0.0).unwrap(), 1.0, 1e-15));
        assert!(close(sigma3(0.1).unwrap(), 0.817112733520, 1e-11));
        assert!(close(sigma_bar3(0.0).unwrap(), 0.779635570044, 1e-11));
        assert!(close(sigma_bar3(0.1).unwrap(), 0.954134647598, 1e-11));
        for k in 0..50 {
            let l = (pairwise_limit() - 1.0) * k as f64 / 50.0;
            assert!(close(sigma3_printed(l).unwrap(), sigma3(l).unwrap(), 1e-13), "λ={l}");
        }
    }

    #[test]
    fn dodecahedron_geometry() {
        let d = dodecahedron_model();
        assert_eq!(d.vertices.len(), 20);
        assert_eq!(d.normals.len(), 12);
        for &n in &d.normals {
            let offset = d.vertices.iter().map(|&v| dot(v, n)).fold(f64::MIN, f64::max);
            assert!(close(offset, 1.0, 1e-12));
            // five vertices on every face
            assert_eq!(d.vertices.iter().filter(|&&v| close(dot(v, n), 1.0, 1e-9)).count(), 5);
        }
        assert!(close(d.circumradius(), 3f64.sqrt() * (PI / 5.0).tan(), 1e-12));
        assert!(close(d.circumradius(), 1.258408572, 1e-9));
        assert!(d.contains(&[0.0, 0.0, 0.0]));
        assert!(!d.contains(&[0.0, 0.0, 1.3]));
    }

    #[test]
    fn dodecahedron_volume_against_mc() {
        let d = dodecahedron_model();
        let r = d.circumradius();
        let cube = BoxRegion::new(vec![(-r, r); 3]).unwrap();
        let est = estimate_fraction(&cube, |x| d.contains(x), 1_000_000, 4).unwrap();
        assert!(est.within_sigma(d.volume(), 3.0), "{est:?} vs {}", d.volume());
    }

    #[test]
    fn tau_values() {
        let d = dodecahedron_model();
        let t0 = d.tau3(0.0, 10_000, 1).unwrap();
        assert_eq!(t0.value, 1.0);
        let top = d.circumradius() - 1.0;
        let full = d.tau_bar3(top, 1_000_000, 2).unwrap();
        assert!(full.within_sigma(1.0, 3.0), "{full:?}");
        let tb0 = d.tau_bar3(0.0, 1_000, 3).unwrap();
        assert!(close(tb0.value, 4.0 * PI / 3.0 / d.volume(), 1e-12));
        assert!(close(tb0.value, 0.7546, 1e-4));
        assert!(d.tau3(top + 1e-6, 100, 1).is_err());
    }

    #[test]
    fn tau_against_face_cap_formula() {
        let d = dodecahedron_model();
        for l in [0.05, 0.1, 0.15] {
            let exact = d.ball_section_volume_exact(1.0 + l).unwrap();
            let est = d.ball_section_volume(l, 1_000_000, 5).unwrap();
            assert!(est.within_sigma(exact, 3.0), "λ={l}: {est:?} vs {exact}");
        }
        assert!(d.ball_section_volume_exact(1.2).is_none());
    }

    #[test]
    fn lattice_checks() {
        assert!(close(fcc_density_check(), PI / 18f64.sqrt(), 1e-12));
        let full = bcc_covering_check(LatticeKind::Bcc3d.covering_radius(), 200_000, 1).unwrap();
        assert_eq!(full.value, 1.0);
        let short = bcc_covering_check(1.25, 200_000, 1).unwrap();
        assert!(short.value < 1.0 - 3.0 * short.stderr);
    }

    #[test]
    fn table_has_all_columns() {
        let t = density3_table(&[0.0, 0.1], 10_000, 1).unwrap();
        assert_eq!(t.header().len(), 7);
        assert_eq!(t.rows().len(), 2);
        assert_eq!(t.rows()[0][4], fmt12(theorem8_bound(0.0).unwrap()));
    }
}
