//! Seeded hit-or-miss Monte Carlo.
//!
//! Every stream is a concatenation of fixed-size chunks; chunk `c` of seed
//! `s` is drawn from the ChaCha8 substream `(s, c)`. Chunks are independent
//! of each other and of thread scheduling, so a parallel estimate is
//! bit-identical to walking the sequential [`PointStream`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::packing::Packing;

/// Points per substream.
pub const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Number of standard errors separating the estimate from `target`.
    /// A zero-error estimate is either exact (0) or infinitely far.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if diff == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            diff / self.stderr
        }
    }

    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

/// Generator for chunk `chunk` of seed `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// A region with a uniform sampler and a known measure.
pub trait Region: Sync {
    /// Length of the sampled coordinate vectors.
    fn ambient_dim(&self) -> usize;
    fn measure(&self) -> f64;
    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]);
}

#[derive(Debug, Clone)]
pub struct BoxRegion {
    bounds: Vec<(f64, f64)>,
}

impl BoxRegion {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() || bounds.iter().any(|&(lo, hi)| !(hi > lo) || !(hi - lo).is_finite()) {
            return Err(Error::DegenerateRegion);
        }
        Ok(Self { bounds })
    }
}

impl Region for BoxRegion {
    fn ambient_dim(&self) -> usize {
        self.bounds.len()
    }

    fn measure(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for (x, &(lo, hi)) in out.iter_mut().zip(&self.bounds) {
            *x = lo + (hi - lo) * rng.random::<f64>();
        }
    }
}

#[derive(Debug, Clone)]
pub struct BallRegion {
    center: Vec<f64>,
    radius: f64,
}

impl BallRegion {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::DegenerateRegion);
        }
        Ok(Self { center, radius })
    }

    pub fn centered(d: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; d], radius)
    }
}

impl Region for BallRegion {
    fn ambient_dim(&self) -> usize {
        self.center.len()
    }

    fn measure(&self) -> f64 {
        let d = self.center.len();
        unit_ball_volume(d) * self.radius.powi(d as i32)
    }

    // Gaussian direction, radius r * U^(1/d).
    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.center.len();
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
            norm2 += *x * *x;
        }
        let scale = self.radius * rng.random::<f64>().powf(1.0 / d as f64) / norm2.sqrt();
        for (x, c) in out.iter_mut().zip(&self.center) {
            *x = c + *x * scale;
        }
    }
}

/// A simplex given by its vertices, possibly embedded in a higher ambient
/// dimension (e.g. the regular simplex on the scaled standard basis).
#[derive(Debug, Clone)]
pub struct SimplexRegion {
    vertices: Vec<Vec<f64>>,
    measure: f64,
}

impl SimplexRegion {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let measure = simplex_measure(&vertices)?;
        if !(measure > 1e-300) {
            return Err(Error::DegenerateRegion);
        }
        Ok(Self { vertices, measure })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }
}

impl Region for SimplexRegion {
    fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    fn measure(&self) -> f64 {
        self.measure
    }

    // Normalized exponential spacings are uniform on the standard simplex.
    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        out.fill(0.0);
        let mut total = 0.0;
        for v in &self.vertices {
            let w: f64 = Exp1.sample(rng);
            total += w;
            for (x, vk) in out.iter_mut().zip(v) {
                *x += w * vk;
            }
        }
        for x in out.iter_mut() {
            *x /= total;
        }
    }
}

/// k-dimensional volume of the simplex spanned by `k + 1` vertices, via the
/// Gram determinant of its edge vectors.
pub fn simplex_measure(vertices: &[Vec<f64>]) -> Result<f64> {
    if vertices.len() < 2 {
        return Err(Error::DegenerateRegion);
    }
    let n = vertices[0].len();
    if vertices.iter().any(|v| v.len() != n) {
        return Err(Error::DegenerateRegion);
    }
    let k = vertices.len() - 1;
    if k > n {
        return Err(Error::DegenerateRegion);
    }
    let edges = nalgebra::DMatrix::from_fn(n, k, |r, c| vertices[c + 1][r] - vertices[0][r]);
    let gram = edges.transpose() * &edges;
    let det = gram.determinant().max(0.0);
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    Ok(det.sqrt() / factorial)
}

/// Volume of the unit ball in dimension `d` (ω_d), by the two-step recurrence.
pub fn unit_ball_volume(d: usize) -> f64 {
    let (mut even, mut odd) = (1.0, 2.0);
    let mut k = 0;
    let mut cur = 1.0;
    while k < d {
        k += 1;
        cur = if k % 2 == 0 {
            even *= 2.0 * std::f64::consts::PI / k as f64;
            even
        } else {
            if k > 1 {
                odd *= 2.0 * std::f64::consts::PI / k as f64;
            }
            odd
        };
    }
    cur
}

/// Sequential point stream; chunk `c` comes from [`substream`]`(seed, c)`.
pub struct PointStream<'a, S: Region> {
    region: &'a S,
    seed: u64,
    remaining: u64,
    emitted: u64,
    rng: ChaCha8Rng,
}

impl<'a, S: Region> PointStream<'a, S> {
    pub fn new(region: &'a S, n: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        Ok(Self { region, seed, remaining: n, emitted: 0, rng: substream(seed, 0) })
    }
}

impl<S: Region> Iterator for PointStream<'_, S> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.remaining == 0 {
            return None;
        }
        if self.emitted > 0 && self.emitted.is_multiple_of(CHUNK) {
            self.rng = substream(self.seed, self.emitted / CHUNK);
        }
        let mut p = vec![0.0; self.region.ambient_dim()];
        self.region.sample_into(&mut self.rng, &mut p);
        self.remaining -= 1;
        self.emitted += 1;
        Some(p)
    }
}

pub fn sample_box(bounds: Vec<(f64, f64)>, n: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let region = BoxRegion::new(bounds)?;
    Ok(PointStream::new(&region, n, seed)?.collect())
}

pub fn sample_ball(d: usize, r: f64, n: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let region = BallRegion::centered(d, r)?;
    Ok(PointStream::new(&region, n, seed)?.collect())
}

pub fn sample_simplex(vertices: Vec<Vec<f64>>, n: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let region = SimplexRegion::new(vertices)?;
    Ok(PointStream::new(&region, n, seed)?.collect())
}

/// Counts, for each of `K` events, how many of the `n` sampled points
/// satisfy it. Runs chunks in parallel; the result does not depend on the
/// thread count.
pub fn tally<S, F, const K: usize>(region: &S, n: u64, seed: u64, classify: F) -> Result<[u64; K]>
where
    S: Region,
    F: Fn(&[f64]) -> [bool; K] + Sync,
{
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let chunks = n.div_ceil(CHUNK);
    let dim = region.ambient_dim();
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c);
            let len = CHUNK.min(n - c * CHUNK);
            let mut p = vec![0.0; dim];
            let mut hits = [0u64; K];
            for _ in 0..len {
                region.sample_into(&mut rng, &mut p);
                for (h, hit) in hits.iter_mut().zip(classify(&p)) {
                    *h += hit as u64;
                }
            }
            hits
        })
        .reduce(
            || [0u64; K],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts)
}

/// Hit fraction times the region measure, with binomial standard error.
pub fn estimate_fraction<S, F>(region: &S, predicate: F, n: u64, seed: u64) -> Result<McEstimate>
where
    S: Region,
    F: Fn(&[f64]) -> bool + Sync,
{
    let [hits] = tally(region, n, seed, |p| [predicate(p)])?;
    Ok(measure_estimate(hits, n, seed, region.measure()))
}

pub(crate) fn measure_estimate(hits: u64, n: u64, seed: u64, measure: f64) -> McEstimate {
    let p = hits as f64 / n as f64;
    McEstimate { value: p * measure, stderr: (p * (1.0 - p) / n as f64).sqrt() * measure, samples: n, seed }
}

/// Ratio of two nested events (`inner` implies `outer`): the conditional
/// proportion, with standard error `sqrt(r(1 - r) / outer)`.
pub(crate) fn nested_ratio(inner: u64, outer: u64, n: u64, seed: u64) -> McEstimate {
    if outer == 0 {
        return McEstimate { value: f64::NAN, stderr: f64::INFINITY, samples: n, seed };
    }
    let r = inner as f64 / outer as f64;
    McEstimate { value: r, stderr: (r * (1.0 - r) / outer as f64).sqrt(), samples: n, seed }
}

/// Membership test for a union of equal balls. Centers are sorted along the
/// first axis so a query only scans the slab `|x_0 - c_0| <= r`.
#[derive(Debug, Clone)]
pub struct BallUnion {
    dim: usize,
    radius2: f64,
    radius: f64,
    sorted: Vec<f64>,
    keys: Vec<f64>,
}

impl BallUnion {
    pub fn new(p: &Packing, radius: f64) -> Self {
        let dim = p.dim();
        let mut centers: Vec<&[f64]> = p.centers().collect();
        centers.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let keys = centers.iter().map(|c| c[0]).collect();
        let sorted = centers.concat();
        Self { dim, radius2: radius * radius, radius, sorted, keys }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let start = self.keys.partition_point(|&k| k < x[0] - self.radius);
        for (i, &k) in self.keys.iter().enumerate().skip(start) {
            if k > x[0] + self.radius {
                break;
            }
            let c = &self.sorted[i * self.dim..(i + 1) * self.dim];
            let d2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= self.radius2 {
                return true;
            }
        }
        false
    }
}

/// Measure of the union of radius-`radius` balls around the centers, by
/// hit-or-miss over their bounding box.
pub fn union_measure_mc(p: &Packing, radius: f64, n: u64, seed: u64) -> Result<McEstimate> {
    if p.is_empty() {
        return Err(Error::EmptyPacking);
    }
    if !(radius > 0.0) {
        return Err(Error::NegativeInput { name: "radius", value: radius });
    }
    let region = BoxRegion::new(p.bounds(radius))?;
    let union = BallUnion::new(p, radius);
    estimate_fraction(&region, |x| union.contains(x), n, seed)
}
