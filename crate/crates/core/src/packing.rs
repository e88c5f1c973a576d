//! Packings of unit balls: validation, inflation regimes, contact and
//! λ-intersection graphs, and finite patches of the reference lattices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for distance comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest inflated radius (exclusive) at which no three inflated balls meet.
pub fn pairwise_limit() -> f64 {
    2.0 / 3f64.sqrt()
}

/// Circumradius of the regular `d`-simplex with edge length 2.
pub fn simplex_circumradius(d: usize) -> f64 {
    (2.0 * d as f64 / (d as f64 + 1.0)).sqrt()
}

/// A finite packing of unit balls, stored as a flat coordinate buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    dim: usize,
    coords: Vec<f64>,
}

impl Serialize for Packing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Packing", 2)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("centers", &self.to_nested())?;
        st.end()
    }
}

impl Packing {
    pub fn new(dim: usize, centers: &[Vec<f64>]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let mut coords = Vec::with_capacity(dim * centers.len());
        for (index, c) in centers.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { index, expected: dim, found: c.len() });
            }
            coords.extend_from_slice(c);
        }
        Ok(Self { dim, coords })
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                index: coords.len() / dim,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn center_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn centers(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        self.centers().map(<[f64]>::to_vec).collect()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        dist(self.center(i), self.center(j))
    }

    /// All unordered index pairs with their center distance.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.dist(i, j))))
    }

    /// Axis-aligned bounds of the centers, each side padded by `pad`.
    pub fn bounds(&self, pad: f64) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|k| {
                let (lo, hi) =
                    self.centers().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c[k]), hi.max(c[k])));
                (lo - pad, hi + pad)
            })
            .collect()
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// `f64::INFINITY` for a single center.
    pub min_pair_distance: f64,
    pub offending_pair: Option<(usize, usize)>,
}

pub fn validate_packing(p: &Packing, tol: f64) -> Result<ValidationReport> {
    if p.is_empty() {
        return Err(Error::EmptyPacking);
    }
    if !(tol >= 0.0) {
        return Err(Error::NegativeInput { name: "tol", value: tol });
    }
    let mut min = f64::INFINITY;
    let mut closest = None;
    for (i, j, d) in p.pairs() {
        if d < min {
            min = d;
            closest = Some((i, j));
        }
    }
    let valid = min >= 2.0 - tol;
    Ok(ValidationReport { valid, min_pair_distance: min, offending_pair: if valid { None } else { closest } })
}

/// Validates and turns an invalid packing into an [`Error::Overlap`].
pub fn require_valid(p: &Packing, tol: f64) -> Result<()> {
    let report = validate_packing(p, tol)?;
    match report.offending_pair {
        Some((i, j)) => Err(Error::Overlap(i, j, report.min_pair_distance)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// No three inflated balls share a point.
    Pairwise,
    /// Inflated radius below the circumradius of the edge-2 simplex.
    RogersOnly,
    Beyond,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inflation {
    pub lambda: f64,
    pub lambda_bar: f64,
    pub dim: usize,
    pub regime: Regime,
}

pub fn classify_regime(d: usize, lambda: f64) -> Result<Inflation> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::NegativeInput { name: "lambda", value: lambda });
    }
    let lambda_bar = 1.0 + lambda;
    let regime = if lambda_bar < pairwise_limit() {
        Regime::Pairwise
    } else if lambda_bar < simplex_circumradius(d) {
        Regime::RogersOnly
    } else {
        Regime::Beyond
    };
    Ok(Inflation { lambda, lambda_bar, dim: d, regime })
}

impl Inflation {
    pub fn require_pairwise(&self) -> Result<()> {
        if self.regime == Regime::Pairwise {
            Ok(())
        } else {
            Err(Error::NotPairwise { lambda_bar: self.lambda_bar })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionGraph {
    pub vertex_count: usize,
    /// Pairs `(i, j)` with `i < j`, in lexicographic order.
    pub edges: Vec<(usize, usize)>,
    pub threshold: f64,
}

impl IntersectionGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbor lists, one per vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

pub fn intersection_graph(p: &Packing, threshold: f64, tol: f64) -> IntersectionGraph {
    let edges = p.pairs().filter(|&(_, _, d)| d <= threshold + tol).map(|(i, j, _)| (i, j)).collect();
    IntersectionGraph { vertex_count: p.len(), edges, threshold }
}

/// The graph joining centers whose inflated balls meet (threshold 2λ̄).
pub fn lambda_graph(p: &Packing, infl: &Inflation, tol: f64) -> IntersectionGraph {
    intersection_graph(p, 2.0 * infl.lambda_bar, tol)
}

/// Number of pairs at distance 2 within `tol`.
pub fn contact_count(p: &Packing, tol: f64) -> usize {
    p.pairs().filter(|&(_, _, d)| (d - 2.0).abs() <= tol).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Hexagonal2d,
    Square2d,
    Fcc3d,
    Bcc3d,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 4] =
        [LatticeKind::Hexagonal2d, LatticeKind::Square2d, LatticeKind::Fcc3d, LatticeKind::Bcc3d];

    pub fn dim(self) -> usize {
        match self {
            LatticeKind::Hexagonal2d | LatticeKind::Square2d => 2,
            LatticeKind::Fcc3d | LatticeKind::Bcc3d => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Hexagonal2d => "hexagonal2d",
            LatticeKind::Square2d => "square2d",
            LatticeKind::Fcc3d => "fcc3d",
            LatticeKind::Bcc3d => "bcc3d",
        }
    }

    /// Lattice basis (one vector per row) at nearest-neighbor distance 2.
    pub fn basis(self) -> Vec<Vec<f64>> {
        let rows: &[[i64; 3]] = match self {
            LatticeKind::Hexagonal2d | LatticeKind::Square2d => &[[1, 0, 0], [0, 1, 0]],
            // integer points with even coordinate sum
            LatticeKind::Fcc3d => &[[1, 1, 0], [1, 0, 1], [0, 1, 1]],
            // integer points with all coordinates of equal parity
            LatticeKind::Bcc3d => &[[2, 0, 0], [0, 2, 0], [1, 1, 1]],
        };
        rows.iter().map(|&k| self.embed(k)).collect()
    }

    /// Volume of a fundamental cell.
    pub fn covolume(self) -> f64 {
        let b = self.basis();
        let d = self.dim();
        nalgebra::DMatrix::from_fn(d, d, |r, c| b[r][c]).determinant().abs()
    }

    /// Packing density of the unit balls centered at the lattice points.
    pub fn density(self) -> f64 {
        crate::montecarlo::unit_ball_volume(self.dim()) / self.covolume()
    }

    /// Least radius for which balls at the lattice points cover space.
    pub fn covering_radius(self) -> f64 {
        match self {
            LatticeKind::Hexagonal2d => 2.0 / 3f64.sqrt(),
            LatticeKind::Square2d | LatticeKind::Fcc3d => 2f64.sqrt(),
            LatticeKind::Bcc3d => (5.0f64 / 3.0).sqrt(),
        }
    }

    /// Nearest-neighbor steps in integer lattice coordinates.
    fn steps(self) -> Vec<[i64; 3]> {
        match self {
            LatticeKind::Hexagonal2d => {
                vec![[1, 0, 0], [0, 1, 0], [-1, 1, 0], [-1, 0, 0], [0, -1, 0], [1, -1, 0]]
            }
            LatticeKind::Square2d => vec![[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]],
            LatticeKind::Fcc3d => {
                let mut v = Vec::with_capacity(12);
                for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                    for sa in [-1, 1] {
                        for sb in [-1, 1] {
                            let mut s = [0; 3];
                            s[a] = sa;
                            s[b] = sb;
                            v.push(s);
                        }
                    }
                }
                v
            }
            LatticeKind::Bcc3d => {
                let mut v = Vec::with_capacity(8);
                for x in [-1, 1] {
                    for y in [-1, 1] {
                        for z in [-1, 1] {
                            v.push([x, y, z]);
                        }
                    }
                }
                v
            }
        }
    }

    /// Maps integer lattice coordinates to a point with nearest-neighbor distance 2.
    fn embed(self, k: [i64; 3]) -> Vec<f64> {
        let [a, b, c] = k.map(|x| x as f64);
        match self {
            LatticeKind::Hexagonal2d => vec![2.0 * a + b, 3f64.sqrt() * b],
            LatticeKind::Square2d => vec![2.0 * a, 2.0 * b],
            LatticeKind::Fcc3d => {
                let s = 2f64.sqrt();
                vec![s * a, s * b, s * c]
            }
            LatticeKind::Bcc3d => {
                let s = 2.0 / 3f64.sqrt();
                vec![s * a, s * b, s * c]
            }
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hexagonal2d" | "hexagonal" | "hex" => Ok(LatticeKind::Hexagonal2d),
            "square2d" | "square" => Ok(LatticeKind::Square2d),
            "fcc3d" | "fcc" => Ok(LatticeKind::Fcc3d),
            "bcc3d" | "bcc" => Ok(LatticeKind::Bcc3d),
            _ => Err(Error::Unknown { kind: "lattice kind", name: s.to_string() }),
        }
    }
}

/// Lattice points within `extent` nearest-neighbor hops of the origin, in
/// breadth-first order (origin first, then shell by shell).
pub fn lattice_patch(kind: LatticeKind, extent: usize) -> Result<Packing> {
    if extent == 0 {
        return Err(Error::Domain {
            what: "extent",
            value: 0.0,
            domain: crate::error::Interval::closed(1.0, f64::INFINITY),
        });
    }
    let steps = kind.steps();
    let mut seen = BTreeSet::from([[0i64; 3]]);
    let mut order = vec![[0i64; 3]];
    let mut queue = VecDeque::from([([0i64; 3], 0usize)]);
    while let Some((k, hops)) = queue.pop_front() {
        if hops == extent {
            continue;
        }
        for s in &steps {
            let next = [k[0] + s[0], k[1] + s[1], k[2] + s[2]];
            if seen.insert(next) {
                order.push(next);
                queue.push_back((next, hops + 1));
            }
        }
    }
    let coords = order.into_iter().flat_map(|k| kind.embed(k)).collect();
    Packing::from_flat(kind.dim(), coords)
}

/// A random connected-ish cluster of `n` unit balls: each new center is
/// dropped at distance `2 + U(0, spread)` from a random earlier center in a
/// uniformly random direction, rejecting overlaps.
pub fn random_cluster<R: Rng + ?Sized>(n: usize, d: usize, spread: f64, rng: &mut R) -> Packing {
    use rand_distr::{Distribution, StandardNormal};
    let mut coords = vec![0.0; d];
    let mut count = 1;
    let mut dir = vec![0.0; d];
    while count < n {
        let anchor = rng.random_range(0..count);
        let r = 2.0 + spread * rng.random::<f64>();
        let mut norm = 0.0f64;
        for x in dir.iter_mut() {
            *x = StandardNormal.sample(rng);
            norm += *x * *x;
        }
        let norm = norm.sqrt();
        let cand: Vec<f64> = (0..d).map(|k| coords[anchor * d + k] + r * dir[k] / norm).collect();
        if coords.chunks_exact(d).all(|c| dist(c, &cand) >= 2.0) {
            coords.extend_from_slice(&cand);
            count += 1;
        }
    }
    Packing { dim: d, coords }
}
