//! Boundary of the unbounded face of a plane straight-line graph.
//!
//! Faces are traced with a rotation system: neighbors are sorted
//! counterclockwise around each vertex and the dart `u → v` is followed by
//! `v → w`, where `w` is the clockwise successor of `u` around `v`. The face
//! then lies to the left of every dart, bounded faces come out
//! counterclockwise and the outer walk of each component clockwise.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::packing::{IntersectionGraph, Packing};

use super::require_dim;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryWalk {
    /// One closed walk per component on the unbounded face, as indices into
    /// the graph's edge list. An isolated vertex gives an empty walk.
    pub cycles: Vec<Vec<usize>>,
    /// The same walks as vertex sequences (first vertex not repeated).
    pub vertex_cycles: Vec<Vec<usize>>,
    /// Total edge length, counted with multiplicity.
    pub perim: f64,
    /// Number of components touching the unbounded face.
    pub s: usize,
}

impl BoundaryWalk {
    /// Walks as closed coordinate polylines, for plotting.
    pub fn to_plot_json(&self, p: &Packing) -> serde_json::Value {
        let cycles: Vec<Vec<[f64; 2]>> = self
            .vertex_cycles
            .iter()
            .map(|vs| {
                let mut pts: Vec<[f64; 2]> = vs.iter().map(|&v| point(p, v)).collect();
                if let Some(&first) = pts.first() {
                    pts.push(first);
                }
                pts
            })
            .collect();
        serde_json::json!({ "perim": self.perim, "s": self.s, "cycles": cycles })
    }
}

fn point(p: &Packing, v: usize) -> [f64; 2] {
    let c = p.center(v);
    [c[0], c[1]]
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
}

/// Whether segments `ab` and `cd` share a point other than a common endpoint.
fn segments_clash(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let scale = [a, b, c, d].iter().flat_map(|p| p.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
    let eps = 1e-12 * scale * scale;
    let sgn = |x: f64| {
        if x > eps {
            1
        } else if x < -eps {
            -1
        } else {
            0
        }
    };
    let (o1, o2) = (sgn(orient(a, b, c)), sgn(orient(a, b, d)));
    let (o3, o4) = (sgn(orient(c, d, a)), sgn(orient(c, d, b)));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    // touching or collinear cases, ignoring a shared endpoint
    let shared = |p: [f64; 2], q: [f64; 2]| p == q;
    (o1 == 0 && on_segment(a, b, c) && !shared(c, a) && !shared(c, b))
        || (o2 == 0 && on_segment(a, b, d) && !shared(d, a) && !shared(d, b))
        || (o3 == 0 && on_segment(c, d, a) && !shared(a, c) && !shared(a, d))
        || (o4 == 0 && on_segment(c, d, b) && !shared(b, c) && !shared(b, d))
        || collinear_overlap(a, b, c, d)
}

// Two collinear segments from a common endpoint pointing the same way.
fn collinear_overlap(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (o, u, v) = if a == c {
        (a, b, d)
    } else if a == d {
        (a, b, c)
    } else if b == c {
        (b, a, d)
    } else if b == d {
        (b, a, c)
    } else {
        return false;
    };
    let du = [u[0] - o[0], u[1] - o[1]];
    let dv = [v[0] - o[0], v[1] - o[1]];
    let cr = du[0] * dv[1] - du[1] * dv[0];
    let dot = du[0] * dv[0] + du[1] * dv[1];
    cr.abs() <= 1e-12 * dot.abs().max(1.0) && dot > 0.0
}

fn check_plane(g: &IntersectionGraph, p: &Packing) -> Result<()> {
    for (k, &(a, b)) in g.edges.iter().enumerate() {
        for &(c, d) in &g.edges[k + 1..] {
            if segments_clash(point(p, a), point(p, b), point(p, c), point(p, d)) {
                return Err(Error::CrossingEdges((a, b), (c, d)));
            }
        }
    }
    Ok(())
}

fn components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            for &w in &adj[comp[k]] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            k += 1;
        }
        out.push(comp);
    }
    out
}

/// Nonzero winding number of the closed polygon around `q`.
fn encloses(poly: &[[f64; 2]], q: [f64; 2]) -> bool {
    let mut wn = 0i32;
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        if a[1] <= q[1] {
            if b[1] > q[1] && orient(a, b, q) > 0.0 {
                wn += 1;
            }
        } else if b[1] <= q[1] && orient(a, b, q) < 0.0 {
            wn -= 1;
        }
    }
    wn != 0
}

/// Traces the boundary of the unbounded face of the straight-line drawing
/// of `g` with vertices at the centers of `p`.
pub fn boundary_walk(g: &IntersectionGraph, p: &Packing) -> Result<BoundaryWalk> {
    require_dim(p, 2)?;
    if p.is_empty() {
        return Err(Error::EmptyPacking);
    }
    if g.vertex_count != p.len() {
        return Err(Error::Parse(format!("graph has {} vertices, packing has {} centers", g.vertex_count, p.len())));
    }
    check_plane(g, p)?;

    let angle = |u: usize, v: usize| {
        let (a, b) = (point(p, u), point(p, v));
        (b[1] - a[1]).atan2(b[0] - a[0])
    };
    let mut rot = g.adjacency();
    for (u, nbrs) in rot.iter_mut().enumerate() {
        nbrs.sort_by(|&a, &b| angle(u, a).total_cmp(&angle(u, b)));
    }
    // position of each neighbor in the rotation, and edge ids
    let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
    for (u, nbrs) in rot.iter().enumerate() {
        for (k, &v) in nbrs.iter().enumerate() {
            slot.insert((u, v), k);
        }
    }
    let edge_id: HashMap<(usize, usize), usize> =
        g.edges.iter().enumerate().map(|(k, &(a, b))| ((a.min(b), a.max(b)), k)).collect();

    let mut walks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for comp in components(p.len(), &rot) {
        let v = *comp
            .iter()
            .min_by(|&&a, &&b| {
                let (pa, pb) = (point(p, a), point(p, b));
                pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1]))
            })
            .expect("components are nonempty");
        let Some(&w) = rot[v].last() else {
            walks.push((vec![v], Vec::new()));
            continue;
        };
        let start = (v, w);
        let (mut verts, mut edges) = (Vec::new(), Vec::new());
        let mut dart = start;
        loop {
            let (a, b) = dart;
            verts.push(a);
            edges.push(edge_id[&(a.min(b), a.max(b))]);
            let around = &rot[b];
            let k = slot[&(b, a)];
            let next = around[(k + around.len() - 1) % around.len()];
            dart = (b, next);
            if dart == start {
                break;
            }
        }
        walks.push((verts, edges));
    }

    // drop components sitting inside a bounded face of another one
    let polys: Vec<Vec<[f64; 2]>> = walks.iter().map(|(vs, _)| vs.iter().map(|&v| point(p, v)).collect()).collect();
    let outer: Vec<bool> = (0..walks.len())
        .map(|i| {
            let q = polys[i][0];
            !(0..walks.len()).any(|j| j != i && polys[j].len() >= 3 && encloses(&polys[j], q))
        })
        .collect();

    let mut cycles = Vec::new();
    let mut vertex_cycles = Vec::new();
    let mut perim = 0.0;
    for ((verts, edges), keep) in walks.into_iter().zip(outer) {
        if !keep {
            continue;
        }
        perim += edges.iter().map(|&e| p.dist(g.edges[e].0, g.edges[e].1)).sum::<f64>();
        cycles.push(edges);
        vertex_cycles.push(verts);
    }
    let s = cycles.len();
    Ok(BoundaryWalk { cycles, vertex_cycles, perim, s })
}
