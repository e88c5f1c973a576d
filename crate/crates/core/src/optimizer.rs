//! Search for packings of `n` unit balls whose inflated union has least
//! measure at a fixed λ in the pairwise regime.
//!
//! Each restart runs projected descent: a gradient step plus annealing
//! jitter, then iterated pairwise push-apart until every center distance is
//! at least 2. Moves are accepted by the Metropolis rule. Restarts draw
//! from the substream `(seed, restart)` and run in parallel.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Interval, Result};
use crate::geom2d::{lens_area_slope, lens_area_unchecked};
use crate::geom3d::{lens_volume_slope, lens_volume_unchecked};
use crate::io::packing_to_json;
use crate::montecarlo::{substream, unit_ball_volume};
use crate::packing::{
    classify_regime, contact_count, intersection_graph, lambda_graph, lattice_patch, random_cluster, require_valid,
    Inflation, LatticeKind, Packing, DEFAULT_TOL,
};
use crate::table::{fmt12, CsvTable};

/// Pairs this close to `2λ̄` are reported as sitting on the kink of the
/// objective.
pub const KINK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial gradient step length.
    pub init_step: f64,
    /// Per-iteration temperature factor, in `(0, 1)`.
    pub cooling: f64,
    /// Largest overlap left by the projection.
    pub projection_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 16, max_iters: 1500, init_step: 0.05, cooling: 0.995, projection_tol: 1e-12, seed: 1 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::NegativeInput { name, value: v })
            }
        };
        positive("restarts", self.restarts as f64)?;
        positive("max_iters", self.max_iters as f64)?;
        positive("init_step", self.init_step)?;
        positive("projection_tol", self.projection_tol)?;
        Interval::open(0.0, 1.0).check("cooling", self.cooling)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerResult {
    pub n: usize,
    pub dim: usize,
    pub lambda: f64,
    pub best: Packing,
    pub objective: f64,
    /// `n ω_d / objective`.
    pub density: f64,
    pub contact_count: usize,
    pub lambda_edge_count: usize,
    /// `(iteration, objective)` of the accepted iterates of the winning restart.
    pub history: Vec<(usize, f64)>,
    pub best_restart: usize,
    /// False when the winning restart was still improving in its last tenth
    /// of iterations.
    pub converged: bool,
    pub near_kink: bool,
}

fn require_opt_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::WrongDimension { expected: 2, found: d })
    }
}

fn lens(d: usize, lb: f64, s: f64) -> f64 {
    if d == 2 {
        lens_area_unchecked(lb, s)
    } else {
        lens_volume_unchecked(lb, s)
    }
}

fn lens_slope(d: usize, lb: f64, s: f64) -> f64 {
    if d == 2 {
        lens_area_slope(lb, s)
    } else {
        lens_volume_slope(lb, s)
    }
}

/// Union measure without validating the packing; meaningful only when no
/// three inflated balls meet.
pub fn objective_raw(p: &Packing, lambda_bar: f64) -> f64 {
    let d = p.dim();
    let lenses: f64 = p.pairs().map(|(_, _, s)| lens(d, lambda_bar, s)).sum();
    p.len() as f64 * unit_ball_volume(d) * lambda_bar.powi(d as i32) - lenses
}

/// Exact measure of the inflated union (area in 2D, volume in 3D).
pub fn objective(p: &Packing, infl: &Inflation) -> Result<f64> {
    require_opt_dim(p.dim())?;
    infl.require_pairwise()?;
    require_valid(p, DEFAULT_TOL)?;
    Ok(objective_raw(p, infl.lambda_bar))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gradient {
    /// One vector per center.
    pub grad: Vec<Vec<f64>>,
    /// Some pair sits within [`KINK_TOL`] of `2λ̄`, where the one-sided
    /// derivative 0 is used.
    pub near_kink: bool,
}

fn gradient_flat(p: &Packing, lb: f64, out: &mut [f64]) -> bool {
    let d = p.dim();
    out.fill(0.0);
    let mut kink = false;
    for (i, j, s) in p.pairs() {
        if (s - 2.0 * lb).abs() < KINK_TOL {
            kink = true;
            continue;
        }
        let slope = lens_slope(d, lb, s);
        if slope == 0.0 || s == 0.0 {
            continue;
        }
        // objective = const − Σ lens(s_ij)
        let (ci, cj) = (p.center(i), p.center(j));
        for k in 0..d {
            let g = -slope * (ci[k] - cj[k]) / s;
            out[i * d + k] += g;
            out[j * d + k] -= g;
        }
    }
    kink
}

/// Gradient of the union measure with respect to the centers.
pub fn gradient(p: &Packing, infl: &Inflation) -> Result<Gradient> {
    require_opt_dim(p.dim())?;
    infl.require_pairwise()?;
    let mut flat = vec![0.0; p.coords().len()];
    let near_kink = gradient_flat(p, infl.lambda_bar, &mut flat);
    Ok(Gradient { grad: flat.chunks(p.dim()).map(<[f64]>::to_vec).collect(), near_kink })
}

/// Pushes overlapping pairs apart symmetrically until no pair is closer
/// than `2 − tol`. Returns false if that did not happen within the sweep
/// budget.
pub fn project(p: &mut Packing, tol: f64) -> bool {
    let (n, d) = (p.len(), p.dim());
    for _ in 0..20_000 {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let s = p.dist(i, j);
                if s >= 2.0 {
                    continue;
                }
                worst = worst.max(2.0 - s);
                let coords = p.coords_mut();
                let mut dir: Vec<f64> = (0..d).map(|k| coords[i * d + k] - coords[j * d + k]).collect();
                if s < 1e-12 {
                    dir.fill(0.0);
                    dir[0] = 1.0;
                } else {
                    dir.iter_mut().for_each(|x| *x /= s);
                }
                let half = (2.0 - s) / 2.0;
                for k in 0..d {
                    coords[i * d + k] += dir[k] * half;
                    coords[j * d + k] -= dir[k] * half;
                }
            }
        }
        if worst <= tol {
            return true;
        }
    }
    false
}

fn reference_lattice(d: usize) -> LatticeKind {
    if d == 2 {
        LatticeKind::Hexagonal2d
    } else {
        LatticeKind::Fcc3d
    }
}

fn patch_with_at_least(kind: LatticeKind, n: usize) -> Result<Packing> {
    let mut extent = 1;
    loop {
        let p = lattice_patch(kind, extent)?;
        if p.len() >= n {
            return Ok(p);
        }
        extent += 1;
    }
}

/// The first `n` points of a lattice patch in breadth-first order.
pub fn lattice_seed(n: usize, d: usize) -> Result<Packing> {
    require_opt_dim(d)?;
    let patch = patch_with_at_least(reference_lattice(d), n)?;
    Packing::from_flat(d, patch.coords()[..n * d].to_vec())
}

/// `n` lattice points grown as a random connected cluster in the contact
/// graph of a patch.
fn random_lattice_subset(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Packing> {
    let patch = patch_with_at_least(reference_lattice(d), n)?;
    let adj = intersection_graph(&patch, 2.0, DEFAULT_TOL).adjacency();
    let mut chosen = vec![rng.random_range(0..patch.len())];
    let mut inside = vec![false; patch.len()];
    inside[chosen[0]] = true;
    while chosen.len() < n {
        let frontier: Vec<usize> =
            chosen.iter().flat_map(|&v| adj[v].iter().copied()).filter(|&w| !inside[w]).collect();
        let next = frontier[rng.random_range(0..frontier.len())];
        inside[next] = true;
        chosen.push(next);
    }
    let coords = chosen.iter().flat_map(|&v| patch.center(v).to_vec()).collect();
    Packing::from_flat(d, coords)
}

fn jitter(p: &mut Packing, scale: f64, rng: &mut ChaCha8Rng) {
    for x in p.coords_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *x += scale * z;
    }
}

fn initial(n: usize, d: usize, restart: usize, tol: f64, rng: &mut ChaCha8Rng) -> Result<Packing> {
    let mut p = match restart % 4 {
        0 if restart == 0 => return lattice_seed(n, d),
        0 => {
            let mut p = lattice_seed(n, d)?;
            jitter(&mut p, 0.3, rng);
            p
        }
        1 => {
            let mut p = random_lattice_subset(n, d, rng)?;
            jitter(&mut p, 0.3, rng);
            p
        }
        _ => random_cluster(n, d, 0.6, rng),
    };
    project(&mut p, tol);
    Ok(p)
}

struct RunOutcome {
    best: Packing,
    best_obj: f64,
    history: Vec<(usize, f64)>,
    converged: bool,
}

fn run_restart(n: usize, d: usize, lb: f64, cfg: &OptimizerConfig, restart: usize) -> Result<RunOutcome> {
    let mut rng = substream(cfg.seed, restart as u64);
    let mut cur = initial(n, d, restart, cfg.projection_tol, &mut rng)?;
    let mut cur_obj = objective_raw(&cur, lb);
    let mut best = cur.clone();
    let mut best_obj = cur_obj;
    let mut history = vec![(0, cur_obj)];
    let mut step = cfg.init_step;
    let mut temperature = 1e-3 * cur_obj;
    let mut grad = vec![0.0; n * d];
    let tail_start = cfg.max_iters - cfg.max_iters / 10;
    let mut obj_at_tail = best_obj;

    for iter in 1..=cfg.max_iters {
        if iter == tail_start {
            obj_at_tail = best_obj;
        }
        gradient_flat(&cur, lb, &mut grad);
        let mut cand = cur.clone();
        for (x, g) in cand.coords_mut().iter_mut().zip(&grad) {
            *x -= step * g;
        }
        jitter(&mut cand, step * temperature / (1e-3 * best_obj), &mut rng);
        temperature *= cfg.cooling;
        if !project(&mut cand, cfg.projection_tol) {
            step *= 0.5;
            continue;
        }
        let cand_obj = objective_raw(&cand, lb);
        let delta = cand_obj - cur_obj;
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
        if accept {
            step = if delta < 0.0 { (step * 1.2).min(4.0 * cfg.init_step) } else { step * 0.8 };
            cur = cand;
            cur_obj = cand_obj;
            history.push((iter, cur_obj));
            if cur_obj < best_obj {
                best_obj = cur_obj;
                best = cur.clone();
            }
        } else {
            step = (step * 0.7).max(1e-9);
        }
    }
    let converged = obj_at_tail - best_obj <= 1e-12 * best_obj.abs().max(1.0);
    Ok(RunOutcome { best, best_obj, history, converged })
}

/// Best-of-restarts minimization of the inflated union measure over
/// packings of `n` unit balls in dimension 2 or 3.
pub fn optimize(n: usize, d: usize, lambda: f64, config: &OptimizerConfig) -> Result<OptimizerResult> {
    if n < 2 {
        return Err(Error::Domain { what: "n", value: n as f64, domain: Interval::closed(2.0, f64::INFINITY) });
    }
    require_opt_dim(d)?;
    config.validate()?;
    let infl = classify_regime(d, lambda)?;
    infl.require_pairwise()?;
    let lb = infl.lambda_bar;

    let runs =
        (0..config.restarts).into_par_iter().map(|r| run_restart(n, d, lb, config, r)).collect::<Result<Vec<_>>>()?;
    let (best_restart, win) = runs
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.best_obj.total_cmp(&b.1.best_obj).then(a.0.cmp(&b.0)))
        .expect("at least one restart");

    let obj = objective(&win.best, &infl)?;
    let mut flat = vec![0.0; n * d];
    let near_kink = gradient_flat(&win.best, lb, &mut flat);
    Ok(OptimizerResult {
        n,
        dim: d,
        lambda,
        density: n as f64 * unit_ball_volume(d) / obj,
        contact_count: contact_count(&win.best, DEFAULT_TOL),
        lambda_edge_count: lambda_graph(&win.best, &infl, DEFAULT_TOL).edge_count(),
        objective: obj,
        best: win.best,
        history: win.history,
        best_restart,
        converged: win.converged,
        near_kink,
    })
}

impl OptimizerResult {
    /// The best packing in the packing file format plus the run summary.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let packing: serde_json::Value = serde_json::from_str(&packing_to_json(&self.best)?)?;
        Ok(serde_json::json!({
            "dim": self.dim,
            "centers": packing["centers"],
            "n": self.n,
            "lambda": self.lambda,
            "objective": self.objective,
            "density": self.density,
            "contact_count": self.contact_count,
            "lambda_edge_count": self.lambda_edge_count,
            "best_restart": self.best_restart,
            "converged": self.converged,
            "near_kink": self.near_kink,
        }))
    }

    pub fn history_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(["iteration", "objective"]);
        for &(i, v) in &self.history {
            t.push(vec![i.to_string(), fmt12(v)]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub lambda: f64,
    pub objective: f64,
    pub density: f64,
    pub contact_count: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub dim: usize,
    pub rows: Vec<ProbeRow>,
    /// Largest contact count seen on the grid.
    pub max_contacts: usize,
    /// Number of leading grid points whose best packing attains `max_contacts`.
    pub maximal_prefix: usize,
}

/// Optimizes at every λ of the grid and records the contact count of the
/// best packing found.
pub fn contact_link_probe(n: usize, d: usize, lambdas: &[f64], config: &OptimizerConfig) -> Result<ProbeReport> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let r = optimize(n, d, lambda, config)?;
        rows.push(ProbeRow {
            lambda,
            objective: r.objective,
            density: r.density,
            contact_count: r.contact_count,
            converged: r.converged,
        });
    }
    let max_contacts = rows.iter().map(|r| r.contact_count).max().unwrap_or(0);
    let maximal_prefix = rows.iter().take_while(|r| r.contact_count == max_contacts).count();
    Ok(ProbeReport { n, dim: d, rows, max_contacts, maximal_prefix })
}

/// Objective of the unit triangle of three tangent disks.
pub fn triangle_objective(lambda_bar: f64) -> f64 {
    3.0 * PI * lambda_bar * lambda_bar - 3.0 * lens_area_unchecked(lambda_bar, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::validate_packing;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 8, max_iters: 600, ..Default::default() }
    }

    #[test]
    fn objective_examples() {
        let infl = classify_regime(2, 0.1).unwrap();
        let two = Packing::new(2, &[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(close(objective(&two, &infl).unwrap(), 2.0 * PI * 1.21 - 0.123358053095, 1e-11));
        let apart = Packing::new(2, &[vec![0.0, 0.0], vec![2.2, 0.0]]).unwrap();
        assert!(close(objective(&apart, &infl).unwrap(), 2.0 * PI * 1.21, 1e-12));
        let one = Packing::new(2, &[vec![0.0, 0.0]]).unwrap();
        assert!(close(objective(&one, &infl).unwrap(), PI * 1.21, 1e-12));
        let beyond = classify_regime(2, 0.3).unwrap();
        assert!(objective(&two, &beyond).is_err());
    }

    #[test]
    fn gradient_of_symmetric_pair() {
        let infl = classify_regime(3, 0.1).unwrap();
        let p = Packing::new(3, &[vec![0.0; 3], vec![2.1, 0.0, 0.0]]).unwrap();
        let g = gradient(&p, &infl).unwrap();
        for k in 0..3 {
            assert!(close(g.grad[0][k], -g.grad[1][k], 1e-15));
        }
        // the objective drops as the pair moves together
        assert!(g.grad[0][0] < 0.0);
        assert!(!g.near_kink);
        let far = Packing::new(3, &[vec![0.0; 3], vec![3.0, 0.0, 0.0]]).unwrap();
        assert!(gradient(&far, &infl).unwrap().grad.iter().flatten().all(|&x| x == 0.0));
        let kink = Packing::new(3, &[vec![0.0; 3], vec![2.2, 0.0, 0.0]]).unwrap();
        assert!(gradient(&kink, &infl).unwrap().near_kink);
    }

    #[test]
    fn projection_restores_feasibility() {
        let mut p = Packing::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 0.0]]).unwrap();
        assert!(project(&mut p, 1e-12));
        assert!(validate_packing(&p, 1e-9).unwrap().valid);
    }

    #[test]
    fn pair_becomes_tangent() {
        let r = optimize(2, 2, 0.1, &quick()).unwrap();
        assert_eq!(r.contact_count, 1);
        assert!(close(r.objective, 2.0 * PI * 1.21 - 0.123358053095, 1e-9));
        let r3 = optimize(2, 3, 0.1, &quick()).unwrap();
        let expect = 2.0 * 4.0 * PI / 3.0 * 1.331 - lens_volume_unchecked(1.1, 2.0);
        assert!(close(r3.objective, expect, 1e-9));
    }

    #[test]
    fn three_disks_form_a_triangle() {
        let r = optimize(3, 2, 0.05, &quick()).unwrap();
        assert_eq!(r.contact_count, 3);
        assert!(close(r.objective, triangle_objective(1.05), 1e-9));
        assert!(validate_packing(&r.best, 1e-9).unwrap().valid);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = OptimizerConfig { restarts: 4, max_iters: 200, seed: 9, ..Default::default() };
        let a = optimize(5, 2, 0.1, &cfg).unwrap();
        let b = optimize(5, 2, 0.1, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(optimize(1, 2, 0.1, &quick()).is_err());
        assert!(optimize(3, 4, 0.1, &quick()).is_err());
        assert!(optimize(3, 2, 0.2, &quick()).is_err());
        let bad = OptimizerConfig { cooling: 1.0, ..quick() };
        assert!(optimize(3, 2, 0.1, &bad).is_err());
    }

    #[test]
    fn dump_formats() {
        let cfg = OptimizerConfig { restarts: 2, max_iters: 50, ..Default::default() };
        let r = optimize(3, 2, 0.05, &cfg).unwrap();
        let v = r.to_json().unwrap();
        assert_eq!(v["centers"].as_array().unwrap().len(), 3);
        let back = crate::io::packing_from_json(&v.to_string()).unwrap();
        assert_eq!(back, r.best);
        assert_eq!(r.history_csv().header(), ["iteration", "objective"]);
    }
}
