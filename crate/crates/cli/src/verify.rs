//! Verification suites behind `softpack verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use softpack::bounds::{constants, scan_inequality, theorem5_bound, theorem8_bound, Inequality};
use softpack::geom2d::{boundary_walk, groemer_rhs, sigma_bar2, union_area_exact, GroemerVariant};
use softpack::geom3d::{
    bcc_covering_check, fcc_density_check, sigma3, sigma3_printed, sigma_bar3, tetra_union_volume, tetra_volume,
};
use softpack::packing::{pairwise_limit, random_cluster};
use softpack::simplexnd::{gram_identity_check, sigma_bar_d_mc};
use softpack::{classify_regime, lambda_graph, lattice_patch, LatticeKind, Packing, Result, DEFAULT_TOL};

use crate::{Failure, Suite};

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.failed += usize::from(!pass);
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn open_grid(n: usize) -> Vec<f64> {
    let top = pairwise_limit() - 1.0;
    (1..=n).map(|i| top * i as f64 / (n + 1) as f64).collect()
}

fn groemer_slack(p: &Packing, lambda: f64) -> Result<f64> {
    let infl = classify_regime(2, lambda)?;
    let walk = boundary_walk(&lambda_graph(p, &infl, DEFAULT_TOL), p)?;
    Ok(union_area_exact(p, &infl)? - groemer_rhs(p.len(), walk.perim, infl.lambda_bar, GroemerVariant::Theorem6)?)
}

fn scan(r: &mut Report, which: Inequality, grid: usize) -> Result<()> {
    let s = scan_inequality(which, grid.max(50))?;
    r.check(
        which.name(),
        s.min >= -1e-9,
        format!(
            "grid minimum {:.3e} at (t, λ̄) = ({:.6}, {:.6}) over {} points",
            s.min, s.argmin.0, s.argmin.1, s.evaluations
        ),
    );
    Ok(())
}

fn groemer(r: &mut Report, grid: usize, seed: u64) -> Result<()> {
    let lambdas = open_grid(grid.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(1..=15);
        let p = random_cluster(n, 2, 0.35, &mut rng);
        for &l in &lambdas {
            worst = worst.min(groemer_slack(&p, l)?);
        }
    }
    r.check("inequality on random packings", worst >= -1e-9, format!("min slack {worst:.3e}"));
    let mut eq = 0.0f64;
    for extent in 1..=3 {
        let p = lattice_patch(LatticeKind::Hexagonal2d, extent)?;
        for &l in &lambdas {
            eq = eq.max(groemer_slack(&p, l)?.abs());
        }
    }
    r.check("equality on hexagonal patches", eq <= 1e-9, format!("max |slack| {eq:.3e}"));
    scan(r, Inequality::GroemerBoundaryF, grid)?;
    scan(r, Inequality::GroemerInteriorG, grid)
}

fn sigma_consistency(r: &mut Report, grid: usize, samples: u64, seed: u64) -> Result<()> {
    let (mut w5, mut w8, mut printed, mut top) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for l in open_grid(grid.max(1)) {
        let (t5, s3, t8, sb3) = (theorem5_bound(l)?, sigma3(l)?, theorem8_bound(l)?, sigma_bar3(l)?);
        w5 = w5.max(t5 - s3);
        w8 = w8.max(t8 - sb3);
        printed = printed.max((sigma3_printed(l)? - s3).abs());
        top = top.max(t5).max(s3).max(t8).max(sb3);
    }
    r.check("theorem5 < sigma3", w5 < 0.0, format!("max difference {w5:.3e}"));
    r.check("theorem8 < sigma_bar3", w8 < 0.0, format!("max difference {w8:.3e}"));
    r.check("printed sigma3 form", printed <= 1e-12, format!("max deviation {printed:.3e}"));
    r.check("bounds at most one", top <= 1.0 + 1e-12, format!("max {top:.9}"));
    let mut z = 0.0f64;
    for (i, l) in [0.03, 0.08, 0.14].into_iter().enumerate() {
        let s = seed.wrapping_add(i as u64);
        let tri = sigma_bar_d_mc(2, l, samples, s)?;
        let tet = sigma_bar_d_mc(3, l, samples, s)?;
        z = z.max(tri.z_score(sigma_bar2(l)?)).max(tet.z_score(tetra_union_volume(1.0 + l)? / tetra_volume()));
    }
    r.check("closed forms against simplex Monte Carlo", z <= 3.0, format!("max |z| {z:.2} at {samples} samples"));
    Ok(())
}

fn gram(r: &mut Report) -> Result<()> {
    for d in 2..=10 {
        let w = gram_identity_check(d)?;
        r.check(&format!("gram d={d}"), w <= 1e-12, format!("max deviation {w:.3e}"));
    }
    Ok(())
}

fn named_constants(r: &mut Report) -> Result<()> {
    let c = constants()?;
    // printed digits are truncated, so they cover [p, p + 1e-6)
    for (name, v, p) in
        [("phi0", c.phi0, 0.615479), ("psi0", c.psi0, 0.052438), ("lambda_bar_root", c.lambda_bar_root, 2.926949)]
    {
        let pass = (v - (p + 5e-7)).abs() <= 5e-7;
        r.check(name, pass, format!("{v:.12} (reference {p}, difference {:.3e})", v - p));
    }
    Ok(())
}

fn covering(r: &mut Report, samples: u64, seed: u64) -> Result<()> {
    let fcc = fcc_density_check();
    let err = (fcc - PI / 18f64.sqrt()).abs();
    r.check("fcc density", err <= 1e-9, format!("{fcc:.12} (deviation {err:.3e})"));
    let mu = (5.0f64 / 3.0).sqrt();
    let at = bcc_covering_check(mu, samples, seed)?;
    r.check("bcc covered at sqrt(5/3)", at.within_sigma(1.0, 3.0), format!("{:.9} ± {:.3e}", at.value, at.stderr));
    let below = bcc_covering_check(1.25, samples, seed.wrapping_add(1))?;
    r.check(
        "bcc not covered at 1.25",
        1.0 - below.value > 3.0 * below.stderr,
        format!("{:.9} ± {:.3e}", below.value, below.stderr),
    );
    Ok(())
}

pub fn run(suite: Suite, grid: usize, samples: u64, seed: u64) -> std::result::Result<(), Failure> {
    let mut r = Report { failed: 0 };
    match suite {
        Suite::Groemer => groemer(&mut r, grid, seed)?,
        Suite::RogersF => scan(&mut r, Inequality::RogersF, grid)?,
        Suite::SigmaConsistency => sigma_consistency(&mut r, grid, samples, seed)?,
        Suite::Gram => gram(&mut r)?,
        Suite::Constants => named_constants(&mut r)?,
        Suite::Covering => covering(&mut r, samples, seed)?,
    }
    if r.failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification(r.failed))
    }
}
