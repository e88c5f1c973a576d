use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use softpack::bounds::{bound_table, bound_table_long, bound_table_wide, constants as named_constants, McOptions};
use softpack::geom2d::union_area_exact;
use softpack::geom3d::{bcc_covering_check, union_volume_exact};
use softpack::io::read_packing;
use softpack::montecarlo::{union_measure_mc, unit_ball_volume};
use softpack::optimizer::{optimize as run_optimizer, OptimizerConfig};
use softpack::packing::pairwise_limit;
use softpack::table::{fmt12, CsvTable};
use softpack::{classify_regime, contact_count, lambda_graph, validate_packing, LatticeKind, Regime, DEFAULT_TOL};

use crate::{Failure, LatticeCheck, RunInfo};

type Outcome = Result<(), Failure>;

fn with_info(t: CsvTable, info: &RunInfo) -> CsvTable {
    t.meta("version", env!("CARGO_PKG_VERSION")).meta("seed", info.seed).meta("flags", &info.flags)
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn bounds(
    info: &RunInfo,
    dim: usize,
    (lo, hi, steps): (f64, f64, usize),
    samples: u64,
    long: bool,
    json: bool,
    out: Option<&Path>,
) -> Outcome {
    if !(lo >= 0.0 && hi.is_finite() && lo <= hi) {
        return Err(Failure::Usage(format!("need 0 <= lambda-min <= lambda-max, got [{lo}, {hi}]")));
    }
    if steps == 0 {
        return Err(Failure::Usage("steps must be at least 1".into()));
    }
    let lambdas: Vec<f64> = if steps == 1 {
        vec![lo]
    } else {
        (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
    };
    let reports = bound_table(dim, &lambdas, McOptions { samples, seed: info.seed })?;
    let text = if json {
        let mut s = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Input(e.to_string()))?;
        s.push('\n');
        s
    } else if long {
        with_info(bound_table_long(&reports), info).render()
    } else {
        with_info(bound_table_wide(&reports), info).render()
    };
    emit(&text, out)
}

pub fn density(info: &RunInfo, path: &Path, lambda: f64, mc: Option<(u64, u64)>) -> Outcome {
    let p = read_packing(path).map_err(|e| Failure::Input(e.to_string()))?;
    let report = validate_packing(&p, DEFAULT_TOL)?;
    if !report.valid {
        let (i, j) = report.offending_pair.unwrap_or((0, 0));
        return Err(Failure::Input(format!(
            "not a packing: centers {i} and {j} are {} apart",
            report.min_pair_distance
        )));
    }
    let infl = classify_regime(p.dim(), lambda)?;
    let d = p.dim();
    let exact = match (infl.regime, d) {
        (Regime::Pairwise, 2) => Some(union_area_exact(&p, &infl)?),
        (Regime::Pairwise, 3) => Some(union_volume_exact(&p, &infl)?),
        _ => None,
    };
    // outside the exact cases Monte Carlo is the only estimate
    let mc = match (mc, exact) {
        (Some((samples, seed)), _) => Some(union_measure_mc(&p, infl.lambda_bar, samples, seed)?),
        (None, None) => Some(union_measure_mc(&p, infl.lambda_bar, 1_000_000, info.seed)?),
        (None, Some(_)) => None,
    };
    let measure = exact.or(mc.map(|e| e.value)).expect("exact or estimate");
    let mut t = with_info(CsvTable::new(["quantity", "value"]), info);
    let mut row = |k: &str, v: String| t.push(vec![k.to_string(), v]);
    row("n", p.len().to_string());
    row("dim", d.to_string());
    row("lambda", fmt12(lambda));
    row("regime", format!("{:?}", infl.regime).to_lowercase());
    if let Some(v) = exact {
        row("measure_exact", fmt12(v));
    }
    if let Some(e) = mc {
        row("measure_mc", fmt12(e.value));
        row("measure_mc_stderr", fmt12(e.stderr));
        row("mc_samples", e.samples.to_string());
        row("mc_seed", e.seed.to_string());
    }
    row("density", fmt12(p.len() as f64 * unit_ball_volume(d) / measure));
    row("contacts", contact_count(&p, DEFAULT_TOL).to_string());
    row("lambda_edges", lambda_graph(&p, &infl, DEFAULT_TOL).edge_count().to_string());
    emit(&t.render(), None)
}

fn history_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "optimize".into());
    out.with_file_name(format!("{stem}.history.csv"))
}

pub fn optimize(
    info: &RunInfo,
    n: usize,
    dim: usize,
    lambda: f64,
    restarts: usize,
    iters: usize,
    out: Option<&Path>,
) -> Outcome {
    let cfg = OptimizerConfig { restarts, max_iters: iters, seed: info.seed, ..OptimizerConfig::default() };
    let r = run_optimizer(n, dim, lambda, &cfg)?;
    if let Some(path) = out {
        let json = r.to_json()?;
        let mut text = serde_json::to_string_pretty(&json).map_err(|e| Failure::Input(e.to_string()))?;
        text.push('\n');
        emit(&text, Some(path))?;
        emit(&with_info(r.history_csv(), info).render(), Some(&history_path(path)))?;
    }
    let mut t = with_info(CsvTable::new(["quantity", "value"]), info);
    let mut row = |k: &str, v: String| t.push(vec![k.to_string(), v]);
    row("n", n.to_string());
    row("dim", dim.to_string());
    row("lambda", fmt12(lambda));
    row("objective", fmt12(r.objective));
    row("density", fmt12(r.density));
    row("contacts", r.contact_count.to_string());
    row("lambda_edges", r.lambda_edge_count.to_string());
    row("best_restart", r.best_restart.to_string());
    row("converged", r.converged.to_string());
    row("near_kink", r.near_kink.to_string());
    emit(&t.render(), None)
}

fn reference_density(kind: LatticeKind) -> f64 {
    match kind {
        LatticeKind::Hexagonal2d => PI / 12f64.sqrt(),
        LatticeKind::Square2d => PI / 4.0,
        LatticeKind::Fcc3d => PI / 18f64.sqrt(),
        LatticeKind::Bcc3d => PI * 3f64.sqrt() / 8.0,
    }
}

fn reference_covering(kind: LatticeKind) -> f64 {
    match kind {
        LatticeKind::Hexagonal2d => pairwise_limit(),
        LatticeKind::Square2d | LatticeKind::Fcc3d => 2f64.sqrt(),
        LatticeKind::Bcc3d => (5.0f64 / 3.0).sqrt(),
    }
}

pub fn lattice(kind: &str, check: LatticeCheck, samples: u64, seed: u64) -> Outcome {
    let kind: LatticeKind = kind.parse()?;
    let (what, value, reference) = match check {
        LatticeCheck::Density => ("density", kind.density(), reference_density(kind)),
        LatticeCheck::Covering => ("covering_radius", kind.covering_radius(), reference_covering(kind)),
    };
    let dev = (value - reference).abs();
    let mut ok = dev <= 1e-9;
    println!("{kind} {what} {} (reference {}, deviation {dev:.3e})", fmt12(value), fmt12(reference));
    if kind == LatticeKind::Bcc3d && check == LatticeCheck::Covering {
        let at = bcc_covering_check(value, samples, seed)?;
        let below = bcc_covering_check(1.25, samples, seed.wrapping_add(1))?;
        let full = at.within_sigma(1.0, 3.0);
        let short = 1.0 - below.value > 3.0 * below.stderr;
        println!("covered fraction at {}: {} ± {:.3e}", fmt12(value), fmt12(at.value), at.stderr);
        println!("covered fraction at 1.25: {} ± {:.3e}", fmt12(below.value), below.stderr);
        ok &= full && short;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(1))
    }
}

pub fn constants() -> Outcome {
    let c = named_constants()?;
    println!("phi0 {}", fmt12(c.phi0));
    println!("psi0 {}", fmt12(c.psi0));
    println!("lambda_bar_root {}", fmt12(c.lambda_bar_root));
    println!("pairwise_limit {}", fmt12(pairwise_limit()));
    println!("fcc_density {}", fmt12(reference_density(LatticeKind::Fcc3d)));
    println!("bcc_covering_radius {}", fmt12(reference_covering(LatticeKind::Bcc3d)));
    Ok(())
}
