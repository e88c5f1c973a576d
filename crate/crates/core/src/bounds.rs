//! Closed-form density bounds, named constants, grid scans of the auxiliary
//! inequalities, and comparative bound tables.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Interval, Result};
use crate::geom2d::{delta2_exact, half_lens_at_contact, sigma2, sigma_bar2};
use crate::geom3d::{hajos_big_f_unchecked, sigma3, sigma_bar3};
use crate::montecarlo::unit_ball_volume;
use crate::packing::pairwise_limit;
use crate::simplexnd::sigma_pair_mc;
use crate::table::{fmt12, CsvTable};

/// `arctan(1/√2)`, half the dihedral angle of the regular tetrahedron.
pub fn phi0() -> f64 {
    (1.0 / 2f64.sqrt()).atan()
}

/// `−arctan(√(2/3)·tan(5φ₀))`.
pub fn psi0() -> f64 {
    -((2.0f64 / 3.0).sqrt() * (5.0 * phi0()).tan()).atan()
}

/// The function whose smallest root above 1 is Λ̄.
pub fn lambda_bar_residual(lb: f64) -> f64 {
    (3f64.sqrt() - lb * lb * PI / 2.0) * (lb - 1.0) - lb * (lb * lb - 1.0).sqrt() + lb.powi(3) * (1.0 / lb).acos()
}

/// Root of `f` in `[lo, hi]` by bisection; the endpoints must have opposite
/// signs.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotBracketed);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scans `(1, 4]` in steps of 1e-3 for the first sign change of the
/// residual, then bisects to 1e-12.
fn find_lambda_bar_root() -> Result<f64> {
    let step = 1e-3;
    let mut prev = 1.0 + step;
    let mut fprev = lambda_bar_residual(prev);
    let mut k = 2;
    loop {
        let x = 1.0 + k as f64 * step;
        if x > 4.0 + 1e-12 {
            return Err(Error::RootNotBracketed);
        }
        let fx = lambda_bar_residual(x);
        if fx == 0.0 || fx.signum() != fprev.signum() {
            return bisect(lambda_bar_residual, prev, x, 1e-12);
        }
        prev = x;
        fprev = fx;
        k += 1;
    }
}

/// Λ̄, the smallest root greater than one of [`lambda_bar_residual`].
pub fn lambda_bar_root() -> Result<f64> {
    static ROOT: OnceLock<Option<f64>> = OnceLock::new();
    ROOT.get_or_init(|| find_lambda_bar_root().ok()).ok_or(Error::RootNotBracketed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub phi0: f64,
    pub psi0: f64,
    pub lambda_bar_root: f64,
}

pub fn constants() -> Result<Constants> {
    Ok(Constants { phi0: phi0(), psi0: psi0(), lambda_bar_root: lambda_bar_root()? })
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::NegativeInput { name: "lambda", value: lambda });
    }
    Ok(())
}

/// `[d^(1/d) − 1, √2 − 1]`, or `None` when empty.
pub fn blichfeldt_domain(d: usize) -> Option<Interval> {
    let lo = (d as f64).powf(1.0 / d as f64) - 1.0;
    let hi = 2f64.sqrt() - 1.0;
    (lo <= hi + 1e-12).then_some(Interval::closed(lo, hi))
}

/// The Blichfeldt-type bound and whether `λ` lies in its domain. Endpoints
/// are compared with a 1e-12 allowance; for `d = 2, 4` the domain is the
/// single point `√2 − 1`.
pub fn blichfeldt_bound(d: usize, lambda: f64) -> Result<(f64, bool)> {
    check_d(d)?;
    check_lambda(lambda)?;
    let lb = 1.0 + lambda;
    let df = d as f64;
    let den = (2.0 - lb * lb) * df + 4.0;
    let value = if den > 0.0 { (2.0 * df + 4.0) / den * lb.powf(-df) } else { f64::NAN };
    let valid = blichfeldt_domain(d).is_some_and(|i| lambda >= i.lo - 1e-12 && lambda <= i.hi + 1e-12);
    Ok((value, valid))
}

/// Integral of the Blichfeldt gauge truncated at radius λ̄.
pub fn gauge_integral(d: usize, lambda: f64) -> Result<f64> {
    check_d(d)?;
    check_lambda(lambda)?;
    let lb = 1.0 + lambda;
    let df = d as f64;
    Ok(unit_ball_volume(d) * (lb.powf(df) - df * lb.powf(df + 2.0) / (2.0 * df + 4.0)))
}

fn pairwise_lambda() -> Interval {
    Interval::closed_open(0.0, pairwise_limit() - 1.0)
}

/// The rational bound in ψ₀ with its coefficients as printed.
pub fn theorem5_bound(lambda: f64) -> Result<f64> {
    pairwise_lambda().check("lambda", lambda)?;
    let (p, l) = (psi0(), lambda);
    let num = PI - 6.0 * p;
    Ok(num / (num + (3.0 * PI - 18.0 * p) * l - 18.0 * p * l * l - (PI + 6.0 * p) * l.powi(3)))
}

/// `f(1) / (λ̄³ f(1) − cap(λ̄, 1))`, the same bound assembled from the face
/// function at `x = 1` and the cap term.
pub fn theorem5_rederived(lambda: f64) -> Result<f64> {
    pairwise_lambda().check("lambda", lambda)?;
    let (p, l) = (psi0(), lambda);
    let num = PI - 6.0 * p;
    Ok(num / (num + (3.0 * PI - 18.0 * p) * l - (6.0 * PI + 18.0 * p) * l * l - (5.0 * PI + 6.0 * p) * l.powi(3)))
}

pub fn theorem8_bound(lambda: f64) -> Result<f64> {
    pairwise_lambda().check("lambda", lambda)?;
    let lb = 1.0 + lambda;
    let (f, s6) = (phi0(), 6f64.sqrt());
    let num = (20.0 * s6 * f - 4.0 * s6 * PI - 10.0 * PI) * lb.powi(3) + 18.0 * PI * lb * lb - 6.0 * PI;
    Ok(num / (3.0 * PI - 15.0 * f + 5.0 * 2f64.sqrt()))
}

/// Boundary-cell function; nonnegative for `1 ≤ x ≤ λ̄ ≤ 2/√3`.
pub fn groemer_boundary_f(x: f64, lb: f64) -> f64 {
    -(lb * lb / 2.0) * (x / lb).min(1.0).acos()
        + x / 2.0 * (lb * lb - x * x).max(0.0).sqrt()
        + (1.5 - x) * half_lens_at_contact(lb)
}

/// Interior-cell function with the per-angle coefficient `(3/π)·k(λ̄)`
/// that the per-cell area bound gives; zero at `α = π/6`.
pub fn groemer_interior_g(alpha: f64, lb: f64) -> f64 {
    interior_common(alpha, lb) + 3.0 / PI * alpha * half_lens_at_contact(lb)
}

/// Interior-cell function with coefficient `½(λ̄² arccos(1/λ̄) − √(λ̄² − 1))`
/// as printed (with `r = λ̄`). Negative at `α = π/6`.
pub fn groemer_interior_g_printed(alpha: f64, lb: f64) -> f64 {
    interior_common(alpha, lb) + 0.5 * alpha * half_lens_at_contact(lb)
}

fn interior_common(alpha: f64, lb: f64) -> f64 {
    let c = alpha.cos();
    -(lb * lb / 2.0) * (2.0 * c / (3f64.sqrt() * lb)).min(1.0).acos()
        + c / 3f64.sqrt() * (lb * lb - 4.0 / 3.0 * c * c).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    GroemerBoundaryF,
    GroemerInteriorG,
    GroemerInteriorGPrinted,
    #[serde(rename = "rogers_F")]
    RogersF,
}

impl Inequality {
    pub const ALL: [Inequality; 4] = [
        Inequality::GroemerBoundaryF,
        Inequality::GroemerInteriorG,
        Inequality::GroemerInteriorGPrinted,
        Inequality::RogersF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::GroemerBoundaryF => "groemer_boundary_f",
            Inequality::GroemerInteriorG => "groemer_interior_g",
            Inequality::GroemerInteriorGPrinted => "groemer_interior_g_printed",
            Inequality::RogersF => "rogers_F",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown { kind: "inequality", name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub min: f64,
    /// `(variable, lambda_bar)` at the minimum; the variable is `x` or `α`.
    pub argmin: (f64, f64),
    pub evaluations: usize,
}

/// Minimum of the named function over a `resolution × resolution` grid of
/// its domain: λ̄ on the outer axis, `x` or `α` on the inner one.
pub fn scan_inequality(which: Inequality, resolution: usize) -> Result<ScanResult> {
    if resolution < 50 {
        return Err(Error::Domain {
            what: "grid resolution",
            value: resolution as f64,
            domain: Interval::closed(50.0, f64::INFINITY),
        });
    }
    let top = pairwise_limit();
    let lerp = |a: f64, b: f64, k: usize| a + (b - a) * k as f64 / (resolution - 1) as f64;
    let mut best = ScanResult { min: f64::INFINITY, argmin: (f64::NAN, f64::NAN), evaluations: 0 };
    for i in 0..resolution {
        let (lb, lo, hi): (f64, f64, f64) = match which {
            Inequality::GroemerBoundaryF => {
                let lb = lerp(1.0, top, i);
                (lb, 1.0, lb)
            }
            Inequality::GroemerInteriorG | Inequality::GroemerInteriorGPrinted => {
                let lb = lerp(1.0, top, i);
                (lb, (3f64.sqrt() * lb / 2.0).min(1.0).acos().min(PI / 6.0), PI / 6.0)
            }
            Inequality::RogersF => {
                // λ̄ ranges over the open interval (1, 2/√3)
                let lb = 1.0 + (top - 1.0) * (i + 1) as f64 / (resolution + 1) as f64;
                (lb, 1.0, lb)
            }
        };
        for j in 0..resolution {
            let t = lerp(lo, hi, j);
            let v = match which {
                Inequality::GroemerBoundaryF => groemer_boundary_f(t, lb),
                Inequality::GroemerInteriorG => groemer_interior_g(t, lb),
                Inequality::GroemerInteriorGPrinted => groemer_interior_g_printed(t, lb),
                Inequality::RogersF => hajos_big_f_unchecked(t, lb),
            };
            best.evaluations += 1;
            if v < best.min {
                best.min = v;
                best.argmin = (t, lb);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    pub valid: bool,
    /// Empty for valid entries, otherwise the violated condition.
    pub domain_note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: usize,
    pub lambda: f64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { samples: 200_000, seed: 1 }
    }
}

fn entry(name: &str, r: Result<f64>, note: &str) -> BoundEntry {
    match r {
        Ok(value) => BoundEntry { name: name.into(), value, valid: true, domain_note: String::new(), stderr: None },
        Err(_) => {
            BoundEntry { name: name.into(), value: f64::NAN, valid: false, domain_note: note.into(), stderr: None }
        }
    }
}

const PAIRWISE_NOTE: &str = "requires 0 <= lambda < 2/sqrt(3) - 1";

/// One report per λ: the Blichfeldt bound in every dimension, δ₂, σ₂, σ̄₂
/// in the plane, σ₃, σ̄₃ and the two rational bounds in space, and Monte
/// Carlo σ_d, σ̄_d from dimension 4 on. Out-of-domain entries are flagged
/// with a NaN value.
pub fn bound_table(d: usize, lambdas: &[f64], mc: McOptions) -> Result<Vec<BoundReport>> {
    check_d(d)?;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        check_lambda(lambda)?;
        let mut entries = Vec::new();
        let (value, valid) = blichfeldt_bound(d, lambda)?;
        let note = match blichfeldt_domain(d) {
            _ if valid => String::new(),
            Some(_) => format!("requires {d}^(1/{d}) - 1 <= lambda <= sqrt(2) - 1"),
            None => format!("empty domain: {d}^(1/{d}) - 1 > sqrt(2) - 1"),
        };
        entries.push(BoundEntry { name: "blichfeldt".into(), value, valid, domain_note: note, stderr: None });
        match d {
            2 => {
                entries.push(entry("delta2", delta2_exact(lambda), "requires 0 < lambda < 2/sqrt(3) - 1"));
                entries.push(entry("sigma2", sigma2(lambda), PAIRWISE_NOTE));
                entries.push(entry("sigma_bar2", sigma_bar2(lambda), PAIRWISE_NOTE));
            }
            3 => {
                entries.push(entry("sigma3", sigma3(lambda), PAIRWISE_NOTE));
                entries.push(entry("sigma_bar3", sigma_bar3(lambda), PAIRWISE_NOTE));
                entries.push(entry("theorem5", theorem5_bound(lambda), PAIRWISE_NOTE));
                entries.push(entry("theorem5_rederived", theorem5_rederived(lambda), PAIRWISE_NOTE));
                entries.push(entry("theorem8", theorem8_bound(lambda), PAIRWISE_NOTE));
            }
            _ => {
                let note = format!("requires 0 <= lambda < sqrt(2*{d}/{}) - 1", d + 1);
                match sigma_pair_mc(d, lambda, mc.samples, mc.seed) {
                    Ok((s, sb)) => {
                        for (name, e) in [("sigma_d", s), ("sigma_bar_d", sb)] {
                            entries.push(BoundEntry {
                                name: name.into(),
                                value: e.value,
                                valid: true,
                                domain_note: String::new(),
                                stderr: Some(e.stderr),
                            });
                        }
                    }
                    Err(Error::Domain { .. }) => {
                        for name in ["sigma_d", "sigma_bar_d"] {
                            entries.push(entry(name, Err(Error::NoSamples), &note));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        out.push(BoundReport { d, lambda, entries });
    }
    Ok(out)
}

/// Long format: one row per (λ, bound).
pub fn bound_table_long(reports: &[BoundReport]) -> CsvTable {
    let mut t = CsvTable::new(["name", "d", "lambda", "value", "valid", "domain_note", "stderr"]);
    for r in reports {
        for e in &r.entries {
            t.push(vec![
                e.name.clone(),
                r.d.to_string(),
                fmt12(r.lambda),
                fmt12(e.value),
                e.valid.to_string(),
                e.domain_note.clone(),
                e.stderr.map(fmt12).unwrap_or_default(),
            ]);
        }
    }
    t
}

/// Wide format: one row per λ, one column per bound, and a final column
/// listing the flagged entries of the row.
pub fn bound_table_wide(reports: &[BoundReport]) -> CsvTable {
    let names: Vec<String> =
        reports.first().map(|r| r.entries.iter().map(|e| e.name.clone()).collect()).unwrap_or_default();
    let mut header = vec!["lambda".to_string()];
    header.extend(names.iter().cloned());
    header.push("invalid".into());
    let mut t = CsvTable::new(header);
    for r in reports {
        let mut row = vec![fmt12(r.lambda)];
        row.extend(r.entries.iter().map(|e| fmt12(e.value)));
        let flagged: Vec<&str> = r.entries.iter().filter(|e| !e.valid).map(|e| e.name.as_str()).collect();
        row.push(flagged.join(";"));
        t.push(row);
    }
    t
}
