//! The regular simplex of edge 2 and the Rogers orthoscheme in `d`
//! dimensions, and Monte Carlo values of σ_d and σ̄_d.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Interval, Result};
use crate::montecarlo::{measure_estimate, nested_ratio, tally, McEstimate, Region};
use crate::packing::simplex_circumradius;
use crate::table::{fmt12, CsvTable};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// Regular `d`-simplex with vertices `√2·e_i` in `R^(d+1)`, so every edge
/// has length 2.
#[derive(Debug, Clone, Serialize)]
pub struct SimplexModel {
    pub d: usize,
    pub vertices: Vec<Vec<f64>>,
}

pub fn regular_simplex(d: usize) -> Result<SimplexModel> {
    check_dim(d)?;
    let s = 2f64.sqrt();
    let vertices = (0..=d)
        .map(|i| {
            let mut v = vec![0.0; d + 1];
            v[i] = s;
            v
        })
        .collect();
    Ok(SimplexModel { d, vertices })
}

impl SimplexModel {
    pub fn circumradius(&self) -> f64 {
        let n = (self.d + 1) as f64;
        let centroid = self.vertices[0].iter().map(|_| 2f64.sqrt() / n).collect::<Vec<_>>();
        self.vertices[0].iter().zip(&centroid).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

impl Region for SimplexModel {
    fn ambient_dim(&self) -> usize {
        self.d + 1
    }

    fn measure(&self) -> f64 {
        let d = self.d as f64;
        let factorial: f64 = (1..=self.d).map(|k| k as f64).product();
        2f64.powf(d / 2.0) * (d + 1.0).sqrt() / factorial
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let mut total = 0.0;
        for x in out.iter_mut() {
            *x = Exp1.sample(rng);
            total += *x;
        }
        let scale = 2f64.sqrt() / total;
        for x in out.iter_mut() {
            *x *= scale;
        }
    }
}

/// The Rogers orthoscheme: `q_i` has its first `i + 1` coordinates equal to
/// `√2/(i + 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct Orthoscheme {
    pub q: Vec<Vec<f64>>,
}

pub fn orthoscheme(d: usize) -> Result<Orthoscheme> {
    check_dim(d)?;
    let s = 2f64.sqrt();
    let q = (0..=d)
        .map(|i| {
            let mut v = vec![0.0; d + 1];
            v[..=i].fill(s / (i + 1) as f64);
            v
        })
        .collect();
    Ok(Orthoscheme { q })
}

/// Largest deviation of `⟨q_i − q_0, q_j − q_0⟩` from `2i/(i + 1)` over
/// `1 ≤ i ≤ j ≤ d`.
pub fn gram_identity_check(d: usize) -> Result<f64> {
    let q = orthoscheme(d)?.q;
    let diff = |k: usize| q[k].iter().zip(&q[0]).map(|(a, b)| a - b).collect::<Vec<_>>();
    let mut worst = 0.0f64;
    for i in 1..=d {
        let qi = diff(i);
        for j in i..=d {
            let qj = diff(j);
            let g: f64 = qi.iter().zip(&qj).map(|(a, b)| a * b).sum();
            worst = worst.max((g - 2.0 * i as f64 / (i as f64 + 1.0)).abs());
        }
    }
    Ok(worst)
}

pub fn rogers_lambda_domain(d: usize) -> Interval {
    Interval::closed_open(0.0, simplex_circumradius(d) - 1.0)
}

/// Both simplex ratios from one sample stream: `σ_d`, the share of the
/// λ̄-ball cover of the simplex taken by the unit balls, and `σ̄_d`, the
/// covered fraction of the simplex.
pub fn sigma_pair_mc(d: usize, lambda: f64, samples: u64, seed: u64) -> Result<(McEstimate, McEstimate)> {
    let simplex = regular_simplex(d)?;
    rogers_lambda_domain(d).check("lambda", lambda)?;
    let lb2 = (1.0 + lambda).powi(2);
    let s = 2f64.sqrt();
    let [unit, inflated] = tally(&simplex, samples, seed, |x| {
        // |x − √2 e_j|² = |x|² − 2√2 x_j + 2
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let nearest = x.iter().fold(f64::INFINITY, |m, &xj| m.min(norm2 - 2.0 * s * xj + 2.0));
        [nearest <= 1.0, nearest <= lb2]
    })?;
    Ok((nested_ratio(unit, inflated, samples, seed), measure_estimate(inflated, samples, seed, 1.0)))
}

pub fn sigma_d_mc(d: usize, lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    Ok(sigma_pair_mc(d, lambda, samples, seed)?.0)
}

pub fn sigma_bar_d_mc(d: usize, lambda: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    Ok(sigma_pair_mc(d, lambda, samples, seed)?.1)
}

/// Rows of (d, λ, σ_d, stderr, σ̄_d, stderr, samples, seed).
pub fn sigma_table(d: usize, lambdas: &[f64], samples: u64, seed: u64) -> Result<CsvTable> {
    let mut t = CsvTable::new([
        "d",
        "lambda",
        "sigma_d",
        "sigma_d_stderr",
        "sigma_bar_d",
        "sigma_bar_d_stderr",
        "samples",
        "seed",
    ]);
    for &l in lambdas {
        let (s, sb) = sigma_pair_mc(d, l, samples, seed)?;
        t.push(vec![
            d.to_string(),
            fmt12(l),
            fmt12(s.value),
            fmt12(s.stderr),
            fmt12(sb.value),
            fmt12(sb.stderr),
            samples.to_string(),
            seed.to_string(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::simplex_measure;

    #[test]
    fn simplex_construction() {
        for d in 2..=6 {
            let s = regular_simplex(d).unwrap();
            for i in 0..=d {
                for j in i + 1..=d {
                    let e: f64 = s.vertices[i].iter().zip(&s.vertices[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                    assert!((e.sqrt() - 2.0).abs() < 1e-12);
                }
            }
            assert!((s.measure() - simplex_measure(&s.vertices).unwrap()).abs() < 1e-12);
            assert!((s.circumradius() - simplex_circumradius(d)).abs() < 1e-12);
        }
        assert!((regular_simplex(3).unwrap().circumradius() - 1.5f64.sqrt()).abs() < 1e-12);
        assert!(regular_simplex(1).is_err());
    }

    #[test]
    fn orthoscheme_points() {
        let o = orthoscheme(3).unwrap();
        assert_eq!(o.q[0], vec![2f64.sqrt(), 0.0, 0.0, 0.0]);
        assert_eq!(o.q[3].iter().filter(|&&x| x != 0.0).count(), 4);
        let d2 = orthoscheme(2).unwrap();
        let v: Vec<f64> = d2.q[2].iter().zip(&d2.q[0]).map(|(a, b)| a - b).collect();
        let g: f64 = v.iter().map(|x| x * x).sum();
        assert!((g - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gram_identities() {
        for d in 2..=10 {
            assert!(gram_identity_check(d).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn sampler_stays_in_simplex() {
        let s = regular_simplex(4).unwrap();
        let pts = crate::montecarlo::PointStream::new(&s, 1000, 1).unwrap();
        for p in pts {
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_degenerate_at_zero() {
        let s = sigma_d_mc(3, 0.0, 100_000, 1).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn planar_and_spatial_closed_forms() {
        let sb2 = sigma_bar_d_mc(2, 0.1, 1_000_000, 2).unwrap();
        assert!(sb2.within_sigma(crate::geom2d::sigma_bar2(0.1).unwrap(), 3.0), "{sb2:?}");
        let s2 = sigma_d_mc(2, 0.1, 1_000_000, 2).unwrap();
        assert!(s2.within_sigma(crate::geom2d::sigma2(0.1).unwrap(), 3.0), "{s2:?}");
        let sb3 = sigma_bar_d_mc(3, 0.1, 1_000_000, 3).unwrap();
        assert!(sb3.within_sigma(crate::geom3d::sigma_bar3(0.1).unwrap(), 3.0), "{sb3:?}");
        let sb30 = sigma_bar_d_mc(3, 0.0, 1_000_000, 4).unwrap();
        assert!(sb30.within_sigma(0.779635570044, 3.0), "{sb30:?}");
    }

    #[test]
    fn domain() {
        assert!(sigma_d_mc(3, 0.23, 10, 1).is_err());
        assert!(sigma_d_mc(3, -0.1, 10, 1).is_err());
        assert!(sigma_d_mc(3, 0.1, 0, 1).is_err());
    }
}
