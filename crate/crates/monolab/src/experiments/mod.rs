//! Seeded Monte Carlo harness: replicated experiments that confront exact
//! chain combinatorics with the analytic limit predictions.
//!
//! Every experiment takes a master seed and runs one independent RNG stream
//! per replicate, so reports are bit-reproducible regardless of execution
//! order or worker count. Reports persist as JSON (`{experiment}_{seed}.json`)
//! plus a plottable companion CSV.

use crate::analytic::{self, MonotoneGrid, PhiModel, ScalarGrid, SurfaceParams};
use crate::chains;
use crate::geometry::{DensityDomain, PointSet, RngStream};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

/// Summary statistics of one metric across replicates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub stddev: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// One replicate: its stream index, scalar metrics, and an optional series
/// (pairs of abscissa and value).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Replicate {
    pub stream_index: u64,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<(f64, f64)>>,
}

/// A replicated experiment result. Aggregates are recomputable from the
/// per-replicate rows; the wall clock is informational and not persisted, so
/// equal seeds produce byte-identical files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub master_seed: u64,
    pub config: serde_json::Value,
    pub replicates: Vec<Replicate>,
    pub aggregates: BTreeMap<String, Aggregate>,
    /// Pointwise mean of the replicate series, when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_series: Option<Vec<(f64, f64)>>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

fn aggregate(values: &[f64]) -> Aggregate {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    let half = 1.96 * sd / k.sqrt();
    Aggregate {
        mean,
        stddev: sd,
        ci95_low: mean - half,
        ci95_high: mean + half,
    }
}

impl ExperimentReport {
    fn assemble(
        id: &str,
        master_seed: u64,
        config: serde_json::Value,
        replicates: Vec<Replicate>,
        started: Instant,
    ) -> Self {
        let mut keys: Vec<String> = replicates
            .first()
            .map(|r| r.metrics.keys().cloned().collect())
            .unwrap_or_default();
        keys.sort();
        let mut aggregates = BTreeMap::new();
        for key in keys {
            let vals: Vec<f64> = replicates
                .iter()
                .filter_map(|r| r.metrics.get(&key).copied())
                .collect();
            aggregates.insert(key, aggregate(&vals));
        }
        let mean_series = replicates.first().and_then(|r0| {
            let series0 = r0.series.as_ref()?;
            let len = series0.len();
            if replicates
                .iter()
                .any(|r| r.series.as_ref().map(|s| s.len()) != Some(len))
            {
                return None;
            }
            let mut mean = vec![(0.0, 0.0); len];
            for r in &replicates {
                for (m, &(x, v)) in mean.iter_mut().zip(r.series.as_ref().unwrap()) {
                    m.0 = x;
                    m.1 += v / replicates.len() as f64;
                }
            }
            Some(mean)
        });
        ExperimentReport {
            id: id.to_string(),
            master_seed,
            config,
            replicates,
            aggregates,
            mean_series,
            wall_clock: started.elapsed(),
        }
    }

    pub fn aggregate_of(&self, key: &str) -> Option<&Aggregate> {
        self.aggregates.get(key)
    }

    /// Largest pointwise deviation of the mean series from a target curve.
    pub fn sup_deviation_from(&self, target: impl Fn(f64) -> f64) -> Option<f64> {
        self.mean_series.as_ref().map(|s| {
            s.iter()
                .map(|&(x, v)| (v - target(x)).abs())
                .fold(0.0, f64::max)
        })
    }

    /// Largest convexity violation of the mean series: the most negative
    /// second difference, clamped at zero.
    pub fn max_concavity_violation(&self) -> Option<f64> {
        self.mean_series.as_ref().map(|s| {
            let mut worst = 0.0f64;
            for w in s.windows(3) {
                let second = w[2].1 - 2.0 * w[1].1 + w[0].1;
                worst = worst.max(-second);
            }
            worst
        })
    }

    /// Writes `{id}_{seed}.json` into `dir`, returning the path.
    pub fn save_json(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}_{}.json", self.id, self.master_seed));
        let tmp = crate::geometry::tmp_path_for(&path);
        {
            let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Writes the mean series as `{id}_{seed}_series.csv` (`x,mean`).
    pub fn save_series_csv(&self, dir: &Path) -> Result<Option<PathBuf>> {
        let Some(series) = &self.mean_series else {
            return Ok(None);
        };
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}_{}_series.csv", self.id, self.master_seed));
        let tmp = crate::geometry::tmp_path_for(&path);
        {
            let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            writeln!(w, "x,mean")?;
            for (x, v) in series {
                writeln!(w, "{x:.16e},{v:.16e}")?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(Some(path))
    }
}

fn run_replicates(
    replicates: usize,
    f: impl Fn(u64) -> Result<Replicate> + Sync,
) -> Result<Vec<Replicate>> {
    if replicates == 0 {
        return Err(Error::OutOfRange {
            what: "replicates",
            value: 0.0,
        });
    }
    (0..replicates as u64)
        .into_par_iter()
        .map(|i| f(i))
        .collect()
}

/// Estimates the local efficiency value Φ(r) on the tilted 1 x beta
/// rectangle: per replicate, the size of a maximal `floor(r sqrt(gamma))`-
/// decreasing subset of a Poisson(gamma) sample, scaled by `beta * gamma`.
pub fn estimate_phi(
    r: f64,
    gamma: f64,
    beta: f64,
    replicates: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if !(r >= 0.0) || !(beta >= 1.0) {
        return Err(Error::OutOfRange { what: "r or beta", value: r.min(beta) });
    }
    let started = Instant::now();
    let domain = DensityDomain::tilted_rectangle(beta)?;
    let k = (r * gamma.sqrt()).floor() as usize;
    let reps = run_replicates(replicates, |i| {
        let ps = domain.sample_poisson(gamma, &RngStream::new(seed, i))?;
        let lambda = if k == 0 {
            0
        } else {
            chains::greene_sum(&chains::rsk_shape(&ps), k)
        };
        let mut metrics = BTreeMap::new();
        metrics.insert("phi_estimate".into(), lambda as f64 / (beta * gamma));
        metrics.insert("points".into(), ps.len() as f64);
        Ok(Replicate {
            stream_index: i,
            metrics,
            series: None,
        })
    })?;
    Ok(ExperimentReport::assemble(
        "phi-estimate",
        seed,
        json!({"r": r, "gamma": gamma, "beta": beta, "replicates": replicates, "k": k}),
        reps,
        started,
    ))
}

/// Scaled Young-diagram columns of a Poisson sample of the diamond, probed at
/// a grid of ranges: `lambda_{floor(r sqrt(gamma)) + 1} / sqrt(gamma)` per
/// replicate, against the conjectured triangular profile `sqrt(2) - r`.
pub fn diamond_shape(
    gamma: f64,
    r_grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let domain = DensityDomain::diamond();
    let sqrt_gamma = gamma.sqrt();
    let reps = run_replicates(replicates, |i| {
        let ps = domain.sample_poisson(gamma, &RngStream::new(seed, i))?;
        let shape = chains::rsk_shape(&ps);
        let series: Vec<(f64, f64)> = r_grid
            .iter()
            .map(|&r| {
                let idx = (r * sqrt_gamma).floor() as usize + 1;
                (r, shape.column(idx) as f64 / sqrt_gamma)
            })
            .collect();
        let mut metrics = BTreeMap::new();
        metrics.insert("points".into(), ps.len() as f64);
        metrics.insert(
            "sup_deviation".into(),
            series
                .iter()
                .map(|&(r, v)| (v - (2f64.sqrt() - r)).abs())
                .fold(0.0, f64::max),
        );
        Ok(Replicate {
            stream_index: i,
            metrics,
            series: Some(series),
        })
    })?;
    Ok(ExperimentReport::assemble(
        "diamond-shape",
        seed,
        json!({"gamma": gamma, "r_grid": r_grid, "replicates": replicates}),
        reps,
        started,
    ))
}

/// Piecewise-linear polyline of the limit curve of uniform permutations,
/// for nearest-distance queries.
fn lsvk_polyline(samples: usize) -> Vec<(f64, f64)> {
    (0..=samples)
        .map(|i| {
            let alpha = std::f64::consts::PI * (i as f64 + 0.5) / (samples as f64 + 1.0);
            analytic::lsvk_curve(alpha)
        })
        .collect()
}

fn point_to_polyline_distance(p: (f64, f64), poly: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        let (ax, ay) = w[0];
        let (bx, by) = w[1];
        let (dx, dy) = (bx - ax, by - ay);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((p.0 - ax) * dx + (p.1 - ay) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (qx, qy) = (ax + t * dx, ay + t * dy);
        let d = ((p.0 - qx) * (p.0 - qx) + (p.1 - qy) * (p.1 - qy)).sqrt();
        best = best.min(d);
    }
    best
}

/// Young-diagram contour of uniform samples of the square against the
/// limit curve: staircase corners `(i/sqrt(n), lambda_i/sqrt(n))` and their
/// mean nearest distance to the parameterized curve.
pub fn square_shape(n: usize, replicates: usize, seed: u64) -> Result<ExperimentReport> {
    let started = Instant::now();
    let domain = DensityDomain::unit_square();
    let sqrt_n = (n as f64).sqrt();
    let poly = lsvk_polyline(2048);
    let reps = run_replicates(replicates, |i| {
        let ps = domain.sample_fixed(n, &RngStream::new(seed, i))?;
        let shape = chains::rsk_shape(&ps);
        let total: u64 = shape.total();
        let mut dist_sum = 0.0;
        for (idx, &col) in shape.columns().iter().enumerate() {
            let corner = ((idx + 1) as f64 / sqrt_n, col as f64 / sqrt_n);
            dist_sum += point_to_polyline_distance(corner, &poly);
        }
        let mut metrics = BTreeMap::new();
        metrics.insert(
            "contour_deviation".into(),
            dist_sum / shape.columns().len() as f64,
        );
        metrics.insert("lambda1_scaled".into(), shape.column(1) as f64 / sqrt_n);
        metrics.insert("total".into(), total as f64);
        // decimated contour as the series (at most 256 corners)
        let stride = (shape.columns().len() / 256).max(1);
        let series = shape
            .columns()
            .iter()
            .enumerate()
            .step_by(stride)
            .map(|(idx, &col)| ((idx + 1) as f64 / sqrt_n, col as f64 / sqrt_n))
            .collect();
        Ok(Replicate {
            stream_index: i,
            metrics,
            series: Some(series),
        })
    })?;
    Ok(ExperimentReport::assemble(
        "square-shape",
        seed,
        json!({"n": n, "replicates": replicates}),
        reps,
        started,
    ))
}

/// The empirical limit surface: κ of a maximal `floor(r sqrt(n))`-decreasing
/// subset of a uniform square sample, scaled by `sqrt(n)`, against the
/// analytic surface shifted into `[0, r]`. Also reports the covered fraction
/// against the quadrature value of the functional at the analytic surface.
pub fn surface_experiment(
    n: usize,
    r: f64,
    grid: usize,
    replicates: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    if grid < 2 {
        return Err(Error::OutOfRange {
            what: "grid",
            value: grid as f64,
        });
    }
    let started = Instant::now();
    let domain = DensityDomain::unit_square();
    let params = SurfaceParams::from_r(r)?;
    let sqrt_n = (n as f64).sqrt();
    let k = (r * sqrt_n).floor() as usize;

    // analytic surface shifted into [0, r], extended continuously to the
    // closed square (the parameterization is open at |t| = 1/2)
    let bbox = (-0.5, 0.5, -0.5, 0.5);
    let surface = |x: f64, y: f64| {
        let xs = x.clamp(-0.5 + 1e-12, 0.5 - 1e-12);
        let ys = y.clamp(-0.5 + 1e-12, 0.5 - 1e-12);
        analytic::uniform_limit_surface_with(&params, xs, ys).unwrap() + r / 2.0
    };
    let analytic_nodes = ScalarGrid::from_fn(bbox, grid, grid, surface)?;

    // quadrature value of the functional at the analytic maximizer
    let f_analytic = {
        let fine = ScalarGrid::from_fn(bbox, 512, 512, surface)?;
        let u = MonotoneGrid::sanitize(fine, 0.0, r)?;
        analytic::f_rho(&u, &domain, &PhiModel::Conjectured)?
    };

    let reps = run_replicates(replicates, |i| {
        let ps = domain.sample_fixed(n, &RngStream::new(seed, i))?;
        let cover = chains::max_k_decreasing(&ps, k)?;
        let subset = PointSet::new(
            cover.subset.iter().map(|&j| ps.points()[j]).collect(),
            ps.seed(),
        )?;
        let field = chains::kappa_field(&subset, bbox, grid, grid)?;
        let mut dist = 0.0;
        for iy in 0..grid {
            for ix in 0..grid {
                let kappa_scaled = field.value(ix, iy) as f64 / sqrt_n;
                dist += (kappa_scaled - analytic_nodes.at(ix, iy)).abs();
            }
        }
        // node-mean over the unit square equals the L1 distance
        let l1 = dist / (grid * grid) as f64;
        let covered = cover.subset.len() as f64 / n as f64;
        let mut metrics = BTreeMap::new();
        metrics.insert("l1_distance".into(), l1);
        metrics.insert("covered_fraction".into(), covered);
        metrics.insert("coverage_gap".into(), (covered - f_analytic).abs());
        Ok(Replicate {
            stream_index: i,
            metrics,
            series: None,
        })
    })?;
    let mut report = ExperimentReport::assemble(
        "surface",
        seed,
        json!({"n": n, "r": r, "grid": grid, "replicates": replicates, "k": k,
               "f_analytic": f_analytic}),
        reps,
        started,
    );
    report
        .aggregates
        .insert("f_analytic".into(), aggregate(&[f_analytic]));
    Ok(report)
}

/// Convexity diagnostic of the scaled Young-diagram profile of any density
/// domain: the limit shape is conjectured convex, so the mean profile's
/// most negative second difference (clamped at zero) should shrink with
/// intensity.
pub fn convexity_diagnostic(
    domain: &DensityDomain,
    gamma: f64,
    replicates: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    let sqrt_gamma = gamma.sqrt();
    // probe out to the largest decreasing subset scale
    let r_grid: Vec<f64> = (0..=30).map(|i| 0.08 * i as f64).collect();
    let reps = run_replicates(replicates, |i| {
        let ps = domain.sample_poisson(gamma, &RngStream::new(seed, i))?;
        let shape = chains::rsk_shape(&ps);
        let series: Vec<(f64, f64)> = r_grid
            .iter()
            .map(|&r| {
                let idx = (r * sqrt_gamma).floor() as usize + 1;
                (r, shape.column(idx) as f64 / sqrt_gamma)
            })
            .collect();
        let mut metrics = BTreeMap::new();
        metrics.insert("points".into(), ps.len() as f64);
        Ok(Replicate {
            stream_index: i,
            metrics,
            series: Some(series),
        })
    })?;
    let mut report = ExperimentReport::assemble(
        "convexity",
        seed,
        json!({"gamma": gamma, "replicates": replicates, "domain": format!("{:?}", domain.shape())}),
        reps,
        started,
    );
    let violation = report.max_concavity_violation().unwrap_or(0.0);
    report
        .aggregates
        .insert("max_concavity_violation".into(), aggregate(&[violation]));
    Ok(report)
}
