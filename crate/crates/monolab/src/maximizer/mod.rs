//! Numerical maximization of the variational functional over grid-sampled
//! doubly increasing functions with a range constraint.
//!
//! The objective is concave, so projected supergradient ascent with a
//! diminishing step and backtracking converges from any feasible start; the
//! returned surface is feasible exactly (monotone and range-clamped) at every
//! iterate.

use crate::analytic::{self, MonotoneGrid, PhiModel, ScalarGrid};
use crate::geometry::DensityDomain;
use crate::{Error, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Tuning knobs for [`maximize_f`]. `grid` is the number of nodes per axis.
#[derive(Debug, Clone)]
pub struct MaximizerConfig {
    pub grid: usize,
    pub max_iters: usize,
    /// Convergence tolerance on the relative F improvement.
    pub tol_f: f64,
    /// Base step of the diminishing schedule `base_step * r / sqrt(k)`.
    pub base_step: f64,
    /// Dykstra cycle cap per projection.
    pub dykstra_iters: usize,
    /// Consecutive no-improvement iterations before declaring convergence.
    pub patience: usize,
}

impl Default for MaximizerConfig {
    fn default() -> Self {
        MaximizerConfig {
            grid: 128,
            max_iters: 400,
            tol_f: 1e-7,
            base_step: 0.15,
            dykstra_iters: 40,
            patience: 12,
        }
    }
}

impl MaximizerConfig {
    fn validate(&self) -> Result<()> {
        if self.grid < 8 {
            return Err(Error::OutOfRange {
                what: "grid",
                value: self.grid as f64,
            });
        }
        if !(self.tol_f > 0.0) {
            return Err(Error::OutOfRange {
                what: "tol_f",
                value: self.tol_f,
            });
        }
        Ok(())
    }
}

/// Outcome of a maximization run.
#[derive(Debug, Clone)]
pub struct MaximizerResult {
    pub u: MonotoneGrid,
    pub f_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted objective values; nondecreasing by construction.
    pub history: Vec<f64>,
}

/// One-dimensional isotonic L2 regression (pool adjacent violators),
/// in place over a strided slice.
fn pava_line(values: &mut [f64], idx: impl Fn(usize) -> usize, n: usize) {
    // stack of (mean, count)
    let mut stack: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        let mut mean = values[idx(i)];
        let mut count = 1usize;
        while let Some(&(pm, pc)) = stack.last() {
            if pm > mean {
                mean = (mean * count as f64 + pm * pc as f64) / (count + pc) as f64;
                count += pc;
                stack.pop();
            } else {
                break;
            }
        }
        stack.push((mean, count));
    }
    let mut i = 0usize;
    for (mean, count) in stack {
        for _ in 0..count {
            values[idx(i)] = mean;
            i += 1;
        }
    }
}

/// Projects a raw grid onto the doubly increasing functions with values in
/// `[h, h + r]`: Dykstra alternation of row-wise and column-wise isotonic
/// regression and the box clamp, followed by an exact feasibility pass
/// (running maxima plus clamp) so the invariants hold with zero tolerance.
pub fn isotonic_project(raw: &ScalarGrid, h: f64, r: f64, dykstra_iters: usize) -> MonotoneGrid {
    let nx = raw.nx;
    let ny = raw.ny;
    let mut x = raw.values.clone();
    let mut p_row = vec![0.0f64; nx * ny];
    let mut p_col = vec![0.0f64; nx * ny];
    let mut p_box = vec![0.0f64; nx * ny];
    let mut prev = vec![0.0f64; nx * ny];
    for _ in 0..dykstra_iters {
        prev.copy_from_slice(&x);
        // rows
        for v in x.iter_mut().zip(p_row.iter()) {
            *v.0 += v.1;
        }
        let before: Vec<f64> = x.clone();
        for iy in 0..ny {
            pava_line(&mut x, |i| iy * nx + i, nx);
        }
        for i in 0..nx * ny {
            p_row[i] = before[i] - x[i];
        }
        // columns
        for v in x.iter_mut().zip(p_col.iter()) {
            *v.0 += v.1;
        }
        let before: Vec<f64> = x.clone();
        for ix in 0..nx {
            pava_line(&mut x, |i| i * nx + ix, ny);
        }
        for i in 0..nx * ny {
            p_col[i] = before[i] - x[i];
        }
        // box
        for i in 0..nx * ny {
            let z = x[i] + p_box[i];
            let clamped = z.clamp(h, h + r);
            p_box[i] = z - clamped;
            x[i] = clamped;
        }
        let delta = x
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if delta < 1e-13 {
            break;
        }
    }
    // exact feasibility: running maxima along both axes, then clamp
    for iy in 0..ny {
        for ix in 0..nx {
            let mut v = x[iy * nx + ix];
            if ix > 0 {
                v = v.max(x[iy * nx + ix - 1]);
            }
            if iy > 0 {
                v = v.max(x[(iy - 1) * nx + ix]);
            }
            x[iy * nx + ix] = v.clamp(h, h + r);
        }
    }
    let grid = ScalarGrid::new((raw.x0, raw.x1, raw.y0, raw.y1), nx, ny, x)
        .expect("projection preserves grid geometry");
    MonotoneGrid::new(grid, h, r).expect("projection output must be feasible")
}

/// Objective and supergradient of the quadrature functional on node values.
///
/// At cells where `u_x u_y = 0` the supergradient contribution is taken as
/// zero; elsewhere the chain rule through `L` applies, with the singular
/// factor capped.
fn f_and_grad(
    g: &ScalarGrid,
    weights: &[(f64, f64)],
    model: &PhiModel,
    grad: &mut [f64],
) -> f64 {
    const LTHETA_CAP: f64 = 1e6;
    let nx = g.nx;
    let cx = nx - 1;
    let cy = g.ny - 1;
    let hx = g.hx();
    let hy = g.hy();
    grad.iter_mut().for_each(|v| *v = 0.0);
    let mut total = 0.0;
    for iy in 0..cy {
        for ix in 0..cx {
            let (w, eta) = weights[iy * cx + ix];
            if w == 0.0 || eta <= 0.0 {
                continue;
            }
            let base = iy * nx + ix;
            let ux = (g.values[base + 1] - g.values[base]) / hx;
            let uy = (g.values[base + nx] - g.values[base]) / hy;
            let theta = ux * uy;
            if theta > 0.0 {
                let q = (2.0 * theta / eta).sqrt();
                total += w * eta * model.phi(q);
                let ltheta = (model.phi_slope(q) / q).min(LTHETA_CAP);
                if ltheta > 0.0 {
                    let dux = w * ltheta * uy / hx;
                    let duy = w * ltheta * ux / hy;
                    grad[base + 1] += dux;
                    grad[base + nx] += duy;
                    grad[base] -= dux + duy;
                }
            }
        }
    }
    total
}

/// Maximizes the functional over doubly increasing grids with values in
/// `[0, r]` by projected supergradient ascent. Initialized from the best of a
/// family of clipped linear ramps along the domain's principal diagonal,
/// which is already optimal for constant-density parallelograms.
pub fn maximize_f(
    domain: &DensityDomain,
    r: f64,
    model: &PhiModel,
    cfg: &MaximizerConfig,
) -> Result<MaximizerResult> {
    cfg.validate()?;
    if !(r >= 0.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    let n = cfg.grid;
    let bbox = domain.bounding_box();
    let shell = ScalarGrid::from_fn(bbox, n, n, |_, _| 0.0)?;
    let weights = analytic::coverage_weights(&shell, domain);

    if r == 0.0 {
        let grid = ScalarGrid::from_fn(bbox, n, n, |_, _| 0.0)?;
        let u = MonotoneGrid::new(grid, 0.0, 0.0)?;
        return Ok(MaximizerResult {
            u,
            f_value: 0.0,
            iterations: 0,
            converged: true,
            history: vec![0.0],
        });
    }

    // Linear benchmark candidates: clipped ramps along the principal diagonal.
    let (da, db) = domain.principal_diagonal();
    let (x0, x1, y0, y1) = bbox;
    let xc = 0.5 * (x0 + x1);
    let yc = 0.5 * (y0 + y1);
    // span of the diagonal coordinate over the domain (estimated on cells)
    let cx = n - 1;
    let mut dmax = 0.0f64;
    for iy in 0..cx {
        for ix in 0..cx {
            if weights[iy * cx + ix].0 > 0.0 {
                let px = shell.node_x(ix) + 0.5 * shell.hx();
                let py = shell.node_y(iy) + 0.5 * shell.hy();
                dmax = dmax.max((da * (px - xc) + db * (py - yc)).abs());
            }
        }
    }
    if dmax == 0.0 {
        dmax = 1.0;
    }
    let mut best: Option<(f64, ScalarGrid)> = None;
    for mult in [0.5, 0.75, 1.0, 1.3, 1.8, 2.6] {
        let slope = mult * r / (2.0 * dmax);
        let cand = ScalarGrid::from_fn(bbox, n, n, |x, y| {
            (r / 2.0 + slope * (da * (x - xc) + db * (y - yc))).clamp(0.0, r)
        })?;
        let f = analytic::f_rho_with_weights(&cand, model, &weights);
        if best.as_ref().map_or(true, |(bf, _)| f > *bf) {
            best = Some((f, cand));
        }
    }
    let (_, start) = best.unwrap();
    let mut u = isotonic_project(&start, 0.0, r, cfg.dykstra_iters);
    let mut f_cur = analytic::f_rho_with_weights(u.grid(), model, &weights);
    let mut history = vec![f_cur];
    let mut grad = vec![0.0f64; n * n];
    let mut stall = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;

    for k in 1..=cfg.max_iters {
        iterations = k;
        let f_here = f_and_grad(u.grid(), &weights, model, &mut grad);
        f_cur = f_cur.max(f_here);
        let gmax = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax == 0.0 {
            converged = true;
            break;
        }
        let mut step = cfg.base_step * r / (k as f64).sqrt() / gmax;
        let mut improved = false;
        for _ in 0..24 {
            let cand_vals: Vec<f64> = u
                .grid()
                .values
                .iter()
                .zip(grad.iter())
                .map(|(v, g)| v + step * g)
                .collect();
            let cand = ScalarGrid::new(bbox, n, n, cand_vals)?;
            let proj = isotonic_project(&cand, 0.0, r, cfg.dykstra_iters);
            let f_new = analytic::f_rho_with_weights(proj.grid(), model, &weights);
            if f_new > f_cur + 1e-15 {
                let gain = f_new - f_cur;
                u = proj;
                f_cur = f_new;
                history.push(f_cur);
                improved = true;
                if gain < cfg.tol_f * f_cur.abs().max(1e-12) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            stall += 1;
        }
        if stall >= cfg.patience {
            converged = true;
            break;
        }
    }

    Ok(MaximizerResult {
        u,
        f_value: f_cur,
        iterations,
        converged,
        history,
    })
}

/// A maximal-value curve: per-r maxima with monotone and concave repairs.
#[derive(Debug, Clone)]
pub struct FMaxCurve {
    pub rs: Vec<f64>,
    /// Raw per-r maxima as returned by the optimizer.
    pub raw: Vec<f64>,
    /// Values after the nondecreasing + concave repair.
    pub values: Vec<f64>,
    /// Largest relative adjustment applied by the repair.
    pub max_repair: f64,
}

/// Pointwise maximization over an increasing grid of ranges, then monotone
/// and concave repair of the curve.
pub fn f_max_curve(
    domain: &DensityDomain,
    model: &PhiModel,
    rs: &[f64],
    cfg: &MaximizerConfig,
) -> Result<FMaxCurve> {
    if rs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Dimension("range grid must be increasing".into()));
    }
    let mut raw = Vec::with_capacity(rs.len());
    for &r in rs {
        raw.push(maximize_f(domain, r, model, cfg)?.f_value);
    }
    // monotone repair
    let mut values = raw.clone();
    let mut run = f64::NEG_INFINITY;
    for v in values.iter_mut() {
        run = run.max(*v);
        *v = run;
    }
    // concave repair via pooled slopes, as for tabulated efficiency curves
    if values.len() >= 3 {
        let m = values.len() - 1;
        let mut stack: Vec<(f64, f64, usize)> = Vec::new();
        for i in 0..m {
            let w = rs[i + 1] - rs[i];
            let mut s = (values[i + 1] - values[i]) / w;
            let mut wt = w;
            let mut c = 1usize;
            while let Some(&(ps, pw, pc)) = stack.last() {
                if ps < s {
                    s = (s * wt + ps * pw) / (wt + pw);
                    wt += pw;
                    c += pc;
                    stack.pop();
                } else {
                    break;
                }
            }
            stack.push((s, wt, c));
        }
        let mut v = values[0];
        let mut idx = 1;
        for (s, _, c) in stack {
            for _ in 0..c {
                v += s * (rs[idx] - rs[idx - 1]);
                values[idx] = v;
                idx += 1;
            }
        }
    }
    let max_repair = raw
        .iter()
        .zip(values.iter())
        .map(|(a, b)| (a - b).abs() / b.abs().max(1e-12))
        .fold(0.0f64, f64::max);
    Ok(FMaxCurve {
        rs: rs.to_vec(),
        raw,
        values,
        max_repair,
    })
}

#[derive(Serialize)]
struct ResultSummary {
    r: f64,
    f_value: f64,
    iterations: usize,
    converged: bool,
}

/// Persists a maximizer result: the surface as `x,y,value` CSV plus a JSON
/// summary `{r, F_value, iterations, converged}`.
pub fn write_result(result: &MaximizerResult, r: f64, csv: &Path, json: &Path) -> Result<()> {
    result.u.grid().write_csv(csv)?;
    let summary = ResultSummary {
        r,
        f_value: result.f_value,
        iterations: result.iterations,
        converged: result.converged,
    };
    let tmp = crate::geometry::tmp_path_for(json);
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        serde_json::to_writer_pretty(&mut w, &summary)
            .map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
    }
    std::fs::rename(&tmp, json)?;
    Ok(())
}
