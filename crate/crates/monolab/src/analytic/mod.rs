//! Closed-form and numerical evaluation of the local efficiency curve Φ, its
//! dual, the variational functional, and the explicit limit surfaces of the
//! uniform square.

mod grid;

pub use grid::{
    f_rho, pde_residual, write_residual_csv, write_scalar_grid_csv, MonotoneGrid, ResidualField,
    ScalarGrid,
};
pub(crate) use grid::{coverage_weights, f_rho_with_weights};

use crate::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// The local efficiency curve Φ: nondecreasing, concave, Φ(0) = 0, bounded by
/// one.
///
/// `Conjectured` is the closed form `sqrt(2) r - r^2/2` on `[0, sqrt(2)]`
/// (then 1). `Tabulated` interpolates measured samples piecewise-linearly
/// after a monotone + concave repair, so noisy Monte Carlo estimates can feed
/// back into the analytic machinery.
#[derive(Debug, Clone)]
pub enum PhiModel {
    Conjectured,
    Tabulated(TabulatedPhi),
}

#[derive(Debug, Clone)]
pub struct TabulatedPhi {
    rs: Vec<f64>,
    vals: Vec<f64>,
}

impl TabulatedPhi {
    /// Builds a tabulated curve from `(r, phi)` samples.
    ///
    /// Samples are sorted, clamped into [0, 1], pinned to (0, 0), made
    /// nondecreasing by a running maximum and concave by pooling adjacent
    /// slope violators.
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.iter().any(|(r, v)| !r.is_finite() || !v.is_finite()) {
            return Err(Error::NonFinite("phi sample"));
        }
        let mut pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(r, _)| *r > 0.0)
            .map(|&(r, v)| (r, v.clamp(0.0, 1.0)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        if pts.is_empty() {
            return Err(Error::Dimension("tabulated phi needs samples with r > 0".into()));
        }
        let mut rs = vec![0.0];
        let mut vals = vec![0.0];
        for (r, v) in pts {
            rs.push(r);
            vals.push(v);
        }
        // monotone repair
        let mut run = 0.0f64;
        for v in vals.iter_mut() {
            run = run.max(*v);
            *v = run;
        }
        // concave repair: pool-adjacent-violators on the slopes, weighted by
        // the r-step, so pooled stretches stay linear in r
        let n = rs.len() - 1;
        let mut slope = Vec::with_capacity(n);
        let mut weight = Vec::with_capacity(n);
        for i in 0..n {
            let w = rs[i + 1] - rs[i];
            slope.push((vals[i + 1] - vals[i]) / w);
            weight.push(w);
        }
        // (pooled slope, pooled weight, number of pooled intervals)
        let mut stack: Vec<(f64, f64, usize)> = Vec::new();
        for i in 0..n {
            let mut s = slope[i];
            let mut w = weight[i];
            let mut c = 1usize;
            while let Some(&(ps, pw, pc)) = stack.last() {
                if ps < s {
                    // slopes must be nonincreasing; pool
                    s = (s * w + ps * pw) / (w + pw);
                    w += pw;
                    c += pc;
                    stack.pop();
                } else {
                    break;
                }
            }
            stack.push((s, w, c));
        }
        let mut v = 0.0;
        let mut idx = 1;
        for (s, _, c) in stack {
            for _ in 0..c {
                v += s * (rs[idx] - rs[idx - 1]);
                vals[idx] = v;
                idx += 1;
            }
        }
        Ok(TabulatedPhi { rs, vals })
    }

    fn eval(&self, r: f64) -> f64 {
        let rs = &self.rs;
        if r >= *rs.last().unwrap() {
            return *self.vals.last().unwrap();
        }
        let hi = rs.partition_point(|&t| t <= r);
        let (r0, r1) = (rs[hi - 1], rs[hi]);
        let (v0, v1) = (self.vals[hi - 1], self.vals[hi]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    fn eval_slope(&self, r: f64) -> f64 {
        let rs = &self.rs;
        if r >= *rs.last().unwrap() {
            return 0.0;
        }
        let hi = rs.partition_point(|&t| t <= r);
        (self.vals[hi] - self.vals[hi - 1]) / (rs[hi] - rs[hi - 1])
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rs.iter().copied().zip(self.vals.iter().copied())
    }
}

impl PhiModel {
    /// Φ(r) for r >= 0.
    pub fn phi(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        match self {
            PhiModel::Conjectured => {
                if r >= SQRT2 {
                    1.0
                } else {
                    SQRT2 * r - r * r / 2.0
                }
            }
            PhiModel::Tabulated(t) => t.eval(r),
        }
    }

    /// A supergradient of Φ at r (the exact derivative where it exists).
    pub fn phi_slope(&self, r: f64) -> f64 {
        match self {
            PhiModel::Conjectured => {
                if r >= SQRT2 {
                    0.0
                } else {
                    SQRT2 - r
                }
            }
            PhiModel::Tabulated(t) => t.eval_slope(r),
        }
    }

    /// The dual curve `phi_star(s) = inf_{r >= 0} (r s - Φ(r))`, always in
    /// [-1, 0]. Closed form Φ(s) - 1 for the conjectured curve; numeric
    /// minimization over the knots for tabulated curves.
    pub fn phi_star(&self, s: f64) -> f64 {
        debug_assert!(s >= 0.0);
        match self {
            PhiModel::Conjectured => self.phi(s) - 1.0,
            PhiModel::Tabulated(t) => {
                // r s - Φ(r) is convex piecewise-linear in r; the infimum over
                // r >= 0 sits at a knot (slopes beyond the last knot are
                // s - 0 >= 0, so the tail never descends).
                let mut best = f64::INFINITY;
                for (r, v) in t.knots() {
                    best = best.min(r * s - v);
                }
                best.min(0.0)
            }
        }
    }
}

/// The integrand building block `L(eta, theta) = eta Φ(sqrt(2 theta / eta))`,
/// with `L(0, theta) = 0`.
pub fn l_value(eta: f64, theta: f64, model: &PhiModel) -> f64 {
    debug_assert!(eta >= 0.0 && theta >= 0.0);
    if eta <= 0.0 {
        return 0.0;
    }
    eta * model.phi((2.0 * theta / eta).sqrt())
}

/// Bracketing bisection refined by Newton steps; residual below 1e-12 or an
/// error. `f` must be continuous and increasing over `[lo, hi]`.
fn solve_increasing(
    what: &'static str,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    target: f64,
) -> Result<f64> {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let r = f(x) - target;
        let d = df(x);
        if d.abs() > 1e-300 {
            let step = r / d;
            let nx = x - step;
            if nx.is_finite() && nx >= lo - 1e-9 && nx <= hi + 1e-9 {
                x = nx;
            }
        }
    }
    let residual = (f(x) - target).abs();
    if residual < 1e-12 {
        Ok(x)
    } else {
        Err(Error::RootFinder { what, residual })
    }
}

/// Solves `r = (2/pi)(sin a - a cos a)` for `a` in (0, pi); unique since the
/// right side strictly increases from 0 to 2.
pub fn alpha_from_r(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    let f = |a: f64| 2.0 / std::f64::consts::PI * (a.sin() - a * a.cos());
    let df = |a: f64| 2.0 / std::f64::consts::PI * (a * a.sin());
    solve_increasing("alpha_from_r", f, df, 0.0, std::f64::consts::PI, r)
}

/// Inverts `t = (phi + sin(2 phi)/2) / pi` for `phi` in (-pi/2, pi/2); the
/// coordinate parameterization of the uniform-square limit surface.
pub fn angle_from_coord(t: f64) -> Result<f64> {
    if !(t > -0.5 && t < 0.5) {
        return Err(Error::OutOfRange { what: "t", value: t });
    }
    let pi = std::f64::consts::PI;
    let f = |p: f64| (p + 0.5 * (2.0 * p).sin()) / pi;
    let df = |p: f64| (1.0 + (2.0 * p).cos()) / pi;
    solve_increasing("angle_from_coord", f, df, -pi / 2.0, pi / 2.0, t)
}

/// Parameters of the uniform-square limit surface at range `r`.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceParams {
    pub r: f64,
    pub alpha: f64,
    /// Dual range `s = r + 2 cos(alpha)`.
    pub s: f64,
}

impl SurfaceParams {
    pub fn from_r(r: f64) -> Result<Self> {
        let alpha = alpha_from_r(r)?;
        Ok(SurfaceParams {
            r,
            alpha,
            s: r + 2.0 * alpha.cos(),
        })
    }
}

/// The limit surface of maximal `floor(r sqrt(n))`-decreasing subsets of a
/// uniform sample of the square (-1/2, 1/2)^2, under the triangular-shape
/// conjecture. Values span [-r/2, r/2]; doubly increasing.
pub fn uniform_limit_surface(x: f64, y: f64, r: f64) -> Result<f64> {
    let p = SurfaceParams::from_r(r)?;
    uniform_limit_surface_with(&p, x, y)
}

/// Same as [`uniform_limit_surface`] with precomputed parameters.
pub fn uniform_limit_surface_with(p: &SurfaceParams, x: f64, y: f64) -> Result<f64> {
    let phi = angle_from_coord(x)?;
    let psi = angle_from_coord(y)?;
    let sum = psi + phi;
    Ok(if sum < -p.alpha {
        -p.r / 2.0
    } else if sum > p.alpha {
        p.r / 2.0
    } else {
        (sum.sin() - sum * p.alpha.cos()) / std::f64::consts::PI
    })
}

/// The dual surface: decreasing in x, increasing in y, spanning [-s/2, s/2].
pub fn uniform_dual_surface(x: f64, y: f64, r: f64) -> Result<f64> {
    let p = SurfaceParams::from_r(r)?;
    uniform_dual_surface_with(&p, x, y)
}

/// Same as [`uniform_dual_surface`] with precomputed parameters.
pub fn uniform_dual_surface_with(p: &SurfaceParams, x: f64, y: f64) -> Result<f64> {
    let phi = angle_from_coord(x)?;
    let psi = angle_from_coord(y)?;
    let diff = psi - phi;
    let lim = std::f64::consts::PI - p.alpha;
    Ok(if diff < -lim {
        -p.s / 2.0
    } else if diff > lim {
        p.s / 2.0
    } else {
        (diff.sin() + diff * p.alpha.cos()) / std::f64::consts::PI
    })
}

/// The Young-diagram limit curve of uniform permutations, parameterized by
/// `alpha` in (0, pi): `r = (2/pi)(sin a - a cos a)`, `s = r + 2 cos a`.
pub fn lsvk_curve(alpha: f64) -> (f64, f64) {
    let r = 2.0 / std::f64::consts::PI * (alpha.sin() - alpha * alpha.cos());
    (r, r + 2.0 * alpha.cos())
}

#[cfg(test)]
mod tests;
