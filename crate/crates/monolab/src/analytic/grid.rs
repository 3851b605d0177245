//! Grid-sampled surfaces: the doubly increasing representation used by the
//! maximizer, quadrature of the variational functional, and PDE residuals.

use super::PhiModel;
use crate::geometry::DensityDomain;
use crate::{Error, Result};
use std::io::{BufWriter, Write};
use std::path::Path;

/// A scalar field on an `nx` x `ny` grid of nodes over a closed box.
/// Node `(ix, iy)` sits at `(x0 + ix*hx, y0 + iy*hy)`; values are row-major
/// `values[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(
        bbox: (f64, f64, f64, f64),
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        let (x0, x1, y0, y1) = bbox;
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return Err(Error::Dimension(format!(
                "grid needs nx, ny >= 2 and nx*ny values; got {nx}x{ny} with {}",
                values.len()
            )));
        }
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::Dimension("empty grid box".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid value"));
        }
        Ok(ScalarGrid {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
            values,
        })
    }

    /// Builds a grid by evaluating `f` at every node.
    pub fn from_fn(
        bbox: (f64, f64, f64, f64),
        nx: usize,
        ny: usize,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self> {
        let (x0, x1, y0, y1) = bbox;
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            let y = y0 + (y1 - y0) * iy as f64 / (ny - 1) as f64;
            for ix in 0..nx {
                let x = x0 + (x1 - x0) * ix as f64 / (nx - 1) as f64;
                values.push(f(x, y));
            }
        }
        ScalarGrid::new(bbox, nx, ny, values)
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn node_x(&self, ix: usize) -> f64 {
        self.x0 + (self.x1 - self.x0) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn node_y(&self, iy: usize) -> f64 {
        self.y0 + (self.y1 - self.y0) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn hx(&self) -> f64 {
        (self.x1 - self.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y1 - self.y0) / (self.ny - 1) as f64
    }

    pub fn covers(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    /// Cell indices containing `(x, y)`, clamped to the grid.
    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let fx = (x - self.x0) / self.hx();
        let fy = (y - self.y0) / self.hy();
        let ix = (fx.floor() as isize).clamp(0, self.nx as isize - 2) as usize;
        let iy = (fy.floor() as isize).clamp(0, self.ny as isize - 2) as usize;
        (ix, iy)
    }

    /// Bilinear interpolation; monotone between monotone nodes.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (ix, iy) = self.cell_of(x, y);
        let tx = ((x - self.node_x(ix)) / self.hx()).clamp(0.0, 1.0);
        let ty = ((y - self.node_y(iy)) / self.hy()).clamp(0.0, 1.0);
        let v00 = self.at(ix, iy);
        let v10 = self.at(ix + 1, iy);
        let v01 = self.at(ix, iy + 1);
        let v11 = self.at(ix + 1, iy + 1);
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty
            + v11 * tx * ty
    }

    /// Min and max corner value of the cell containing `(x, y)`.
    pub fn cell_corner_range(&self, x: f64, y: f64) -> (f64, f64) {
        let (ix, iy) = self.cell_of(x, y);
        let vs = [
            self.at(ix, iy),
            self.at(ix + 1, iy),
            self.at(ix, iy + 1),
            self.at(ix + 1, iy + 1),
        ];
        let mut lo = vs[0];
        let mut hi = vs[0];
        for v in vs {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// CSV persistence: `x,y,value` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_scalar_grid_csv(self, path)
    }
}

/// A grid-sampled doubly increasing function with values confined to
/// `[h, h + r]`. Construction validates both constraints exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneGrid {
    grid: ScalarGrid,
    h: f64,
    r: f64,
}

impl MonotoneGrid {
    pub fn new(grid: ScalarGrid, h: f64, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !h.is_finite() {
            return Err(Error::OutOfRange { what: "range", value: r });
        }
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let v = grid.at(ix, iy);
                if ix + 1 < grid.nx && grid.at(ix + 1, iy) < v {
                    return Err(Error::NotMonotone { ix, iy });
                }
                if iy + 1 < grid.ny && grid.at(ix, iy + 1) < v {
                    return Err(Error::NotMonotone { ix, iy });
                }
            }
        }
        if grid.values.iter().any(|&v| v < h || v > h + r) {
            return Err(Error::RangeViolation { lo: h, hi: h + r });
        }
        Ok(MonotoneGrid { grid, h, r })
    }

    /// Samples a doubly increasing function; errors if the samples violate
    /// monotonicity or the range.
    pub fn from_fn(
        bbox: (f64, f64, f64, f64),
        n: usize,
        h: f64,
        r: f64,
        f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self> {
        MonotoneGrid::new(ScalarGrid::from_fn(bbox, n, n, f)?, h, r)
    }

    pub fn grid(&self) -> &ScalarGrid {
        &self.grid
    }

    pub fn into_grid(self) -> ScalarGrid {
        self.grid
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.grid.eval(x, y)
    }

    pub fn cell_range(&self, x: f64, y: f64) -> (f64, f64) {
        self.grid.cell_corner_range(x, y)
    }

    /// Enforces feasibility exactly by a south-west running maximum and a
    /// clamp. Intended for surfaces that are monotone up to floating-point
    /// noise (analytic evaluations through root solvers).
    pub fn sanitize(mut grid: ScalarGrid, h: f64, r: f64) -> Result<Self> {
        let nx = grid.nx;
        for iy in 0..grid.ny {
            for ix in 0..nx {
                let mut v = grid.values[iy * nx + ix];
                if ix > 0 {
                    v = v.max(grid.values[iy * nx + ix - 1]);
                }
                if iy > 0 {
                    v = v.max(grid.values[(iy - 1) * nx + ix]);
                }
                grid.values[iy * nx + ix] = v.clamp(h, h + r);
            }
        }
        MonotoneGrid::new(grid, h, r)
    }
}

/// Per-cell quadrature data for a domain over a grid's cells: covered area
/// and mean density over the covered part. Interior cells use the cell
/// center; cells that straddle the boundary are subsampled 16x16.
pub(crate) fn coverage_weights(grid: &ScalarGrid, domain: &DensityDomain) -> Vec<(f64, f64)> {
    let cx = grid.nx - 1;
    let cy = grid.ny - 1;
    let hx = grid.hx();
    let hy = grid.hy();
    let cell_area = hx * hy;
    let mut w = vec![(0.0, 0.0); cx * cy];
    for iy in 0..cy {
        for ix in 0..cx {
            let x = grid.node_x(ix);
            let y = grid.node_y(iy);
            let probes = [
                domain.contains(x, y),
                domain.contains(x + hx, y),
                domain.contains(x, y + hy),
                domain.contains(x + hx, y + hy),
                domain.contains(x + 0.5 * hx, y + 0.5 * hy),
            ];
            let inside = probes.iter().filter(|&&c| c).count();
            w[iy * cx + ix] = if inside == probes.len() {
                (
                    cell_area,
                    domain.density_at(x + 0.5 * hx, y + 0.5 * hy),
                )
            } else if inside == 0 {
                (0.0, 0.0)
            } else {
                const S: usize = 16;
                let mut hits = 0usize;
                let mut rho_sum = 0.0;
                for sy in 0..S {
                    for sx in 0..S {
                        let px = x + (sx as f64 + 0.5) / S as f64 * hx;
                        let py = y + (sy as f64 + 0.5) / S as f64 * hy;
                        let d = domain.density_at(px, py);
                        if domain.contains(px, py) {
                            hits += 1;
                            rho_sum += d;
                        }
                    }
                }
                if hits == 0 {
                    (0.0, 0.0)
                } else {
                    (
                        cell_area * hits as f64 / (S * S) as f64,
                        rho_sum / hits as f64,
                    )
                }
            };
        }
    }
    w
}

/// Quadrature of the functional: midpoint sum of `L(rho, u_x u_y)` over the
/// grid cells, with forward-difference partials taken at each cell's
/// south-west corner and boundary cells weighted by covered fraction.
pub fn f_rho(u: &MonotoneGrid, domain: &DensityDomain, model: &PhiModel) -> Result<f64> {
    let g = u.grid();
    let (bx0, bx1, by0, by1) = domain.bounding_box();
    if !(g.covers(bx0, by0) && g.covers(bx1, by1)) {
        return Err(Error::Dimension(
            "surface grid does not cover the density domain".into(),
        ));
    }
    let weights = coverage_weights(g, domain);
    Ok(f_rho_with_weights(g, model, &weights))
}

pub(crate) fn f_rho_with_weights(
    g: &ScalarGrid,
    model: &PhiModel,
    weights: &[(f64, f64)],
) -> f64 {
    let cx = g.nx - 1;
    let cy = g.ny - 1;
    let hx = g.hx();
    let hy = g.hy();
    let mut total = 0.0;
    for iy in 0..cy {
        for ix in 0..cx {
            let (w, eta) = weights[iy * cx + ix];
            if w == 0.0 || eta <= 0.0 {
                continue;
            }
            let ux = (g.at(ix + 1, iy) - g.at(ix, iy)) / hx;
            let uy = (g.at(ix, iy + 1) - g.at(ix, iy)) / hy;
            let theta = (ux * uy).max(0.0);
            total += w * super::l_value(eta, theta, model);
        }
    }
    total
}

/// Per-cell residuals of the maximizer characterization for a candidate pair
/// `(u, v)`: `res1` is the transversality defect `u_x v_y + u_y v_x`, `res2`
/// the efficiency-balance defect, in its general or conjectured form.
///
/// Flags per cell: bit 0 = `u_x u_y < 0` after differencing, bit 1 =
/// `-v_x v_y < 0`, bit 2 = both products vanish (fully degenerate cell).
#[derive(Debug, Clone)]
pub struct ResidualField {
    pub nx: usize,
    pub ny: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub res1: Vec<f64>,
    pub res2: Vec<f64>,
    pub flags: Vec<u8>,
}

impl ResidualField {
    pub fn median_abs(&self) -> (f64, f64) {
        let med = |v: &[f64]| {
            let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
            a.sort_by(f64::total_cmp);
            if a.is_empty() {
                0.0
            } else {
                a[a.len() / 2]
            }
        };
        (med(&self.res1), med(&self.res2))
    }
}

/// Computes residuals on the common cells of two aligned grids, with a
/// constant density `rho`. Cell-centered derivatives average the forward
/// differences of the two bounding rows/columns for second-order accuracy.
pub fn pde_residual(
    u: &ScalarGrid,
    v: &ScalarGrid,
    rho: f64,
    model: &PhiModel,
    conjecture_form: bool,
) -> Result<ResidualField> {
    if u.nx != v.nx || u.ny != v.ny || (u.x0, u.x1, u.y0, u.y1) != (v.x0, v.x1, v.y0, v.y1) {
        return Err(Error::Dimension("residual grids are not aligned".into()));
    }
    let cx = u.nx - 1;
    let cy = u.ny - 1;
    let hx = u.hx();
    let hy = u.hy();
    let mut out = ResidualField {
        nx: cx,
        ny: cy,
        xs: (0..cx).map(|i| u.node_x(i) + 0.5 * hx).collect(),
        ys: (0..cy).map(|j| u.node_y(j) + 0.5 * hy).collect(),
        res1: vec![0.0; cx * cy],
        res2: vec![0.0; cx * cy],
        flags: vec![0; cx * cy],
    };
    let dxc = |g: &ScalarGrid, ix: usize, iy: usize| {
        ((g.at(ix + 1, iy) - g.at(ix, iy)) + (g.at(ix + 1, iy + 1) - g.at(ix, iy + 1))) / (2.0 * hx)
    };
    let dyc = |g: &ScalarGrid, ix: usize, iy: usize| {
        ((g.at(ix, iy + 1) - g.at(ix, iy)) + (g.at(ix + 1, iy + 1) - g.at(ix + 1, iy))) / (2.0 * hy)
    };
    for iy in 0..cy {
        for ix in 0..cx {
            let ux = dxc(u, ix, iy);
            let uy = dyc(u, ix, iy);
            let vx = dxc(v, ix, iy);
            let vy = dyc(v, ix, iy);
            let c = iy * cx + ix;
            out.res1[c] = ux * vy + uy * vx;
            let pu = ux * uy;
            let pv = -vx * vy;
            if pu < 0.0 {
                out.flags[c] |= 1;
            }
            if pv < 0.0 {
                out.flags[c] |= 2;
            }
            if pu == 0.0 && pv == 0.0 {
                out.flags[c] |= 4;
            }
            let qu = (pu.max(0.0) / rho).sqrt();
            let qv = (pv.max(0.0) / rho).sqrt();
            out.res2[c] = if conjecture_form {
                qu.min(1.0) + qv.min(1.0) - 1.0
            } else {
                rho * (model.phi(std::f64::consts::SQRT_2 * qu)
                    + model.phi_star(std::f64::consts::SQRT_2 * qv))
                    - 2.0 * (pu.max(0.0) * pv.max(0.0)).sqrt()
            };
        }
    }
    Ok(out)
}

/// CSV persistence for scalar grids: `x,y,value` rows over the nodes.
pub fn write_scalar_grid_csv(g: &ScalarGrid, path: &Path) -> Result<()> {
    let tmp = crate::geometry::tmp_path_for(path);
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(w, "x,y,value")?;
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e}",
                    g.node_x(ix),
                    g.node_y(iy),
                    g.at(ix, iy)
                )?;
            }
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV persistence for residual fields: `x,y,res1,res2,flag` rows.
pub fn write_residual_csv(f: &ResidualField, path: &Path) -> Result<()> {
    let tmp = crate::geometry::tmp_path_for(path);
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(w, "x,y,res1,res2,flag")?;
        for iy in 0..f.ny {
            for ix in 0..f.nx {
                let c = iy * f.nx + ix;
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    f.xs[ix], f.ys[iy], f.res1[c], f.res2[c], f.flags[c]
                )?;
            }
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
