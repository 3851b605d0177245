//! Exact combinatorics of monotone subsets of planar point sets.
//!
//! Two independent routes compute the same quantities and certify each other:
//! RSK column sums (Greene's theorem) give the maximal k-decreasing sizes,
//! while a min-cost-flow extraction produces an actual maximal subset whose
//! size must match those sums exactly.

mod flow;
mod patience;
mod rsk;

pub use rsk::{greene_sum, permutation_of, rsk_shape, YoungDiagram};

use crate::analytic::MonotoneGrid;
use crate::geometry::{Point, PointSet};
use crate::{Error, Result};
use std::io::{BufWriter, Write};
use std::path::Path;

/// Indices of `ps` sorted by x, plus each point's y-rank in that order.
fn x_order_and_ranks(ps: &PointSet) -> (Vec<u32>, Vec<u32>) {
    let pts = ps.points();
    let n = pts.len();
    let mut by_x: Vec<u32> = (0..n as u32).collect();
    by_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
    let mut by_y: Vec<u32> = (0..n as u32).collect();
    by_y.sort_by(|&a, &b| pts[a as usize].y.total_cmp(&pts[b as usize].y));
    let mut rank = vec![0u32; n];
    for (r, &i) in by_y.iter().enumerate() {
        rank[i as usize] = r as u32;
    }
    let ranks = by_x.iter().map(|&i| rank[i as usize]).collect();
    (by_x, ranks)
}

fn ys_in_x_order(ps: &PointSet) -> (Vec<u32>, Vec<f64>) {
    let pts = ps.points();
    let mut by_x: Vec<u32> = (0..pts.len() as u32).collect();
    by_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
    let ys = by_x.iter().map(|&i| pts[i as usize].y).collect();
    (by_x, ys)
}

/// Longest increasing subset: length and a witness (indices into `ps`).
pub fn lis(ps: &PointSet) -> (usize, Vec<usize>) {
    let (by_x, ys) = ys_in_x_order(ps);
    let (len, w) = patience::lis_witness(&ys);
    (len, w.into_iter().map(|p| by_x[p] as usize).collect())
}

/// Longest decreasing subset: length and a witness (indices into `ps`).
pub fn lds(ps: &PointSet) -> (usize, Vec<usize>) {
    let (by_x, ys) = ys_in_x_order(ps);
    let flipped: Vec<f64> = ys.iter().map(|&y| -y).collect();
    let (len, w) = patience::lis_witness(&flipped);
    (len, w.into_iter().map(|p| by_x[p] as usize).collect())
}

/// Partition into decreasing sets by the greedy west-to-east rule: each point
/// joins the first set whose members are all to its north-west. The number of
/// parts equals the longest increasing subset, and part `j` collects exactly
/// the points of κ-height `j + 1`.
pub fn greedy_antichain_partition(ps: &PointSet) -> Vec<Vec<usize>> {
    let (by_x, ys) = ys_in_x_order(ps);
    let hs = patience::heights(&ys);
    let nparts = hs.iter().copied().max().unwrap_or(0);
    let mut parts = vec![Vec::new(); nparts];
    for (pos, &h) in hs.iter().enumerate() {
        parts[h - 1].push(by_x[pos] as usize);
    }
    parts
}

/// A maximal k-decreasing subset with its optional decomposition into at most
/// k decreasing parts. `subset` and each part hold indices into the source
/// point set; the partition is one of possibly many optimal ones.
#[derive(Debug, Clone)]
pub struct DecreasingCover {
    pub subset: Vec<usize>,
    pub k: usize,
    pub parts: Option<Vec<Vec<usize>>>,
}

impl DecreasingCover {
    /// CSV persistence: `point_index,part_index` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let tmp = crate::geometry::tmp_path_for(path);
        {
            let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
            writeln!(w, "point_index,part_index")?;
            match &self.parts {
                Some(parts) => {
                    for (j, part) in parts.iter().enumerate() {
                        for &i in part {
                            writeln!(w, "{i},{j}")?;
                        }
                    }
                }
                None => {
                    for &i in &self.subset {
                        writeln!(w, "{i},0")?;
                    }
                }
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Extracts an exact maximum k-decreasing subset.
///
/// Decreasing subsets are chains of the conjugate order (y-axis flipped), so
/// this reduces to a maximum k-chain union solved by min-cost flow; the size
/// always equals the Greene sum of the RSK shape, which makes the result
/// self-certifying in tests.
pub fn max_k_decreasing(ps: &PointSet, k: usize) -> Result<DecreasingCover> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "k",
            value: 0.0,
        });
    }
    let n = ps.len();
    let (by_x, ranks) = x_order_and_ranks(ps);
    // conjugate order: flip ranks so chains are decreasing sets
    let flipped: Vec<u32> = ranks.iter().map(|&r| n as u32 - 1 - r).collect();
    let out = flow::max_k_chains(&flipped, k);
    let mut subset: Vec<usize> = out
        .covered
        .iter()
        .enumerate()
        .filter_map(|(pos, &c)| c.then(|| by_x[pos] as usize))
        .collect();
    subset.sort_unstable();
    let parts = out
        .parts
        .into_iter()
        .map(|chain| chain.into_iter().map(|pos| by_x[pos as usize] as usize).collect())
        .collect();
    Ok(DecreasingCover {
        subset,
        k,
        parts: Some(parts),
    })
}

/// Maximal k-decreasing sizes for every k in `0..=len`, from one flow run.
pub fn max_decreasing_profile(ps: &PointSet) -> Vec<u64> {
    let n = ps.len();
    if n == 0 {
        return vec![0];
    }
    let (_, ranks) = x_order_and_ranks(ps);
    let flipped: Vec<u32> = ranks.iter().map(|&r| n as u32 - 1 - r).collect();
    let mut sizes = flow::max_k_chains(&flipped, n).prefix_sizes;
    let last = *sizes.last().unwrap();
    sizes.resize(n + 1, last);
    sizes
}

/// κ at a query point: the maximal increasing subset of the closed south-west
/// quadrant of `q`.
pub fn kappa_at(ps: &PointSet, q: Point) -> usize {
    let pts = ps.points();
    let mut by_x: Vec<u32> = (0..pts.len() as u32).collect();
    by_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
    let mut tails = patience::Tails::new();
    for &i in &by_x {
        if pts[i as usize].x > q.x {
            break;
        }
        tails.insert(pts[i as usize].y);
    }
    tails.count_le(q.y)
}

/// The κ function sampled on a grid of nodes over a bounding box.
///
/// Values are doubly increasing along both axes; the north-east corner of a
/// box containing all points carries the LIS length.
#[derive(Debug, Clone)]
pub struct KappaField {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub gx: usize,
    pub gy: usize,
    /// Row-major node values: `values[iy * gx + ix]`.
    pub values: Vec<u32>,
    /// Provenance of the source point set.
    pub source_seed: u64,
    pub source_len: usize,
}

impl KappaField {
    pub fn node_x(&self, ix: usize) -> f64 {
        self.x0 + (self.x1 - self.x0) * ix as f64 / (self.gx - 1) as f64
    }

    pub fn node_y(&self, iy: usize) -> f64 {
        self.y0 + (self.y1 - self.y0) * iy as f64 / (self.gy - 1) as f64
    }

    pub fn value(&self, ix: usize, iy: usize) -> u32 {
        self.values[iy * self.gx + ix]
    }

    /// CSV persistence: `x,y,value` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let tmp = crate::geometry::tmp_path_for(path);
        {
            let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
            writeln!(w, "x,y,value")?;
            for iy in 0..self.gy {
                for ix in 0..self.gx {
                    writeln!(
                        w,
                        "{:.16e},{:.16e},{}",
                        self.node_x(ix),
                        self.node_y(iy),
                        self.value(ix, iy)
                    )?;
                }
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Computes the κ field on a `gx` x `gy` node grid: a single west-to-east
/// sweep inserting points into patience tails, snapshotting tail counts at
/// each grid column. Runs in O((n + gx*gy) log n).
pub fn kappa_field(
    ps: &PointSet,
    bbox: (f64, f64, f64, f64),
    gx: usize,
    gy: usize,
) -> Result<KappaField> {
    if gx < 2 || gy < 2 {
        return Err(Error::Dimension("kappa grid needs at least 2x2 nodes".into()));
    }
    let (x0, x1, y0, y1) = bbox;
    if !(x0 < x1 && y0 < y1) {
        return Err(Error::Dimension("empty kappa bounding box".into()));
    }
    let pts = ps.points();
    let mut by_x: Vec<u32> = (0..pts.len() as u32).collect();
    by_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
    let mut tails = patience::Tails::new();
    let mut values = vec![0u32; gx * gy];
    let mut next = 0usize;
    for ix in 0..gx {
        let xg = x0 + (x1 - x0) * ix as f64 / (gx - 1) as f64;
        while next < by_x.len() && pts[by_x[next] as usize].x <= xg {
            tails.insert(pts[by_x[next] as usize].y);
            next += 1;
        }
        for iy in 0..gy {
            let yg = y0 + (y1 - y0) * iy as f64 / (gy - 1) as f64;
            values[iy * gx + ix] = tails.count_le(yg) as u32;
        }
    }
    Ok(KappaField {
        x0,
        x1,
        y0,
        y1,
        gx,
        gy,
        values,
        source_seed: ps.seed(),
        source_len: ps.len(),
    })
}

/// Level-set extraction from a grid surface, approximating the set of strict
/// south-west running maxima with integer values.
///
/// A point is selected when (a) the interpolated surface crosses an integer
/// inside the point's grid cell and (b) the point's quantized value
/// `floor(u)` strictly exceeds that of every sample point dominated by it.
/// Fibers of equal quantized value are then decreasing, so the result is
/// guaranteed `floor(diam u) + 1`-decreasing. This is an approximation of the
/// exact set-theoretic level operator, which is not finitely representable
/// for arbitrary surfaces.
pub fn d_operator(u: &MonotoneGrid, ps: &PointSet) -> Result<Vec<usize>> {
    let pts = ps.points();
    let n = pts.len();
    for p in pts {
        if !u.grid().covers(p.x, p.y) {
            return Err(Error::Dimension(
                "surface grid does not cover the point set".into(),
            ));
        }
    }
    let (by_x, ranks) = x_order_and_ranks(ps);
    // Fenwick prefix-max over y-ranks of quantized values.
    let mut tree = vec![i64::MIN; n + 1];
    let update = |tree: &mut [i64], mut i: usize, v: i64| {
        i += 1;
        while i < tree.len() {
            if tree[i] < v {
                tree[i] = v;
            }
            i += i & i.wrapping_neg();
        }
    };
    let prefix_max = |tree: &[i64], mut i: usize| -> i64 {
        let mut m = i64::MIN;
        i += 1;
        while i > 0 {
            if tree[i] > m {
                m = tree[i];
            }
            i -= i & i.wrapping_neg();
        }
        m
    };

    let mut keep = Vec::new();
    for (pos, &i) in by_x.iter().enumerate() {
        let p = pts[i as usize];
        let val = u.eval(p.x, p.y);
        let lev = val.floor() as i64;
        let (cmin, cmax) = u.cell_range(p.x, p.y);
        let crossing = cmax.floor() > cmin;
        let r = ranks[pos] as usize;
        let below = if r == 0 {
            i64::MIN
        } else {
            prefix_max(&tree, r - 1)
        };
        if crossing && below < lev {
            keep.push(i as usize);
        }
        update(&mut tree, r, lev);
    }
    keep.sort_unstable();
    Ok(keep)
}

/// Exact level-set inversion for κ surfaces: evaluates `D(κ_source)` on the
/// candidate points with no grid discretization. For `candidates == source`
/// this returns every point.
pub fn d_operator_exact_kappa(source: &PointSet, candidates: &PointSet) -> Vec<usize> {
    let spts = source.points();
    let cpts = candidates.points();
    let mut s_by_x: Vec<u32> = (0..spts.len() as u32).collect();
    s_by_x.sort_by(|&a, &b| spts[a as usize].x.total_cmp(&spts[b as usize].x));
    let mut c_by_x: Vec<u32> = (0..cpts.len() as u32).collect();
    c_by_x.sort_by(|&a, &b| cpts[a as usize].x.total_cmp(&cpts[b as usize].x));

    // Pass 1: inserts source points with x <= query x, giving the inclusive
    // count and the strict-y count. Pass 2: inserts only x < query x.
    let mut incl = vec![0usize; cpts.len()];
    let mut ystrict = vec![0usize; cpts.len()];
    let mut xstrict = vec![0usize; cpts.len()];

    for strict_x in [false, true] {
        let mut tails = patience::Tails::new();
        let mut si = 0usize;
        for &ci in &c_by_x {
            let q = cpts[ci as usize];
            while si < s_by_x.len() {
                let p = spts[s_by_x[si] as usize];
                let take = if strict_x { p.x < q.x } else { p.x <= q.x };
                if !take {
                    break;
                }
                tails.insert(p.y);
                si += 1;
            }
            if strict_x {
                xstrict[ci as usize] = tails.count_le(q.y);
            } else {
                incl[ci as usize] = tails.count_le(q.y);
                ystrict[ci as usize] = tails.count_lt(q.y);
            }
        }
    }

    (0..cpts.len())
        .filter(|&i| incl[i] > xstrict[i] && incl[i] > ystrict[i])
        .collect()
}

/// Writes a Young-diagram CSV next to other artifact files.
pub fn write_young_csv(d: &YoungDiagram, path: &Path) -> Result<()> {
    d.write_csv(path)
}
