//! Density domains, seeded point sampling and coordinate transforms.
//!
//! Every sampled [`PointSet`] is in *general position*: all x-coordinates are
//! pairwise distinct and all y-coordinates are pairwise distinct, so the set
//! determines a permutation. Exact floating-point collisions are resolved by
//! redrawing the later point; after 100 failed rounds sampling errors out.

mod io;

use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// A point in the plane. Coordinates are dimensionless doubles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// The linear map sending (1,0) to (1,1) and (0,1) to (-1,1).
///
/// It turns sets that decrease at 45 degrees into axis-aligned structures and
/// back; `(x, y) -> (x - y, x + y)`.
pub fn transform_t(p: Point) -> Point {
    Point::new(p.x - p.y, p.x + p.y)
}

/// A finite planar point configuration in general position, tagged with the
/// master seed that produced it (0 for point sets built from raw data).
#[derive(Debug, Clone)]
pub struct PointSet {
    points: Vec<Point>,
    seed: u64,
}

impl PointSet {
    /// Builds a point set, validating finiteness and general position.
    pub fn new(points: Vec<Point>, seed: u64) -> Result<Self> {
        for p in &points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::NonFinite("point coordinate"));
            }
        }
        check_general_position(&points)?;
        Ok(PointSet { points, seed })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Axis-aligned bounding box `(x0, x1, y0, y1)`; `None` when empty.
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut bb = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in &self.points {
            bb.0 = bb.0.min(p.x);
            bb.1 = bb.1.max(p.x);
            bb.2 = bb.2.min(p.y);
            bb.3 = bb.3.max(p.y);
        }
        Some(bb)
    }
}

fn check_general_position(points: &[Point]) -> Result<()> {
    let n = points.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x));
    for w in idx.windows(2) {
        if points[w[0]].x == points[w[1]].x {
            return Err(Error::GeneralPosition {
                axis: "x",
                a: w[0],
                b: w[1],
            });
        }
    }
    idx.sort_by(|&a, &b| points[a].y.total_cmp(&points[b].y));
    for w in idx.windows(2) {
        if points[w[0]].y == points[w[1]].y {
            return Err(Error::GeneralPosition {
                axis: "y",
                a: w[0],
                b: w[1],
            });
        }
    }
    Ok(())
}

/// A reproducible random stream: a master seed plus a stream index.
///
/// Distinct stream indices yield statistically independent streams from the
/// same master seed, so replicates can run in parallel and still reproduce
/// bit-identically in any execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    /// The stream with the same master seed and the given index.
    pub fn substream(&self, index: u64) -> Self {
        RngStream::new(self.master_seed, index)
    }

    /// Instantiates the counter-based generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Built-in domain shapes plus a grid-backed density.
#[derive(Debug, Clone)]
pub enum Shape {
    /// The open square (-1/2, 1/2)^2.
    UnitSquare,
    /// The open diamond |x| + |y| < 1/sqrt(2) (a unit square rotated 45°).
    Diamond,
    /// An open axis-aligned rectangle (x0, x1) x (y0, y1).
    AxisRectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// The 45°-tilted rectangle 0 < (x+y)/sqrt(2) < 1, 0 < (y-x)/sqrt(2) < beta.
    TiltedRectangle { beta: f64 },
    /// The open parallelogram |ax + by| < 1, |ax - by| < beta.
    Parallelogram { a: f64, b: f64, beta: f64 },
    /// An m x m nonnegative density grid over a bounding box, row-major with
    /// `cells[iy * m + ix]`.
    GridDensity {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        m: usize,
        cells: Vec<f64>,
    },
}

/// An open region together with a nonnegative density; the sampling measure.
///
/// Built-in shapes carry a constant density `rho`; grid densities are scaled
/// by it cell-wise.
#[derive(Debug, Clone)]
pub struct DensityDomain {
    shape: Shape,
    rho: f64,
}

impl DensityDomain {
    pub fn unit_square() -> Self {
        DensityDomain {
            shape: Shape::UnitSquare,
            rho: 1.0,
        }
    }

    pub fn diamond() -> Self {
        DensityDomain {
            shape: Shape::Diamond,
            rho: 1.0,
        }
    }

    pub fn axis_rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(Error::Dimension("axis rectangle needs x0 < x1, y0 < y1".into()));
        }
        Ok(DensityDomain {
            shape: Shape::AxisRectangle { x0, x1, y0, y1 },
            rho: 1.0,
        })
    }

    pub fn tilted_rectangle(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::OutOfRange {
                what: "beta",
                value: beta,
            });
        }
        Ok(DensityDomain {
            shape: Shape::TiltedRectangle { beta },
            rho: 1.0,
        })
    }

    pub fn parallelogram(a: f64, b: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && beta > 0.0) {
            return Err(Error::Dimension(
                "parallelogram needs a, b, beta > 0".into(),
            ));
        }
        Ok(DensityDomain {
            shape: Shape::Parallelogram { a, b, beta },
            rho: 1.0,
        })
    }

    pub fn grid_density(
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        m: usize,
        cells: Vec<f64>,
    ) -> Result<Self> {
        if m == 0 || cells.len() != m * m {
            return Err(Error::Dimension(format!(
                "grid density needs m*m cells, got {} for m = {m}",
                cells.len()
            )));
        }
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::Dimension("grid density box is empty".into()));
        }
        if cells.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::NonFinite("grid density cell"));
        }
        Ok(DensityDomain {
            shape: Shape::GridDensity {
                x0,
                x1,
                y0,
                y1,
                m,
                cells,
            },
            rho: 1.0,
        })
    }

    /// Rescales the density by a constant factor.
    pub fn with_density(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::OutOfRange {
                what: "density",
                value: rho,
            });
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Total mass `∫ rho dμ`. Exact for the built-in shapes, midpoint
    /// quadrature (exact for piecewise-constant cells) for grid densities.
    pub fn mass(&self) -> f64 {
        match &self.shape {
            Shape::UnitSquare => self.rho,
            Shape::Diamond => self.rho,
            Shape::AxisRectangle { x0, x1, y0, y1 } => self.rho * (x1 - x0) * (y1 - y0),
            Shape::TiltedRectangle { beta } => self.rho * beta,
            Shape::Parallelogram { a, b, beta } => self.rho * 2.0 * beta / (a * b),
            Shape::GridDensity {
                x0,
                x1,
                y0,
                y1,
                m,
                cells,
            } => {
                let cell_area = (x1 - x0) * (y1 - y0) / ((m * m) as f64);
                self.rho * cells.iter().sum::<f64>() * cell_area
            }
        }
    }

    /// Axis-aligned bounding box `(x0, x1, y0, y1)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match &self.shape {
            Shape::UnitSquare => (-0.5, 0.5, -0.5, 0.5),
            Shape::Diamond => {
                let c = 1.0 / 2f64.sqrt();
                (-c, c, -c, c)
            }
            Shape::AxisRectangle { x0, x1, y0, y1 } => (*x0, *x1, *y0, *y1),
            Shape::TiltedRectangle { beta } => {
                // Corners in (s, t) = ((x+y)/sqrt2, (y-x)/sqrt2) coordinates:
                // (0,0), (1,0), (0,beta), (1,beta); x = (s-t)/sqrt2, y = (s+t)/sqrt2.
                let s2 = 2f64.sqrt();
                (-beta / s2, 1.0 / s2, 0.0, (1.0 + beta) / s2)
            }
            Shape::Parallelogram { a, b, beta } => {
                // x = (p+q)/(2a), y = (p-q)/(2b) over p in (-1,1), q in (-beta,beta).
                let hx = (1.0 + beta) / (2.0 * a);
                let hy = (1.0 + beta) / (2.0 * b);
                (-hx, hx, -hy, hy)
            }
            Shape::GridDensity { x0, x1, y0, y1, .. } => (*x0, *x1, *y0, *y1),
        }
    }

    /// Whether `(x, y)` lies in the open region (with positive density for
    /// grid shapes).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match &self.shape {
            Shape::UnitSquare => x.abs() < 0.5 && y.abs() < 0.5,
            Shape::Diamond => x.abs() + y.abs() < 1.0 / 2f64.sqrt(),
            Shape::AxisRectangle { x0, x1, y0, y1 } => x > *x0 && x < *x1 && y > *y0 && y < *y1,
            Shape::TiltedRectangle { beta } => {
                let s = (x + y) / 2f64.sqrt();
                let t = (y - x) / 2f64.sqrt();
                s > 0.0 && s < 1.0 && t > 0.0 && t < *beta
            }
            Shape::Parallelogram { a, b, beta } => {
                (a * x + b * y).abs() < 1.0 && (a * x - b * y).abs() < *beta
            }
            Shape::GridDensity { .. } => self.density_at(x, y) > 0.0,
        }
    }

    /// Density at a point; zero outside the region.
    pub fn density_at(&self, x: f64, y: f64) -> f64 {
        match &self.shape {
            Shape::GridDensity {
                x0,
                x1,
                y0,
                y1,
                m,
                cells,
            } => {
                if x <= *x0 || x >= *x1 || y <= *y0 || y >= *y1 {
                    return 0.0;
                }
                let fx = (x - x0) / (x1 - x0) * (*m as f64);
                let fy = (y - y0) / (y1 - y0) * (*m as f64);
                let ix = (fx as usize).min(m - 1);
                let iy = (fy as usize).min(m - 1);
                self.rho * cells[iy * m + ix]
            }
            _ => {
                if self.contains(x, y) {
                    self.rho
                } else {
                    0.0
                }
            }
        }
    }

    /// Direction `(a, b)` of the steepest diagonal of the shape, used to seed
    /// linear-ramp candidates in the maximizer.
    pub fn principal_diagonal(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Parallelogram { a, b, .. } => (*a, *b),
            Shape::Diamond => (2f64.sqrt(), 2f64.sqrt()),
            Shape::TiltedRectangle { .. } => (1.0, 1.0),
            _ => {
                let (x0, x1, y0, y1) = self.bounding_box();
                (1.0 / (x1 - x0), 1.0 / (y1 - y0))
            }
        }
    }

    /// Draws a Poisson point process with intensity `gamma * rho`.
    ///
    /// The count is Poisson with mean `gamma * mass`; points are i.i.d. with
    /// density `rho / mass`. Built-in shapes sample by closed-form inversion;
    /// grid densities by rejection against the grid maximum, falling back to
    /// cumulative-mass inversion when the acceptance rate drops below 5%.
    pub fn sample_poisson(&self, gamma: f64, rng: &RngStream) -> Result<PointSet> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::OutOfRange {
                what: "gamma",
                value: gamma,
            });
        }
        let mass = self.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::DegenerateDomain);
        }
        let mut r = rng.rng();
        let poisson = Poisson::new(gamma * mass).map_err(|_| Error::OutOfRange {
            what: "poisson mean",
            value: gamma * mass,
        })?;
        let n = poisson.sample(&mut r) as usize;
        self.draw_points(n, &mut r, rng.master_seed)
    }

    /// Draws exactly `n` i.i.d. points with density `rho / mass`.
    pub fn sample_fixed(&self, n: usize, rng: &RngStream) -> Result<PointSet> {
        if n == 0 {
            return Err(Error::OutOfRange {
                what: "n",
                value: 0.0,
            });
        }
        let mass = self.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::DegenerateDomain);
        }
        let mut r = rng.rng();
        self.draw_points(n, &mut r, rng.master_seed)
    }

    fn draw_points(&self, n: usize, r: &mut ChaCha8Rng, seed: u64) -> Result<PointSet> {
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            pts.push(self.draw_one(r));
        }
        // Exact coordinate collisions have probability ~0 but must not leak
        // into the permutation interpretation: redraw the later point.
        const MAX_ROUNDS: usize = 100;
        for _ in 0..MAX_ROUNDS {
            let dup = duplicate_indices(&pts);
            if dup.is_empty() {
                // duplicate_indices already certified general position.
                return Ok(PointSet { points: pts, seed });
            }
            for i in dup {
                pts[i] = self.draw_one(r);
            }
        }
        Err(Error::RedrawLimit(MAX_ROUNDS))
    }

    fn draw_one(&self, r: &mut ChaCha8Rng) -> Point {
        match &self.shape {
            Shape::UnitSquare => loop {
                let x = r.gen::<f64>() - 0.5;
                let y = r.gen::<f64>() - 0.5;
                if self.contains(x, y) {
                    return Point::new(x, y);
                }
            },
            Shape::Diamond => loop {
                let s = r.gen::<f64>() - 0.5;
                let t = r.gen::<f64>() - 0.5;
                let x = (s - t) / 2f64.sqrt();
                let y = (s + t) / 2f64.sqrt();
                if self.contains(x, y) {
                    return Point::new(x, y);
                }
            },
            Shape::AxisRectangle { x0, x1, y0, y1 } => loop {
                let x = x0 + r.gen::<f64>() * (x1 - x0);
                let y = y0 + r.gen::<f64>() * (y1 - y0);
                if self.contains(x, y) {
                    return Point::new(x, y);
                }
            },
            Shape::TiltedRectangle { beta } => loop {
                let s = r.gen::<f64>();
                let t = r.gen::<f64>() * beta;
                let x = (s - t) / 2f64.sqrt();
                let y = (s + t) / 2f64.sqrt();
                if self.contains(x, y) {
                    return Point::new(x, y);
                }
            },
            Shape::Parallelogram { a, b, beta } => loop {
                let p = 2.0 * r.gen::<f64>() - 1.0;
                let q = beta * (2.0 * r.gen::<f64>() - 1.0);
                let x = (p + q) / (2.0 * a);
                let y = (p - q) / (2.0 * b);
                if self.contains(x, y) {
                    return Point::new(x, y);
                }
            },
            Shape::GridDensity {
                x0,
                x1,
                y0,
                y1,
                m,
                cells,
            } => {
                let max_cell = cells.iter().cloned().fold(0.0, f64::max);
                let box_area = (x1 - x0) * (y1 - y0);
                let acceptance = cells.iter().sum::<f64>() / (max_cell * (m * m) as f64);
                if acceptance >= 0.05 {
                    loop {
                        let x = x0 + r.gen::<f64>() * (x1 - x0);
                        let y = y0 + r.gen::<f64>() * (y1 - y0);
                        let d = self.density_at(x, y);
                        if d > 0.0 && r.gen::<f64>() * max_cell * self.rho < d {
                            return Point::new(x, y);
                        }
                    }
                }
                // Sparse grid: pick a cell by binary search on cumulative mass,
                // then a uniform point inside it.
                let _ = box_area;
                let mut cum = Vec::with_capacity(cells.len());
                let mut acc = 0.0;
                for c in cells {
                    acc += c;
                    cum.push(acc);
                }
                let target = r.gen::<f64>() * acc;
                let idx = cum.partition_point(|&c| c <= target).min(cells.len() - 1);
                let iy = idx / m;
                let ix = idx % m;
                let wx = (x1 - x0) / *m as f64;
                let wy = (y1 - y0) / *m as f64;
                Point::new(
                    x0 + (ix as f64 + r.gen::<f64>()) * wx,
                    y0 + (iy as f64 + r.gen::<f64>()) * wy,
                )
            }
        }
    }
}

/// Operation-style alias for [`DensityDomain::mass`].
pub fn domain_mass(domain: &DensityDomain) -> f64 {
    domain.mass()
}

/// Order-preserving map from f64 values to u64 keys (equal values, equal keys).
fn ordered_bits(v: f64) -> u64 {
    let v = if v == 0.0 { 0.0 } else { v };
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// Indices of points that collide with an earlier point on either axis.
fn duplicate_indices(pts: &[Point]) -> Vec<usize> {
    // Fast path: sort bare coordinate keys; only fall back to the indexed
    // scan when some duplicate actually exists.
    let mut keys: Vec<u64> = Vec::with_capacity(pts.len());
    let mut clean = true;
    for axis in 0..2 {
        keys.clear();
        keys.extend(pts.iter().map(|p| ordered_bits(if axis == 0 { p.x } else { p.y })));
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            clean = false;
            break;
        }
    }
    if clean {
        return Vec::new();
    }

    let n = pts.len();
    let mut bad = std::collections::BTreeSet::new();
    let mut idx: Vec<usize> = (0..n).collect();
    for axis in 0..2 {
        let key = |i: usize| if axis == 0 { pts[i].x } else { pts[i].y };
        idx.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
        for w in idx.windows(2) {
            if key(w[0]) == key(w[1]) {
                bad.insert(w[0].max(w[1]));
            }
        }
    }
    bad.into_iter().collect()
}

pub use io::{read_points_binary, read_points_csv, write_points_binary, write_points_csv};
pub(crate) use io::tmp_path as tmp_path_for;

#[cfg(test)]
mod tests;
