use super::*;

fn stream(seed: u64, idx: u64) -> RngStream {
    RngStream::new(seed, idx)
}

#[test]
fn transform_t_basis() {
    let img = transform_t(Point::new(1.0, 0.0));
    assert_eq!((img.x, img.y), (1.0, 1.0));
    let img = transform_t(Point::new(0.0, 1.0));
    assert_eq!((img.x, img.y), (-1.0, 1.0));
    let img = transform_t(Point::new(0.0, 0.0));
    assert_eq!((img.x, img.y), (0.0, 0.0));
}

#[test]
fn mass_of_builtin_shapes() {
    assert_eq!(DensityDomain::unit_square().mass(), 1.0);
    assert!((DensityDomain::diamond().mass() - 1.0).abs() < 1e-15);
    let d = DensityDomain::parallelogram(1.3, 0.7, 4.0).unwrap();
    assert!((d.mass() - 2.0 * 4.0 / (1.3 * 0.7)).abs() < 1e-12);
    // Constant-density recovery: mass * ab / (2 beta) == rho.
    for (a, b, beta, rho) in [(1.0, 1.0, 4.0, 1.0), (2.5, 0.3, 1.7, 3.25)] {
        let d = DensityDomain::parallelogram(a, b, beta)
            .unwrap()
            .with_density(rho)
            .unwrap();
        assert!((d.mass() * a * b / (2.0 * beta) - rho).abs() < 1e-12);
    }
    let d = DensityDomain::tilted_rectangle(8.0).unwrap();
    assert!((d.mass() - 8.0).abs() < 1e-12);
}

#[test]
fn grid_density_mass_is_midpoint_quadrature() {
    // 2x2 grid over (0,2)^2, cell area 1.
    let d = DensityDomain::grid_density(0.0, 2.0, 0.0, 2.0, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!((d.mass() - 10.0).abs() < 1e-12);
    assert_eq!(d.density_at(0.5, 0.5), 1.0);
    assert_eq!(d.density_at(1.5, 0.5), 2.0);
    assert_eq!(d.density_at(0.5, 1.5), 3.0);
    assert_eq!(d.density_at(1.5, 1.5), 4.0);
}

#[test]
fn zero_mass_domain_errors() {
    let d = DensityDomain::grid_density(0.0, 1.0, 0.0, 1.0, 2, vec![0.0; 4]).unwrap();
    assert!(matches!(
        d.sample_poisson(10.0, &stream(1, 0)),
        Err(Error::DegenerateDomain)
    ));
    assert!(matches!(
        d.sample_fixed(10, &stream(1, 0)),
        Err(Error::DegenerateDomain)
    ));
}

#[test]
fn poisson_sampling_stays_in_domain() {
    let d = DensityDomain::diamond();
    let ps = d.sample_poisson(1e5, &stream(42, 0)).unwrap();
    assert!(ps
        .points()
        .iter()
        .all(|p| p.x.abs() + p.y.abs() < 1.0 / 2f64.sqrt()));

    let sq = DensityDomain::unit_square();
    let ps = sq.sample_poisson(1000.0, &stream(7, 3)).unwrap();
    assert!(ps.points().iter().all(|p| p.x.abs() < 0.5 && p.y.abs() < 0.5));
    // E[N] = 1000; allow 5 sigma.
    let n = ps.len() as f64;
    assert!((n - 1000.0).abs() < 5.0 * 1000f64.sqrt(), "N = {n}");
}

#[test]
fn sampling_is_deterministic_per_stream() {
    let d = DensityDomain::parallelogram(1.0, 1.0, 2.0).unwrap();
    let a = d.sample_poisson(500.0, &stream(99, 5)).unwrap();
    let b = d.sample_poisson(500.0, &stream(99, 5)).unwrap();
    assert_eq!(a.len(), b.len());
    for (p, q) in a.points().iter().zip(b.points()) {
        assert_eq!(p.x.to_bits(), q.x.to_bits());
        assert_eq!(p.y.to_bits(), q.y.to_bits());
    }
    let c = d.sample_poisson(500.0, &stream(99, 6)).unwrap();
    assert!(c.len() != a.len() || c.points()[0].x != a.points()[0].x);
}

#[test]
fn poisson_count_moments_over_replicates() {
    // 200 independent streams at gamma = 1e6 on the unit square:
    // the counts must look Poisson(1e6) in mean and variance.
    let d = DensityDomain::unit_square();
    let counts: Vec<f64> = (0..200)
        .map(|i| d.sample_poisson(1e6, &stream(2024, i)).unwrap().len() as f64)
        .collect();
    let k = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / k;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (k - 1.0);
    let sigma_of_mean = (1e6f64 / k).sqrt();
    assert!(
        (mean - 1e6).abs() < 3.0 * sigma_of_mean,
        "mean = {mean}, 3 sigma = {}",
        3.0 * sigma_of_mean
    );
    let ratio = var / mean;
    assert!((0.95..=1.05).contains(&ratio), "variance/mean = {ratio}");
}

#[test]
fn fixed_sampling_basics() {
    let d = DensityDomain::unit_square();
    let one = d.sample_fixed(1, &stream(3, 0)).unwrap();
    assert_eq!(one.len(), 1);
    assert!(d.contains(one.points()[0].x, one.points()[0].y));
    assert!(d.sample_fixed(0, &stream(3, 0)).is_err());
}

/// Inversion count of the permutation read off a point set, via a Fenwick tree.
fn inversions(ps: &PointSet) -> u64 {
    let n = ps.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ps.points()[a].x.total_cmp(&ps.points()[b].x));
    let mut yrank = vec![0usize; n];
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by(|&a, &b| ps.points()[a].y.total_cmp(&ps.points()[b].y));
    for (r, &i) in by_y.iter().enumerate() {
        yrank[i] = r + 1;
    }
    let mut tree = vec![0u64; n + 1];
    let mut inv = 0u64;
    for (t, &i) in order.iter().enumerate() {
        // count earlier points with larger y
        let mut r = yrank[i];
        let mut below = 0u64;
        while r > 0 {
            below += tree[r];
            r -= r & r.wrapping_neg();
        }
        inv += t as u64 - below;
        let mut r = yrank[i];
        while r <= n {
            tree[r] += 1;
            r += r & r.wrapping_neg();
        }
    }
    inv
}

#[test]
fn fixed_sampling_gives_uniform_permutations() {
    // For a uniform permutation of n the inversion count has mean n(n-1)/4
    // and variance n(n-1)(2n+5)/72; check a 1e5-point sample within 4 sigma.
    let n = 100_000usize;
    let d = DensityDomain::unit_square();
    let ps = d.sample_fixed(n, &stream(11, 0)).unwrap();
    let inv = inversions(&ps) as f64;
    let nf = n as f64;
    let mean = nf * (nf - 1.0) / 4.0;
    let sd = (nf * (nf - 1.0) * (2.0 * nf + 5.0) / 72.0).sqrt();
    assert!((inv - mean).abs() < 4.0 * sd, "inv = {inv}, mean = {mean}, sd = {sd}");
}

#[test]
fn grid_density_sampling_passes_chi_squared() {
    // Uniform grid density on (0,1)^2, n = 1e4; chi-squared over a 10x10
    // binning has 99 dof; the 0.1% critical value is 148.2304.
    let d = DensityDomain::grid_density(0.0, 1.0, 0.0, 1.0, 4, vec![1.0; 16]).unwrap();
    let n = 10_000usize;
    let ps = d.sample_fixed(n, &stream(17, 0)).unwrap();
    let mut bins = [0f64; 100];
    for p in ps.points() {
        let ix = ((p.x * 10.0) as usize).min(9);
        let iy = ((p.y * 10.0) as usize).min(9);
        bins[iy * 10 + ix] += 1.0;
    }
    let expected = n as f64 / 100.0;
    let chi2: f64 = bins.iter().map(|b| (b - expected) * (b - expected) / expected).sum();
    assert!(chi2 < 148.2304, "chi2 = {chi2}");
}

#[test]
fn nonuniform_grid_density_sampling_matches_cell_masses() {
    // One heavy cell: 3/4 of the mass should land there (within 5 sigma).
    let d = DensityDomain::grid_density(0.0, 1.0, 0.0, 1.0, 2, vec![1.0, 1.0, 1.0, 9.0]).unwrap();
    let n = 20_000usize;
    let ps = d.sample_fixed(n, &stream(23, 0)).unwrap();
    let heavy = ps
        .points()
        .iter()
        .filter(|p| p.x > 0.5 && p.y > 0.5)
        .count() as f64;
    let p = 9.0 / 12.0;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    assert!((heavy - n as f64 * p).abs() < 5.0 * sd);
}

#[test]
fn sparse_grid_density_uses_inversion_fallback() {
    // 1 live cell out of 1024: acceptance 1/1024 << 5%, exercising the
    // cumulative-mass path. All points must land in the live cell.
    let m = 32;
    let mut cells = vec![0.0; m * m];
    cells[5 * m + 7] = 1.0;
    let d = DensityDomain::grid_density(0.0, 1.0, 0.0, 1.0, m, cells).unwrap();
    let ps = d.sample_fixed(500, &stream(5, 0)).unwrap();
    let w = 1.0 / m as f64;
    for p in ps.points() {
        assert!(p.x >= 7.0 * w && p.x <= 8.0 * w, "x = {}", p.x);
        assert!(p.y >= 5.0 * w && p.y <= 6.0 * w, "y = {}", p.y);
    }
}

#[test]
fn subrectangle_counts_concentrate() {
    // Poisson thinning: counts in a fixed sub-rectangle over 100 replicates
    // sum to a Poisson variable with mean 100 * gamma * area(R).
    let d = DensityDomain::unit_square();
    let gamma = 500.0;
    let (rx0, rx1, ry0, ry1) = (-0.3, 0.1, 0.0, 0.45);
    let area = (rx1 - rx0) * (ry1 - ry0);
    let mut total = 0usize;
    for i in 0..100 {
        let ps = d.sample_poisson(gamma, &stream(31, i)).unwrap();
        total += ps
            .points()
            .iter()
            .filter(|p| p.x > rx0 && p.x < rx1 && p.y > ry0 && p.y < ry1)
            .count();
    }
    let mean = 100.0 * gamma * area;
    assert!(
        (total as f64 - mean).abs() < 4.0 * mean.sqrt(),
        "total = {total}, mean = {mean}"
    );
}

#[test]
fn general_position_is_enforced() {
    let dup_x = vec![Point::new(0.5, 0.1), Point::new(0.5, 0.7)];
    assert!(matches!(
        PointSet::new(dup_x, 0),
        Err(Error::GeneralPosition { axis: "x", .. })
    ));
    let dup_y = vec![Point::new(0.2, 0.4), Point::new(0.9, 0.4)];
    assert!(matches!(
        PointSet::new(dup_y, 0),
        Err(Error::GeneralPosition { axis: "y", .. })
    ));
    assert!(PointSet::new(vec![Point::new(0.0, 0.0), Point::new(1.0, f64::NAN)], 0).is_err());
}

#[test]
fn csv_and_binary_round_trip() {
    let d = DensityDomain::diamond();
    let ps = d.sample_poisson(300.0, &stream(8, 0)).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let csv = dir.path().join("pts.csv");
    write_points_csv(&ps, &csv).unwrap();
    let back = read_points_csv(&csv).unwrap();
    assert_eq!(back.len(), ps.len());
    for (p, q) in ps.points().iter().zip(back.points()) {
        assert_eq!(p.x.to_bits(), q.x.to_bits());
        assert_eq!(p.y.to_bits(), q.y.to_bits());
    }

    let bin = dir.path().join("pts.bin");
    write_points_binary(&ps, &bin).unwrap();
    let back = read_points_binary(&bin).unwrap();
    for (p, q) in ps.points().iter().zip(back.points()) {
        assert_eq!(p.x.to_bits(), q.x.to_bits());
        assert_eq!(p.y.to_bits(), q.y.to_bits());
    }
}
