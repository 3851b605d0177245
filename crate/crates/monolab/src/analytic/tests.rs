use super::*;
use crate::geometry::DensityDomain;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const PI: f64 = std::f64::consts::PI;

#[test]
fn phi_closed_form_values() {
    let m = PhiModel::Conjectured;
    assert_eq!(m.phi(0.0), 0.0);
    assert!((m.phi(SQRT2) - 1.0).abs() < 1e-15);
    assert!((m.phi(1.0) - 0.9142135623730951).abs() < 1e-15);
    assert_eq!(m.phi(2.0), 1.0);
}

#[test]
fn phi_is_monotone_concave_bounded() {
    let m = PhiModel::Conjectured;
    let n = 400;
    let vals: Vec<f64> = (0..=n).map(|i| m.phi(2.5 * i as f64 / n as f64)).collect();
    for w in vals.windows(2) {
        assert!(w[1] >= w[0] - 1e-15);
    }
    for w in vals.windows(3) {
        assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-12);
    }
    assert!(vals.iter().all(|&v| (0.0..=1.0).contains(&v)));
}

#[test]
fn tabulated_phi_repairs_noise_and_tracks_the_curve() {
    let truth = PhiModel::Conjectured;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<(f64, f64)> = (1..=40)
        .map(|i| {
            let r = 2.0 * i as f64 / 40.0;
            (r, truth.phi(r) + 0.01 * (rng.gen::<f64>() - 0.5))
        })
        .collect();
    let tab = PhiModel::Tabulated(TabulatedPhi::new(&samples).unwrap());
    // invariants hold after repair
    let grid: Vec<f64> = (0..=200).map(|i| tab.phi(2.2 * i as f64 / 200.0)).collect();
    assert_eq!(tab.phi(0.0), 0.0);
    for w in grid.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
    for w in grid.windows(3) {
        assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-9);
    }
    // and the repaired curve stays near the truth
    for i in 0..=20 {
        let r = 2.0 * i as f64 / 20.0;
        assert!((tab.phi(r) - truth.phi(r)).abs() < 0.03);
    }
}

#[test]
fn phi_star_values_and_bounds() {
    let m = PhiModel::Conjectured;
    assert!((m.phi_star(0.0) + 1.0).abs() < 1e-15);
    assert!(m.phi_star(SQRT2).abs() < 1e-15);
    assert!(m.phi_star(3.0).abs() < 1e-15);
    for i in 0..=100 {
        let s = 3.0 * i as f64 / 100.0;
        let v = m.phi_star(s);
        assert!((-1.0..=1e-15).contains(&v), "phi_star({s}) = {v}");
    }
}

#[test]
fn fenchel_young_inequality_and_attainment() {
    let m = PhiModel::Conjectured;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let r = 3.0 * rng.gen::<f64>();
        let s = 3.0 * rng.gen::<f64>();
        assert!(m.phi(r) + m.phi_star(s) <= r * s + 1e-12);
    }
    // for each r there is an s with equality: s = sqrt(2) - r on [0, sqrt2]
    for i in 0..=50 {
        let r = SQRT2 * i as f64 / 50.0;
        let s = SQRT2 - r;
        assert!((m.phi(r) + m.phi_star(s) - r * s).abs() < 1e-8);
    }
    // tabulated models satisfy the inequality too
    let samples: Vec<(f64, f64)> = (1..=30)
        .map(|i| {
            let r = 2.0 * i as f64 / 30.0;
            (r, m.phi(r))
        })
        .collect();
    let tab = PhiModel::Tabulated(TabulatedPhi::new(&samples).unwrap());
    for _ in 0..2000 {
        let r = 2.0 * rng.gen::<f64>();
        let s = 2.0 * rng.gen::<f64>();
        assert!(tab.phi(r) + tab.phi_star(s) <= r * s + 1e-9);
    }
}

#[test]
fn l_value_definition_and_monotonicity() {
    let m = PhiModel::Conjectured;
    assert_eq!(l_value(1.0, 0.0, &m), 0.0);
    assert_eq!(l_value(0.0, 5.0, &m), 0.0);
    assert!((l_value(1.0, 1.0, &m) - 1.0).abs() < 1e-15);
    // monotone in both arguments on a lattice, and bounded by eta
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 5.0).collect();
    for (i, &eta) in grid.iter().enumerate() {
        for (j, &theta) in grid.iter().enumerate() {
            let v = l_value(eta, theta, &m);
            assert!(v <= eta + 1e-12);
            if i > 0 {
                assert!(v + 1e-12 >= l_value(grid[i - 1], theta, &m));
            }
            if j > 0 {
                assert!(v + 1e-12 >= l_value(eta, grid[j - 1], &m));
            }
        }
    }
}

#[test]
fn alpha_from_r_solves_the_parameterization() {
    let a = alpha_from_r(2.0 / PI).unwrap();
    assert!((a - PI / 2.0).abs() < 1e-12);
    for r in [0.05, 0.3, 1.0, 1.7, 1.95] {
        let a = alpha_from_r(r).unwrap();
        let back = 2.0 / PI * (a.sin() - a * a.cos());
        assert!((back - r).abs() < 1e-12, "r = {r}");
    }
    // small-r expansion: r ~ 2 a^3 / (3 pi)
    let a = alpha_from_r(1e-6).unwrap();
    let series = (3.0 * PI * 1e-6 / 2.0).powf(1.0 / 3.0);
    assert!((a - series).abs() / series < 1e-3);
    assert!(alpha_from_r(0.0).is_err());
    assert!(alpha_from_r(2.0).is_err());
}

#[test]
fn angle_from_coord_inverts_the_coordinate_map() {
    assert_eq!(angle_from_coord(0.0).unwrap(), 0.0);
    for t in [-0.49, -0.25, 0.1, 0.25, 0.4999] {
        let p = angle_from_coord(t).unwrap();
        let back = (p + 0.5 * (2.0 * p).sin()) / PI;
        assert!((back - t).abs() < 1e-12, "t = {t}");
    }
    // approaching the right edge drives the angle to pi/2
    let p = angle_from_coord(0.499_999_9).unwrap();
    assert!(p > PI / 2.0 - 0.05);
    assert!(angle_from_coord(0.5).is_err());
    assert!(angle_from_coord(-0.5).is_err());
}

#[test]
fn uniform_surface_center_and_clamps() {
    for r in [0.3, 1.0, 1.7] {
        assert!(uniform_limit_surface(0.0, 0.0, r).unwrap().abs() < 1e-14);
        // pick a symmetric point with psi + phi just above alpha: clamped
        let p = SurfaceParams::from_r(r).unwrap();
        let phi = (p.alpha / 2.0) * 1.02;
        let t = (phi + 0.5 * (2.0 * phi).sin()) / PI;
        let v = uniform_limit_surface(t, t, r).unwrap();
        assert!((v - r / 2.0).abs() < 1e-12, "r = {r}, v = {v}");
        let v = uniform_limit_surface(-t, -t, r).unwrap();
        assert!((v + r / 2.0).abs() < 1e-12);
    }
    assert!(uniform_limit_surface(0.6, 0.0, 1.0).is_err());
}

#[test]
fn uniform_surface_grid_is_doubly_increasing_with_full_range() {
    let r = 1.0;
    let p = SurfaceParams::from_r(r).unwrap();
    let n = 512usize;
    let coord = |i: usize| -0.5 + (i as f64 + 0.5) / n as f64;
    let mut vals = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            vals[iy * n + ix] = uniform_limit_surface_with(&p, coord(ix), coord(iy)).unwrap();
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for iy in 0..n {
        for ix in 0..n {
            let v = vals[iy * n + ix];
            lo = lo.min(v);
            hi = hi.max(v);
            if ix + 1 < n {
                assert!(vals[iy * n + ix + 1] >= v);
            }
            if iy + 1 < n {
                assert!(vals[(iy + 1) * n + ix] >= v);
            }
        }
    }
    assert!((lo + r / 2.0).abs() < 1e-10);
    assert!((hi - r / 2.0).abs() < 1e-10);
}

#[test]
fn dual_surface_orientation_and_range() {
    let r = 1.0;
    let p = SurfaceParams::from_r(r).unwrap();
    let n = 64usize;
    let coord = |i: usize| -0.5 + (i as f64 + 0.5) / n as f64;
    for iy in 0..n {
        for ix in 0..n {
            let v = uniform_dual_surface_with(&p, coord(ix), coord(iy)).unwrap();
            assert!(v.abs() <= p.s / 2.0 + 1e-12);
            if ix + 1 < n {
                let v2 = uniform_dual_surface_with(&p, coord(ix + 1), coord(iy)).unwrap();
                assert!(v2 <= v + 1e-12); // decreasing in x
            }
            if iy + 1 < n {
                let v2 = uniform_dual_surface_with(&p, coord(ix), coord(iy + 1)).unwrap();
                assert!(v2 + 1e-12 >= v); // increasing in y
            }
        }
    }
}

#[test]
fn lsvk_curve_landmarks_and_symmetry() {
    let (r, s) = lsvk_curve(PI / 2.0);
    assert!((r - 2.0 / PI).abs() < 1e-15);
    assert!((s - 2.0 / PI).abs() < 1e-15);
    let (r, s) = lsvk_curve(PI - 1e-9);
    assert!((r - 2.0).abs() < 1e-8 && s.abs() < 1e-8);
    let (r, s) = lsvk_curve(1e-9);
    assert!(r.abs() < 1e-8 && (s - 2.0).abs() < 1e-8);
    // alpha -> pi - alpha swaps (r, s)
    for i in 1..40 {
        let a = PI * i as f64 / 40.0;
        let (r1, s1) = lsvk_curve(a);
        let (r2, s2) = lsvk_curve(PI - a);
        assert!((r1 - s2).abs() < 1e-12 && (s1 - r2).abs() < 1e-12);
    }
}

#[test]
fn f_rho_of_constant_surface_is_zero() {
    let dom = DensityDomain::unit_square();
    let u = MonotoneGrid::from_fn((-0.5, 0.5, -0.5, 0.5), 33, 0.2, 0.0, |_, _| 0.2).unwrap();
    assert_eq!(f_rho(&u, &dom, &PhiModel::Conjectured).unwrap(), 0.0);
}

#[test]
fn f_rho_linear_on_parallelogram_matches_closed_form() {
    // F of c(ax + by) over |ax+by|<1, |ax-by|<beta with density rho is
    // 2 rho beta Phi(c sqrt(2ab/rho)) / (ab).
    let m = PhiModel::Conjectured;
    for (a, b, beta, rho, c) in [
        (1.0f64, 1.0f64, 4.0f64, 1.0f64, 0.5f64),
        (2.0, 0.5, 2.0, 1.0, 0.3),
        (1.0, 1.0, 1.0, 2.0, 0.8),
    ] {
        let dom = DensityDomain::parallelogram(a, b, beta)
            .unwrap()
            .with_density(rho)
            .unwrap();
        let (x0, x1, y0, y1) = dom.bounding_box();
        let lo = c * (a * x0 + b * y0) - 1e-9;
        let hi = c * (a * x1 + b * y1) + 1e-9;
        let u = MonotoneGrid::from_fn((x0, x1, y0, y1), 257, lo, hi - lo, |x, y| {
            c * (a * x + b * y)
        })
        .unwrap();
        let expected = 2.0 * rho * beta * m.phi(c * (2.0 * a * b / rho).sqrt()) / (a * b);
        let got = f_rho(&u, &dom, &m).unwrap();
        assert!(
            (got - expected).abs() < 0.005 * expected,
            "a={a} b={b}: got {got}, expected {expected}"
        );
    }
}

#[test]
fn f_rho_linear_on_diamond_is_phi() {
    // The diamond is the parallelogram a = b = sqrt(2), beta = 1, where the
    // maximum of the functional at range r equals Phi(r).
    let m = PhiModel::Conjectured;
    let dom = DensityDomain::diamond();
    let s2 = 2f64.sqrt();
    for r in [0.5, 1.0, 1.3] {
        let c = r / 2.0;
        let (x0, x1, y0, y1) = dom.bounding_box();
        // over the bounding box the ramp spans [-r, r]; on the diamond itself
        // it spans [-r/2, r/2]
        let u = MonotoneGrid::from_fn((x0, x1, y0, y1), 513, -r - 1e-9, 2.0 * r + 2e-9, |x, y| {
            c * s2 * (x + y)
        })
        .unwrap();
        let got = f_rho(&u, &dom, &m).unwrap();
        assert!((got - m.phi(r)).abs() < 1e-3, "r = {r}: {got} vs {}", m.phi(r));
    }
}

#[test]
fn f_rho_is_bounded_by_mass_and_concave() {
    let m = PhiModel::Conjectured;
    let dom = DensityDomain::unit_square();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let mut random_monotone = |range: f64| {
        let n = 17usize;
        let mut vals = vec![0.0f64; n * n];
        for v in vals.iter_mut() {
            *v = rng.gen::<f64>();
        }
        // running maxima along both axes make the grid doubly increasing
        for iy in 0..n {
            for ix in 0..n {
                let mut v: f64 = vals[iy * n + ix];
                if ix > 0 {
                    v = v.max(vals[iy * n + ix - 1]);
                }
                if iy > 0 {
                    v = v.max(vals[(iy - 1) * n + ix]);
                }
                vals[iy * n + ix] = v;
            }
        }
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-12);
        for v in vals.iter_mut() {
            *v = (*v - lo) / span * range;
        }
        let g = ScalarGrid::new((-0.5, 0.5, -0.5, 0.5), n, n, vals).unwrap();
        MonotoneGrid::new(g, 0.0, range).unwrap()
    };
    for _ in 0..100 {
        let u1 = random_monotone(1.0);
        let u2 = random_monotone(1.0);
        let f1 = f_rho(&u1, &dom, &m).unwrap();
        let f2 = f_rho(&u2, &dom, &m).unwrap();
        assert!(f1 <= dom.mass() + 1e-12);
        let mid_vals: Vec<f64> = u1
            .grid()
            .values
            .iter()
            .zip(u2.grid().values.iter())
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mid = MonotoneGrid::new(
            ScalarGrid::new((-0.5, 0.5, -0.5, 0.5), 17, 17, mid_vals).unwrap(),
            0.0,
            1.0,
        )
        .unwrap();
        let fm = f_rho(&mid, &dom, &m).unwrap();
        assert!(fm >= 0.5 * (f1 + f2) - 1e-9, "concavity violated");
    }
}

#[test]
fn f_rho_is_invariant_under_axis_rescaling() {
    // stretching x by lambda while dividing the density by lambda leaves the
    // functional unchanged
    let m = PhiModel::Conjectured;
    let lambda = 3.7;
    let n = 65usize;
    let base = DensityDomain::axis_rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
    let stretched = DensityDomain::axis_rectangle(0.0, lambda, 0.0, 1.0)
        .unwrap()
        .with_density(1.0 / lambda)
        .unwrap();
    let f = |x: f64, y: f64| 0.8 * (x * x * 0.3 + x * 0.2) + 0.5 * y * (1.0 + 0.2 * y);
    let u1 = {
        let g = ScalarGrid::from_fn((0.0, 1.0, 0.0, 1.0), n, n, f).unwrap();
        let lo = g.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = g.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        MonotoneGrid::new(g, lo, hi - lo).unwrap()
    };
    let u2 = {
        let g = ScalarGrid::from_fn((0.0, lambda, 0.0, 1.0), n, n, |x, y| f(x / lambda, y)).unwrap();
        let lo = g.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = g.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        MonotoneGrid::new(g, lo, hi - lo).unwrap()
    };
    let f1 = f_rho(&u1, &base, &m).unwrap();
    let f2 = f_rho(&u2, &stretched, &m).unwrap();
    assert!(
        (f1 - f2).abs() <= 1e-6 * f1.abs().max(1.0),
        "f1 = {f1}, f2 = {f2}"
    );
}

#[test]
fn non_monotone_grid_is_rejected() {
    let g = ScalarGrid::new(
        (-0.5, 0.5, -0.5, 0.5),
        2,
        2,
        vec![1.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    assert!(matches!(
        MonotoneGrid::new(g, 0.0, 1.0),
        Err(crate::Error::NotMonotone { .. })
    ));
}

#[test]
fn pde_residual_analytic_pair_is_small() {
    let r = 1.0;
    let p = SurfaceParams::from_r(r).unwrap();
    let n = 512usize;
    let inset = 0.5 - 0.5 / n as f64;
    let bbox = (-inset, inset, -inset, inset);
    let u = ScalarGrid::from_fn(bbox, n, n, |x, y| {
        uniform_limit_surface_with(&p, x, y).unwrap()
    })
    .unwrap();
    let v = ScalarGrid::from_fn(bbox, n, n, |x, y| {
        uniform_dual_surface_with(&p, x, y).unwrap()
    })
    .unwrap();
    for conjecture_form in [true, false] {
        let res = pde_residual(&u, &v, 1.0, &PhiModel::Conjectured, conjecture_form).unwrap();
        let (m1, m2) = res.median_abs();
        assert!(m1 < 1e-3, "median res1 = {m1} (conjecture = {conjecture_form})");
        assert!(m2 < 1e-3, "median res2 = {m2} (conjecture = {conjecture_form})");
    }
}

#[test]
fn pde_residual_linear_pair_and_degenerate_branch() {
    // matched linear pair on a parallelogram: the transversality defect
    // vanishes identically
    let bbox = (-1.0, 1.0, -1.0, 1.0);
    let u = ScalarGrid::from_fn(bbox, 33, 33, |x, y| 0.4 * (x + y)).unwrap();
    let v = ScalarGrid::from_fn(bbox, 33, 33, |x, y| 0.7 * (y - x)).unwrap();
    let res = pde_residual(&u, &v, 1.0, &PhiModel::Conjectured, false).unwrap();
    assert!(res.res1.iter().all(|r| r.abs() < 1e-14));

    // constants: eq2 collapses to rho (Phi(0) + Phi*(0)) = -rho; degenerate
    // cells are flagged
    let cu = ScalarGrid::from_fn(bbox, 9, 9, |_, _| 0.25).unwrap();
    let cv = ScalarGrid::from_fn(bbox, 9, 9, |_, _| 0.75).unwrap();
    let rho = 1.3;
    let res = pde_residual(&cu, &cv, rho, &PhiModel::Conjectured, false).unwrap();
    assert!(res.res1.iter().all(|r| *r == 0.0));
    assert!(res.res2.iter().all(|r| (r + rho).abs() < 1e-12));
    assert!(res.flags.iter().all(|f| f & 4 != 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fenchel_young_holds_everywhere(r in 0.0f64..4.0, s in 0.0f64..4.0) {
        let m = PhiModel::Conjectured;
        prop_assert!(m.phi(r) + m.phi_star(s) <= r * s + 1e-12);
    }

    #[test]
    fn l_never_exceeds_eta(eta in 0.0f64..5.0, theta in 0.0f64..5.0) {
        let m = PhiModel::Conjectured;
        prop_assert!(l_value(eta, theta, &m) <= eta + 1e-12);
    }
}
