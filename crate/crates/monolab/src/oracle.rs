//! Independent reference implementations used by the test suites.
//!
//! Everything here is deliberately naive — exhaustive enumeration, quadratic
//! dynamic programming, first-order dual ascent — and shares no code with the
//! production paths it certifies. Not for production use.

/// Longest increasing chain of `(x, y)` pairs by O(n^2) dynamic programming.
pub fn brute_lis(points: &[(f64, f64)]) -> usize {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a].0.total_cmp(&points[b].0));
    let mut dp = vec![1usize; n];
    let mut best = 0;
    for i in 0..n {
        for j in 0..i {
            if points[order[j]].1 < points[order[i]].1 && dp[j] + 1 > dp[i] {
                dp[i] = dp[j] + 1;
            }
        }
        best = best.max(dp[i]);
    }
    best
}

/// `out[k]` = size of the largest subset with no increasing subset above `k`,
/// by exhaustive subset enumeration. Only for n <= ~20.
pub fn brute_max_k_decreasing_sizes(points: &[(f64, f64)]) -> Vec<u64> {
    let n = points.len();
    assert!(n <= 20, "exhaustive oracle limited to n <= 20");
    let mut best = vec![0u64; n + 1];
    for mask in 0u64..(1u64 << n) {
        let sub: Vec<(f64, f64)> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| points[i]).collect();
        if sub.is_empty() {
            continue;
        }
        let l = brute_lis(&sub);
        let m = sub.len() as u64;
        for k in l..=n {
            if best[k] < m {
                best[k] = m;
            }
        }
    }
    best
}

/// κ at `(x, y)` straight from the definition: the longest increasing chain
/// of the points in the closed south-west quadrant.
pub fn brute_kappa(points: &[(f64, f64)], x: f64, y: f64) -> usize {
    let quad: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(px, py)| px <= x && py <= y)
        .collect();
    brute_lis(&quad)
}

/// Exact Euclidean projection onto the doubly-increasing box-constrained set
/// by accelerated projected gradient on the dual problem.
///
/// Minimizes `0.5 ||x - y||^2` subject to `G x <= h`, where the rows of `G`
/// encode `x[i,j] - x[i+1,j] <= 0`, `x[i,j] - x[i,j+1] <= 0`, and the bounds
/// `lo <= x <= hi`. The dual is smooth with Lipschitz constant `||G||^2`;
/// Nesterov acceleration reaches machine-level primal accuracy on the tiny
/// instances used in tests.
pub fn qp_monotone_projection(
    values: &[f64],
    nx: usize,
    ny: usize,
    lo: f64,
    hi: f64,
    iters: usize,
) -> Vec<f64> {
    assert_eq!(values.len(), nx * ny);
    // constraint rows as (plus_index, minus_index, rhs): x[p] - x[m] <= rhs,
    // with m == usize::MAX meaning no second variable.
    let mut rows: Vec<(usize, usize, f64)> = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let a = iy * nx + ix;
            if ix + 1 < nx {
                rows.push((a, iy * nx + ix + 1, 0.0));
            }
            if iy + 1 < ny {
                rows.push((a, (iy + 1) * nx + ix, 0.0));
            }
            rows.push((a, usize::MAX, hi)); // x[a] <= hi
            rows.push((usize::MAX, a, -lo)); // -x[a] <= -lo
        }
    }
    let m = rows.len();
    let mut lambda = vec![0.0f64; m];
    let mut lambda_prev = vec![0.0f64; m];
    let mut momentum = vec![0.0f64; m];
    // ||G||^2 <= max row count per variable * 2; a safe Lipschitz bound:
    let lip = 16.0f64;
    let step = 1.0 / lip;
    let mut x = values.to_vec();
    let mut t_prev = 1.0f64;
    for _ in 0..iters {
        // x(lambda) = y - G^T lambda
        for (xi, yi) in x.iter_mut().zip(values.iter()) {
            *xi = *yi;
        }
        for (r, &(p, mn, _)) in rows.iter().enumerate() {
            if p != usize::MAX {
                x[p] -= momentum[r];
            }
            if mn != usize::MAX {
                x[mn] += momentum[r];
            }
        }
        // gradient of the dual at the extrapolated point: G x - h
        lambda_prev.copy_from_slice(&lambda);
        for (r, &(p, mn, rhs)) in rows.iter().enumerate() {
            let gx = match (p, mn) {
                (usize::MAX, mn) => -x[mn],
                (p, usize::MAX) => x[p],
                (p, mn) => x[p] - x[mn],
            };
            lambda[r] = (momentum[r] + step * (gx - rhs)).max(0.0);
        }
        let t = 0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt());
        let beta = (t_prev - 1.0) / t;
        for r in 0..m {
            momentum[r] = lambda[r] + beta * (lambda[r] - lambda_prev[r]);
        }
        t_prev = t;
    }
    // final primal point from the converged multipliers
    let mut out = values.to_vec();
    for (r, &(p, mn, _)) in rows.iter().enumerate() {
        if p != usize::MAX {
            out[p] -= lambda[r];
        }
        if mn != usize::MAX {
            out[mn] += lambda[r];
        }
    }
    out
}

/// Abramowitz–Stegun 7.1.26 rational approximation of erf, max error 1.5e-7.
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}
