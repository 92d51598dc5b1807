//! Shared quadrature primitives: Gauss-Legendre rules, log-spaced grids,
//! geometric panel sets, and semi-infinite ray integration with a power-law
//! remainder fit.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed once by Newton iteration on the Legendre polynomial and cached.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=32).map(compute_gl).collect());
    assert!(n >= 2 && n <= 32, "GL order {n} out of the cached range");
    &cache[n]
}

fn compute_gl(n: usize) -> Vec<(f64, f64)> {
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-based initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrate f over [a, b] with a single n-point GL panel.
pub fn gl_panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in gauss_legendre(n) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite GL quadrature over consecutive panels delimited by `edges`.
pub fn gl_composite(f: &mut impl FnMut(f64) -> f64, edges: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for pair in edges.windows(2) {
        acc += gl_panel(f, pair[0], pair[1], n);
    }
    acc
}

/// `count` points spanning [lo, hi] uniformly in log scale (inclusive).
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Log grid over [lo, hi] at a fixed density of points per decade.
pub fn log_grid_per_decade(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).round() as usize).max(2) + 1;
    log_spaced(lo, hi, count)
}

/// Uniform grid on [a, b] with `count` points (inclusive).
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Geometric panel edges from `from` out to at least `to` with the given ratio.
pub fn geometric_edges(from: f64, to: f64, ratio: f64) -> Vec<f64> {
    assert!(from > 0.0 && to > from && ratio > 1.0);
    let mut edges = vec![from];
    let mut r = from;
    while r < to {
        r = (r * ratio).min(to);
        edges.push(r);
    }
    edges
}

/// Dyadic panel edges going inward: rho, rho/2, ..., rho/2^levels (descending).
pub fn dyadic_inward(rho: f64, levels: usize) -> Vec<f64> {
    let mut edges = Vec::with_capacity(levels + 1);
    let mut r = rho;
    for _ in 0..=levels {
        edges.push(r);
        r *= 0.5;
    }
    edges
}

/// Integrate f over [r0, infinity) with geometric panels plus a power-law
/// remainder extrapolated from the integrand's local log-log slope.
///
/// Returns `TailDivergence` when the fitted decay exponent is <= 1, in which
/// case the integral does not exist.
pub fn ray_to_infinity(f: &mut impl FnMut(f64) -> f64, r0: f64, gl_order: usize) -> Result<f64> {
    const MAX_PANELS: usize = 72;
    let mut acc = 0.0;
    let mut lo = r0;
    for _ in 0..MAX_PANELS {
        let hi = lo * 2.0;
        let panel = gl_panel(f, lo, hi, gl_order);
        acc += panel;
        lo = hi;
        if panel.abs() < 1e-16 * (acc.abs() + 1e-300) {
            return Ok(acc);
        }
    }
    // Remainder: integrand ~ A r^{-kappa} beyond the last edge.
    let f_hi = f(lo);
    let f_lo = f(lo * 0.5);
    if f_hi == 0.0 {
        return Ok(acc);
    }
    if f_lo == 0.0 || f_hi.signum() != f_lo.signum() {
        // No stable power fit; the panel contributions were already tiny.
        return Ok(acc);
    }
    let kappa = (f_lo.abs() / f_hi.abs()).log2();
    if kappa <= 1.0 + 1e-9 {
        return Err(Error::TailDivergence { exponent: kappa });
    }
    Ok(acc + f_hi * lo / (kappa - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // 8-point GL is exact through degree 15.
        let mut f = |x: f64| x.powi(15) + 3.0 * x.powi(7) - x + 2.0;
        let got = gl_panel(&mut f, -1.0, 1.0, 8);
        assert_relative_eq!(got, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn gl_weights_sum_to_interval_length() {
        for n in [4usize, 8, 12, 16, 24, 32] {
            let total: f64 = gauss_legendre(n).iter().map(|&(_, w)| w).sum();
            assert_relative_eq!(total, 2.0, max_relative = 1e-13);
            let mut one = |_x: f64| 1.0;
            assert_relative_eq!(gl_panel(&mut one, 2.0, 5.5, n), 3.5, max_relative = 1e-13);
        }
    }

    #[test]
    fn ray_integration_matches_closed_form() {
        // \int_1^inf r^{-2.5} dr = 2/3.
        let mut f = |r: f64| r.powf(-2.5);
        let got = ray_to_infinity(&mut f, 1.0, 8).unwrap();
        assert_relative_eq!(got, 2.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn ray_integration_detects_divergence() {
        let mut f = |r: f64| 1.0 / r;
        assert!(matches!(
            ray_to_infinity(&mut f, 1.0, 8),
            Err(Error::TailDivergence { .. })
        ));
    }

    #[test]
    fn log_grid_density() {
        let g = log_grid_per_decade(1e-6, 1e6, 64);
        assert_eq!(g.len(), 64 * 12 + 1);
        assert_relative_eq!(g[0], 1e-6, max_relative = 1e-12);
        assert_relative_eq!(*g.last().unwrap(), 1e6, max_relative = 1e-12);
    }
}
