//! Quadrature rules for integrals against the weight `exp(-gamma t^2)`.
//!
//! The sample statistic integrates `|d_n(a, t)|^2`, a trigonometric polynomial
//! whose frequencies are differences of sums of observations and reach
//! `a * range(y)`. Heavy-tailed samples make this bandwidth large, so a fixed
//! Gauss-Hermite rule aliases badly. The trapezoidal rule is spectrally
//! accurate for band-limited integrands against a Gaussian: with step `h` the
//! error is governed by the weight's Fourier transform at `2 pi / h - bandwidth`,
//! so choosing `h` from the bandwidth gives rounding-level accuracy.

use std::f64::consts::PI;

/// `exp(-TAIL_LOG)` is the relative size of neglected weight tails and of
/// the aliasing terms.
pub const TAIL_LOG: f64 = 40.0;

/// Upper bound on the number of half-line trapezoid nodes for one statistic.
pub const MAX_TRAPEZOID_NODES: usize = 1 << 22;

/// Uniform grid `t_k = k * step`, `k = 1..=nodes`, on the positive half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidGrid {
    pub step: f64,
    pub nodes: usize,
    /// Set when the bandwidth called for more than [`MAX_TRAPEZOID_NODES`].
    pub capped: bool,
}

impl TrapezoidGrid {
    /// Grid resolving an integrand of the given angular bandwidth against
    /// `exp(-gamma t^2)`, with at least `min_nodes` nodes.
    pub fn for_bandwidth(bandwidth: f64, gamma: f64, min_nodes: usize) -> Self {
        let half_width = (TAIL_LOG / gamma).sqrt();
        let margin = 2.0 * (TAIL_LOG * gamma).sqrt();
        let step = 2.0 * PI / (bandwidth.max(0.0) + margin);
        let needed = (half_width / step).ceil();
        let (nodes, capped) = if needed > MAX_TRAPEZOID_NODES as f64 {
            (MAX_TRAPEZOID_NODES, true)
        } else {
            ((needed as usize).max(min_nodes).max(1), false)
        };
        TrapezoidGrid { step: half_width / nodes as f64, nodes, capped }
    }

    pub fn half_width(&self) -> f64 {
        self.step * self.nodes as f64
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss-Legendre integral of `f` over `[lo, hi]`.
pub fn integrate_composite(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    (0..panels)
        .map(|p| {
            let mid = lo + (p as f64 + 0.5) * width;
            x.iter().zip(&w).map(|(&xi, &wi)| wi * f(mid + half * xi)).sum::<f64>() * half
        })
        .sum()
}

/// `int_R f(t) exp(-gamma t^2) dt` for `f` smooth on each half-line.
///
/// The two half-lines are integrated separately, so a kink at `t = 0` (as in
/// `exp(-|t|)`) does not degrade accuracy.
pub fn integrate_gaussian_weight(f: impl Fn(f64) -> f64, gamma: f64) -> f64 {
    let half_width = (TAIL_LOG / gamma).sqrt();
    let g = |t: f64| f(t) * (-gamma * t * t).exp();
    integrate_composite(&g, -half_width, 0.0, 64, 20) + integrate_composite(&g, 0.0, half_width, 64, 20)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 20] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn gaussian_moments() {
        for gamma in [0.5, 1.0, 2.5] {
            let m0 = integrate_gaussian_weight(|_| 1.0, gamma);
            assert!((m0 - (PI / gamma).sqrt()).abs() < 1e-13);
            let m2 = integrate_gaussian_weight(|t| t * t, gamma);
            assert!((m2 - 0.5 * (PI / gamma).sqrt() / gamma).abs() < 1e-13);
        }
        // int exp(-|t|) exp(-t^2) dt = sqrt(pi) e^{1/4} erfc(1/2)
        let kink = integrate_gaussian_weight(|t| (-t.abs()).exp(), 1.0);
        let erfc_half = 0.479_500_122_186_953_5;
        assert!((kink - PI.sqrt() * 0.25f64.exp() * erfc_half).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_resolves_oscillation() {
        // int cos(w t) exp(-g t^2) dt = sqrt(pi/g) exp(-w^2 / (4 g))
        for (w, g) in [(0.0, 2.5), (3.0, 1.0), (50.0, 0.5), (2000.0, 2.5)] {
            let grid = TrapezoidGrid::for_bandwidth(w, g, 16);
            let h = grid.step;
            let sum: f64 = (1..=grid.nodes)
                .map(|k| {
                    let t = k as f64 * h;
                    (w * t).cos() * (-g * t * t).exp()
                })
                .sum();
            let approx = h * (1.0 + 2.0 * sum);
            let exact = (PI / g).sqrt() * (-w * w / (4.0 * g)).exp();
            assert!((approx - exact).abs() < 1e-14, "w={w} g={g}: {approx} vs {exact}");
        }
    }

    #[test]
    fn grid_floor_and_cap() {
        let g = TrapezoidGrid::for_bandwidth(0.0, 2.5, 64);
        assert_eq!(g.nodes, 64);
        assert!(!g.capped);
        let g = TrapezoidGrid::for_bandwidth(1e12, 2.5, 64);
        assert_eq!(g.nodes, MAX_TRAPEZOID_NODES);
        assert!(g.capped);
    }
}
