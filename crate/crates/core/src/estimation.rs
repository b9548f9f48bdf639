//! Maximum-likelihood estimation of the Cauchy location and scale, and the
//! scaling applied to the data before the statistic is computed.
//!
//! The optimizer works on data that have been centred at the median and divided
//! by a robust spread, so the fitted values are affine equivariant up to
//! rounding. It runs a safeguarded Newton iteration on `(theta, log lambda)`
//! with step halving, falling back to coordinate bisection when a Newton or
//! gradient step cannot increase the likelihood.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::Sample;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const GRADIENT_TOL: f64 = 1e-10;
/// Below this standardized scale the likelihood is treated as unbounded.
const COLLAPSE_SCALE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// Location and scale both estimated.
    #[default]
    Joint,
    /// Location fixed at zero, only the scale estimated.
    ScaleOnly,
}

impl FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(FitMode::Joint),
            "scale_only" | "scale-only" => Ok(FitMode::ScaleOnly),
            _ => Err(Error::Parse(format!("unknown fit mode {s:?}"))),
        }
    }
}

impl fmt::Display for FitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMode::Joint => "joint",
            FitMode::ScaleOnly => "scale_only",
        })
    }
}

/// Starting point that produced the reported optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPoint {
    /// Sample median and half the interquartile range.
    MedianIqr,
    /// 25%-trimmed mean and median absolute deviation.
    TrimmedMeanMad,
}

/// Exponent `e` in `Y = X / lambda_hat^e`. Only `1.0` and `0.5` are allowed.
///
/// With `e = 1` the statistic is invariant under every map `x -> c x + d`,
/// `c > 0`. With `e = 0.5` it is location invariant only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScalingExponent(f64);

impl ScalingExponent {
    pub const ONE: ScalingExponent = ScalingExponent(1.0);
    pub const HALF: ScalingExponent = ScalingExponent(0.5);

    pub fn new(e: f64) -> Result<Self> {
        if e == 1.0 || e == 0.5 {
            Ok(ScalingExponent(e))
        } else {
            Err(Error::domain(format!("scaling exponent must be 1.0 or 0.5, got {e}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for ScalingExponent {
    fn default() -> Self {
        Self::ONE
    }
}

impl TryFrom<f64> for ScalingExponent {
    type Error = Error;

    fn try_from(e: f64) -> Result<Self> {
        ScalingExponent::new(e)
    }
}

impl From<ScalingExponent> for f64 {
    fn from(e: ScalingExponent) -> f64 {
        e.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyFit {
    pub theta_hat: f64,
    pub lambda_hat: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mode: FitMode,
    pub start: StartPoint,
}

/// Cauchy log-likelihood `-n log(pi lambda) - sum log(1 + ((x - theta)/lambda)^2)`.
pub fn log_likelihood(x: &[f64], theta: f64, lambda: f64) -> f64 {
    let n = x.len() as f64;
    -n * (PI * lambda).ln()
        - x.iter()
            .map(|&v| {
                let z = (v - theta) / lambda;
                z.mul_add(z, 1.0).ln()
            })
            .sum::<f64>()
}

/// Scale-free score residuals `(sum u/(1+u^2), sum u^2/(1+u^2) - n/2)` with
/// `u = (x - theta)/lambda`. Both vanish at a stationary point of the
/// likelihood and are unchanged by affine maps of the data.
pub fn score_residuals(x: &[f64], theta: f64, lambda: f64) -> (f64, f64) {
    let (mut loc, mut scale) = (0.0, 0.0);
    for &v in x {
        let u = (v - theta) / lambda;
        let d = u.mul_add(u, 1.0);
        loc += u / d;
        scale += u * u / d;
    }
    (loc, scale - 0.5 * x.len() as f64)
}

/// Fits a Cauchy law by maximum likelihood.
///
/// `Joint` needs at least three observations, `ScaleOnly` at least two. A
/// sample whose likelihood is unbounded (more than half the observations tied
/// at one value, or all identical) yields [`Error::DegenerateSample`].
/// Running out of iterations is not an error; it is reported through
/// `converged = false`.
pub fn fit_cauchy_ml(s: &Sample, mode: FitMode) -> Result<CauchyFit> {
    let x = s.values();
    let n = x.len();
    match mode {
        FitMode::Joint if n < 3 => return Err(Error::SampleTooSmall { needed: 3, got: n }),
        FitMode::ScaleOnly if n < 2 => return Err(Error::SampleTooSmall { needed: 2, got: n }),
        _ => {}
    }
    match mode {
        FitMode::Joint => fit_joint(x),
        FitMode::ScaleOnly => fit_scale_only(x),
    }
}

/// Divides by `lambda_hat^e`. No location shift is applied; the modulus of the
/// ECF contrast does not depend on location.
pub fn standardize(s: &Sample, fit: &CauchyFit, e: ScalingExponent) -> Result<Sample> {
    if !(fit.lambda_hat > 0.0) {
        return Err(Error::domain("fitted scale must be positive"));
    }
    let divisor = if e == ScalingExponent::ONE { fit.lambda_hat } else { fit.lambda_hat.powf(e.0) };
    Sample::new(s.values().iter().map(|&x| x / divisor).collect())
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn median_sorted(v: &[f64]) -> f64 {
    quantile_sorted(v, 0.5)
}

fn max_tie_count(sorted: &[f64]) -> usize {
    let mut best = 0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        best = best.max(j - i);
        i = j;
    }
    best
}

/// Positive robust spread used to standardize before optimizing.
fn robust_spread(v: &[f64], center: f64) -> f64 {
    let half_iqr = 0.5 * (quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25));
    if half_iqr > 0.0 {
        return half_iqr;
    }
    let mad = median_sorted(&sorted(&v.iter().map(|x| (x - center).abs()).collect::<Vec<_>>()));
    if mad > 0.0 {
        return mad;
    }
    0.5 * (v[v.len() - 1] - v[0])
}

#[derive(Debug, Clone, Copy)]
struct Optimum {
    theta: f64,
    lambda: f64,
    loglik: f64,
    iterations: usize,
    converged: bool,
}

fn fit_joint(x: &[f64]) -> Result<CauchyFit> {
    let n = x.len();
    let v = sorted(x);
    if max_tie_count(&v) * 2 > n {
        return Err(Error::DegenerateSample(
            "more than half of the observations share one value; the likelihood is unbounded"
                .into(),
        ));
    }
    let center = median_sorted(&v);
    let spread = robust_spread(&v, center);
    if !(spread > 0.0) {
        return Err(Error::DegenerateSample("all observations are identical".into()));
    }
    let z: Vec<f64> = x.iter().map(|&xi| (xi - center) / spread).collect();
    let zs: Vec<f64> = v.iter().map(|&xi| (xi - center) / spread).collect();

    let median_start = {
        let half_iqr = 0.5 * (quantile_sorted(&zs, 0.75) - quantile_sorted(&zs, 0.25));
        (median_sorted(&zs), if half_iqr > 0.0 { half_iqr } else { 1.0 })
    };
    let trimmed_start = {
        let k = n / 4;
        let core = &zs[k..n - k];
        let tm = core.iter().sum::<f64>() / core.len() as f64;
        let mad = median_sorted(&sorted(
            &zs.iter().map(|v| (v - median_start.0).abs()).collect::<Vec<_>>(),
        ));
        (tm, if mad > 0.0 { mad } else { 1.0 })
    };

    let first = newton_joint(&z, median_start.0, median_start.1)?;
    let second = newton_joint(&z, trimmed_start.0, trimmed_start.1)?;
    let better_second = match (first.converged, second.converged) {
        (false, true) => true,
        (true, false) => false,
        _ => second.loglik > first.loglik + 1e-12 * first.loglik.abs().max(1.0),
    };
    let (best, start) = if better_second {
        (second, StartPoint::TrimmedMeanMad)
    } else {
        (first, StartPoint::MedianIqr)
    };

    let theta_hat = center + spread * best.theta;
    let lambda_hat = spread * best.lambda;
    Ok(CauchyFit {
        theta_hat,
        lambda_hat,
        log_likelihood: log_likelihood(x, theta_hat, lambda_hat),
        iterations: first.iterations + second.iterations,
        converged: best.converged,
        mode: FitMode::Joint,
        start,
    })
}

/// Gradient and Hessian of the log-likelihood in `(theta, s = log lambda)`.
struct Derivatives {
    loglik: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

fn joint_derivatives(z: &[f64], theta: f64, s: f64) -> Derivatives {
    let n = z.len() as f64;
    let lambda = s.exp();
    let l2 = lambda * lambda;
    let (mut sum_log, mut g0, mut g1) = (0.0, 0.0, 0.0);
    let (mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0);
    for &v in z {
        let r = v - theta;
        let r2 = r * r;
        let d = l2 + r2;
        let d2 = d * d;
        sum_log += d.ln();
        g0 += 2.0 * r / d;
        g1 += 2.0 * l2 / d;
        h00 += 2.0 * (r2 - l2) / d2;
        h01 += r / d2;
        h11 += r2 / d2;
    }
    Derivatives {
        // -n log(pi) + n s - sum log D
        loglik: -n * PI.ln() + n * s - sum_log,
        grad: [g0, n - g1],
        hess: [[h00, -4.0 * l2 * h01], [-4.0 * l2 * h01, -4.0 * l2 * h11]],
    }
}

fn joint_loglik(z: &[f64], theta: f64, s: f64) -> f64 {
    let l2 = (2.0 * s).exp();
    let n = z.len() as f64;
    -n * PI.ln() + n * s - z.iter().map(|&v| (l2 + (v - theta) * (v - theta)).ln()).sum::<f64>()
}

/// Scale-free gradient norm: `lambda * dl/dtheta` and `dl/ds`.
fn scaled_grad_norm(d: &Derivatives, s: f64) -> f64 {
    (d.grad[0] * s.exp()).abs().max(d.grad[1].abs())
}

fn newton_joint(z: &[f64], theta0: f64, lambda0: f64) -> Result<Optimum> {
    let n = z.len() as f64;
    let tol = GRADIENT_TOL * n;
    let (mut theta, mut s) = (theta0, lambda0.ln());
    let mut d = joint_derivatives(z, theta, s);
    let mut iterations = 0;
    let mut converged = scaled_grad_norm(&d, s) < tol;

    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let [[a, b], [_, c]] = d.hess;
        let det = a * c - b * b;
        let [g0, g1] = d.grad;
        let newton = a < 0.0 && det > 0.0;
        let (mut dt, mut ds) = if newton {
            (-(c * g0 - b * g1) / det, -(a * g1 - b * g0) / det)
        } else {
            // steepest ascent in the scale-free metric
            let l = s.exp();
            (g0 * l * l / n, g1 / n)
        };
        // cap the step at a few scale units
        let lim = 2.0 * s.exp();
        if dt.abs() > lim || ds.abs() > 2.0 {
            let f = (lim / dt.abs()).min(2.0 / ds.abs()).min(1.0);
            dt *= f;
            ds *= f;
        }

        let mut accepted = false;
        for _ in 0..60 {
            let ll = joint_loglik(z, theta + dt, s + ds);
            if ll >= d.loglik {
                theta += dt;
                s += ds;
                accepted = true;
                break;
            }
            dt *= 0.5;
            ds *= 0.5;
        }
        if !accepted && !coordinate_bisection(z, &mut theta, &mut s, d.loglik) {
            d = joint_derivatives(z, theta, s);
            break;
        }
        if s.exp() < COLLAPSE_SCALE {
            return Err(Error::DegenerateSample(
                "scale estimate collapsed to zero; the likelihood is unbounded".into(),
            ));
        }
        d = joint_derivatives(z, theta, s);
        converged = scaled_grad_norm(&d, s) < tol;
    }
    // One polishing step: Newton converges quadratically, so this drives the
    // score residuals to rounding level whenever it helps.
    if converged {
        let [[a, b], [_, c]] = d.hess;
        let det = a * c - b * b;
        if a < 0.0 && det > 0.0 {
            let [g0, g1] = d.grad;
            let (t2, s2) = (theta - (c * g0 - b * g1) / det, s - (a * g1 - b * g0) / det);
            let d2 = joint_derivatives(z, t2, s2);
            if d2.loglik >= d.loglik && scaled_grad_norm(&d2, s2) <= scaled_grad_norm(&d, s) {
                theta = t2;
                s = s2;
                d = d2;
            }
        }
    }
    Ok(Optimum { theta, lambda: s.exp(), loglik: d.loglik, iterations, converged })
}

/// One sweep of exact coordinate maximization. Returns whether the
/// log-likelihood increased.
fn coordinate_bisection(z: &[f64], theta: &mut f64, s: &mut f64, current: f64) -> bool {
    let new_s = solve_log_scale(z, *theta);
    let mut best = (*theta, *s, current);
    if let Some(ns) = new_s {
        let ll = joint_loglik(z, *theta, ns);
        if ll > best.2 {
            best = (*theta, ns, ll);
        }
    }
    let lambda = best.1.exp();
    let loc_score =
        |t: f64| z.iter().map(|&v| (v - t) / (lambda * lambda + (v - t) * (v - t))).sum::<f64>();
    let g = loc_score(best.0);
    if g != 0.0 {
        let dir = g.signum();
        let mut step = lambda;
        let mut far = best.0 + dir * step;
        let mut found = false;
        for _ in 0..60 {
            if loc_score(far) * dir <= 0.0 {
                found = true;
                break;
            }
            step *= 2.0;
            far = best.0 + dir * step;
        }
        if found {
            let t = bisect(loc_score, best.0, far, 200);
            let ll = joint_loglik(z, t, best.1);
            if ll > best.2 {
                best = (t, best.1, ll);
            }
        }
    }
    let improved = best.2 > current;
    *theta = best.0;
    *s = best.1;
    improved
}

/// Root of `n - sum 2 lambda^2/(lambda^2 + r^2)` in `s = log lambda`, which is
/// strictly decreasing in `s` whenever fewer than half the residuals are zero.
fn solve_log_scale(z: &[f64], theta: f64) -> Option<f64> {
    let n = z.len() as f64;
    let score = |s: f64| {
        let l2 = (2.0 * s).exp();
        n - z.iter().map(|&v| 2.0 * l2 / (l2 + (v - theta) * (v - theta))).sum::<f64>()
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    for _ in 0..200 {
        if score(lo) > 0.0 {
            break;
        }
        lo -= 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        if score(hi) < 0.0 {
            break;
        }
        hi += 2.0 * (hi - lo);
    }
    if !(score(lo) > 0.0 && score(hi) < 0.0) {
        return None;
    }
    Some(bisect(score, lo, hi, 200))
}

/// Bisection for a sign change of `f` between `a` and `b`.
fn bisect(f: impl Fn(f64) -> f64, a: f64, b: f64, max_iter: usize) -> f64 {
    let (mut a, mut b) = (a, b);
    let fa = f(a);
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn fit_scale_only(x: &[f64]) -> Result<CauchyFit> {
    let n = x.len();
    let zeros = x.iter().filter(|&&v| v == 0.0).count();
    if zeros * 2 >= n {
        return Err(Error::DegenerateSample(
            "at least half of the observations are zero; the scale likelihood is unbounded".into(),
        ));
    }
    let abs = sorted(&x.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let mut spread = median_sorted(&abs);
    if !(spread > 0.0) {
        spread = abs[n - 1];
    }
    let z: Vec<f64> = x.iter().map(|&v| v / spread).collect();
    let nf = n as f64;

    // Newton in s with a bisection bracket; the score is monotone.
    let score = |s: f64| {
        let l2 = (2.0 * s).exp();
        let (mut g, mut h) = (nf, 0.0);
        for &v in &z {
            let d = l2 + v * v;
            g -= 2.0 * l2 / d;
            h -= 4.0 * l2 * v * v / (d * d);
        }
        (g, h)
    };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while score(lo).0 <= 0.0 {
        lo -= 4.0;
        if lo < COLLAPSE_SCALE.ln() {
            return Err(Error::DegenerateSample("scale estimate collapsed to zero".into()));
        }
    }
    while score(hi).0 >= 0.0 {
        hi += 4.0;
    }
    let mut s = 0.5 * (lo + hi);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (g, h) = score(s);
        if g.abs() < GRADIENT_TOL * nf * 1e-3 {
            converged = true;
            break;
        }
        if g > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - g / h;
        s = if h < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 {
            converged = score(s).0.abs() < GRADIENT_TOL * nf;
            break;
        }
    }
    let lambda_hat = spread * s.exp();
    Ok(CauchyFit {
        theta_hat: 0.0,
        lambda_hat,
        log_likelihood: log_likelihood(x, 0.0, lambda_hat),
        iterations,
        converged,
        mode: FitMode::ScaleOnly,
        start: StartPoint::MedianIqr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, AlternativeSpec};

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    /// Independent oracle: bisection on sum x^2/(l^2 + x^2) = n/2 with theta = 0.
    fn symmetric_scale_oracle(x: &[f64]) -> f64 {
        let f = |l: f64| x.iter().map(|v| v * v / (l * l + v * v)).sum::<f64>() - x.len() as f64 / 2.0;
        let (mut a, mut b) = (1e-6f64, 1e6f64);
        for _ in 0..400 {
            let m = (a * b).sqrt();
            if f(m) > 0.0 {
                a = m
            } else {
                b = m
            }
        }
        (a * b).sqrt()
    }

    #[test]
    fn three_point_fit() {
        let fit = fit_cauchy_ml(&s(&[-1.0, 0.0, 1.0]), FitMode::Joint).unwrap();
        assert!(fit.converged);
        assert!(fit.theta_hat.abs() < 1e-9);
        let oracle = symmetric_scale_oracle(&[-1.0, 0.0, 1.0]);
        assert!((oracle - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((fit.lambda_hat - oracle).abs() < 1e-9);
    }

    #[test]
    fn score_equations_hold() {
        for seed in 0..50 {
            let x = sample(&AlternativeSpec::STANDARD_CAUCHY, 30, seed).unwrap();
            let fit = fit_cauchy_ml(&x, FitMode::Joint).unwrap();
            assert!(fit.converged);
            let (loc, scale) = score_residuals(x.values(), fit.theta_hat, fit.lambda_hat);
            assert!(loc.abs() < 1e-9 * 30.0 && scale.abs() < 1e-9 * 30.0, "{seed}: {loc} {scale}");
        }
    }

    #[test]
    fn score_residuals_hold_far_from_the_origin() {
        // location much larger than scale: the residuals are scale-free, so
        // the tolerance does not depend on lambda
        let x = sample(&AlternativeSpec::Uniform, 76, 3).unwrap().affine(1.4e-3, 48.0).unwrap();
        let fit = fit_cauchy_ml(&x, FitMode::Joint).unwrap();
        let (loc, scale) = score_residuals(x.values(), fit.theta_hat, fit.lambda_hat);
        assert!(loc.abs() < 1e-9 * 76.0 && scale.abs() < 1e-9 * 76.0, "{loc} {scale}");
        let y = x.affine(1e4, -3.0).unwrap();
        let (l2, s2) = score_residuals(y.values(), 1e4 * fit.theta_hat - 3.0, 1e4 * fit.lambda_hat);
        assert!((l2 - loc).abs() < 1e-9 && (s2 - scale).abs() < 1e-9);
    }

    #[test]
    fn scale_only_score_holds() {
        for seed in 0..20 {
            let x = sample(&AlternativeSpec::STANDARD_CAUCHY, 15, seed).unwrap();
            let fit = fit_cauchy_ml(&x, FitMode::ScaleOnly).unwrap();
            assert!(fit.converged);
            assert_eq!(fit.theta_hat, 0.0);
            let (_, scale) = score_residuals(x.values(), 0.0, fit.lambda_hat);
            assert!(scale.abs() < 1e-9 * 15.0);
            let oracle = symmetric_scale_oracle(x.values());
            assert!((fit.lambda_hat - oracle).abs() < 1e-9 * oracle);
        }
    }

    #[test]
    fn loglik_not_below_median_iqr_start() {
        for seed in 100..140 {
            let x = sample(&AlternativeSpec::Tukey { nu: 0.5 }, 8, seed).unwrap();
            let fit = fit_cauchy_ml(&x, FitMode::Joint).unwrap();
            let v = x.sorted_values();
            let med = median_sorted(&v);
            let hiqr = 0.5 * (quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25));
            assert!(fit.log_likelihood >= log_likelihood(x.values(), med, hiqr) - 1e-12);
        }
    }

    #[test]
    fn consistency_at_large_n() {
        let x = sample(&AlternativeSpec::Cauchy { theta: 2.0, lambda: 3.0 }, 5000, 31).unwrap();
        let fit = fit_cauchy_ml(&x, FitMode::Joint).unwrap();
        assert!((fit.theta_hat - 2.0).abs() < 0.15, "{fit:?}");
        assert!((fit.lambda_hat - 3.0).abs() < 0.25, "{fit:?}");
    }

    #[test]
    fn degenerate_samples() {
        assert!(matches!(
            fit_cauchy_ml(&s(&[2.0, 2.0, 2.0, 2.0]), FitMode::Joint),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            fit_cauchy_ml(&s(&[1.0, 1.0, 1.0, 5.0]), FitMode::Joint),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            fit_cauchy_ml(&s(&[0.0, 0.0, 3.0]), FitMode::ScaleOnly),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            fit_cauchy_ml(&s(&[1.0, 2.0]), FitMode::Joint),
            Err(Error::SampleTooSmall { needed: 3, got: 2 })
        ));
        assert!(matches!(
            fit_cauchy_ml(&s(&[1.0]), FitMode::ScaleOnly),
            Err(Error::SampleTooSmall { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn ties_below_half_are_fine() {
        let fit = fit_cauchy_ml(&s(&[0.0, 0.0, 1.0, 2.0, 5.0]), FitMode::Joint).unwrap();
        assert!(fit.converged && fit.lambda_hat > 0.0);
    }

    #[test]
    fn standardize_examples() {
        let x = s(&[2.0, -4.0, 8.0]);
        let fit = |l: f64| CauchyFit {
            theta_hat: 0.0,
            lambda_hat: l,
            log_likelihood: 0.0,
            iterations: 0,
            converged: true,
            mode: FitMode::Joint,
            start: StartPoint::MedianIqr,
        };
        assert_eq!(standardize(&x, &fit(1.0), ScalingExponent::HALF).unwrap(), x);
        assert_eq!(standardize(&x, &fit(1.0), ScalingExponent::ONE).unwrap(), x);
        assert_eq!(standardize(&x, &fit(4.0), ScalingExponent::HALF).unwrap().values(), &[1.0, -2.0, 4.0]);
        assert_eq!(standardize(&x, &fit(4.0), ScalingExponent::ONE).unwrap().values(), &[0.5, -1.0, 2.0]);
    }

    #[test]
    fn exponent_validation() {
        assert!(ScalingExponent::new(0.75).is_err());
        assert_eq!(ScalingExponent::new(0.5).unwrap(), ScalingExponent::HALF);
        assert_eq!(serde_json::to_string(&ScalingExponent::ONE).unwrap(), "1.0");
        assert!(serde_json::from_str::<ScalingExponent>("2.0").is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn affine_equivariance(seed in 0u64..10_000, c in 0.01f64..100.0, neg in proptest::bool::ANY, d in -1e3f64..1e3) {
            let c = if neg { -c } else { c };
            let x = sample(&AlternativeSpec::STANDARD_CAUCHY, 25, seed).unwrap();
            let f0 = fit_cauchy_ml(&x, FitMode::Joint).unwrap();
            let f1 = fit_cauchy_ml(&x.affine(c, d).unwrap(), FitMode::Joint).unwrap();
            let tol = 1e-9 * (c.abs() * f0.theta_hat.abs() + d.abs() + c.abs() * f0.lambda_hat);
            proptest::prop_assert!((f1.theta_hat - (c * f0.theta_hat + d)).abs() <= tol);
            proptest::prop_assert!((f1.lambda_hat - c.abs() * f0.lambda_hat).abs() <= 1e-9 * c.abs() * f0.lambda_hat);
        }
    }
}
