//! Classical EDF statistics on the probability-integral transform under the
//! fitted Cauchy law: Kolmogorov-Smirnov `D`, Cramer-von Mises `W^2`,
//! Anderson-Darling `A^2` and Watson `U^2`.

use serde::{Deserialize, Serialize};

use crate::distributions::{CauchyParams, Sample};
use crate::error::{Error, Result};
use crate::estimation::{CauchyFit, FitMode};

/// PIT values are kept inside `[PIT_FLOOR, 1 - PIT_FLOOR]`.
pub const PIT_FLOOR: f64 = 1e-15;

/// Sorted probability-integral-transform values in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitSample {
    u: Vec<f64>,
    /// Number of values that had to be pulled inside the open interval.
    pub clamped: usize,
}

impl PitSample {
    /// Sorts and validates arbitrary values in `(0, 1)`.
    pub fn new(mut u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::SampleTooSmall { needed: 1, got: 0 });
        }
        if let Some(bad) = u.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::domain(format!("PIT value {bad} outside (0, 1)")));
        }
        u.sort_by(f64::total_cmp);
        Ok(PitSample { u, clamped: 0 })
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdfStatistics {
    pub ks: f64,
    pub cvm: f64,
    pub ad: f64,
    pub watson: f64,
}

impl EdfStatistics {
    pub const NAMES: [&'static str; 4] = ["KS", "CvM", "AD", "Watson"];

    pub fn as_array(&self) -> [f64; 4] {
        [self.ks, self.cvm, self.ad, self.watson]
    }
}

/// `u_(i) = F(x_(i); theta_hat, lambda_hat)`, sorted.
pub fn pit_transform(x: &Sample, fit: &CauchyFit) -> Result<PitSample> {
    if fit.mode != FitMode::Joint {
        return Err(Error::domain("the PIT needs a joint location-scale fit"));
    }
    let p = CauchyParams::new(fit.theta_hat, fit.lambda_hat)?;
    let mut clamped = 0;
    let mut u: Vec<f64> = x
        .values()
        .iter()
        .map(|&v| {
            let f = p.cdf(v);
            let c = f.clamp(PIT_FLOOR, 1.0 - PIT_FLOOR);
            if c != f {
                clamped += 1;
            }
            c
        })
        .collect();
    u.sort_by(f64::total_cmp);
    Ok(PitSample { u, clamped })
}

/// All four statistics in one pass over the sorted values.
pub fn edf_statistics(p: &PitSample) -> EdfStatistics {
    let u = &p.u;
    let n = u.len();
    let nf = n as f64;
    let (mut d_plus, mut d_minus) = (0.0f64, 0.0f64);
    let (mut w2, mut a_sum, mut total) = (0.0, 0.0, 0.0);
    for (i, &ui) in u.iter().enumerate() {
        let k = i as f64 + 1.0;
        d_plus = d_plus.max(k / nf - ui);
        d_minus = d_minus.max(ui - (k - 1.0) / nf);
        let c = ui - (2.0 * k - 1.0) / (2.0 * nf);
        w2 += c * c;
        a_sum += (2.0 * k - 1.0) * (ui.ln() + (1.0 - u[n - 1 - i]).ln());
        total += ui;
    }
    let cvm = w2 + 1.0 / (12.0 * nf);
    let mean_dev = total / nf - 0.5;
    EdfStatistics {
        ks: d_plus.max(d_minus),
        cvm,
        ad: -nf - a_sum / nf,
        watson: cvm - nf * mean_dev * mean_dev,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, AlternativeSpec};
    use crate::estimation::{fit_cauchy_ml, StartPoint};

    fn pit(v: &[f64]) -> PitSample {
        PitSample::new(v.to_vec()).unwrap()
    }

    fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn midpoint_grid_reaches_minimum() {
        let n = 7;
        let u: Vec<f64> = (1..=n).map(|i| (2.0 * i as f64 - 1.0) / (2.0 * n as f64)).collect();
        let s = edf_statistics(&pit(&u));
        assert!((s.cvm - 1.0 / (12.0 * n as f64)).abs() < 1e-15);
        assert!((s.watson - 1.0 / (12.0 * n as f64)).abs() < 1e-15);
        assert!((s.ks - 0.5 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn single_value() {
        let s = edf_statistics(&pit(&[0.5]));
        assert_eq!(s.ks, 0.5);
    }

    #[test]
    fn two_point_anderson_darling() {
        // -2 - (1/2) [1 (ln .25 + ln .25) + 3 (ln .75 + ln .75)]
        let oracle = -2.0 - 0.5 * (2.0 * 0.25f64.ln() + 6.0 * 0.75f64.ln());
        let s = edf_statistics(&pit(&[0.25, 0.75]));
        assert!((s.ad - oracle).abs() < 1e-14);
        assert!((s.ad - 0.249_340_578).abs() < 1e-8);
    }

    #[test]
    fn pit_examples() {
        let fit = CauchyFit {
            theta_hat: 3.0,
            lambda_hat: 2.0,
            log_likelihood: 0.0,
            iterations: 0,
            converged: true,
            mode: FitMode::Joint,
            start: StartPoint::MedianIqr,
        };
        let x = Sample::new(vec![5.0, 1.0, 3.0]).unwrap();
        let p = pit_transform(&x, &fit).unwrap();
        for (got, want) in p.values().iter().zip([0.25, 0.5, 0.75]) {
            assert!((got - want).abs() < 1e-15);
        }
        let far = Sample::new(vec![-1e300, 3.0, 1e300]).unwrap();
        let p = pit_transform(&far, &fit).unwrap();
        assert_eq!(p.clamped, 2);
        assert!(p.values().iter().all(|&u| u > 0.0 && u < 1.0));
        let s = edf_statistics(&p);
        assert!(s.ad.is_finite());
    }

    #[test]
    fn pit_of_cauchy_sample_is_uniform() {
        let x = sample(&AlternativeSpec::Cauchy { theta: 5.0, lambda: 2.0 }, 1000, 4).unwrap();
        let fit = fit_cauchy_ml(&x, FitMode::Joint).unwrap();
        let p = pit_transform(&x, &fit).unwrap();
        let s = edf_statistics(&p);
        // 5% band of the one-sample KS statistic
        assert!(s.ks < 1.358 / (1000f64).sqrt(), "{}", s.ks);
        let median = p.values()[500];
        assert!((median - 0.5).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_pit_values() {
        assert!(PitSample::new(vec![0.0, 0.5]).is_err());
        assert!(PitSample::new(vec![]).is_err());
        assert!(PitSample::new(vec![1.2]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn reflection_invariance_and_watson_bound(u in proptest::collection::vec(0.001f64..0.999, 1..60)) {
            let p = pit(&u);
            let r = pit(&u.iter().map(|v| 1.0 - v).collect::<Vec<_>>());
            let (a, b) = (edf_statistics(&p), edf_statistics(&r));
            for (x, y) in a.as_array().iter().zip(b.as_array()) {
                proptest::prop_assert!(rel_eq(*x, y, 1e-12), "{x} vs {y}");
            }
            proptest::prop_assert!(a.watson <= a.cvm);
            proptest::prop_assert!(a.cvm > 0.0 && a.ad > 0.0 && a.ks >= 0.0);
        }
    }
}
