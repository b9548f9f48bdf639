//! Empirical characteristic function and the contrast
//! `d_n(a, t) = phi_n(t)^a - phi_n(a t)`.

use num_complex::Complex64;

/// Complex number used throughout (`re`, `im`).
pub type ComplexValue = Complex64;

/// `phi_n(t) = (1/n) sum_j exp(i t x_j)`.
pub fn ecf_eval(x: &[f64], t: f64) -> ComplexValue {
    let n = x.len() as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for &v in x {
        let (sin, cos) = (t * v).sin_cos();
        c += cos;
        s += sin;
    }
    Complex64::new(c / n, s / n)
}

/// Integer exponents up to this value use exact repeated multiplication.
const MAX_EXACT_POWER: f64 = 1024.0;

/// `z^a` on the principal branch, `|z|^a (cos(a arg z) + i sin(a arg z))`.
///
/// Integer `a` is computed by binary exponentiation, which coincides with the
/// principal-branch value and carries no branch cut. `0^a = 0`.
pub fn complex_pow(z: ComplexValue, a: f64) -> ComplexValue {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if a.fract() == 0.0 && a > 0.0 && a <= MAX_EXACT_POWER {
        return z.powu(a as u32);
    }
    Complex64::from_polar(z.norm().powf(a), a * z.arg())
}

/// `phi_n(t)^a - phi_n(a t)`.
pub fn d_n(x: &[f64], a: f64, t: f64) -> ComplexValue {
    complex_pow(ecf_eval(x, t), a) - ecf_eval(x, a * t)
}

const REANCHOR: usize = 64;

/// Unit phasors `exp(i k w_j)` for a block of consecutive `k`, advanced by
/// rotation. Real and imaginary parts are stored separately so the update
/// loop over the sample vectorizes.
struct PhasorBlock {
    freq: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    step_re: Vec<f64>,
    step_im: Vec<f64>,
}

impl PhasorBlock {
    fn new(freq: Vec<f64>) -> Self {
        let (step_im, step_re): (Vec<f64>, Vec<f64>) = freq.iter().map(|w| w.sin_cos()).unzip();
        let m = freq.len();
        PhasorBlock { freq, re: vec![0.0; m], im: vec![0.0; m], step_re, step_im }
    }

    /// Sets the phasors to `exp(i k w_j)` exactly.
    fn anchor(&mut self, k: usize) {
        let kf = k as f64;
        for ((w, re), im) in self.freq.iter().zip(&mut self.re).zip(&mut self.im) {
            let (s, c) = (kf * w).sin_cos();
            *re = c;
            *im = s;
        }
    }

    /// Mean of the current phasors, then one rotation step.
    fn mean_and_advance(&mut self) -> Complex64 {
        let (mut sr, mut si) = (0.0, 0.0);
        for j in 0..self.re.len() {
            let (r, i) = (self.re[j], self.im[j]);
            sr += r;
            si += i;
            self.re[j] = r * self.step_re[j] - i * self.step_im[j];
            self.im[j] = r * self.step_im[j] + i * self.step_re[j];
        }
        let n = self.re.len() as f64;
        Complex64::new(sr / n, si / n)
    }
}

/// Evaluates `phi_n(k h)` and `phi_n(a k h)` for `k = 1..=count`.
///
/// The phases are advanced by complex rotation and re-anchored with an exact
/// `sin_cos` every [`REANCHOR`] steps, which keeps the accumulated rounding
/// error at a few ulps per block.
pub(crate) fn ecf_grid_pair(x: &[f64], a: f64, h: f64, count: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut base = Vec::with_capacity(count);
    let mut scaled = Vec::with_capacity(count);
    let mut p1 = PhasorBlock::new(x.iter().map(|v| h * v).collect());
    let mut p2 = PhasorBlock::new(x.iter().map(|v| a * h * v).collect());
    for k in 1..=count {
        if (k - 1) % REANCHOR == 0 {
            p1.anchor(k);
            p2.anchor(k);
        }
        base.push(p1.mean_and_advance());
        scaled.push(p2.mean_and_advance());
    }
    (base, scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn ecf_examples() {
        assert_eq!(ecf_eval(&[0.0], 3.7), Complex64::new(1.0, 0.0));
        let c = 1.3;
        let t = 0.7;
        assert!(close(ecf_eval(&[c], t), Complex64::new((t * c).cos(), (t * c).sin()), 1e-15));
        let v = ecf_eval(&[-1.0, 1.0], 2.1);
        assert!((v.re - 2.1f64.cos()).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert_eq!(ecf_eval(&[1.0, -2.5, 7.0], 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(complex_pow(Complex64::new(1.0, 0.0), 3.3), Complex64::new(1.0, 0.0));
        assert!(close(complex_pow(Complex64::new(0.0, 1.0), 2.0), Complex64::new(-1.0, 0.0), 1e-15));
        let z = Complex64::new(0.6, 0.8);
        assert!(close(complex_pow(z, 3.0), z * z * z, 4.0 * f64::EPSILON));
        // the polar route agrees with multiplication away from the branch cut
        let polar = Complex64::from_polar(z.norm().powf(3.0), 3.0 * z.arg());
        assert!(close(polar, z * z * z, 1e-14));
        assert_eq!(complex_pow(Complex64::new(0.0, 0.0), 0.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn d_n_examples() {
        for a in [1.5f64, 2.0, 6.0] {
            for t in [-2.0, 0.3, 5.0] {
                // the principal branch only agrees with exp(i a t c) for |t c| < pi
                if a.fract() == 0.0 || (t * 2.7f64).abs() < std::f64::consts::PI {
                    assert!(d_n(&[2.7], a, t).norm() < 1e-12, "a={a} t={t}");
                }
            }
            assert_eq!(d_n(&[1.0, -4.0, 2.0], a, 0.0), Complex64::new(0.0, 0.0));
        }
        assert!(d_n(&[2.7], 1.5, 3.0).norm() > 0.1);
        // cos(1)^2 - cos(2) via the double-angle identity
        let expected = (1.0 - 2f64.cos()) / 2.0;
        let v = d_n(&[-1.0, 1.0], 2.0, 1.0);
        assert!((v.re - expected).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert!((expected - 0.70807).abs() < 1e-5);
    }

    #[test]
    fn grid_matches_direct_evaluation() {
        let x = [0.3, -12.0, 450.0, 2.2, -0.01, 1e4];
        let h = 0.0007;
        let (b, s) = ecf_grid_pair(&x, 6.0, h, 500);
        for k in [0usize, 1, 63, 64, 65, 200, 499] {
            let t = (k + 1) as f64 * h;
            assert!(close(b[k], ecf_eval(&x, t), 1e-12), "k={k}");
            assert!(close(s[k], ecf_eval(&x, 6.0 * t), 1e-12), "k={k}");
        }
    }

    proptest! {
        #[test]
        fn modulus_bounded_and_conjugate_symmetric(
            x in prop::collection::vec(-1e3f64..1e3, 1..40),
            t in -20.0f64..20.0,
        ) {
            let v = ecf_eval(&x, t);
            prop_assert!(v.norm() <= 1.0 + 1e-12);
            let w = ecf_eval(&x, -t);
            prop_assert!(close(w, v.conj(), 1e-12));
            prop_assert!(d_n(&x, 6.0, t).norm() <= 2.0 + 1e-12);
        }

        #[test]
        fn integer_powers_match_products(r in 0.0f64..1.0, phase in -3.14f64..3.14, k in 1u32..=8) {
            let z = Complex64::from_polar(r, phase);
            let mut prod = Complex64::new(1.0, 0.0);
            for _ in 0..k {
                prod *= z;
            }
            prop_assert!(close(complex_pow(z, k as f64), prod, 1e-15));
        }

        #[test]
        fn contrast_modulus_is_location_free(
            x in prop::collection::vec(-50.0f64..50.0, 1..20),
            shift in -100.0f64..100.0,
            t in -3.0f64..3.0,
            a in 2u32..7,
        ) {
            let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
            let a = a as f64;
            prop_assert!((d_n(&shifted, a, t).norm() - d_n(&x, a, t).norm()).abs() < 1e-10);
        }
    }
}
