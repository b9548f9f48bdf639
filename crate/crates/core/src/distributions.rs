//! Cauchy density, distribution function and quantile, and seeded samplers for
//! the null law and the alternatives used in power studies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the base generator, recorded in table metadata.
pub const GENERATOR: &str =
    "ChaCha8Rng (rand_chacha 0.9): key = seed_from_u64(master seed), stream = replicate index";

/// Location-scale parameters of a Cauchy law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyParams {
    pub theta: f64,
    pub lambda: f64,
}

impl CauchyParams {
    pub const STANDARD: CauchyParams = CauchyParams { theta: 0.0, lambda: 1.0 };

    pub fn new(theta: f64, lambda: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::domain(format!("location must be finite, got {theta}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("scale must be positive and finite, got {lambda}")));
        }
        Ok(CauchyParams { theta, lambda })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.theta) / self.lambda;
        1.0 / (PI * self.lambda * (1.0 + z * z))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        0.5 + ((x - self.theta) / self.lambda).atan() / PI
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        Ok(self.theta + self.lambda * (PI * (u - 0.5)).tan())
    }
}

impl Default for CauchyParams {
    fn default() -> Self {
        Self::STANDARD
    }
}

pub fn cauchy_pdf(x: f64, p: &CauchyParams) -> f64 {
    p.pdf(x)
}

pub fn cauchy_cdf(x: f64, p: &CauchyParams) -> f64 {
    p.cdf(x)
}

pub fn cauchy_quantile(u: f64, p: &CauchyParams) -> Result<f64> {
    p.quantile(u)
}

/// A sampling law for Monte Carlo studies.
///
/// Everything except `Cauchy` is in standard form (location 0, scale 1).
/// The textual form accepted by [`FromStr`] is `cauchy[:theta,lambda]`,
/// `t:nu`, `stable:alpha`, `tukey:nu`, `normal`, `laplace` or `uniform`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlternativeSpec {
    Cauchy { theta: f64, lambda: f64 },
    StudentT { nu: f64 },
    /// Symmetric alpha-stable `S(alpha, 0, 0, 1)`; `alpha = 1` is `C(0, 1)`.
    Stable { alpha: f64 },
    /// `Z exp(nu Z^2 / 2)` with `Z` standard normal.
    Tukey { nu: f64 },
    Normal,
    Laplace,
    /// Uniform on `(0, 1)`.
    Uniform,
}

impl AlternativeSpec {
    pub const STANDARD_CAUCHY: AlternativeSpec =
        AlternativeSpec::Cauchy { theta: 0.0, lambda: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            AlternativeSpec::Cauchy { theta, lambda } => CauchyParams::new(theta, lambda).map(|_| ()),
            AlternativeSpec::StudentT { nu } if !(nu > 0.0 && nu.is_finite()) => {
                Err(Error::domain(format!("t degrees of freedom must be positive, got {nu}")))
            }
            AlternativeSpec::Stable { alpha } if !(alpha > 0.0 && alpha <= 2.0) => {
                Err(Error::domain(format!("stable index must lie in (0, 2], got {alpha}")))
            }
            AlternativeSpec::Tukey { nu } if !(nu >= 0.0 && nu.is_finite()) => {
                Err(Error::domain(format!("Tukey parameter must be >= 0, got {nu}")))
            }
            _ => Ok(()),
        }
    }

    /// Draws one variate. Callers are expected to have validated `self`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AlternativeSpec::Cauchy { theta, lambda } => {
                let u: f64 = rng.sample(Open01);
                theta + lambda * (PI * (u - 0.5)).tan()
            }
            AlternativeSpec::StudentT { nu } => {
                let z: f64 = rng.sample(StandardNormal);
                let chi2 = ChiSquared::new(nu).expect("validated").sample(rng);
                z / (chi2 / nu).sqrt()
            }
            AlternativeSpec::Stable { alpha } => symmetric_stable(alpha, rng),
            AlternativeSpec::Tukey { nu } => {
                let z: f64 = rng.sample(StandardNormal);
                z * (0.5 * nu * z * z).exp()
            }
            AlternativeSpec::Normal => rng.sample(StandardNormal),
            AlternativeSpec::Laplace => {
                let e: f64 = rng.sample(Exp1);
                if rng.random::<bool>() {
                    e
                } else {
                    -e
                }
            }
            AlternativeSpec::Uniform => rng.sample(Open01),
        }
    }

    /// Whether the law is symmetric about zero.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            AlternativeSpec::Cauchy { theta, .. } => theta == 0.0,
            AlternativeSpec::Uniform => false,
            _ => true,
        }
    }

    /// Short label used in report rows, e.g. `t_4`, `S_1.5`, `Tuk_0.1`.
    pub fn label(&self) -> String {
        match *self {
            AlternativeSpec::Cauchy { theta, lambda } if theta == 0.0 && lambda == 1.0 => {
                "C(0,1)".to_string()
            }
            AlternativeSpec::Cauchy { theta, lambda } => format!("C({theta},{lambda})"),
            AlternativeSpec::StudentT { nu } => format!("t_{nu}"),
            AlternativeSpec::Stable { alpha } => format!("S_{alpha}"),
            AlternativeSpec::Tukey { nu } => format!("Tuk_{nu}"),
            AlternativeSpec::Normal => "N(0,1)".to_string(),
            AlternativeSpec::Laplace => "Lap".to_string(),
            AlternativeSpec::Uniform => "U(0,1)".to_string(),
        }
    }

    /// Parses a comma-separated list such as `t:4,stable:1.5,normal,cauchy:2,3`.
    ///
    /// A bare number following `cauchy:theta` is taken as its scale.
    pub fn parse_list(s: &str) -> Result<Vec<AlternativeSpec>> {
        let mut out = Vec::new();
        let mut pieces = s.split(',').map(str::trim).peekable();
        while let Some(piece) = pieces.next() {
            if piece.is_empty() {
                return Err(Error::Parse(format!("empty entry in alternative list {s:?}")));
            }
            if let Some(theta) = piece.strip_prefix("cauchy:") {
                let lambda = pieces.next().ok_or_else(|| {
                    Error::Parse(format!("cauchy:{theta} needs a scale, write cauchy:theta,lambda"))
                })?;
                out.push(format!("cauchy:{theta},{lambda}").parse()?);
            } else {
                out.push(piece.parse()?);
            }
        }
        Ok(out)
    }
}

impl FromStr for AlternativeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim().to_ascii_lowercase(), Some(arg.trim())),
            None => (s.to_ascii_lowercase(), None),
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {v:?} in distribution {s:?}")))
        };
        let need = || arg.ok_or_else(|| Error::Parse(format!("distribution {s:?} needs a parameter")));
        let spec = match name.as_str() {
            "cauchy" => match arg {
                None => AlternativeSpec::STANDARD_CAUCHY,
                Some(arg) => {
                    let (theta, lambda) = arg.split_once(',').ok_or_else(|| {
                        Error::Parse(format!("expected cauchy:theta,lambda, got {s:?}"))
                    })?;
                    AlternativeSpec::Cauchy { theta: num(theta)?, lambda: num(lambda)? }
                }
            },
            "t" | "student" | "student_t" => AlternativeSpec::StudentT { nu: num(need()?)? },
            "stable" => AlternativeSpec::Stable { alpha: num(need()?)? },
            "tukey" => AlternativeSpec::Tukey { nu: num(need()?)? },
            "normal" | "laplace" | "uniform" if arg.is_some() => {
                return Err(Error::Parse(format!("distribution {name} takes no parameter")));
            }
            "normal" => AlternativeSpec::Normal,
            "laplace" => AlternativeSpec::Laplace,
            "uniform" => AlternativeSpec::Uniform,
            _ => return Err(Error::Parse(format!("unknown distribution {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlternativeSpec::Cauchy { theta, lambda } if theta == 0.0 && lambda == 1.0 => {
                write!(f, "cauchy")
            }
            AlternativeSpec::Cauchy { theta, lambda } => write!(f, "cauchy:{theta},{lambda}"),
            AlternativeSpec::StudentT { nu } => write!(f, "t:{nu}"),
            AlternativeSpec::Stable { alpha } => write!(f, "stable:{alpha}"),
            AlternativeSpec::Tukey { nu } => write!(f, "tukey:{nu}"),
            AlternativeSpec::Normal => write!(f, "normal"),
            AlternativeSpec::Laplace => write!(f, "laplace"),
            AlternativeSpec::Uniform => write!(f, "uniform"),
        }
    }
}

/// Chambers-Mallows-Stuck construction for `S(alpha, 0, 0, 1)`.
fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    let av = alpha * v;
    av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

/// A non-empty list of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SampleTooSmall { needed: 1, got: 0 });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `x -> scale * x + shift` to every value.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|&x| scale * x + shift).collect())
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.values
    }
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Generator for sub-stream `stream` of master seed `seed`.
///
/// Streams are independent ChaCha8 keystreams sharing one key, so replicate
/// `r` of a study always sees the same numbers no matter which worker runs it.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `n` values from `spec`, deterministically in `(spec, n, seed)`.
pub fn sample(spec: &AlternativeSpec, n: usize, seed: u64) -> Result<Sample> {
    let mut rng = stream_rng(seed, 0);
    sample_with(spec, n, &mut rng)
}

pub fn sample_with<R: Rng + ?Sized>(spec: &AlternativeSpec, n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 {
        return Err(Error::SampleTooSmall { needed: 1, got: 0 });
    }
    spec.validate()?;
    let values = (0..n).map(|_| spec.draw(rng)).collect();
    Sample::new(values)
}
