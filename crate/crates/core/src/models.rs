//! Simulation scenarios and asymptotic variance formulas.
//!
//! An [`ErrorModel`] is an analytic mean-zero error law with density `f`,
//! distribution function `F`, variance `σ²` and tail first moment
//! `T(t) = ∫_t^∞ x f(x) dx`. From these the four variance curves follow:
//!
//! | curve | formula |
//! |---|---|
//! | empirical estimator on true errors | `F(1 − F)` |
//! | smoothed residual estimator | `F(1 − F) + σ²f² − 2fT` |
//! | efficient mean-zero estimator | `F(1 − F) − T²/σ²` |
//! | gap between the last two | `(σf − T/σ)²` |
//!
//! For normal errors `T = σ²f`, the smoothed variance collapses to
//! `F(1 − F) − σ²f²` and the gap vanishes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, StudentT};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::localpoly::Dataset;
use crate::quadrature;
use crate::rng;

/// Smallest accepted Student-t degrees of freedom. More than four finite
/// moments are required; the extra margin keeps simulated tails tame.
pub const MIN_STUDENT_DOF: f64 = 4.5;

/// Mean-zero error law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorModel {
    Normal { sigma: f64 },
    /// Student t with `dof` degrees of freedom, multiplied by `scale`.
    StudentT { dof: f64, scale: f64 },
    /// Uniform on `[-half_width, half_width]`. Its density is not Lipschitz,
    /// so it is only used for closed-form checks.
    Uniform { half_width: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ErrorModel {
    pub fn normal(sigma: f64) -> Result<Self> {
        Ok(Self::Normal {
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn student_t(dof: f64, scale: f64) -> Result<Self> {
        if !(dof >= MIN_STUDENT_DOF) || !dof.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "student_t degrees of freedom must be at least {MIN_STUDENT_DOF}, got {dof}"
            )));
        }
        Ok(Self::StudentT {
            dof,
            scale: positive("scale", scale)?,
        })
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        Ok(Self::Uniform {
            half_width: positive("half width", half_width)?,
        })
    }

    /// Models excluded from expansion runs because their density is not Lipschitz.
    pub fn is_test_only(&self) -> bool {
        matches!(self, Self::Uniform { .. })
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { sigma } => {
                let u = x / sigma;
                (-0.5 * u * u).exp() / (sigma * (2.0 * PI).sqrt())
            }
            Self::StudentT { dof, scale } => student_density(dof, x / scale) / scale,
            Self::Uniform { half_width } => {
                if x.abs() <= half_width {
                    0.5 / half_width
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { sigma } => 0.5 * libm::erfc(-x / (sigma * std::f64::consts::SQRT_2)),
            Self::StudentT { dof, scale } => student_cdf(dof, x / scale),
            Self::Uniform { half_width } => ((x + half_width) / (2.0 * half_width)).clamp(0.0, 1.0),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Normal { sigma } => sigma * sigma,
            Self::StudentT { dof, scale } => scale * scale * dof / (dof - 2.0),
            Self::Uniform { half_width } => half_width * half_width / 3.0,
        }
    }

    /// `T(t) = ∫_t^∞ x f(x) dx`, in closed form.
    pub fn tail_first_moment(&self, t: f64) -> f64 {
        match *self {
            Self::Normal { sigma } => sigma * sigma * self.density(t),
            // ∫_u^∞ v f_ν(v) dv = (ν + u²)/(ν − 1) · f_ν(u) for the standard t.
            Self::StudentT { dof, scale } => {
                let u = t / scale;
                scale * (dof + u * u) / (dof - 1.0) * student_density(dof, u)
            }
            Self::Uniform { half_width: b } => {
                if t.abs() >= b {
                    0.0
                } else {
                    (b * b - t * t) / (4.0 * b)
                }
            }
        }
    }

    /// `T(t)` by adaptive quadrature of `x f(x)`, absolute tolerance `1e-10`.
    pub fn tail_first_moment_numeric(&self, t: f64) -> Result<f64> {
        let upper = match *self {
            Self::Uniform { half_width } => half_width,
            _ => f64::INFINITY,
        };
        if t >= upper {
            return Ok(0.0);
        }
        let lower = match *self {
            Self::Uniform { half_width } => t.max(-half_width),
            _ => t,
        };
        if lower == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        quadrature::integrate(|x| x * self.density(x), lower, upper, 1e-10)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Normal { sigma } => Normal::new(0.0, sigma).expect("validated sigma").sample(rng),
            Self::StudentT { dof, scale } => {
                scale * StudentT::new(dof).expect("validated dof").sample(rng)
            }
            Self::Uniform { half_width } => rng.random_range(-half_width..=half_width),
        }
    }
}

fn student_density(dof: f64, u: f64) -> f64 {
    let log_norm = ln_gamma(0.5 * (dof + 1.0)) - ln_gamma(0.5 * dof) - 0.5 * (dof * PI).ln();
    (log_norm - 0.5 * (dof + 1.0) * (u * u / dof).ln_1p()).exp()
}

fn student_cdf(dof: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 0.5;
    }
    // P(|T| > |u|) = I_{ν/(ν+u²)}(ν/2, 1/2)
    let tail = 0.5 * beta_reg(0.5 * dof, 0.5, dof / (dof + u * u));
    if u > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Normal { sigma } => write!(f, "normal:{sigma}"),
            Self::StudentT { dof, scale } => write!(f, "student_t:{dof},{scale}"),
            Self::Uniform { half_width } => write!(f, "uniform:{half_width}"),
        }
    }
}

/// Splits `family:a,b,…` into the family name and its numeric parameters.
fn parse_spec(s: &str) -> Result<(String, Vec<f64>)> {
    let s = s.trim();
    let (name, params) = match s.split_once(':') {
        Some((n, p)) => (n, p),
        None => (s, ""),
    };
    let params = params
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("`{p}` is not a number in `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim().to_ascii_lowercase(), params))
}

fn arity(spec: &str, params: &[f64], allowed: std::ops::RangeInclusive<usize>) -> Result<()> {
    if allowed.contains(&params.len()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "`{spec}` takes {}..={} parameters, got {}",
            allowed.start(),
            allowed.end(),
            params.len()
        )))
    }
}

impl FromStr for ErrorModel {
    type Err = Error;

    /// `normal:σ`, `student_t:ν[,scale]`, `uniform:b`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, p) = parse_spec(s)?;
        match name.as_str() {
            "normal" => {
                arity(s, &p, 0..=1)?;
                Self::normal(p.first().copied().unwrap_or(1.0))
            }
            "student_t" | "t" => {
                arity(s, &p, 1..=2)?;
                Self::student_t(p[0], p.get(1).copied().unwrap_or(1.0))
            }
            "uniform" => {
                arity(s, &p, 0..=1)?;
                Self::uniform(p.first().copied().unwrap_or(1.0))
            }
            other => Err(Error::InvalidParameter(format!("unknown error model `{other}`"))),
        }
    }
}

/// Covariate law on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovariateModel {
    Uniform,
    /// Density `α + 2(1 − α)z` for `α ∈ (0, 1]`.
    Linear { alpha: f64 },
}

impl CovariateModel {
    pub fn linear(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self::Linear { alpha })
        } else {
            Err(Error::InvalidParameter(format!("linear covariate density needs alpha in (0, 1], got {alpha}")))
        }
    }

    pub fn density(&self, z: f64) -> f64 {
        if !(0.0..=1.0).contains(&z) {
            return 0.0;
        }
        match *self {
            Self::Uniform => 1.0,
            Self::Linear { alpha } => alpha + 2.0 * (1.0 - alpha) * z,
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, 1.0);
        match *self {
            Self::Uniform => z,
            Self::Linear { alpha } => alpha * z + (1.0 - alpha) * z * z,
        }
    }

    /// Inverse distribution function.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform => u,
            // Root of (1 − α)z² + αz − u in the cancellation-free form.
            Self::Linear { alpha } => {
                2.0 * u / (alpha + (alpha * alpha + 4.0 * (1.0 - alpha) * u).sqrt())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

impl fmt::Display for CovariateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Linear { alpha } => write!(f, "linear:{alpha}"),
        }
    }
}

impl FromStr for CovariateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, p) = parse_spec(s)?;
        match name.as_str() {
            "uniform" => {
                arity(s, &p, 0..=0)?;
                Ok(Self::Uniform)
            }
            "linear" => {
                arity(s, &p, 1..=1)?;
                Self::linear(p[0])
            }
            other => Err(Error::InvalidParameter(format!("unknown covariate model `{other}`"))),
        }
    }
}

/// Smooth regression function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum RegressionModel {
    /// `Σ_k coefficients[k] z^k`.
    Polynomial(Vec<f64>),
    /// `amplitude · sin(2π frequency z)`.
    Sinusoid { amplitude: f64, frequency: f64 },
}

impl RegressionModel {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("polynomial needs finite coefficients".into()));
        }
        Ok(Self::Polynomial(coefficients))
    }

    pub fn value(&self, z: f64) -> f64 {
        match self {
            Self::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * z + ck),
            Self::Sinusoid {
                amplitude,
                frequency,
            } => amplitude * (2.0 * PI * frequency * z).sin(),
        }
    }

    pub fn second_derivative(&self, z: f64) -> f64 {
        match self {
            Self::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * z + (k * (k - 1)) as f64 * ck),
            Self::Sinusoid {
                amplitude,
                frequency,
            } => {
                let w = 2.0 * PI * frequency;
                -amplitude * w * w * (w * z).sin()
            }
        }
    }
}

impl fmt::Display for RegressionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial(c) => {
                f.write_str("polynomial:")?;
                for (i, ck) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{ck}")?;
                }
                Ok(())
            }
            Self::Sinusoid {
                amplitude,
                frequency,
            } => write!(f, "sinusoid:{amplitude},{frequency}"),
        }
    }
}

impl FromStr for RegressionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, p) = parse_spec(s)?;
        match name.as_str() {
            "polynomial" => Self::polynomial(p),
            "sinusoid" => {
                arity(s, &p, 2..=2)?;
                Ok(Self::Sinusoid {
                    amplitude: p[0],
                    frequency: p[1],
                })
            }
            other => Err(Error::InvalidParameter(format!("unknown regression model `{other}`"))),
        }
    }
}

/// `F(t)(1 − F(t))`.
pub fn var_empirical(model: &ErrorModel, t: f64) -> f64 {
    let f = model.cdf(t);
    f * (1.0 - f)
}

/// `F(1 − F) + σ²f² − 2f·T(t)`.
pub fn var_smoothed(model: &ErrorModel, t: f64) -> f64 {
    let f = model.density(t);
    var_empirical(model, t) + model.variance() * f * f - 2.0 * f * model.tail_first_moment(t)
}

/// `F(1 − F) − T(t)²/σ²`.
pub fn var_efficient_meanzero(model: &ErrorModel, t: f64) -> f64 {
    let tail = model.tail_first_moment(t);
    var_empirical(model, t) - tail * tail / model.variance()
}

/// `(σf(t) − T(t)/σ)²`.
pub fn variance_gap(model: &ErrorModel, t: f64) -> f64 {
    let sigma = model.variance().sqrt();
    let g = sigma * model.density(t) - model.tail_first_moment(t) / sigma;
    g * g
}

/// Draws `(Z_i, Y_i = r(Z_i) + ε_i)` with the true errors attached.
///
/// All covariates are drawn first, then all errors, from one stream seeded
/// with `seed`.
pub fn sample_scenario(
    covariate: &CovariateModel,
    regression: &RegressionModel,
    error: &ErrorModel,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidSize {
            n,
            reason: "a scenario needs at least two observations",
        });
    }
    let mut rng = rng::stream(seed);
    let z: Vec<f64> = (0..n).map(|_| covariate.sample(&mut rng)).collect();
    let eps: Vec<f64> = (0..n).map(|_| error.sample(&mut rng)).collect();
    let y = z.iter().zip(&eps).map(|(&z, &e)| regression.value(z) + e).collect();
    Dataset::new(z, y)?.with_true_errors(eps)
}
