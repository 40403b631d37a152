//! Dynamo model configuration: rotation, alpha, diffusivity and
//! stratification profiles plus the two dynamo numbers.
//!
//! Models are TOML files; see `models/model_b.toml` for a complete example.
//! Radial profiles are functions of `x = r / R` and latitudinal profiles are
//! polynomials in `mu = cos(theta)`:
//!
//! ```toml
//! schema_version = 1
//! name = "example"
//! x_inner = 0.65
//! c_omega = 1.0e5
//!
//! eta = { kind = "erf_step", inner = 0.1, outer = 1.0, center = 0.7, width = 0.05 }
//! g = { kind = "constant", value = 1.0 }
//!
//! [omega]
//! inner = [1.0]
//! outer = [1.0, 0.0, -0.1]
//! transition = { kind = "erf_step", inner = 0.0, outer = 1.0, center = 0.7, width = 0.025 }
//!
//! [alpha]
//! radial = { kind = "table", x = [0.65, 0.8, 1.0], y = [0.0, 1.0, 1.0] }
//! latitudinal = [0.5, 0.0, -0.5]
//! ```
//!
//! `Omega(x, mu) = Omega_in(mu) + H(x) (Omega_out(mu) - Omega_in(mu))` with
//! `H` the transition profile, and `alpha_hat(x, mu) = R(x) Lambda(mu)`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming a directory searched for `<name>.toml`.
pub const MODEL_DIR_ENV: &str = "DYNAMO_MODEL_DIR";

const MODEL_B_TOML: &str = include_str!("../models/model_b.toml");

/// A profile of `x` with its first derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    Constant {
        value: f64,
    },
    /// `inner + (outer - inner) (1 + erf((x - center) / width)) / 2`
    ErfStep {
        inner: f64,
        outer: f64,
        center: f64,
        width: f64,
    },
    /// `sum_k c_k x^k`
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// Natural cubic spline through the points; constant beyond the ends.
    Table {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

impl RadialProfile {
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            RadialProfile::Constant { value } => (*value, 0.0),
            RadialProfile::ErfStep {
                inner,
                outer,
                center,
                width,
            } => {
                let t = (x - center) / width;
                let jump = outer - inner;
                (
                    inner + jump * 0.5 * (1.0 + libm::erf(t)),
                    jump * (-t * t).exp() / (std::f64::consts::PI.sqrt() * width),
                )
            }
            RadialProfile::Polynomial { coefficients } => polynomial(coefficients, x),
            RadialProfile::Table { x: xs, y: ys } => spline(xs, ys, x),
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        match self {
            RadialProfile::ErfStep { width, .. } if !(*width > 0.0) => {
                Err(Error::Config(format!("{what}: erf_step width must be positive")))
            }
            RadialProfile::Polynomial { coefficients } if coefficients.is_empty() => {
                Err(Error::Config(format!("{what}: polynomial needs at least one coefficient")))
            }
            RadialProfile::Table { x, y } => {
                if x.len() != y.len() || x.len() < 2 {
                    return Err(Error::Config(format!(
                        "{what}: table needs matching x and y with at least two points"
                    )));
                }
                if !x.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Config(format!("{what}: table x must increase strictly")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Value and derivative of `sum_k c_k z^k`.
fn polynomial(c: &[f64], z: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Natural cubic spline value and slope at `x`.
fn spline(xs: &[f64], ys: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    if x <= xs[0] {
        return (ys[0], 0.0);
    }
    if x >= xs[n - 1] {
        return (ys[n - 1], 0.0);
    }
    let m = spline_moments(xs, ys);
    let k = xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    let h = xs[k + 1] - xs[k];
    let a = (xs[k + 1] - x) / h;
    let b = (x - xs[k]) / h;
    let value = a * ys[k] + b * ys[k + 1] + ((a * a * a - a) * m[k] + (b * b * b - b) * m[k + 1]) * h * h / 6.0;
    let slope = (ys[k + 1] - ys[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m[k] + (3.0 * b * b - 1.0) / 6.0 * h * m[k + 1];
    (value, slope)
}

/// Second derivatives at the knots (natural end conditions).
fn spline_moments(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut m = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
        let p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        let d = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        u[i] = (6.0 * d / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
    }
    m[n - 1] = 0.0;
    for i in (0..n - 1).rev() {
        m[i] = m[i] * m[i + 1] + u[i];
    }
    m
}

/// Polynomial in `mu`, written as its coefficient list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatitudinalProfile {
    pub coefficients: Vec<f64>,
}

impl LatitudinalProfile {
    pub fn eval(&self, mu: f64) -> (f64, f64) {
        polynomial(&self.coefficients, mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationProfile {
    pub inner: LatitudinalProfile,
    pub outer: LatitudinalProfile,
    pub transition: RadialProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaProfile {
    pub radial: RadialProfile,
    pub latitudinal: LatitudinalProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamoModel {
    pub schema_version: u32,
    pub name: String,
    pub x_inner: f64,
    pub c_omega: f64,
    /// Only used as a default by callers that do not scan `C_alpha`.
    #[serde(default)]
    pub c_alpha: Option<f64>,
    pub eta: RadialProfile,
    pub g: RadialProfile,
    pub omega: RotationProfile,
    pub alpha: AlphaProfile,
}

/// Samples of `Omega` and its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSample {
    pub value: f64,
    pub d_x: f64,
    pub d_mu: f64,
}

impl DynamoModel {
    pub fn from_toml(text: &str) -> Result<Self> {
        let model: DynamoModel = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "model_b" => Some(Self::from_toml(MODEL_B_TOML).expect("shipped model parses")),
            _ => None,
        }
    }

    pub fn model_b() -> Self {
        Self::builtin("model_b").expect("model_b is built in")
    }

    /// Resolves `spec` as a file path, then as `$DYNAMO_MODEL_DIR/<spec>.toml`,
    /// then as a built-in model name.
    pub fn load(spec: &str) -> Result<Self> {
        let path = Path::new(spec);
        if path.is_file() {
            return Self::from_file(path);
        }
        if let Some(dir) = std::env::var_os(MODEL_DIR_ENV) {
            let candidate = PathBuf::from(dir).join(format!("{spec}.toml"));
            if candidate.is_file() {
                return Self::from_file(&candidate);
            }
        }
        Self::builtin(spec).ok_or_else(|| {
            Error::Config(format!(
                "model `{spec}` is neither a file, nor in ${MODEL_DIR_ENV}, nor built in"
            ))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.x_inner > 0.0 && self.x_inner < 1.0) {
            return Err(Error::Config(format!("x_inner must lie in (0, 1), got {}", self.x_inner)));
        }
        if !self.c_omega.is_finite() {
            return Err(Error::Config("c_omega must be finite".into()));
        }
        self.eta.validate("eta")?;
        self.g.validate("g")?;
        self.omega.transition.validate("omega.transition")?;
        self.alpha.radial.validate("alpha.radial")?;
        for (what, p) in [
            ("omega.inner", &self.omega.inner),
            ("omega.outer", &self.omega.outer),
            ("alpha.latitudinal", &self.alpha.latitudinal),
        ] {
            if p.coefficients.is_empty() {
                return Err(Error::Config(format!("{what}: needs at least one coefficient")));
            }
        }
        Ok(())
    }

    /// Diffusivity and its radial derivative; must be positive.
    pub fn eta(&self, x: f64) -> Result<(f64, f64)> {
        let (v, d) = self.eta.eval(x);
        if !(v.is_finite() && d.is_finite()) || v <= 0.0 {
            return Err(Error::ProfileEvaluation { profile: "eta", x, mu: f64::NAN });
        }
        Ok((v, d))
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        finite("g", x, f64::NAN, self.g.eval(x).0)
    }

    pub fn omega(&self, x: f64, mu: f64) -> Result<OmegaSample> {
        let (h, dh) = self.omega.transition.eval(x);
        let (wi, dwi) = self.omega.inner.eval(mu);
        let (wo, dwo) = self.omega.outer.eval(mu);
        let s = OmegaSample {
            value: wi + h * (wo - wi),
            d_x: dh * (wo - wi),
            d_mu: dwi + h * (dwo - dwi),
        };
        finite("omega", x, mu, s.value + s.d_x + s.d_mu)?;
        Ok(s)
    }

    pub fn alpha_hat(&self, x: f64, mu: f64) -> Result<f64> {
        finite(
            "alpha",
            x,
            mu,
            self.alpha.radial.eval(x).0 * self.alpha.latitudinal.eval(mu).0,
        )
    }
}

fn finite(profile: &'static str, x: f64, mu: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ProfileEvaluation { profile, x, mu })
    }
}
