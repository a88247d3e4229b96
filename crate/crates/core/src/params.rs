//! Physical configuration shared by every other module.
//!
//! All public quantities are strict SI: meters, seconds, kilograms and
//! radians per second. Quantities in lattice units are labeled as such where
//! they are returned.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s, the default absolute velocity cap.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Hardware description of a QRAM built on a harmonic lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareParams {
    /// Lattice spacing, m.
    pub a: f64,
    /// Clock cycle time, s.
    pub delta_t: f64,
    /// Beam-splitter coupling, rad/s.
    pub g1: f64,
    /// Controlled-phase coupling, rad/s.
    pub g2: f64,
    /// Spring constants λ_1..λ_ν, kg/s².
    pub lambda: Vec<f64>,
    /// Site mass, kg.
    pub m: f64,
    /// Spatial dimension (1, 2 or 3).
    pub d: usize,
    /// Interaction range ν.
    pub nu: usize,
    /// Absolute speed cap, m/s.
    pub c_max: f64,
}

impl Default for HardwareParams {
    /// Micron-spaced chain with τ₀ = 1 ms and a unit nearest-neighbor spring.
    fn default() -> Self {
        HardwareParams {
            a: 1e-6,
            delta_t: 1e-3,
            g1: 2000.0 * PI,
            g2: 2000.0 * PI,
            lambda: vec![1.0],
            m: 1.0,
            d: 1,
            nu: 1,
            c_max: SPEED_OF_LIGHT,
        }
    }
}

fn positive(value: f64, what: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("nonpositive {what}")))
    }
}

impl HardwareParams {
    /// Checks every invariant and returns the parameters unchanged.
    ///
    /// The error message names the first violated invariant.
    pub fn validate(self) -> Result<Self> {
        positive(self.a, "lattice spacing")?;
        positive(self.delta_t, "clock cycle time")?;
        positive(self.g1, "coupling g1")?;
        positive(self.g2, "coupling g2")?;
        positive(self.m, "mass")?;
        positive(self.c_max, "speed cap")?;
        if !(1..=3).contains(&self.d) {
            return Err(Error::InvalidParams(format!(
                "dimension {} not in {{1, 2, 3}}",
                self.d
            )));
        }
        if self.nu == 0 {
            return Err(Error::InvalidParams(
                "interaction range must be at least 1".into(),
            ));
        }
        if self.lambda.len() != self.nu {
            return Err(Error::InvalidParams(
                "range/coupling length mismatch".into(),
            ));
        }
        validate_springs(&self.lambda)?;
        Ok(self)
    }

    /// Σ_j λ_j.
    pub fn spring_sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    pub fn tau0(&self) -> f64 {
        // couplings are validated positive
        PI / self.g1 + PI / self.g2
    }

    /// Continuum mass density ρ = m / a^d, kg/m^d.
    pub fn density(&self) -> f64 {
        self.m / self.a.powi(self.d as i32)
    }

    /// Parses a flat `key = value` document.
    ///
    /// Keys are the field names of [`HardwareParams`]; `lambda` is a
    /// comma-separated list and `c_max` defaults to the speed of light. Blank
    /// lines and lines starting with `#` are skipped.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut a = None;
        let mut delta_t = None;
        let mut g1 = None;
        let mut g2 = None;
        let mut lambda = None;
        let mut m = None;
        let mut d = None;
        let mut nu = None;
        let mut c_max = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "a" => a = Some(parse_f64(key, value)?),
                "delta_t" => delta_t = Some(parse_f64(key, value)?),
                "g1" => g1 = Some(parse_f64(key, value)?),
                "g2" => g2 = Some(parse_f64(key, value)?),
                "m" => m = Some(parse_f64(key, value)?),
                "c_max" => c_max = Some(parse_f64(key, value)?),
                "d" => d = Some(parse_usize(key, value)?),
                "nu" => nu = Some(parse_usize(key, value)?),
                "lambda" => lambda = Some(parse_list(value)?),
                other => return Err(Error::Config(format!("unknown key '{other}'"))),
            }
        }

        let missing = |k: &str| Error::Config(format!("missing key '{k}'"));
        HardwareParams {
            a: a.ok_or_else(|| missing("a"))?,
            delta_t: delta_t.ok_or_else(|| missing("delta_t"))?,
            g1: g1.ok_or_else(|| missing("g1"))?,
            g2: g2.ok_or_else(|| missing("g2"))?,
            lambda: lambda.ok_or_else(|| missing("lambda"))?,
            m: m.ok_or_else(|| missing("m"))?,
            d: d.ok_or_else(|| missing("d"))?,
            nu: nu.ok_or_else(|| missing("nu"))?,
            c_max: c_max.unwrap_or(SPEED_OF_LIGHT),
        }
        .validate()
    }

    pub fn from_config_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::ConfigNotFound(path.display().to_string()))?;
        Self::from_config_str(&text)
    }

    /// Renders the parameters back into the config format.
    pub fn to_config_string(&self) -> String {
        let lambda: Vec<String> = self.lambda.iter().map(|x| x.to_string()).collect();
        format!(
            "a = {}\ndelta_t = {}\ng1 = {}\ng2 = {}\nlambda = {}\nm = {}\nd = {}\nnu = {}\nc_max = {}\n",
            self.a,
            self.delta_t,
            self.g1,
            self.g2,
            lambda.join(", "),
            self.m,
            self.d,
            self.nu,
            self.c_max
        )
    }
}

pub(crate) fn validate_springs(lambda: &[f64]) -> Result<()> {
    if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidParams("negative spring constant".into()));
    }
    if !lambda.iter().any(|l| *l > 0.0) {
        return Err(Error::InvalidParams("all spring constants are zero".into()));
    }
    Ok(())
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key '{key}': cannot parse '{value}' as a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("key '{key}': cannot parse '{value}' as an integer")))
}

fn parse_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| parse_f64("lambda", s.trim()))
        .collect()
}

/// Per-stage gate time τ₀ = π/g₁ + π/g₂, in seconds.
pub fn tau0(g1: f64, g2: f64) -> Result<f64> {
    positive(g1, "coupling g1")?;
    positive(g2, "coupling g2")?;
    Ok(PI / g1 + PI / g2)
}

/// Mass density m / a^d of validated parameters.
pub fn density(params: &HardwareParams) -> Result<f64> {
    let p = params.clone().validate()?;
    Ok(p.density())
}

/// Logarithm base used in depth formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn ln_base(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            LogBase::Natural => std::f64::consts::E,
            LogBase::Two => 2.0,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.ln_base()
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "e" | "ln" => Ok(LogBase::Natural),
            "2" | "two" | "binary" => Ok(LogBase::Two),
            other => Err(Error::Config(format!("unknown log base '{other}'"))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Natural => write!(f, "natural"),
            LogBase::Two => write!(f, "2"),
        }
    }
}

/// Which velocity feeds the capacity bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocitySource {
    /// Lieb–Robinson velocity of the harmonic lattice.
    LiebRobinson,
    /// Continuum sound speed from coarse-grained couplings.
    Qft,
    /// Maximal group velocity of the lattice dispersion.
    Group,
    /// A one-dimensional velocity limit in m/s; `√d` is applied in d dimensions.
    Explicit(f64),
    /// Routing hops limited by the speed cap (teleportation-assisted 2D layout).
    TeleportHybrid,
}

impl FromStr for VelocitySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lieb_robinson" | "lieb-robinson" | "lr" => Ok(VelocitySource::LiebRobinson),
            "qft" => Ok(VelocitySource::Qft),
            "group" => Ok(VelocitySource::Group),
            "teleport-hybrid" | "teleport_hybrid" => Ok(VelocitySource::TeleportHybrid),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .map(VelocitySource::Explicit)
                .ok_or_else(|| Error::Config(format!("unknown velocity source '{other}'"))),
        }
    }
}

impl fmt::Display for VelocitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocitySource::LiebRobinson => write!(f, "lieb_robinson"),
            VelocitySource::Qft => write!(f, "qft"),
            VelocitySource::Group => write!(f, "group"),
            VelocitySource::Explicit(v) => write!(f, "explicit({v} m/s)"),
            VelocitySource::TeleportHybrid => write!(f, "teleport-hybrid"),
        }
    }
}

/// Convention record attached to every bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub log_base: LogBase,
    /// p in T ∝ τ₀·logᵖN.
    pub depth_exponent: u32,
    pub velocity_source: VelocitySource,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            log_base: LogBase::Natural,
            depth_exponent: 2,
            velocity_source: VelocitySource::LiebRobinson,
        }
    }
}

impl Conventions {
    pub fn new(log_base: LogBase, depth_exponent: u32, velocity_source: VelocitySource) -> Self {
        Conventions {
            log_base,
            depth_exponent,
            velocity_source,
        }
    }
}

impl fmt::Display for Conventions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "log_base={} depth_exponent={} velocity_source={}",
            self.log_base, self.depth_exponent, self.velocity_source
        )
    }
}
