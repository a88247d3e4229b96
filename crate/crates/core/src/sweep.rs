//! Parameter sweeps of the capacity bound written as CSV.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::qram_max_qubits;
use crate::error::{Error, Result};
use crate::params::{Conventions, HardwareParams, LogBase, VelocitySource};

const MAX_POINTS: usize = 1_000_000;

/// Quantity varied along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    /// One-dimensional velocity limit, m/s.
    Velocity,
    /// Both couplings g₁ = g₂, rad/s.
    G,
    /// Σλ/m read as a squared speed; the velocity limit is 4√(λ/m) m/s.
    LambdaOverM,
    /// Lattice spacing, m.
    A,
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "velocity" | "v" => Ok(AxisName::Velocity),
            "g" => Ok(AxisName::G),
            "lambda_over_m" => Ok(AxisName::LambdaOverM),
            "a" => Ok(AxisName::A),
            other => Err(Error::InvalidGrid(format!("unknown axis '{other}'"))),
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisName::Velocity => "velocity",
            AxisName::G => "g",
            AxisName::LambdaOverM => "lambda_over_m",
            AxisName::A => "a",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lin" | "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(Error::InvalidGrid(format!("unknown scale '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn new(name: AxisName, min: f64, max: f64, points: usize, scale: Scale) -> Self {
        Axis {
            name,
            min,
            max,
            points,
            scale,
        }
    }

    /// Parses `name:min:max:points[:lin|log]`; the scale defaults to log.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(Error::InvalidGrid(format!(
                "axis '{text}' is not name:min:max:points[:scale]"
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("cannot parse '{s}' in axis '{text}'")))
        };
        let points = parts[3].parse::<usize>().map_err(|_| {
            Error::InvalidGrid(format!("cannot parse '{}' as a point count", parts[3]))
        })?;
        let scale = parts.get(4).map_or(Ok(Scale::Log), |s| s.parse())?;
        Ok(Axis::new(
            parts[0].parse()?,
            num(parts[1])?,
            num(parts[2])?,
            points,
            scale,
        ))
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis {}: points ≥ 2 required, got {}",
                self.name, self.points
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.max > self.min)
        {
            return Err(Error::InvalidGrid(format!(
                "axis {}: need 0 < min < max, got [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let f = i as f64 / last;
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.points {
                    return self.max;
                }
                match self.scale {
                    Scale::Linear => self.min + f * (self.max - self.min),
                    Scale::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .map(|v| v.clamp(self.min, self.max))
            .collect()
    }
}

/// Axes, fixed parameters, conventions and the dimensions reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub params: HardwareParams,
    pub conventions: Conventions,
    pub dims: Vec<usize>,
}

impl SweepGrid {
    pub fn new(
        axes: Vec<Axis>,
        params: HardwareParams,
        conventions: Conventions,
        dims: Vec<usize>,
    ) -> Result<Self> {
        let grid = SweepGrid {
            axes,
            params,
            conventions,
            dims,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "1 or 2 axes required, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        let names: Vec<AxisName> = self.axes.iter().map(|a| a.name).collect();
        if names.len() == 2 && names[0] == names[1] {
            return Err(Error::InvalidGrid(format!("axis {} repeated", names[0])));
        }
        if names.contains(&AxisName::Velocity) && names.contains(&AxisName::LambdaOverM) {
            return Err(Error::InvalidGrid(
                "velocity and lambda_over_m both set the velocity".into(),
            ));
        }
        let total = self
            .axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.points))
            .unwrap_or(usize::MAX);
        if total > MAX_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{total} points exceed the limit of {MAX_POINTS}"
            )));
        }
        if self.dims.is_empty() || self.dims.iter().any(|d| !(1..=3).contains(d)) {
            return Err(Error::InvalidGrid(
                "dims must be a nonempty subset of {1, 2, 3}".into(),
            ));
        }
        self.params.clone().validate()?;
        Ok(())
    }

    /// Bound versus velocity limit for d = 1, 2, 3 at micron spacing and
    /// a millisecond stage time.
    pub fn fig3() -> Self {
        SweepGrid {
            axes: vec![Axis::new(AxisName::Velocity, 1e2, 6e3, 50, Scale::Log)],
            params: HardwareParams {
                a: 1e-6,
                g1: 2000.0 * PI,
                g2: 2000.0 * PI,
                ..HardwareParams::default()
            },
            conventions: Conventions::new(LogBase::Natural, 2, VelocitySource::Explicit(6e3)),
            dims: vec![1, 2, 3],
        }
    }

    /// One-dimensional bound over coupling g and λ/m at millimeter spacing.
    pub fn fig4() -> Self {
        SweepGrid {
            axes: vec![
                Axis::new(AxisName::G, 0.01, 1.0, 40, Scale::Log),
                Axis::new(AxisName::LambdaOverM, 1e4, 3.6e7, 40, Scale::Log),
            ],
            params: HardwareParams {
                a: 1e-3,
                ..HardwareParams::default()
            },
            conventions: Conventions::new(LogBase::Natural, 2, VelocitySource::LiebRobinson),
            dims: vec![1],
        }
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    fn point(&self, coords: &[f64]) -> (HardwareParams, Conventions) {
        let mut params = self.params.clone();
        let mut conventions = self.conventions;
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.name {
                AxisName::Velocity => conventions.velocity_source = VelocitySource::Explicit(v),
                AxisName::G => {
                    params.g1 = v;
                    params.g2 = v;
                }
                AxisName::LambdaOverM => {
                    conventions.velocity_source = VelocitySource::Explicit(4.0 * v.sqrt())
                }
                AxisName::A => params.a = v,
            }
        }
        (params, conventions)
    }
}

/// Evaluated sweep: one row per grid point, axis values first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: serde_json::Value,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.metadata, self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Evaluates the bound at every grid point; rows follow the grid order
/// with the last axis varying fastest.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepTable> {
    grid.validate()?;
    let values: Vec<Vec<f64>> = grid.axes.iter().map(Axis::values).collect();
    let coords: Vec<Vec<f64>> = match values.as_slice() {
        [x] => x.iter().map(|&v| vec![v]).collect(),
        [x, y] => x
            .iter()
            .flat_map(|&u| y.iter().map(move |&v| vec![u, v]))
            .collect(),
        _ => unreachable!("validated axis count"),
    };

    let rows = coords
        .par_iter()
        .map(|c| {
            let (params, conventions) = grid.point(c);
            let mut row = c.clone();
            for &d in &grid.dims {
                let p = HardwareParams {
                    d,
                    ..params.clone()
                };
                row.push(qram_max_qubits(&p, conventions)?.max_qubits_total);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header: Vec<String> = grid.axes.iter().map(|a| a.name.to_string()).collect();
    header.extend(grid.dims.iter().map(|d| format!("max_qubits_d{d}")));
    let metadata = serde_json::json!({
        "conventions": grid.conventions,
        "conventions_text": grid.conventions.to_string(),
        "params": grid.params,
        "axes": grid.axes,
        "dims": grid.dims,
    });
    Ok(SweepTable {
        header,
        rows,
        metadata,
    })
}
