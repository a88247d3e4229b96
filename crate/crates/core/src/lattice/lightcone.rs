use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dispersion::{max_group_velocity, GroupVelocity};
use super::propagator::KernelBuilder;
use super::weyl::commutator_norm_from_phase;
use super::LatticeSpec;
use crate::error::{Error, Result};

/// First crossing of the relative threshold at one distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    /// Distance from the origin along axis 0, lattice units.
    pub r: usize,
    /// Arrival time in s; `None` when the threshold is never reached.
    pub t_arrival: Option<f64>,
    /// Largest commutator norm seen for t ≤ t_max.
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightCone {
    pub arrivals: Vec<Arrival>,
    /// Slope of the least-squares line r = v t + b, lattice units/s.
    pub velocity_lattice: f64,
    /// Same in m/s.
    pub velocity_physical: f64,
    pub intercept: f64,
    pub threshold: f64,
    pub t_max: f64,
    pub dt: f64,
    pub group_velocity: GroupVelocity,
    /// 4√(d Σλ_j / m), lattice units/s.
    pub lr_bound_lattice: f64,
}

impl LightCone {
    /// Fitted velocity strictly below the Lieb–Robinson velocity.
    pub fn within_bound(&self) -> bool {
        self.velocity_lattice < self.lr_bound_lattice
    }
}

/// 4√(d Σλ_j / m) for a lattice spec, lattice units/s.
pub(crate) fn lr_bound_lattice(spec: &LatticeSpec) -> f64 {
    4.0 * (spec.d as f64 * spec.spring_sum() / spec.m).sqrt()
}

/// Empirical light cone of the probe pair f = 1 (q at the origin) and
/// g = i (p at distance r along axis 0).
///
/// Time is sampled every 0.05/ω_max up to `t_max`; the arrival time at r is
/// the first time the commutator norm reaches `threshold` times its peak at
/// that distance, linearly interpolated between samples.
pub fn measure_light_cone(
    spec: &LatticeSpec,
    threshold: f64,
    t_max: f64,
    r_max: usize,
) -> Result<LightCone> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::LightCone(format!(
            "threshold {threshold} not in (0, 1)"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::LightCone("t_max must be positive".into()));
    }
    let clean = spec.max_clean_distance();
    if r_max == 0 || r_max > clean {
        return Err(Error::LightCone(format!(
            "r_max = {r_max} must lie in 1..={clean} (L/2 - nu)"
        )));
    }

    let builder = KernelBuilder::new(spec);
    let dt = 0.05 / builder.modes().omega_max();
    let steps = (t_max / dt).ceil() as usize;
    let sites: Vec<usize> = (1..=r_max).map(|r| spec.axis_site(r)).collect();

    // samples[i][r - 1]: commutator norm at time i·dt
    let samples: Vec<Vec<f64>> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 * dt).min(t_max);
            let kernel = builder.qq_kernel(t);
            sites
                .iter()
                .map(|&s| commutator_norm_from_phase(kernel[s]))
                .collect()
        })
        .collect();
    let time = |i: usize| (i as f64 * dt).min(t_max);

    let arrivals: Vec<Arrival> = (0..r_max)
        .map(|j| {
            let peak = samples.iter().map(|row| row[j]).fold(0.0, f64::max);
            let level = threshold * peak;
            let t_arrival = if peak > 0.0 {
                samples.iter().position(|row| row[j] >= level).map(|i| {
                    if i == 0 {
                        return 0.0;
                    }
                    let (y0, y1) = (samples[i - 1][j], samples[i][j]);
                    let (t0, t1) = (time(i - 1), time(i));
                    t0 + (level - y0) / (y1 - y0) * (t1 - t0)
                })
            } else {
                None
            };
            Arrival {
                r: j + 1,
                t_arrival,
                peak,
            }
        })
        .collect();

    let points: Vec<(f64, f64)> = arrivals
        .iter()
        .filter_map(|a| a.t_arrival.map(|t| (t, a.r as f64)))
        .collect();
    if points.len() < 2 {
        return Err(Error::LightCone(format!(
            "only {} distance(s) reached the threshold within t_max",
            points.len()
        )));
    }
    let (slope, intercept) = least_squares(&points);
    if !slope.is_finite() {
        return Err(Error::LightCone("arrival times are degenerate".into()));
    }

    Ok(LightCone {
        arrivals,
        velocity_lattice: slope,
        velocity_physical: slope * spec.a,
        intercept,
        threshold,
        t_max,
        dt,
        group_velocity: max_group_velocity(spec),
        lr_bound_lattice: lr_bound_lattice(spec),
    })
}

/// Ordinary least squares of y on x; returns (slope, intercept).
fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
