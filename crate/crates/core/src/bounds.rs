//! Velocity formulas and capacity bounds.
//!
//! A bound compares the distance a signal must cover with the distance it can
//! cover: for an operation time τ·logᵖN across N sites of spacing a, causality
//! requires N a ≤ v τ logᵖN. The largest N satisfying this with equality is
//! returned by [`fixed_point_solve`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{max_group_velocity, LatticeSpec};
use crate::params::{Conventions, HardwareParams, LogBase, VelocitySource};

const MAX_ITERATIONS: usize = 1_000_000;

/// Lieb–Robinson velocity in lattice units and in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrVelocity {
    pub lattice_units: f64,
    pub physical: f64,
}

/// 4√(d Σλ_j / m) lattice units/s, times a for m/s.
pub fn lr_velocity(params: &HardwareParams) -> Result<LrVelocity> {
    let p = params.clone().validate()?;
    let lattice_units = 4.0 * (p.d as f64 * p.spring_sum() / p.m).sqrt();
    Ok(LrVelocity {
        lattice_units,
        physical: lattice_units * p.a,
    })
}

/// Continuum stiffness λ^(d) = d Σ_j λ_j a j².
pub fn coarse_grain(params: &HardwareParams) -> Result<f64> {
    let p = params.clone().validate()?;
    let s: f64 = p
        .lambda
        .iter()
        .enumerate()
        .map(|(j, lam)| lam * p.a * ((j + 1) * (j + 1)) as f64)
        .sum();
    Ok(p.d as f64 * s)
}

/// Continuum sound speed √(λ^(d) / ρ).
pub fn qft_velocity(lambda_d: f64, rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParams("nonpositive density".into()));
    }
    if !(lambda_d.is_finite() && lambda_d >= 0.0) {
        return Err(Error::InvalidParams("negative continuum coupling".into()));
    }
    Ok((lambda_d / rho).sqrt())
}

/// Largest solution of N = R·(log N)ᵖ.
///
/// Iterates N ← R·(log N)ᵖ from N₀ = max(R, base²). Where the map contracts
/// slowly (slope in (0.5, 1) from above the root) the step is replaced by a
/// Newton step on N − R·(log N)ᵖ, which converges to the same point.
pub fn fixed_point_solve(ratio: f64, p: u32, base: LogBase) -> Result<f64> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidParams(format!(
            "ratio must be positive, got {ratio}"
        )));
    }
    if p == 0 {
        return Ok(ratio);
    }
    let pf = p as f64;
    let phi = |n: f64| ratio * base.log(n).powi(p as i32);
    let slope = |n: f64| ratio * pf * base.log(n).powi(p as i32 - 1) / (n * base.ln_base());
    let no_fixed_point = Error::NoFixedPoint { ratio, exponent: p };

    let mut n = ratio.max(base.value() * base.value());
    if n - phi(n) > 0.0 && slope(n) >= 1.0 {
        // below the dip of N − φ(N): the largest root, if any, is further up
        let mut guard = 0;
        while n - phi(n) > 0.0 && slope(n) >= 1.0 {
            n *= 2.0;
            guard += 1;
            if guard > 2000 || !n.is_finite() {
                return Err(no_fixed_point);
            }
        }
    }

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        if n.is_nan() || n <= 1.0 || base.log(n) <= 0.0 {
            return Err(no_fixed_point);
        }
        let g = n - phi(n);
        let s = slope(n);
        let next = if g > 0.0 && s > 0.5 && s < 1.0 {
            n - g / (1.0 - s)
        } else {
            phi(n)
        };
        if !next.is_finite() {
            return Err(no_fixed_point);
        }
        let done = (next - n).abs() <= 1e-12 * n;
        n = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged || n.is_nan() || n <= 1.0 {
        return Err(Error::NoConvergence {
            ratio,
            exponent: p,
            iterations: MAX_ITERATIONS,
        });
    }
    if (n - phi(n)).abs() / n >= 1e-10 {
        return Err(Error::NoConvergence {
            ratio,
            exponent: p,
            iterations: MAX_ITERATIONS,
        });
    }
    Ok(n)
}

/// Capacity bound with the conventions and inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub max_qubits_total: f64,
    /// Qubits along one axis.
    pub max_linear_extent: f64,
    /// m/s, after the speed cap.
    pub velocity_used: f64,
    /// Time scale per logᵖN stage, s.
    pub time_scale: f64,
    /// R = v τ / a.
    pub ratio: f64,
    pub conventions: Conventions,
    pub inputs_digest: HardwareParams,
}

fn bound_from_velocity(
    params: HardwareParams,
    conventions: Conventions,
    velocity: f64,
    time_scale: f64,
) -> Result<BoundResult> {
    let velocity_used = velocity.min(params.c_max);
    let ratio = velocity_used * time_scale / params.a;
    let extent = fixed_point_solve(ratio, conventions.depth_exponent, conventions.log_base)?;
    Ok(BoundResult {
        max_qubits_total: extent.powi(params.d as i32),
        max_linear_extent: extent,
        velocity_used,
        time_scale,
        ratio,
        conventions,
        inputs_digest: params,
    })
}

/// Physical velocity selected by `source`, before the cap.
pub fn resolve_velocity(params: &HardwareParams, source: VelocitySource) -> Result<f64> {
    let p = params.clone().validate()?;
    let v = match source {
        VelocitySource::LiebRobinson => lr_velocity(&p)?.physical,
        VelocitySource::Qft => qft_velocity(coarse_grain(&p)?, p.density())?,
        VelocitySource::Group => {
            let spec = LatticeSpec::new(p.d, 2 * p.nu + 2, p.lambda.clone(), p.m, p.a)?;
            max_group_velocity(&spec).physical
        }
        VelocitySource::Explicit(v) => {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "explicit velocity must be positive, got {v}"
                )));
            }
            (p.d as f64).sqrt() * v
        }
        VelocitySource::TeleportHybrid => p.c_max,
    };
    Ok(v)
}

/// Largest QRAM whose log-depth operation time τ₀·logᵖN still outpaces the
/// signal travel time across it.
pub fn qram_max_qubits(params: &HardwareParams, conventions: Conventions) -> Result<BoundResult> {
    let p = params.clone().validate()?;
    let v = resolve_velocity(&p, conventions.velocity_source)?;
    let tau = p.tau0();
    bound_from_velocity(p, conventions, v, tau)
}

/// Two-dimensional layout whose routing hops travel at the speed cap.
pub fn teleport_hybrid_max_qubits(
    params: &HardwareParams,
    conventions: Conventions,
) -> Result<BoundResult> {
    let p = params.clone().validate()?;
    if p.d != 2 {
        return Err(Error::InvalidParams(format!(
            "teleport-hybrid defined for d=2, got d={}",
            p.d
        )));
    }
    let conventions = Conventions {
        velocity_source: VelocitySource::TeleportHybrid,
        ..conventions
    };
    let (v, tau) = (p.c_max, p.tau0());
    bound_from_velocity(p, conventions, v, tau)
}

/// Largest N with N a / (ΔT log N) ≤ c.
pub fn naive_max_qubits(a: f64, delta_t: f64, c: f64, base: LogBase) -> Result<f64> {
    for (value, what) in [
        (a, "lattice spacing"),
        (delta_t, "clock cycle time"),
        (c, "speed"),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParams(format!("nonpositive {what}")));
        }
    }
    fixed_point_solve(c * delta_t / a, 1, base)
}

/// [`naive_max_qubits`] on `params` with c = c_max and ΔT = delta_t.
pub fn naive_bound(params: &HardwareParams, base: LogBase) -> Result<BoundResult> {
    let p = params.clone().validate()?;
    let conventions = Conventions::new(base, 1, VelocitySource::Explicit(p.c_max));
    let v = resolve_velocity(&p, conventions.velocity_source)?;
    let tau = p.delta_t;
    bound_from_velocity(p, conventions, v, tau)
}
