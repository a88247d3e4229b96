use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LatticeSpec;

/// ω(k) = √((4/m) Σ_β Σ_j λ_j sin²(j k_β / 2)), in 1/s.
///
/// `k` holds one wavenumber per axis in lattice units.
pub fn dispersion(spec: &LatticeSpec, k: &[f64]) -> f64 {
    debug_assert_eq!(k.len(), spec.d);
    let mut acc = 0.0;
    for &kb in k {
        for (j, lam) in spec.lambda.iter().enumerate() {
            let s = ((j + 1) as f64 * kb / 2.0).sin();
            acc += lam * s * s;
        }
    }
    (4.0 * acc / spec.m).sqrt()
}

/// Analytic gradient ∇_k ω, lattice units per second.
///
/// At ω = 0 the gradient is direction dependent; zero is returned there and
/// callers wanting the k → 0 limit should use [`long_wavelength_speed`].
pub fn group_velocity(spec: &LatticeSpec, k: &[f64]) -> Vec<f64> {
    let omega = dispersion(spec, k);
    if omega == 0.0 {
        return vec![0.0; k.len()];
    }
    k.iter()
        .map(|&kb| {
            let s: f64 = spec
                .lambda
                .iter()
                .enumerate()
                .map(|(j, lam)| {
                    let j = (j + 1) as f64;
                    lam * j * (j * kb).sin()
                })
                .sum();
            s / (spec.m * omega)
        })
        .collect()
}

/// k → 0 limit of |∇ω|, √(Σ_j λ_j j² / m); identical in every direction.
pub fn long_wavelength_speed(spec: &LatticeSpec) -> f64 {
    let s: f64 = spec
        .lambda
        .iter()
        .enumerate()
        .map(|(j, lam)| lam * ((j + 1) * (j + 1)) as f64)
        .sum();
    (s / spec.m).sqrt()
}

/// Slope of ω(k, …, k) against the per-axis wavenumber k as k → 0.
///
/// This is the long-wavelength slope along the lattice diagonal measured per
/// unit of per-axis wavenumber, √d times [`long_wavelength_speed`]. It is
/// evaluated numerically from [`dispersion`] with Richardson extrapolation.
pub fn per_axis_diagonal_slope(spec: &LatticeSpec) -> f64 {
    let slope = |h: f64| dispersion(spec, &vec![h; spec.d]) / h;
    let h = 1e-3;
    (4.0 * slope(h / 2.0) - slope(h)) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupVelocity {
    /// max |∇ω| over the Brillouin zone, lattice units/s.
    pub lattice_units: f64,
    /// Same in m/s.
    pub physical: f64,
    /// k → 0 slope, lattice units/s.
    pub long_wavelength: f64,
}

/// Maximum group velocity over a dense grid of the Brillouin zone.
///
/// ω is even in each component, so the grid spans `[0, π]^d`: 16384 points for
/// d = 1, 256² for d = 2 and 64³ for d = 3. The analytic k → 0 limit is
/// included as a candidate since the grid never reaches k = 0 exactly.
pub fn max_group_velocity(spec: &LatticeSpec) -> GroupVelocity {
    let per_axis: usize = match spec.d {
        1 => 16384,
        2 => 256,
        _ => 64,
    };
    let axis: Vec<f64> = (1..=per_axis)
        .map(|i| PI * i as f64 / per_axis as f64)
        .collect();
    let total = per_axis.pow(spec.d as u32);
    let mut k = vec![0.0; spec.d];
    let mut best: f64 = long_wavelength_speed(spec);
    for idx in 0..total {
        let mut rest = idx;
        for slot in k.iter_mut() {
            *slot = axis[rest % per_axis];
            rest /= per_axis;
        }
        let v = group_velocity(spec, &k)
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt();
        best = best.max(v);
    }
    GroupVelocity {
        lattice_units: best,
        physical: best * spec.a,
        long_wavelength: long_wavelength_speed(spec),
    }
}

/// Normal modes of a finite periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalModes {
    pub l: usize,
    pub d: usize,
    /// One wavevector per mode, components in (−π, π], same layout as sites.
    pub wavevectors: Vec<Vec<f64>>,
    /// ω(k) per mode, 1/s.
    pub frequencies: Vec<f64>,
}

impl NormalModes {
    pub fn new(spec: &LatticeSpec) -> Self {
        let n = spec.n_sites();
        let mut wavevectors = Vec::with_capacity(n);
        let mut frequencies = Vec::with_capacity(n);
        for idx in 0..n {
            let k: Vec<f64> = spec
                .coords(idx)
                .into_iter()
                .map(|m| {
                    let m = if 2 * m > spec.l {
                        m as f64 - spec.l as f64
                    } else {
                        m as f64
                    };
                    2.0 * PI * m / spec.l as f64
                })
                .collect();
            frequencies.push(dispersion(spec, &k));
            wavevectors.push(k);
        }
        NormalModes {
            l: spec.l,
            d: spec.d,
            wavevectors,
            frequencies,
        }
    }

    pub fn omega_max(&self) -> f64 {
        self.frequencies.iter().cloned().fold(0.0, f64::max)
    }
}

/// Explicit coupling matrix K with ṗ = −K q, built site by site from the
/// spring terms λ_j/2 (u(r) − u(r + j e_β))².
pub fn coupling_matrix(spec: &LatticeSpec) -> DMatrix<f64> {
    let n = spec.n_sites();
    let mut k = DMatrix::zeros(n, n);
    for site in 0..n {
        let coords = spec.coords(site);
        for beta in 0..spec.d {
            for (j, lam) in spec.lambda.iter().enumerate() {
                let j = j + 1;
                let mut fwd = coords.clone();
                fwd[beta] = (fwd[beta] + j) % spec.l;
                let other = spec.site_index(&fwd);
                // each bond contributes λ to both diagonals and −λ off-diagonal
                k[(site, site)] += lam;
                k[(other, other)] += lam;
                k[(site, other)] -= lam;
                k[(other, site)] -= lam;
            }
        }
    }
    k
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn axis_slope_independent_of_dimension(
            lambda in prop::collection::vec(0.05f64..5.0, 1..=3),
            m in 0.1f64..10.0,
        ) {
            let l = 2 * lambda.len() + 2;
            let speeds: Vec<f64> = (1..=3)
                .map(|d| long_wavelength_speed(&LatticeSpec::new(d, l, lambda.clone(), m, 1.0).unwrap()))
                .collect();
            prop_assert!((speeds[1] / speeds[0] - 1.0).abs() < 1e-12);
            prop_assert!((speeds[2] / speeds[0] - 1.0).abs() < 1e-12);
            // and the numerical slope along axis 0 agrees
            let spec = LatticeSpec::new(2, l, lambda, m, 1.0).unwrap();
            let k = 1e-5;
            let slope = dispersion(&spec, &[k, 0.0]) / k;
            prop_assert!((slope / speeds[0] - 1.0).abs() < 1e-8);
        }

        #[test]
        fn dispersion_is_even_and_bounded(
            lambda in prop::collection::vec(0.05f64..5.0, 1..=2),
            m in 0.1f64..10.0,
            k in prop::collection::vec(-PI..PI, 2),
        ) {
            let spec = LatticeSpec::new(2, 8, lambda, m, 1.0).unwrap();
            let w = dispersion(&spec, &k);
            let neg: Vec<f64> = k.iter().map(|x| -x).collect();
            prop_assert!((w - dispersion(&spec, &neg)).abs() < 1e-12);
            let cap = (4.0 * 2.0 * spec.spring_sum() / spec.m).sqrt();
            prop_assert!(w >= 0.0 && w <= cap * (1.0 + 1e-12));
        }
    }
}
