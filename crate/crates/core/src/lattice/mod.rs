//! Exact dynamics of the harmonic lattice part of the hardware Hamiltonian.
//!
//! The lattice carries one displacement component per site (each Cartesian
//! component evolves independently for an isotropic solid) with springs of
//! strength λ_j between sites `j` steps apart along every axis. Boundaries are
//! periodic, which makes the coupling matrix circulant and the dynamics
//! exactly diagonal in Fourier space.

mod dispersion;
mod lightcone;
mod propagator;
mod weyl;

pub use dispersion::{
    coupling_matrix, dispersion, group_velocity, long_wavelength_speed, max_group_velocity,
    per_axis_diagonal_slope, GroupVelocity, NormalModes,
};
pub use lightcone::{measure_light_cone, Arrival, LightCone};
pub use propagator::{propagate, propagate_ode, symplectic_form, SymplecticPropagator};
pub use weyl::{
    c_omega_lambda, commutator_norm_from_phase, lr_bound_envelope, symplectic_phase,
    weyl_commutator_norm, LRBoundParams, WeylFunction,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{validate_springs, HardwareParams};

/// A periodic d-dimensional harmonic lattice with `l` sites per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub d: usize,
    /// Sites per axis.
    pub l: usize,
    /// Spring constants λ_1..λ_ν, kg/s².
    pub lambda: Vec<f64>,
    /// Site mass, kg.
    pub m: f64,
    /// Lattice spacing, m.
    pub a: f64,
}

impl LatticeSpec {
    pub fn new(d: usize, l: usize, lambda: Vec<f64>, m: f64, a: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidParams(format!(
                "dimension {d} not in {{1, 2, 3}}"
            )));
        }
        if lambda.is_empty() {
            return Err(Error::InvalidParams(
                "interaction range must be at least 1".into(),
            ));
        }
        validate_springs(&lambda)?;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParams("nonpositive mass".into()));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParams("nonpositive lattice spacing".into()));
        }
        if l < 2 * lambda.len() + 2 {
            return Err(Error::InvalidParams(format!(
                "L too small for range: L = {l} < 2*nu + 2 = {}",
                2 * lambda.len() + 2
            )));
        }
        Ok(LatticeSpec { d, l, lambda, m, a })
    }

    /// Lattice with the couplings, mass, spacing and dimension of `params`.
    pub fn from_params(params: &HardwareParams, l: usize) -> Result<Self> {
        let p = params.clone().validate()?;
        LatticeSpec::new(p.d, l, p.lambda, p.m, p.a)
    }

    pub fn nu(&self) -> usize {
        self.lambda.len()
    }

    pub fn n_sites(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    pub fn spring_sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Row-major site index, axis 0 most significant.
    pub fn site_index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.d);
        coords.iter().fold(0, |acc, &x| acc * self.l + x % self.l)
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for slot in out.iter_mut().rev() {
            *slot = index % self.l;
            index /= self.l;
        }
        out
    }

    /// Site `r` steps from the origin along axis 0.
    pub fn axis_site(&self, r: usize) -> usize {
        let mut coords = vec![0; self.d];
        coords[0] = r % self.l;
        self.site_index(&coords)
    }

    /// Index of the periodic displacement `x - y`.
    pub(crate) fn displacement(&self, x: usize, y: usize) -> usize {
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut stride = 1;
        for _ in 0..self.d {
            let dx = (x % self.l + self.l - y % self.l) % self.l;
            out += dx * stride;
            stride *= self.l;
            x /= self.l;
            y /= self.l;
        }
        out
    }

    /// Largest distance usable without periodic wrap-around contamination.
    pub fn max_clean_distance(&self) -> usize {
        (self.l / 2).saturating_sub(self.nu())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_invariants() {
        assert!(LatticeSpec::new(1, 4, vec![1.0], 1.0, 1.0).is_ok());
        let err = LatticeSpec::new(1, 4, vec![1.0, 1.0], 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("L too small for range"));
        assert!(LatticeSpec::new(4, 8, vec![1.0], 1.0, 1.0).is_err());
        assert!(LatticeSpec::new(1, 8, vec![0.0], 1.0, 1.0).is_err());
        assert!(LatticeSpec::new(1, 8, vec![1.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let spec = LatticeSpec::new(3, 5, vec![1.0], 1.0, 1.0).unwrap();
        for i in 0..spec.n_sites() {
            assert_eq!(spec.site_index(&spec.coords(i)), i);
        }
        assert_eq!(spec.axis_site(2), 50);
        // (1,0,0) - (4,0,0) wraps to (2,0,0)
        assert_eq!(spec.displacement(25, 100), 2 * 25);
        assert_eq!(spec.displacement(7, 7), 0);
    }
}
