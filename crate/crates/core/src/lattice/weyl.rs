use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagator::{propagate, SymplecticPropagator};
use super::LatticeSpec;
use crate::error::{Error, Result};

/// Finite-support phase-space function defining the Weyl operator
/// W(f) = exp(i Σ_n [Re f(n) q_n + Im f(n) p_n]).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeylFunction {
    amplitudes: BTreeMap<usize, Complex64>,
}

impl WeylFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single-site function.
    pub fn site(site: usize, amplitude: Complex64) -> Self {
        let mut f = Self::new();
        f.set(site, amplitude);
        f
    }

    pub fn set(&mut self, site: usize, amplitude: Complex64) {
        assert!(amplitude.re.is_finite() && amplitude.im.is_finite());
        if amplitude == Complex64::default() {
            self.amplitudes.remove(&site);
        } else {
            self.amplitudes.insert(site, amplitude);
        }
    }

    pub fn get(&self, site: usize) -> Complex64 {
        self.amplitudes.get(&site).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes.iter().map(|(k, v)| (*k, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.amplitudes.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Dense phase-space vector (Re f, Im f) for a lattice of `n_sites`.
    pub fn to_phase_space(&self, n_sites: usize) -> Vec<f64> {
        let mut v = vec![0.0; 2 * n_sites];
        for (site, amp) in self.iter() {
            v[site] = amp.re;
            v[n_sites + site] = amp.im;
        }
        v
    }

    fn check_support(&self, n_sites: usize) -> Result<()> {
        match self.amplitudes.keys().next_back() {
            Some(&s) if s >= n_sites => Err(Error::InvalidParams(format!(
                "site {s} outside lattice of {n_sites} sites"
            ))),
            _ => Ok(()),
        }
    }
}

impl FromIterator<(usize, Complex64)> for WeylFunction {
    fn from_iter<I: IntoIterator<Item = (usize, Complex64)>>(iter: I) -> Self {
        let mut f = WeylFunction::new();
        for (site, amp) in iter {
            f.set(site, amp);
        }
        f
    }
}

/// Static symplectic pairing σ(f, g) = Σ_n [Re f(n) Im g(n) − Im f(n) Re g(n)].
pub fn symplectic_phase(f: &WeylFunction, g: &WeylFunction) -> f64 {
    f.iter()
        .map(|(site, a)| {
            let b = g.get(site);
            a.re * b.im - a.im * b.re
        })
        .sum()
}

/// ‖[W(u), W(v)]‖ for Weyl operators whose phases satisfy W(u)W(v) = e^{iσ} W(v)W(u).
pub fn commutator_norm_from_phase(sigma: f64) -> f64 {
    2.0 * (sigma / 2.0).sin().abs()
}

/// σ(f_t, g) where f_t = S(t)ᵀ f is the Heisenberg-evolved phase vector.
/// Only entries of S touching the two supports are read.
pub(crate) fn evolved_phase(
    prop: &SymplecticPropagator,
    f: &WeylFunction,
    g: &WeylFunction,
) -> f64 {
    let n = prop.n_sites();
    let mut sigma = 0.0;
    for (y, gy) in g.iter() {
        let (mut ftq, mut ftp) = (0.0, 0.0);
        for (x, fx) in f.iter() {
            ftq += prop.entry(x, y) * fx.re + prop.entry(n + x, y) * fx.im;
            ftp += prop.entry(x, n + y) * fx.re + prop.entry(n + x, n + y) * fx.im;
        }
        sigma += ftq * gy.im - ftp * gy.re;
    }
    sigma
}

/// ‖[τ_t(W(f)), W(g)]‖ = 2|sin(σ(f_t, g)/2)|, exact for harmonic dynamics.
pub fn weyl_commutator_norm(
    spec: &LatticeSpec,
    f: &WeylFunction,
    g: &WeylFunction,
    t: f64,
) -> Result<f64> {
    let n = spec.n_sites();
    f.check_support(n)?;
    g.check_support(n)?;
    if t == 0.0 {
        return Ok(commutator_norm_from_phase(symplectic_phase(f, g)));
    }
    let prop = propagate(spec, t)?;
    Ok(commutator_norm_from_phase(evolved_phase(&prop, f, g)))
}

/// Prefactor and decay rate of the Lieb–Robinson envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LRBoundParams {
    pub c: f64,
    pub mu: f64,
}

impl LRBoundParams {
    pub fn new(c: f64, mu: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams(
                "nonpositive envelope prefactor".into(),
            ));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParams("nonpositive decay rate".into()));
        }
        Ok(LRBoundParams { c, mu })
    }
}

/// c_{ω,λ} = √(d Σ λ_j / m).
pub fn c_omega_lambda(spec: &LatticeSpec) -> f64 {
    (spec.d as f64 * spec.spring_sum() / spec.m).sqrt()
}

/// C·exp(−μ m [dist − c_{ω,λ} max(2/μ, e^{μ/2+1}) |t|]) for unit single-site probes.
pub fn lr_bound_envelope(spec: &LatticeSpec, bp: LRBoundParams, dist: f64, t: f64) -> f64 {
    let speed = c_omega_lambda(spec) * (2.0 / bp.mu).max((bp.mu / 2.0 + 1.0).exp());
    bp.c * (-bp.mu * spec.m * (dist - speed * t.abs())).exp()
}
