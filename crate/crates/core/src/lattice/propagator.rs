use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::dispersion::{coupling_matrix, NormalModes};
use super::LatticeSpec;
use crate::error::{Error, Result};

/// σ(u, v) = u_q·v_p − u_p·v_q for phase-space vectors laid out as (q, p).
pub fn symplectic_form(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len());
    assert!(u.len().is_multiple_of(2));
    let n = u.len() / 2;
    (0..n).map(|i| u[i] * v[n + i] - u[n + i] * v[i]).sum()
}

/// Heisenberg-picture time evolution S(t) of one displacement component.
///
/// Acts on phase-space vectors (q_1..q_n, p_1..p_n): the evolved operators
/// satisfy x(t) = S(t) x(0).
#[derive(Debug, Clone)]
pub struct SymplecticPropagator {
    time: f64,
    n_sites: usize,
    map: PhaseMap,
}

#[derive(Debug, Clone)]
enum PhaseMap {
    /// Translation-invariant blocks stored as kernels over displacements.
    Circulant {
        spec: LatticeSpec,
        qq: Vec<f64>,
        qp: Vec<f64>,
        pq: Vec<f64>,
        pp: Vec<f64>,
    },
    Dense(DMatrix<f64>),
}

impl SymplecticPropagator {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        2 * self.n_sites
    }

    /// Matrix element S[row, col] of the 2n × 2n map.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        match &self.map {
            PhaseMap::Dense(m) => m[(row, col)],
            PhaseMap::Circulant {
                spec,
                qq,
                qp,
                pq,
                pp,
            } => {
                let n = self.n_sites;
                let (rb, r) = (row / n, row % n);
                let (cb, c) = (col / n, col % n);
                let disp = spec.displacement(r, c);
                match (rb, cb) {
                    (0, 0) => qq[disp],
                    (0, _) => qp[disp],
                    (_, 0) => pq[disp],
                    _ => pp[disp],
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.map {
            PhaseMap::Dense(m) => m.clone(),
            PhaseMap::Circulant { .. } => {
                let dim = self.dim();
                DMatrix::from_fn(dim, dim, |r, c| self.entry(r, c))
            }
        }
    }

    /// S u.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.dim());
        match &self.map {
            PhaseMap::Dense(m) => (m * nalgebra::DVector::from_column_slice(u))
                .as_slice()
                .to_vec(),
            PhaseMap::Circulant { .. } => (0..self.dim())
                .map(|r| {
                    u.iter()
                        .enumerate()
                        .filter(|(_, x)| **x != 0.0)
                        .map(|(c, x)| self.entry(r, c) * x)
                        .sum()
                })
                .collect(),
        }
    }

    /// Sᵀ u, the map acting on coefficient vectors of linear observables.
    pub fn apply_transpose(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.dim());
        (0..self.dim())
            .map(|c| {
                u.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(r, x)| self.entry(r, c) * x)
                    .sum()
            })
            .collect()
    }

    /// The composite map `self ∘ other`, i.e. S(t) S(s), with time t + s.
    pub fn compose(&self, other: &SymplecticPropagator) -> SymplecticPropagator {
        assert_eq!(self.n_sites, other.n_sites);
        SymplecticPropagator {
            time: self.time + other.time,
            n_sites: self.n_sites,
            map: PhaseMap::Dense(self.to_dense() * other.to_dense()),
        }
    }
}

/// Builds the displacement kernels of S(t) with FFTs; reusable across times.
pub(crate) struct KernelBuilder {
    spec: LatticeSpec,
    modes: NormalModes,
    fft: Arc<dyn Fft<f64>>,
}

impl KernelBuilder {
    pub(crate) fn new(spec: &LatticeSpec) -> Self {
        let mut planner = FftPlanner::new();
        KernelBuilder {
            spec: spec.clone(),
            modes: NormalModes::new(spec),
            fft: planner.plan_fft_inverse(spec.l),
        }
    }

    pub(crate) fn modes(&self) -> &NormalModes {
        &self.modes
    }

    /// (1/n) Σ_k h(k) e^{ik·Δ} for every displacement Δ; two real, even
    /// spectra are transformed at once as real and imaginary parts.
    fn inverse_pair(&self, re: &[f64], im: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.spec.n_sites();
        let l = self.spec.l;
        let mut data: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(*a, *b))
            .collect();
        let mut line = vec![Complex64::default(); l];
        let mut stride = 1;
        for _ in 0..self.spec.d {
            for start in 0..n {
                if (start / stride) % l != 0 {
                    continue;
                }
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                self.fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
            stride *= l;
        }
        let scale = 1.0 / n as f64;
        (
            data.iter().map(|c| c.re * scale).collect(),
            data.iter().map(|c| c.im * scale).collect(),
        )
    }

    /// The position-position block kernel alone, Gqq(Δ, t).
    pub(crate) fn qq_kernel(&self, t: f64) -> Vec<f64> {
        let cos: Vec<f64> = self
            .modes
            .frequencies
            .iter()
            .map(|w| (w * t).cos())
            .collect();
        self.inverse_pair(&cos, &vec![0.0; cos.len()]).0
    }

    pub(crate) fn propagator(&self, t: f64) -> SymplecticPropagator {
        let m = self.spec.m;
        let cos: Vec<f64> = self
            .modes
            .frequencies
            .iter()
            .map(|w| (w * t).cos())
            .collect();
        let qp: Vec<f64> = self
            .modes
            .frequencies
            .iter()
            .map(|&w| {
                if w == 0.0 {
                    t / m
                } else {
                    (w * t).sin() / (m * w)
                }
            })
            .collect();
        let pq: Vec<f64> = self
            .modes
            .frequencies
            .iter()
            .map(|&w| -m * w * (w * t).sin())
            .collect();
        let (qq, _) = self.inverse_pair(&cos, &vec![0.0; cos.len()]);
        let (qp, pq) = self.inverse_pair(&qp, &pq);
        SymplecticPropagator {
            time: t,
            n_sites: self.spec.n_sites(),
            map: PhaseMap::Circulant {
                spec: self.spec.clone(),
                pp: qq.clone(),
                qq,
                qp,
                pq,
            },
        }
    }
}

/// Exact S(t) from the normal-mode solution.
///
/// Each mode evolves as q_k(t) = cos(ωt) q_k + sin(ωt)/(mω) p_k and
/// p_k(t) = −mω sin(ωt) q_k + cos(ωt) p_k; the zero mode drifts freely,
/// q_k(t) = q_k + (t/m) p_k.
pub fn propagate(spec: &LatticeSpec, t: f64) -> Result<SymplecticPropagator> {
    if !t.is_finite() {
        return Err(Error::InvalidParams("non-finite time".into()));
    }
    Ok(KernelBuilder::new(spec).propagator(t))
}

/// Independent RK4 integration of q̇ = p/m, ṗ = −Kq on the full 2n × 2n map.
///
/// Requires `dt ≤ 0.01/ω_max`; the actual step is `t / ceil(|t|/dt)`.
pub fn propagate_ode(spec: &LatticeSpec, t: f64, dt: f64) -> Result<SymplecticPropagator> {
    let omega_max = NormalModes::new(spec).omega_max();
    let limit = 0.01 / omega_max;
    if dt.is_nan() || dt <= 0.0 || dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let n = spec.n_sites();
    let k = coupling_matrix(spec);
    let inv_m = 1.0 / spec.m;
    let deriv = |s: &DMatrix<f64>| -> DMatrix<f64> {
        let q = s.rows(0, n);
        let p = s.rows(n, n);
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.rows_mut(0, n).copy_from(&(p * inv_m));
        out.rows_mut(n, n).copy_from(&(-(&k * q)));
        out
    };

    let mut state = DMatrix::<f64>::identity(2 * n, 2 * n);
    let steps = (t.abs() / dt).ceil() as usize;
    if steps > 0 {
        let h = t / steps as f64;
        for _ in 0..steps {
            let k1 = deriv(&state);
            let k2 = deriv(&(&state + &k1 * (h / 2.0)));
            let k3 = deriv(&(&state + &k2 * (h / 2.0)));
            let k4 = deriv(&(&state + &k3 * h));
            state += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
    }
    Ok(SymplecticPropagator {
        time: t,
        n_sites: n,
        map: PhaseMap::Dense(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).abs().max()
    }

    #[test]
    fn zero_time_is_identity() {
        let spec = LatticeSpec::new(2, 5, vec![1.0], 1.3, 1.0).unwrap();
        let s = propagate(&spec, 0.0).unwrap().to_dense();
        assert!(max_abs_diff(&s, &DMatrix::identity(50, 50)) < 1e-14);
        let s = propagate_ode(&spec, 0.0, 1e-3).unwrap().to_dense();
        assert_eq!(s, DMatrix::identity(50, 50));
    }

    #[test]
    fn short_time_preserves_symplectic_form_and_matches_ode() {
        let spec = LatticeSpec::new(1, 4, vec![1.0], 1.0, 1.0).unwrap();
        let s = propagate(&spec, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let before = symplectic_form(&u, &v);
            let after = symplectic_form(&s.apply(&u), &s.apply(&v));
            assert!((before - after).abs() < 1e-10);
        }
        let ode = propagate_ode(&spec, 0.1, 1e-4).unwrap();
        assert!(max_abs_diff(&s.to_dense(), &ode.to_dense()) < 1e-6);
    }

    #[test]
    fn spectral_matches_ode_on_chain_of_eight() {
        let spec = LatticeSpec::new(1, 8, vec![1.0], 1.0, 1.0).unwrap();
        let s = propagate(&spec, 1.0).unwrap();
        let ode = propagate_ode(&spec, 1.0, 1e-4).unwrap();
        assert!(max_abs_diff(&s.to_dense(), &ode.to_dense()) < 1e-6);
    }

    #[test]
    fn step_too_large_is_rejected() {
        let spec = LatticeSpec::new(1, 8, vec![1.0], 1.0, 1.0).unwrap();
        let omega_max = NormalModes::new(&spec).omega_max();
        let err = propagate_ode(&spec, 1.0, 1.0 / omega_max).unwrap_err();
        assert!(err.to_string().contains("step too large"));
    }

    #[test]
    fn time_reversal_and_group_law() {
        let spec = LatticeSpec::new(1, 6, vec![1.0, 0.4], 0.8, 1.0).unwrap();
        let fwd = propagate(&spec, 0.7).unwrap();
        let back = propagate(&spec, -0.7).unwrap();
        let id = back.compose(&fwd).to_dense();
        assert!(max_abs_diff(&id, &DMatrix::identity(12, 12)) < 1e-9);

        let s = propagate(&spec, 0.3).unwrap();
        let ts = propagate(&spec, 1.0).unwrap();
        assert!(max_abs_diff(&fwd.compose(&s).to_dense(), &ts.to_dense()) < 1e-9);
    }

    #[test]
    fn transpose_is_consistent_with_dense() {
        let spec = LatticeSpec::new(2, 4, vec![1.0], 1.0, 1.0).unwrap();
        let s = propagate(&spec, 0.9).unwrap();
        let dense = s.to_dense();
        let u: Vec<f64> = (0..32).map(|i| (i as f64 * 0.37).sin()).collect();
        let direct = dense.transpose() * nalgebra::DVector::from_column_slice(&u);
        let fast = s.apply_transpose(&u);
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn spec_strategy() -> impl Strategy<Value = LatticeSpec> {
        (
            1usize..=2,
            prop::collection::vec(0.1f64..3.0, 1..=2),
            0.3f64..3.0,
        )
            .prop_map(|(d, lambda, m)| {
                let l = if d == 1 { 10 } else { 6 };
                LatticeSpec::new(d, l, lambda, m, 1.0).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn preserves_symplectic_form(
            spec in spec_strategy(),
            t in 0.0f64..6.0,
            seed in prop::collection::vec(-1.0f64..1.0, 144),
        ) {
            let s = propagate(&spec, t).unwrap();
            let dim = s.dim();
            let (u, v) = (&seed[..dim], &seed[dim..2 * dim]);
            let before = symplectic_form(u, v);
            let after = symplectic_form(&s.apply(u), &s.apply(v));
            prop_assert!((before - after).abs() < 1e-10);
        }

        #[test]
        fn group_law(spec in spec_strategy(), t in 0.0f64..4.0, s in 0.0f64..4.0) {
            let a = propagate(&spec, t).unwrap();
            let b = propagate(&spec, s).unwrap();
            let ab = propagate(&spec, t + s).unwrap();
            prop_assert!((a.compose(&b).to_dense() - ab.to_dense()).amax() < 1e-9);
        }
    }
}
