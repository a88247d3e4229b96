//! Runtime property suites behind the `verify` subcommand.
//!
//! Each suite checks the invariants of one module with fixed seeds, so two
//! runs give identical verdicts.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{coarse_grain, fixed_point_solve, lr_velocity, qft_velocity, qram_max_qubits};
use crate::gates::{
    bs_unitary, cswap_composite, cz_unitary, fredkin, gauge_equivalent, swap_matrix, GateSet,
    GateSpec, GateTimes,
};
use crate::lattice::{
    commutator_norm_from_phase, coupling_matrix, dispersion, lr_bound_envelope,
    per_axis_diagonal_slope, propagate, propagate_ode, symplectic_form, weyl_commutator_norm,
    LRBoundParams, LatticeSpec, NormalModes, WeylFunction,
};
use crate::params::{tau0, Conventions, HardwareParams, LogBase, VelocitySource};
use crate::qram::{
    schedule_initialization, schedule_query, total_time, verify_retrieval, ClassicalDatabase,
};

/// Deliberate faults for exercising the harness itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    /// Scale the dispersion relation by 1.01 inside its suite.
    pub corrupt_dispersion: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// First failure, empty when passed.
    pub message: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name)
            .collect()
    }
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub const SUITES: [&str; 8] = [
    "params",
    "bounds",
    "lattice.dispersion",
    "lattice.propagator",
    "lattice.causality",
    "gates",
    "qram.schedule",
    "qram.retrieval",
];

/// Runs every suite.
pub fn run_verify(faults: FaultInjection) -> VerifyReport {
    let suites = SUITES
        .iter()
        .map(|&name| {
            let start = Instant::now();
            let outcome = std::panic::catch_unwind(|| run_suite(name, faults))
                .unwrap_or_else(|_| Err("suite panicked".into()));
            SuiteResult {
                name,
                passed: outcome.is_ok(),
                message: outcome.err().unwrap_or_default(),
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    VerifyReport { suites }
}

fn run_suite(name: &str, faults: FaultInjection) -> Check {
    match name {
        "params" => params_suite(),
        "bounds" => bounds_suite(),
        "lattice.dispersion" => dispersion_suite(faults),
        "lattice.propagator" => propagator_suite(),
        "lattice.causality" => causality_suite(),
        "gates" => gates_suite(),
        "qram.schedule" => schedule_suite(),
        "qram.retrieval" => retrieval_suite(),
        other => Err(format!("unknown suite {other}")),
    }
}

fn params_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let nu = rng.gen_range(1..4);
        let p = HardwareParams {
            a: 10f64.powf(rng.gen_range(-7.0..-2.0)),
            g1: rng.gen_range(1.0..1e4),
            g2: rng.gen_range(1.0..1e4),
            lambda: (0..nu).map(|_| rng.gen_range(0.1..3.0)).collect(),
            nu,
            d: rng.gen_range(1..4),
            ..HardwareParams::default()
        };
        let once = lift(p.clone().validate())?;
        let twice = lift(once.clone().validate())?;
        ensure(once == twice && once == p, || {
            "validate is not idempotent".into()
        })?;
        let t = lift(tau0(p.g1, p.g2))?;
        ensure(t == lift(tau0(p.g2, p.g1))?, || {
            "tau0 is not symmetric".into()
        })?;
        ensure(lift(tau0(p.g1 * 1.1, p.g2))? < t, || {
            "tau0 is not decreasing".into()
        })?;
    }
    Ok(())
}

fn bounds_suite() -> Check {
    for lambda in [vec![1.0], vec![0.5, 2.0], vec![1.0, 0.2, 0.1]] {
        let at = |d: usize, a: f64| HardwareParams {
            nu: lambda.len(),
            lambda: lambda.clone(),
            m: 1.7,
            d,
            a,
            ..HardwareParams::default()
        };
        let lr1 = lift(lr_velocity(&at(1, 1e-6)))?.lattice_units;
        let q1 = lift(qft_velocity(
            lift(coarse_grain(&at(1, 1.0)))?,
            at(1, 1.0).density(),
        ))?;
        for d in 1..=3 {
            let s = (d as f64).sqrt();
            let lr = lift(lr_velocity(&at(d, 1e-6)))?.lattice_units;
            ensure((lr / lr1 / s - 1.0).abs() < 1e-12, || {
                format!("lr sqrt(d) scaling, d={d}")
            })?;
            let p = at(d, 1.0);
            let q = lift(qft_velocity(lift(coarse_grain(&p))?, p.density()))?;
            ensure((q / q1 / s - 1.0).abs() < 1e-12, || {
                format!("qft sqrt(d) scaling, d={d}")
            })?;
            let spec = lift(LatticeSpec::new(
                d,
                2 * lambda.len() + 2,
                lambda.clone(),
                p.m,
                1.0,
            ))?;
            let slope = per_axis_diagonal_slope(&spec);
            ensure((q / slope - 1.0).abs() < 1e-9, || {
                format!("continuum speed {q} != dispersion slope {slope}, d={d}")
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let r = 10f64.powf(rng.gen_range(1.0..14.0));
        let p = rng.gen_range(0..4);
        let base = if rng.gen() {
            LogBase::Natural
        } else {
            LogBase::Two
        };
        let n = lift(fixed_point_solve(r, p, base))?;
        let resid = (n - r * base.log(n).powi(p as i32)).abs() / n;
        ensure(resid < 1e-10, || {
            format!("solver residual {resid} at R={r}, p={p}")
        })?;
    }
    let grid = [1e2, 1e3, 6e3];
    let mut last = 0.0;
    for v in grid {
        let conv = Conventions::new(LogBase::Natural, 2, VelocitySource::Explicit(v));
        let r = lift(qram_max_qubits(&HardwareParams::default(), conv))?;
        ensure(r.max_qubits_total >= last, || {
            "bound not monotone in velocity".into()
        })?;
        ensure(r.velocity_used <= r.inputs_digest.c_max, || {
            "velocity cap violated".into()
        })?;
        last = r.max_qubits_total;
    }
    Ok(())
}

fn dispersion_suite(faults: FaultInjection) -> Check {
    let factor = if faults.corrupt_dispersion { 1.01 } else { 1.0 };
    for spec in [
        LatticeSpec::new(1, 16, vec![1.0], 1.0, 1.0),
        LatticeSpec::new(1, 32, vec![1.0, 0.5, 0.25], 2.0, 1.0),
        LatticeSpec::new(2, 8, vec![1.0, 0.3], 1.0, 1.0),
    ] {
        let spec = lift(spec)?;
        let eig = coupling_matrix(&spec).symmetric_eigen();
        let mut from_matrix: Vec<f64> = eig.eigenvalues.iter().map(|e| e / spec.m).collect();
        let modes = NormalModes::new(&spec);
        let mut closed: Vec<f64> = modes
            .wavevectors
            .iter()
            .map(|k| (factor * dispersion(&spec, k)).powi(2))
            .collect();
        from_matrix.sort_by(f64::total_cmp);
        closed.sort_by(f64::total_cmp);
        for (x, y) in from_matrix.iter().zip(&closed) {
            ensure((x - y).abs() < 1e-9, || format!("ω² mismatch {x} vs {y}"))?;
        }
        ensure(modes.frequencies[0] == 0.0, || "missing zero mode".into())?;
    }
    Ok(())
}

fn propagator_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let d = rng.gen_range(1..3);
        let nu = rng.gen_range(1..3);
        let lambda: Vec<f64> = (0..nu).map(|_| rng.gen_range(0.2..2.0)).collect();
        let l = if d == 1 { 12 } else { 6 };
        let spec = lift(LatticeSpec::new(d, l, lambda, rng.gen_range(0.5..2.0), 1.0))?;
        let t = rng.gen_range(0.1..3.0);
        let s = lift(propagate(&spec, t))?;
        let dim = s.dim();
        for _ in 0..100 {
            let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let err = (symplectic_form(&u, &v) - symplectic_form(&s.apply(&u), &s.apply(&v))).abs();
            ensure(err < 1e-10, || format!("symplectic form changed by {err}"))?;
        }
        let s2 = lift(propagate(&spec, 0.7))?;
        let sum = lift(propagate(&spec, t + 0.7))?;
        let err = (s.compose(&s2).to_dense() - sum.to_dense()).amax();
        ensure(err < 1e-9, || format!("group law violated by {err}"))?;
    }
    let spec = lift(LatticeSpec::new(1, 8, vec![1.0], 1.0, 1.0))?;
    let omega_max = NormalModes::new(&spec).omega_max();
    let t = 10.0 / omega_max;
    let ode = lift(propagate_ode(&spec, t, 1e-4))?;
    let err = (lift(propagate(&spec, t))?.to_dense() - ode.to_dense()).amax();
    ensure(err < 1e-6, || format!("spectral vs ODE differ by {err}"))
}

/// Commutator tail outside the Lieb–Robinson cone and envelope domination.
fn causality_suite() -> Check {
    for spec in [
        LatticeSpec::new(1, 160, vec![1.0], 1.0, 1.0),
        LatticeSpec::new(1, 160, vec![1.0, 1.0], 1.0, 1.0),
        LatticeSpec::new(2, 40, vec![1.0], 1.0, 1.0),
    ] {
        let spec = lift(spec)?;
        let tail = causality_tail(&spec)?;
        ensure(tail < 1e-6, || {
            format!("commutator {tail:e} outside the cone")
        })?;
    }
    let spec = lift(LatticeSpec::new(1, 120, vec![1.0], 1.0, 1.0))?;
    envelope_domination(&spec)
}

/// Largest commutator norm over (r, t) with r − v_LR t ≥ 5, r ≤ L/2 − ν.
pub fn causality_tail(spec: &LatticeSpec) -> std::result::Result<f64, String> {
    let v = 4.0 * (spec.d as f64 * spec.spring_sum() / spec.m).sqrt();
    let r_max = spec.max_clean_distance();
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let t = (r_max as f64 - 5.0) / v * i as f64 / 40.0;
        let s = lift(propagate(spec, t))?;
        for r in 1..=r_max {
            if r as f64 - v * t < 5.0 {
                continue;
            }
            // for f = 1 at the origin and g = i at r, σ(f_t, g) = S[q_0, q_r]
            let sigma = s.entry(0, spec.axis_site(r));
            worst = worst.max(commutator_norm_from_phase(sigma));
        }
    }
    Ok(worst)
}

fn envelope_domination(spec: &LatticeSpec) -> Check {
    let r_max = 30;
    let times: Vec<f64> = (1..=60).map(|i| 0.25 * i as f64).collect();
    let f = WeylFunction::site(0, Complex64::new(1.0, 0.0));
    let measured = |r: usize, t: f64| {
        let g = WeylFunction::site(spec.axis_site(r), Complex64::new(0.0, 1.0));
        lift(weyl_commutator_norm(spec, &f, &g, t))
    };
    let unit = lift(LRBoundParams::new(1.0, 1.0))?;
    let mut c: f64 = 0.0;
    for &t in &times {
        c = c.max(measured(1, t)? / lr_bound_envelope(spec, unit, 1.0, t));
    }
    let bp = lift(LRBoundParams::new(c, 1.0))?;
    for &t in &times {
        let s = lift(propagate(spec, t))?;
        for r in 1..=r_max {
            let value = commutator_norm_from_phase(s.entry(0, spec.axis_site(r)));
            let bound = lr_bound_envelope(spec, bp, r as f64, t);
            ensure(value <= bound * (1.0 + 1e-9), || {
                format!("commutator {value:e} above envelope {bound:e} at r={r}, t={t}")
            })?;
        }
    }
    Ok(())
}

fn gates_suite() -> Check {
    let g = 2000.0 * std::f64::consts::PI;
    let times = lift(GateTimes::new(g, 0.7 * g))?;
    for i in 0..20 {
        let t = i as f64 * 0.173 / g;
        let u = lift(bs_unitary(g, t, (2, 2)))?;
        ensure(u.unitarity_error() < 1e-10, || "BS not unitary".into())?;
        let p = u.entry(1, 2).norm_sqr();
        ensure((p - (g * t).sin().powi(2)).abs() < 1e-9, || {
            format!("BS transfer {p} at t={t}")
        })?;
    }
    let a = lift(bs_unitary(g, 0.3 / g, (2, 2)))?;
    let b = lift(bs_unitary(g, 0.5 / g, (2, 2)))?;
    let ab = lift(bs_unitary(g, 0.8 / g, (2, 2)))?;
    ensure((a.mul(&b).matrix() - ab.matrix()).camax() < 1e-10, || {
        "BS durations do not add".into()
    })?;
    let cz = lift(cz_unitary(0.7 * g, times.t_cz(), (2, 2)))?;
    ensure((cz.entry(3, 3) + 1.0).norm() < 1e-10, || {
        "CZ phase on |11⟩".into()
    })?;
    let u = lift(cswap_composite(g, 0.7 * g, [2, 2, 2]))?;
    ensure(u.unitarity_error() < 1e-10, || "CSWAP not unitary".into())?;
    let full = lift(gauge_equivalent(u.matrix(), fredkin().matrix()))?;
    ensure(full.equivalent, || {
        format!("CSWAP fidelity {}", full.fidelity)
    })?;
    let zero = lift(gauge_equivalent(
        &u.block(&[0, 1, 2, 3]),
        &nalgebra::DMatrix::identity(4, 4),
    ))?;
    let one = lift(gauge_equivalent(
        &u.block(&[4, 5, 6, 7]),
        swap_matrix().matrix(),
    ))?;
    ensure(zero.equivalent && one.equivalent, || {
        "CSWAP control blocks".into()
    })?;
    ensure(
        GateSpec::ControlledSwap {
            control: 0,
            targets: (1, 2),
        }
        .duration(&times)
            == 2.0 * times.t_bs() + times.t_cz(),
        || "CSWAP duration".into(),
    )
}

fn schedule_suite() -> Check {
    let g = std::f64::consts::PI * 1e3;
    let times = lift(GateTimes::new(g, g))?;
    let scaled = |n: usize| -> std::result::Result<f64, String> {
        let init = lift(schedule_initialization(n))?;
        let query = lift(schedule_query(n))?;
        Ok(lift(total_time(&init, &query, g, g))? / (times.tau0() * (n * n) as f64))
    };
    for n in 1..=20 {
        let init = lift(schedule_initialization(n))?;
        ensure(
            init.count("CSWAP") == n * (n - 1) / 2 && init.count("SWAP") == n,
            || format!("gate counts at n={n}"),
        )?;
    }
    for n in 10..20 {
        let ratio = scaled(n + 1)? / scaled(n)?;
        ensure((ratio - 1.0).abs() < 0.05, || {
            format!("depth law ratio {ratio} at n={n}")
        })?;
    }
    Ok(())
}

fn retrieval_suite() -> Check {
    let gates = lift(GateSet::new(
        std::f64::consts::PI * 1e3,
        std::f64::consts::PI * 1e3,
    ))?;
    for (n_leaves, seed) in [(2, 1), (4, 2), (8, 42)] {
        let db = lift(ClassicalDatabase::random(n_leaves, seed))?;
        let report = lift(verify_retrieval(&db, &gates, seed))?;
        ensure(report.passed(), || {
            format!(
                "N={n_leaves}: mismatches {:?}, min fidelity {}",
                report.mismatches, report.min_fidelity
            )
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes_and_is_deterministic() {
        let a = run_verify(FaultInjection::default());
        assert!(a.passed(), "{:?}", a.suites);
        let b = run_verify(FaultInjection::default());
        let verdicts = |r: &VerifyReport| {
            r.suites
                .iter()
                .map(|s| (s.name, s.passed))
                .collect::<Vec<_>>()
        };
        assert_eq!(verdicts(&a), verdicts(&b));
    }

    #[test]
    fn corrupted_dispersion_is_caught() {
        let r = run_verify(FaultInjection {
            corrupt_dispersion: true,
        });
        assert_eq!(r.failed(), vec!["lattice.dispersion"]);
    }
}
