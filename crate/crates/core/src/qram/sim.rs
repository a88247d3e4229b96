use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::{schedule_initialization, schedule_query, Schedule};
use super::{classical_trace, ClassicalDatabase, QramLayout};
use crate::error::{Error, Result};
use crate::gates::{state_norm, GateSet, ModeRegister};

/// One row of a retrieval table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRow {
    pub address: usize,
    /// Bit given by the classical trace.
    pub expected: bool,
    /// Most likely bus value conditioned on this address.
    pub read: bool,
    /// Conditional probability of reading `expected`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    /// Final state over (address, routers, bus slots).
    pub state: Vec<Complex64>,
    pub norm: f64,
    /// |⟨ideal|out⟩|² with ideal Σ α_x |x⟩|D_x⟩ and every ancilla in |0⟩.
    pub fidelity: f64,
    /// Overlap with the initialized tree carrying |D_x⟩ on the bus, taken
    /// after the bus returns and before the address is uncomputed.
    pub pre_uncompute_fidelity: f64,
    /// Probability that routers and spare slots are back in |0⟩.
    pub ancilla_restored: f64,
    /// Rows for every address with nonzero amplitude.
    pub retrieval: Vec<RetrievalRow>,
}

fn run(
    state: Vec<Complex64>,
    schedule: &Schedule,
    layout: &QramLayout,
    register: &ModeRegister,
    db: &ClassicalDatabase,
    gates: &GateSet,
) -> Result<Vec<Complex64>> {
    let mut state = state;
    for cycle in &schedule.cycles {
        for gate in cycle.gates(layout, Some(db)) {
            state = if cycle.adjoint {
                gates.apply_adjoint(&state, &gate, register)?
            } else {
                gates.apply(&state, &gate, register)?
            };
        }
    }
    Ok(state)
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Query with couplings g₁, g₂ and the default splitter orientation.
pub fn simulate_query(
    db: &ClassicalDatabase,
    address_state: &[Complex64],
    g1: f64,
    g2: f64,
) -> Result<QueryResult> {
    simulate_query_with(db, address_state, &GateSet::new(g1, g2)?)
}

/// Runs initialization and query on the full register.
pub fn simulate_query_with(
    db: &ClassicalDatabase,
    address_state: &[Complex64],
    gates: &GateSet,
) -> Result<QueryResult> {
    let n = db.depth();
    let layout = QramLayout::new(n)?;
    let register = ModeRegister::qubits(layout.n_modes())?;
    if address_state.len() != db.len() {
        return Err(Error::DimensionMismatch {
            expected: db.len(),
            got: address_state.len(),
        });
    }
    let norm = state_norm(address_state);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Unnormalized(norm));
    }

    // address register is the leading n modes, so |x⟩|0…0⟩ sits at x·2^rest
    let rest = 1usize << (layout.n_modes() - n);
    let bus_bit = 1usize << (layout.n_modes() - 1 - layout.bus());
    let mut input = vec![Complex64::default(); register.dim()];
    let mut ideal = vec![Complex64::default(); register.dim()];
    for (x, &amp) in address_state.iter().enumerate() {
        input[x * rest] = amp;
        let data = if classical_trace(db, x) { bus_bit } else { 0 };
        ideal[x * rest + data] = amp;
    }

    let init = schedule_initialization(n)?;
    let query = schedule_query(n)?;
    let split = query.n_cycles() - init.n_cycles();
    let (before_uncompute, uncompute) = query.cycles.split_at(split);
    let before_uncompute = Schedule {
        depth: n,
        cycles: before_uncompute.to_vec(),
    };
    let uncompute = Schedule {
        depth: n,
        cycles: uncompute.to_vec(),
    };

    let loaded = run(input, &init, &layout, &register, db, gates)?;
    let mid = run(loaded, &before_uncompute, &layout, &register, db, gates)?;
    let ideal_mid = run(ideal.clone(), &init, &layout, &register, db, gates)?;
    let out = run(mid.clone(), &uncompute, &layout, &register, db, gates)?;

    let ancilla_mask = (rest - 1) & !bus_bit;
    let ancilla_restored = out
        .iter()
        .enumerate()
        .filter(|(i, _)| i & ancilla_mask == 0)
        .map(|(_, z)| z.norm_sqr())
        .sum();

    let retrieval = address_state
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 1e-24)
        .map(|(x, a)| {
            let expected = classical_trace(db, x);
            let block = &out[x * rest..(x + 1) * rest];
            let p1: f64 = block
                .iter()
                .enumerate()
                .filter(|(i, _)| i & bus_bit != 0)
                .map(|(_, z)| z.norm_sqr())
                .sum::<f64>()
                / a.norm_sqr();
            let read = p1 > 0.5;
            RetrievalRow {
                address: x,
                expected,
                read,
                fidelity: if expected { p1 } else { 1.0 - p1 },
            }
        })
        .collect();

    Ok(QueryResult {
        norm: state_norm(&out),
        fidelity: overlap(&ideal, &out),
        pre_uncompute_fidelity: overlap(&ideal_mid, &mid),
        ancilla_restored,
        retrieval,
        state: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalReport {
    pub database: String,
    /// One row per basis address.
    pub rows: Vec<RetrievalRow>,
    /// Fidelity of each random superposition query.
    pub superposition_fidelities: Vec<f64>,
    /// Smallest of all row and superposition fidelities, and of the
    /// ancilla-restoration probabilities.
    pub min_fidelity: f64,
    /// Basis addresses whose read bit disagrees with the classical trace.
    pub mismatches: Vec<usize>,
}

impl RetrievalReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.min_fidelity >= 1.0 - 1e-9
    }
}

fn random_address_state(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = state_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Every basis address plus 10 seeded random superpositions.
pub fn verify_retrieval(
    db: &ClassicalDatabase,
    gates: &GateSet,
    seed: u64,
) -> Result<RetrievalReport> {
    let n_addr = db.len();
    let basis: Vec<(RetrievalRow, f64)> = (0..n_addr)
        .into_par_iter()
        .map(|x| {
            let mut amp = vec![Complex64::default(); n_addr];
            amp[x] = Complex64::new(1.0, 0.0);
            let r = simulate_query_with(db, &amp, gates)?;
            Ok((r.retrieval[0], r.fidelity.min(r.ancilla_restored)))
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<Vec<Complex64>> = (0..10)
        .map(|_| random_address_state(n_addr, &mut rng))
        .collect();
    let superposition_fidelities: Vec<f64> = states
        .par_iter()
        .map(|s| {
            let r = simulate_query_with(db, s, gates)?;
            Ok(r.fidelity
                .min(r.pre_uncompute_fidelity)
                .min(r.ancilla_restored))
        })
        .collect::<Result<_>>()?;

    let mismatches = basis
        .iter()
        .filter(|(row, _)| row.read != row.expected)
        .map(|(row, _)| row.address)
        .collect();
    let min_fidelity = basis
        .iter()
        .flat_map(|(row, f)| [row.fidelity, *f])
        .chain(superposition_fidelities.iter().copied())
        .fold(1.0, f64::min);
    Ok(RetrievalReport {
        database: db.to_bitstring(),
        rows: basis.into_iter().map(|(row, _)| row).collect(),
        superposition_fidelities,
        min_fidelity,
        mismatches,
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn basis_queries_match_classical_trace(bits in prop::collection::vec(any::<bool>(), 4), x in 0usize..4) {
            let db = ClassicalDatabase::new(bits).unwrap();
            let mut amp = vec![Complex64::default(); 4];
            amp[x] = Complex64::new(1.0, 0.0);
            let r = simulate_query(&db, &amp, PI * 1e3, PI * 1e3).unwrap();
            prop_assert_eq!(r.retrieval[0].read, classical_trace(&db, x));
            prop_assert!(r.fidelity > 1.0 - 1e-9 && r.ancilla_restored > 1.0 - 1e-9);
        }

        #[test]
        fn query_is_linear(
            bits in prop::collection::vec(any::<bool>(), 4),
            re in prop::collection::vec(-1.0f64..1.0, 4),
            im in prop::collection::vec(-1.0f64..1.0, 4),
        ) {
            let db = ClassicalDatabase::new(bits).unwrap();
            let amp: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
            let n = state_norm(&amp);
            prop_assume!(n > 1e-3);
            let amp: Vec<Complex64> = amp.into_iter().map(|z| z / n).collect();
            let out = simulate_query(&db, &amp, PI * 1e3, PI * 1e3).unwrap().state;
            let mut sum = vec![Complex64::default(); out.len()];
            for (x, a) in amp.iter().enumerate() {
                let mut e = vec![Complex64::default(); 4];
                e[x] = Complex64::new(1.0, 0.0);
                let basis = simulate_query(&db, &e, PI * 1e3, PI * 1e3).unwrap().state;
                for (s, b) in sum.iter_mut().zip(basis) {
                    *s += a * b;
                }
            }
            let err = out.iter().zip(&sum).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-9);
        }
    }
}
