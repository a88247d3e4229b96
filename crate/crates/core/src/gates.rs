//! Gate-level layer: beam splitter, controlled phase and the composite
//! controlled-SWAP, acting on registers of truncated bosonic modes.
//!
//! Register layout is big-endian: mode 0 is the most significant tensor
//! factor of the state vector.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register dimension simulated as a dense state vector.
pub const STATE_VECTOR_CAP: usize = 1 << 14;

const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Ordered modes with their truncation dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeRegister {
    dims: Vec<usize>,
}

impl ModeRegister {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGate("register has no modes".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidGate(format!("mode truncation {d} < 2")));
        }
        let mut dim: usize = 1;
        for &d in &dims {
            dim = match dim.checked_mul(d) {
                Some(v) if v <= STATE_VECTOR_CAP => v,
                _ => {
                    let total = dims.iter().map(|&d| d as f64).product::<f64>();
                    return Err(Error::StateVectorCap {
                        dim: total.min(usize::MAX as f64) as usize,
                        cap: STATE_VECTOR_CAP,
                    });
                }
            };
        }
        Ok(ModeRegister { dims })
    }

    /// `n` two-level modes.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Index of the product basis state with the given occupations.
    pub fn basis_index(&self, occupations: &[usize]) -> usize {
        assert_eq!(occupations.len(), self.dims.len());
        occupations.iter().zip(&self.dims).fold(0, |acc, (&n, &d)| {
            assert!(n < d);
            acc * d + n
        })
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn basis_state(&self, occupations: &[usize]) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); self.dim()];
        v[self.basis_index(occupations)] = c(1.0, 0.0);
        v
    }
}

/// A dense unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: CMat,
}

impl Unitary {
    /// Accepts `matrix` if U†U = I to 1e-10 in the max-entry norm.
    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidGate("matrix is not square".into()));
        }
        let u = Unitary { matrix };
        let err = u.unitarity_error();
        if err.is_nan() || err > UNITARY_TOL {
            return Err(Error::InvalidGate(format!(
                "matrix is not unitary (error {err:e})"
            )));
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        Unitary {
            matrix: CMat::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// max |(U†U − I)_ij|.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - CMat::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        Unitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Unitary) -> Self {
        Unitary {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn kron(&self, other: &Unitary) -> Self {
        Unitary {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|k| self.matrix[(r, k)] * v[k]).sum())
            .collect()
    }

    /// Restriction to the span of the given basis indices.
    pub fn block(&self, indices: &[usize]) -> CMat {
        CMat::from_fn(indices.len(), indices.len(), |r, k| {
            self.matrix[(indices[r], indices[k])]
        })
    }
}

/// exp(−i t H) for Hermitian H via its eigendecomposition.
fn exp_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        h.nrows(),
        eig.eigenvalues
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * t)),
    ));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Truncated annihilation operator on `dim` levels.
fn annihilation(dim: usize) -> CMat {
    let mut a = CMat::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

fn positive(value: f64, what: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("nonpositive {what}")))
    }
}

/// exp(−i t g₁ (a†b + a b†)) on two modes of dimensions `dims`.
pub fn bs_unitary(g1: f64, t: f64, dims: (usize, usize)) -> Result<Unitary> {
    positive(g1, "coupling g1")?;
    check_dims(&[dims.0, dims.1])?;
    let a = annihilation(dims.0);
    let b = annihilation(dims.1);
    let h = (a.adjoint().kronecker(&b) + a.kronecker(&b.adjoint())) * c(g1, 0.0);
    Ok(Unitary {
        matrix: exp_hermitian(&h, t),
    })
}

/// exp(−i t g₂ n_a n_b).
pub fn cz_unitary(g2: f64, t: f64, dims: (usize, usize)) -> Result<Unitary> {
    positive(g2, "coupling g2")?;
    check_dims(&[dims.0, dims.1])?;
    let n = dims.0 * dims.1;
    let diag = (0..n).map(|i| {
        let (na, nb) = (i / dims.1, i % dims.1);
        Complex64::from_polar(1.0, -t * g2 * (na * nb) as f64)
    });
    Ok(Unitary {
        matrix: CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, diag)),
    })
}

fn check_dims(dims: &[usize]) -> Result<()> {
    match dims.iter().find(|&&d| d < 2) {
        Some(d) => Err(Error::InvalidGate(format!("mode truncation {d} < 2"))),
        None => Ok(()),
    }
}

/// Which splitter closes the controlled-SWAP interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondSplitter {
    /// BS†: swaps the targets iff the control is 1.
    #[default]
    Inverse,
    /// BS again: swaps the targets iff the control is 0.
    Same,
}

/// BS_{a,b}(t_bs)^{†|·} · CZ_{ctrl,a}(t_cz) · BS_{a,b}(t_bs) on (ctrl, a, b).
pub fn cswap_composite(g1: f64, g2: f64, dims: [usize; 3]) -> Result<Unitary> {
    cswap_composite_with(g1, g2, dims, SecondSplitter::Inverse)
}

pub fn cswap_composite_with(
    g1: f64,
    g2: f64,
    dims: [usize; 3],
    second: SecondSplitter,
) -> Result<Unitary> {
    let times = GateTimes::new(g1, g2)?;
    let [dc, da, db] = dims;
    let bs = Unitary::identity(dc).kron(&bs_unitary(g1, times.t_bs(), (da, db))?);
    let cz = cz_unitary(g2, times.t_cz(), (dc, da))?.kron(&Unitary::identity(db));
    let closing = match second {
        SecondSplitter::Inverse => bs.adjoint(),
        SecondSplitter::Same => bs.clone(),
    };
    Ok(closing.mul(&cz).mul(&bs))
}

/// Textbook controlled-SWAP on three qubits (control first).
pub fn fredkin() -> Unitary {
    let mut m = CMat::identity(8, 8);
    m[(5, 5)] = c(0.0, 0.0);
    m[(6, 6)] = c(0.0, 0.0);
    m[(5, 6)] = c(1.0, 0.0);
    m[(6, 5)] = c(1.0, 0.0);
    Unitary { matrix: m }
}

/// Two-qubit SWAP.
pub fn swap_matrix() -> Unitary {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    Unitary { matrix: m }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeComparison {
    pub equivalent: bool,
    pub fidelity: f64,
}

/// max over diagonal phase matrices D₁, D₂ of |Tr(D₁ U D₂ V†)| / dim.
///
/// Alternates the two phase alignments, at most 50 rounds or until the
/// fidelity stalls to within 1e-12.
pub fn gauge_equivalent(u: &CMat, v: &CMat) -> Result<GaugeComparison> {
    if u.shape() != v.shape() || !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: v.nrows(),
            got: u.nrows(),
        });
    }
    let n = u.nrows();
    // Tr(D₁ U D₂ V†) = Σ_ij d1_i d2_j U_ij conj(V_ij)
    let m = CMat::from_fn(n, n, |i, j| u[(i, j)] * v[(i, j)].conj());
    let unit = |z: Complex64| {
        if z.norm() > 0.0 {
            (z / z.norm()).conj()
        } else {
            c(1.0, 0.0)
        }
    };
    let mut d2 = vec![c(1.0, 0.0); n];
    let mut d1 = vec![c(1.0, 0.0); n];
    let mut fidelity = 0.0;
    for _ in 0..50 {
        for i in 0..n {
            d1[i] = unit((0..n).map(|j| m[(i, j)] * d2[j]).sum());
        }
        for j in 0..n {
            d2[j] = unit((0..n).map(|i| d1[i] * m[(i, j)]).sum());
        }
        let tr: Complex64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| d1[i] * d2[j] * m[(i, j)])
            .sum();
        let next = tr.norm() / n as f64;
        let stalled = (next - fidelity).abs() < 1e-12;
        fidelity = next;
        if stalled {
            break;
        }
    }
    let fidelity = fidelity.min(1.0);
    Ok(GaugeComparison {
        equivalent: fidelity >= 1.0 - 1e-9,
        fidelity,
    })
}

/// Gate durations derived from the two couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTimes {
    pub g1: f64,
    pub g2: f64,
}

impl GateTimes {
    pub fn new(g1: f64, g2: f64) -> Result<Self> {
        positive(g1, "coupling g1")?;
        positive(g2, "coupling g2")?;
        Ok(GateTimes { g1, g2 })
    }

    /// π / 2g₁, full excitation transfer.
    pub fn t_sw(&self) -> f64 {
        PI / (2.0 * self.g1)
    }

    /// π / 4g₁, balanced splitting.
    pub fn t_bs(&self) -> f64 {
        PI / (4.0 * self.g1)
    }

    /// π / g₂, conditional sign flip.
    pub fn t_cz(&self) -> f64 {
        PI / self.g2
    }

    pub fn t_cswap(&self) -> f64 {
        2.0 * self.t_bs() + self.t_cz()
    }

    pub fn tau0(&self) -> f64 {
        PI / self.g1 + PI / self.g2
    }
}

/// One gate on named modes of a register.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateSpec {
    BeamSplitter {
        targets: (usize, usize),
        duration: f64,
    },
    /// Beam splitter run for t_sw.
    Swap { targets: (usize, usize) },
    /// CZ run for t_cz.
    ControlledPhase { control: usize, target: usize },
    ControlledSwap {
        control: usize,
        targets: (usize, usize),
    },
    /// Balanced single-mode rotation, run for t_bs.
    Hadamard { target: usize },
    /// Phase (−1)^{data[c]} on the target's excited level, with c the
    /// control occupation; a CZ, a Z or nothing depending on the bits.
    DataCopy {
        control: usize,
        target: usize,
        data: [bool; 2],
    },
}

impl GateSpec {
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            GateSpec::BeamSplitter { targets, .. } | GateSpec::Swap { targets } => {
                vec![targets.0, targets.1]
            }
            GateSpec::ControlledPhase { control, target }
            | GateSpec::DataCopy {
                control, target, ..
            } => vec![control, target],
            GateSpec::ControlledSwap { control, targets } => vec![control, targets.0, targets.1],
            GateSpec::Hadamard { target } => vec![target],
        }
    }

    pub fn duration(&self, times: &GateTimes) -> f64 {
        match self {
            GateSpec::BeamSplitter { duration, .. } => *duration,
            GateSpec::Swap { .. } => times.t_sw(),
            GateSpec::ControlledPhase { .. } | GateSpec::DataCopy { .. } => times.t_cz(),
            GateSpec::ControlledSwap { .. } => times.t_cswap(),
            GateSpec::Hadamard { .. } => times.t_bs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateSpec::BeamSplitter { .. } => "BS",
            GateSpec::Swap { .. } => "SWAP",
            GateSpec::ControlledPhase { .. } => "CZ",
            GateSpec::ControlledSwap { .. } => "CSWAP",
            GateSpec::Hadamard { .. } => "H",
            GateSpec::DataCopy { .. } => "COPY",
        }
    }

    /// Targets distinct and within a register of `n_modes`.
    pub fn validate(&self, n_modes: usize) -> Result<()> {
        let modes = self.modes();
        if let Some(m) = modes.iter().find(|&&m| m >= n_modes) {
            return Err(Error::InvalidGate(format!(
                "{}: mode {m} out of range for {n_modes} modes",
                self.name()
            )));
        }
        for (i, a) in modes.iter().enumerate() {
            if modes[i + 1..].contains(a) {
                return Err(Error::InvalidGate(format!(
                    "{}: repeated mode {a}",
                    self.name()
                )));
            }
        }
        if let GateSpec::BeamSplitter { duration, .. } = self {
            if !duration.is_finite() {
                return Err(Error::InvalidGate("BS: non-finite duration".into()));
            }
        }
        Ok(())
    }
}

/// Couplings plus the controlled-SWAP orientation; turns [`GateSpec`]s into
/// unitaries and applies them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSet {
    pub times: GateTimes,
    pub second_splitter: SecondSplitter,
}

impl GateSet {
    pub fn new(g1: f64, g2: f64) -> Result<Self> {
        Ok(GateSet {
            times: GateTimes::new(g1, g2)?,
            second_splitter: SecondSplitter::Inverse,
        })
    }

    pub fn with_second_splitter(self, second_splitter: SecondSplitter) -> Self {
        GateSet {
            second_splitter,
            ..self
        }
    }

    /// Unitary on the gate's own modes, in the order of [`GateSpec::modes`].
    pub fn unitary(&self, gate: &GateSpec, register: &ModeRegister) -> Result<Unitary> {
        gate.validate(register.n_modes())?;
        let dims: Vec<usize> = gate.modes().iter().map(|&m| register.dims()[m]).collect();
        let GateTimes { g1, g2 } = self.times;
        match *gate {
            GateSpec::BeamSplitter { duration, .. } => bs_unitary(g1, duration, (dims[0], dims[1])),
            GateSpec::Swap { .. } => bs_unitary(g1, self.times.t_sw(), (dims[0], dims[1])),
            GateSpec::ControlledPhase { .. } => {
                cz_unitary(g2, self.times.t_cz(), (dims[0], dims[1]))
            }
            GateSpec::ControlledSwap { .. } => {
                cswap_composite_with(g1, g2, [dims[0], dims[1], dims[2]], self.second_splitter)
            }
            GateSpec::Hadamard { .. } => {
                if dims[0] != 2 {
                    return Err(Error::InvalidGate("H acts on two-level modes only".into()));
                }
                let h = FRAC_1_SQRT_2;
                Ok(Unitary {
                    matrix: CMat::from_row_slice(
                        2,
                        2,
                        &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
                    ),
                })
            }
            GateSpec::DataCopy { data, .. } => {
                if dims[0] != 2 {
                    return Err(Error::InvalidGate("COPY control must be two-level".into()));
                }
                let dt = dims[1];
                let diag = (0..2 * dt).map(|i| {
                    let (ctrl, occ) = (i / dt, i % dt);
                    if data[ctrl] && occ % 2 == 1 {
                        c(-1.0, 0.0)
                    } else {
                        c(1.0, 0.0)
                    }
                });
                Ok(Unitary {
                    matrix: CMat::from_diagonal(&nalgebra::DVector::from_iterator(2 * dt, diag)),
                })
            }
        }
    }

    pub fn apply(
        &self,
        state: &[Complex64],
        gate: &GateSpec,
        register: &ModeRegister,
    ) -> Result<Vec<Complex64>> {
        let u = self.unitary(gate, register)?;
        apply_local(state, &u, &gate.modes(), register)
    }

    /// Applies the inverse of `gate`.
    pub fn apply_adjoint(
        &self,
        state: &[Complex64],
        gate: &GateSpec,
        register: &ModeRegister,
    ) -> Result<Vec<Complex64>> {
        let u = self.unitary(gate, register)?.adjoint();
        apply_local(state, &u, &gate.modes(), register)
    }
}

/// Applies `gate` with the default (inverse) splitter orientation.
pub fn apply_gate(
    state: &[Complex64],
    gate: &GateSpec,
    register: &ModeRegister,
    gates: &GateSet,
) -> Result<Vec<Complex64>> {
    gates.apply(state, gate, register)
}

pub fn state_norm(state: &[Complex64]) -> f64 {
    state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Applies a unitary on the listed modes to a full-register state.
pub fn apply_local(
    state: &[Complex64],
    u: &Unitary,
    modes: &[usize],
    register: &ModeRegister,
) -> Result<Vec<Complex64>> {
    if state.len() != register.dim() {
        return Err(Error::DimensionMismatch {
            expected: register.dim(),
            got: state.len(),
        });
    }
    let norm = state_norm(state);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized(norm));
    }
    let local_dims: Vec<usize> = modes.iter().map(|&m| register.dims()[m]).collect();
    let local: usize = local_dims.iter().product();
    if local != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: local,
            got: u.dim(),
        });
    }
    let strides = register.strides();
    // offsets[k]: full-register displacement of local basis state k
    let offsets: Vec<usize> = (0..local)
        .map(|mut k| {
            let mut off = 0;
            for (i, &m) in modes.iter().enumerate().rev() {
                off += (k % local_dims[i]) * strides[m];
                k /= local_dims[i];
            }
            off
        })
        .collect();

    let mut out = state.to_vec();
    let mut block = vec![Complex64::default(); local];
    for base in 0..state.len() {
        let at_origin = modes
            .iter()
            .all(|&m| (base / strides[m]).is_multiple_of(register.dims()[m]));
        if !at_origin {
            continue;
        }
        let mut nonzero = false;
        for (slot, off) in block.iter_mut().zip(&offsets) {
            *slot = state[base + off];
            nonzero |= *slot != Complex64::default();
        }
        if !nonzero {
            continue;
        }
        for (r, off) in offsets.iter().enumerate() {
            out[base + off] = (0..local).map(|k| u.matrix[(r, k)] * block[k]).sum();
        }
    }
    Ok(out)
}
