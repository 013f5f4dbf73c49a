//! Exact full-system reference: evolves the (N+1)-qubit pure state under the
//! diagonal interaction Hamiltonian and recomputes every closed-form quantity
//! from first principles.
//!
//! The Hamiltonian is diagonal in the σ_z product basis, so evolution is an
//! exact per-amplitude phase multiplication: no matrix exponential, no time
//! stepping, no integrator error. That makes this module a genuine oracle for
//! cross-validation rather than an approximation.
//!
//! Qubit order: environment spins 1..N occupy the leftmost tensor factors
//! (most significant bits of the basis index), the system qubit is the last
//! factor. Bit 0 is `|↑>` (σ_z = +1), bit 1 is `|↓>`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{identity2, kron_all, pauli_x, pauli_y, CMatrix, CVector};
use crate::observables::ObservableSpec;
use crate::qfi::{qfi_generic, QfiMethod, QfiResult};
use crate::spinstar::CouplingSet;

/// Hard cap on the total qubit count; keeps the densest reference run
/// (2^13 amplitudes, partial traces to 2^4) in milliseconds.
pub const QUBIT_CAP: usize = 13;

/// Finite-difference step for the oracle's θ-derivative.
pub const FD_STEP: f64 = 1e-6;

/// Pure (N+1)-qubit state, environment spins first, system qubit last.
#[derive(Debug, Clone)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Projector |ψ><ψ| as a dense matrix; only sensible at small sizes.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Build `⊗_k |+>_k ⊗ (cosθ|↓> + i sinθ|↑>)` for N environment spins.
pub fn build_initial(theta: f64, n_env: usize) -> Result<PureState> {
    let n_qubits = n_env + 1;
    if n_qubits > QUBIT_CAP {
        return Err(Error::SizeCap {
            n_qubits,
            cap: QUBIT_CAP,
        });
    }
    if n_env == 0 {
        return Err(Error::Domain {
            parameter: "n_env",
            value: 0.0,
            constraint: "must be >= 1",
        });
    }
    let dim = 1usize << n_qubits;
    let env_amp =
        (0.5f64).powi(n_env as i32 / 2) * if n_env % 2 == 1 { 0.5f64.sqrt() } else { 1.0 };
    let up = Complex64::new(0.0, theta.sin());
    let down = Complex64::new(theta.cos(), 0.0);
    let amplitudes = CVector::from_fn(dim, |i, _| {
        let sys = if i & 1 == 0 { up } else { down };
        sys.scale(env_amp)
    });
    Ok(PureState {
        n_qubits,
        amplitudes,
    })
}

/// Evolve under `H = Σ_m (J_m/√N) σ_z^m σ_z^S` for time `t`.
///
/// H is diagonal in the computational basis, so each amplitude picks up the
/// exact phase `e^{-i t s Σ_m J_m z_m /√N}` with s, z_m ∈ {+1,-1} read off
/// the bit pattern. The norm is preserved identically.
pub fn evolve(state: &PureState, time: f64, couplings: &CouplingSet) -> Result<PureState> {
    let n_env = state.n_qubits - 1;
    if couplings.n_env() != n_env {
        return Err(Error::DimensionMismatch {
            expected: n_env,
            actual: couplings.n_env(),
        });
    }
    let sqrt_n = (n_env as f64).sqrt();
    let js = couplings.values();
    let nq = state.n_qubits;
    let amplitudes = CVector::from_fn(state.amplitudes.len(), |i, _| {
        let s = if i & 1 == 0 { 1.0 } else { -1.0 };
        let mut field = 0.0;
        for (m, &j) in js.iter().enumerate() {
            let z = if (i >> (nq - 1 - m)) & 1 == 0 {
                1.0
            } else {
                -1.0
            };
            field += j * z;
        }
        state.amplitudes[i] * Complex64::from_polar(1.0, -time * s * field / sqrt_n)
    });
    Ok(PureState {
        n_qubits: state.n_qubits,
        amplitudes,
    })
}

/// Reduced density matrix on the listed qubits (ascending order), traced
/// over the rest. Computed by contracting the statevector directly, which
/// agrees with a partial trace of the full projector but never materializes
/// the 2^(N+1)-dimensional matrix.
pub fn reduced_density_matrix(state: &PureState, keep: &[usize]) -> Result<CMatrix> {
    let nq = state.n_qubits;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::config("duplicate qubit index in reduction"));
    }
    for &q in &keep_sorted {
        if q >= nq {
            return Err(Error::BadSubsystemIndex {
                index: q,
                n_factors: nq,
            });
        }
    }
    let rest: Vec<usize> = (0..nq).filter(|q| !keep_sorted.contains(q)).collect();
    let kd = 1usize << keep_sorted.len();
    let rd = 1usize << rest.len();

    let mut gathered = CMatrix::zeros(kd, rd);
    for i in 0..state.amplitudes.len() {
        let mut a = 0usize;
        for &q in &keep_sorted {
            a = (a << 1) | ((i >> (nq - 1 - q)) & 1);
        }
        let mut r = 0usize;
        for &q in &rest {
            r = (r << 1) | ((i >> (nq - 1 - q)) & 1);
        }
        gathered[(a, r)] = state.amplitudes[i];
    }
    Ok(&gathered * gathered.adjoint())
}

/// Exact fragment state: evolve the full pure state and reduce onto the
/// first |F| environment spins.
pub fn oracle_fragment_state(
    theta: f64,
    time: f64,
    couplings: &CouplingSet,
    fragment_size: usize,
) -> Result<CMatrix> {
    if fragment_size == 0 {
        return Err(Error::EmptyFragment);
    }
    if fragment_size > couplings.n_env() {
        return Err(Error::DimensionMismatch {
            expected: couplings.n_env(),
            actual: fragment_size,
        });
    }
    let state = evolve(&build_initial(theta, couplings.n_env())?, time, couplings)?;
    let keep: Vec<usize> = (0..fragment_size).collect();
    reduced_density_matrix(&state, &keep)
}

/// Exact reduced state of the system qubit.
pub fn oracle_system_state(theta: f64, time: f64, couplings: &CouplingSet) -> Result<CMatrix> {
    let n_env = couplings.n_env();
    let state = evolve(&build_initial(theta, n_env)?, time, couplings)?;
    reduced_density_matrix(&state, &[n_env])
}

/// Exact QFI: generic spectral evaluation of the oracle fragment state with
/// a central finite-difference θ-derivative (step [`FD_STEP`]).
pub fn oracle_qfi(
    theta: f64,
    time: f64,
    couplings: &CouplingSet,
    fragment_size: usize,
) -> Result<QfiResult> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::ThetaBoundary { theta });
    }
    let rho = oracle_fragment_state(theta, time, couplings, fragment_size)?;
    let plus = oracle_fragment_state(theta + FD_STEP, time, couplings, fragment_size)?;
    let minus = oracle_fragment_state(theta - FD_STEP, time, couplings, fragment_size)?;
    let drho = (plus - minus).scale(1.0 / (2.0 * FD_STEP));
    let generic = qfi_generic(&rho, &drho)?;
    Ok(QfiResult {
        value: generic.value,
        method: QfiMethod::Oracle,
    })
}

/// Σ_i σ^k_i over the fragment, built as an explicit matrix.
fn spin_sum(pauli: &CMatrix, fragment_size: usize) -> CMatrix {
    let dim = 1usize << fragment_size;
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..fragment_size {
        let factors: Vec<CMatrix> = (0..fragment_size)
            .map(|k| if k == i { pauli.clone() } else { identity2() })
            .collect();
        out += kron_all(factors.iter());
    }
    out
}

/// Exact moments `(Tr[A_q ρ], Tr[A_q² ρ])` from explicitly built operators.
pub fn oracle_observable_moments(
    theta: f64,
    time: f64,
    couplings: &CouplingSet,
    fragment_size: usize,
    spec: &ObservableSpec,
) -> Result<(f64, f64)> {
    let rho = oracle_fragment_state(theta, time, couplings, fragment_size)?;
    let a = spin_sum(&pauli_x(), fragment_size).scale(spec.q)
        + spin_sum(&pauli_y(), fragment_size).scale(1.0 - spec.q);
    let mean = (&a * &rho).diagonal().iter().sum::<Complex64>().re;
    let second = (&a * &a * &rho).diagonal().iter().sum::<Complex64>().re;
    Ok((mean, second))
}
