//! Quantum Fisher information and measurement precision for environment
//! fragments of the spin-star decoherence model.
//!
//! A single qubit encodes a phase parameter θ and decoheres against N
//! environment spins under `H = Σ_m (J_m/√N) σ_z^m σ_z^S`. Observers who
//! each hold a fragment of the environment try to estimate θ; how fast and
//! how precisely they can do so quantifies the emergence of an objective,
//! effectively classical record. This crate computes:
//!
//! - closed-form reduced states of the system and of any fragment, with
//!   analytic θ-derivatives ([`spinstar`]);
//! - the fragment QFI in closed form, in the thermodynamic limit, and
//!   through a generic spectral formula, plus the symmetric logarithmic
//!   derivative and the optimal observable ([`qfi`]);
//! - the precision of static local observables `A_q = q S_x + (1-q) S_y`
//!   from exact moment algebra ([`observables`]);
//! - an exact (N+1)-qubit statevector reference that re-derives all of the
//!   above from first principles ([`oracle`]);
//! - disorder-averaged parameter sweeps with deterministic seeding and
//!   CSV/JSON output, including the reference-figure presets ([`sweep`]),
//!   and a self-verification suite ([`verify`]).
//!
//! Conventions: `|↑> = (1,0)ᵀ`, `|↓> = (0,1)ᵀ`; the encoded system state is
//! `cosθ|↓> + i sinθ|↑>`; couplings scale as `1/√N` so the thermodynamic
//! limit is well defined; the fragment is always the first |F| spins of a
//! realization.
//!
//! Each major capability has a runnable example under `examples/`; start
//! with `fragment_qfi` and `oracle_crosscheck`.

// negated float comparisons in domain guards are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod observables;
pub mod oracle;
pub mod qfi;
pub mod spinstar;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use observables::{ObservableSpec, PrecisionResult};
pub use qfi::{QfiMethod, QfiResult, TimescaleSet};
pub use spinstar::{CouplingSet, FragmentState, GaussianCouplingSpec, ModelPoint};
pub use sweep::{Preset, SweepConfig, SweepRow};
