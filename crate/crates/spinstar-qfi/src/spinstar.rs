//! The spin-star model: coupling ensembles, the encoded initial state, and
//! closed-form reduced states of the system and of environment fragments.
//!
//! A single system qubit couples to N environment qubits through
//! `H = Σ_m (J_m/√N) σ_z^m σ_z^S`, with each environment spin prepared in
//! `|+>` and the system encoding a phase parameter θ as
//! `cosθ|↓> + i sinθ|↑>`. Everything downstream (Fisher information,
//! observable precision) builds on the closed forms in this module.
//!
//! Basis convention throughout the crate: `|↑> = (1,0)^T`, `|↓> = (0,1)^T`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_residual, kron_vec_all, CMatrix, CVector};

/// Gaussian ensemble of coupling strengths, in inverse-time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCouplingSpec {
    /// Ensemble mean ⟨J⟩.
    pub jmean: f64,
    /// Ensemble standard deviation σ ≥ 0.
    pub jstd: f64,
}

impl GaussianCouplingSpec {
    pub fn new(jmean: f64, jstd: f64) -> Result<Self> {
        if !(jstd >= 0.0) {
            return Err(Error::Domain {
                parameter: "jstd",
                value: jstd,
                constraint: "must be >= 0",
            });
        }
        Ok(Self { jmean, jstd })
    }

    /// Ensemble second moment ⟨J²⟩ = ⟨J⟩² + σ².
    pub fn second_moment(&self) -> f64 {
        self.jmean * self.jmean + self.jstd * self.jstd
    }
}

/// One realization {J_1..J_N} of environment couplings, plus the ensemble
/// moments (⟨J⟩, ⟨J²⟩) used by thermodynamic-limit formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    values: Vec<f64>,
    jmean: f64,
    j2: f64,
}

impl CouplingSet {
    /// Wrap explicit coupling values with their ensemble moments.
    pub fn from_values(values: Vec<f64>, jmean: f64, j2: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain {
                parameter: "n_env",
                value: 0.0,
                constraint: "must be >= 1",
            });
        }
        if j2 < jmean * jmean {
            return Err(Error::Domain {
                parameter: "j2",
                value: j2,
                constraint: "ensemble moments need <J^2> >= <J>^2",
            });
        }
        Ok(Self { values, jmean, j2 })
    }

    pub fn n_env(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ensemble mean ⟨J⟩ (not the sample mean of this realization).
    pub fn jmean(&self) -> f64 {
        self.jmean
    }

    /// Ensemble second moment ⟨J²⟩.
    pub fn second_moment(&self) -> f64 {
        self.j2
    }
}

/// Draw N couplings from the Gaussian ensemble.
///
/// Deterministic for a fixed `(spec, n_env, seed)` triple; the returned set
/// carries the ensemble moments, not the sample moments.
pub fn sample_couplings(
    spec: &GaussianCouplingSpec,
    n_env: usize,
    seed: u64,
) -> Result<CouplingSet> {
    if n_env == 0 {
        return Err(Error::Domain {
            parameter: "n_env",
            value: 0.0,
            constraint: "must be >= 1",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(spec.jmean, spec.jstd).map_err(|_| Error::Domain {
        parameter: "jstd",
        value: spec.jstd,
        constraint: "must be finite and >= 0",
    })?;
    let values = (0..n_env).map(|_| normal.sample(&mut rng)).collect();
    CouplingSet::from_values(values, spec.jmean, spec.second_moment())
}

/// One evaluation point: encoding angle θ, interaction time t, a coupling
/// realization and the fragment size |F|.
///
/// θ is folded into [0, π/2] on construction; the model is symmetric under
/// θ → θ + π and θ → π − θ up to an unobservable sign of the system coherence.
#[derive(Debug, Clone, Copy)]
pub struct ModelPoint<'a> {
    pub theta: f64,
    pub time: f64,
    pub couplings: &'a CouplingSet,
    pub fragment_size: usize,
}

/// Reduce θ to the fundamental domain [0, π/2].
pub fn fold_theta(theta: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut th = theta.rem_euclid(pi);
    if th > pi / 2.0 {
        th = pi - th;
    }
    th
}

impl<'a> ModelPoint<'a> {
    pub fn new(
        theta: f64,
        time: f64,
        couplings: &'a CouplingSet,
        fragment_size: usize,
    ) -> Result<Self> {
        if fragment_size > couplings.n_env() {
            return Err(Error::DimensionMismatch {
                expected: couplings.n_env(),
                actual: fragment_size,
            });
        }
        if !(time >= 0.0) {
            return Err(Error::Domain {
                parameter: "time",
                value: time,
                constraint: "must be >= 0",
            });
        }
        Ok(Self {
            theta: fold_theta(theta),
            time,
            couplings,
            fragment_size,
        })
    }

    /// Fragment fraction f = |F|/N.
    pub fn fraction(&self) -> f64 {
        self.fragment_size as f64 / self.couplings.n_env() as f64
    }

    /// Couplings of the fragment spins (by convention the first |F| of the
    /// realization, which keeps runs reproducible).
    pub fn fragment_couplings(&self) -> &[f64] {
        &self.couplings.values()[..self.fragment_size]
    }
}

/// Convert a fragment fraction to a spin count, rounding half up.
pub fn fragment_size_from_fraction(f: f64, n_env: usize) -> usize {
    (f * n_env as f64).round() as usize
}

/// Single-spin conditional state Ω(t) = e^{iJtσ_z/√N} |+><+| e^{-iJtσ_z/√N}:
/// `(1/2) [[1, e^{2iJt/√N}], [e^{-2iJt/√N}, 1]]`.
///
/// The branch conditioned on the other pointer state is `omega(j, -t, n_env)`.
pub fn omega(j: f64, time: f64, n_env: usize) -> CMatrix {
    let phase = 2.0 * j * time / (n_env as f64).sqrt();
    let e = Complex64::from_polar(0.5, phase);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5, 0.0),
            e,
            e.conj(),
            Complex64::new(0.5, 0.0),
        ],
    )
}

/// Branch state |φ_t> = ⊗_m e^{iJ_m t σ_z/√N} |+>_m over the first
/// `fragment_size` environment spins.
pub fn branch_vector(time: f64, couplings: &CouplingSet, fragment_size: usize) -> CVector {
    let sqrt_n = (couplings.n_env() as f64).sqrt();
    let amp = 0.5f64.sqrt();
    let spins: Vec<CVector> = couplings.values()[..fragment_size]
        .iter()
        .map(|&j| {
            let ph = j * time / sqrt_n;
            CVector::from_column_slice(&[
                Complex64::from_polar(amp, ph),
                Complex64::from_polar(amp, -ph),
            ])
        })
        .collect();
    kron_vec_all(spins.iter())
}

/// Coherence of the system qubit at time t: `∏_{k=1..N} cos(2 J_k t/√N)`.
///
/// This is the factor e^{-Γ(t)} damping the system's off-diagonal element.
/// For finite N it can be negative, so the product itself is the primary
/// quantity; see [`gamma_finite`] for the exponent where it exists.
pub fn coherence_factor(time: f64, couplings: &CouplingSet) -> f64 {
    let sqrt_n = (couplings.n_env() as f64).sqrt();
    couplings
        .values()
        .iter()
        .map(|&j| (2.0 * j * time / sqrt_n).cos())
        .product()
}

/// Decoherence exponent Γ(t) = -ln ∏_k cos(2J_k t/√N), defined only while the
/// product is positive.
pub fn gamma_finite(time: f64, couplings: &CouplingSet) -> Option<f64> {
    let c = coherence_factor(time, couplings);
    (c > 0.0).then(|| -c.ln())
}

/// Thermodynamic-limit decoherence exponent Γ(t) = (t/τ_D)² with
/// τ_D = 1/√(2⟨J²⟩).
pub fn gamma_thermodynamic(time: f64, j2: f64) -> Result<f64> {
    if !(j2 > 0.0) {
        return Err(Error::Domain {
            parameter: "j2",
            value: j2,
            constraint: "must be > 0",
        });
    }
    Ok(2.0 * j2 * time * time)
}

/// Branch overlap c(t) = <φ_t|φ_{-t}> = ∏_{m=1..|F|} cos(2 J_m t/√N).
pub fn overlap_c(time: f64, couplings: &CouplingSet, fragment_size: usize) -> f64 {
    let sqrt_n = (couplings.n_env() as f64).sqrt();
    couplings.values()[..fragment_size]
        .iter()
        .map(|&j| (2.0 * j * time / sqrt_n).cos())
        .product()
}

/// Reduced state of the system qubit,
/// `[[sin²θ, i sinθcosθ c_N(t)], [-i sinθcosθ c_N(t), cos²θ]]`
/// with `c_N` the full-environment coherence factor.
pub fn system_state(theta: f64, time: f64, couplings: &CouplingSet) -> CMatrix {
    let c = coherence_factor(time, couplings);
    let (s, co) = (theta.sin(), theta.cos());
    let off = Complex64::new(0.0, s * co * c);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(s * s, 0.0),
            off,
            off.conj(),
            Complex64::new(co * co, 0.0),
        ],
    )
}

/// Analytic θ-derivative of [`system_state`].
pub fn system_state_derivative(theta: f64, time: f64, couplings: &CouplingSet) -> CMatrix {
    let c = coherence_factor(time, couplings);
    let s2 = (2.0 * theta).sin();
    let c2 = (2.0 * theta).cos();
    let off = Complex64::new(0.0, c2 * c);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(s2, 0.0),
            off,
            off.conj(),
            Complex64::new(-s2, 0.0),
        ],
    )
}

/// Reduced fragment state and its analytic θ-derivative.
///
/// `rho` is the rank-2 mixture `cos²θ ⊗Ω_m(t) + sin²θ ⊗Ω_m(-t)` over the
/// first |F| environment spins; `drho_dtheta = sin2θ [⊗Ω_m(-t) − ⊗Ω_m(t)]`.
#[derive(Debug, Clone)]
pub struct FragmentState {
    pub rho: CMatrix,
    pub drho_dtheta: CMatrix,
}

impl FragmentState {
    /// Max-entry Hermiticity residual of `rho` (diagnostic).
    pub fn hermiticity(&self) -> f64 {
        hermiticity_residual(&self.rho)
    }
}

/// Build the fragment state at a model point. Fails on an empty fragment;
/// callers wanting |F| = 0 use QFI = 0 directly.
pub fn fragment_state(point: &ModelPoint) -> Result<FragmentState> {
    if point.fragment_size == 0 {
        return Err(Error::EmptyFragment);
    }
    let n_env = point.couplings.n_env();
    let forward: Vec<CMatrix> = point
        .fragment_couplings()
        .iter()
        .map(|&j| omega(j, point.time, n_env))
        .collect();
    let backward: Vec<CMatrix> = point
        .fragment_couplings()
        .iter()
        .map(|&j| omega(j, -point.time, n_env))
        .collect();
    let kf = crate::linalg::kron_all(forward.iter());
    let kb = crate::linalg::kron_all(backward.iter());

    let p = point.theta.cos().powi(2);
    let s2 = (2.0 * point.theta).sin();
    let rho = kf.scale(p) + kb.scale(1.0 - p);
    let drho_dtheta = (&kb - &kf).scale(s2);
    Ok(FragmentState { rho, drho_dtheta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, max_abs_diff, C_I};
    use std::f64::consts::PI;

    fn fixed_couplings() -> CouplingSet {
        CouplingSet::from_values(vec![0.3, -0.1, 0.7, 0.45, 0.2, 0.55], 0.5, 0.5).unwrap()
    }

    #[test]
    fn sample_couplings_degenerate_sigma() {
        let spec = GaussianCouplingSpec::new(0.5, 0.0).unwrap();
        let cs = sample_couplings(&spec, 20, 1).unwrap();
        assert!(cs.values().iter().all(|&j| j == 0.5));
        assert_eq!(cs.second_moment(), 0.25);
    }

    #[test]
    fn sample_couplings_law_of_large_numbers() {
        let spec = GaussianCouplingSpec::new(0.5, 0.5).unwrap();
        let cs = sample_couplings(&spec, 100_000, 42).unwrap();
        let n = cs.n_env() as f64;
        let mean = cs.values().iter().sum::<f64>() / n;
        let var = cs
            .values()
            .iter()
            .map(|j| (j - mean) * (j - mean))
            .sum::<f64>()
            / n;
        assert!((mean - 0.5).abs() < 0.01, "sample mean {mean}");
        assert!((var - 0.25).abs() < 0.01, "sample variance {var}");
    }

    #[test]
    fn sample_couplings_is_deterministic() {
        let spec = GaussianCouplingSpec::new(0.1, 0.9).unwrap();
        let a = sample_couplings(&spec, 64, 7).unwrap();
        let b = sample_couplings(&spec, 64, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_couplings(&spec, 64, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn omega_limits() {
        let w0 = omega(1.7, 0.0, 4);
        for z in w0.iter() {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        // phase 2jt/sqrt(N) = pi/2 makes the upper-right entry i/2
        let n = 9usize;
        let w = omega(1.0, PI * (n as f64).sqrt() / 4.0, n);
        assert!((w[(0, 1)] - C_I.scale(0.5)).norm() < 1e-12);
        assert!((w[(1, 0)] + C_I.scale(0.5)).norm() < 1e-12);
    }

    #[test]
    fn omega_branches_are_transpose_pairs() {
        let w = omega(0.83, 1.9, 6);
        let wrev = omega(0.83, -1.9, 6);
        assert!(max_abs_diff(&w.transpose(), &wrev) < 1e-15);
        // each branch is itself a valid (Hermitian) state
        assert!(hermiticity_residual(&w) < 1e-15);
        assert!(hermiticity_residual(&wrev) < 1e-15);
    }

    #[test]
    fn coherence_factor_limits() {
        let cs = fixed_couplings();
        assert_eq!(coherence_factor(0.0, &cs), 1.0);
        let single = CouplingSet::from_values(vec![1.0], 1.0, 1.0).unwrap();
        // N = 1: cos(2*1*t/1) = cos(pi) at t = pi/2
        assert!((coherence_factor(PI / 2.0, &single) + 1.0).abs() < 1e-12);
        assert!(gamma_finite(PI / 2.0, &single).is_none());
    }

    #[test]
    fn gamma_thermodynamic_values() {
        assert_eq!(gamma_thermodynamic(0.0, 0.5).unwrap(), 0.0);
        // tau_D = 1/sqrt(2*0.5) = 1, so Gamma(1) = 1
        assert!((gamma_thermodynamic(1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let g1 = gamma_thermodynamic(0.7, 0.31).unwrap();
        let g2 = gamma_thermodynamic(1.4, 0.31).unwrap();
        assert!((g2 - 4.0 * g1).abs() < 1e-12);
        assert!(gamma_thermodynamic(1.0, 0.0).is_err());
    }

    #[test]
    fn finite_gamma_approaches_thermodynamic_limit() {
        // sigma = 0, N = 1e4: -N ln cos(2Jt/sqrt(N)) vs (t/tau_D)^2 within 1%
        let n = 10_000usize;
        let spec = GaussianCouplingSpec::new(0.5, 0.0).unwrap();
        let cs = sample_couplings(&spec, n, 0).unwrap();
        let g = gamma_finite(1.0, &cs).unwrap();
        let g_thermo = gamma_thermodynamic(1.0, 0.25).unwrap();
        assert!(g >= 0.0);
        assert!(
            ((g - g_thermo) / g_thermo).abs() <= 0.01,
            "gap {}",
            (g - g_thermo) / g_thermo
        );
    }

    #[test]
    fn system_state_limits() {
        let cs = fixed_couplings();
        // t = 0: pure encoded state with full coherence
        let rho = system_state(0.7, 0.0, &cs);
        let (s, c) = (0.7f64.sin(), 0.7f64.cos());
        assert!((rho[(0, 0)].re - s * s).abs() < 1e-15);
        assert!((rho[(0, 1)] - Complex64::new(0.0, s * c)).norm() < 1e-15);
        // theta = 0: pointer state |down><down| for all t
        let rho = system_state(0.0, 2.4, &cs);
        assert!(rho[(0, 0)].norm() < 1e-15 && (rho[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(rho[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn fragment_state_limits_and_invariants() {
        let cs = fixed_couplings();
        // theta = 0: pure product of forward branches
        let p0 = ModelPoint::new(0.0, 1.1, &cs, 2).unwrap();
        let fs = fragment_state(&p0).unwrap();
        let sq = &fs.rho * &fs.rho;
        let purity: Complex64 = sq.diagonal().iter().sum();
        assert!((purity.re - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&fs.drho_dtheta, &CMatrix::zeros(4, 4)) < 1e-15);

        // t = 0: |+><+| product independent of theta, zero derivative
        let p1 = ModelPoint::new(0.9, 0.0, &cs, 3).unwrap();
        let fs = fragment_state(&p1).unwrap();
        for z in fs.rho.iter() {
            assert!((z - Complex64::new(0.125, 0.0)).norm() < 1e-15);
        }
        assert!(max_abs_diff(&fs.drho_dtheta, &CMatrix::zeros(8, 8)) < 1e-15);

        // general point: hermitian, unit trace, rank <= 2, nonneg spectrum
        let p = ModelPoint::new(0.5, 1.1, &cs, 3).unwrap();
        let fs = fragment_state(&p).unwrap();
        assert!(fs.hermiticity() < 1e-12);
        let tr: Complex64 = fs.rho.diagonal().iter().sum();
        assert!((tr.re - 1.0).abs() < 1e-12);
        let eig = eig_hermitian(&fs.rho).unwrap();
        let above: Vec<f64> = eig
            .eigenvalues
            .iter()
            .copied()
            .filter(|&l| l > 1e-12)
            .collect();
        assert_eq!(above.len(), 2, "fragment state must be rank 2");
        assert!((above.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-10));
        let dtr: Complex64 = fs.drho_dtheta.diagonal().iter().sum();
        assert!(dtr.norm() < 1e-12);
    }

    #[test]
    fn fragment_state_rejects_empty_fragment() {
        let cs = fixed_couplings();
        let p = ModelPoint::new(0.5, 1.0, &cs, 0).unwrap();
        assert!(matches!(fragment_state(&p), Err(Error::EmptyFragment)));
    }

    #[test]
    fn drho_matches_finite_difference() {
        let cs = fixed_couplings();
        let h = 1e-6;
        for &theta in &[0.2, 0.5, 1.2] {
            let p = ModelPoint::new(theta, 0.9, &cs, 3).unwrap();
            let fs = fragment_state(&p).unwrap();
            let plus = fragment_state(&ModelPoint::new(theta + h, 0.9, &cs, 3).unwrap()).unwrap();
            let minus = fragment_state(&ModelPoint::new(theta - h, 0.9, &cs, 3).unwrap()).unwrap();
            let fd = (&plus.rho - &minus.rho).scale(1.0 / (2.0 * h));
            assert!(max_abs_diff(&fd, &fs.drho_dtheta) <= 1e-8);
        }
    }

    #[test]
    fn overlap_matches_branch_vectors() {
        let spec = GaussianCouplingSpec::new(0.5, 0.5).unwrap();
        let cs = sample_couplings(&spec, 8, 3).unwrap();
        let (t, fsz) = (0.9, 3);
        let phi_t = branch_vector(t, &cs, fsz);
        let phi_mt = branch_vector(-t, &cs, fsz);
        let inner = phi_t.dotc(&phi_mt);
        let c = overlap_c(t, &cs, fsz);
        assert!((inner.norm() - c.abs()).abs() < 1e-12);
        assert!(inner.im.abs() < 1e-12, "branch overlap is real");
    }

    #[test]
    fn overlap_limits() {
        let cs = fixed_couplings();
        assert_eq!(overlap_c(0.0, &cs, 4), 1.0);
        let single = CouplingSet::from_values(vec![1.0], 1.0, 1.0).unwrap();
        assert!(overlap_c(PI / 4.0, &single, 1).abs() < 1e-15);
        // |c| <= 1 on scattered points
        for k in 0..20 {
            let t = 0.37 * k as f64;
            assert!(overlap_c(t, &cs, 5).abs() <= 1.0 + 1e-15);
            assert!(coherence_factor(t, &cs).abs() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn theta_folding() {
        assert!((fold_theta(PI / 2.0 + 0.3) - (PI / 2.0 - 0.3)).abs() < 1e-15);
        assert!((fold_theta(-0.3) - 0.3).abs() < 1e-12);
        assert!((fold_theta(PI + 0.2) - 0.2).abs() < 1e-12);
        let cs = fixed_couplings();
        let a = fragment_state(&ModelPoint::new(0.4, 1.0, &cs, 2).unwrap()).unwrap();
        let b = fragment_state(&ModelPoint::new(PI - 0.4, 1.0, &cs, 2).unwrap()).unwrap();
        assert!(max_abs_diff(&a.rho, &b.rho) < 1e-12);
    }

    #[test]
    fn fraction_rounding_is_half_up() {
        assert_eq!(fragment_size_from_fraction(0.25, 30), 8); // 7.5 rounds up
        assert_eq!(fragment_size_from_fraction(0.2, 50), 10);
        assert_eq!(fragment_size_from_fraction(0.0, 30), 0);
        assert_eq!(fragment_size_from_fraction(1.0, 30), 30);
    }
}
