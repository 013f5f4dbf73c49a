//! Quantum Fisher information of environment fragments, in three routes:
//! the closed form for the spin-star fragment state, its thermodynamic
//! limit, and a generic spectral evaluation for arbitrary density matrices.
//!
//! Also provides the symmetric logarithmic derivative (SLD), the optimal
//! observable it induces, and the characteristic timescales τ_D, τ_F, τ_Y.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, hermiticity_residual, CMatrix, CVector};
use crate::spinstar::{
    branch_vector, overlap_c, system_state, system_state_derivative, CouplingSet, ModelPoint,
};

/// Upper bound on any fragment or system QFI in this model.
pub const F_MAX: f64 = 4.0;

/// Eigenvalue-pair support cutoff for the spectral QFI sum. The fragment
/// state is rank 2, so the superoperator behind the vectorized QFI formula
/// is singular; restricting to the support is exact here.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Which route produced a QFI value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    ClosedForm,
    Thermodynamic,
    Generic,
    Oracle,
}

/// A QFI value tagged with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    pub value: f64,
    pub method: QfiMethod,
}

/// Closed-form fragment QFI, `4 [1 - ∏_{k=1..|F|} cos²(2 J_k t/√N)]`.
///
/// Independent of θ on the open interval (0, π/2); an empty fragment carries
/// no information and returns 0.
pub fn qfi_closed_form(point: &ModelPoint) -> QfiResult {
    let c = overlap_c(point.time, point.couplings, point.fragment_size);
    QfiResult {
        value: F_MAX * (1.0 - c * c),
        method: QfiMethod::ClosedForm,
    }
}

/// Thermodynamic-limit QFI, `4 [1 - e^{-(t/τ_F)²}]` with τ_F = 1/(2√(f⟨J²⟩)).
pub fn qfi_thermodynamic(time: f64, f: f64, j2: f64) -> Result<QfiResult> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::Domain {
            parameter: "f",
            value: f,
            constraint: "must satisfy 0 < f <= 1",
        });
    }
    if !(j2 > 0.0) {
        return Err(Error::Domain {
            parameter: "j2",
            value: j2,
            constraint: "must be > 0",
        });
    }
    let x = 4.0 * f * j2 * time * time; // (t/tau_F)^2
    Ok(QfiResult {
        value: F_MAX * (1.0 - (-x).exp()),
        method: QfiMethod::Thermodynamic,
    })
}

fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Generic spectral QFI `F = 2 Σ_{λ_i+λ_j > ε} |<i|∂ρ|j>|² / (λ_i+λ_j)`
/// over the eigenpairs of `rho`.
///
/// Equal to the vectorized superoperator formula restricted to the support
/// of `rho`. Inputs are validated as a density matrix and a Hermitian
/// traceless derivative, each within 1e-8.
pub fn qfi_generic(rho: &CMatrix, drho: &CMatrix) -> Result<QfiResult> {
    const TOL: f64 = 1e-8;
    let herm = hermiticity_residual(rho);
    if herm > TOL {
        return Err(Error::NotDensityMatrix {
            violation: format!("Hermiticity residual {herm:e} exceeds {TOL:e}"),
        });
    }
    let tr = trace(rho);
    if (tr - Complex64::new(1.0, 0.0)).norm() > TOL {
        return Err(Error::NotDensityMatrix {
            violation: format!("trace {tr} differs from 1"),
        });
    }
    if rho.shape() != drho.shape() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            actual: drho.nrows(),
        });
    }
    let dherm = hermiticity_residual(drho);
    if dherm > TOL {
        return Err(Error::NotDensityMatrix {
            violation: format!("derivative Hermiticity residual {dherm:e} exceeds {TOL:e}"),
        });
    }
    let dtr = trace(drho).norm();
    if dtr > TOL {
        return Err(Error::NotDensityMatrix {
            violation: format!("derivative trace {dtr:e} exceeds {TOL:e}"),
        });
    }

    let sym = (rho + rho.adjoint()).scale(0.5);
    let eig = eig_hermitian(&sym)?;
    if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
        if min < -TOL {
            return Err(Error::NotDensityMatrix {
                violation: format!("negative eigenvalue {min:e}"),
            });
        }
    }

    let dsym = (drho + drho.adjoint()).scale(0.5);
    let d = eig.eigenvectors.adjoint() * dsym * &eig.eigenvectors;
    let n = d.nrows();
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = eig.eigenvalues[i] + eig.eigenvalues[j];
            if s > SUPPORT_CUTOFF {
                f += 2.0 * d[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(QfiResult {
        value: f,
        method: QfiMethod::Generic,
    })
}

/// QFI of the reduced system state with its analytic θ-derivative.
/// Constant at 4 for all t and θ in the open interval (0, π/2).
pub fn system_qfi(theta: f64, time: f64, couplings: &CouplingSet) -> QfiResult {
    let rho = system_state(theta, time, couplings);
    let drho = system_state_derivative(theta, time, couplings);
    let generic = qfi_generic(&rho, &drho).expect("system state is a valid density matrix");
    QfiResult {
        value: generic.value,
        method: QfiMethod::Generic,
    }
}

/// The three characteristic timescales, in time units:
/// system decoherence τ_D, fragment QFI growth τ_F, and S_y precision
/// growth τ_Y (infinite where the S_y sensitivity vanishes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimescaleSet {
    pub tau_d: f64,
    pub tau_f: f64,
    pub tau_y: f64,
}

/// Compute τ_D = 1/√(2⟨J²⟩), τ_F = 1/(2√(f⟨J²⟩)) = τ_D/√(2f) and
/// τ_Y = 1/(2|sin2θ ⟨J⟩|√f), with τ_Y = +∞ when sin2θ·⟨J⟩ = 0.
pub fn timescales(theta: f64, f: f64, jmean: f64, j2: f64) -> Result<TimescaleSet> {
    if !(f > 0.0) {
        return Err(Error::Domain {
            parameter: "f",
            value: f,
            constraint: "must be > 0",
        });
    }
    if !(j2 > 0.0) {
        return Err(Error::Domain {
            parameter: "j2",
            value: j2,
            constraint: "must be > 0",
        });
    }
    let tau_d = 1.0 / (2.0 * j2).sqrt();
    let tau_f = 1.0 / (2.0 * (f * j2).sqrt());
    let sens = ((2.0 * theta).sin() * jmean).abs();
    let tau_y = if sens == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * sens * f.sqrt())
    };
    Ok(TimescaleSet {
        tau_d,
        tau_f,
        tau_y,
    })
}

/// Symmetric logarithmic derivative of the fragment state, solving
/// `∂_θ ρ = (ρL + Lρ)/2`.
///
/// `basis` holds the orthonormal pair (|φ_t>, |φ_t^⊥>) spanning the state's
/// rank-2 support; `matrix_2x2` is the SLD in that basis and `full` its lift
/// to the computational basis.
#[derive(Debug, Clone)]
pub struct SldDecomposition {
    pub basis: (CVector, CVector),
    pub matrix_2x2: CMatrix,
    pub full: CMatrix,
}

/// Orthonormal completion of |φ_t> inside the branch plane: Gram-Schmidt of
/// |φ_{-t}> against |φ_t>, with a deterministic fallback completion when the
/// branches are parallel (|c| = 1, where the SLD off-diagonals vanish and
/// any completion works).
fn support_basis(point: &ModelPoint) -> (CVector, CVector) {
    let phi_t = branch_vector(point.time, point.couplings, point.fragment_size);
    let phi_mt = branch_vector(-point.time, point.couplings, point.fragment_size);
    let c = phi_t.dotc(&phi_mt);
    let mut perp = &phi_mt - phi_t.scale_c(c);

    let norm = perp.norm();
    if norm > 1e-8 {
        perp /= Complex64::new(norm, 0.0);
        return (phi_t, perp);
    }
    // parallel branches: complete with the basis vector least aligned to phi_t
    let k = (0..phi_t.len())
        .min_by(|&a, &b| phi_t[a].norm().partial_cmp(&phi_t[b].norm()).unwrap())
        .unwrap();
    let mut e = CVector::zeros(phi_t.len());
    e[k] = Complex64::new(1.0, 0.0);
    let overlap = phi_t.dotc(&e);
    let mut fallback = e - phi_t.scale_c(overlap);
    let n = fallback.norm();
    fallback /= Complex64::new(n, 0.0);
    (phi_t, fallback)
}

trait ScaleC {
    fn scale_c(&self, z: Complex64) -> CVector;
}

impl ScaleC for CVector {
    fn scale_c(&self, z: Complex64) -> CVector {
        self.map(|x| x * z)
    }
}

/// Closed-form SLD in the branch basis:
/// `L = 2(c²−1) tanθ |φ><φ| + [1−c²+(1+c²)cos2θ] cscθ secθ |⊥><⊥|
///    + 2c√(1−c²) tanθ (|φ><⊥| + |⊥><φ|)`.
///
/// Singular at the pointer states θ ∈ {0, π/2}.
pub fn sld(point: &ModelPoint) -> Result<SldDecomposition> {
    if point.fragment_size == 0 {
        return Err(Error::EmptyFragment);
    }
    let th = point.theta;
    if th <= 0.0 || th >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::ThetaBoundary { theta: th });
    }
    let c = overlap_c(point.time, point.couplings, point.fragment_size);
    let c2 = c * c;
    let (sin, cos) = (th.sin(), th.cos());
    let tan = sin / cos;
    let l11 = 2.0 * (c2 - 1.0) * tan;
    let l22 = (1.0 - c2 + (1.0 + c2) * (2.0 * th).cos()) / (sin * cos);
    let l12 = 2.0 * c * (1.0 - c2).max(0.0).sqrt() * tan;

    let matrix_2x2 = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(l11, 0.0),
            Complex64::new(l12, 0.0),
            Complex64::new(l12, 0.0),
            Complex64::new(l22, 0.0),
        ],
    );

    let (phi, perp) = support_basis(point);
    let proj = |a: &CVector, b: &CVector| -> CMatrix { a * b.adjoint() };
    let full = proj(&phi, &phi).scale(l11)
        + proj(&perp, &perp).scale(l22)
        + (proj(&phi, &perp) + proj(&perp, &phi)).scale(l12);

    Ok(SldDecomposition {
        basis: (phi, perp),
        matrix_2x2,
        full,
    })
}

/// Optimal observable `X_θ = θ·I + L_θ/F_θ`; measuring it saturates the
/// Cramér-Rao bound with a locally unbiased estimate of θ.
///
/// Undefined at points where the QFI vanishes (no information imprinted).
pub fn optimal_observable(point: &ModelPoint) -> Result<CMatrix> {
    let f = qfi_closed_form(point).value;
    if f <= SUPPORT_CUTOFF {
        return Err(Error::NoInformation);
    }
    let l = sld(point)?;
    let dim = l.full.nrows();
    Ok(CMatrix::identity(dim, dim).scale(point.theta) + l.full.scale(1.0 / f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::spinstar::{fragment_state, sample_couplings, GaussianCouplingSpec};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn couplings(n: usize, seed: u64) -> CouplingSet {
        let spec = GaussianCouplingSpec::new(0.5, 0.5).unwrap();
        sample_couplings(&spec, n, seed).unwrap()
    }

    fn single_unit_coupling() -> CouplingSet {
        CouplingSet::from_values(vec![1.0], 1.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_limits() {
        let cs = couplings(6, 1);
        let p = ModelPoint::new(0.4, 0.0, &cs, 3).unwrap();
        assert_eq!(qfi_closed_form(&p).value, 0.0);

        let single = single_unit_coupling();
        let p = ModelPoint::new(0.4, FRAC_PI_4, &single, 1).unwrap();
        assert!((qfi_closed_form(&p).value - 4.0).abs() < 1e-12);

        let p0 = ModelPoint::new(0.4, 1.7, &cs, 0).unwrap();
        assert_eq!(qfi_closed_form(&p0).value, 0.0);
    }

    #[test]
    fn closed_form_matches_generic_route() {
        let cs = couplings(8, 5);
        let p = ModelPoint::new(0.4, 0.9, &cs, 3).unwrap();
        let fs = fragment_state(&p).unwrap();
        let generic = qfi_generic(&fs.rho, &fs.drho_dtheta).unwrap();
        let closed = qfi_closed_form(&p);
        assert!((generic.value - closed.value).abs() <= 1e-8);
    }

    #[test]
    fn thermodynamic_values() {
        assert_eq!(qfi_thermodynamic(0.0, 0.2, 0.5).unwrap().value, 0.0);
        // at t = tau_F the exponent is exactly 1
        let tau_f = 1.0f64 / (2.0 * (0.2f64 * 0.5).sqrt());
        let v = qfi_thermodynamic(tau_f, 0.2, 0.5).unwrap().value;
        assert!((v - 4.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        // long-time saturation at F_MAX
        let v = qfi_thermodynamic(100.0, 0.2, 0.5).unwrap().value;
        assert!((v - 4.0).abs() < 1e-9);
        assert!(qfi_thermodynamic(1.0, 0.0, 0.5).is_err());
        assert!(qfi_thermodynamic(1.0, 0.2, 0.0).is_err());
    }

    #[test]
    fn short_time_quadratic_growth() {
        let (f, j2) = (0.2f64, 0.5);
        let tau_f = 1.0 / (2.0 * (f * j2).sqrt());
        for k in 1..=10 {
            let t = 0.01 * k as f64 * tau_f;
            let v = qfi_thermodynamic(t, f, j2).unwrap().value;
            let quad = 4.0 * (t / tau_f).powi(2);
            let ratio = v / quad;
            assert!(
                (0.99..=1.0).contains(&ratio),
                "t/tau_F = {} ratio {ratio}",
                t / tau_f
            );
        }
    }

    #[test]
    fn generic_pure_encoded_state_is_f_max() {
        // |psi> = cos th |down> + i sin th |up>
        for &th in &[0.2f64, 0.7, 1.3] {
            let psi = CVector::from_column_slice(&[
                Complex64::new(0.0, th.sin()),
                Complex64::new(th.cos(), 0.0),
            ]);
            let rho = &psi * psi.adjoint();
            let dpsi = CVector::from_column_slice(&[
                Complex64::new(0.0, th.cos()),
                Complex64::new(-th.sin(), 0.0),
            ]);
            let drho = &dpsi * psi.adjoint() + &psi * dpsi.adjoint();
            let f = qfi_generic(&rho, &drho).unwrap().value;
            assert!((f - 4.0).abs() < 1e-10, "theta {th}: {f}");
        }
    }

    #[test]
    fn generic_zero_derivative_and_validation() {
        let cs = couplings(6, 2);
        let p = ModelPoint::new(0.5, 1.0, &cs, 2).unwrap();
        let fs = fragment_state(&p).unwrap();
        let zero = CMatrix::zeros(4, 4);
        assert_eq!(qfi_generic(&fs.rho, &zero).unwrap().value, 0.0);

        // trace-violating input is rejected with the violated invariant
        let bad = fs.rho.scale(2.0);
        match qfi_generic(&bad, &fs.drho_dtheta).unwrap_err() {
            Error::NotDensityMatrix { violation } => assert!(violation.contains("trace")),
            e => panic!("unexpected error {e}"),
        }
        // non-Hermitian derivative rejected
        let mut skew = zero.clone();
        skew[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(qfi_generic(&fs.rho, &skew).is_err());
    }

    #[test]
    fn qfi_is_theta_independent() {
        let cs = couplings(6, 9);
        let reference = {
            let p = ModelPoint::new(0.3, 1.2, &cs, 2).unwrap();
            let fs = fragment_state(&p).unwrap();
            qfi_generic(&fs.rho, &fs.drho_dtheta).unwrap().value
        };
        for &th in &[0.1, 0.7, 1.1, 1.5] {
            let p = ModelPoint::new(th, 1.2, &cs, 2).unwrap();
            let fs = fragment_state(&p).unwrap();
            let v = qfi_generic(&fs.rho, &fs.drho_dtheta).unwrap().value;
            assert!((v - reference).abs() <= 1e-8, "theta {th}");
        }
    }

    #[test]
    fn qfi_monotone_in_fragment_size_and_bounded() {
        let cs = couplings(10, 11);
        for k in 0..30 {
            let t = 0.23 * k as f64;
            let mut prev = 0.0;
            for fsz in 0..=10 {
                let p = ModelPoint::new(0.5, t, &cs, fsz).unwrap();
                let v = qfi_closed_form(&p).value;
                assert!(v >= prev - 1e-15, "monotonicity at t={t}, |F|={fsz}");
                assert!(v <= F_MAX + 1e-9);
                prev = v;
            }
        }
    }

    #[test]
    fn timescale_values() {
        let ts = timescales(FRAC_PI_4, 0.2, 0.5, 0.5).unwrap();
        assert!((ts.tau_d - 1.0).abs() < 1e-12);
        assert!((ts.tau_f - 1.0 / 0.4f64.sqrt()).abs() < 1e-12);
        assert!((ts.tau_y - 1.0 / 0.2f64.sqrt()).abs() < 1e-12);
        // consistency tau_f = tau_d / sqrt(2 f)
        assert!((ts.tau_f - ts.tau_d / (2.0 * 0.2f64).sqrt()).abs() < 1e-12);
        assert!(ts.tau_f <= ts.tau_y);

        let ts0 = timescales(0.0, 0.2, 0.5, 0.5).unwrap();
        assert!(ts0.tau_y.is_infinite());
        assert!(timescales(0.5, 0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn sld_identities() {
        let cs = couplings(6, 3);
        let p = ModelPoint::new(0.6, 1.0, &cs, 2).unwrap();
        let fs = fragment_state(&p).unwrap();
        let l = sld(&p).unwrap();

        assert!(hermiticity_residual(&l.full) < 1e-10);
        let lr = &fs.rho * &l.full + &l.full * &fs.rho;
        assert!(
            max_abs_diff(&fs.drho_dtheta, &lr.scale(0.5)) <= 1e-8,
            "SLD equation residual"
        );

        let mean: Complex64 = (&fs.rho * &l.full).diagonal().iter().sum();
        assert!(mean.norm() < 1e-10, "Tr[rho L] = {mean}");

        let f_from_l: Complex64 = (&fs.rho * &l.full * &l.full).diagonal().iter().sum();
        let f_closed = qfi_closed_form(&p).value;
        assert!((f_from_l.re - f_closed).abs() <= 1e-8);
    }

    #[test]
    fn sld_orthogonal_branches_have_no_off_diagonal() {
        let single = single_unit_coupling();
        let p = ModelPoint::new(0.6, FRAC_PI_4, &single, 1).unwrap();
        let l = sld(&p).unwrap();
        assert!(l.matrix_2x2[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn sld_rejects_pointer_states() {
        let cs = couplings(6, 3);
        let p = ModelPoint::new(0.0, 1.0, &cs, 2).unwrap();
        assert!(matches!(sld(&p), Err(Error::ThetaBoundary { .. })));
        let p = ModelPoint::new(PI / 2.0, 1.0, &cs, 2).unwrap();
        assert!(matches!(sld(&p), Err(Error::ThetaBoundary { .. })));
    }

    #[test]
    fn optimal_observable_is_locally_unbiased_and_saturating() {
        let cs = couplings(6, 3);
        let p = ModelPoint::new(0.6, 1.0, &cs, 2).unwrap();
        let fs = fragment_state(&p).unwrap();
        let x = optimal_observable(&p).unwrap();
        let f = qfi_closed_form(&p).value;

        let mean: Complex64 = (&fs.rho * &x).diagonal().iter().sum();
        assert!((mean.re - p.theta).abs() < 1e-10 && mean.im.abs() < 1e-12);

        let second: Complex64 = (&fs.rho * &x * &x).diagonal().iter().sum();
        let var = second.re - mean.re * mean.re;
        assert!(
            (var - 1.0 / f).abs() < 1e-8,
            "Var(X) = {var} vs 1/F = {}",
            1.0 / f
        );
    }

    #[test]
    fn optimal_observable_long_time_branch_eigenvalues() {
        // c(t) = 0: X acts as (theta - tan/2) on phi_t and (theta + cot/2) on phi_{-t}
        let single = single_unit_coupling();
        let th = 0.6f64;
        let p = ModelPoint::new(th, FRAC_PI_4, &single, 1).unwrap();
        let x = optimal_observable(&p).unwrap();
        let phi_t = branch_vector(p.time, &single, 1);
        let phi_mt = branch_vector(-p.time, &single, 1);
        let want_t = th - th.tan() / 2.0;
        let want_mt = th + 1.0 / th.tan() / 2.0;
        let xt = &x * &phi_t;
        let xmt = &x * &phi_mt;
        for i in 0..2 {
            assert!((xt[i] - phi_t[i].scale(want_t)).norm() < 1e-10);
            assert!((xmt[i] - phi_mt[i].scale(want_mt)).norm() < 1e-10);
        }
    }

    #[test]
    fn optimal_observable_needs_information() {
        let cs = couplings(6, 3);
        let p = ModelPoint::new(0.6, 0.0, &cs, 2).unwrap();
        assert!(matches!(optimal_observable(&p), Err(Error::NoInformation)));
    }

    #[test]
    fn system_qfi_is_constant_four() {
        let cs = couplings(10, 13);
        assert!((system_qfi(0.3, 0.0, &cs).value - 4.0).abs() < 1e-8);
        assert!((system_qfi(0.7, 2.5, &cs).value - 4.0).abs() < 1e-8);
        for &th in &[0.1, 0.8, 1.5] {
            for k in 0..=6 {
                let t = 0.5 * k as f64;
                let v = system_qfi(th, t, &cs).value;
                assert!((v - 4.0).abs() < 1e-8, "theta={th} t={t}: {v}");
            }
        }
    }
}
