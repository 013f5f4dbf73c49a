//! Precision attainable with static local observables.
//!
//! Observers restricted to fixed single-spin measurements use sums
//! `S_k = Σ_i σ_i^k` over their fragment; the family
//! `A_q = q S_x + (1-q) S_y` interpolates between the informative S_y and
//! the uninformative S_x. Estimation precision follows from error
//! propagation, `Var(θ) = Var(A)/|∂_θ<A>|²`.
//!
//! All expectations here come from closed-form moment algebra; no 2^|F|
//! matrices are ever built, so fragment sizes are unbounded. The exact-trace
//! route lives in [`crate::oracle`] and in tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinstar::ModelPoint;

/// Mixing weight of the static local observable `A_q = q S_x + (1-q) S_y`.
/// q = 1 has no θ sensitivity at all and is rejected; q = 0 is S_y, the
/// optimal static local choice in the thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub q: f64,
}

impl ObservableSpec {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Domain {
                parameter: "q",
                value: q,
                constraint: "must satisfy 0 <= q < 1",
            });
        }
        Ok(Self { q })
    }

    /// The pure S_y observable.
    pub fn s_y() -> Self {
        Self { q: 0.0 }
    }
}

impl Default for ObservableSpec {
    fn default() -> Self {
        Self::s_y()
    }
}

/// Precision of estimating θ from one observable: the variance from error
/// propagation (infinite where the θ-sensitivity vanishes), its reciprocal,
/// and the underlying observable moments where they exist (the moments grow
/// with |F| and have no finite thermodynamic counterpart).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionResult {
    pub variance_theta: f64,
    pub precision: f64,
    pub mean_a: Option<f64>,
    pub var_a: Option<f64>,
}

impl PrecisionResult {
    fn from_variance(variance_theta: f64, mean_a: Option<f64>, var_a: Option<f64>) -> Self {
        let precision = if variance_theta.is_infinite() {
            0.0
        } else {
            1.0 / variance_theta
        };
        Self {
            variance_theta,
            precision,
            mean_a,
            var_a,
        }
    }
}

/// Single-spin expectations `(⟨σ^x⟩, ⟨σ^y⟩, ⟨σ^z⟩)` under the forward branch
/// state Ω(t): `(cos(2jt/√N), -sin(2jt/√N), 0)`. The reversed branch flips
/// the sign of the y component only.
pub fn local_expectations(j: f64, time: f64, n_env: usize) -> (f64, f64, f64) {
    let arg = 2.0 * j * time / (n_env as f64).sqrt();
    (arg.cos(), -arg.sin(), 0.0)
}

/// sin(2θ) with the pointer states θ ∈ {0, π/2} mapped to an exact zero, so
/// degenerate sensitivity is recognized exactly rather than at rounding
/// level.
fn sensitivity_sin2(theta: f64) -> f64 {
    if theta == 0.0 || theta == std::f64::consts::FRAC_PI_2 {
        0.0
    } else {
        (2.0 * theta).sin()
    }
}

/// Fragment expectation `<S_y> = -cos2θ Σ_m sin(2 J_m t/√N)`.
pub fn s_y_expectation(point: &ModelPoint) -> f64 {
    let sqrt_n = (point.couplings.n_env() as f64).sqrt();
    let sum: f64 = point
        .fragment_couplings()
        .iter()
        .map(|&j| (2.0 * j * point.time / sqrt_n).sin())
        .sum();
    -(2.0 * point.theta).cos() * sum
}

/// Per-spin x/y expectation sums over the fragment, under the forward branch.
fn fragment_xy_sums(point: &ModelPoint) -> (f64, f64, f64, f64, f64) {
    let n_env = point.couplings.n_env();
    let (mut sx, mut sy, mut sx2, mut sy2, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &j in point.fragment_couplings() {
        let (x, y, _) = local_expectations(j, point.time, n_env);
        sx += x;
        sy += y;
        sx2 += x * x;
        sy2 += y * y;
        sxy += x * y;
    }
    (sx, sy, sx2, sy2, sxy)
}

/// First and second moments of `A_q` under the fragment state.
///
/// `mean = q Σ<σ^x_m> + (1-q) cos2θ Σ<σ^y_m>`; the second moment is the
/// diagonal term `(q² + (1-q)²)|F|` plus the i≠j cross sums for xx, yy and
/// xy. The i = j cross term vanishes because σ_x and σ_y anticommute.
pub fn aq_moments(point: &ModelPoint, spec: &ObservableSpec) -> (f64, f64) {
    let q = spec.q;
    let qc = 1.0 - q;
    let cos2 = (2.0 * point.theta).cos();
    let (sx, sy, sx2, sy2, sxy) = fragment_xy_sums(point);
    let fsz = point.fragment_size as f64;

    let mean = q * sx + qc * cos2 * sy;
    let second = (q * q + qc * qc) * fsz
        + q * q * (sx * sx - sx2)
        + qc * qc * (sy * sy - sy2)
        + 2.0 * q * qc * cos2 * (sx * sy - sxy);
    (mean, second)
}

/// Finite-N estimation precision of θ from measuring `A_q`.
///
/// Returns the infinite-variance marker (precision 0) where the sensitivity
/// `∂_θ<A_q> = -2(1-q) sin2θ Σ<σ^y_m>` vanishes: sweeps legitimately cross
/// the pointer states and must record "no information", not abort.
pub fn precision_finite(point: &ModelPoint, spec: &ObservableSpec) -> PrecisionResult {
    let (mean, second) = aq_moments(point, spec);
    let var_a = second - mean * mean;
    let (_, sy, ..) = fragment_xy_sums(point);
    let sensitivity = -2.0 * (1.0 - spec.q) * sensitivity_sin2(point.theta) * sy;
    if sensitivity == 0.0 {
        return PrecisionResult::from_variance(f64::INFINITY, Some(mean), Some(var_a));
    }
    let variance = var_a / (sensitivity * sensitivity);
    PrecisionResult::from_variance(variance, Some(mean), Some(var_a))
}

/// Thermodynamic-limit precision of `A_q`,
/// `Var(θ) = (1/4)[1 + (1+q)/((1-q) · 4 t² sin²2θ ⟨J⟩² f)]`.
///
/// Zero-mean coupling ensembles obey a different limiting law and are
/// rejected. Vanishing sensitivity (t = 0 or a pointer state) yields the
/// infinite-variance marker.
pub fn precision_thermodynamic(
    theta: f64,
    time: f64,
    f: f64,
    jmean: f64,
    spec: &ObservableSpec,
) -> Result<PrecisionResult> {
    if !(f > 0.0) {
        return Err(Error::Domain {
            parameter: "f",
            value: f,
            constraint: "must be > 0",
        });
    }
    if jmean == 0.0 {
        return Err(Error::ZeroMeanEnsemble);
    }
    let s2 = sensitivity_sin2(crate::spinstar::fold_theta(theta));
    let scale = 4.0 * time * time * s2 * s2 * jmean * jmean * f;
    if scale == 0.0 {
        return Ok(PrecisionResult::from_variance(f64::INFINITY, None, None));
    }
    let variance = 0.25 * (1.0 + (1.0 + spec.q) / ((1.0 - spec.q) * scale));
    Ok(PrecisionResult::from_variance(variance, None, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity2, kron_all, pauli_x, pauli_y, pauli_z, CMatrix};
    use crate::qfi::qfi_closed_form;
    use crate::spinstar::{
        fragment_state, omega, sample_couplings, CouplingSet, GaussianCouplingSpec,
    };
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn fixed_couplings() -> CouplingSet {
        CouplingSet::from_values(vec![0.3, -0.1, 0.7, 0.45, 0.2, 0.55], 0.5, 0.5).unwrap()
    }

    /// Σ_i σ^k_i over `fsz` spins, built explicitly (test-only route).
    fn spin_sum(pauli: &CMatrix, fsz: usize) -> CMatrix {
        let dim = 1 << fsz;
        let mut out = CMatrix::zeros(dim, dim);
        for i in 0..fsz {
            let factors: Vec<CMatrix> = (0..fsz)
                .map(|k| if k == i { pauli.clone() } else { identity2() })
                .collect();
            out += kron_all(factors.iter());
        }
        out
    }

    fn trace_re(m: &CMatrix) -> f64 {
        m.diagonal().iter().sum::<Complex64>().re
    }

    #[test]
    fn local_expectation_values() {
        assert_eq!(local_expectations(1.3, 0.0, 5), (1.0, 0.0, 0.0));
        let (x, y, z) = local_expectations(1.0, PI / 4.0, 1);
        assert!(x.abs() < 1e-15 && (y + 1.0).abs() < 1e-15 && z == 0.0);
        // against the single-spin branch state
        let w = omega(0.7, 1.3, 6);
        let (x, y, _) = local_expectations(0.7, 1.3, 6);
        assert!((trace_re(&(pauli_x() * &w)) - x).abs() < 1e-14);
        assert!((trace_re(&(pauli_y() * &w)) - y).abs() < 1e-14);
        assert!(trace_re(&(pauli_z() * &w)).abs() < 1e-14);
    }

    #[test]
    fn s_y_expectation_limits_and_trace() {
        let cs = fixed_couplings();
        let p = ModelPoint::new(FRAC_PI_4, 1.7, &cs, 3).unwrap();
        assert!(s_y_expectation(&p).abs() < 1e-15);
        let p = ModelPoint::new(0.3, 0.0, &cs, 3).unwrap();
        assert_eq!(s_y_expectation(&p), 0.0);

        let p = ModelPoint::new(0.3, 1.2, &cs, 2).unwrap();
        let rho = fragment_state(&p).unwrap().rho;
        let want = trace_re(&(spin_sum(&pauli_y(), 2) * &rho));
        assert!((s_y_expectation(&p) - want).abs() < 1e-10);
        // frozen independent value
        let p = ModelPoint::new(0.5, 0.9, &cs, 3).unwrap();
        assert!((s_y_expectation(&p) - (-0.34431332604846127)).abs() < 1e-12);
    }

    #[test]
    fn aq_moments_match_explicit_traces() {
        let cs = fixed_couplings();
        let p = ModelPoint::new(0.5, 0.9, &cs, 3).unwrap();
        let rho = fragment_state(&p).unwrap().rho;
        for &q in &[0.0, 0.3, 0.7] {
            let spec = ObservableSpec::new(q).unwrap();
            let (mean, second) = aq_moments(&p, &spec);
            let a = spin_sum(&pauli_x(), 3).scale(q) + spin_sum(&pauli_y(), 3).scale(1.0 - q);
            let mean_tr = trace_re(&(&a * &rho));
            let second_tr = trace_re(&(&a * &a * &rho));
            assert!((mean - mean_tr).abs() < 1e-9, "q={q} mean");
            assert!((second - second_tr).abs() < 1e-9, "q={q} second moment");
            assert!(second >= mean * mean - 1e-12, "variance non-negativity");
        }
        // frozen independent values at q = 0.3
        let spec = ObservableSpec::new(0.3).unwrap();
        let (mean, second) = aq_moments(&p, &spec);
        assert!((mean - 0.6120879948264101).abs() < 1e-12);
        assert!((second - 1.9964467668978303).abs() < 1e-12);
    }

    #[test]
    fn aq_mean_at_q_zero_is_s_y() {
        let cs = fixed_couplings();
        let p = ModelPoint::new(0.4, 1.1, &cs, 4).unwrap();
        let (mean, _) = aq_moments(&p, &ObservableSpec::s_y());
        assert!((mean - s_y_expectation(&p)).abs() < 1e-14);
    }

    #[test]
    fn precision_degenerate_sensitivity_is_a_value() {
        let cs = fixed_couplings();
        let p = ModelPoint::new(0.0, 1.3, &cs, 3).unwrap();
        let r = precision_finite(&p, &ObservableSpec::s_y());
        assert!(r.variance_theta.is_infinite());
        assert_eq!(r.precision, 0.0);
        // t = 0 has no imprint either
        let p = ModelPoint::new(0.7, 0.0, &cs, 3).unwrap();
        assert!(precision_finite(&p, &ObservableSpec::s_y())
            .variance_theta
            .is_infinite());
        // theta = pi/2 is the other pointer state
        let p = ModelPoint::new(PI / 2.0, 1.3, &cs, 3).unwrap();
        assert!(precision_finite(&p, &ObservableSpec::s_y())
            .variance_theta
            .is_infinite());
    }

    #[test]
    fn precision_finite_matches_sy_expression_at_q_zero() {
        // independent finite-N S_y variance:
        // Var = (1/4)[1 + (|F| - Σ sin²)/(sin²2θ (Σ sin)²)]
        let cs = fixed_couplings();
        let p = ModelPoint::new(0.6, 1.5, &cs, 2).unwrap();
        let sqrt_n = 6f64.sqrt();
        let sins: Vec<f64> = p
            .fragment_couplings()
            .iter()
            .map(|&j| (2.0 * j * 1.5 / sqrt_n).sin())
            .collect();
        let sum: f64 = sins.iter().sum();
        let sum2: f64 = sins.iter().map(|s| s * s).sum();
        let s2 = (2.0f64 * 0.6).sin();
        let want = 0.25 * (1.0 + (2.0 - sum2) / (s2 * s2 * sum * sum));

        let r = precision_finite(&p, &ObservableSpec::s_y());
        assert!((r.variance_theta - want).abs() < 1e-12);
        assert!((r.precision * r.variance_theta - 1.0).abs() < 1e-12);
        assert!(
            r.precision <= qfi_closed_form(&p).value + 1e-9,
            "Cramer-Rao"
        );
    }

    #[test]
    fn precision_saturates_qfi_at_orthogonal_branches() {
        // sigma = 0, |F| = N = 1, 2Jt/sqrt(N) = pi/2: Var = 1/4, precision = F_max
        let cs = CouplingSet::from_values(vec![1.0], 1.0, 1.0).unwrap();
        let p = ModelPoint::new(0.6, FRAC_PI_4, &cs, 1).unwrap();
        let r = precision_finite(&p, &ObservableSpec::s_y());
        assert!((r.variance_theta - 0.25).abs() < 1e-12);
        assert!((r.precision - 4.0).abs() < 1e-10);
        assert!((qfi_closed_form(&p).value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cramer_rao_holds_across_points_and_q() {
        let spec = GaussianCouplingSpec::new(0.5, 0.5).unwrap();
        for seed in 0..5 {
            let cs = sample_couplings(&spec, 8, seed).unwrap();
            for &q in &[0.0, 0.3, 0.7] {
                let ospec = ObservableSpec::new(q).unwrap();
                for k in 1..10 {
                    let t = 0.4 * k as f64;
                    let p = ModelPoint::new(0.6, t, &cs, 3).unwrap();
                    let r = precision_finite(&p, &ospec);
                    let f = qfi_closed_form(&p).value;
                    assert!(
                        r.precision <= f + 1e-9,
                        "seed {seed} q {q} t {t}: {} vs {f}",
                        r.precision
                    );
                }
            }
        }
    }

    #[test]
    fn sx_sz_carry_no_information() {
        // derivative of <S_x>, <S_z> is identically zero; the finite
        // difference only measures rounding noise, so a wider step just
        // suppresses it (there is no truncation term to trade off)
        let cs = fixed_couplings();
        let h = 1e-4;
        for &th in &[0.3, 0.7, 1.2] {
            for &fsz in &[1usize, 3] {
                let rho_p = fragment_state(&ModelPoint::new(th + h, 0.9, &cs, fsz).unwrap())
                    .unwrap()
                    .rho;
                let rho_m = fragment_state(&ModelPoint::new(th - h, 0.9, &cs, fsz).unwrap())
                    .unwrap()
                    .rho;
                for pauli in [pauli_x(), pauli_z()] {
                    let op = spin_sum(&pauli, fsz);
                    let d = (trace_re(&(&op * &rho_p)) - trace_re(&(&op * &rho_m))) / (2.0 * h);
                    assert!(d.abs() <= 1e-10, "theta {th} |F| {fsz}: {d:e}");
                }
            }
        }
    }

    #[test]
    fn thermodynamic_precision_values() {
        let spec = ObservableSpec::s_y();
        // t = tau_Y: Var = 1/2, precision = 2
        let (theta, f, jm) = (FRAC_PI_4, 0.2f64, 0.5);
        let tau_y = 1.0 / (2.0 * jm * f.sqrt());
        let r = precision_thermodynamic(theta, tau_y, f, jm, &spec).unwrap();
        assert!((r.variance_theta - 0.5).abs() < 1e-12);
        assert!((r.precision - 2.0).abs() < 1e-12);
        // long times approach F_max
        let r = precision_thermodynamic(theta, 1e6, f, jm, &spec).unwrap();
        assert!((r.precision - 4.0).abs() < 1e-9);
        // short-time quadratic law within 1% for t <= 0.1 tau_Y
        for k in 1..=10 {
            let t = 0.01 * k as f64 * tau_y;
            let r = precision_thermodynamic(theta, t, f, jm, &spec).unwrap();
            let quad = 4.0 * (t / tau_y).powi(2);
            let ratio = r.precision / quad;
            assert!(
                (0.99..=1.0).contains(&ratio),
                "t/tau_Y = {}: {ratio}",
                t / tau_y
            );
        }
    }

    #[test]
    fn thermodynamic_precision_domain() {
        let spec = ObservableSpec::s_y();
        assert!(matches!(
            precision_thermodynamic(0.5, 1.0, 0.2, 0.0, &spec),
            Err(Error::ZeroMeanEnsemble)
        ));
        assert!(precision_thermodynamic(0.5, 1.0, 0.0, 0.5, &spec).is_err());
        // pointer state and t = 0 give the infinite marker, not an error
        let r = precision_thermodynamic(0.0, 1.0, 0.2, 0.5, &spec).unwrap();
        assert!(r.variance_theta.is_infinite() && r.precision == 0.0);
        let r = precision_thermodynamic(0.5, 0.0, 0.2, 0.5, &spec).unwrap();
        assert!(r.variance_theta.is_infinite());
    }

    #[test]
    fn thermodynamic_variance_increases_with_q() {
        let mut prev = 0.0;
        for k in 0..10 {
            let q = 0.1 * k as f64;
            let spec = ObservableSpec::new(q).unwrap();
            let r = precision_thermodynamic(0.5, 1.3, 0.2, 0.5, &spec).unwrap();
            assert!(r.variance_theta > prev, "q = {q}");
            prev = r.variance_theta;
        }
    }

    #[test]
    fn observable_spec_rejects_insensitive_q() {
        assert!(ObservableSpec::new(1.0).is_err());
        assert!(ObservableSpec::new(-0.1).is_err());
        assert!(ObservableSpec::new(0.999).is_ok());
    }
}
