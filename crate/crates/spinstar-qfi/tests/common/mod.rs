//! Shared helpers for the integration suites, including the literal
//! vectorized-superoperator QFI as an implementation-independent second
//! route (the library itself uses the spectral form).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinstar_qfi::linalg::{eig_hermitian, kron, vectorize, CMatrix};
use spinstar_qfi::spinstar::{sample_couplings, CouplingSet, GaussianCouplingSpec};

/// Reference coupling ensemble (mean 0.5, std 0.5).
pub fn gaussian(n: usize, seed: u64) -> CouplingSet {
    sample_couplings(
        &GaussianCouplingSpec {
            jmean: 0.5,
            jstd: 0.5,
        },
        n,
        seed,
    )
    .unwrap()
}

/// Environment sizes and fragment sizes of the exact-reference test matrix.
pub fn reference_matrix() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &n in &[4usize, 6, 8, 10] {
        for fsz in 1..=4usize.min(n) {
            out.push((n, fsz));
        }
    }
    out
}

/// Seeded (θ, t) evaluation points with θ inside the open interval.
pub fn seeded_points(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                rng.gen_range(0.05..(std::f64::consts::FRAC_PI_2 - 0.05)),
                rng.gen_range(0.0..3.0),
            )
        })
        .collect()
}

/// QFI through the literal vectorized formula,
/// `F = 2 V[∂ρ]† (ρᵀ⊗I + I⊗ρ)⁺ V[∂ρ]`,
/// with the pseudo-inverse taken on the support (eigenvalues above 1e-12).
/// Independent of the library's spectral evaluation path.
pub fn qfi_vectorized_pinv(rho: &CMatrix, drho: &CMatrix) -> f64 {
    let n = rho.nrows();
    let eye = CMatrix::identity(n, n);
    let superop = kron(&rho.transpose(), &eye) + kron(&eye, rho);
    let eig = eig_hermitian(&superop).expect("superoperator is Hermitian");
    let v = vectorize(drho);
    let coeffs = eig.eigenvectors.adjoint() * &v;
    let mut x = coeffs.clone();
    for i in 0..x.len() {
        x[i] = if eig.eigenvalues[i] > 1e-12 {
            coeffs[i] / Complex64::new(eig.eigenvalues[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let f: Complex64 = coeffs
        .iter()
        .zip(x.iter())
        .map(|(c, xi)| c.conj() * xi)
        .sum();
    2.0 * f.re
}
