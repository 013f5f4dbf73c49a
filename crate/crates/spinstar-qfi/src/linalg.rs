//! Minimal dense complex linear algebra: Kronecker products, vectorization,
//! partial traces and Hermitian eigendecomposition.
//!
//! Everything here operates on plain dense matrices. The state spaces in this
//! crate stay small (fragment dimensions at most 2^10, exact statevectors at
//! most 2^13), so no sparsity machinery is warranted.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the carrier for all states and operators.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const C_ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const C_I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// 2x2 identity.
pub fn identity2() -> CMatrix {
    CMatrix::identity(2, 2)
}

/// Pauli x in the basis |up> = (1,0)^T, |down> = (0,1)^T.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C_ZERO, C_ONE, C_ONE, C_ZERO])
}

/// Pauli y.
pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C_ZERO, -C_I, C_I, C_ZERO])
}

/// Pauli z.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C_ONE, C_ZERO, C_ZERO, -C_ONE])
}

/// Kronecker product `a ⊗ b`; dimensions multiply factor-wise.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a sequence of factors, left to right.
/// The empty product is the 1x1 identity.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, C_ONE);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Kronecker product of column vectors.
pub fn kron_vec_all<'a>(factors: impl IntoIterator<Item = &'a CVector>) -> CVector {
    let mut out = CVector::from_element(1, C_ONE);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Column-stacking vectorization: column j of `a` occupies block j of the output.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Exact inverse of [`vectorize`].
pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            actual: v.len(),
        });
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Partial trace of a square matrix over a tensor-product space.
///
/// `dims` lists the factor dimensions in tensor order (leftmost factor first,
/// matching [`kron`]); `keep` selects the factors that survive, and the result
/// is expressed on the kept factors in their original order. The trace is
/// preserved.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if rho.nrows() != rho.ncols() || rho.nrows() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            actual: rho.nrows(),
        });
    }
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::BadSubsystemIndex {
                index: k,
                n_factors: dims.len(),
            });
        }
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::config("duplicate subsystem index in partial trace"));
    }

    let trace_out: Vec<usize> = (0..dims.len())
        .filter(|i| !keep_sorted.contains(i))
        .collect();
    // stride of factor i in the flattened index (leftmost factor most significant)
    let stride: Vec<usize> = (0..dims.len())
        .map(|i| dims[i + 1..].iter().product())
        .collect();
    let kept_dim: usize = keep_sorted.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = trace_out.iter().map(|&i| dims[i]).product();

    // full index of a (kept multi-index, traced multi-index) pair
    let expand = |flat: usize, factors: &[usize]| -> usize {
        let mut rem = flat;
        let mut idx = 0;
        for &fi in factors.iter().rev() {
            idx += (rem % dims[fi]) * stride[fi];
            rem /= dims[fi];
        }
        idx
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        let base_a = expand(a, &keep_sorted);
        for b in 0..kept_dim {
            let base_b = expand(b, &keep_sorted);
            let mut acc = C_ZERO;
            for r in 0..traced_dim {
                let off = expand(r, &trace_out);
                acc += rho[(base_a + off, base_b + off)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Max-entry deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let mut res = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            res = res.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    res
}

/// Max-entry absolute difference between two matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted ascending; the columns of `eigenvectors`
/// are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEigenSystem {
    /// Rebuild `U diag(λ) U†`; used to bound decomposition error in tests.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&self.eigenvalues.map(|x| Complex64::new(x, 0.0)));
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

/// Tolerance on the Hermiticity residual accepted by [`eig_hermitian`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition with ascending eigenvalue order.
///
/// Cyclic complex Jacobi iteration; chosen over a shifted-QR route because
/// at the dimensions used here (at most a few hundred) it converges to
/// machine-precision residuals. Rejects inputs whose Hermiticity residual
/// exceeds [`HERMITICITY_TOL`], carrying the residual in the error.
pub fn eig_hermitian(a: &CMatrix) -> Result<HermitianEigenSystem> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    let residual = hermiticity_residual(a);
    if residual > HERMITICITY_TOL {
        return Err(Error::NotHermitian { residual });
    }
    // symmetrize so the iteration sees an exactly Hermitian input
    let mut m = (a + a.adjoint()).scale(0.5);
    let n = a.nrows();
    let mut vecs = CMatrix::identity(n, n);

    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-15 * scale;
    const MAX_SWEEPS: usize = 60;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= tol {
                    continue;
                }
                // unitary 2x2 rotation zeroing the (p,q) element:
                // tan(2θ) = 2r/(a_pp - a_qq), phase from a_pq
                let phase = apq / r;
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let tau = (alpha - beta) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let spos = phase.scale(s); //  s e^{iφ}
                let sneg = phase.conj().scale(s); //  s e^{-iφ}

                // rows p and q of m ← U† m, with U = [[c, -s e^{iφ}], [s e^{-iφ}, c]]
                for k in 0..n {
                    let mp = m[(p, k)];
                    let mq = m[(q, k)];
                    m[(p, k)] = mp.scale(c) + spos * mq;
                    m[(q, k)] = -sneg * mp + mq.scale(c);
                }
                // columns p and q of m ← m U, and accumulate eigenvectors
                for k in 0..n {
                    let mp = m[(k, p)];
                    let mq = m[(k, q)];
                    m[(k, p)] = mp.scale(c) + sneg * mq;
                    m[(k, q)] = -spos * mp + mq.scale(c);

                    let vp = vecs[(k, p)];
                    let vq = vecs[(k, q)];
                    vecs[(k, p)] = vp.scale(c) + sneg * vq;
                    vecs[(k, q)] = -spos * vp + vq.scale(c);
                }
                m[(p, q)] = C_ZERO;
                m[(q, p)] = C_ZERO;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)].re));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        eigenvectors.set_column(col, &vecs.column(i));
    }
    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}
