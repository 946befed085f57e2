//! Dense complex matrices: small-system oracles and non-qubit representations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliTerm};

/// Largest qubit count for which dense `2^n x 2^n` matrices are built.
pub const DENSE_QUBIT_CAP: usize = 12;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros_for_qubits(n: usize) -> Result<CMatrix> {
    if n > DENSE_QUBIT_CAP {
        return Err(Error::Infeasible(format!("dense matrix for {n} qubits (cap {DENSE_QUBIT_CAP})")));
    }
    let d = 1usize << n;
    Ok(CMatrix::zeros(d, d))
}

/// `m += w * P`.
pub fn add_pauli(m: &mut CMatrix, p: &PauliTerm, w: Complex64) {
    for b in 0..m.ncols() {
        let (e, b2) = p.apply_basis(b as u64);
        m[(b2 as usize, b)] += w * i_pow(e);
    }
}

/// Skew-Hermitian dense matrix treated as a Lie algebra element.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSkew {
    pub m: CMatrix,
}

impl DenseSkew {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        let dev = (&m + m.adjoint()).norm();
        if dev > 1e-9 * m.norm().max(1.0) {
            return Err(Error::Invalid(format!("matrix is not skew-Hermitian (deviation {dev:.2e})")));
        }
        Ok(DenseSkew { m })
    }

    /// `i * h` for a Hermitian `h`.
    pub fn from_hermitian(h: &CMatrix) -> Result<Self> {
        DenseSkew::new(h * c(0.0, 1.0))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// The Hermitian matrix `-i * self`.
    pub fn hermitian(&self) -> CMatrix {
        &self.m * c(0.0, -1.0)
    }
}

/// Spin matrices `(S_x, S_y, S_z)` in the `d`-dimensional irrep, basis ordered
/// by decreasing `m = s, s-1, ..., -s` with `s = (d-1)/2`.
pub fn spin_matrices(d: usize) -> Result<(CMatrix, CMatrix, CMatrix)> {
    if d < 2 {
        return Err(Error::Invalid("spin irrep needs dimension >= 2".into()));
    }
    let s = (d as f64 - 1.0) / 2.0;
    let mut sp = CMatrix::zeros(d, d);
    let mut sz = CMatrix::zeros(d, d);
    for a in 0..d {
        let m = s - a as f64;
        sz[(a, a)] = c(m, 0.0);
        if a > 0 {
            // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>
            sp[(a - 1, a)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * c(0.5, 0.0);
    let sy = (&sp - &sm) * c(0.0, -0.5);
    Ok((sx, sy, sz))
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and unitary
/// eigenvector matrix (columns).
pub fn hermitian_eigen(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let e = nalgebra::SymmetricEigen::new(h.clone());
    (e.eigenvalues, e.eigenvectors)
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_op_norm(h: &CMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(h);
    vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `-Tr(a b)`, real part.
pub fn skew_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    -s.re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_commutation() {
        for d in 2..7 {
            let (sx, sy, sz) = spin_matrices(d).unwrap();
            let comm = &sx * &sy - &sy * &sx;
            assert!((comm - &sz * c(0.0, 1.0)).norm() < 1e-12);
            let s = (d as f64 - 1.0) / 2.0;
            let cas = &sx * &sx + &sy * &sy + &sz * &sz;
            assert!((cas - CMatrix::identity(d, d) * c(s * (s + 1.0), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let (sx, sy, _) = spin_matrices(4).unwrap();
        let h = &sx + &sy * c(0.3, 0.0);
        let (vals, vecs) = hermitian_eigen(&h);
        let diag = CMatrix::from_diagonal(&vals.map(|v| c(v, 0.0)));
        let back = &vecs * diag * vecs.adjoint();
        assert!((back - h).norm() < 1e-12);
    }
}
