//! The operations the closure, decomposition and variance code need from an
//! algebra element, implemented for sparse Pauli sums and dense matrices.

use num_complex::Complex64;

use crate::dense::{self, CMatrix, DenseSkew};
use crate::error::{Error, Result};
use crate::pauli::SkewElement;
use crate::state::InitialState;

pub trait LieElement: Clone + Send + Sync + std::fmt::Debug {
    /// Dimension of the Hilbert space the element acts on.
    fn rep_dim(&self) -> usize;
    fn bracket(&self, other: &Self) -> Result<Self>;
    /// `-Tr(A B)`.
    fn inner(&self, other: &Self) -> Result<f64>;
    fn norm_sq(&self) -> f64;
    fn scaled(&self, s: f64) -> Self;
    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self) -> Result<()>;
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool {
        self.norm_sq() == 0.0
    }
    /// `<self, i rho>`, i.e. `Tr(K rho)` for `self = iK`.
    fn state_coordinate(&self, state: &InitialState) -> Result<f64>;
    /// Dense matrix, for small-system oracles.
    fn to_matrix(&self) -> Result<CMatrix>;
}

impl LieElement for SkewElement {
    fn rep_dim(&self) -> usize {
        1usize << self.n_qubits().min(63)
    }

    fn bracket(&self, other: &Self) -> Result<Self> {
        SkewElement::bracket(self, other)
    }

    fn inner(&self, other: &Self) -> Result<f64> {
        SkewElement::inner(self, other)
    }

    fn norm_sq(&self) -> f64 {
        self.frobenius_sq()
    }

    fn scaled(&self, s: f64) -> Self {
        SkewElement::scaled(self, s)
    }

    fn axpy(&mut self, a: f64, x: &Self) -> Result<()> {
        SkewElement::axpy(self, a, x)
    }

    fn zero_like(&self) -> Self {
        SkewElement::zero(self.n_qubits())
    }

    fn is_zero(&self) -> bool {
        self.is_empty()
    }

    fn state_coordinate(&self, state: &InitialState) -> Result<f64> {
        let n = self.n_qubits();
        let check = |m: usize| if m == n { Ok(()) } else { Err(Error::QubitMismatch { left: n, right: m }) };
        match state {
            InitialState::Bits { n: m, bits } => {
                check(*m)?;
                Ok(self.iter().filter_map(|(p, c)| p.diagonal_sign(*bits).map(|s| s * c)).sum())
            }
            InitialState::Uniform { n: m } => {
                check(*m)?;
                Ok(self.iter().filter(|(p, _)| p.z_mask() == 0).map(|(_, c)| c).sum())
            }
            InitialState::MaximallyMixed { n: m } => {
                check(*m)?;
                Ok(self.iter().filter(|(p, _)| p.is_identity()).map(|(_, c)| c).sum())
            }
            InitialState::Vector(v) => {
                if v.len() != self.rep_dim() || n > 62 {
                    return Err(Error::Dimension(format!("state of length {} for {n} qubits", v.len())));
                }
                self.hermitian_expectation(v)
            }
            InitialState::Density(rho) => {
                let k = self.to_hermitian().to_dense()?;
                if rho.nrows() != k.nrows() {
                    return Err(Error::Dimension("density matrix size".into()));
                }
                Ok((k * rho).trace().re)
            }
        }
    }

    fn to_matrix(&self) -> Result<CMatrix> {
        self.to_dense()
    }
}

impl LieElement for DenseSkew {
    fn rep_dim(&self) -> usize {
        self.dim()
    }

    fn bracket(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("dense elements of different size".into()));
        }
        Ok(DenseSkew { m: &self.m * &other.m - &other.m * &self.m })
    }

    fn inner(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("dense elements of different size".into()));
        }
        Ok(dense::skew_inner(&self.m, &other.m))
    }

    fn norm_sq(&self) -> f64 {
        self.m.norm_squared()
    }

    fn scaled(&self, s: f64) -> Self {
        DenseSkew { m: &self.m * Complex64::new(s, 0.0) }
    }

    fn axpy(&mut self, a: f64, x: &Self) -> Result<()> {
        if self.dim() != x.dim() {
            return Err(Error::Dimension("dense elements of different size".into()));
        }
        self.m += &x.m * Complex64::new(a, 0.0);
        Ok(())
    }

    fn zero_like(&self) -> Self {
        DenseSkew { m: CMatrix::zeros(self.dim(), self.dim()) }
    }

    fn is_zero(&self) -> bool {
        self.m.iter().all(|z| z.norm_sqr() < 1e-24)
    }

    fn state_coordinate(&self, state: &InitialState) -> Result<f64> {
        let k = self.hermitian();
        if state.dim()? != self.dim() {
            return Err(Error::Dimension("state dimension".into()));
        }
        match state {
            InitialState::Density(_) | InitialState::MaximallyMixed { .. } => Ok((k * state.to_density()?).trace().re),
            _ => {
                let v = nalgebra::DVector::from_vec(state.to_vector()?);
                Ok((v.adjoint() * k * &v)[(0, 0)].re)
            }
        }
    }

    fn to_matrix(&self) -> Result<CMatrix> {
        Ok(self.m.clone())
    }
}
