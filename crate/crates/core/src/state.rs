//! Initial states.

use num_complex::Complex64;

use crate::dense::CMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Computational basis state; bit `q` of `bits` is qubit `q`.
    Bits { n: usize, bits: u64 },
    /// `|+>^n`.
    Uniform { n: usize },
    /// `I / dim` on `n` qubits.
    MaximallyMixed { n: usize },
    /// Normalized state vector of any dimension.
    Vector(Vec<Complex64>),
    /// Density matrix of any dimension.
    Density(CMatrix),
}

impl InitialState {
    /// Basis state with the first `k` qubits set.
    pub fn hamming(n: usize, k: usize) -> Result<Self> {
        if k > n || n > 64 {
            return Err(Error::Invalid(format!("Hamming weight {k} on {n} qubits")));
        }
        let bits = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Ok(InitialState::Bits { n, bits })
    }

    pub fn vector(v: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if v.is_empty() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("state vector norm^2 is {norm}")));
        }
        Ok(InitialState::Vector(v))
    }

    /// Hilbert space dimension.
    pub fn dim(&self) -> Result<usize> {
        match self {
            InitialState::Bits { n, .. } | InitialState::Uniform { n } | InitialState::MaximallyMixed { n } => {
                1usize.checked_shl(*n as u32).filter(|_| *n < 63).ok_or(Error::TooManyQubits { n: *n, limit: 62 })
            }
            InitialState::Vector(v) => Ok(v.len()),
            InitialState::Density(m) => Ok(m.nrows()),
        }
    }

    /// Dense state vector, if the state is pure.
    pub fn to_vector(&self) -> Result<Vec<Complex64>> {
        let d = self.dim()?;
        if d > 1 << 26 {
            return Err(Error::Infeasible(format!("state vector of dimension {d}")));
        }
        match self {
            InitialState::Bits { bits, .. } => {
                let mut v = vec![Complex64::new(0.0, 0.0); d];
                v[*bits as usize] = Complex64::new(1.0, 0.0);
                Ok(v)
            }
            InitialState::Uniform { .. } => Ok(vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d]),
            InitialState::Vector(v) => Ok(v.clone()),
            _ => Err(Error::Invalid("mixed state has no state vector".into())),
        }
    }

    pub fn to_density(&self) -> Result<CMatrix> {
        match self {
            InitialState::Density(m) => Ok(m.clone()),
            InitialState::MaximallyMixed { .. } => {
                let d = self.dim()?;
                Ok(CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0))
            }
            _ => {
                let v = nalgebra::DVector::from_vec(self.to_vector()?);
                Ok(&v * v.adjoint())
            }
        }
    }
}
