//! Quantum compound ansatz: generators, gate layouts and closed-form
//! predictions.
//!
//! For a pair `i < j` the Jordan-Wigner string acts with `Z` on the qubits
//! strictly between `i` and `j`:
//!
//! - `h_x = -(i/4)(X_i X_j + Y_i Y_j) Z_(i,j)`
//! - `h_y = -(i/4)(Y_i X_j - X_i Y_j) Z_(i,j)`
//! - `h_z = -(i/4)(Z_i - Z_j)`

use serde::{Deserialize, Serialize};

use crate::dense::{hermitian_op_norm, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::{PauliTerm, SkewElement, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `h_x` and `h_y` on every pair; closes to `su(n)`.
    Su,
    /// `h_y` only; closes to `so(n)`.
    So,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Alternating layers on pairs `(0,1),(2,3),...` and `(1,2),(3,4),...`.
    Brick,
    /// Nearest-neighbour staircases of decreasing length.
    Pyramid,
    /// `(0,1),(1,2),...,(n-2,n-1)`.
    Staircase,
    /// Every pair `i < j`, in lexicographic order.
    All,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "su" => Ok(Variant::Su),
            "so" => Ok(Variant::So),
            _ => Err(Error::Parse(format!("unknown variant '{s}'"))),
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "brick" => Ok(Topology::Brick),
            "pyramid" => Ok(Topology::Pyramid),
            "staircase" => Ok(Topology::Staircase),
            "all" => Ok(Topology::All),
            _ => Err(Error::Parse(format!("unknown topology '{s}'"))),
        }
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
    }
    if i >= j || j >= n {
        return Err(Error::Invalid(format!("pair ({i},{j}) invalid for n={n}")));
    }
    Ok(())
}

fn between(i: usize, j: usize) -> u64 {
    let mut m = 0u64;
    for q in i + 1..j {
        m |= 1 << q;
    }
    m
}

fn two_site(n: usize, i: usize, j: usize, a: char, b: char) -> Result<PauliTerm> {
    let pa = PauliTerm::single(n, i, a)?;
    let pb = PauliTerm::single(n, j, b)?;
    PauliTerm::new(n, pa.x_mask() | pb.x_mask(), pa.z_mask() | pb.z_mask() | between(i, j))
}

pub fn h_x(n: usize, i: usize, j: usize) -> Result<SkewElement> {
    check_pair(n, i, j)?;
    SkewElement::from_terms(n, [(-0.25, two_site(n, i, j, 'X', 'X')?), (-0.25, two_site(n, i, j, 'Y', 'Y')?)])
}

pub fn h_y(n: usize, i: usize, j: usize) -> Result<SkewElement> {
    check_pair(n, i, j)?;
    SkewElement::from_terms(n, [(-0.25, two_site(n, i, j, 'Y', 'X')?), (0.25, two_site(n, i, j, 'X', 'Y')?)])
}

pub fn h_z(n: usize, i: usize, j: usize) -> Result<SkewElement> {
    check_pair(n, i, j)?;
    SkewElement::from_terms(n, [(-0.25, PauliTerm::single(n, i, 'Z')?), (0.25, PauliTerm::single(n, j, 'Z')?)])
}

/// Gate pairs grouped into the sub-layers that repeat through the circuit.
pub fn layer_pattern(n: usize, topology: Topology) -> Result<Vec<Vec<(usize, usize)>>> {
    if n < 2 {
        return Err(Error::Invalid("compound ansatz needs n >= 2".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
    }
    Ok(match topology {
        Topology::Brick => {
            let a: Vec<_> = (0..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
            let b: Vec<_> = (1..n - 1).step_by(2).map(|i| (i, i + 1)).collect();
            if b.is_empty() {
                vec![a]
            } else {
                vec![a, b]
            }
        }
        Topology::Staircase => vec![(0..n - 1).map(|i| (i, i + 1)).collect()],
        Topology::Pyramid => vec![(1..n).rev().flat_map(|s| (0..s).map(|i| (i, i + 1))).collect()],
        Topology::All => vec![(0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()],
    })
}

/// Generators of one gate on a pair, in application order: `h_y` then `h_x`
/// for `Su`, `h_y` alone for `So`.
pub fn gate_generators(n: usize, i: usize, j: usize, variant: Variant) -> Result<Vec<SkewElement>> {
    match variant {
        Variant::Su => Ok(vec![h_y(n, i, j)?, h_x(n, i, j)?]),
        Variant::So => Ok(vec![h_y(n, i, j)?]),
    }
}

/// Distinct generators used by a topology, for closure.
pub fn build_generators(n: usize, topology: Topology, variant: Variant) -> Result<Vec<SkewElement>> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for layer in layer_pattern(n, topology)? {
        for (i, j) in layer {
            if seen.insert((i, j)) {
                out.extend(gate_generators(n, i, j, variant)?);
            }
        }
    }
    Ok(out)
}

/// `k(n-k) / (2(n^2-1)^2)`: variance for a Hamming-weight-`k` basis state,
/// observable `-i h_z` and any single compound generator.
pub fn predict_basis_state(n: usize, k: usize) -> Result<f64> {
    if n < 2 || k > n {
        return Err(Error::Invalid(format!("n={n}, k={k}")));
    }
    let (n, k) = (n as f64, k as f64);
    Ok(k * (n - k) / (2.0 * (n * n - 1.0).powi(2)))
}

/// `n(n-1) / (16(n^2-1)^2)`: the same for the uniform superposition.
pub fn predict_uniform(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Invalid(format!("n={n}")));
    }
    let n = n as f64;
    Ok(n * (n - 1.0) / (16.0 * (n * n - 1.0).powi(2)))
}

/// Representation index of the full compound representation,
/// `sum_k C(n-2, k-1) = 2^(n-2)`; converts rep-level Frobenius quantities into
/// the normalized ones used by the closed forms.
pub fn compound_index(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Invalid(format!("n={n}")));
    }
    Ok(2f64.powi(n as i32 - 2))
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul(n - i).ok_or_else(|| Error::Overflow(format!("C({n},{k})")))? / (i + 1);
    }
    Ok(r)
}

/// `C(n,n/2)^2 (n+1) / (n/2+1)^2` for even `n`.
pub fn dim_v_lambda0(n: usize) -> Result<u128> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Invalid(format!("dim V_lambda0 needs even n >= 2, got {n}")));
    }
    let (nn, m) = (n as u128, n as u128 / 2);
    let b = binomial(nn, m)?;
    let over = || Error::Overflow(format!("dim V for n={n}"));
    let num = b.checked_mul(b).and_then(|x| x.checked_mul(nn + 1)).ok_or_else(over)?;
    let den = (m + 1) * (m + 1);
    if num % den != 0 {
        return Err(Error::Validation(format!("non-integer dimension for n={n}")));
    }
    Ok(num / den)
}

/// Computational basis states of Hamming weight `k`, ascending.
pub fn hamming_states(n: usize, k: usize) -> Result<Vec<u64>> {
    if n > 30 {
        return Err(Error::Infeasible(format!("enumerating Hamming sector for n={n}")));
    }
    Ok((0u64..1 << n).filter(|b| b.count_ones() as usize == k).collect())
}

/// Matrix of the Hermitian `-i h` restricted to the Hamming-weight-`k` sector.
pub fn restrict_to_sector(h: &SkewElement, k: usize) -> Result<CMatrix> {
    let n = h.n_qubits();
    let states = hamming_states(n, k)?;
    let index: std::collections::HashMap<u64, usize> = states.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut m = CMatrix::zeros(states.len(), states.len());
    for (col, &b) in states.iter().enumerate() {
        let mut leaked: std::collections::HashMap<u64, num_complex::Complex64> = Default::default();
        for (p, c) in h.iter() {
            let (e, b2) = p.apply_basis(b);
            let amp = crate::pauli::i_pow(e) * c;
            match index.get(&b2) {
                Some(&row) => m[(row, col)] += amp,
                None => *leaked.entry(b2).or_default() += amp,
            }
        }
        if leaked.values().any(|a| a.norm() > 1e-12) {
            return Err(Error::Invalid(format!("operator does not preserve the weight-{k} sector")));
        }
    }
    Ok(m)
}

/// `2 ||H||_op^2 / dim V_lambda0`, with the operator norm taken on the
/// Hamming-weight-`n/2` sector.
pub fn projector_bound(n: usize, h: &SkewElement) -> Result<f64> {
    if h.n_qubits() != n {
        return Err(Error::QubitMismatch { left: n, right: h.n_qubits() });
    }
    let dim = dim_v_lambda0(n)? as f64;
    let op = hermitian_op_norm(&restrict_to_sector(h, n / 2)?);
    Ok(2.0 * op * op / dim)
}
