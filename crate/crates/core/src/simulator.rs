//! State-vector simulation of periodic ansatze and Monte Carlo estimation of
//! the gradient variance.
//!
//! A gate is `exp(-theta G)` with `G` skew-Hermitian. Pauli-sum generators are
//! grouped by X mask; a group with a single mask acts on pairs
//! `(b, b ^ mask)` as a 2x2 rotation, which is exact whether or not its terms
//! commute. Generators with several masks must have mutually commuting terms
//! and are applied as a product of groups.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compound::{gate_generators, hamming_states, layer_pattern, Topology, Variant};
use crate::dense::{hermitian_eigen, CMatrix, DenseSkew};
use crate::error::{Error, Result};
use crate::pauli::{i_pow, HermitianObservable, SkewElement};
use crate::state::InitialState;

/// Largest qubit count simulated on the full space.
pub const FULL_SPACE_QUBIT_CAP: usize = 24;

type C = Complex64;

fn zero() -> C {
    C::new(0.0, 0.0)
}

#[derive(Clone, Debug)]
pub enum Generator {
    Pauli(SkewElement),
    Dense(DenseSkew),
}

/// Where the state lives.
#[derive(Clone, Debug)]
pub enum Space {
    Full { n: usize },
    /// Computational basis states of fixed Hamming weight.
    Sector { n: usize, k: usize, states: Vec<u64>, index: Vec<u32> },
    Dense { dim: usize },
}

impl Space {
    pub fn full(n: usize) -> Result<Self> {
        if n > FULL_SPACE_QUBIT_CAP {
            return Err(Error::Infeasible(format!("full-space simulation of {n} qubits (cap {FULL_SPACE_QUBIT_CAP})")));
        }
        Ok(Space::Full { n })
    }

    pub fn sector(n: usize, k: usize) -> Result<Self> {
        if n > FULL_SPACE_QUBIT_CAP || k > n {
            return Err(Error::Infeasible(format!("Hamming sector n={n}, k={k}")));
        }
        let states = hamming_states(n, k)?;
        let mut index = vec![u32::MAX; 1 << n];
        for (a, &b) in states.iter().enumerate() {
            index[b as usize] = a as u32;
        }
        Ok(Space::Sector { n, k, states, index })
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Full { n } => 1 << n,
            Space::Sector { states, .. } => states.len(),
            Space::Dense { dim } => *dim,
        }
    }

    fn basis_state(&self, a: usize) -> u64 {
        match self {
            Space::Sector { states, .. } => states[a],
            _ => a as u64,
        }
    }

    fn position(&self, b: u64) -> Option<usize> {
        match self {
            Space::Full { n } => ((b >> n) == 0).then_some(b as usize),
            Space::Sector { index, .. } => index.get(b as usize).filter(|&&i| i != u32::MAX).map(|&i| i as usize),
            Space::Dense { dim } => ((b as usize) < *dim).then_some(b as usize),
        }
    }

    /// Pure initial state as amplitudes in this space.
    pub fn state_vector(&self, st: &InitialState) -> Result<Vec<C>> {
        match (self, st) {
            (Space::Sector { n, k, .. }, InitialState::Bits { n: m, bits }) => {
                if n != m || bits.count_ones() as usize != *k {
                    return Err(Error::Invalid(format!("state is not in the weight-{k} sector of {n} qubits")));
                }
                let mut v = vec![zero(); self.dim()];
                v[self.position(*bits).expect("weight checked")] = C::new(1.0, 0.0);
                Ok(v)
            }
            (Space::Sector { .. }, _) => Err(Error::Invalid("sector simulation needs a basis-state input".into())),
            _ => {
                let v = st.to_vector()?;
                if v.len() != self.dim() {
                    return Err(Error::Dimension(format!("state of dimension {} in space of dimension {}", v.len(), self.dim())));
                }
                Ok(v)
            }
        }
    }
}

/// Terms sharing one X mask: `G|b> = g(b)|b ^ mask>` with
/// `g(b) = sum_t w_t (-1)^{|z_t & b|}`.
#[derive(Clone, Debug)]
struct MaskGroup {
    mask: u64,
    terms: Vec<(u64, C)>,
}

impl MaskGroup {
    fn g(&self, b: u64) -> C {
        let mut s = zero();
        for &(z, w) in &self.terms {
            if (z & b).count_ones() % 2 == 0 {
                s += w;
            } else {
                s -= w;
            }
        }
        s
    }

    fn rotate(&self, space: &Space, theta: f64, psi: &mut [C]) {
        let dim = psi.len();
        if self.mask == 0 {
            for (a, amp) in psi.iter_mut().enumerate() {
                let g = self.g(space.basis_state(a));
                *amp *= (-g * theta).exp();
            }
            return;
        }
        for a in 0..dim {
            let b = space.basis_state(a);
            let b2 = b ^ self.mask;
            if b2 < b {
                continue;
            }
            let gb = self.g(b);
            let mag = gb.norm();
            if mag == 0.0 {
                continue;
            }
            // leaving the space is ruled out when the circuit is compiled
            let a2 = match space.position(b2) {
                Some(a2) => a2,
                None => continue,
            };
            let gb2 = self.g(b2);
            let (c, s) = ((theta * mag).cos(), (theta * mag).sin() / mag);
            let (x, y) = (psi[a], psi[a2]);
            psi[a] = x * c - gb2 * y * s;
            psi[a2] = y * c - gb * x * s;
        }
    }

    fn apply_add(&self, space: &Space, psi: &[C], out: &mut [C]) {
        for (a, &amp) in psi.iter().enumerate() {
            let b = space.basis_state(a);
            if let Some(a2) = space.position(b ^ self.mask) {
                out[a2] += self.g(b) * amp;
            }
        }
    }

    fn check_space(&self, space: &Space) -> Result<()> {
        for a in 0..space.dim() {
            let b = space.basis_state(a);
            if space.position(b ^ self.mask).is_none() && self.g(b).norm() > 1e-12 {
                return Err(Error::Invalid("generator does not preserve the simulation sector".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Kernel {
    Groups(Vec<MaskGroup>),
    Dense { vecs: CMatrix, vals: Vec<f64>, gen: CMatrix },
}

impl Kernel {
    fn compile(g: &Generator, space: &Space) -> Result<Kernel> {
        match (g, space) {
            (Generator::Pauli(s), Space::Full { n } | Space::Sector { n, .. }) => {
                if s.n_qubits() != *n {
                    return Err(Error::QubitMismatch { left: *n, right: s.n_qubits() });
                }
                let mut groups: BTreeMap<u64, Vec<(u64, C)>> = BTreeMap::new();
                for (p, c) in s.iter() {
                    // i P = i^{1 + |x&z|} X^x Z^z
                    let w = i_pow(1 + (p.x_mask() & p.z_mask()).count_ones()) * c;
                    groups.entry(p.x_mask()).or_default().push((p.z_mask(), w));
                }
                if groups.len() > 1 {
                    let terms: Vec<_> = s.iter().map(|(p, _)| p).collect();
                    for (i, a) in terms.iter().enumerate() {
                        if terms[i + 1..].iter().any(|b| !a.commutes_with(b)) {
                            return Err(Error::Invalid("generator terms with different X masks must commute".into()));
                        }
                    }
                }
                let groups: Vec<MaskGroup> = groups.into_iter().map(|(mask, terms)| MaskGroup { mask, terms }).collect();
                for gr in &groups {
                    gr.check_space(space)?;
                }
                Ok(Kernel::Groups(groups))
            }
            (Generator::Dense(d), Space::Dense { dim }) => {
                if d.dim() != *dim {
                    return Err(Error::Dimension("dense generator size".into()));
                }
                let (vals, vecs) = hermitian_eigen(&d.hermitian());
                Ok(Kernel::Dense { vecs, vals: vals.iter().copied().collect(), gen: d.m.clone() })
            }
            _ => Err(Error::Invalid("generator kind does not match the simulation space".into())),
        }
    }

    fn rotate(&self, space: &Space, theta: f64, psi: &mut [C]) {
        match self {
            Kernel::Groups(gs) => {
                for g in gs {
                    g.rotate(space, theta, psi);
                }
            }
            Kernel::Dense { vecs, vals, .. } => {
                // exp(-theta G) = exp(-i theta K) for G = iK
                let v = nalgebra::DVector::from_column_slice(psi);
                let mut w = vecs.adjoint() * v;
                for (x, &l) in w.iter_mut().zip(vals) {
                    *x *= C::new(0.0, -theta * l).exp();
                }
                psi.copy_from_slice((vecs * w).as_slice());
            }
        }
    }

    fn apply(&self, space: &Space, psi: &[C]) -> Vec<C> {
        match self {
            Kernel::Groups(gs) => {
                let mut out = vec![zero(); psi.len()];
                for g in gs {
                    g.apply_add(space, psi, &mut out);
                }
                out
            }
            Kernel::Dense { gen, .. } => (gen * nalgebra::DVector::from_column_slice(psi)).as_slice().to_vec(),
        }
    }
}

/// Observables the simulator can measure.
#[derive(Clone, Debug)]
pub enum Observable {
    Pauli(HermitianObservable),
    /// `|b><b|` for a computational basis state.
    BasisProjector(u64),
    Dense(CMatrix),
}

impl Observable {
    fn apply(&self, space: &Space, psi: &[C]) -> Result<Vec<C>> {
        let mut out = vec![zero(); psi.len()];
        match (self, space) {
            (Observable::Pauli(h), Space::Full { n } | Space::Sector { n, .. }) => {
                if h.n_qubits() != *n {
                    return Err(Error::QubitMismatch { left: *n, right: h.n_qubits() });
                }
                for (p, c) in h.iter() {
                    for (a, &amp) in psi.iter().enumerate() {
                        let (e, b2) = p.apply_basis(space.basis_state(a));
                        match space.position(b2) {
                            Some(a2) => out[a2] += amp * i_pow(e) * c,
                            None if amp.norm() > 0.0 && p.x_mask() != 0 => {
                                return Err(Error::Invalid("observable term leaves the simulation sector".into()))
                            }
                            None => {}
                        }
                    }
                }
            }
            (Observable::BasisProjector(b), Space::Full { .. } | Space::Sector { .. }) => {
                if let Some(a) = space.position(*b) {
                    out[a] = psi[a];
                }
            }
            (Observable::Dense(m), Space::Dense { dim }) if m.nrows() == *dim => {
                out.copy_from_slice((m * nalgebra::DVector::from_column_slice(psi)).as_slice());
            }
            _ => return Err(Error::Invalid("observable kind does not match the simulation space".into())),
        }
        Ok(out)
    }
}

/// Periodic ansatz: a list of generators and the sequence of gates (each a
/// generator index with its own parameter).
#[derive(Clone, Debug)]
pub struct AnsatzSpec {
    pub generators: Vec<Generator>,
    pub gates: Vec<usize>,
    /// Layer index of each gate.
    pub layer_of: Vec<usize>,
    /// Sampling range of each parameter.
    pub ranges: Vec<(f64, f64)>,
}

pub const DEFAULT_RANGE: (f64, f64) = (0.0, 4.0 * std::f64::consts::PI);

impl AnsatzSpec {
    /// `layers` repetitions of `pattern` (each entry a sub-layer of generator
    /// indices), cycling through the pattern.
    pub fn periodic(generators: Vec<Generator>, pattern: &[Vec<usize>], layers: usize, range: (f64, f64)) -> Result<Self> {
        if pattern.is_empty() || layers == 0 {
            return Err(Error::Invalid("empty ansatz".into()));
        }
        if !(range.1 > range.0) || !range.0.is_finite() || !range.1.is_finite() {
            return Err(Error::Invalid(format!("parameter range {range:?}")));
        }
        let (mut gates, mut layer_of) = (Vec::new(), Vec::new());
        for l in 0..layers {
            for &g in &pattern[l % pattern.len()] {
                if g >= generators.len() {
                    return Err(Error::Invalid(format!("generator index {g} out of range")));
                }
                gates.push(g);
                layer_of.push(l);
            }
        }
        if gates.is_empty() {
            return Err(Error::Invalid("ansatz has no gates".into()));
        }
        let ranges = vec![range; gates.len()];
        Ok(AnsatzSpec { generators, gates, layer_of, ranges })
    }

    /// Compound ansatz with one parameter per generator per gate.
    pub fn compound(n: usize, topology: Topology, variant: Variant, layers: usize) -> Result<Self> {
        let mut generators = Vec::new();
        let mut pattern = Vec::new();
        for sub in layer_pattern(n, topology)? {
            let mut idx = Vec::new();
            for (i, j) in sub {
                for g in gate_generators(n, i, j, variant)? {
                    idx.push(generators.len());
                    generators.push(Generator::Pauli(g));
                }
            }
            pattern.push(idx);
        }
        AnsatzSpec::periodic(generators, &pattern, layers, DEFAULT_RANGE)
    }

    pub fn n_params(&self) -> usize {
        self.gates.len()
    }

    /// Middle gate of the middle layer.
    pub fn default_slot(&self) -> usize {
        let layers = self.layer_of.last().map_or(0, |l| l + 1);
        let mid = layers / 2;
        let in_layer: Vec<usize> = (0..self.gates.len()).filter(|&g| self.layer_of[g] == mid).collect();
        in_layer.get(in_layer.len() / 2).copied().unwrap_or(self.gates.len() / 2)
    }

    pub fn slot_generator(&self, slot: usize) -> Result<&Generator> {
        let g = self.gates.get(slot).ok_or_else(|| Error::Invalid(format!("slot {slot} out of range")))?;
        Ok(&self.generators[*g])
    }
}

/// An ansatz bound to a simulation space.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub spec: AnsatzSpec,
    pub space: Space,
    kernels: Vec<Kernel>,
}

impl Circuit {
    pub fn new(spec: AnsatzSpec, space: Space) -> Result<Self> {
        let kernels = spec.generators.iter().map(|g| Kernel::compile(g, &space)).collect::<Result<Vec<_>>>()?;
        Ok(Circuit { spec, space, kernels })
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.spec.n_params() {
            return Err(Error::Dimension(format!("{} parameters for {} gates", theta.len(), self.spec.n_params())));
        }
        Ok(())
    }

    pub fn evolve(&self, theta: &[f64], psi0: &[C]) -> Result<Vec<C>> {
        self.check_theta(theta)?;
        let mut psi = psi0.to_vec();
        for (g, &t) in self.spec.gates.iter().zip(theta) {
            self.kernels[*g].rotate(&self.space, t, &mut psi);
        }
        Ok(psi)
    }

    pub fn expectation(&self, theta: &[f64], obs: &Observable, psi0: &[C]) -> Result<f64> {
        let psi = self.evolve(theta, psi0)?;
        let o = obs.apply(&self.space, &psi)?;
        Ok(psi.iter().zip(&o).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// `d<O>/d theta_slot = <phi| [G, A^dag O A] |phi>` where `phi` is the
    /// state right after the slot gate and `A` the rest of the circuit.
    pub fn gradient(&self, theta: &[f64], slot: usize, obs: &Observable, psi0: &[C]) -> Result<f64> {
        self.check_theta(theta)?;
        if slot >= theta.len() {
            return Err(Error::Invalid(format!("slot {slot} out of range")));
        }
        if psi0.len() != self.space.dim() {
            return Err(Error::Dimension("initial state size".into()));
        }
        let mut psi = psi0.to_vec();
        for g in 0..=slot {
            self.kernels[self.spec.gates[g]].rotate(&self.space, theta[g], &mut psi);
        }
        let phi = psi.clone();
        for g in slot + 1..theta.len() {
            self.kernels[self.spec.gates[g]].rotate(&self.space, theta[g], &mut psi);
        }
        let mut mu = obs.apply(&self.space, &psi)?;
        for g in (slot + 1..theta.len()).rev() {
            self.kernels[self.spec.gates[g]].rotate(&self.space, -theta[g], &mut mu);
        }
        let gmu = self.kernels[self.spec.gates[slot]].apply(&self.space, &mu);
        let z: C = phi.iter().zip(&gmu).map(|(a, b)| a.conj() * b).sum();
        Ok(2.0 * z.re)
    }

    /// Parameters for sample `index`: stream `index` of a ChaCha generator
    /// keyed by `seed`, so each sample is reproducible on its own.
    pub fn sample_parameters(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        self.spec.ranges.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct McEstimate {
    pub samples: usize,
    pub seed: u64,
    pub slot: usize,
    pub mean: f64,
    pub se_mean: f64,
    pub variance: f64,
    /// `sqrt((m4 - m2^2) / S)` from the fourth central moment.
    pub se_variance: f64,
    pub wall_ms: u64,
}

/// Summary statistics of a gradient sample.
pub fn summarize(g: &[f64]) -> (f64, f64, f64, f64) {
    let s = g.len() as f64;
    let mean = g.iter().sum::<f64>() / s;
    let m2 = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / s;
    let m4 = g.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / s;
    let var = if g.len() > 1 { m2 * s / (s - 1.0) } else { 0.0 };
    (mean, (var / s).sqrt(), var, ((m4 - m2 * m2).max(0.0) / s).sqrt())
}

/// Gradients at `slot` for `samples` parameter draws; order matches the
/// sample index regardless of thread count.
pub fn sample_gradients(circ: &Circuit, obs: &Observable, psi0: &[C], slot: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::Invalid("need at least two samples".into()));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| circ.gradient(&circ.sample_parameters(seed, i), slot, obs, psi0))
        .collect()
}

pub fn estimate_gradvar(circ: &Circuit, obs: &Observable, psi0: &[C], slot: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    let t0 = Instant::now();
    let g = sample_gradients(circ, obs, psi0, slot, samples, seed)?;
    let (mean, se_mean, variance, se_variance) = summarize(&g);
    Ok(McEstimate { samples, seed, slot, mean, se_mean, variance, se_variance, wall_ms: t0.elapsed().as_millis() as u64 })
}
