//! Small closed-form cases outside the compound family, each computed three
//! ways: closed form, block formula, and Monte Carlo.

use num_complex::Complex64;

use lieplateau_core::algebra::LieElement;
use lieplateau_core::dense::{spin_matrices, DenseSkew};
use lieplateau_core::dla::{lie_closure, DEFAULT_MAX_DIM, DEFAULT_TOL};
use lieplateau_core::ideals::decompose;
use lieplateau_core::pauli::{HermitianObservable, SkewElement};
use lieplateau_core::simulator::*;
use lieplateau_core::state::InitialState;
use lieplateau_core::variance::{gradvar_predict, VarianceReport};

pub struct GroupCase {
    pub name: String,
    pub closed_form: f64,
    pub report: VarianceReport,
    pub mc: McEstimate,
}

impl GroupCase {
    pub fn formula_ok(&self) -> bool {
        (self.report.gradvar - self.closed_form).abs() <= 1e-9 * self.closed_form.abs().max(1.0)
    }

    pub fn mc_ok(&self) -> bool {
        super::mc_within(self.mc.variance, self.mc.se_variance, self.closed_form)
    }
}

// long enough on either side of the measured slot for both halves to be
// close to Haar on these small groups
const LAYERS: usize = 40;

fn sk(l: &str) -> SkewElement {
    SkewElement::from_labels(&[(1.0, l)]).unwrap()
}

/// First gate in the middle layer that uses generator `g`.
fn slot_for(spec: &AnsatzSpec, g: usize) -> usize {
    (0..spec.gates.len()).find(|&s| spec.layer_of[s] >= LAYERS / 2 && spec.gates[s] == g).unwrap()
}

fn predict<E: LieElement>(gens: &[E], h: &E, io: &E, rho: &InitialState) -> VarianceReport {
    let b = lie_closure(gens, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    gradvar_predict(h, io, rho, &b, &decompose(&b, 0).unwrap()).unwrap()
}

/// One qubit, su(2) from X and Z, O = Z, slot generator iZ, rho = |0>.
pub fn su2(samples: usize, seed: u64) -> GroupCase {
    let gens = vec![sk("X"), sk("Z")];
    let rho = InitialState::hamming(1, 0).unwrap();
    let report = predict(&gens, &gens[1], &sk("Z"), &rho);
    let spec = AnsatzSpec::periodic(gens.into_iter().map(Generator::Pauli).collect(), &[vec![0], vec![1]], LAYERS, DEFAULT_RANGE).unwrap();
    let slot = slot_for(&spec, 1);
    let circ = Circuit::new(spec, Space::full(1).unwrap()).unwrap();
    let obs = Observable::Pauli(HermitianObservable::from_labels(&[(1.0, "Z")]).unwrap());
    let psi = circ.space.state_vector(&rho).unwrap();
    let mc = estimate_gradvar(&circ, &obs, &psi, slot, samples, seed).unwrap();
    GroupCase { name: "su2 standard".into(), closed_form: 8.0 / 9.0, report, mc }
}

/// Spin-2 irrep of su(2) (dimension 5), O = Sx + Sy + Sz, slot generator
/// -i Sx, rho = |m><m|.
pub fn spin(m: i32, samples: usize, seed: u64) -> GroupCase {
    let (sx, sy, sz) = spin_matrices(5).unwrap();
    let gens = vec![DenseSkew::from_hermitian(&sx).unwrap().scaled(-1.0), DenseSkew::from_hermitian(&sy).unwrap().scaled(-1.0)];
    let o = &sx + &sy + &sz;
    let io = DenseSkew::from_hermitian(&o).unwrap();
    let mut v = vec![Complex64::new(0.0, 0.0); 5];
    v[(2 - m) as usize] = Complex64::new(1.0, 0.0);
    let rho = InitialState::vector(v).unwrap();
    let report = predict(&gens, &gens[0], &io, &rho);
    let spec = AnsatzSpec::periodic(gens.into_iter().map(Generator::Dense).collect(), &[vec![0], vec![1]], LAYERS, DEFAULT_RANGE).unwrap();
    let slot = slot_for(&spec, 0);
    let circ = Circuit::new(spec, Space::Dense { dim: 5 }).unwrap();
    let psi = circ.space.state_vector(&rho).unwrap();
    let mc = estimate_gradvar(&circ, &Observable::Dense(o), &psi, slot, samples, seed).unwrap();
    GroupCase { name: format!("spin-2 m={m}"), closed_form: 2.0 * (m * m) as f64 / 3.0, report, mc }
}

/// su(2) + su(2) on two qubits with a Bell state: both reduced states are
/// maximally mixed, so the state has no weight in either ideal.
pub fn bell(samples: usize, seed: u64) -> GroupCase {
    let gens = vec![sk("XI"), sk("ZI"), sk("IX"), sk("IZ")];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rho = InitialState::vector(vec![Complex64::new(s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(s, 0.0)]).unwrap();
    let io = SkewElement::from_labels(&[(1.0, "ZI"), (0.5, "IX"), (-0.7, "XI")]).unwrap();
    let report = predict(&gens, &gens[1], &io, &rho);
    let spec = AnsatzSpec::periodic(gens.into_iter().map(Generator::Pauli).collect(), &[vec![0, 2], vec![1, 3]], LAYERS, DEFAULT_RANGE).unwrap();
    let slot = slot_for(&spec, 1);
    let circ = Circuit::new(spec, Space::full(2).unwrap()).unwrap();
    let obs = Observable::Pauli(io.to_hermitian());
    let psi = circ.space.state_vector(&rho).unwrap();
    let mc = estimate_gradvar(&circ, &obs, &psi, slot, samples, seed).unwrap();
    GroupCase { name: "su2+su2 bell".into(), closed_form: 0.0, report, mc }
}

pub fn all(samples: usize, seed: u64) -> Vec<GroupCase> {
    vec![su2(samples, seed), spin(1, samples, seed + 1), spin(2, samples, seed + 2), bell(samples, seed + 3)]
}
