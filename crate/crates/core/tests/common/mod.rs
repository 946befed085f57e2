#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lieplateau_core::dla::{lie_closure, DlaBasis, DEFAULT_TOL};
use lieplateau_core::pauli::{PauliTerm, SkewElement};
use lieplateau_core::state::InitialState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pauli(r: &mut ChaCha8Rng, n: usize) -> PauliTerm {
    loop {
        let mask = (1u64 << n) - 1;
        let p = PauliTerm::new(n, r.gen::<u64>() & mask, r.gen::<u64>() & mask).unwrap();
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn random_skew(r: &mut ChaCha8Rng, n: usize, terms: usize) -> SkewElement {
    SkewElement::from_terms(n, (0..terms).map(|_| (r.gen_range(-1.0..1.0), random_pauli(r, n)))).unwrap()
}

pub fn random_pure_state(r: &mut ChaCha8Rng, dim: usize) -> InitialState {
    let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    InitialState::vector(v.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Random combination of the basis elements.
pub fn random_in_algebra(r: &mut ChaCha8Rng, basis: &DlaBasis<SkewElement>) -> SkewElement {
    let c: Vec<f64> = (0..basis.dim()).map(|_| r.gen_range(-1.0..1.0)).collect();
    basis.combine(&c).unwrap()
}

/// A LASA instance: algebra generated by a few random Pauli sums with
/// dimension at most `max_dim`, plus a generator and observable inside it and
/// a random pure state.
pub struct Instance {
    pub n: usize,
    pub basis: DlaBasis<SkewElement>,
    pub h: SkewElement,
    pub io: SkewElement,
    pub rho: InitialState,
}

pub fn random_instance(r: &mut ChaCha8Rng, max_dim: usize) -> Instance {
    loop {
        let n = r.gen_range(2..=4);
        let k = r.gen_range(2..=3);
        let gens: Vec<SkewElement> = (0..k)
            .map(|_| {
                let t = r.gen_range(1..=2);
                random_skew(r, n, t)
            })
            .collect();
        let basis = lie_closure(&gens, max_dim, DEFAULT_TOL).unwrap();
        if basis.truncated || basis.dim() < 3 {
            continue;
        }
        // the slot generator is one of the circuit generators, the observable anything in the algebra
        let h = gens[r.gen_range(0..k)].clone();
        let io = random_in_algebra(r, &basis);
        let rho = random_pure_state(r, 1 << n);
        return Instance { n, basis, h, io, rho };
    }
}

/// `|est - pred| <= max(3 se, 10% pred)` with a floating-point floor for a
/// zero prediction.
pub fn mc_within(est: f64, se: f64, pred: f64) -> bool {
    (est - pred).abs() <= (3.0 * se).max(0.1 * pred.abs()).max(1e-12)
}

pub mod small_groups;
