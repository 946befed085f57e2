mod common;

use proptest::prelude::*;

use lieplateau_core::algebra::LieElement;
use lieplateau_core::compound::{self, build_generators, restrict_to_sector, Topology, Variant};
use lieplateau_core::dense::{spin_matrices, DenseSkew};
use lieplateau_core::dla::{lie_closure, DlaBasis, DEFAULT_MAX_DIM, DEFAULT_TOL};
use lieplateau_core::ideals::decompose;
use lieplateau_core::pauli::{PauliTerm, SkewElement};
use lieplateau_core::state::InitialState;
use lieplateau_core::variance::{exact_adjoint_oracle, gradvar_predict, projected_state_norm};
use lieplateau_core::Error;

fn predict<E: LieElement>(h: &E, io: &E, rho: &InitialState, b: &DlaBasis<E>) -> f64 {
    gradvar_predict(h, io, rho, b, &decompose(b, 1).unwrap()).unwrap().gradvar
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn oracle_equals_formula(seed: u64) {
        let inst = common::random_instance(&mut common::rng(seed), 60);
        let f = predict(&inst.h, &inst.io, &inst.rho, &inst.basis);
        let o = exact_adjoint_oracle(&inst.h, &inst.io, &inst.rho, &inst.basis).unwrap();
        prop_assert!((f - o).abs() <= 1e-9 * f.abs().max(1.0), "formula {f} oracle {o}");
    }

    #[test]
    fn upper_bound_dominates(seed: u64) {
        let inst = common::random_instance(&mut common::rng(seed), 60);
        let r = gradvar_predict(&inst.h, &inst.io, &inst.rho, &inst.basis, &decompose(&inst.basis, 2).unwrap()).unwrap();
        prop_assert!(r.gradvar >= 0.0);
        prop_assert!(r.upper_bound >= r.gradvar * (1.0 - 1e-12));
    }

    #[test]
    fn scale_covariance(seed: u64, s in 0.1f64..5.0) {
        let inst = common::random_instance(&mut common::rng(seed), 60);
        let base = predict(&inst.h, &inst.io, &inst.rho, &inst.basis);
        let so = predict(&inst.h, &inst.io.scaled(s), &inst.rho, &inst.basis);
        let sh = predict(&inst.h.scaled(s), &inst.io, &inst.rho, &inst.basis);
        let both = predict(&inst.h.scaled(s), &inst.io.scaled(s), &inst.rho, &inst.basis);
        let tol = 1e-9 * base.abs().max(1e-12);
        prop_assert!((so - s * s * base).abs() <= tol * s * s);
        prop_assert!((sh - s * s * base).abs() <= tol * s * s);
        prop_assert!((both - s.powi(4) * base).abs() <= tol * s.powi(4));
    }

    #[test]
    fn center_insensitivity(seed: u64, c in -2.0f64..2.0) {
        let inst = common::random_instance(&mut common::rng(seed), 60);
        let before = predict(&inst.h, &inst.io, &inst.rho, &inst.basis);
        // the identity direction is central in any algebra it joins
        let phase = SkewElement::from_terms(inst.n, [(1.0, PauliTerm::identity(inst.n))]).unwrap();
        let mut gens: Vec<SkewElement> = inst.basis.elements().to_vec();
        gens.push(phase.clone());
        let wider = lie_closure(&gens, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        prop_assert_eq!(wider.dim(), inst.basis.dim() + 1);
        let mut io = inst.io.clone();
        io.axpy(c, &phase).unwrap();
        let mut h = inst.h.clone();
        h.axpy(-c, &phase).unwrap();
        let after = predict(&h, &io, &inst.rho, &wider);
        prop_assert!((after - before).abs() <= 1e-10 * before.abs().max(1.0));
    }
}

#[test]
fn non_lasa_observable_rejected() {
    let b = lie_closure(&build_generators(3, Topology::Brick, Variant::Su).unwrap(), DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    let h = compound::h_x(3, 0, 1).unwrap();
    let z = SkewElement::from_labels(&[(0.25, "ZII")]).unwrap();
    match gradvar_predict(&h, &z, &InitialState::hamming(3, 1).unwrap(), &b, &decompose(&b, 0).unwrap()) {
        Err(Error::NonLasa { residual }) => assert!(residual > 1e-3),
        other => panic!("expected NonLasa, got {other:?}"),
    }
}

/// Fully controllable case: `2d/(d^2-1)^2 Tr(O^2) Tr(H^2) Tr(rho_T^2)`.
#[test]
fn full_su_d_closed_form() {
    let mut r = common::rng(42);
    let n = 2;
    let d: f64 = 4.0;
    let labels = ["XI", "ZI", "IX", "IZ", "XX"];
    let gens: Vec<SkewElement> = labels.iter().map(|l| SkewElement::from_labels(&[(1.0, l)]).unwrap()).collect();
    let b = lie_closure(&gens, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    assert_eq!(b.dim(), 15);
    for _ in 0..5 {
        let h = common::random_in_algebra(&mut r, &b);
        let io = common::random_in_algebra(&mut r, &b);
        let rho = common::random_pure_state(&mut r, 1 << n);
        // pure state: Tr(rho_T^2) = 1 - 1/d
        let want = 2.0 * d / (d * d - 1.0).powi(2) * io.norm_sq() * h.norm_sq() * (1.0 - 1.0 / d);
        let got = predict(&h, &io, &rho, &b);
        assert!((got - want).abs() < 1e-10 * want);
    }
}

/// Simple-algebra form with the adjoint index and an independently computed
/// representation index: `I_Ad ||O||^2 ||H||^2 ||rho_g||^2 / (I_phi d^2)`,
/// rep-level norms throughout.
fn var_alter<E: LieElement>(i_ad: f64, i_phi: f64, h: &E, io: &E, rho: &InitialState, b: &DlaBasis<E>) -> f64 {
    let d = b.dim() as f64;
    i_ad * io.norm_sq() * h.norm_sq() * projected_state_norm(b, rho).unwrap() / (i_phi * d * d)
}

#[test]
fn representation_index_cancels_compound() {
    for n in 3..=5 {
        let b = lie_closure(&build_generators(n, Topology::Brick, Variant::Su).unwrap(), DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let h = compound::h_y(n, 1, 2).unwrap();
        let fund = restrict_to_sector(&h, 1).unwrap();
        let i_phi = h.norm_sq() / fund.norm_squared();
        let io = compound::h_z(n, 0, 1).unwrap().scaled(-1.0);
        for rho in [InitialState::hamming(n, 1).unwrap(), InitialState::Uniform { n }, common::random_pure_state(&mut common::rng(n as u64), 1 << n)] {
            let want = var_alter(2.0 * n as f64, i_phi, &h, &io, &rho, &b);
            let got = predict(&h, &io, &rho, &b);
            assert!((got - want).abs() < 1e-9 * want, "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn representation_index_cancels_spin() {
    let (sx, sy, sz) = spin_matrices(5).unwrap();
    let gx = DenseSkew::from_hermitian(&sx).unwrap().scaled(-1.0);
    let gy = DenseSkew::from_hermitian(&sy).unwrap().scaled(-1.0);
    let b = lie_closure(&[gx.clone(), gy], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    assert_eq!(b.dim(), 3);
    // standard spin-1/2 element -i sigma_x / 2 has Frobenius norm^2 1/2
    let i_phi = gx.norm_sq() / 0.5;
    assert!((i_phi - 20.0).abs() < 1e-12);
    let io = DenseSkew::from_hermitian(&(&sx + &sy + &sz)).unwrap();
    for a in 0..5 {
        let mut v = vec![num_complex::Complex64::new(0.0, 0.0); 5];
        v[a] = num_complex::Complex64::new(1.0, 0.0);
        let rho = InitialState::vector(v).unwrap();
        let m = 2.0 - a as f64;
        let got = predict(&gx, &io, &rho, &b);
        assert!((got - var_alter(4.0, i_phi, &gx, &io, &rho, &b)).abs() < 1e-9);
        assert!((got - 2.0 * m * m / 3.0).abs() < 1e-9);
    }
}
