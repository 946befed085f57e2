mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;

use lieplateau_core::algebra::LieElement;
use lieplateau_core::compound::{self, build_generators, restrict_to_sector, Topology, Variant};
use lieplateau_core::dla::{lie_closure, DlaBasis, DEFAULT_MAX_DIM, DEFAULT_TOL};
use lieplateau_core::ideals::{decompose, project_components, IdealDecomposition};
use lieplateau_core::pauli::SkewElement;

fn sk(l: &str) -> SkewElement {
    SkewElement::from_labels(&[(1.0, l)]).unwrap()
}

fn random_algebra(seed: u64) -> DlaBasis<SkewElement> {
    common::random_instance(&mut common::rng(seed), 60).basis
}

/// sin of the largest principal angle between two column spaces.
fn max_sin_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let resid = a - b * (b.transpose() * a);
    resid.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn check_invariance(dec: &IdealDecomposition) -> f64 {
    let mut worst = 0.0f64;
    for ideal in &dec.ideals {
        for ad in &dec.adjoints {
            let img = ad * &ideal.basis;
            let leak = &img - &ideal.basis * (ideal.basis.transpose() * &img);
            worst = worst.max(leak.norm() / ad.norm().max(1e-300));
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn parseval(seed: u64) {
        let b = random_algebra(seed);
        let dec = decompose(&b, seed).unwrap();
        let n = b.elements()[0].n_qubits();
        let mut r = common::rng(seed ^ 77);
        // arbitrary element of u(2^n), mostly outside the algebra
        let x = common::random_skew(&mut r, n, 6);
        let c = project_components(&b, &dec, &x).unwrap();
        let inside = b.combine(&b.coordinates(&x).unwrap()).unwrap();
        let mut outside = x.clone();
        outside.axpy(-1.0, &inside).unwrap();
        let parts: f64 = c.ideals.iter().map(|v| v.norm_squared()).sum::<f64>() + c.center.norm_squared() + outside.norm_sq();
        prop_assert!((parts - x.norm_sq()).abs() <= 1e-10 * x.norm_sq());
        prop_assert_eq!(dec.ideals.iter().map(|i| i.dim()).sum::<usize>() + dec.center.ncols(), b.dim());
    }

    #[test]
    fn ideals_are_ad_invariant(seed: u64) {
        let b = random_algebra(seed);
        let dec = decompose(&b, seed).unwrap();
        prop_assert!(check_invariance(&dec) < 1e-8);
        for ideal in &dec.ideals {
            prop_assert!(ideal.kappa > 0.0);
            prop_assert!(ideal.kappa_rel_std < 1e-6);
        }
    }

    #[test]
    fn decomposition_is_seed_independent(seed: u64) {
        let b = random_algebra(seed);
        let reference = decompose(&b, 0).unwrap();
        for s in 1..5u64 {
            let other = decompose(&b, s.wrapping_mul(seed | 1)).unwrap();
            prop_assert_eq!(other.ideal_dims(), reference.ideal_dims());
            for ideal in &reference.ideals {
                let best = other
                    .ideals
                    .iter()
                    .filter(|o| o.dim() == ideal.dim())
                    .map(|o| max_sin_angle(&ideal.basis, &o.basis))
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-6);
            }
            if reference.center.ncols() > 0 {
                prop_assert!(max_sin_angle(&reference.center, &other.center) < 1e-6);
            }
        }
    }
}

#[test]
fn two_su2_ideals_commute() {
    let b = lie_closure(&[sk("XI"), sk("ZI"), sk("IX"), sk("IZ")], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    let dec = decompose(&b, 3).unwrap();
    assert_eq!(dec.ideal_dims(), vec![3, 3]);
    let el = |ideal: usize, k: usize| b.combine(dec.ideals[ideal].basis.column(k).as_slice()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(el(0, i).bracket(&el(1, j)).unwrap().norm_sq().sqrt() < 1e-8);
        }
    }
}

#[test]
fn center_commutes_with_everything() {
    let b = lie_closure(&[sk("XIZ"), sk("ZII"), sk("IIZ"), sk("IXI"), sk("IYI")], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    let dec = decompose(&b, 2).unwrap();
    assert!(dec.center.ncols() >= 1);
    for k in 0..dec.center.ncols() {
        let z = b.combine(dec.center.column(k).as_slice()).unwrap();
        for f in b.elements() {
            assert!(z.bracket(f).unwrap().norm_sq().sqrt() < 1e-10);
        }
    }
}

/// Killing over fundamental Frobenius for su(n) is `2n`; the fundamental
/// representation is the single-excitation sector.
#[test]
fn compound_kappa_times_index_is_2n() {
    for n in 2..=6 {
        let b = lie_closure(&build_generators(n, Topology::Brick, Variant::Su).unwrap(), DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let dec = decompose(&b, 11).unwrap();
        assert_eq!(dec.ideal_dims(), vec![n * n - 1]);
        let hx = compound::h_x(n, 0, n - 1).unwrap();
        let fund = restrict_to_sector(&hx, 1).unwrap();
        let index = hx.norm_sq() / fund.norm_squared();
        let got = dec.ideals[0].kappa * index;
        assert!((got - 2.0 * n as f64).abs() < 1e-9 * n as f64, "n={n}: {got}");
        assert!((index - 2f64.powi(n as i32 - 2)).abs() < 1e-12);
    }
}

#[test]
fn killing_gram_is_block_diagonal_in_ideal_coordinates() {
    let b = lie_closure(&[sk("XI"), sk("ZI"), sk("IX"), sk("IZ"), sk("ZZ"), sk("XX")], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
    let dec = decompose(&b, 5).unwrap();
    for (a, ia) in dec.ideals.iter().enumerate() {
        for (c, ic) in dec.ideals.iter().enumerate() {
            let block = ia.basis.transpose() * &dec.killing * &ic.basis;
            if a == c {
                let want = DMatrix::<f64>::identity(ia.dim(), ia.dim()) * ia.kappa;
                assert!((block - want).norm() < 1e-8 * ia.kappa);
            } else {
                assert!(block.norm() < 1e-8);
            }
        }
    }
}
