use nalgebra::DVector;
use num_complex::Complex64;

use lieplateau_core::algebra::LieElement;
use lieplateau_core::compound::*;
use lieplateau_core::dense::{CMatrix, DenseSkew};
use lieplateau_core::dla::{lie_closure, DEFAULT_MAX_DIM, DEFAULT_TOL};
use lieplateau_core::ideals::decompose;
use lieplateau_core::pauli::{PauliTerm, SkewElement};
use lieplateau_core::state::InitialState;
use lieplateau_core::variance::{gradvar_predict, projected_state_norm};

const TOPOLOGIES: [Topology; 4] = [Topology::Brick, Topology::Pyramid, Topology::Staircase, Topology::All];

fn su_basis(n: usize) -> lieplateau_core::dla::DlaBasis<SkewElement> {
    lie_closure(&build_generators(n, Topology::Brick, Variant::Su).unwrap(), DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap()
}

#[test]
fn generators_conserve_hamming_weight() {
    for n in 2..=6 {
        let number = SkewElement::from_terms(n, (0..n).map(|q| (1.0, PauliTerm::single(n, q, 'Z').unwrap()))).unwrap();
        for v in [Variant::Su, Variant::So] {
            for g in build_generators(n, Topology::All, v).unwrap() {
                assert!(g.bracket(&number).unwrap().is_empty());
            }
        }
    }
}

#[test]
fn terms_inside_each_generator_commute() {
    for n in 2..=6 {
        for i in 0..n {
            for j in i + 1..n {
                for g in [h_x(n, i, j).unwrap(), h_y(n, i, j).unwrap()] {
                    let terms: Vec<PauliTerm> = g.iter().map(|(p, _)| p).collect();
                    assert_eq!(terms.len(), 2);
                    assert!(terms[0].commutes_with(&terms[1]));
                }
            }
        }
    }
}

#[test]
fn su2_relations_on_every_pair() {
    let diff = |a: &SkewElement, b: &SkewElement| {
        let mut d = a.clone();
        d.axpy(-1.0, b).unwrap();
        d.norm_sq()
    };
    for n in 2..=6 {
        for i in 0..n {
            for j in i + 1..n {
                let (x, y, z) = (h_x(n, i, j).unwrap(), h_y(n, i, j).unwrap(), h_z(n, i, j).unwrap());
                assert_eq!(diff(&x.bracket(&y).unwrap(), &z), 0.0);
                assert_eq!(diff(&y.bracket(&z).unwrap(), &x), 0.0);
                assert_eq!(diff(&z.bracket(&x).unwrap(), &y), 0.0);
            }
        }
    }
}

#[test]
fn su_dimension_is_n_squared_minus_one() {
    for n in 2..=8 {
        assert_eq!(su_basis(n).dim(), n * n - 1, "brick n={n}");
    }
    for n in 2..=5 {
        for t in TOPOLOGIES {
            let b = lie_closure(&build_generators(n, t, Variant::Su).unwrap(), DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
            assert_eq!(b.dim(), n * n - 1, "{t:?} n={n}");
        }
    }
}

/// On the single-excitation sector the SO generators are `i` times real
/// antisymmetric matrices; closing those dense matrices is an independent
/// route to `n(n-1)/2`.
#[test]
fn so_dimension_two_routes() {
    for n in 2..=6 {
        let gens = build_generators(n, Topology::Brick, Variant::So).unwrap();
        let pauli = lie_closure(&gens, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let dense: Vec<DenseSkew> = gens
            .iter()
            .map(|g| {
                let m = restrict_to_sector(g, 1).unwrap();
                assert!(m.iter().all(|z| z.re.abs() < 1e-15), "not purely imaginary");
                DenseSkew::from_hermitian(&m).unwrap()
            })
            .collect();
        let fund = lie_closure(&dense, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        assert_eq!(fund.dim(), n * (n - 1) / 2, "dense n={n}");
        assert_eq!(pauli.dim(), n * (n - 1) / 2, "pauli n={n}");
    }
}

#[test]
fn closed_forms_match_formula() {
    for n in 2..=6 {
        let b = su_basis(n);
        let dec = decompose(&b, 4).unwrap();
        let h = h_y(n, 0, 1).unwrap();
        let io = h_z(n, 0, 1).unwrap().scaled(-1.0);
        for k in 0..=n {
            let rho = InitialState::hamming(n, k).unwrap();
            let f = gradvar_predict(&h, &io, &rho, &b, &dec).unwrap().gradvar;
            let c = predict_basis_state(n, k).unwrap();
            assert!((f - c).abs() <= 1e-10 * c.max(1e-300) || (c == 0.0 && f.abs() < 1e-14), "n={n} k={k}: {f} vs {c}");
        }
        let f = gradvar_predict(&h, &io, &InitialState::Uniform { n }, &b, &dec).unwrap().gradvar;
        let c = predict_uniform(n).unwrap();
        assert!((f - c).abs() <= 1e-10 * c);
    }
}

#[test]
fn slot_generator_choice_does_not_matter() {
    let n = 5;
    let b = su_basis(n);
    let dec = decompose(&b, 4).unwrap();
    let io = h_z(n, 0, 1).unwrap().scaled(-1.0);
    let rho = InitialState::hamming(n, 2).unwrap();
    let want = predict_basis_state(n, 2).unwrap();
    for h in build_generators(n, Topology::Brick, Variant::Su).unwrap() {
        let f = gradvar_predict(&h, &io, &rho, &b, &dec).unwrap().gradvar;
        assert!((f - want).abs() < 1e-10 * want);
    }
}

#[test]
fn projected_state_norm_intermediates() {
    for n in 2..=7 {
        let b = su_basis(n);
        let idx = compound_index(n).unwrap();
        for k in 0..=n {
            let got = idx * projected_state_norm(&b, &InitialState::hamming(n, k).unwrap()).unwrap();
            let want = (k * (n - k)) as f64 / n as f64;
            assert!((got - want).abs() < 1e-10, "n={n} k={k}");
        }
        let got = idx * projected_state_norm(&b, &InitialState::Uniform { n }).unwrap();
        assert!((got - (n as f64 - 1.0) / 8.0).abs() < 1e-10, "uniform n={n}");
    }
}

/// Dimension of the module generated from `|x>|x>` by the two-copy action
/// of the generators on the weight-`n/2` sector.
fn cyclic_module_dim(n: usize) -> usize {
    let k = n / 2;
    let mats: Vec<CMatrix> = build_generators(n, Topology::Brick, Variant::Su).unwrap().iter().map(|g| restrict_to_sector(g, k).unwrap()).collect();
    let s = mats[0].nrows();
    let eye = CMatrix::identity(s, s);
    let actions: Vec<CMatrix> = mats.iter().map(|m| m.kronecker(&eye) + eye.kronecker(m)).collect();
    let mut start = DVector::<Complex64>::zeros(s * s);
    start[0] = Complex64::new(1.0, 0.0);
    let mut basis: Vec<DVector<Complex64>> = vec![start];
    let mut frontier = 0;
    while frontier < basis.len() {
        let v = basis[frontier].clone();
        frontier += 1;
        for a in &actions {
            let mut w = a * &v;
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dotc(&w);
                    w -= b * c;
                }
            }
            let norm = w.norm();
            if norm > 1e-9 {
                basis.push(w / Complex64::new(norm, 0.0));
            }
        }
    }
    basis.len()
}

#[test]
fn v_lambda0_dimension_brute_force() {
    for n in [2, 4, 6] {
        assert_eq!(cyclic_module_dim(n) as u128, dim_v_lambda0(n).unwrap(), "n={n}");
    }
}

#[test]
fn projector_bound_values() {
    // h_y has eigenvalues 0, +-1/2 on any sector that contains both occupations
    for (n, dim) in [(4, 20.0), (6, 175.0), (8, 1764.0)] {
        let b = projector_bound(n, &h_y(n, 0, 1).unwrap()).unwrap();
        assert!((b - 2.0 * 0.25 / dim).abs() < 1e-15);
    }
}
