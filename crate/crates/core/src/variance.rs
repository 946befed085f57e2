//! Exact gradient variance for algebras whose observable lies in the algebra.
//!
//! Every quantity below lives in the representation: Frobenius norms are
//! `-Tr(A A)` and the Killing norm of `H` is `-Tr(ad_H ad_H)` computed from
//! the structure constants of the orthonormal basis. With that convention the
//! per-ideal product is
//! `||H_a||_K^2 ||O_a||_F^2 ||rho_a||_F^2 / d_a^2`
//! with no representation-index factor.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::LieElement;
use crate::dla::{adjoint_of, DlaBasis};
use crate::error::{Error, Result};
use crate::ideals::{project_components, IdealDecomposition};
use crate::state::InitialState;

/// Relative residual above which an operator is taken to be outside the algebra.
pub const LASA_TOL: f64 = 1e-8;

/// Largest algebra dimension accepted by the adjoint-space oracle.
pub const ORACLE_DIM_CAP: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct IdealTerm {
    pub dim: usize,
    pub kappa: f64,
    pub killing_h: f64,
    pub frobenius_h: f64,
    pub frobenius_o: f64,
    pub frobenius_rho: f64,
    pub contribution: f64,
    pub upper_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceReport {
    pub dla_dim: usize,
    pub center_dim: usize,
    pub per_ideal: Vec<IdealTerm>,
    pub gradvar: f64,
    pub upper_bound: f64,
    /// Frobenius norm squared of the center part of `iO`; does not contribute.
    pub center_o: f64,
    pub center_h: f64,
    pub o_residual: f64,
}

/// Relative residual of `x` outside the span of `basis`.
pub fn lasa_residual<E: LieElement>(basis: &DlaBasis<E>, x: &E) -> Result<f64> {
    basis.relative_residual(x)
}

/// Coordinates of the projection of `i rho` onto the algebra.
pub fn state_coordinates<E: LieElement>(basis: &DlaBasis<E>, rho: &InitialState) -> Result<DVector<f64>> {
    let v = basis.elements().iter().map(|f| f.state_coordinate(rho)).collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(v))
}

/// `||rho_g||_F^2`.
pub fn projected_state_norm<E: LieElement>(basis: &DlaBasis<E>, rho: &InitialState) -> Result<f64> {
    Ok(state_coordinates(basis, rho)?.norm_squared())
}

fn check_inputs<E: LieElement>(basis: &DlaBasis<E>, h: &E, io: &E) -> Result<f64> {
    if basis.truncated {
        return Err(Error::Truncated(basis.dim()));
    }
    let rh = basis.relative_residual(h)?;
    if rh > LASA_TOL {
        return Err(Error::NotInAlgebra { residual: rh });
    }
    let ro = basis.relative_residual(io)?;
    if ro > LASA_TOL {
        return Err(Error::NonLasa { residual: ro });
    }
    Ok(ro)
}

/// Variance of `d<O>/d theta` for the generator `h` (skew-Hermitian), observable
/// `io = iO` and initial state `rho`, from the ideal decomposition.
pub fn gradvar_predict<E: LieElement>(h: &E, io: &E, rho: &InitialState, basis: &DlaBasis<E>, dec: &IdealDecomposition) -> Result<VarianceReport> {
    let o_residual = check_inputs(basis, h, io)?;
    let hc = project_components(basis, dec, h)?;
    let oc = project_components(basis, dec, io)?;
    let r = state_coordinates(basis, rho)?;
    let mut per_ideal = Vec::new();
    for (a, ideal) in dec.ideals.iter().enumerate() {
        let ha = &ideal.basis * &hc.ideals[a];
        let killing_h = dec.killing_norm_sq(&ha);
        let frobenius_h = hc.ideals[a].norm_squared();
        let frobenius_o = oc.ideals[a].norm_squared();
        let frobenius_rho = (ideal.basis.transpose() * &r).norm_squared();
        let d = ideal.dim() as f64;
        per_ideal.push(IdealTerm {
            dim: ideal.dim(),
            kappa: ideal.kappa,
            killing_h,
            frobenius_h,
            frobenius_o,
            frobenius_rho,
            contribution: killing_h * frobenius_o * frobenius_rho / (d * d),
            upper_bound: 2.0 * frobenius_h * frobenius_o * frobenius_rho / d,
        });
    }
    Ok(VarianceReport {
        dla_dim: basis.dim(),
        center_dim: dec.center.ncols(),
        gradvar: per_ideal.iter().map(|t| t.contribution).sum(),
        upper_bound: per_ideal.iter().map(|t| t.upper_bound).sum(),
        per_ideal,
        center_o: oc.center.norm_squared(),
        center_h: hc.center.norm_squared(),
        o_residual,
    })
}

/// `sum_a 2 ||H_a||_F^2 ||O_a||_F^2 ||rho_a||_F^2 / d_a`.
pub fn gradvar_upper_bound<E: LieElement>(h: &E, io: &E, rho: &InitialState, basis: &DlaBasis<E>, dec: &IdealDecomposition) -> Result<f64> {
    Ok(gradvar_predict(h, io, rho, basis, dec)?.upper_bound)
}

/// `M -> sum_k -[ad_k, [ad_k, M]]` on `g (x) g` viewed as `d x d` matrices.
/// Positive semidefinite with kernel equal to the joint kernel of
/// `ad_k (x) 1 + 1 (x) ad_k`.
struct TwoCopyCasimir<'a> {
    ads: &'a [DMatrix<f64>],
    q: DMatrix<f64>,
}

impl<'a> TwoCopyCasimir<'a> {
    fn new(ads: &'a [DMatrix<f64>]) -> Self {
        let d = ads.len();
        let mut q = DMatrix::<f64>::zeros(d, d);
        for a in ads {
            q -= a * a;
        }
        TwoCopyCasimir { ads, q }
    }

    fn apply(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = &self.q * m + m * &self.q;
        for a in self.ads {
            out += (a * m * a) * 2.0;
        }
        out
    }

    /// Orthogonal projection of `v` onto the kernel. The residual
    /// `v - Proj_{span{Cv, C^2 v, ...}} v` is exact once the Krylov space is
    /// exhausted, which happens after as many steps as `C` has distinct
    /// eigenvalues on the support of `v`.
    fn project_kernel(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let vn = v.norm();
        if vn == 0.0 {
            return v.clone();
        }
        let mut basis: Vec<DMatrix<f64>> = Vec::new();
        let mut w = self.apply(v);
        let max_steps = (v.len()).min(1000);
        for _ in 0..max_steps {
            let before = w.norm();
            if before == 0.0 {
                break;
            }
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dot(&w);
                    w -= b * p;
                }
            }
            let after = w.norm();
            if after <= 1e-11 * before {
                break;
            }
            w /= after;
            let next = self.apply(&w);
            basis.push(w);
            w = next;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dot(&r);
                r -= b * p;
            }
        }
        r
    }
}

/// Second moment of the gradient computed directly in adjoint coordinates:
/// `(r (x) r) . P (ad_h (x) ad_h) P (o (x) o)` with `P` the orthogonal projector
/// onto the invariants of `g (x) g`. Uses neither the ideal decomposition nor
/// the Killing form.
pub fn exact_adjoint_oracle<E: LieElement>(h: &E, io: &E, rho: &InitialState, basis: &DlaBasis<E>) -> Result<f64> {
    check_inputs(basis, h, io)?;
    if basis.dim() > ORACLE_DIM_CAP {
        return Err(Error::Infeasible(format!("oracle for dimension {} (cap {ORACLE_DIM_CAP})", basis.dim())));
    }
    let ads = basis.adjoint_matrices()?;
    let o = DVector::from_vec(basis.coordinates(io)?);
    let hv = basis.coordinates(h)?;
    let r = state_coordinates(basis, rho)?;
    let cas = TwoCopyCasimir::new(&ads);
    let x = cas.project_kernel(&(&o * o.transpose()));
    let adh = adjoint_of(&ads, &hv);
    let y = &adh * x * adh.transpose();
    let z = cas.project_kernel(&y);
    Ok((r.transpose() * z * &r)[(0, 0)])
}

/// Dense-matrix version of the kernel projector, for checking the Krylov route.
pub fn invariant_projector_dense(ads: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d = ads.len();
    let mut c = DMatrix::<f64>::zeros(d * d, d * d);
    let eye = DMatrix::<f64>::identity(d, d);
    for a in ads {
        let t = a.kronecker(&eye) + eye.kronecker(a);
        c += t.transpose() * t;
    }
    let eig = nalgebra::SymmetricEigen::new(c);
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut p = DMatrix::<f64>::zeros(d * d, d * d);
    for i in 0..d * d {
        if eig.eigenvalues[i] <= 1e-10 * top.max(1e-300) {
            let v = eig.eigenvectors.column(i);
            p += v * v.transpose();
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dla::{lie_closure, DEFAULT_MAX_DIM, DEFAULT_TOL};
    use crate::ideals::decompose;
    use crate::pauli::SkewElement;

    fn sk(terms: &[(f64, &str)]) -> SkewElement {
        SkewElement::from_labels(terms).unwrap()
    }

    #[test]
    fn su2_standard() {
        let b = lie_closure(&[sk(&[(1.0, "X")]), sk(&[(1.0, "Z")])], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let dec = decompose(&b, 0).unwrap();
        let rho = InitialState::Bits { n: 1, bits: 0 };
        let h = sk(&[(1.0, "Z")]);
        let rep = gradvar_predict(&h, &h, &rho, &b, &dec).unwrap();
        assert!((rep.gradvar - 8.0 / 9.0).abs() < 1e-12);
        assert!((rep.upper_bound - 4.0 / 3.0).abs() < 1e-12);
        assert!((exact_adjoint_oracle(&h, &h, &rho, &b).unwrap() - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn non_lasa_is_rejected() {
        let b = lie_closure(&[sk(&[(1.0, "XI")]), sk(&[(1.0, "ZI")])], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let dec = decompose(&b, 0).unwrap();
        let rho = InitialState::Bits { n: 2, bits: 0 };
        let h = sk(&[(1.0, "ZI")]);
        let o = sk(&[(1.0, "IZ")]);
        assert!(matches!(gradvar_predict(&h, &o, &rho, &b, &dec), Err(Error::NonLasa { .. })));
        assert!(matches!(gradvar_predict(&o, &h, &rho, &b, &dec), Err(Error::NotInAlgebra { .. })));
    }

    #[test]
    fn krylov_projection_matches_dense_projector() {
        let g = [sk(&[(1.0, "XY")]), sk(&[(1.0, "ZI")]), sk(&[(0.7, "IX")])];
        let b = lie_closure(&g, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let ads = b.adjoint_matrices().unwrap();
        let d = ads.len();
        let p = invariant_projector_dense(&ads);
        let cas = TwoCopyCasimir::new(&ads);
        let v = DMatrix::<f64>::from_fn(d, d, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.1 * i as f64);
        let dense = &p * DVector::from_column_slice(v.as_slice());
        let kr = cas.project_kernel(&v);
        assert!((DVector::from_column_slice(kr.as_slice()) - dense).norm() < 1e-9 * v.norm());
    }
}
