//! Dynamical Lie algebra closure and derived data: structure constants,
//! adjoint matrices and the Killing Gram matrix.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::algebra::LieElement;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Adjoint matrices are materialized only up to this algebra dimension.
pub const ADJOINT_DIM_CAP: usize = 300;

/// Structure-constant entries below this magnitude are dropped.
const STRUCTURE_TOL: f64 = 1e-13;

/// One entry `[F_q, F_k] = sum_j c F_j` with `q < k`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StructureEntry {
    pub q: u32,
    pub k: u32,
    pub j: u32,
    pub c: f64,
}

/// Orthonormal basis (under `-Tr(AB)`) of a real Lie algebra.
#[derive(Debug)]
pub struct DlaBasis<E: LieElement> {
    elements: Vec<E>,
    /// Bracket depth at which each element was admitted (0 = generator).
    pub depth: Vec<usize>,
    /// Dimension after each closure round.
    pub closure_log: Vec<usize>,
    pub truncated: bool,
    pub tol: f64,
    structure: OnceLock<Vec<StructureEntry>>,
}

impl<E: LieElement> Clone for DlaBasis<E> {
    fn clone(&self) -> Self {
        let s = OnceLock::new();
        if let Some(v) = self.structure.get() {
            let _ = s.set(v.clone());
        }
        DlaBasis {
            elements: self.elements.clone(),
            depth: self.depth.clone(),
            closure_log: self.closure_log.clone(),
            truncated: self.truncated,
            tol: self.tol,
            structure: s,
        }
    }
}

/// Gram-Schmidt step against `basis` (twice, for stability). Returns the
/// residual and its norm.
fn orthogonalize<E: LieElement>(basis: &[E], x: &E) -> Result<(E, f64)> {
    let mut r = x.clone();
    for _ in 0..2 {
        for b in basis {
            let p = b.inner(&r)?;
            if p != 0.0 {
                r.axpy(-p, b)?;
            }
        }
    }
    let n = r.norm_sq().sqrt();
    Ok((r, n))
}

/// Closes `generators` under the bracket.
///
/// Every candidate is normalized to unit Frobenius norm and admitted when the
/// norm of its component orthogonal to the current span exceeds `tol`.
/// Stops with `truncated = true` once `max_dim` would be exceeded.
pub fn lie_closure<E: LieElement>(generators: &[E], max_dim: usize, tol: f64) -> Result<DlaBasis<E>> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let rd = generators[0].rep_dim();
    if generators.iter().any(|g| g.rep_dim() != rd) {
        return Err(Error::Dimension("generators act on different spaces".into()));
    }
    if generators.iter().all(|g| g.is_zero()) {
        return Err(Error::EmptyGenerators);
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Invalid(format!("closure tolerance {tol} outside (0, 1)")));
    }
    let mut out = DlaBasis {
        elements: Vec::new(),
        depth: Vec::new(),
        closure_log: Vec::new(),
        truncated: false,
        tol,
        structure: OnceLock::new(),
    };

    // returns false once the basis is full
    let admit = |out: &mut DlaBasis<E>, cand: &E, depth: usize| -> Result<bool> {
        let n = cand.norm_sq().sqrt();
        if n == 0.0 {
            return Ok(true);
        }
        let (r, rn) = orthogonalize(&out.elements, &cand.scaled(1.0 / n))?;
        if rn > tol {
            if out.elements.len() >= max_dim {
                out.truncated = true;
                return Ok(false);
            }
            out.elements.push(r.scaled(1.0 / rn));
            out.depth.push(depth);
        }
        Ok(true)
    };

    for g in generators {
        if !admit(&mut out, g, 0)? {
            out.closure_log.push(out.elements.len());
            return Ok(out);
        }
    }
    out.closure_log.push(out.elements.len());

    let mut frontier: Vec<usize> = (0..out.elements.len()).collect();
    let mut round = 0;
    while !frontier.is_empty() {
        round += 1;
        let start = out.elements.len();
        for &i in &frontier {
            for j in 0..start {
                // pairs inside the frontier are visited once
                if frontier.binary_search(&j).is_ok() && j <= i {
                    continue;
                }
                let c = out.elements[i].bracket(&out.elements[j])?;
                if !admit(&mut out, &c, round)? {
                    out.closure_log.push(out.elements.len());
                    return Ok(out);
                }
            }
        }
        out.closure_log.push(out.elements.len());
        frontier = (start..out.elements.len()).collect();
    }
    Ok(out)
}

impl<E: LieElement> DlaBasis<E> {
    /// Rebuilds a basis from stored parts without re-running the closure.
    pub fn from_parts(elements: Vec<E>, depth: Vec<usize>, truncated: bool, tol: f64, structure: Option<Vec<StructureEntry>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if depth.len() != elements.len() {
            return Err(Error::Invalid("depth list length".into()));
        }
        let d = elements.len() as u32;
        let s = OnceLock::new();
        if let Some(v) = structure {
            if v.iter().any(|e| e.q >= d || e.k >= d || e.j >= d || e.q >= e.k) {
                return Err(Error::Invalid("structure constant index out of range".into()));
            }
            let _ = s.set(v);
        }
        Ok(DlaBasis { elements, depth, closure_log: vec![d as usize], truncated, tol, structure: s })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b)? - want).abs());
            }
        }
        Ok(worst)
    }

    /// Coordinates `<F_j, x>`.
    pub fn coordinates(&self, x: &E) -> Result<Vec<f64>> {
        self.elements.iter().map(|f| f.inner(x)).collect()
    }

    pub fn combine(&self, coords: &[f64]) -> Result<E> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension("coordinate vector length".into()));
        }
        let mut x = self.elements[0].zero_like();
        for (f, &c) in self.elements.iter().zip(coords) {
            if c != 0.0 {
                x.axpy(c, f)?;
            }
        }
        Ok(x)
    }

    /// `||x - P x|| / ||x||` for the orthogonal projection `P` onto the span.
    pub fn relative_residual(&self, x: &E) -> Result<f64> {
        let n = x.norm_sq().sqrt();
        if n == 0.0 {
            return Ok(0.0);
        }
        let (_, rn) = orthogonalize(&self.elements, x)?;
        Ok(rn / n)
    }

    /// Structure constants, computed on first use.
    pub fn structure_constants(&self) -> Result<&[StructureEntry]> {
        if let Some(v) = self.structure.get() {
            return Ok(v);
        }
        let d = self.dim();
        if d > 4 * ADJOINT_DIM_CAP {
            return Err(Error::Infeasible(format!("structure constants for dimension {d}")));
        }
        let rows: Vec<Result<Vec<StructureEntry>>> = (0..d)
            .into_par_iter()
            .map(|q| {
                let mut v = Vec::new();
                for k in q + 1..d {
                    let b = self.elements[q].bracket(&self.elements[k])?;
                    if b.is_zero() {
                        continue;
                    }
                    for (j, c) in self.coordinates(&b)?.into_iter().enumerate() {
                        if c.abs() > STRUCTURE_TOL {
                            v.push(StructureEntry { q: q as u32, k: k as u32, j: j as u32, c });
                        }
                    }
                }
                Ok(v)
            })
            .collect();
        let mut all = Vec::new();
        for r in rows {
            all.extend(r?);
        }
        let _ = self.structure.set(all);
        Ok(self.structure.get().expect("set above"))
    }

    /// `ad_k` with `(ad_k)_{jq} = <F_j, [F_k, F_q]>`; antisymmetric.
    pub fn adjoint_matrices(&self) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim();
        if d > ADJOINT_DIM_CAP {
            return Err(Error::Infeasible(format!("adjoint matrices for dimension {d} (cap {ADJOINT_DIM_CAP})")));
        }
        let mut ads = vec![DMatrix::<f64>::zeros(d, d); d];
        for e in self.structure_constants()? {
            let (q, k, j) = (e.q as usize, e.k as usize, e.j as usize);
            ads[q][(j, k)] += e.c;
            ads[k][(j, q)] -= e.c;
        }
        Ok(ads)
    }

    /// `G_{qr} = -Tr(ad_q ad_r)`, positive semidefinite.
    pub fn killing_gram(&self) -> Result<DMatrix<f64>> {
        Ok(killing_from_adjoints(&self.adjoint_matrices()?))
    }
}

pub fn killing_from_adjoints(ads: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d = ads.len();
    let mut a = DMatrix::<f64>::zeros(d * d, d);
    for (k, ad) in ads.iter().enumerate() {
        a.column_mut(k).copy_from_slice(ad.as_slice());
    }
    a.transpose() * a
}

/// `sum_k x_k ad_k`.
pub fn adjoint_of(ads: &[DMatrix<f64>], x: &[f64]) -> DMatrix<f64> {
    let d = ads.len();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (ad, &c) in ads.iter().zip(x) {
        if c != 0.0 {
            m += ad * c;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::SkewElement;

    fn sk(terms: &[(f64, &str)]) -> SkewElement {
        SkewElement::from_labels(terms).unwrap()
    }

    #[test]
    fn su2_closure() {
        let b = lie_closure(&[sk(&[(1.0, "X")]), sk(&[(1.0, "Z")])], DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        assert_eq!(b.dim(), 3);
        assert!(!b.truncated);
        assert!(b.orthonormality_error().unwrap() < 1e-12);
        let g = b.killing_gram().unwrap();
        assert!((g - DMatrix::<f64>::identity(3, 3) * 4.0).norm() < 1e-12);
    }

    #[test]
    fn two_qubit_xx_z_chain() {
        // {XX, ZI, IZ} generates so(4)-type algebra of dimension 6
        let g = [sk(&[(1.0, "XX")]), sk(&[(1.0, "ZI")]), sk(&[(1.0, "IZ")])];
        let b = lie_closure(&g, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        assert_eq!(b.dim(), 6);
    }

    #[test]
    fn full_su4() {
        let g = [sk(&[(1.0, "XI")]), sk(&[(1.0, "ZI")]), sk(&[(1.0, "IX")]), sk(&[(1.0, "IZ")]), sk(&[(1.0, "ZZ")])];
        let b = lie_closure(&g, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        assert_eq!(b.dim(), 15);
        let t = lie_closure(&g, 7, DEFAULT_TOL).unwrap();
        assert!(t.truncated);
        assert_eq!(t.dim(), 7);
    }

    #[test]
    fn commuting_generators() {
        let b = lie_closure(&[sk(&[(1.0, "ZI")]), sk(&[(2.0, "IZ")]), sk(&[(1.0, "ZI"), (1.0, "IZ")])], 10, DEFAULT_TOL).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.killing_gram().unwrap().norm() < 1e-14);
    }

    #[test]
    fn rejects_empty() {
        assert!(lie_closure::<SkewElement>(&[], 10, DEFAULT_TOL).is_err());
        assert!(lie_closure(&[SkewElement::zero(2)], 10, DEFAULT_TOL).is_err());
    }

    #[test]
    fn adjoint_is_antisymmetric_and_consistent() {
        let g = [sk(&[(1.0, "XY"), (0.5, "ZI")]), sk(&[(1.0, "YZ")]), sk(&[(0.3, "IX")])];
        let b = lie_closure(&g, DEFAULT_MAX_DIM, DEFAULT_TOL).unwrap();
        let ads = b.adjoint_matrices().unwrap();
        for (k, ad) in ads.iter().enumerate() {
            assert!((ad + ad.transpose()).norm() < 1e-10);
            for q in 0..b.dim() {
                let direct = b.elements()[k].bracket(&b.elements()[q]).unwrap();
                let via = b.combine(ad.column(q).as_slice()).unwrap();
                let mut diff = direct.clone();
                diff.axpy(-1.0, &via).unwrap();
                assert!(diff.frobenius_sq().sqrt() < 1e-9);
            }
        }
    }
}
