//! Splitting a compact Lie algebra into its center and simple ideals.
//!
//! For any `y`, `ad_y` acts inside each ideal separately, so
//! `S = sum_k ad_{y_k}^T ad_{y_k}` is block diagonal with respect to the ideal
//! decomposition. With random `y_k`, the eigenvectors of `S` on the
//! complement of the center each lie in a single ideal, and two of them lie
//! in the same simple ideal exactly when they are linked by a chain of
//! non-commuting pairs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::LieElement;
use crate::dla::{adjoint_of, killing_from_adjoints, DlaBasis};
use crate::error::{Error, Result};

pub const MAX_ATTEMPTS: usize = 8;

/// Relative Killing eigenvalue below which a direction counts as central.
const CENTER_TOL: f64 = 1e-8;
/// Relative eigenvalue gap of `S` treated as a degeneracy.
const GAP_TOL: f64 = 1e-6;
/// Relative bracket norm above which two eigenvectors are linked.
const LINK_TOL: f64 = 1e-6;
/// Absolute tolerance on vanishing brackets after normalization.
const COMMUTE_TOL: f64 = 1e-8;
/// Allowed relative spread of the Killing/Frobenius ratio within an ideal.
const KAPPA_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SimpleIdeal {
    /// Orthonormal columns, in coordinates of the algebra basis.
    pub basis: DMatrix<f64>,
    /// Killing norm squared over Frobenius norm squared, constant on the ideal.
    pub kappa: f64,
    pub kappa_rel_std: f64,
}

impl SimpleIdeal {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * x)
    }
}

#[derive(Clone, Debug)]
pub struct IdealDecomposition {
    pub ideals: Vec<SimpleIdeal>,
    /// Orthonormal columns spanning the center.
    pub center: DMatrix<f64>,
    pub killing: DMatrix<f64>,
    pub adjoints: Vec<DMatrix<f64>>,
    pub seed: u64,
    pub attempts: usize,
}

/// An element split along the decomposition.
#[derive(Clone, Debug)]
pub struct Components {
    /// Coordinates in each ideal's own basis.
    pub ideals: Vec<DVector<f64>>,
    pub center: DVector<f64>,
    /// `||x - P_g x||^2`, the part outside the algebra.
    pub outside_sq: f64,
    pub total_sq: f64,
}

/// Killing-kernel basis (columns) and its orthogonal complement.
pub fn find_center(killing: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = killing.nrows();
    let eig = SymmetricEigen::new(killing.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    let thr = CENTER_TOL * top;
    let (mut c, mut r) = (Vec::new(), Vec::new());
    for i in 0..d {
        let col = eig.eigenvectors.column(i).into_owned();
        if top <= 0.0 || eig.eigenvalues[i] <= thr {
            c.push(col);
        } else {
            r.push(col);
        }
    }
    let mk = |v: Vec<DVector<f64>>| if v.is_empty() { DMatrix::zeros(d, 0) } else { DMatrix::from_columns(&v) };
    (mk(c), mk(r))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn attempt(ads: &[DMatrix<f64>], killing: &DMatrix<f64>, center: &DMatrix<f64>, rest: &DMatrix<f64>, seed: u64) -> Result<Vec<SimpleIdeal>> {
    let d = ads.len();
    let m = rest.ncols();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = DMatrix::<f64>::zeros(d, d);
    for _ in 0..d.max(2) {
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = adjoint_of(ads, &y);
        s += a.transpose() * &a;
    }
    let sc = rest.transpose() * &s * rest;
    let eig = SymmetricEigen::new(sc);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spread = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for w in order.windows(2) {
        if eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]] < GAP_TOL * spread {
            return Err(Error::Decomposition("degenerate spectrum in random block matrix".into()));
        }
    }
    let u = rest * &eig.eigenvectors;

    let adu: Vec<DMatrix<f64>> = (0..m).map(|i| adjoint_of(ads, u.column(i).as_slice())).collect();
    let links: Vec<DMatrix<f64>> = adu.iter().map(|a| a * &u).collect();
    let mut norms = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            norms[(i, j)] = links[i].column(j).norm();
        }
    }
    let scale = norms.max();
    let mut uf = UnionFind((0..m).collect());
    for i in 0..m {
        for j in i + 1..m {
            if norms[(i, j)] > LINK_TOL * scale {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; m];
    for i in 0..m {
        let r = uf.find(i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }

    let tol = COMMUTE_TOL * scale.max(1.0);
    let mut ideals = Vec::new();
    for g in &groups {
        let cols: Vec<DVector<f64>> = g.iter().map(|&i| u.column(i).into_owned()).collect();
        let basis = DMatrix::from_columns(&cols);
        for (a, &i) in g.iter().enumerate() {
            for h in groups.iter().filter(|h| !std::ptr::eq(*h, g)) {
                for &j in h {
                    if norms[(i, j)] > tol {
                        return Err(Error::Decomposition(format!("bracket between ideals has norm {:.2e}", norms[(i, j)])));
                    }
                }
            }
            // [g, u] must stay inside the ideal
            let img = &adu[i];
            let leak = (img - &basis * (basis.transpose() * img)).norm();
            if leak > tol {
                return Err(Error::Decomposition(format!("ideal not invariant (leak {leak:.2e})")));
            }
            let _ = a;
        }
        let kappas: Vec<f64> = cols.iter().map(|c| (c.transpose() * killing * c)[(0, 0)]).collect();
        let mean = kappas.iter().sum::<f64>() / kappas.len() as f64;
        let var = kappas.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / kappas.len() as f64;
        let rel = var.sqrt() / mean.abs().max(f64::MIN_POSITIVE);
        if rel > KAPPA_TOL {
            return Err(Error::Decomposition(format!("Killing/Frobenius ratio varies within an ideal (rel std {rel:.2e})")));
        }
        ideals.push(SimpleIdeal { basis, kappa: mean, kappa_rel_std: rel });
    }
    for j in 0..center.ncols() {
        let a = adjoint_of(ads, center.column(j).as_slice());
        if a.norm() > tol {
            return Err(Error::Decomposition(format!("center element does not commute (norm {:.2e})", a.norm())));
        }
    }
    // deterministic order: larger ideals first, then by leading support
    let key = |i: &SimpleIdeal| {
        let lead = (0..d).find(|&r| i.basis.row(r).norm() > 1e-6).unwrap_or(d);
        (std::cmp::Reverse(i.dim()), lead)
    };
    ideals.sort_by_key(key);
    Ok(ideals)
}

/// Center plus simple ideals of `basis`, retrying with fresh randomness when
/// a draw is degenerate or fails validation.
pub fn decompose<E: LieElement>(basis: &DlaBasis<E>, seed: u64) -> Result<IdealDecomposition> {
    if basis.truncated {
        return Err(Error::Truncated(basis.dim()));
    }
    let ads = basis.adjoint_matrices()?;
    decompose_adjoints(ads, seed)
}

pub fn decompose_adjoints(ads: Vec<DMatrix<f64>>, seed: u64) -> Result<IdealDecomposition> {
    let killing = killing_from_adjoints(&ads);
    let (center, rest) = find_center(&killing);
    let mut last = None;
    for a in 0..MAX_ATTEMPTS {
        let s = seed.wrapping_add(a as u64);
        match attempt(&ads, &killing, &center, &rest, s) {
            Ok(ideals) => {
                return Ok(IdealDecomposition { ideals, center, killing, adjoints: ads, seed, attempts: a + 1 });
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Decomposition("no attempts".into())))
}

impl IdealDecomposition {
    pub fn dim(&self) -> usize {
        self.killing.nrows()
    }

    pub fn ideal_dims(&self) -> Vec<usize> {
        self.ideals.iter().map(|i| i.dim()).collect()
    }

    /// `x^T G x`.
    pub fn killing_norm_sq(&self, x: &DVector<f64>) -> f64 {
        (x.transpose() * &self.killing * x)[(0, 0)]
    }
}

pub fn project_components<E: LieElement>(basis: &DlaBasis<E>, dec: &IdealDecomposition, x: &E) -> Result<Components> {
    let coords = DVector::from_vec(basis.coordinates(x)?);
    let total_sq = x.norm_sq();
    Ok(Components {
        ideals: dec.ideals.iter().map(|i| i.basis.transpose() * &coords).collect(),
        center: dec.center.transpose() * &coords,
        outside_sq: (total_sq - coords.norm_squared()).max(0.0),
        total_sq,
    })
}
