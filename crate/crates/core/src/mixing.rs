//! Random walk on the `t`-th tensor power of the adjoint representation.
//!
//! One step picks a basis element `F_k` uniformly and applies the Haar twirl
//! over the one-parameter group it generates, which is the orthogonal
//! projector onto the kernel of `ad_k^(t) = sum_r 1 (x) .. (x) ad_k (x) .. (x) 1`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `d^t` handled with dense matrices.
pub const WALK_DIM_CAP: usize = 600;

/// Relative eigenvalue cutoff for kernel projectors.
const KERNEL_TOL: f64 = 1e-10;

/// Decay values below this are rounding noise around `T*` and are left out
/// of rate fits.
pub const DECAY_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct MomentWalk {
    pub d: usize,
    pub t: usize,
    /// `T = (1/d) sum_k KerProj(ad_k^(t))`.
    pub transfer: DMatrix<f64>,
    /// Projector onto the joint kernel.
    pub invariant: DMatrix<f64>,
    pub invariant_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub dla_dim: usize,
    pub t: usize,
    pub gap: f64,
    pub invariant_dim: usize,
    pub stable_killing_rank: f64,
    pub decay: Vec<f64>,
    pub fitted_rate: Option<f64>,
}

/// `sum_r 1 (x) .. (x) ad (x) .. (x) 1` with `t` factors.
pub fn tensor_power_action(ad: &DMatrix<f64>, t: usize) -> DMatrix<f64> {
    let d = ad.nrows();
    let eye = DMatrix::<f64>::identity(d, d);
    let mut out = ad.clone();
    let mut ident = eye.clone();
    for _ in 1..t {
        out = out.kronecker(&eye) + ident.kronecker(ad);
        ident = ident.kronecker(&eye);
    }
    out
}

/// Projector onto the kernel of a symmetric positive semidefinite matrix.
pub fn kernel_projector(psd: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let n = psd.nrows();
    let eig = SymmetricEigen::new(psd.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut rank = 0;
    for i in 0..n {
        if top == 0.0 || eig.eigenvalues[i] <= KERNEL_TOL * top {
            let v = eig.eigenvectors.column(i);
            p += v * v.transpose();
            rank += 1;
        }
    }
    (p, rank)
}

/// Spectral norm of a symmetric matrix.
pub fn sym_op_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

pub fn moment_walk(ads: &[DMatrix<f64>], t: usize) -> Result<MomentWalk> {
    let d = ads.len();
    if d == 0 || t == 0 {
        return Err(Error::Invalid("moment walk needs d >= 1 and t >= 1".into()));
    }
    let big = d.checked_pow(t as u32).filter(|&x| x <= WALK_DIM_CAP);
    let big = big.ok_or_else(|| Error::Infeasible(format!("walk on dimension {d}^{t} (cap {WALK_DIM_CAP})")))?;
    let mut transfer = DMatrix::<f64>::zeros(big, big);
    let mut casimir = DMatrix::<f64>::zeros(big, big);
    for ad in ads {
        let a = tensor_power_action(ad, t);
        let s = a.transpose() * &a;
        transfer += kernel_projector(&s).0;
        casimir += s;
    }
    transfer /= d as f64;
    let (invariant, invariant_dim) = kernel_projector(&casimir);
    Ok(MomentWalk { d, t, transfer, invariant, invariant_dim })
}

impl MomentWalk {
    /// `1 - ||T - T*||_op`.
    pub fn spectral_gap(&self) -> f64 {
        1.0 - sym_op_norm(&(&self.transfer - &self.invariant))
    }

    /// `||T^L - T*||_op` for `L = 1..=l_max`.
    pub fn decay(&self, l_max: usize) -> Vec<f64> {
        let mut p = self.transfer.clone();
        let mut out = Vec::with_capacity(l_max);
        for l in 1..=l_max {
            if l > 1 {
                p = &p * &self.transfer;
            }
            let diff = &p - &self.invariant;
            out.push(sym_op_norm(&((&diff + diff.transpose()) * 0.5)));
        }
        out
    }
}

/// `min_k ||ad_k||_F^2 / ||ad_k||_op^2` over the non-central basis elements.
pub fn stable_killing_rank(ads: &[DMatrix<f64>]) -> f64 {
    ads.iter()
        .filter_map(|a| {
            let op = sym_op_norm(&(a.transpose() * a));
            (op > 0.0).then(|| a.norm_squared() / op)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Least-squares slope of `ln eps(L)` against `L`, mapped to a per-step
/// contraction `1 - exp(slope)`. Points at or below `floor` are ignored.
pub fn fit_decay_rate(decay: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = decay
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > floor)
        .map(|(i, &e)| ((i + 1) as f64, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(1.0 - (sxy / sxx).exp())
}

/// First `L` with `eps(L) < target`, if any within the curve.
pub fn steps_to_reach(decay: &[f64], target: f64) -> Option<usize> {
    decay.iter().position(|&e| e < target).map(|i| i + 1)
}

pub fn mixing_report(ads: &[DMatrix<f64>], t: usize, l_max: usize) -> Result<MixingReport> {
    let walk = moment_walk(ads, t)?;
    let decay = walk.decay(l_max);
    Ok(MixingReport {
        dla_dim: ads.len(),
        t,
        gap: walk.spectral_gap(),
        invariant_dim: walk.invariant_dim,
        stable_killing_rank: stable_killing_rank(ads),
        fitted_rate: fit_decay_rate(&decay, DECAY_FLOOR),
        decay,
    })
}
