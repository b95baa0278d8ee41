//! Seeded random states, settings and unitaries.
//!
//! Every generator takes an explicit RNG. [`stream_rng`] gives each sample
//! index its own ChaCha stream so that sweeps produce the same draws
//! whether they run sequentially or in parallel.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gram::GramSetting;
use crate::linalg::{c, CMatrix, CVector};
use crate::states::{self, DensityOperator, SuperpositionState};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Vector of i.i.d. standard complex Gaussians.
pub fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    CVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Normalized state with Gaussian coefficients.
pub fn random_state<R: Rng + ?Sized>(setting: &Arc<GramSetting>, rng: &mut R) -> Result<SuperpositionState> {
    states::normalize(gaussian_vector(setting.dim(), rng), setting)
}

/// Mixture of `rank` random pure states with flat Dirichlet-like weights.
pub fn random_mixed_state<R: Rng + ?Sized>(
    setting: &Arc<GramSetting>,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    let rank = rank.max(1);
    let pure: Vec<SuperpositionState> = (0..rank)
        .map(|_| random_state(setting, rng))
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = (0..rank).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..rank - 1].iter().sum();
    weights[rank - 1] = 1.0 - head;
    states::density_mixed(&pure, &weights)
}

/// Random diagonal mixture of basis projectors.
pub fn random_free_state<R: Rng + ?Sized>(setting: &Arc<GramSetting>, rng: &mut R) -> Result<DensityOperator> {
    let d = setting.dim();
    let raw: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..d - 1].iter().sum();
    weights[d - 1] = 1.0 - head;
    DensityOperator::free(&weights, setting)
}

/// Gram-Schmidt on the columns of `m`, in place; returns false if a column vanishes.
fn orthonormalize_columns(m: &mut CMatrix) -> bool {
    for j in 0..m.ncols() {
        for k in 0..j {
            let proj = m.column(k).dotc(&m.column(j));
            let qk = m.column(k).into_owned();
            let mut col = m.column_mut(j);
            col -= qk * proj;
        }
        let n = m.column(j).norm();
        if n < 1e-10 {
            return false;
        }
        m.column_mut(j).unscale_mut(n);
    }
    true
}

/// Haar-like unitary from orthonormalized Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    loop {
        let mut m = CMatrix::from_fn(d, d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        });
        if orthonormalize_columns(&mut m) {
            return m;
        }
    }
}

/// Setting spanned by `d` random unit vectors in `C^d`.
pub fn random_setting<R: Rng + ?Sized>(d: usize, rng: &mut R) -> GramSetting {
    loop {
        let mut vs = CMatrix::from_fn(d, d, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c(re, im)
        });
        for mut col in vs.column_iter_mut() {
            let n = col.norm();
            col.unscale_mut(n);
        }
        let g = vs.adjoint() * &vs;
        if let Ok(setting) = GramSetting::from_matrix(&g) {
            if setting.embedding().is_ok() {
                return setting;
            }
        }
    }
}

/// Setting with real overlaps drawn uniformly from `(-max_abs, max_abs)`,
/// redrawn until positive definite.
pub fn random_real_setting<R: Rng + ?Sized>(d: usize, max_abs: f64, rng: &mut R) -> GramSetting {
    loop {
        let g = CMatrix::from_fn(d, d, |_, _| c(0.0, 0.0));
        let mut g = g + CMatrix::identity(d, d);
        for i in 0..d {
            for j in i + 1..d {
                let s = rng.random_range(-max_abs..max_abs);
                g[(i, j)] = c(s, 0.0);
                g[(j, i)] = c(s, 0.0);
            }
        }
        if let Ok(setting) = GramSetting::from_matrix(&g) {
            if setting.embedding().is_ok() {
                return setting;
            }
        }
    }
}

/// Unitary `3 x 3` frame whose first column is `(e^{i t_1}, e^{i t_2}, e^{i t_3}) / sqrt 3`.
pub fn random_golden_frame<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let r = 1.0 / 3f64.sqrt();
    loop {
        let mut m = random_unitary(3, rng);
        for i in 0..3 {
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            m[(i, 0)] = num_complex::Complex64::from_polar(r, t);
        }
        if orthonormalize_columns(&mut m) {
            return m;
        }
    }
}
