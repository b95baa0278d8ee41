//! Pure and mixed superposition states over a nonorthogonal basis.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gram::GramSetting;
use crate::linalg::{self, c, CMatrix, CVector};

/// Tolerance on `psi^dag G psi = 1` for states asserted to be normalized.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Default cutoff for counting nonzero coefficients.
pub const RANK_ZERO_TOL: f64 = 1e-12;

/// Coefficient vector `psi` of `|psi> = sum_k psi_k |c_k>`.
#[derive(Debug, Clone)]
pub struct SuperpositionState {
    coeffs: CVector,
    setting: Arc<GramSetting>,
}

impl SuperpositionState {
    /// Wraps coefficients without checking normalization.
    pub(crate) fn from_raw(coeffs: CVector, setting: Arc<GramSetting>) -> Self {
        Self { coeffs, setting }
    }

    /// Wraps coefficients that are claimed to be normalized; the claim is checked.
    pub fn from_normalized(coeffs: CVector, setting: Arc<GramSetting>) -> Result<Self> {
        check_dim(&coeffs, &setting)?;
        let n = setting.form(&coeffs, &coeffs).re;
        if (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { coeffs, setting })
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn setting(&self) -> &Arc<GramSetting> {
        &self.setting
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `psi^dag G psi`.
    pub fn norm_sq(&self) -> f64 {
        self.setting.form(&self.coeffs, &self.coeffs).re
    }

    /// Coordinates of the state in the orthonormal embedding frame, `V psi`.
    pub fn embedded(&self) -> Result<CVector> {
        Ok(self.setting.embedding()? * &self.coeffs)
    }

    /// Coefficient moduli.
    pub fn moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.norm()).collect()
    }
}

fn check_dim(v: &CVector, setting: &GramSetting) -> Result<()> {
    if v.len() != setting.dim() {
        return Err(Error::DimensionMismatch {
            expected: setting.dim(),
            got: v.len(),
        });
    }
    Ok(())
}

pub(crate) fn same_setting(a: &Arc<GramSetting>, b: &Arc<GramSetting>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `<phi|psi> = phi^dag G psi`.
pub fn inner(phi: &SuperpositionState, psi: &SuperpositionState) -> Result<Complex64> {
    if !same_setting(&phi.setting, &psi.setting) {
        return Err(Error::SettingMismatch);
    }
    Ok(psi.setting.form(&phi.coeffs, &psi.coeffs))
}

/// Scales `raw` so that `psi^dag G psi = 1` and fixes the global phase.
pub fn normalize(raw: CVector, setting: &Arc<GramSetting>) -> Result<SuperpositionState> {
    check_dim(&raw, setting)?;
    let n = setting.form(&raw, &raw).re;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut coeffs = raw / c(n.sqrt(), 0.0);
    linalg::fix_phase(&mut coeffs);
    Ok(SuperpositionState {
        coeffs,
        setting: Arc::clone(setting),
    })
}

/// `diag(psi^*) G psi`; its components sum to `psi^dag G psi`.
pub fn tilde(psi: &SuperpositionState) -> CVector {
    let g_psi = psi.setting.gram() * &psi.coeffs;
    psi.coeffs.zip_map(&g_psi, |a, b| a.conj() * b)
}

/// Largest `|tilde_i - 1/d|`.
pub fn tilde_deviation(psi: &SuperpositionState) -> f64 {
    let target = 1.0 / psi.dim() as f64;
    tilde(psi)
        .iter()
        .map(|t| (t - c(target, 0.0)).norm())
        .fold(0.0, f64::max)
}

pub fn superposition_rank(psi: &SuperpositionState, zero_tol: f64) -> usize {
    psi.coeffs.iter().filter(|z| z.norm() > zero_tol).count()
}

/// Density operator in the orthonormal embedding frame of its setting.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    setting: Arc<GramSetting>,
}

impl DensityOperator {
    pub(crate) fn from_embedded(matrix: CMatrix, setting: Arc<GramSetting>) -> Self {
        Self { matrix, setting }
    }

    /// Builds `V rho_c V^dag` from basis-bilinear coefficients
    /// `rho = sum_ij rho_c[i,j] |c_i><c_j|`.
    pub fn from_coefficients(rho_c: &CMatrix, setting: &Arc<GramSetting>) -> Result<Self> {
        let v = setting.embedding()?;
        Ok(Self {
            matrix: v * rho_c * v.adjoint(),
            setting: Arc::clone(setting),
        })
    }

    /// A superposition-free state `sum_k q_k |c_k><c_k|`.
    pub fn free(weights: &[f64], setting: &Arc<GramSetting>) -> Result<Self> {
        check_weights(weights)?;
        let diag = CMatrix::from_diagonal(&linalg::real_cvec(weights));
        Self::from_coefficients(&diag, setting)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn setting(&self) -> &Arc<GramSetting> {
        &self.setting
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Coefficients `rho_c` with `V rho_c V^dag = rho`.
    pub fn coefficient_bilinear(&self) -> Result<CMatrix> {
        let v = self.setting.embedding()?;
        let left = linalg::solve_upper(v, &self.matrix);
        Ok(linalg::solve_upper(v, &left.adjoint()).adjoint())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// Hermitian, unit trace, and PSD within `1e-10`.
    pub fn is_valid(&self) -> bool {
        linalg::hermitian_defect(&self.matrix) <= 1e-10
            && (self.trace() - 1.0).abs() <= 1e-10
            && self.min_eigenvalue().map(|m| m >= -1e-10).unwrap_or(false)
    }
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || weights.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(sum));
    }
    Ok(())
}

pub fn density_pure(psi: &SuperpositionState) -> Result<DensityOperator> {
    let v = psi.embedded()?;
    Ok(DensityOperator {
        matrix: linalg::outer(&v, &v),
        setting: Arc::clone(&psi.setting),
    })
}

/// `sum_i p_i |psi_i><psi_i|` in the embedding frame.
pub fn density_mixed(states: &[SuperpositionState], weights: &[f64]) -> Result<DensityOperator> {
    if states.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            got: weights.len(),
        });
    }
    check_weights(weights)?;
    let setting = Arc::clone(&states[0].setting);
    let d = setting.dim();
    let mut matrix = CMatrix::zeros(d, d);
    for (psi, &p) in states.iter().zip(weights) {
        if !same_setting(&psi.setting, &setting) {
            return Err(Error::SettingMismatch);
        }
        let v = psi.embedded()?;
        matrix += linalg::outer(&v, &v) * c(p, 0.0);
    }
    Ok(DensityOperator { matrix, setting })
}
