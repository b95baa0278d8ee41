//! Superposition-free Kraus operators in the coefficient (matrix) picture.
//!
//! An operator `K` acting on the span of the basis is represented by the
//! matrix `Kt` with `K V = V Kt`, where `V` is the embedding of the setting.
//! `K` is free when every basis state is sent to a multiple of a single basis
//! state, which means `Kt` has at most one nonzero entry per column. A family
//! is trace preserving iff `sum Kt^dag G Kt = G`.

use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::GramSetting;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::parallel::Exec;
use crate::states::{self, DensityOperator, SuperpositionState};

/// Largest dimension for which the `d!` permutation operators are built.
pub const MAX_S1_DIM: usize = 8;
/// Frobenius bound on the completeness residual.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Lower bound on the residual's smallest eigenvalue accepted as PSD.
pub const PSD_TOL: f64 = 1e-10;
/// Bound on `|R psi|` accepted as annihilation.
pub const ANNIHILATION_TOL: f64 = 1e-10;
/// Entries at or below this modulus count as zero in the freeness test.
pub const FREENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KrausKind {
    /// Permutation-structured, entry `(perm[j], j)` nonzero in column `j`.
    S1 { perm: Vec<usize> },
    /// Only row `row` is nonzero.
    S2 { row: usize },
    General,
}

#[derive(Debug, Clone)]
pub struct FreeKraus {
    pub matrix: CMatrix,
    pub kind: KrausKind,
}

impl FreeKraus {
    /// Wraps an arbitrary matrix after checking the column rule.
    pub fn general(matrix: CMatrix) -> Result<Self> {
        if !is_free_kraus(&matrix, FREENESS_TOL) {
            return Err(Error::Mismatch("matrix has a column with two nonzero entries".into()));
        }
        Ok(Self {
            matrix,
            kind: KrausKind::General,
        })
    }

    /// `Kt^dag G Kt`.
    pub fn gram_term(&self, gram: &CMatrix) -> CMatrix {
        match &self.kind {
            KrausKind::S1 { perm } => {
                let d = perm.len();
                let a: Vec<Complex64> = (0..d).map(|j| self.matrix[(perm[j], j)]).collect();
                CMatrix::from_fn(d, d, |j, l| a[j].conj() * gram[(perm[j], perm[l])] * a[l])
            }
            KrausKind::S2 { row } => {
                let r = self.matrix.row(*row).into_owned();
                r.adjoint() * gram[(*row, *row)] * r
            }
            KrausKind::General => self.matrix.adjoint() * gram * &self.matrix,
        }
    }
}

/// True iff every column of `m` has at most one entry with modulus above `tol`.
pub fn is_free_kraus(m: &CMatrix, tol: f64) -> bool {
    m.column_iter()
        .all(|col| col.iter().filter(|z| z.norm() > tol).count() <= 1)
}

fn check_pair(psi: &SuperpositionState, phi: &SuperpositionState) -> Result<()> {
    if !states::same_setting(psi.setting(), phi.setting()) {
        return Err(Error::SettingMismatch);
    }
    let d = psi.dim();
    if d > MAX_S1_DIM {
        return Err(Error::TooLarge(d));
    }
    if let Some(j) = psi.coeffs().iter().position(|z| z.norm() <= states::RANK_ZERO_TOL) {
        return Err(Error::RankDeficient(j + 1));
    }
    Ok(())
}

/// The `d!` operators sending `psi` to `sqrt(1/d!) phi`, in lexicographic
/// permutation order. Operator `n` has entry `(sigma_n(j), j)` equal to
/// `sqrt(1/d!) phi_{sigma_n(j)} / psi_j`.
pub fn build_s1(psi: &SuperpositionState, phi: &SuperpositionState) -> Result<Vec<FreeKraus>> {
    build_s1_with(psi, phi, Exec::default())
}

pub fn build_s1_with(psi: &SuperpositionState, phi: &SuperpositionState, exec: Exec) -> Result<Vec<FreeKraus>> {
    check_pair(psi, phi)?;
    let d = psi.dim();
    let perms: Vec<Vec<usize>> = (0..d).permutations(d).collect();
    let amp = (1.0 / perms.len() as f64).sqrt();
    let (x, y) = (psi.coeffs(), phi.coeffs());
    Ok(exec.map_slice(&perms, |perm| {
        let mut m = CMatrix::zeros(d, d);
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = y[i] * amp / x[j];
        }
        FreeKraus {
            matrix: m,
            kind: KrausKind::S1 { perm: perm.clone() },
        }
    }))
}

/// `sum_n Kt_n^dag G Kt_n`; the zero matrix for an empty list.
pub fn kraus_sum(setting: &GramSetting, ops: &[FreeKraus]) -> CMatrix {
    kraus_sum_with(setting, ops, Exec::default())
}

pub fn kraus_sum_with(setting: &GramSetting, ops: &[FreeKraus], exec: Exec) -> CMatrix {
    let d = setting.dim();
    let g = setting.gram();
    exec.fold_sum(
        ops.len(),
        CMatrix::zeros(d, d),
        |n| ops[n].gram_term(g),
        |a, b| a + b,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    #[serde(skip)]
    pub residual: CMatrix,
    /// Smallest eigenvalue of `R = G - K`.
    pub psd_margin: f64,
    /// `|R psi|`.
    pub annihilation: f64,
    pub diagonally_dominant: bool,
    /// `min_i (R_ii - sum_{l != i} |R_il|)`.
    pub dominance_margin: f64,
}

impl ResidualReport {
    pub fn passes(&self) -> bool {
        self.psd_margin >= -PSD_TOL && self.annihilation <= ANNIHILATION_TOL
    }
}

pub fn residual(setting: &GramSetting, kraus_sum: &CMatrix, psi: &SuperpositionState) -> Result<ResidualReport> {
    let r = setting.gram() - kraus_sum;
    let r = (&r + r.adjoint()) * c(0.5, 0.0);
    let psd_margin = linalg::min_eigenvalue(&r)?;
    let annihilation = linalg::vec_norm(&(&r * psi.coeffs()));
    let d = r.nrows();
    let dominance_margin = (0..d)
        .map(|i| r[(i, i)].re - (0..d).filter(|&l| l != i).map(|l| r[(i, l)].norm()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(ResidualReport {
        residual: r,
        psd_margin,
        annihilation,
        diagonally_dominant: dominance_margin >= -PSD_TOL,
        dominance_margin,
    })
}

/// Single-row operators with `sum F^dag G F = R` and `F psi = 0`.
///
/// `R` is first compressed onto the complement of `psi`; directions with
/// eigenvalue below `1e-14 max(1, mu_max)` are dropped.
pub fn build_s2(residual: &CMatrix, psi: &SuperpositionState) -> Result<Vec<FreeKraus>> {
    let d = residual.nrows();
    let x = psi.coeffs();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let margin = linalg::min_eigenvalue(residual)?;
    if margin < -PSD_TOL {
        return Err(Error::NotPsd(margin));
    }
    let annihilation = linalg::vec_norm(&(residual * x));
    if annihilation > ANNIHILATION_TOL {
        return Err(Error::NotAnnihilating(annihilation));
    }
    let p = CMatrix::identity(d, d) - linalg::outer(x, x) / c(x.norm_squared(), 0.0);
    let compressed = &p * residual * &p;
    let (values, vectors) = linalg::hermitian_eigen(&compressed)?;
    let mu_max = values.last().copied().unwrap_or(0.0);
    let cutoff = 1e-14 * mu_max.max(1.0);
    let mut ops = Vec::new();
    for (k, &mu) in values.iter().enumerate() {
        if mu <= cutoff {
            continue;
        }
        let w: CVector = vectors.column(k) * c(mu.sqrt(), 0.0);
        let row = ops.len();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..d {
            m[(row, j)] = w[j].conj();
        }
        ops.push(FreeKraus {
            matrix: m,
            kind: KrausKind::S2 { row },
        });
    }
    Ok(ops)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub n_s1: usize,
    pub n_s2: usize,
    /// `|sum K^dag G K + sum F^dag G F - G|_F`.
    pub frobenius_residual: f64,
    /// Smallest eigenvalue of `G` minus the S1 sum, when a source state is known.
    pub psd_margin: Option<f64>,
    /// `|R psi|` for that residual.
    pub annihilation: Option<f64>,
    pub pass: bool,
    /// The target has a vanishing coefficient.
    pub rank_deficient_target: bool,
}

/// Initial and target state a set was synthesized for.
#[derive(Debug, Clone)]
pub struct Source {
    pub psi: SuperpositionState,
    pub phi: SuperpositionState,
}

#[derive(Debug, Clone)]
pub struct KrausSet {
    pub s1: Vec<FreeKraus>,
    /// Probability attached to each S1 operator (already folded into the matrices).
    pub probs: Vec<f64>,
    pub s2: Vec<FreeKraus>,
    pub setting: Arc<GramSetting>,
    pub source: Option<Source>,
    pub residual: Option<ResidualReport>,
}

impl KrausSet {
    /// Builds S1 for `(psi, phi)`, then S2 from the residual when it is PSD
    /// and annihilates `psi`. Otherwise S2 is left empty and the set will not
    /// certify.
    pub fn synthesize(psi: &SuperpositionState, phi: &SuperpositionState) -> Result<Self> {
        Self::synthesize_with(psi, phi, Exec::default())
    }

    pub fn synthesize_with(psi: &SuperpositionState, phi: &SuperpositionState, exec: Exec) -> Result<Self> {
        let s1 = build_s1_with(psi, phi, exec)?;
        let setting = Arc::clone(psi.setting());
        let k = kraus_sum_with(&setting, &s1, exec);
        let report = residual(&setting, &k, psi)?;
        let s2 = if report.passes() {
            build_s2(&report.residual, psi)?
        } else {
            Vec::new()
        };
        let p = 1.0 / s1.len() as f64;
        Ok(Self {
            probs: vec![p; s1.len()],
            s1,
            s2,
            setting,
            source: Some(Source {
                psi: psi.clone(),
                phi: phi.clone(),
            }),
            residual: Some(report),
        })
    }

    /// A set from explicit operators, each checked for freeness.
    pub fn from_parts(setting: &Arc<GramSetting>, s1: Vec<FreeKraus>, s2: Vec<FreeKraus>) -> Result<Self> {
        let d = setting.dim();
        for op in s1.iter().chain(&s2) {
            if op.matrix.nrows() != d || op.matrix.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: op.matrix.nrows(),
                });
            }
            if !is_free_kraus(&op.matrix, FREENESS_TOL) {
                return Err(Error::Mismatch("operator is not superposition-free".into()));
            }
        }
        let probs = vec![f64::NAN; s1.len()];
        Ok(Self {
            s1,
            probs,
            s2,
            setting: Arc::clone(setting),
            source: None,
            residual: None,
        })
    }

    /// The single-operator identity channel.
    pub fn identity(setting: &Arc<GramSetting>) -> Self {
        let d = setting.dim();
        Self {
            s1: vec![FreeKraus {
                matrix: CMatrix::identity(d, d),
                kind: KrausKind::S1 { perm: (0..d).collect() },
            }],
            probs: vec![1.0],
            s2: Vec::new(),
            setting: Arc::clone(setting),
            source: None,
            residual: None,
        }
    }

    pub fn operators(&self) -> impl Iterator<Item = &FreeKraus> {
        self.s1.iter().chain(&self.s2)
    }

    pub fn len(&self) -> usize {
        self.s1.len() + self.s2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Operators as nested `[re, im]` arrays, row-major.
    pub fn to_json(&self) -> serde_json::Value {
        let export = |ops: &[FreeKraus]| -> Vec<serde_json::Value> {
            ops.iter()
                .map(|op| {
                    let rows: Vec<Vec<[f64; 2]>> = op
                        .matrix
                        .row_iter()
                        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                        .collect();
                    serde_json::json!({ "kind": op.kind, "matrix": rows })
                })
                .collect()
        };
        serde_json::json!({
            "d": self.setting.dim(),
            "s1": export(&self.s1),
            "probs": self.probs.iter().map(|p| if p.is_finite() { Some(*p) } else { None }).collect::<Vec<_>>(),
            "s2": export(&self.s2),
        })
    }
}

pub fn verify_trace_preserving(setting: &GramSetting, set: &KrausSet) -> Certificate {
    verify_trace_preserving_with(setting, set, Exec::default())
}

pub fn verify_trace_preserving_with(setting: &GramSetting, set: &KrausSet, exec: Exec) -> Certificate {
    let total = kraus_sum_with(setting, &set.s1, exec) + kraus_sum_with(setting, &set.s2, exec);
    let frobenius_residual = linalg::frobenius(&(total - setting.gram()));
    let rank_deficient_target = set
        .source
        .as_ref()
        .is_some_and(|s| s.phi.coeffs().iter().any(|z| z.norm() <= states::RANK_ZERO_TOL));
    Certificate {
        n_s1: set.s1.len(),
        n_s2: set.s2.len(),
        frobenius_residual,
        psd_margin: set.residual.as_ref().map(|r| r.psd_margin),
        annihilation: set.residual.as_ref().map(|r| r.annihilation),
        pass: frobenius_residual <= CERTIFICATE_TOL,
        rank_deficient_target,
    }
}

/// `sum K rho K^dag` for a certified set, returned in the embedding frame.
pub fn apply_map(set: &KrausSet, rho: &DensityOperator) -> Result<DensityOperator> {
    if !states::same_setting(&set.setting, rho.setting()) {
        return Err(Error::SettingMismatch);
    }
    let cert = verify_trace_preserving(&set.setting, set);
    if !cert.pass {
        return Err(Error::NotCertified(cert.frobenius_residual));
    }
    let rc = rho.coefficient_bilinear()?;
    let d = rc.nrows();
    let mut out = CMatrix::zeros(d, d);
    for op in set.operators() {
        out += &op.matrix * &rc * op.matrix.adjoint();
    }
    let v = set.setting.embedding()?;
    let m = v * out * v.adjoint();
    Ok(DensityOperator::from_embedded((&m + m.adjoint()) * c(0.5, 0.0), Arc::clone(&set.setting)))
}

/// `sum_k w_k Phi_k(|psi><psi|)`, where `Phi_k` converts `psi` into `targets[k]`.
pub fn apply_mixed(psi: &SuperpositionState, targets: &[SuperpositionState], weights: &[f64]) -> Result<DensityOperator> {
    if targets.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: targets.len(),
            got: weights.len(),
        });
    }
    states::check_weights(weights)?;
    let rho = states::density_pure(psi)?;
    let d = psi.dim();
    let mut acc = CMatrix::zeros(d, d);
    for (phi, &w) in targets.iter().zip(weights) {
        let set = KrausSet::synthesize(psi, phi)?;
        acc += apply_map(&set, &rho)?.matrix() * c(w, 0.0);
    }
    Ok(DensityOperator::from_embedded(acc, Arc::clone(psi.setting())))
}
