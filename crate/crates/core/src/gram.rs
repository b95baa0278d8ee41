//! Inner-product settings of linearly independent basis states.
//!
//! A [`GramSetting`] stores the Hermitian, unit-diagonal matrix
//! `G_ij = <c_i|c_j>`. Everything downstream reads the basis geometry from it.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE};

/// Relative tolerance used to merge eigenvalues into degeneracy groups.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;

/// Minimum eigenvalue below which a basis is treated as linearly dependent.
pub const INDEPENDENCE_TOL: f64 = 1e-12;

const STRUCTURE_TOL: f64 = 1e-12;

/// One off-diagonal overlap `s_ij` with 1-based `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub i: usize,
    pub j: usize,
    pub value: Complex64,
}

impl Overlap {
    pub fn new(i: usize, j: usize, value: Complex64) -> Self {
        Self { i, j, value }
    }

    pub fn real(i: usize, j: usize, value: f64) -> Self {
        Self::new(i, j, c(value, 0.0))
    }
}

#[derive(Debug, Clone)]
pub struct GramSetting {
    dim: usize,
    overlaps: Vec<Overlap>,
    gram: CMatrix,
    embedding: OnceLock<std::result::Result<CMatrix, f64>>,
}

impl PartialEq for GramSetting {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.gram == other.gram
    }
}

/// Builds the Gram matrix from a sparse overlap list; missing pairs are zero.
///
/// Positive definiteness is not checked here, see [`validate`].
pub fn build_setting(d: usize, overlaps: &[Overlap]) -> Result<GramSetting> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut gram = CMatrix::identity(d, d);
    let mut seen = vec![false; d * d];
    for o in overlaps {
        if o.i < 1 || o.j > d || o.i >= o.j {
            return Err(Error::IndexOutOfRange { i: o.i, j: o.j, d });
        }
        let (a, b) = (o.i - 1, o.j - 1);
        if std::mem::replace(&mut seen[a * d + b], true) {
            return Err(Error::DuplicatePair { i: o.i, j: o.j });
        }
        let modulus = o.value.norm();
        if !(modulus < 1.0) {
            return Err(Error::OverlapTooLarge {
                i: o.i,
                j: o.j,
                modulus,
            });
        }
        gram[(a, b)] = o.value;
        gram[(b, a)] = o.value.conj();
    }
    let mut overlaps = overlaps.to_vec();
    overlaps.sort_by_key(|o| (o.i, o.j));
    Ok(GramSetting::from_parts(d, overlaps, gram))
}

impl GramSetting {
    fn from_parts(dim: usize, overlaps: Vec<Overlap>, gram: CMatrix) -> Self {
        Self {
            dim,
            overlaps,
            gram,
            embedding: OnceLock::new(),
        }
    }

    /// Adopts a full matrix, checking Hermiticity and the unit diagonal.
    pub fn from_matrix(gram: &CMatrix) -> Result<Self> {
        let d = gram.nrows();
        if gram.ncols() != d {
            return Err(Error::NotGram(format!("{}x{} is not square", d, gram.ncols())));
        }
        let defect = linalg::hermitian_defect(gram);
        if defect > STRUCTURE_TOL {
            return Err(Error::NotGram(format!("not Hermitian (defect {defect:e})")));
        }
        for k in 0..d {
            if (gram[(k, k)] - ONE).norm() > STRUCTURE_TOL {
                return Err(Error::NotGram(format!("diagonal entry {} = {}", k + 1, gram[(k, k)])));
            }
        }
        let mut overlaps = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let v = (gram[(i, j)] + gram[(j, i)].conj()) * 0.5;
                if v != linalg::ZERO {
                    overlaps.push(Overlap::new(i + 1, j + 1, v));
                }
            }
        }
        build_setting(d, &overlaps)
    }

    pub fn identity(d: usize) -> Result<Self> {
        build_setting(d, &[])
    }

    /// Every pair overlapping by the same real value `s`.
    pub fn equal_real(d: usize, s: f64) -> Result<Self> {
        let mut overlaps = Vec::new();
        for i in 1..=d {
            for j in i + 1..=d {
                overlaps.push(Overlap::real(i, j, s));
            }
        }
        build_setting(d, &overlaps)
    }

    pub fn qubit(s: Complex64) -> Result<Self> {
        build_setting(2, &[Overlap::new(1, 2, s)])
    }

    /// Three-level setting from `{s12, s13, s23}`.
    pub fn qutrit(s: [Complex64; 3]) -> Result<Self> {
        build_setting(
            3,
            &[
                Overlap::new(1, 2, s[0]),
                Overlap::new(1, 3, s[1]),
                Overlap::new(2, 3, s[2]),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.overlaps
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Upper-triangular `V` with positive diagonal and `V^dag V = G`.
    ///
    /// Column `k` holds the coordinates of `|c_k>` in an orthonormal frame.
    pub fn embedding(&self) -> Result<&CMatrix> {
        self.embedding
            .get_or_init(|| {
                let min = linalg::min_eigenvalue(&self.gram).unwrap_or(f64::NAN);
                if !(min > INDEPENDENCE_TOL) {
                    return Err(min);
                }
                nalgebra::Cholesky::new(self.gram.clone())
                    .map(|ch| ch.l().adjoint())
                    .ok_or(min)
            })
            .as_ref()
            .map_err(|&m| Error::NotPositiveDefinite(m))
    }

    /// `x^dag G y`.
    pub fn form(&self, x: &CVector, y: &CVector) -> Complex64 {
        x.dotc(&(&self.gram * y))
    }
}

/// Outcome of [`validate`]. Failures are carried as flags.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub dimension: usize,
    pub hermitian: bool,
    pub unit_diagonal: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `lambda_max / lambda_min`; infinite for a singular matrix.
    pub condition_number: f64,
    pub linearly_independent: bool,
    /// Closed-form determinant, only for d = 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<f64>,
    /// Whether the determinant sign agrees with the eigenvalue test (d = 3).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant_consistent: Option<bool>,
}

pub fn validate(setting: &GramSetting) -> ValidationReport {
    validate_with(setting, INDEPENDENCE_TOL)
}

pub fn validate_with(setting: &GramSetting, tol: f64) -> ValidationReport {
    let g = setting.gram();
    let d = setting.dim();
    let hermitian = linalg::hermitian_defect(g) <= STRUCTURE_TOL;
    let unit_diagonal = (0..d).all(|k| (g[(k, k)] - ONE).norm() <= STRUCTURE_TOL);
    let (min_eigenvalue, max_eigenvalue) = match linalg::hermitian_eigen(g) {
        Ok((vals, _)) => (vals[0], vals[d - 1]),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let linearly_independent = hermitian && unit_diagonal && min_eigenvalue > tol;
    let condition_number = if min_eigenvalue > 0.0 {
        max_eigenvalue / min_eigenvalue
    } else {
        f64::INFINITY
    };
    let (determinant, determinant_consistent) = if d == 3 {
        let det = determinant_d3(g[(0, 1)], g[(0, 2)], g[(1, 2)]);
        // the determinant is a product of eigenvalues, so compare on the same scale
        let det_positive = det > tol * max_eigenvalue.max(1.0).powi(2);
        (Some(det), Some(det_positive == (min_eigenvalue > tol)))
    } else {
        (None, None)
    };
    ValidationReport {
        dimension: d,
        hermitian,
        unit_diagonal,
        min_eigenvalue,
        max_eigenvalue,
        condition_number,
        linearly_independent,
        determinant,
        determinant_consistent,
    }
}

/// `1 - |s12|^2 - |s13|^2 - |s23|^2 + s12 s13^* s23 + s12^* s13 s23^*`.
pub fn determinant_d3(s12: Complex64, s13: Complex64, s23: Complex64) -> f64 {
    1.0 - s12.norm_sqr() - s13.norm_sqr() - s23.norm_sqr() + 2.0 * (s12 * s13.conj() * s23).re
}

/// Ascending spectrum of a Gram matrix with degeneracy classes.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, each phase-fixed so that its
    /// first non-negligible component is real positive.
    pub vectors: CMatrix,
    /// Index groups of (numerically) equal eigenvalues, in ascending order.
    pub groups: Vec<Vec<usize>>,
}

impl EigenSystem {
    pub fn lambda_min(&self) -> f64 {
        self.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn min_multiplicity(&self) -> usize {
        self.groups[0].len()
    }

    /// Orthonormal basis (as columns) of the eigenspace of `lambda_min`.
    pub fn min_eigenspace(&self) -> CMatrix {
        let group = &self.groups[0];
        let mut basis = CMatrix::zeros(self.vectors.nrows(), group.len());
        for (col, &k) in group.iter().enumerate() {
            basis.set_column(col, &self.vectors.column(k));
        }
        basis
    }
}

pub fn eigensystem(setting: &GramSetting, degeneracy_rel_tol: f64) -> Result<EigenSystem> {
    let (values, mut vectors) = linalg::hermitian_eigen(setting.gram())?;
    for k in 0..vectors.ncols() {
        let mut v = vectors.column(k).into_owned();
        linalg::fix_phase(&mut v);
        vectors.set_column(k, &v);
    }
    let scale = degeneracy_rel_tol * values.last().copied().unwrap_or(0.0).abs();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..values.len() {
        match groups.last_mut() {
            Some(g) if (values[k] - values[*g.last().unwrap()]).abs() <= scale => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    Ok(EigenSystem {
        values,
        vectors,
        groups,
    })
}

/// `x^dag G x / x^dag x`.
pub fn rayleigh(setting: &GramSetting, x: &CVector) -> Result<f64> {
    if x.len() != setting.dim() {
        return Err(Error::DimensionMismatch {
            expected: setting.dim(),
            got: x.len(),
        });
    }
    let norm_sq = x.norm_squared();
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(setting.form(x, x).re / norm_sq)
}

/// Cholesky embedding of `setting`, see [`GramSetting::embedding`].
pub fn embedding(setting: &GramSetting) -> Result<CMatrix> {
    setting.embedding().cloned()
}

/// Rotates the orthonormal frame: returns `U V`, which has the same Gram matrix.
pub fn reorient_embedding(v: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    if u.nrows() != v.nrows() || u.ncols() != v.nrows() {
        return Err(Error::DimensionMismatch {
            expected: v.nrows(),
            got: u.nrows(),
        });
    }
    let defect = linalg::unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    Ok(u * v)
}
