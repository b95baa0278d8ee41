//! Detection and construction of maximal ("golden") superposition states.
//!
//! A golden candidate must be an eigenvector of `G` for `lambda_min` whose
//! tilde vector is uniform, `tilde_i = 1/d`. Both conditions are necessary;
//! whether a candidate actually converts to every target is certified
//! per instance by [`crate::freeops`].

mod search;
mod table1;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::{self, GramSetting, DEGENERACY_REL_TOL};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::states::{self, SuperpositionState};

pub use search::{search_eigenspace, SearchOptions, SearchResult, StartResult};
pub use table1::{table1_row, Table1Row, Table1Sign};

/// Tilde deviation and eigen-residual bound for accepting a candidate.
pub const ACCEPT_TOL: f64 = 1e-9;
/// Best deviations above this are reported as `none`; in between is `inconclusive`.
pub const REJECT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Found,
    None,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct GoldenCandidate {
    pub state: SuperpositionState,
    pub lambda_min: f64,
    /// `max_i |tilde_i - 1/d|`.
    pub tilde_deviation: f64,
    /// `|G psi - lambda_min psi|`.
    pub eigen_residual: f64,
}

impl GoldenCandidate {
    /// Scores a normalized state against `lambda_min`.
    pub fn evaluate(state: SuperpositionState, lambda_min: f64) -> Self {
        let g_psi = state.setting().gram() * state.coeffs();
        let eigen_residual = linalg::vec_norm(&(g_psi - state.coeffs() * c(lambda_min, 0.0)));
        let tilde_deviation = states::tilde_deviation(&state);
        Self {
            state,
            lambda_min,
            tilde_deviation,
            eigen_residual,
        }
    }

    pub fn is_accepted(&self, tol: f64) -> bool {
        self.tilde_deviation <= tol && self.eigen_residual <= tol
    }

    /// `max |psi_i| - min |psi_i|`.
    pub fn modulus_spread(&self) -> f64 {
        let m = self.state.moduli();
        let hi = m.iter().cloned().fold(f64::MIN, f64::max);
        let lo = m.iter().cloned().fold(f64::MAX, f64::min);
        hi - lo
    }
}

#[derive(Debug, Clone)]
pub struct GoldenSearchReport {
    pub outcome: Outcome,
    pub candidate: Option<GoldenCandidate>,
    /// Best tilde deviation seen (equal to the candidate's when found).
    pub best_deviation: f64,
    /// Multiplicity of `lambda_min`.
    pub multiplicity: usize,
    /// Number of multistarts evaluated (0 for a simple `lambda_min`).
    pub starts: usize,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    pub accept_tol: f64,
    pub reject_tol: f64,
    pub degeneracy_rel_tol: f64,
    pub search: SearchOptions,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            accept_tol: ACCEPT_TOL,
            reject_tol: REJECT_TOL,
            degeneracy_rel_tol: DEGENERACY_REL_TOL,
            search: SearchOptions::default(),
        }
    }
}

/// Equal-modulus form `sqrt(1/(d lambda_min)) (e^{i theta_1}, …, e^{i theta_d})`.
///
/// The result is normalized only when the phases describe an eigenvector of
/// `lambda_min`.
pub fn candidate_form(
    setting: &Arc<GramSetting>,
    lambda_min: f64,
    phases: &[f64],
) -> Result<SuperpositionState> {
    let d = setting.dim();
    if phases.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: phases.len(),
        });
    }
    if !(lambda_min > 0.0) {
        return Err(Error::OutOfRange {
            name: "lambda_min",
            value: lambda_min,
            range: "(0, inf)",
        });
    }
    let a = (1.0 / (d as f64 * lambda_min)).sqrt();
    let coeffs = CVector::from_iterator(d, phases.iter().map(|&t| num_complex::Complex64::from_polar(a, t)));
    Ok(SuperpositionState::from_raw(coeffs, Arc::clone(setting)))
}

pub fn detect(setting: &Arc<GramSetting>) -> Result<GoldenSearchReport> {
    detect_with(setting, &DetectOptions::default())
}

pub fn detect_with(setting: &Arc<GramSetting>, opts: &DetectOptions) -> Result<GoldenSearchReport> {
    // rejects dependent bases
    setting.embedding()?;
    let es = gram::eigensystem(setting, opts.degeneracy_rel_tol)?;
    let multiplicity = es.min_multiplicity();
    let (vector, starts) = if multiplicity == 1 {
        (es.vector(0), 0)
    } else {
        let search = SearchOptions {
            accept_tol: opts.accept_tol,
            ..opts.search
        };
        let res = search_eigenspace(&es.min_eigenspace(), &search);
        (res.best.vector, res.starts_run)
    };
    let state = states::normalize(vector, setting)?;
    let lambda = gram::rayleigh(setting, state.coeffs())?;
    let candidate = GoldenCandidate::evaluate(state, lambda);
    let best_deviation = candidate.tilde_deviation;
    let outcome = if candidate.is_accepted(opts.accept_tol) {
        Outcome::Found
    } else if best_deviation > opts.reject_tol {
        Outcome::None
    } else {
        Outcome::Inconclusive
    };
    Ok(GoldenSearchReport {
        outcome,
        candidate: (outcome == Outcome::Found).then_some(candidate),
        best_deviation,
        multiplicity,
        starts,
        lambda_min: if outcome == Outcome::Found { lambda } else { es.lambda_min() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `lambda = 1 - s`, minimal for `s >= 0`.
    Minus,
    /// `lambda = 1 + s`, minimal for `s <= 0`.
    Plus,
}

/// Qubit golden state for `<c_1|c_2> = s e^{i theta}`:
/// `(1, ∓ e^{-i theta}) / sqrt(2(1 ∓ s))`.
pub fn closed_form_d2(s: f64, theta: f64, branch: Branch) -> Result<SuperpositionState> {
    if !(s.abs() < 1.0) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "(-1, 1)",
        });
    }
    let sign = match branch {
        Branch::Minus if s >= 0.0 => -1.0,
        Branch::Plus if s <= 0.0 => 1.0,
        _ => return Err(Error::WrongBranch(s)),
    };
    let setting = Arc::new(GramSetting::qubit(num_complex::Complex64::from_polar(s, theta))?);
    let norm = (2.0 * (1.0 + sign * s)).sqrt();
    let coeffs = linalg::cvec(&[c(1.0 / norm, 0.0), num_complex::Complex64::from_polar(sign / norm, -theta)]);
    Ok(SuperpositionState::from_raw(coeffs, setting))
}

/// `(1, …, 1) / sqrt(d (1 + (d-1) s))` for the equal real setting,
/// valid for `s in (1/(1-d), 0]`.
pub fn closed_form_equal_real(d: usize, s: f64) -> Result<SuperpositionState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let lower = 1.0 / (1.0 - d as f64);
    if !(s > lower && s <= 0.0) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "(1/(1-d), 0]",
        });
    }
    let setting = Arc::new(GramSetting::equal_real(d, s)?);
    let a = 1.0 / (d as f64 * (1.0 + (d as f64 - 1.0) * s)).sqrt();
    Ok(SuperpositionState::from_raw(CVector::from_element(d, c(a, 0.0)), setting))
}

/// Builds `G = lambda_1 x_1 x_1^dag + lambda_2 (x_2 x_2^dag + x_3 x_3^dag)` with
/// `lambda_2 = lambda_3 = (3 - lambda_1)/2`, where `x_k` are the columns of
/// `frame`. The first column must have entries of equal modulus `1/sqrt(3)`.
pub fn degenerate_family_d3(lambda1: f64, frame: &CMatrix) -> Result<GramSetting> {
    // lambda1 = 1 is the orthonormal endpoint (G = identity)
    if !(lambda1 > 0.0 && lambda1 <= 1.0) {
        return Err(Error::OutOfRange {
            name: "lambda1",
            value: lambda1,
            range: "(0, 1]",
        });
    }
    if frame.nrows() != 3 || frame.ncols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: frame.nrows(),
        });
    }
    let defect = linalg::unitarity_defect(frame);
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    let r = 1.0 / 3f64.sqrt();
    if let Some(z) = frame.column(0).iter().find(|z| (z.norm() - r).abs() > 1e-9) {
        return Err(Error::InvalidFrame(format!(
            "first column entry modulus {} differs from 1/sqrt(3)",
            z.norm()
        )));
    }
    let lambda2 = (3.0 - lambda1) / 2.0;
    let weights = linalg::real_cvec(&[lambda1, lambda2, lambda2]);
    let g = frame * CMatrix::from_diagonal(&weights) * frame.adjoint();
    GramSetting::from_matrix(&g).map_err(|e| Error::InvalidFrame(e.to_string()))
}

/// Result of checking the d = 3 degeneracy requirement on one setting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegeneracyCheck {
    pub admits_golden: bool,
    /// Whether the two eigenvalues above `lambda_min` coincide.
    pub upper_pair_degenerate: bool,
    /// A golden state was found although the upper pair is split.
    pub violation: bool,
}

pub fn degeneracy_required_d3(setting: &Arc<GramSetting>) -> Result<DegeneracyCheck> {
    if setting.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: setting.dim(),
        });
    }
    let report = detect(setting)?;
    let es = gram::eigensystem(setting, DEGENERACY_REL_TOL)?;
    let upper_pair_degenerate = (es.values[2] - es.values[1]).abs() <= DEGENERACY_REL_TOL * es.lambda_max();
    let admits_golden = report.outcome == Outcome::Found;
    Ok(DegeneracyCheck {
        admits_golden,
        upper_pair_degenerate,
        violation: admits_golden && !upper_pair_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::linalg::{phase_aligned_distance, real_cvec};

    fn shared(g: GramSetting) -> Arc<GramSetting> {
        Arc::new(g)
    }

    #[test]
    fn candidate_form_examples() {
        let id = shared(GramSetting::identity(4).unwrap());
        let psi = candidate_form(&id, 1.0, &[0.0; 4]).unwrap();
        assert!(psi.coeffs().iter().all(|z| (z - c(0.5, 0.0)).norm() < 1e-15));

        let s = 0.6;
        let g = shared(GramSetting::qubit(c(s, 0.0)).unwrap());
        let psi = candidate_form(&g, 1.0 - s, &[0.0, PI]).unwrap();
        let a = 1.0 / (2.0 * (1.0 - s)).sqrt();
        assert!(linalg::frobenius(&(psi.coeffs() - real_cvec(&[a, -a]))) < 1e-15);
        assert!((psi.norm_sq() - 1.0).abs() < 1e-14);

        let s = -0.2;
        let g = shared(GramSetting::equal_real(3, s).unwrap());
        let psi = candidate_form(&g, 1.0 + 2.0 * s, &[0.0; 3]).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn detect_qubit_real() {
        let g = shared(GramSetting::qubit(c(0.6, 0.0)).unwrap());
        let r = detect(&g).unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        let cand = r.candidate.unwrap();
        assert!((cand.lambda_min - 0.4).abs() < 1e-14);
        let a = 1.0 / 0.8f64.sqrt();
        assert!(phase_aligned_distance(cand.state.coeffs(), &real_cvec(&[a, -a])) < 1e-12);
        assert!(cand.modulus_spread() < 1e-12);
    }

    #[test]
    fn detect_mixed_sign_row() {
        let s = 0.3;
        let g = shared(GramSetting::qutrit([c(-s, 0.0), c(s, 0.0), c(s, 0.0)]).unwrap());
        let r = detect(&g).unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        let cand = r.candidate.unwrap();
        assert!((cand.lambda_min - 0.4).abs() < 1e-14);
        let a = 1.0 / (3.0 * 0.4f64).sqrt();
        assert!(phase_aligned_distance(cand.state.coeffs(), &real_cvec(&[a, a, -a])) < 1e-12);
    }

    #[test]
    fn detect_orthonormal_returns_uniform() {
        for d in 2..=5 {
            let g = shared(GramSetting::identity(d).unwrap());
            let r = detect(&g).unwrap();
            assert_eq!(r.outcome, Outcome::Found);
            let a = 1.0 / (d as f64).sqrt();
            let c0 = r.candidate.unwrap();
            assert!(c0.state.coeffs().iter().all(|z| (z - c(a, 0.0)).norm() < 1e-14));
        }
    }

    #[test]
    fn detect_rejects_random_nondegenerate_setting() {
        let g = shared(GramSetting::qutrit([c(0.1, 0.2), c(-0.3, 0.05), c(0.2, -0.1)]).unwrap());
        let r = detect(&g).unwrap();
        assert_eq!(r.outcome, Outcome::None);
        assert!(r.best_deviation > 1e-6);
        assert!(r.candidate.is_none());
    }

    #[test]
    fn detect_rejects_dependent_setting() {
        let g = shared(GramSetting::equal_real(3, -0.5).unwrap());
        assert!(detect(&g).is_err());
    }

    #[test]
    fn closed_form_d2_examples() {
        let psi = closed_form_d2(0.6, 0.0, Branch::Minus).unwrap();
        let a = 1.0 / 0.8f64.sqrt();
        assert!(linalg::frobenius(&(psi.coeffs() - real_cvec(&[a, -a]))) < 1e-15);

        let psi = closed_form_d2(0.5, FRAC_PI_2, Branch::Minus).unwrap();
        assert!(linalg::frobenius(&(psi.coeffs() - linalg::cvec(&[c(1.0, 0.0), c(0.0, 1.0)]))) < 1e-15);
        let t = states::tilde(&psi);
        assert!(t.iter().all(|z| (z - c(0.5, 0.0)).norm() < 1e-15));
        let det = detect(psi.setting()).unwrap();
        assert_eq!(det.outcome, Outcome::Found);
        assert!(phase_aligned_distance(det.candidate.unwrap().state.coeffs(), psi.coeffs()) < 1e-12);

        for branch in [Branch::Minus, Branch::Plus] {
            let psi = closed_form_d2(0.0, 0.3, branch).unwrap();
            assert!(psi.moduli().iter().all(|m| (m - 0.5f64.sqrt()).abs() < 1e-15));
        }
        assert!(matches!(closed_form_d2(0.3, 0.0, Branch::Plus), Err(Error::WrongBranch(_))));
        assert!(matches!(closed_form_d2(-0.3, 0.0, Branch::Minus), Err(Error::WrongBranch(_))));
        assert!(closed_form_d2(1.0, 0.0, Branch::Minus).is_err());
    }

    #[test]
    fn closed_form_equal_real_examples() {
        let psi = closed_form_equal_real(4, -0.2).unwrap();
        assert!(psi.coeffs().iter().all(|z| (z.re - 0.790_569_415_042_094_8).abs() < 1e-15));
        let psi = closed_form_equal_real(2, 0.0).unwrap();
        assert!(psi.coeffs().iter().all(|z| (z.re - 0.5f64.sqrt()).abs() < 1e-15));
        let s = -0.3;
        let psi = closed_form_equal_real(3, s).unwrap();
        let cand = GoldenCandidate::evaluate(psi, 1.0 + 2.0 * s);
        assert!(cand.is_accepted(ACCEPT_TOL));
        assert!(closed_form_equal_real(3, 0.1).is_err());
        assert!(closed_form_equal_real(3, -0.5).is_err());
    }

    #[test]
    fn degenerate_family_examples() {
        let r = 1.0 / 3f64.sqrt();
        // real orthonormal frame with (1,1,1)/sqrt 3 first
        let a = 1.0 / 2f64.sqrt();
        let b = 1.0 / 6f64.sqrt();
        let frame = CMatrix::from_row_slice(
            3,
            3,
            &[c(r, 0.0), c(a, 0.0), c(b, 0.0), c(r, 0.0), c(-a, 0.0), c(b, 0.0), c(r, 0.0), c(0.0, 0.0), c(-2.0 * b, 0.0)],
        );
        let g = degenerate_family_d3(0.5, &frame).unwrap();
        let es = gram::eigensystem(&g, DEGENERACY_REL_TOL).unwrap();
        assert!((es.values[1] - 1.25).abs() < 1e-14 && (es.values[2] - 1.25).abs() < 1e-14);

        let g = degenerate_family_d3(1.0, &frame).unwrap();
        assert!(linalg::frobenius(&(g.gram() - CMatrix::identity(3, 3))) < 1e-14);

        assert!(matches!(degenerate_family_d3(0.0, &frame), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            degenerate_family_d3(0.5, &CMatrix::identity(3, 3)),
            Err(Error::InvalidFrame(_))
        ));
    }

    #[test]
    fn degeneracy_check_equal_real() {
        let g = shared(GramSetting::equal_real(3, -0.3).unwrap());
        let chk = degeneracy_required_d3(&g).unwrap();
        assert!(chk.admits_golden && chk.upper_pair_degenerate && !chk.violation);
        let g2 = shared(GramSetting::qubit(c(0.1, 0.0)).unwrap());
        assert!(degeneracy_required_d3(&g2).is_err());
    }

    #[test]
    fn complex_circulant_admits_golden_without_degeneracy() {
        // circulant G with first row (1, a, conj a): Fourier eigenvectors, split spectrum
        let a = c(0.1, 0.2);
        let g = shared(GramSetting::qutrit([a, a.conj(), a]).unwrap());
        let es = gram::eigensystem(&g, DEGENERACY_REL_TOL).unwrap();
        assert_eq!(es.groups.len(), 3);
        let chk = degeneracy_required_d3(&g).unwrap();
        assert!(chk.admits_golden);
        assert!(chk.violation);
    }
}
