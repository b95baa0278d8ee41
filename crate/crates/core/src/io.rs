//! JSON wire formats for settings, states and reports.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freeops::Certificate;
use crate::golden::{GoldenSearchReport, Outcome};
use crate::gram::{build_setting, GramSetting, Overlap};
use crate::linalg::{c, CVector};
use crate::states::{self, SuperpositionState};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid input in {path}: {source}")]
    Invalid {
        path: String,
        source: crate::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for Complex64 {
    fn from(e: ComplexEntry) -> Self {
        c(e.re, e.im)
    }
}

pub fn complex_entries(v: &CVector) -> Vec<ComplexEntry> {
    v.iter().map(|&z| z.into()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapEntry {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingFile {
    pub d: usize,
    #[serde(default)]
    pub overlaps: Vec<OverlapEntry>,
}

impl SettingFile {
    pub fn to_setting(&self) -> crate::Result<GramSetting> {
        let overlaps: Vec<Overlap> = self
            .overlaps
            .iter()
            .map(|o| Overlap::new(o.i, o.j, c(o.re, o.im)))
            .collect();
        build_setting(self.d, &overlaps)
    }

    pub fn from_setting(setting: &GramSetting) -> Self {
        Self {
            d: setting.dim(),
            overlaps: setting
                .overlaps()
                .iter()
                .map(|o| OverlapEntry {
                    i: o.i,
                    j: o.j,
                    re: o.value.re,
                    im: o.value.im,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub coeffs: Vec<ComplexEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
}

impl StateFile {
    /// Normalizes the coefficients, or verifies them when `"normalized": true`.
    pub fn to_state(&self, setting: &Arc<GramSetting>) -> crate::Result<SuperpositionState> {
        let v = CVector::from_iterator(self.coeffs.len(), self.coeffs.iter().map(|&e| e.into()));
        if self.normalized == Some(true) {
            SuperpositionState::from_normalized(v, Arc::clone(setting))
        } else {
            states::normalize(v, setting)
        }
    }

    pub fn from_state(psi: &SuperpositionState) -> Self {
        Self {
            coeffs: complex_entries(psi.coeffs()),
            normalized: Some(true),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| InputError::Io {
        path: name.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Parse { path: name, source })
}

pub fn load_setting(path: &Path) -> Result<GramSetting, InputError> {
    let file: SettingFile = read_json(path)?;
    file.to_setting().map_err(|source| InputError::Invalid {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_state(path: &Path, setting: &Arc<GramSetting>) -> Result<SuperpositionState, InputError> {
    let file: StateFile = read_json(path)?;
    file.to_state(setting).map_err(|source| InputError::Invalid {
        path: path.display().to_string(),
        source,
    })
}

/// Serialized form of a golden search.
#[derive(Debug, Clone, Serialize)]
pub struct GoldenCertificate {
    pub outcome: Outcome,
    pub lambda_min: f64,
    pub coefficients: Option<Vec<ComplexEntry>>,
    pub tilde_deviation: Option<f64>,
    pub eigen_residual: Option<f64>,
    pub best_deviation: f64,
    pub multiplicity: usize,
    pub starts: usize,
}

impl From<&GoldenSearchReport> for GoldenCertificate {
    fn from(r: &GoldenSearchReport) -> Self {
        Self {
            outcome: r.outcome,
            lambda_min: r.lambda_min,
            coefficients: r.candidate.as_ref().map(|cand| complex_entries(cand.state.coeffs())),
            tilde_deviation: r.candidate.as_ref().map(|cand| cand.tilde_deviation),
            eigen_residual: r.candidate.as_ref().map(|cand| cand.eigen_residual),
            best_deviation: r.best_deviation,
            multiplicity: r.multiplicity,
            starts: r.starts,
        }
    }
}

/// Worst-case summary of certificates over many targets.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerificationSummary {
    pub targets: usize,
    pub seed: u64,
    pub worst_frobenius_residual: f64,
    pub worst_psd_margin: f64,
    pub worst_annihilation: f64,
    /// Largest `|Phi(|psi><psi|) - |phi><phi||_F`; NaN when some set failed to certify.
    pub worst_output_error: f64,
    pub all_pass: bool,
}

impl VerificationSummary {
    pub fn from_certificates(seed: u64, certs: &[(Certificate, Option<f64>)]) -> Self {
        let mut s = Self {
            targets: certs.len(),
            seed,
            worst_frobenius_residual: 0.0,
            worst_psd_margin: f64::INFINITY,
            worst_annihilation: 0.0,
            worst_output_error: 0.0,
            all_pass: true,
        };
        for (cert, err) in certs {
            s.worst_frobenius_residual = s.worst_frobenius_residual.max(cert.frobenius_residual);
            if let Some(m) = cert.psd_margin {
                s.worst_psd_margin = s.worst_psd_margin.min(m);
            }
            if let Some(a) = cert.annihilation {
                s.worst_annihilation = s.worst_annihilation.max(a);
            }
            match err {
                Some(e) => s.worst_output_error = s.worst_output_error.max(*e),
                None => s.worst_output_error = f64::NAN,
            }
            s.all_pass &= cert.pass;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setting_round_trip_and_defaults() {
        let text = r#"{"d": 3, "overlaps": [{"i": 1, "j": 2, "re": 0.3}, {"i": 2, "j": 3, "re": 0.1, "im": -0.2}]}"#;
        let file: SettingFile = serde_json::from_str(text).unwrap();
        let g = file.to_setting().unwrap();
        assert_eq!(g.gram()[(0, 2)], c(0.0, 0.0));
        assert_eq!(g.gram()[(2, 1)], c(0.1, 0.2));
        let again = SettingFile::from_setting(&g);
        assert_eq!(again.to_setting().unwrap(), g);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"d": 2, "overlaps": [], "extra": 1}"#;
        assert!(serde_json::from_str::<SettingFile>(text).is_err());
        let text = r#"{"d": 2, "overlaps": [{"i": 1, "j": 2, "re": 0.1, "phase": 0}]}"#;
        assert!(serde_json::from_str::<SettingFile>(text).is_err());
    }

    #[test]
    fn state_normalization_on_load() {
        let g = Arc::new(GramSetting::qubit(c(0.6, 0.0)).unwrap());
        let file: StateFile = serde_json::from_str(r#"{"coeffs": [{"re": 2.0}, {"re": -2.0}]}"#).unwrap();
        let psi = file.to_state(&g).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-14);
        let file: StateFile =
            serde_json::from_str(r#"{"coeffs": [{"re": 2.0}, {"re": -2.0}], "normalized": true}"#).unwrap();
        assert!(file.to_state(&g).is_err());
    }
}
