//! Parameter scans of golden-state `l1` over one-parameter setting families.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::golden::{self, Outcome};
use crate::gram::{self, GramSetting, DEGENERACY_REL_TOL};
use crate::linalg::c;
use crate::monotones;
use crate::parallel::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `<c_1|c_2> = s`.
    D2Real,
    /// `<c_1|c_2> = s e^{i theta}`.
    D2Complex { theta: f64 },
    /// `{s, s, s}`.
    D3Equal,
    /// `{-s, s, s}`.
    D3MixedSign,
    /// All overlaps equal to `s` in dimension `d`.
    DEqualReal { d: usize },
}

impl Family {
    /// Open interval of `s` on which the setting is positive definite.
    pub fn admissible(self) -> (f64, f64) {
        match self {
            Family::D2Real | Family::D2Complex { .. } => (-1.0, 1.0),
            Family::D3Equal => (-0.5, 1.0),
            Family::D3MixedSign => (-1.0, 0.5),
            Family::DEqualReal { d } => (1.0 / (1.0 - d as f64), 1.0),
        }
    }

    pub fn setting(self, s: f64) -> Result<GramSetting> {
        match self {
            Family::D2Real => GramSetting::qubit(c(s, 0.0)),
            Family::D2Complex { theta } => GramSetting::qubit(num_complex::Complex64::from_polar(s, theta)),
            Family::D3Equal => GramSetting::equal_real(3, s),
            Family::D3MixedSign => GramSetting::qutrit([c(-s, 0.0), c(s, 0.0), c(s, 0.0)]),
            Family::DEqualReal { d } => GramSetting::equal_real(d, s),
        }
    }

    /// Closed-form golden `l1` where the family has one.
    pub fn closed_form_l1(self, s: f64) -> Option<f64> {
        match self {
            Family::D2Real | Family::D2Complex { .. } => Some(1.0 / (1.0 - s.abs())),
            Family::D3Equal => (s <= 0.0).then(|| 2.0 / (1.0 + 2.0 * s)),
            Family::D3MixedSign => (s >= 0.0).then(|| 2.0 / (1.0 - 2.0 * s)),
            Family::DEqualReal { d } => {
                let m = d as f64 - 1.0;
                (s <= 0.0).then(|| m / (1.0 + m * s))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub family: Family,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub s: f64,
    pub lambda_min: f64,
    pub l1_golden: Option<f64>,
    pub l1_closed_form: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScanOutput {
    pub rows: Vec<ScanRow>,
    /// One message per grid point dropped for lying outside the admissible interval.
    pub warnings: Vec<String>,
}

/// Grid `from, from + step, …` up to `to`, snapped to multiples of `1e-12`,
/// with points outside the open admissible interval removed.
pub fn grid(spec: &ScanSpec) -> Result<(Vec<f64>, Vec<String>)> {
    if !(spec.step > 0.0) || !spec.from.is_finite() || !spec.to.is_finite() {
        return Err(Error::OutOfRange {
            name: "step",
            value: spec.step,
            range: "(0, inf)",
        });
    }
    if spec.to < spec.from {
        return Err(Error::OutOfRange {
            name: "to",
            value: spec.to,
            range: "[from, inf)",
        });
    }
    let n = ((spec.to - spec.from) / spec.step + 1e-9).floor() as usize + 1;
    let (lo, hi) = spec.family.admissible();
    let mut points = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for k in 0..n {
        let s = ((spec.from + k as f64 * spec.step) * 1e12).round() / 1e12;
        if s > lo && s < hi {
            points.push(s);
        } else {
            warnings.push(format!("warning: s = {s} outside admissible interval ({lo}, {hi}); skipped"));
        }
    }
    Ok((points, warnings))
}

pub fn scan_point(family: Family, s: f64) -> Result<ScanRow> {
    let setting = Arc::new(family.setting(s)?);
    let lambda_min = gram::eigensystem(&setting, DEGENERACY_REL_TOL)?.lambda_min();
    let report = golden::detect(&setting)?;
    let l1_golden = match (report.outcome, &report.candidate) {
        (Outcome::Found, Some(cand)) => Some(monotones::l1_state(&cand.state)),
        _ => None,
    };
    Ok(ScanRow {
        s,
        lambda_min,
        l1_golden,
        l1_closed_form: family.closed_form_l1(s),
    })
}

pub fn run_scan(spec: &ScanSpec, exec: Exec) -> Result<ScanOutput> {
    let (points, warnings) = grid(spec)?;
    let rows = exec
        .map_slice(&points, |&s| scan_point(spec.family, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanOutput { rows, warnings })
}

fn field(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

/// Writes `s,lambda_min,l1_golden,l1_closed_form` rows with 17 significant digits.
pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["s", "lambda_min", "l1_golden", "l1_closed_form"])?;
    for r in rows {
        w.write_record([
            field(Some(r.s)),
            field(Some(r.lambda_min)),
            field(r.l1_golden),
            field(r.l1_closed_form),
        ])?;
    }
    w.flush()?;
    Ok(())
}
