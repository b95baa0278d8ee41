//! The nine sign-pattern qutrit settings with closed-form golden states.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::{detect, GoldenCandidate, Outcome};
use crate::error::{Error, Result};
use crate::gram::GramSetting;
use crate::linalg::{self, c, CVector};
use crate::states;

/// Side of zero on which a row's parameter range lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Table1Sign {
    /// `s in (-1/2, 0]`, `lambda_min = 1 + 2s`.
    NonPositive,
    /// `s in [0, 1/2)`, `lambda_min = 1 - 2s`.
    NonNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Table1Row {
    /// `{s, s, s}`
    AllPlus,
    /// `{-s, s, s}`
    MinusPlusPlus,
    /// `{s, -s, s}`
    PlusMinusPlus,
    /// `{s, s, -s}`
    PlusPlusMinus,
    /// `{s, -s, -s}`
    PlusMinusMinus,
    /// `{-s, s, -s}`
    MinusPlusMinus,
    /// `{-s, -s, s}`
    MinusMinusPlus,
    /// `{-s, -s, -s}`
    AllMinus,
    /// `{s, is, -is}`
    Imaginary,
}

impl Table1Row {
    pub const ALL: [Table1Row; 9] = [
        Table1Row::AllPlus,
        Table1Row::MinusPlusPlus,
        Table1Row::PlusMinusPlus,
        Table1Row::PlusPlusMinus,
        Table1Row::PlusMinusMinus,
        Table1Row::MinusPlusMinus,
        Table1Row::MinusMinusPlus,
        Table1Row::AllMinus,
        Table1Row::Imaginary,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Table1Row::AllPlus => "{s, s, s}",
            Table1Row::MinusPlusPlus => "{-s, s, s}",
            Table1Row::PlusMinusPlus => "{s, -s, s}",
            Table1Row::PlusPlusMinus => "{s, s, -s}",
            Table1Row::PlusMinusMinus => "{s, -s, -s}",
            Table1Row::MinusPlusMinus => "{-s, s, -s}",
            Table1Row::MinusMinusPlus => "{-s, -s, s}",
            Table1Row::AllMinus => "{-s, -s, -s}",
            Table1Row::Imaginary => "{s, is, -is}",
        }
    }

    pub fn sign(self) -> Table1Sign {
        match self {
            Table1Row::AllPlus | Table1Row::PlusMinusMinus | Table1Row::MinusPlusMinus | Table1Row::MinusMinusPlus => {
                Table1Sign::NonPositive
            }
            _ => Table1Sign::NonNegative,
        }
    }

    /// `(s12, s13, s23)` for parameter `s`.
    pub fn overlaps(self, s: f64) -> [Complex64; 3] {
        let (p, m) = (c(s, 0.0), c(-s, 0.0));
        match self {
            Table1Row::AllPlus => [p, p, p],
            Table1Row::MinusPlusPlus => [m, p, p],
            Table1Row::PlusMinusPlus => [p, m, p],
            Table1Row::PlusPlusMinus => [p, p, m],
            Table1Row::PlusMinusMinus => [p, m, m],
            Table1Row::MinusPlusMinus => [m, p, m],
            Table1Row::MinusMinusPlus => [m, m, p],
            Table1Row::AllMinus => [m, m, m],
            Table1Row::Imaginary => [p, c(0.0, s), c(0.0, -s)],
        }
    }

    pub fn lambda_min(self, s: f64) -> f64 {
        match self.sign() {
            Table1Sign::NonPositive => 1.0 + 2.0 * s,
            Table1Sign::NonNegative => 1.0 - 2.0 * s,
        }
    }

    /// Unnormalized eigenvector pattern.
    pub fn pattern(self) -> [Complex64; 3] {
        let (p, m) = (c(1.0, 0.0), c(-1.0, 0.0));
        match self {
            Table1Row::AllPlus | Table1Row::AllMinus => [p, p, p],
            Table1Row::MinusPlusPlus | Table1Row::PlusMinusMinus => [p, p, m],
            Table1Row::PlusMinusPlus | Table1Row::MinusPlusMinus => [p, m, p],
            Table1Row::PlusPlusMinus | Table1Row::MinusMinusPlus => [m, p, p],
            Table1Row::Imaginary => [c(0.0, -1.0), c(0.0, 1.0), p],
        }
    }

    pub fn range(self) -> &'static str {
        match self.sign() {
            Table1Sign::NonPositive => "(-1/2, 0]",
            Table1Sign::NonNegative => "[0, 1/2)",
        }
    }

    pub fn contains(self, s: f64) -> bool {
        match self.sign() {
            Table1Sign::NonPositive => s > -0.5 && s <= 0.0,
            Table1Sign::NonNegative => (0.0..0.5).contains(&s),
        }
    }

    pub fn setting(self, s: f64) -> Result<GramSetting> {
        GramSetting::qutrit(self.overlaps(s))
    }

    /// Pattern normalized with respect to the row's setting, phase fixed.
    pub fn state(self, s: f64) -> Result<states::SuperpositionState> {
        let setting = Arc::new(self.setting(s)?);
        states::normalize(CVector::from_row_slice(&self.pattern()), &setting)
    }
}

/// The row's closed-form golden candidate at `s`, confirmed against [`detect`].
pub fn table1_row(row: Table1Row, s: f64) -> Result<GoldenCandidate> {
    if !row.contains(s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: row.range(),
        });
    }
    let state = row.state(s)?;
    let report = detect(state.setting())?;
    match (&report.outcome, &report.candidate) {
        (Outcome::Found, Some(found)) => {
            let dist = linalg::phase_aligned_distance(found.state.coeffs(), state.coeffs());
            // in degenerate eigenspaces the search may land on another golden vector
            if report.multiplicity == 1 && dist > 1e-9 {
                return Err(Error::Mismatch(format!(
                    "{}: detected state differs from pattern by {dist:e}",
                    row.label()
                )));
            }
        }
        _ => return Err(Error::NoGoldenState(report.best_deviation)),
    }
    Ok(GoldenCandidate::evaluate(state, row.lambda_min(s)))
}
