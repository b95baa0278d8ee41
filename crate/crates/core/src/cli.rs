//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain-negative result, 2 input error,
//! 3 inconclusive.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::freeops::{self, KrausSet};
use crate::golden::{self, DetectOptions, Outcome, Table1Row, Table1Sign};
use crate::gram::{self, GramSetting};
use crate::io::{self, ComplexEntry, GoldenCertificate, InputError, VerificationSummary};
use crate::linalg::{self, CVector};
use crate::monotones;
use crate::parallel::Exec;
use crate::sampling;
use crate::scan::{self, Family, ScanSpec};
use crate::states;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "goldstates", version, about = "Golden superposition states over nonorthogonal bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a setting file describes linearly independent basis states.
    Validate {
        setting: PathBuf,
        /// Smallest eigenvalue still counted as independent.
        #[arg(long, default_value_t = gram::INDEPENDENCE_TOL)]
        tol: f64,
    },
    /// Detect a golden state and optionally certify transformations from it.
    Golden {
        setting: PathBuf,
        /// Number of random targets to build and certify Kraus sets for.
        #[arg(long)]
        verify: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Acceptance tolerance on the tilde deviation and eigen-residual.
        #[arg(long, default_value_t = golden::ACCEPT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate golden l1 over a one-parameter family as CSV.
    Scan {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = -0.99, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 0.99, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Dimension for `d-equal-real`.
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Overlap phase for `d2-complex`.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the nine qutrit sign-pattern settings against detection.
    Table1 {
        /// Write the JSON rows here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report l1, relative entropy and basis overlaps of a state.
    Monotones {
        setting: PathBuf,
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    D2Real,
    D2Complex,
    D3Equal,
    D3MixedSign,
    DEqualReal,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Validate { setting, tol } => cmd_validate(&setting, tol, stdout),
        Command::Golden {
            setting,
            verify,
            seed,
            tol,
            out,
        } => cmd_golden(&setting, verify, seed, tol, out.as_deref(), stdout),
        Command::Scan {
            family,
            from,
            to,
            step,
            dim,
            theta,
            out,
        } => {
            let family = match family {
                FamilyArg::D2Real => Family::D2Real,
                FamilyArg::D2Complex => Family::D2Complex { theta },
                FamilyArg::D3Equal => Family::D3Equal,
                FamilyArg::D3MixedSign => Family::D3MixedSign,
                FamilyArg::DEqualReal => Family::DEqualReal { d: dim },
            };
            cmd_scan(
                &ScanSpec {
                    family,
                    from,
                    to,
                    step,
                },
                out.as_deref(),
                stdout,
                stderr,
            )
        }
        Command::Table1 { out } => cmd_table1(out.as_deref(), stdout),
        Command::Monotones { setting, state, out } => cmd_monotones(&setting, &state, out.as_deref(), stdout),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

/// Command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn negative(message: impl ToString) -> Self {
        Self {
            code: EXIT_NEGATIVE,
            message: message.to_string(),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::input(e)
    }
}

type CmdResult = Result<i32, Failure>;

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Failure::input)?;
    match out {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            writeln!(f, "{text}").map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
        }
        None => writeln!(stdout, "{text}").map_err(Failure::input),
    }
}

fn load_checked_setting(path: &Path) -> Result<Arc<GramSetting>, Failure> {
    let setting = Arc::new(io::load_setting(path)?);
    if let Err(e) = setting.embedding() {
        return Err(Failure::negative(format!("dependent basis: {e}")));
    }
    Ok(setting)
}

pub fn cmd_validate(path: &Path, tol: f64, stdout: &mut dyn Write) -> CmdResult {
    let setting = io::load_setting(path)?;
    let report = gram::validate_with(&setting, tol);
    emit_json(&report, None, stdout)?;
    if report.linearly_independent {
        Ok(EXIT_OK)
    } else {
        Err(Failure::negative(format!(
            "dependent basis (min eigenvalue {:e})",
            report.min_eigenvalue
        )))
    }
}

#[derive(Serialize)]
struct GoldenOutput {
    #[serde(flatten)]
    certificate: GoldenCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<VerificationSummary>,
}

pub fn cmd_golden(
    path: &Path,
    verify: Option<usize>,
    seed: u64,
    tol: f64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let setting = load_checked_setting(path)?;
    let opts = DetectOptions {
        accept_tol: tol,
        ..DetectOptions::default()
    };
    let report = golden::detect_with(&setting, &opts).map_err(Failure::negative)?;
    let verification = match (&report.candidate, verify) {
        (Some(cand), Some(n)) => {
            if setting.dim() > freeops::MAX_S1_DIM {
                return Err(Failure::input(crate::Error::TooLarge(setting.dim())));
            }
            let psi = &cand.state;
            let rho = states::density_pure(psi).map_err(Failure::negative)?;
            let certs = Exec::default().map(n, |k| {
                let mut rng = sampling::stream_rng(seed, k as u64);
                let phi = sampling::random_state(&setting, &mut rng)?;
                let set = KrausSet::synthesize(psi, &phi)?;
                let cert = freeops::verify_trace_preserving(&setting, &set);
                let err = freeops::apply_map(&set, &rho).ok().and_then(|out| {
                    let want = states::density_pure(&phi).ok()?;
                    Some(linalg::frobenius(&(out.matrix() - want.matrix())))
                });
                Ok::<_, crate::Error>((cert, err))
            });
            let certs: Vec<_> = certs.into_iter().collect::<Result<_, _>>().map_err(Failure::negative)?;
            Some(VerificationSummary::from_certificates(seed, &certs))
        }
        _ => None,
    };
    let output = GoldenOutput {
        certificate: GoldenCertificate::from(&report),
        verification,
    };
    emit_json(&output, out, stdout)?;
    match report.outcome {
        Outcome::Found if verification.is_none_or(|v| v.all_pass) => Ok(EXIT_OK),
        Outcome::Found => Err(Failure::negative("some transformation sets failed certification")),
        Outcome::None => Err(Failure::negative(format!(
            "no golden state (best tilde deviation {:e})",
            report.best_deviation
        ))),
        Outcome::Inconclusive => Err(Failure {
            code: EXIT_INCONCLUSIVE,
            message: format!(
                "inconclusive: best tilde deviation {:e} lies between acceptance and rejection thresholds",
                report.best_deviation
            ),
        }),
    }
}

pub fn cmd_scan(spec: &ScanSpec, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let result = scan::run_scan(spec, Exec::default()).map_err(Failure::input)?;
    for w in &result.warnings {
        let _ = writeln!(stderr, "{w}");
    }
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            scan::write_csv(&result.rows, BufWriter::new(f)).map_err(Failure::input)?;
        }
        None => scan::write_csv(&result.rows, stdout).map_err(Failure::input)?,
    }
    Ok(EXIT_OK)
}

/// One checked row of the sign-pattern table.
#[derive(Debug, Clone, Serialize)]
pub struct Table1Check {
    pub row: &'static str,
    pub s: f64,
    pub lambda_min: f64,
    pub detected_lambda_min: Option<f64>,
    pub pattern: Vec<ComplexEntry>,
    pub detected: Option<Vec<ComplexEntry>>,
    pub distance: Option<f64>,
    pub pass: bool,
}

pub const TABLE1_S: [f64; 3] = [0.1, 0.25, 0.4];

pub fn table1_checks() -> crate::Result<Vec<Table1Check>> {
    let mut checks = Vec::new();
    for row in Table1Row::ALL {
        for mag in TABLE1_S {
            let s = match row.sign() {
                Table1Sign::NonPositive => -mag,
                Table1Sign::NonNegative => mag,
            };
            let expected = row.state(s)?;
            let report = golden::detect(expected.setting())?;
            let lambda_min = row.lambda_min(s);
            let (detected_lambda_min, detected, distance) = match &report.candidate {
                Some(cand) => (
                    Some(cand.lambda_min),
                    Some(io::complex_entries(cand.state.coeffs())),
                    Some(linalg::phase_aligned_distance(cand.state.coeffs(), expected.coeffs())),
                ),
                None => (None, None, None),
            };
            let pass = report.outcome == Outcome::Found
                && detected_lambda_min.is_some_and(|l| (l - lambda_min).abs() <= 1e-12)
                && distance.is_some_and(|d| d <= 1e-9);
            checks.push(Table1Check {
                row: row.label(),
                s,
                lambda_min,
                detected_lambda_min,
                pattern: io::complex_entries(&CVector::from_row_slice(&row.pattern())),
                detected,
                distance,
                pass,
            });
        }
    }
    Ok(checks)
}

fn pattern_text(p: &[ComplexEntry]) -> String {
    let parts: Vec<String> = p
        .iter()
        .map(|e| match (e.re, e.im) {
            (re, 0.0) => format!("{re}"),
            (0.0, im) => format!("{im}i"),
            (re, im) => format!("{re}{im:+}i"),
        })
        .collect();
    format!("({})", parts.join(", "))
}

pub fn cmd_table1(out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    let checks = table1_checks().map_err(Failure::negative)?;
    let w = |e: std::io::Error| Failure::input(e);
    writeln!(stdout, "{:<14} {:>6} {:>14} {:<20} {:>10}  result", "setting", "s", "lambda_min", "vector", "distance").map_err(w)?;
    for ch in &checks {
        writeln!(
            stdout,
            "{:<14} {:>6} {:>14.10} {:<20} {:>10.2e}  {}",
            ch.row,
            ch.s,
            ch.lambda_min,
            pattern_text(&ch.pattern),
            ch.distance.unwrap_or(f64::NAN),
            if ch.pass { "pass" } else { "FAIL" }
        )
        .map_err(w)?;
    }
    if let Some(path) = out {
        emit_json(&checks, Some(path), stdout)?;
    }
    if checks.iter().all(|c| c.pass) {
        Ok(EXIT_OK)
    } else {
        Err(Failure::negative("some rows disagree with detection"))
    }
}

pub fn cmd_monotones(setting_path: &Path, state_path: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    let setting = load_checked_setting(setting_path)?;
    let psi = io::load_state(state_path, &setting)?;
    let report = match monotones::report_state(&psi) {
        Ok(r) => r,
        Err(e @ crate::Error::NoConvergence { .. }) => {
            return Err(Failure {
                code: EXIT_INCONCLUSIVE,
                message: e.to_string(),
            })
        }
        Err(e) => return Err(Failure::negative(e)),
    };
    emit_json(&report, out, stdout)?;
    Ok(EXIT_OK)
}
