//! Superposition monotones and the constant-overlap property of golden states.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::{self, GramSetting, DEGENERACY_REL_TOL};
use crate::linalg::{self, c, CMatrix};
use crate::parallel::Exec;
use crate::sampling;
use crate::simplex::{self, Diagnostics, SimplexOptions};
use crate::states::{self, DensityOperator, SuperpositionState};

/// Slack on the l1 bound and on its attainment.
pub const L1_TOL: f64 = 1e-9;
/// Slack on the relative-entropy bound and on its attainment.
pub const REL_ENTROPY_TOL: f64 = 1e-8;
/// Eigenvalues below this are treated as zero inside logarithms.
const LOG_FLOOR: f64 = 1e-300;

/// `sum_{i != j} |rho_c[i,j]|` for basis-bilinear coefficients.
pub fn l1_superposition(rho_c: &CMatrix) -> f64 {
    let d = rho_c.nrows();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += rho_c[(i, j)].norm();
            }
        }
    }
    total
}

pub fn l1_density(rho: &DensityOperator) -> Result<f64> {
    Ok(l1_superposition(&rho.coefficient_bilinear()?))
}

/// `sum_{i != j} |psi_i| |psi_j|`.
pub fn l1_state(psi: &SuperpositionState) -> f64 {
    let m = psi.moduli();
    let s: f64 = m.iter().sum();
    let sq: f64 = m.iter().map(|x| x * x).sum();
    s * s - sq
}

fn xlogx(x: f64) -> f64 {
    if x <= LOG_FLOOR {
        0.0
    } else {
        x * x.ln()
    }
}

/// `(ln a - ln b) / (a - b)`, with the limit `1/a` at `a = b`.
fn log_divided_difference(a: f64, b: f64) -> f64 {
    let (a, b) = (a.max(LOG_FLOOR), b.max(LOG_FLOOR));
    let x = (a - b) / b;
    if x.abs() < 1e-6 {
        (1.0 - x / 2.0 + x * x / 3.0) / b
    } else {
        x.ln_1p() / x / b
    }
}

/// Relative-entropy objective `-S(rho) - tr(rho ln sigma(q))` in the embedding frame.
struct RelEntropy<'a> {
    rho: &'a CMatrix,
    neg_entropy: f64,
    /// Columns `v_k` of the embedding.
    v: &'a CMatrix,
}

impl RelEntropy<'_> {
    fn sigma(&self, q: &[f64]) -> CMatrix {
        let w = CMatrix::from_diagonal(&linalg::real_cvec(q));
        self.v * w * self.v.adjoint()
    }

    fn eval(&self, q: &[f64]) -> (f64, Vec<f64>) {
        let sigma = self.sigma(q);
        let Ok((mu, u)) = linalg::hermitian_eigen(&sigma) else {
            return (f64::INFINITY, vec![0.0; q.len()]);
        };
        let d = mu.len();
        let rt = u.adjoint() * self.rho * &u;
        let cross: f64 = (0..d).map(|a| rt[(a, a)].re * mu[a].max(LOG_FLOOR).ln()).sum();
        let value = self.neg_entropy - cross;
        let lmat = CMatrix::from_fn(d, d, |a, b| c(log_divided_difference(mu[a], mu[b]), 0.0) * rt[(a, b)]);
        let vt = u.adjoint() * self.v;
        let grad = (0..q.len())
            .map(|k| {
                let col = vt.column(k);
                -(col.adjoint() * &lmat * col)[(0, 0)].re
            })
            .collect();
        (value, grad)
    }
}

#[derive(Debug, Clone)]
pub struct RelEntropyResult {
    pub value: f64,
    /// Optimal free-state weights.
    pub weights: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// `min_q S(rho || sum_k q_k |c_k><c_k|)`, starting from uniform weights.
pub fn rel_entropy_superposition(rho: &DensityOperator) -> Result<RelEntropyResult> {
    rel_entropy_with(rho, &SimplexOptions::default())
}

pub fn rel_entropy_with(rho: &DensityOperator, opts: &SimplexOptions) -> Result<RelEntropyResult> {
    let v = rho.setting().embedding()?;
    let (lam, _) = linalg::hermitian_eigen(rho.matrix())?;
    let neg_entropy: f64 = lam.iter().map(|&x| xlogx(x)).sum();
    let objective = RelEntropy {
        rho: rho.matrix(),
        neg_entropy,
        v,
    };
    let d = v.ncols();
    let start = vec![1.0 / d as f64; d];
    let res = simplex::minimize(|q| objective.eval(q), &start, opts);
    if !res.diagnostics.converged {
        return Err(Error::NoConvergence {
            value: res.value,
            gradient_norm: res.diagnostics.gradient_norm,
        });
    }
    Ok(RelEntropyResult {
        value: res.value.max(0.0),
        weights: res.point,
        diagnostics: res.diagnostics,
    })
}

/// `|<Psi|c_i>|^2` for each basis state, evaluated in the embedding frame.
pub fn constant_trace_overlaps(psi: &SuperpositionState) -> Result<Vec<f64>> {
    let v = psi.setting().embedding()?;
    let e = v * psi.coeffs();
    Ok(v.column_iter().map(|col| e.dotc(&col).norm_sqr()).collect())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bounds {
    /// `(d - 1) / lambda_min`.
    pub l1_max: f64,
    /// `ln(d / lambda_min)`.
    pub rel_ent_max: f64,
}

pub fn bounds(setting: &GramSetting) -> Result<Bounds> {
    let lambda = gram::eigensystem(setting, DEGENERACY_REL_TOL)?.lambda_min();
    let d = setting.dim() as f64;
    Ok(Bounds {
        l1_max: (d - 1.0) / lambda,
        rel_ent_max: (d / lambda).ln(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    pub l1: f64,
    pub rel_entropy: f64,
    /// Present for pure states.
    pub overlaps: Option<Vec<f64>>,
    pub bounds: Bounds,
    pub attained: bool,
    pub optimizer: Diagnostics,
}

pub fn report_state(psi: &SuperpositionState) -> Result<MonotoneReport> {
    let rho = states::density_pure(psi)?;
    let mut r = report_density(&rho)?;
    r.l1 = l1_state(psi);
    r.overlaps = Some(constant_trace_overlaps(psi)?);
    r.attained = bound_check(&r).attained();
    Ok(r)
}

pub fn report_density(rho: &DensityOperator) -> Result<MonotoneReport> {
    let l1 = l1_density(rho)?;
    let re = rel_entropy_superposition(rho)?;
    let mut r = MonotoneReport {
        l1,
        rel_entropy: re.value,
        overlaps: None,
        bounds: bounds(rho.setting())?,
        attained: false,
        optimizer: re.diagnostics,
    };
    r.attained = bound_check(&r).attained();
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundFlags {
    pub l1_within: bool,
    pub rel_entropy_within: bool,
    pub l1_attained: bool,
    pub rel_entropy_attained: bool,
}

impl BoundFlags {
    pub fn attained(&self) -> bool {
        self.l1_attained && self.rel_entropy_attained
    }
}

pub fn bound_check(report: &MonotoneReport) -> BoundFlags {
    let b = &report.bounds;
    BoundFlags {
        l1_within: report.l1 <= b.l1_max + L1_TOL,
        rel_entropy_within: report.rel_entropy <= b.rel_ent_max + REL_ENTROPY_TOL,
        l1_attained: (report.l1 - b.l1_max).abs() <= L1_TOL * b.l1_max.max(1.0),
        rel_entropy_attained: (report.rel_entropy - b.rel_ent_max).abs() <= REL_ENTROPY_TOL,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct L1Sweep {
    pub samples: usize,
    pub max_l1: f64,
    /// Sample index attaining `max_l1`.
    pub argmax: usize,
}

/// Largest `l1` over `samples` random pure states; sample `k` uses stream `k` of `seed`.
pub fn sweep_l1(setting: &Arc<GramSetting>, samples: usize, seed: u64, exec: Exec) -> Result<L1Sweep> {
    let values = exec.map(samples, |k| {
        let mut rng = sampling::stream_rng(seed, k as u64);
        sampling::random_state(setting, &mut rng).map(|psi| l1_state(&psi))
    });
    let mut best = L1Sweep {
        samples,
        max_l1: f64::NEG_INFINITY,
        argmax: 0,
    };
    for (k, v) in values.into_iter().enumerate() {
        let v = v?;
        if v > best.max_l1 {
            best.max_l1 = v;
            best.argmax = k;
        }
    }
    Ok(best)
}

/// Entropy `-tr(rho ln rho)` of an embedded density matrix.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let (lam, _) = linalg::hermitian_eigen(rho.matrix())?;
    Ok(-lam.iter().map(|&x| xlogx(x)).sum::<f64>())
}
