//! Minimization of smooth convex functions over the probability simplex.
//!
//! Exponentiated-gradient (mirror descent) steps with adaptive step size
//! locate the active face; a projected Newton phase on the free coordinates
//! then drives the projected gradient to machine level. Coordinates are kept
//! at or above [`SimplexOptions::floor`].

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub floor: f64,
    pub gradient_tol: f64,
    pub max_mirror_iterations: usize,
    pub max_newton_iterations: usize,
    /// Projected gradient at which mirror descent hands over to Newton.
    pub handover_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            floor: 1e-12,
            gradient_tol: 1e-8,
            max_mirror_iterations: 2_000,
            max_newton_iterations: 100,
            handover_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub diagnostics: Diagnostics,
}

/// Norm of the KKT violation of `grad` at `q`.
///
/// Coordinates above `10 * floor` are free and contribute their deviation
/// from the mean free gradient; coordinates at the floor contribute only
/// when their gradient lies below that mean.
pub fn projected_gradient_norm(q: &[f64], grad: &[f64], floor: f64) -> f64 {
    let free: Vec<usize> = (0..q.len()).filter(|&k| q[k] > 10.0 * floor).collect();
    if free.is_empty() {
        return f64::INFINITY;
    }
    let mean = free.iter().map(|&k| grad[k]).sum::<f64>() / free.len() as f64;
    (0..q.len())
        .map(|k| {
            let r = grad[k] - mean;
            if q[k] > 10.0 * floor {
                r * r
            } else {
                r.min(0.0).powi(2)
            }
        })
        .sum::<f64>()
        .sqrt()
}

fn renormalize(q: &mut [f64], floor: f64) {
    for x in q.iter_mut() {
        *x = x.max(floor);
    }
    let s: f64 = q.iter().sum();
    for x in q.iter_mut() {
        *x /= s;
    }
}

/// Minimizes `f` over the simplex starting at `start`.
///
/// `f` returns the value and gradient; it must accept any point with
/// positive coordinates.
pub fn minimize<F>(f: F, start: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = start.len();
    let mut q = start.to_vec();
    renormalize(&mut q, opts.floor);
    let (mut value, mut grad) = f(&q);
    let mut pg = projected_gradient_norm(&q, &grad, opts.floor);
    let mut iterations = 0;
    let mut eta = 1.0;

    while pg > opts.handover_tol.max(opts.gradient_tol) && iterations < opts.max_mirror_iterations {
        iterations += 1;
        let gmin = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial: Vec<f64> = (0..n).map(|k| q[k] * (-eta * (grad[k] - gmin)).exp()).collect();
            renormalize(&mut trial, opts.floor);
            let (tv, tg) = f(&trial);
            let lin: f64 = (0..n).map(|k| grad[k] * (trial[k] - q[k])).sum();
            let kl: f64 = (0..n).map(|k| trial[k] * (trial[k] / q[k]).ln()).sum();
            if tv.is_finite() && tv <= value + lin + kl / eta + 1e-15 * value.abs() {
                q = trial;
                value = tv;
                grad = tg;
                eta *= 2.0;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
        pg = projected_gradient_norm(&q, &grad, opts.floor);
    }

    let mut newton = 0;
    while pg > opts.gradient_tol && newton < opts.max_newton_iterations {
        newton += 1;
        let free: Vec<usize> = (0..n).filter(|&k| q[k] > 10.0 * opts.floor).collect();
        let m = free.len();
        if m < 2 {
            break;
        }
        let mut h = DMatrix::<f64>::zeros(m, m);
        for (b, &j) in free.iter().enumerate() {
            let step = 1e-5 * q[j];
            let mut up = q.clone();
            up[j] += step;
            let mut dn = q.clone();
            dn[j] -= step;
            let (_, gu) = f(&up);
            let (_, gd) = f(&dn);
            for (a, &i) in free.iter().enumerate() {
                h[(a, b)] = (gu[i] - gd[i]) / (2.0 * step);
            }
        }
        let h = (&h + h.transpose()) * 0.5;
        let reg = 1e-12 * h.diagonal().abs().max().max(1.0);
        let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
        kkt.view_mut((0, 0), (m, m)).copy_from(&h);
        for a in 0..m {
            kkt[(a, a)] += reg;
            kkt[(a, m)] = 1.0;
            kkt[(m, a)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(m + 1);
        for (a, &i) in free.iter().enumerate() {
            rhs[a] = -grad[i];
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { break };
        let dir: Vec<f64> = sol.iter().take(m).cloned().collect();
        let mut tmax: f64 = 1.0;
        for (a, &i) in free.iter().enumerate() {
            if dir[a] < 0.0 {
                tmax = tmax.min((q[i] - opts.floor) / -dir[a]);
            }
        }
        let slope: f64 = free.iter().enumerate().map(|(a, &i)| grad[i] * dir[a]).sum();
        let mut t = tmax;
        let mut improved = false;
        for _ in 0..40 {
            let mut trial = q.clone();
            for (a, &i) in free.iter().enumerate() {
                trial[i] = (q[i] + t * dir[a]).max(opts.floor);
            }
            renormalize(&mut trial, opts.floor);
            let (tv, tg) = f(&trial);
            let tpg = projected_gradient_norm(&trial, &tg, opts.floor);
            if tv.is_finite() && (tv <= value + 1e-4 * t * slope || (tv <= value + 1e-14 * value.abs().max(1.0) && tpg < pg)) {
                q = trial;
                value = tv;
                grad = tg;
                pg = tpg;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }

    SimplexResult {
        point: q,
        value,
        diagnostics: Diagnostics {
            iterations: iterations + newton,
            gradient_norm: pg,
            converged: pg <= opts.gradient_tol,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_interior_minimum() {
        let target = [0.2, 0.3, 0.5];
        let f = |q: &[f64]| {
            let v = q.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            let g = q.iter().zip(&target).map(|(a, b)| 2.0 * (a - b)).collect();
            (v, g)
        };
        let r = minimize(f, &[1.0 / 3.0; 3], &SimplexOptions::default());
        assert!(r.diagnostics.converged);
        for (a, b) in r.point.iter().zip(&target) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_objective_hits_vertex() {
        let f = |_: &[f64]| (0.0, vec![1.0, 0.0, 2.0]);
        let f = |q: &[f64]| {
            let (_, g) = f(q);
            (q[0] + 2.0 * q[2], g)
        };
        let r = minimize(f, &[1.0 / 3.0; 3], &SimplexOptions::default());
        assert!(r.point[1] > 1.0 - 1e-10);
        assert!(r.diagnostics.converged);
    }

    #[test]
    fn cross_entropy_recovers_distribution() {
        let p = [0.1, 0.6, 0.3];
        let f = |q: &[f64]| {
            let v = -p.iter().zip(q).map(|(a, b)| a * b.ln()).sum::<f64>();
            let g = p.iter().zip(q).map(|(a, b)| -a / b).collect();
            (v, g)
        };
        let r = minimize(f, &[0.8, 0.1, 0.1], &SimplexOptions::default());
        assert!(r.diagnostics.converged);
        for (a, b) in r.point.iter().zip(&p) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
