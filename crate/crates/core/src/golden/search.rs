//! Multistart search for an equal-modulus unit vector inside a degenerate
//! eigenspace.
//!
//! A unit vector in the span of the orthonormal columns `Q` is written as
//! `x = Q c / |c|` with one pivot entry of `c` pinned to 1, which removes the
//! global phase and leaves `2(m-1)` real parameters. Inside the eigenspace
//! `tilde_i = |x_i|^2`, so the residuals `r_i = |x_i|^2 - 1/d` vanish exactly
//! at golden candidates. `sum r_i^2` is minimized by BFGS from every start.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, CMatrix, CVector};
use crate::parallel::Exec;

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub starts: usize,
    pub seed: u64,
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Starts whose deviation falls below this are accepted in index order.
    pub accept_tol: f64,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 50,
            seed: 0x00C0_FFEE,
            gradient_tol: 1e-12,
            max_iterations: 1000,
            accept_tol: super::ACCEPT_TOL,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StartResult {
    /// Unit vector in the original coordinates.
    pub vector: CVector,
    /// `max_i ||x_i|^2 - 1/d|`.
    pub deviation: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: StartResult,
    pub best_index: usize,
    /// Starts up to and including the accepted one, or all of them.
    pub starts_run: usize,
}

struct Objective<'a> {
    basis: &'a CMatrix,
    pivot: usize,
    target: f64,
}

impl Objective<'_> {
    fn m(&self) -> usize {
        self.basis.ncols()
    }

    fn coefficients(&self, params: &[f64]) -> CVector {
        let m = self.m();
        let mut coeffs = CVector::zeros(m);
        let mut p = 0;
        for k in 0..m {
            coeffs[k] = if k == self.pivot {
                c(1.0, 0.0)
            } else {
                p += 2;
                c(params[p - 2], params[p - 1])
            };
        }
        coeffs
    }

    fn unit_vector(&self, params: &[f64]) -> CVector {
        let coeffs = self.coefficients(params);
        let y = self.basis * &coeffs;
        let n = coeffs.norm();
        y / c(n, 0.0)
    }

    fn value_and_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let coeffs = self.coefficients(params);
        let y = self.basis * &coeffs;
        let n2 = coeffs.norm_squared();
        let r: Vec<f64> = y.iter().map(|yi| yi.norm_sqr() / n2 - self.target).collect();
        let value = r.iter().map(|ri| ri * ri).sum();
        let mut grad = Vec::with_capacity(params.len());
        for k in 0..self.m() {
            if k == self.pivot {
                continue;
            }
            // d f / d conj(z_k)
            let mut g = Complex64::new(0.0, 0.0);
            for (i, yi) in y.iter().enumerate() {
                let dr = yi * self.basis[(i, k)].conj() / n2 - coeffs[k] * (yi.norm_sqr() / (n2 * n2));
                g += dr * (2.0 * r[i]);
            }
            grad.push(2.0 * g.re);
            grad.push(2.0 * g.im);
        }
        (value, grad)
    }

    fn deviation(&self, x: &CVector) -> f64 {
        x.iter()
            .map(|z| (z.norm_sqr() - self.target).abs())
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking. Returns the final point and iteration count.
fn bfgs(obj: &Objective, mut x: Vec<f64>, opts: &SearchOptions) -> (Vec<f64>, usize) {
    let n = x.len();
    if n == 0 {
        return (x, 0);
    }
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    let (mut f, mut g) = obj.value_and_gradient(&x);
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        if dot(&g, &g).sqrt() <= opts.gradient_tol || f <= 1e-32 {
            break;
        }
        iterations += 1;
        let mut dir: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            // inverse Hessian lost positive definiteness: restart from steepest descent
            h.iter_mut().enumerate().for_each(|(k, v)| *v = if k % (n + 1) == 0 { 1.0 } else { 0.0 });
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let (ft, gt) = obj.value_and_gradient(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            break;
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &yv)).collect();
            let yhy = dot(&yv, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let progress = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        if progress <= f64::EPSILON * f.max(1e-300) && dot(&s, &s).sqrt() < 1e-15 {
            break;
        }
    }
    (x, iterations)
}

fn run_start(basis: &CMatrix, start: &CVector, target: f64, opts: &SearchOptions) -> StartResult {
    let m = basis.ncols();
    let pivot = (0..m)
        .max_by(|&a, &b| start[a].norm().total_cmp(&start[b].norm()))
        .unwrap_or(0);
    let scaled = start / start[pivot];
    let mut params = Vec::with_capacity(2 * (m - 1));
    for k in (0..m).filter(|&k| k != pivot) {
        params.push(scaled[k].re);
        params.push(scaled[k].im);
    }
    let obj = Objective { basis, pivot, target };
    let (params, iterations) = bfgs(&obj, params, opts);
    let vector = obj.unit_vector(&params);
    let deviation = obj.deviation(&vector);
    StartResult {
        vector,
        deviation,
        iterations,
    }
}

/// Start 0 is the projection of the all-ones vector (when it does not vanish);
/// the rest are seeded Gaussian draws, one independent stream per index.
fn start_point(basis: &CMatrix, index: usize, seed: u64) -> CVector {
    let m = basis.ncols();
    if index == 0 {
        let ones = CVector::from_element(basis.nrows(), c(1.0, 0.0));
        let proj = basis.adjoint() * ones;
        if proj.norm() > 1e-8 {
            return proj;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    CVector::from_fn(m, |_, _| {
        c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    })
}

/// Searches the span of `basis` (orthonormal columns, `d x m`).
///
/// The lowest-index start that reaches `accept_tol` wins; otherwise the start
/// with the smallest deviation is returned.
pub fn search_eigenspace(basis: &CMatrix, opts: &SearchOptions) -> SearchResult {
    let target = 1.0 / basis.nrows() as f64;
    let starts = opts.starts.max(1);
    let eval = |k: usize| run_start(basis, &start_point(basis, k, opts.seed), target, opts);
    let results: Vec<StartResult> = match opts.exec {
        Exec::Sequential => {
            let mut out = Vec::new();
            for k in 0..starts {
                let r = eval(k);
                let done = r.deviation <= opts.accept_tol;
                out.push(r);
                if done {
                    break;
                }
            }
            out
        }
        Exec::Parallel => opts.exec.map(starts, eval),
    };
    let accepted = results.iter().position(|r| r.deviation <= opts.accept_tol);
    let starts_run = accepted.map_or(results.len(), |k| k + 1);
    let best_index = accepted.unwrap_or_else(|| {
        (0..results.len())
            .min_by(|&a, &b| results[a].deviation.total_cmp(&results[b].deviation))
            .unwrap()
    });
    SearchResult {
        best: results[best_index].clone(),
        best_index,
        starts_run,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn sum_zero_basis() -> CMatrix {
        // orthonormal basis of {x in C^3 : x1 + x2 + x3 = 0}
        let a = 1.0 / 2f64.sqrt();
        let b = 1.0 / 6f64.sqrt();
        CMatrix::from_row_slice(3, 2, &[c(a, 0.0), c(b, 0.0), c(-a, 0.0), c(b, 0.0), c(0.0, 0.0), c(-2.0 * b, 0.0)])
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let basis = sum_zero_basis();
        let obj = Objective { basis: &basis, pivot: 0, target: 1.0 / 3.0 };
        let x = vec![0.3, -0.7];
        let (_, g) = obj.value_and_gradient(&x);
        for k in 0..2 {
            let h = 1e-6;
            let mut xp = x.clone();
            xp[k] += h;
            let mut xm = x.clone();
            xm[k] -= h;
            let fd = (obj.value_and_gradient(&xp).0 - obj.value_and_gradient(&xm).0) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-8, "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn identity_space_returns_uniform_vector_first() {
        let basis = CMatrix::identity(3, 3);
        let res = search_eigenspace(&basis, &SearchOptions::default());
        assert_eq!(res.best_index, 0);
        assert!(res.best.deviation < 1e-15);
        let r = 1.0 / 3f64.sqrt();
        assert!(res.best.vector.iter().all(|z| (z - c(r, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn one_dimensional_space_is_evaluated_directly() {
        let mut basis = CMatrix::zeros(2, 1);
        basis[(0, 0)] = ONE;
        let res = search_eigenspace(&basis, &SearchOptions::default());
        assert!((res.best.deviation - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sequential_and_parallel_pick_the_same_start() {
        let basis = sum_zero_basis();
        let seq = search_eigenspace(&basis, &SearchOptions { exec: Exec::Sequential, ..Default::default() });
        let par = search_eigenspace(&basis, &SearchOptions { exec: Exec::Parallel, ..Default::default() });
        assert_eq!(seq.best_index, par.best_index);
        assert_eq!(seq.best.vector, par.best.vector);
    }
}
