//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics. Matrices are plain
//! row-major `Vec<Vec<Complex64>>`.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Mat = Vec<Vec<Complex64>>;

pub fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> Mat {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn mat_vec(a: &Mat, x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(x: &[Complex64], s: Complex64) -> Vec<Complex64> {
    x.iter().map(|z| z * s).collect()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Mat, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = b.len();
    let mut m: Vec<Vec<Complex64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[piv][col].norm() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..=n {
                let v = m[col][k];
                m[r][k] -= f * v;
            }
        }
    }
    let mut x = vec![cz(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for k in i + 1..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

fn shifted(a: &Mat, mu: f64) -> Mat {
    a.iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, &v)| if i == j { v - mu } else { v }).collect())
        .collect()
}

fn start_vector(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| cz(1.0 + 0.37 * k as f64, 0.11 * (k * k) as f64 - 0.2)).collect()
}

fn rayleigh(a: &Mat, x: &[Complex64]) -> f64 {
    dot(x, &mat_vec(a, x)).re / dot(x, x).re
}

/// Rayleigh quotient iteration from `x`; stops when the shifted solve breaks down.
fn rqi(a: &Mat, mut x: Vec<Complex64>, steps: usize) -> (f64, Vec<Complex64>) {
    let mut mu = rayleigh(a, &x);
    for _ in 0..steps {
        match solve(&shifted(a, mu), &x) {
            Some(y) if norm(&y).is_finite() && norm(&y) > 0.0 => {
                let n = norm(&y);
                x = scale(&y, cz(1.0 / n, 0.0));
                mu = rayleigh(a, &x);
            }
            _ => break,
        }
    }
    (mu, x)
}

/// Largest eigenpair by power iteration followed by Rayleigh quotient polishing.
pub fn power_max(a: &Mat) -> (f64, Vec<Complex64>) {
    let mut x = start_vector(a.len());
    for _ in 0..500 {
        let y = mat_vec(a, &x);
        let n = norm(&y);
        x = scale(&y, cz(1.0 / n, 0.0));
    }
    rqi(a, x, 3)
}

/// Smallest eigenpair by inverse power iteration followed by Rayleigh polishing.
pub fn power_min(a: &Mat) -> (f64, Vec<Complex64>) {
    let mut x = start_vector(a.len());
    for _ in 0..500 {
        let y = solve(a, &x).expect("singular matrix");
        let n = norm(&y);
        x = scale(&y, cz(1.0 / n, 0.0));
    }
    rqi(a, x, 3)
}

/// All permutations of `0..n` by Heap's algorithm, then sorted.
pub fn permutations_sorted(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, out);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
        heap(k - 1, a, out);
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out.sort();
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `Kt` for permutation `perm` sending `psi` to `sqrt(1/d!) phi`.
pub fn s1_operator(perm: &[usize], psi: &[Complex64], phi: &[Complex64]) -> Mat {
    let d = psi.len();
    let amp = (1.0 / factorial(d) as f64).sqrt();
    let mut m = vec![vec![cz(0.0, 0.0); d]; d];
    for (j, &i) in perm.iter().enumerate() {
        m[i][j] = phi[i] / psi[j] * amp;
    }
    m
}

/// `K^dag G K` computed entry by entry.
pub fn sandwich(k: &Mat, g: &Mat) -> Mat {
    let d = g.len();
    let mut out = vec![vec![cz(0.0, 0.0); d]; d];
    for a in 0..d {
        for b in 0..d {
            let mut s = cz(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    s += k[i][a].conj() * g[i][j] * k[j][b];
                }
            }
            out[a][b] = s;
        }
    }
    out
}

/// `max_i |conj(psi_i) (G psi)_i - 1/d|` after normalizing `psi^dag G psi = 1`.
pub fn tilde_deviation(g: &Mat, x: &[Complex64]) -> f64 {
    let gx = mat_vec(g, x);
    let n = dot(x, &gx).re;
    let d = x.len() as f64;
    x.iter()
        .zip(&gx)
        .map(|(a, b)| (a.conj() * b / n - cz(1.0 / d, 0.0)).norm())
        .fold(0.0, f64::max)
}

/// Best tilde deviation over a dense grid of unit vectors
/// `cos(a) u + e^{ib} sin(a) w` in the span of orthonormal `u`, `w`.
pub fn grid_best_deviation(g: &Mat, u: &[Complex64], w: &[Complex64], steps: usize) -> (f64, Vec<Complex64>) {
    let mut best = (f64::INFINITY, Vec::new());
    for ia in 0..=steps {
        let a = std::f64::consts::FRAC_PI_2 * ia as f64 / steps as f64;
        for ib in 0..steps {
            let b = std::f64::consts::TAU * ib as f64 / steps as f64;
            let ph = Complex64::from_polar(a.sin(), b);
            let x: Vec<Complex64> = u.iter().zip(w).map(|(p, q)| p * a.cos() + q * ph).collect();
            let dev = tilde_deviation(g, &x);
            if dev < best.0 {
                best = (dev, x);
            }
        }
    }
    best
}

/// Distance between `a` and `b` after rotating `a` onto `b`'s global phase.
pub fn aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ov = dot(a, b);
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { cz(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x * ph - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Every unit-diagonal Hermitian matrix with the given upper-triangular overlaps.
pub fn gram_from_overlaps(d: usize, overlaps: &[(usize, usize, Complex64)]) -> Mat {
    let mut g = vec![vec![cz(0.0, 0.0); d]; d];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = cz(1.0, 0.0);
    }
    for &(i, j, s) in overlaps {
        g[i - 1][j - 1] = s;
        g[j - 1][i - 1] = s.conj();
    }
    g
}
