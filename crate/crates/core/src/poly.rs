//! Univariate complex polynomials: evaluation, roots, resultants.
//!
//! Coefficients are stored in ascending order, `c[k]` multiplies `t^k`.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::hermitian::C64;

pub fn eval(c: &[C64], t: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * t + a)
}

/// Value and first derivative.
pub fn eval_d(c: &[C64], t: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * t + p;
        p = p * t + a;
    }
    (p, dp)
}

pub fn derivative(c: &[C64]) -> Vec<C64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Drops trailing coefficients below `rel_tol` times the largest magnitude.
pub fn trim(c: &[C64], rel_tol: f64) -> &[C64] {
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut n = c.len();
    while n > 1 && c[n - 1].norm() <= rel_tol * scale {
        n -= 1;
    }
    &c[..n]
}

/// All roots by the Aberth-Ehrlich iteration, followed by Newton polishing.
///
/// The leading coefficient must be nonzero.
pub fn roots(c: &[C64]) -> Vec<C64> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    if n == 1 {
        return vec![-c[0] / lead];
    }
    // Fujiwara-type bound on root moduli for the starting circle
    let radius = (0..n)
        .map(|k| (c[k] / lead).norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-12);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval_d(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / z[k].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for r in &mut z {
        *r = polish(c, *r, 3);
    }
    z
}

/// A few Newton steps, keeping the best iterate.
pub fn polish(c: &[C64], mut t: C64, steps: usize) -> C64 {
    let mut best = eval(c, t).norm();
    for _ in 0..steps {
        let (p, dp) = eval_d(c, t);
        if dp.norm() == 0.0 {
            break;
        }
        let next = t - p / dp;
        let v = eval(c, next).norm();
        if !(v < best) {
            break;
        }
        best = v;
        t = next;
    }
    t
}

/// Resultant of two polynomials through the Sylvester determinant.
pub fn resultant(f: &[C64], g: &[C64]) -> C64 {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut s = DMatrix::<C64>::zeros(size, size);
    // rows are shifted coefficient vectors, highest degree first
    for r in 0..n {
        for k in 0..=m {
            s[(r, r + k)] = f[m - k];
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s[(n + r, r + k)] = g[n - k];
        }
    }
    s.determinant()
}

/// Coefficients of the degree `< samples.len()` polynomial taking the given
/// values at `radius * exp(2 pi i k / N)`.
pub fn interpolate_circle(values: &[C64], radius: f64) -> Vec<C64> {
    let n = values.len();
    (0..n)
        .map(|j| {
            let mut s = C64::new(0.0, 0.0);
            for (k, &v) in values.iter().enumerate() {
                s += v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64);
            }
            s / (n as f64 * radius.powi(j as i32))
        })
        .collect()
}
