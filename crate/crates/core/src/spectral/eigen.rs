//! Lowest eigenpairs of `K x = lambda M x` for a stiffness matrix `K` with
//! constant null space and a positive diagonal mass `M`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sparse::{CholeskyFactor, SparseSym};
use crate::error::{Error, Result};

/// Problems up to this size are solved densely.
const DENSE_LIMIT: usize = 1500;

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Relative Ritz residual at which a pair counts as converged.
    pub tol: f64,
    /// Upper bound on the number of basis vectors kept between restarts.
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-9, max_basis: 240, max_restarts: 40, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    /// Ascending, starting with the constant mode.
    pub eigenvalues: Vec<f64>,
    /// `M`-orthonormal eigenvectors, one per eigenvalue.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub area: f64,
    /// `lambda_1 * area`.
    pub product: f64,
}

impl SpectralResult {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[1]
    }
}

/// Groups nonzero eigenvalues lying within 1% of the first of each group.
pub fn clusters(eigenvalues: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &l in eigenvalues.iter().skip(1) {
        match out.last_mut() {
            Some((v, m)) if (l - *v).abs() <= 0.01 * v.abs() => *m += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

fn mdot(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).zip(y).map(|((w, a), b)| w * a * b).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Removes the constant component in the `M` inner product.
fn deflate(m: &[f64], total: f64, x: &mut [f64]) {
    let c: f64 = m.iter().zip(x.iter()).map(|(w, v)| w * v).sum::<f64>() / total;
    for v in x.iter_mut() {
        *v -= c;
    }
}

/// Shift-invert operator `K^+ M` restricted to mean-zero functions, with the
/// factorization of `K` shared across masses.
pub struct ShiftInvert {
    k: SparseSym,
    factor: Option<CholeskyFactor>,
}

impl ShiftInvert {
    pub fn new(k: &SparseSym) -> Result<Self> {
        let factor = if k.n() > DENSE_LIMIT {
            Some(CholeskyFactor::new(k, Some(0))?)
        } else {
            None
        };
        Ok(ShiftInvert { k: k.clone(), factor })
    }

    pub fn stiffness(&self) -> &SparseSym {
        &self.k
    }

    /// The `count` lowest eigenpairs (including the constant mode) for the
    /// diagonal mass `mass`.
    pub fn solve(&self, mass: &[f64], count: usize, opts: &EigenOptions) -> Result<SpectralResult> {
        let n = self.k.n();
        if mass.len() != n {
            return Err(Error::Dimension { expected: n, found: mass.len() });
        }
        if count < 2 || count > n {
            return Err(Error::Invalid(format!("cannot compute {count} eigenpairs of a {n}-vertex mesh")));
        }
        if let Some(i) = mass.iter().position(|m| !(*m > 0.0)) {
            return Err(Error::Invalid(format!("mass not positive at vertex {i}")));
        }
        let area: f64 = mass.iter().sum();
        let (eigenvalues, eigenvectors) = match &self.factor {
            None => dense(&self.k, mass, count)?,
            Some(f) => self.krylov(f, mass, area, count, opts)?,
        };
        let product = eigenvalues[1] * area;
        Ok(SpectralResult { eigenvalues, eigenvectors, area, product })
    }

    fn krylov(
        &self,
        factor: &CholeskyFactor,
        mass: &[f64],
        area: f64,
        count: usize,
        opts: &EigenOptions,
    ) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = mass.len();
        let nev = count - 1;
        let b = nev + 2;
        let max_blocks = (opts.max_basis / b).max(4);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

        let apply = |vs: &[Vec<f64>]| -> Vec<Vec<f64>> {
            let rhs: Vec<Vec<f64>> = vs
                .iter()
                .map(|v| v.iter().zip(mass).map(|(x, m)| x * m).collect())
                .collect();
            let mut out = factor.solve_many(&rhs);
            for x in &mut out {
                deflate(mass, area, x);
            }
            out
        };

        // M-orthonormalizes `w` against `basis` and itself; returns the
        // coefficients against the basis and the triangular factor.
        let orthonormalize = |basis: &[Vec<f64>], w: &mut Vec<Vec<f64>>, rng: &mut ChaCha8Rng| {
            let mut h = DMatrix::<f64>::zeros(basis.len(), w.len());
            for _ in 0..2 {
                for (c, col) in w.iter_mut().enumerate() {
                    for (r, q) in basis.iter().enumerate() {
                        let s = mdot(mass, q, col);
                        axpy(-s, q, col);
                        h[(r, c)] += s;
                    }
                }
            }
            let mut rmat = DMatrix::<f64>::zeros(w.len(), w.len());
            for c in 0..w.len() {
                let before = mdot(mass, &w[c], &w[c]).sqrt();
                for _ in 0..2 {
                    for p in 0..c {
                        let s = mdot(mass, &w[p], &w[c]);
                        let (head, tail) = w.split_at_mut(c);
                        axpy(-s, &head[p], &mut tail[0]);
                        rmat[(p, c)] += s;
                    }
                }
                let mut nrm = mdot(mass, &w[c], &w[c]).sqrt();
                if !(nrm > 1e-10 * before.max(1e-300)) {
                    // breakdown: continue with a fresh random direction
                    let mut fresh: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    deflate(mass, area, &mut fresh);
                    for _ in 0..2 {
                        for q in basis.iter().chain(w[..c].iter()) {
                            let s = mdot(mass, q, &fresh);
                            axpy(-s, q, &mut fresh);
                        }
                    }
                    w[c] = fresh;
                    nrm = mdot(mass, &w[c], &w[c]).sqrt();
                    rmat[(c, c)] = 0.0;
                } else {
                    rmat[(c, c)] = nrm;
                }
                for x in w[c].iter_mut() {
                    *x /= nrm;
                }
            }
            (h, rmat)
        };

        let mut start: Vec<Vec<f64>> = (0..b)
            .map(|_| {
                let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                deflate(mass, area, &mut v);
                v
            })
            .collect();
        orthonormalize(&[], &mut start, &mut rng);

        let mut worst = f64::INFINITY;
        for _restart in 0..opts.max_restarts {
            let mut basis: Vec<Vec<f64>> = start.clone();
            let cap = (max_blocks + 1) * b;
            let mut hmat = DMatrix::<f64>::zeros(cap, cap);
            for j in 0..max_blocks {
                let lo = j * b;
                let mut w = apply(&basis[lo..lo + b]);
                let (h, r) = orthonormalize(&basis, &mut w, &mut rng);
                let m = basis.len();
                hmat.view_mut((0, lo), (m, b)).copy_from(&h);
                hmat.view_mut((m, lo), (b, b)).copy_from(&r);
                basis.extend(w);

                let sq = hmat.view((0, 0), (m, m)).into_owned();
                let sym = (&sq + sq.transpose()) * 0.5;
                let eig = SymmetricEigen::new(sym);
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
                let top = &order[..nev.min(m)];
                if top.len() < nev {
                    continue;
                }
                let rblock = hmat.view((m, m - b), (b, b)).into_owned();
                worst = 0.0;
                for &i in top {
                    let y_last = eig.eigenvectors.view((m - b, i), (b, 1)).into_owned();
                    let res = (&rblock * y_last).norm() / eig.eigenvalues[i].abs();
                    worst = worst.max(res);
                }
                let last = j + 1 == max_blocks;
                if worst < opts.tol || last {
                    let keep = if worst < opts.tol { nev } else { b };
                    let vecs: Vec<Vec<f64>> = order[..keep.min(m)]
                        .iter()
                        .map(|&i| {
                            let mut x = vec![0.0; n];
                            for (r, q) in basis[..m].iter().enumerate() {
                                axpy(eig.eigenvectors[(r, i)], q, &mut x);
                            }
                            x
                        })
                        .collect();
                    if worst < opts.tol {
                        return Ok(self.finish(mass, area, vecs));
                    }
                    start = vecs;
                    orthonormalize(&[], &mut start, &mut rng);
                }
            }
        }
        Err(Error::EigenNoConvergence(worst))
    }

    /// Rayleigh quotients of the Ritz vectors, sorted, with the constant mode first.
    fn finish(&self, mass: &[f64], area: f64, vecs: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut pairs: Vec<(f64, Vec<f64>)> = vecs
            .into_iter()
            .map(|x| {
                let nrm = mdot(mass, &x, &x).sqrt();
                let x: Vec<f64> = x.iter().map(|v| v / nrm).collect();
                (self.k.quadratic_form(&x), x)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let c = 1.0 / area.sqrt();
        let constant = vec![c; mass.len()];
        let mut values = vec![self.k.quadratic_form(&constant)];
        let mut vectors = vec![constant];
        for (l, x) in pairs {
            values.push(l);
            vectors.push(x);
        }
        (values, vectors)
    }
}

fn dense(k: &SparseSym, mass: &[f64], count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = k.n();
    let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in k.upper_entries() {
        a[(i, j)] = v * s[i] * s[j];
        a[(j, i)] = a[(i, j)];
    }
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let values = order[..count].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order[..count]
        .iter()
        .map(|&i| (0..n).map(|r| eig.eigenvectors[(r, i)] * s[r]).collect())
        .collect();
    Ok((values, vectors))
}

/// The `count` lowest generalized eigenpairs of `(k, m)` for diagonal `m`.
pub fn lowest_eigenpairs(k: &SparseSym, m: &SparseSym, count: usize) -> Result<SpectralResult> {
    let mass = m
        .as_diagonal()
        .ok_or_else(|| Error::Invalid("mass matrix must be diagonal".into()))?;
    ShiftInvert::new(k)?.solve(&mass, count, &EigenOptions::default())
}
