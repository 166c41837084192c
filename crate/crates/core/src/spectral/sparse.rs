//! Symmetric sparse matrices in compressed rows, and sparse Cholesky solves.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Symmetric matrix stored with both triangles in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Sums duplicate `(i, j, v)` entries. The caller supplies both triangles.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(trip.len() / 2);
        let mut values: Vec<f64> = Vec::with_capacity(trip.len() / 2);
        let mut last = (usize::MAX, usize::MAX);
        for (i, j, v) in trip {
            if (i, j) == last {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = (i, j);
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        SparseSym { n, indptr, indices, values }
    }

    pub fn diagonal(d: Vec<f64>) -> Self {
        let n = d.len();
        SparseSym { n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    /// Entries `(i, j, v)` with `i <= j`.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    /// The diagonal, if the matrix has no offdiagonal entries.
    pub fn as_diagonal(&self) -> Option<Vec<f64>> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j != i {
                    if v != 0.0 {
                        return None;
                    }
                } else {
                    d[i] = v;
                }
            }
        }
        Some(d)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[p] * x[self.indices[p]];
            }
            *yi = s;
        }
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let mut r = 0.0;
            for p in self.indptr[i]..self.indptr[i + 1] {
                r += self.values[p] * x[self.indices[p]];
            }
            s += x[i] * r;
        }
        s
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `self + diag(d)`.
    pub fn add_diagonal(&self, d: &[f64]) -> SparseSym {
        let mut out = self.clone();
        for i in 0..self.n {
            let r = out.indptr[i]..out.indptr[i + 1];
            let p = out.indices[r.clone()]
                .binary_search(&i)
                .expect("stiffness pattern contains the diagonal");
            out.values[r.start + p] += d[i];
        }
        out
    }

    /// Lower triangle as a faer matrix, skipping row and column `skip`.
    fn to_faer_lower(&self, skip: Option<usize>) -> Result<SparseColMat<usize, f64>> {
        let map = |i: usize| match skip {
            Some(s) if i > s => i - 1,
            _ => i,
        };
        let dim = self.n - usize::from(skip.is_some());
        let mut trip = Vec::with_capacity(self.nnz() / 2 + self.n);
        for i in 0..self.n {
            if Some(i) == skip {
                continue;
            }
            for (j, v) in self.row(i) {
                if j <= i && Some(j) != skip {
                    trip.push(Triplet::new(map(i), map(j), v));
                }
            }
        }
        SparseColMat::try_new_from_triplets(dim, dim, &trip)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }
}

/// Sparse Cholesky factor, optionally of the matrix with one index removed.
pub struct CholeskyFactor {
    n: usize,
    skip: Option<usize>,
    symbolic: SymbolicLlt<usize>,
    llt: Llt<usize, f64>,
}

impl CholeskyFactor {
    pub fn new(a: &SparseSym, skip: Option<usize>) -> Result<Self> {
        let m = a.to_faer_lower(skip)?;
        let symbolic = SymbolicLlt::try_new(m.symbolic(), Side::Lower)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = Llt::try_new_with_symbolic(symbolic.clone(), m.as_ref(), Side::Lower)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(CholeskyFactor { n: a.n(), skip, symbolic, llt })
    }

    /// Refactors a matrix with the same sparsity pattern.
    pub fn refactor(&mut self, a: &SparseSym) -> Result<()> {
        let m = a.to_faer_lower(self.skip)?;
        self.llt = Llt::try_new_with_symbolic(self.symbolic.clone(), m.as_ref(), Side::Lower)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(())
    }

    /// Solves for several right-hand sides; the skipped unknown is set to zero.
    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let skip = self.skip;
        let dim = self.n - usize::from(skip.is_some());
        let src = |i: usize| match skip {
            Some(s) if i >= s => i + 1,
            _ => i,
        };
        let b = Mat::<f64>::from_fn(dim, rhs.len(), |i, j| rhs[j][src(i)]);
        let x = self.llt.solve(&b);
        (0..rhs.len())
            .map(|j| {
                let mut out = vec![0.0; self.n];
                for i in 0..dim {
                    out[src(i)] = x[(i, j)];
                }
                out
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.solve_many(std::slice::from_ref(&rhs.to_vec())).pop().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SparseSym {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseSym::from_triplets(n, t)
    }

    #[test]
    fn duplicates_are_summed() {
        let a = SparseSym::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.as_diagonal(), Some(vec![3.0, 1.0]));
    }

    #[test]
    fn cholesky_solves() {
        let a = path(50);
        let x: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x);
        let f = CholeskyFactor::new(&a, None).unwrap();
        let y = f.solve(&b);
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-12));
    }

    #[test]
    fn pinned_solve_of_singular_laplacian() {
        // path graph Laplacian, singular with constant null space
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        let l = SparseSym::from_triplets(n, t);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let b = l.matvec(&x);
        let f = CholeskyFactor::new(&l, Some(7)).unwrap();
        let y = f.solve(&b);
        let shift = x[7] - y[7];
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q - shift).abs() < 1e-10));
    }
}
