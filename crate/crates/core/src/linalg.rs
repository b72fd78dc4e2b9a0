//! Dense row-major matrices, sample covariance and a cyclic Jacobi
//! eigensolver for small symmetric matrices.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Keeps only the rows whose index is not in `drop` (sorted or not).
    pub fn without_rows(&self, drop: &[usize]) -> Matrix {
        let mut keep = vec![true; self.rows];
        for &i in drop {
            if i < self.rows {
                keep[i] = false;
            }
        }
        let mut data = Vec::with_capacity(self.data.len());
        let mut rows = 0;
        for (i, k) in keep.iter().enumerate() {
            if *k {
                data.extend_from_slice(self.row(i));
                rows += 1;
            }
        }
        Matrix {
            rows,
            cols: self.cols,
            data,
        }
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for row in self.iter_rows() {
            for (m, x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        let n = self.rows.max(1) as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Sample covariance of the columns (n − 1 denominator).
pub fn covariance(m: &Matrix) -> Result<Matrix> {
    if m.rows() < 2 {
        return Err(Error::Degenerate(format!(
            "covariance needs at least 2 rows, got {}",
            m.rows()
        )));
    }
    let means = m.column_means();
    let p = m.cols();
    let mut cov = Matrix::zeros(p, p);
    for row in m.iter_rows() {
        for a in 0..p {
            let da = row[a] - means[a];
            for b in a..p {
                cov[(a, b)] += da * (row[b] - means[b]);
            }
        }
    }
    let denom = (m.rows() - 1) as f64;
    for a in 0..p {
        for b in a..p {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    Ok(cov)
}

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition.
///
/// Rotations sweep every off-diagonal pair in row order until the
/// off-diagonal Frobenius norm drops below `1e-12` (absolute, or relative
/// to the matrix norm for large entries). Each eigenvector is oriented so
/// that its largest-magnitude component is positive; ties go to the lowest
/// index.
pub fn symmetric_eigen(input: &Matrix) -> Result<SymmetricEigen> {
    let n = input.rows();
    if n != input.cols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: input.cols(),
        });
    }
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let scale = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_TOLERANCE * scale.max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) >= tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Degenerate(
                "Jacobi eigensolver did not converge".into(),
            ));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col = v.column(i);
            orient(&mut col);
            col
        })
        .collect();
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Flips `vector` so that its largest-magnitude component is positive.
pub fn orient(vector: &mut [f64]) {
    let mut best = 0;
    for (i, x) in vector.iter().enumerate() {
        if x.abs() > vector[best].abs() {
            best = i;
        }
    }
    if vector.get(best).is_some_and(|x| *x < 0.0) {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
}
