//! Exact dense linear algebra over the Gaussian rationals.
//!
//! Elimination uses exact field arithmetic, so ranks, kernels and solutions
//! are certificates, not estimates.

use crate::error::CoreError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.into_iter().enumerate() {
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> ScalarMatrix {
        let mut out = ScalarMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ScalarMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    *out.at_mut(i, j) += &prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !v[j].is_zero() {
                        acc += &(self.at(i, j) * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let pivot_row = (r..self.rows).find(|&i| !self.at(i, c).is_zero());
            let Some(p) = pivot_row else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, p * self.cols + j);
                }
            }
            let inv = self.at(r, c).inverse().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self.at(r, j) * &inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let factor = self.at(i, c).clone();
                    for j in c..self.cols {
                        let sub = self.at(r, j) * &factor;
                        *self.at_mut(i, j) -= &sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let pivot_row = (c..n).find(|&i| !m.at(i, c).is_zero());
            let Some(p) = pivot_row else {
                return Scalar::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            det = &det * m.at(c, c);
            let inv = m.at(c, c).inverse().expect("pivot is nonzero");
            for i in c + 1..n {
                if m.at(i, c).is_zero() {
                    continue;
                }
                let factor = m.at(i, c) * &inv;
                for j in c..n {
                    let sub = m.at(c, j) * &factor;
                    *m.at_mut(i, j) -= &sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<ScalarMatrix, CoreError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = ScalarMatrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = Scalar::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| k != c) {
            return Err(CoreError::SingularLinearPart);
        }
        let mut out = ScalarMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Ok(out)
    }

    /// Solve `A x = b` exactly by elimination on the augmented matrix.
    /// Returns `(particular solution with free coordinates zero, consistent)`.
    /// When the system is inconsistent the solution vector is meaningless.
    pub fn solve(&self, b: &[Scalar]) -> (Vec<Scalar>, bool) {
        assert_eq!(b.len(), self.rows);
        let mut aug = ScalarMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = aug.rref();
        // Inconsistent iff a pivot lands in the rhs column.
        if pivots.last() == Some(&self.cols) {
            return (vec![Scalar::zero(); self.cols], false);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        (x, true)
    }

    /// Canonical basis of the kernel: one vector per free column, produced
    /// from the reduced echelon form with the free coordinate set to one.
    /// Deterministic given the matrix.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m.at(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rank_and_det() {
        let m = ScalarMatrix::from_rows(vec![
            vec![s(1), s(2)],
            vec![s(2), s(4)],
        ]);
        assert_eq!(m.rank(), 1);
        assert!(m.det().is_zero());
        let m2 = ScalarMatrix::from_rows(vec![
            vec![s(0), s(1)],
            vec![s(1), s(1)],
        ]);
        assert_eq!(m2.det(), s(-1));
    }

    #[test]
    fn solve_and_kernel() {
        let m = ScalarMatrix::from_rows(vec![
            vec![s(1), s(1), s(0)],
            vec![s(0), s(1), s(1)],
        ]);
        let (x, ok) = m.solve(&[s(3), s(2)]);
        assert!(ok);
        assert_eq!(m.mul_vec(&x), vec![s(3), s(2)]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn inverse_round_trip() {
        let m = ScalarMatrix::from_rows(vec![
            vec![s(2), s(1)],
            vec![s(1), s(1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), ScalarMatrix::identity(2));
    }
}
