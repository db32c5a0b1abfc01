//! Map-level operations: inversion of biholomorphic germs and matrices of
//! series.

use crate::error::CoreError;
use crate::linalg::ScalarMatrix;
use crate::series::Series;
use crate::scalar::Scalar;

/// Invert a germ `u: (C^n,0) -> (C^n,0)` with invertible linear part,
/// degree by degree: `v_1 = u_1^{-1}` and for `l >= 2`
/// `v_l = -u_1^{-1} [ (u - u_1) o V_{l-1} ]_l`.
/// The result satisfies `u o v = v o u = id` exactly through the truncation
/// degree of `u`.
pub fn invert_map(u: &Series) -> Result<Series, CoreError> {
    let n = u.num_vars();
    if u.num_components() != n {
        return Err(CoreError::DimensionMismatch(
            "invert_map requires a square map".into(),
        ));
    }
    if !u.has_zero_constant_term() {
        return Err(CoreError::NonzeroConstantTerm);
    }
    let trunc = u.trunc_degree();
    let lin = ScalarMatrix::from_rows(u.linear_part_matrix());
    let lin_inv = lin.inverse().map_err(|_| CoreError::SingularLinearPart)?;
    let lin_inv_series = Series::linear(
        &(0..n)
            .map(|i| (0..n).map(|j| lin_inv.at(i, j).clone()).collect())
            .collect::<Vec<_>>(),
        n,
        trunc,
    );
    // Higher-order part of u.
    let tail = u.sub(&u.homogeneous_part(1));
    let mut v = lin_inv_series.clone();
    for ell in 2..=trunc {
        // [tail o v]_ell depends only on v through degree ell - 1.
        let correction = tail.compose(&v)?.homogeneous_part(ell);
        let delta = lin_inv_series.compose(&correction.with_trunc_degree(trunc))?;
        v = v.sub(&delta.homogeneous_part(ell));
    }
    Ok(v)
}

/// A rectangular matrix whose entries are scalar-valued series in a common
/// variable space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Series>,
}

impl SeriesMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Series>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        assert!(entries.iter().all(|e| e.num_components() == 1));
        SeriesMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize, num_vars: usize, trunc: usize) -> Self {
        SeriesMatrix {
            rows,
            cols,
            entries: vec![Series::zero(num_vars, 1, trunc); rows * cols],
        }
    }

    pub fn identity(n: usize, num_vars: usize, trunc: usize) -> Self {
        let mut m = Self::zero(n, n, num_vars, trunc);
        for i in 0..n {
            *m.at_mut(i, i) = Series::constant(vec![Scalar::one()], num_vars, trunc);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Series {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Series {
        &mut self.entries[i * self.cols + j]
    }

    pub fn num_vars(&self) -> usize {
        self.entries[0].num_vars()
    }

    pub fn trunc_degree(&self) -> usize {
        self.entries.iter().map(|e| e.trunc_degree()).min().unwrap()
    }

    /// Apply to a vector-valued series with `cols` components.
    pub fn mul_map(&self, v: &Series) -> Series {
        assert_eq!(v.num_components(), self.cols);
        let parts: Vec<Series> = (0..self.rows)
            .map(|i| {
                let mut acc = Series::zero(v.num_vars(), 1, self.at(i, 0).trunc_degree().min(v.trunc_degree()));
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&v.component(j)));
                }
                acc
            })
            .collect();
        Series::stack(&parts)
    }

    /// Row `i` as a vector-valued series with `cols` components.
    pub fn row_map(&self, i: usize) -> Series {
        Series::stack(
            &(0..self.cols)
                .map(|j| self.at(i, j).clone())
                .collect::<Vec<_>>(),
        )
    }

    /// Exact determinant by Laplace expansion with memoization on column
    /// subsets. Fine for the small matrices this crate works with.
    pub fn det(&self) -> Series {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let num_vars = self.num_vars();
        let trunc = self.trunc_degree();
        if n == 0 {
            return Series::constant(vec![Scalar::one()], num_vars, trunc);
        }
        use std::collections::HashMap;
        let mut memo: HashMap<u32, Series> = HashMap::new();
        memo.insert(0, Series::constant(vec![Scalar::one()], num_vars, trunc));
        // dp over subsets of columns: det of the top-left |S| rows on columns S.
        fn go(
            m: &SeriesMatrix,
            cols: u32,
            memo: &mut HashMap<u32, Series>,
            num_vars: usize,
            trunc: usize,
        ) -> Series {
            if let Some(v) = memo.get(&cols) {
                return v.clone();
            }
            let row = (cols.count_ones() as usize) - 1;
            let mut acc = Series::zero(num_vars, 1, trunc);
            // Expansion along row `row`: the k-th present column carries
            // sign (-1)^{row + k}.
            let mut sign = if row % 2 == 0 {
                Scalar::one()
            } else {
                -Scalar::one()
            };
            for j in 0..m.cols {
                if cols & (1 << j) == 0 {
                    continue;
                }
                let entry = m.at(row, j);
                if !entry.is_zero() {
                    let sub = go(m, cols & !(1 << j), memo, num_vars, trunc);
                    acc = acc.add(&entry.mul(&sub).scale(&sign));
                }
                sign = -sign;
            }
            memo.insert(cols, acc.clone());
            acc
        }
        let full = (1u32 << n) - 1;
        go(self, full, &mut memo, num_vars, trunc)
    }

    /// Compose every entry with an inner map (entries as functions of new
    /// variables).
    pub fn compose(&self, inner: &Series) -> Result<SeriesMatrix, CoreError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.compose(inner))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn invert_identity_and_linear() {
        let id = Series::identity(2, 6);
        assert_eq!(invert_map(&id).unwrap(), id);

        // u = 3 z (one variable)
        let u = Series::coordinate(1, 0, 5).scale(&Scalar::from_int(3));
        let v = invert_map(&u).unwrap();
        assert_eq!(
            v,
            Series::coordinate(1, 0, 5).scale(&Scalar::from_rational(1, 3))
        );
    }

    #[test]
    fn invert_round_trip() {
        // u(z1, z2) = (z2, z1 + z1^2) at D = 8
        let d = 8;
        let z1 = Series::coordinate(2, 0, d);
        let z2 = Series::coordinate(2, 1, d);
        let u = Series::stack(&[z2.clone(), z1.add(&z1.mul(&z1))]);
        let v = invert_map(&u).unwrap();
        let uv = u.compose(&v).unwrap();
        assert_eq!(uv, Series::identity(2, d));
        let vu = v.compose(&u).unwrap();
        assert_eq!(vu, Series::identity(2, d));
    }

    #[test]
    fn series_matrix_det() {
        let d = 4;
        let z1 = Series::coordinate(2, 0, d);
        let z2 = Series::coordinate(2, 1, d);
        let m = SeriesMatrix::new(2, 2, vec![z1.clone(), z2.clone(), z2.clone(), z1.clone()]);
        let det = m.det();
        let expected = z1.mul(&z1).sub(&z2.mul(&z2));
        assert_eq!(det, expected);
    }
}
