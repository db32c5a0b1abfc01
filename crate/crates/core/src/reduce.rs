//! Rank-reduction preprocessing for singular systems.
//!
//! Nonlinear case: replace components by annihilating-polynomial images
//! until the lowest-order homogeneous map has full generic rank, then raise
//! components to powers so all vanishing orders agree.
//!
//! Linear case: the analogous row elimination with homogeneous syzygies,
//! followed by row equalization with powers of the first variable.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::homog::{annihilating_polynomial, jacobian};
use crate::index::MultiIndex;
use crate::linalg::ScalarMatrix;
use crate::maps::SeriesMatrix;
use crate::scalar::Scalar;
use crate::series::Series;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionKind {
    Nonlinear,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionStep {
    /// Component `component` was replaced by `poly(F_1, ..., F_m)`, where
    /// `poly` is weighted homogeneous with the recorded weights.
    Relation {
        poly: Series,
        weights: Vec<usize>,
        component: usize,
    },
    /// Row `component` was replaced by `sum_j multipliers[j] * row_j`.
    RowCombination {
        multipliers: Vec<Series>,
        component: usize,
    },
}

/// A replayable log of the transformations applied to a system. Replaying
/// the record on the original input reproduces the reduced system exactly,
/// and the same transformations must be applied to right-hand sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub kind: ReductionKind,
    pub steps: Vec<ReductionStep>,
    /// Nonlinear: component j is raised to this power.
    /// Linear: row j is multiplied by z_1 to this power.
    pub equalization: Vec<u32>,
    /// Common vanishing order after reduction is `ell0 + 1` for nonlinear
    /// systems; rows are homogeneous of lowest degree `ell0` for linear ones.
    pub ell0: usize,
}

impl ReductionRecord {
    /// Replay the nonlinear record on a map (used on A itself and on
    /// right-hand sides b).
    pub fn apply_nonlinear(&self, input: &Series) -> Result<Series, CoreError> {
        assert_eq!(self.kind, ReductionKind::Nonlinear);
        let mut cur = input.clone();
        for step in &self.steps {
            match step {
                ReductionStep::Relation { poly, component, .. } => {
                    let image = poly.with_trunc_degree(cur.trunc_degree()).compose(&cur)?;
                    cur = replace_component(&cur, *component, &image);
                }
                ReductionStep::RowCombination { .. } => unreachable!(),
            }
        }
        let parts: Vec<Series> = (0..cur.num_components())
            .map(|j| cur.component(j).pow(self.equalization[j]))
            .collect();
        Ok(Series::stack(&parts))
    }

    /// Replay the linear record on a matrix.
    pub fn apply_linear_matrix(&self, theta: &SeriesMatrix) -> Result<SeriesMatrix, CoreError> {
        assert_eq!(self.kind, ReductionKind::Linear);
        let mut cur = theta.clone();
        for step in &self.steps {
            match step {
                ReductionStep::RowCombination {
                    multipliers,
                    component,
                } => {
                    cur = combine_rows(&cur, multipliers, *component);
                }
                ReductionStep::Relation { .. } => unreachable!(),
            }
        }
        let num_vars = cur.num_vars();
        let trunc = cur.trunc_degree();
        let mut out = cur.clone();
        for j in 0..cur.rows {
            let z1pow = monomial_power(num_vars, 0, self.equalization[j], trunc);
            for c in 0..cur.cols {
                *out.at_mut(j, c) = cur.at(j, c).mul(&z1pow);
            }
        }
        Ok(out)
    }

    /// Apply the linear record to a right-hand side (components transform
    /// like matrix rows).
    pub fn apply_linear_rhs(&self, b: &Series) -> Result<Series, CoreError> {
        assert_eq!(self.kind, ReductionKind::Linear);
        let mut comps: Vec<Series> = (0..b.num_components()).map(|j| b.component(j)).collect();
        for step in &self.steps {
            match step {
                ReductionStep::RowCombination {
                    multipliers,
                    component,
                } => {
                    let mut acc = Series::zero(b.num_vars(), 1, b.trunc_degree());
                    for (mult, comp) in multipliers.iter().zip(&comps) {
                        if !mult.is_zero() {
                            acc = acc.add(&comp.mul(&mult.with_trunc_degree(b.trunc_degree())));
                        }
                    }
                    comps[*component] = acc;
                }
                ReductionStep::Relation { .. } => unreachable!(),
            }
        }
        let num_vars = b.num_vars();
        for (j, comp) in comps.iter_mut().enumerate() {
            let z1pow = monomial_power(num_vars, 0, self.equalization[j], b.trunc_degree());
            *comp = comp.mul(&z1pow);
        }
        Ok(Series::stack(&comps))
    }
}

fn replace_component(map: &Series, component: usize, with: &Series) -> Series {
    let parts: Vec<Series> = (0..map.num_components())
        .map(|j| {
            if j == component {
                with.clone()
            } else {
                map.component(j)
            }
        })
        .collect();
    Series::stack(&parts)
}

fn combine_rows(m: &SeriesMatrix, multipliers: &[Series], component: usize) -> SeriesMatrix {
    let mut out = m.clone();
    let trunc = m.trunc_degree();
    for c in 0..m.cols {
        let mut acc = Series::zero(m.num_vars(), 1, trunc);
        for (j, mult) in multipliers.iter().enumerate() {
            if !mult.is_zero() {
                acc = acc.add(&m.at(j, c).mul(&mult.with_trunc_degree(trunc)));
            }
        }
        *out.at_mut(component, c) = acc;
    }
    out
}

fn monomial_power(num_vars: usize, var: usize, e: u32, trunc: usize) -> Series {
    let mut s = Series::zero(num_vars, 1, trunc);
    let mut idx = MultiIndex::zero(num_vars);
    idx.0[var] = e;
    s.set_coeff(idx, vec![Scalar::one()]);
    s
}

fn lcm_all(xs: &[usize]) -> usize {
    xs.iter().fold(1usize, |acc, &x| acc.lcm(&x))
}

/// Lemma-style reduction of a nonlinear map of full generic rank: the
/// returned map has all components vanishing to the same order `ell0 + 1`
/// and a lowest-order homogeneous map of full generic rank.
pub fn reduce_nonlinear(a: &Series) -> Result<(Series, ReductionRecord), CoreError> {
    let n = a.num_vars();
    if a.num_components() != n {
        return Err(CoreError::DimensionMismatch(
            "reduce_nonlinear requires a square map".into(),
        ));
    }
    if !a.has_zero_constant_term() {
        return Err(CoreError::NonzeroConstantTerm);
    }

    // Iteration cap from the initial deficiency e - sum k_j.
    let det = jacobian(a).det();
    let e = det.order().ok_or(CoreError::RankDeficient {
        expected: n,
        found: generic_rank_upper_bound(a),
    })?;
    let init_orders = component_orders(a)?;
    let sum_k: usize = init_orders.iter().map(|&o| o - 1).sum();
    let cap = e.saturating_sub(sum_k) + 1;

    let mut cur = a.clone();
    let mut steps = Vec::new();
    loop {
        let orders = component_orders(&cur)?;
        let lowest: Vec<Series> = (0..n)
            .map(|j| cur.component(j).homogeneous_part(orders[j]))
            .collect();
        match annihilating_polynomial(&lowest, &orders, None)? {
            None => break,
            Some(rel) => {
                if steps.len() >= cap {
                    return Err(CoreError::IterationCapExceeded { cap });
                }
                let image = rel
                    .poly
                    .with_trunc_degree(cur.trunc_degree())
                    .compose(&cur)?;
                cur = replace_component(&cur, rel.pivot_var, &image);
                steps.push(ReductionStep::Relation {
                    poly: rel.poly,
                    weights: orders,
                    component: rel.pivot_var,
                });
            }
        }
    }

    let orders = component_orders(&cur)?;
    let target = lcm_all(&orders);
    let equalization: Vec<u32> = orders.iter().map(|&o| (target / o) as u32).collect();
    let parts: Vec<Series> = (0..n)
        .map(|j| cur.component(j).pow(equalization[j]))
        .collect();
    let reduced = Series::stack(&parts);

    let record = ReductionRecord {
        kind: ReductionKind::Nonlinear,
        steps,
        equalization,
        ell0: target - 1,
    };
    debug_assert!(!jacobian(&lowest_map(&reduced, target)).det().is_zero());
    Ok((reduced, record))
}

fn component_orders(map: &Series) -> Result<Vec<usize>, CoreError> {
    (0..map.num_components())
        .map(|j| {
            map.vanishing_order(j)
                .ok_or(CoreError::DegenerateComponent(j))
        })
        .collect()
}

fn lowest_map(map: &Series, order: usize) -> Series {
    map.homogeneous_part(order)
}

fn generic_rank_upper_bound(a: &Series) -> usize {
    crate::homog::generic_rank(a, Some(a.num_vars()))
}

/// Row reduction of an `m x m` matrix of series with nonvanishing
/// determinant: the result has lowest-order rows homogeneous of one common
/// degree `ell0` forming a matrix of full generic rank.
pub fn reduce_linear(
    theta: &SeriesMatrix,
) -> Result<(SeriesMatrix, ReductionRecord), CoreError> {
    let m = theta.rows;
    if theta.cols != m {
        return Err(CoreError::DimensionMismatch(
            "reduce_linear requires a square matrix".into(),
        ));
    }
    let det = theta.det();
    let e = det.order().ok_or(CoreError::SingularSeriesMatrix)?;
    let init_orders = row_orders(theta)?;
    let cap = e.saturating_sub(init_orders.iter().sum()) + 1;

    let mut cur = theta.clone();
    let mut steps = Vec::new();
    loop {
        let orders = row_orders(&cur)?;
        let lowest = lowest_rows(&cur, &orders);
        if !lowest.det().is_zero() {
            break;
        }
        if steps.len() >= cap {
            return Err(CoreError::IterationCapExceeded { cap });
        }
        let (multipliers, component) = row_syzygy(&lowest, &orders)?;
        cur = combine_rows(&cur, &multipliers, component);
        steps.push(ReductionStep::RowCombination {
            multipliers,
            component,
        });
    }

    let orders = row_orders(&cur)?;
    let ell0 = *orders.iter().max().unwrap();
    let equalization: Vec<u32> = orders.iter().map(|&k| (ell0 - k) as u32).collect();
    let num_vars = cur.num_vars();
    let trunc = cur.trunc_degree();
    let mut reduced = cur.clone();
    for j in 0..m {
        let z1pow = monomial_power(num_vars, 0, equalization[j], trunc);
        for c in 0..m {
            *reduced.at_mut(j, c) = cur.at(j, c).mul(&z1pow);
        }
    }
    let record = ReductionRecord {
        kind: ReductionKind::Linear,
        steps,
        equalization,
        ell0,
    };
    Ok((reduced, record))
}

fn row_orders(m: &SeriesMatrix) -> Result<Vec<usize>, CoreError> {
    (0..m.rows)
        .map(|j| {
            (0..m.cols)
                .filter_map(|c| m.at(j, c).order())
                .min()
                .ok_or(CoreError::DegenerateComponent(j))
        })
        .collect()
}

fn lowest_rows(m: &SeriesMatrix, orders: &[usize]) -> SeriesMatrix {
    let mut entries = Vec::with_capacity(m.rows * m.cols);
    for j in 0..m.rows {
        for c in 0..m.cols {
            entries.push(m.at(j, c).homogeneous_part(orders[j]));
        }
    }
    SeriesMatrix::new(m.rows, m.cols, entries)
}

/// Find homogeneous multipliers `p_j` of degree `delta - k_j`, not all zero,
/// with `sum_j p_j * row_j = 0`, scanning `delta` upward. A syzygy of total
/// degree at most `sum k_j` always exists when the lowest rows are
/// dependent.
fn row_syzygy(
    lowest: &SeriesMatrix,
    orders: &[usize],
) -> Result<(Vec<Series>, usize), CoreError> {
    let m = lowest.rows;
    let n = lowest.num_vars();
    let min_k = *orders.iter().min().unwrap();
    let bound = orders.iter().sum::<usize>().max(min_k);
    for delta in min_k..=bound {
        // Unknown layout: for each row j with orders[j] <= delta, the
        // coefficients of p_j on the monomials of degree delta - orders[j].
        let mut col_layout = Vec::new(); // (row j, monomial)
        for (j, &kj) in orders.iter().enumerate() {
            if delta >= kj {
                for mono in MultiIndex::of_degree(n, delta - kj) {
                    col_layout.push((j, mono));
                }
            }
        }
        if col_layout.is_empty() {
            continue;
        }
        let out_monos = MultiIndex::of_degree(n, delta);
        let mut a = ScalarMatrix::zero(out_monos.len() * m, col_layout.len());
        for (cidx, (j, mono)) in col_layout.iter().enumerate() {
            for c in 0..m {
                let entry = lowest.at(*j, c);
                for (ridx, mu) in out_monos.iter().enumerate() {
                    if let Some(diff) = mu.checked_sub(mono) {
                        let coeff = entry.coeff_component(&diff, 0);
                        if !coeff.is_zero() {
                            *a.at_mut(ridx * m + c, cidx) = coeff;
                        }
                    }
                }
            }
        }
        let kernel = a.kernel_basis();
        if let Some(first) = kernel.into_iter().next() {
            let lead = first.iter().find(|c| !c.is_zero()).unwrap().clone();
            let inv = lead.inverse()?;
            let mut multipliers = vec![Series::zero(n, 1, delta); m];
            for ((j, mono), c) in col_layout.iter().zip(&first) {
                if !c.is_zero() {
                    multipliers[*j].add_to_coeff(mono, &[c * &inv]);
                }
            }
            let component = (0..m).find(|&j| !multipliers[j].is_zero()).unwrap();
            return Ok((multipliers, component));
        }
    }
    Err(CoreError::ScanBoundExceeded { bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord(n: usize, v: usize, d: usize) -> Series {
        Series::coordinate(n, v, d)
    }

    #[test]
    fn already_reduced_cubes() {
        // A = (w1^3, w2^3): no relation steps, equalization trivial, ell0 = 2.
        let d = 9;
        let w1 = coord(2, 0, d);
        let w2 = coord(2, 1, d);
        let a = Series::stack(&[w1.pow(3), w2.pow(3)]);
        let (b, rec) = reduce_nonlinear(&a).unwrap();
        assert_eq!(b, a);
        assert!(rec.steps.is_empty());
        assert_eq!(rec.ell0, 2);
        assert_eq!(rec.apply_nonlinear(&a).unwrap(), b);
    }

    #[test]
    fn relation_then_equalization() {
        // A = (w1^2, w1^2 + w2^3): relation x1 - x2 on the lowest parts.
        let d = 10;
        let w1 = coord(2, 0, d);
        let w2 = coord(2, 1, d);
        let a = Series::stack(&[w1.pow(2), w1.pow(2).add(&w2.pow(3))]);
        let (b, rec) = reduce_nonlinear(&a).unwrap();
        assert_eq!(rec.steps.len(), 1);
        // After the relation one component is +-w2^3 and orders are {3, 2} or
        // {2, 3}; lcm = 6, so the reduced map vanishes to order 6 = ell0 + 1.
        assert_eq!(rec.ell0, 5);
        let orders: Vec<usize> = (0..2).map(|j| b.vanishing_order(j).unwrap()).collect();
        assert_eq!(orders, vec![6, 6]);
        // Lowest map has full generic rank: Jacobian determinant of B0 != 0.
        let b0 = b.homogeneous_part(6);
        assert!(!jacobian(&b0).det().is_zero());
        // Replay reproduces the reduced map.
        assert_eq!(rec.apply_nonlinear(&a).unwrap(), b);
    }

    #[test]
    fn rank_deficient_input_is_rejected() {
        let d = 6;
        let w1 = coord(2, 0, d);
        let a = Series::stack(&[w1.pow(2), w1.pow(2)]);
        assert!(reduce_nonlinear(&a).is_err());
    }

    #[test]
    fn linear_identity_passes_through() {
        let id = SeriesMatrix::identity(2, 2, 6);
        let (n, rec) = reduce_linear(&id).unwrap();
        assert_eq!(n, id);
        assert_eq!(rec.ell0, 0);
        assert!(rec.steps.is_empty());
    }

    #[test]
    fn linear_syzygy_elimination() {
        // Rows (z1, z2) and (z1, z2 + z1^2): lowest rows are dependent.
        let d = 8;
        let z1 = coord(2, 0, d);
        let z2 = coord(2, 1, d);
        let theta = SeriesMatrix::new(
            2,
            2,
            vec![
                z1.clone(),
                z2.clone(),
                z1.clone(),
                z2.add(&z1.pow(2)),
            ],
        );
        let (n, rec) = reduce_linear(&theta).unwrap();
        assert_eq!(rec.steps.len(), 1);
        let orders = row_orders(&n).unwrap();
        let lowest = lowest_rows(&n, &orders);
        assert!(!lowest.det().is_zero());
        assert_eq!(rec.apply_linear_matrix(&theta).unwrap(), n);
    }

    #[test]
    fn linear_equalization_multiplies_rows() {
        // diag(1, z1): independent lowest rows, row 1 gets multiplied by z1.
        let d = 6;
        let z1 = coord(2, 0, d);
        let one = Series::constant(vec![Scalar::one()], 2, d);
        let zero = Series::zero(2, 1, d);
        let theta = SeriesMatrix::new(2, 2, vec![one, zero.clone(), zero, z1]);
        let (n, rec) = reduce_linear(&theta).unwrap();
        assert_eq!(rec.ell0, 1);
        assert_eq!(rec.equalization, vec![1, 0]);
        let orders = row_orders(&n).unwrap();
        assert_eq!(orders, vec![1, 1]);
    }
}
