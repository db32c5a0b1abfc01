//! Solvers for singular analytic systems at truncated-exact precision.
//!
//! Nonlinear systems `A(u(z)) = b(z)` are solved for a biholomorphic germ
//! `u` with prescribed 1-jet, by rank reduction followed by the
//! degree-by-degree recurrence through a left inverse of multiplication by
//! the lowest-order Jacobian. Linear systems `Theta(z) u = b` and
//! `Theta(c(z)) u = b` follow the same pattern. Every solve ends with a
//! residual verification against the original system: the reduction can in
//! principle admit spurious solutions, and verification restores exactness.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::homog::{jacobian, left_inverse_apply};
use crate::linalg::ScalarMatrix;
use crate::maps::{invert_map, SeriesMatrix};
use crate::reduce::{reduce_linear, reduce_nonlinear, ReductionKind, ReductionRecord};
use crate::series::Series;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonlinearSolveResult {
    pub u: Series,
    pub certified_degree: usize,
    pub residual_zero: bool,
    pub reduction: ReductionRecord,
    /// Degrees at which the right-hand side fell outside the image of the
    /// lowest-order multiplication operator. Such an event does not abort
    /// the solve; it guarantees `residual_zero = false`.
    pub not_in_image_degrees: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearSolveResult {
    pub u: Series,
    pub certified_degree: usize,
    pub residual_zero: bool,
    pub reduction: ReductionRecord,
    pub not_in_image_degrees: Vec<usize>,
}

fn trivial_record(n: usize, ell0: usize, kind: ReductionKind) -> ReductionRecord {
    let fill = if matches!(kind, ReductionKind::Nonlinear) {
        1
    } else {
        0
    };
    ReductionRecord {
        kind,
        steps: Vec::new(),
        equalization: vec![fill; n],
        ell0,
    }
}

/// Solve `A(u) = b` for `u` tangent to the identity, where `A` is already
/// reduced: all components vanish to one order `ell0 + 1` and the lowest
/// homogeneous map has full generic rank. The degree-l part of the solution
/// consumes `b` only through degree `ell0 + l`.
pub fn solve_nonlinear_tangent_identity(
    a_reduced: &Series,
    b: &Series,
    degree: usize,
) -> Result<NonlinearSolveResult, CoreError> {
    let n = a_reduced.num_vars();
    if a_reduced.num_components() != n || b.num_components() != n {
        return Err(CoreError::DimensionMismatch(
            "tangent-identity solve requires square data".into(),
        ));
    }
    let orders: Vec<usize> = (0..n)
        .map(|j| {
            a_reduced
                .vanishing_order(j)
                .ok_or(CoreError::DegenerateComponent(j))
        })
        .collect::<Result<_, _>>()?;
    let first = orders[0];
    if orders.iter().any(|&o| o != first) || first == 0 {
        return Err(CoreError::Precondition(
            "tangent-identity solve requires equal vanishing orders >= 1".into(),
        ));
    }
    let ell0 = first - 1;
    let a0 = a_reduced.homogeneous_part(ell0 + 1);
    let a0_prime = jacobian(&a0);
    if a0_prime.det().is_zero() {
        return Err(CoreError::Precondition(
            "lowest-order homogeneous map is rank deficient".into(),
        ));
    }
    let w = a_reduced.trunc_degree().min(b.trunc_degree());
    let certified = degree.min(w.saturating_sub(ell0));
    let row_degrees = vec![ell0; n];

    let mut u = Series::identity(n, w);
    let mut events = Vec::new();
    for ell in 2..=certified {
        let partial = u.lower_part(ell - 1);
        let composed = a_reduced.truncate(ell0 + ell).compose(&partial)?;
        let rhs_map = b
            .truncate(ell0 + ell)
            .homogeneous_part(ell0 + ell)
            .sub(&composed.homogeneous_part(ell0 + ell));
        let rhs: Vec<Series> = (0..n).map(|j| rhs_map.component(j)).collect();
        let res = left_inverse_apply(&a0_prime, &row_degrees, &rhs, ell)?;
        if !res.in_image {
            events.push(ell);
        }
        u = u.add(&Series::stack(&res.preimage).with_trunc_degree(w));
    }
    let u = u.truncate(certified.max(1));
    // Verification degree: the reduced system constrains b through
    // ell0 + certified; since A vanishes to order ell0 + 1, that range of
    // output degrees consumes u only through the certified degree, so
    // zero-padding u above it is sound.
    let check_to = (ell0 + certified).min(w);
    let lhs = a_reduced.compose(&u.with_trunc_degree(check_to))?;
    let residual_zero = lhs.truncate(check_to) == b.truncate(check_to);
    Ok(NonlinearSolveResult {
        u,
        certified_degree: certified,
        residual_zero,
        reduction: trivial_record(n, ell0, ReductionKind::Nonlinear),
        not_in_image_degrees: events,
    })
}

/// Solve `A(u) = b` for a biholomorphic germ `u` with `u'(0) = lambda`.
///
/// Runs the rank reduction, transforms `b` by the same record, solves the
/// tangent-to-identity conjugated problem with right-hand side
/// `b_reduced o lambda^{-1}`, and returns `u(z) = v(lambda z)`. The final
/// residual is evaluated against the original `A` and `b`.
pub fn solve_nonlinear(
    a: &Series,
    b: &Series,
    lambda: &ScalarMatrix,
    degree: usize,
) -> Result<NonlinearSolveResult, CoreError> {
    let n = a.num_vars();
    if b.num_vars() != n || b.num_components() != n || a.num_components() != n {
        return Err(CoreError::DimensionMismatch(
            "solve_nonlinear requires square data in matching variables".into(),
        ));
    }
    if lambda.rows != n || lambda.cols != n {
        return Err(CoreError::DimensionMismatch("lambda must be n x n".into()));
    }
    if !b.has_zero_constant_term() {
        return Err(CoreError::Precondition(
            "right-hand side must vanish at the origin".into(),
        ));
    }
    let lambda_inv = lambda.inverse().map_err(|_| CoreError::SingularLinearPart)?;

    let (a_reduced, record) = reduce_nonlinear(a)?;
    let b_reduced = record.apply_nonlinear(b)?;

    let lambda_inv_series = linear_series(&lambda_inv, b_reduced.trunc_degree());
    let rhs_v = b_reduced.compose(&lambda_inv_series)?;

    let vres = solve_nonlinear_tangent_identity(&a_reduced, &rhs_v, degree)?;
    let u = vres
        .u
        .compose(&linear_series(lambda, vres.u.trunc_degree()))?;

    // Residual against the original system through the certified degree.
    let check_to = vres
        .certified_degree
        .min(a.trunc_degree())
        .min(b.trunc_degree());
    let lhs = a.compose(&u.truncate(check_to))?;
    let original_ok = lhs.truncate(check_to) == b.truncate(check_to);

    Ok(NonlinearSolveResult {
        u,
        certified_degree: vres.certified_degree,
        residual_zero: original_ok && vres.residual_zero,
        reduction: record,
        not_in_image_degrees: vres.not_in_image_degrees,
    })
}

fn linear_series(m: &ScalarMatrix, trunc: usize) -> Series {
    let rows: Vec<Vec<crate::scalar::Scalar>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.at(i, j).clone()).collect())
        .collect();
    Series::linear(&rows, m.cols, trunc)
}

/// Solve `Theta(z) u(z) = b(z)` for `u: (C^n,0) -> C^m`.
pub fn solve_linear(
    theta: &SeriesMatrix,
    b: &Series,
    degree: usize,
) -> Result<LinearSolveResult, CoreError> {
    let m = theta.rows;
    if b.num_components() != m {
        return Err(CoreError::DimensionMismatch(
            "right-hand side must have one component per matrix row".into(),
        ));
    }
    let (n_matrix, record) = reduce_linear(theta)?;
    let c_full = record.apply_linear_rhs(b)?;
    let ell0 = record.ell0;
    let w = n_matrix.trunc_degree().min(c_full.trunc_degree());
    let c = c_full.truncate(w);
    let certified = degree.min(w.saturating_sub(ell0));
    let num_vars = theta.num_vars();

    // Homogeneous slices: row j of slice nu is the degree ell0 + nu part.
    let slice = |nu: usize| -> SeriesMatrix {
        let mut entries = Vec::with_capacity(m * m);
        for j in 0..m {
            for col in 0..m {
                entries.push(n_matrix.at(j, col).truncate(w).homogeneous_part(ell0 + nu));
            }
        }
        SeriesMatrix::new(m, m, entries)
    };
    let n0 = slice(0);
    if n0.det().is_zero() {
        return Err(CoreError::SingularSeriesMatrix);
    }
    let row_degrees = vec![ell0; m];

    let mut u = Series::zero(num_vars, m, w);
    let mut events = Vec::new();
    let mut parts: Vec<Series> = Vec::new();
    for ell in 0..=certified {
        let mut rhs_map = c.homogeneous_part(ell0 + ell);
        for (j, qj) in parts.iter().enumerate() {
            let contrib = slice(ell - j).mul_map(qj);
            rhs_map = rhs_map.sub(&contrib.homogeneous_part(ell0 + ell));
        }
        let rhs: Vec<Series> = (0..m).map(|j| rhs_map.component(j)).collect();
        let res = left_inverse_apply(&n0, &row_degrees, &rhs, ell)?;
        if !res.in_image {
            events.push(ell);
        }
        let q_ell = Series::stack(&res.preimage).with_trunc_degree(w);
        u = u.add(&q_ell);
        parts.push(q_ell);
    }
    let u = u.truncate(certified);

    let check_to = certified.min(b.trunc_degree()).min(theta.trunc_degree());
    let lhs = theta.mul_map(&u.with_trunc_degree(check_to));
    let residual_zero = lhs.truncate(check_to) == b.truncate(check_to);

    Ok(LinearSolveResult {
        u,
        certified_degree: certified,
        residual_zero,
        reduction: record,
        not_in_image_degrees: events,
    })
}

/// Solve `Theta(c(z)) u(z) = b(z)` where `c` is a biholomorphic germ:
/// solve the straightened system `Theta w = b o c^{-1}` and compose back,
/// then verify the residual on the original composed system.
pub fn solve_linear_composed(
    theta: &SeriesMatrix,
    c: &Series,
    b: &Series,
    degree: usize,
) -> Result<LinearSolveResult, CoreError> {
    if c.num_vars() != b.num_vars() || c.num_components() != c.num_vars() {
        return Err(CoreError::DimensionMismatch(
            "inner map must be a square germ in the variables of b".into(),
        ));
    }
    let c_inv = invert_map(c)?;
    let b_inner = b.compose(&c_inv)?;
    let inner = solve_linear(theta, &b_inner, degree)?;
    let certified = inner.certified_degree.min(c.trunc_degree());
    let u = inner.u.compose(c)?.truncate(certified);

    let theta_c = theta.compose(c)?;
    let check_to = certified
        .min(b.trunc_degree())
        .min(theta_c.trunc_degree());
    let lhs = theta_c.mul_map(&u.with_trunc_degree(check_to));
    let residual_zero = lhs.truncate(check_to) == b.truncate(check_to);

    Ok(LinearSolveResult {
        u,
        certified_degree: certified,
        residual_zero,
        reduction: inner.reduction,
        not_in_image_degrees: inner.not_in_image_degrees,
    })
}

/// Named entry point for the stacked systems assembled by the Segre
/// propagation step: identical to [`solve_nonlinear`] at dimension
/// `N = (m+1) n`.
pub fn solve_block_system(
    a_big: &Series,
    b_big: &Series,
    lambda_big: &ScalarMatrix,
    degree: usize,
) -> Result<NonlinearSolveResult, CoreError> {
    solve_nonlinear(a_big, b_big, lambda_big, degree)
}
