//! Finite jets: order-k Taylor data of a map at the origin.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::linalg::ScalarMatrix;
use crate::series::Series;

/// A jet is identified with its Taylor polynomial; extraction from a series
/// of truncation degree >= k is lossless.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Jet {
    order: usize,
    poly: Series,
}

impl Jet {
    /// Extract the order-`k` jet of a series (requires `trunc_degree >= k`).
    pub fn from_series(s: &Series, order: usize) -> Self {
        assert!(
            s.trunc_degree() >= order,
            "series truncation degree below the requested jet order"
        );
        Jet {
            order,
            poly: s.truncate(order),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_vars(&self) -> usize {
        self.poly.num_vars()
    }

    pub fn num_components(&self) -> usize {
        self.poly.num_components()
    }

    /// The jet as a polynomial, reinterpreted as exact through `trunc`.
    /// Coefficients above the jet order are zero by construction; callers
    /// own the accounting of which output degrees remain certified.
    pub fn extend(&self, trunc: usize) -> Series {
        self.poly.with_trunc_degree(trunc)
    }

    pub fn polynomial(&self) -> &Series {
        &self.poly
    }

    pub fn conjugate(&self) -> Jet {
        Jet {
            order: self.order,
            poly: self.poly.conjugate(),
        }
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.poly.has_zero_constant_term()
    }
}

/// The unique linear action on order-`k` jets realizing composition with an
/// invertible linear map: `jet_pushforward(N, k, j) = jet(extend(j) o N, k)`.
pub fn jet_pushforward(n_linear: &Series, k: usize, j: &Jet) -> Result<Jet, CoreError> {
    if n_linear.num_components() != j.num_vars() {
        return Err(CoreError::DimensionMismatch(
            "jet_pushforward: linear map does not match jet variables".into(),
        ));
    }
    if n_linear.order().map_or(false, |o| o < 1) || n_linear.terms().any(|(idx, _)| idx.degree() > 1)
    {
        return Err(CoreError::Precondition(
            "jet_pushforward: map must be linear".into(),
        ));
    }
    let mat = ScalarMatrix::from_rows(n_linear.linear_part_matrix());
    if mat.rank() < n_linear.num_components() {
        return Err(CoreError::SingularLinearPart);
    }
    let composed = j.extend(k).compose(&n_linear.with_trunc_degree(k))?;
    Ok(Jet::from_series(&composed, k))
}
