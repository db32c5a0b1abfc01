//! Multi-indices with the global (degree, lexicographic) monomial order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial. The total order is by degree first,
/// then lexicographic on the exponents, so iteration over a sorted map
/// of indices is deterministic and degree-graded.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(num_vars: usize) -> Self {
        MultiIndex(vec![0; num_vars])
    }

    /// The index of the single variable `var` (degree one).
    pub fn unit(num_vars: usize, var: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[var] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(MultiIndex(out))
    }

    /// `alpha!` as a big integer product of factorials.
    pub fn factorial(&self) -> num_bigint::BigInt {
        let mut acc = num_bigint::BigInt::from(1);
        for &e in &self.0 {
            for k in 2..=e as u64 {
                acc *= k;
            }
        }
        acc
    }

    /// All indices in `num_vars` variables of exact degree `d`, in lexicographic order.
    pub fn of_degree(num_vars: usize, d: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; num_vars];
        fill(&mut out, &mut cur, 0, d);
        out
    }

    /// All indices of degree at most `d`, in the global (degree, lex) order.
    pub fn up_to_degree(num_vars: usize, d: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for k in 0..=d {
            out.extend(Self::of_degree(num_vars, k));
        }
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, rem: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = rem as u32;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    // Descending first coordinate gives lexicographic-descending... we want
    // ascending lex order on the exponent vector, so iterate e from high to low?
    // Vec<u32> lex order: (2,0) > (1,1) > (0,2). The global order sorts ascending,
    // so emit in ascending lex: smallest first coordinate first.
    for e in 0..=rem as u32 {
        cur[pos] = e;
        fill(out, cur, pos + 1, rem - e as usize);
    }
    cur[pos] = 0;
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// dim of the space of homogeneous polynomials of degree `d` in `n` variables.
pub fn homog_dim(n: usize, d: usize) -> usize {
    // binom(d + n - 1, n - 1)
    if n == 0 {
        return if d == 0 { 1 } else { 0 };
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for k in 1..n {
        num *= (d + k) as u128;
        den *= k as u128;
    }
    (num / den) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_degree_then_lex() {
        let a = MultiIndex(vec![0, 2]);
        let b = MultiIndex(vec![1, 0]);
        let c = MultiIndex(vec![1, 1]);
        assert!(b < a); // degree 1 < degree 2
        assert!(a < c.add(&b)); // (0,2) < (2,1)
        assert!(MultiIndex(vec![0, 2]) < MultiIndex(vec![1, 1]));
    }

    #[test]
    fn enumeration_matches_dimension() {
        for n in 1..=4 {
            for d in 0..=6 {
                assert_eq!(MultiIndex::of_degree(n, d).len(), homog_dim(n, d));
            }
        }
        let all = MultiIndex::of_degree(2, 2);
        assert_eq!(
            all,
            vec![
                MultiIndex(vec![0, 2]),
                MultiIndex(vec![1, 1]),
                MultiIndex(vec![2, 0])
            ]
        );
    }

    #[test]
    fn up_to_degree_is_sorted() {
        let all = MultiIndex::up_to_degree(3, 4);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }
}
