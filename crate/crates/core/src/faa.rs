//! Univariate composition coefficients by the combinatorial formula
//! `a_r = sum q! b_q / (k_1! ... k_r!) c_1^{k_1} ... c_r^{k_r}`,
//! the sum running over k_1 + 2 k_2 + ... + r k_r = r with q = sum k_j.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::scalar::Scalar;

/// Coefficient `a_r` of `g(h(t))` where `g(x) = sum b_q x^q` and
/// `h(t) = sum c_s t^s` with `c_0 = 0`. Lists are indexed by degree,
/// missing tails are treated as zero.
pub fn faa_di_bruno(g_coeffs: &[Scalar], h_coeffs: &[Scalar], r: usize) -> Scalar {
    assert!(r >= 1);
    assert!(
        h_coeffs.first().map_or(true, Scalar::is_zero),
        "inner series must have zero constant term"
    );
    let mut acc = Scalar::zero();
    let mut k = vec![0usize; r + 1];
    enumerate(&mut k, 1, r, &mut |k| {
        let q: usize = k[1..].iter().sum();
        let b_q = match g_coeffs.get(q) {
            Some(b) => b.clone(),
            None => return,
        };
        if b_q.is_zero() {
            return;
        }
        let mut term = b_q;
        // q! / (k_1! ... k_r!)
        let mut count = factorial(q);
        for &kj in &k[1..] {
            count /= factorial(kj);
        }
        term = &term * &Scalar::from_real(BigRational::from_integer(count));
        for (j, &kj) in k.iter().enumerate().skip(1) {
            if kj == 0 {
                continue;
            }
            let c_j = match h_coeffs.get(j) {
                Some(c) => c.clone(),
                None => Scalar::zero(),
            };
            if c_j.is_zero() {
                return;
            }
            term = &term * &c_j.pow(kj as u32);
        }
        acc += &term;
    });
    acc
}

/// Visit all (k_1, ..., k_r) >= 0 with sum j*k_j = r.
fn enumerate(k: &mut Vec<usize>, j: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
    if remaining == 0 {
        for e in k[j..].iter_mut() {
            *e = 0;
        }
        f(k);
        return;
    }
    if j > remaining {
        return;
    }
    for kj in 0..=remaining / j {
        k[j] = kj;
        enumerate(k, j + 1, remaining - j * kj, f);
    }
    k[j] = 0;
}

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 2..=n as u64 {
        acc *= i;
    }
    acc
}

/// Visit all (k_1, ..., k_m) >= 0 with sum j*k_j = `weighted` and
/// sum k_j = `total`. Used by the exact composition bounds.
pub fn enumerate_weighted(
    m: usize,
    weighted: usize,
    total: usize,
    f: &mut impl FnMut(&[usize]),
) {
    let mut k = vec![0usize; m + 1];
    fn go(
        k: &mut Vec<usize>,
        j: usize,
        m: usize,
        weighted: usize,
        total: usize,
        f: &mut impl FnMut(&[usize]),
    ) {
        if j > m {
            if weighted == 0 && total == 0 {
                f(&k[1..]);
            }
            return;
        }
        let max = (weighted / j).min(total);
        for kj in 0..=max {
            k[j] = kj;
            go(k, j + 1, m, weighted - j * kj, total - kj, f);
        }
        k[j] = 0;
    }
    go(&mut k, 1, m, weighted, total, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Series;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn identity_outer_function_returns_inner_coefficient() {
        // g = x  =>  a_r = c_r
        let g = vec![Scalar::zero(), Scalar::one()];
        let h = vec![Scalar::zero(), s(3), s(-5), s(7)];
        for r in 1..=3 {
            assert_eq!(faa_di_bruno(&g, &h, r), h[r]);
        }
    }

    #[test]
    fn square_of_t_plus_t_squared() {
        // g = x^2, h = t + t^2: (t + t^2)^2 = t^2 + 2 t^3 + t^4
        let g = vec![Scalar::zero(), Scalar::zero(), Scalar::one()];
        let h = vec![Scalar::zero(), Scalar::one(), Scalar::one()];
        assert_eq!(faa_di_bruno(&g, &h, 2), s(1));
        assert_eq!(faa_di_bruno(&g, &h, 3), s(2));
        assert_eq!(faa_di_bruno(&g, &h, 4), s(1));
        assert_eq!(faa_di_bruno(&g, &h, 5), s(0));
    }

    #[test]
    fn matches_series_composition() {
        // Random-ish fixed degree-6 univariate pair, checked against compose.
        let g_c = [s(2), s(-1), s(3), s(0), s(5), s(-2), s(1)];
        let h_c = [s(0), s(4), s(-3), s(2), s(1), s(-1), s(2)];
        let d = 12usize;
        let mut g = Series::zero(1, 1, d);
        for (j, c) in g_c.iter().enumerate() {
            g.set_coeff(crate::index::MultiIndex(vec![j as u32]), vec![c.clone()]);
        }
        let mut h = Series::zero(1, 1, d);
        for (j, c) in h_c.iter().enumerate() {
            h.set_coeff(crate::index::MultiIndex(vec![j as u32]), vec![c.clone()]);
        }
        let comp = g.compose(&h).unwrap();
        for r in 1..=d {
            let direct = faa_di_bruno(&g_c, &h_c, r);
            let from_compose =
                comp.coeff_component(&crate::index::MultiIndex(vec![r as u32]), 0);
            assert_eq!(direct, from_compose, "degree {}", r);
        }
    }
}
