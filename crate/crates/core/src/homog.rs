//! Linear algebra on spaces of homogeneous polynomials: generic-rank tests,
//! left inverses to multiplication operators, and annihilating polynomials.

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::index::{homog_dim, MultiIndex};
use crate::linalg::ScalarMatrix;
use crate::maps::SeriesMatrix;
use crate::scalar::Scalar;
use crate::series::Series;

/// The space of homogeneous polynomials of one degree, with its ordered
/// monomial basis (the global (degree, lex) order).
#[derive(Clone, Debug)]
pub struct HomogSpace {
    pub num_vars: usize,
    pub degree: usize,
    pub basis: Vec<MultiIndex>,
}

impl HomogSpace {
    pub fn new(num_vars: usize, degree: usize) -> Self {
        let basis = MultiIndex::of_degree(num_vars, degree);
        debug_assert_eq!(basis.len(), homog_dim(num_vars, degree));
        HomogSpace {
            num_vars,
            degree,
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficient vector of a scalar-valued homogeneous polynomial.
    pub fn to_vector(&self, p: &Series) -> Vec<Scalar> {
        self.basis.iter().map(|idx| p.coeff_component(idx, 0)).collect()
    }

    pub fn from_vector(&self, v: &[Scalar], trunc: usize) -> Series {
        let mut out = Series::zero(self.num_vars, 1, trunc);
        for (idx, c) in self.basis.iter().zip(v) {
            out.set_coeff(idx.clone(), vec![c.clone()]);
        }
        out
    }
}

/// Configuration of the probabilistic generic-rank test. The sampling
/// sequence is fully determined by the seed, so reports are reproducible.
#[derive(Clone, Debug)]
pub struct RankConfig {
    pub seed: u64,
    pub samples: usize,
    pub threads: usize,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            seed: 0,
            samples: 3,
            threads: 1,
        }
    }
}

fn sample_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n)
        .map(|_| Scalar::from_int(rng.gen_range(1..=9999)))
        .collect()
}

/// Jacobian of a series map as a matrix of series (rows = components,
/// columns = variables). Entries are exact through `trunc - 1`.
pub fn jacobian(f: &Series) -> SeriesMatrix {
    let m = f.num_components();
    let n = f.num_vars();
    let mut entries = Vec::with_capacity(m * n);
    for i in 0..m {
        let fi = f.component(i);
        for j in 0..n {
            entries.push(fi.derivative(j));
        }
    }
    SeriesMatrix::new(m, n, entries)
}

/// Rank of the Jacobian of `f` at sampled points, maximized over samples.
/// This can only underestimate the generic rank of the truncation, and with
/// the deterministic sampling policy the failure probability is negligible.
/// When `expected` is supplied, a confirmation sample is added on success and
/// exact symbolic minors are tried as a fallback for small dimensions.
pub fn generic_rank(f: &Series, expected: Option<usize>) -> usize {
    generic_rank_with(f, expected, &RankConfig::default())
}

pub fn generic_rank_with(f: &Series, expected: Option<usize>, cfg: &RankConfig) -> usize {
    let jac = jacobian(f);
    let n = f.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Vec<Scalar>> = (0..cfg.samples).map(|_| sample_point(&mut rng, n)).collect();

    let rank_at = |pt: &Vec<Scalar>| -> usize {
        let mut rows = Vec::with_capacity(jac.rows);
        for i in 0..jac.rows {
            let mut row = Vec::with_capacity(jac.cols);
            for j in 0..jac.cols {
                row.push(
                    jac.at(i, j)
                        .eval(pt)
                        .into_iter()
                        .next()
                        .unwrap_or_else(Scalar::zero),
                );
            }
            rows.push(row);
        }
        ScalarMatrix::from_rows(rows).rank()
    };

    let mut best = if cfg.threads > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = points.iter().map(|pt| scope.spawn(|| rank_at(pt))).collect();
            handles.into_iter().map(|h| h.join().unwrap()).max().unwrap_or(0)
        })
    } else {
        points.iter().map(&rank_at).max().unwrap_or(0)
    };

    if let Some(target) = expected {
        if best == target {
            // One confirmation sample.
            let pt = sample_point(&mut rng, n);
            best = best.max(rank_at(&pt));
        } else if best < target && f.num_vars() + f.num_components() <= 6 {
            best = best.max(generic_rank_symbolic(f));
        }
    }
    best
}

/// Exact generic rank of the truncation via symbolic minors of the Jacobian.
/// Exponential in the dimensions; intended as a fallback for small maps.
pub fn generic_rank_symbolic(f: &Series) -> usize {
    let jac = jacobian(f);
    let max_r = jac.rows.min(jac.cols);
    for r in (1..=max_r).rev() {
        for rows in subsets(jac.rows, r) {
            for cols in subsets(jac.cols, r) {
                let mut entries = Vec::with_capacity(r * r);
                for &i in &rows {
                    for &j in &cols {
                        entries.push(jac.at(i, j).clone());
                    }
                }
                let minor = SeriesMatrix::new(r, r, entries);
                if !minor.det().is_zero() {
                    return r;
                }
            }
        }
    }
    0
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Outcome of applying the left inverse of multiplication by `M`.
#[derive(Clone, Debug)]
pub struct LeftInverseResult {
    /// The recovered tuple in P_d^m (exact preimage when `in_image`).
    pub preimage: Vec<Series>,
    /// Whether `s` lies in the image of multiplication by `M`.
    pub in_image: bool,
}

/// Left inverse to matrix multiplication by `M` on homogeneous tuples.
///
/// `M` is an `m x m` matrix of series whose row `j` consists of homogeneous
/// polynomials of degree `row_degrees[j]`; `s` is a tuple with `s[j]`
/// homogeneous of degree `row_degrees[j] + d`. If `s = M p` for some
/// `p in P_d^m`, that `p` is returned exactly (multiplication by a matrix
/// with nonvanishing determinant is injective, so it is unique). Otherwise
/// the exact solution of the normal equations `M* M p = M* s` is returned
/// with `in_image = false`.
pub fn left_inverse_apply(
    m_matrix: &SeriesMatrix,
    row_degrees: &[usize],
    s: &[Series],
    d: usize,
) -> Result<LeftInverseResult, CoreError> {
    let m = m_matrix.rows;
    assert_eq!(m_matrix.cols, m, "M must be square");
    assert_eq!(row_degrees.len(), m);
    assert_eq!(s.len(), m);
    let n = m_matrix.num_vars();
    let source = HomogSpace::new(n, d);
    let src_dim = source.dim();
    let targets: Vec<HomogSpace> = row_degrees
        .iter()
        .map(|&k| HomogSpace::new(n, k + d))
        .collect();

    // Coefficient matrix of p -> M p: rows indexed by (output row j, monomial
    // of degree row_degrees[j] + d), columns by (component l, monomial of
    // degree d).
    let total_rows: usize = targets.iter().map(|t| t.dim()).sum();
    let total_cols = m * src_dim;
    let mut a = ScalarMatrix::zero(total_rows, total_cols);
    let mut b = vec![Scalar::zero(); total_rows];
    let mut row_offset = 0;
    for j in 0..m {
        let tgt = &targets[j];
        for (r, mu) in tgt.basis.iter().enumerate() {
            b[row_offset + r] = s[j].coeff_component(mu, 0);
            for l in 0..m {
                let entry = m_matrix.at(j, l);
                if entry.is_zero() {
                    continue;
                }
                for (c, nu) in source.basis.iter().enumerate() {
                    if let Some(diff) = mu.checked_sub(nu) {
                        let coeff = entry.coeff_component(&diff, 0);
                        if !coeff.is_zero() {
                            *a.at_mut(row_offset + r, l * src_dim + c) = coeff;
                        }
                    }
                }
            }
        }
        row_offset += tgt.dim();
    }

    let (x, consistent) = a.solve(&b);
    let coeffs = if consistent {
        x
    } else {
        // Projected candidate via the normal equations.
        let at = a.conj_transpose();
        let ata = at.matmul(&a);
        let atb = at.mul_vec(&b);
        let (y, ok) = ata.solve(&atb);
        if !ok {
            return Err(CoreError::SingularSeriesMatrix);
        }
        y
    };
    let trunc = m_matrix.trunc_degree().max(d);
    let preimage: Vec<Series> = (0..m)
        .map(|l| source.from_vector(&coeffs[l * src_dim..(l + 1) * src_dim], trunc))
        .collect();
    Ok(LeftInverseResult {
        preimage,
        in_image: consistent,
    })
}

/// A weighted-homogeneous polynomial relation among homogeneous polynomials.
#[derive(Clone, Debug)]
pub struct AnnihilatingPolynomial {
    /// Polynomial in m abstract variables x_1..x_m (one component).
    pub poly: Series,
    /// Weighted degree of the relation.
    pub weighted_degree: usize,
    /// Smallest variable index with nonvanishing partial derivative.
    pub pivot_var: usize,
}

/// Search for the nonzero weighted-homogeneous polynomial `p` of lowest
/// weighted degree with `p(F_1, ..., F_m) = 0`, where `F_j` is homogeneous
/// of degree `weights[j]`. Dependence over a field of characteristic zero is
/// equivalent to the vanishing of the Jacobian determinant, which is checked
/// first: if the determinant does not vanish identically there is no
/// relation and `None` is returned without scanning.
pub fn annihilating_polynomial(
    f: &[Series],
    weights: &[usize],
    bound: Option<usize>,
) -> Result<Option<AnnihilatingPolynomial>, CoreError> {
    let m = f.len();
    assert_eq!(weights.len(), m);
    let n = f[0].num_vars();

    if m == n {
        // Characteristic-zero dependence criterion.
        let mut entries = Vec::with_capacity(m * n);
        for fi in f {
            for j in 0..n {
                entries.push(fi.derivative(j));
            }
        }
        let jac = SeriesMatrix::new(m, n, entries);
        if !jac.det().is_zero() {
            return Ok(None);
        }
    }

    let bound = bound.unwrap_or_else(|| 2 * weights.iter().sum::<usize>());
    let min_w = *weights.iter().min().unwrap();
    for wd in min_w..=bound {
        if let Some(p) = relation_at_weighted_degree(f, weights, wd)? {
            let pivot_var = (0..m)
                .find(|&j| !p.derivative(j).is_zero())
                .expect("nonzero polynomial has a nonzero partial");
            return Ok(Some(AnnihilatingPolynomial {
                poly: p,
                weighted_degree: wd,
                pivot_var,
            }));
        }
    }
    Err(CoreError::ScanBoundExceeded { bound })
}

/// Monomials x^alpha with `sum alpha_j w_j = wd`, in the global order.
fn weighted_monomials(m: usize, weights: &[usize], wd: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; m];
    fn go(
        pos: usize,
        rem: usize,
        weights: &[usize],
        cur: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
    ) {
        if pos == cur.len() {
            if rem == 0 {
                out.push(MultiIndex(cur.clone()));
            }
            return;
        }
        let w = weights[pos];
        let max = if w == 0 { 0 } else { rem / w };
        for e in 0..=max as u32 {
            cur[pos] = e;
            go(pos + 1, rem - e as usize * w, weights, cur, out);
        }
        cur[pos] = 0;
    }
    go(0, wd, weights, &mut cur, &mut out);
    out.sort();
    out
}

fn relation_at_weighted_degree(
    f: &[Series],
    weights: &[usize],
    wd: usize,
) -> Result<Option<Series>, CoreError> {
    let m = f.len();
    let n = f[0].num_vars();
    let monos = weighted_monomials(m, weights, wd);
    if monos.is_empty() {
        return Ok(None);
    }
    let target = HomogSpace::new(n, wd);

    // Column for x^alpha: coefficients of F^alpha.
    let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(monos.len());
    for alpha in &monos {
        let mut prod = Series::constant(vec![Scalar::one()], n, wd);
        for (j, &e) in alpha.0.iter().enumerate() {
            for _ in 0..e {
                prod = prod.mul(&f[j].with_trunc_degree(wd));
            }
        }
        cols.push(target.to_vector(&prod));
    }
    let mut a = ScalarMatrix::zero(target.dim(), monos.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            *a.at_mut(r, c) = v.clone();
        }
    }
    let kernel = a.kernel_basis();
    let Some(first) = kernel.into_iter().next() else {
        return Ok(None);
    };
    // Normalize the first nonzero coordinate to one.
    let lead = first
        .iter()
        .find(|c| !c.is_zero())
        .expect("kernel vector is nonzero")
        .clone();
    let inv = lead.inverse()?;
    let mut p = Series::zero(m, 1, wd);
    for (alpha, c) in monos.iter().zip(&first) {
        if !c.is_zero() {
            p.set_coeff(alpha.clone(), vec![c * &inv]);
        }
    }
    Ok(Some(p))
}

/// `q! / (k_1! ... k_m!)` as an exact rational (always an integer value).
pub fn multinomial(q: usize, ks: &[usize]) -> BigRational {
    let mut num = crate::faa::factorial(q);
    for &k in ks {
        num /= crate::faa::factorial(k);
    }
    BigRational::from_integer(num)
}
