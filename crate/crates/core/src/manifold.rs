//! Real-analytic generic submanifolds in normal coordinates, their Segre
//! maps, and the nondegeneracy invariants computed from the expansion of
//! the conjugate defining series.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::homog::{generic_rank_with, RankConfig};
use crate::index::MultiIndex;
use crate::linalg::ScalarMatrix;
use crate::scalar::Scalar;
use crate::series::Series;

/// A generic submanifold of codimension `d` and CR dimension `n` through
/// the origin, in normal coordinates: `w = Q(z, conj z, conj w)` with
/// `Q(z, 0, tau) = Q(0, chi, tau) = tau`. The defining series `Q` lives in
/// the variables `(z, chi, tau)` (blocks of sizes n, n, d) and has `d`
/// components, exact through its truncation degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldNormalForm {
    n: usize,
    d: usize,
    q: Series,
}

impl ManifoldNormalForm {
    /// Validates normality and the reality involution
    /// `Q(z, chi, Qbar(chi, z, w)) = w` through the truncation degree.
    pub fn new(n: usize, d: usize, q: Series) -> Result<Self, CoreError> {
        if q.num_vars() != 2 * n + d || q.num_components() != d {
            return Err(CoreError::DimensionMismatch(
                "defining series must have 2n + d variables and d components".into(),
            ));
        }
        let m = ManifoldNormalForm { n, d, q };
        m.check_normality()?;
        m.check_involution()?;
        Ok(m)
    }

    pub fn cr_dim(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.d
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + self.d
    }

    pub fn trunc_degree(&self) -> usize {
        self.q.trunc_degree()
    }

    pub fn q(&self) -> &Series {
        &self.q
    }

    pub fn z_vars(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn chi_vars(&self) -> Vec<usize> {
        (self.n..2 * self.n).collect()
    }

    pub fn tau_vars(&self) -> Vec<usize> {
        (2 * self.n..2 * self.n + self.d).collect()
    }

    /// Evaluate `Q` on series arguments over a common variable space.
    pub fn eval_q(
        &self,
        z_arg: &Series,
        chi_arg: &Series,
        tau_arg: &Series,
    ) -> Result<Series, CoreError> {
        let stacked = Series::stack(&[z_arg.clone(), chi_arg.clone(), tau_arg.clone()]);
        self.q.compose(&stacked)
    }

    /// Evaluate `Qbar(chi, z, w)`: the coefficient-conjugated series with
    /// its first slot receiving the `chi` argument.
    pub fn eval_qbar(
        &self,
        chi_arg: &Series,
        z_arg: &Series,
        w_arg: &Series,
    ) -> Result<Series, CoreError> {
        let stacked = Series::stack(&[chi_arg.clone(), z_arg.clone(), w_arg.clone()]);
        self.q.conjugate().compose(&stacked)
    }

    fn coordinate_block(&self, vars: &[usize], trunc: usize) -> Series {
        Series::stack(
            &vars
                .iter()
                .map(|&v| Series::coordinate(2 * self.n + self.d, v, trunc))
                .collect::<Vec<_>>(),
        )
    }

    fn check_normality(&self) -> Result<(), CoreError> {
        let trunc = self.q.trunc_degree();
        let tau_proj = self.coordinate_block(&self.tau_vars(), trunc);
        if self.q.set_vars_zero(&self.chi_vars()) != tau_proj
            || self.q.set_vars_zero(&self.z_vars()) != tau_proj
        {
            return Err(CoreError::ManifoldInvariant(
                "normality: Q(z,0,tau) = Q(0,chi,tau) = tau".into(),
            ));
        }
        Ok(())
    }

    fn check_involution(&self) -> Result<(), CoreError> {
        // Work in the space (z, chi, w); same block layout as Q itself.
        let trunc = self.q.trunc_degree();
        let z = self.coordinate_block(&self.z_vars(), trunc);
        let chi = self.coordinate_block(&self.chi_vars(), trunc);
        let w = self.coordinate_block(&self.tau_vars(), trunc);
        let inner = self.eval_qbar(&chi, &z, &w)?;
        let outer = self.eval_q(&z, &chi, &inner)?;
        if outer != w {
            return Err(CoreError::ManifoldInvariant(
                "involution: Q(z, chi, Qbar(chi, z, w)) = w".into(),
            ));
        }
        Ok(())
    }

    /// The expansion `Qbar(chi, z, w) = sum_alpha qbar_alpha(z, w) chi^alpha`:
    /// coefficient series keyed by `alpha`, each over the `(z, w)` variables
    /// (n + d of them).
    pub fn qbar_coefficients(&self) -> BTreeMap<MultiIndex, Series> {
        let qbar = self.q.conjugate();
        let first_block: Vec<usize> = (0..self.n).collect();
        let rest: Vec<usize> = (self.n..2 * self.n + self.d).collect();
        qbar.group_by_block(&first_block)
            .into_iter()
            .map(|(alpha, series)| (alpha, series.restrict_vars(&rest)))
            .collect()
    }

    /// The stacked map `z -> (qbar_alpha(z, 0))_{|alpha| <= k}` (when
    /// `at_w0`), or `(z, w) -> (qbar_alpha(z, w))_{|alpha| <= k}`.
    /// Components follow the deterministic alpha order.
    pub fn qbar_map(&self, k: usize, at_w0: bool) -> Series {
        let table = self.qbar_coefficients();
        let trunc = self.q.trunc_degree();
        let w_vars: Vec<usize> = (self.n..self.n + self.d).collect();
        let mut parts = Vec::new();
        for alpha in MultiIndex::up_to_degree(self.n, k) {
            let coeff = table
                .get(&alpha)
                .cloned()
                .unwrap_or_else(|| Series::zero(self.n + self.d, self.d, trunc));
            if at_w0 {
                let z_only: Vec<usize> = (0..self.n).collect();
                parts.push(coeff.set_vars_zero(&w_vars).restrict_vars(&z_only));
            } else {
                parts.push(coeff);
            }
        }
        Series::stack(&parts)
    }

    /// kappa: the smallest `k <= kmax` for which the Segre-variety jet map
    /// attains generic rank n. `None` means not certified within
    /// `(kmax, trunc_degree)`.
    pub fn kappa(&self, kmax: usize, cfg: &RankConfig) -> Option<usize> {
        (1..=kmax).find(|&k| {
            generic_rank_with(&self.qbar_map(k, true), Some(self.n), cfg) == self.n
        })
    }

    /// Finite nondegeneracy: smallest `k` with the same map immersive at the
    /// origin itself (exact rank of the scalar Jacobian at 0).
    pub fn finite_nondegeneracy_order(&self, kmax: usize) -> Option<usize> {
        (1..=kmax).find(|&k| {
            let map = self.qbar_map(k, true);
            ScalarMatrix::from_rows(map.linear_part_matrix()).rank() == self.n
        })
    }

    /// Holomorphic nondegeneracy: smallest `k <= kmax` with
    /// `(z, w) -> (qbar_alpha(z, w))_{|alpha| <= k}` of generic rank `n + d`.
    pub fn holomorphic_nondegeneracy(&self, kmax: usize, cfg: &RankConfig) -> (bool, Option<usize>) {
        let target = self.ambient_dim();
        match (1..=kmax).find(|&k| generic_rank_with(&self.qbar_map(k, false), Some(target), cfg) == target)
        {
            Some(k) => (true, Some(k)),
            None => (false, None),
        }
    }

    /// The Segre map `v^j` as a series in `j` blocks of `n` variables with
    /// `n + d` components: `v^1(t^1) = (t^1, 0)` and
    /// `v^{j+1} = (t^{j+1}, Q(t^{j+1}, conj(v^j)))`.
    pub fn segre_map(&self, j: usize, trunc: usize) -> Result<Series, CoreError> {
        assert!(j >= 1);
        let n = self.n;
        let mut v = Series::stack(&[
            Series::identity(n, trunc),
            Series::zero(n, self.d, trunc),
        ]);
        for step in 2..=j {
            let vars = n * step;
            let prev = v
                .conjugate()
                .embed_vars(vars, &(0..n * (step - 1)).collect::<Vec<_>>());
            let t_new = Series::stack(
                &(n * (step - 1)..vars)
                    .map(|idx| Series::coordinate(vars, idx, trunc))
                    .collect::<Vec<_>>(),
            );
            let chi_part = Series::stack(&(0..n).map(|c| prev.component(c)).collect::<Vec<_>>());
            let tau_part = Series::stack(
                &(n..n + self.d).map(|c| prev.component(c)).collect::<Vec<_>>(),
            );
            let w_part = self.eval_q(&t_new, &chi_part, &tau_part)?;
            v = Series::stack(&[t_new, w_part]);
        }
        Ok(v)
    }

    /// Minimality order: smallest `k1 <= d + 1` with the Segre map `v^{k1}`
    /// of generic rank `n + d` at the given truncation.
    pub fn minimality_order(&self, trunc: usize, cfg: &RankConfig) -> Option<usize> {
        let target = self.ambient_dim();
        (1..=self.d + 1).find(|&k1| {
            self.segre_map(k1, trunc)
                .map(|v| generic_rank_with(&v, Some(target), cfg) == target)
                .unwrap_or(false)
        })
    }

    /// Check whether a truncated germ `H = (f, g)` with `H(0) = 0` and
    /// invertible linear part maps the manifold into itself through degree
    /// `degree`: substitutes `tau = Qbar(chi, z, w)` and tests
    /// `g(z,w) = Q(f(z,w), fbar(chi,tau), gbar(chi,tau))` identically in
    /// `(z, w, chi)`.
    pub fn is_automorphism(&self, h: &Series, degree: usize) -> Result<bool, CoreError> {
        let n = self.n;
        let d = self.d;
        let big_n = n + d;
        if h.num_vars() != big_n || h.num_components() != big_n {
            return Err(CoreError::DimensionMismatch(
                "automorphism candidate must be a self-map of C^{n+d}".into(),
            ));
        }
        if !h.has_zero_constant_term() {
            return Err(CoreError::Precondition("H must fix the origin".into()));
        }
        if ScalarMatrix::from_rows(h.linear_part_matrix()).rank() < big_n {
            return Err(CoreError::SingularLinearPart);
        }
        let check_to = degree
            .min(self.q.trunc_degree())
            .min(h.trunc_degree());

        // Space (z, w, chi): z = 0..n, w = n..n+d, chi = n+d..2n+d.
        let vars = 2 * n + d;
        let coord = |v: usize| Series::coordinate(vars, v, check_to);
        let z = Series::stack(&(0..n).map(coord).collect::<Vec<_>>());
        let w = Series::stack(&(n..n + d).map(coord).collect::<Vec<_>>());
        let chi = Series::stack(&(n + d..2 * n + d).map(coord).collect::<Vec<_>>());
        let tau = self.eval_qbar(&chi, &z, &w)?;
        let zeta = Series::stack(&[chi, tau]);

        let h_here = h
            .truncate(check_to)
            .embed_vars(vars, &(0..big_n).collect::<Vec<_>>());
        let hbar_at_zeta = h.truncate(check_to).conjugate().compose(&zeta)?;

        let f = Series::stack(&(0..n).map(|c| h_here.component(c)).collect::<Vec<_>>());
        let g = Series::stack(&(n..big_n).map(|c| h_here.component(c)).collect::<Vec<_>>());
        let fbar = Series::stack(&(0..n).map(|c| hbar_at_zeta.component(c)).collect::<Vec<_>>());
        let gbar = Series::stack(
            &(n..big_n).map(|c| hbar_at_zeta.component(c)).collect::<Vec<_>>(),
        );
        let rhs = self.eval_q(&f, &fbar, &gbar)?;
        Ok(g.truncate(check_to) == rhs.truncate(check_to))
    }

    /// Necessary-condition screen for essential finiteness: search for a
    /// line through 0 on which every `qbar_alpha(., 0)` with
    /// `1 <= |alpha| <= kmax` vanishes identically. A found line witnesses
    /// non-essential-finiteness up to the truncation; absence of a witness
    /// is inconclusive.
    pub fn essential_finiteness_necessary_check(
        &self,
        kmax: usize,
        cfg: &RankConfig,
    ) -> (bool, Option<Vec<Scalar>>) {
        let n = self.n;
        let trunc = self.q.trunc_degree();
        let table = self.qbar_coefficients();
        let w_vars: Vec<usize> = (n..n + self.d).collect();
        let z_only: Vec<usize> = (0..n).collect();
        let components: Vec<Series> = MultiIndex::up_to_degree(n, kmax)
            .into_iter()
            .filter(|a| a.degree() >= 1)
            .filter_map(|a| table.get(&a).cloned())
            .map(|s| s.set_vars_zero(&w_vars).restrict_vars(&z_only))
            .collect();

        let mut directions: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                    .collect()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
        for _ in 0..2 * n + 3 {
            directions.push((0..n).map(|_| Scalar::from_int(rng.gen_range(1..=7))).collect());
        }

        'dir: for dir in directions {
            for comp in &components {
                let line = Series::linear(
                    &dir.iter().map(|c| vec![c.clone()]).collect::<Vec<_>>(),
                    1,
                    trunc,
                );
                let restricted = comp.compose(&line).expect("line has zero constant term");
                if !restricted.is_zero() {
                    continue 'dir;
                }
            }
            return (false, Some(dir));
        }
        (true, None)
    }
}

/// Build the complex defining series `Q` from a graphed real defining map
/// `phi(z, chi, s)` (blocks n, n, d) with `phi(z,0,s) = phi(0,chi,s) = 0`
/// and the reality symmetry `conj(phi)(chi, z, s) = phi(z, chi, s)`:
/// solves `Q = tau + 2i phi(z, chi, (Q + tau)/2)` by degreewise fixed-point
/// substitution.
pub fn normal_form_from_graph(
    phi: &Series,
    n: usize,
    d: usize,
) -> Result<ManifoldNormalForm, CoreError> {
    if phi.num_vars() != 2 * n + d || phi.num_components() != d {
        return Err(CoreError::DimensionMismatch(
            "graph data must have 2n + d variables and d components".into(),
        ));
    }
    let trunc = phi.trunc_degree();
    let vars = 2 * n + d;
    let z_vars: Vec<usize> = (0..n).collect();
    let chi_vars: Vec<usize> = (n..2 * n).collect();
    if !phi.set_vars_zero(&chi_vars).is_zero() || !phi.set_vars_zero(&z_vars).is_zero() {
        return Err(CoreError::ManifoldInvariant(
            "graph normality: phi(z,0,s) = phi(0,chi,s) = 0".into(),
        ));
    }
    // Reality: conjugating coefficients and swapping z with chi fixes phi.
    let swap: Vec<usize> = (0..vars)
        .map(|v| {
            if v < n {
                v + n
            } else if v < 2 * n {
                v - n
            } else {
                v
            }
        })
        .collect();
    if phi.conjugate().embed_vars(vars, &swap) != *phi {
        return Err(CoreError::ManifoldInvariant(
            "graph reality: conj(phi) with z and chi swapped equals phi".into(),
        ));
    }

    let coord = |v: usize| Series::coordinate(vars, v, trunc);
    let z = Series::stack(&(0..n).map(coord).collect::<Vec<_>>());
    let chi = Series::stack(&(n..2 * n).map(coord).collect::<Vec<_>>());
    let tau = Series::stack(&(2 * n..vars).map(coord).collect::<Vec<_>>());

    let half = Scalar::from_rational(1, 2);
    let two_i = Scalar::new(
        crate::scalar::Rational::from_integer(0.into()),
        crate::scalar::Rational::from_integer(2.into()),
    );
    let mut q = tau.clone();
    for _ in 0..=trunc + 1 {
        let s_arg = q.add(&tau).scale(&half);
        let stacked = Series::stack(&[z.clone(), chi.clone(), s_arg]);
        let next = tau.add(&phi.compose(&stacked)?.scale(&two_i));
        if next == q {
            return ManifoldNormalForm::new(n, d, q);
        }
        q = next;
    }
    Err(CoreError::ManifoldInvariant(
        "fixed-point construction of Q did not stabilize".into(),
    ))
}

/// The invariants of a manifold germ, with the bounds they were certified
/// under. Every `None` is a "not found up to (kmax, degree)" verdict, never
/// a negative theorem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantReport {
    pub kappa: Option<usize>,
    pub finite_nondeg_order: Option<usize>,
    pub holo_nondeg: bool,
    pub holo_nondeg_order: Option<usize>,
    pub minimality_k1: Option<usize>,
    /// `(d + 1) * kappa` when kappa was found.
    pub ell_p: Option<usize>,
    pub class_c: bool,
    pub essential_finiteness_inconclusive: bool,
    pub non_essential_finiteness_witness_line: Option<Vec<Scalar>>,
    pub kmax: usize,
    pub degree: usize,
    pub seed: u64,
}

pub fn analyze(m: &ManifoldNormalForm, kmax: usize, cfg: &RankConfig) -> InvariantReport {
    let kappa = m.kappa(kmax, cfg);
    let finite_nondeg_order = m.finite_nondegeneracy_order(kmax);
    let (holo_nondeg, holo_nondeg_order) = m.holomorphic_nondegeneracy(kmax, cfg);
    let minimality_k1 = m.minimality_order(m.trunc_degree(), cfg);
    let (ess_pass, witness) = m.essential_finiteness_necessary_check(kmax, cfg);
    InvariantReport {
        kappa,
        finite_nondeg_order,
        holo_nondeg,
        holo_nondeg_order,
        minimality_k1,
        ell_p: kappa.map(|k| (m.codim() + 1) * k),
        class_c: kappa.is_some(),
        essential_finiteness_inconclusive: ess_pass,
        non_essential_finiteness_witness_line: witness,
        kmax,
        degree: m.trunc_degree(),
        seed: cfg.seed,
    }
}
