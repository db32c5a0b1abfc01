//! Truncated multivariate formal power series with exact coefficients.
//!
//! A `Series` is a map `(C^n, 0) -> C^m` known exactly through total degree
//! `trunc_degree`. Every operation documents the degree through which its
//! output is exact; nothing is ever rounded.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::CoreError;
use crate::index::MultiIndex;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    num_vars: usize,
    num_components: usize,
    trunc_degree: usize,
    /// Sparse table: index -> coefficient vector (length `num_components`).
    /// All-zero vectors are never stored; stored degrees never exceed
    /// `trunc_degree`.
    coeffs: BTreeMap<MultiIndex, Vec<Scalar>>,
}

impl Series {
    pub fn zero(num_vars: usize, num_components: usize, trunc_degree: usize) -> Self {
        Series {
            num_vars,
            num_components,
            trunc_degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(values: Vec<Scalar>, num_vars: usize, trunc_degree: usize) -> Self {
        let mut s = Series::zero(num_vars, values.len(), trunc_degree);
        s.set_coeff(MultiIndex::zero(num_vars), values);
        s
    }

    /// The coordinate function `x_var` as a scalar-valued series.
    pub fn coordinate(num_vars: usize, var: usize, trunc_degree: usize) -> Self {
        let mut s = Series::zero(num_vars, 1, trunc_degree);
        s.set_coeff(MultiIndex::unit(num_vars, var), vec![Scalar::one()]);
        s
    }

    /// The identity map `C^n -> C^n`.
    pub fn identity(num_vars: usize, trunc_degree: usize) -> Self {
        let mut s = Series::zero(num_vars, num_vars, trunc_degree);
        for v in 0..num_vars {
            let mut coeff = vec![Scalar::zero(); num_vars];
            coeff[v] = Scalar::one();
            s.set_coeff(MultiIndex::unit(num_vars, v), coeff);
        }
        s
    }

    /// The linear map given by an `m x n` scalar matrix (rows = components).
    pub fn linear(matrix: &[Vec<Scalar>], num_vars: usize, trunc_degree: usize) -> Self {
        let m = matrix.len();
        let mut s = Series::zero(num_vars, m, trunc_degree);
        for v in 0..num_vars {
            let coeff: Vec<Scalar> = matrix.iter().map(|row| row[v].clone()).collect();
            s.set_coeff(MultiIndex::unit(num_vars, v), coeff);
        }
        s
    }

    pub fn from_terms(
        num_vars: usize,
        num_components: usize,
        trunc_degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Vec<Scalar>)>,
    ) -> Self {
        let mut s = Series::zero(num_vars, num_components, trunc_degree);
        for (idx, c) in terms {
            s.add_to_coeff(&idx, &c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_components(&self) -> usize {
        self.num_components
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Vec<Scalar>)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Vec<Scalar> {
        match self.coeffs.get(idx) {
            Some(v) => v.clone(),
            None => vec![Scalar::zero(); self.num_components],
        }
    }

    pub fn coeff_component(&self, idx: &MultiIndex, comp: usize) -> Scalar {
        match self.coeffs.get(idx) {
            Some(v) => v[comp].clone(),
            None => Scalar::zero(),
        }
    }

    pub fn set_coeff(&mut self, idx: MultiIndex, value: Vec<Scalar>) {
        assert_eq!(idx.len(), self.num_vars);
        assert_eq!(value.len(), self.num_components);
        if idx.degree() > self.trunc_degree || value.iter().all(Scalar::is_zero) {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, value);
        }
    }

    pub fn add_to_coeff(&mut self, idx: &MultiIndex, value: &[Scalar]) {
        if idx.degree() > self.trunc_degree {
            return;
        }
        let entry = self
            .coeffs
            .entry(idx.clone())
            .or_insert_with(|| vec![Scalar::zero(); self.num_components]);
        for (e, v) in entry.iter_mut().zip(value) {
            *e += v;
        }
        if entry.iter().all(Scalar::is_zero) {
            self.coeffs.remove(idx);
        }
    }

    pub fn constant_term(&self) -> Vec<Scalar> {
        self.coeff(&MultiIndex::zero(self.num_vars))
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.constant_term().iter().all(Scalar::is_zero)
    }

    /// Order of vanishing of component `comp`; `None` if the component is
    /// identically zero through the truncation degree.
    pub fn vanishing_order(&self, comp: usize) -> Option<usize> {
        self.coeffs
            .iter()
            .filter(|(_, v)| !v[comp].is_zero())
            .map(|(idx, _)| idx.degree())
            .min()
    }

    /// Minimal vanishing order over all components.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.keys().map(|idx| idx.degree()).min()
    }

    pub fn component(&self, comp: usize) -> Series {
        let mut out = Series::zero(self.num_vars, 1, self.trunc_degree);
        for (idx, v) in &self.coeffs {
            if !v[comp].is_zero() {
                out.coeffs.insert(idx.clone(), vec![v[comp].clone()]);
            }
        }
        out
    }

    /// Stack scalar- or vector-valued series into one vector-valued series.
    /// Truncation degree of the result is the minimum of the parts.
    pub fn stack(parts: &[Series]) -> Series {
        assert!(!parts.is_empty());
        let num_vars = parts[0].num_vars;
        let trunc = parts.iter().map(|p| p.trunc_degree).min().unwrap();
        let m: usize = parts.iter().map(|p| p.num_components).sum();
        let mut out = Series::zero(num_vars, m, trunc);
        let mut offset = 0;
        for p in parts {
            assert_eq!(p.num_vars, num_vars, "stack: variable count mismatch");
            for (idx, v) in &p.coeffs {
                if idx.degree() > trunc {
                    continue;
                }
                let entry = out
                    .coeffs
                    .entry(idx.clone())
                    .or_insert_with(|| vec![Scalar::zero(); m]);
                for (j, s) in v.iter().enumerate() {
                    entry[offset + j] = s.clone();
                }
            }
            offset += p.num_components;
        }
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        self.coeffs.retain(|idx, v| {
            idx.degree() <= self.trunc_degree && !v.iter().all(Scalar::is_zero)
        });
    }

    /// Exact through `min(self, other)` truncation degrees.
    pub fn add(&self, other: &Series) -> Series {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Series, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Series {
        assert_eq!(self.num_vars, other.num_vars, "variable count mismatch");
        assert_eq!(
            self.num_components, other.num_components,
            "component count mismatch"
        );
        let trunc = self.trunc_degree.min(other.trunc_degree);
        let mut out = Series::zero(self.num_vars, self.num_components, trunc);
        let zero = vec![Scalar::zero(); self.num_components];
        let mut keys: Vec<&MultiIndex> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        for idx in keys {
            if idx.degree() > trunc {
                continue;
            }
            let a = self.coeffs.get(idx).unwrap_or(&zero);
            let b = other.coeffs.get(idx).unwrap_or(&zero);
            let v: Vec<Scalar> = a.iter().zip(b).map(|(x, y)| f(x, y)).collect();
            if !v.iter().all(Scalar::is_zero) {
                out.coeffs.insert(idx.clone(), v);
            }
        }
        out
    }

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for s in v.iter_mut() {
                *s = -s.clone();
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        if c.is_zero() {
            return Series::zero(self.num_vars, self.num_components, self.trunc_degree);
        }
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for s in v.iter_mut() {
                *s = &*s * c;
            }
        }
        out.normalize();
        out
    }

    /// Product. One factor must be scalar-valued (it multiplies every
    /// component of the other); use [`Series::mul_componentwise`] for the
    /// declared componentwise contract. Exact through the minimum truncation.
    pub fn mul(&self, other: &Series) -> Series {
        assert_eq!(self.num_vars, other.num_vars, "variable count mismatch");
        if other.num_components == 1 {
            self.mul_by_scalar_series(other)
        } else if self.num_components == 1 {
            other.mul_by_scalar_series(self)
        } else {
            panic!("mul requires a scalar-valued factor; use mul_componentwise")
        }
    }

    fn mul_by_scalar_series(&self, g: &Series) -> Series {
        let trunc = self.trunc_degree.min(g.trunc_degree);
        let mut out = Series::zero(self.num_vars, self.num_components, trunc);
        for (ia, va) in &self.coeffs {
            let da = ia.degree();
            if da > trunc {
                continue;
            }
            for (ib, vb) in &g.coeffs {
                if da + ib.degree() > trunc {
                    break; // BTreeMap iterates in degree-graded order
                }
                let idx = ia.add(ib);
                let b = &vb[0];
                let prod: Vec<Scalar> = va.iter().map(|a| a * b).collect();
                out.add_to_coeff(&idx, &prod);
            }
        }
        out
    }

    /// Componentwise (Hadamard) product of two maps with equal component
    /// counts. This is the caller-declared componentwise contract.
    pub fn mul_componentwise(&self, other: &Series) -> Series {
        assert_eq!(self.num_vars, other.num_vars);
        assert_eq!(self.num_components, other.num_components);
        let trunc = self.trunc_degree.min(other.trunc_degree);
        let mut out = Series::zero(self.num_vars, self.num_components, trunc);
        for (ia, va) in &self.coeffs {
            let da = ia.degree();
            if da > trunc {
                continue;
            }
            for (ib, vb) in &other.coeffs {
                if da + ib.degree() > trunc {
                    break;
                }
                let idx = ia.add(ib);
                let prod: Vec<Scalar> = va.iter().zip(vb).map(|(a, b)| a * b).collect();
                out.add_to_coeff(&idx, &prod);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Series {
        assert_eq!(self.num_components, 1, "pow is for scalar-valued series");
        let mut acc = Series::constant(vec![Scalar::one()], self.num_vars, self.trunc_degree);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Restrict the truncation degree (dropping higher stored terms).
    pub fn truncate(&self, new_trunc: usize) -> Series {
        let mut out = self.clone();
        out.trunc_degree = new_trunc.min(out.trunc_degree);
        out.normalize();
        out
    }

    /// Reinterpret with a higher truncation degree. Only valid when the
    /// caller knows the series is exact beyond its recorded truncation
    /// (e.g. a polynomial).
    pub fn with_trunc_degree(&self, new_trunc: usize) -> Series {
        let mut out = self.clone();
        out.trunc_degree = new_trunc;
        out.normalize();
        out
    }

    /// The homogeneous part of degree `ell` (still carries the original
    /// truncation degree so it can participate in further arithmetic).
    pub fn homogeneous_part(&self, ell: usize) -> Series {
        assert!(ell <= self.trunc_degree, "degree exceeds truncation");
        let mut out = Series::zero(self.num_vars, self.num_components, self.trunc_degree);
        for (idx, v) in &self.coeffs {
            if idx.degree() == ell {
                out.coeffs.insert(idx.clone(), v.clone());
            }
        }
        out
    }

    /// Parts of degree <= ell.
    pub fn lower_part(&self, ell: usize) -> Series {
        let mut out = Series::zero(self.num_vars, self.num_components, self.trunc_degree);
        for (idx, v) in &self.coeffs {
            if idx.degree() <= ell {
                out.coeffs.insert(idx.clone(), v.clone());
            }
        }
        out
    }

    /// Coefficientwise complex conjugation (the bar operator on germs).
    pub fn conjugate(&self) -> Series {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for s in v.iter_mut() {
                *s = s.conj();
            }
        }
        out
    }

    /// Formal partial derivative in variable `var`; exact through
    /// `trunc_degree - 1`.
    pub fn derivative(&self, var: usize) -> Series {
        let trunc = self.trunc_degree.saturating_sub(1);
        let mut out = Series::zero(self.num_vars, self.num_components, trunc);
        for (idx, v) in &self.coeffs {
            let e = idx.0[var];
            if e == 0 {
                continue;
            }
            let mut nidx = idx.clone();
            nidx.0[var] -= 1;
            if nidx.degree() > trunc {
                continue;
            }
            let factor = Scalar::from_int(e as i64);
            let dv: Vec<Scalar> = v.iter().map(|s| s * &factor).collect();
            out.add_to_coeff(&nidx, &dv);
        }
        out
    }

    /// Iterated derivative `d^beta`.
    pub fn derivative_multi(&self, beta: &MultiIndex) -> Series {
        let mut out = self.clone();
        for (var, &e) in beta.0.iter().enumerate() {
            for _ in 0..e {
                out = out.derivative(var);
            }
        }
        out
    }

    /// Exact evaluation at a scalar point.
    pub fn eval(&self, point: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(point.len(), self.num_vars);
        let mut powers: Vec<Vec<Scalar>> = point.iter().map(|p| vec![Scalar::one(), p.clone()]).collect();
        let mut out = vec![Scalar::zero(); self.num_components];
        for (idx, v) in &self.coeffs {
            let mut mono = Scalar::one();
            for (var, &e) in idx.0.iter().enumerate() {
                let e = e as usize;
                while powers[var].len() <= e {
                    let last = powers[var].last().unwrap().clone();
                    let next = &last * &point[var];
                    powers[var].push(next);
                }
                mono = &mono * &powers[var][e];
            }
            for (o, c) in out.iter_mut().zip(v) {
                *o += &(c * &mono);
            }
        }
        out
    }

    /// Composition `self(g)`. Requires `g(0) = 0` and
    /// `g.num_components == self.num_vars`. The result is exact through
    /// `min(self.trunc_degree, g.trunc_degree)`: since `g` has no constant
    /// term, the degree-j output consumes `self` and `g` only through
    /// degree j.
    pub fn compose(&self, g: &Series) -> Result<Series, CoreError> {
        if g.num_components != self.num_vars {
            return Err(CoreError::DimensionMismatch(format!(
                "compose: inner map has {} components, outer expects {} variables",
                g.num_components, self.num_vars
            )));
        }
        if !g.has_zero_constant_term() {
            return Err(CoreError::NonzeroConstantTerm);
        }
        let trunc = self.trunc_degree.min(g.trunc_degree);
        let mut out = Series::zero(g.num_vars, self.num_components, trunc);

        // Minimal vanishing order of each inner component, for pruning.
        let comp_order: Vec<usize> = (0..g.num_components)
            .map(|c| g.vanishing_order(c).unwrap_or(trunc + 1))
            .collect();

        // Cache powers of the inner components.
        let mut powers: Vec<Vec<Series>> = (0..g.num_components)
            .map(|c| {
                vec![
                    Series::constant(vec![Scalar::one()], g.num_vars, trunc),
                    g.component(c).truncate(trunc),
                ]
            })
            .collect();

        for (alpha, coeff) in &self.coeffs {
            // Lowest possible output degree of this monomial.
            let min_deg: usize = alpha
                .0
                .iter()
                .enumerate()
                .map(|(c, &e)| comp_order[c].saturating_mul(e as usize))
                .sum();
            if min_deg > trunc {
                continue;
            }
            let mut prod = Series::constant(vec![Scalar::one()], g.num_vars, trunc);
            for (c, &e) in alpha.0.iter().enumerate() {
                let e = e as usize;
                if e == 0 {
                    continue;
                }
                while powers[c].len() <= e {
                    let last = powers[c].last().unwrap();
                    let next = last.mul(&powers[c][1]);
                    powers[c].push(next);
                }
                prod = prod.mul(&powers[c][e]);
                if prod.is_zero() {
                    break;
                }
            }
            for (idx, pv) in &prod.coeffs {
                let term: Vec<Scalar> = coeff.iter().map(|cc| cc * &pv[0]).collect();
                out.add_to_coeff(idx, &term);
            }
        }
        Ok(out)
    }

    /// The linear part as an `m x n` scalar matrix.
    pub fn linear_part_matrix(&self) -> Vec<Vec<Scalar>> {
        let mut mat = vec![vec![Scalar::zero(); self.num_vars]; self.num_components];
        for v in 0..self.num_vars {
            let idx = MultiIndex::unit(self.num_vars, v);
            if let Some(c) = self.coeffs.get(&idx) {
                for (row, s) in c.iter().enumerate() {
                    mat[row][v] = s.clone();
                }
            }
        }
        mat
    }

    /// Re-embed into a larger variable space: old variable `j` becomes
    /// variable `var_map[j]` of a space with `new_num_vars` variables.
    pub fn embed_vars(&self, new_num_vars: usize, var_map: &[usize]) -> Series {
        assert_eq!(var_map.len(), self.num_vars);
        let mut out = Series::zero(new_num_vars, self.num_components, self.trunc_degree);
        for (idx, v) in &self.coeffs {
            let mut e = vec![0u32; new_num_vars];
            for (j, &ej) in idx.0.iter().enumerate() {
                e[var_map[j]] += ej;
            }
            out.coeffs.insert(MultiIndex(e), v.clone());
        }
        out
    }

    /// Set the listed variables to zero (dropping all terms that contain
    /// them), keeping the ambient variable space.
    pub fn set_vars_zero(&self, vars: &[usize]) -> Series {
        let mut out = Series::zero(self.num_vars, self.num_components, self.trunc_degree);
        for (idx, v) in &self.coeffs {
            if vars.iter().all(|&j| idx.0[j] == 0) {
                out.coeffs.insert(idx.clone(), v.clone());
            }
        }
        out
    }

    /// Keep only the listed variables, renumbering them in the given order.
    /// Panics if a dropped variable still occurs.
    pub fn restrict_vars(&self, keep: &[usize]) -> Series {
        let mut out = Series::zero(keep.len(), self.num_components, self.trunc_degree);
        for (idx, v) in &self.coeffs {
            let mut e = vec![0u32; keep.len()];
            let mut used: usize = 0;
            for (pos, &j) in keep.iter().enumerate() {
                e[pos] = idx.0[j];
                used += idx.0[j] as usize;
            }
            assert_eq!(
                used,
                idx.degree(),
                "restrict_vars: a dropped variable still occurs"
            );
            out.coeffs.insert(MultiIndex(e), v.clone());
        }
        out
    }

    /// Group terms by the exponents on a block of variables. Returns, for
    /// each block exponent `beta`, the coefficient series in the remaining
    /// variables (which keep the ambient space).
    pub fn group_by_block(&self, block: &[usize]) -> BTreeMap<MultiIndex, Series> {
        let mut out: BTreeMap<MultiIndex, Series> = BTreeMap::new();
        let in_block: Vec<bool> = {
            let mut b = vec![false; self.num_vars];
            for &j in block {
                b[j] = true;
            }
            b
        };
        for (idx, v) in &self.coeffs {
            let beta = MultiIndex(block.iter().map(|&j| idx.0[j]).collect());
            let mut rest = idx.clone();
            for (j, e) in rest.0.iter_mut().enumerate() {
                if in_block[j] {
                    *e = 0;
                }
            }
            let entry = out.entry(beta).or_insert_with(|| {
                Series::zero(self.num_vars, self.num_components, self.trunc_degree)
            });
            entry.add_to_coeff(&rest, v);
        }
        out
    }

    /// Maximal degree in the given variable block among stored terms.
    pub fn max_block_degree(&self, block: &[usize]) -> usize {
        self.coeffs
            .keys()
            .map(|idx| block.iter().map(|&j| idx.0[j] as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Drop every term whose degree in the given block exceeds `cap`.
    pub fn truncate_block_degree(&self, block: &[usize], cap: usize) -> Series {
        let mut out = self.clone();
        out.coeffs.retain(|idx, _| {
            block.iter().map(|&j| idx.0[j] as usize).sum::<usize>() <= cap
        });
        out
    }

    /// The l1 coefficient norm: for each component the sum of surrogate
    /// moduli of its coefficients, then the maximum over components.
    pub fn norm_one(&self) -> Rational {
        let mut per_comp = vec![Rational::zero(); self.num_components];
        for v in self.coeffs.values() {
            for (acc, s) in per_comp.iter_mut().zip(v) {
                *acc += s.abs_surrogate();
            }
        }
        per_comp.into_iter().max().unwrap_or_else(Rational::zero)
    }

    /// Multiplicative inverse of a scalar-valued unit series, exact through
    /// the truncation degree.
    pub fn reciprocal(&self) -> Result<Series, CoreError> {
        assert_eq!(self.num_components, 1, "reciprocal is for scalar-valued series");
        let c0 = self.constant_term()[0].clone();
        if c0.is_zero() {
            return Err(CoreError::NotAUnit);
        }
        let c0inv = c0.inverse()?;
        // f = c0 (1 - r) with ord(r) >= 1; 1/f = c0^{-1} (1 + r + r^2 + ...).
        let mut r = Series::constant(vec![c0.clone()], self.num_vars, self.trunc_degree).sub(self);
        r = r.scale(&c0inv);
        let mut acc = Series::constant(vec![Scalar::one()], self.num_vars, self.trunc_degree);
        let mut pw = r.clone();
        for _ in 0..self.trunc_degree {
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
            pw = pw.mul(&r);
        }
        Ok(acc.scale(&c0inv))
    }
}

impl std::fmt::Debug for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Series(n={}, m={}, D={}, {} terms)",
            self.num_vars,
            self.num_components,
            self.trunc_degree,
            self.coeffs.len()
        )
    }
}
