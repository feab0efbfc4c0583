//! Truncated multivariate power series over a [`FieldCtx`], plus the dense
//! univariate series and Y-polynomials used by the branch machinery.
//!
//! A [`TruncSeries`] is a sparse map from exponent vectors to coefficients.
//! Precision is explicit: `Prec::Exact` marks a genuine polynomial (no terms
//! were ever dropped), `Prec::Trunc(D)` means terms of total degree `>= D`
//! are unknown. Operations that lose exactness return `AtLeast`-tagged
//! orders instead of silently wrong values.

use crate::error::{Error, Result};
use crate::extnat::ExtNat;
use crate::field::{nth_root_unit_scalar, FieldCtx, FieldElem};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use rand_core::RngCore;

/// Default total-degree truncation order.
pub const DEFAULT_PREC: u32 = 64;

/// Exponent vector, ordered so that the first map key is the leading
/// monomial of the local (negative degree reverse lexicographic) ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn deg(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `self / other` when divisible.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // degree first (lower degree leads in the local ordering), then a
        // reverse lexicographic tie-break
        self.deg().cmp(&other.deg()).then_with(|| {
            for i in (0..self.0.len()).rev() {
                match self.0[i].cmp(&other.0[i]) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncation state of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prec {
    /// Polynomial; nothing was ever dropped.
    Exact,
    /// Terms of total degree `>= D` are unknown.
    Trunc(u32),
}

impl Prec {
    pub fn min(self, other: Prec) -> Prec {
        match (self, other) {
            (Prec::Exact, p) | (p, Prec::Exact) => p,
            (Prec::Trunc(a), Prec::Trunc(b)) => Prec::Trunc(a.min(b)),
        }
    }

    pub fn bound(self) -> u32 {
        match self {
            Prec::Exact => u32::MAX,
            Prec::Trunc(d) => d,
        }
    }
}

/// Sparse truncated multivariate power series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    ctx: FieldCtx,
    nvars: usize,
    prec: Prec,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl TruncSeries {
    pub fn zero(ctx: &FieldCtx, nvars: usize) -> TruncSeries {
        TruncSeries {
            ctx: ctx.clone(),
            nvars,
            prec: Prec::Exact,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &FieldCtx, nvars: usize, c: FieldElem) -> TruncSeries {
        let mut s = TruncSeries::zero(ctx, nvars);
        if !c.is_zero() {
            s.terms.insert(Monomial::one(nvars), c);
        }
        s
    }

    pub fn one(ctx: &FieldCtx, nvars: usize) -> TruncSeries {
        TruncSeries::constant(ctx, nvars, ctx.one())
    }

    pub fn var(ctx: &FieldCtx, nvars: usize, i: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(ctx, nvars);
        s.terms.insert(Monomial::var(nvars, i), ctx.one());
        s
    }

    pub fn monomial(ctx: &FieldCtx, nvars: usize, exps: &[u32], c: FieldElem) -> TruncSeries {
        let mut s = TruncSeries::zero(ctx, nvars);
        if !c.is_zero() {
            s.terms.insert(Monomial(exps.to_vec()), c);
        }
        s
    }

    pub fn from_terms(
        ctx: &FieldCtx,
        nvars: usize,
        prec: Prec,
        terms: impl IntoIterator<Item = (Monomial, FieldElem)>,
    ) -> TruncSeries {
        let mut s = TruncSeries {
            ctx: ctx.clone(),
            nvars,
            prec,
            terms: BTreeMap::new(),
        };
        for (m, c) in terms {
            s.insert_add(m, c);
        }
        s
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.prec == Prec::Exact
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Leading term w.r.t. the local ordering.
    pub fn leading(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next()
    }

    /// Total degree of the highest stored term.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.deg()).max().unwrap_or(0)
    }

    fn insert_add(&mut self, m: Monomial, c: FieldElem) {
        if c.is_zero() || m.deg() >= self.prec.bound() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn truncate_to(&self, d: u32) -> TruncSeries {
        let mut out = self.clone();
        out.prec = self.prec.min(Prec::Trunc(d));
        out.terms.retain(|m, _| m.deg() < d);
        out
    }

    /// Forget exactness: mark the series truncated at `d` (keeping terms).
    pub fn with_prec(&self, prec: Prec) -> TruncSeries {
        let mut out = self.clone();
        out.prec = prec;
        out.terms.retain(|m, _| m.deg() < prec.bound());
        out
    }

    /// Lift coefficients into an extension field.
    pub fn lift_to(&self, target: &FieldCtx) -> TruncSeries {
        TruncSeries {
            ctx: target.clone(),
            nvars: self.nvars,
            prec: self.prec,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.lift_to(target)))
                .collect(),
        }
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        assert_eq!(self.nvars, other.nvars);
        let mut out = TruncSeries {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            prec: self.prec.min(other.prec),
            terms: self.terms.clone(),
        };
        out.terms.retain(|m, _| m.deg() < out.prec.bound());
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            prec: self.prec,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> TruncSeries {
        if c.is_zero() {
            let mut z = TruncSeries::zero(&self.ctx, self.nvars);
            z.prec = self.prec;
            return z;
        }
        TruncSeries {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            prec: self.prec,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        assert_eq!(self.nvars, other.nvars);
        let prec = self.prec.min(other.prec);
        let mut out = TruncSeries {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            prec,
            terms: BTreeMap::new(),
        };
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if m.deg() >= prec.bound() {
                    continue;
                }
                out.insert_add(m, c1.mul(c2));
            }
        }
        out
    }

    pub fn mul_monomial(&self, exps: &[u32], c: &FieldElem) -> TruncSeries {
        let m0 = Monomial(exps.to_vec());
        let mut out = TruncSeries {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            prec: self.prec,
            terms: BTreeMap::new(),
        };
        for (m, x) in &self.terms {
            out.insert_add(m.mul(&m0), x.mul(c));
        }
        out
    }

    pub fn pow(&self, n: u32) -> TruncSeries {
        let mut result = TruncSeries::one(&self.ctx, self.nvars);
        result.prec = self.prec;
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Smallest total degree of a nonzero term.
    pub fn ord(&self) -> ExtNat {
        match self.terms.keys().next() {
            Some(m) => ExtNat::Finite(m.deg() as u64),
            None => match self.prec {
                Prec::Exact => ExtNat::Infinite,
                Prec::Trunc(d) => ExtNat::AtLeast(d as u64),
            },
        }
    }

    /// The homogeneous part of lowest degree (initial form).
    pub fn initial_form(&self) -> TruncSeries {
        match self.terms.keys().next() {
            None => self.clone(),
            Some(m0) => {
                let d = m0.deg();
                let terms: Vec<_> = self
                    .terms
                    .iter()
                    .take_while(|(m, _)| m.deg() == d)
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect();
                TruncSeries::from_terms(&self.ctx, self.nvars, Prec::Exact, terms)
            }
        }
    }

    pub fn partial(&self, i: usize) -> TruncSeries {
        let prec = match self.prec {
            Prec::Exact => Prec::Exact,
            Prec::Trunc(d) => Prec::Trunc(d.saturating_sub(1)),
        };
        let mut out = TruncSeries {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            prec,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            let factor = FieldElem::from_int(&self.ctx, e as i64);
            out.insert_add(Monomial(exps), c.mul(&factor));
        }
        out
    }

    pub fn partials(&self) -> Vec<TruncSeries> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Substitute `images[i]` for variable `i`. Unless `self` is a
    /// polynomial, every image must have zero constant term.
    pub fn subst(&self, images: &[TruncSeries]) -> Result<TruncSeries> {
        assert_eq!(images.len(), self.nvars);
        let out_nvars = images.first().map(|s| s.nvars).unwrap_or(self.nvars);
        let mut prec = images.iter().fold(Prec::Exact, |p, s| p.min(s.prec));
        if let Prec::Trunc(d) = self.prec {
            // unknown terms of degree >= d map to order >= d when images
            // have positive order
            for im in images {
                if !im.constant_term().is_zero() {
                    return Err(Error::Domain(String::from(
                        "substitution into a truncated series needs images without constant term",
                    )));
                }
            }
            prec = prec.min(Prec::Trunc(d));
        }
        let ctx = images
            .first()
            .map(|s| s.ctx.clone())
            .unwrap_or_else(|| self.ctx.clone());
        let mut acc = TruncSeries::zero(&ctx, out_nvars);
        acc.prec = prec;
        // power cache per variable
        let mut pow_cache: Vec<BTreeMap<u32, TruncSeries>> = vec![BTreeMap::new(); self.nvars];
        for (m, c) in &self.terms {
            let mut term = TruncSeries::constant(&ctx, out_nvars, c.lift_to(&ctx));
            term.prec = prec;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = pow_cache[i]
                    .entry(e)
                    .or_insert_with(|| images[i].with_prec(prec).pow(e))
                    .clone();
                term = term.mul(&p);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Inverse of a unit series, to precision `d`.
    pub fn invert_unit(&self, d: u32) -> Result<TruncSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let target = Prec::Trunc(d).min(self.prec);
        let u = self.with_prec(target);
        let mut v = TruncSeries::constant(&self.ctx, self.nvars, c0.inv()?);
        v.prec = target;
        let one = TruncSeries::one(&self.ctx, self.nvars).with_prec(target);
        // Newton: v <- v(2 - u v), doubling correct order each step
        let two = TruncSeries::constant(&self.ctx, self.nvars, FieldElem::from_int(&self.ctx, 2))
            .with_prec(target);
        loop {
            let err = one.sub(&u.mul(&v));
            match err.ord() {
                ExtNat::Finite(_) => {
                    v = v.mul(&two.sub(&u.mul(&v)));
                }
                _ => return Ok(v),
            }
        }
    }

    /// Series n-th root of a unit (requires `p` not dividing `n`).
    pub fn nth_root(&self, n: u64, rng: &mut dyn RngCore) -> Result<TruncSeries> {
        let p = self.ctx.characteristic();
        if p > 0 && n % p == 0 {
            return Err(Error::WildExponent { n, p });
        }
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let (r0, new_ctx) = nth_root_unit_scalar(&c0, n, rng)?;
        let u = if new_ctx == self.ctx {
            self.clone()
        } else {
            self.lift_to(&new_ctx)
        };
        let target = match u.prec {
            Prec::Exact => Prec::Trunc(DEFAULT_PREC),
            p => p,
        };
        let u = u.with_prec(target);
        let mut w = TruncSeries::constant(u.ctx(), u.nvars, r0).with_prec(target);
        let n_scalar = FieldElem::from_int(u.ctx(), n as i64);
        loop {
            let err = u.sub(&w.pow(n as u32));
            if err.is_zero() {
                return Ok(w);
            }
            // delta = err / (n w^{n-1})
            let denom = w.pow(n as u32 - 1).scale(&n_scalar);
            let delta = err.mul(&denom.invert_unit(target.bound())?);
            if delta.is_zero() {
                return Ok(w);
            }
            w = w.add(&delta);
        }
    }

    /// `f(images)` for an automorphism: zero constant terms, invertible
    /// linear part.
    pub fn apply_automorphism(&self, images: &[TruncSeries]) -> Result<TruncSeries> {
        check_automorphism(&self.ctx, self.nvars, images)?;
        self.subst(images)
    }

    /// Strict transform of a blow-up chart (two variables).
    ///
    /// Chart 0: `(X, Y) -> (u, u v)`, divide by `u^ord`;
    /// chart 1: `(X, Y) -> (u v, v)`, divide by `v^ord`.
    pub fn blowup_strict_transform(&self, chart: usize) -> TruncSeries {
        assert_eq!(self.nvars, 2);
        let m = match self.ord() {
            ExtNat::Finite(m) => m as u32,
            _ => return self.clone(),
        };
        let prec = match self.prec {
            Prec::Exact => Prec::Exact,
            Prec::Trunc(d) => Prec::Trunc(d.saturating_sub(m)),
        };
        let mut out = TruncSeries {
            ctx: self.ctx.clone(),
            nvars: 2,
            prec,
            terms: BTreeMap::new(),
        };
        for (mon, c) in &self.terms {
            let (a, b) = (mon.0[0], mon.0[1]);
            let exps = if chart == 0 {
                // X^a Y^b -> u^{a+b-m} v^b
                [a + b - m, b]
            } else {
                [a, a + b - m]
            };
            out.insert_add(Monomial(exps.to_vec()), c.clone());
        }
        out
    }

    /// Evaluate a two-variable series along a parametrization `(x(t), y(t))`.
    pub fn eval_uniseries(&self, x: &UniSeries, y: &UniSeries) -> UniSeries {
        assert_eq!(self.nvars, 2);
        let prec = match self.prec {
            // unknown terms have order >= d in (X, Y); each of x, y has
            // positive t-order, so they contribute t-order >= d
            Prec::Trunc(d) => x.prec.min(y.prec).min(d as usize),
            Prec::Exact => x.prec.min(y.prec),
        };
        // collect coefficients by Y-degree: f = sum_b A_b(X) Y^b
        let mut by_y: BTreeMap<u32, Vec<(u32, FieldElem)>> = BTreeMap::new();
        let mut max_b = 0;
        for (m, c) in &self.terms {
            let (a, b) = (m.0[0], m.0[1]);
            max_b = max_b.max(b);
            by_y.entry(b).or_default().push((a, c.clone()));
        }
        let ctx = x.ctx.clone();
        let mut acc = UniSeries::zero(&ctx, prec);
        // Horner in y
        for b in (0..=max_b).rev() {
            acc = acc.mul(y);
            if let Some(coeffs) = by_y.get(&b) {
                // A_b(x(t)) by powers of x
                let mut ab = UniSeries::zero(&ctx, prec);
                for (a, c) in coeffs {
                    let xa = x.pow(*a);
                    ab = ab.add(&xa.scale(&c.lift_to(&ctx)));
                }
                acc = acc.add(&ab);
            }
        }
        acc
    }

    /// Evaluate at a point.
    pub fn eval_point(&self, point: &[FieldElem]) -> FieldElem {
        assert_eq!(point.len(), self.nvars);
        let ctx = point
            .first()
            .map(|c| c.ctx().clone())
            .unwrap_or_else(|| self.ctx.clone());
        let mut acc = ctx.zero();
        for (m, c) in &self.terms {
            let mut t = c.lift_to(&ctx);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&point[i].pow(e as u64));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

/// Verify that `images` define an automorphism of the power series ring.
pub fn check_automorphism(
    ctx: &FieldCtx,
    nvars: usize,
    images: &[TruncSeries],
) -> Result<()> {
    if images.len() != nvars {
        return Err(Error::NotAutomorphism);
    }
    for im in images {
        if !im.constant_term().is_zero() {
            return Err(Error::NotAutomorphism);
        }
    }
    // linear part must be invertible
    let mut mat: Vec<Vec<FieldElem>> = Vec::new();
    for im in images {
        let row: Vec<FieldElem> = (0..nvars)
            .map(|j| im.coeff(&Monomial::var(nvars, j)))
            .collect();
        mat.push(row);
    }
    if matrix_det(ctx, &mat).is_zero() {
        return Err(Error::NotAutomorphism);
    }
    Ok(())
}

fn matrix_det(ctx: &FieldCtx, mat: &[Vec<FieldElem>]) -> FieldElem {
    let n = mat.len();
    let mut m: Vec<Vec<FieldElem>> = mat.to_vec();
    let mut det = ctx.one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pr = match pivot {
            Some(pr) => pr,
            None => return ctx.zero(),
        };
        if pr != col {
            m.swap(pr, col);
            det = det.neg();
        }
        let pv = m[col][col].clone();
        det = det.mul(&pv);
        let pinv = pv.inv().expect("nonzero pivot");
        for r in col + 1..n {
            let factor = m[r][col].mul(&pinv);
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let t = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&t);
            }
        }
    }
    det
}

/// Order-by-order inverse of an automorphism, to precision `d`.
pub fn invert_automorphism(images: &[TruncSeries], d: u32) -> Result<Vec<TruncSeries>> {
    let nvars = images.len();
    let ctx = images[0].ctx().clone();
    check_automorphism(&ctx, nvars, images)?;
    let imgs: Vec<TruncSeries> = images.iter().map(|s| s.truncate_to(d)).collect();
    // linear part inverse
    let mut mat: Vec<Vec<FieldElem>> = Vec::new();
    for im in &imgs {
        mat.push(
            (0..nvars)
                .map(|j| im.coeff(&Monomial::var(nvars, j)))
                .collect(),
        );
    }
    let inv = matrix_inv(&ctx, &mat)?;
    let vars: Vec<TruncSeries> = (0..nvars)
        .map(|i| TruncSeries::var(&ctx, nvars, i).with_prec(Prec::Trunc(d)))
        .collect();
    // g_i = sum_j inv[i][j] x_j as initial guess; Newton-style correction
    let mut g: Vec<TruncSeries> = (0..nvars)
        .map(|i| {
            let mut acc = TruncSeries::zero(&ctx, nvars).with_prec(Prec::Trunc(d));
            for j in 0..nvars {
                acc = acc.add(&vars[j].scale(&inv[i][j]));
            }
            acc
        })
        .collect();
    for _ in 0..d {
        // residual r_j = F_j(g) - x_j
        let residual: Vec<TruncSeries> = (0..nvars)
            .map(|j| imgs[j].subst(&g).map(|s| s.sub(&vars[j])))
            .collect::<Result<_>>()?;
        if residual.iter().all(|r| r.is_zero()) {
            return Ok(g);
        }
        for i in 0..nvars {
            let mut corr = TruncSeries::zero(&ctx, nvars).with_prec(Prec::Trunc(d));
            for j in 0..nvars {
                corr = corr.add(&residual[j].scale(&inv[i][j]));
            }
            g[i] = g[i].sub(&corr);
        }
    }
    Ok(g)
}

fn matrix_inv(ctx: &FieldCtx, mat: &[Vec<FieldElem>]) -> Result<Vec<Vec<FieldElem>>> {
    let n = mat.len();
    let mut a: Vec<Vec<FieldElem>> = mat.to_vec();
    let mut b: Vec<Vec<FieldElem>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ctx.one() } else { ctx.zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pr = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::NotAutomorphism)?;
        a.swap(pr, col);
        b.swap(pr, col);
        let pinv = a[col][col].inv()?;
        for c in 0..n {
            a[col][c] = a[col][c].mul(&pinv);
            b[col][c] = b[col][c].mul(&pinv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
                let t = f.mul(&b[col][c]);
                b[r][c] = b[r][c].sub(&t);
            }
        }
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// dense univariate series
// ---------------------------------------------------------------------------

/// Dense univariate truncated power series (used for `t`-parametrizations
/// and for the `X`-coefficients of Y-polynomials).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniSeries {
    ctx: FieldCtx,
    /// Coefficients in ascending order; `len() <= prec`.
    coeffs: Vec<FieldElem>,
    /// Known modulo `t^prec`.
    prec: usize,
}

impl UniSeries {
    pub fn zero(ctx: &FieldCtx, prec: usize) -> UniSeries {
        UniSeries {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn from_coeffs(ctx: &FieldCtx, mut coeffs: Vec<FieldElem>, prec: usize) -> UniSeries {
        coeffs.truncate(prec);
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniSeries {
            ctx: ctx.clone(),
            coeffs,
            prec,
        }
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElem, prec: usize) -> UniSeries {
        UniSeries::from_coeffs(ctx, vec![c], prec)
    }

    pub fn monomial(ctx: &FieldCtx, c: FieldElem, deg: usize, prec: usize) -> UniSeries {
        let mut coeffs = vec![ctx.zero(); deg];
        coeffs.push(c);
        UniSeries::from_coeffs(ctx, coeffs, prec)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `t`-order; `None` when zero to precision.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn ord_extnat(&self) -> ExtNat {
        match self.ord() {
            Some(v) => ExtNat::Finite(v as u64),
            None => ExtNat::AtLeast(self.prec as u64),
        }
    }

    pub fn leading_coeff(&self) -> Option<(usize, FieldElem)> {
        self.ord().map(|o| (o, self.coeffs[o].clone()))
    }

    pub fn lift_to(&self, target: &FieldCtx) -> UniSeries {
        UniSeries {
            ctx: target.clone(),
            coeffs: self.coeffs.iter().map(|c| c.lift_to(target)).collect(),
            prec: self.prec,
        }
    }

    pub fn truncate(&self, prec: usize) -> UniSeries {
        UniSeries::from_coeffs(&self.ctx, self.coeffs.clone(), prec.min(self.prec))
    }

    pub fn add(&self, other: &UniSeries) -> UniSeries {
        let prec = self.prec.min(other.prec);
        let n = self.coeffs.len().max(other.coeffs.len()).min(prec);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        UniSeries::from_coeffs(&self.ctx, out, prec)
    }

    pub fn neg(&self) -> UniSeries {
        UniSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &UniSeries) -> UniSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> UniSeries {
        if c.is_zero() {
            return UniSeries::zero(&self.ctx, self.prec);
        }
        UniSeries::from_coeffs(
            &self.ctx,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
            self.prec,
        )
    }

    pub fn mul(&self, other: &UniSeries) -> UniSeries {
        let prec = self.prec.min(other.prec);
        if self.is_zero() || other.is_zero() {
            return UniSeries::zero(&self.ctx, prec);
        }
        let n = (self.coeffs.len() + other.coeffs.len() - 1).min(prec);
        let mut out = vec![self.ctx.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniSeries::from_coeffs(&self.ctx, out, prec)
    }

    pub fn pow(&self, n: u32) -> UniSeries {
        let mut result = UniSeries::constant(&self.ctx, self.ctx.one(), self.prec);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiply by `t^k` (drops precision window accordingly).
    pub fn shift_up(&self, k: usize) -> UniSeries {
        let mut coeffs = vec![self.ctx.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniSeries::from_coeffs(&self.ctx, coeffs, self.prec + k)
    }

    /// Divide by `t^k`; all lower coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> UniSeries {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        let coeffs: Vec<FieldElem> = self.coeffs.iter().skip(k).cloned().collect();
        UniSeries::from_coeffs(&self.ctx, coeffs, self.prec.saturating_sub(k))
    }

    pub fn derivative(&self) -> UniSeries {
        let out: Vec<FieldElem> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&FieldElem::from_int(&self.ctx, i as i64)))
            .collect();
        UniSeries::from_coeffs(&self.ctx, out, self.prec.saturating_sub(1))
    }

    pub fn invert_unit(&self) -> Result<UniSeries> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let mut v = UniSeries::constant(&self.ctx, c0.inv()?, self.prec);
        let one = UniSeries::constant(&self.ctx, self.ctx.one(), self.prec);
        let two = UniSeries::constant(&self.ctx, FieldElem::from_int(&self.ctx, 2), self.prec);
        loop {
            let err = one.sub(&self.mul(&v));
            if err.is_zero() {
                return Ok(v);
            }
            v = v.mul(&two.sub(&self.mul(&v)));
        }
    }
}

impl fmt::Display for UniSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*t^{i}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.prec)
    }
}

// ---------------------------------------------------------------------------
// Y-polynomials
// ---------------------------------------------------------------------------

/// Polynomial in `Y` with coefficients in `k[[X]]` (truncated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YPolynomial {
    ctx: FieldCtx,
    /// `coeffs[i]` is the coefficient of `Y^i`; trimmed so the leading
    /// coefficient is nonzero (to precision).
    coeffs: Vec<UniSeries>,
}

impl YPolynomial {
    pub fn new(ctx: &FieldCtx, mut coeffs: Vec<UniSeries>) -> YPolynomial {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        YPolynomial {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn zero(ctx: &FieldCtx) -> YPolynomial {
        YPolynomial {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> UniSeries {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| UniSeries::zero(&self.ctx, self.x_prec()))
    }

    pub fn coeffs(&self) -> &[UniSeries] {
        &self.coeffs
    }

    pub fn x_prec(&self) -> usize {
        self.coeffs
            .iter()
            .map(|c| c.prec())
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Build from a two-variable series (variable 0 = X, variable 1 = Y).
    pub fn from_series(f: &TruncSeries, x_prec: usize) -> YPolynomial {
        assert_eq!(f.nvars(), 2);
        let ctx = f.ctx().clone();
        let ydeg = f.terms().map(|(m, _)| m.0[1]).max().unwrap_or(0) as usize;
        let mut cols: Vec<Vec<FieldElem>> = vec![Vec::new(); ydeg + 1];
        for (m, c) in f.terms() {
            let (a, b) = (m.0[0] as usize, m.0[1] as usize);
            if cols[b].len() <= a {
                cols[b].resize(a + 1, ctx.zero());
            }
            cols[b][a] = c.clone();
        }
        let coeffs = cols
            .into_iter()
            .map(|v| UniSeries::from_coeffs(&ctx, v, x_prec))
            .collect();
        YPolynomial::new(&ctx, coeffs)
    }

    /// Back to a two-variable series (truncated at the coefficient
    /// precision plus the Y-degree).
    pub fn to_series(&self, nvars_prec: Prec) -> TruncSeries {
        let ctx = self.ctx.clone();
        let mut out = TruncSeries::zero(&ctx, 2).with_prec(nvars_prec);
        for (b, c) in self.coeffs.iter().enumerate() {
            for (a, x) in c.coeffs().iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                out = out.add(&TruncSeries::monomial(
                    &ctx,
                    2,
                    &[a as u32, b as u32],
                    x.clone(),
                ));
            }
        }
        out
    }

    pub fn add(&self, other: &YPolynomial) -> YPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs: Vec<UniSeries> = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        YPolynomial::new(&self.ctx, coeffs)
    }

    pub fn neg(&self) -> YPolynomial {
        YPolynomial {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &YPolynomial) -> YPolynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> YPolynomial {
        YPolynomial::new(
            &self.ctx,
            self.coeffs.iter().map(|a| a.scale(c)).collect(),
        )
    }

    pub fn scale_series(&self, s: &UniSeries) -> YPolynomial {
        YPolynomial::new(
            &self.ctx,
            self.coeffs.iter().map(|a| a.mul(s)).collect(),
        )
    }

    pub fn mul(&self, other: &YPolynomial) -> YPolynomial {
        if self.is_zero() || other.is_zero() {
            return YPolynomial::zero(&self.ctx);
        }
        let prec = self.x_prec().min(other.x_prec());
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![UniSeries::zero(&self.ctx, prec); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        YPolynomial::new(&self.ctx, out)
    }

    pub fn pow(&self, n: u32) -> YPolynomial {
        let mut result = YPolynomial::new(
            &self.ctx,
            vec![UniSeries::constant(&self.ctx, self.ctx.one(), self.x_prec())],
        );
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Euclidean division by a polynomial whose leading coefficient is a
    /// unit series.
    pub fn divrem(&self, div: &YPolynomial) -> Result<(YPolynomial, YPolynomial)> {
        let d = div.degree().ok_or(Error::NotAUnit)?;
        let lead_inv = div.coeffs[d].invert_unit()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((YPolynomial::zero(&self.ctx), self.clone()));
        }
        let mut quot = vec![UniSeries::zero(&self.ctx, self.x_prec()); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let c = rem[k].mul(&lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[k - d] = c.clone();
            for i in 0..=d {
                let t = c.mul(&div.coeff(i));
                rem[k - d + i] = rem[k - d + i].sub(&t);
            }
        }
        Ok((
            YPolynomial::new(&self.ctx, quot),
            YPolynomial::new(&self.ctx, rem),
        ))
    }

    pub fn derivative_y(&self) -> YPolynomial {
        let coeffs: Vec<UniSeries> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&FieldElem::from_int(&self.ctx, i as i64)))
            .collect();
        YPolynomial::new(&self.ctx, coeffs)
    }

    pub fn derivative_x(&self) -> YPolynomial {
        YPolynomial::new(
            &self.ctx,
            self.coeffs.iter().map(|c| c.derivative()).collect(),
        )
    }

    pub fn eval(&self, x: &UniSeries, y: &UniSeries) -> UniSeries {
        let mut acc = UniSeries::zero(&self.ctx, x.prec().min(y.prec()));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(y).add(&c.compose(x));
        }
        acc
    }
}

impl UniSeries {
    /// Composition `self(g)` where `g` has positive order.
    pub fn compose(&self, g: &UniSeries) -> UniSeries {
        let prec = self.prec.min(g.prec());
        let mut acc = UniSeries::zero(&g.ctx, prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g);
            acc = acc.add(&UniSeries::constant(&g.ctx, c.lift_to(&g.ctx), prec));
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Weierstrass division and preparation
// ---------------------------------------------------------------------------

/// Y-order of `f(0, Y)`, i.e. the smallest `b` with a pure `Y^b` term.
pub fn y_order(f: &TruncSeries) -> Option<u32> {
    assert_eq!(f.nvars(), 2);
    f.terms()
        .filter(|(m, _)| m.0[0] == 0)
        .map(|(m, _)| m.0[1])
        .min()
}

/// Weierstrass division: `g = q f + r` with `deg_Y r < n`, where `n` is the
/// Y-order of `f`. Works to the common truncation precision.
pub fn weierstrass_divide(
    g: &TruncSeries,
    f: &TruncSeries,
    d: u32,
) -> Result<(TruncSeries, YPolynomial)> {
    assert_eq!(f.nvars(), 2);
    assert_eq!(g.nvars(), 2);
    let n = y_order(f).ok_or(Error::NotYGeneral)?;
    let prec = Prec::Trunc(d).min(f.prec()).min(g.prec());
    let dd = prec.bound();
    let ctx = f.ctx().clone();
    // f = U Y^n + B, with U a unit and B of Y-degree < n with coefficients
    // in the maximal ideal of k[[X]]
    let mut u = TruncSeries::zero(&ctx, 2).with_prec(prec);
    let mut b = TruncSeries::zero(&ctx, 2).with_prec(prec);
    for (m, c) in f.terms() {
        if m.0[1] >= n {
            u = u.add(&TruncSeries::monomial(&ctx, 2, &[m.0[0], m.0[1] - n], c.clone()));
        } else {
            b = b.add(&TruncSeries::monomial(&ctx, 2, &[m.0[0], m.0[1]], c.clone()));
        }
    }
    let uinv = u.invert_unit(dd)?;
    let mut q = TruncSeries::zero(&ctx, 2).with_prec(prec);
    let mut r = TruncSeries::zero(&ctx, 2).with_prec(prec);
    let mut h = g.with_prec(prec);
    loop {
        if h.is_zero() {
            break;
        }
        // split h = h1 + Y^n h2
        let mut h1 = TruncSeries::zero(&ctx, 2).with_prec(prec);
        let mut h2 = TruncSeries::zero(&ctx, 2).with_prec(prec);
        for (m, c) in h.terms() {
            if m.0[1] >= n {
                h2 = h2.add(&TruncSeries::monomial(&ctx, 2, &[m.0[0], m.0[1] - n], c.clone()));
            } else {
                h1 = h1.add(&TruncSeries::monomial(&ctx, 2, &[m.0[0], m.0[1]], c.clone()));
            }
        }
        r = r.add(&h1);
        if h2.is_zero() {
            break;
        }
        let h2u = h2.mul(&uinv);
        q = q.add(&h2u);
        h = h2u.mul(&b).neg();
    }
    let rpoly = YPolynomial::from_series(&r, dd as usize);
    Ok((q, rpoly))
}

/// Classical Weierstrass preparation: `f = unit * wpoly` with `wpoly` a
/// monic Weierstrass polynomial in `Y`.
pub fn weierstrass_prepare(f: &TruncSeries, d: u32) -> Result<(TruncSeries, YPolynomial)> {
    let n = y_order(f).ok_or(Error::NotYGeneral)?;
    let ctx = f.ctx().clone();
    let yn = TruncSeries::monomial(&ctx, 2, &[0, n], ctx.one());
    let (q, r) = weierstrass_divide(&yn, f, d)?;
    // Y^n = q f + r  =>  f = q^{-1} (Y^n - r)
    let prec = Prec::Trunc(d).min(f.prec());
    let unit = q.invert_unit(prec.bound())?;
    let wpoly = YPolynomial::from_series(&yn.with_prec(prec).sub(&r.to_series(prec)), d as usize);
    Ok((unit, wpoly))
}

// ---------------------------------------------------------------------------
// resultants over k[[X]]
// ---------------------------------------------------------------------------

/// `Res_Y(f, g)` as a truncated series in `X`.
///
/// The Sylvester determinant is evaluated by Gaussian elimination over the
/// truncated series ring, choosing in each column a pivot of minimal
/// `X`-order and factoring the `X`-power out of the pivot row.
pub fn resultant_y(f: &YPolynomial, g: &YPolynomial) -> Result<UniSeries> {
    let ctx = f.ctx().clone();
    let n = f.degree().ok_or(Error::PrecisionExhausted)?;
    let m = g.degree().ok_or(Error::PrecisionExhausted)?;
    let prec = f.x_prec().min(g.x_prec());
    if n == 0 {
        return Ok(f.coeff(0).pow(m as u32));
    }
    if m == 0 {
        return Ok(g.coeff(0).pow(n as u32));
    }
    let size = n + m;
    let mut mat: Vec<Vec<UniSeries>> = vec![vec![UniSeries::zero(&ctx, prec); size]; size];
    for row in 0..m {
        for (i, c) in (0..=n).map(|i| (i, f.coeff(n - i))) {
            mat[row][row + i] = c;
        }
    }
    for row in 0..n {
        for (i, c) in (0..=m).map(|i| (i, g.coeff(m - i))) {
            mat[m + row][row + i] = c;
        }
    }
    let mut shift = 0usize; // accumulated X power factored out
    let mut unit_acc = UniSeries::constant(&ctx, ctx.one(), prec);
    let mut sign = false;
    for col in 0..size {
        // pivot of minimal order
        let mut best: Option<(usize, usize)> = None;
        for row in col..size {
            if let Some(o) = mat[row][col].ord() {
                if best.map(|(_, bo)| o < bo).unwrap_or(true) {
                    best = Some((row, o));
                }
            }
        }
        let (prow, pord) = match best {
            Some(x) => x,
            None => {
                // entire column vanishes to precision: the resultant is zero
                // to the remaining precision
                return Ok(UniSeries::zero(&ctx, prec.saturating_sub(shift)));
            }
        };
        if prow != col {
            mat.swap(prow, col);
            sign = !sign;
        }
        let pivot_unit = mat[col][col].shift_down(pord);
        shift += pord;
        unit_acc = unit_acc.mul(&pivot_unit);
        let pinv = pivot_unit.invert_unit()?;
        for row in col + 1..size {
            if mat[row][col].is_zero() {
                continue;
            }
            let rord = mat[row][col].ord().unwrap();
            debug_assert!(rord >= pord);
            let factor = mat[row][col].shift_down(pord).mul(&pinv);
            for c in col..size {
                let t = factor.mul(&mat[col][c]);
                mat[row][c] = mat[row][c].sub(&t);
            }
        }
    }
    let mut res = unit_acc.shift_up(shift).truncate(prec);
    if sign {
        res = res.neg();
    }
    Ok(res)
}

// ---------------------------------------------------------------------------
// display
// ---------------------------------------------------------------------------

fn var_name(nvars: usize, i: usize) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    if nvars <= 2 {
        s.push(if i == 0 { 'X' } else { 'Y' });
    } else {
        let _ = write!(s, "X{}", i + 1);
    }
    s
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.deg() == 0 {
                write!(f, "{c}")?;
                continue;
            }
            write!(f, "{c}")?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                write!(f, "*{}", var_name(self.nvars, i))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Prec::Trunc(d) = self.prec {
            write!(f, " + O(deg {d})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    fn q() -> FieldCtx {
        FieldCtx::Q
    }

    #[test]
    fn local_order_leading_term() {
        let f = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let (m, _) = f.leading().unwrap();
        assert_eq!(m.0, alloc::vec![0, 2]);
        assert_eq!(f.ord(), ExtNat::Finite(2));
    }

    #[test]
    fn ord_of_cusp_like_curve() {
        let f = parse_poly("X^4 + Y^3", &q(), 2).unwrap();
        assert_eq!(f.ord(), ExtNat::Finite(3));
        assert_eq!(f.initial_form(), parse_poly("Y^3", &q(), 2).unwrap());
    }

    #[test]
    fn partials_drop_wild_terms() {
        // char 3: d/dX (X^4 + Y^4 + X^3 Y^3) = X^3 (4 = 1, 3 = 0)
        let f3 = FieldCtx::Fp(3);
        let f = parse_poly("X^4 + Y^4 + X^3*Y^3", &f3, 2).unwrap();
        let fx = f.partial(0);
        let fy = f.partial(1);
        assert_eq!(fx, parse_poly("X^3", &f3, 2).unwrap());
        assert_eq!(fy, parse_poly("Y^3", &f3, 2).unwrap());
    }

    #[test]
    fn invert_unit_geometric() {
        let u = parse_poly("1 - X", &q(), 2).unwrap();
        let v = u.invert_unit(10).unwrap();
        // geometric series 1 + X + ... + X^9
        for k in 0..10u32 {
            assert!(v.coeff(&Monomial(alloc::vec![k, 0])).is_one());
        }
        let prod = u.mul(&v);
        assert!(prod.sub(&TruncSeries::one(&q(), 2).with_prec(Prec::Trunc(10))).is_zero());
    }

    #[test]
    fn invert_non_unit_fails() {
        let u = parse_poly("X + Y", &q(), 2).unwrap();
        assert!(matches!(u.invert_unit(8), Err(Error::NotAUnit)));
    }

    #[test]
    fn nth_root_of_unit_series() {
        let f5 = FieldCtx::Fp(5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = parse_poly("1 + X", &f5, 2).unwrap().with_prec(Prec::Trunc(12));
        let w = u.nth_root(2, &mut rng).unwrap();
        assert!(w.pow(2).sub(&u).is_zero());
        // p | n is rejected
        assert!(matches!(
            u.nth_root(5, &mut rng),
            Err(Error::WildExponent { n: 5, p: 5 })
        ));
    }

    #[test]
    fn automorphism_round_trip() {
        let f7 = FieldCtx::Fp(7);
        let f = parse_poly("Y^2 - X^3 + X*Y", &f7, 2).unwrap();
        // phi: X -> X + Y^2, Y -> 2*Y + X^2
        let images = alloc::vec![
            parse_poly("X + Y^2", &f7, 2).unwrap(),
            parse_poly("2*Y + X^2", &f7, 2).unwrap(),
        ];
        let g = f.apply_automorphism(&images).unwrap();
        let inv = invert_automorphism(&images, 24).unwrap();
        let back = g.apply_automorphism(&inv).unwrap();
        assert!(back.sub(&f.truncate_to(back.prec().bound())).is_zero());
    }

    #[test]
    fn automorphism_rejects_degenerate_linear_part() {
        let f = parse_poly("X", &q(), 2).unwrap();
        let images = alloc::vec![
            parse_poly("X + Y", &q(), 2).unwrap(),
            parse_poly("X + Y + X^2", &q(), 2).unwrap(),
        ];
        assert!(matches!(
            f.apply_automorphism(&images),
            Err(Error::NotAutomorphism)
        ));
        let images2 = alloc::vec![
            parse_poly("1 + X", &q(), 2).unwrap(),
            parse_poly("Y", &q(), 2).unwrap(),
        ];
        assert!(matches!(
            f.apply_automorphism(&images2),
            Err(Error::NotAutomorphism)
        ));
    }

    #[test]
    fn weierstrass_division_cusp() {
        let f = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let g = parse_poly("Y^4", &q(), 2).unwrap();
        let (quot, rem) = weierstrass_divide(&g, &f, 20).unwrap();
        let expect_q = parse_poly("Y^2 + X^3", &q(), 2).unwrap();
        assert!(quot.sub(&expect_q.truncate_to(20)).is_zero());
        assert_eq!(rem.degree(), Some(0));
        assert_eq!(rem.coeff(0).ord(), Some(6));
        // check identity g = q f + r to precision
        let back = quot.mul(&f).add(&rem.to_series(Prec::Trunc(20)));
        assert!(back.sub(&g.truncate_to(20)).is_zero());
    }

    #[test]
    fn weierstrass_preparation_splits_unit() {
        let f = parse_poly("(1 + X)*(Y^2 - X^3)", &q(), 2).unwrap();
        let (unit, wpoly) = weierstrass_prepare(&f, 16).unwrap();
        assert_eq!(wpoly.degree(), Some(2));
        // unit must start 1 + X + ...
        assert!(unit.constant_term().is_one());
        assert!(unit.coeff(&Monomial(alloc::vec![1, 0])).is_one());
        // f = unit * wpoly to precision
        let back = unit.mul(&wpoly.to_series(Prec::Trunc(16)));
        assert!(back.sub(&f.truncate_to(16)).is_zero());
        // wpoly is monic with non-unit lower coefficients
        assert!(wpoly.coeff(2).coeff(0).is_one());
        assert!(wpoly.coeff(1).coeff(0).is_zero());
        assert!(wpoly.coeff(0).coeff(0).is_zero());
    }

    #[test]
    fn weierstrass_requires_y_general() {
        let f = parse_poly("X^2", &q(), 2).unwrap();
        assert!(matches!(
            weierstrass_prepare(&f, 8),
            Err(Error::NotYGeneral)
        ));
    }

    #[test]
    fn resultant_against_substitution() {
        // Res_Y(f, Y - a(X)) = +/- f(X, a(X))
        let f = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let g = parse_poly("Y - X^2", &q(), 2).unwrap();
        let fp = YPolynomial::from_series(&f, 20);
        let gp = YPolynomial::from_series(&g, 20);
        let res = resultant_y(&fp, &gp).unwrap();
        // f(X, X^2) = X^4 - X^3
        assert_eq!(res.ord(), Some(3));
        let expect = UniSeries::from_coeffs(
            &q(),
            alloc::vec![
                q().zero(),
                q().zero(),
                q().zero(),
                FieldElem::from_int(&q(), -1),
                FieldElem::from_int(&q(), 1),
            ],
            20,
        );
        assert!(res.sub(&expect).is_zero() || res.add(&expect).is_zero());
    }

    #[test]
    fn resultant_order_is_intersection_number() {
        // I(Y^2 - X^3, Y^2 - X^5) at the origin is 6
        let f = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let g = parse_poly("Y^2 - X^5", &q(), 2).unwrap();
        let res = resultant_y(
            &YPolynomial::from_series(&f, 30),
            &YPolynomial::from_series(&g, 30),
        )
        .unwrap();
        assert_eq!(res.ord(), Some(6));
    }

    #[test]
    fn blowup_chart_zero() {
        // Y^2 - X^3 -> v^2 - u after one blow-up in the chart Y = u v
        let f = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let t = f.blowup_strict_transform(0);
        assert_eq!(t, parse_poly("Y^2 - X", &q(), 2).unwrap());
        // exactness is preserved
        assert!(t.is_polynomial());
    }

    #[test]
    fn blowup_other_chart() {
        let f = parse_poly("X^2 - Y^3", &q(), 2).unwrap();
        let t = f.blowup_strict_transform(1);
        assert_eq!(t, parse_poly("X^2 - Y", &q(), 2).unwrap());
    }

    #[test]
    fn eval_along_parametrization() {
        let f = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let x = UniSeries::monomial(&q(), q().one(), 2, 40);
        let y = UniSeries::monomial(&q(), q().one(), 3, 40);
        assert!(f.eval_uniseries(&x, &y).is_zero());
        // perturbed: y = t^3 + t^4 gives 2 t^7 + t^8
        let y2 = y.add(&UniSeries::monomial(&q(), q().one(), 4, 40));
        let v = f.eval_uniseries(&x, &y2);
        assert_eq!(v.ord(), Some(7));
        assert_eq!(v.coeff(7), FieldElem::from_int(&q(), 2));
        assert_eq!(v.coeff(8), FieldElem::from_int(&q(), 1));
    }

    #[test]
    fn uniseries_arith_and_inverse() {
        let f5 = FieldCtx::Fp(5);
        let u = UniSeries::from_coeffs(
            &f5,
            alloc::vec![
                FieldElem::from_int(&f5, 2),
                FieldElem::from_int(&f5, 3),
                FieldElem::from_int(&f5, 1),
            ],
            25,
        );
        let v = u.invert_unit().unwrap();
        let one = UniSeries::constant(&f5, f5.one(), 25);
        assert!(u.mul(&v).sub(&one).is_zero());
        assert!(UniSeries::monomial(&f5, f5.one(), 1, 25).invert_unit().is_err());
    }

    #[test]
    fn ypoly_divrem_round_trip() {
        let f = parse_poly("Y^3 + X*Y + X^2", &q(), 2).unwrap();
        let g = parse_poly("Y^2 - X^3", &q(), 2).unwrap();
        let fp = YPolynomial::from_series(&f, 30);
        let gp = YPolynomial::from_series(&g, 30);
        let (quot, rem) = fp.divrem(&gp).unwrap();
        assert!(rem.degree().unwrap_or(0) < 2);
        let back = quot.mul(&gp).add(&rem);
        assert!(back.sub(&fp).is_zero()
            || back
                .coeffs()
                .iter()
                .zip(fp.coeffs())
                .all(|(a, b)| a.sub(b).is_zero()));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let f = parse_poly("Y^2 - X^3 + 4*X*Y", &q(), 2).unwrap();
        let s = alloc::format!("{f}");
        let g = parse_poly(&s, &q(), 2).unwrap();
        assert_eq!(f, g);
    }
}
