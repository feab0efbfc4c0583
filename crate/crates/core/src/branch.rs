//! Plane-branch analysis: parametrization by iterated blow-ups (valid in
//! every characteristic), the semigroup of values, intersection
//! multiplicities by two independent methods, Abhyankar-Moh approximate
//! roots, Delgado's formula, and the jacobian sweep machinery
//! (q-polynomials, spanning family, reduction modulo the jacobian ideal).

use crate::error::{Error, Result};
use crate::extnat::ExtNat;
use crate::field::{FieldElem, FPoly};
use crate::invariants::{jacobian_ideal, milnor, tilde_mu};
use crate::localstd::Membership;
use crate::numsgp::NumericalSemigroup;
use crate::series::{
    weierstrass_prepare, Monomial, Prec, TruncSeries, UniSeries, YPolynomial,
};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

/// A branch parametrization `(x(t), y(t))` with `f(x(t), y(t)) = 0` to the
/// `t`-precision of the two series.
#[derive(Debug, Clone)]
pub struct Parametrization {
    pub x: UniSeries,
    pub y: UniSeries,
}

impl Parametrization {
    pub fn t_prec(&self) -> usize {
        self.x.prec().min(self.y.prec())
    }

    /// `ord_t h(x(t), y(t))`, i.e. the intersection multiplicity of the
    /// parametrized branch with `h = 0`.
    pub fn value(&self, h: &TruncSeries) -> ExtNat {
        h.eval_uniseries(&self.x, &self.y).ord_extnat()
    }

    pub fn value_ypoly(&self, h: &YPolynomial) -> ExtNat {
        h.eval(&self.x, &self.y).ord_extnat()
    }

    fn swapped(&self) -> Parametrization {
        Parametrization {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

/// One step of the blow-up tower.
enum BlowStep {
    /// Chart `X = u, Y = u (v + z0)`.
    Center(FieldElem),
    /// Chart `X = u v, Y = v` (tangent direction `X = 0`).
    Swap,
}

/// Decide whether `fp = c (T - z)^m` for some root `z`, handling inseparable
/// degrees by contracting `p`-power exponents.
fn pure_power_root(fp: &FPoly) -> Option<FieldElem> {
    let ctx = fp.ctx().clone();
    let m = fp.degree()? as u64;
    if m == 0 {
        return None;
    }
    let p = ctx.characteristic();
    let mut pa = 1u64;
    let mut mm = m;
    if p > 0 {
        while mm % p == 0 {
            mm /= p;
            pa *= p;
        }
    }
    let c = fp.leading();
    // contracted polynomial G with G(U^{p^a}) = fp(U) requires every
    // exponent to be a multiple of p^a
    for (i, co) in fp.coeffs().iter().enumerate() {
        if !co.is_zero() && (i as u64) % pa != 0 {
            return None;
        }
    }
    // fp = c (T - z)^m = c (T^{p^a} - z^{p^a})^{mm}; read off z^{p^a} from
    // the second-highest contracted coefficient
    let w = if mm == 1 {
        fp.coeff(0).div(&c).ok()?.neg()
    } else {
        let sub = fp.coeff(((mm - 1) * pa) as usize);
        let mmc = FieldElem::from_int(&ctx, mm as i64).mul(&c);
        sub.div(&mmc).ok()?.neg()
    };
    let mut a = pa;
    let mut z = w;
    while a > 1 {
        z = z.p_power_root(1);
        a /= p;
    }
    // verify by expansion
    let lin = FPoly::new(ctx.clone(), vec![z.neg(), ctx.one()]);
    let mut check = FPoly::constant(c);
    for _ in 0..m {
        check = check.mul(&lin);
    }
    if check.sub(fp).is_zero() {
        Some(z)
    } else {
        None
    }
}

/// Solve `g(t, phi(t)) = 0` (when `var = 1`) or `g(phi(t), t) = 0` (when
/// `var = 0`) by Newton iteration; requires the partial in `var` to be a
/// unit at the origin.
fn implicit_solve(g: &TruncSeries, var: usize, prec: usize) -> Result<UniSeries> {
    let ctx = g.ctx().clone();
    let gd = g.partial(var);
    let t = UniSeries::monomial(&ctx, ctx.one(), 1, prec);
    let mut phi = UniSeries::zero(&ctx, prec);
    let mut steps = 0usize;
    loop {
        let (val, der) = if var == 1 {
            (g.eval_uniseries(&t, &phi), gd.eval_uniseries(&t, &phi))
        } else {
            (g.eval_uniseries(&phi, &t), gd.eval_uniseries(&phi, &t))
        };
        if val.is_zero() {
            return Ok(phi);
        }
        phi = phi.sub(&val.mul(&der.invert_unit()?));
        steps += 1;
        if steps > prec + 2 {
            return Err(Error::PrecisionExhausted);
        }
    }
}

/// Parametrize the irreducible plane curve `f = 0` by iterated blow-ups,
/// following the unique point of the strict transform on each exceptional
/// divisor. Any step admitting more than one such point (the tangent cone
/// is not the power of a single linear form) signals a reducible curve, as
/// does a transform that never becomes smooth (a non-reduced input).
pub fn hn_parametrize(f: &TruncSeries, t_prec: usize) -> Result<Parametrization> {
    assert_eq!(f.nvars(), 2);
    if !f.is_polynomial() {
        return Err(Error::Domain(String::from(
            "parametrization requires polynomial input",
        )));
    }
    let ctx = f.ctx().clone();
    let mut g = f.clone();
    let mut steps: Vec<BlowStep> = Vec::new();
    let d = f.max_degree() as usize;
    let max_steps = (d + 2) * (d + 2) + 16;
    loop {
        let m = match g.ord() {
            ExtNat::Finite(m) => m as u32,
            _ => return Err(Error::Domain(String::from("zero series has no branch"))),
        };
        if m == 0 {
            return Err(Error::Domain(String::from("unit series has no branch")));
        }
        if m == 1 {
            break;
        }
        if steps.len() > max_steps {
            return Err(Error::Reducible);
        }
        let init = g.initial_form();
        // tangent cone as a polynomial in T = Y/X
        let coeffs: Vec<FieldElem> = (0..=m)
            .map(|j| init.coeff(&Monomial(vec![m - j, j])))
            .collect();
        let fp = FPoly::new(ctx.clone(), coeffs);
        let deg = fp.degree().unwrap_or(0) as u32;
        if deg == 0 {
            // tangent cone c X^m: tangent direction X = 0
            steps.push(BlowStep::Swap);
            g = g.blowup_strict_transform(1);
            continue;
        }
        if deg < m {
            // X divides the tangent cone but is not all of it
            return Err(Error::Reducible);
        }
        let z0 = pure_power_root(&fp).ok_or(Error::Reducible)?;
        let bt = g.blowup_strict_transform(0);
        let images = vec![
            TruncSeries::var(&ctx, 2, 0),
            TruncSeries::var(&ctx, 2, 1).add(&TruncSeries::constant(&ctx, 2, z0.clone())),
        ];
        g = bt.subst(&images)?;
        steps.push(BlowStep::Center(z0));
    }
    // terminal chart: the transform is smooth; solve for the branch
    let init = g.initial_form();
    let b = init.coeff(&Monomial(vec![0, 1]));
    let (mut x, mut y) = if !b.is_zero() {
        let phi = implicit_solve(&g, 1, t_prec)?;
        (UniSeries::monomial(&ctx, ctx.one(), 1, t_prec), phi)
    } else {
        let phi = implicit_solve(&g, 0, t_prec)?;
        (phi, UniSeries::monomial(&ctx, ctx.one(), 1, t_prec))
    };
    for step in steps.iter().rev() {
        match step {
            BlowStep::Center(z0) => {
                let shift = UniSeries::constant(&ctx, z0.clone(), t_prec);
                y = x.mul(&y.add(&shift));
            }
            BlowStep::Swap => {
                x = x.mul(&y);
            }
        }
    }
    let check = f.eval_uniseries(&x, &y);
    if !check.is_zero() {
        return Err(Error::Reducible);
    }
    if x.is_zero() && y.is_zero() {
        return Err(Error::PrecisionExhausted);
    }
    Ok(Parametrization { x, y })
}

/// The canonical representation `s = a_0 v_0 + sum a_i v_i` with
/// `0 <= a_i < n_i` for `i >= 1`, where `n_i = e_{i-1} / e_i`; it is the
/// unique such representation when `s` lies in the semigroup.
fn represent_bounded(s: u64, gens: &[u64]) -> Option<Vec<u64>> {
    let v0 = gens[0];
    let k = gens.len() - 1;
    let mut n = vec![0u64; k + 1];
    let mut e_prev = v0;
    for i in 1..=k {
        let e = gcd(e_prev, gens[i]);
        n[i] = e_prev / e;
        e_prev = e;
    }
    let mut exps = vec![0u64; k + 1];
    fn go(s: u64, i: usize, gens: &[u64], n: &[u64], exps: &mut [u64]) -> bool {
        if i == 0 {
            if s % gens[0] == 0 {
                exps[0] = s / gens[0];
                return true;
            }
            return false;
        }
        for a in 0..n[i] {
            let used = a * gens[i];
            if used > s {
                break;
            }
            exps[i] = a;
            if go(s - used, i - 1, gens, n, exps) {
                return true;
            }
        }
        false
    }
    if go(s, k, gens, &n, &mut exps) {
        Some(exps)
    } else {
        None
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Minimal generators of the semigroup of values of `k[[x(t), y(t)]]`,
/// together with a witness series for each generator.
///
/// Starting from `x` the algorithm repeatedly cancels leading terms of the
/// current candidate against products of the witnesses already found, until
/// the candidate's order escapes the semigroup generated so far; for a
/// plane branch the process stops once the generators become coprime.
fn semigroup_from_param(param: &Parametrization) -> Result<(Vec<u64>, Vec<UniSeries>)> {
    let x = &param.x;
    let y = &param.y;
    let prec = param.t_prec();
    let v0 = x.ord().ok_or(Error::PrecisionExhausted)? as u64;
    if v0 == 0 {
        return Err(Error::Domain(String::from(
            "parametrization does not vanish at the origin",
        )));
    }
    let mut gens = vec![v0];
    let mut reps = vec![x.clone()];
    if v0 == 1 {
        return Ok((gens, reps));
    }
    let mut cand = y.clone();
    loop {
        // cancel while the candidate's order is representable
        let mut guard = 0usize;
        loop {
            let s = match cand.ord() {
                Some(s) => s as u64,
                None => return Err(Error::PrecisionExhausted),
            };
            // the bounded representation of `n_k v_k` never uses the last
            // generator, so subtracting it always makes progress
            let exps = match represent_bounded(s, &gens) {
                Some(e) => e,
                None => break,
            };
            let mut prod = UniSeries::constant(x.ctx(), x.ctx().one(), prec);
            for (j, &e) in exps.iter().enumerate() {
                if e > 0 {
                    prod = prod.mul(&reps[j].pow(e as u32));
                }
            }
            let (so, sc) = cand.leading_coeff().unwrap();
            let (po, pc) = prod.leading_coeff().unwrap();
            debug_assert_eq!(so, po);
            let lam = sc.div(&pc)?;
            cand = cand.sub(&prod.scale(&lam));
            guard += 1;
            if guard > prec + 2 {
                return Err(Error::PrecisionExhausted);
            }
        }
        let v_new = cand.ord().unwrap() as u64;
        gens.push(v_new);
        reps.push(cand.clone());
        let e: u64 = gens.iter().fold(0, |a, &b| gcd(a, b));
        if e == 1 {
            break;
        }
        // next candidate: the power of the last witness whose value falls
        // back into the previous semigroup
        let e_prev: u64 = gens[..gens.len() - 1].iter().fold(0, |a, &b| gcd(a, b));
        let n = e_prev / e;
        cand = cand.pow(n as u32);
        if gens.len() > 64 {
            return Err(Error::PrecisionExhausted);
        }
    }
    Ok((gens, reps))
}

/// A fully analyzed plane branch.
///
/// `param` parametrizes the input `f` in its original coordinates. The
/// normalized data (`wpoly`, the semigroup, approximate roots) refer to
/// coordinates in which `X` is transversal, i.e. `I(f, X) = v0`; `swapped`
/// records whether the two variables were exchanged to achieve this.
#[derive(Debug, Clone)]
pub struct BranchData {
    /// The input, possibly with `X` and `Y` exchanged.
    f: TruncSeries,
    swapped: bool,
    /// Parametrization of the normalized `f`; `ord_t x = v0 <= ord_t y`.
    param: Parametrization,
    semigroup: NumericalSemigroup,
    wpoly: YPolynomial,
    t_prec: usize,
    x_prec: usize,
}

/// Cap for the adaptive `t`-precision search.
const T_PREC_CAP: usize = 1 << 12;

impl BranchData {
    /// Analyze a branch with an explicit `t`-precision, or with the default
    /// adaptive choice `4 (c + v0)` when `None`.
    pub fn analyze(f: &TruncSeries, t_prec: Option<usize>) -> Result<BranchData> {
        assert_eq!(f.nvars(), 2);
        let mut p = t_prec.unwrap_or(64);
        loop {
            match Self::analyze_at(f, p) {
                Ok(bd) => {
                    if t_prec.is_none() {
                        let c = bd.semigroup.conductor() as usize;
                        let v0 = bd.semigroup.multiplicity() as usize;
                        let want = 4 * (c + v0);
                        if p < want {
                            return Self::analyze_at(f, want);
                        }
                    }
                    return Ok(bd);
                }
                Err(Error::PrecisionExhausted) if t_prec.is_none() && p < T_PREC_CAP => {
                    p *= 2;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn analyze_at(f: &TruncSeries, t_prec: usize) -> Result<BranchData> {
        let param0 = hn_parametrize(f, t_prec)?;
        let ox = param0.x.ord().ok_or(Error::PrecisionExhausted)?;
        let oy = param0.y.ord().unwrap_or(usize::MAX);
        let (fn_, param, swapped) = if ox <= oy {
            (f.clone(), param0, false)
        } else {
            let ctx = f.ctx().clone();
            let images = vec![TruncSeries::var(&ctx, 2, 1), TruncSeries::var(&ctx, 2, 0)];
            (f.subst(&images)?, param0.swapped(), true)
        };
        let (gens, _reps) = semigroup_from_param(&param)?;
        let semigroup = NumericalSemigroup::new(&gens)?;
        let v0 = semigroup.multiplicity() as usize;
        let x_prec = 64.max(t_prec / v0.max(1) + 8);
        let (_unit, wpoly) = weierstrass_prepare(&fn_, x_prec as u32)?;
        Ok(BranchData {
            f: fn_,
            swapped,
            param,
            semigroup,
            wpoly,
            t_prec,
            x_prec,
        })
    }

    /// The analyzed series in normalized coordinates.
    pub fn f(&self) -> &TruncSeries {
        &self.f
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn param(&self) -> &Parametrization {
        &self.param
    }

    pub fn semigroup(&self) -> &NumericalSemigroup {
        &self.semigroup
    }

    /// Monic Weierstrass polynomial of `Y`-degree `v0` (normalized
    /// coordinates), associate to `f` by a unit.
    pub fn wpoly(&self) -> &YPolynomial {
        &self.wpoly
    }

    pub fn t_prec(&self) -> usize {
        self.t_prec
    }

    pub fn x_prec(&self) -> usize {
        self.x_prec
    }

    pub fn multiplicity(&self) -> u64 {
        self.semigroup.multiplicity()
    }

    pub fn conductor(&self) -> u64 {
        self.semigroup.conductor()
    }

    /// `I(f, h)` with `h` in the coordinates of the original input.
    pub fn intersection(&self, h: &TruncSeries) -> ExtNat {
        if self.swapped {
            let ctx = h.ctx().clone();
            let images = vec![TruncSeries::var(&ctx, 2, 1), TruncSeries::var(&ctx, 2, 0)];
            match h.subst(&images) {
                Ok(hs) => self.param.value(&hs),
                Err(_) => ExtNat::AtLeast(0),
            }
        } else {
            self.param.value(h)
        }
    }

    /// `I(f, h)` with `h` in normalized coordinates.
    pub fn intersection_normalized(&self, h: &TruncSeries) -> ExtNat {
        self.param.value(h)
    }
}

/// Semigroup of values of an irreducible plane curve.
pub fn semigroup_of_values(f: &TruncSeries) -> Result<NumericalSemigroup> {
    Ok(BranchData::analyze(f, None)?.semigroup)
}

/// `I(f, h)` as `ord_t h(x(t), y(t))` along a parametrization of `f`.
pub fn intersection_multiplicity(f: &TruncSeries, h: &TruncSeries) -> Result<ExtNat> {
    Ok(BranchData::analyze(f, None)?.intersection(h))
}

/// `I(f, h)` as `ord_X Res_Y(W, h)` with `W` the Weierstrass polynomial of
/// `f`; an independent check of the parametrization route.
pub fn intersection_via_resultant(
    f: &TruncSeries,
    h: &TruncSeries,
    x_prec: usize,
) -> Result<ExtNat> {
    let (_u, w) = weierstrass_prepare(f, x_prec as u32)?;
    let hy = YPolynomial::from_series(h, x_prec);
    if hy.is_zero() {
        return Err(Error::Domain(String::from("resultant with zero")));
    }
    let r = crate::series::resultant_y(&w, &hy)?;
    Ok(r.ord_extnat())
}

// ---------------------------------------------------------------------------
// approximate roots
// ---------------------------------------------------------------------------

/// The Tschirnhausen approximate `d`-th root of a monic `Y`-polynomial `f`
/// of degree `n` with `d | n` and `d` invertible: the unique monic `g` of
/// degree `n/d` whose `g`-adic expansion of `f` has no `g^{d-1}` term.
pub fn tschirnhausen(f: &YPolynomial, d: u64) -> Result<YPolynomial> {
    let ctx = f.ctx().clone();
    let n = f.degree().ok_or(Error::NotAUnit)? as u64;
    if d == 0 || n % d != 0 {
        return Err(Error::Domain(String::from(
            "approximate root degree must divide the degree",
        )));
    }
    let p = ctx.characteristic();
    if p > 0 && d % p == 0 {
        return Err(Error::WildExponent { n: d, p });
    }
    let nd = (n / d) as usize;
    let xp = f.x_prec();
    let mut coeffs = vec![UniSeries::zero(&ctx, xp); nd + 1];
    coeffs[nd] = UniSeries::constant(&ctx, ctx.one(), xp);
    let mut g = YPolynomial::new(&ctx, coeffs);
    let dinv = FieldElem::from_int(&ctx, d as i64).inv()?;
    for _ in 0..(4 * xp + 16) {
        // g-adic expansion: collect the coefficient of g^{d-1}
        let mut rem = f.clone();
        let mut c_top = YPolynomial::zero(&ctx);
        for i in 0..d {
            let (q, r) = rem.divrem(&g)?;
            if i == d - 1 {
                c_top = r;
            }
            rem = q;
        }
        if c_top.is_zero() {
            return Ok(g);
        }
        g = g.add(&c_top.scale(&dinv));
    }
    Err(Error::Domain(String::from(
        "approximate root iteration did not stabilize",
    )))
}

/// The approximate roots `X, f_0, ..., f_{g-1}` of a branch, where `f_j` is
/// the approximate `e_j`-th root of the Weierstrass polynomial; each
/// satisfies `I(f, f_j) = v_{j+1}`.
pub fn approximate_roots(bd: &BranchData) -> Result<Vec<YPolynomial>> {
    let ctx = bd.f.ctx().clone();
    let gens = bd.semigroup.generators();
    let v0 = gens[0];
    let p = ctx.characteristic();
    if p > 0 && v0 % p == 0 {
        return Err(Error::WildMultiplicity { p, v0 });
    }
    let xp = bd.x_prec;
    let x_poly = YPolynomial::new(
        &ctx,
        vec![UniSeries::monomial(&ctx, ctx.one(), 1, xp)],
    );
    let mut out = vec![x_poly];
    let g = gens.len() - 1;
    for j in 0..g {
        let e_j = gens[..=j].iter().fold(0, |a, &b| gcd(a, b));
        out.push(tschirnhausen(&bd.wpoly, e_j)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Delgado's formula and the conductor identities
// ---------------------------------------------------------------------------

/// `[f, g] = f_X g_Y - f_Y g_X`.
pub fn jacobian_bracket(f: &TruncSeries, g: &TruncSeries) -> TruncSeries {
    let fx = f.partial(0);
    let fy = f.partial(1);
    let gx = g.partial(0);
    let gy = g.partial(1);
    fx.mul(&gy).sub(&fy.mul(&gx))
}

fn bracket_ypoly(f: &YPolynomial, g: &YPolynomial) -> YPolynomial {
    f.derivative_x()
        .mul(&g.derivative_y())
        .sub(&f.derivative_y().mul(&g.derivative_x()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelgadoReport {
    /// `I(f, [f, g])`; not finite when the bracket falls into `<f>`.
    pub lhs: ExtNat,
    /// `I(f, f_Y) - I(f, X) + I(f, g)`.
    pub rhs: u64,
    pub i_fg: u64,
    pub i_ffy: u64,
    pub v0: u64,
    pub inequality_holds: bool,
    pub equality: bool,
    /// `p | I(f, g)`; equality is expected exactly when this is false.
    pub p_divides_ifg: bool,
}

/// Verify Delgado's inequality for a branch and a non-invertible `g`, both
/// in the normalized coordinates of `bd`.
pub fn delgado_check(bd: &BranchData, g: &TruncSeries) -> Result<DelgadoReport> {
    let ctx = bd.f.ctx().clone();
    let p = ctx.characteristic();
    let v0 = bd.multiplicity();
    if p > 0 && v0 % p == 0 {
        return Err(Error::WildMultiplicity { p, v0 });
    }
    let fy = bd.f.partial(1);
    let finite = |e: ExtNat| e.finite().ok_or(Error::PrecisionExhausted);
    let i_fg = finite(bd.param.value(g))?;
    let i_ffy = finite(bd.param.value(&fy))?;
    let lhs = bd.param.value(&jacobian_bracket(&bd.f, g));
    let rhs = i_ffy + i_fg - v0;
    let inequality_holds = match lhs {
        ExtNat::Finite(v) => v >= rhs,
        ExtNat::Infinite => true,
        ExtNat::AtLeast(b) => b >= rhs,
    };
    Ok(DelgadoReport {
        lhs,
        rhs,
        i_fg,
        i_ffy,
        v0,
        inequality_holds,
        equality: lhs == ExtNat::Finite(rhs),
        p_divides_ifg: p > 0 && i_fg % p == 0,
    })
}

/// Check `I(f, f_Y) = c(f) + v0 - 1` on the Weierstrass polynomial of the
/// branch, computing both sides independently.
pub fn check_fy_value(bd: &BranchData) -> Result<bool> {
    let ctx = bd.f.ctx().clone();
    let p = ctx.characteristic();
    let v0 = bd.multiplicity();
    if p > 0 && v0 % p == 0 {
        return Err(Error::WildMultiplicity { p, v0 });
    }
    let wy = bd.wpoly.derivative_y();
    let i = bd
        .param
        .value_ypoly(&wy)
        .finite()
        .ok_or(Error::PrecisionExhausted)?;
    Ok(i == bd.conductor() + v0 - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConductorReport {
    pub mu: ExtNat,
    pub tilde_mu: Option<ExtNat>,
    pub conductor: u64,
    pub generators: Vec<u64>,
    pub tame: bool,
    /// `mu >= c` whenever `mu` is finite (Deligne); `None` when `mu` is not
    /// certified finite.
    pub deligne_holds: Option<bool>,
    /// `mu - c` when both are finite: the count of wild vanishing cycles.
    pub gap: Option<u64>,
}

/// Compare the Milnor number of a branch with its conductor; for tame
/// semigroups the two agree (and equal the Hilbert-Samuel multiplicity of
/// the Tjurina ideal).
pub fn milnor_vs_conductor(
    f: &TruncSeries,
    rng: &mut dyn RngCore,
) -> Result<ConductorReport> {
    let bd = BranchData::analyze(f, None)?;
    let mu = milnor(f);
    let c = bd.conductor();
    let p = f.ctx().characteristic();
    let tame = bd.semigroup.is_tame(p);
    let tmu = tilde_mu(f, 6, rng).ok();
    let deligne = match mu {
        ExtNat::Finite(m) => Some(m >= c),
        ExtNat::Infinite => Some(true),
        ExtNat::AtLeast(_) => None,
    };
    let gap = mu.finite().map(|m| m - c);
    Ok(ConductorReport {
        mu,
        tilde_mu: tmu,
        conductor: c,
        generators: bd.semigroup.generators().to_vec(),
        tame,
        deligne_holds: deligne,
        gap,
    })
}

// ---------------------------------------------------------------------------
// the branch tower and q-polynomials
// ---------------------------------------------------------------------------

/// One level of the tower of approximate roots: the root `f_j` analyzed as
/// a branch in its own right.
#[derive(Debug, Clone)]
pub struct TowerLevel {
    pub poly: YPolynomial,
    pub series: TruncSeries,
    pub param: Parametrization,
    pub sgp: NumericalSemigroup,
    /// `l v0 + a_max` with `m^l` inside the jacobian ideal of this level's
    /// polynomial and `a_max` the top Apery value: any `Y`-polynomial of
    /// degree below `v0` whose value exceeds this lies in the jacobian
    /// ideal.
    pub bound: u64,
}

/// The approximate-root tower of a tame branch: levels `0..=g` hold
/// `f_0, ..., f_{g-1}, f` and `roots[i]` is `X` for `i = 0` and `f_{i-1}`
/// for `i >= 1`.
#[derive(Debug)]
pub struct BranchTower {
    pub levels: Vec<TowerLevel>,
    pub roots: Vec<YPolynomial>,
    pub t_prec: usize,
}

/// Convert a `Y`-polynomial with polynomial coefficients back to an exact
/// series; fails if a coefficient may have been truncated.
fn ypoly_to_exact_series(f: &YPolynomial) -> Result<TruncSeries> {
    for c in f.coeffs() {
        if let Some((deg, _)) = c.leading_coeff() {
            if deg + 4 > c.prec() {
                return Err(Error::PrecisionExhausted);
            }
        }
    }
    Ok(f.to_series(Prec::Exact))
}

fn level_bound(series: &TruncSeries, sgp: &NumericalSemigroup) -> Result<u64> {
    let l = jacobian_ideal(series).mprimary_exponent()?;
    let a_max = *sgp.apery_set().iter().max().unwrap_or(&0);
    Ok(l * sgp.multiplicity() + a_max)
}

/// Build the branch tower for a tame branch. Each approximate root is
/// re-parametrized and its semigroup verified against the expected
/// truncation `<v_0/e_j, ..., v_j/e_j>`.
pub fn branch_tower(bd: &BranchData) -> Result<BranchTower> {
    let p = bd.f.ctx().characteristic();
    if !bd.semigroup.is_tame(p) {
        return Err(Error::NotTame);
    }
    let roots = approximate_roots(bd)?;
    let gens = bd.semigroup.generators();
    let g = gens.len() - 1;
    let mut levels = Vec::new();
    for j in 0..g {
        let poly = roots[j + 1].clone();
        let series = ypoly_to_exact_series(&poly)?;
        let param = hn_parametrize(&series, bd.t_prec)?;
        let e_j = gens[..=j].iter().fold(0, |a, &b| gcd(a, b));
        let expected: Vec<u64> = gens[..=j].iter().map(|&v| v / e_j).collect();
        let sgp = NumericalSemigroup::new(&expected)?;
        // verify the expected semigroup against the parametrization
        let (got, _) = semigroup_from_param(&param)?;
        if NumericalSemigroup::new(&got)? != sgp {
            return Err(Error::Domain(String::from(
                "approximate root has an unexpected semigroup",
            )));
        }
        let bound = if j == 0 {
            0
        } else {
            level_bound(&series, &sgp)?
        };
        levels.push(TowerLevel {
            poly,
            series,
            param,
            sgp,
            bound,
        });
    }
    // top level: the branch itself, in Weierstrass form
    let (series, poly) = match ypoly_to_exact_series(&bd.wpoly) {
        Ok(s) => (s, bd.wpoly.clone()),
        Err(_) => (bd.wpoly.to_series(Prec::Trunc(bd.x_prec as u32)), bd.wpoly.clone()),
    };
    let bound = level_bound(&series, &bd.semigroup)?;
    levels.push(TowerLevel {
        poly,
        series,
        param: bd.param.clone(),
        sgp: bd.semigroup.clone(),
        bound,
    });
    Ok(BranchTower {
        levels,
        roots,
        t_prec: bd.t_prec,
    })
}

impl BranchTower {
    pub fn genus(&self) -> usize {
        self.levels.len() - 1
    }

    fn level(&self, j: usize) -> &TowerLevel {
        &self.levels[j]
    }
}

/// `sum_i P_i [F, roots[idx_i]] - defect`, where `F` is the polynomial of
/// the level the term list is used at and the defect is a concrete
/// `Y`-polynomial certified to lie in the jacobian ideal of that level by
/// its value alone.
#[derive(Debug, Clone)]
struct QRep {
    terms: Vec<(YPolynomial, usize)>,
    defect: YPolynomial,
}

impl QRep {
    fn map_polys(&self, f: impl Fn(&YPolynomial) -> YPolynomial) -> QRep {
        QRep {
            terms: self.terms.iter().map(|(p, i)| (f(p), *i)).collect(),
            defect: f(&self.defect),
        }
    }
}

/// Builder with memoized per-level q-polynomials.
pub struct QBuilder<'a> {
    tower: &'a BranchTower,
    cache: BTreeMap<(usize, u64), QRep>,
}

/// A certified element of the jacobian ideal realizing the value
/// `s + c(f) - 1`.
#[derive(Debug, Clone)]
pub struct QPolynomial {
    pub s: u64,
    pub q: YPolynomial,
    /// `I(f, q)`, expected `s + c - 1`.
    pub value: ExtNat,
    pub degree_ok: bool,
    pub value_ok: bool,
    /// Normal form of `q` with respect to a standard basis of `J(f)`
    /// vanishes.
    pub in_jacobian: bool,
}

impl<'a> QBuilder<'a> {
    pub fn new(tower: &'a BranchTower) -> QBuilder<'a> {
        QBuilder {
            tower,
            cache: BTreeMap::new(),
        }
    }

    fn eval_terms(&self, terms: &[(YPolynomial, usize)], level: usize) -> YPolynomial {
        let fpoly = &self.tower.level(level).poly;
        let ctx = fpoly.ctx().clone();
        let mut acc = YPolynomial::zero(&ctx);
        for (p, idx) in terms {
            let br = bracket_ypoly(fpoly, &self.tower.roots[*idx]);
            acc = acc.add(&p.mul(&br));
        }
        acc
    }

    fn eval(&self, rep: &QRep, level: usize) -> YPolynomial {
        self.eval_terms(&rep.terms, level).sub(&rep.defect)
    }

    fn value_at(&self, level: usize, h: &YPolynomial) -> ExtNat {
        self.tower.level(level).param.value_ypoly(h)
    }

    /// Build `q_{f_level, s}` following the genus recursion.
    fn build(&mut self, level: usize, s: u64) -> Result<QRep> {
        if let Some(hit) = self.cache.get(&(level, s)) {
            return Ok(hit.clone());
        }
        let rep = self.build_uncached(level, s)?;
        self.cache.insert((level, s), rep.clone());
        Ok(rep)
    }

    fn build_uncached(&mut self, level: usize, s: u64) -> Result<QRep> {
        let ctx = self.tower.level(level).poly.ctx().clone();
        let xp = self.tower.level(level).poly.x_prec();
        if s == 0 {
            return Err(Error::Domain(String::from("q-polynomial needs s >= 1")));
        }
        if level == 0 {
            // smooth seed: q = X^{s-1} [f, X]
            let p = YPolynomial::new(
                &ctx,
                vec![UniSeries::monomial(&ctx, ctx.one(), (s - 1) as usize, xp)],
            );
            return Ok(QRep {
                terms: vec![(p, 0)],
                defect: YPolynomial::zero(&ctx),
            });
        }
        let lev = self.tower.level(level);
        let sgp = lev.sgp.clone();
        if !sgp.contains(s) {
            return Err(Error::Domain(String::from(
                "q-polynomial target outside the semigroup",
            )));
        }
        let gens = sgp.generators().to_vec();
        let top = gens.len() - 1;
        let n = sgp.n(top);
        let vg = gens[top];
        let below = &self.tower.level(level - 1).sgp;
        // unique decomposition s = n t + w vg with t in the lower semigroup
        let mut found: Option<(u64, u64)> = None;
        for w in 0..n {
            if w * vg > s {
                break;
            }
            let r = s - w * vg;
            if r % n == 0 && below.contains(r / n) {
                found = Some((r / n, w));
                break;
            }
        }
        let (t, w) = found.ok_or_else(|| {
            Error::Domain(String::from("no semigroup decomposition for target"))
        })?;
        if w == 0 {
            // lift the lower-level construction, re-bracketing against the
            // current level's polynomial; the lower defect consists of terms
            // of enormous value and is dropped
            let inner = self.build(level - 1, t)?;
            return Ok(QRep {
                terms: inner.terms,
                defect: YPolynomial::zero(&ctx),
            });
        }
        // seed [f, f_{g-1}] for s = vg
        let one_poly = YPolynomial::new(
            &ctx,
            vec![UniSeries::constant(&ctx, ctx.one(), xp)],
        );
        let mut q = QRep {
            terms: vec![(one_poly, level)],
            defect: YPolynomial::zero(&ctx),
        };
        let fg1 = self.tower.roots[level].clone();
        for i in 1..w {
            let reduced = self.claim2(level, &q, i * vg)?;
            q = reduced.map_polys(|p| p.mul(&fg1));
        }
        if t > 0 {
            let reduced = self.claim2(level, &q, w * vg)?;
            // minimal-value term of the lower-level construction
            let inner = self.build(level - 1, t)?;
            let mut best: Option<(u64, YPolynomial)> = None;
            for (p, idx) in &inner.terms {
                let m = p.mul(&self.tower.roots[*idx]);
                if let ExtNat::Finite(v) = self.value_at(level - 1, &m) {
                    if best.as_ref().map(|(bv, _)| v < *bv).unwrap_or(true) {
                        best = Some((v, m));
                    }
                }
            }
            let (tv, mult) = best.ok_or(Error::PrecisionExhausted)?;
            if tv != t {
                return Err(Error::Domain(String::from(
                    "minimal term of inner construction has wrong value",
                )));
            }
            q = reduced.map_polys(|p| p.mul(&mult));
        }
        Ok(q)
    }

    /// Degree reduction: given a representation of `h` with
    /// `I(F, h) = c - 1 + s` and `n` not dividing `s`, produce a
    /// representation of an `h'` with the same value and
    /// `deg h' < deg F - deg f_{g-1}`, by sweeping with lifted lower-level
    /// q-polynomials. The iteration stops once the working remainder's
    /// value passes the level bound, at which point it is absorbed into the
    /// defect.
    fn claim2(&mut self, level: usize, h: &QRep, s: u64) -> Result<QRep> {
        let lev = self.tower.level(level);
        let ctx = lev.poly.ctx().clone();
        let c = lev.sgp.conductor();
        let top = lev.sgp.generators().len() - 1;
        let n = lev.sgp.n(top);
        if s % n == 0 {
            return Err(Error::Domain(String::from(
                "degree reduction requires n not dividing s",
            )));
        }
        let bound = lev.bound;
        let fg1 = self.tower.roots[level].clone();
        let fg_pow = fg1.pow(n as u32 - 1);
        let mut out_terms = h.terms.clone();
        let mut out_defect = h.defect.clone();
        let mut hprime = YPolynomial::zero(&ctx);
        let mut cur = self.eval(h, level);
        let mut first = true;
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > (bound as usize) + 64 {
                return Err(Error::PrecisionExhausted);
            }
            if cur.is_zero() {
                break;
            }
            let val = match self.value_at(level, &cur) {
                ExtNat::Finite(v) => v,
                _ => {
                    // value beyond the t-precision, which exceeds the bound
                    if self.tower.t_prec as u64 > bound + c {
                        out_defect = out_defect.add(&cur);
                        break;
                    }
                    return Err(Error::PrecisionExhausted);
                }
            };
            if val > bound + c - 1 {
                out_defect = out_defect.add(&cur);
                break;
            }
            if val < c - 1 + 1 {
                return Err(Error::Domain(String::from(
                    "degree reduction value below the conductor shift",
                )));
            }
            let scur = val - (c - 1);
            let active = if scur % n == 0 && !first {
                cur.clone()
            } else {
                // split off the low-degree part, which is kept as output
                let (_quot, rem) = cur.divrem(&fg_pow)?;
                hprime = hprime.add(&rem);
                let act = cur.sub(&rem);
                if act.is_zero() {
                    break;
                }
                act
            };
            first = false;
            let aval = match self.value_at(level, &active) {
                ExtNat::Finite(v) => v,
                _ => {
                    if self.tower.t_prec as u64 > bound + c {
                        out_defect = out_defect.add(&active);
                        break;
                    }
                    return Err(Error::PrecisionExhausted);
                }
            };
            if aval > bound + c - 1 {
                out_defect = out_defect.add(&active);
                break;
            }
            let shifted = aval - (c - 1);
            if shifted % n != 0 {
                return Err(Error::Domain(String::from(
                    "active part value not divisible by the top ratio",
                )));
            }
            let u = shifted / n;
            if u == 0 || !self.tower.level(level - 1).sgp.contains(u) {
                return Err(Error::Domain(String::from(
                    "sweep value outside the lower semigroup",
                )));
            }
            let inner = self.build(level - 1, u)?;
            let qpoly = self.eval_terms(&inner.terms, level);
            let qval = self.value_at(level, &qpoly);
            if qval != ExtNat::Finite(aval) {
                return Err(Error::Domain(String::from(
                    "lifted q-polynomial has unexpected value",
                )));
            }
            // match leading t-coefficients
            let e1 = active.eval(&lev.param.x, &lev.param.y);
            let e2 = qpoly.eval(&lev.param.x, &lev.param.y);
            let alpha = e1.coeff(aval as usize).div(&e2.coeff(aval as usize))?;
            cur = active.sub(&qpoly.scale(&alpha));
            for (p, idx) in &inner.terms {
                out_terms.push((p.scale(&alpha.neg()), *idx));
            }
        }
        Ok(QRep {
            terms: out_terms,
            defect: out_defect,
        })
    }

    /// Build and certify the top-level q-polynomial for `s` in `S(f)*`.
    pub fn construct(&mut self, s: u64) -> Result<QPolynomial> {
        let g = self.tower.genus();
        let rep = self.build(g, s)?;
        let q = self.eval(&rep, g);
        let lev = self.tower.level(g);
        let c = lev.sgp.conductor();
        let v0 = lev.sgp.multiplicity();
        let value = self.value_at(g, &q);
        let degree_ok = q.degree().map(|d| (d as u64) < v0).unwrap_or(false);
        let value_ok = value == ExtNat::Finite(s + c - 1);
        let jac = jacobian_ideal(&lev.series);
        let qs = q.to_series(Prec::Trunc(q.x_prec() as u32));
        let in_jacobian = jac.membership(&qs) == Membership::In;
        Ok(QPolynomial {
            s,
            q,
            value,
            degree_ok,
            value_ok,
            in_jacobian,
        })
    }
}

/// Convenience wrapper: build the tower and a single q-polynomial.
pub fn construct_q(bd: &BranchData, s: u64) -> Result<QPolynomial> {
    let tower = branch_tower(bd)?;
    QBuilder::new(&tower).construct(s)
}

// ---------------------------------------------------------------------------
// the spanning family and reduction modulo the jacobian ideal
// ---------------------------------------------------------------------------

/// The family of `c(f)` products of approximate roots whose values realize
/// `S(f) \ (S(f) + c - 1)`, each of `Y`-degree below `v0`.
pub fn milnor_spanning_family(tower: &BranchTower) -> Result<Vec<(u64, YPolynomial)>> {
    let g = tower.genus();
    let lev = tower.level(g);
    let gens = lev.sgp.generators().to_vec();
    let v0 = gens[0];
    let top = gens.len() - 1;
    let ns: Vec<u64> = (1..=top).map(|i| lev.sgp.n(i)).collect();
    let sweep = lev.sgp.sweep_set();
    let ctx = lev.poly.ctx().clone();
    let xp = lev.poly.x_prec();
    let mut out = Vec::new();
    for &alpha in &sweep {
        // unique bounded representation alpha = j_{-1} v0 + sum j_i v_{i+1}
        // with 0 <= j_i < n_{i+1}
        let mut exps = vec![0u64; top];
        let found = find_bounded_rep(alpha, v0, &gens[1..], &ns, 0, &mut exps);
        if !found {
            return Err(Error::Domain(String::from(
                "sweep value without bounded representation",
            )));
        }
        let mut phi = YPolynomial::new(
            &ctx,
            vec![UniSeries::monomial(
                &ctx,
                ctx.one(),
                ((alpha - exps.iter().zip(&gens[1..]).map(|(e, v)| e * v).sum::<u64>()) / v0)
                    as usize,
                xp,
            )],
        );
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                phi = phi.mul(&tower.roots[i + 1].pow(e as u32));
            }
        }
        out.push((alpha, phi));
    }
    Ok(out)
}

fn find_bounded_rep(
    alpha: u64,
    v0: u64,
    vs: &[u64],
    ns: &[u64],
    i: usize,
    exps: &mut Vec<u64>,
) -> bool {
    if i == vs.len() {
        return alpha % v0 == 0;
    }
    for e in 0..ns[i] {
        if e * vs[i] > alpha {
            break;
        }
        exps[i] = e;
        if find_bounded_rep(alpha - e * vs[i], v0, vs, ns, i + 1, exps) {
            return true;
        }
    }
    exps[i] = 0;
    false
}

/// Result of reducing `h` against the spanning family modulo `J(f)`:
/// `h = sum coords * family + jacobian_part` to the working precision, with
/// `jacobian_part` in `J(f)`.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Pairs `(value, coefficient)` indexing the family by value.
    pub coords: Vec<(u64, FieldElem)>,
    pub jacobian_part: YPolynomial,
}

/// Sweep `h` by the spanning family (values in the sweep set) and by
/// q-polynomials (values in `S* + c - 1`) until its value passes the
/// membership bound.
pub fn reduce_mod_jacobian(
    tower: &BranchTower,
    family: &[(u64, YPolynomial)],
    h: &TruncSeries,
) -> Result<Reduction> {
    let g = tower.genus();
    let lev = tower.level(g);
    let ctx = lev.poly.ctx().clone();
    let c = lev.sgp.conductor();
    let bound = lev.bound;
    if (tower.t_prec as u64) <= bound + 2 {
        return Err(Error::PrecisionExhausted);
    }
    let mut qb = QBuilder::new(tower);
    let wy = lev.poly.derivative_y();
    let hy = YPolynomial::from_series(h, lev.poly.x_prec());
    let (quot, mut cur) = hy.divrem(&wy)?;
    let mut jac = quot.mul(&wy);
    let mut coords: Vec<(u64, FieldElem)> = Vec::new();
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > (bound as usize) + 64 {
            return Err(Error::PrecisionExhausted);
        }
        if cur.is_zero() {
            break;
        }
        let val = match lev.param.value_ypoly(&cur) {
            ExtNat::Finite(v) => v,
            _ => {
                jac = jac.add(&cur);
                break;
            }
        };
        if val > bound {
            jac = jac.add(&cur);
            break;
        }
        let e1 = cur.eval(&lev.param.x, &lev.param.y);
        let lead = e1.coeff(val as usize);
        if let Some((_, phi)) = family.iter().find(|(a, _)| *a == val) {
            let e2 = phi.eval(&lev.param.x, &lev.param.y);
            let alpha = lead.div(&e2.coeff(val as usize))?;
            cur = cur.sub(&phi.scale(&alpha));
            coords.push((val, alpha));
        } else {
            // val lies in S* + c - 1
            if val + 1 < c {
                return Err(Error::Domain(String::from(
                    "reduction value outside the semigroup partition",
                )));
            }
            let s = val - (c - 1);
            let qp = qb.construct(s)?;
            if qp.value != ExtNat::Finite(val) {
                return Err(Error::PrecisionExhausted);
            }
            let e2 = qp.q.eval(&lev.param.x, &lev.param.y);
            let beta = lead.div(&e2.coeff(val as usize))?;
            cur = cur.sub(&qp.q.scale(&beta));
            jac = jac.add(&qp.q.scale(&beta));
        }
    }
    let _ = ctx;
    Ok(Reduction {
        coords,
        jacobian_part: jac,
    })
}
