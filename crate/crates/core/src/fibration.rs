//! Smoothing probe for the fibration `f : 𝔸² → 𝔸¹` at an isolated
//! singularity.
//!
//! The fibration is a local smoothing (nearby fibers smooth near the origin)
//! exactly when `μ(f)` is finite. When `μ = ∞` the critical locus
//! `Z(f_X, f_Y)` contains a curve through the origin dominating the base
//! line; in two variables such a curve is cut out by a nonunit common factor
//! of the partials. This module computes that factor by exact bivariate gcd,
//! parametrizes one of its branches, and samples verified singular points on
//! nearby fibers `f = s`.

use crate::branch::{hn_parametrize, Parametrization};
use crate::error::{Error, Result};
use crate::extnat::ExtNat;
use crate::field::{FPoly, FieldCtx, FieldElem};
use crate::invariants::{is_isolated, milnor};
use crate::series::{Monomial, Prec, TruncSeries, UniSeries};
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

// ---------------------------------------------------------------------------
// exact bivariate polynomials as elements of (k[X])[Y]
// ---------------------------------------------------------------------------

/// Coefficient list in ascending `Y`-degree, trimmed.
type BiPoly = Vec<FPoly>;

fn bi_trim(mut a: BiPoly) -> BiPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn bi_from_series(f: &TruncSeries) -> BiPoly {
    let ctx = f.ctx().clone();
    let dy = f.terms().map(|(m, _)| m.0[1]).max().unwrap_or(0) as usize;
    let mut rows: Vec<Vec<FieldElem>> = vec![Vec::new(); dy + 1];
    for (m, c) in f.terms() {
        let (dx, j) = (m.0[0] as usize, m.0[1] as usize);
        if rows[j].len() <= dx {
            rows[j].resize(dx + 1, ctx.zero());
        }
        rows[j][dx] = c.clone();
    }
    bi_trim(rows.into_iter().map(|r| FPoly::new(ctx.clone(), r)).collect())
}

fn bi_to_series(a: &BiPoly, ctx: &FieldCtx) -> TruncSeries {
    let mut terms = Vec::new();
    for (j, c) in a.iter().enumerate() {
        for (i, e) in c.coeffs().iter().enumerate() {
            if !e.is_zero() {
                terms.push((Monomial(vec![i as u32, j as u32]), e.clone()));
            }
        }
    }
    TruncSeries::from_terms(ctx, 2, Prec::Exact, terms)
}

fn bi_scale(a: &BiPoly, c: &FPoly) -> BiPoly {
    a.iter().map(|x| x.mul(c)).collect()
}

fn bi_sub(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let n = a.len().max(b.len());
    let ctx = a
        .iter()
        .chain(b.iter())
        .next()
        .map(|c| c.ctx().clone())
        .expect("nonempty");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| FPoly::zero(ctx.clone()));
        let y = b.get(i).cloned().unwrap_or_else(|| FPoly::zero(ctx.clone()));
        out.push(x.sub(&y));
    }
    bi_trim(out)
}

/// Pseudo-remainder of `a` by `b` in `(k[X])[Y]`; `b` nonzero.
fn bi_prem(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = b.len() - 1;
    let lb = b.last().expect("nonzero divisor").clone();
    let mut r = a.clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r.last().expect("trimmed").clone();
        // r <- lb r - lr Y^{dr-db} b
        let mut shifted: BiPoly = vec![FPoly::zero(lb.ctx().clone()); dr - db];
        shifted.extend(bi_scale(b, &lr));
        r = bi_sub(&bi_scale(&r, &lb), &shifted);
    }
    r
}

/// Gcd of the `k[X]`-coefficients (monic), zero for the zero polynomial.
fn bi_content(a: &BiPoly, ctx: &FieldCtx) -> Result<FPoly> {
    let mut g = FPoly::zero(ctx.clone());
    for c in a {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.monic()? } else { g.gcd(c)? };
        if g.degree() == Some(0) {
            break;
        }
    }
    Ok(g)
}

fn bi_primitive(a: &BiPoly, ctx: &FieldCtx) -> Result<BiPoly> {
    let c = bi_content(a, ctx)?;
    if c.is_zero() || c.degree() == Some(0) {
        if a.is_empty() {
            return Ok(Vec::new());
        }
        // scale out the constant content
        let inv = a.last().expect("trimmed").leading().inv()?;
        return Ok(a.iter().map(|x| x.scale(&inv)).collect());
    }
    let mut out = Vec::with_capacity(a.len());
    for x in a {
        let (q, r) = x.divrem(&c)?;
        debug_assert!(r.is_zero());
        out.push(q);
    }
    Ok(out)
}

/// Gcd in `(k[X])[Y]` by the primitive pseudo-remainder sequence, normalized
/// so the leading `k[X]`-coefficient is monic.
fn bi_gcd(a: &BiPoly, b: &BiPoly, ctx: &FieldCtx) -> Result<BiPoly> {
    let a = bi_trim(a.clone());
    let b = bi_trim(b.clone());
    if a.is_empty() {
        return Ok(b);
    }
    if b.is_empty() {
        return Ok(a);
    }
    let content = bi_content(&a, ctx)?.gcd(&bi_content(&b, ctx)?)?;
    let mut u = bi_primitive(&a, ctx)?;
    let mut v = bi_primitive(&b, ctx)?;
    if u.len() < v.len() {
        core::mem::swap(&mut u, &mut v);
    }
    while !v.is_empty() {
        let r = bi_primitive(&bi_prem(&u, &v), ctx)?;
        u = v;
        v = r;
    }
    let g = bi_scale(&u, &content);
    // normalize
    let lc = g.last().expect("nonzero").leading().inv()?;
    Ok(g.iter().map(|x| x.scale(&lc)).collect())
}

fn bi_is_unit(a: &BiPoly) -> bool {
    a.len() == 1 && a[0].degree() == Some(0)
}

// ---------------------------------------------------------------------------
// witness branch and fiber sampling
// ---------------------------------------------------------------------------

/// A parametrized branch of the witness curve: prefer an irreducible
/// non-monomial part (via blow-ups); fall back to a coordinate axis when the
/// witness is a monomial times a unit.
fn witness_branch(g: &BiPoly, ctx: &FieldCtx, t_prec: usize) -> Option<Parametrization> {
    let g = bi_trim(g.clone());
    if g.is_empty() || bi_is_unit(&g) {
        return None;
    }
    // split off monomial factors X^a Y^b
    let y_mult = g.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let x_mult = g
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.coeffs().iter().position(|e| !e.is_zero()).unwrap_or(0))
        .min()
        .unwrap_or(0);
    let mut core_part: BiPoly = g[y_mult..]
        .iter()
        .map(|c| {
            if c.is_zero() {
                c.clone()
            } else {
                FPoly::new(ctx.clone(), c.coeffs()[x_mult..].to_vec())
            }
        })
        .collect();
    core_part = bi_trim(core_part);
    let axis = if y_mult > 0 {
        // the branch Y = 0
        Some(Parametrization {
            x: UniSeries::monomial(ctx, ctx.one(), 1, t_prec),
            y: UniSeries::zero(ctx, t_prec),
        })
    } else if x_mult > 0 {
        // the branch X = 0
        Some(Parametrization {
            x: UniSeries::zero(ctx, t_prec),
            y: UniSeries::monomial(ctx, ctx.one(), 1, t_prec),
        })
    } else {
        None
    };
    if !bi_is_unit(&core_part) && !core_part.is_empty() {
        let series = bi_to_series(&core_part, ctx);
        if let Ok(p) = hn_parametrize(&series, t_prec) {
            return Some(p);
        }
    }
    axis
}

/// A verified singular point of the fiber `f = s`.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub point: Vec<FieldElem>,
    pub s: FieldElem,
}

/// True iff every partial of `f` vanishes at `point` and `f(point) = s`.
/// The point may live in an extension of the coefficient field of `f`.
pub fn fiber_singularity_check(f: &TruncSeries, point: &[FieldElem], s: &FieldElem) -> bool {
    f.partials().iter().all(|d| d.eval_point(point).is_zero())
        && f.eval_point(point) == s.lift_to(
            point
                .first()
                .map(|c| c.ctx())
                .unwrap_or_else(|| f.ctx()),
        )
}

fn eval_uniseries_at(u: &UniSeries, t0: &FieldElem) -> FieldElem {
    let mut acc = u.ctx().zero();
    for c in u.coeffs().iter().rev() {
        acc = acc.mul(t0).add(c);
    }
    acc
}

const SAMPLE_BUDGET: usize = 50;

fn distinct_s_count(samples: &[SamplePoint]) -> usize {
    let mut seen: Vec<&FieldElem> = Vec::new();
    for sp in samples {
        if !seen.iter().any(|&x| *x == sp.s) {
            seen.push(&sp.s);
        }
    }
    seen.len()
}

/// Evaluate the witness branch at nonzero parameter values over `𝔽_{p^k}`,
/// `k ≤ 3` (small rationals in characteristic zero), keeping the points that
/// verify as fiber singularities. Stops once the samples show the witness
/// dominating the base line (two distinct `s` values, one nonzero) or the
/// budget runs out.
fn sample_fibers(
    f: &TruncSeries,
    param: &Parametrization,
    rng: &mut dyn RngCore,
) -> Vec<SamplePoint> {
    let base = f.ctx().clone();
    let mut ctxs = vec![base.clone()];
    if base.characteristic() > 0 && base.degree_over_prime() == 1 {
        for k in [2usize, 3] {
            if let Ok(e) = base.extend(k, rng) {
                ctxs.push(e);
            }
        }
    }
    let mut out = Vec::new();
    let mut used = 0usize;
    for cx in &ctxs {
        let fl = f.lift_to(cx);
        let px = param.x.lift_to(cx);
        let py = param.y.lift_to(cx);
        let p = cx.characteristic();
        let mut cands: Vec<FieldElem> = Vec::new();
        let span = if p == 0 { 9 } else { p.saturating_sub(1).min(9) };
        for i in 1..=span {
            cands.push(FieldElem::from_int(cx, i as i64));
        }
        if let Some(gen) = cx.generator() {
            for i in 0..4 {
                cands.push(gen.add(&FieldElem::from_int(cx, i)));
            }
        }
        while cands.len() < 16 {
            cands.push(cx.random(rng));
        }
        for t0 in cands {
            if used >= SAMPLE_BUDGET {
                return out;
            }
            used += 1;
            if t0.is_zero() {
                continue;
            }
            let x0 = eval_uniseries_at(&px, &t0);
            let y0 = eval_uniseries_at(&py, &t0);
            let point = vec![x0, y0];
            if out.iter().any(|sp: &SamplePoint| sp.point == point) {
                continue;
            }
            let s = fl.eval_point(&point);
            if fiber_singularity_check(&fl, &point, &s) {
                out.push(SamplePoint { point, s });
            }
        }
        if distinct_s_count(&out) >= 2 && out.iter().any(|sp| !sp.s.is_zero()) {
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// the verdict
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Smoothing,
    NotSmoothing,
}

/// Report of the smoothing probe. `verdict = Smoothing ⇔ mu finite`; when
/// not smoothing, `witness_factor` is a nonunit common factor of the
/// partials cutting out a critical curve through the origin, and `samples`
/// are verified singular points on the fibers it meets.
#[derive(Debug, Clone)]
pub struct SmoothingReport {
    pub verdict: Verdict,
    pub mu: ExtNat,
    pub witness_factor: Option<TruncSeries>,
    pub witness_param: Option<Parametrization>,
    pub samples: Vec<SamplePoint>,
}

/// Decide whether `f = s` is a local smoothing of the isolated singularity
/// at the origin, with a critical-curve witness when it is not.
pub fn smoothing_verdict(
    f: &TruncSeries,
    t_prec: usize,
    rng: &mut dyn RngCore,
) -> Result<SmoothingReport> {
    assert_eq!(f.nvars(), 2);
    if !is_isolated(f) {
        return Err(Error::NotIsolated);
    }
    let mu = milnor(f);
    if mu.is_finite() {
        return Ok(SmoothingReport {
            verdict: Verdict::Smoothing,
            mu,
            witness_factor: None,
            witness_param: None,
            samples: Vec::new(),
        });
    }
    let mut witness_factor = None;
    let mut witness_param = None;
    let mut samples = Vec::new();
    if f.is_polynomial() {
        let ctx = f.ctx().clone();
        let fx = bi_from_series(&f.partial(0));
        let fy = bi_from_series(&f.partial(1));
        let g = bi_gcd(&fx, &fy, &ctx)?;
        if !g.is_empty() && !bi_is_unit(&g) {
            witness_factor = Some(bi_to_series(&g, &ctx));
            witness_param = witness_branch(&g, &ctx, t_prec);
            if let Some(p) = &witness_param {
                samples = sample_fibers(f, p, rng);
            }
        }
    }
    Ok(SmoothingReport {
        verdict: Verdict::NotSmoothing,
        mu,
        witness_factor,
        witness_param,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;
    use crate::field::make_field;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    fn field(p: u64) -> FieldCtx {
        make_field(p, 1, &mut rng()).unwrap()
    }

    fn poly(src: &str, ctx: &FieldCtx) -> TruncSeries {
        parse_poly(src, ctx, 2).unwrap()
    }

    #[test]
    fn smoothing_for_finite_mu() {
        let ctx = make_field(0, 1, &mut rng()).unwrap();
        let f = poly("X^2 + Y^3", &ctx);
        let rep = smoothing_verdict(&f, 32, &mut rng()).unwrap();
        assert_eq!(rep.verdict, Verdict::Smoothing);
        assert_eq!(rep.mu, ExtNat::Finite(2));
        assert!(rep.witness_factor.is_none() && rep.samples.is_empty());
    }

    #[test]
    fn common_factor_witness_char_3() {
        let ctx = field(3);
        let f = poly("X^2*Y + Y^2*X", &ctx);
        let rep = smoothing_verdict(&f, 32, &mut rng()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotSmoothing);
        assert_eq!(rep.mu, ExtNat::Infinite);
        // the partials share the factor Y - X (up to a unit)
        let w = rep.witness_factor.unwrap();
        let c = w.coeff(&Monomial(vec![0, 1]));
        assert!(!c.is_zero());
        let target = poly("Y - X", &ctx).scale(&c);
        assert!(w.sub(&target).is_zero());
        // sampled singular fiber points exist and dominate the base line
        assert!(rep.samples.iter().any(|sp| !sp.s.is_zero()));
        assert!(super::distinct_s_count(&rep.samples) >= 2);
    }

    #[test]
    fn vanishing_partial_witness_char_3() {
        // f_X = 0 identically; the witness is carried by f_Y alone and the
        // critical curve is the X-axis, so the fiber over s = t^3 has the
        // singular point (s^{1/3}, 0)
        let ctx = field(3);
        let f = poly("X^3 + Y^4", &ctx);
        let rep = smoothing_verdict(&f, 32, &mut rng()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotSmoothing);
        let w = rep.witness_factor.unwrap();
        assert!(w.sub(&poly("Y^3", &ctx)).is_zero());
        assert!(!rep.samples.is_empty());
        for sp in &rep.samples {
            assert!(sp.point[1].is_zero());
            assert_eq!(sp.point[0].pow(3), sp.s.lift_to(sp.point[0].ctx()));
        }
        assert!(super::distinct_s_count(&rep.samples) >= 2);
    }

    #[test]
    fn fiber_check_examples() {
        let ctx = field(3);
        let f = poly("X^3 + Y^4", &ctx);
        let one = ctx.one();
        let zero = ctx.zero();
        assert!(fiber_singularity_check(
            &f,
            &[one.clone(), zero.clone()],
            &one
        ));
        let q = make_field(0, 1, &mut rng()).unwrap();
        let cusp = poly("X^2 + Y^3", &q);
        assert!(fiber_singularity_check(
            &cusp,
            &[q.zero(), q.zero()],
            &q.zero()
        ));
        // generic smooth point
        assert!(!fiber_singularity_check(
            &cusp,
            &[q.one(), q.one()],
            &FieldElem::from_int(&q, 2)
        ));
    }

    #[test]
    fn non_isolated_rejected() {
        let ctx = field(3);
        let f = poly("X^2", &ctx);
        assert!(matches!(
            smoothing_verdict(&f, 32, &mut rng()),
            Err(Error::NotIsolated)
        ));
    }
}
