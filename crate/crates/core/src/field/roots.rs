//! Root finding over `Q` and over finite fields, with lazy field extension.
//!
//! Over a finite field the roots in the current field are split off with
//! gcd against `x^q - x` followed by Cantor-Zassenhaus equal-degree
//! splitting; if roots outside the field are allowed, one irreducible factor
//! at a time is turned into an extension step and the search recurses.

use super::poly::FPoly;
use super::{ExtCtx, FieldCtx, FieldElem};
use crate::error::{Error, Result};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand_core::RngCore;

/// All roots of `poly` with multiplicities.
///
/// Returns the (possibly enlarged) context the roots live in. With
/// `allow_extension` the multiplicities sum to `deg poly`; without it only
/// roots in the current field are returned, and an error is raised if there
/// are none.
pub fn roots_univariate(
    poly: &FPoly,
    allow_extension: bool,
    rng: &mut dyn RngCore,
) -> Result<(Vec<(FieldElem, u64)>, FieldCtx)> {
    if poly.is_zero() {
        return Err(Error::Domain(String::from("roots of the zero polynomial")));
    }
    let ctx = poly.ctx().clone();
    if ctx.characteristic() == 0 {
        let roots = rational_roots(poly)?;
        let total: u64 = roots.iter().map(|(_, m)| m).sum();
        if allow_extension && total < poly.degree().unwrap_or(0) as u64 {
            return Err(Error::Domain(String::from(
                "extensions of the rationals are not supported",
            )));
        }
        return Ok((roots, ctx));
    }
    finite_roots(poly, allow_extension, rng)
}

fn rational_roots(poly: &FPoly) -> Result<Vec<(FieldElem, u64)>> {
    // Clear denominators, then run the rational root theorem.
    let mut den = BigInt::one();
    for c in poly.coeffs() {
        let r = rational_of(c);
        den = num_integer::lcm(den, r.denom().clone());
    }
    let ints: Vec<BigInt> = poly
        .coeffs()
        .iter()
        .map(|c| {
            let r = rational_of(c);
            (r * num_rational::BigRational::from_integer(den.clone()))
                .to_integer()
        })
        .collect();
    let a0_pos = ints.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots: Vec<(FieldElem, u64)> = Vec::new();
    if a0_pos > 0 {
        roots.push((FieldCtx::Q.zero(), a0_pos as u64));
    }
    let a0 = ints[a0_pos].abs();
    let an = ints.last().unwrap().abs();
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = FieldElem::from_bigint(&FieldCtx::Q, &(BigInt::from(sign) * &p));
                let qinv = FieldElem::from_bigint(&FieldCtx::Q, &q).inv()?;
                let cand = cand.mul(&qinv);
                if roots.iter().any(|(r, _)| r == &cand) {
                    continue;
                }
                if poly.eval(&cand).is_zero() {
                    let m = poly.root_multiplicity(&cand);
                    roots.push((cand, m));
                }
            }
        }
    }
    Ok(roots)
}

fn rational_of(c: &FieldElem) -> num_rational::BigRational {
    // FieldElem over Q displays as a rational; reconstruct via eval trick:
    // cheaper to expose internals, but parsing Display is fragile. We add a
    // dedicated accessor below instead.
    c.as_rational().expect("rational context").clone()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    let limit = n.sqrt();
    while d <= limit {
        if (n % &d).is_zero() {
            out.push(d.clone());
            out.push(n / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

fn finite_roots(
    poly: &FPoly,
    allow_extension: bool,
    rng: &mut dyn RngCore,
) -> Result<(Vec<(FieldElem, u64)>, FieldCtx)> {
    let mut ctx = poly.ctx().clone();
    let mut work = poly.monic()?;
    let mut roots: Vec<(FieldElem, u64)> = Vec::new();
    let mut guard = 0;
    loop {
        guard += 1;
        if guard > 64 {
            return Err(Error::Domain(String::from("root search did not converge")));
        }
        // Roots in the current field.
        for r in distinct_roots_in_field(&work, rng)? {
            let m = work.root_multiplicity(&r);
            debug_assert!(m > 0);
            let lin = FPoly::new(ctx.clone(), vec![r.neg(), ctx.one()]);
            for _ in 0..m {
                work = work.divrem(&lin)?.0;
            }
            roots.push((r, m));
        }
        if work.degree() == Some(0) || work.is_zero() {
            return Ok((roots, ctx));
        }
        if !allow_extension {
            if roots.is_empty() {
                return Err(Error::ExtensionDisabled);
            }
            return Ok((roots, ctx));
        }
        // Inseparable part: work = g(x^p) has the same splitting field as g.
        if work.derivative().is_zero() {
            let p = ctx.characteristic() as usize;
            let mut coeffs = Vec::new();
            for (i, c) in work.coeffs().iter().enumerate() {
                if i % p == 0 {
                    coeffs.push(c.frobenius_inv());
                } else {
                    debug_assert!(c.is_zero());
                }
            }
            let g = FPoly::new(ctx.clone(), coeffs);
            let (inner, new_ctx) = finite_roots(&g, true, rng)?;
            let mut out = Vec::new();
            for (s, m) in inner {
                out.push((s.frobenius_inv(), m * p as u64));
            }
            for (r, m) in &mut roots {
                *r = r.lift_to(&new_ctx);
                let _ = m;
            }
            roots.extend(out);
            return Ok((roots, new_ctx));
        }
        // Separable with no roots here: pick an irreducible factor of lowest
        // degree and adjoin one of its roots.
        let modulus = lowest_degree_irreducible_factor(&work, rng)?;
        let new_ctx = FieldCtx::Ext(Arc::new(ExtCtx {
            base: ctx.clone(),
            modulus: modulus.into_coeffs(),
        }));
        for (r, _) in &mut roots {
            *r = r.lift_to(&new_ctx);
        }
        work = work.lift_to(&new_ctx);
        ctx = new_ctx;
    }
}

/// Distinct roots of `f` lying in its own coefficient field.
fn distinct_roots_in_field(f: &FPoly, rng: &mut dyn RngCore) -> Result<Vec<FieldElem>> {
    let ctx = f.ctx().clone();
    let q = ctx.order().expect("finite field");
    let x = FPoly::x(ctx.clone());
    let xq = x.powmod(&q, f)?;
    let lin = xq.sub(&x).gcd(f)?;
    let mut out = Vec::new();
    split_linear(&lin, &q, rng, &mut out)?;
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}

/// Equal-degree splitting of a product of distinct linear factors.
fn split_linear(
    h: &FPoly,
    q: &BigUint,
    rng: &mut dyn RngCore,
    out: &mut Vec<FieldElem>,
) -> Result<()> {
    let ctx = h.ctx().clone();
    match h.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            // monic x + c -> root -c
            let h = h.monic()?;
            out.push(h.coeff(0).neg());
            return Ok(());
        }
        _ => {}
    }
    let h = h.monic()?;
    let p = ctx.characteristic();
    for _ in 0..200 {
        let g = if p == 2 {
            // trace splitting: T(a) = a + a^2 + ... + a^{2^{k-1}} mod h
            let k = {
                let mut k = 0u32;
                let mut t = q.clone();
                let two = BigUint::from(2u8);
                while t > BigUint::one() {
                    t /= &two;
                    k += 1;
                }
                k
            };
            let deg = h.degree().unwrap();
            let a = random_poly(&ctx, deg, rng);
            let mut acc = a.rem(&h)?;
            let mut term = a.rem(&h)?;
            for _ in 1..k {
                term = term.mul(&term).rem(&h)?;
                acc = acc.add(&term);
            }
            acc.gcd(&h)?
        } else {
            let e = (q - BigUint::one()) / BigUint::from(2u8);
            let deg = h.degree().unwrap();
            let a = random_poly(&ctx, deg, rng);
            let b = a.powmod(&e, &h)?;
            let one = FPoly::constant(ctx.one());
            b.sub(&one).gcd(&h)?
        };
        let dg = g.degree();
        if let Some(d) = dg {
            if d > 0 && d < h.degree().unwrap() {
                split_linear(&g, q, rng, out)?;
                let (rest, r) = h.divrem(&g)?;
                debug_assert!(r.is_zero());
                split_linear(&rest, q, rng, out)?;
                return Ok(());
            }
        }
    }
    Err(Error::Domain(String::from(
        "equal-degree splitting did not converge",
    )))
}

fn random_poly(ctx: &FieldCtx, deg_exclusive: usize, rng: &mut dyn RngCore) -> FPoly {
    let coeffs: Vec<FieldElem> = (0..deg_exclusive).map(|_| ctx.random(rng)).collect();
    let f = FPoly::new(ctx.clone(), coeffs);
    if f.is_zero() {
        FPoly::x(ctx.clone())
    } else {
        f
    }
}

/// One irreducible factor of minimal degree (distinct-degree then
/// Cantor-Zassenhaus equal-degree splitting). `f` is separable with no
/// linear factors.
fn lowest_degree_irreducible_factor(f: &FPoly, rng: &mut dyn RngCore) -> Result<FPoly> {
    let ctx = f.ctx().clone();
    let q = ctx.order().expect("finite field");
    let x = FPoly::x(ctx.clone());
    let mut xq = x.powmod(&q, f)?; // x^{q^1}
    let n = f.degree().unwrap();
    for d in 2..=n {
        xq = xq.powmod(&q, f)?;
        let g = xq.sub(&x).gcd(f)?;
        if let Some(dd) = g.degree() {
            if dd >= d {
                return equal_degree_factor(&g, d, &q, rng);
            }
        }
    }
    Err(Error::Domain(String::from("no factor found")))
}

/// Extract one irreducible factor of degree `d` from a product of such.
fn equal_degree_factor(
    h: &FPoly,
    d: usize,
    q: &BigUint,
    rng: &mut dyn RngCore,
) -> Result<FPoly> {
    let h = h.monic()?;
    if h.degree() == Some(d) {
        return Ok(h);
    }
    let ctx = h.ctx().clone();
    let p = ctx.characteristic();
    let qd = num_traits::pow::pow(q.clone(), d);
    for _ in 0..200 {
        let a = random_poly(&ctx, h.degree().unwrap(), rng);
        let g = if p == 2 {
            let k = {
                let mut k = 0u32;
                let mut t = qd.clone();
                let two = BigUint::from(2u8);
                while t > BigUint::one() {
                    t /= &two;
                    k += 1;
                }
                k
            };
            let mut acc = a.rem(&h)?;
            let mut term = a.rem(&h)?;
            for _ in 1..k {
                term = term.mul(&term).rem(&h)?;
                acc = acc.add(&term);
            }
            acc.gcd(&h)?
        } else {
            let e = (&qd - BigUint::one()) / BigUint::from(2u8);
            let b = a.powmod(&e, &h)?;
            let one = FPoly::constant(ctx.one());
            b.sub(&one).gcd(&h)?
        };
        if let Some(dd) = g.degree() {
            if dd > 0 && dd < h.degree().unwrap() {
                let (rest, _) = h.divrem(&g)?;
                let small = if g.degree() <= rest.degree() { g } else { rest };
                return equal_degree_factor(&small, d, q, rng);
            }
        }
    }
    Err(Error::Domain(String::from(
        "equal-degree factorization did not converge",
    )))
}

/// Scalar `n`-th root of a unit, extending the field when necessary.
///
/// Requires `gcd(n, p) = 1` in positive characteristic. The returned root is
/// deterministic given the RNG seed: roots inside the current field are
/// preferred, ties broken by the canonical element order.
pub fn nth_root_unit_scalar(
    a: &FieldElem,
    n: u64,
    rng: &mut dyn RngCore,
) -> Result<(FieldElem, FieldCtx)> {
    if a.is_zero() {
        return Err(Error::NotAUnit);
    }
    let ctx = a.ctx().clone();
    let p = ctx.characteristic();
    if p > 0 && n % p == 0 {
        return Err(Error::WildExponent { n, p });
    }
    if n == 1 {
        return Ok((a.clone(), ctx));
    }
    if p == 0 {
        let r = a.as_rational().unwrap();
        let num = r.numer();
        let den = r.denom();
        let root = |x: &BigInt| -> Option<BigInt> {
            if x.is_negative() && n % 2 == 0 {
                return None;
            }
            let mag = x.abs().nth_root(n as u32);
            let cand = if x.is_negative() { -mag } else { mag };
            if num_traits::pow::pow(cand.clone(), n as usize) == *x {
                Some(cand)
            } else {
                None
            }
        };
        let (rn, rd) = (root(num), root(den));
        return match (rn, rd) {
            (Some(a), Some(b)) => {
                let num_e = FieldElem::from_bigint(&FieldCtx::Q, &a);
                let den_e = FieldElem::from_bigint(&FieldCtx::Q, &b);
                Ok((num_e.mul(&den_e.inv()?), FieldCtx::Q))
            }
            _ => Err(Error::Domain(String::from(
                "no rational n-th root; extensions of Q are unsupported",
            ))),
        };
    }
    // roots of T^n - a
    let mut coeffs = vec![a.neg()];
    for _ in 1..n {
        coeffs.push(ctx.zero());
    }
    coeffs.push(ctx.one());
    let f = FPoly::new(ctx.clone(), coeffs);
    // Try without extension first so roots in the base field win.
    if let Ok((mut roots, c)) = roots_univariate(&f, false, rng) {
        if !roots.is_empty() {
            roots.sort_by(|x, y| x.0.canonical_cmp(&y.0));
            return Ok((roots[0].0.clone(), c));
        }
    }
    let (mut roots, c) = roots_univariate(&f, true, rng)?;
    roots.sort_by(|x, y| x.0.canonical_cmp(&y.0));
    Ok((roots[0].0.clone(), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn fp_poly(p: u64, coeffs: &[i64]) -> FPoly {
        let ctx = FieldCtx::Fp(p);
        FPoly::new(
            ctx.clone(),
            coeffs.iter().map(|&c| FieldElem::from_int(&ctx, c)).collect(),
        )
    }

    #[test]
    fn roots_t2_minus_1_over_f3() {
        let f = fp_poly(3, &[-1, 0, 1]);
        let (roots, ctx) = roots_univariate(&f, false, &mut rng()).unwrap();
        assert_eq!(ctx, FieldCtx::Fp(3));
        let mut vals: Vec<u64> = roots
            .iter()
            .map(|(r, m)| {
                assert_eq!(*m, 1);
                if *r == FieldElem::from_int(&ctx, 1) {
                    1
                } else {
                    2
                }
            })
            .collect();
        vals.sort();
        assert_eq!(vals, vec![1, 2]);
    }

    #[test]
    fn roots_t2_plus_1_over_f3_extends_to_f9() {
        // oracle: brute force over all elements of the extension
        let f = fp_poly(3, &[1, 0, 1]);
        assert!(matches!(
            roots_univariate(&f, false, &mut rng()),
            Err(Error::ExtensionDisabled)
        ));
        let (roots, ctx) = roots_univariate(&f, true, &mut rng()).unwrap();
        assert_eq!(ctx.degree_over_prime(), 2);
        assert_eq!(roots.len(), 2);
        let lifted = f.lift_to(&ctx);
        for (r, m) in &roots {
            assert_eq!(*m, 1);
            assert!(lifted.eval(r).is_zero());
        }
        // brute force: exactly two of the nine elements are roots
        let mut count = 0;
        let gen = ctx.generator().unwrap();
        for i in 0..3i64 {
            for j in 0..3i64 {
                let x = FieldElem::from_int(&ctx, i)
                    .add(&gen.mul(&FieldElem::from_int(&ctx, j)));
                if lifted.eval(&x).is_zero() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn inseparable_tp_minus_a() {
        // T^3 - 2 over F_3 = (T - 2^{1/3})^3; Frobenius inverse oracle by
        // exhaustive check over F_3.
        let f = fp_poly(3, &[-2, 0, 0, 1]);
        let (roots, ctx) = roots_univariate(&f, true, &mut rng()).unwrap();
        assert_eq!(ctx, FieldCtx::Fp(3));
        assert_eq!(roots.len(), 1);
        let (r, m) = &roots[0];
        assert_eq!(*m, 3);
        assert_eq!(r.pow(3), FieldElem::from_int(&ctx, 2));
        let mut found = None;
        for a in 0..3 {
            let x = FieldElem::from_int(&ctx, a);
            if x.pow(3) == FieldElem::from_int(&ctx, 2) {
                found = Some(x);
            }
        }
        assert_eq!(found.as_ref(), Some(r));
    }

    #[test]
    fn nth_root_cases() {
        let mut r = rng();
        let one_q = FieldCtx::Q.one();
        assert_eq!(nth_root_unit_scalar(&one_q, 5, &mut r).unwrap().0, one_q);
        let four = FieldElem::from_int(&FieldCtx::Q, 4);
        assert_eq!(
            nth_root_unit_scalar(&four, 2, &mut r).unwrap().0,
            FieldElem::from_int(&FieldCtx::Q, 2)
        );
        // (2, 3) over F_5 -> 3 since 3^3 = 27 = 2; exhaustive oracle
        let f5 = FieldCtx::Fp(5);
        let two = FieldElem::from_int(&f5, 2);
        let (root, ctx) = nth_root_unit_scalar(&two, 3, &mut r).unwrap();
        assert_eq!(ctx, f5);
        assert_eq!(root, FieldElem::from_int(&f5, 3));
        let mut brute = None;
        for a in 0..5 {
            let x = FieldElem::from_int(&f5, a);
            if x.pow(3) == two {
                brute = Some(x);
            }
        }
        assert_eq!(brute, Some(root));
        // sqrt(2) over F_3 requires F_9
        let f3 = FieldCtx::Fp(3);
        let two3 = FieldElem::from_int(&f3, 2);
        let (root, ctx) = nth_root_unit_scalar(&two3, 2, &mut r).unwrap();
        assert_eq!(ctx.degree_over_prime(), 2);
        assert_eq!(root.mul(&root), two3.lift_to(&ctx));
        // wild exponent refused
        assert!(matches!(
            nth_root_unit_scalar(&two3, 3, &mut r),
            Err(Error::WildExponent { .. })
        ));
    }
}
