//! Coefficient fields: `Q`, prime fields `F_p` and dynamically constructed
//! extensions `F_{p^k}`.
//!
//! Extensions are represented as towers: an extension context holds its base
//! context and a monic irreducible modulus over that base. This makes
//! embeddings trivial (constant injection) and lets root-finding enlarge the
//! field on demand, which is how the algebraically closed field of the theory
//! is approximated.

mod poly;
mod roots;

pub use poly::FPoly;
pub use roots::{nth_root_unit_scalar, roots_univariate};

use crate::error::{Error, Result};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_core::RngCore;

/// An extension step: a monic irreducible modulus over the base context.
#[derive(Debug)]
pub struct ExtCtx {
    pub base: FieldCtx,
    /// Monic modulus, coefficients in `base`, length `degree + 1`.
    pub modulus: Vec<FieldElem>,
}

impl ExtCtx {
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

/// Arithmetic context. Cheap to clone.
#[derive(Debug, Clone)]
pub enum FieldCtx {
    /// The rationals (characteristic zero).
    Q,
    /// Prime field `F_p`.
    Fp(u64),
    /// Extension of an inner context by an irreducible modulus.
    Ext(Arc<ExtCtx>),
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FieldCtx::Q, FieldCtx::Q) => true,
            (FieldCtx::Fp(p), FieldCtx::Fp(q)) => p == q,
            (FieldCtx::Ext(a), FieldCtx::Ext(b)) => {
                Arc::ptr_eq(a, b) || (a.base == b.base && a.modulus == b.modulus)
            }
            _ => false,
        }
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldCtx::Q => 0,
            FieldCtx::Fp(p) => *p,
            FieldCtx::Ext(e) => e.base.characteristic(),
        }
    }

    /// Extension degree over the prime field (1 for `Q` and `F_p`).
    pub fn degree_over_prime(&self) -> u64 {
        match self {
            FieldCtx::Q | FieldCtx::Fp(_) => 1,
            FieldCtx::Ext(e) => e.degree() as u64 * e.base.degree_over_prime(),
        }
    }

    /// Field cardinality, `None` for characteristic zero.
    pub fn order(&self) -> Option<BigUint> {
        let p = self.characteristic();
        if p == 0 {
            None
        } else {
            Some(BigUint::from(p).pow(self.degree_over_prime() as u32))
        }
    }

    /// True when `other` appears in the base chain of `self` (or equals it).
    pub fn extends(&self, other: &FieldCtx) -> bool {
        if self == other {
            return true;
        }
        match self {
            FieldCtx::Ext(e) => e.base.extends(other),
            _ => false,
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::from_int(self, 0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::from_int(self, 1)
    }

    /// For an extension context, the class of the adjoined generator.
    pub fn generator(&self) -> Option<FieldElem> {
        match self {
            FieldCtx::Ext(e) => Some(FieldElem {
                ctx: self.clone(),
                repr: Repr::Ext(vec![e.base.zero(), e.base.one()]),
            }),
            _ => None,
        }
    }

    /// Uniformly random element (small integers over `Q`).
    pub fn random(&self, rng: &mut dyn RngCore) -> FieldElem {
        match self {
            FieldCtx::Q => {
                let n = (rng.next_u64() % 19) as i64 - 9;
                FieldElem::from_int(self, n)
            }
            FieldCtx::Fp(p) => {
                let wide = ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128;
                FieldElem {
                    ctx: self.clone(),
                    repr: Repr::Fp((wide % *p as u128) as u64),
                }
            }
            FieldCtx::Ext(e) => {
                let coeffs: Vec<FieldElem> = (0..e.degree()).map(|_| e.base.random(rng)).collect();
                FieldElem::from_ext_coeffs(self, coeffs)
            }
        }
    }

    /// Random nonzero element.
    pub fn random_nonzero(&self, rng: &mut dyn RngCore) -> FieldElem {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Build a random extension of degree `d >= 2` over `self`.
    pub fn extend(&self, d: usize, rng: &mut dyn RngCore) -> Result<FieldCtx> {
        assert!(d >= 2);
        if self.characteristic() == 0 {
            return Err(Error::Domain(String::from(
                "extensions of the rationals are not supported",
            )));
        }
        // Random monic polynomials of degree d are irreducible with
        // probability about 1/d; the search is cheap.
        for _ in 0..10_000 {
            let mut coeffs: Vec<FieldElem> = (0..d).map(|_| self.random(rng)).collect();
            coeffs.push(self.one());
            let m = FPoly::new(self.clone(), coeffs);
            if m.is_irreducible() {
                return Ok(FieldCtx::Ext(Arc::new(ExtCtx {
                    base: self.clone(),
                    modulus: m.into_coeffs(),
                })));
            }
        }
        Err(Error::Domain(String::from(
            "failed to find an irreducible modulus",
        )))
    }
}

/// `make_field(p, k)`: `Q` for `p = 0`, otherwise `F_{p^k}` with a verified
/// irreducible modulus when `k > 1`.
pub fn make_field(p: u64, k: usize, rng: &mut dyn RngCore) -> Result<FieldCtx> {
    assert!(k >= 1);
    if p == 0 {
        return Ok(FieldCtx::Q);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let base = FieldCtx::Fp(p);
    if k == 1 {
        Ok(base)
    } else {
        base.extend(k, rng)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Rat(BigRational),
    Fp(u64),
    /// Coefficients over the base context, trimmed, degree < modulus degree.
    Ext(Vec<FieldElem>),
}

/// A field element with its canonical representative.
#[derive(Debug, Clone)]
pub struct FieldElem {
    ctx: FieldCtx,
    repr: Repr,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.ctx == other.ctx
    }
}

impl Eq for FieldElem {}

impl FieldElem {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn from_int(ctx: &FieldCtx, n: i64) -> FieldElem {
        match ctx {
            FieldCtx::Q => FieldElem {
                ctx: ctx.clone(),
                repr: Repr::Rat(BigRational::from_integer(BigInt::from(n))),
            },
            FieldCtx::Fp(p) => {
                let r = n.rem_euclid(*p as i64) as u64;
                FieldElem {
                    ctx: ctx.clone(),
                    repr: Repr::Fp(r),
                }
            }
            FieldCtx::Ext(e) => {
                let c = FieldElem::from_int(&e.base, n);
                FieldElem::from_ext_coeffs(ctx, vec![c])
            }
        }
    }

    pub fn from_rational(num: i64, den: i64) -> FieldElem {
        FieldElem {
            ctx: FieldCtx::Q,
            repr: Repr::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    pub fn from_bigint(ctx: &FieldCtx, n: &BigInt) -> FieldElem {
        match ctx {
            FieldCtx::Q => FieldElem {
                ctx: ctx.clone(),
                repr: Repr::Rat(BigRational::from_integer(n.clone())),
            },
            FieldCtx::Fp(p) => {
                let m = BigInt::from(*p);
                let mut r = n % &m;
                if r.is_negative() {
                    r += &m;
                }
                let digits = r.to_u64_digits().1;
                FieldElem {
                    ctx: ctx.clone(),
                    repr: Repr::Fp(digits.first().copied().unwrap_or(0)),
                }
            }
            FieldCtx::Ext(e) => {
                let c = FieldElem::from_bigint(&e.base, n);
                FieldElem::from_ext_coeffs(ctx, vec![c])
            }
        }
    }

    fn from_ext_coeffs(ctx: &FieldCtx, mut coeffs: Vec<FieldElem>) -> FieldElem {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FieldElem {
            ctx: ctx.clone(),
            repr: Repr::Ext(coeffs),
        }
    }

    /// Inject into an extension whose base chain contains `self.ctx`.
    pub fn lift_to(&self, target: &FieldCtx) -> FieldElem {
        if &self.ctx == target {
            return self.clone();
        }
        assert!(target.extends(&self.ctx), "incompatible field contexts");
        match target {
            FieldCtx::Ext(e) => {
                let inner = self.lift_to(&e.base);
                FieldElem::from_ext_coeffs(target, vec![inner])
            }
            _ => unreachable!(),
        }
    }

    /// The underlying rational, when the context is `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rat(r) => r.is_zero(),
            Repr::Fp(v) => *v == 0,
            Repr::Ext(c) => c.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rat(r) => r.is_one(),
            Repr::Fp(v) => *v == 1,
            Repr::Ext(c) => c.len() == 1 && c[0].is_one(),
        }
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        let (a, b) = coerce(self, other);
        match (&a.repr, &b.repr) {
            (Repr::Rat(x), Repr::Rat(y)) => FieldElem {
                ctx: a.ctx.clone(),
                repr: Repr::Rat(x + y),
            },
            (Repr::Fp(x), Repr::Fp(y)) => {
                let p = a.ctx.characteristic();
                FieldElem {
                    ctx: a.ctx.clone(),
                    repr: Repr::Fp(((*x as u128 + *y as u128) % p as u128) as u64),
                }
            }
            (Repr::Ext(x), Repr::Ext(y)) => {
                let n = x.len().max(y.len());
                let base = a.base_ctx();
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let xi = x.get(i).cloned().unwrap_or_else(|| base.zero());
                    let yi = y.get(i).cloned().unwrap_or_else(|| base.zero());
                    out.push(xi.add(&yi));
                }
                FieldElem::from_ext_coeffs(&a.ctx, out)
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> FieldElem {
        match &self.repr {
            Repr::Rat(r) => FieldElem {
                ctx: self.ctx.clone(),
                repr: Repr::Rat(-r),
            },
            Repr::Fp(v) => {
                let p = self.ctx.characteristic();
                FieldElem {
                    ctx: self.ctx.clone(),
                    repr: Repr::Fp(if *v == 0 { 0 } else { p - v }),
                }
            }
            Repr::Ext(c) => FieldElem {
                ctx: self.ctx.clone(),
                repr: Repr::Ext(c.iter().map(|x| x.neg()).collect()),
            },
        }
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        let (a, b) = coerce(self, other);
        match (&a.repr, &b.repr) {
            (Repr::Rat(x), Repr::Rat(y)) => FieldElem {
                ctx: a.ctx.clone(),
                repr: Repr::Rat(x * y),
            },
            (Repr::Fp(x), Repr::Fp(y)) => {
                let p = a.ctx.characteristic();
                FieldElem {
                    ctx: a.ctx.clone(),
                    repr: Repr::Fp(((*x as u128 * *y as u128) % p as u128) as u64),
                }
            }
            (Repr::Ext(x), Repr::Ext(y)) => {
                if x.is_empty() || y.is_empty() {
                    return a.ctx.zero();
                }
                let base = a.base_ctx();
                let mut prod = vec![base.zero(); x.len() + y.len() - 1];
                for (i, xi) in x.iter().enumerate() {
                    for (j, yj) in y.iter().enumerate() {
                        prod[i + j] = prod[i + j].add(&xi.mul(yj));
                    }
                }
                a.reduce_ext(prod)
            }
            _ => unreachable!(),
        }
    }

    /// Reduce a coefficient vector modulo the extension modulus.
    fn reduce_ext(&self, mut v: Vec<FieldElem>) -> FieldElem {
        let e = match &self.ctx {
            FieldCtx::Ext(e) => e,
            _ => unreachable!(),
        };
        let d = e.degree();
        while v.len() > d {
            let lead = v.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            let k = v.len() - d;
            // modulus is monic: x^d = -(m_{d-1} x^{d-1} + ... + m_0)
            for i in 0..d {
                let t = lead.mul(&e.modulus[i]);
                v[k + i] = v[k + i].sub(&t);
            }
        }
        FieldElem::from_ext_coeffs(&self.ctx, v)
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::NotAUnit);
        }
        match &self.repr {
            Repr::Rat(r) => Ok(FieldElem {
                ctx: self.ctx.clone(),
                repr: Repr::Rat(r.recip()),
            }),
            Repr::Fp(v) => {
                let p = self.ctx.characteristic();
                Ok(FieldElem {
                    ctx: self.ctx.clone(),
                    repr: Repr::Fp(mod_inv(*v, p)),
                })
            }
            Repr::Ext(c) => {
                let e = match &self.ctx {
                    FieldCtx::Ext(e) => e,
                    _ => unreachable!(),
                };
                let a = FPoly::new(e.base.clone(), c.clone());
                let m = FPoly::new(e.base.clone(), e.modulus.clone());
                let (g, s, _) = a.ext_gcd(&m)?;
                // g is a nonzero constant (modulus irreducible)
                debug_assert_eq!(g.degree(), Some(0));
                let ginv = g.coeff(0).inv()?;
                let coeffs: Vec<FieldElem> =
                    s.into_coeffs().into_iter().map(|x| x.mul(&ginv)).collect();
                Ok(self.reduce_ext(coeffs))
            }
        }
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut n: u64) -> FieldElem {
        let mut result = self.ctx.one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }

    pub fn pow_big(&self, n: &BigUint) -> FieldElem {
        let mut result = self.ctx.one();
        let mut base = self.clone();
        let mut n = n.clone();
        let two = BigUint::from(2u8);
        while !n.is_zero() {
            if (&n % &two).is_one() {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n /= &two;
        }
        result
    }

    /// Inverse of Frobenius: the unique `b` with `b^p = a` (finite fields).
    pub fn frobenius_inv(&self) -> FieldElem {
        let p = self.ctx.characteristic();
        assert!(p > 0, "frobenius_inv needs positive characteristic");
        let q = self.ctx.order().unwrap();
        let e = q / BigUint::from(p);
        self.pow_big(&e)
    }

    /// `p^j`-th root via iterated inverse Frobenius.
    pub fn p_power_root(&self, j: u32) -> FieldElem {
        let mut x = self.clone();
        for _ in 0..j {
            x = x.frobenius_inv();
        }
        x
    }

    fn base_ctx(&self) -> FieldCtx {
        match &self.ctx {
            FieldCtx::Ext(e) => e.base.clone(),
            c => c.clone(),
        }
    }

    /// Total order on representatives, used for deterministic tie-breaking.
    pub fn canonical_cmp(&self, other: &FieldElem) -> Ordering {
        match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => a.cmp(b),
            (Repr::Fp(a), Repr::Fp(b)) => a.cmp(b),
            (Repr::Ext(a), Repr::Ext(b)) => {
                a.len().cmp(&b.len()).then_with(|| {
                    for (x, y) in a.iter().zip(b.iter()) {
                        let c = x.canonical_cmp(y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            }
            (Repr::Fp(_), _) => Ordering::Less,
            (_, Repr::Fp(_)) => Ordering::Greater,
            (Repr::Rat(_), _) => Ordering::Less,
            (_, Repr::Rat(_)) => Ordering::Greater,
        }
    }
}

/// Bring two elements into a common context (the deeper of the two towers).
fn coerce(a: &FieldElem, b: &FieldElem) -> (FieldElem, FieldElem) {
    if a.ctx == b.ctx {
        (a.clone(), b.clone())
    } else if a.ctx.extends(&b.ctx) {
        (a.clone(), b.lift_to(&a.ctx))
    } else if b.ctx.extends(&a.ctx) {
        (a.lift_to(&b.ctx), b.clone())
    } else {
        panic!("field contexts are incompatible");
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid on i128
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    (t.rem_euclid(p as i128)) as u64
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rat(r) => write!(f, "{r}"),
            Repr::Fp(v) => write!(f, "{v}"),
            Repr::Ext(c) => {
                write!(f, "[")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}
