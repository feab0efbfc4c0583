//! Exact univariate polynomials over a [`FieldCtx`], with the factorization
//! machinery needed for root finding (distinct-degree plus Cantor-Zassenhaus
//! equal-degree splitting).

use super::{FieldCtx, FieldElem};
use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Dense univariate polynomial, coefficients in ascending degree, trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FPoly {
    ctx: FieldCtx,
    coeffs: Vec<FieldElem>,
}

impl FPoly {
    pub fn new(ctx: FieldCtx, mut coeffs: Vec<FieldElem>) -> FPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FPoly { ctx, coeffs }
    }

    pub fn zero(ctx: FieldCtx) -> FPoly {
        FPoly {
            ctx,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: FieldElem) -> FPoly {
        FPoly::new(c.ctx().clone(), vec![c])
    }

    pub fn monomial(ctx: FieldCtx, c: FieldElem, deg: usize) -> FPoly {
        let mut coeffs = vec![ctx.zero(); deg];
        coeffs.push(c);
        FPoly::new(ctx, coeffs)
    }

    pub fn x(ctx: FieldCtx) -> FPoly {
        let one = ctx.one();
        FPoly::monomial(ctx, one, 1)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElem> {
        self.coeffs
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

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn add(&self, other: &FPoly) -> FPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        FPoly::new(self.ctx.clone(), out)
    }

    pub fn neg(&self) -> FPoly {
        FPoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &FPoly) -> FPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FPoly) -> FPoly {
        if self.is_zero() || other.is_zero() {
            return FPoly::zero(self.ctx.clone());
        }
        let mut out = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        FPoly::new(self.ctx.clone(), out)
    }

    pub fn scale(&self, c: &FieldElem) -> FPoly {
        FPoly::new(
            self.ctx.clone(),
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    pub fn divrem(&self, div: &FPoly) -> Result<(FPoly, FPoly)> {
        let d = div.degree().ok_or(Error::NotAUnit)?;
        let lead_inv = div.leading().inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((FPoly::zero(self.ctx.clone()), self.clone()));
        }
        let mut quot = vec![self.ctx.zero(); rem.len() - d];
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
            FPoly::new(self.ctx.clone(), quot),
            FPoly::new(self.ctx.clone(), rem),
        ))
    }

    pub fn rem(&self, div: &FPoly) -> Result<FPoly> {
        Ok(self.divrem(div)?.1)
    }

    pub fn monic(&self) -> Result<FPoly> {
        let inv = self.leading().inv()?;
        Ok(self.scale(&inv))
    }

    pub fn gcd(&self, other: &FPoly) -> Result<FPoly> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    /// Returns `(g, s, t)` with `g = s*self + t*other`.
    pub fn ext_gcd(&self, other: &FPoly) -> Result<(FPoly, FPoly, FPoly)> {
        let ctx = self.ctx.clone();
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = FPoly::constant(ctx.one());
        let mut s1 = FPoly::zero(ctx.clone());
        let mut t0 = FPoly::zero(ctx.clone());
        let mut t1 = FPoly::constant(ctx.one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        Ok((r0, s0, t0))
    }

    pub fn derivative(&self) -> FPoly {
        if self.coeffs.len() <= 1 {
            return FPoly::zero(self.ctx.clone());
        }
        let out: Vec<FieldElem> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let n = FieldElem::from_int(&self.ctx, i as i64);
                c.mul(&n)
            })
            .collect();
        FPoly::new(self.ctx.clone(), out)
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// `self^n mod m` by square and multiply.
    pub fn powmod(&self, n: &BigUint, m: &FPoly) -> Result<FPoly> {
        let mut result = FPoly::constant(self.ctx.one());
        let mut base = self.rem(m)?;
        let mut n = n.clone();
        let two = BigUint::from(2u8);
        while !n.is_zero() {
            if (&n % &two).is_one() {
                result = result.mul(&base).rem(m)?;
            }
            base = base.mul(&base).rem(m)?;
            n /= &two;
        }
        Ok(result)
    }

    /// Rabin irreducibility test over a finite field.
    pub fn is_irreducible(&self) -> bool {
        let q = match self.ctx.order() {
            Some(q) => q,
            None => return self.degree() == Some(1), // crude; only used over F_q
        };
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let x = FPoly::x(self.ctx.clone());
        // x^(q^n) == x mod self
        let qn = num_traits::pow::pow(q.clone(), n);
        let xqn = match x.powmod(&qn, self) {
            Ok(v) => v,
            Err(_) => return false, // leading coeff not invertible cannot happen over a field
        };
        if xqn.sub(&x).rem(self).map(|r| !r.is_zero()).unwrap_or(true) {
            return false;
        }
        for r in prime_divisors(n) {
            let e = num_traits::pow::pow(q.clone(), n / r);
            let xe = match x.powmod(&e, self) {
                Ok(v) => v,
                Err(_) => return false,
            };
            let g = match xe.sub(&x).gcd(self) {
                Ok(g) => g,
                Err(_) => return false,
            };
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Lift coefficients into an extension of the coefficient field.
    pub fn lift_to(&self, target: &FieldCtx) -> FPoly {
        FPoly::new(
            target.clone(),
            self.coeffs.iter().map(|c| c.lift_to(target)).collect(),
        )
    }

    /// Multiplicity of `r` as a root, by trial division.
    pub fn root_multiplicity(&self, r: &FieldElem) -> u64 {
        let lin = FPoly::new(
            self.ctx.clone(),
            vec![r.neg(), self.ctx.one()],
        );
        let mut f = self.clone();
        let mut m = 0;
        loop {
            let (q, rem) = f.divrem(&lin).expect("linear divisor");
            if rem.is_zero() {
                f = q;
                m += 1;
            } else {
                return m;
            }
        }
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_round_trip() {
        let f5 = FieldCtx::Fp(5);
        let a = FPoly::new(
            f5.clone(),
            (1..=6).map(|i| FieldElem::from_int(&f5, i)).collect(),
        );
        let b = FPoly::new(
            f5.clone(),
            vec![
                FieldElem::from_int(&f5, 2),
                FieldElem::from_int(&f5, 0),
                FieldElem::from_int(&f5, 3),
            ],
        );
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn irreducibility_small() {
        let f3 = FieldCtx::Fp(3);
        // T^2 + 1 irreducible over F_3
        let m = FPoly::new(
            f3.clone(),
            vec![
                FieldElem::from_int(&f3, 1),
                FieldElem::from_int(&f3, 0),
                FieldElem::from_int(&f3, 1),
            ],
        );
        assert!(m.is_irreducible());
        // T^2 - 1 = (T-1)(T+1) reducible
        let m2 = FPoly::new(
            f3.clone(),
            vec![
                FieldElem::from_int(&f3, -1),
                FieldElem::from_int(&f3, 0),
                FieldElem::from_int(&f3, 1),
            ],
        );
        assert!(!m2.is_irreducible());
    }
}
