//! Singularity invariants of a hypersurface germ: Milnor and Tjurina
//! numbers, the minimal Milnor number over contact representatives
//! (the multiplicity of the Tjurina ideal), and the mu-stability decision.

use crate::error::{Error, Result};
use crate::extnat::ExtNat;
use crate::field::{FieldCtx, FieldElem, FPoly};
use crate::localstd::{LocalIdeal, Membership};
use crate::series::TruncSeries;
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

/// Jacobian ideal `J(f) = (f_{x_1}, ..., f_{x_n})`.
pub fn jacobian_ideal(f: &TruncSeries) -> LocalIdeal {
    LocalIdeal::new(f.ctx(), f.nvars(), f.partials())
}

/// Tjurina ideal `T(f) = (f) + J(f)`.
pub fn tjurina_ideal(f: &TruncSeries) -> LocalIdeal {
    let mut gens = vec![f.clone()];
    gens.extend(f.partials());
    LocalIdeal::new(f.ctx(), f.nvars(), gens)
}

/// Milnor number: colength of the Jacobian ideal.
pub fn milnor(f: &TruncSeries) -> ExtNat {
    jacobian_ideal(f).colength()
}

/// Tjurina number: colength of the Tjurina ideal.
pub fn tjurina(f: &TruncSeries) -> ExtNat {
    tjurina_ideal(f).colength()
}

/// Milnor number of `u * f` for a unit `u`.
pub fn mu_unit_multiple(f: &TruncSeries, u: &TruncSeries) -> Result<ExtNat> {
    if u.constant_term().is_zero() {
        return Err(Error::NotAUnit);
    }
    Ok(milnor(&u.mul(f)))
}

/// Isolated singularity at the origin: `f` in the square of the maximal
/// ideal with finite Tjurina number.
pub fn is_isolated(f: &TruncSeries) -> bool {
    match f.ord() {
        ExtNat::Finite(o) if o >= 2 => tjurina(f).is_finite(),
        _ => false,
    }
}

/// The minimal Milnor number `min { mu(uf) : u a unit }`, equal to the
/// multiplicity `e_0(T(f))` of the Tjurina ideal.
///
/// Two independent randomized estimators are run: (a) the minimum of
/// `mu(uf)` over random linear units, and (b) the minimum colength of an
/// ideal generated by `n` random scalar combinations of `f` and its
/// partials. Disagreement triggers a retry over a field extension (the
/// generic openness condition can be empty over a tiny field); persistent
/// disagreement is reported instead of guessed away.
pub fn tilde_mu(f: &TruncSeries, trials: u32, rng: &mut dyn RngCore) -> Result<ExtNat> {
    let tau = tjurina(f);
    match tau {
        ExtNat::Infinite => return Ok(ExtNat::Infinite),
        ExtNat::AtLeast(b) => return Ok(ExtNat::AtLeast(b)),
        ExtNat::Finite(_) => {}
    }
    let base = f.ctx().clone();
    for k in 1..=3u64 {
        let ctx = if base.characteristic() == 0 || k == 1 {
            base.clone()
        } else {
            base.extend(k as usize, rng)?
        };
        let fk = f.lift_to(&ctx);
        let a = estimate_by_units(&fk, trials, rng);
        let b = estimate_by_reductions(&fk, trials, rng);
        if a == b {
            return Ok(a);
        }
        if base.characteristic() == 0 {
            break;
        }
    }
    Err(Error::GenericityFailure)
}

fn random_linear_unit(ctx: &FieldCtx, nvars: usize, rng: &mut dyn RngCore) -> TruncSeries {
    let mut u = TruncSeries::constant(ctx, nvars, ctx.random_nonzero(rng));
    for i in 0..nvars {
        u = u.add(&TruncSeries::var(ctx, nvars, i).scale(&ctx.random(rng)));
    }
    u
}

fn estimate_by_units(f: &TruncSeries, trials: u32, rng: &mut dyn RngCore) -> ExtNat {
    let mut best = ExtNat::Infinite;
    for _ in 0..trials {
        let u = random_linear_unit(f.ctx(), f.nvars(), rng);
        best = best.min(milnor(&u.mul(f)));
    }
    best
}

fn estimate_by_reductions(f: &TruncSeries, trials: u32, rng: &mut dyn RngCore) -> ExtNat {
    let ctx = f.ctx().clone();
    let n = f.nvars();
    let mut spanning = vec![f.clone()];
    spanning.extend(f.partials());
    let mut best = ExtNat::Infinite;
    for _ in 0..trials {
        let gens: Vec<TruncSeries> = (0..n)
            .map(|_| {
                let mut g = TruncSeries::zero(&ctx, n);
                for s in &spanning {
                    g = g.add(&s.scale(&ctx.random(rng)));
                }
                g
            })
            .collect();
        best = best.min(LocalIdeal::new(&ctx, n, gens).colength());
    }
    best
}

/// Numeric test for `f` lying in the integral closure of its Jacobian
/// ideal: finite Milnor number equal to the multiplicity of `T(f)`.
pub fn in_jacobian_closure_numeric(
    f: &TruncSeries,
    trials: u32,
    rng: &mut dyn RngCore,
) -> Result<bool> {
    let mu = milnor(f);
    if !mu.is_finite() {
        return Ok(false);
    }
    Ok(mu == tilde_mu(f, trials, rng)?)
}

/// Why an input was judged not mu-stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnstableWitness {
    /// Initial form is `c * L^d` for a linear form `L` with `p | d`.
    InitialFormObstruction { d: u64 },
    /// The Milnor number exceeds its minimum over contact representatives.
    MuGap { mu: ExtNat, tilde: ExtNat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityVerdict {
    /// `f^l` lies in `m T(f)^l` for the recorded exponent.
    Stable(u32),
    Unstable(UnstableWitness),
    /// Search bound exhausted without a decision.
    Unknown(u32),
}

/// Decide mu-stability: search for the smallest exponent `l <= l_max` with
/// `f^l` in `m T(f)^l`, after firing the cheap obstructions (initial form a
/// `p`-divisible power of a linear form; Milnor number above its contact
/// minimum).
pub fn is_mu_stable(
    f: &TruncSeries,
    l_max: u32,
    trials: u32,
    rng: &mut dyn RngCore,
) -> Result<StabilityVerdict> {
    let p = f.ctx().characteristic();
    if p > 0 {
        if let Some(d) = initial_form_power_degree(f) {
            if d % p == 0 {
                return Ok(StabilityVerdict::Unstable(
                    UnstableWitness::InitialFormObstruction { d },
                ));
            }
        }
    }
    let mu = milnor(f);
    let tilde = tilde_mu(f, trials, rng)?;
    let gap = match (mu, tilde) {
        (ExtNat::Infinite, ExtNat::Finite(_)) => true,
        (ExtNat::Finite(a), ExtNat::Finite(b)) => a > b,
        _ => false,
    };
    if gap {
        return Ok(StabilityVerdict::Unstable(UnstableWitness::MuGap {
            mu,
            tilde,
        }));
    }
    let t = tjurina_ideal(f);
    let m = LocalIdeal::maximal_ideal(f.ctx(), f.nvars());
    // m^k lies in T(f), so m^{kl+1} lies in m T(f)^l; truncating there keeps
    // the membership tests exact (and fast) by Nakayama
    let kt = match t.mprimary_exponent() {
        Ok(k) => k,
        Err(_) => return Ok(StabilityVerdict::Unknown(0)),
    };
    for l in 1..=l_max {
        let d = (kt * l as u64 + 2) as u32;
        let t_trunc = LocalIdeal::new(
            f.ctx(),
            f.nvars(),
            t.gens().iter().map(|g| g.truncate_to(d)).collect(),
        );
        let target = m.product(&t_trunc.power(l));
        if target.membership(&f.pow(l).truncate_to(d)) == Membership::In {
            return Ok(StabilityVerdict::Stable(l));
        }
    }
    Ok(StabilityVerdict::Unknown(l_max))
}

/// If the initial form of `f` is `c * L^d` for a single linear form `L`,
/// return `d`.
pub fn initial_form_power_degree(f: &TruncSeries) -> Option<u64> {
    let init = f.initial_form();
    let (m0, _) = init.leading()?;
    let d = m0.deg() as u64;
    if d == 0 {
        return None;
    }
    let p = f.ctx().characteristic();
    // split d = p^a * m with p not dividing m; then L^d = (sum l_i x_i^{p^a})^m
    let mut pa: u64 = 1;
    let mut m = d;
    if p > 0 {
        while m % p == 0 {
            m /= p;
            pa *= p;
        }
    }
    // every exponent must be divisible by p^a
    for (mon, _) in init.terms() {
        if mon.0.iter().any(|&e| e as u64 % pa != 0) {
            return None;
        }
    }
    // contract exponents by p^a, then check for an m-th power of a linear form
    let ctx = f.ctx().clone();
    let n = f.nvars();
    let h = TruncSeries::from_terms(
        &ctx,
        n,
        crate::series::Prec::Exact,
        init.terms().map(|(mon, c)| {
            (
                crate::series::Monomial(mon.0.iter().map(|&e| e / pa as u32).collect()),
                c.clone(),
            )
        }),
    );
    // pick a variable with a nonzero pure m-th power; normalize its weight
    let mm = m as u32;
    let mut pivot = None;
    for j in 0..n {
        let mut exps = vec![0u32; n];
        exps[j] = mm;
        let c = h.coeff(&crate::series::Monomial(exps));
        if !c.is_zero() {
            pivot = Some((j, c));
            break;
        }
    }
    if mm == 1 {
        // the contraction is homogeneous linear, hence itself the form L
        return Some(d);
    }
    let (j, c) = pivot?;
    let mut lambda = vec![ctx.zero(); n];
    lambda[j] = ctx.one();
    if mm > 1 {
        let m_scalar = FieldElem::from_int(&ctx, m as i64);
        let denom = m_scalar.mul(&c);
        for (i, l) in lambda.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let mut exps = vec![0u32; n];
            exps[j] = mm - 1;
            exps[i] = 1;
            let coef = h.coeff(&crate::series::Monomial(exps));
            *l = coef.mul(&denom.inv().ok()?);
        }
    }
    let mut lin = TruncSeries::zero(&ctx, n);
    for (i, l) in lambda.iter().enumerate() {
        lin = lin.add(&TruncSeries::var(&ctx, n, i).scale(l));
    }
    if lin.pow(mm).scale(&c).sub(&h).is_zero() {
        Some(d)
    } else {
        None
    }
}

/// A quasi-homogeneity certificate: `d f = d_1 x_1 f_{x_1} + ... `.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerRelation {
    pub weights: Vec<u64>,
    pub degree: u64,
    /// `p` does not divide the degree, so `f` lies in `m T(f)` directly.
    pub stable_certificate: bool,
}

/// Search for positive integer weights making a polynomial `f`
/// quasi-homogeneous.
pub fn euler_relation(f: &TruncSeries) -> Option<EulerRelation> {
    if !f.is_polynomial() || f.is_zero() {
        return None;
    }
    let n = f.nvars();
    let exps: Vec<Vec<i64>> = f
        .terms()
        .map(|(m, _)| m.0.iter().map(|&e| e as i64).collect())
        .collect();
    // weights lie in the rational nullspace of the difference lattice
    let diffs: Vec<Vec<i64>> = exps
        .iter()
        .skip(1)
        .map(|e| e.iter().zip(&exps[0]).map(|(a, b)| a - b).collect())
        .collect();
    let basis = integer_nullspace(&diffs, n);
    // search small integer combinations of the basis for an all-positive
    // weight vector, preferring the smallest degree
    let mut best: Option<(Vec<u64>, u64)> = None;
    let mut consider = |w: &[i64]| {
        if w.iter().any(|&x| x <= 0) {
            return;
        }
        let g = w.iter().fold(0u64, |a, &b| gcd(a, b as u64));
        let w: Vec<u64> = w.iter().map(|&x| x as u64 / g).collect();
        let d: u64 = w
            .iter()
            .zip(&exps[0])
            .map(|(&wi, &ei)| wi * ei as u64)
            .sum();
        if best.as_ref().map(|(_, bd)| d < *bd).unwrap_or(true) {
            best = Some((w, d));
        }
    };
    match basis.len() {
        0 => return None,
        1 => {
            consider(&basis[0]);
            let neg: Vec<i64> = basis[0].iter().map(|&x| -x).collect();
            consider(&neg);
        }
        _ => {
            let range = -6i64..=6;
            for a in range.clone() {
                for b in range.clone() {
                    let w: Vec<i64> = basis[0]
                        .iter()
                        .zip(&basis[1])
                        .map(|(&x, &y)| a * x + b * y)
                        .collect();
                    consider(&w);
                }
            }
        }
    }
    let (weights, degree) = best?;
    let p = f.ctx().characteristic();
    Some(EulerRelation {
        weights,
        degree,
        stable_certificate: p == 0 || degree % p != 0,
    })
}

/// Integer basis of the rational nullspace of the row space of `rows`
/// (vectors of length `n`), scaled to integers. Returns at most two basis
/// vectors (enough for the supported variable counts).
fn integer_nullspace(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let pr = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let pr = match pr {
            Some(pr) => pr,
            None => continue,
        };
        m.swap(rank, pr);
        let pv = m[rank][col].clone();
        for c in 0..n {
            m[rank][c] = &m[rank][c] / &pv;
        }
        for r in 0..m.len() {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let fac = m[r][col].clone();
            for c in 0..n {
                let t = &fac * &m[rank][c];
                m[r][c] = &m[r][c] - t;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in free.iter().take(2) {
        let mut v = vec![BigRational::zero(); n];
        v[fc] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[ri][fc].clone();
        }
        // clear denominators
        let mut den = BigInt::one();
        for x in &v {
            den = num_integer::lcm(den, x.denom().clone());
        }
        let ints: Vec<i64> = v
            .iter()
            .map(|x| {
                let b = (x * BigRational::from_integer(den.clone())).to_integer();
                let s: i64 = if b.is_negative() { -1 } else { 1 };
                let mag: u64 = b.abs().try_into().unwrap_or(u64::MAX);
                s * mag as i64
            })
            .collect();
        basis.push(ints);
    }
    basis
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Aggregate report for the CLI.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub mu: ExtNat,
    pub tau: ExtNat,
    pub tilde_mu: ExtNat,
    pub isolated: bool,
    pub in_closure_numeric: bool,
    pub stability: StabilityVerdict,
    pub euler: Option<EulerRelation>,
}

pub fn invariant_report(
    f: &TruncSeries,
    trials: u32,
    l_max: u32,
    rng: &mut dyn RngCore,
) -> Result<InvariantReport> {
    let mu = milnor(f);
    let tau = tjurina(f);
    let tm = tilde_mu(f, trials, rng)?;
    let in_closure = mu.is_finite() && mu == tm;
    let stability = is_mu_stable(f, l_max, trials, rng)?;
    Ok(InvariantReport {
        mu,
        tau,
        tilde_mu: tm,
        isolated: is_isolated(f),
        in_closure_numeric: in_closure,
        stability,
        euler: euler_relation(f),
    })
}

/// Factor the dehomogenized initial form to expose its linear factors;
/// used by callers that need the tangent directions rather than just the
/// power test above.
pub fn initial_form_univariate(f: &TruncSeries) -> Option<FPoly> {
    if f.nvars() != 2 {
        return None;
    }
    let init = f.initial_form();
    let (m0, _) = init.leading()?;
    let d = m0.deg();
    let ctx = f.ctx().clone();
    // init(1, T): substitute X = 1, Y = T
    let mut coeffs = vec![ctx.zero(); d as usize + 1];
    for (m, c) in init.terms() {
        coeffs[m.0[1] as usize] = c.clone();
    }
    Some(FPoly::new(ctx, coeffs))
}
