//! Numerical semigroups: membership, Apery sets, conductors, gaps, and the
//! structural predicates used for branch semigroups (strongly increasing,
//! nice, symmetric, tame).

use crate::error::{Error, Result};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// A numerical semigroup `<v_0, ..., v_g>` with `gcd = 1`, stored by its
/// minimal generators in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalSemigroup {
    gens: Vec<u64>,
    /// Apery set w.r.t. the multiplicity `v_0`: `apery[r]` is the least
    /// element congruent to `r` mod `v_0`.
    apery: Vec<u64>,
}

impl NumericalSemigroup {
    pub fn new(gens: &[u64]) -> Result<NumericalSemigroup> {
        if gens.is_empty() || gens.contains(&0) {
            return Err(Error::Domain(String::from(
                "semigroup generators must be positive",
            )));
        }
        let mut g: Vec<u64> = gens.to_vec();
        g.sort_unstable();
        g.dedup();
        let gcd = g.iter().fold(0u64, |a, &b| gcd(a, b));
        if gcd != 1 {
            return Err(Error::Domain(String::from(
                "semigroup generators must be coprime",
            )));
        }
        let apery = apery_of(&g);
        // drop redundant generators: v is redundant iff it is in the
        // semigroup generated by the others
        let mut minimal: Vec<u64> = Vec::new();
        for i in 0..g.len() {
            let others: Vec<u64> = g
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &v)| v)
                .collect();
            if others.is_empty() || !in_semigroup(&others, g[i]) {
                minimal.push(g[i]);
            }
        }
        let apery = if minimal.len() == g.len() {
            apery
        } else {
            apery_of(&minimal)
        };
        Ok(NumericalSemigroup {
            gens: minimal,
            apery,
        })
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    /// Multiplicity `v_0`.
    pub fn multiplicity(&self) -> u64 {
        self.gens[0]
    }

    pub fn contains(&self, n: u64) -> bool {
        let v0 = self.gens[0];
        n >= self.apery[(n % v0) as usize]
    }

    /// Apery set with respect to the multiplicity, indexed by residue.
    pub fn apery_set(&self) -> &[u64] {
        &self.apery
    }

    /// Largest gap; `None` when the semigroup is all of `N` (i.e. `1` is a
    /// generator).
    pub fn frobenius(&self) -> Option<u64> {
        let m = *self.apery.iter().max().unwrap();
        let v0 = self.gens[0];
        if m < v0 {
            None
        } else {
            Some(m - v0)
        }
    }

    /// Least `c` with `[c, inf)` contained in the semigroup.
    pub fn conductor(&self) -> u64 {
        self.frobenius().map(|f| f + 1).unwrap_or(0)
    }

    /// Conductor by the closed formula for a nice generator sequence:
    /// `sum (n_i - 1) v_i - v_0 + 1`.
    pub fn conductor_formula(&self) -> u64 {
        let g = self.gens.len() - 1;
        let mut acc: i128 = 1 - self.gens[0] as i128;
        for i in 1..=g {
            acc += (self.n(i) as i128 - 1) * self.gens[i] as i128;
        }
        acc.max(0) as u64
    }

    pub fn gaps(&self) -> Vec<u64> {
        (0..self.conductor()).filter(|&n| !self.contains(n)).collect()
    }

    pub fn genus(&self) -> u64 {
        self.gaps().len() as u64
    }

    /// `e_i = gcd(v_0, ..., v_i)`.
    pub fn e(&self, i: usize) -> u64 {
        self.gens[..=i].iter().fold(0, |a, &b| gcd(a, b))
    }

    /// `n_i = e_{i-1} / e_i` for `i >= 1`.
    pub fn n(&self, i: usize) -> u64 {
        assert!(i >= 1);
        self.e(i - 1) / self.e(i)
    }

    /// `v_1 > v_0` and `v_{i+1} > n_i v_i` for `i = 1, ..., g-1`.
    pub fn is_strongly_increasing(&self) -> bool {
        let g = self.gens.len() - 1;
        if g == 0 {
            return true;
        }
        if self.gens[1] <= self.gens[0] {
            return false;
        }
        (1..g).all(|i| self.gens[i + 1] > self.n(i) * self.gens[i])
    }

    /// `n_i v_i` lies in `<v_0, ..., v_{i-1}>` for every `i >= 1`.
    pub fn is_nice(&self) -> bool {
        let g = self.gens.len() - 1;
        (1..=g).all(|i| in_semigroup(&self.gens[..i], self.n(i) * self.gens[i]))
    }

    /// `z` is in the semigroup iff `c - 1 - z` is not, for all `z`.
    pub fn is_symmetric(&self) -> bool {
        let c = self.conductor();
        if c == 0 {
            return true;
        }
        (0..c).all(|z| self.contains(z) != self.contains(c - 1 - z))
    }

    /// No minimal generator is divisible by the characteristic.
    pub fn is_tame(&self, p: u64) -> bool {
        p == 0 || self.gens.iter().all(|&v| v % p != 0)
    }

    /// `S \ (S + c - 1)`: the values swept by intersection with elements of
    /// degree below the multiplicity. A finite set of size `c`.
    pub fn sweep_set(&self) -> Vec<u64> {
        let c = self.conductor();
        if c == 0 {
            return vec![0];
        }
        let mut out = Vec::new();
        for s in 0..=2 * c - 2 {
            if !self.contains(s) {
                continue;
            }
            let shifted_in = s >= c - 1 && self.contains(s - (c - 1));
            if !shifted_in {
                out.push(s);
            }
        }
        out
    }

    /// The bijection `{0, ..., c-1} -> S \ (S + c - 1)`: `i` maps to `i`
    /// when `i` is in the semigroup and to `i + c - 1` otherwise.
    pub fn sweep_bijection(&self) -> Vec<(u64, u64)> {
        let c = self.conductor();
        (0..c.max(1))
            .map(|i| {
                if self.contains(i) {
                    (i, i)
                } else {
                    (i, i + c - 1)
                }
            })
            .collect()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Apery set of the (not necessarily minimal) generating set `gens` w.r.t.
/// the smallest generator, by shortest-path relaxation on residues.
fn apery_of(gens: &[u64]) -> Vec<u64> {
    let v0 = gens[0] as usize;
    let mut ap = vec![u64::MAX; v0];
    ap[0] = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for r in 0..v0 {
            if ap[r] == u64::MAX {
                continue;
            }
            for &g in gens {
                let nr = ((r as u64 + g) % v0 as u64) as usize;
                let cand = ap[r] + g;
                if cand < ap[nr] {
                    ap[nr] = cand;
                    changed = true;
                }
            }
        }
    }
    ap
}

fn in_semigroup(gens: &[u64], n: u64) -> bool {
    if n == 0 {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let ap = apery_of(gens);
    let v0 = gens[0];
    let d = gcd_all(gens);
    if n % d != 0 {
        return false;
    }
    // work in the scaled semigroup when gcd > 1
    if d > 1 {
        let scaled: Vec<u64> = gens.iter().map(|&g| g / d).collect();
        return in_semigroup(&scaled, n / d);
    }
    n >= ap[(n % v0) as usize]
}

fn gcd_all(gens: &[u64]) -> u64 {
    gens.iter().fold(0, |a, &b| gcd(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductor_matches_formula_for_branch_semigroups() {
        for gens in [&[3u64, 11][..], &[4, 6, 25], &[18, 26, 301], &[2, 3]] {
            let s = NumericalSemigroup::new(gens).unwrap();
            assert!(s.is_strongly_increasing(), "{gens:?}");
            assert!(s.is_nice(), "{gens:?}");
            assert!(s.is_symmetric(), "{gens:?}");
            assert_eq!(s.conductor(), s.conductor_formula(), "{gens:?}");
        }
    }

    #[test]
    fn conductor_values() {
        assert_eq!(NumericalSemigroup::new(&[3, 11]).unwrap().conductor(), 20);
        assert_eq!(NumericalSemigroup::new(&[4, 6, 25]).unwrap().conductor(), 28);
        assert_eq!(
            NumericalSemigroup::new(&[18, 26, 301]).unwrap().conductor(),
            492
        );
        assert_eq!(NumericalSemigroup::new(&[2, 3]).unwrap().conductor(), 2);
        assert_eq!(NumericalSemigroup::new(&[1]).unwrap().conductor(), 0);
    }

    #[test]
    fn apery_set_small() {
        let s = NumericalSemigroup::new(&[3, 11]).unwrap();
        assert_eq!(s.apery_set(), &[0, 22, 11]);
        assert_eq!(s.frobenius(), Some(19));
    }

    #[test]
    fn membership_and_gaps() {
        let s = NumericalSemigroup::new(&[3, 11]).unwrap();
        for n in [0, 3, 6, 9, 11, 12, 14, 22] {
            assert!(s.contains(n), "{n}");
        }
        for n in [1, 2, 4, 5, 7, 8, 10, 13, 16, 19] {
            assert!(!s.contains(n), "{n}");
        }
        // symmetric: genus = c / 2
        assert_eq!(s.genus(), 10);
    }

    #[test]
    fn minimal_generators_enforced() {
        let s = NumericalSemigroup::new(&[4, 6, 10, 25]).unwrap();
        assert_eq!(s.generators(), &[4, 6, 25]);
    }

    #[test]
    fn non_symmetric_semigroup_detected() {
        let s = NumericalSemigroup::new(&[3, 4, 5]).unwrap();
        assert!(!s.is_symmetric());
        assert_eq!(s.conductor(), 3);
    }

    #[test]
    fn tameness_depends_on_characteristic() {
        let s = NumericalSemigroup::new(&[4, 6, 25]).unwrap();
        assert!(!s.is_tame(2)); // 2 | 4
        assert!(!s.is_tame(5)); // 5 | 25
        assert!(s.is_tame(7));
        assert!(s.is_tame(0));
        let t = NumericalSemigroup::new(&[3, 11]).unwrap();
        assert!(!t.is_tame(3));
        assert!(t.is_tame(5));
    }

    #[test]
    fn sweep_set_has_conductor_many_elements() {
        for gens in [&[3u64, 11][..], &[4, 6, 25], &[2, 3], &[18, 26, 301]] {
            let s = NumericalSemigroup::new(gens).unwrap();
            let sweep = s.sweep_set();
            assert_eq!(sweep.len() as u64, s.conductor().max(1), "{gens:?}");
            // the explicit bijection lands exactly on the sweep set
            let mut image: Vec<u64> = s.sweep_bijection().iter().map(|&(_, s)| s).collect();
            image.sort_unstable();
            assert_eq!(image, sweep, "{gens:?}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NumericalSemigroup::new(&[]).is_err());
        assert!(NumericalSemigroup::new(&[0, 3]).is_err());
        assert!(NumericalSemigroup::new(&[4, 6]).is_err());
    }
}
