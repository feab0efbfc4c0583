use core::fmt;

/// `N ∪ {∞}` with an exactness flag.
///
/// `AtLeast(b)` records that a quantity could only be certified to be `>= b`
/// because a truncated series ran out of precision. `Infinite` is only
/// produced by certified infiniteness proofs (e.g. a leading ideal without a
/// pure variable power, for polynomial input).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtNat {
    Finite(u64),
    Infinite,
    AtLeast(u64),
}

impl ExtNat {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtNat::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNat::Infinite)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ExtNat::AtLeast(_))
    }

    /// The finite value, if exact and finite.
    pub fn finite(&self) -> Option<u64> {
        match self {
            ExtNat::Finite(v) => Some(*v),
            _ => None,
        }
    }

    /// Minimum; a certified finite value below an `AtLeast` bound wins,
    /// otherwise uncertainty is preserved.
    pub fn min(self, other: ExtNat) -> ExtNat {
        use ExtNat::*;
        match (self, other) {
            (Infinite, x) | (x, Infinite) => x,
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (Finite(a), AtLeast(b)) | (AtLeast(b), Finite(a)) => {
                if a <= b {
                    Finite(a)
                } else {
                    AtLeast(b)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }

    /// Exact sum; `AtLeast` is contagious, `Infinite` absorbs.
    pub fn add(self, other: ExtNat) -> ExtNat {
        use ExtNat::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite(a), Finite(b)) => Finite(a + b),
            (Finite(a), AtLeast(b)) | (AtLeast(a), Finite(b)) | (AtLeast(a), AtLeast(b)) => {
                AtLeast(a + b)
            }
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinite => write!(f, "inf"),
            ExtNat::AtLeast(b) => write!(f, ">={b}"),
        }
    }
}
