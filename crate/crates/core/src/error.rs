use alloc::string::String;
use core::fmt;

/// Errors shared by all computational layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// `make_field` was asked for a composite characteristic.
    NotPrime(u64),
    /// A root outside the current field was needed while extensions were disabled.
    ExtensionDisabled,
    /// An n-th root with `p | n` was requested.
    WildExponent { n: u64, p: u64 },
    /// Series inversion of a non-unit.
    NotAUnit,
    /// Substitution images do not define an automorphism (singular linear part).
    NotAutomorphism,
    /// Weierstrass division requires `f(0, Y)` of finite Y-order.
    NotYGeneral,
    /// A computation ran out of truncation precision.
    PrecisionExhausted,
    /// `mprimary_exponent` on an ideal of infinite colength.
    NotMPrimary,
    /// The parametrization algorithm detected more than one branch.
    Reducible,
    /// The two Hilbert-Samuel estimators kept disagreeing after a field extension.
    GenericityFailure,
    /// Conductor machinery on a semigroup that is not strongly increasing.
    NotStronglyIncreasing,
    /// An approximate-root construction with `p | v0`.
    WildMultiplicity { p: u64, v0: u64 },
    /// A construction that requires a tame semigroup got a wild one.
    NotTame,
    /// Smoothing verdicts require an isolated singularity.
    NotIsolated,
    /// Anything else; carries a short description.
    Domain(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::ExtensionDisabled => write!(f, "a field extension is required but disabled"),
            Error::WildExponent { n, p } => write!(f, "n-th root with p | n (n = {n}, p = {p})"),
            Error::NotAUnit => write!(f, "series is not a unit"),
            Error::NotAutomorphism => write!(f, "substitution is not an automorphism"),
            Error::NotYGeneral => write!(f, "series is not Y-general to the working precision"),
            Error::PrecisionExhausted => write!(f, "truncation precision exhausted"),
            Error::NotMPrimary => write!(f, "ideal is not m-primary"),
            Error::Reducible => write!(f, "curve is not irreducible"),
            Error::GenericityFailure => {
                write!(f, "generic-element estimators disagree after field extension")
            }
            Error::NotStronglyIncreasing => write!(f, "semigroup is not strongly increasing"),
            Error::WildMultiplicity { p, v0 } => {
                write!(f, "wild multiplicity: p = {p} divides v0 = {v0}")
            }
            Error::NotTame => write!(f, "semigroup is not tame"),
            Error::NotIsolated => write!(f, "singularity is not isolated"),
            Error::Domain(s) => write!(f, "{s}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
