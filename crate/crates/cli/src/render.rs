//! Shared rendering helpers: extended naturals and stability verdicts in
//! the text and JSON output formats.

use milnor_core::invariants::{StabilityVerdict, UnstableWitness};
use milnor_core::ExtNat;
use serde_json::json;

/// `∞` is the string `"inf"`, a lower bound is `{"at_least": b}`.
pub fn extnat_json(x: &ExtNat) -> serde_json::Value {
    match x {
        ExtNat::Finite(n) => json!(n),
        ExtNat::Infinite => json!("inf"),
        ExtNat::AtLeast(b) => json!({ "at_least": b }),
    }
}

pub fn extnat_text(x: &ExtNat) -> String {
    match x {
        ExtNat::Finite(n) => n.to_string(),
        ExtNat::Infinite => "inf".to_string(),
        ExtNat::AtLeast(b) => format!(">= {b}"),
    }
}

pub fn stability_json(v: &StabilityVerdict) -> serde_json::Value {
    match v {
        StabilityVerdict::Stable(l) => json!({ "stable": l }),
        StabilityVerdict::Unstable(w) => match w {
            UnstableWitness::InitialFormObstruction { d } => {
                json!({ "unstable": { "initial_form_power": d } })
            }
            UnstableWitness::MuGap { mu, tilde } => {
                json!({ "unstable": { "mu": extnat_json(mu), "tilde_mu": extnat_json(tilde) } })
            }
        },
        StabilityVerdict::Unknown(l) => json!({ "unknown_up_to": l }),
    }
}

pub fn stability_text(v: &StabilityVerdict) -> String {
    match v {
        StabilityVerdict::Stable(l) => format!("stable (l = {l})"),
        StabilityVerdict::Unstable(UnstableWitness::InitialFormObstruction { d }) => {
            format!("unstable (initial form is an L^{d} with p | {d})")
        }
        StabilityVerdict::Unstable(UnstableWitness::MuGap { mu, tilde }) => format!(
            "unstable (mu = {} > tilde_mu = {})",
            extnat_text(mu),
            extnat_text(tilde)
        ),
        StabilityVerdict::Unknown(l) => format!("undecided up to l = {l}"),
    }
}
