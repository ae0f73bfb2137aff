use std::fmt;

use num_bigint::BigUint;

use crate::eci::EciCertificate;
use crate::khovanskii::IndexSubset;
use crate::lattice::Sublattice;

/// Outcome of a component count or an irreducibility search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The general system defines an irreducible variety. The certificate is
    /// present when the verdict came from an adjusted-collection search.
    Irreducible { certificate: Option<EciCertificate> },
    /// The general system has no solutions in the torus; `witness` has
    /// negative defect.
    Empty { witness: IndexSubset },
    /// The general solution set has `count` geometric components.
    Components {
        count: BigUint,
        j0: IndexSubset,
        lattice: Sublattice,
    },
    /// A one-sided search ran out of options or budget.
    Inconclusive { reason: String, explored_states: u64 },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Irreducible { .. } => "irreducible",
            Verdict::Empty { .. } => "empty",
            Verdict::Components { .. } => "components",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_definitive(&self) -> bool {
        !matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn certificate(&self) -> Option<&EciCertificate> {
        match self {
            Verdict::Irreducible { certificate } => certificate.as_ref(),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Irreducible { .. } => write!(f, "irreducible"),
            Verdict::Empty { witness } => write!(f, "empty (defect of {witness} is negative)"),
            Verdict::Components { count, j0, .. } => write!(f, "{count} components (J0 = {j0})"),
            Verdict::Inconclusive { reason, explored_states } => {
                write!(f, "inconclusive after {explored_states} states: {reason}")
            }
        }
    }
}
