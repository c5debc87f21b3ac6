//! Specialized polynomial GAC filters for the tractable constraint kinds.
//!
//! Each filter returns exactly the maximal GAC subdomain that the generic
//! engine would compute, including its wipe-out convention: when the
//! constraint has no solution every scope domain comes back empty.
//!
//! The filters refuse instances outside their tractable regime (repeated
//! variables, oversized windows) with [`PropagatorError::Unsupported`] or
//! [`PropagatorError::ArityTooLarge`] rather than falling back to search.

mod alldiff;
mod among;
mod cardpath;
mod flow;
mod gcc;
mod pairwise;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csp::{CspError, DomainMap, Instance, Value, VarId};

pub use alldiff::alldifferent_gac;
pub use among::among_const_gac;
pub use cardpath::{cardpath_count_lattice, cardpath_dp_gac, cardpath_dp_gac_with_limit, CountLattice};
pub use gcc::gcc_fixed_gac;
pub use pairwise::pairwise_ac;

/// Largest number of tuples a single Cardpath window may range over.
pub const DEFAULT_WINDOW_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropagatorError {
    #[error("{propagator} expects a {expected} constraint, got {found}")]
    WrongKind {
        propagator: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("{propagator} does not support this instance: {reason}")]
    Unsupported {
        propagator: &'static str,
        reason: String,
    },
    #[error("window of {tuples} tuples exceeds the enumeration limit {limit}")]
    ArityTooLarge { tuples: u64, limit: u64 },
    #[error(transparent)]
    Csp(#[from] CspError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationOutcome {
    pub domains: DomainMap,
    pub removed: Vec<(VarId, Value)>,
    pub wipeout: bool,
}

impl PropagationOutcome {
    /// Outcome for `inst` after replacing the domains of `vars`. When
    /// `empty_all_on_wipeout` is set and some new domain is empty, every
    /// listed domain is emptied.
    fn build(
        inst: &Instance,
        vars: &[VarId],
        mut doms: Vec<BTreeSet<Value>>,
        empty_all_on_wipeout: bool,
    ) -> Self {
        let wipeout = doms.iter().any(BTreeSet::is_empty);
        if wipeout && empty_all_on_wipeout {
            doms.iter_mut().for_each(BTreeSet::clear);
        }
        let mut domains = inst.domains().clone();
        for (v, d) in vars.iter().zip(doms) {
            domains.insert(v.clone(), d);
        }
        let removed = inst.domains().removed_relative_to(&domains);
        PropagationOutcome {
            domains,
            removed,
            wipeout,
        }
    }

    fn wiped(inst: &Instance, vars: &[VarId]) -> Self {
        Self::build(inst, vars, vec![BTreeSet::new(); vars.len()], true)
    }
}

fn wrong_kind(propagator: &'static str, expected: &'static str, inst: &Instance) -> PropagatorError {
    PropagatorError::WrongKind {
        propagator,
        expected,
        found: inst.constraint().kind_name(),
    }
}

fn domain_of(inst: &Instance, v: &VarId) -> Result<BTreeSet<Value>, PropagatorError> {
    inst.domain(v)
        .cloned()
        .ok_or_else(|| CspError::MissingVariable(v.clone()).into())
}
