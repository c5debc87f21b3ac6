//! Among with a constant value set, by counting bounds.
//!
//! `lb` counts variables forced into S, `ub` those that may enter S. Every
//! count in `lb..=ub` is reachable because the variables are independent.

use std::collections::BTreeSet;

use crate::csp::{ConstraintSpec, Instance, Value};

use super::{domain_of, wrong_kind, PropagationOutcome, PropagatorError};

const NAME: &str = "among-const";

pub fn among_const_gac(inst: &Instance) -> Result<PropagationOutcome, PropagatorError> {
    let ConstraintSpec::AmongConst { scope, value_set } = inst.constraint() else {
        return Err(wrong_kind(NAME, "AmongConst", inst));
    };
    let vars = inst.constraint().distinct_scope();
    if vars.len() != scope.len() {
        return Err(PropagatorError::Unsupported {
            propagator: NAME,
            reason: "repeated variable in scope".into(),
        });
    }
    let doms: Vec<BTreeSet<Value>> = vars.iter().map(|v| domain_of(inst, v)).collect::<Result<_, _>>()?;
    if doms.iter().any(BTreeSet::is_empty) {
        return Ok(PropagationOutcome::wiped(inst, &vars));
    }
    let (n_dom, xs) = doms.split_first().expect("scope starts with N");
    let must: Vec<bool> = xs.iter().map(|d| d.is_subset(value_set)).collect();
    let can: Vec<bool> = xs.iter().map(|d| !d.is_disjoint(value_set)).collect();
    let lb = must.iter().filter(|&&b| b).count() as Value;
    let ub = can.iter().filter(|&&b| b).count() as Value;
    let n_kept: BTreeSet<Value> = n_dom.iter().copied().filter(|&c| lb <= c && c <= ub).collect();

    let mut out = vec![n_kept.clone()];
    for (i, d) in xs.iter().enumerate() {
        let lo = lb - must[i] as Value;
        let hi = ub - can[i] as Value;
        out.push(
            d.iter()
                .copied()
                .filter(|v| {
                    let s = value_set.contains(v) as Value;
                    n_kept.range(lo + s..=hi + s).next().is_some()
                })
                .collect(),
        );
    }
    Ok(PropagationOutcome::build(inst, &vars, out, true))
}
