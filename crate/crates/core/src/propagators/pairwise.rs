//! Arc consistency on the binary relations of a network taken separately,
//! i.e. on its decomposition rather than on the network as one constraint.

use std::collections::{BTreeSet, VecDeque};

use crate::csp::{ConstraintSpec, Instance, Value};

use super::{domain_of, wrong_kind, PropagationOutcome, PropagatorError};

pub fn pairwise_ac(inst: &Instance) -> Result<PropagationOutcome, PropagatorError> {
    let ConstraintSpec::BinaryNetwork { scope, relations } = inst.constraint() else {
        return Err(wrong_kind("pairwise-ac", "BinaryNetwork", inst));
    };
    let vars = inst.constraint().distinct_scope();
    let idx = |p: usize| vars.iter().position(|v| v == &scope[p]).expect("scope var");
    let mut doms: Vec<BTreeSet<Value>> = vars.iter().map(|v| domain_of(inst, v)).collect::<Result<_, _>>()?;

    // Directed arcs (x, y, allowed (vx, vy) pairs).
    let mut arcs: Vec<(usize, usize, Vec<(Value, Value)>)> = Vec::new();
    for r in relations {
        let (x, y) = (idx(r.i), idx(r.j));
        if x == y {
            doms[x].retain(|v| r.pairs.contains(&(*v, *v)));
            continue;
        }
        arcs.push((x, y, r.pairs.iter().copied().collect()));
        arcs.push((y, x, r.pairs.iter().map(|&(a, b)| (b, a)).collect()));
    }
    let mut queue: VecDeque<usize> = (0..arcs.len()).collect();
    let mut queued = vec![true; arcs.len()];
    while let Some(a) = queue.pop_front() {
        queued[a] = false;
        let (x, y, pairs) = &arcs[a];
        let before = doms[*x].len();
        let ydom = doms[*y].clone();
        doms[*x].retain(|v| pairs.iter().any(|&(a, b)| a == *v && ydom.contains(&b)));
        if doms[*x].len() != before {
            for (b, (_, by, _)) in arcs.iter().enumerate() {
                if by == x && !queued[b] {
                    queued[b] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    Ok(PropagationOutcome::build(inst, &vars, doms, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{BinaryRelation, VarId};

    #[test]
    fn revises_until_fixpoint() {
        // X < Y < Z over {1,2,3}.
        let lt: BTreeSet<(Value, Value)> = [(1, 2), (1, 3), (2, 3)].into();
        let names: Vec<VarId> = ["X", "Y", "Z"].into_iter().map(VarId::from).collect();
        let inst = Instance::from_scope(
            ConstraintSpec::BinaryNetwork {
                scope: names.clone(),
                relations: vec![
                    BinaryRelation { i: 0, j: 1, pairs: lt.clone() },
                    BinaryRelation { i: 1, j: 2, pairs: lt },
                ],
            },
            names.into_iter().map(|n| (n, vec![1, 2, 3])),
        )
        .unwrap();
        let out = pairwise_ac(&inst).unwrap();
        for (n, v) in [("X", 1), ("Y", 2), ("Z", 3)] {
            assert_eq!(out.domains.get(&n.into()).unwrap(), &BTreeSet::from([v]));
        }
    }
}
