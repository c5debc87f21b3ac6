//! AllDifferent by maximum matching and strongly connected components.
//!
//! With a matching covering every variable, orient matched edges
//! variable -> value and the others value -> variable. An unmatched edge
//! survives iff its endpoints share a strongly connected component or its
//! value is reachable from a free value (an even alternating path).

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::Dfs;

use crate::csp::{ConstraintSpec, Instance, Value};

use super::{domain_of, wrong_kind, PropagationOutcome, PropagatorError};

const NAME: &str = "alldifferent";

pub fn alldifferent_gac(inst: &Instance) -> Result<PropagationOutcome, PropagatorError> {
    let ConstraintSpec::AllDifferent { scope } = inst.constraint() else {
        return Err(wrong_kind(NAME, "AllDifferent", inst));
    };
    let vars = inst.constraint().distinct_scope();
    if vars.len() != scope.len() {
        // Two positions always carry the same value.
        return Ok(PropagationOutcome::wiped(inst, &vars));
    }
    let doms: Vec<BTreeSet<Value>> = vars.iter().map(|v| domain_of(inst, v)).collect::<Result<_, _>>()?;
    let values: Vec<Value> = doms.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let vidx: BTreeMap<Value, usize> = values.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = doms.iter().map(|d| d.iter().map(|v| vidx[v]).collect()).collect();

    let n = vars.len();
    let mut owner: Vec<Option<usize>> = vec![None; values.len()];
    let mut mate: Vec<Option<usize>> = vec![None; n];
    for x in 0..n {
        let mut seen = vec![false; values.len()];
        if !augment(x, &adj, &mut owner, &mut mate, &mut seen) {
            return Ok(PropagationOutcome::wiped(inst, &vars));
        }
    }

    // Nodes 0..n are variables, n.. are values.
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n + values.len(), 0);
    let nodes: Vec<NodeIndex> = (0..n + values.len()).map(|_| g.add_node(())).collect();
    for (x, vs) in adj.iter().enumerate() {
        for &v in vs {
            if mate[x] == Some(v) {
                g.add_edge(nodes[x], nodes[n + v], ());
            } else {
                g.add_edge(nodes[n + v], nodes[x], ());
            }
        }
    }
    let mut comp = vec![0usize; g.node_count()];
    for (c, members) in tarjan_scc(&g).into_iter().enumerate() {
        for node in members {
            comp[node.index()] = c;
        }
    }
    let mut from_free = vec![false; g.node_count()];
    let mut dfs = Dfs::empty(&g);
    for (v, o) in owner.iter().enumerate() {
        if o.is_none() {
            dfs.move_to(nodes[n + v]);
            while let Some(node) = dfs.next(&g) {
                from_free[node.index()] = true;
            }
        }
    }

    let kept: Vec<BTreeSet<Value>> = adj
        .iter()
        .enumerate()
        .map(|(x, vs)| {
            vs.iter()
                .filter(|&&v| mate[x] == Some(v) || comp[x] == comp[n + v] || from_free[n + v])
                .map(|&v| values[v])
                .collect()
        })
        .collect();
    Ok(PropagationOutcome::build(inst, &vars, kept, true))
}

fn augment(
    x: usize,
    adj: &[Vec<usize>],
    owner: &mut [Option<usize>],
    mate: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &adj[x] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match owner[v] {
            None => true,
            Some(y) => augment(y, adj, owner, mate, seen),
        };
        if free {
            owner[v] = Some(x);
            mate[x] = Some(v);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::VarId;

    fn inst(doms: &[&[Value]]) -> Instance {
        let names: Vec<VarId> = (1..=doms.len()).map(|i| VarId::new(format!("X{i}"))).collect();
        Instance::from_scope(
            ConstraintSpec::AllDifferent { scope: names.clone() },
            names.into_iter().zip(doms.iter().map(|d| d.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn hall_set_prunes_third_variable() {
        let out = alldifferent_gac(&inst(&[&[1, 2], &[1, 2], &[1, 2, 3]])).unwrap();
        assert_eq!(out.removed, vec![(VarId::from("X3"), 1), (VarId::from("X3"), 2)]);
        assert!(!out.wipeout);
    }

    #[test]
    fn pigeonhole_wipes_out() {
        let out = alldifferent_gac(&inst(&[&[1], &[1]])).unwrap();
        assert!(out.wipeout);
        assert!(out.domains.iter().all(|(_, d)| d.is_empty()));
    }

    #[test]
    fn free_values_keep_edges() {
        let out = alldifferent_gac(&inst(&[&[1, 2, 3], &[2, 3]])).unwrap();
        assert!(out.removed.is_empty());
    }
}
