//! Fixed-interval global cardinality by feasible circulation.
//!
//! Network: `s -> x` with bounds [1,1], `x -> v` [0,1] for `v` in `D(x)`,
//! `v -> t` with the occurrence interval of `v`, and `t -> s`. A
//! solution is a feasible circulation. An arc `x -> v` carrying no flow can
//! carry flow in some other circulation iff `x` and `v` share a strongly
//! connected component of the residual graph.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::csp::{ConstraintSpec, Instance, Interval, Value};

use super::flow::{circulation, Bounded};
use super::{domain_of, wrong_kind, PropagationOutcome, PropagatorError};

const NAME: &str = "gcc";

pub fn gcc_fixed_gac(inst: &Instance) -> Result<PropagationOutcome, PropagatorError> {
    let ConstraintSpec::Gcc { scope, occ } = inst.constraint() else {
        return Err(wrong_kind(NAME, "Gcc", inst));
    };
    let vars = inst.constraint().distinct_scope();
    if vars.len() != scope.len() {
        return Err(PropagatorError::Unsupported {
            propagator: NAME,
            reason: "repeated variable in scope".into(),
        });
    }
    let doms: Vec<BTreeSet<Value>> = vars.iter().map(|v| domain_of(inst, v)).collect::<Result<_, _>>()?;
    let n = vars.len();
    let values: Vec<Value> = doms
        .iter()
        .flatten()
        .copied()
        .chain(occ.keys().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let vidx: BTreeMap<Value, usize> = values.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let (s, t) = (0, 1);
    let xnode = |i: usize| 2 + i;
    let vnode = |j: usize| 2 + n + j;
    let nodes = 2 + n + values.len();
    let mut arcs = Vec::new();
    let mut edge_arc: Vec<Vec<(Value, usize)>> = vec![Vec::new(); n];
    for (i, d) in doms.iter().enumerate() {
        arcs.push(Bounded { from: s, to: xnode(i), lo: 1, hi: 1 });
        for &v in d {
            edge_arc[i].push((v, arcs.len()));
            arcs.push(Bounded { from: xnode(i), to: vnode(vidx[&v]), lo: 0, hi: 1 });
        }
    }
    for (j, v) in values.iter().enumerate() {
        let Interval { min, max } = occ.get(v).copied().unwrap_or(Interval::new(0, n as u32));
        arcs.push(Bounded {
            from: vnode(j),
            to: t,
            lo: i64::from(min),
            hi: i64::from(max),
        });
    }
    arcs.push(Bounded { from: t, to: s, lo: 0, hi: n as i64 });

    let Some(flow) = circulation(nodes, &arcs) else {
        return Ok(PropagationOutcome::wiped(inst, &vars));
    };

    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(nodes, arcs.len());
    let ids: Vec<_> = (0..nodes).map(|_| g.add_node(())).collect();
    for (a, &f) in arcs.iter().zip(&flow) {
        if f < a.hi {
            g.add_edge(ids[a.from], ids[a.to], ());
        }
        if f > a.lo {
            g.add_edge(ids[a.to], ids[a.from], ());
        }
    }
    let mut comp = vec![0usize; nodes];
    for (c, members) in tarjan_scc(&g).into_iter().enumerate() {
        for node in members {
            comp[node.index()] = c;
        }
    }

    let kept: Vec<BTreeSet<Value>> = edge_arc
        .iter()
        .enumerate()
        .map(|(i, es)| {
            es.iter()
                .filter(|&&(v, a)| flow[a] == 1 || comp[xnode(i)] == comp[vnode(vidx[&v])])
                .map(|&(v, _)| v)
                .collect()
        })
        .collect();
    Ok(PropagationOutcome::build(inst, &vars, kept, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::VarId;

    fn inst(n: usize, dom: &[Value], occ: &[(Value, u32, u32)]) -> Instance {
        let names: Vec<VarId> = (1..=n).map(|i| VarId::new(format!("X{i}"))).collect();
        Instance::from_scope(
            ConstraintSpec::Gcc {
                scope: names.clone(),
                occ: occ.iter().map(|&(v, l, u)| (v, Interval::new(l, u))).collect(),
            },
            names.into_iter().map(|x| (x, dom.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn exact_permutation_keeps_everything() {
        let out = gcc_fixed_gac(&inst(2, &[1, 2], &[(1, 1, 1), (2, 1, 1)])).unwrap();
        assert!(out.removed.is_empty());
    }

    #[test]
    fn capacity_shortfall_wipes_out() {
        let out = gcc_fixed_gac(&inst(3, &[1, 2], &[(1, 0, 1), (2, 0, 1)])).unwrap();
        assert!(out.wipeout);
    }

    #[test]
    fn lower_bound_forces_value() {
        // Value 1 needs two occurrences among two variables.
        let out = gcc_fixed_gac(&inst(2, &[1, 2], &[(1, 2, 2)])).unwrap();
        for (_, d) in out.domains.iter() {
            assert_eq!(d, &BTreeSet::from([1]));
        }
    }
}
