//! Gadgets over graphs: colour interchangeability, the two-graph maxGAC
//! construction and the walk-based Cardpath.

use std::collections::{BTreeSet, VecDeque};

use crate::csp::{BinaryRelation, ConstraintSpec, DomainMap, Instance, Value, VarId};
use crate::engine::Question;

use super::source::Graph;
use super::{Decoder, Family, GadgetError, GadgetOutput, SourceAnswer};

fn vertex(u: usize) -> VarId {
    VarId::new(format!("V{u}"))
}

fn pairs(f: impl Fn(Value, Value) -> bool, values: std::ops::Range<Value>) -> BTreeSet<(Value, Value)> {
    values
        .clone()
        .flat_map(|a| values.clone().map(move |b| (a, b)))
        .filter(|&(a, b)| f(a, b))
        .collect()
}

fn network(n: usize, rel: impl Fn(usize, usize) -> BTreeSet<(Value, Value)>) -> ConstraintSpec {
    let relations = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| BinaryRelation { i, j, pairs: rel(i, j) })
        .collect();
    ConstraintSpec::BinaryNetwork {
        scope: (0..n).map(vertex).collect(),
        relations,
    }
}

fn colouring_decoder(n: usize) -> Decoder {
    Decoder::Colouring {
        vars: (0..n).map(vertex).collect(),
        probe: (vertex(0), 0),
    }
}

fn require_vertices(g: &Graph) -> Result<(), GadgetError> {
    if g.vertices == 0 {
        return Err(GadgetError::Precondition("graph has no vertices".into()));
    }
    Ok(())
}

/// One variable per vertex over colours `0..3`; adjacent vertices differ,
/// every other pair is unconstrained. All colours are interchangeable, so
/// the network is GAC iff the graph is 3-colourable.
pub fn build_isitgac_gadget(g: &Graph) -> Result<GadgetOutput, GadgetError> {
    require_vertices(g)?;
    let differ = pairs(|a, b| a != b, 0..3);
    let any = pairs(|_, _| true, 0..3);
    let spec = network(g.vertices, |i, j| if g.has_edge(i, j) { differ.clone() } else { any.clone() });
    let inst = Instance::from_scope(spec, (0..g.vertices).map(|u| (vertex(u), vec![0, 1, 2])))?;
    Ok(GadgetOutput {
        family: Family::IsItGac,
        instance: inst,
        question: Question::IsItGac,
        meaning: SourceAnswer::ThreeColourable,
        decoder: colouring_decoder(g.vertices),
    })
}

/// Colours `0..3` carry subscript 1 and `3..6` subscript 2; no pair mixes
/// subscripts. Edges of the first graph force differing subscript-1
/// colours, edges of the second differing subscript-2 colours. The
/// subscript-1 colours form the maximal GAC subdomain iff the first graph
/// is 3-colourable and the second is not.
pub fn build_maxgac_gadget(g1: &Graph, g2: &Graph) -> Result<GadgetOutput, GadgetError> {
    if g1.vertices != g2.vertices {
        return Err(GadgetError::Precondition(format!(
            "vertex sets differ: {} and {} vertices",
            g1.vertices, g2.vertices
        )));
    }
    require_vertices(g1)?;
    let sub = |v: Value| v / 3;
    let rel = |i: usize, j: usize| {
        let (e1, e2) = (g1.has_edge(i, j), g2.has_edge(i, j));
        pairs(
            |a, b| {
                sub(a) == sub(b)
                    && match sub(a) {
                        0 => !e1 || a != b,
                        _ => !e2 || a != b,
                    }
            },
            0..6,
        )
    };
    let spec = network(g1.vertices, rel);
    let inst = Instance::from_scope(spec, (0..g1.vertices).map(|u| (vertex(u), (0..6).collect())))?;
    let mut candidate = DomainMap::new();
    for u in 0..g1.vertices {
        candidate.insert(vertex(u), [0, 1, 2]);
    }
    Ok(GadgetOutput {
        family: Family::MaxGac,
        instance: inst,
        question: Question::MaxGac { candidate },
        meaning: SourceAnswer::FirstColourableSecondNot,
        decoder: colouring_decoder(g1.vertices),
    })
}

/// A walk from vertex 0 in which every edge appears as an adjacent pair.
/// Uncovered edges are taken in sorted order; the walk moves to the nearer
/// endpoint by breadth-first search, then crosses the edge.
pub fn covering_walk(g: &Graph) -> Result<Vec<usize>, GadgetError> {
    if !g.is_connected() {
        return Err(GadgetError::Precondition("graph is not connected".into()));
    }
    if g.edges.is_empty() {
        return Err(GadgetError::Precondition("graph has no edges".into()));
    }
    let adj = g.neighbours();
    let mut walk = vec![0];
    let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
    let step = |walk: &mut Vec<usize>, v: usize, covered: &mut BTreeSet<(usize, usize)>| {
        let u = *walk.last().expect("walk is non-empty");
        covered.insert((u.min(v), u.max(v)));
        walk.push(v);
    };
    for &(a, b) in &g.edges {
        if covered.contains(&(a, b)) {
            continue;
        }
        let from = *walk.last().expect("walk is non-empty");
        let parent = bfs(&adj, from);
        let (near, far) = if depth(&parent, b) < depth(&parent, a) { (b, a) } else { (a, b) };
        let mut path = vec![near];
        while let Some(p) = parent[*path.last().expect("non-empty")].filter(|&p| p != usize::MAX) {
            path.push(p);
        }
        path.pop();
        for &v in path.iter().rev() {
            step(&mut walk, v, &mut covered);
        }
        step(&mut walk, far, &mut covered);
    }
    Ok(walk)
}

/// BFS tree: `parent[root] = Some(usize::MAX)`, unreachable `None`.
fn bfs(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; adj.len()];
    parent[root] = Some(usize::MAX);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if parent[v].is_none() {
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    parent
}

fn depth(parent: &[Option<usize>], mut v: usize) -> usize {
    let mut d = 0;
    while let Some(p) = parent[v].filter(|&p| p != usize::MAX) {
        v = p;
        d += 1;
    }
    d
}

/// Binary not-equal over colours `0..3`, on placeholders `a`, `b`.
pub fn not_equal_template() -> ConstraintSpec {
    ConstraintSpec::Table {
        scope: vec!["a".into(), "b".into()],
        tuples: pairs(|a, b| a != b, 0..3).into_iter().map(|(a, b)| vec![a, b]).collect(),
    }
}

/// Cardpath over a covering walk of vertex variables, with every adjacent
/// pair required to differ.
pub fn build_cardpath_3col_gadget(g: &Graph) -> Result<GadgetOutput, GadgetError> {
    let walk = covering_walk(g)?;
    let mut scope = vec![VarId::from("N")];
    scope.extend(walk.iter().map(|&u| vertex(u)));
    let mut doms = vec![(VarId::from("N"), vec![walk.len() as Value - 1])];
    doms.extend((0..g.vertices).map(|u| (vertex(u), vec![0, 1, 2])));
    let inst = Instance::from_scope(
        ConstraintSpec::Cardpath {
            scope,
            template: Box::new(not_equal_template()),
        },
        doms,
    )?;
    Ok(GadgetOutput {
        family: Family::CardpathThreeCol,
        instance: inst,
        question: Question::NoGacWipeout,
        meaning: SourceAnswer::ThreeColourable,
        decoder: colouring_decoder(g.vertices),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adjacent_pairs_cover(g: &Graph, walk: &[usize]) -> bool {
        let pairs: BTreeSet<_> = walk.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
        walk.windows(2).all(|w| g.has_edge(w[0], w[1])) && g.edges.iter().all(|e| pairs.contains(e))
    }

    #[test]
    fn walks_cover_every_edge() {
        for g in [
            Graph::complete(3),
            Graph::complete(4),
            Graph::new(3, [(0, 1), (1, 2)]).unwrap(),
            Graph::new(5, [(0, 4), (1, 4), (2, 3), (3, 4)]).unwrap(),
        ] {
            let w = covering_walk(&g).unwrap();
            assert_eq!(w[0], 0);
            assert!(adjacent_pairs_cover(&g, &w), "{g:?} {w:?}");
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(covering_walk(&g), Err(GadgetError::Precondition(_))));
    }

    #[test]
    fn maxgac_relations_never_mix_subscripts() {
        let out = build_maxgac_gadget(&Graph::complete(2), &Graph::new(2, []).unwrap()).unwrap();
        let ConstraintSpec::BinaryNetwork { relations, .. } = out.instance.constraint() else {
            unreachable!()
        };
        let r = &relations[0].pairs;
        assert!(!r.contains(&(0, 3)));
        assert!(!r.contains(&(1, 1)));
        assert!(r.contains(&(4, 4)));
        assert_eq!(r.len(), 6 + 9);
    }
}
