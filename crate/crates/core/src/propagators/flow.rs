//! Small max-flow network (Edmonds-Karp) with lower-bound circulation.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Network {
    adj: Vec<Vec<Arc>>,
}

/// Handle to an arc: `(from, position in adj[from])`.
pub(crate) type ArcId = (usize, usize);

impl Network {
    pub(crate) fn new(nodes: usize) -> Self {
        Network {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub(crate) fn add(&mut self, from: usize, to: usize, cap: i64) -> ArcId {
        let a = self.adj[from].len();
        let b = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, cap, rev: b });
        self.adj[to].push(Arc { to: from, cap: 0, rev: a });
        (from, a)
    }

    /// Remaining capacity of an arc.
    pub(crate) fn residual(&self, id: ArcId) -> i64 {
        self.adj[id.0][id.1].cap
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut prev: Vec<Option<ArcId>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    reached = true;
                    break;
                }
                for (i, a) in self.adj[u].iter().enumerate() {
                    if a.cap > 0 && a.to != s && prev[a.to].is_none() {
                        prev[a.to] = Some((u, i));
                        queue.push_back(a.to);
                    }
                }
            }
            if !reached {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                push = push.min(self.adj[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.adj[u][i].cap -= push;
                let (to, rev) = (self.adj[u][i].to, self.adj[u][i].rev);
                self.adj[to][rev].cap += push;
                v = u;
            }
            total += push;
        }
    }
}

/// Arc of a circulation problem with bounds `lo..=hi`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Bounded {
    pub from: usize,
    pub to: usize,
    pub lo: i64,
    pub hi: i64,
}

/// Feasible circulation, if any: the flow on each arc, in input order.
pub(crate) fn circulation(nodes: usize, arcs: &[Bounded]) -> Option<Vec<i64>> {
    let (src, sink) = (nodes, nodes + 1);
    let mut net = Network::new(nodes + 2);
    let mut excess = vec![0i64; nodes];
    let ids: Vec<ArcId> = arcs
        .iter()
        .map(|a| {
            excess[a.to] += a.lo;
            excess[a.from] -= a.lo;
            net.add(a.from, a.to, a.hi - a.lo)
        })
        .collect();
    let mut need = 0;
    for (v, &e) in excess.iter().enumerate() {
        if e > 0 {
            net.add(src, v, e);
            need += e;
        } else if e < 0 {
            net.add(v, sink, -e);
        }
    }
    if net.max_flow(src, sink) != need {
        return None;
    }
    Some(
        arcs.iter()
            .zip(ids)
            .map(|(a, id)| a.hi - net.residual(id))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bounds_are_met_or_rejected() {
        // 0 -> 1 -> 0 cycle, the first arc demands at least 2 units.
        let ok = [
            Bounded { from: 0, to: 1, lo: 2, hi: 3 },
            Bounded { from: 1, to: 0, lo: 0, hi: 5 },
        ];
        let f = circulation(2, &ok).unwrap();
        assert!(f[0] >= 2 && f[0] == f[1]);
        let bad = [
            Bounded { from: 0, to: 1, lo: 2, hi: 3 },
            Bounded { from: 1, to: 0, lo: 0, hi: 1 },
        ];
        assert!(circulation(2, &bad).is_none());
    }
}
