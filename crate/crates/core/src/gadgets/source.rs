//! Source problems the gadgets reduce from, with certificate checking.

use serde::{Deserialize, Serialize};

use super::GadgetError;

/// CNF with exactly three signed literals per clause over `x1..xn`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cnf3 {
    pub num_vars: usize,
    pub clauses: Vec<[i64; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<[i64; 3]>) -> Result<Self, GadgetError> {
        check_literals(num_vars, clauses.iter().flatten())?;
        Ok(Cnf3 { num_vars, clauses })
    }

    pub fn is_positive(&self) -> bool {
        self.clauses.iter().flatten().all(|&l| l > 0)
    }

    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| lit_true(l, model)))
    }

    /// Every clause has exactly one true literal occurrence.
    pub fn one_in_three_by(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|&&l| lit_true(l, model)).count() == 1)
    }

    /// Number of clauses in which variable `i` (1-based) occurs.
    pub fn occurrences(&self, i: usize) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.unsigned_abs() as usize == i))
            .count()
    }
}

/// 2-CNF with a bound on the number of violated clauses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Max2SatInput {
    pub num_vars: usize,
    pub clauses: Vec<[i64; 2]>,
    pub bound: usize,
}

impl Max2SatInput {
    pub fn new(num_vars: usize, clauses: Vec<[i64; 2]>, bound: usize) -> Result<Self, GadgetError> {
        check_literals(num_vars, clauses.iter().flatten())?;
        if bound > clauses.len() {
            return Err(GadgetError::InvalidSource(format!(
                "bound {bound} exceeds the {} clauses",
                clauses.len()
            )));
        }
        Ok(Max2SatInput {
            num_vars,
            clauses,
            bound,
        })
    }

    pub fn violations(&self, model: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| !c.iter().any(|&l| lit_true(l, model)))
            .count()
    }
}

/// Undirected simple graph on vertices `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Normalizes edges to `(min, max)`, sorted and deduplicated.
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GadgetError> {
        let mut es = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GadgetError::InvalidSource(format!("self-loop on vertex {u}")));
            }
            if u >= vertices || v >= vertices {
                return Err(GadgetError::InvalidSource(format!(
                    "edge ({u}, {v}) outside {vertices} vertices"
                )));
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        es.dedup();
        Ok(Graph { vertices, edges: es })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return true;
        }
        let adj = self.neighbours();
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn properly_coloured_by(&self, colours: &[u8]) -> bool {
        colours.len() == self.vertices
            && colours.iter().all(|&c| c < 3)
            && self.edges.iter().all(|&(u, v)| colours[u] != colours[v])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum SourceProblem {
    Sat3(Cnf3),
    /// Positive formula; asks for exactly one true literal per clause.
    OneInThree(Cnf3),
    ThreeCol(Graph),
    /// Is the first graph 3-colourable while the second is not?
    GraphPair { first: Graph, second: Graph },
    Max2Sat(Max2SatInput),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Certificate {
    /// Truth value of `x1..xn`.
    Model(Vec<bool>),
    /// Colour in `0..3` per vertex.
    Colouring(Vec<u8>),
}

impl SourceProblem {
    /// Independent check that `cert` witnesses a "yes" answer.
    pub fn accepts(&self, cert: &Certificate) -> bool {
        match (self, cert) {
            (SourceProblem::Sat3(f), Certificate::Model(m)) => m.len() == f.num_vars && f.satisfied_by(m),
            (SourceProblem::OneInThree(f), Certificate::Model(m)) => m.len() == f.num_vars && f.one_in_three_by(m),
            (SourceProblem::ThreeCol(g), Certificate::Colouring(c)) => g.properly_coloured_by(c),
            // Only the colourable half has a certificate.
            (SourceProblem::GraphPair { first: g, .. }, Certificate::Colouring(c)) => g.properly_coloured_by(c),
            (SourceProblem::Max2Sat(w), Certificate::Model(m)) => {
                m.len() == w.num_vars && w.violations(m) <= w.bound
            }
            _ => false,
        }
    }
}

pub(crate) fn lit_true(l: i64, model: &[bool]) -> bool {
    let v = model[l.unsigned_abs() as usize - 1];
    if l > 0 {
        v
    } else {
        !v
    }
}

fn check_literals<'a>(n: usize, lits: impl Iterator<Item = &'a i64>) -> Result<(), GadgetError> {
    for &l in lits {
        if l == 0 || l.unsigned_abs() as usize > n {
            return Err(GadgetError::InvalidSource(format!(
                "literal {l} outside variables 1..={n}"
            )));
        }
    }
    Ok(())
}

/// `(x1 ∨ x2 ∨ x3) ∧ (¬x1 ∨ ¬x2 ∨ ¬x3)`.
pub fn fixture_f1() -> Cnf3 {
    Cnf3::new(3, vec![[1, 2, 3], [-1, -2, -3]]).expect("valid")
}

/// Every sign pattern over three variables; unsatisfiable.
pub fn fixture_f2() -> Cnf3 {
    let clauses = (0..8)
        .map(|bits: i64| {
            let s = |b: i64, v: i64| if bits >> b & 1 == 1 { -v } else { v };
            [s(2, 1), s(1, 2), s(0, 3)]
        })
        .collect();
    Cnf3::new(3, clauses).expect("valid")
}

/// Single positive clause `(x1 ∨ x2 ∨ x3)`.
pub fn fixture_p1() -> Cnf3 {
    Cnf3::new(3, vec![[1, 2, 3]]).expect("valid")
}

/// `(x1 ∨ x2)` and `(¬x1 ∨ ¬x2)`.
pub fn fixture_w1() -> Max2SatInput {
    Max2SatInput::new(2, vec![[1, 2], [-1, -2]], 0).expect("valid")
}

/// All four sign patterns on two variables, with the given bound.
pub fn fixture_w2(bound: usize) -> Max2SatInput {
    Max2SatInput::new(2, vec![[1, 2], [1, -2], [-1, 2], [-1, -2]], bound).expect("valid")
}
