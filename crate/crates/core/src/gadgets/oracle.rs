//! Exhaustive solvers for the source problems, used as ground truth.

use serde::{Deserialize, Serialize};

use super::source::{lit_true, Certificate, Cnf3, Graph, Max2SatInput, SourceProblem};
use super::GadgetError;

/// Largest number of Boolean variables or vertices the oracles accept.
pub const ORACLE_SCALE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleAnswer {
    pub answer: bool,
    pub certificate: Option<Certificate>,
}

pub fn oracle_solve(src: &SourceProblem) -> Result<OracleAnswer, GadgetError> {
    let size = match src {
        SourceProblem::Sat3(f) | SourceProblem::OneInThree(f) => f.num_vars,
        SourceProblem::ThreeCol(g) => g.vertices,
        SourceProblem::GraphPair { first: a, second: b } => a.vertices.max(b.vertices),
        SourceProblem::Max2Sat(w) => w.num_vars,
    };
    if size > ORACLE_SCALE_LIMIT {
        return Err(GadgetError::ScaleLimit {
            size,
            limit: ORACLE_SCALE_LIMIT,
        });
    }
    let (answer, certificate) = match src {
        SourceProblem::Sat3(f) => wrap(sat3(f).map(Certificate::Model)),
        SourceProblem::OneInThree(f) => wrap(one_in_three(f).map(Certificate::Model)),
        SourceProblem::ThreeCol(g) => wrap(three_col(g).map(Certificate::Colouring)),
        SourceProblem::GraphPair { first: a, second: b } => {
            let first = three_col(a);
            let answer = first.is_some() && three_col(b).is_none();
            (answer, first.filter(|_| answer).map(Certificate::Colouring))
        }
        SourceProblem::Max2Sat(w) => wrap(max2sat(w).map(Certificate::Model)),
    };
    Ok(OracleAnswer { answer, certificate })
}

fn wrap(c: Option<Certificate>) -> (bool, Option<Certificate>) {
    (c.is_some(), c)
}

/// Backtracking over variables in index order; a clause is checked as soon
/// as all its variables are set.
fn backtrack_cnf(f: &Cnf3, accept: impl Fn(&[i64; 3], &[bool]) -> bool) -> Option<Vec<bool>> {
    // Clauses grouped by their highest variable.
    let mut due: Vec<Vec<&[i64; 3]>> = vec![Vec::new(); f.num_vars + 1];
    for c in &f.clauses {
        let top = c.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        due[top].push(c);
    }
    fn go(
        i: usize,
        model: &mut Vec<bool>,
        due: &[Vec<&[i64; 3]>],
        accept: &dyn Fn(&[i64; 3], &[bool]) -> bool,
    ) -> bool {
        if i == model.len() {
            return true;
        }
        for v in [false, true] {
            model[i] = v;
            if due[i + 1].iter().all(|c| accept(c, model)) && go(i + 1, model, due, accept) {
                return true;
            }
        }
        false
    }
    let mut model = vec![false; f.num_vars];
    go(0, &mut model, &due, &accept).then_some(model)
}

pub fn sat3(f: &Cnf3) -> Option<Vec<bool>> {
    backtrack_cnf(f, |c, m| c.iter().any(|&l| lit_true(l, m)))
}

pub fn one_in_three(f: &Cnf3) -> Option<Vec<bool>> {
    backtrack_cnf(f, |c, m| c.iter().filter(|&&l| lit_true(l, m)).count() == 1)
}

pub fn three_col(g: &Graph) -> Option<Vec<u8>> {
    let adj = g.neighbours();
    fn go(u: usize, col: &mut Vec<u8>, adj: &[Vec<usize>]) -> bool {
        if u == col.len() {
            return true;
        }
        for c in 0..3 {
            if adj[u].iter().all(|&v| v >= u || col[v] != c) {
                col[u] = c;
                if go(u + 1, col, adj) {
                    return true;
                }
            }
        }
        false
    }
    let mut col = vec![0; g.vertices];
    go(0, &mut col, &adj).then_some(col)
}

/// An assignment violating at most `bound` clauses, by enumeration.
pub fn max2sat(w: &Max2SatInput) -> Option<Vec<bool>> {
    (0u64..1 << w.num_vars)
        .map(|bits| (0..w.num_vars).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        .find(|m| w.violations(m) <= w.bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::source::{fixture_f1, fixture_f2, fixture_w2};

    #[test]
    fn fixtures() {
        assert!(sat3(&fixture_f1()).is_some());
        assert!(sat3(&fixture_f2()).is_none());
        assert!(three_col(&Graph::complete(3)).is_some());
        assert!(three_col(&Graph::complete(4)).is_none());
        assert!(max2sat(&fixture_w2(0)).is_none());
        assert!(max2sat(&fixture_w2(1)).is_some());
    }

    #[test]
    fn one_in_three_counts_occurrences() {
        // x1 repeated: x1 true gives two true occurrences.
        let f = Cnf3::new(2, vec![[1, 1, 2]]).unwrap();
        assert_eq!(one_in_three(&f), Some(vec![false, true]));
        let f = Cnf3::new(1, vec![[1, 1, 1]]).unwrap();
        assert_eq!(one_in_three(&f), None);
    }

    #[test]
    fn scale_limit() {
        let f = Cnf3::new(21, vec![[1, 2, 21]]).unwrap();
        assert!(matches!(
            oracle_solve(&SourceProblem::Sat3(f)),
            Err(GadgetError::ScaleLimit { .. })
        ));
    }
}
