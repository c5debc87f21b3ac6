//! Cardpath without repeated variables, reducing from Max2SAT.
//!
//! The sequence is `m` alternations, each `k + 1` dummies, then `n` fresh
//! Booleans, then two singleton clause variables, followed by `L + k + 1`
//! trailing dummies where `L = k + n + 3` is the alternation length. The
//! template spans two alternations. With that tail the last window starts at
//! the first Boolean of the last alternation, so the last clause is checked
//! and no window straddles the end in any other way.

use std::collections::BTreeSet;

use crate::csp::{ConstraintSpec, Instance, Value, VarId};
use crate::engine::Question;

use super::source::Max2SatInput;
use super::{Decoder, Family, GadgetError, GadgetOutput, SourceAnswer};

#[derive(Clone, Copy, Debug)]
struct Shape {
    n: usize,
    k: usize,
}

impl Shape {
    fn dummy(self) -> Value {
        self.n as Value + 1
    }

    fn alternation(self) -> usize {
        self.k + 1 + self.n + 2
    }

    fn arity(self) -> usize {
        2 * self.alternation()
    }

    /// The template predicate on one window.
    ///
    /// Holds when neither the first value nor the one an alternation later
    /// is a dummy; when the first value is a dummy and the Boolean blocks
    /// after the leading dummies agree across the two alternations; and
    /// when only the later one is a dummy and the clause values right after
    /// the first `n` Booleans are satisfied by them.
    fn holds(self, w: &[Value]) -> bool {
        let (n, l) = (self.n, self.alternation());
        let dummy = |x: Value| x == self.dummy();
        if !dummy(w[0]) {
            if !dummy(w[l - 1]) {
                return true;
            }
            return w[n..n + 2].iter().any(|&lit| {
                let i = lit.unsigned_abs() as usize;
                lit != 0 && i <= n && w[i - 1] == Value::from(lit > 0)
            });
        }
        let t = w.iter().take_while(|&&x| dummy(x)).count();
        t + l + n <= w.len() && w[t..t + n] == w[t + l..t + l + n]
    }

    /// Values of the whole sequence for one assignment and clause list.
    fn sequence(self, model: &[Value], clauses: &[[i64; 2]]) -> Vec<Value> {
        let mut seq = Vec::new();
        for c in clauses {
            seq.extend(std::iter::repeat_n(self.dummy(), self.k + 1));
            seq.extend_from_slice(model);
            seq.extend_from_slice(c);
        }
        seq.extend(std::iter::repeat_n(self.dummy(), self.alternation() + self.k + 1));
        seq
    }

    /// Satisfied windows of a sequence.
    fn satisfied(self, seq: &[Value]) -> usize {
        seq.windows(self.arity()).filter(|w| self.holds(w)).count()
    }
}

/// Satisfied-window total of the all-false assignment on `m` tautological
/// clauses `x1 ∨ ¬x1`; no clause is violated and the assignment never
/// changes, so only the structural violations at the tail remain.
fn calibrate(shape: Shape, m: usize) -> usize {
    let model = vec![0; shape.n];
    let clauses = vec![[1, -1]; m];
    shape.satisfied(&shape.sequence(&model, &clauses))
}

pub fn build_cardpath_max2sat_gadget(w: &Max2SatInput) -> Result<GadgetOutput, GadgetError> {
    let (n, m, k) = (w.num_vars, w.clauses.len(), w.bound);
    if n == 0 || m == 0 {
        return Err(GadgetError::Precondition("formula needs a variable and a clause".into()));
    }
    let shape = Shape { n, k };
    let dummy = shape.dummy();

    let mut seq: Vec<(VarId, Vec<Value>)> = Vec::new();
    for (a, c) in w.clauses.iter().enumerate() {
        let a = a + 1;
        seq.extend((1..=k + 1).map(|d| (VarId::new(format!("D{a}_{d}")), vec![dummy])));
        seq.extend((1..=n).map(|i| (VarId::new(format!("B{a}_{i}")), vec![0, 1])));
        seq.push((VarId::new(format!("L{a}_1")), vec![c[0]]));
        seq.push((VarId::new(format!("L{a}_2")), vec![c[1]]));
    }
    seq.extend((1..=shape.alternation() + k + 1).map(|d| (VarId::new(format!("T{d}")), vec![dummy])));

    let arity = shape.arity();
    let mut tuples: BTreeSet<Vec<Value>> = BTreeSet::new();
    for start in 0..=seq.len() - arity {
        let doms: Vec<&[Value]> = seq[start..start + arity].iter().map(|(_, d)| d.as_slice()).collect();
        for_each_product(&doms, &mut |t| {
            if shape.holds(t) {
                tuples.insert(t.to_vec());
            }
        });
    }
    let template = ConstraintSpec::Table {
        scope: (1..=arity).map(|p| VarId::new(format!("p{p}"))).collect(),
        tuples,
    };

    let total = calibrate(shape, m) as Value;
    let mut scope = vec![VarId::from("N")];
    scope.extend(seq.iter().map(|(v, _)| v.clone()));
    let mut doms = vec![(VarId::from("N"), ((total - k as Value).max(0)..=total).collect())];
    doms.extend(seq);
    let inst = Instance::from_scope(
        ConstraintSpec::Cardpath {
            scope,
            template: Box::new(template),
        },
        doms,
    )?;
    Ok(GadgetOutput {
        family: Family::CardpathMax2Sat,
        instance: inst,
        question: Question::NoGacWipeout,
        meaning: SourceAnswer::AtMostKViolations,
        decoder: Decoder::Model((1..=n).map(|i| vec![(VarId::new(format!("B1_{i}")), 1)]).collect()),
    })
}

fn for_each_product(doms: &[&[Value]], f: &mut impl FnMut(&[Value])) {
    fn go(doms: &[&[Value]], acc: &mut Vec<Value>, f: &mut impl FnMut(&[Value])) {
        if acc.len() == doms.len() {
            f(acc);
            return;
        }
        for &v in doms[acc.len()] {
            acc.push(v);
            go(doms, acc, f);
            acc.pop();
        }
    }
    go(doms, &mut Vec::with_capacity(doms.len()), f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_leaves_only_tail_violations() {
        for (n, k, m) in [(1, 0, 1), (2, 1, 3), (3, 2, 4)] {
            let shape = Shape { n, k };
            let l = shape.alternation();
            let windows = (m - 1) * l + k + 2;
            assert_eq!(calibrate(shape, m), windows - (k + 1), "n={n} k={k} m={m}");
        }
    }

    #[test]
    fn assignment_change_costs_k_plus_one() {
        let shape = Shape { n: 2, k: 1 };
        let clauses = [[1, 2], [1, 2]];
        let base = shape.satisfied(&shape.sequence(&[1, 0], &clauses));
        let mut seq = shape.sequence(&[1, 0], &clauses);
        // Flip x2 in the second alternation only.
        let second_b2 = shape.alternation() + shape.k + 1 + 1;
        seq[second_b2] = 1;
        assert_eq!(base - shape.satisfied(&seq), shape.k + 1);
    }

    #[test]
    fn violated_clause_costs_one() {
        let shape = Shape { n: 2, k: 1 };
        let ok = shape.satisfied(&shape.sequence(&[1, 0], &[[1, 2], [-1, 2]]));
        let all = shape.satisfied(&shape.sequence(&[1, 0], &[[1, 2], [1, 2]]));
        assert_eq!(all - ok, 1);
    }
}
