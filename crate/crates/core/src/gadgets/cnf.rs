//! Gadgets over 3-CNF formulas.

use std::collections::{BTreeMap, BTreeSet};

use crate::csp::{ConstraintSpec, DomainMap, Instance, Interval, Value, VarId};
use crate::engine::Question;

use super::source::Cnf3;
use super::{Decoder, Family, GadgetError, GadgetOutput, SourceAnswer};

fn var(prefix: &str, i: usize) -> VarId {
    VarId::new(format!("{prefix}{i}"))
}

fn clause_domain(c: &[i64; 3]) -> Vec<Value> {
    c.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn literal_domain(i: usize) -> Vec<Value> {
    vec![-(i as Value), i as Value]
}

/// `x_i` is true iff `prefix{i}` takes `sign * i`.
fn equals_decoder(prefix: &str, n: usize, sign: Value) -> Decoder {
    Decoder::Model((1..=n).map(|i| vec![(var(prefix, i), sign * i as Value)]).collect())
}

/// `x_i` is true iff `prefix{i}` takes 1.
fn ones_decoder(prefix: &str, n: usize) -> Decoder {
    Decoder::Model((1..=n).map(|i| vec![(var(prefix, i), 1)]).collect())
}

fn sat_output(family: Family, instance: Instance, question: Question, decoder: Decoder) -> GadgetOutput {
    GadgetOutput {
        family,
        instance,
        question,
        meaning: SourceAnswer::Satisfiable,
        decoder,
    }
}

/// Guard `G` implies the formula over Booleans `x1..xn`; asks whether
/// `G = 1` has a support.
pub fn build_support_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let n = phi.num_vars;
    let mut scope = vec![VarId::from("G")];
    scope.extend((1..=n).map(|i| var("x", i)));
    let cnf = phi.clauses.iter().map(|c| c.to_vec()).collect();
    let inst = Instance::from_scope(
        ConstraintSpec::ImpliesCnf {
            scope: scope.clone(),
            cnf,
        },
        scope.into_iter().map(|v| (v, vec![0, 1])),
    )?;
    Ok(sat_output(
        Family::Support,
        inst,
        Question::GacSupport {
            var: "G".into(),
            value: 1,
        },
        ones_decoder("x", n),
    ))
}

/// Literal variables `X_i ∈ {i, -i}`, clause variables over their literals,
/// and `N = n` distinct values.
pub fn build_nvalue_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let n = phi.num_vars;
    let mut doms: Vec<(VarId, Vec<Value>)> = (1..=n).map(|i| (var("X", i), literal_domain(i))).collect();
    doms.extend(phi.clauses.iter().enumerate().map(|(j, c)| (var("C", j + 1), clause_domain(c))));
    doms.push(("N".into(), vec![n as Value]));
    let scope = doms.iter().map(|(v, _)| v.clone()).collect();
    let inst = Instance::from_scope(ConstraintSpec::NValue { scope }, doms)?;
    Ok(sat_output(
        Family::NValue,
        inst,
        Question::NoGacWipeout,
        equals_decoder("X", n, 1),
    ))
}

fn among_parts(phi: &Cnf3) -> (Vec<(VarId, Vec<Value>)>, Vec<(VarId, Vec<Value>)>) {
    let clauses = phi
        .clauses
        .iter()
        .enumerate()
        .map(|(j, c)| (var("C", j + 1), clause_domain(c)))
        .collect();
    let values = (1..=phi.num_vars).map(|i| (var("D", i), literal_domain(i))).collect();
    (clauses, values)
}

/// Every clause variable must equal one of the value variables
/// `D_i ∈ {i, -i}`.
pub fn build_among_var_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let (clauses, values) = among_parts(phi);
    let mut doms = vec![(VarId::from("N"), vec![phi.clauses.len() as Value])];
    doms.extend(clauses);
    let split = doms.len();
    doms.extend(values);
    let scope = doms.iter().map(|(v, _)| v.clone()).collect();
    let inst = Instance::from_scope(ConstraintSpec::AmongVar { scope, split }, doms)?;
    Ok(sat_output(
        Family::AmongVar,
        inst,
        Question::NoGacWipeout,
        equals_decoder("D", phi.num_vars, 1),
    ))
}

/// The among-var gadget with the reverse count `M` left free over `0..=n`.
pub fn build_common_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let (clauses, values) = among_parts(phi);
    let mut doms = vec![
        (VarId::from("N"), vec![phi.clauses.len() as Value]),
        (VarId::from("M"), (0..=phi.num_vars as Value).collect()),
    ];
    doms.extend(clauses);
    let split = doms.len();
    doms.extend(values);
    let scope = doms.iter().map(|(v, _)| v.clone()).collect();
    let inst = Instance::from_scope(ConstraintSpec::Common { scope, split }, doms)?;
    Ok(sat_output(
        Family::Common,
        inst,
        Question::NoGacWipeout,
        equals_decoder("D", phi.num_vars, 1),
    ))
}

/// `X_i` takes the false literal of `x_i`; clause variables must avoid
/// every X value.
pub fn build_disjoint_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let n = phi.num_vars;
    let mut doms: Vec<(VarId, Vec<Value>)> = (1..=n).map(|i| (var("X", i), literal_domain(i))).collect();
    doms.extend(phi.clauses.iter().enumerate().map(|(j, c)| (var("C", j + 1), clause_domain(c))));
    let scope = doms.iter().map(|(v, _)| v.clone()).collect();
    let inst = Instance::from_scope(ConstraintSpec::Disjoint { scope, split: n }, doms)?;
    Ok(sat_output(
        Family::Disjoint,
        inst,
        Question::NoGacWipeout,
        equals_decoder("X", n, -1),
    ))
}

/// Clause variables followed by each literal variable `Y_i ∈ {i, -i}`
/// repeated `m` times; every literal value may occur at most `m` times.
pub fn build_gcc_repeat_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let (n, m) = (phi.num_vars, phi.clauses.len());
    let mut doms: Vec<(VarId, Vec<Value>)> = phi
        .clauses
        .iter()
        .enumerate()
        .map(|(j, c)| (var("C", j + 1), clause_domain(c)))
        .collect();
    let mut scope: Vec<VarId> = doms.iter().map(|(v, _)| v.clone()).collect();
    for i in 1..=n {
        doms.push((var("Y", i), literal_domain(i)));
        scope.extend(std::iter::repeat_n(var("Y", i), m));
    }
    let occ = (1..=n as Value)
        .flat_map(|i| [-i, i])
        .map(|v| (v, Interval::new(0, m as u32)))
        .collect();
    let inst = Instance::from_scope(ConstraintSpec::Gcc { scope, occ }, doms)?;
    Ok(sat_output(
        Family::GccRepeat,
        inst,
        Question::NoGacWipeout,
        equals_decoder("Y", n, -1),
    ))
}

/// Binary test shared by every child of the card gadget.
fn card_test(x: Value, y: Value) -> bool {
    match (x, y) {
        (8..=15, 0 | 1) => (x % 8) / 4 == y,
        (16..=23, 0 | 1) => (x % 4) / 2 == y,
        (24..=31, 0 | 1) => x % 2 == y,
        _ => y >= 8 && x % 8 == y % 8,
    }
}

fn card_child(a: VarId, b: VarId) -> ConstraintSpec {
    let tuples = (8..=31)
        .flat_map(|x| [0, 1].into_iter().chain(8..=31).map(move |y| (x, y)))
        .filter(|&(x, y)| card_test(x, y))
        .map(|(x, y)| vec![x, y])
        .collect();
    ConstraintSpec::Table {
        scope: vec![a, b],
        tuples,
    }
}

/// Per clause: `U ⊂ 8..16`, `V ⊂ 16..24`, `W ⊂ 24..32`, each missing the
/// value whose low three bits spell the falsifying assignment, with five
/// binary children tying them to each other and to the clause's variables.
/// `N` demands every child hold.
pub fn build_card_gadget(phi: &Cnf3) -> Result<GadgetOutput, GadgetError> {
    let (n, m) = (phi.num_vars, phi.clauses.len());
    if let Some(i) = (1..=n).find(|&i| phi.occurrences(i) > 3) {
        return Err(GadgetError::Precondition(format!(
            "variable x{i} occurs in {} clauses; at most 3 allowed",
            phi.occurrences(i)
        )));
    }
    let mut domains = DomainMap::new();
    let mut variables = vec![VarId::from("N")];
    let mut children = Vec::with_capacity(5 * m);
    for (j, c) in phi.clauses.iter().enumerate() {
        let falsifying: Value = c
            .iter()
            .fold(0, |acc, &l| acc * 2 + Value::from(l < 0));
        let [u, v, w] = ["U", "V", "W"].map(|p| var(p, j + 1));
        for (k, name) in [&u, &v, &w].into_iter().enumerate() {
            let base = 8 * (k as Value + 1);
            domains.insert(name.clone(), (base..base + 8).filter(|&x| x != base + falsifying));
            variables.push(name.clone());
        }
        let xs = c.map(|l| var("X", l.unsigned_abs() as usize));
        children.push(card_child(u.clone(), xs[0].clone()));
        children.push(card_child(v.clone(), xs[1].clone()));
        children.push(card_child(w.clone(), xs[2].clone()));
        children.push(card_child(u, v.clone()));
        children.push(card_child(v, w));
    }
    for i in 1..=n {
        domains.insert(var("X", i), [0, 1]);
        variables.push(var("X", i));
    }
    domains.insert("N".into(), [5 * m as Value]);
    let inst = Instance::new(
        variables,
        domains,
        ConstraintSpec::CardMeta {
            scope: vec!["N".into()],
            children,
        },
    )?;
    Ok(sat_output(
        Family::Card,
        inst,
        Question::NoGacWipeout,
        ones_decoder("X", n),
    ))
}

/// Set variables in characteristic form with cardinality `c`.
///
/// Each clause `σ` gets a set holding its marker `m_σ` plus one literal
/// element. For a positive occurrence of `x_i` in `σ` and a negative one in
/// another clause `τ`, sets `Y ⊆ {m_σ, i_σ, ¬i_τ} ∋ m_σ` and
/// `Z ⊆ {m_σ, m_τ, ¬i_τ} ∋ ¬i_τ` forbid picking both. When `c > 2` each
/// set also holds `c - 2` private elements.
pub fn build_atmost1_gadget(phi: &Cnf3, c: usize) -> Result<GadgetOutput, GadgetError> {
    if c < 2 {
        return Err(GadgetError::Precondition(format!("cardinality {c} below 2")));
    }
    let m = phi.clauses.len();
    let mut universe: Vec<String> = Vec::new();
    let elem = |label: String, universe: &mut Vec<String>| {
        universe.push(label);
        universe.len() - 1
    };
    let marker: Vec<usize> = (1..=m).map(|j| elem(format!("m{j}"), &mut universe)).collect();
    // occ[j][lit] = element for literal `lit` of clause j.
    let mut occ: Vec<BTreeMap<i64, usize>> = vec![BTreeMap::new(); m];
    for (j, cl) in phi.clauses.iter().enumerate() {
        for &l in cl {
            if !occ[j].contains_key(&l) {
                let e = elem(format!("l{}:{l}", j + 1), &mut universe);
                occ[j].insert(l, e);
            }
        }
    }

    // (required, possible) per set.
    let mut sets: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
    for j in 0..m {
        let possible = std::iter::once(marker[j]).chain(occ[j].values().copied()).collect();
        sets.push(([marker[j]].into(), possible));
    }
    for s in 0..m {
        for (&l, &pos) in occ[s].iter().filter(|(l, _)| **l > 0) {
            for t in (0..m).filter(|&t| t != s) {
                let Some(&neg) = occ[t].get(&-l) else { continue };
                sets.push(([marker[s]].into(), [marker[s], pos, neg].into()));
                sets.push(([neg].into(), [marker[s], marker[t], neg].into()));
            }
        }
    }
    for (s, (req, poss)) in sets.iter_mut().enumerate() {
        for p in 0..c - 2 {
            let e = elem(format!("pad{}:{p}", s + 1), &mut universe);
            req.insert(e);
            poss.insert(e);
        }
    }

    let mut domains = DomainMap::new();
    let mut grid = Vec::with_capacity(sets.len());
    for (s, (req, poss)) in sets.iter().enumerate() {
        let row: Vec<VarId> = (0..universe.len()).map(|e| VarId::new(format!("S{}E{}", s + 1, e + 1))).collect();
        for (e, v) in row.iter().enumerate() {
            let dom: Vec<Value> = if req.contains(&e) {
                vec![1]
            } else if poss.contains(&e) {
                vec![0, 1]
            } else {
                vec![0]
            };
            domains.insert(v.clone(), dom);
        }
        grid.push(row);
    }
    let decoder = Decoder::Model(
        (1..=phi.num_vars as i64)
            .map(|i| {
                (0..m)
                    .filter_map(|j| occ[j].get(&i).map(|&e| (grid[j][e].clone(), 1)))
                    .collect()
            })
            .collect(),
    );
    let variables = grid.iter().flatten().cloned().collect();
    let inst = Instance::new(
        variables,
        domains,
        ConstraintSpec::AtMost1 {
            universe,
            sets: grid,
            cardinality: c,
        },
    )?;
    Ok(sat_output(Family::AtMost1, inst, Question::NoGacWipeout, decoder))
}

/// 0/1 grid with `4m + 1` rows and `3m + n + p - 1` columns. Row 0 is the
/// free model row: column `3j + k` is the truth of the k-th literal of
/// clause j, column `3m + i` the falsity of `x_{i+1}`. Clause rows cover
/// their three occurrence columns; one consistency row per occurrence covers
/// that occurrence and the negation column of its variable. The last
/// `p - 1` columns are all ones.
pub fn build_scalarproduct_gadget(phi: &Cnf3, p: u64) -> Result<GadgetOutput, GadgetError> {
    if !phi.is_positive() {
        return Err(GadgetError::Precondition("formula has a negative literal".into()));
    }
    if p == 0 {
        return Err(GadgetError::Precondition("target must be at least 1".into()));
    }
    let (n, m) = (phi.num_vars, phi.clauses.len());
    let base_cols = 3 * m + n;
    let cols = base_cols + (p - 1) as usize;
    let rows = 4 * m + 1;
    let mut fixed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); rows];
    for j in 0..m {
        fixed[1 + j].extend(3 * j..3 * j + 3);
        for k in 0..3 {
            let i = phi.clauses[j][k] as usize;
            fixed[1 + m + 3 * j + k].extend([3 * j + k, 3 * m + i - 1]);
        }
    }
    let mut domains = DomainMap::new();
    let mut grid = Vec::with_capacity(rows);
    for (r, ones) in fixed.iter().enumerate() {
        let row: Vec<VarId> = (0..cols).map(|c| VarId::new(format!("R{r}C{c}"))).collect();
        for (c, v) in row.iter().enumerate() {
            let dom: Vec<Value> = if c >= base_cols || ones.contains(&c) {
                vec![1]
            } else if r == 0 {
                vec![0, 1]
            } else {
                vec![0]
            };
            domains.insert(v.clone(), dom);
        }
        grid.push(row);
    }
    let decoder = Decoder::Model((0..n).map(|i| vec![(grid[0][3 * m + i].clone(), 0)]).collect());
    let variables = grid.iter().flatten().cloned().collect();
    let inst = Instance::new(variables, domains, ConstraintSpec::ScalarProduct { rows: grid, target: p })?;
    Ok(GadgetOutput {
        family: Family::ScalarProduct,
        instance: inst,
        question: Question::NoGacWipeout,
        meaning: SourceAnswer::OneInThreeSatisfiable,
        decoder,
    })
}
