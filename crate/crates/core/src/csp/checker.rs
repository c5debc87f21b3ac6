//! Compiled constraint checkers.
//!
//! A [`Checker`] maps the distinct scope variables of a constraint to dense
//! indices and evaluates the constraint predicate over a value slice. Besides
//! the full predicate it offers [`Checker::may_hold`], a sound test on partial
//! assignments: it returns `false` only when no completion within the given
//! domains can satisfy the constraint. The generic search in
//! [`crate::engine`] relies on that contract and nothing else.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{ConstraintSpec, CspError, Interval, Tuple, Value, VarId};

/// Evaluates `constraint` on `t`. Variables of `t` outside the scope are
/// ignored; every scope variable must be assigned.
pub fn evaluate(constraint: &ConstraintSpec, t: &Tuple) -> Result<bool, CspError> {
    evaluate_counted(constraint, t).map(|(b, _)| b)
}

/// Like [`evaluate`], also returning the number of elementary checker steps.
pub fn evaluate_counted(constraint: &ConstraintSpec, t: &Tuple) -> Result<(bool, u64), CspError> {
    let checker = Checker::new(constraint)?;
    let vals = checker
        .vars()
        .iter()
        .map(|v| t.get(v).ok_or_else(|| CspError::MissingVariable(v.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut steps = 0;
    let b = checker.holds_counted(&vals, &mut steps);
    Ok((b, steps))
}

#[derive(Clone, Debug)]
pub struct Checker {
    vars: Vec<VarId>,
    index: HashMap<VarId, usize>,
    kind: Kind,
}

impl Checker {
    pub fn new(spec: &ConstraintSpec) -> Result<Self, CspError> {
        spec.validate()?;
        let vars = spec.distinct_scope();
        let index: HashMap<VarId, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let kind = Kind::compile(spec, &index, vars.len());
        Ok(Checker { vars, index, kind })
    }

    /// Distinct scope variables, in canonical order. Value slices passed to
    /// the other methods are indexed the same way.
    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn index_of(&self, var: &VarId) -> Option<usize> {
        self.index.get(var).copied()
    }

    pub fn holds(&self, vals: &[Value]) -> bool {
        let mut steps = 0;
        self.kind.holds(vals, &mut steps)
    }

    pub fn holds_counted(&self, vals: &[Value], steps: &mut u64) -> bool {
        self.kind.holds(vals, steps)
    }

    /// Sound partial check. `doms[i]` is the ascending domain of variable
    /// `i`; `last`, when given, names the only variable assigned since the
    /// previous successful check, which lets decomposable kinds look at the
    /// parts touching it only.
    pub fn may_hold(&self, vals: &[Option<Value>], doms: &[Vec<Value>], last: Option<usize>) -> bool {
        let ctx = Partial { vals, doms };
        self.kind.may_hold(&ctx, last)
    }

    pub fn tuple_from(&self, vals: &[Value]) -> Tuple {
        self.vars.iter().cloned().zip(vals.iter().copied()).collect()
    }
}

struct Partial<'a> {
    vals: &'a [Option<Value>],
    doms: &'a [Vec<Value>],
}

impl Partial<'_> {
    fn get(&self, i: usize) -> Option<Value> {
        self.vals[i]
    }

    fn in_dom(&self, i: usize, v: Value) -> bool {
        self.doms[i].binary_search(&v).is_ok()
    }

    /// Whether count variable `n` can take a value in `lo..=hi`.
    fn count_fits(&self, n: usize, lo: i64, hi: i64) -> bool {
        if lo > hi {
            return false;
        }
        match self.vals[n] {
            Some(v) => lo <= v && v <= hi,
            None => self.doms[n].iter().any(|&v| lo <= v && v <= hi),
        }
    }

    fn bounds(&self, i: usize) -> Option<(Value, Value)> {
        match self.vals[i] {
            Some(v) => Some((v, v)),
            None => Some((*self.doms[i].first()?, *self.doms[i].last()?)),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Table {
        pos: Vec<usize>,
        tuples: HashSet<Vec<Value>>,
        list: Vec<Vec<Value>>,
    },
    Binary {
        rels: Vec<(usize, usize, HashSet<(Value, Value)>)>,
        by_var: Vec<Vec<usize>>,
    },
    ImpliesCnf {
        guard: usize,
        xs: Vec<usize>,
        cnf: Vec<Vec<i64>>,
    },
    AllDifferent {
        pos: Vec<usize>,
        repeated: bool,
    },
    NValue {
        xs: Vec<usize>,
        n: usize,
    },
    AmongConst {
        n: usize,
        xs: Vec<usize>,
        set: BTreeSet<Value>,
    },
    AmongVar {
        n: usize,
        xs: Vec<usize>,
        ds: Vec<usize>,
    },
    Common {
        n: usize,
        m: usize,
        xs: Vec<usize>,
        ys: Vec<usize>,
    },
    Gcc {
        pos: Vec<usize>,
        occ: Vec<(Value, Interval)>,
    },
    GccVar {
        xs: Vec<usize>,
        counters: Vec<(usize, Value)>,
    },
    Disjoint {
        xs: Vec<usize>,
        ys: Vec<usize>,
        overlap: bool,
    },
    ScalarProduct {
        rows: Vec<Vec<usize>>,
        target: i64,
        by_var: Vec<Vec<usize>>,
    },
    AtMost1 {
        sets: Vec<Vec<usize>>,
        c: usize,
        by_var: Vec<Vec<usize>>,
    },
    CardMeta {
        n: usize,
        children: Vec<Kind>,
    },
    Cardpath {
        n: usize,
        seq: Vec<usize>,
        k: usize,
        template: Box<Kind>,
    },
}

fn by_var(nvars: usize, parts: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); nvars];
    for (p, vars) in parts.iter().enumerate() {
        for &v in vars {
            if out[v].last() != Some(&p) {
                out[v].push(p);
            }
        }
    }
    out
}

impl Kind {
    fn compile(spec: &ConstraintSpec, index: &HashMap<VarId, usize>, nvars: usize) -> Kind {
        let ix = |s: &[VarId]| -> Vec<usize> { s.iter().map(|v| index[v]).collect() };
        match spec {
            ConstraintSpec::Table { scope, tuples } => Kind::Table {
                pos: ix(scope),
                tuples: tuples.iter().cloned().collect(),
                list: tuples.iter().cloned().collect(),
            },
            ConstraintSpec::BinaryNetwork { scope, relations } => {
                let pos = ix(scope);
                let rels: Vec<_> = relations
                    .iter()
                    .map(|r| (pos[r.i], pos[r.j], r.pairs.iter().copied().collect()))
                    .collect();
                let parts: Vec<Vec<usize>> = rels.iter().map(|(a, b, _)| vec![*a, *b]).collect();
                Kind::Binary {
                    by_var: by_var(nvars, &parts),
                    rels,
                }
            }
            ConstraintSpec::ImpliesCnf { scope, cnf } => {
                let pos = ix(scope);
                Kind::ImpliesCnf {
                    guard: pos[0],
                    xs: pos[1..].to_vec(),
                    cnf: cnf.clone(),
                }
            }
            ConstraintSpec::AllDifferent { scope } => {
                let pos = ix(scope);
                let repeated = pos.iter().collect::<HashSet<_>>().len() != pos.len();
                Kind::AllDifferent { pos, repeated }
            }
            ConstraintSpec::NValue { scope } => {
                let pos = ix(scope);
                let (n, xs) = pos.split_last().expect("validated non-empty");
                Kind::NValue {
                    xs: xs.to_vec(),
                    n: *n,
                }
            }
            ConstraintSpec::AmongConst { scope, value_set } => {
                let pos = ix(scope);
                Kind::AmongConst {
                    n: pos[0],
                    xs: pos[1..].to_vec(),
                    set: value_set.clone(),
                }
            }
            ConstraintSpec::AmongVar { scope, split } => {
                let pos = ix(scope);
                Kind::AmongVar {
                    n: pos[0],
                    xs: pos[1..*split].to_vec(),
                    ds: pos[*split..].to_vec(),
                }
            }
            ConstraintSpec::Common { scope, split } => {
                let pos = ix(scope);
                Kind::Common {
                    n: pos[0],
                    m: pos[1],
                    xs: pos[2..*split].to_vec(),
                    ys: pos[*split..].to_vec(),
                }
            }
            ConstraintSpec::Gcc { scope, occ } => Kind::Gcc {
                pos: ix(scope),
                occ: occ.iter().map(|(v, i)| (*v, *i)).collect(),
            },
            ConstraintSpec::GccVar { scope, values } => {
                let pos = ix(scope);
                let split = pos.len() - values.len();
                Kind::GccVar {
                    xs: pos[..split].to_vec(),
                    counters: pos[split..].iter().copied().zip(values.iter().copied()).collect(),
                }
            }
            ConstraintSpec::Disjoint { scope, split } => {
                let pos = ix(scope);
                let xs = pos[..*split].to_vec();
                let ys = pos[*split..].to_vec();
                let overlap = xs.iter().any(|x| ys.contains(x));
                Kind::Disjoint { xs, ys, overlap }
            }
            ConstraintSpec::ScalarProduct { rows, target } => {
                let rows: Vec<Vec<usize>> = rows.iter().map(|r| ix(r)).collect();
                Kind::ScalarProduct {
                    by_var: by_var(nvars, &rows),
                    rows,
                    target: *target as i64,
                }
            }
            ConstraintSpec::AtMost1 {
                sets, cardinality, ..
            } => {
                let sets: Vec<Vec<usize>> = sets.iter().map(|s| ix(s)).collect();
                Kind::AtMost1 {
                    by_var: by_var(nvars, &sets),
                    sets,
                    c: *cardinality,
                }
            }
            ConstraintSpec::CardMeta { scope, children } => Kind::CardMeta {
                n: index[&scope[0]],
                children: children
                    .iter()
                    .map(|c| Kind::compile(c, index, nvars))
                    .collect(),
            },
            ConstraintSpec::Cardpath { scope, template } => {
                let pos = ix(scope);
                let placeholders = template.scope();
                let local: HashMap<VarId, usize> = placeholders
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v.clone(), i))
                    .collect();
                Kind::Cardpath {
                    n: pos[0],
                    seq: pos[1..].to_vec(),
                    k: placeholders.len(),
                    template: Box::new(Kind::compile(template, &local, placeholders.len())),
                }
            }
        }
    }

    fn holds(&self, vals: &[Value], steps: &mut u64) -> bool {
        match self {
            Kind::Table { pos, tuples, .. } => {
                *steps += pos.len() as u64 + 1;
                let t: Vec<Value> = pos.iter().map(|&p| vals[p]).collect();
                tuples.contains(&t)
            }
            Kind::Binary { rels, .. } => rels.iter().all(|(a, b, pairs)| {
                *steps += 1;
                pairs.contains(&(vals[*a], vals[*b]))
            }),
            Kind::ImpliesCnf { guard, xs, cnf } => {
                *steps += 1;
                if vals[*guard] == 0 {
                    return true;
                }
                cnf.iter().all(|clause| {
                    clause.iter().any(|&l| {
                        *steps += 1;
                        (vals[xs[(l.unsigned_abs() - 1) as usize]] != 0) == (l > 0)
                    })
                })
            }
            Kind::AllDifferent { pos, repeated } => {
                if *repeated {
                    return false;
                }
                let mut seen = HashSet::with_capacity(pos.len());
                pos.iter().all(|&p| {
                    *steps += 1;
                    seen.insert(vals[p])
                })
            }
            Kind::NValue { xs, n } => {
                *steps += xs.len() as u64 + 1;
                let distinct: HashSet<Value> = xs.iter().map(|&p| vals[p]).collect();
                distinct.len() as i64 == vals[*n]
            }
            Kind::AmongConst { n, xs, set } => {
                *steps += xs.len() as u64 + 1;
                xs.iter().filter(|&&p| set.contains(&vals[p])).count() as i64 == vals[*n]
            }
            Kind::AmongVar { n, xs, ds } => {
                *steps += (xs.len() + ds.len()) as u64 + 1;
                let dvals: HashSet<Value> = ds.iter().map(|&p| vals[p]).collect();
                xs.iter().filter(|&&p| dvals.contains(&vals[p])).count() as i64 == vals[*n]
            }
            Kind::Common { n, m, xs, ys } => {
                *steps += 2 * (xs.len() + ys.len()) as u64 + 1;
                let xv: HashSet<Value> = xs.iter().map(|&p| vals[p]).collect();
                let yv: HashSet<Value> = ys.iter().map(|&p| vals[p]).collect();
                let nn = xs.iter().filter(|&&p| yv.contains(&vals[p])).count() as i64;
                let mm = ys.iter().filter(|&&p| xv.contains(&vals[p])).count() as i64;
                nn == vals[*n] && mm == vals[*m]
            }
            Kind::Gcc { pos, occ } => {
                *steps += (pos.len() + occ.len()) as u64;
                let counts = count_values(pos.iter().map(|&p| vals[p]));
                occ.iter().all(|(v, iv)| {
                    let c = counts.get(v).copied().unwrap_or(0);
                    iv.min as usize <= c && c <= iv.max as usize
                })
            }
            Kind::GccVar { xs, counters } => {
                *steps += (xs.len() + counters.len()) as u64;
                let counts = count_values(xs.iter().map(|&p| vals[p]));
                counters
                    .iter()
                    .all(|(o, v)| counts.get(v).copied().unwrap_or(0) as i64 == vals[*o])
            }
            Kind::Disjoint { xs, ys, overlap } => {
                if *overlap {
                    return false;
                }
                *steps += (xs.len() + ys.len()) as u64;
                let xv: HashSet<Value> = xs.iter().map(|&p| vals[p]).collect();
                ys.iter().all(|&p| !xv.contains(&vals[p]))
            }
            Kind::ScalarProduct { rows, target, .. } => {
                for i in 0..rows.len() {
                    for j in i + 1..rows.len() {
                        *steps += rows[i].len() as u64;
                        let dot: i64 = rows[i]
                            .iter()
                            .zip(&rows[j])
                            .map(|(&a, &b)| vals[a] * vals[b])
                            .sum();
                        if dot != *target {
                            return false;
                        }
                    }
                }
                true
            }
            Kind::AtMost1 { sets, c, .. } => {
                let mut members: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
                for set in sets {
                    *steps += set.len() as u64;
                    let mut mem = Vec::new();
                    for (e, &p) in set.iter().enumerate() {
                        match vals[p] {
                            0 => {}
                            1 => mem.push(e),
                            _ => return false,
                        }
                    }
                    if mem.len() != *c {
                        return false;
                    }
                    members.push(mem);
                }
                for i in 0..members.len() {
                    for j in i + 1..members.len() {
                        *steps += members[i].len() as u64;
                        let common = members[i]
                            .iter()
                            .filter(|e| members[j].binary_search(e).is_ok())
                            .count();
                        if common > 1 {
                            return false;
                        }
                    }
                }
                true
            }
            Kind::CardMeta { n, children } => {
                let sat = children.iter().filter(|c| c.holds(vals, steps)).count();
                sat as i64 == vals[*n]
            }
            Kind::Cardpath {
                n,
                seq,
                k,
                template,
            } => {
                let mut window = vec![0; *k];
                let mut sat = 0i64;
                if seq.len() >= *k {
                    for s in 0..=seq.len() - k {
                        for (w, &p) in window.iter_mut().zip(&seq[s..s + k]) {
                            *w = vals[p];
                        }
                        if template.holds(&window, steps) {
                            sat += 1;
                        }
                    }
                }
                sat == vals[*n]
            }
        }
    }

    fn may_hold(&self, ctx: &Partial<'_>, last: Option<usize>) -> bool {
        match self {
            Kind::Table { pos, list, .. } => list.iter().any(|t| {
                pos.iter().zip(t).all(|(&p, &x)| match ctx.get(p) {
                    Some(v) => v == x,
                    None => ctx.in_dom(p, x),
                })
            }),
            Kind::Binary { rels, by_var } => {
                let check = |r: &(usize, usize, HashSet<(Value, Value)>)| match (
                    ctx.get(r.0),
                    ctx.get(r.1),
                ) {
                    (Some(a), Some(b)) => r.2.contains(&(a, b)),
                    _ => true,
                };
                match last {
                    Some(l) => by_var[l].iter().all(|&r| check(&rels[r])),
                    None => rels.iter().all(check),
                }
            }
            Kind::ImpliesCnf { guard, xs, cnf } => {
                if ctx.get(*guard).is_none_or(|g| g == 0) {
                    return true;
                }
                cnf.iter().all(|clause| {
                    clause.iter().any(|&l| {
                        match ctx.get(xs[(l.unsigned_abs() - 1) as usize]) {
                            Some(x) => (x != 0) == (l > 0),
                            None => true,
                        }
                    })
                })
            }
            Kind::AllDifferent { pos, repeated } => {
                if *repeated {
                    return false;
                }
                match last {
                    Some(l) => {
                        let Some(v) = ctx.get(l) else { return true };
                        pos.iter().all(|&p| p == l || ctx.get(p) != Some(v))
                    }
                    None => {
                        let mut seen = HashSet::new();
                        pos.iter().filter_map(|&p| ctx.get(p)).all(|v| seen.insert(v))
                    }
                }
            }
            Kind::NValue { xs, n } => {
                let mut assigned = HashSet::new();
                let mut open = HashSet::new();
                for &p in xs {
                    match ctx.get(p) {
                        Some(v) => {
                            assigned.insert(v);
                        }
                        None => {
                            open.insert(p);
                        }
                    }
                }
                let d = assigned.len() as i64;
                let u = open.len() as i64;
                let lo = if d > 0 {
                    d
                } else if u > 0 {
                    1
                } else {
                    0
                };
                ctx.count_fits(*n, lo, d + u)
            }
            Kind::AmongConst { n, xs, set } => {
                let (mut lo, mut hi) = (0i64, 0i64);
                for &p in xs {
                    match ctx.get(p) {
                        Some(v) => {
                            if set.contains(&v) {
                                lo += 1;
                                hi += 1;
                            }
                        }
                        None => {
                            let dom = &ctx.doms[p];
                            if !dom.is_empty() && dom.iter().all(|v| set.contains(v)) {
                                lo += 1;
                            }
                            if dom.iter().any(|v| set.contains(v)) {
                                hi += 1;
                            }
                        }
                    }
                }
                ctx.count_fits(*n, lo, hi)
            }
            Kind::AmongVar { n, xs, ds } => {
                let (lo, hi) = among_bounds(ctx, xs, ds);
                ctx.count_fits(*n, lo, hi)
            }
            Kind::Common { n, m, xs, ys } => {
                let (nlo, nhi) = among_bounds(ctx, xs, ys);
                let (mlo, mhi) = among_bounds(ctx, ys, xs);
                ctx.count_fits(*n, nlo, nhi) && ctx.count_fits(*m, mlo, mhi)
            }
            Kind::Gcc { pos, occ } => {
                let counts = count_values(pos.iter().filter_map(|&p| ctx.get(p)));
                let open = pos.iter().filter(|&&p| ctx.get(p).is_none()).count();
                let mut deficit = 0usize;
                for (v, iv) in occ {
                    let c = counts.get(v).copied().unwrap_or(0);
                    if c > iv.max as usize {
                        return false;
                    }
                    deficit += (iv.min as usize).saturating_sub(c);
                }
                deficit <= open
            }
            Kind::GccVar { xs, counters } => {
                let counts = count_values(xs.iter().filter_map(|&p| ctx.get(p)));
                let open = xs.iter().filter(|&&p| ctx.get(p).is_none()).count() as i64;
                counters.iter().all(|(o, v)| {
                    let c = counts.get(v).copied().unwrap_or(0) as i64;
                    ctx.count_fits(*o, c, c + open)
                })
            }
            Kind::Disjoint { xs, ys, overlap } => {
                if *overlap {
                    return false;
                }
                let xv: HashSet<Value> = xs.iter().filter_map(|&p| ctx.get(p)).collect();
                ys.iter()
                    .filter_map(|&p| ctx.get(p))
                    .all(|v| !xv.contains(&v))
            }
            Kind::ScalarProduct {
                rows,
                target,
                by_var,
            } => {
                let pair_ok = |i: usize, j: usize| -> bool {
                    let (mut lo, mut hi) = (0i64, 0i64);
                    for (&a, &b) in rows[i].iter().zip(&rows[j]) {
                        let (Some((alo, ahi)), Some((blo, bhi))) = (ctx.bounds(a), ctx.bounds(b))
                        else {
                            return false;
                        };
                        let corners = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
                        lo += corners.iter().min().unwrap();
                        hi += corners.iter().max().unwrap();
                    }
                    lo <= *target && *target <= hi
                };
                let touched: Vec<usize> = match last {
                    Some(l) => by_var[l].clone(),
                    None => (0..rows.len()).collect(),
                };
                touched
                    .iter()
                    .all(|&i| (0..rows.len()).all(|j| i == j || pair_ok(i.min(j), i.max(j))))
            }
            Kind::AtMost1 { sets, c, by_var } => {
                let touched: Vec<usize> = match last {
                    Some(l) => by_var[l].clone(),
                    None => (0..sets.len()).collect(),
                };
                for &s in &touched {
                    let mut ones = Vec::new();
                    let mut possible = 0usize;
                    for (e, &p) in sets[s].iter().enumerate() {
                        match ctx.get(p) {
                            Some(1) => ones.push(e),
                            Some(0) => {}
                            Some(_) => return false,
                            None => {
                                if ctx.in_dom(p, 1) {
                                    possible += 1;
                                }
                            }
                        }
                    }
                    if ones.len() > *c || ones.len() + possible < *c {
                        return false;
                    }
                    if ones.len() < 2 {
                        continue;
                    }
                    for (t, other) in sets.iter().enumerate() {
                        if t == s {
                            continue;
                        }
                        let common = ones
                            .iter()
                            .filter(|&&e| ctx.get(other[e]) == Some(1))
                            .count();
                        if common > 1 {
                            return false;
                        }
                    }
                }
                true
            }
            Kind::CardMeta { n, children } => {
                let mut sat = 0i64;
                let mut viol = 0i64;
                for child in children {
                    if let Some(full) = child.assigned_values(ctx) {
                        let mut steps = 0;
                        if child.holds(&full, &mut steps) {
                            sat += 1;
                        } else {
                            viol += 1;
                        }
                    }
                }
                ctx.count_fits(*n, sat, children.len() as i64 - viol)
            }
            Kind::Cardpath {
                n,
                seq,
                k,
                template,
            } => {
                let windows = (seq.len() + 1).saturating_sub(*k);
                let mut sat = 0i64;
                let mut viol = 0i64;
                let mut window = vec![0; *k];
                let mut steps = 0;
                for s in 0..windows {
                    let mut full = true;
                    for (w, &p) in window.iter_mut().zip(&seq[s..s + k]) {
                        match ctx.get(p) {
                            Some(v) => *w = v,
                            None => {
                                full = false;
                                break;
                            }
                        }
                    }
                    if full {
                        if template.holds(&window, &mut steps) {
                            sat += 1;
                        } else {
                            viol += 1;
                        }
                    }
                }
                ctx.count_fits(*n, sat, windows as i64 - viol)
            }
        }
    }

    /// Full value vector when every variable this kind reads is assigned.
    /// Unread slots are filled with zero.
    fn assigned_values(&self, ctx: &Partial<'_>) -> Option<Vec<Value>> {
        let mut out = vec![0; ctx.vals.len()];
        for p in self.read_vars() {
            out[p] = ctx.get(p)?;
        }
        Some(out)
    }

    fn read_vars(&self) -> Vec<usize> {
        match self {
            Kind::Table { pos, .. }
            | Kind::AllDifferent { pos, .. }
            | Kind::Gcc { pos, .. } => pos.clone(),
            Kind::Binary { rels, .. } => rels.iter().flat_map(|r| [r.0, r.1]).collect(),
            Kind::ImpliesCnf { guard, xs, .. } => std::iter::once(*guard).chain(xs.clone()).collect(),
            Kind::NValue { xs, n } => xs.iter().copied().chain([*n]).collect(),
            Kind::AmongConst { n, xs, .. } => std::iter::once(*n).chain(xs.clone()).collect(),
            Kind::AmongVar { n, xs, ds } => std::iter::once(*n)
                .chain(xs.clone())
                .chain(ds.clone())
                .collect(),
            Kind::Common { n, m, xs, ys } => [*n, *m]
                .into_iter()
                .chain(xs.clone())
                .chain(ys.clone())
                .collect(),
            Kind::GccVar { xs, counters } => xs
                .iter()
                .copied()
                .chain(counters.iter().map(|(o, _)| *o))
                .collect(),
            Kind::Disjoint { xs, ys, .. } => xs.iter().chain(ys).copied().collect(),
            Kind::ScalarProduct { rows, .. } => rows.concat(),
            Kind::AtMost1 { sets, .. } => sets.concat(),
            Kind::CardMeta { n, children } => std::iter::once(*n)
                .chain(children.iter().flat_map(|c| c.read_vars()))
                .collect(),
            Kind::Cardpath { n, seq, .. } => std::iter::once(*n).chain(seq.clone()).collect(),
        }
    }
}

fn count_values(values: impl Iterator<Item = Value>) -> HashMap<Value, usize> {
    let mut counts = HashMap::new();
    for v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    counts
}

/// Bounds on `|{i : xs[i] equals some ds[j]}|` under a partial assignment.
fn among_bounds(ctx: &Partial<'_>, xs: &[usize], ds: &[usize]) -> (i64, i64) {
    let fixed: HashSet<Value> = ds.iter().filter_map(|&p| ctx.get(p)).collect();
    let mut possible = fixed.clone();
    for &p in ds {
        if ctx.get(p).is_none() {
            possible.extend(ctx.doms[p].iter().copied());
        }
    }
    let (mut lo, mut hi) = (0i64, 0i64);
    for &p in xs {
        match ctx.get(p) {
            Some(v) => {
                if fixed.contains(&v) {
                    lo += 1;
                }
                if possible.contains(&v) {
                    hi += 1;
                }
            }
            None => {
                let dom = &ctx.doms[p];
                if !dom.is_empty() && dom.iter().all(|v| fixed.contains(v)) {
                    lo += 1;
                }
                if dom.iter().any(|v| possible.contains(v)) {
                    hi += 1;
                }
            }
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::BinaryRelation;
    use std::collections::BTreeMap;

    fn vars(names: &[&str]) -> Vec<VarId> {
        names.iter().map(|s| VarId::from(*s)).collect()
    }

    fn tuple(pairs: &[(&str, Value)]) -> Tuple {
        pairs.iter().map(|(k, v)| (VarId::from(*k), *v)).collect()
    }

    #[test]
    fn alldifferent_on_distinct_values() {
        let c = ConstraintSpec::AllDifferent {
            scope: vars(&["X1", "X2", "X3"]),
        };
        assert!(evaluate(&c, &tuple(&[("X1", 1), ("X2", 2), ("X3", 3)])).unwrap());
        assert!(!evaluate(&c, &tuple(&[("X1", 1), ("X2", 2), ("X3", 1)])).unwrap());
    }

    #[test]
    fn nvalue_counts_distinct_values() {
        let c = ConstraintSpec::NValue {
            scope: vars(&["X1", "X2", "N"]),
        };
        assert!(!evaluate(&c, &tuple(&[("X1", 1), ("X2", 1), ("N", 2)])).unwrap());
        assert!(evaluate(&c, &tuple(&[("X1", 1), ("X2", 1), ("N", 1)])).unwrap());
    }

    #[test]
    fn card_of_two_satisfied_children_is_conjunction() {
        let child = |a: &str, b: &str| ConstraintSpec::AllDifferent { scope: vars(&[a, b]) };
        let c = ConstraintSpec::CardMeta {
            scope: vars(&["N"]),
            children: vec![child("X", "Y"), child("Y", "Z")],
        };
        let t = tuple(&[("N", 2), ("X", 1), ("Y", 2), ("Z", 1)]);
        assert!(evaluate(&c, &t).unwrap());
        let t = tuple(&[("N", 2), ("X", 1), ("Y", 1), ("Z", 2)]);
        assert!(!evaluate(&c, &t).unwrap());
    }

    #[test]
    fn missing_scope_variable_is_an_error() {
        let c = ConstraintSpec::AllDifferent {
            scope: vars(&["X1", "X2"]),
        };
        let err = evaluate(&c, &tuple(&[("X1", 1)])).unwrap_err();
        assert_eq!(err, CspError::MissingVariable(VarId::from("X2")));
    }

    #[test]
    fn repeated_alldifferent_never_holds() {
        let c = ConstraintSpec::AllDifferent {
            scope: vars(&["X", "Y", "X"]),
        };
        assert!(!evaluate(&c, &tuple(&[("X", 1), ("Y", 2)])).unwrap());
    }

    #[test]
    fn gcc_with_repeats_counts_positions() {
        let mut occ = BTreeMap::new();
        occ.insert(1, Interval::new(0, 2));
        let c = ConstraintSpec::Gcc {
            scope: vars(&["X", "X", "X"]),
            occ,
        };
        assert!(!evaluate(&c, &tuple(&[("X", 1)])).unwrap());
        assert!(evaluate(&c, &tuple(&[("X", 2)])).unwrap());
    }

    #[test]
    fn implies_cnf_is_vacuous_when_guard_false() {
        let c = ConstraintSpec::ImpliesCnf {
            scope: vars(&["G", "x1"]),
            cnf: vec![vec![1, 1, 1], vec![-1, -1, -1]],
        };
        assert!(evaluate(&c, &tuple(&[("G", 0), ("x1", 0)])).unwrap());
        assert!(!evaluate(&c, &tuple(&[("G", 1), ("x1", 0)])).unwrap());
        assert!(!evaluate(&c, &tuple(&[("G", 1), ("x1", 1)])).unwrap());
    }

    #[test]
    fn cardpath_counts_satisfied_windows() {
        let neq = ConstraintSpec::Table {
            scope: vars(&["a", "b"]),
            tuples: [vec![0, 1], vec![1, 0]].into_iter().collect(),
        };
        let c = ConstraintSpec::Cardpath {
            scope: vars(&["N", "X1", "X2", "X3"]),
            template: Box::new(neq),
        };
        let t = tuple(&[("N", 1), ("X1", 0), ("X2", 1), ("X3", 1)]);
        assert!(evaluate(&c, &t).unwrap());
    }

    #[test]
    fn binary_network_partial_check_uses_assigned_pairs_only() {
        let c = ConstraintSpec::BinaryNetwork {
            scope: vars(&["A", "B", "C"]),
            relations: vec![BinaryRelation {
                i: 0,
                j: 2,
                pairs: [(1, 2)].into_iter().collect(),
            }],
        };
        let ch = Checker::new(&c).unwrap();
        let doms = vec![vec![1, 2], vec![1, 2], vec![1, 2]];
        assert!(ch.may_hold(&[Some(1), Some(1), None], &doms, Some(1)));
        assert!(!ch.may_hold(&[Some(1), Some(1), Some(1)], &doms, Some(2)));
    }
}
