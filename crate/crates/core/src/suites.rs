//! Seeded corpora and the differential suites built on them.
//!
//! Every check compares two independent computations and records one
//! [`CaseReport`]. Reports are ordered by case index and identical for
//! identical configurations apart from timing.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{BinaryRelation, Checker, ConstraintSpec, DomainMap, Instance, Interval, Tuple, Value, VarId};
use crate::engine::{
    gac_domain, gac_domain_via_support, gac_support, gac_support_via_domain, gac_support_via_wipeout, is_it_gac,
    is_it_gac_via_maxgac, max_gac, max_gac_by_superset_sweep, max_gac_via_support, no_gac_wipeout,
    no_gac_wipeout_via_support, seek_support, EngineError, QuestionResult, SearchBudget,
};
use crate::gadgets::source::{fixture_f1, fixture_f2, fixture_p1, fixture_w1, fixture_w2};
use crate::gadgets::{
    build, oracle_solve, verify_gadget, Cnf3, Family, GadgetParams, Graph, Max2SatInput, SourceKind, SourceProblem,
};
use crate::propagators::{
    alldifferent_gac, among_const_gac, cardpath_dp_gac, gcc_fixed_gac, pairwise_ac, PropagationOutcome,
    PropagatorError,
};

/// Knobs shared by every suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteConfig {
    pub seed: u64,
    pub budget: SearchBudget,
    /// Random engine instances.
    pub instances: usize,
    pub max_arity: usize,
    pub max_domain: usize,
    /// Random instances per propagator.
    pub propagator_instances: usize,
    /// Random sources per gadget family.
    pub gadget_sources: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            budget: SearchBudget::DEFAULT,
            instances: 500,
            max_arity: 4,
            max_domain: 4,
            propagator_instances: 300,
            gadget_sources: 200,
        }
    }
}

impl SuiteConfig {
    /// Reduced counts for quick runs.
    pub fn small(seed: u64) -> Self {
        SuiteConfig {
            seed,
            instances: 60,
            propagator_instances: 40,
            gadget_sources: 20,
            ..SuiteConfig::default()
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStatus {
    Agree,
    Disagree,
    BudgetExhausted,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseReport {
    /// Stable case name, including the corpus index.
    pub case: String,
    /// The two computations compared, `left` vs `right`.
    pub compared: [String; 2],
    pub status: CaseStatus,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tallies {
    pub agree: usize,
    pub disagree: usize,
    pub budget_exhausted: usize,
    pub error: usize,
}

impl Tallies {
    pub fn total(&self) -> usize {
        self.agree + self.disagree + self.budget_exhausted + self.error
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub suite: String,
    pub tallies: Tallies,
    pub cases: Vec<CaseReport>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    fn new(suite: &str, cases: Vec<CaseReport>, started: Instant) -> Self {
        let mut tallies = Tallies::default();
        for c in &cases {
            match c.status {
                CaseStatus::Agree => tallies.agree += 1,
                CaseStatus::Disagree => tallies.disagree += 1,
                CaseStatus::BudgetExhausted => tallies.budget_exhausted += 1,
                CaseStatus::Error => tallies.error += 1,
            }
        }
        SuiteReport {
            suite: suite.into(),
            tallies,
            cases,
            elapsed_ms: started.elapsed().as_millis(),
        }
    }

    pub fn passed(&self) -> bool {
        self.tallies.agree == self.cases.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| c.status != CaseStatus::Agree)
    }

    /// Concatenation of several reports under one name.
    pub fn merge(suite: &str, parts: Vec<SuiteReport>) -> Self {
        let elapsed = parts.iter().map(|p| p.elapsed_ms).sum();
        let mut r = SuiteReport::new(suite, parts.into_iter().flat_map(|p| p.cases).collect(), Instant::now());
        r.elapsed_ms = elapsed;
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Reducers,
    Propagators,
    Gadgets,
    WorkedExamples,
    Smoke,
}

impl std::str::FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "reducers" => SuiteName::Reducers,
            "propagators" => SuiteName::Propagators,
            "gadgets" => SuiteName::Gadgets,
            "paper-examples" => SuiteName::WorkedExamples,
            "smoke" => SuiteName::Smoke,
            _ => return Err(format!("unknown suite `{s}`")),
        })
    }
}

pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> SuiteReport {
    match name {
        SuiteName::Reducers => SuiteReport::merge(
            "reducers",
            vec![reducer_equivalence(cfg), maxgac_semantics(cfg), engine_laws(cfg)],
        ),
        SuiteName::Propagators => propagator_equivalence(cfg),
        SuiteName::Gadgets => SuiteReport::merge("gadgets", vec![gadget_fidelity(cfg), gadget_sizes()]),
        SuiteName::WorkedExamples => worked_examples(cfg),
        SuiteName::Smoke => tractability_smoke(cfg),
    }
}

/// Collects case outcomes; `push` maps engine errors to statuses.
struct Cases {
    out: Vec<CaseReport>,
}

impl Cases {
    fn new() -> Self {
        Cases { out: Vec::new() }
    }

    fn push(&mut self, case: String, left: &str, right: &str, r: Result<Option<String>, EngineError>) {
        let (status, detail) = match r {
            Ok(None) => (CaseStatus::Agree, None),
            Ok(Some(d)) => (CaseStatus::Disagree, Some(d)),
            Err(e @ EngineError::BudgetExhausted { .. }) => (CaseStatus::BudgetExhausted, Some(e.to_string())),
            Err(e) => (CaseStatus::Error, Some(e.to_string())),
        };
        self.out.push(CaseReport {
            case,
            compared: [left.into(), right.into()],
            status,
            detail,
        });
    }

    fn compare<T: PartialEq + std::fmt::Debug>(
        &mut self,
        case: String,
        left: &str,
        right: &str,
        r: Result<(T, T), EngineError>,
    ) {
        let r = r.map(|(a, b)| (a != b).then(|| format!("{left} gave {a:?}, {right} gave {b:?}")));
        self.push(case, left, right, r);
    }
}

// ---------------------------------------------------------------------------
// Random engine corpus

fn var(prefix: &str, i: usize) -> VarId {
    VarId::new(format!("{prefix}{i}"))
}

fn random_domain(rng: &mut ChaCha8Rng, max: usize, values: std::ops::Range<Value>) -> Vec<Value> {
    let mut all: Vec<Value> = values.collect();
    all.shuffle(rng);
    let size = rng.gen_range(1..=max.min(all.len()));
    let mut d = all[..size].to_vec();
    d.sort_unstable();
    d
}

fn product(doms: &[Vec<Value>]) -> Vec<Vec<Value>> {
    doms.iter().fold(vec![Vec::new()], |acc, d| {
        acc.iter()
            .flat_map(|p| d.iter().map(move |&v| p.iter().copied().chain([v]).collect()))
            .collect()
    })
}

fn random_instance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Instance {
    let arity = rng.gen_range(1..=cfg.max_arity);
    let xs: Vec<VarId> = (1..=arity).map(|i| var("X", i)).collect();
    let mut doms: Vec<(VarId, Vec<Value>)> =
        xs.iter().map(|x| (x.clone(), random_domain(rng, cfg.max_domain, 0..5))).collect();
    let spec = match rng.gen_range(0..4) {
        0 => {
            let all = product(&doms.iter().map(|(_, d)| d.clone()).collect::<Vec<_>>());
            let p = rng.gen_range(0.1..0.7);
            ConstraintSpec::Table {
                scope: xs,
                tuples: all.into_iter().filter(|_| rng.gen_bool(p)).collect(),
            }
        }
        1 => ConstraintSpec::AllDifferent { scope: xs },
        2 => {
            let n = xs.len();
            let mut scope = vec![VarId::from("N")];
            scope.extend(xs);
            doms.push((VarId::from("N"), random_domain(rng, cfg.max_domain, 0..n as Value + 1)));
            ConstraintSpec::AmongConst {
                scope,
                value_set: random_domain(rng, 3, 0..5).into_iter().collect(),
            }
        }
        _ => {
            let mut relations = Vec::new();
            for i in 0..arity {
                for j in i + 1..arity {
                    if rng.gen_bool(0.6) {
                        let pairs = product(&[doms[i].1.clone(), doms[j].1.clone()])
                            .into_iter()
                            .filter(|_| rng.gen_bool(0.6))
                            .map(|p| (p[0], p[1]))
                            .collect();
                        relations.push(BinaryRelation { i, j, pairs });
                    }
                }
            }
            ConstraintSpec::BinaryNetwork { scope: xs, relations }
        }
    };
    Instance::from_scope(spec, doms).expect("generated instance is valid")
}

/// The seeded engine corpus: Table, AllDifferent, AmongConst and
/// BinaryNetwork constraints of small arity and domain size.
pub fn random_corpus(cfg: &SuiteConfig) -> Vec<Instance> {
    let mut rng = cfg.rng(1);
    (0..cfg.instances).map(|_| random_instance(&mut rng, cfg)).collect()
}

fn case_name(prefix: &str, i: usize, inst: &Instance) -> String {
    format!("{prefix}[{i}] {}", inst.constraint().kind_name())
}

fn answer(r: Result<QuestionResult, EngineError>) -> Result<bool, EngineError> {
    r.map(|q| q.answer)
}

fn scope_pairs(inst: &Instance) -> Vec<(VarId, Value)> {
    inst.constraint()
        .distinct_scope()
        .into_iter()
        .flat_map(|v| {
            let d: Vec<Value> = inst.domain(&v).into_iter().flatten().copied().collect();
            d.into_iter().map(move |x| (v.clone(), x))
        })
        .collect()
}

/// A random subdomain of the instance domains over the scope.
fn random_subdomain(rng: &mut ChaCha8Rng, inst: &Instance) -> DomainMap {
    let mut d = inst.domains().clone();
    for v in inst.constraint().distinct_scope() {
        if let Some(set) = d.get_mut(&v) {
            set.retain(|_| rng.gen_bool(0.8));
        }
    }
    d
}

/// Each reducer against its direct counterpart on the random corpus.
pub fn reducer_equivalence(cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let b = cfg.budget;
    let mut rng = cfg.rng(2);
    let mut cases = Cases::new();
    for (i, inst) in random_corpus(cfg).iter().enumerate() {
        let name = case_name("corpus", i, inst);
        for (x, v) in scope_pairs(inst) {
            let direct = answer(gac_support(inst, &x, v, b));
            cases.compare(
                format!("{name} ({x}={v})"),
                "gac-support",
                "gac-support-via-wipeout",
                direct.clone().and_then(|d| Ok((d, answer(gac_support_via_wipeout(inst, &x, v, b))?))),
            );
            cases.compare(
                format!("{name} ({x}={v})"),
                "gac-support",
                "gac-support-via-domain",
                direct.and_then(|d| Ok((d, answer(gac_support_via_domain(inst, &x, v, b))?))),
            );
        }
        cases.compare(
            name.clone(),
            "no-gac-wipeout",
            "no-gac-wipeout-via-support",
            (|| Ok((answer(no_gac_wipeout(inst, b))?, answer(no_gac_wipeout_via_support(inst, b))?)))(),
        );
        cases.compare(
            name.clone(),
            "gac-domain",
            "gac-domain-via-support",
            (|| {
                let d = gac_domain(inst, b)?;
                let r = gac_domain_via_support(inst, b)?;
                Ok(((d.answer, d.domains().cloned()), (r.answer, r.domains().cloned())))
            })(),
        );
        cases.compare(
            name.clone(),
            "is-it-gac",
            "is-it-gac-via-maxgac",
            (|| Ok((answer(is_it_gac(inst, b))?, answer(is_it_gac_via_maxgac(inst, b))?)))(),
        );
        let gac = gac_domain(inst, b).ok().and_then(|r| r.domains().cloned());
        let candidates = gac.into_iter().chain([inst.domains().clone(), random_subdomain(&mut rng, inst)]);
        for (k, cand) in candidates.enumerate() {
            cases.compare(
                format!("{name} candidate {k}"),
                "max-gac",
                "max-gac-via-support",
                (|| Ok((answer(max_gac(inst, &cand, b))?, answer(max_gac_via_support(inst, &cand, b))?)))(),
            );
        }
    }
    SuiteReport::new("reducer-equivalence", cases.out, started)
}

/// The superset sweep against the uniqueness-based maxGAC, on candidates
/// with at most six removed values.
pub fn maxgac_semantics(cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let b = cfg.budget;
    let mut rng = cfg.rng(3);
    let mut cases = Cases::new();
    for (i, inst) in random_corpus(cfg).iter().enumerate() {
        let name = case_name("corpus", i, inst);
        let mut candidates = vec![inst.domains().clone(), random_subdomain(&mut rng, inst)];
        if let Ok(r) = gac_domain(inst, b) {
            candidates.extend(r.domains().cloned());
        }
        for (k, cand) in candidates.iter().enumerate() {
            if inst.domains().removed_relative_to(cand).len() > 6 {
                continue;
            }
            cases.compare(
                format!("{name} candidate {k}"),
                "max-gac-by-superset-sweep",
                "max-gac",
                (|| Ok((answer(max_gac_by_superset_sweep(inst, cand, b))?, answer(max_gac(inst, cand, b))?)))(),
            );
        }
    }
    SuiteReport::new("maxgac-semantics", cases.out, started)
}

/// Maximal GAC subdomain by enumerating every tuple of the scope domains.
pub fn brute_force_gac_domain(inst: &Instance) -> DomainMap {
    let checker = Checker::new(inst.constraint()).expect("valid instance");
    let doms: Vec<Vec<Value>> = checker
        .vars()
        .iter()
        .map(|v| inst.domain(v).into_iter().flatten().copied().collect())
        .collect();
    let mut kept: Vec<BTreeSet<Value>> = vec![BTreeSet::new(); doms.len()];
    for t in product(&doms) {
        if checker.holds(&t) {
            for (k, v) in kept.iter_mut().zip(t) {
                k.insert(v);
            }
        }
    }
    let mut out = inst.domains().clone();
    for (v, k) in checker.vars().iter().zip(kept) {
        out.insert(v.clone(), k);
    }
    out
}

fn support_is_sound(inst: &Instance, t: &Tuple, x: &VarId, v: Value) -> Result<(), String> {
    if t.get(x) != Some(v) {
        return Err(format!("support of {x}={v} assigns {:?}", t.get(x)));
    }
    if !t.within(inst.domains()) {
        return Err(format!("support of {x}={v} leaves the domains"));
    }
    match crate::csp::evaluate(inst.constraint(), t) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("support of {x}={v} violates the constraint")),
        Err(e) => Err(e.to_string()),
    }
}

/// Contractance, idempotence, single-pass sufficiency against exhaustive
/// enumeration, and soundness of every support witness.
pub fn engine_laws(cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let b = cfg.budget;
    let mut cases = Cases::new();
    for (i, inst) in random_corpus(cfg).iter().enumerate() {
        let name = case_name("corpus", i, inst);
        let once = gac_domain(inst, b).map(|r| r.domains().expect("domains witness").clone());
        cases.push(
            name.clone(),
            "gac-domain",
            "contractance",
            once.clone()
                .map(|d| (!d.is_subdomain_of(inst.domains())).then(|| "result is not a subdomain".to_string())),
        );
        cases.compare(
            name.clone(),
            "gac-domain",
            "gac-domain-twice",
            once.clone().and_then(|d| {
                let again = gac_domain(&inst.with_domains(d.clone())?, b)?;
                Ok((d, again.domains().expect("domains witness").clone()))
            }),
        );
        cases.compare(
            name.clone(),
            "gac-domain",
            "exhaustive-enumeration",
            once.map(|d| (d, brute_force_gac_domain(inst))),
        );
        let witnesses = (|| {
            for (x, v) in scope_pairs(inst) {
                if let Some(t) = seek_support(inst, &x, v, b)? {
                    if let Err(e) = support_is_sound(inst, &t, &x, v) {
                        return Ok(Some(e));
                    }
                }
            }
            let r = no_gac_wipeout(inst, b)?;
            if let Some(t) = r.support() {
                if !t.within(inst.domains()) || crate::csp::evaluate(inst.constraint(), t) != Ok(true) {
                    return Ok(Some("no-wipe-out witness is not a solution".into()));
                }
            }
            Ok(None)
        })();
        cases.push(name, "engine-witnesses", "constraint-checker", witnesses);
    }
    SuiteReport::new("engine-laws", cases.out, started)
}

// ---------------------------------------------------------------------------
// Propagator corpora

fn alldiff_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=6);
    let d = rng.gen_range(1..=7);
    let xs: Vec<VarId> = (1..=n).map(|i| var("X", i)).collect();
    let doms: Vec<_> = xs.iter().map(|x| (x.clone(), random_domain(rng, d, 0..d as Value))).collect();
    Instance::from_scope(ConstraintSpec::AllDifferent { scope: xs }, doms).expect("valid")
}

fn among_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=5);
    let xs: Vec<VarId> = (1..=n).map(|i| var("X", i)).collect();
    let mut doms: Vec<_> = xs.iter().map(|x| (x.clone(), random_domain(rng, 4, 0..5))).collect();
    doms.push((VarId::from("N"), random_domain(rng, n + 1, 0..n as Value + 1)));
    let mut scope = vec![VarId::from("N")];
    scope.extend(xs);
    let spec = ConstraintSpec::AmongConst {
        scope,
        value_set: random_domain(rng, 3, 0..5).into_iter().collect(),
    };
    Instance::from_scope(spec, doms).expect("valid")
}

fn gcc_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=5);
    let values = rng.gen_range(1..=4);
    let xs: Vec<VarId> = (1..=n).map(|i| var("X", i)).collect();
    let doms: Vec<_> = xs.iter().map(|x| (x.clone(), random_domain(rng, values, 0..values as Value))).collect();
    let mut occ = BTreeMap::new();
    for v in 0..values as Value {
        if rng.gen_bool(0.8) {
            let lo = rng.gen_range(0..=2.min(n as u32));
            let hi = rng.gen_range(lo..=n as u32);
            occ.insert(v, Interval::new(lo, hi));
        }
    }
    Instance::from_scope(ConstraintSpec::Gcc { scope: xs, occ }, doms).expect("valid")
}

fn cardpath_instance(rng: &mut ChaCha8Rng) -> Instance {
    let len = rng.gen_range(2..=7);
    let d = rng.gen_range(1..=3);
    let xs: Vec<VarId> = (1..=len).map(|i| var("X", i)).collect();
    let mut doms: Vec<_> = xs.iter().map(|x| (x.clone(), random_domain(rng, d, 0..d as Value))).collect();
    doms.push((VarId::from("N"), random_domain(rng, len, 0..len as Value)));
    let all: Vec<Value> = (0..d as Value).collect();
    let template = ConstraintSpec::Table {
        scope: vec!["a".into(), "b".into()],
        tuples: product(&[all.clone(), all]).into_iter().filter(|_| rng.gen_bool(0.5)).collect(),
    };
    let mut scope = vec![VarId::from("N")];
    scope.extend(xs);
    let spec = ConstraintSpec::Cardpath {
        scope,
        template: Box::new(template),
    };
    Instance::from_scope(spec, doms).expect("valid")
}

type Propagator = fn(&Instance) -> Result<PropagationOutcome, PropagatorError>;

/// The propagators with their seeded corpus generators.
pub fn propagator_catalog() -> [(&'static str, Propagator, fn(&mut ChaCha8Rng) -> Instance); 4] {
    [
        ("alldifferent", alldifferent_gac, alldiff_instance),
        ("among-const", among_const_gac, among_instance),
        ("gcc", gcc_fixed_gac, gcc_instance),
        ("cardpath-dp", cardpath_dp_gac, cardpath_instance),
    ]
}

/// Each specialized propagator against the generic maximal GAC subdomain.
pub fn propagator_equivalence(cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let mut cases = Cases::new();
    for (k, (name, prop, gen)) in propagator_catalog().into_iter().enumerate() {
        let mut rng = cfg.rng(10 + k as u64);
        for i in 0..cfg.propagator_instances {
            let inst = gen(&mut rng);
            let case = format!("{name}[{i}]");
            match prop(&inst) {
                Ok(out) => cases.compare(
                    case,
                    name,
                    "gac-domain",
                    gac_domain(&inst, cfg.budget).map(|r| (out.domains, r.domains().expect("domains").clone())),
                ),
                Err(e) => cases.out.push(CaseReport {
                    case,
                    compared: [name.into(), "gac-domain".into()],
                    status: CaseStatus::Error,
                    detail: Some(e.to_string()),
                }),
            }
        }
    }
    SuiteReport::new("propagator-equivalence", cases.out, started)
}

// ---------------------------------------------------------------------------
// Gadget sources

fn random_literal(rng: &mut ChaCha8Rng, n: usize, positive: bool) -> i64 {
    let v = rng.gen_range(1..=n as i64);
    if positive || rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn random_cnf3(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, positive: bool) -> Cnf3 {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let clauses = (0..m)
        .map(|_| std::array::from_fn(|_| random_literal(rng, n, positive)))
        .collect();
    Cnf3::new(n, clauses).expect("literals in range")
}

/// A 3-CNF in which every variable occurs in at most three clauses.
fn random_sparse_cnf3(rng: &mut ChaCha8Rng) -> Cnf3 {
    loop {
        let f = random_cnf3(rng, 4, 6, false);
        if (1..=f.num_vars).all(|i| f.occurrences(i) <= 3) {
            return f;
        }
    }
}

fn random_max2sat(rng: &mut ChaCha8Rng) -> Max2SatInput {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=4);
    let clauses = (0..m)
        .map(|_| std::array::from_fn(|_| random_literal(rng, n, false)))
        .collect();
    Max2SatInput::new(n, clauses, rng.gen_range(0..=m.min(2))).expect("valid")
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::new(n, edges).expect("simple")
}

/// Every labelled graph on 1 to `max` vertices.
pub fn all_graphs(max: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=max {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e);
            out.push(Graph::new(n, edges).expect("simple"));
        }
    }
    out
}

/// `(x1 ∨ x1 ∨ x1) ∧ (¬x1 ∨ ¬x1 ∨ ¬x1)`: unsatisfiable, one variable in
/// two clauses.
pub fn fixture_contradiction() -> Cnf3 {
    Cnf3::new(1, vec![[1, 1, 1], [-1, -1, -1]]).expect("valid")
}

/// Positive formula with no 1-in-3 model: every assignment gives one of the
/// clauses zero or two true occurrences.
pub fn fixture_p_unsat() -> Cnf3 {
    Cnf3::new(2, vec![[1, 1, 2], [1, 2, 2]]).expect("valid")
}

/// Named fixtures for a family.
pub fn gadget_fixtures(family: Family) -> Vec<(&'static str, SourceProblem)> {
    let (k3, k4) = (Graph::complete(3), Graph::complete(4));
    match family.source_kind() {
        SourceKind::Sat3 if family == Family::Card => vec![
            ("F1", SourceProblem::Sat3(fixture_f1())),
            ("contradiction", SourceProblem::Sat3(fixture_contradiction())),
        ],
        SourceKind::Sat3 => vec![
            ("F1", SourceProblem::Sat3(fixture_f1())),
            ("F2", SourceProblem::Sat3(fixture_f2())),
        ],
        SourceKind::OneInThree => vec![
            ("P1", SourceProblem::OneInThree(fixture_p1())),
            ("P-unsat", SourceProblem::OneInThree(fixture_p_unsat())),
        ],
        SourceKind::Graph => vec![("K3", SourceProblem::ThreeCol(k3)), ("K4", SourceProblem::ThreeCol(k4))],
        SourceKind::GraphPair => {
            let k3_on_4 = Graph::new(4, k3.edges.clone()).expect("simple");
            vec![
                (
                    "K3+K4",
                    SourceProblem::GraphPair {
                        first: k3_on_4,
                        second: k4.clone(),
                    },
                ),
                (
                    "K4+K4",
                    SourceProblem::GraphPair {
                        first: k4.clone(),
                        second: k4,
                    },
                ),
            ]
        }
        SourceKind::Max2Sat => vec![
            ("W1", SourceProblem::Max2Sat(fixture_w1())),
            ("W2 k=0", SourceProblem::Max2Sat(fixture_w2(0))),
            ("W2 k=1", SourceProblem::Max2Sat(fixture_w2(1))),
        ],
    }
}

/// Seeded random sources for a family. Graph families take every graph on
/// at most five vertices, connected ones for the walk-based gadget.
pub fn gadget_sources(family: Family, cfg: &SuiteConfig) -> Vec<SourceProblem> {
    let mut rng = cfg.rng(100 + family as u64);
    let count = cfg.gadget_sources;
    match family {
        Family::IsItGac => all_graphs(5).into_iter().map(SourceProblem::ThreeCol).collect(),
        Family::CardpathThreeCol => all_graphs(5)
            .into_iter()
            .filter(|g| g.is_connected() && !g.edges.is_empty())
            .map(SourceProblem::ThreeCol)
            .collect(),
        Family::MaxGac => (0..count)
            .map(|_| {
                let n = rng.gen_range(1..=5);
                SourceProblem::GraphPair {
                    first: random_graph(&mut rng, n, 0.5),
                    second: random_graph(&mut rng, n, 0.8),
                }
            })
            .collect(),
        Family::Card => (0..count).map(|_| SourceProblem::Sat3(random_sparse_cnf3(&mut rng))).collect(),
        Family::ScalarProduct => (0..count)
            .map(|_| SourceProblem::OneInThree(random_cnf3(&mut rng, 4, 3, true)))
            .collect(),
        Family::CardpathMax2Sat => (0..count).map(|_| SourceProblem::Max2Sat(random_max2sat(&mut rng))).collect(),
        _ => (0..count)
            .map(|_| SourceProblem::Sat3(random_cnf3(&mut rng, 4, 6, false)))
            .collect(),
    }
}

fn verify_case(cases: &mut Cases, case: String, family: Family, src: &SourceProblem, budget: SearchBudget) {
    let compared = [format!("{family}-gadget"), "oracle".to_string()];
    let report = build(family, src, GadgetParams::default()).and_then(|g| verify_gadget(&g, src, budget));
    let (status, detail) = match report {
        Err(e) => (CaseStatus::Error, Some(e.to_string())),
        Ok(r) if r.engine_answer.is_none() => (CaseStatus::BudgetExhausted, r.error),
        Ok(r) if !r.agree => (
            CaseStatus::Disagree,
            Some(format!("engine {:?}, oracle {}", r.engine_answer, r.oracle_answer)),
        ),
        Ok(r) if r.certificate_valid == Some(false) => {
            (CaseStatus::Disagree, Some(format!("decoded certificate {:?} rejected", r.certificate)))
        }
        Ok(r) if r.error.is_some() => (CaseStatus::BudgetExhausted, r.error),
        Ok(_) => (CaseStatus::Agree, None),
    };
    cases.out.push(CaseReport {
        case,
        compared,
        status,
        detail,
    });
}

/// Gadget answers against the oracles, with decoded certificates checked.
pub fn gadget_family_fidelity(family: Family, cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let mut cases = Cases::new();
    for (name, src) in gadget_fixtures(family) {
        verify_case(&mut cases, format!("{family} fixture {name}"), family, &src, cfg.budget);
    }
    for (i, src) in gadget_sources(family, cfg).iter().enumerate() {
        verify_case(&mut cases, format!("{family} source[{i}]"), family, src, cfg.budget);
    }
    SuiteReport::new(family.name(), cases.out, started)
}

pub fn gadget_fidelity(cfg: &SuiteConfig) -> SuiteReport {
    let parts = Family::ALL.iter().map(|&f| gadget_family_fidelity(f, cfg)).collect();
    SuiteReport::merge("gadget-fidelity", parts)
}

/// Exact structural counts of the sized gadgets on F1 and P1.
pub fn gadget_sizes() -> SuiteReport {
    let started = Instant::now();
    let mut cases = Cases::new();
    let f1 = fixture_f1();
    let (n, m) = (f1.num_vars, f1.clauses.len());
    let sat = SourceProblem::Sat3(f1);
    let params = GadgetParams::default();
    let mut size = |case: &str, family: Family, src: &SourceProblem, f: &dyn Fn(&Instance) -> (usize, usize)| {
        let r = build(family, src, params).map(|g| f(&g.instance)).map_err(|e| e.to_string());
        let r = match r {
            Ok((got, want)) => Ok((got != want).then(|| format!("expected {want}, found {got}"))),
            Err(e) => Ok(Some(e)),
        };
        cases.push(case.into(), case, "size formula", r);
    };
    size("nvalue variables", Family::NValue, &sat, &|i| (i.variables().len(), n + m + 1));
    size("gcc-repeat scope length", Family::GccRepeat, &sat, &|i| (i.constraint().scope().len(), m + n * m));
    size("card children", Family::Card, &sat, &|i| match i.constraint() {
        ConstraintSpec::CardMeta { children, .. } => (children.len(), 5 * m),
        _ => (0, 5 * m),
    });
    let p1 = fixture_p1();
    let (pn, pm) = (p1.num_vars, p1.clauses.len());
    let pos = SourceProblem::OneInThree(p1);
    size("scalarproduct rows", Family::ScalarProduct, &pos, &|i| match i.constraint() {
        ConstraintSpec::ScalarProduct { rows, .. } => (rows.len(), 4 * pm + 1),
        _ => (0, 4 * pm + 1),
    });
    size("scalarproduct columns", Family::ScalarProduct, &pos, &|i| match i.constraint() {
        ConstraintSpec::ScalarProduct { rows, .. } => {
            let widths: BTreeSet<usize> = rows.iter().map(Vec::len).collect();
            (if widths.len() == 1 { rows[0].len() } else { 0 }, 3 * pm + pn)
        }
        _ => (0, 3 * pm + pn),
    });
    SuiteReport::new("gadget-sizes", cases.out, started)
}

// ---------------------------------------------------------------------------
// Worked examples and the tractability smoke test

/// The Disjoint example: `X1, Y1 ∈ {1,2}`, `X2, Y2 ∈ {1,3}`, `Y3 ∈ {2,3}`.
pub fn disjoint_example() -> Instance {
    let names = ["X1", "X2", "Y1", "Y2", "Y3"];
    let doms: [&[Value]; 5] = [&[1, 2], &[1, 3], &[1, 2], &[1, 3], &[2, 3]];
    Instance::from_scope(
        ConstraintSpec::Disjoint {
            scope: names.iter().map(|&n| VarId::from(n)).collect(),
            split: 2,
        },
        names.iter().zip(doms).map(|(&n, d)| (VarId::from(n), d.to_vec())),
    )
    .expect("valid")
}

/// Pairwise `X ≠ Y` decomposition of [`disjoint_example`].
pub fn disjoint_decomposition() -> Instance {
    let inst = disjoint_example();
    let scope = inst.constraint().scope();
    let mut relations = Vec::new();
    for i in 0..2 {
        for j in 2..5 {
            let pairs = product(&[
                inst.domain(&scope[i]).unwrap().iter().copied().collect(),
                inst.domain(&scope[j]).unwrap().iter().copied().collect(),
            ])
            .into_iter()
            .filter(|p| p[0] != p[1])
            .map(|p| (p[0], p[1]))
            .collect();
            relations.push(BinaryRelation { i, j, pairs });
        }
    }
    Instance::new(
        inst.variables().to_vec(),
        inst.domains().clone(),
        ConstraintSpec::BinaryNetwork { scope, relations },
    )
    .expect("valid")
}

/// Disjoint pruning, its agreement with enumeration and with every
/// reducer, and the pairwise decomposition removing nothing.
pub fn worked_examples(cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let b = cfg.budget;
    let inst = disjoint_example();
    let mut cases = Cases::new();
    let gac = gac_domain(&inst, b).map(|r| r.domains().expect("domains").clone());
    let removed = gac.clone().map(|d| {
        let r: BTreeSet<(VarId, Value)> = inst.domains().removed_relative_to(&d).into_iter().collect();
        let listed: BTreeSet<(VarId, Value)> =
            [("X2", 3), ("Y1", 1), ("Y2", 1)].iter().map(|&(v, x)| (VarId::from(v), x)).collect();
        (!listed.is_subset(&r)).then(|| format!("removals {r:?} miss one of {listed:?}"))
    });
    cases.push("disjoint listed prunings".into(), "gac-domain", "listed removals", removed);
    cases.compare(
        "disjoint fixpoint".into(),
        "gac-domain",
        "exhaustive-enumeration",
        gac.clone().map(|d| (d, brute_force_gac_domain(&inst))),
    );
    cases.compare(
        "disjoint via support".into(),
        "gac-domain",
        "gac-domain-via-support",
        gac.and_then(|d| Ok((d, gac_domain_via_support(&inst, b)?.domains().expect("domains").clone()))),
    );
    cases.compare(
        "disjoint is-it-gac".into(),
        "is-it-gac",
        "expected",
        answer(is_it_gac(&inst, b)).map(|a| (a, false)),
    );
    let pairwise = pairwise_ac(&disjoint_decomposition())
        .map(|o| o.removed.len())
        .map_err(|e| EngineError::Csp(crate::csp::CspError::Invariant {
            field: "pairwise".into(),
            message: e.to_string(),
        }));
    cases.compare("disjoint decomposition".into(), "pairwise-ac removals", "expected", pairwise.map(|n| (n, 0)));
    for (name, src) in gadget_fixtures(Family::MaxGac) {
        let expected = oracle_solve(&src).map(|o| o.answer).unwrap_or(false);
        let got = build(Family::MaxGac, &src, GadgetParams::default())
            .map_err(|e| e.to_string())
            .and_then(|g| {
                crate::engine::ask(&g.instance, &g.question, crate::engine::Route::Direct, b)
                    .map_err(|e| e.to_string())
            });
        cases.push(
            format!("maxgac gadget {name}"),
            "max-gac",
            "oracle",
            Ok(match got {
                Ok(r) => (r.answer != expected).then(|| format!("engine {}, oracle {expected}", r.answer)),
                Err(e) => Some(e),
            }),
        );
    }
    SuiteReport::new("paper-examples", cases.out, started)
}

/// AllDifferent over `n` variables sharing the domain `0..n`.
pub fn alldifferent_permutation(n: usize) -> Instance {
    let xs: Vec<VarId> = (1..=n).map(|i| var("X", i)).collect();
    let doms: Vec<_> = xs.iter().map(|x| (x.clone(), (0..n as Value).collect())).collect();
    Instance::from_scope(ConstraintSpec::AllDifferent { scope: xs }, doms).expect("valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SmokeOutcome {
    pub propagator_ms: u128,
    pub propagator_removals: usize,
    /// Tuples explored before the generic engine gave up, if it did.
    pub generic_exhausted_after: Option<u64>,
}

/// The matching propagator and the generic engine on a 200-variable
/// permutation AllDifferent.
pub fn smoke_outcome(budget: SearchBudget) -> SmokeOutcome {
    let inst = alldifferent_permutation(200);
    let t = Instant::now();
    let out = alldifferent_gac(&inst).expect("AllDifferent instance");
    let propagator_ms = t.elapsed().as_millis();
    let generic_exhausted_after = match gac_domain(&inst, budget) {
        Err(EngineError::BudgetExhausted { explored }) => Some(explored),
        _ => None,
    };
    SmokeOutcome {
        propagator_ms,
        propagator_removals: out.removed.len(),
        generic_exhausted_after,
    }
}

pub fn tractability_smoke(cfg: &SuiteConfig) -> SuiteReport {
    let started = Instant::now();
    let s = smoke_outcome(cfg.budget);
    let mut cases = Cases::new();
    cases.push(
        "alldifferent n=d=200".into(),
        "alldifferent",
        "under 1 s, no removals",
        Ok((s.propagator_ms >= 1000 || s.propagator_removals != 0)
            .then(|| format!("{} ms, {} removals", s.propagator_ms, s.propagator_removals))),
    );
    cases.push(
        "alldifferent n=d=200".into(),
        "gac-domain",
        "budget exhausted",
        Ok(s.generic_exhausted_after.is_none().then(|| "generic engine finished within budget".to_string())),
    );
    SuiteReport::new("smoke", cases.out, started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_bounded() {
        let cfg = SuiteConfig::small(7);
        let a = random_corpus(&cfg);
        assert_eq!(a, random_corpus(&cfg));
        assert!(a.iter().all(|i| i.constraint().distinct_scope().len() <= 5));
        assert!(a.iter().all(|i| i.domains().iter().all(|(_, d)| d.len() <= 5)));
        let kinds: BTreeSet<_> = a.iter().map(|i| i.constraint().kind_name()).collect();
        assert_eq!(kinds.len(), 4);
    }

    #[test]
    fn graph_enumeration_counts() {
        // 1 + 2 + 8 + 64 + 1024 labelled graphs.
        assert_eq!(all_graphs(5).len(), 1099);
    }

    #[test]
    fn extra_fixtures_match_their_oracles() {
        assert!(!oracle_solve(&SourceProblem::Sat3(fixture_contradiction())).unwrap().answer);
        assert!(!oracle_solve(&SourceProblem::OneInThree(fixture_p_unsat())).unwrap().answer);
    }

    #[test]
    fn disjoint_fixpoint_matches_hand_enumeration() {
        // X1 = 1 forces Y1 = 2; X2 = 1 forces Y2 = 3; Y3 free in {2, 3}.
        let d = brute_force_gac_domain(&disjoint_example());
        let get = |v: &str| d.get(&VarId::from(v)).unwrap().iter().copied().collect::<Vec<_>>();
        assert_eq!(get("X1"), [1]);
        assert_eq!(get("X2"), [1]);
        assert_eq!(get("Y1"), [2]);
        assert_eq!(get("Y2"), [3]);
        assert_eq!(get("Y3"), [2, 3]);
    }

    #[test]
    fn small_suites_pass() {
        let cfg = SuiteConfig::small(3);
        for s in [
            reducer_equivalence(&cfg),
            maxgac_semantics(&cfg),
            engine_laws(&cfg),
            propagator_equivalence(&cfg),
            worked_examples(&cfg),
        ] {
            assert!(s.passed(), "{}: {:?}", s.suite, s.failures().collect::<Vec<_>>());
            assert_eq!(s.tallies.total(), s.cases.len());
        }
    }
}
