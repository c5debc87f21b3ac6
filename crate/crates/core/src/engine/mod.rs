//! The five GAC questions, answered by budgeted exhaustive support search.
//!
//! The search is deliberately generic: it walks the distinct scope variables
//! in canonical order, tries values in ascending order, and prunes only when
//! the constraint's own partial checker reports that no completion exists.
//! Every node visited counts against the [`SearchBudget`].
//!
//! [`reduce`] derives each question from another one, following the
//! polynomial-time reductions between them, so both routes can be compared.

pub mod reduce;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csp::{Checker, CspError, DomainMap, Instance, Tuple, Value, VarId};

pub use reduce::{
    gac_domain_via_support, gac_support_via_domain, gac_support_via_wipeout,
    is_it_gac_via_maxgac, max_gac_via_support, no_gac_wipeout_via_support,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("search budget exhausted after exploring {explored} tuples")]
    BudgetExhausted { explored: u64 },
    #[error("variable `{0}` is not in the constraint scope")]
    NotInScope(VarId),
    #[error("value {value} is not in the domain of `{var}`")]
    ValueNotInDomain { var: VarId, value: Value },
    #[error("candidate domain is not contained in the original domain")]
    NotASubdomain,
    #[error(transparent)]
    Csp(#[from] CspError),
}

/// Upper bound on the number of search nodes one question may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget(u64);

impl SearchBudget {
    pub const DEFAULT: SearchBudget = SearchBudget(10_000_000);

    /// `None` for a zero budget.
    pub fn new(max_tuples_explored: u64) -> Option<Self> {
        (max_tuples_explored > 0).then_some(SearchBudget(max_tuples_explored))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Witness {
    Support(Tuple),
    Domains(DomainMap),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuestionResult {
    pub answer: bool,
    pub witness: Option<Witness>,
    pub tuples_explored: u64,
}

impl QuestionResult {
    pub fn support(&self) -> Option<&Tuple> {
        match &self.witness {
            Some(Witness::Support(t)) => Some(t),
            _ => None,
        }
    }

    pub fn domains(&self) -> Option<&DomainMap> {
        match &self.witness {
            Some(Witness::Domains(d)) => Some(d),
            _ => None,
        }
    }
}

/// Node counter shared by every search performed while answering one
/// question.
#[derive(Debug)]
pub(crate) struct Meter {
    budget: u64,
    explored: u64,
}

impl Meter {
    pub(crate) fn new(budget: SearchBudget) -> Self {
        Meter {
            budget: budget.get(),
            explored: 0,
        }
    }

    fn tick(&mut self) -> Result<(), EngineError> {
        if self.explored >= self.budget {
            return Err(EngineError::BudgetExhausted {
                explored: self.explored,
            });
        }
        self.explored += 1;
        Ok(())
    }

    pub(crate) fn explored(&self) -> u64 {
        self.explored
    }
}

/// A compiled constraint plus the current domain of each scope variable,
/// indexed like [`Checker::vars`].
#[derive(Clone, Debug)]
pub(crate) struct Problem {
    checker: Checker,
    doms: Vec<Vec<Value>>,
}

impl Problem {
    pub(crate) fn from_instance(inst: &Instance) -> Result<Self, EngineError> {
        let checker = Checker::new(inst.constraint())?;
        let doms = checker
            .vars()
            .iter()
            .map(|v| {
                inst.domain(v)
                    .map(|d| d.iter().copied().collect())
                    .ok_or_else(|| EngineError::NotInScope(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Problem { checker, doms })
    }

    pub(crate) fn nvars(&self) -> usize {
        self.doms.len()
    }

    pub(crate) fn var(&self, i: usize) -> &VarId {
        &self.checker.vars()[i]
    }

    pub(crate) fn dom(&self, i: usize) -> &[Value] {
        &self.doms[i]
    }

    pub(crate) fn locate(&self, var: &VarId, value: Value) -> Result<usize, EngineError> {
        let i = self
            .checker
            .index_of(var)
            .ok_or_else(|| EngineError::NotInScope(var.clone()))?;
        if self.doms[i].binary_search(&value).is_err() {
            return Err(EngineError::ValueNotInDomain {
                var: var.clone(),
                value,
            });
        }
        Ok(i)
    }

    /// Copy with `D(var) = {value}`.
    pub(crate) fn restricted(&self, var: usize, value: Value) -> Problem {
        let mut p = self.clone();
        p.doms[var] = vec![value];
        p
    }

    pub(crate) fn with_doms(&self, doms: Vec<Vec<Value>>) -> Problem {
        Problem {
            checker: self.checker.clone(),
            doms,
        }
    }

    /// First satisfying tuple within the domains, in lexicographic order of
    /// the canonical variable order.
    pub(crate) fn find_solution(&self, meter: &mut Meter) -> Result<Option<Tuple>, EngineError> {
        if self.doms.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        let mut vals = vec![None; self.nvars()];
        if self.dfs(0, &mut vals, meter)? {
            let full: Vec<Value> = vals.into_iter().map(|v| v.expect("assigned")).collect();
            Ok(Some(self.checker.tuple_from(&full)))
        } else {
            Ok(None)
        }
    }

    fn dfs(
        &self,
        depth: usize,
        vals: &mut Vec<Option<Value>>,
        meter: &mut Meter,
    ) -> Result<bool, EngineError> {
        if depth == vals.len() {
            if depth == 0 {
                meter.tick()?;
            }
            let full: Vec<Value> = vals.iter().map(|v| v.expect("assigned")).collect();
            return Ok(self.checker.holds(&full));
        }
        for &v in &self.doms[depth] {
            meter.tick()?;
            vals[depth] = Some(v);
            if self.checker.may_hold(vals, &self.doms, Some(depth)) && self.dfs(depth + 1, vals, meter)? {
                return Ok(true);
            }
        }
        vals[depth] = None;
        Ok(false)
    }

    pub(crate) fn seek(&self, var: usize, value: Value, meter: &mut Meter) -> Result<Option<Tuple>, EngineError> {
        self.restricted(var, value).find_solution(meter)
    }

    /// One support search per (variable, value) of the current domains;
    /// unsupported values are dropped. Returns the surviving domains.
    pub(crate) fn supported_doms(&self, meter: &mut Meter) -> Result<Vec<Vec<Value>>, EngineError> {
        let mut out = Vec::with_capacity(self.nvars());
        for i in 0..self.nvars() {
            let mut kept = Vec::new();
            for &v in &self.doms[i] {
                if self.seek(i, v, meter)?.is_some() {
                    kept.push(v);
                }
            }
            out.push(kept);
        }
        Ok(out)
    }

    /// Instance-level domain map: scope variables replaced by `doms`, every
    /// other declared variable left as in `base`.
    pub(crate) fn domain_map(&self, base: &DomainMap, doms: &[Vec<Value>]) -> DomainMap {
        let mut out = base.clone();
        for (i, d) in doms.iter().enumerate() {
            out.insert(self.var(i).clone(), d.iter().copied());
        }
        out
    }

    /// Scope domains read from a candidate map.
    pub(crate) fn doms_from(&self, map: &DomainMap) -> Result<Vec<Vec<Value>>, EngineError> {
        (0..self.nvars())
            .map(|i| {
                map.get(self.var(i))
                    .map(|d| d.iter().copied().collect())
                    .ok_or(EngineError::NotASubdomain)
            })
            .collect()
    }
}

fn check_candidate(inst: &Instance, candidate: &DomainMap) -> Result<(), EngineError> {
    if candidate.is_subdomain_of(inst.domains()) {
        Ok(())
    } else {
        Err(EngineError::NotASubdomain)
    }
}

/// A tuple assigning `x = v` that satisfies the constraint within the
/// instance domains, or `None` when none exists.
pub fn seek_support(
    inst: &Instance,
    x: &VarId,
    v: Value,
    budget: SearchBudget,
) -> Result<Option<Tuple>, EngineError> {
    let p = Problem::from_instance(inst)?;
    let i = p.locate(x, v)?;
    p.seek(i, v, &mut Meter::new(budget))
}

/// Does value `v` of `x` have a support on the constraint?
pub fn gac_support(
    inst: &Instance,
    x: &VarId,
    v: Value,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let i = p.locate(x, v)?;
    let mut meter = Meter::new(budget);
    let found = p.seek(i, v, &mut meter)?;
    Ok(QuestionResult {
        answer: found.is_some(),
        witness: found.map(Witness::Support),
        tuples_explored: meter.explored(),
    })
}

/// Is every value of every scope variable supported? An empty domain adds
/// no obligation of its own, although it leaves the other values without
/// support.
pub fn is_it_gac(inst: &Instance, budget: SearchBudget) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    for i in 0..p.nvars() {
        for &v in p.dom(i) {
            if p.seek(i, v, &mut meter)?.is_none() {
                return Ok(QuestionResult {
                    answer: false,
                    witness: None,
                    tuples_explored: meter.explored(),
                });
            }
        }
    }
    Ok(QuestionResult {
        answer: true,
        witness: None,
        tuples_explored: meter.explored(),
    })
}

/// Does the constraint have a satisfying tuple within the domains, i.e. does
/// enforcing GAC leave every domain non-empty?
pub fn no_gac_wipeout(inst: &Instance, budget: SearchBudget) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    let found = p.find_solution(&mut meter)?;
    Ok(QuestionResult {
        answer: found.is_some(),
        witness: found.map(Witness::Support),
        tuples_explored: meter.explored(),
    })
}

/// The maximal GAC subdomain. For a single constraint one pass of support
/// checks over the original domains is already a fixpoint: a support tuple
/// stays a support once every unsupported value is removed.
///
/// `answer` is true when no scope domain is empty.
pub fn gac_domain(inst: &Instance, budget: SearchBudget) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    let doms = p.supported_doms(&mut meter)?;
    let answer = doms.iter().all(|d| !d.is_empty());
    Ok(QuestionResult {
        answer,
        witness: Some(Witness::Domains(p.domain_map(inst.domains(), &doms))),
        tuples_explored: meter.explored(),
    })
}

/// Is `candidate` the maximal GAC subdomain of the instance domains?
///
/// GAC subdomains are closed under union, so the maximal one is unique and
/// contains every other; comparing against [`gac_domain`] is exact.
pub fn max_gac(
    inst: &Instance,
    candidate: &DomainMap,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    check_candidate(inst, candidate)?;
    let res = gac_domain(inst, budget)?;
    let maximal = res.domains().expect("gac_domain returns domains").clone();
    Ok(QuestionResult {
        answer: &maximal == candidate,
        witness: Some(Witness::Domains(maximal)),
        tuples_explored: res.tuples_explored,
    })
}

/// maxGAC by its literal definition: `candidate` is GAC and no `D'` with
/// `candidate ⊂ D' ⊆ D0` is GAC. Enumerates every superset, so it is
/// exponential in the number of removed values.
pub fn max_gac_by_superset_sweep(
    inst: &Instance,
    candidate: &DomainMap,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    check_candidate(inst, candidate)?;
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    let cand = p.doms_from(candidate)?;
    let removed = inst.domains().removed_relative_to(candidate);
    // Values removed from variables outside the scope can always be restored.
    let scope: BTreeSet<&VarId> = (0..p.nvars()).map(|i| p.var(i)).collect();
    let outside = removed.iter().any(|(v, _)| !scope.contains(v));
    let removed: Vec<(usize, Value)> = removed
        .iter()
        .filter(|(v, _)| scope.contains(v))
        .map(|(v, x)| (p.checker.index_of(v).expect("in scope"), *x))
        .collect();
    let is_gac = |doms: Vec<Vec<Value>>, meter: &mut Meter| -> Result<bool, EngineError> {
        let q = p.with_doms(doms);
        for i in 0..q.nvars() {
            for &v in q.dom(i) {
                if q.seek(i, v, meter)?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let mut answer = !outside && is_gac(cand.clone(), &mut meter)?;
    if answer {
        for mask in 1u64..(1u64 << removed.len()) {
            let mut doms = cand.clone();
            for (bit, (i, v)) in removed.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    doms[*i].push(*v);
                }
            }
            for d in &mut doms {
                d.sort_unstable();
            }
            if is_gac(doms, &mut meter)? {
                answer = false;
                break;
            }
        }
    }
    Ok(QuestionResult {
        answer,
        witness: None,
        tuples_explored: meter.explored(),
    })
}

/// One of the five questions, with its per-question arguments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "question", rename_all = "kebab-case")]
pub enum Question {
    GacSupport { var: VarId, value: Value },
    IsItGac,
    NoGacWipeout,
    GacDomain,
    MaxGac { candidate: DomainMap },
}

impl Question {
    pub fn name(&self) -> &'static str {
        match self {
            Question::GacSupport { .. } => "gac-support",
            Question::IsItGac => "is-it-gac",
            Question::NoGacWipeout => "no-gac-wipeout",
            Question::GacDomain => "gac-domain",
            Question::MaxGac { .. } => "max-gac",
        }
    }
}

/// Which implementation answers a question.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Support search.
    #[default]
    Direct,
    /// Through the reduction to another question.
    Reduced,
}

impl Route {
    /// Name of the operation that answers `q` on this route.
    pub fn operation(self, q: &Question) -> &'static str {
        match (self, q) {
            (Route::Direct, q) => q.name(),
            (Route::Reduced, Question::GacSupport { .. }) => "gac-support-via-wipeout",
            (Route::Reduced, Question::NoGacWipeout) => "no-gac-wipeout-via-support",
            (Route::Reduced, Question::GacDomain) => "gac-domain-via-support",
            (Route::Reduced, Question::MaxGac { .. }) => "max-gac-via-support",
            (Route::Reduced, Question::IsItGac) => "is-it-gac-via-maxgac",
        }
    }
}

pub fn ask(inst: &Instance, q: &Question, route: Route, budget: SearchBudget) -> Result<QuestionResult, EngineError> {
    match (route, q) {
        (Route::Direct, Question::GacSupport { var, value }) => gac_support(inst, var, *value, budget),
        (Route::Direct, Question::IsItGac) => is_it_gac(inst, budget),
        (Route::Direct, Question::NoGacWipeout) => no_gac_wipeout(inst, budget),
        (Route::Direct, Question::GacDomain) => gac_domain(inst, budget),
        (Route::Direct, Question::MaxGac { candidate }) => max_gac(inst, candidate, budget),
        (Route::Reduced, Question::GacSupport { var, value }) => gac_support_via_wipeout(inst, var, *value, budget),
        (Route::Reduced, Question::IsItGac) => is_it_gac_via_maxgac(inst, budget),
        (Route::Reduced, Question::NoGacWipeout) => no_gac_wipeout_via_support(inst, budget),
        (Route::Reduced, Question::GacDomain) => gac_domain_via_support(inst, budget),
        (Route::Reduced, Question::MaxGac { candidate }) => max_gac_via_support(inst, candidate, budget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::ConstraintSpec;

    fn alldiff(doms: &[(&str, &[Value])]) -> Instance {
        let scope = doms.iter().map(|(n, _)| VarId::from(*n)).collect();
        Instance::from_scope(
            ConstraintSpec::AllDifferent { scope },
            doms.iter().map(|(n, d)| (VarId::from(*n), d.to_vec())),
        )
        .unwrap()
    }

    fn b() -> SearchBudget {
        SearchBudget::DEFAULT
    }

    #[test]
    fn forced_complement_support() {
        let inst = alldiff(&[("X1", &[1, 2]), ("X2", &[1, 2])]);
        let t = seek_support(&inst, &"X1".into(), 1, b()).unwrap().unwrap();
        assert_eq!(t.get(&"X2".into()), Some(2));
    }

    #[test]
    fn singleton_clash_has_no_support() {
        let inst = alldiff(&[("X1", &[1]), ("X2", &[1])]);
        let r = gac_support(&inst, &"X1".into(), 1, b()).unwrap();
        assert!(!r.answer);
        assert!(r.witness.is_none());
        assert!(!no_gac_wipeout(&inst, b()).unwrap().answer);
        let d = gac_domain(&inst, b()).unwrap();
        assert!(!d.answer);
        assert!(d.domains().unwrap().iter().all(|(_, s)| s.is_empty()));
    }

    #[test]
    fn symmetric_alldifferent_is_gac() {
        let inst = alldiff(&[("X1", &[1, 2]), ("X2", &[1, 2])]);
        assert!(is_it_gac(&inst, b()).unwrap().answer);
        let d = gac_domain(&inst, b()).unwrap();
        assert_eq!(d.domains().unwrap(), inst.domains());
    }

    #[test]
    fn out_of_scope_and_out_of_domain_queries_fail() {
        let inst = alldiff(&[("X1", &[1, 2]), ("X2", &[1, 2])]);
        assert!(matches!(
            gac_support(&inst, &"Z".into(), 1, b()),
            Err(EngineError::NotInScope(_))
        ));
        assert!(matches!(
            gac_support(&inst, &"X1".into(), 7, b()),
            Err(EngineError::ValueNotInDomain { .. })
        ));
    }

    #[test]
    fn budget_is_enforced_and_reported() {
        let doms: Vec<(String, Vec<Value>)> =
            (0..8).map(|i| (format!("X{i}"), (0..7).collect())).collect();
        let scope = doms.iter().map(|(n, _)| VarId::from(n.as_str())).collect();
        let inst = Instance::from_scope(
            ConstraintSpec::AllDifferent { scope },
            doms.iter().map(|(n, d)| (VarId::from(n.as_str()), d.clone())),
        )
        .unwrap();
        let err = no_gac_wipeout(&inst, SearchBudget::new(50).unwrap()).unwrap_err();
        assert_eq!(err, EngineError::BudgetExhausted { explored: 50 });
    }

    #[test]
    fn empty_domain_semantics() {
        let inst = alldiff(&[("X1", &[]), ("X2", &[1])]);
        // X2 = 1 cannot be supported while X1 has no value.
        assert!(!is_it_gac(&inst, b()).unwrap().answer);
        let inst = alldiff(&[("X1", &[]), ("X2", &[])]);
        assert!(is_it_gac(&inst, b()).unwrap().answer);
        assert!(!no_gac_wipeout(&inst, b()).unwrap().answer);
    }

    #[test]
    fn maxgac_rejects_non_subdomain() {
        let inst = alldiff(&[("X1", &[1, 2]), ("X2", &[1, 2])]);
        let mut cand = inst.domains().clone();
        cand.insert("X1".into(), [1, 2, 3]);
        assert_eq!(max_gac(&inst, &cand, b()), Err(EngineError::NotASubdomain));
    }

    #[test]
    fn maxgac_of_own_gac_domain_and_strict_subdomain() {
        let inst = alldiff(&[("X1", &[1, 2]), ("X2", &[1, 2]), ("X3", &[1, 2, 3])]);
        let maximal = gac_domain(&inst, b()).unwrap().domains().unwrap().clone();
        assert!(max_gac(&inst, &maximal, b()).unwrap().answer);
        assert!(max_gac_by_superset_sweep(&inst, &maximal, b()).unwrap().answer);
        // Removing X1=1 and re-closing gives a GAC but non-maximal domain.
        let mut smaller = maximal.clone();
        smaller.get_mut(&"X1".into()).unwrap().remove(&1);
        let closed = gac_domain(&inst.with_domains(smaller).unwrap(), b())
            .unwrap()
            .domains()
            .unwrap()
            .clone();
        assert!(!max_gac(&inst, &closed, b()).unwrap().answer);
        assert!(!max_gac_by_superset_sweep(&inst, &closed, b()).unwrap().answer);
    }
}
