//! Instance model: variables, finite integer domains and a closed catalog of
//! global constraints, each with a polynomial-time checker.
//!
//! Every question in this crate is asked about a single constraint together
//! with a domain for each of its variables, so an [`Instance`] carries exactly
//! one [`ConstraintSpec`].

mod checker;
mod format;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checker::{evaluate, evaluate_counted, Checker};
pub use format::{parse_instance, serialize_instance};

/// Domain values are plain signed integers. Negative values are used by the
/// hardness gadgets to encode negated literals.
pub type Value = i64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CspError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance at `{field}`: {message}")]
    Invariant { field: String, message: String },
    #[error("tuple does not assign scope variable `{0}`")]
    MissingVariable(VarId),
}

impl CspError {
    pub(crate) fn invariant(field: impl Into<String>, message: impl Into<String>) -> Self {
        CspError::Invariant {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Identifier of a decision variable, unique within an instance.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: impl Into<String>) -> Self {
        VarId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId(s.to_owned())
    }
}

impl From<String> for VarId {
    fn from(s: String) -> Self {
        VarId(s)
    }
}

/// Association from variable to its finite set of values. Sets are kept
/// ordered so that iteration (and serialization) is ascending. An empty set
/// is a legal wipe-out state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DomainMap(BTreeMap<VarId, BTreeSet<Value>>);

impl DomainMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: VarId, values: impl IntoIterator<Item = Value>) {
        self.0.insert(var, values.into_iter().collect());
    }

    pub fn get(&self, var: &VarId) -> Option<&BTreeSet<Value>> {
        self.0.get(var)
    }

    pub fn get_mut(&mut self, var: &VarId) -> Option<&mut BTreeSet<Value>> {
        self.0.get_mut(var)
    }

    pub fn contains(&self, var: &VarId, value: Value) -> bool {
        self.0.get(var).is_some_and(|d| d.contains(&value))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &BTreeSet<Value>)> {
        self.0.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of (variable, value) pairs.
    pub fn size(&self) -> usize {
        self.0.values().map(BTreeSet::len).sum()
    }

    /// Pointwise containment: every domain of `self` is a subset of the
    /// corresponding domain in `other`, and both cover the same variables.
    pub fn is_subdomain_of(&self, other: &DomainMap) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .all(|(v, d)| other.0.get(v).is_some_and(|o| d.is_subset(o)))
    }

    /// `(var, value)` pairs present in `self` but not in `smaller`.
    pub fn removed_relative_to(&self, smaller: &DomainMap) -> Vec<(VarId, Value)> {
        let mut out = Vec::new();
        for (var, dom) in &self.0 {
            let kept = smaller.0.get(var);
            for &v in dom {
                if !kept.is_some_and(|k| k.contains(&v)) {
                    out.push((var.clone(), v));
                }
            }
        }
        out
    }
}

impl FromIterator<(VarId, BTreeSet<Value>)> for DomainMap {
    fn from_iter<I: IntoIterator<Item = (VarId, BTreeSet<Value>)>>(iter: I) -> Self {
        DomainMap(iter.into_iter().collect())
    }
}

/// One assignment of values to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tuple(BTreeMap<VarId, Value>);

impl Tuple {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: VarId, value: Value) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: &VarId) -> Option<Value> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, Value)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every assigned value lies in the corresponding domain.
    pub fn within(&self, domains: &DomainMap) -> bool {
        self.0.iter().all(|(var, v)| domains.contains(var, *v))
    }
}

impl FromIterator<(VarId, Value)> for Tuple {
    fn from_iter<I: IntoIterator<Item = (VarId, Value)>>(iter: I) -> Self {
        Tuple(iter.into_iter().collect())
    }
}

/// JSON object keys are strings; inside a tagged enum they reach the
/// deserializer unparsed.
fn value_keyed<'de, D, T>(d: D) -> Result<BTreeMap<Value, T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    BTreeMap::<String, T>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| {
            k.parse::<Value>()
                .map(|k| (k, v))
                .map_err(|_| serde::de::Error::custom(format!("`{k}` is not an integer value")))
        })
        .collect()
}

/// Occurrence bounds of one value in a fixed-interval cardinality constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub min: u32,
    pub max: u32,
}

impl Interval {
    pub fn new(min: u32, max: u32) -> Self {
        Interval { min, max }
    }
}

/// One binary relation of a [`ConstraintSpec::BinaryNetwork`]: the values at
/// scope positions `i` and `j` must form one of `pairs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryRelation {
    pub i: usize,
    pub j: usize,
    pub pairs: BTreeSet<(Value, Value)>,
}

/// The closed catalog of constraint kinds.
///
/// Scope positions may repeat a variable; a tuple assigns values per
/// variable, so repeated positions always read the same value. Kinds whose
/// variables have a natural shape (grid rows, set characteristic vectors,
/// child constraints) carry that shape instead of a flat `scope`; use
/// [`ConstraintSpec::scope`] for the flattened view.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConstraintSpec {
    /// Extensional constraint: the scope must take one of the listed tuples.
    Table {
        scope: Vec<VarId>,
        tuples: BTreeSet<Vec<Value>>,
    },
    /// Conjunction of binary relations over positions of a single scope.
    BinaryNetwork {
        scope: Vec<VarId>,
        relations: Vec<BinaryRelation>,
    },
    /// `scope = [guard, x1..xn]`; holds iff the guard is false (zero) or the
    /// CNF over `x1..xn` is satisfied. Literal `±i` refers to `x_i`, which is
    /// true when non-zero.
    ImpliesCnf { scope: Vec<VarId>, cnf: Vec<Vec<i64>> },
    AllDifferent { scope: Vec<VarId> },
    /// `scope = [X1..Xn, N]`: N is the number of distinct values among the Xs.
    NValue { scope: Vec<VarId> },
    /// `scope = [N, X1..Xn]`: N of the Xs take a value in `value_set`.
    AmongConst {
        scope: Vec<VarId>,
        #[serde(rename = "valueSet")]
        value_set: BTreeSet<Value>,
    },
    /// `scope = [N, X1..Xn, D1..Dm]` with the D-block starting at `split`:
    /// N of the Xs take a value equal to some D.
    AmongVar { scope: Vec<VarId>, split: usize },
    /// `scope = [N, M, X1..Xn, Y1..Ym]` with the Y-block starting at `split`:
    /// N counts Xs equal to some Y, M counts Ys equal to some X.
    Common { scope: Vec<VarId>, split: usize },
    /// Fixed-interval global cardinality. Values without an entry in `occ`
    /// are unconstrained.
    Gcc {
        scope: Vec<VarId>,
        #[serde(deserialize_with = "value_keyed")]
        occ: BTreeMap<Value, Interval>,
    },
    /// `scope = [X1..Xn, O1..Om]` where `Oj` is the occurrence count of
    /// `values[j]` among the Xs.
    GccVar { scope: Vec<VarId>, values: Vec<Value> },
    /// `scope = [X1..Xn, Y1..Ym]` with the Y-block starting at `split`:
    /// no X shares a value with any Y.
    Disjoint { scope: Vec<VarId>, split: usize },
    /// Every pair of distinct rows has scalar product `target`.
    ScalarProduct { rows: Vec<Vec<VarId>>, target: u64 },
    /// Set variables in characteristic-vector form: `sets[s][e]` is 1 iff
    /// element `universe[e]` belongs to set `s`. Every set has exactly
    /// `cardinality` elements and any two sets share at most one element.
    AtMost1 {
        universe: Vec<String>,
        sets: Vec<Vec<VarId>>,
        cardinality: usize,
    },
    /// `scope = [N]`: N is the number of satisfied children.
    CardMeta {
        scope: Vec<VarId>,
        children: Vec<ConstraintSpec>,
    },
    /// `scope = [N, X1..Xm]`: N is the number of windows `X_i..X_{i+k-1}`
    /// satisfying `template`, whose own scope lists `k` distinct
    /// placeholder names bound positionally to each window.
    Cardpath {
        scope: Vec<VarId>,
        template: Box<ConstraintSpec>,
    },
}

impl ConstraintSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ConstraintSpec::Table { .. } => "Table",
            ConstraintSpec::BinaryNetwork { .. } => "BinaryNetwork",
            ConstraintSpec::ImpliesCnf { .. } => "ImpliesCnf",
            ConstraintSpec::AllDifferent { .. } => "AllDifferent",
            ConstraintSpec::NValue { .. } => "NValue",
            ConstraintSpec::AmongConst { .. } => "AmongConst",
            ConstraintSpec::AmongVar { .. } => "AmongVar",
            ConstraintSpec::Common { .. } => "Common",
            ConstraintSpec::Gcc { .. } => "Gcc",
            ConstraintSpec::GccVar { .. } => "GccVar",
            ConstraintSpec::Disjoint { .. } => "Disjoint",
            ConstraintSpec::ScalarProduct { .. } => "ScalarProduct",
            ConstraintSpec::AtMost1 { .. } => "AtMost1",
            ConstraintSpec::CardMeta { .. } => "CardMeta",
            ConstraintSpec::Cardpath { .. } => "Cardpath",
        }
    }

    /// Flattened scope, repeats included, in canonical position order.
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            ConstraintSpec::Table { scope, .. }
            | ConstraintSpec::BinaryNetwork { scope, .. }
            | ConstraintSpec::ImpliesCnf { scope, .. }
            | ConstraintSpec::AllDifferent { scope }
            | ConstraintSpec::NValue { scope }
            | ConstraintSpec::AmongConst { scope, .. }
            | ConstraintSpec::AmongVar { scope, .. }
            | ConstraintSpec::Common { scope, .. }
            | ConstraintSpec::Gcc { scope, .. }
            | ConstraintSpec::GccVar { scope, .. }
            | ConstraintSpec::Disjoint { scope, .. }
            | ConstraintSpec::Cardpath { scope, .. } => scope.clone(),
            ConstraintSpec::ScalarProduct { rows, .. } => rows.concat(),
            ConstraintSpec::AtMost1 { sets, .. } => sets.concat(),
            ConstraintSpec::CardMeta { scope, children } => {
                let mut out = scope.clone();
                for child in children {
                    out.extend(child.scope());
                }
                out
            }
        }
    }

    /// Distinct scope variables in order of first appearance. This is the
    /// canonical variable order used by every search in the crate.
    pub fn distinct_scope(&self) -> Vec<VarId> {
        let mut seen = BTreeSet::new();
        self.scope()
            .into_iter()
            .filter(|v| seen.insert(v.clone()))
            .collect()
    }

    pub fn has_repeats(&self) -> bool {
        let scope = self.scope();
        scope.len() != scope.iter().collect::<BTreeSet<_>>().len()
    }

    /// Structural checks that do not depend on an enclosing instance.
    pub fn validate(&self) -> Result<(), CspError> {
        self.validate_at("constraint")
    }

    fn validate_at(&self, path: &str) -> Result<(), CspError> {
        let err = |msg: String| Err(CspError::invariant(path, msg));
        match self {
            ConstraintSpec::Table { scope, tuples } => {
                if let Some(t) = tuples.iter().find(|t| t.len() != scope.len()) {
                    return err(format!(
                        "tuple {t:?} has arity {} but scope has {}",
                        t.len(),
                        scope.len()
                    ));
                }
            }
            ConstraintSpec::BinaryNetwork { scope, relations } => {
                for r in relations {
                    if r.i >= scope.len() || r.j >= scope.len() || r.i == r.j {
                        return err(format!(
                            "relation positions ({}, {}) invalid for scope of {}",
                            r.i,
                            r.j,
                            scope.len()
                        ));
                    }
                }
            }
            ConstraintSpec::ImpliesCnf { scope, cnf } => {
                if scope.is_empty() {
                    return err("scope must contain the guard".into());
                }
                let n = (scope.len() - 1) as i64;
                for clause in cnf {
                    if let Some(l) = clause.iter().find(|&&l| l == 0 || l.abs() > n) {
                        return err(format!("literal {l} out of range 1..={n}"));
                    }
                }
            }
            ConstraintSpec::AllDifferent { .. } => {}
            ConstraintSpec::NValue { scope } | ConstraintSpec::AmongConst { scope, .. } => {
                if scope.is_empty() {
                    return err("scope must contain the count variable".into());
                }
            }
            ConstraintSpec::AmongVar { scope, split } => {
                if *split < 1 || *split > scope.len() {
                    return err(format!("split {split} outside 1..={}", scope.len()));
                }
            }
            ConstraintSpec::Common { scope, split } => {
                if *split < 2 || *split > scope.len() {
                    return err(format!("split {split} outside 2..={}", scope.len()));
                }
            }
            ConstraintSpec::Gcc { occ, .. } => {
                if let Some((v, i)) = occ.iter().find(|(_, i)| i.min > i.max) {
                    return err(format!("occurrence interval for {v} is empty: {i:?}"));
                }
            }
            ConstraintSpec::GccVar { scope, values } => {
                if values.len() > scope.len() {
                    return err("more occurrence variables than scope positions".into());
                }
                if values.iter().collect::<BTreeSet<_>>().len() != values.len() {
                    return err("counted values must be distinct".into());
                }
            }
            ConstraintSpec::Disjoint { scope, split } => {
                if *split > scope.len() {
                    return err(format!("split {split} outside 0..={}", scope.len()));
                }
            }
            ConstraintSpec::ScalarProduct { rows, .. } => {
                if let Some(first) = rows.first() {
                    if rows.iter().any(|r| r.len() != first.len()) {
                        return err("grid rows must all have the same length".into());
                    }
                }
            }
            ConstraintSpec::AtMost1 { universe, sets, .. } => {
                if let Some(s) = sets.iter().position(|s| s.len() != universe.len()) {
                    return err(format!(
                        "set {s} has {} characteristic variables, universe has {}",
                        sets[s].len(),
                        universe.len()
                    ));
                }
            }
            ConstraintSpec::CardMeta { scope, children } => {
                if scope.len() != 1 {
                    return err("scope must be exactly [N]".into());
                }
                for (i, c) in children.iter().enumerate() {
                    c.validate_at(&format!("{path}.children[{i}]"))?;
                }
            }
            ConstraintSpec::Cardpath { scope, template } => {
                if scope.is_empty() {
                    return err("scope must start with N".into());
                }
                template.validate_at(&format!("{path}.template"))?;
                let t_scope = template.scope();
                let k = t_scope.len();
                if template.has_repeats() {
                    return err("template placeholders must be distinct".into());
                }
                if k == 0 || k > scope.len() - 1 {
                    return err(format!(
                        "template arity {k} must be in 1..={}",
                        scope.len() - 1
                    ));
                }
            }
        }
        Ok(())
    }

    /// Every VarId that must be declared by the enclosing instance. Template
    /// placeholders of a Cardpath are local and excluded.
    pub(crate) fn referenced_vars(&self) -> Vec<VarId> {
        self.scope()
    }

    /// Rough input size used to bound checker cost.
    pub fn size(&self) -> usize {
        match self {
            ConstraintSpec::Table { scope, tuples } => scope.len() * (tuples.len() + 1),
            ConstraintSpec::BinaryNetwork { scope, relations } => {
                scope.len() + relations.iter().map(|r| r.pairs.len() + 1).sum::<usize>()
            }
            ConstraintSpec::ImpliesCnf { scope, cnf } => {
                scope.len() + cnf.iter().map(|c| c.len() + 1).sum::<usize>()
            }
            ConstraintSpec::AmongConst { scope, value_set } => scope.len() + value_set.len(),
            ConstraintSpec::Gcc { scope, occ } => scope.len() + occ.len(),
            ConstraintSpec::GccVar { scope, values } => scope.len() + values.len(),
            ConstraintSpec::CardMeta { scope, children } => {
                scope.len() + children.iter().map(|c| c.size()).sum::<usize>()
            }
            ConstraintSpec::Cardpath { scope, template } => scope.len() + template.size(),
            other => other.scope().len().max(1),
        }
    }
}

/// A single constraint together with a domain for every declared variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    variables: Vec<VarId>,
    domains: DomainMap,
    constraint: ConstraintSpec,
}

impl Instance {
    pub fn new(
        variables: Vec<VarId>,
        domains: DomainMap,
        constraint: ConstraintSpec,
    ) -> Result<Self, CspError> {
        let mut seen = BTreeSet::new();
        for (i, v) in variables.iter().enumerate() {
            if v.as_str().is_empty() {
                return Err(CspError::invariant(
                    format!("variables[{i}].id"),
                    "variable id must be non-empty",
                ));
            }
            if !seen.insert(v) {
                return Err(CspError::invariant(
                    format!("variables[{i}].id"),
                    format!("duplicate variable `{v}`"),
                ));
            }
        }
        if domains.len() != variables.len() || !variables.iter().all(|v| domains.get(v).is_some())
        {
            return Err(CspError::invariant(
                "variables",
                "domains must cover exactly the declared variables",
            ));
        }
        constraint.validate()?;
        if let Some(v) = constraint
            .referenced_vars()
            .into_iter()
            .find(|v| !seen.contains(v))
        {
            return Err(CspError::invariant(
                "constraint.scope",
                format!("variable `{v}` is not declared"),
            ));
        }
        Ok(Instance {
            variables,
            domains,
            constraint,
        })
    }

    /// Convenience constructor: declares exactly the distinct scope
    /// variables, in canonical order, with the given domains.
    pub fn from_scope(
        constraint: ConstraintSpec,
        domains: impl IntoIterator<Item = (VarId, Vec<Value>)>,
    ) -> Result<Self, CspError> {
        let mut map = DomainMap::new();
        for (v, d) in domains {
            map.insert(v, d);
        }
        let variables = constraint.distinct_scope();
        Instance::new(variables, map, constraint)
    }

    pub fn variables(&self) -> &[VarId] {
        &self.variables
    }

    pub fn domains(&self) -> &DomainMap {
        &self.domains
    }

    pub fn domain(&self, var: &VarId) -> Option<&BTreeSet<Value>> {
        self.domains.get(var)
    }

    pub fn constraint(&self) -> &ConstraintSpec {
        &self.constraint
    }

    /// Same constraint and variables over a different domain map.
    pub fn with_domains(&self, domains: DomainMap) -> Result<Self, CspError> {
        Instance::new(self.variables.clone(), domains, self.constraint.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VarId {
        VarId::from(s)
    }

    #[test]
    fn undeclared_scope_variable_is_rejected() {
        let c = ConstraintSpec::AllDifferent {
            scope: vec![v("X1"), v("X2")],
        };
        let mut d = DomainMap::new();
        d.insert(v("X1"), [1, 2]);
        let err = Instance::new(vec![v("X1")], d, c).unwrap_err();
        assert!(matches!(err, CspError::Invariant { .. }), "{err}");
    }

    #[test]
    fn duplicate_declaration_is_rejected() {
        let c = ConstraintSpec::AllDifferent { scope: vec![v("X")] };
        let mut d = DomainMap::new();
        d.insert(v("X"), [1]);
        assert!(Instance::new(vec![v("X"), v("X")], d, c).is_err());
    }

    #[test]
    fn distinct_scope_keeps_first_appearance_order() {
        let c = ConstraintSpec::Gcc {
            scope: vec![v("B"), v("A"), v("B"), v("C"), v("A")],
            occ: BTreeMap::new(),
        };
        assert_eq!(c.distinct_scope(), vec![v("B"), v("A"), v("C")]);
        assert!(c.has_repeats());
    }

    #[test]
    fn cardpath_template_arity_is_bounded_by_sequence() {
        let template = ConstraintSpec::Table {
            scope: vec![v("a"), v("b"), v("c")],
            tuples: BTreeSet::new(),
        };
        let c = ConstraintSpec::Cardpath {
            scope: vec![v("N"), v("X1"), v("X2")],
            template: Box::new(template),
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn subdomain_and_removals() {
        let mut big = DomainMap::new();
        big.insert(v("X"), [1, 2, 3]);
        big.insert(v("Y"), [1]);
        let mut small = big.clone();
        small.get_mut(&v("X")).unwrap().remove(&2);
        assert!(small.is_subdomain_of(&big));
        assert!(!big.is_subdomain_of(&small));
        assert_eq!(big.removed_relative_to(&small), vec![(v("X"), 2)]);
    }
}
