//! Hardness gadgets: each builder turns a source problem into a GAC question
//! whose answer equals the source answer, together with a decoder from
//! witnesses back to source certificates.

mod cnf;
mod graph;
pub mod io;
mod max2sat;
pub mod oracle;
pub mod source;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csp::{CspError, Instance, Tuple, Value, VarId};
use crate::engine::{ask, seek_support, EngineError, Question, Route, SearchBudget};

pub use cnf::{
    build_among_var_gadget, build_atmost1_gadget, build_card_gadget, build_common_gadget, build_disjoint_gadget,
    build_gcc_repeat_gadget, build_nvalue_gadget, build_scalarproduct_gadget, build_support_gadget,
};
pub use graph::{build_cardpath_3col_gadget, build_isitgac_gadget, build_maxgac_gadget, covering_walk};
pub use max2sat::build_cardpath_max2sat_gadget;
pub use oracle::{oracle_solve, OracleAnswer, ORACLE_SCALE_LIMIT};
pub use source::{Certificate, Cnf3, Graph, Max2SatInput, SourceProblem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("invalid source problem: {0}")]
    InvalidSource(String),
    #[error("gadget precondition violated: {0}")]
    Precondition(String),
    #[error("family `{family}` does not take a {found} source")]
    SourceMismatch { family: Family, found: &'static str },
    #[error("source of size {size} exceeds the oracle limit {limit}")]
    ScaleLimit { size: usize, limit: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Support,
    #[serde(rename = "isitgac")]
    IsItGac,
    #[serde(rename = "maxgac")]
    MaxGac,
    #[serde(rename = "nvalue")]
    NValue,
    AmongVar,
    Common,
    Disjoint,
    #[serde(rename = "atmost1")]
    AtMost1,
    #[serde(rename = "scalarproduct")]
    ScalarProduct,
    GccRepeat,
    Card,
    #[serde(rename = "cardpath-3col")]
    CardpathThreeCol,
    #[serde(rename = "cardpath-max2sat")]
    CardpathMax2Sat,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::Support,
        Family::IsItGac,
        Family::MaxGac,
        Family::NValue,
        Family::AmongVar,
        Family::Common,
        Family::Disjoint,
        Family::AtMost1,
        Family::ScalarProduct,
        Family::GccRepeat,
        Family::Card,
        Family::CardpathThreeCol,
        Family::CardpathMax2Sat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Support => "support",
            Family::IsItGac => "isitgac",
            Family::MaxGac => "maxgac",
            Family::NValue => "nvalue",
            Family::AmongVar => "among-var",
            Family::Common => "common",
            Family::Disjoint => "disjoint",
            Family::AtMost1 => "atmost1",
            Family::ScalarProduct => "scalarproduct",
            Family::GccRepeat => "gcc-repeat",
            Family::Card => "card",
            Family::CardpathThreeCol => "cardpath-3col",
            Family::CardpathMax2Sat => "cardpath-max2sat",
        }
    }

    /// Kind of source the family reduces from.
    pub fn source_kind(self) -> SourceKind {
        match self {
            Family::IsItGac | Family::CardpathThreeCol => SourceKind::Graph,
            Family::MaxGac => SourceKind::GraphPair,
            Family::ScalarProduct => SourceKind::OneInThree,
            Family::CardpathMax2Sat => SourceKind::Max2Sat,
            _ => SourceKind::Sat3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown gadget family `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Sat3,
    OneInThree,
    Graph,
    GraphPair,
    Max2Sat,
}

impl SourceProblem {
    pub fn kind(&self) -> SourceKind {
        match self {
            SourceProblem::Sat3(_) => SourceKind::Sat3,
            SourceProblem::OneInThree(_) => SourceKind::OneInThree,
            SourceProblem::ThreeCol(_) => SourceKind::Graph,
            SourceProblem::GraphPair { .. } => SourceKind::GraphPair,
            SourceProblem::Max2Sat(_) => SourceKind::Max2Sat,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            SourceProblem::Sat3(_) => "3sat",
            SourceProblem::OneInThree(_) => "1in3",
            SourceProblem::ThreeCol(_) => "3col",
            SourceProblem::GraphPair { .. } => "graph-pair",
            SourceProblem::Max2Sat(_) => "max2sat",
        }
    }
}

/// What a "yes" from the gadget question means for the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceAnswer {
    Satisfiable,
    OneInThreeSatisfiable,
    ThreeColourable,
    FirstColourableSecondNot,
    AtMostKViolations,
}

impl SourceAnswer {
    pub fn description(self) -> &'static str {
        match self {
            SourceAnswer::Satisfiable => "yes iff the formula is satisfiable",
            SourceAnswer::OneInThreeSatisfiable => "yes iff some assignment makes exactly one literal per clause true",
            SourceAnswer::ThreeColourable => "yes iff the graph is 3-colourable",
            SourceAnswer::FirstColourableSecondNot => {
                "yes iff the first graph is 3-colourable and the second is not"
            }
            SourceAnswer::AtMostKViolations => "yes iff some assignment violates at most k clauses",
        }
    }
}

/// Reads a source certificate off a witness tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Decoder {
    /// `x_i` is true iff the tuple takes any of the pairs in entry `i - 1`.
    Model(Vec<Vec<(VarId, Value)>>),
    /// Colour of vertex `u` is the value of `vars[u]` modulo 3. Witnesses
    /// come from a support of `probe`.
    Colouring { vars: Vec<VarId>, probe: (VarId, Value) },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetOutput {
    pub family: Family,
    pub instance: Instance,
    pub question: Question,
    pub meaning: SourceAnswer,
    pub decoder: Decoder,
}

impl GadgetOutput {
    /// Variables absent from the tuple lie outside the constraint scope and
    /// are unconstrained; they decode as false, or as colour 0.
    pub fn decode(&self, t: &Tuple) -> Certificate {
        match &self.decoder {
            Decoder::Model(lits) => Certificate::Model(
                lits.iter()
                    .map(|pairs| pairs.iter().any(|(v, x)| t.get(v) == Some(*x)))
                    .collect(),
            ),
            Decoder::Colouring { vars, .. } => Certificate::Colouring(
                vars.iter()
                    .map(|v| t.get(v).map_or(0, |x| x.rem_euclid(3) as u8))
                    .collect(),
            ),
        }
    }

    /// Sidecar metadata written next to a serialized gadget instance.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "question": self.question,
            "sourceAnswerMeaning": self.meaning,
            "description": self.meaning.description(),
            "decoder": self.decoder,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetParams {
    /// Set size for the AtMost1 gadget.
    pub cardinality: usize,
    /// Scalar product target for the ScalarProduct gadget.
    pub target: u64,
}

impl Default for GadgetParams {
    fn default() -> Self {
        GadgetParams {
            cardinality: 2,
            target: 1,
        }
    }
}

pub fn build(family: Family, src: &SourceProblem, params: GadgetParams) -> Result<GadgetOutput, GadgetError> {
    let mismatch = || GadgetError::SourceMismatch {
        family,
        found: src.kind_name(),
    };
    match (family, src) {
        (Family::Support, SourceProblem::Sat3(f)) => build_support_gadget(f),
        (Family::NValue, SourceProblem::Sat3(f)) => build_nvalue_gadget(f),
        (Family::AmongVar, SourceProblem::Sat3(f)) => build_among_var_gadget(f),
        (Family::Common, SourceProblem::Sat3(f)) => build_common_gadget(f),
        (Family::Disjoint, SourceProblem::Sat3(f)) => build_disjoint_gadget(f),
        (Family::AtMost1, SourceProblem::Sat3(f)) => build_atmost1_gadget(f, params.cardinality),
        (Family::GccRepeat, SourceProblem::Sat3(f)) => build_gcc_repeat_gadget(f),
        (Family::Card, SourceProblem::Sat3(f)) => build_card_gadget(f),
        (Family::ScalarProduct, SourceProblem::OneInThree(f)) => build_scalarproduct_gadget(f, params.target),
        (Family::IsItGac, SourceProblem::ThreeCol(g)) => build_isitgac_gadget(g),
        (Family::CardpathThreeCol, SourceProblem::ThreeCol(g)) => build_cardpath_3col_gadget(g),
        (Family::MaxGac, SourceProblem::GraphPair { first: a, second: b }) => build_maxgac_gadget(a, b),
        (Family::CardpathMax2Sat, SourceProblem::Max2Sat(w)) => build_cardpath_max2sat_gadget(w),
        _ => Err(mismatch()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub family: Family,
    /// `None` when the engine ran out of budget.
    pub engine_answer: Option<bool>,
    pub oracle_answer: bool,
    pub agree: bool,
    pub certificate: Option<Certificate>,
    /// Meaningful only when both answers are yes.
    pub certificate_valid: Option<bool>,
    pub tuples_explored: u64,
    pub error: Option<String>,
}

impl VerificationReport {
    /// Agreement, plus a valid certificate whenever both sides say yes.
    pub fn passed(&self) -> bool {
        self.agree && self.certificate_valid != Some(false)
    }
}

/// Asks the gadget question, compares with the oracle and, when both say
/// yes, decodes a witness and checks it against the source.
pub fn verify_gadget(
    g: &GadgetOutput,
    src: &SourceProblem,
    budget: SearchBudget,
) -> Result<VerificationReport, GadgetError> {
    let oracle = oracle_solve(src)?;
    let mut report = VerificationReport {
        family: g.family,
        engine_answer: None,
        oracle_answer: oracle.answer,
        agree: false,
        certificate: None,
        certificate_valid: None,
        tuples_explored: 0,
        error: None,
    };
    let res = match ask(&g.instance, &g.question, Route::Direct, budget) {
        Ok(r) => r,
        Err(e @ EngineError::BudgetExhausted { explored }) => {
            report.tuples_explored = explored;
            report.error = Some(e.to_string());
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.engine_answer = Some(res.answer);
    report.agree = res.answer == oracle.answer;
    report.tuples_explored = res.tuples_explored;
    if res.answer && oracle.answer {
        let witness = match (&g.question, &g.decoder) {
            (_, Decoder::Colouring { probe, .. }) => {
                let inst = match &g.question {
                    Question::MaxGac { candidate } => g.instance.with_domains(candidate.clone())?,
                    _ => g.instance.clone(),
                };
                match seek_support(&inst, &probe.0, probe.1, budget) {
                    Ok(t) => t,
                    Err(e @ EngineError::BudgetExhausted { .. }) => {
                        report.error = Some(e.to_string());
                        None
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            _ => res.support().cloned(),
        };
        report.certificate = witness.as_ref().map(|t| g.decode(t));
        if report.error.is_none() {
            report.certificate_valid = Some(report.certificate.as_ref().is_some_and(|c| src.accepts(c)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
