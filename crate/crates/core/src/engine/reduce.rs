//! Each GAC question answered through another one.
//!
//! All inner calls of one reduction draw on a single shared budget, so
//! `tuples_explored` reports the total work of the derived route.

use crate::csp::{DomainMap, Instance, Tuple, Value, VarId};

use super::{check_candidate, EngineError, Meter, Problem, QuestionResult, SearchBudget, Witness};

fn result(answer: bool, witness: Option<Witness>, meter: &Meter) -> QuestionResult {
    QuestionResult {
        answer,
        witness,
        tuples_explored: meter.explored(),
    }
}

/// GACSupport(x, v) as NoGACWipeOut on the instance with `D(x) = {v}`.
pub fn gac_support_via_wipeout(
    inst: &Instance,
    x: &VarId,
    v: Value,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let i = p.locate(x, v)?;
    let mut meter = Meter::new(budget);
    let found = p.restricted(i, v).find_solution(&mut meter)?;
    Ok(result(found.is_some(), found.map(Witness::Support), &meter))
}

/// NoGACWipeOut as: some value of the first scope variable has a support.
pub fn no_gac_wipeout_via_support(
    inst: &Instance,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    if p.nvars() == 0 {
        let found = p.find_solution(&mut meter)?;
        return Ok(result(found.is_some(), found.map(Witness::Support), &meter));
    }
    for &v in p.dom(0) {
        if let Some(t) = p.seek(0, v, &mut meter)? {
            return Ok(result(true, Some(Witness::Support(t)), &meter));
        }
    }
    Ok(result(false, None, &meter))
}

/// GACSupport(x, v) as: GACDomain of the instance with `D(x) = {v}` leaves
/// no scope domain empty.
pub fn gac_support_via_domain(
    inst: &Instance,
    x: &VarId,
    v: Value,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let i = p.locate(x, v)?;
    let mut meter = Meter::new(budget);
    let q = p.restricted(i, v);
    let doms = q.supported_doms(&mut meter)?;
    if doms.iter().any(Vec::is_empty) {
        return Ok(result(false, None, &meter));
    }
    let t = q
        .with_doms(doms)
        .find_solution(&mut meter)?
        .expect("non-empty GAC domains contain a solution");
    Ok(result(true, Some(Witness::Support(t)), &meter))
}

/// GACDomain as one GACSupport call per (variable, value).
pub fn gac_domain_via_support(
    inst: &Instance,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    let doms = supported_by_support_calls(&p, &mut meter)?;
    let answer = doms.iter().all(|d| !d.is_empty());
    Ok(result(
        answer,
        Some(Witness::Domains(p.domain_map(inst.domains(), &doms))),
        &meter,
    ))
}

fn supported_by_support_calls(p: &Problem, meter: &mut Meter) -> Result<Vec<Vec<Value>>, EngineError> {
    let mut out = Vec::with_capacity(p.nvars());
    for i in 0..p.nvars() {
        let mut kept = Vec::new();
        for &v in p.dom(i) {
            let support: Option<Tuple> = p.restricted(i, v).find_solution(meter)?;
            if support.is_some() {
                kept.push(v);
            }
        }
        out.push(kept);
    }
    Ok(out)
}

/// maxGAC(candidate) as: the per-value GACSupport sweep over the original
/// domains yields exactly `candidate`.
pub fn max_gac_via_support(
    inst: &Instance,
    candidate: &DomainMap,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    check_candidate(inst, candidate)?;
    let p = Problem::from_instance(inst)?;
    let mut meter = Meter::new(budget);
    let doms = supported_by_support_calls(&p, &mut meter)?;
    let maximal = p.domain_map(inst.domains(), &doms);
    Ok(result(&maximal == candidate, Some(Witness::Domains(maximal)), &meter))
}

/// IsItGAC(D) as maxGAC(D0 = D, candidate = D).
pub fn is_it_gac_via_maxgac(
    inst: &Instance,
    budget: SearchBudget,
) -> Result<QuestionResult, EngineError> {
    let r = super::max_gac(inst, inst.domains(), budget)?;
    Ok(QuestionResult {
        answer: r.answer,
        witness: None,
        tuples_explored: r.tuples_explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::ConstraintSpec;
    use crate::engine::{gac_domain, gac_support, is_it_gac, no_gac_wipeout};

    fn disjoint() -> Instance {
        let names = ["X1", "X2", "Y1", "Y2", "Y3"];
        let doms: [&[Value]; 5] = [&[1, 2], &[1, 3], &[1, 2], &[1, 3], &[2, 3]];
        Instance::from_scope(
            ConstraintSpec::Disjoint {
                scope: names.iter().map(|n| VarId::from(*n)).collect(),
                split: 2,
            },
            names.iter().zip(doms).map(|(n, d)| (VarId::from(*n), d.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn routes_agree_on_disjoint_example() {
        let inst = disjoint();
        let b = SearchBudget::DEFAULT;
        let direct = gac_domain(&inst, b).unwrap();
        let via = gac_domain_via_support(&inst, b).unwrap();
        assert_eq!(direct.witness, via.witness);
        for (x, d) in inst.domains().iter() {
            for &v in d {
                let a = gac_support(&inst, x, v, b).unwrap().answer;
                assert_eq!(a, gac_support_via_wipeout(&inst, x, v, b).unwrap().answer);
                assert_eq!(a, gac_support_via_domain(&inst, x, v, b).unwrap().answer);
            }
        }
        assert_eq!(
            no_gac_wipeout(&inst, b).unwrap().answer,
            no_gac_wipeout_via_support(&inst, b).unwrap().answer
        );
        assert_eq!(
            is_it_gac(&inst, b).unwrap().answer,
            is_it_gac_via_maxgac(&inst, b).unwrap().answer
        );
        let maximal = direct.domains().unwrap();
        assert!(max_gac_via_support(&inst, maximal, b).unwrap().answer);
    }

    #[test]
    fn shared_budget_covers_inner_calls() {
        let inst = disjoint();
        let full = gac_domain_via_support(&inst, SearchBudget::DEFAULT).unwrap();
        let tight = SearchBudget::new(full.tuples_explored - 1).unwrap();
        assert!(matches!(
            gac_domain_via_support(&inst, tight),
            Err(EngineError::BudgetExhausted { .. })
        ));
    }
}
