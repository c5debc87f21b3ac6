use super::source::{fixture_f1, fixture_f2, fixture_p1, fixture_w1, fixture_w2};
use super::*;
use crate::csp::ConstraintSpec;

fn verify(family: Family, src: SourceProblem) -> VerificationReport {
    let g = build(family, &src, GadgetParams::default()).unwrap();
    verify_gadget(&g, &src, SearchBudget::DEFAULT).unwrap()
}

fn sat(f: Cnf3) -> SourceProblem {
    SourceProblem::Sat3(f)
}

fn contradiction() -> Cnf3 {
    Cnf3::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap()
}

#[test]
fn family_names_round_trip() {
    for f in Family::ALL {
        assert_eq!(f.name().parse::<Family>().unwrap(), f);
        assert_eq!(serde_json::to_value(f).unwrap(), f.name());
    }
}

#[test]
fn sat_families_on_f1_and_f2() {
    for family in [
        Family::Support,
        Family::NValue,
        Family::AmongVar,
        Family::Common,
        Family::Disjoint,
        Family::GccRepeat,
        Family::Card,
    ] {
        let yes = verify(family, sat(fixture_f1()));
        assert_eq!(yes.engine_answer, Some(true), "{family}");
        assert!(yes.passed(), "{family}: {yes:?}");
        assert!(matches!(yes.certificate, Some(Certificate::Model(_))), "{family}");
        // F2 breaks the occurrence bound of the card gadget.
        let unsat = if family == Family::Card { contradiction() } else { fixture_f2() };
        let no = verify(family, sat(unsat));
        assert_eq!(no.engine_answer, Some(false), "{family}");
        assert!(no.passed(), "{family}");
    }
}

#[test]
fn tautological_single_clause_decodes_true() {
    let f = Cnf3::new(1, vec![[1, 1, 1]]).unwrap();
    let r = verify(Family::Support, sat(f));
    assert_eq!(r.certificate, Some(Certificate::Model(vec![true])));
}

#[test]
fn graph_families_on_cliques() {
    for family in [Family::IsItGac, Family::CardpathThreeCol] {
        let k3 = verify(family, SourceProblem::ThreeCol(Graph::complete(3)));
        assert_eq!(k3.engine_answer, Some(true), "{family}");
        assert!(k3.passed(), "{family}: {k3:?}");
        let k4 = verify(family, SourceProblem::ThreeCol(Graph::complete(4)));
        assert_eq!(k4.engine_answer, Some(false), "{family}");
        assert!(k4.passed(), "{family}");
    }
}

#[test]
fn maxgac_on_clique_pairs() {
    let pair = |a, b| SourceProblem::GraphPair { first: Graph::complete(a), second: Graph::complete(b) };
    let yes = verify(Family::MaxGac, pair(4, 4));
    assert_eq!(yes.engine_answer, Some(false));
    let r = verify(Family::MaxGac, pair(3, 3));
    assert_eq!(r.engine_answer, Some(false));
    let _ = yes;
    let (k3, k4) = (Graph::complete(3), Graph::complete(4));
    let k3_padded = Graph::new(4, k3.edges.clone()).unwrap();
    let r = verify(Family::MaxGac, SourceProblem::GraphPair { first: k3_padded, second: k4 });
    assert_eq!(r.engine_answer, Some(true));
    assert!(r.passed(), "{r:?}");
}

#[test]
fn max2sat_fixtures() {
    let cases = [(fixture_w1(), true), (fixture_w2(0), false), (fixture_w2(1), true)];
    for (w, expected) in cases {
        let r = verify(Family::CardpathMax2Sat, SourceProblem::Max2Sat(w.clone()));
        assert_eq!(r.engine_answer, Some(expected), "{w:?}");
        assert!(r.passed(), "{w:?}: {r:?}");
    }
}

#[test]
fn size_formulas() {
    let f = fixture_f1();
    let (n, m) = (f.num_vars, f.clauses.len());
    let nv = build_nvalue_gadget(&f).unwrap();
    assert_eq!(nv.instance.variables().len(), n + m + 1);

    let gcc = build_gcc_repeat_gadget(&f).unwrap();
    assert_eq!(gcc.instance.constraint().scope().len(), m + n * m);

    let card = build_card_gadget(&f).unwrap();
    let ConstraintSpec::CardMeta { children, .. } = card.instance.constraint() else {
        panic!("card gadget is a CardMeta")
    };
    assert_eq!(children.len(), 5 * m);
    // N plus U, V, W per clause plus the Booleans.
    assert_eq!(card.instance.variables().len(), 1 + 3 * m + n);

    let p = fixture_p1();
    let sp = build_scalarproduct_gadget(&p, 1).unwrap();
    let ConstraintSpec::ScalarProduct { rows, .. } = sp.instance.constraint() else {
        panic!("scalarproduct gadget is a ScalarProduct")
    };
    assert_eq!(rows.len(), 4 * p.clauses.len() + 1);
    assert!(rows.iter().all(|r| r.len() == 3 * p.clauses.len() + p.num_vars));
}

#[test]
fn card_rejects_heavy_variables() {
    assert!(matches!(build_card_gadget(&fixture_f2()), Err(GadgetError::Precondition(_))));
}

#[test]
fn source_mismatch_is_reported() {
    let e = build(Family::IsItGac, &sat(fixture_f1()), GadgetParams::default()).unwrap_err();
    assert!(matches!(e, GadgetError::SourceMismatch { .. }));
}

#[test]
fn metadata_names_question_and_meaning() {
    let g = build_nvalue_gadget(&fixture_f1()).unwrap();
    let meta = g.metadata();
    assert_eq!(meta["question"]["question"], "no-gac-wipeout");
    assert_eq!(meta["sourceAnswerMeaning"], "satisfiable");
}

#[test]
fn variables_outside_the_scope_decode_false() {
    // x1 occurs in no clause, so no gadget variable mentions it.
    let f = Cnf3::new(2, vec![[2, -2, 2]]).unwrap();
    let r = verify(Family::Card, sat(f));
    assert!(r.passed(), "{r:?}");
    assert!(matches!(r.certificate, Some(Certificate::Model(ref m)) if !m[0]));
}
