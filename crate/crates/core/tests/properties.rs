use std::collections::BTreeSet;

use proptest::prelude::*;

use gac_core::csp::{parse_instance, serialize_instance, Checker, ConstraintSpec, Instance, Value, VarId};
use gac_core::engine::{gac_domain, gac_support, no_gac_wipeout, SearchBudget};
use gac_core::gadgets::{build, verify_gadget, Cnf3, Family, GadgetParams, SourceProblem};
use gac_core::suites::{brute_force_gac_domain, random_corpus, SuiteConfig};

fn corpus_instance(seed: u64, pick: usize) -> Instance {
    let cfg = SuiteConfig {
        seed,
        instances: 8,
        ..SuiteConfig::default()
    };
    random_corpus(&cfg).swap_remove(pick % 8)
}

fn table() -> impl Strategy<Value = Instance> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(arity, d)| {
        let all: Vec<Vec<Value>> = (0..(d as u32).pow(arity as u32))
            .map(|mut code| {
                (0..arity)
                    .map(|_| {
                        let v = (code % d as u32) as Value;
                        code /= d as u32;
                        v
                    })
                    .collect()
            })
            .collect();
        proptest::sample::subsequence(all.clone(), 0..=all.len()).prop_map(move |tuples| {
            let scope: Vec<VarId> = (1..=arity).map(|i| VarId::new(format!("X{i}"))).collect();
            let doms = scope.iter().map(|v| (v.clone(), (0..d as Value).collect()));
            Instance::from_scope(
                ConstraintSpec::Table {
                    scope: scope.clone(),
                    tuples: tuples.into_iter().collect(),
                },
                doms,
            )
            .unwrap()
        })
    })
}

fn completions(checker: &Checker, vals: &[Option<Value>], doms: &[Vec<Value>]) -> bool {
    match vals.iter().position(Option::is_none) {
        None => checker.holds(&vals.iter().map(|v| v.unwrap()).collect::<Vec<_>>()),
        Some(i) => doms[i].iter().any(|&x| {
            let mut next = vals.to_vec();
            next[i] = Some(x);
            completions(checker, &next, doms)
        }),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partial_check_never_rejects_a_completable_assignment(seed in any::<u64>(), pick in 0usize..8, mask in any::<u32>()) {
        let inst = corpus_instance(seed, pick);
        let checker = Checker::new(inst.constraint()).unwrap();
        let doms: Vec<Vec<Value>> = checker
            .vars()
            .iter()
            .map(|v| inst.domain(v).unwrap().iter().copied().collect())
            .collect();
        let vals: Vec<Option<Value>> = doms
            .iter()
            .enumerate()
            .map(|(i, d)| (mask >> i & 1 == 1).then(|| d[(mask as usize >> 8) % d.len()]))
            .collect();
        if completions(&checker, &vals, &doms) {
            prop_assert!(checker.may_hold(&vals, &doms, None));
        }
    }

    #[test]
    fn instances_round_trip_through_the_file_format(seed in any::<u64>(), pick in 0usize..8) {
        let inst = corpus_instance(seed, pick);
        let bytes = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&bytes).unwrap(), inst.clone());
        prop_assert_eq!(serialize_instance(&parse_instance(&bytes).unwrap()), bytes);
    }

    #[test]
    fn gac_domain_is_the_projection_of_all_solutions(inst in table()) {
        let b = SearchBudget::DEFAULT;
        let gac = gac_domain(&inst, b).unwrap();
        prop_assert_eq!(gac.domains().unwrap(), &brute_force_gac_domain(&inst));
        let any_solution = match inst.constraint() {
            ConstraintSpec::Table { tuples, .. } => !tuples.is_empty(),
            _ => unreachable!(),
        };
        prop_assert_eq!(no_gac_wipeout(&inst, b).unwrap().answer, any_solution);
    }

    #[test]
    fn support_answers_match_membership(seed in any::<u64>(), pick in 0usize..8) {
        let inst = corpus_instance(seed, pick);
        let b = SearchBudget::DEFAULT;
        let maximal = brute_force_gac_domain(&inst);
        for v in inst.constraint().distinct_scope() {
            for &x in inst.domain(&v).unwrap() {
                prop_assert_eq!(gac_support(&inst, &v, x, b).unwrap().answer, maximal.contains(&v, x));
            }
        }
    }

    #[test]
    fn nvalue_gadget_agrees_with_the_oracle(
        n in 1usize..=4,
        raw in proptest::collection::vec((1i64..=4, any::<bool>()), 3..=15),
    ) {
        let lits: Vec<i64> = raw
            .iter()
            .map(|&(v, neg)| {
                let v = (v - 1) % n as i64 + 1;
                if neg { -v } else { v }
            })
            .collect();
        let clauses: Vec<[i64; 3]> = lits.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        let src = SourceProblem::Sat3(Cnf3::new(n, clauses).unwrap());
        let g = build(Family::NValue, &src, GadgetParams::default()).unwrap();
        let r = verify_gadget(&g, &src, SearchBudget::DEFAULT).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }
}

#[test]
fn gadget_instances_round_trip() {
    let src = SourceProblem::Sat3(Cnf3::new(3, vec![[1, -2, 3], [-1, 2, -3]]).unwrap());
    let families: BTreeSet<Family> = Family::ALL
        .into_iter()
        .filter(|f| f.source_kind() == gac_core::gadgets::SourceKind::Sat3)
        .collect();
    for f in families {
        let g = build(f, &src, GadgetParams::default()).unwrap();
        let bytes = serialize_instance(&g.instance);
        assert_eq!(parse_instance(&bytes).unwrap(), g.instance, "{f}");
    }
}
