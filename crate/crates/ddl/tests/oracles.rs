//! Cross-checks against independently written oracles.
//!
//! The tableau is checked on the role-free, nominal-free fragment against a
//! truth table: without roles every domain element is just a valuation of
//! the atoms, so a concept is satisfiable w.r.t. a TBox exactly when some
//! valuation satisfies every internalized axiom and the concept. The
//! answer-set search, with its bound-based pruning, is checked on compiled
//! programs against exhaustive enumeration of all consistent subsets of the
//! Herbrand base, each tested with the definitional stability check.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ddl::compiler::compile;
use ddl::engine::{ground, is_strong_answer_set, strong_answer_sets, Evaluator, Interpretation};
use ddl::kb::{parse_kb, Axiom, ConceptExpr};
use ddl::ranking::compute_ranking;
use ddl::tableau::Oracle;

fn atom_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["A", "B", "C", "D", "E"]).prop_map(str::to_string)
}

/// Role-free, nominal-free concepts: pure propositional structure.
fn propositional_concept() -> impl Strategy<Value = ConceptExpr> {
    let leaf = prop_oneof![
        Just(ConceptExpr::Top),
        Just(ConceptExpr::Bottom),
        atom_name().prop_map(ConceptExpr::atom),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(ConceptExpr::not),
            prop::collection::vec(inner.clone(), 2..4).prop_map(ConceptExpr::And),
            prop::collection::vec(inner, 2..4).prop_map(ConceptExpr::Or),
        ]
    })
}

fn propositional_tbox() -> impl Strategy<Value = BTreeSet<Axiom>> {
    prop::collection::btree_set(
        (propositional_concept(), propositional_concept())
            .prop_map(|(l, r)| Axiom::inclusion(l, r)),
        0..4,
    )
}

fn eval(concept: &ConceptExpr, valuation: u32, atoms: &[String]) -> bool {
    match concept {
        ConceptExpr::Top => true,
        ConceptExpr::Bottom => false,
        ConceptExpr::Atom(n) => {
            let i = atoms.iter().position(|a| a == n.as_str()).unwrap();
            valuation & (1 << i) != 0
        }
        ConceptExpr::Not(c) => !eval(c, valuation, atoms),
        ConceptExpr::And(cs) => cs.iter().all(|c| eval(c, valuation, atoms)),
        ConceptExpr::Or(cs) => cs.iter().any(|c| eval(c, valuation, atoms)),
        other => panic!("not propositional: {other}"),
    }
}

/// Truth-table satisfiability for the role-free fragment.
fn truth_table_sat(tbox: &BTreeSet<Axiom>, goal: &ConceptExpr) -> bool {
    let atoms: Vec<String> = ["A", "B", "C", "D", "E"].map(String::from).to_vec();
    (0..1u32 << atoms.len()).any(|valuation| {
        let axioms_hold = tbox.iter().all(|ax| match ax {
            Axiom::ConceptInclusion { lhs, rhs } => {
                !eval(lhs, valuation, &atoms) || eval(rhs, valuation, &atoms)
            }
            _ => unreachable!(),
        });
        axioms_hold && eval(goal, valuation, &atoms)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tableau_matches_truth_tables(tbox in propositional_tbox(), goal in propositional_concept()) {
        // without roles or nominals a model is a set of valuations, so one
        // witnessing valuation satisfying the internalized axioms suffices
        let oracle = Oracle::internal();
        let none: &BTreeSet<Axiom> = &BTreeSet::new();
        let by_tableau = oracle.is_satisfiable(&tbox, none, &goal).unwrap();
        prop_assert_eq!(by_tableau, truth_table_sat(&tbox, &goal));
    }

    #[test]
    fn parser_never_panics(input in "\\PC*") {
        let _ = parse_kb(&input);
    }

    #[test]
    fn parser_never_panics_on_near_grammar_soup(
        words in prop::collection::vec(
            prop::sample::select(vec![
                "concept", "role", "individual", "tbox", "rbox", "dbox", ":", ".", ",",
                "A", "B", "r", "a", "{", "}", "(", ")", "[=", "~[=", "==", "!", "&", "|",
                "exists", "forall", "self", ">=", "<=", "2", "-", "o", "U", "trans",
            ]),
            0..40,
        )
    ) {
        let _ = parse_kb(&words.join(" "));
    }
}

/// All consistent subsets of the Herbrand base that pass the definitional
/// stability check; exponential, so only run on small programs.
fn exhaustive_answer_sets(
    ev: &Evaluator,
    gp: &ddl::engine::GroundProgram,
) -> Vec<Interpretation> {
    let atoms: Vec<_> = gp.herbrand_base.iter().filter(|l| l.positive).cloned().collect();
    assert!(atoms.len() <= 8, "exhaustive check needs a small base");
    let mut found = Vec::new();
    let mut states = vec![0u8; atoms.len()];
    loop {
        let candidate = Interpretation::from_literals(
            atoms
                .iter()
                .zip(states.iter())
                .filter_map(|(atom, s)| match s {
                    0 => None,
                    1 => Some(atom.clone()),
                    _ => Some(atom.complement()),
                }),
        );
        if is_strong_answer_set(ev, gp, &candidate).unwrap() {
            found.push(candidate);
        }
        let mut i = 0;
        loop {
            if i == states.len() {
                found.sort();
                return found;
            }
            states[i] += 1;
            if states[i] < 3 {
                break;
            }
            states[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn pruned_search_matches_exhaustive_enumeration_on_compiled_programs() {
    let oracle = Oracle::internal();
    let mut checked = 0;
    for seed in 0..120u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kb = ddl::postulates::random_kb(&mut rng);
        let rkb = compute_ranking(&oracle, &kb).unwrap();
        let program = match compile(&rkb) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if program.rules.is_empty() || kb.individuals.is_empty() {
            continue;
        }
        let classical = rkb.classical_kb();
        let ev = Evaluator::new(&oracle, &classical);
        let gp = ground(&program).unwrap();
        if gp.herbrand_base.len() > 12 {
            continue;
        }
        let by_search = strong_answer_sets(&ev, &program).unwrap();
        let by_enumeration = exhaustive_answer_sets(&ev, &gp);
        assert_eq!(by_search, by_enumeration, "seed {seed}: {}", ddl::kb::serialize_kb(&kb));
        checked += 1;
    }
    assert!(checked >= 25, "only {checked} programs were small enough to enumerate");
}

#[test]
fn two_answer_set_program_survives_exhaustive_enumeration() {
    let kb = parse_kb(
        "concept C, D.\nrole R.\nindividual a, b.\n\
         tbox: {a} [= exists R . {b}.\ntbox: C == D & forall R . !D.\ndbox: TOP ~[= C.\n",
    )
    .unwrap();
    let oracle = Oracle::internal();
    let rkb = compute_ranking(&oracle, &kb).unwrap();
    let program = compile(&rkb).unwrap();
    let classical = rkb.classical_kb();
    let ev = Evaluator::new(&oracle, &classical);
    let gp = ground(&program).unwrap();
    let by_search = strong_answer_sets(&ev, &program).unwrap();
    let by_enumeration = exhaustive_answer_sets(&ev, &gp);
    assert_eq!(by_search, by_enumeration);
    assert_eq!(by_search.len(), 2);
}
