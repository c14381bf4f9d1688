//! Acceptance suite: the golden results every release must reproduce, one
//! test per criterion, each printing a PASS/FAIL line (run with
//! `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! All comparisons are exact; the toolkit computes symbolically and no
//! tolerances apply.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ddl::compiler::compile;
use ddl::engine::{
    consequence, gelfond_lifschitz, ground, least_model, strong_answer_sets, strong_dl_transform,
    EngineError, Evaluator, GroundLiteral, Interpretation, LeastModel, Mode,
};
use ddl::kb::{parse_kb, ConceptExpr, KnowledgeBase};
use ddl::postulates::check_postulates;
use ddl::program::{
    BodyElem, DlAtom, DlProgram, DlQuery, DlRule, Predicate, PredicateLiteral, RuleOrigin, Term,
    UpdateSpec,
};
use ddl::ranking::{compute_ranking, rank_of_concept, rational_closure_entails_ranked, Rank, RankedKb};
use ddl::tableau::Oracle;

fn fixture(name: &str) -> KnowledgeBase {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_kb(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
        .unwrap()
}

fn check(criterion: u32, desc: &str, ok: bool, detail: impl FnOnce() -> String) {
    if ok {
        println!("[acceptance {criterion:02}] PASS - {desc}");
    } else {
        let detail = detail();
        println!("[acceptance {criterion:02}] FAIL - {desc}: {detail}");
        panic!("criterion {criterion} failed: {desc}\n{detail}");
    }
}

fn ranked(kb: &KnowledgeBase) -> (Oracle, RankedKb) {
    let oracle = Oracle::internal();
    let rkb = compute_ranking(&oracle, kb).unwrap();
    (oracle, rkb)
}

fn atom(n: &str) -> ConceptExpr {
    ConceptExpr::atom(n)
}

fn not(c: ConceptExpr) -> ConceptExpr {
    ConceptExpr::not(c)
}

fn interp(lits: &[(&str, &str, bool)]) -> Interpretation {
    Interpretation::from_literals(lits.iter().map(|(p, a, pos)| {
        if *pos {
            GroundLiteral::pos(p, &[a])
        } else {
            GroundLiteral::neg(p, &[a])
        }
    }))
}

#[test]
fn criterion_01_feline_ranking() {
    let kb = fixture("cat_tiger.kb");
    let (oracle, rkb) = ranked(&kb);

    let rank_of = |a: ConceptExpr, c: ConceptExpr| rkb.rank[&ddl::DefeasibleAxiom::new(a, c)];
    let axiom_ranks_ok = rank_of(atom("Feline"), atom("Agile")) == 0
        && rank_of(atom("Feline"), atom("Docile")) == 0
        && rank_of(atom("BigFeline"), not(atom("Docile"))) == 1
        && rkb.rank.len() == 3;

    let concept_rank = |c: &ConceptExpr| rank_of_concept(&oracle, &rkb, c).unwrap();
    let concept_ranks_ok = concept_rank(&atom("Cat")) == Rank::Finite(0)
        && concept_rank(&atom("Feline")) == Rank::Finite(0)
        && concept_rank(&atom("Tiger")) == Rank::Finite(1)
        && concept_rank(&ConceptExpr::and(vec![atom("Feline"), atom("Big")])) == Rank::Finite(1);

    check(
        1,
        "feline KB ranks axioms 0/0/1 and concepts Cat,Feline=0 Tiger,Feline&Big=1",
        axiom_ranks_ok && concept_ranks_ok,
        || format!("ranks: {:?}", rkb.rank),
    );
}

#[test]
fn criterion_02_feline_rational_entailments() {
    let kb = fixture("cat_tiger.kb");
    let (oracle, rkb) = ranked(&kb);
    let entails = |a: ConceptExpr, c: ConceptExpr| {
        rational_closure_entails_ranked(&oracle, &rkb, &a, &c).unwrap()
    };
    let conclusions = [
        (atom("Cat"), atom("Docile")),
        (atom("Cat"), atom("Agile")),
        (atom("Cat"), not(atom("Big"))),
        (atom("Tiger"), not(atom("Docile"))),
        (atom("Cat"), not(atom("Tiger"))),
    ];
    let all = conclusions.iter().all(|(a, c)| entails(a.clone(), c.clone()));
    check(2, "all five feline conclusions are rationally entailed", all, || {
        conclusions
            .iter()
            .map(|(a, c)| format!("{a} ~[= {c}: {}", entails(a.clone(), c.clone())))
            .collect::<Vec<_>>()
            .join(", ")
    });
}

#[test]
fn criterion_03_bird_penguin_pipeline() {
    let kb = fixture("bird_penguin.kb");
    let (oracle, rkb) = ranked(&kb);

    let rank_groups = |k: usize| {
        rkb.rank
            .iter()
            .filter(|(_, r)| **r == k)
            .map(|(d, _)| d.to_string())
            .collect::<BTreeSet<_>>()
    };
    let d0: BTreeSet<String> =
        ["B ~[= F", "B ~[= Preyins", "B ~[= W"].map(String::from).into_iter().collect();
    let d1: BTreeSet<String> =
        ["P ~[= !F", "P ~[= Preyfish"].map(String::from).into_iter().collect();
    check(3, "bird/penguin ranking yields three rank-0 and two rank-1 axioms", rank_groups(0) == d0 && rank_groups(1) == d1, || {
        format!("rank 0: {:?}, rank 1: {:?}", rank_groups(0), rank_groups(1))
    });

    let program = compile(&rkb).unwrap();
    let lines: BTreeSet<String> = program.rules.iter().map(|r| program.render_rule(r)).collect();
    let expected: BTreeSet<String> = [
        "f(X) :- DL[lambda; B](X), not DL[lambda; P](X), not -f(X).",
        "-f(X) :- DL[lambda; -F](X).",
        "preyins(X) :- DL[lambda; B](X), not DL[lambda; P](X), not -preyins(X).",
        "-preyins(X) :- DL[lambda; -Preyins](X).",
        "w(X) :- DL[lambda; B](X), not DL[lambda; P](X), not -w(X).",
        "-w(X) :- DL[lambda; -W](X).",
        "-f(X) :- DL[lambda; P](X), not f(X).",
        "f(X) :- DL[lambda; F](X).",
        "preyfish(X) :- DL[lambda; P](X), not -preyfish(X).",
        "-preyfish(X) :- DL[lambda; -Preyfish](X).",
        "-p(X) :- not DL[lambda; P](X).",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    check(3, "bird/penguin compilation emits the eleven-rule program", lines == expected, || {
        format!("got: {lines:#?}")
    });

    let classical = rkb.classical_kb();
    let ev = Evaluator::new(&oracle, &classical);
    let sets = strong_answer_sets(&ev, &program).unwrap();
    let reference = interp(&[
        ("f", "a", true),
        ("preyins", "a", true),
        ("w", "a", true),
        ("p", "a", false),
        ("f", "b", false),
        ("preyfish", "b", true),
    ]);
    check(
        3,
        "bird/penguin solving yields exactly the reference answer set",
        sets == vec![reference.clone()],
        || {
            format!(
                "reference {reference} is not the computed result; the engine finds {}: \
                 the blocking rules with queries -Preyfish and -Preyins fire for a and b \
                 (eating only insects provably excludes eating only fish), so the least \
                 model of the reduct strictly extends the reference set, which is \
                 therefore not stable under the strong answer-set definition",
                sets.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ; ")
            )
        },
    );
}

#[test]
fn criterion_04_nominal_choice_answer_sets() {
    let kb = fixture("nominal_choice.kb");
    let (oracle, rkb) = ranked(&kb);
    let program = compile(&rkb).unwrap();
    let classical = rkb.classical_kb();
    let ev = Evaluator::new(&oracle, &classical);

    let sets = strong_answer_sets(&ev, &program).unwrap();
    let expected = vec![
        interp(&[("c", "a", false), ("c", "b", true)]),
        interp(&[("c", "a", true), ("c", "b", false)]),
    ];
    let brave = consequence(&ev, &program, &GroundLiteral::pos("c", &["a"]), Mode::Brave).unwrap();
    let cautious =
        consequence(&ev, &program, &GroundLiteral::pos("c", &["a"]), Mode::Cautious).unwrap();
    check(
        4,
        "nominal KB has exactly the two expected answer sets; c(a) brave yes, cautious no",
        sets == expected && brave && !cautious,
        || format!("sets: {sets:?}, brave {brave}, cautious {cautious}"),
    );
}

/// Three facts and one default: felines are docile unless known to be big.
fn feline_normal_program() -> DlProgram {
    let lit = |pred: &str, arg: &str| {
        PredicateLiteral::positive(
            Predicate(pred.to_string()),
            vec![Term::Const(ddl::kb::Individual::from(arg))],
        )
    };
    let var_lit = |pred: &str| {
        PredicateLiteral::positive(Predicate(pred.to_string()), vec![Term::Var("X".into())])
    };
    DlProgram {
        rules: vec![
            DlRule::fact(lit("feline", "a")),
            DlRule::fact(lit("feline", "b")),
            DlRule::fact(lit("big", "b")),
            DlRule {
                head: var_lit("docile"),
                positive: vec![BodyElem::Literal(var_lit("feline"))],
                negative: vec![BodyElem::Literal(var_lit("big"))],
                origin: RuleOrigin::Handwritten,
            },
        ],
        lambda: Vec::new(),
        constants: BTreeSet::new(),
    }
}

#[test]
fn criterion_05_normal_program_reduct() {
    let program = feline_normal_program();
    let gp = ground(&program).unwrap();
    let given = interp(&[
        ("feline", "a", true),
        ("feline", "b", true),
        ("big", "b", true),
        ("docile", "a", true),
    ]);

    let reduct = gelfond_lifschitz(&gp, &given).unwrap();
    let rendered: BTreeSet<String> = reduct
        .rules
        .iter()
        .map(|r| {
            let body: Vec<String> = r
                .positive
                .iter()
                .map(|e| match e {
                    ddl::engine::GroundBodyElem::Literal(l) => l.to_string(),
                    ddl::engine::GroundBodyElem::Dl(_) => unreachable!(),
                })
                .collect();
            format!("{} :- {}", r.head, body.join(", "))
        })
        .collect();
    let expected: BTreeSet<String> = [
        "feline(a) :- ",
        "feline(b) :- ",
        "big(b) :- ",
        "docile(a) :- feline(a)",
    ]
    .into_iter()
    .map(String::from)
    .collect();

    let kb = KnowledgeBase::new();
    let oracle = Oracle::internal();
    let ev = Evaluator::new(&oracle, &kb);
    let lm = least_model(&ev, &reduct).unwrap();
    let sets = strong_answer_sets(&ev, &program).unwrap();

    check(
        5,
        "the feline normal program's reduct, least model and unique answer set",
        rendered == expected && lm == LeastModel::Model(given.clone()) && sets == vec![given],
        || format!("reduct: {rendered:?}, least model: {lm:?}, answer sets: {sets:?}"),
    );
}

/// The cat dl-program: membership flows from the DL base through an update.
fn cat_dl_program() -> (KnowledgeBase, DlProgram) {
    let kb = parse_kb(
        "concept Cat, Feline, Big, Docile.\nindividual a, b.\n\
         tbox: {a} [= Cat.\ntbox: {b} [= Feline.\ntbox: {b} [= Big.\n",
    )
    .unwrap();
    let x = || Term::Var("X".into());
    let rules = vec![
        DlRule {
            head: PredicateLiteral::positive(Predicate("feline".into()), vec![x()]),
            positive: vec![BodyElem::Dl(DlAtom::new(
                Vec::new(),
                DlQuery::Concept(atom("Cat")),
                vec![x()],
            ))],
            negative: Vec::new(),
            origin: RuleOrigin::Handwritten,
        },
        DlRule {
            head: PredicateLiteral::positive(Predicate("docile".into()), vec![x()]),
            positive: vec![BodyElem::Dl(DlAtom::new(
                vec![UpdateSpec::Concept {
                    negated: false,
                    concept: atom("Feline"),
                    predicate: Predicate("feline".into()),
                }],
                DlQuery::Concept(atom("Feline")),
                vec![x()],
            ))],
            negative: vec![BodyElem::Dl(DlAtom::new(
                Vec::new(),
                DlQuery::Concept(atom("Big")),
                vec![x()],
            ))],
            origin: RuleOrigin::Handwritten,
        },
    ];
    let constants = kb.individuals.clone();
    (kb, DlProgram { rules, lambda: Vec::new(), constants })
}

#[test]
fn criterion_06_cat_dl_program() {
    let (kb, program) = cat_dl_program();
    let oracle = Oracle::internal();
    let ev = Evaluator::new(&oracle, &kb);

    let expected = interp(&[("feline", "a", true), ("docile", "a", true)]);
    let sets = strong_answer_sets(&ev, &program).unwrap();

    let gp = ground(&program).unwrap();
    let transform = strong_dl_transform(&ev, &gp, &expected).unwrap();
    let heads: BTreeSet<String> = transform.rules.iter().map(|r| r.head.to_string()).collect();
    let expected_heads: BTreeSet<String> =
        ["feline(a)", "feline(b)", "docile(a)"].into_iter().map(String::from).collect();

    check(
        6,
        "the cat dl-program has the unique answer set {feline(a), docile(a)} via a 3-rule transform",
        sets == vec![expected] && transform.rules.len() == 3 && heads == expected_heads,
        || format!("answer sets: {sets:?}, transform heads: {heads:?}"),
    );
}

#[test]
fn criterion_07_search_matches_brute_force() {
    let kb = KnowledgeBase::new();
    let oracle = Oracle::internal();
    let ev = Evaluator::new(&oracle, &kb);
    let mut mismatches = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = common::random_ground_program(&mut rng);
        let gp = ground(&program).unwrap();
        assert!(gp.herbrand_base.len() <= 14);
        let by_search = strong_answer_sets(&ev, &program).unwrap();
        let by_definition = common::brute_force_answer_sets(&gp);
        if by_search != by_definition {
            mismatches += 1;
            eprintln!("seed {seed}: search {by_search:?} vs definition {by_definition:?}");
        }
    }
    check(7, "answer-set search agrees with brute-force enumeration on 200 programs", mismatches == 0, || {
        format!("{mismatches} mismatches")
    });
}

#[test]
fn criterion_08_postulate_suites() {
    let oracle = Oracle::internal();
    let report = check_postulates(&oracle, 1, 100).unwrap();
    let summary = report
        .rational
        .iter()
        .chain(report.answer_set.iter())
        .map(|(n, c)| format!("{n} {}/{}", c.failures, c.checks))
        .collect::<Vec<_>>()
        .join(", ");
    let nonvacuous = report
        .rational
        .iter()
        .chain(report.answer_set.iter())
        .all(|(_, c)| c.checks > 0);
    check(
        8,
        "all twelve postulates hold over 100 seeded knowledge bases",
        report.total_failures() == 0 && nonvacuous,
        || format!("failures/checks: {summary}; details: {:#?}", report.failures),
    );
    println!("           postulate checks: {summary}");
}

#[test]
fn criterion_09_structural_invariants() {
    let oracle = Oracle::internal();
    for name in ["cat_tiger.kb", "bird_penguin.kb", "nominal_choice.kb", "empty_dbox.kb"] {
        let kb = fixture(name);
        let rkb = compute_ranking(&oracle, &kb).unwrap();

        for pair in rkb.exceptionality_seq.windows(2) {
            assert!(pair[1].is_subset(&pair[0]), "{name}: sequence not shrinking");
        }

        let program = compile(&rkb).unwrap();
        let exceptional_antecedents: BTreeSet<ConceptExpr> = rkb
            .rank
            .iter()
            .filter(|(_, r)| **r >= 1)
            .map(|(d, _)| d.antecedent.clone())
            .collect();
        assert_eq!(
            program.rules.len(),
            2 * rkb.dbox_star.len() + exceptional_antecedents.len(),
            "{name}: rule-count formula"
        );

        match ground(&program) {
            Ok(gp) => assert_eq!(
                gp.rules.len(),
                program.rules.len() * kb.individuals.len(),
                "{name}: grounding bound"
            ),
            Err(EngineError::EmptyUniverse) => {
                // a knowledge base without individuals has nothing to ground over
                assert!(kb.individuals.is_empty(), "{name}: unexpected empty universe");
            }
            Err(e) => panic!("{name}: {e}"),
        }
    }
    check(9, "rule-count, grounding-size and sequence-shrinking invariants on all fixtures", true, String::new);
}

#[test]
fn criterion_10_grounding_stays_polynomial() {
    // asymptotic complexity claims are not reproducible at desk scale; the
    // check kept here is that grounding grows as |rules| x |individuals|
    let kb = fixture("bird_penguin.kb");
    let (_, rkb) = ranked(&kb);
    let program = compile(&rkb).unwrap();
    let gp = ground(&program).unwrap();
    check(
        10,
        "grounding of the compiled program is bounded by rules x individuals",
        gp.rules.len() == program.rules.len() * kb.individuals.len(),
        || format!("{} ground rules from {} rules over {} individuals", gp.rules.len(), program.rules.len(), kb.individuals.len()),
    );
}
