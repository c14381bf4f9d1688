//! Tableau calculus for ALCO: ALC plus nominals, with general TBoxes.
//!
//! Axioms are absorbed where possible instead of being internalized as
//! disjunctions on every node: `A [= C` with atomic `A` becomes a label
//! trigger (when `A` enters a node's label, `C` follows), and `{a} [= C`
//! becomes an initial assertion on the root node for `a`. Remaining axioms
//! contribute the global constraint `!C | D` to every node. Disjunctions are
//! expanded with unit propagation and semantic branching: alternatives whose
//! complement is already present are dead, and each explored alternative
//! records the complements of the ones tried before it.
//!
//! Nominals are handled by a fixed set of root nodes, one per individual in
//! the input; a node whose label acquires `{a}` is merged into the root for
//! `a`. Subset anywhere-blocking on labels guarantees termination, and rules
//! fire in a fixed (node id, label) order so runs are reproducible.

use std::collections::{BTreeMap, BTreeSet};

use crate::kb::{Axiom, ConceptExpr, ConceptName, Individual, RoleName};

use super::OracleError;

/// Hard cap on rule applications across all branches of one query.
const STEP_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableauStats {
    pub steps: usize,
}

/// The TBox split into absorbed and internalized parts.
struct CompiledTbox {
    globals: Vec<ConceptExpr>,
    triggers: BTreeMap<ConceptName, Vec<ConceptExpr>>,
    assertions: BTreeMap<Individual, Vec<ConceptExpr>>,
}

fn compile_tbox(tbox: &BTreeSet<Axiom>) -> CompiledTbox {
    let mut globals = Vec::new();
    let mut triggers: BTreeMap<ConceptName, Vec<ConceptExpr>> = BTreeMap::new();
    let mut assertions: BTreeMap<Individual, Vec<ConceptExpr>> = BTreeMap::new();
    for ax in tbox {
        let (lhs, rhs) = match ax {
            Axiom::ConceptInclusion { lhs, rhs } => (lhs, rhs),
            other => {
                debug_assert!(false, "non-inclusion axiom reached the tableau: {other}");
                continue;
            }
        };
        match lhs {
            ConceptExpr::Atom(a) => triggers.entry(a.clone()).or_default().push(rhs.nnf()),
            ConceptExpr::Nominals(inds) if inds.len() == 1 => {
                assertions.entry(inds[0].clone()).or_default().push(rhs.nnf())
            }
            _ => {
                let constraint = ConceptExpr::or(vec![ConceptExpr::not(lhs.clone()), rhs.clone()]).nnf();
                if constraint != ConceptExpr::Top {
                    globals.push(constraint);
                }
            }
        }
    }
    globals.sort();
    globals.dedup();
    CompiledTbox { globals, triggers, assertions }
}

#[derive(Debug, Clone)]
struct Node {
    label: BTreeSet<ConceptExpr>,
    edges: BTreeMap<RoleName, BTreeSet<usize>>,
    /// Individuals this node stands for; empty for tree nodes.
    names: BTreeSet<Individual>,
    alive: bool,
}

#[derive(Debug, Clone)]
struct Forest {
    nodes: Vec<Node>,
    ind_node: BTreeMap<Individual, usize>,
}

#[derive(Debug)]
enum Action {
    Add { node: usize, concepts: Vec<ConceptExpr> },
    Merge { node: usize, individual: Individual },
    NewChild { node: usize, role: RoleName, concept: ConceptExpr },
    /// Open alternatives of a disjunction; alternative `k` is explored with
    /// the complements of alternatives `0..k` added alongside it. An empty
    /// list means every disjunct is dead and the branch is closed.
    BranchOr { node: usize, choices: Vec<ConceptExpr> },
    BranchNominal { node: usize, individuals: Vec<Individual> },
}

/// Satisfiability of `goal` w.r.t. an equality-expanded TBox of concept
/// inclusions. Callers guarantee the input lies in ALCO.
///
/// Roots and the goal node that can never interact (no chain of nominal
/// mentions connects them, and the shared globals and triggers mention no
/// individual at all) are independent: a model is the disjoint union of
/// models for each part. Checking them separately keeps branch choices in
/// unrelated parts from multiplying.
pub fn satisfiable(
    tbox: &BTreeSet<Axiom>,
    goal: &ConceptExpr,
) -> Result<(bool, TableauStats), OracleError> {
    let compiled = compile_tbox(tbox);
    let goal = goal.nnf();

    let mut shared: BTreeSet<Individual> = BTreeSet::new();
    for c in compiled.globals.iter().chain(compiled.triggers.values().flatten()) {
        collect_individuals(c, &mut shared);
    }

    let mut individuals: BTreeSet<Individual> = compiled.assertions.keys().cloned().collect();
    individuals.extend(shared.iter().cloned());
    for c in compiled.assertions.values().flatten().chain(std::iter::once(&goal)) {
        collect_individuals(c, &mut individuals);
    }
    let individuals: Vec<Individual> = individuals.into_iter().collect();
    let index_of = |ind: &Individual| individuals.iter().position(|i| i == ind).unwrap();

    // union-find over the roots plus one slot for the goal node
    let goal_slot = individuals.len();
    let mut parent: Vec<usize> = (0..=goal_slot).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    };
    let mentions_of = |c: &ConceptExpr| {
        let mut out = BTreeSet::new();
        collect_individuals(c, &mut out);
        out
    };
    for (slot, ind) in individuals.iter().enumerate() {
        for c in compiled.assertions.get(ind).into_iter().flatten() {
            for m in mentions_of(c) {
                union(&mut parent, slot, index_of(&m));
            }
        }
        // globals or triggers naming an individual couple every node with it
        if shared.contains(ind) {
            union(&mut parent, slot, goal_slot);
        }
    }
    for m in mentions_of(&goal) {
        union(&mut parent, goal_slot, index_of(&m));
    }
    if !shared.is_empty() {
        for slot in 0..individuals.len() {
            union(&mut parent, slot, goal_slot);
        }
    }

    let mut stats = TableauStats::default();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for slot in 0..=goal_slot {
        groups.entry(find(&mut parent, slot)).or_default().push(slot);
    }
    for (_, slots) in groups {
        let mut forest = Forest { nodes: Vec::new(), ind_node: BTreeMap::new() };
        for &slot in &slots {
            if slot == goal_slot {
                continue;
            }
            let ind = &individuals[slot];
            let mut label: BTreeSet<ConceptExpr> = compiled.globals.iter().cloned().collect();
            label.extend(compiled.assertions.get(ind).into_iter().flatten().cloned());
            let id = forest.nodes.len();
            forest.nodes.push(Node {
                label,
                edges: BTreeMap::new(),
                names: [ind.clone()].into_iter().collect(),
                alive: true,
            });
            forest.ind_node.insert(ind.clone(), id);
        }
        if slots.contains(&goal_slot) {
            let mut label: BTreeSet<ConceptExpr> = compiled.globals.iter().cloned().collect();
            label.insert(goal.clone());
            forest.nodes.push(Node {
                label,
                edges: BTreeMap::new(),
                names: BTreeSet::new(),
                alive: true,
            });
        }
        if !expand(forest, &compiled, &mut stats.steps)? {
            return Ok((false, stats));
        }
    }
    Ok((true, stats))
}

fn collect_individuals(c: &ConceptExpr, out: &mut BTreeSet<Individual>) {
    match c {
        ConceptExpr::Nominals(inds) => out.extend(inds.iter().cloned()),
        ConceptExpr::Not(c) => collect_individuals(c, out),
        ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
            cs.iter().for_each(|c| collect_individuals(c, out))
        }
        ConceptExpr::Exists(_, c)
        | ConceptExpr::Forall(_, c)
        | ConceptExpr::AtLeast(_, _, c)
        | ConceptExpr::AtMost(_, _, c) => collect_individuals(c, out),
        _ => {}
    }
}

fn expand(mut forest: Forest, compiled: &CompiledTbox, steps: &mut usize) -> Result<bool, OracleError> {
    loop {
        *steps += 1;
        if *steps > STEP_LIMIT {
            return Err(OracleError::SearchLimit);
        }
        if forest.has_clash() {
            return Ok(false);
        }
        match forest.next_action(compiled) {
            None => return Ok(true),
            Some(Action::Add { node, concepts }) => {
                forest.nodes[node].label.extend(concepts);
            }
            Some(Action::Merge { node, individual }) => {
                let target = forest.ind_node[&individual];
                forest.merge(node, target);
            }
            Some(Action::NewChild { node, role, concept }) => {
                let id = forest.nodes.len();
                let mut label: BTreeSet<ConceptExpr> = compiled.globals.iter().cloned().collect();
                label.insert(concept);
                forest.nodes.push(Node {
                    label,
                    edges: BTreeMap::new(),
                    names: BTreeSet::new(),
                    alive: true,
                });
                forest.nodes[node].edges.entry(role).or_default().insert(id);
            }
            Some(Action::BranchOr { node, choices }) => {
                let mut ruled_out: Vec<ConceptExpr> = Vec::new();
                for choice in choices {
                    let mut alt = forest.clone();
                    alt.nodes[node].label.insert(choice.clone());
                    alt.nodes[node].label.extend(ruled_out.iter().cloned());
                    if expand(alt, compiled, steps)? {
                        return Ok(true);
                    }
                    ruled_out.push(ConceptExpr::not(choice).nnf());
                }
                return Ok(false);
            }
            Some(Action::BranchNominal { node, individuals }) => {
                for ind in individuals {
                    let mut alt = forest.clone();
                    let target = alt.ind_node[&ind];
                    alt.merge(node, target);
                    if expand(alt, compiled, steps)? {
                        return Ok(true);
                    }
                }
                return Ok(false);
            }
        }
    }
}

impl Forest {
    fn has_clash(&self) -> bool {
        for node in self.nodes.iter().filter(|n| n.alive) {
            for c in &node.label {
                match c {
                    ConceptExpr::Bottom => return true,
                    ConceptExpr::Not(inner) => {
                        if node.label.contains(inner.as_ref()) {
                            return true;
                        }
                        if let ConceptExpr::Nominals(inds) = inner.as_ref() {
                            if inds.iter().any(|i| node.names.contains(i)) {
                                return true;
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        false
    }

    /// The first applicable rule in the fixed order: conjunctions and
    /// absorption triggers, nominal merges, universal propagation, then
    /// disjunctions (unit-propagated when one alternative survives) and
    /// existential expansion under blocking.
    fn next_action(&self, compiled: &CompiledTbox) -> Option<Action> {
        for (id, node) in self.alive() {
            for c in &node.label {
                match c {
                    ConceptExpr::And(cs) => {
                        let missing: Vec<ConceptExpr> =
                            cs.iter().filter(|c| !node.label.contains(*c)).cloned().collect();
                        if !missing.is_empty() {
                            return Some(Action::Add { node: id, concepts: missing });
                        }
                    }
                    ConceptExpr::Atom(a) => {
                        if let Some(implied) = compiled.triggers.get(a) {
                            let missing: Vec<ConceptExpr> = implied
                                .iter()
                                .filter(|c| !node.label.contains(*c))
                                .cloned()
                                .collect();
                            if !missing.is_empty() {
                                return Some(Action::Add { node: id, concepts: missing });
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        for (id, node) in self.alive() {
            for c in &node.label {
                if let ConceptExpr::Nominals(inds) = c {
                    if !inds.iter().any(|i| node.names.contains(i)) {
                        if inds.len() == 1 {
                            return Some(Action::Merge { node: id, individual: inds[0].clone() });
                        }
                        return Some(Action::BranchNominal { node: id, individuals: inds.clone() });
                    }
                }
            }
        }
        for (_, node) in self.alive() {
            for c in &node.label {
                if let ConceptExpr::Forall(role, body) = c {
                    let role = match role {
                        crate::kb::RoleExpr::Named(n) => n,
                        _ => continue,
                    };
                    if let Some(targets) = node.edges.get(role) {
                        for &t in targets {
                            if !self.nodes[t].label.contains(body.as_ref()) {
                                return Some(Action::Add { node: t, concepts: vec![(**body).clone()] });
                            }
                        }
                    }
                }
            }
        }
        for (id, node) in self.alive() {
            for c in &node.label {
                if let ConceptExpr::Or(cs) = c {
                    if cs.iter().any(|c| node.label.contains(c)) {
                        continue;
                    }
                    let open: Vec<ConceptExpr> = cs
                        .iter()
                        .filter(|c| !node.label.contains(&ConceptExpr::not((*c).clone()).nnf()))
                        .cloned()
                        .collect();
                    if open.len() == 1 {
                        return Some(Action::Add { node: id, concepts: open });
                    }
                    return Some(Action::BranchOr { node: id, choices: open });
                }
            }
        }
        for (id, node) in self.alive() {
            if self.blocked(id) {
                continue;
            }
            for c in &node.label {
                if let ConceptExpr::Exists(role, body) = c {
                    let role = match role {
                        crate::kb::RoleExpr::Named(n) => n,
                        _ => continue,
                    };
                    let witnessed = node
                        .edges
                        .get(role)
                        .map(|ts| ts.iter().any(|&t| self.nodes[t].label.contains(body.as_ref())))
                        .unwrap_or(false);
                    if !witnessed {
                        return Some(Action::NewChild {
                            node: id,
                            role: role.clone(),
                            concept: (**body).clone(),
                        });
                    }
                }
            }
        }
        None
    }

    fn alive(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.alive)
    }

    /// Subset anywhere-blocking: a tree node is blocked when an older alive
    /// node carries a superset label. Nodes standing for individuals are
    /// never blocked.
    fn blocked(&self, id: usize) -> bool {
        let node = &self.nodes[id];
        if !node.names.is_empty() {
            return false;
        }
        self.nodes[..id].iter().any(|other| other.alive && node.label.is_subset(&other.label))
    }

    /// Merges `from` into `to`: labels, names and edges are united and every
    /// edge pointing at `from` is redirected.
    fn merge(&mut self, from: usize, to: usize) {
        debug_assert!(from != to);
        let source = std::mem::replace(
            &mut self.nodes[from],
            Node { label: BTreeSet::new(), edges: BTreeMap::new(), names: BTreeSet::new(), alive: false },
        );
        let target = &mut self.nodes[to];
        target.label.extend(source.label);
        for (role, ts) in source.edges {
            target.edges.entry(role).or_default().extend(ts);
        }
        for name in &source.names {
            self.ind_node.insert(name.clone(), to);
        }
        self.nodes[to].names.extend(source.names);
        for node in self.nodes.iter_mut().filter(|n| n.alive) {
            for ts in node.edges.values_mut() {
                if ts.remove(&from) {
                    ts.insert(to);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::RoleExpr;

    fn atom(n: &str) -> ConceptExpr {
        ConceptExpr::atom(n)
    }

    fn incl(lhs: ConceptExpr, rhs: ConceptExpr) -> Axiom {
        Axiom::inclusion(lhs, rhs)
    }

    fn sat(tbox: &[Axiom], c: &ConceptExpr) -> bool {
        let tbox: BTreeSet<Axiom> = tbox.iter().cloned().collect();
        satisfiable(&tbox, c).unwrap().0
    }

    #[test]
    fn top_is_satisfiable_in_empty_theory() {
        assert!(sat(&[], &ConceptExpr::Top));
    }

    #[test]
    fn bottom_is_unsatisfiable() {
        assert!(!sat(&[], &ConceptExpr::Bottom));
    }

    #[test]
    fn contradictory_nominal_axioms_close() {
        // {a} [= C and {a} [= !C leave no model, whatever the goal
        let tbox = [
            incl(ConceptExpr::nominal("a"), atom("C")),
            incl(ConceptExpr::nominal("a"), ConceptExpr::not(atom("C"))),
        ];
        assert!(!sat(&tbox, &ConceptExpr::Top));
    }

    #[test]
    fn existential_chain_subsumption() {
        // {A [= exists R . B, B [= C} entails A [= exists R . C
        let tbox = [
            incl(atom("A"), ConceptExpr::exists(RoleExpr::named("R"), atom("B"))),
            incl(atom("B"), atom("C")),
        ];
        let counterexample = ConceptExpr::And(vec![
            atom("A"),
            ConceptExpr::not(ConceptExpr::exists(RoleExpr::named("R"), atom("C"))),
        ]);
        assert!(!sat(&tbox, &counterexample));
    }

    #[test]
    fn blocking_terminates_cyclic_tbox() {
        // A [= exists R . A loops forever without blocking
        let tbox = [incl(atom("A"), ConceptExpr::exists(RoleExpr::named("R"), atom("A")))];
        assert!(sat(&tbox, &atom("A")));
    }

    #[test]
    fn internalized_complex_lhs_still_applies() {
        // (exists R . TOP) [= A cannot be absorbed; check it still constrains
        let tbox = [
            incl(ConceptExpr::exists(RoleExpr::named("R"), ConceptExpr::Top), atom("A")),
        ];
        let counterexample = ConceptExpr::And(vec![
            ConceptExpr::exists(RoleExpr::named("R"), ConceptExpr::Top),
            ConceptExpr::not(atom("A")),
        ]);
        assert!(!sat(&tbox, &counterexample));
    }

    #[test]
    fn negated_atom_lhs_is_internalized() {
        // !A [= B forces A | B everywhere
        let tbox = [incl(ConceptExpr::not(atom("A")), atom("B"))];
        let both_false = ConceptExpr::And(vec![
            ConceptExpr::not(atom("A")),
            ConceptExpr::not(atom("B")),
        ]);
        assert!(!sat(&tbox, &both_false));
        assert!(sat(&tbox, &ConceptExpr::not(atom("A"))));
    }

    #[test]
    fn nominal_edge_propagates_universals() {
        // {a} [= exists R . {b}, {a} [= forall R . C entail C at b
        let tbox = [
            incl(
                ConceptExpr::nominal("a"),
                ConceptExpr::exists(RoleExpr::named("R"), ConceptExpr::nominal("b")),
            ),
            incl(
                ConceptExpr::nominal("a"),
                ConceptExpr::forall(RoleExpr::named("R"), atom("C")),
            ),
        ];
        let counterexample = ConceptExpr::And(vec![
            ConceptExpr::nominal("b"),
            ConceptExpr::not(atom("C")),
        ]);
        assert!(!sat(&tbox, &counterexample));
    }

    #[test]
    fn forced_individual_identity_merges_roots() {
        // {a} [= {b} together with {a} [= C, {b} [= !C is inconsistent
        let tbox = [
            incl(ConceptExpr::nominal("a"), ConceptExpr::nominal("b")),
            incl(ConceptExpr::nominal("a"), atom("C")),
            incl(ConceptExpr::nominal("b"), ConceptExpr::not(atom("C"))),
        ];
        assert!(!sat(&tbox, &ConceptExpr::Top));
    }

    #[test]
    fn nominal_set_choice_branches() {
        // {a,b} membership forces one of two identities; only b survives
        let tbox = [
            incl(atom("D"), ConceptExpr::nominals(vec!["a".into(), "b".into()])),
            incl(ConceptExpr::nominal("a"), ConceptExpr::not(atom("D"))),
        ];
        assert!(sat(&tbox, &atom("D")));
        let tbox2 = [
            incl(atom("D"), ConceptExpr::nominals(vec!["a".into(), "b".into()])),
            incl(ConceptExpr::nominal("a"), ConceptExpr::not(atom("D"))),
            incl(ConceptExpr::nominal("b"), ConceptExpr::not(atom("D"))),
        ];
        assert!(!sat(&tbox2, &atom("D")));
    }

    #[test]
    fn definitional_equality_reasons_both_ways() {
        // Preyins == forall Prey . I & exists Prey . TOP, expanded to the two
        // inclusions, must push membership in both directions
        let def = ConceptExpr::and(vec![
            ConceptExpr::forall(RoleExpr::named("Prey"), atom("I")),
            ConceptExpr::exists(RoleExpr::named("Prey"), ConceptExpr::Top),
        ]);
        let tbox = [
            incl(atom("Preyins"), def.clone()),
            incl(def, atom("Preyins")),
            incl(atom("I"), ConceptExpr::not(atom("Fi"))),
            incl(atom("Preyfish"), ConceptExpr::and(vec![
                ConceptExpr::forall(RoleExpr::named("Prey"), atom("Fi")),
                ConceptExpr::exists(RoleExpr::named("Prey"), ConceptExpr::Top),
            ])),
        ];
        // an insect eater provably eats no fish
        let both = ConceptExpr::And(vec![atom("Preyins"), atom("Preyfish")]);
        assert!(!sat(&tbox, &both));
        assert!(sat(&tbox, &atom("Preyins")));
    }
}
