//! Concept and role expressions, with negation normal form.

use super::{ConceptName, Individual, RoleName};

/// A concept description.
///
/// `Nominals` is the enumerated concept `{a1,...,an}` (non-empty, sorted,
/// duplicate-free). `And`/`Or` carry at least two children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atom(ConceptName),
    Nominals(Vec<Individual>),
    Not(Box<ConceptExpr>),
    And(Vec<ConceptExpr>),
    Or(Vec<ConceptExpr>),
    Exists(RoleExpr, Box<ConceptExpr>),
    Forall(RoleExpr, Box<ConceptExpr>),
    AtLeast(u32, RoleExpr, Box<ConceptExpr>),
    AtMost(u32, RoleExpr, Box<ConceptExpr>),
    SelfRestriction(RoleExpr),
}

/// A role expression. `Chain` is only legal on the left of a role inclusion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleExpr {
    Named(RoleName),
    Inverse(RoleName),
    Universal,
    Chain(Vec<RoleExpr>),
}

impl RoleExpr {
    pub fn named(name: impl Into<String>) -> Self {
        RoleExpr::Named(RoleName::new(name))
    }

    /// Inverts a role; the inverse of an inverse is the named role.
    pub fn inverse_of(role: RoleExpr) -> Self {
        match role {
            RoleExpr::Named(n) => RoleExpr::Inverse(n),
            RoleExpr::Inverse(n) => RoleExpr::Named(n),
            other => other,
        }
    }

    pub fn is_named(&self) -> bool {
        matches!(self, RoleExpr::Named(_))
    }
}

impl ConceptExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ConceptExpr::Atom(ConceptName::new(name))
    }

    pub fn nominal(ind: impl Into<String>) -> Self {
        ConceptExpr::Nominals(vec![Individual::new(ind)])
    }

    /// Builds `{a1,...,an}`, sorting and deduplicating the list.
    pub fn nominals<I: IntoIterator<Item = Individual>>(inds: I) -> Self {
        let mut v: Vec<Individual> = inds.into_iter().collect();
        v.sort();
        v.dedup();
        assert!(!v.is_empty(), "nominal set must be non-empty");
        ConceptExpr::Nominals(v)
    }

    // constructor named after the variant, like the others; it takes the
    // child rather than self, so it cannot shadow `std::ops::Not`
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    pub fn and(cs: Vec<ConceptExpr>) -> Self {
        assert!(cs.len() >= 2, "conjunction needs at least two children");
        ConceptExpr::And(cs)
    }

    pub fn or(cs: Vec<ConceptExpr>) -> Self {
        assert!(cs.len() >= 2, "disjunction needs at least two children");
        ConceptExpr::Or(cs)
    }

    pub fn exists(role: RoleExpr, c: ConceptExpr) -> Self {
        ConceptExpr::Exists(role, Box::new(c))
    }

    pub fn forall(role: RoleExpr, c: ConceptExpr) -> Self {
        ConceptExpr::Forall(role, Box::new(c))
    }

    /// `⊓` over a set of concepts; the empty conjunction is `TOP`.
    pub fn intersection_of(mut cs: Vec<ConceptExpr>) -> Self {
        cs.sort();
        cs.dedup();
        match cs.len() {
            0 => ConceptExpr::Top,
            1 => cs.pop().unwrap(),
            _ => ConceptExpr::And(cs),
        }
    }

    /// `⊔` over a set of concepts; the empty disjunction is `BOT`.
    pub fn union_of(mut cs: Vec<ConceptExpr>) -> Self {
        cs.sort();
        cs.dedup();
        match cs.len() {
            0 => ConceptExpr::Bottom,
            1 => cs.pop().unwrap(),
            _ => ConceptExpr::Or(cs),
        }
    }

    /// True when the expression may appear on a side of a defeasible axiom:
    /// an atom, a negated atom, `TOP` or `BOT`. Complex bodies are named via
    /// concept equalities instead.
    pub fn is_defeasible_side(&self) -> bool {
        match self {
            ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Atom(_) => true,
            ConceptExpr::Not(inner) => matches!(**inner, ConceptExpr::Atom(_)),
            _ => false,
        }
    }

    /// Negation normal form: `Not` ends up directly above atoms, nominal sets
    /// or self-restrictions, double negations disappear, and conjunctions and
    /// disjunctions are flattened with `TOP`/`BOT` units absorbed.
    pub fn nnf(&self) -> ConceptExpr {
        match self {
            ConceptExpr::Top
            | ConceptExpr::Bottom
            | ConceptExpr::Atom(_)
            | ConceptExpr::Nominals(_)
            | ConceptExpr::SelfRestriction(_) => self.clone(),
            ConceptExpr::Not(c) => c.nnf_negated(),
            ConceptExpr::And(cs) => {
                Self::normalize_junction(cs.iter().map(|c| c.nnf()).collect(), true)
            }
            ConceptExpr::Or(cs) => {
                Self::normalize_junction(cs.iter().map(|c| c.nnf()).collect(), false)
            }
            ConceptExpr::Exists(r, c) => ConceptExpr::Exists(r.clone(), Box::new(c.nnf())),
            ConceptExpr::Forall(r, c) => ConceptExpr::Forall(r.clone(), Box::new(c.nnf())),
            ConceptExpr::AtLeast(n, r, c) => ConceptExpr::AtLeast(*n, r.clone(), Box::new(c.nnf())),
            ConceptExpr::AtMost(n, r, c) => ConceptExpr::AtMost(*n, r.clone(), Box::new(c.nnf())),
        }
    }

    fn nnf_negated(&self) -> ConceptExpr {
        match self {
            ConceptExpr::Top => ConceptExpr::Bottom,
            ConceptExpr::Bottom => ConceptExpr::Top,
            ConceptExpr::Atom(_) | ConceptExpr::Nominals(_) | ConceptExpr::SelfRestriction(_) => {
                ConceptExpr::Not(Box::new(self.clone()))
            }
            ConceptExpr::Not(c) => c.nnf(),
            ConceptExpr::And(cs) => {
                Self::normalize_junction(cs.iter().map(|c| c.nnf_negated()).collect(), false)
            }
            ConceptExpr::Or(cs) => {
                Self::normalize_junction(cs.iter().map(|c| c.nnf_negated()).collect(), true)
            }
            ConceptExpr::Exists(r, c) => ConceptExpr::Forall(r.clone(), Box::new(c.nnf_negated())),
            ConceptExpr::Forall(r, c) => ConceptExpr::Exists(r.clone(), Box::new(c.nnf_negated())),
            // ¬(≥n R.C) is ≤(n-1) R.C; ≥0 holds everywhere, so its negation is BOT.
            ConceptExpr::AtLeast(0, _, _) => ConceptExpr::Bottom,
            ConceptExpr::AtLeast(n, r, c) => ConceptExpr::AtMost(n - 1, r.clone(), Box::new(c.nnf())),
            ConceptExpr::AtMost(n, r, c) => ConceptExpr::AtLeast(n + 1, r.clone(), Box::new(c.nnf())),
        }
    }

    /// Flattens nested conjunctions (`and == true`) or disjunctions, dropping
    /// the unit element and short-circuiting on the absorbing one.
    fn normalize_junction(children: Vec<ConceptExpr>, and: bool) -> ConceptExpr {
        let mut flat = Vec::new();
        for c in children {
            match (and, c) {
                (true, ConceptExpr::And(inner)) | (false, ConceptExpr::Or(inner)) => {
                    flat.extend(inner)
                }
                (true, ConceptExpr::Top) | (false, ConceptExpr::Bottom) => {}
                (true, ConceptExpr::Bottom) => return ConceptExpr::Bottom,
                (false, ConceptExpr::Top) => return ConceptExpr::Top,
                (_, c) => flat.push(c),
            }
        }
        if and {
            ConceptExpr::intersection_of(flat)
        } else {
            ConceptExpr::union_of(flat)
        }
    }
}
