//! Defeasible description-logic toolkit.
//!
//! The pipeline has three stages:
//!
//! 1. **Ranking** ([`ranking`]): defeasible concept inclusions `C ~[= D` are
//!    ranked by exceptionality (rational closure). Axioms that are exceptional
//!    at every level are promoted to strict inclusions.
//! 2. **Compilation** ([`compiler`]): the ranked knowledge base is compiled
//!    into a dl-program, a set of rules whose bodies may query the DL base
//!    through `DL[...]` atoms with an update list feeding derived literals
//!    back into the base.
//! 3. **Evaluation** ([`engine`]): strong answer sets of the dl-program are
//!    enumerated, and cautious/brave consequences computed.
//!
//! Classical entailment is decided by the [`tableau`] module, either with the
//! built-in calculus for the ALCO fragment or through an external reasoner
//! process.

pub mod cli;
pub mod compiler;
pub mod engine;
pub mod kb;
pub mod postulates;
pub mod program;
pub mod ranking;
pub mod tableau;

pub use kb::{Axiom, ConceptExpr, DefeasibleAxiom, KnowledgeBase, RoleExpr};
pub use program::DlProgram;
pub use ranking::RankedKb;
pub use tableau::Oracle;
