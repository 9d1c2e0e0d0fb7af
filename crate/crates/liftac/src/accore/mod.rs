//! Product assurance cases: goals, strategies with provenance, the evidence
//! ledger, refinement checking and the supported predicate.

mod dot;
mod goal;
mod ledger;
mod predicates;
mod supp;
mod tree;
mod value;

use thiserror::Error;

use crate::analyses::AnalysisError;
use crate::featexpr::{Configuration, ExprError};
use crate::plmodel::ModelError;

pub use dot::{to_dot, Badge, DotGoal};
pub use goal::{schema, Goal, PredicateRef, PropositionRef, VarGoal};
pub use ledger::{goal_fingerprint, Claim, EvidenceKind, EvidenceRecord, Ledger, LedgerEntry};
pub use predicates::eval_pred;
pub use supp::{check_refinement, refresh, supp, Env};
pub use tree::{Ac, Body, Node, Provenance, Strategy, VarAc};
pub use value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("schema `{schema}` takes {expected} parameters, got {got}")]
    Arity {
        schema: String,
        expected: usize,
        got: usize,
    },
    #[error("ill-typed parameters in {0}")]
    BadParams(String),
    #[error("{pred} cannot be evaluated on {subject}")]
    NotEvaluable { pred: String, subject: String },
    #[error("presence condition {pc} does not hold under {config}")]
    NotPresent { pc: String, config: Configuration },
    #[error("evidence `{0}` has no ledger record")]
    DanglingEvidence(String),
    #[error("node id `{0}` occurs twice")]
    DuplicateNode(String),
    #[error("decomposition at `{0}` has no children")]
    EmptyDecomposition(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("template `{template}` does not apply to goals with predicate `{schema}`")]
    SchemaMismatch { template: String, schema: String },
    #[error("input does not satisfy the correctness criterion of `{0}`")]
    Correctness(String),
    #[error("correctness criterion of `{template}` fails under {config}")]
    VarCorrectness {
        template: String,
        config: Configuration,
    },
    #[error("malformed input for `{template}`: {reason}")]
    BadInput { template: String, reason: String },
    #[error("instantiation of `{0}` yields no subgoals")]
    EmptyInstantiation(String),
    #[error("no node `{0}`")]
    NoSuchNode(String),
}
