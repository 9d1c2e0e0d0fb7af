//! Product-level and family-based analyses: state queries, response checks
//! and after-action safety checks over LTSs and FTSs.
//!
//! An atomic proposition `l` holds in a state when `l` is one of its labels
//! or `l` is its id. Maximal executions include finite paths that end in a
//! deadlocked state.

mod lifted;
mod product;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::featexpr::ExprError;
use crate::plmodel::{ExplicitPL, ModelError, State};

pub use lifted::{
    check_after_action_fts, check_fts, check_fts_in, check_response_fts, query_fts, query_fts_in,
    reach_fts, violation_bits,
};
pub use product::{check_after_action_lts, check_lts, check_response_lts, query_lts, replays};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("no configuration satisfies the feature model and the restriction")]
    EmptyDomain,
    #[error("cannot parse `{0}`")]
    Syntax(String),
}

/// Analysis ids used in goals and ledger entries.
pub const QUERY: &str = "query";
pub const RESPONSE_CHECK: &str = "response-check";
pub const AFTER_ACTION_CHECK: &str = "after-action-check";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Query {
    HasLabel { label: String },
    NamePrefix { prefix: String },
}

impl Query {
    pub fn has_label(l: &str) -> Self {
        Query::HasLabel {
            label: l.to_string(),
        }
    }

    pub fn name_prefix(p: &str) -> Self {
        Query::NamePrefix {
            prefix: p.to_string(),
        }
    }

    pub fn matches(&self, s: &State) -> bool {
        match self {
            Query::HasLabel { label } => s.labels.contains(label),
            Query::NamePrefix { prefix } => s.id.starts_with(prefix.as_str()),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::HasLabel { label } => write!(f, "label:{label}"),
            Query::NamePrefix { prefix } => write!(f, "prefix:{prefix}"),
        }
    }
}

impl FromStr for Query {
    type Err = AnalysisError;

    /// `label:L` or `prefix:P`, optionally preceded by `query `.
    fn from_str(s: &str) -> Result<Self, AnalysisError> {
        let t = s.trim();
        let t = t.strip_prefix("query").map(str::trim_start).unwrap_or(t);
        let bad = || AnalysisError::Syntax(s.to_string());
        let (kind, arg) = t.split_once(':').ok_or_else(bad)?;
        let arg = arg.trim();
        if arg.is_empty() {
            return Err(bad());
        }
        match kind.trim() {
            "label" => Ok(Query::has_label(arg)),
            "prefix" => Ok(Query::name_prefix(arg)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum PropertySpec {
    /// Every trigger state is strictly later followed by a response state.
    Response { trigger: String, response: String },
    /// After an `action` transition, no successor satisfies `forbidden`.
    AfterActionSafe { action: String, forbidden: String },
}

impl PropertySpec {
    pub fn response(trigger: &str, response: &str) -> Self {
        PropertySpec::Response {
            trigger: trigger.into(),
            response: response.into(),
        }
    }

    pub fn after_action(action: &str, forbidden: &str) -> Self {
        PropertySpec::AfterActionSafe {
            action: action.into(),
            forbidden: forbidden.into(),
        }
    }

    pub fn analysis_id(&self) -> &'static str {
        match self {
            PropertySpec::Response { .. } => RESPONSE_CHECK,
            PropertySpec::AfterActionSafe { .. } => AFTER_ACTION_CHECK,
        }
    }
}

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertySpec::Response { trigger, response } => {
                write!(f, "response {trigger} => {response}")
            }
            PropertySpec::AfterActionSafe { action, forbidden } => {
                write!(f, "after-action {action} forbid {forbidden}")
            }
        }
    }
}

impl FromStr for PropertySpec {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, AnalysisError> {
        let bad = || AnalysisError::Syntax(s.to_string());
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["response", t, "=>", r] => Ok(PropertySpec::response(t, r)),
            ["after-action", a, "forbid", l] => Ok(PropertySpec::after_action(a, l)),
            _ => Err(bad()),
        }
    }
}

/// A path prefix, optionally closed into a lasso by `loop`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trace {
    pub stem: Vec<String>,
    #[serde(rename = "loop", default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Violation { witness: Trace },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

pub type VarVerdict = ExplicitPL<Verdict>;

pub(crate) fn holds(s: &State, prop: &str) -> bool {
    s.id == prop || s.labels.contains(prop)
}
