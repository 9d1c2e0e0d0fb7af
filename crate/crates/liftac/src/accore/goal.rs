//! Goals, predicate and proposition references, and the schema registry.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AcError, Value};
use crate::analyses::{PropertySpec, Query, AFTER_ACTION_CHECK, QUERY, RESPONSE_CHECK};
use crate::featexpr::{Configuration, FeatureExpr};

pub mod schema {
    pub const FORALL_P: &str = "ForallP";
    pub const FORALL_STATES: &str = "ForallStates";
    pub const RESPONDS: &str = "Responds";
    pub const AFTER_SAFE: &str = "AfterSafe";
    pub const SATISFIES: &str = "Satisfies";
    pub const RESULT_OK: &str = "ResultOk";
    pub const AT_MOST: &str = "AtMost";
    pub const IS_EVEN: &str = "IsEven";

    pub const SPEC_ADEQUATE: &str = "SpecAdequate";
    pub const QUERY_ADEQUATE: &str = "QueryAdequate";
    pub const ANALYSIS_SOUND: &str = "AnalysisSound";
    pub const LIFT_CORRECT: &str = "LiftCorrect";

    /// Predicate schemas with their parameter counts.
    pub const PREDICATES: &[(&str, usize)] = &[
        (FORALL_P, 1),
        (FORALL_STATES, 2),
        (RESPONDS, 1),
        (AFTER_SAFE, 1),
        (SATISFIES, 1),
        (RESULT_OK, 0),
        (AT_MOST, 1),
        (IS_EVEN, 0),
    ];

    pub const PROPOSITIONS: &[(&str, usize)] = &[
        (SPEC_ADEQUATE, 3),
        (QUERY_ADEQUATE, 2),
        (ANALYSIS_SOUND, 1),
        (LIFT_CORRECT, 1),
    ];
}

fn check_arity(table: &[(&str, usize)], name: &str, got: usize) -> Result<(), AcError> {
    match table.iter().find(|(s, _)| *s == name) {
        None => Err(AcError::UnknownSchema(name.to_string())),
        Some((_, n)) if *n != got => Err(AcError::Arity {
            schema: name.to_string(),
            expected: *n,
            got,
        }),
        Some(_) => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PredicateRef {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<Value>,
}

impl PredicateRef {
    pub fn new(schema: &str, params: Vec<Value>) -> Self {
        PredicateRef {
            schema: schema.to_string(),
            params,
        }
    }

    pub fn forall(inner: PredicateRef) -> Self {
        Self::new(schema::FORALL_P, vec![Value::Pred(inner)])
    }

    /// Every state selected by `q` satisfies `inner`.
    pub fn forall_states(q: Query, inner: PredicateRef) -> Self {
        Self::new(
            schema::FORALL_STATES,
            vec![Value::Query(q), Value::Pred(inner)],
        )
    }

    /// Every visit of the subject state is eventually followed by a state labelled `safe`.
    pub fn responds(safe: &str) -> Self {
        Self::new(schema::RESPONDS, vec![Value::Text(safe.to_string())])
    }

    /// No state labelled `forbidden` directly follows the subject action.
    pub fn after_safe(forbidden: &str) -> Self {
        Self::new(schema::AFTER_SAFE, vec![Value::Text(forbidden.to_string())])
    }

    pub fn satisfies(spec: PropertySpec) -> Self {
        Self::new(schema::SATISFIES, vec![Value::Spec(spec)])
    }

    pub fn result_ok() -> Self {
        Self::new(schema::RESULT_OK, vec![])
    }

    pub fn at_most(k: i64) -> Self {
        Self::new(schema::AT_MOST, vec![Value::Int(k)])
    }

    pub fn is_even() -> Self {
        Self::new(schema::IS_EVEN, vec![])
    }

    pub fn validate(&self) -> Result<(), AcError> {
        check_arity(schema::PREDICATES, &self.schema, self.params.len())?;
        let bad = || AcError::BadParams(self.to_string());
        match self.schema.as_str() {
            schema::FORALL_P => self.inner().ok_or_else(bad)?.validate(),
            schema::FORALL_STATES => match &self.params[0] {
                Value::Query(_) => self.inner().ok_or_else(bad)?.validate(),
                _ => Err(bad()),
            },
            schema::RESPONDS | schema::AFTER_SAFE => self.text(0).map(|_| ()).ok_or_else(bad),
            schema::SATISFIES => matches!(self.params[0], Value::Spec(_))
                .then_some(())
                .ok_or_else(bad),
            schema::AT_MOST => matches!(self.params[0], Value::Int(_))
                .then_some(())
                .ok_or_else(bad),
            _ => Ok(()),
        }
    }

    /// The nested predicate of `ForallP` and `ForallStates`.
    pub fn inner(&self) -> Option<&PredicateRef> {
        match (self.schema.as_str(), self.params.last()) {
            (schema::FORALL_P | schema::FORALL_STATES, Some(Value::Pred(p))) => Some(p),
            _ => None,
        }
    }

    pub fn query(&self) -> Option<&Query> {
        match (self.schema.as_str(), self.params.first()) {
            (schema::FORALL_STATES, Some(Value::Query(q))) => Some(q),
            _ => None,
        }
    }

    fn text(&self, i: usize) -> Option<&str> {
        match self.params.get(i) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    /// The temporal property this predicate asserts of a state (`elem`) or
    /// of a whole model (`elem` empty), if it has one.
    pub fn formalize(&self, elem: &str) -> Option<PropertySpec> {
        match self.schema.as_str() {
            schema::RESPONDS if !elem.is_empty() => {
                Some(PropertySpec::response(elem, self.text(0)?))
            }
            schema::AFTER_SAFE if !elem.is_empty() => {
                Some(PropertySpec::after_action(elem, self.text(0)?))
            }
            schema::SATISFIES if elem.is_empty() => match &self.params[0] {
                Value::Spec(s) => Some(s.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    pub(crate) fn rewrite(&self, f: &dyn Fn(Value) -> Value) -> PredicateRef {
        PredicateRef {
            schema: self.schema.clone(),
            params: self.params.iter().map(|p| p.rewrite(f)).collect(),
        }
    }

    pub fn derive(&self, c: &Configuration) -> PredicateRef {
        PredicateRef {
            schema: self.schema.clone(),
            params: self.params.iter().map(|p| p.derive(c)).collect(),
        }
    }
}

impl fmt::Display for PredicateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.schema)?;
        if !self.params.is_empty() {
            write!(f, "[")?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                match p {
                    Value::Text(s) => write!(f, "{s}")?,
                    other => write!(f, "{other}")?,
                }
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// A model-independent claim, such as the soundness of an analysis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PropositionRef {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<Value>,
}

impl PropositionRef {
    pub fn new(schema: &str, params: Vec<Value>) -> Self {
        PropositionRef {
            schema: schema.to_string(),
            params,
        }
    }

    /// `spec` formalizes `pred` for the element `elem` (empty for a model-level predicate).
    pub fn spec_adequate(spec: PropertySpec, pred: PredicateRef, elem: &str) -> Self {
        Self::new(
            schema::SPEC_ADEQUATE,
            vec![
                Value::Spec(spec),
                Value::Pred(pred),
                Value::Text(elem.to_string()),
            ],
        )
    }

    /// `q` selects exactly the states that `parent` quantifies over.
    pub fn query_adequate(q: Query, parent: PredicateRef) -> Self {
        Self::new(
            schema::QUERY_ADEQUATE,
            vec![Value::Query(q), Value::Pred(parent)],
        )
    }

    pub fn analysis_sound(analysis: &str) -> Self {
        Self::new(
            schema::ANALYSIS_SOUND,
            vec![Value::Text(analysis.to_string())],
        )
    }

    pub fn lift_correct(analysis: &str) -> Self {
        Self::new(
            schema::LIFT_CORRECT,
            vec![Value::Text(analysis.to_string())],
        )
    }

    pub fn validate(&self) -> Result<(), AcError> {
        check_arity(schema::PROPOSITIONS, &self.schema, self.params.len())
    }

    /// Decides propositions that are checkable from their parameters alone.
    pub fn holds(&self) -> Result<bool, AcError> {
        self.validate()?;
        let p = &self.params;
        Ok(match self.schema.as_str() {
            schema::SPEC_ADEQUATE => match (&p[0], &p[1], &p[2]) {
                (Value::Spec(s), Value::Pred(pred), Value::Text(elem)) => {
                    pred.formalize(elem).as_ref() == Some(s)
                }
                _ => false,
            },
            schema::QUERY_ADEQUATE => match (&p[0], &p[1]) {
                (Value::Query(q), Value::Pred(parent)) => parent.query() == Some(q),
                _ => false,
            },
            _ => {
                matches!(&p[0], Value::Text(a) if [QUERY, RESPONSE_CHECK, AFTER_ACTION_CHECK].contains(&a.as_str()))
            }
        })
    }
}

impl fmt::Display for PropositionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            PredicateRef {
                schema: self.schema.clone(),
                params: self.params.clone()
            }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Goal {
    Prop { prop: PropositionRef },
    Pred { subject: Value, pred: PredicateRef },
}

impl Goal {
    pub fn prop(prop: PropositionRef) -> Self {
        Goal::Prop { prop }
    }

    pub fn pred(subject: Value, pred: PredicateRef) -> Self {
        Goal::Pred { subject, pred }
    }

    pub fn is_prop(&self) -> bool {
        matches!(self, Goal::Prop { .. })
    }

    pub fn subject(&self) -> Option<&Value> {
        match self {
            Goal::Pred { subject, .. } => Some(subject),
            Goal::Prop { .. } => None,
        }
    }

    pub fn predicate(&self) -> Option<&PredicateRef> {
        match self {
            Goal::Pred { pred, .. } => Some(pred),
            Goal::Prop { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), AcError> {
        match self {
            Goal::Prop { prop } => prop.validate(),
            Goal::Pred { pred, .. } => pred.validate(),
        }
    }

    /// Applies `f` to every value in the goal, including parameters.
    pub fn map_values(&self, f: &dyn Fn(&Value) -> Value) -> Goal {
        let params = |ps: &[Value]| ps.iter().map(f).collect::<Vec<_>>();
        match self {
            Goal::Prop { prop } => Goal::Prop {
                prop: PropositionRef {
                    schema: prop.schema.clone(),
                    params: params(&prop.params),
                },
            },
            Goal::Pred { subject, pred } => Goal::Pred {
                subject: f(subject),
                pred: PredicateRef {
                    schema: pred.schema.clone(),
                    params: params(&pred.params),
                },
            },
        }
    }

    pub fn derive(&self, c: &Configuration) -> Goal {
        self.map_values(&|v| v.derive(c))
    }

    pub fn match_key(&self) -> Goal {
        self.map_values(&Value::match_key)
    }

    pub fn models(&self) -> std::collections::BTreeSet<crate::plmodel::ModelRef> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_values(&mut |v| out.extend(v.refs()));
        out
    }

    fn visit_values(&self, f: &mut dyn FnMut(&Value)) {
        match self {
            Goal::Prop { prop } => prop.params.iter().for_each(f),
            Goal::Pred { subject, pred } => {
                f(subject);
                pred.params.iter().for_each(f);
            }
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Prop { prop } => write!(f, "{prop}"),
            Goal::Pred { subject, pred } => write!(f, "⟨{subject}, {pred}⟩"),
        }
    }
}

/// A goal with a presence condition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarGoal {
    #[serde(flatten)]
    pub goal: Goal,
    #[serde(default = "always")]
    pub pc: FeatureExpr,
}

fn always() -> FeatureExpr {
    FeatureExpr::True
}

impl VarGoal {
    pub fn new(goal: Goal, pc: FeatureExpr) -> Self {
        VarGoal { goal, pc }
    }

    /// The product goal under `c`; fails when `c` does not satisfy the presence condition.
    pub fn derive(&self, c: &Configuration) -> Result<Goal, AcError> {
        if !self.pc.eval(c) {
            return Err(AcError::NotPresent {
                pc: self.pc.to_string(),
                config: c.clone(),
            });
        }
        Ok(self.goal.derive(c))
    }
}

impl fmt::Display for VarGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.goal, self.pc)
    }
}
