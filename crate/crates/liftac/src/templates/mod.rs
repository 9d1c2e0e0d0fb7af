//! Decomposition templates: a parent predicate schema, an instantiation
//! function producing subgoals from an input, and a correctness criterion
//! relating the input to the parent's subject.
//!
//! Built-ins: domain decomposition, enumeration, and the model-checking and
//! querying analytic templates.

mod lifted;

use std::collections::BTreeSet;

use crate::accore::{schema, Ac, AcError, Goal, PredicateRef, PropositionRef, Strategy, Value};
use crate::analyses::{
    check_lts, query_lts, PropertySpec, AFTER_ACTION_CHECK, QUERY, RESPONSE_CHECK,
};
use crate::plmodel::ModelStore;

pub use lifted::{lift_correctness_region, lift_instantiate, lift_instantiate_goals, run_lifted};

pub const DOMAIN_DECOMP: &str = "domain-decomp";
pub const ENUMERATION: &str = "enumeration";
pub const MODEL_CHECK: &str = "model-check";
pub const QUERY_TEMPLATE: &str = "query";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Template {
    pub id: &'static str,
    /// Predicate schemas of goals this template can decompose.
    pub parent_schemas: &'static [&'static str],
    pub analytic: bool,
    /// Whether the g_Y child is expected to be closed by evidence.
    pub evidence_producing_default: bool,
}

const REGISTRY: &[Template] = &[
    Template {
        id: DOMAIN_DECOMP,
        parent_schemas: &[schema::FORALL_P],
        analytic: false,
        evidence_producing_default: false,
    },
    Template {
        id: ENUMERATION,
        parent_schemas: &[schema::FORALL_P],
        analytic: false,
        evidence_producing_default: false,
    },
    Template {
        id: MODEL_CHECK,
        parent_schemas: &[schema::RESPONDS, schema::AFTER_SAFE, schema::SATISFIES],
        analytic: true,
        evidence_producing_default: true,
    },
    Template {
        id: QUERY_TEMPLATE,
        parent_schemas: &[schema::FORALL_STATES],
        analytic: true,
        evidence_producing_default: false,
    },
];

pub fn registry() -> &'static [Template] {
    REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static Template, AcError> {
    REGISTRY
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| AcError::UnknownTemplate(id.to_string()))
}

fn bad(t: &str, reason: &str) -> AcError {
    AcError::BadInput {
        template: t.to_string(),
        reason: reason.to_string(),
    }
}

/// Splits an analytic input into its model and its specification or query.
fn analytic_parts(x: &Value) -> Option<(&crate::plmodel::ModelRef, &Value)> {
    match x {
        Value::Tuple(xs) if xs.len() == 2 => match &xs[0] {
            Value::Model(r) => Some((r, &xs[1])),
            _ => None,
        },
        _ => None,
    }
}

/// The model a goal subject is about, for analytic templates.
fn subject_model(subject: &Value) -> Option<(&crate::plmodel::ModelRef, &str)> {
    match subject {
        Value::Model(r) => Some((r, "")),
        Value::Elem { model, id } => Some((model, id)),
        Value::Single { value, .. } => subject_model(value),
        _ => None,
    }
}

/// Runs a product analysis on its recorded input.
pub fn run_analysis(analysis: &str, input: &Value, store: &ModelStore) -> Result<Value, AcError> {
    let (r, arg) =
        analytic_parts(input).ok_or_else(|| bad(analysis, "expected (model, argument)"))?;
    let lts = store.resolve_lts(r)?;
    match (analysis, arg) {
        (QUERY, Value::Query(q)) => Ok(Value::set(
            query_lts(&lts, q).iter().map(|s| Value::elem(r, s)),
        )),
        (RESPONSE_CHECK | AFTER_ACTION_CHECK, Value::Spec(spec))
            if spec.analysis_id() == analysis =>
        {
            Ok(Value::Verdict(check_lts(&lts, spec)))
        }
        _ => Err(bad(analysis, "argument does not fit the analysis")),
    }
}

impl Template {
    /// The correctness criterion. Total: ill-shaped inputs are simply incorrect.
    pub fn correctness(&self, x: &Value, subject: &Value) -> bool {
        match self.id {
            DOMAIN_DECOMP => match (x, subject.as_set()) {
                (Value::Tuple(family), Some(s)) => {
                    let mut union = BTreeSet::new();
                    for xi in family {
                        match xi {
                            Value::Set(items) => union.extend(items.iter().cloned()),
                            _ => return false,
                        }
                    }
                    s.is_subset(&union)
                }
                _ => false,
            },
            ENUMERATION => matches!((x, subject.as_set()), (Value::Set(t), Some(s)) if t == s),
            MODEL_CHECK => match (analytic_parts(x), subject_model(subject)) {
                (Some((r, Value::Spec(_))), Some((m, _))) => r == m,
                _ => false,
            },
            QUERY_TEMPLATE => match (analytic_parts(x), subject) {
                (Some((r, Value::Query(_))), Value::Model(m)) => r == m,
                _ => false,
            },
            _ => false,
        }
    }

    fn check_parent<'a>(&self, parent: &'a Goal) -> Result<(&'a Value, &'a PredicateRef), AcError> {
        match parent {
            Goal::Pred { subject, pred } if self.parent_schemas.contains(&pred.schema.as_str()) => {
                Ok((subject, pred))
            }
            Goal::Pred { pred, .. } => Err(AcError::SchemaMismatch {
                template: self.id.to_string(),
                schema: pred.schema.clone(),
            }),
            Goal::Prop { prop } => Err(AcError::SchemaMismatch {
                template: self.id.to_string(),
                schema: prop.schema.clone(),
            }),
        }
    }

    /// The subgoals for input `x` under `parent`, in order. Analytic
    /// templates run their analysis and embed the output in g_Y.
    pub fn instantiate_goals(
        &self,
        x: &Value,
        parent: &Goal,
        store: &ModelStore,
    ) -> Result<Vec<Goal>, AcError> {
        let (subject, pred) = self.check_parent(parent)?;
        if !self.correctness(x, subject) {
            return Err(AcError::Correctness(self.id.to_string()));
        }
        let goals = match self.id {
            DOMAIN_DECOMP => {
                let Value::Tuple(family) = x else {
                    unreachable!("checked by correctness")
                };
                family
                    .iter()
                    .map(|xi| Goal::pred(xi.clone(), pred.clone()))
                    .collect()
            }
            ENUMERATION => {
                let inner = pred
                    .inner()
                    .ok_or_else(|| AcError::BadParams(pred.to_string()))?;
                let Value::Set(t) = x else {
                    unreachable!("checked by correctness")
                };
                t.iter()
                    .map(|xi| Goal::pred(xi.clone(), inner.clone()))
                    .collect()
            }
            MODEL_CHECK => {
                let (_, arg) = analytic_parts(x).expect("checked by correctness");
                let Value::Spec(spec) = arg else {
                    unreachable!()
                };
                let (_, elem) = subject_model(subject).expect("checked by correctness");
                analytic_goals(
                    spec.analysis_id(),
                    x,
                    spec_adequacy(spec, pred, elem),
                    run_analysis(spec.analysis_id(), x, store)?,
                    PredicateRef::result_ok(),
                )
            }
            QUERY_TEMPLATE => {
                let (_, Value::Query(q)) = analytic_parts(x).expect("checked by correctness")
                else {
                    unreachable!()
                };
                let inner = pred
                    .inner()
                    .ok_or_else(|| AcError::BadParams(pred.to_string()))?;
                let g_x = PropositionRef::query_adequate(q.clone(), pred.clone());
                analytic_goals(
                    QUERY,
                    x,
                    g_x,
                    run_analysis(QUERY, x, store)?,
                    PredicateRef::forall(inner.clone()),
                )
            }
            _ => unreachable!("registry ids"),
        };
        if goals.is_empty() {
            return Err(AcError::EmptyInstantiation(self.id.to_string()));
        }
        Ok(goals)
    }
}

fn spec_adequacy(spec: &PropertySpec, pred: &PredicateRef, elem: &str) -> PropositionRef {
    PropositionRef::spec_adequate(spec.clone(), pred.clone(), elem)
}

/// g_X, g_Y and g_f of an analytic template.
fn analytic_goals(
    analysis: &str,
    x: &Value,
    g_x: PropositionRef,
    output: Value,
    p_y: PredicateRef,
) -> Vec<Goal> {
    vec![
        Goal::prop(g_x),
        Goal::pred(Value::output(analysis, x.clone(), output), p_y),
        Goal::prop(PropositionRef::analysis_sound(analysis)),
    ]
}

/// Decomposes `parent` with a template, producing undeveloped children
/// with ids `<parent>.<k>`.
pub fn instantiate(
    template: &str,
    x: &Value,
    parent_id: &str,
    parent: &Goal,
    label: &str,
    store: &ModelStore,
) -> Result<Ac, AcError> {
    let t = lookup(template)?;
    let goals = t.instantiate_goals(x, parent, store)?;
    let children = goals
        .into_iter()
        .enumerate()
        .map(|(k, g)| Ac::und(&format!("{parent_id}.{}", k + 1), g))
        .collect();
    Ok(Ac::decomp(
        parent_id,
        parent.clone(),
        Strategy::template(label, template, x.clone()),
        children,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyses::Query;
    use crate::featexpr::Configuration;
    use crate::fixtures;
    use crate::plmodel::Model;

    fn forall_even() -> PredicateRef {
        PredicateRef::forall(PredicateRef::is_even())
    }

    #[test]
    fn domain_decomposition() {
        let store = ModelStore::new();
        let t = lookup(DOMAIN_DECOMP).unwrap();
        let x = Value::Tuple(vec![Value::ints([1, 2]), Value::ints([2, 3])]);
        let parent = Goal::pred(Value::ints([1, 2, 3]), forall_even());
        let goals = t.instantiate_goals(&x, &parent, &store).unwrap();
        assert_eq!(
            goals,
            vec![
                Goal::pred(Value::ints([1, 2]), forall_even()),
                Goal::pred(Value::ints([2, 3]), forall_even())
            ]
        );
        assert!(t.correctness(&x, &Value::ints([1, 2, 3])));
        assert!(!t.correctness(&Value::Tuple(vec![Value::ints([1])]), &Value::ints([1, 4])));
        let bad = t.instantiate_goals(
            &Value::Tuple(vec![Value::ints([1])]),
            &Goal::pred(Value::ints([1, 4]), forall_even()),
            &store,
        );
        assert!(matches!(bad, Err(AcError::Correctness(_))));
    }

    #[test]
    fn enumeration() {
        let store = ModelStore::new();
        let t = lookup(ENUMERATION).unwrap();
        let s = Value::set(["a1", "a2", "a3"].map(|a| Value::Text(a.into())));
        let goals = t
            .instantiate_goals(&s, &Goal::pred(s.clone(), forall_even()), &store)
            .unwrap();
        assert_eq!(goals.len(), 3);
        assert_eq!(
            goals[0],
            Goal::pred(Value::Text("a1".into()), PredicateRef::is_even())
        );
        assert!(t.correctness(&Value::ints([2, 1]), &Value::ints([1, 2])));
        assert!(!t.correctness(&Value::ints([1]), &Value::ints([1, 2])));
        let parent = Goal::pred(s.clone(), PredicateRef::is_even());
        assert!(matches!(
            t.instantiate_goals(&s, &parent, &store),
            Err(AcError::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn analytic_templates_on_a_product() {
        let mut store = ModelStore::new();
        let r = store
            .insert("M", "v1", Model::Fts(fixtures::alarm_family_old()))
            .at(&Configuration::new(["A"]));
        let q = Query::has_label("Alarm");
        let p = PredicateRef::responds("Safe");
        let root = Goal::pred(
            Value::model(r.clone()),
            PredicateRef::forall_states(q.clone(), p.clone()),
        );
        let xq = Value::Tuple(vec![Value::model(r.clone()), Value::Query(q)]);
        let goals = lookup(QUERY_TEMPLATE)
            .unwrap()
            .instantiate_goals(&xq, &root, &store)
            .unwrap();
        assert_eq!(goals.len(), 3);
        let Goal::Pred { subject, .. } = &goals[1] else {
            panic!()
        };
        assert_eq!(
            subject.as_set().unwrap(),
            &BTreeSet::from([Value::elem(&r, "a1")])
        );

        let spec = PropertySpec::response("a1", "Safe");
        let xm = Value::Tuple(vec![Value::model(r.clone()), Value::Spec(spec.clone())]);
        let parent = Goal::pred(Value::elem(&r, "a1"), p.clone());
        let ac = instantiate(MODEL_CHECK, &xm, "G5", &parent, "Str", &store).unwrap();
        assert_eq!(ac.children().len(), 3);
        assert_eq!(
            ac.children()[0].goal,
            Goal::prop(PropositionRef::spec_adequate(spec, p, "a1"))
        );
        let Goal::Pred {
            subject: Value::Output { output, .. },
            ..
        } = &ac.children()[1].goal
        else {
            panic!()
        };
        assert_eq!(**output, Value::Verdict(crate::analyses::Verdict::Ok));
        assert_eq!(ac.children()[2].id, "G5.3");

        let other = store
            .insert("N", "v1", Model::Fts(fixtures::xor_loop()))
            .at(&Configuration::new(["A"]));
        assert!(!lookup(MODEL_CHECK)
            .unwrap()
            .correctness(&xm, &Value::elem(&other, "a1")));
        assert!(!lookup(MODEL_CHECK)
            .unwrap()
            .correctness(&xm, &Value::elem(&r.with_version("v2"), "a1")));
    }

    #[test]
    fn unknown_template() {
        assert!(matches!(
            lookup("transitivity"),
            Err(AcError::UnknownTemplate(_))
        ));
    }
}
