//! The supported predicate and refinement checking for product cases.

use std::collections::BTreeSet;

use super::{schema, Ac, AcError, Body, Goal, Ledger, Provenance, Strategy, Value};
use crate::plmodel::ModelStore;
use crate::templates;

/// What `supp` consults. With `rerun`, analysis results are recomputed
/// instead of trusted: `ResultOk` evidence is re-executed and analysis
/// outputs inside subjects are refreshed before correctness is checked.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a> {
    pub store: &'a ModelStore,
    pub ledger: &'a Ledger,
    pub rerun: bool,
}

impl<'a> Env<'a> {
    pub fn new(store: &'a ModelStore, ledger: &'a Ledger) -> Self {
        Env {
            store,
            ledger,
            rerun: false,
        }
    }

    pub fn rerunning(self) -> Self {
        Env {
            rerun: true,
            ..self
        }
    }
}

/// Recomputes every analysis output nested in `v`.
pub fn refresh(v: &Value, store: &ModelStore) -> Result<Value, AcError> {
    Ok(match v {
        Value::Output {
            analysis, input, ..
        } => {
            let input = refresh(input, store)?;
            let output = templates::run_analysis(analysis, &input, store)?;
            Value::output(analysis, input, output)
        }
        Value::Set(xs) => Value::Set(
            xs.iter()
                .map(|x| refresh(x, store))
                .collect::<Result<_, _>>()?,
        ),
        Value::Tuple(xs) => Value::Tuple(
            xs.iter()
                .map(|x| refresh(x, store))
                .collect::<Result<_, _>>()?,
        ),
        other => other.clone(),
    })
}

pub fn supp(a: &Ac, env: &Env) -> Result<bool, AcError> {
    match &a.body {
        Body::Und => Ok(false),
        Body::Evd { evidence } => {
            env.ledger.record(evidence)?;
            if env.rerun {
                if let Goal::Pred {
                    subject:
                        Value::Output {
                            analysis, input, ..
                        },
                    pred,
                } = &a.goal
                {
                    if pred.schema == schema::RESULT_OK {
                        return Ok(
                            matches!(templates::run_analysis(analysis, input, env.store)?, Value::Verdict(v) if v.is_ok()),
                        );
                    }
                }
            }
            Ok(env.ledger.adequate(evidence, &a.goal, env.store))
        }
        Body::Decomp { strategy, children } => {
            for c in children {
                if !supp(c, env)? {
                    return Ok(false);
                }
            }
            check_refinement(&a.goal, strategy, children, env)
        }
    }
}

/// Whether `children` refine `parent` under `st`. Template strategies need
/// the correctness criterion to hold and every instantiated subgoal to be
/// among the children; manual ones need a review.
pub fn check_refinement(
    parent: &Goal,
    st: &Strategy,
    children: &[Ac],
    env: &Env,
) -> Result<bool, AcError> {
    if children.is_empty() {
        return Ok(false);
    }
    match &st.provenance {
        Provenance::Manual { reviewed } => Ok(*reviewed),
        Provenance::TemplateInst {
            template, input, ..
        } => {
            let t = templates::lookup(template)?;
            let parent = if env.rerun {
                parent.map_values(&|v| refresh(v, env.store).unwrap_or_else(|_| v.clone()))
            } else {
                parent.clone()
            };
            let Some(subject) = parent.subject() else {
                return Ok(false);
            };
            if !t.correctness(input, subject) {
                return Ok(false);
            }
            let Ok(goals) = t.instantiate_goals(input, &parent, env.store) else {
                return Ok(false);
            };
            let have: BTreeSet<Goal> = children
                .iter()
                .map(|c| refinement_key(&c.goal, env.store))
                .collect();
            Ok(goals
                .iter()
                .all(|g| have.contains(&refinement_key(g, env.store))))
        }
    }
}

fn refinement_key(g: &Goal, store: &ModelStore) -> Goal {
    g.map_values(&|v| v.erase_outputs().content_key(store))
}
