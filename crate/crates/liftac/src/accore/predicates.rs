//! Executable evaluators for the registered predicates over product values.

use super::{schema, AcError, PredicateRef, Value};
use crate::analyses::{check_after_action_lts, check_lts, check_response_lts, query_lts};
use crate::plmodel::ModelStore;

/// Decides `pred(subject)` for a product subject. Predicates over abstract
/// or variational subjects are not evaluable and report an error.
pub fn eval_pred(
    pred: &PredicateRef,
    subject: &Value,
    store: &ModelStore,
) -> Result<bool, AcError> {
    pred.validate()?;
    let not_evaluable = || AcError::NotEvaluable {
        pred: pred.to_string(),
        subject: subject.to_string(),
    };
    match pred.schema.as_str() {
        schema::FORALL_P => {
            let inner = pred.inner().ok_or_else(not_evaluable)?;
            let xs = subject.as_set().ok_or_else(not_evaluable)?;
            for x in xs {
                if !eval_pred(inner, x, store)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        schema::FORALL_STATES => {
            let (q, inner) = (
                pred.query().ok_or_else(not_evaluable)?,
                pred.inner().ok_or_else(not_evaluable)?,
            );
            let Value::Model(r) = subject else {
                return Err(not_evaluable());
            };
            let lts = store.resolve_lts(r)?;
            for s in query_lts(&lts, q) {
                if !eval_pred(inner, &Value::elem(r, &s), store)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        schema::RESPONDS | schema::AFTER_SAFE => {
            let Value::Elem { model, id } = subject else {
                return Err(not_evaluable());
            };
            let Value::Text(p) = &pred.params[0] else {
                return Err(not_evaluable());
            };
            let lts = store.resolve_lts(model)?;
            Ok(if pred.schema == schema::RESPONDS {
                check_response_lts(&lts, id, p).is_ok()
            } else {
                check_after_action_lts(&lts, id, p).is_ok()
            })
        }
        schema::SATISFIES => {
            let (Value::Model(r), Value::Spec(spec)) = (subject, &pred.params[0]) else {
                return Err(not_evaluable());
            };
            Ok(check_lts(&store.resolve_lts(r)?, spec).is_ok())
        }
        schema::RESULT_OK => match subject {
            Value::Output { output, .. } => match output.as_ref() {
                Value::Verdict(v) => Ok(v.is_ok()),
                _ => Err(not_evaluable()),
            },
            _ => Err(not_evaluable()),
        },
        schema::AT_MOST => match (subject, &pred.params[0]) {
            (Value::Int(n), Value::Int(k)) => Ok(n <= k),
            _ => Err(not_evaluable()),
        },
        schema::IS_EVEN => match subject {
            Value::Int(n) => Ok(n % 2 == 0),
            _ => Err(not_evaluable()),
        },
        other => Err(AcError::UnknownSchema(other.to_string())),
    }
}
