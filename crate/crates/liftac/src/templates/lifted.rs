//! Lifted instantiation: templates applied to variational inputs so that
//! deriving the result under any configuration gives the product
//! instantiation of the derived input.

use super::{
    analytic_parts, lookup, spec_adequacy, subject_model, DOMAIN_DECOMP, ENUMERATION, MODEL_CHECK,
    QUERY_TEMPLATE,
};
use crate::accore::{AcError, Goal, PredicateRef, PropositionRef, Strategy, Value, VarAc, VarGoal};
use crate::analyses::{check_fts_in, query_fts_in, QUERY};
use crate::featexpr::{Bits, FeatureExpr, Universe};
use crate::plmodel::{Model, ModelStore};

/// Runs the lifted analysis bound to `analysis` over the domain of `u`.
/// Queries yield a variational set, checks a choice of verdicts.
pub fn run_lifted(
    analysis: &str,
    x: &Value,
    store: &ModelStore,
    u: &Universe,
) -> Result<Value, AcError> {
    let bad = |reason: &str| AcError::BadInput {
        template: analysis.to_string(),
        reason: reason.to_string(),
    };
    let (r, arg) = analytic_parts(x).ok_or_else(|| bad("expected (model, argument)"))?;
    let fts = match store.model(r)? {
        Model::Fts(m) if r.config.is_none() => m,
        _ => {
            // A single product: the result is the same everywhere.
            let out = super::run_analysis(analysis, x, store)?;
            return Ok(match out {
                Value::Set(xs) => {
                    Value::var_set(xs.into_iter().map(|v| (v, FeatureExpr::True)).collect())
                }
                v => Value::choice(vec![(v, FeatureExpr::True)]),
            });
        }
    };
    match (analysis, arg) {
        (QUERY, Value::Query(q)) => Ok(Value::var_set(
            query_fts_in(fts, q, u)?
                .into_iter()
                .map(|(s, b)| (Value::elem(r, &s), u.expr(&b)))
                .collect(),
        )),
        (_, Value::Spec(spec)) if spec.analysis_id() == analysis => Ok(Value::choice(
            check_fts_in(fts, spec, u)?
                .into_iter()
                .map(|(v, b)| (Value::Verdict(v), u.expr(&b)))
                .collect(),
        )),
        _ => Err(bad("argument does not fit the analysis")),
    }
}

/// Configurations of `u`'s domain under which the derived input satisfies
/// the template's correctness criterion for the derived subject.
pub fn lift_correctness_region(
    template: &str,
    x: &Value,
    subject: &Value,
    u: &Universe,
) -> Result<Bits, AcError> {
    let t = lookup(template)?;
    let mut ok = u.empty();
    for idx in u.domain().ones() {
        let c = u.alphabet().config_at(idx);
        if t.correctness(&x.derive(&c), &subject.derive(&c)) {
            ok.set(idx);
        }
    }
    Ok(ok)
}

/// Subgoals of the lifted template for `x` under `parent`. `u` is the
/// product line's universe; everything is restricted to the parent's
/// presence condition.
pub fn lift_instantiate_goals(
    template: &str,
    x: &Value,
    parent: &VarGoal,
    store: &ModelStore,
    u: &Universe,
) -> Result<Vec<VarGoal>, AcError> {
    let t = lookup(template)?;
    let (subject, pred) = t.check_parent(&parent.goal)?;
    let region = u.restrict(&parent.pc)?;
    let ok = lift_correctness_region(template, x, subject, &u.with_domain(region.clone()))?;
    if let Some(idx) = region.minus(&ok).ones().next() {
        return Err(AcError::VarCorrectness {
            template: template.to_string(),
            config: u.alphabet().config_at(idx),
        });
    }
    let phi = parent.pc.clone();
    let at = |g: Goal| VarGoal::new(g, phi.clone());
    let inside = u.with_domain(region.clone());
    let goals = match t.id {
        DOMAIN_DECOMP => {
            let Value::Tuple(family) = x else {
                unreachable!("checked by correctness")
            };
            family
                .iter()
                .map(|xi| at(Goal::pred(xi.clone(), pred.clone())))
                .collect()
        }
        ENUMERATION => {
            let inner = pred
                .inner()
                .ok_or_else(|| AcError::BadParams(pred.to_string()))?;
            let entries: Vec<(Value, FeatureExpr)> = match x {
                Value::VarSet { entries } => entries
                    .iter()
                    .map(|e| (e.value.clone(), e.pc.clone()))
                    .collect(),
                Value::Set(xs) => xs.iter().map(|v| (v.clone(), FeatureExpr::True)).collect(),
                _ => {
                    return Err(AcError::BadInput {
                        template: template.into(),
                        reason: "expected a set".into(),
                    })
                }
            };
            // Equal values under several guards are one element of each product.
            let mut merged: Vec<(Value, FeatureExpr)> = Vec::new();
            for (xi, phi_i) in entries {
                match merged.iter_mut().find(|(v, _)| *v == xi) {
                    Some((_, phi)) => *phi = phi.clone() | phi_i,
                    None => merged.push((xi, phi_i)),
                }
            }
            let mut goals = Vec::new();
            for (xi, phi_i) in merged {
                let both = region.and(&u.bits(&phi_i)?);
                if both.is_empty() {
                    continue;
                }
                goals.push(VarGoal::new(
                    Goal::pred(Value::single(xi, phi_i), inner.clone()),
                    u.expr(&both),
                ));
            }
            goals
        }
        MODEL_CHECK => {
            let (_, Value::Spec(spec)) = analytic_parts(x).expect("checked by correctness") else {
                unreachable!()
            };
            let (_, elem) = subject_model(subject).expect("checked by correctness");
            let analysis = spec.analysis_id();
            lifted_analytic_goals(
                analysis,
                x,
                spec_adequacy(spec, pred, elem),
                run_lifted(analysis, x, store, &inside)?,
                PredicateRef::result_ok(),
            )
            .into_iter()
            .map(at)
            .collect()
        }
        QUERY_TEMPLATE => {
            let (_, Value::Query(q)) = analytic_parts(x).expect("checked by correctness") else {
                unreachable!()
            };
            let inner = pred
                .inner()
                .ok_or_else(|| AcError::BadParams(pred.to_string()))?;
            lifted_analytic_goals(
                QUERY,
                x,
                PropositionRef::query_adequate(q.clone(), pred.clone()),
                run_lifted(QUERY, x, store, &inside)?,
                PredicateRef::forall(inner.clone()),
            )
            .into_iter()
            .map(at)
            .collect()
        }
        _ => unreachable!("registry ids"),
    };
    if goals.is_empty() {
        return Err(AcError::EmptyInstantiation(template.to_string()));
    }
    Ok(goals)
}

/// g_X, g_Y, g_f and g_Lift.
fn lifted_analytic_goals(
    analysis: &str,
    x: &Value,
    g_x: PropositionRef,
    output: Value,
    p_y: PredicateRef,
) -> Vec<Goal> {
    let mut goals = super::analytic_goals(analysis, x, g_x, output, p_y);
    goals.push(Goal::prop(PropositionRef::lift_correct(analysis)));
    goals
}

pub fn lift_instantiate(
    template: &str,
    x: &Value,
    parent_id: &str,
    parent: &VarGoal,
    label: &str,
    store: &ModelStore,
    u: &Universe,
) -> Result<VarAc, AcError> {
    let goals = lift_instantiate_goals(template, x, parent, store, u)?;
    let children = goals
        .into_iter()
        .enumerate()
        .map(|(k, g)| VarAc::und(&format!("{parent_id}.{}", k + 1), g))
        .collect();
    Ok(VarAc::decomp(
        parent_id,
        parent.clone(),
        Strategy::template(label, template, x.clone()),
        children,
    ))
}
