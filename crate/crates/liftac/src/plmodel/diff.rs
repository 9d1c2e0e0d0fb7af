//! Element-level model differences and Δ̂, the configurations an evolution touches.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Fts, ModelError, Transition};
use crate::featexpr::{Bits, FeatureExpr, Universe};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateChange {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub old_labels: Option<BTreeSet<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_labels: Option<BTreeSet<String>>,
    /// Where the state is present in either version.
    pub pc: FeatureExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TransitionChange {
    pub src: String,
    pub action: String,
    pub dst: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub old_pc: Option<FeatureExpr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_pc: Option<FeatureExpr>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementDiff {
    pub added_states: Vec<StateChange>,
    pub removed_states: Vec<StateChange>,
    pub modified_states: Vec<StateChange>,
    pub added_transitions: Vec<TransitionChange>,
    pub removed_transitions: Vec<TransitionChange>,
    pub modified_transitions: Vec<TransitionChange>,
    pub initial_changed: bool,
}

impl ElementDiff {
    pub fn is_empty(&self) -> bool {
        *self == ElementDiff::default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    Exact,
    OverApprox,
    /// Exact up to 12 features, over-approximate beyond.
    Auto,
}

fn joint_universe(old: &Fts, new: &Fts) -> Result<Universe, ModelError> {
    let alphabet = old.alphabet().union(new.alphabet())?;
    Ok(Universe::new(alphabet, &FeatureExpr::True)?)
}

fn shared_universe(old: &Fts, new: &Fts) -> Result<Universe, ModelError> {
    if old.alphabet() != new.alphabet() {
        return Err(ModelError::FeatureModelMismatch);
    }
    let u = old.feature_model().universe();
    if u.bits(new.feature_model().formula())? != *u.domain() {
        return Err(ModelError::FeatureModelMismatch);
    }
    Ok(u)
}

pub fn diff_models(old: &Fts, new: &Fts) -> Result<ElementDiff, ModelError> {
    let u = joint_universe(old, new)?;
    let r_old = old.reach_bits(&u)?;
    let r_new = new.reach_bits(&u)?;
    let mut d = ElementDiff {
        initial_changed: old.initial() != new.initial(),
        ..Default::default()
    };

    let old_states: BTreeMap<&str, _> = old.states().iter().map(|s| (s.id.as_str(), s)).collect();
    let new_states: BTreeMap<&str, _> = new.states().iter().map(|s| (s.id.as_str(), s)).collect();
    for (id, s) in &old_states {
        match new_states.get(id) {
            None => d.removed_states.push(StateChange {
                id: id.to_string(),
                old_labels: Some(s.labels.clone()),
                new_labels: None,
                pc: u.expr(&r_old[*id]),
            }),
            Some(n) if n.labels != s.labels => d.modified_states.push(StateChange {
                id: id.to_string(),
                old_labels: Some(s.labels.clone()),
                new_labels: Some(n.labels.clone()),
                pc: u.expr(&r_old[*id].or(&r_new[*id])),
            }),
            Some(_) => {}
        }
    }
    for (id, n) in &new_states {
        if !old_states.contains_key(id) {
            d.added_states.push(StateChange {
                id: id.to_string(),
                old_labels: None,
                new_labels: Some(n.labels.clone()),
                pc: u.expr(&r_new[*id]),
            });
        }
    }

    let old_tr: BTreeMap<Transition, &FeatureExpr> =
        old.transitions().iter().map(|t| (t.key(), &t.pc)).collect();
    let new_tr: BTreeMap<Transition, &FeatureExpr> =
        new.transitions().iter().map(|t| (t.key(), &t.pc)).collect();
    let change =
        |k: &Transition, o: Option<&FeatureExpr>, n: Option<&FeatureExpr>| TransitionChange {
            src: k.src.clone(),
            action: k.action.clone(),
            dst: k.dst.clone(),
            old_pc: o.cloned(),
            new_pc: n.cloned(),
        };
    for (k, pc) in &old_tr {
        match new_tr.get(k) {
            None => d.removed_transitions.push(change(k, Some(pc), None)),
            Some(npc) if u.bits(pc)? != u.bits(npc)? => {
                d.modified_transitions.push(change(k, Some(pc), Some(npc)))
            }
            Some(_) => {}
        }
    }
    for (k, pc) in &new_tr {
        if !old_tr.contains_key(k) {
            d.added_transitions.push(change(k, None, Some(pc)));
        }
    }
    Ok(d)
}

/// Disjunction of the presence conditions of every changed element, inside
/// the universe's domain. Sound: every configuration whose products differ
/// enables a changed transition or reaches a relabelled state.
pub fn delta_hat_over_approx_in(old: &Fts, new: &Fts, u: &Universe) -> Result<Bits, ModelError> {
    let d = diff_models(old, new)?;
    if d.initial_changed {
        return Ok(u.domain().clone());
    }
    let mut acc = u.empty();
    for t in d
        .added_transitions
        .iter()
        .chain(&d.removed_transitions)
        .chain(&d.modified_transitions)
    {
        for pc in t.old_pc.iter().chain(t.new_pc.iter()) {
            acc.or_assign(&u.bits(pc)?);
        }
    }
    if !d.modified_states.is_empty() {
        let r_old = old.reach_bits(u)?;
        let r_new = new.reach_bits(u)?;
        for s in &d.modified_states {
            acc.or_assign(&r_old[&s.id].or(&r_new[&s.id]));
        }
    }
    Ok(acc.and(u.domain()))
}

/// Exactly the configurations of the domain whose derived products differ.
pub fn delta_hat_exact_in(old: &Fts, new: &Fts, u: &Universe) -> Result<Bits, ModelError> {
    let mut acc = u.empty();
    for idx in u.domain().ones() {
        let c = u.alphabet().config_at(idx);
        let (co, cn) = (old.alphabet().project(&c), new.alphabet().project(&c));
        if old.derive(&co).ok() != new.derive(&cn).ok() {
            acc.set(idx);
        }
    }
    Ok(acc)
}

pub fn delta_hat_exact(old: &Fts, new: &Fts) -> Result<FeatureExpr, ModelError> {
    let u = shared_universe(old, new)?;
    Ok(u.expr(&delta_hat_exact_in(old, new, &u)?))
}

pub fn delta_hat_over_approx(old: &Fts, new: &Fts) -> Result<FeatureExpr, ModelError> {
    let u = shared_universe(old, new)?;
    Ok(u.expr(&delta_hat_over_approx_in(old, new, &u)?))
}

pub fn delta_hat(old: &Fts, new: &Fts, mode: DeltaMode) -> Result<FeatureExpr, ModelError> {
    match mode {
        DeltaMode::Exact => delta_hat_exact(old, new),
        DeltaMode::OverApprox => delta_hat_over_approx(old, new),
        DeltaMode::Auto if old.alphabet().len() <= 12 => delta_hat_exact(old, new),
        DeltaMode::Auto => delta_hat_over_approx(old, new),
    }
}
