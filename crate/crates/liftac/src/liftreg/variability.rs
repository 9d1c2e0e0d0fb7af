//! Feature-model evolution: the split of the new product line into retained
//! and new configurations, and the extension of a regression run to the new
//! ones.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::run::{contingent_goal, contingent_strategy, regress_lift, Ctx, VarEvolution, VarRun};
use super::{RegBits, VarRegValue};
use crate::accore::{AcError, Body, Goal, Provenance, Value, VarAc, VarGoal};
use crate::featexpr::{Alphabet, Bits, ExprError, FeatureExpr, Universe};
use crate::plmodel::{FeatureModel, ModelStore};
use crate::regression::RpRegistry;
use crate::templates::{self, ENUMERATION};

/// Retained and new configurations of the evolved feature model, over the
/// union of both alphabets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VariabilityPartition {
    pub alphabet: Alphabet,
    /// The evolved feature model with removed features forced absent.
    pub phi_new_model: FeatureExpr,
    pub phi_reuse: FeatureExpr,
    pub phi_new: FeatureExpr,
    pub new_features: BTreeSet<String>,
    pub removed_features: BTreeSet<String>,
}

impl VariabilityPartition {
    pub fn compute(old: &FeatureModel, new: &FeatureModel) -> Result<Self, ExprError> {
        let alphabet = old.alphabet().union(new.alphabet())?;
        let only = |a: &Alphabet, b: &Alphabet| -> BTreeSet<String> {
            a.names()
                .iter()
                .filter(|n| !b.contains(n))
                .cloned()
                .collect()
        };
        let new_features = only(new.alphabet(), old.alphabet());
        let removed_features = only(old.alphabet(), new.alphabet());
        let absent = |fs: &BTreeSet<String>| {
            FeatureExpr::all(fs.iter().map(|f| !FeatureExpr::var(f.clone())))
        };
        let phi = alphabet.bits(&(old.formula().clone() & absent(&new_features)))?;
        let phi2 = alphabet.bits(&(new.formula().clone() & absent(&removed_features)))?;
        let f = alphabet.bits(&FeatureExpr::any(
            new_features.iter().map(|n| FeatureExpr::var(n.clone())),
        ))?;
        let reuse = phi.and(&phi2).minus(&f);
        let fresh = phi.not().or(&f).and(&phi2);
        Ok(VariabilityPartition {
            phi_new_model: alphabet.expr_of(&phi2),
            phi_reuse: alphabet.expr_of(&reuse),
            phi_new: alphabet.expr_of(&fresh),
            alphabet,
            new_features,
            removed_features,
        })
    }

    /// The evolved product line as a universe.
    pub fn universe(&self) -> Universe {
        Universe::new(self.alphabet.clone(), &self.phi_new_model)
            .expect("alphabet covers the formula")
    }

    pub fn reuse_bits(&self) -> Bits {
        self.universe()
            .restrict(&self.phi_reuse)
            .expect("alphabet covers the formula")
    }

    pub fn new_bits(&self) -> Bits {
        self.universe()
            .restrict(&self.phi_new)
            .expect("alphabet covers the formula")
    }
}

/// A regression run over the retained configurations, extended to the new
/// ones.
#[derive(Clone, Debug)]
pub struct VariabilityRun {
    pub partition: VariabilityPartition,
    /// The evolved product line; values are rendered against it.
    pub universe: Universe,
    pub inner: VarRun,
    pub goals: BTreeMap<String, RegBits>,
    pub strategies: BTreeMap<String, RegBits>,
    pub evidence: BTreeMap<String, RegBits>,
    pub root: RegBits,
    /// Subgoals the new configurations need, by decomposed goal. Reported,
    /// never grafted.
    pub obligations: BTreeMap<String, Vec<VarGoal>>,
}

impl VariabilityRun {
    fn render(&self, m: &BTreeMap<String, RegBits>, id: &str) -> Option<VarRegValue> {
        m.get(id).map(|b| b.to_value(&self.universe))
    }

    pub fn goal_value(&self, id: &str) -> Option<VarRegValue> {
        self.render(&self.goals, id)
    }

    pub fn strategy_value(&self, id: &str) -> Option<VarRegValue> {
        self.render(&self.strategies, id)
    }

    pub fn evidence_value(&self, id: &str) -> Option<VarRegValue> {
        self.render(&self.evidence, id)
    }

    pub fn root_value(&self) -> VarRegValue {
        self.root.to_value(&self.universe)
    }
}

fn compose_into(map: &mut BTreeMap<String, RegBits>, id: &str, piece: RegBits) {
    if piece.is_empty() {
        return;
    }
    let v = match map.get(id) {
        Some(v) => v.compose(&piece),
        None => piece,
    };
    map.insert(id.to_string(), v);
}

/// Regression under the retained configurations followed by the extension:
/// on new configurations, predicate goals, their evidence and every
/// strategy that is not analytic become REVISE; everything else is
/// REUSE there.
pub fn regress_variability(
    a: &VarAc,
    delta: &VarEvolution,
    store: &ModelStore,
    registry: &RpRegistry,
    partition: &VariabilityPartition,
) -> Result<VariabilityRun, AcError> {
    let universe = partition.universe();
    let reuse_universe = universe.with_domain(partition.reuse_bits());
    let ctx = Ctx {
        universe: &reuse_universe,
        delta,
        store,
        registry,
    };
    let inner = regress_lift(a, &ctx)?;
    let fresh = partition.new_bits();

    let mut out = VariabilityRun {
        partition: partition.clone(),
        goals: inner.annotations.goals.clone(),
        strategies: inner.annotations.strategies.clone(),
        evidence: inner.annotations.evidence.clone(),
        root: inner.root.clone(),
        obligations: BTreeMap::new(),
        universe: universe.clone(),
        inner,
    };
    if fresh.is_empty() {
        return Ok(out);
    }
    let core = out.inner.core.clone();
    extend(&core, &fresh, &universe, &mut out)?;
    if let Some(v) = out.goals.get(&core.id) {
        out.root = v.clone();
    }
    obligations(&core, &fresh, &universe, store, &mut out.obligations)?;
    Ok(out)
}

fn extend(n: &VarAc, region: &Bits, u: &Universe, out: &mut VariabilityRun) -> Result<(), AcError> {
    let r = region.and(&u.restrict(&n.goal.pc)?);
    if r.is_empty() {
        return Ok(());
    }
    let piece = |revise: bool| {
        if revise {
            RegBits::revise(&r)
        } else {
            RegBits::reuse(&r)
        }
    };
    let contingent = contingent_goal(&n.goal.goal);
    compose_into(&mut out.goals, &n.id, piece(contingent));
    match &n.body {
        Body::Und => {}
        Body::Evd { .. } => compose_into(&mut out.evidence, &n.id, piece(contingent)),
        Body::Decomp { children, .. } => {
            compose_into(&mut out.strategies, &n.id, piece(contingent_strategy(n)));
            for c in children {
                extend(c, &r, u, out)?;
            }
        }
    }
    Ok(())
}

/// Re-runs enumerations over analysis results on the new configurations
/// and keeps the subgoals no existing child matches.
fn obligations(
    n: &VarAc,
    region: &Bits,
    u: &Universe,
    store: &ModelStore,
    out: &mut BTreeMap<String, Vec<VarGoal>>,
) -> Result<(), AcError> {
    let r = region.and(&u.restrict(&n.goal.pc)?);
    let Body::Decomp { strategy, children } = &n.body else {
        return Ok(());
    };
    if r.is_empty() {
        return Ok(());
    }
    if let (
        Provenance::TemplateInst { template, .. },
        Some(Value::Output {
            analysis, input, ..
        }),
    ) = (&strategy.provenance, n.goal.goal.subject())
    {
        if template == ENUMERATION {
            let inside = u.with_domain(r.clone());
            let output = templates::run_lifted(analysis, input, store, &inside)?;
            let refreshed = Value::output(analysis, (**input).clone(), output.clone());
            let goal = match &n.goal.goal {
                Goal::Pred { pred, .. } => Goal::pred(refreshed, pred.clone()),
                g => g.clone(),
            };
            let parent = VarGoal::new(goal, u.expr(&r));
            let goals = templates::lift_instantiate_goals(ENUMERATION, &output, &parent, store, u)
                .unwrap_or_default();
            let missing = unmatched(&goals, children, &r, u)?;
            if !missing.is_empty() {
                out.insert(n.id.clone(), missing);
            }
        }
    }
    for c in children {
        obligations(c, &r, u, store, out)?;
    }
    Ok(())
}

/// The part of each goal that no child provides, configuration by
/// configuration, with greedy first-unmatched matching.
fn unmatched(
    goals: &[VarGoal],
    children: &[VarAc],
    r: &Bits,
    u: &Universe,
) -> Result<Vec<VarGoal>, AcError> {
    let gpcs = goals
        .iter()
        .map(|g| u.restrict(&g.pc))
        .collect::<Result<Vec<_>, _>>()?;
    let cpcs = children
        .iter()
        .map(|c| u.restrict(&c.goal.pc))
        .collect::<Result<Vec<_>, _>>()?;
    let mut missing = vec![r.cleared(); goals.len()];
    for idx in r.ones() {
        let c = u.alphabet().config_at(idx);
        let keys: Vec<Option<Goal>> = children
            .iter()
            .zip(&cpcs)
            .map(|(k, pc)| pc.get(idx).then(|| k.goal.goal.derive(&c).match_key()))
            .collect();
        let mut used = vec![false; children.len()];
        for (j, g) in goals.iter().enumerate().filter(|(j, _)| gpcs[*j].get(idx)) {
            let key = g.goal.derive(&c).match_key();
            match (0..children.len()).find(|&i| !used[i] && keys[i].as_ref() == Some(&key)) {
                Some(i) => used[i] = true,
                None => missing[j].set(idx),
            }
        }
    }
    Ok(goals
        .iter()
        .zip(missing)
        .filter(|(_, m)| !m.is_empty())
        .map(|(g, m)| VarGoal::new(g.goal.clone(), u.expr(&m)))
        .collect())
}
