//! Product-level regression: after models evolve, annotate every goal,
//! strategy and evidence item of a case as reusable, to be revised or to be
//! rechecked, and extract the reusable core.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::accore::{schema, Ac, AcError, Body, Goal, Provenance, Value};
use crate::featexpr::Configuration;
use crate::plmodel::{ModelRef, ModelStore};
use crate::templates::{self, Template};

/// Ordered so that `min` is the most pessimistic: revise < recheck < reuse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegValue {
    Revise,
    Recheck,
    Reuse,
}

impl fmt::Display for RegValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegValue::Reuse => "✓",
            RegValue::Revise => "✗",
            RegValue::Recheck => "?",
        })
    }
}

pub fn min_reg<I: IntoIterator<Item = RegValue>>(values: I) -> Option<RegValue> {
    values.into_iter().min()
}

/// One evolved model: the product or product line `model` (narrowed to
/// `config` when present) moves from version `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Change {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Configuration>,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Evolution(pub Vec<Change>);

impl Evolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(
        mut self,
        model: &str,
        config: Option<Configuration>,
        from: &str,
        to: &str,
    ) -> Self {
        self.0.push(Change {
            model: model.into(),
            config,
            from: from.into(),
            to: to.into(),
        });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn lookup(&self, r: &ModelRef) -> Option<&Change> {
        self.0
            .iter()
            .find(|ch| ch.model == r.model && ch.config == r.config)
    }

    /// Whether `v` mentions an evolved model, whichever version it names.
    pub fn touches(&self, v: &Value) -> bool {
        v.refs().iter().any(|r| self.lookup(r).is_some())
    }

    pub fn touches_goal(&self, g: &Goal) -> bool {
        g.models().iter().any(|r| self.lookup(r).is_some())
    }

    /// Moves every reference to an evolved model to its new version.
    pub fn update(&self, v: &Value) -> Value {
        v.map_refs(&|r| match self.lookup(r) {
            Some(ch) => r.with_version(&ch.to),
            None => r.clone(),
        })
    }

    pub fn update_goal(&self, g: &Goal) -> Goal {
        g.map_values(&|v| self.update(v))
    }
}

/// How the product regression analysis for an evidence item is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RpHandle {
    /// Re-run the analysis whose output the goal's subject records.
    Reverify,
    Absent,
}

/// Regression analyses per predicate schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RpRegistry {
    pub handles: BTreeMap<String, RpHandle>,
}

impl Default for RpRegistry {
    fn default() -> Self {
        RpRegistry {
            handles: BTreeMap::from([(schema::RESULT_OK.to_string(), RpHandle::Reverify)]),
        }
    }
}

impl RpRegistry {
    pub fn none() -> Self {
        RpRegistry {
            handles: BTreeMap::new(),
        }
    }

    pub fn handle(&self, schema: &str) -> RpHandle {
        self.handles
            .get(schema)
            .copied()
            .unwrap_or(RpHandle::Absent)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    pub goals: BTreeMap<String, RegValue>,
    /// Keyed by the id of the decomposed goal.
    pub strategies: BTreeMap<String, RegValue>,
    /// Keyed by the id of the supported goal.
    pub evidence: BTreeMap<String, RegValue>,
    pub obsolete: BTreeSet<String>,
    /// Subgoals a strategy now requires but no existing child provides.
    pub new_goals: BTreeMap<String, Vec<Goal>>,
    pub reasons: BTreeMap<String, String>,
}

impl Annotations {
    fn mark_recheck(&mut self, a: &Ac, include_self: bool) {
        a.walk(&mut |n| {
            if !include_self && n.id == a.id {
                return;
            }
            self.goals.insert(n.id.clone(), RegValue::Recheck);
            match &n.body {
                Body::Decomp { .. } => {
                    self.strategies.insert(n.id.clone(), RegValue::Recheck);
                }
                Body::Evd { .. } => {
                    self.evidence.insert(n.id.clone(), RegValue::Recheck);
                }
                Body::Und => {}
            }
        });
    }

    fn reason(&mut self, id: &str, why: impl Into<String>) {
        self.reasons.insert(id.to_string(), why.into());
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regression: Option<RegValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<RegValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<RegValue>,
    pub obsolete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    /// The case after the forward pass, with updated goals and obsolete
    /// children still in place.
    pub updated: Ac,
    pub core: Ac,
    pub annotations: Annotations,
    pub root: RegValue,
}

impl Run {
    pub fn report(&self) -> BTreeMap<String, NodeReport> {
        let a = &self.annotations;
        let mut out = BTreeMap::new();
        self.updated.walk(&mut |n| {
            out.insert(
                n.id.clone(),
                NodeReport {
                    regression: a.goals.get(&n.id).copied(),
                    strategy: a.strategies.get(&n.id).copied(),
                    evidence: a.evidence.get(&n.id).copied(),
                    obsolete: a.obsolete.contains(&n.id),
                    reason: a.reasons.get(&n.id).cloned(),
                },
            );
        });
        out
    }
}

/// Which kind of analytic instantiation a strategy is: evidence-producing
/// when its g_Y child is closed by evidence, argument-producing when it is
/// decomposed further, the template's default otherwise.
pub fn evidence_producing(t: &Template, children: &[Ac]) -> bool {
    let g_y = children
        .iter()
        .find(|c| matches!(c.goal.subject(), Some(Value::Output { .. })));
    match g_y.map(|c| &c.body) {
        Some(Body::Evd { .. }) => true,
        Some(Body::Decomp { .. }) => false,
        _ => t.evidence_producing_default,
    }
}

/// A new input for the template after evolution: analytic inputs and
/// decompositions follow the model update; an enumeration of an analysis
/// output takes the refreshed output.
pub fn synthesize(t: &Template, x: &Value, subject: &Value, delta: &Evolution) -> Option<Value> {
    let x2 = match (t.id, subject) {
        (templates::ENUMERATION, Value::Output { output, .. }) => (**output).clone(),
        _ => delta.update(x),
    };
    t.correctness(&x2, subject).then_some(x2)
}

fn substitute(g: &Goal, from: &Value, to: &Value) -> Goal {
    g.map_values(&|v| v.rewrite(&|w| if w == *from { to.clone() } else { w }))
}

/// Greedy matching of regenerated goals against existing children: each
/// new goal takes the first unmatched child with an equal match key.
/// Returns the child index for each new goal.
pub fn match_goals(old: &[Goal], new: &[Goal]) -> Vec<Option<usize>> {
    let keys: Vec<Goal> = old.iter().map(Goal::match_key).collect();
    let mut taken = vec![false; old.len()];
    new.iter()
        .map(|g| {
            let k = g.match_key();
            let i = (0..old.len()).find(|&i| !taken[i] && keys[i] == k)?;
            taken[i] = true;
            Some(i)
        })
        .collect()
}

/// Regression of one template strategy whose subject was touched. Updates
/// the strategy input and the children in place.
fn template_regression(
    node: &mut Ac,
    delta: &Evolution,
    store: &ModelStore,
    ann: &mut Annotations,
) -> Result<RegValue, AcError> {
    let id = node.id.clone();
    let Body::Decomp { strategy, children } = &mut node.body else {
        unreachable!("called on decompositions")
    };
    let (t, x) = match &strategy.provenance {
        Provenance::TemplateInst {
            template, input, ..
        } => (templates::lookup(template)?, input.clone()),
        Provenance::Manual { .. } => unreachable!("manual strategies are handled by the caller"),
    };
    let Some(subject) = node.goal.subject().cloned() else {
        return Ok(RegValue::Recheck);
    };
    let Some(x2) = synthesize(t, &x, &subject, delta) else {
        ann.reason(
            &id,
            "no input satisfies the correctness criterion after evolution",
        );
        for c in children.iter() {
            ann.mark_recheck(c, true);
        }
        return Ok(RegValue::Recheck);
    };
    *strategy = strategy.with_input(x2.clone());
    if t.analytic && evidence_producing(t, children) {
        for c in children.iter_mut() {
            c.goal = substitute(&delta.update_goal(&c.goal), &delta.update(&x), &x2);
        }
        return Ok(RegValue::Reuse);
    }
    let goals = match t.instantiate_goals(&x2, &node.goal, store) {
        Ok(g) => g,
        Err(e) => {
            ann.reason(&id, format!("re-instantiation failed: {e}"));
            for c in children.iter() {
                ann.mark_recheck(c, true);
            }
            return Ok(RegValue::Recheck);
        }
    };
    let old: Vec<Goal> = children.iter().map(|c| c.goal.clone()).collect();
    let matched = match_goals(&old, &goals);
    let mut fresh = Vec::new();
    for (g, m) in goals.iter().zip(&matched) {
        match m {
            Some(i) => children[*i].goal = g.clone(),
            None => fresh.push(g.clone()),
        }
    }
    let used: BTreeSet<usize> = matched.iter().flatten().copied().collect();
    for (i, c) in children.iter().enumerate() {
        if !used.contains(&i) {
            ann.obsolete.insert(c.id.clone());
        }
    }
    if fresh.is_empty() {
        Ok(RegValue::Reuse)
    } else {
        ann.reason(&id, format!("{} new subgoal(s) required", fresh.len()));
        ann.new_goals.insert(id, fresh);
        Ok(RegValue::Revise)
    }
}

pub fn forward_pass(
    a: &Ac,
    delta: &Evolution,
    store: &ModelStore,
) -> Result<(Ac, Annotations), AcError> {
    let mut ac = a.clone();
    let mut ann = Annotations::default();
    forward(&mut ac, delta, store, &mut ann)?;
    Ok((ac, ann))
}

fn forward(
    node: &mut Ac,
    delta: &Evolution,
    store: &ModelStore,
    ann: &mut Annotations,
) -> Result<(), AcError> {
    let touched = delta.touches_goal(&node.goal);
    node.goal = delta.update_goal(&node.goal);
    let (manual, id) = match &node.body {
        Body::Decomp { strategy, .. } => (strategy.template_input().is_none(), node.id.clone()),
        _ => return Ok(()),
    };
    if manual {
        ann.strategies.insert(id.clone(), RegValue::Recheck);
        ann.reason(&id, "manual strategy");
        let snapshot = node.clone();
        for c in snapshot.children() {
            ann.mark_recheck(c, true);
        }
        return Ok(());
    }
    let v = if touched {
        template_regression(node, delta, store, ann)?
    } else {
        if let Body::Decomp { strategy, .. } = &mut node.body {
            if let Some((_, x)) = strategy.template_input() {
                let renamed = delta.update(x);
                *strategy = strategy.with_input(renamed);
            }
        }
        RegValue::Reuse
    };
    ann.strategies.insert(id, v);
    if v == RegValue::Recheck {
        return Ok(());
    }
    if let Body::Decomp { children, .. } = &mut node.body {
        let obsolete = ann.obsolete.clone();
        for c in children.iter_mut().filter(|c| !obsolete.contains(&c.id)) {
            forward(c, delta, store, ann)?;
        }
    }
    Ok(())
}

/// Drops obsolete subtrees; decompositions left without children become
/// undeveloped.
pub fn extract_core(a: &Ac, obsolete: &BTreeSet<String>) -> Ac {
    match &a.body {
        Body::Decomp { strategy, children } => {
            let kids: Vec<Ac> = children
                .iter()
                .filter(|c| !obsolete.contains(&c.id))
                .map(|c| extract_core(c, obsolete))
                .collect();
            if kids.is_empty() {
                Ac::und(&a.id, a.goal.clone())
            } else {
                Ac::decomp(&a.id, a.goal.clone(), strategy.clone(), kids)
            }
        }
        _ => a.clone(),
    }
}

/// Regression of an evidence item bound to the (updated) goal `g`.
pub fn evd_regression(
    g: &Goal,
    delta: &Evolution,
    store: &ModelStore,
    registry: &RpRegistry,
) -> Result<RegValue, AcError> {
    let Goal::Pred { subject, pred } = g else {
        return Ok(RegValue::Reuse);
    };
    if !delta.touches(subject) {
        return Ok(RegValue::Reuse);
    }
    match (registry.handle(&pred.schema), subject) {
        (
            RpHandle::Reverify,
            Value::Output {
                analysis, input, ..
            },
        ) => {
            let fresh = templates::run_analysis(analysis, input, store)?;
            Ok(if matches!(fresh, Value::Verdict(v) if v.is_ok()) {
                RegValue::Reuse
            } else {
                RegValue::Revise
            })
        }
        _ => Ok(RegValue::Recheck),
    }
}

pub fn backward_pass(
    core: &Ac,
    delta: &Evolution,
    store: &ModelStore,
    registry: &RpRegistry,
    ann: &mut Annotations,
) -> Result<RegValue, AcError> {
    let v = match &core.body {
        Body::Und => RegValue::Revise,
        Body::Evd { .. } => {
            let v = evd_regression(&core.goal, delta, store, registry)?;
            ann.evidence.insert(core.id.clone(), v);
            v
        }
        Body::Decomp { children, .. } => {
            let st = ann
                .strategies
                .get(&core.id)
                .copied()
                .unwrap_or(RegValue::Recheck);
            if st == RegValue::Recheck {
                RegValue::Recheck
            } else {
                let mut acc = st;
                for c in children {
                    acc = acc.min(backward_pass(c, delta, store, registry, ann)?);
                }
                acc
            }
        }
    };
    ann.goals.insert(core.id.clone(), v);
    Ok(v)
}

/// Forward pass, core extraction and backward pass.
pub fn regress(
    a: &Ac,
    delta: &Evolution,
    store: &ModelStore,
    registry: &RpRegistry,
) -> Result<Run, AcError> {
    let (updated, mut annotations) = forward_pass(a, delta, store)?;
    let core = extract_core(&updated, &annotations.obsolete);
    let root = backward_pass(&core, delta, store, registry, &mut annotations)?;
    Ok(Run {
        updated,
        core,
        annotations,
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accore::{PredicateRef, Strategy};

    #[test]
    fn ordering_and_min() {
        assert_eq!(
            min_reg([RegValue::Reuse, RegValue::Reuse]),
            Some(RegValue::Reuse)
        );
        assert_eq!(
            min_reg([RegValue::Reuse, RegValue::Recheck]),
            Some(RegValue::Recheck)
        );
        assert_eq!(
            min_reg([RegValue::Recheck, RegValue::Revise, RegValue::Reuse]),
            Some(RegValue::Revise)
        );
        assert_eq!(min_reg([]), None);
    }

    #[test]
    fn matching_takes_first_unmatched() {
        let g = |n| Goal::pred(Value::Int(n), PredicateRef::is_even());
        assert_eq!(
            match_goals(&[g(1), g(2), g(1)], &[g(1), g(1), g(3)]),
            vec![Some(0), Some(2), None]
        );
    }

    #[test]
    fn core_extraction() {
        let g = |n| Goal::pred(Value::Int(n), PredicateRef::is_even());
        let st = Strategy::manual("S", true);
        let a = Ac::decomp(
            "G1",
            g(0),
            st.clone(),
            vec![
                Ac::und("G2", g(2)),
                Ac::und("G3", g(4)),
                Ac::und("G4", g(6)),
            ],
        );
        assert_eq!(extract_core(&a, &BTreeSet::new()), a);
        let one = extract_core(&a, &BTreeSet::from(["G3".to_string()]));
        assert_eq!(one.children().len(), 2);
        let all: BTreeSet<String> = ["G2", "G3", "G4"].map(String::from).into();
        assert_eq!(extract_core(&a, &all), Ac::und("G1", g(0)));
    }

    #[test]
    fn evidence_regression_cases() {
        let store = ModelStore::new();
        let delta = Evolution::new().with("M", None, "v1", "v2");
        let prop = Goal::prop(crate::accore::PropositionRef::analysis_sound("query"));
        assert_eq!(
            evd_regression(&prop, &delta, &store, &RpRegistry::default()).unwrap(),
            RegValue::Reuse
        );
        let touched = Goal::pred(
            Value::elem(&ModelRef::new("M", "v2"), "a"),
            PredicateRef::responds("Safe"),
        );
        assert_eq!(
            evd_regression(&touched, &delta, &store, &RpRegistry::default()).unwrap(),
            RegValue::Recheck
        );
        let other = Goal::pred(
            Value::elem(&ModelRef::new("N", "v1"), "a"),
            PredicateRef::responds("Safe"),
        );
        assert_eq!(
            evd_regression(&other, &delta, &store, &RpRegistry::none()).unwrap(),
            RegValue::Reuse
        );
    }

    #[test]
    fn manual_strategy_rechecks_everything_below() {
        let store = ModelStore::new();
        let m = ModelRef::new("M", "v1");
        let g = |id: &str| Goal::pred(Value::elem(&m, id), PredicateRef::responds("Safe"));
        let a = Ac::decomp(
            "G1",
            g("a"),
            Strategy::manual("S", true),
            vec![Ac::decomp(
                "G2",
                g("b"),
                Strategy::manual("S2", true),
                vec![Ac::evd("G3", g("c"), "E")],
            )],
        );
        let run = regress(&a, &Evolution::new(), &store, &RpRegistry::default()).unwrap();
        assert_eq!(run.root, RegValue::Recheck);
        for id in ["G1", "G2", "G3"] {
            assert_eq!(run.annotations.goals[id], RegValue::Recheck, "{id}");
        }
        assert_eq!(run.annotations.evidence["G3"], RegValue::Recheck);
    }
}
