//! Lifted forward pass, core extraction and backward pass over a
//! variational case, with regression values kept as truth tables.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{RegBits, VarRegValue};
use crate::accore::{AcError, Body, Goal, Provenance, Value, VarAc, VarGoal};
use crate::analyses::check_fts_in;
use crate::featexpr::{Bits, Configuration, FeatureExpr, Universe};
use crate::plmodel::{Fts, ModelStore};
use crate::regression::{Evolution, RegValue, RpHandle, RpRegistry};
use crate::templates::{self, Template};

/// A product-line model moving from `from` to `to`; `delta` holds exactly
/// where the derived products differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarChange {
    pub model: String,
    pub from: String,
    pub to: String,
    pub delta: FeatureExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarEvolution(pub Vec<VarChange>);

impl VarEvolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, model: &str, from: &str, to: &str, delta: FeatureExpr) -> Self {
        self.0.push(VarChange {
            model: model.into(),
            from: from.into(),
            to: to.into(),
            delta,
        });
        self
    }

    /// The change computed by comparing both versions in `store` over `u`.
    pub fn between(
        model: &str,
        from: &str,
        to: &str,
        store: &ModelStore,
        u: &Universe,
        exact: bool,
    ) -> Result<VarChange, AcError> {
        let fts = |v: &str| -> Result<&Fts, AcError> {
            Ok(store.fts(&crate::plmodel::ModelRef::new(model, v))?)
        };
        let (old, new) = (fts(from)?, fts(to)?);
        let bits = if exact {
            crate::plmodel::delta_hat_exact_in(old, new, u)?
        } else {
            crate::plmodel::delta_hat_over_approx_in(old, new, u)?
        };
        Ok(VarChange {
            model: model.into(),
            from: from.into(),
            to: to.into(),
            delta: u.expr(&bits),
        })
    }

    /// The product evolution for `c`: every model whose product under `c` changed.
    pub fn at(&self, c: &Configuration) -> Evolution {
        self.0
            .iter()
            .filter(|ch| ch.delta.eval(c))
            .fold(Evolution::new(), |e, ch| {
                e.with(&ch.model, Some(c.clone()), &ch.from, &ch.to)
            })
    }

    pub fn update(&self, v: &Value) -> Value {
        v.map_refs(&|r| match self.0.iter().find(|ch| ch.model == r.model) {
            Some(ch) => r.with_version(&ch.to),
            None => r.clone(),
        })
    }

    pub fn update_goal(&self, g: &Goal) -> Goal {
        g.map_values(&|v| self.update(v))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarAnnotations {
    pub goals: BTreeMap<String, RegBits>,
    pub strategies: BTreeMap<String, RegBits>,
    pub evidence: BTreeMap<String, RegBits>,
    /// Configurations in which a child has become obsolete.
    pub obsolete: BTreeMap<String, Bits>,
    pub new_goals: BTreeMap<String, Vec<VarGoal>>,
}

fn add(map: &mut BTreeMap<String, RegBits>, id: &str, piece: RegBits) {
    if piece.is_empty() {
        return;
    }
    match map.get_mut(id) {
        Some(v) => *v = v.compose(&piece),
        None => {
            map.insert(id.to_string(), piece);
        }
    }
}

/// Everything a lifted run reads.
pub struct Ctx<'a> {
    pub universe: &'a Universe,
    pub delta: &'a VarEvolution,
    pub store: &'a ModelStore,
    pub registry: &'a RpRegistry,
}

impl Ctx<'_> {
    fn bits(&self, e: &FeatureExpr) -> Result<Bits, AcError> {
        Ok(self.universe.restrict(e)?)
    }

    /// Configurations in which the goal mentions an evolved product.
    fn delta_region(&self, g: &Goal) -> Result<Bits, AcError> {
        let ids: BTreeSet<String> = g.models().into_iter().map(|r| r.model).collect();
        let mut acc = self.universe.empty();
        for ch in self.delta.0.iter().filter(|ch| ids.contains(&ch.model)) {
            acc.or_assign(&self.bits(&ch.delta)?);
        }
        Ok(acc)
    }

    fn cover(&self, children: &[VarAc]) -> Result<Bits, AcError> {
        let mut acc = self.universe.empty();
        for k in children {
            acc.or_assign(&self.bits(&k.goal.pc)?);
        }
        Ok(acc)
    }

    fn configs(&self, b: &Bits) -> Vec<(usize, Configuration)> {
        b.ones()
            .map(|i| (i, self.universe.alphabet().config_at(i)))
            .collect()
    }
}

fn evidence_producing(t: &Template, children: &[VarAc]) -> bool {
    let g_y = children
        .iter()
        .find(|c| matches!(c.goal.goal.subject(), Some(Value::Output { .. })));
    match g_y.map(|c| &c.body) {
        Some(Body::Evd { .. }) => true,
        Some(Body::Decomp { .. }) => false,
        _ => t.evidence_producing_default,
    }
}

/// RECHECK on `region` for the node and everything present below it.
fn mark_recheck(
    n: &VarAc,
    region: &Bits,
    ctx: &Ctx,
    ann: &mut VarAnnotations,
) -> Result<(), AcError> {
    let r = region.and(&ctx.bits(&n.goal.pc)?);
    if r.is_empty() {
        return Ok(());
    }
    add(&mut ann.goals, &n.id, RegBits::recheck(&r));
    match &n.body {
        Body::Und => {}
        Body::Evd { .. } => add(&mut ann.evidence, &n.id, RegBits::recheck(&r)),
        Body::Decomp { children, .. } => {
            let rs = r.and(&ctx.cover(children)?);
            add(&mut ann.strategies, &n.id, RegBits::recheck(&rs));
            for c in children {
                mark_recheck(c, &rs, ctx, ann)?;
            }
        }
    }
    Ok(())
}

fn substitute(g: &Goal, from: &Value, to: &Value) -> Goal {
    g.map_values(&|v| v.rewrite(&|w| if w == *from { to.clone() } else { w }))
}

pub fn forward_pass_lift(a: &VarAc, ctx: &Ctx) -> Result<(VarAc, VarAnnotations), AcError> {
    let mut ac = a.clone();
    let mut ann = VarAnnotations::default();
    forward(&mut ac, ctx.universe.domain(), ctx, &mut ann)?;
    Ok((ac, ann))
}

fn forward(
    node: &mut VarAc,
    kappa: &Bits,
    ctx: &Ctx,
    ann: &mut VarAnnotations,
) -> Result<(), AcError> {
    let phi = kappa.and(&ctx.bits(&node.goal.pc)?);
    let touched = ctx.delta_region(&node.goal.goal)?;
    node.goal.goal = ctx.delta.update_goal(&node.goal.goal);
    if let Body::Decomp { strategy, .. } = &mut node.body {
        if let Some((_, x)) = strategy.template_input() {
            let renamed = ctx.delta.update(x);
            *strategy = strategy.with_input(renamed);
        }
    }
    let Body::Decomp { strategy, children } = &node.body else {
        return Ok(());
    };
    let phis = phi.and(&ctx.cover(children)?);
    if phis.is_empty() {
        return Ok(());
    }
    let id = node.id.clone();
    if strategy.template_input().is_none() {
        add(&mut ann.strategies, &id, RegBits::recheck(&phis));
        for c in children {
            mark_recheck(c, &phis, ctx, ann)?;
        }
        return Ok(());
    }
    let phid = touched.and(&phis);
    let (value, kappas) = if phid.is_empty() {
        (RegBits::reuse(&phis), vec![phis.clone(); children.len()])
    } else {
        template_regression_lift(node, &phis, &phid, ctx, ann)?
    };
    add(&mut ann.strategies, &id, value);
    if let Body::Decomp { children, .. } = &mut node.body {
        for (c, k) in children.iter_mut().zip(kappas) {
            forward(c, &k, ctx, ann)?;
        }
    }
    Ok(())
}

/// Regression of a template strategy on the configurations `phid` of its
/// region `phis` where its subject changed. Returns the strategy value and
/// the live region of each child.
fn template_regression_lift(
    node: &mut VarAc,
    phis: &Bits,
    phid: &Bits,
    ctx: &Ctx,
    ann: &mut VarAnnotations,
) -> Result<(RegBits, Vec<Bits>), AcError> {
    let id = node.id.clone();
    let goal = node.goal.goal.clone();
    let Body::Decomp { strategy, children } = &mut node.body else {
        unreachable!("called on decompositions")
    };
    let (t, x) = match &strategy.provenance {
        Provenance::TemplateInst {
            template, input, ..
        } => (templates::lookup(template)?, input.clone()),
        Provenance::Manual { .. } => unreachable!("manual strategies are handled by the caller"),
    };
    let subject = goal.subject().cloned().unwrap_or(Value::Undefined);
    let x2 = match (t.id, &subject) {
        (templates::ENUMERATION, Value::Output { output, .. }) => (**output).clone(),
        _ => ctx.delta.update(&x),
    };
    let holds_on = |b: &Bits| -> Bits {
        let mut ok = b.cleared();
        for (i, c) in ctx.configs(b) {
            if t.correctness(&x2.derive(&c), &subject.derive(&c)) {
                ok.set(i);
            }
        }
        ok
    };
    let mut r = holds_on(phid);

    if t.analytic && evidence_producing(t, children) {
        let f = phid.minus(&r);
        for c in children.iter() {
            mark_recheck(c, &f, ctx, ann)?;
        }
        if !r.is_empty() {
            *strategy = strategy.with_input(x2.clone());
            let from = ctx.delta.update(&x);
            for c in children.iter_mut() {
                c.goal.goal = substitute(&ctx.delta.update_goal(&c.goal.goal), &from, &x2);
            }
        }
        let live = phis.minus(&f);
        return Ok((
            RegBits::triple(live.clone(), phis.cleared(), f),
            vec![live; children.len()],
        ));
    }

    let inst = holds_on(phis);
    let parent = VarGoal::new(goal.clone(), ctx.universe.expr(&inst));
    let fresh = if inst.is_empty() {
        Vec::new()
    } else {
        templates::lift_instantiate_goals(t.id, &x2, &parent, ctx.store, ctx.universe)
            .unwrap_or_default()
    };
    let fresh_pcs = fresh
        .iter()
        .map(|g| ctx.bits(&g.pc))
        .collect::<Result<Vec<_>, _>>()?;
    let mut any_goal = phis.cleared();
    for b in &fresh_pcs {
        any_goal.or_assign(b);
    }
    r = r.and(&any_goal);
    let f = phid.minus(&r);
    for c in children.iter() {
        mark_recheck(c, &f, ctx, ann)?;
    }

    // Greedy matching, configuration by configuration.
    let old_pcs = children
        .iter()
        .map(|c| ctx.bits(&c.goal.pc))
        .collect::<Result<Vec<_>, _>>()?;
    let mut taken = vec![phis.cleared(); children.len()];
    let mut done = vec![phis.cleared(); fresh.len()];
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (idx, c) in ctx.configs(&r) {
        let old_keys: Vec<Option<Goal>> = children
            .iter()
            .zip(&old_pcs)
            .map(|(k, pc)| pc.get(idx).then(|| k.goal.goal.derive(&c).match_key()))
            .collect();
        let mut used = vec![false; children.len()];
        for (j, g) in fresh.iter().enumerate() {
            if !fresh_pcs[j].get(idx) {
                continue;
            }
            let key = g.goal.derive(&c).match_key();
            if let Some(i) =
                (0..children.len()).find(|&i| !used[i] && old_keys[i].as_ref() == Some(&key))
            {
                used[i] = true;
                taken[i].set(idx);
                done[j].set(idx);
                *pairs.entry((i, j)).or_default() += 1;
            }
        }
    }
    let mut kappas = Vec::with_capacity(children.len());
    for (i, c) in children.iter_mut().enumerate() {
        let obs = r.and(&old_pcs[i]).minus(&taken[i]);
        kappas.push(phis.minus(&f).minus(&obs));
        if !obs.is_empty() {
            ann.obsolete
                .entry(c.id.clone())
                .or_insert_with(|| obs.cleared())
                .or_assign(&obs);
        }
        let best = pairs
            .iter()
            .filter(|((k, _), _)| *k == i)
            .max_by_key(|((_, j), n)| (**n, std::cmp::Reverse(*j)));
        if let Some(((_, j), _)) = best {
            c.goal.goal = fresh[*j].goal.clone();
        }
    }
    let mut phi_new = phis.cleared();
    let mut unmatched = Vec::new();
    for (j, g) in fresh.iter().enumerate() {
        let n = r.and(&fresh_pcs[j]).minus(&done[j]);
        if !n.is_empty() {
            phi_new.or_assign(&n);
            unmatched.push(VarGoal::new(g.goal.clone(), ctx.universe.expr(&n)));
        }
    }
    if !unmatched.is_empty() {
        ann.new_goals.insert(id, unmatched);
    }
    if !r.is_empty() {
        *strategy = strategy.with_input(x2);
    }
    let reuse = phis.minus(phid).or(&r.minus(&phi_new));
    Ok((RegBits::triple(reuse, r.and(&phi_new), f), kappas))
}

/// Removes obsolete children: each keeps only the configurations where it
/// is still needed.
pub fn extract_core_lift(
    a: &VarAc,
    obsolete: &BTreeMap<String, Bits>,
    u: &Universe,
) -> Result<VarAc, AcError> {
    let mut out = a.clone();
    if let Body::Decomp { children, .. } = &mut out.body {
        let mut kept = Vec::new();
        for c in children.iter() {
            let mut c = extract_core_lift(c, obsolete, u)?;
            if let Some(obs) = obsolete.get(&c.id) {
                let pc = u.restrict(&c.goal.pc)?.minus(obs);
                if pc.is_empty() {
                    continue;
                }
                c.goal.pc = u.expr(&pc);
            }
            kept.push(c);
        }
        if kept.is_empty() {
            out.body = Body::Und;
        } else {
            *children = kept;
        }
    }
    Ok(out)
}

/// Lifted regression of the evidence for the updated goal `g` on `phi`.
pub fn evd_regression_lift(g: &Goal, phi: &Bits, ctx: &Ctx) -> Result<RegBits, AcError> {
    let Goal::Pred { subject, pred } = g else {
        return Ok(RegBits::reuse(phi));
    };
    let phid = ctx.delta_region(g)?.and(phi);
    if phid.is_empty() {
        return Ok(RegBits::reuse(phi));
    }
    let rest = phi.minus(&phid);
    if let (
        RpHandle::Reverify,
        Value::Output {
            analysis, input, ..
        },
    ) = (ctx.registry.handle(&pred.schema), subject)
    {
        let ok = reverify(analysis, input, &phid, ctx)?;
        return Ok(RegBits::triple(
            rest.or(&ok),
            phid.minus(&ok),
            phi.cleared(),
        ));
    }
    Ok(RegBits::triple(rest, phi.cleared(), phid))
}

/// Configurations of `region` in which re-running the analysis yields Ok.
fn reverify(analysis: &str, input: &Value, region: &Bits, ctx: &Ctx) -> Result<Bits, AcError> {
    let Value::Tuple(xs) = input else {
        return Ok(region.cleared());
    };
    let (Some(Value::Model(r)), Some(Value::Spec(spec))) = (xs.first(), xs.get(1)) else {
        return Ok(region.cleared());
    };
    if spec.analysis_id() != analysis {
        return Ok(region.cleared());
    }
    let fts = ctx.store.fts(r)?;
    let mut ok = region.cleared();
    for (v, b) in check_fts_in(fts, spec, &ctx.universe.with_domain(region.clone()))? {
        if v.is_ok() {
            ok.or_assign(&b);
        }
    }
    Ok(ok)
}

pub fn backward_pass_lift(
    core: &VarAc,
    ctx: &Ctx,
    ann: &mut VarAnnotations,
) -> Result<RegBits, AcError> {
    backward(core, ctx.universe.domain(), ctx, ann)
}

fn backward(
    n: &VarAc,
    lambda: &Bits,
    ctx: &Ctx,
    ann: &mut VarAnnotations,
) -> Result<RegBits, AcError> {
    let phi = lambda.and(&ctx.bits(&n.goal.pc)?);
    if phi.is_empty() {
        return Ok(RegBits::reuse(&phi));
    }
    let v = match &n.body {
        Body::Und => RegBits::revise(&phi),
        Body::Evd { .. } => {
            let v = evd_regression_lift(&n.goal.goal, &phi, ctx)?;
            add(&mut ann.evidence, &n.id, v.clone());
            v
        }
        Body::Decomp { children, .. } => {
            let cov = ctx.cover(children)?;
            let covered = phi.and(&cov);
            let st = ann
                .strategies
                .get(&n.id)
                .cloned()
                .unwrap_or_else(|| RegBits::empty(ctx.universe))
                .restrict(&covered);
            let rec = st.recheck.or(&covered.minus(&st.over));
            let live = covered.minus(&rec);
            let mut v = RegBits::revise(&phi.minus(&cov))
                .compose(&RegBits::recheck(&rec))
                .compose(&st.restrict(&live));
            for c in children {
                v = v.compose(&backward(c, &live, ctx, ann)?);
            }
            v
        }
    };
    add(&mut ann.goals, &n.id, v.clone());
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarNodeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regression: Option<VarRegValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<VarRegValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<VarRegValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obsolete: Option<FeatureExpr>,
}

/// Annotations of one product, as the product-level regression reports them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivedAnnotations {
    pub goals: BTreeMap<String, RegValue>,
    pub strategies: BTreeMap<String, RegValue>,
    pub evidence: BTreeMap<String, RegValue>,
    pub obsolete: BTreeSet<String>,
}

#[derive(Clone, Debug)]
pub struct VarRun {
    pub universe: Universe,
    pub updated: VarAc,
    pub core: VarAc,
    pub annotations: VarAnnotations,
    pub root: RegBits,
}

impl VarRun {
    pub fn goal_value(&self, id: &str) -> Option<VarRegValue> {
        self.annotations
            .goals
            .get(id)
            .map(|b| b.to_value(&self.universe))
    }

    pub fn strategy_value(&self, id: &str) -> Option<VarRegValue> {
        self.annotations
            .strategies
            .get(id)
            .map(|b| b.to_value(&self.universe))
    }

    pub fn evidence_value(&self, id: &str) -> Option<VarRegValue> {
        self.annotations
            .evidence
            .get(id)
            .map(|b| b.to_value(&self.universe))
    }

    pub fn root_value(&self) -> VarRegValue {
        self.root.to_value(&self.universe)
    }

    pub fn report(&self) -> BTreeMap<String, VarNodeReport> {
        let mut out = BTreeMap::new();
        self.updated.walk(&mut |n| {
            out.insert(
                n.id.clone(),
                VarNodeReport {
                    regression: self.goal_value(&n.id),
                    strategy: self.strategy_value(&n.id),
                    evidence: self.evidence_value(&n.id),
                    obsolete: self
                        .annotations
                        .obsolete
                        .get(&n.id)
                        .map(|b| self.universe.expr(b)),
                },
            );
        });
        out
    }

    /// The annotations this run assigns to the product `c`.
    pub fn derive(&self, c: &Configuration) -> Result<DerivedAnnotations, AcError> {
        let idx = self.universe.alphabet().index(c)?;
        let at = |m: &BTreeMap<String, RegBits>| -> BTreeMap<String, RegValue> {
            m.iter()
                .filter_map(|(k, v)| v.at(idx).map(|r| (k.clone(), r)))
                .collect()
        };
        Ok(DerivedAnnotations {
            goals: at(&self.annotations.goals),
            strategies: at(&self.annotations.strategies),
            evidence: at(&self.annotations.evidence),
            obsolete: self
                .annotations
                .obsolete
                .iter()
                .filter(|(_, b)| b.get(idx))
                .map(|(k, _)| k.clone())
                .collect(),
        })
    }
}

/// Lifted forward pass, core extraction and lifted backward pass.
pub fn regress_lift(a: &VarAc, ctx: &Ctx) -> Result<VarRun, AcError> {
    let (updated, mut annotations) = forward_pass_lift(a, ctx)?;
    let core = extract_core_lift(&updated, &annotations.obsolete, ctx.universe)?;
    let root = backward_pass_lift(&core, ctx, &mut annotations)?;
    Ok(VarRun {
        universe: ctx.universe.clone(),
        updated,
        core,
        annotations,
        root,
    })
}

/// Whether a goal's annotation depends on the models: predicate goals and
/// their evidence do, propositions do not.
pub(super) fn contingent_goal(g: &Goal) -> bool {
    matches!(g, Goal::Pred { .. })
}

pub(super) fn contingent_strategy(n: &VarAc) -> bool {
    match n.strategy().map(|s| &s.provenance) {
        Some(Provenance::TemplateInst { template, .. }) => !templates::lookup(template)
            .map(|t| t.analytic)
            .unwrap_or(false),
        _ => true,
    }
}
