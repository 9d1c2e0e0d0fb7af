//! Assurance-case fixtures: the product alarm case, the lifted alarm case
//! and its evolutions, the pump case, and a set of cases for support checks.

use super::models;
use crate::accore::{
    schema, Ac, AcError, Goal, Ledger, PredicateRef, Strategy, Value, VarAc, VarGoal,
};
use crate::analyses::{PropertySpec, Query};
use crate::featexpr::{FeatureExpr, Universe};
use crate::liftreg::{VarEvolution, VariabilityPartition};
use crate::plmodel::{Model, ModelRef, ModelStore};
use crate::regression::Evolution;
use crate::templates::{self, lift_instantiate_goals, ENUMERATION, MODEL_CHECK, QUERY_TEMPLATE};

/// A product case together with everything needed to check and regress it.
#[derive(Clone, Debug)]
pub struct ProductCase {
    pub ac: Ac,
    pub store: ModelStore,
    pub ledger: Ledger,
    pub delta: Evolution,
}

#[derive(Clone, Debug)]
pub struct LiftedCase {
    pub ac: VarAc,
    pub store: ModelStore,
    pub ledger: Ledger,
    /// The product line the case was built for.
    pub universe: Universe,
    pub delta: VarEvolution,
    pub partition: Option<VariabilityPartition>,
}

fn fx(s: &str) -> FeatureExpr {
    s.parse().expect("fixture formulas are well-formed")
}

fn alarms() -> Query {
    Query::has_label("Alarm")
}

/// Every alarm state responds with a safe state.
fn alarm_goal(m: &ModelRef) -> Goal {
    Goal::pred(
        Value::model(m.clone()),
        PredicateRef::forall_states(alarms(), PredicateRef::responds("Safe")),
    )
}

fn is_result(g: &Goal) -> bool {
    matches!(g, Goal::Pred { subject: Value::Output { .. }, pred } if pred.schema == schema::RESULT_OK)
}

fn leaf(id: &str, goal: Goal, ledger: &mut Ledger) -> Ac {
    let e = format!("E-{id}");
    if is_result(&goal) {
        ledger.enter_result(&e, &VarGoal::new(goal.clone(), FeatureExpr::True));
    } else {
        ledger.vouch(&e, goal.clone());
    }
    Ac::evd(id, goal, &e)
}

fn var_leaf(id: &str, goal: VarGoal, ledger: &mut Ledger) -> VarAc {
    let e = format!("E-{id}");
    match &goal.goal {
        g if is_result(g) => {
            ledger.enter_result(&e, &goal);
        }
        Goal::Pred { subject, pred } => {
            ledger.vouch_inv(&e, pred.clone(), subject.clone(), goal.pc.clone())
        }
        g => ledger.vouch(&e, g.clone()),
    }
    VarAc::evd(id, goal, &e)
}

/// The model and state a goal is about.
fn elem_of(v: &Value) -> Option<(&ModelRef, &str)> {
    match v {
        Value::Elem { model, id } => Some((model, id)),
        Value::Single { value, .. } => elem_of(value),
        _ => None,
    }
}

fn check_input(goal: &Goal) -> Value {
    let (m, elem) = goal
        .subject()
        .and_then(elem_of)
        .expect("model-check goals are about a state");
    let spec = goal
        .predicate()
        .and_then(|p| p.formalize(elem))
        .expect("predicate formalizes");
    Value::Tuple(vec![Value::model(m.clone()), Value::Spec(spec)])
}

fn query_input(m: &ModelRef) -> Value {
    Value::Tuple(vec![Value::model(m.clone()), Value::Query(alarms())])
}

fn ids(parent: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{parent}.{k}")).collect()
}

/// A model-check decomposition closed entirely by evidence.
fn checked(
    id: &str,
    goal: Goal,
    child_ids: &[String],
    store: &ModelStore,
    ledger: &mut Ledger,
) -> Result<Ac, AcError> {
    let x = check_input(&goal);
    let goals = templates::lookup(MODEL_CHECK)?.instantiate_goals(&x, &goal, store)?;
    let kids = goals
        .into_iter()
        .zip(child_ids)
        .map(|(g, k)| leaf(k, g, ledger))
        .collect();
    Ok(Ac::decomp(
        id,
        goal,
        Strategy::template(&format!("Str-{id}"), MODEL_CHECK, x),
        kids,
    ))
}

fn var_checked(
    id: &str,
    goal: VarGoal,
    child_ids: &[String],
    store: &ModelStore,
    ledger: &mut Ledger,
    u: &Universe,
) -> Result<VarAc, AcError> {
    let x = check_input(&goal.goal);
    let goals = lift_instantiate_goals(MODEL_CHECK, &x, &goal, store, u)?;
    let kids = goals
        .into_iter()
        .zip(child_ids)
        .map(|(g, k)| var_leaf(k, g, ledger))
        .collect();
    Ok(VarAc::decomp(
        id,
        goal,
        Strategy::template(&format!("Str-{id}"), MODEL_CHECK, x),
        kids,
    ))
}

/// The product alarm case: a query over the alarm states, an enumeration
/// of them, and a model check per alarm. Ids: G1 root; G2, G3, G4 from the
/// query; G5, G6, G7 per alarm; G8, G9, G10 below G6. The evolution adds
/// a fourth alarm.
pub fn alarm_product_case() -> ProductCase {
    build_alarm_product().expect("fixture builds")
}

fn build_alarm_product() -> Result<ProductCase, AcError> {
    let mut store = ModelStore::new();
    let m = store.insert("M", "v1", Model::Lts(models::alarm_product_old()));
    store.insert("M", "v2", Model::Lts(models::alarm_product_new()));
    let mut ledger = Ledger::new();
    let root = alarm_goal(&m);
    let xq = query_input(&m);
    let q = templates::lookup(QUERY_TEMPLATE)?.instantiate_goals(&xq, &root, &store)?;
    let g_y = q[1].clone();
    let Some(Value::Output { output, .. }) = g_y.subject() else {
        unreachable!("query g_Y is an output")
    };
    let xe = (**output).clone();
    let per_alarm = templates::lookup(ENUMERATION)?.instantiate_goals(&xe, &g_y, &store)?;
    let mut alarm_nodes = Vec::new();
    for (k, g) in per_alarm.into_iter().enumerate() {
        let id = format!("G{}", 5 + k);
        let child_ids = if id == "G6" {
            vec!["G8".into(), "G9".into(), "G10".into()]
        } else {
            ids(&id, 3)
        };
        let mut node = checked(&id, g, &child_ids, &store, &mut ledger)?;
        if id == "G6" {
            relabel(&mut node, "Str3");
        }
        alarm_nodes.push(node);
    }
    let g3 = Ac::decomp(
        "G3",
        g_y,
        Strategy::template("Str2", ENUMERATION, xe),
        alarm_nodes,
    );
    let kids = vec![
        leaf("G2", q[0].clone(), &mut ledger),
        g3,
        leaf("G4", q[2].clone(), &mut ledger),
    ];
    let ac = Ac::decomp(
        "G1",
        root,
        Strategy::template("Str1", QUERY_TEMPLATE, xq),
        kids,
    );
    Ok(ProductCase {
        ac,
        store,
        ledger,
        delta: Evolution::new().with("M", None, "v1", "v2"),
    })
}

fn relabel<G>(n: &mut crate::accore::Node<G>, label: &str) {
    if let crate::accore::Body::Decomp { strategy, .. } = &mut n.body {
        strategy.label = label.to_string();
    }
}

/// The lifted alarm case over {A, B}: lifted query (G2 to G5, G5 the
/// lifting goal), lifted enumeration into G6 (a1, A), G7 (a2, B) and
/// G8 (a3, A ∧ B), and a lifted model check per alarm; G6 has G9 to G12.
fn lifted_alarm_case(
    store: ModelStore,
    m: &ModelRef,
    universe: Universe,
) -> Result<(VarAc, Ledger), AcError> {
    let u = &universe;
    let mut ledger = Ledger::new();
    let root = VarGoal::new(alarm_goal(m), FeatureExpr::True);
    let xq = query_input(m);
    let q = lift_instantiate_goals(QUERY_TEMPLATE, &xq, &root, &store, u)?;
    let g_y = q[1].clone();
    let Some(Value::Output { output, .. }) = g_y.goal.subject() else {
        unreachable!("query g_Y is an output")
    };
    let xe = (**output).clone();
    let per_alarm = lift_instantiate_goals(ENUMERATION, &xe, &g_y, &store, u)?;
    let mut alarm_nodes = Vec::new();
    for (k, g) in per_alarm.into_iter().enumerate() {
        let id = format!("G{}", 6 + k);
        let child_ids = if id == "G6" {
            ["G9", "G10", "G11", "G12"].map(String::from).to_vec()
        } else {
            ids(&id, 4)
        };
        let mut node = var_checked(&id, g, &child_ids, &store, &mut ledger, u)?;
        if id == "G6" {
            relabel(&mut node, "Str3");
        }
        alarm_nodes.push(node);
    }
    let g3 = VarAc::decomp(
        "G3",
        g_y,
        Strategy::template("Str2", ENUMERATION, xe),
        alarm_nodes,
    );
    let kids = vec![
        var_leaf("G2", q[0].clone(), &mut ledger),
        g3,
        var_leaf("G4", q[2].clone(), &mut ledger),
        var_leaf("G5", q[3].clone(), &mut ledger),
    ];
    Ok((
        VarAc::decomp(
            "G1",
            root,
            Strategy::template("Str1", QUERY_TEMPLATE, xq),
            kids,
        ),
        ledger,
    ))
}

fn alarm_family_with(new: crate::plmodel::Fts) -> Result<LiftedCase, AcError> {
    let mut store = ModelStore::new();
    let m = store.insert("M", "v1", Model::Fts(models::alarm_family_old()));
    store.insert("M", "v2", Model::Fts(new));
    let universe = models::alarm_family_old().feature_model().universe();
    let (ac, ledger) = lifted_alarm_case(store.clone(), &m, universe.clone())?;
    let delta = VarEvolution(vec![VarEvolution::between(
        "M", "v1", "v2", &store, &universe, true,
    )?]);
    Ok(LiftedCase {
        ac,
        store,
        ledger,
        universe,
        delta,
        partition: None,
    })
}

/// The lifted alarm case evolved by a change confined to B that adds no
/// alarm.
pub fn alarm_case() -> LiftedCase {
    alarm_family_with(models::alarm_family_new()).expect("fixture builds")
}

/// The lifted alarm case evolved by a B-change that adds an alarm and
/// breaks another.
pub fn alarm_new_state_case() -> LiftedCase {
    alarm_family_with(models::alarm_family_new_state()).expect("fixture builds")
}

/// The B-change together with a new feature C contributing an alarm.
pub fn alarm_feature_c_case() -> LiftedCase {
    build_alarm_feature_c().expect("fixture builds")
}

fn build_alarm_feature_c() -> Result<LiftedCase, AcError> {
    let mut store = ModelStore::new();
    let m = store.insert("M", "v1", Model::Fts(models::alarm_family_old()));
    let new = models::alarm_family_new_c();
    let partition = VariabilityPartition::compute(
        models::alarm_family_old().feature_model(),
        new.feature_model(),
    )?;
    store.insert("M", "v2", Model::Fts(new));
    let universe = models::alarm_family_old().feature_model().universe();
    let (ac, ledger) = lifted_alarm_case(store.clone(), &m, universe.clone())?;
    let reuse = partition.universe().with_domain(partition.reuse_bits());
    let delta = VarEvolution(vec![VarEvolution::between(
        "M", "v1", "v2", &store, &reuse, true,
    )?]);
    Ok(LiftedCase {
        ac,
        store,
        ledger,
        universe,
        delta,
        partition: Some(partition),
    })
}

/// The pump case: after an alarm is raised no infusion follows. Ids: G0
/// root; G1 (query adequacy), G4 (alarm set), G2 (analysis soundness), G3
/// (lifting) from the lifted query; G4 enumerated by S1 into G4.1
/// (dose-rate alarm), G4.2, G4.3; each checked by a lifted model check
/// with children `.1` to `.4`. The dose-rate alarm's result is Sn7.
pub fn pump_case() -> LiftedCase {
    build_pump().expect("fixture builds")
}

fn build_pump() -> Result<LiftedCase, AcError> {
    let mut store = ModelStore::new();
    let old = models::pump_old();
    let new = models::pump_new();
    let m = store.insert("P", "v1", Model::Fts(old.clone()));
    store.insert("P", "v2", Model::Fts(new.clone()));
    let universe = old.feature_model().universe();
    let u = &universe;
    let partition = VariabilityPartition::compute(old.feature_model(), new.feature_model())?;
    let mut ledger = Ledger::new();

    let pred = PredicateRef::forall_states(alarms(), PredicateRef::after_safe("Infusing"));
    let root = VarGoal::new(Goal::pred(Value::model(m.clone()), pred), FeatureExpr::True);
    let xq = query_input(&m);
    let q = lift_instantiate_goals(QUERY_TEMPLATE, &xq, &root, &store, u)?;
    let g_y = q[1].clone();
    let Some(Value::Output { output, .. }) = g_y.goal.subject() else {
        unreachable!("query g_Y is an output")
    };
    let xe = (**output).clone();
    let per_alarm = lift_instantiate_goals(ENUMERATION, &xe, &g_y, &store, u)?;
    // Dose-rate alarm first, as in the published fragment.
    let order = [
        "Alrm_DoseRateHardLimitsViolationS",
        "Alrm_HardwareFailureS",
        "Alrm_WrongDrugS",
    ];
    let mut alarm_nodes = Vec::new();
    for (k, name) in order.iter().enumerate() {
        let g = per_alarm
            .iter()
            .find(|g| g.goal.subject().and_then(elem_of).map(|(_, e)| e) == Some(*name))
            .expect("every alarm is enumerated")
            .clone();
        let id = format!("G4.{}", k + 1);
        let mut node = var_checked(&id, g, &ids(&id, 4), &store, &mut ledger, u)?;
        if k == 0 {
            rename_evidence(&mut node, "G4.1.2", "Sn7", &mut ledger);
        }
        alarm_nodes.push(node);
    }
    let g4 = VarAc::decomp(
        "G4",
        g_y,
        Strategy::template("S1", ENUMERATION, xe),
        alarm_nodes,
    );
    let kids = vec![
        var_leaf("G1", q[0].clone(), &mut ledger),
        g4,
        var_leaf("G2", q[2].clone(), &mut ledger),
        var_leaf("G3", q[3].clone(), &mut ledger),
    ];
    let ac = VarAc::decomp(
        "G0",
        root,
        Strategy::template("S0", QUERY_TEMPLATE, xq),
        kids,
    );
    let reuse = partition.universe().with_domain(partition.reuse_bits());
    let delta = VarEvolution(vec![VarEvolution::between(
        "P", "v1", "v2", &store, &reuse, true,
    )?]);
    Ok(LiftedCase {
        ac,
        store,
        ledger,
        universe,
        delta,
        partition: Some(partition),
    })
}

fn rename_evidence(a: &mut VarAc, node: &str, to: &str, ledger: &mut Ledger) {
    let Some(n) = a.find_mut(node) else { return };
    let crate::accore::Body::Evd { evidence } = &mut n.body else {
        return;
    };
    let from = std::mem::replace(evidence, to.to_string());
    if let Some(r) = ledger.records.remove(&from) {
        ledger.records.insert(to.to_string(), r);
    }
    for e in ledger.entries.iter_mut().filter(|e| e.evidence == from) {
        e.evidence = to.to_string();
    }
}

/// Requirement goals R1 to R4 of a product line over {A, B} with Φ = true,
/// present under true, A, B and A ∧ B, below a reviewed manual strategy.
pub fn requirements_case() -> LiftedCase {
    build_requirements(true).expect("fixture builds")
}

fn requirement(m: &ModelRef, trigger: &str) -> Goal {
    Goal::pred(
        Value::model(m.clone()),
        PredicateRef::satisfies(PropertySpec::response(trigger, "Safe")),
    )
}

fn build_requirements(evidenced: bool) -> Result<LiftedCase, AcError> {
    let mut store = ModelStore::new();
    let m = store.insert("M", "v1", Model::Fts(models::alarm_family_open()));
    let universe = models::alarm_family_open().feature_model().universe();
    let mut ledger = Ledger::new();
    let reqs = [
        ("G2", "s0", "true"),
        ("G3", "a1", "A"),
        ("G4", "a2", "B"),
        ("G5", "a3", "A & B"),
    ];
    let kids = reqs
        .iter()
        .map(|(id, trig, pc)| {
            let g = VarGoal::new(requirement(&m, trig), fx(pc));
            if evidenced {
                var_leaf(id, g, &mut ledger)
            } else {
                VarAc::und(id, g)
            }
        })
        .collect();
    let root = VarGoal::new(alarm_goal(&m), FeatureExpr::True);
    let ac = VarAc::decomp("G1", root, Strategy::manual("Str-reqs", true), kids);
    Ok(LiftedCase {
        ac,
        store,
        ledger,
        universe,
        delta: VarEvolution::new(),
        partition: None,
    })
}

/// Cases for checking lifted support against per-product support, with
/// whether each is expected to be supported.
pub fn support_cases() -> Vec<(&'static str, LiftedCase, bool)> {
    let mut out = vec![
        ("requirements", requirements_case(), true),
        ("lifted-alarms", alarm_case(), true),
        ("pump", pump_case(), true),
    ];

    // Children present only under A and under B leave ¬A ∧ ¬B uncovered.
    let mut gap = requirements_case();
    if let crate::accore::Body::Decomp { children, .. } = &mut gap.ac.body {
        children.retain(|c| c.id == "G3" || c.id == "G4");
    }
    out.push(("coverage-gap", gap, false));

    // Evidence vouched only under A for a goal present everywhere.
    let mut partial = requirements_case();
    for e in partial
        .ledger
        .entries
        .iter_mut()
        .filter(|e| e.evidence == "E-G2")
    {
        if let crate::accore::Claim::Inv { pc, .. } = &mut e.claim {
            *pc = FeatureExpr::var("A");
        }
    }
    out.push(("partial-evidence", partial, false));

    // An undeveloped goal under B.
    let mut open = requirements_case();
    if let Some(n) = open.ac.find_mut("G4") {
        n.body = crate::accore::Body::Und;
    }
    out.push(("open-goal", open, false));

    // The alarm case on a model whose a2 acknowledgement breaks under B.
    out.push((
        "failing-check",
        build_broken_alarms().expect("fixture builds"),
        false,
    ));
    out
}

fn build_broken_alarms() -> Result<LiftedCase, AcError> {
    let mut store = ModelStore::new();
    let m = store.insert("M", "v1", Model::Fts(models::alarm_family_new_state()));
    let universe = models::alarm_family_new_state().feature_model().universe();
    let (ac, ledger) = lifted_alarm_case(store.clone(), &m, universe.clone())?;
    Ok(LiftedCase {
        ac,
        store,
        ledger,
        universe,
        delta: VarEvolution::new(),
        partition: None,
    })
}
