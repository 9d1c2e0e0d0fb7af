//! Replays of the alarm and pump evolution scenarios against their
//! expected annotations.

mod common;

use std::collections::BTreeMap;

use liftac::accore::schema;
use liftac::featexpr::FeatureExpr;
use liftac::fixtures::{self, LiftedCase};
use liftac::liftreg::{
    regress_lift, regress_variability, Ctx, VarRegValue, VarRun, VariabilityRun,
};
use liftac::regression::{regress, Evolution, RegValue, RpHandle, RpRegistry};

fn e(s: &str) -> FeatureExpr {
    s.parse().unwrap()
}

/// `got` equals `want` restricted to `got.over`, within `domain`.
fn same_within(got: &VarRegValue, want: [&str; 3], domain: &FeatureExpr, names: &[String]) -> bool {
    let parts = [&got.reuse, &got.revise, &got.recheck];
    parts
        .iter()
        .zip(want)
        .all(|(g, w)| common::equiv_within(g, &(e(w) & got.over.clone()), domain, names))
}

fn lifted_run(case: &LiftedCase, registry: &RpRegistry) -> VarRun {
    let ctx = Ctx {
        universe: &case.universe,
        delta: &case.delta,
        store: &case.store,
        registry,
    };
    regress_lift(&case.ac, &ctx).unwrap()
}

fn variability_run(case: &LiftedCase) -> VariabilityRun {
    regress_variability(
        &case.ac,
        &case.delta,
        &case.store,
        &RpRegistry::none(),
        case.partition.as_ref().unwrap(),
    )
    .unwrap()
}

#[test]
fn product_alarm_case() {
    let case = fixtures::alarm_product_case();
    let run = regress(&case.ac, &case.delta, &case.store, &RpRegistry::default()).unwrap();
    let a = &run.annotations;
    assert_eq!(a.strategies["G1"], RegValue::Reuse, "Str1");
    assert_eq!(a.strategies["G3"], RegValue::Revise, "Str2");
    assert_eq!(a.strategies["G6"], RegValue::Reuse, "Str3");
    assert!(!a.evidence.is_empty());
    assert!(a.evidence.values().all(|v| *v == RegValue::Reuse));
    assert_eq!(a.goals["G3"], RegValue::Revise);
    assert_eq!(a.goals["G6"], RegValue::Reuse);
    assert_eq!(run.root, RegValue::Revise);
    assert_eq!(a.new_goals["G3"].len(), 1);
    assert!(a.obsolete.is_empty());
}

#[test]
fn product_alarm_case_without_a_regression_handle_rechecks_evidence() {
    let case = fixtures::alarm_product_case();
    let run = regress(&case.ac, &case.delta, &case.store, &RpRegistry::none()).unwrap();
    assert!(run
        .annotations
        .evidence
        .values()
        .any(|v| *v == RegValue::Recheck));
    assert_eq!(run.root, RegValue::Revise);
}

#[test]
fn product_no_op_evolution_reuses_everything() {
    let case = fixtures::alarm_product_case();
    let run = regress(
        &case.ac,
        &Evolution::new(),
        &case.store,
        &RpRegistry::default(),
    )
    .unwrap();
    assert_eq!(run.root, RegValue::Reuse);
    assert!(run
        .annotations
        .goals
        .values()
        .all(|v| *v == RegValue::Reuse));
}

#[test]
fn lifted_alarm_case() {
    let case = fixtures::alarm_case();
    let run = lifted_run(&case, &RpRegistry::none());
    let names = common::names(&["A", "B"]);
    let domain = e("A | B");
    for id in ["G10", "G6", "G3", "G1"] {
        let v = run.goal_value(id).unwrap();
        assert!(
            same_within(&v, ["!B", "false", "B"], &domain, &names),
            "{id}: {v}"
        );
    }
    assert!(same_within(
        &run.evidence_value("G10").unwrap(),
        ["!B", "false", "B"],
        &domain,
        &names
    ));
    for id in ["G9", "G11", "G12"] {
        let v = run.goal_value(id).unwrap();
        assert!(
            same_within(&v, ["true", "false", "false"], &domain, &names),
            "{id}: {v}"
        );
        assert!(common::equiv_within(&v.over, &e("A"), &domain, &names));
    }
    assert!(same_within(
        &run.strategy_value("G6").unwrap(),
        ["true", "false", "false"],
        &domain,
        &names
    ));
    assert!(same_within(
        &run.strategy_value("G3").unwrap(),
        ["true", "false", "false"],
        &domain,
        &names
    ));
    assert!(same_within(
        &run.root_value(),
        ["!B", "false", "B"],
        &domain,
        &names
    ));
}

#[test]
fn lifted_alarm_case_with_a_new_alarm_revises_the_enumeration() {
    let case = fixtures::alarm_new_state_case();
    let run = lifted_run(&case, &RpRegistry::none());
    let names = common::names(&["A", "B"]);
    let domain = e("A | B");
    assert!(same_within(
        &run.strategy_value("G3").unwrap(),
        ["!B", "B", "false"],
        &domain,
        &names
    ));
    assert!(same_within(
        &run.root_value(),
        ["!B", "B", "false"],
        &domain,
        &names
    ));
    assert_eq!(run.annotations.new_goals["G3"].len(), 1);
}

#[test]
fn lifted_reverification_settles_rechecks() {
    let case = fixtures::alarm_case();
    let run = lifted_run(&case, &RpRegistry::default());
    let names = common::names(&["A", "B"]);
    let v = run.evidence_value("G10").unwrap();
    assert!(
        same_within(&v, ["true", "false", "false"], &e("A | B"), &names),
        "{v}"
    );
}

#[test]
fn lifted_no_op_evolution_reuses_everything() {
    let mut case = fixtures::alarm_case();
    case.delta.0[0].delta = FeatureExpr::False;
    let run = lifted_run(&case, &RpRegistry::none());
    let u = &case.universe;
    assert_eq!(run.root.reuse, u.restrict(case.ac.pc()).unwrap());
    assert!(run.root.revise.is_empty() && run.root.recheck.is_empty());
}

#[test]
fn new_feature_extension() {
    let case = fixtures::alarm_feature_c_case();
    let run = variability_run(&case);
    let part = case.partition.as_ref().unwrap();
    let names = common::names(&["A", "B", "C"]);
    let domain = part.phi_new_model.clone();
    assert!(common::equiv_within(
        &part.phi_new,
        &e("C"),
        &domain,
        &names
    ));
    for id in ["G10", "G6", "G3", "G1"] {
        let v = run.goal_value(id).unwrap();
        assert!(
            same_within(&v, ["!B & !C", "C", "B & !C"], &domain, &names),
            "{id}: {v}"
        );
    }
    for id in ["G11", "G12"] {
        let v = run.goal_value(id).unwrap();
        assert!(
            same_within(&v, ["true", "false", "false"], &domain, &names),
            "{id}: {v}"
        );
        assert!(
            common::equiv_within(&v.over, &e("A"), &domain, &names),
            "{id}: {v}"
        );
    }
    let ob: BTreeMap<&str, Vec<String>> = run
        .obligations
        .iter()
        .map(|(k, gs)| (k.as_str(), gs.iter().map(|g| g.pc.to_string()).collect()))
        .collect();
    assert_eq!(ob.keys().copied().collect::<Vec<_>>(), ["G3"]);
    assert!(common::equiv_within(
        &e(&ob["G3"][0]),
        &e("C"),
        &domain,
        &names
    ));
}

#[test]
fn pump_case() {
    let case = fixtures::pump_case();
    let run = variability_run(&case);
    let part = case.partition.as_ref().unwrap();
    let names: Vec<String> = part.alphabet.names().to_vec();
    let domain = part.phi_new_model.clone();
    let phi_new = "CHECK_INFUSION_RATE & HW_MONITORING & PROGRAMMABLE_INFUSION & VISUAL_DISPLAY \
                   & (MULTIPLE_DRUGS => CHECK_DRUG_TYPE)";
    assert!(common::equiv_within(
        &part.phi_new,
        &e(phi_new),
        &FeatureExpr::True,
        &names
    ));
    let reu = format!("!VISUAL_DISPLAY & !({phi_new})");
    let rec = format!("VISUAL_DISPLAY & !({phi_new})");
    let s1 = run.strategy_value("G4").unwrap();
    assert!(
        same_within(
            &s1,
            [&format!("!({phi_new})"), phi_new, "false"],
            &domain,
            &names
        ),
        "S1: {s1}"
    );
    let sn7 = run.evidence_value("G4.1.2").unwrap();
    assert!(
        same_within(&sn7, [&reu, phi_new, &rec], &domain, &names),
        "Sn7: {sn7}"
    );
    for id in ["G4", "G0"] {
        let v = run.goal_value(id).unwrap();
        assert!(
            same_within(&v, [&reu, phi_new, &rec], &domain, &names),
            "{id}: {v}"
        );
    }
    for id in ["G4.1.1", "G4.1.3", "G4.1.4"] {
        let v = run.goal_value(id).unwrap();
        assert!(
            same_within(&v, ["true", "false", "false"], &domain, &names),
            "{id}: {v}"
        );
        assert!(
            common::equiv_within(&v.over, &e("CHECK_INFUSION_RATE"), &domain, &names),
            "{id}: {v}"
        );
    }
    assert_eq!(run.obligations.keys().collect::<Vec<_>>(), ["G4"]);
}

#[test]
fn pump_feature_model_counts() {
    let part = fixtures::pump_case().partition.unwrap();
    let names: Vec<String> = part.alphabet.names().to_vec();
    let old = e(fixtures::PUMP_FM_OLD) & !FeatureExpr::var(fixtures::PI);
    let count = |f: &FeatureExpr| common::sat_configs(&names, f).len();
    assert_eq!(count(&old), 10);
    assert_eq!(count(&e(fixtures::PUMP_FM_NEW)), 13);
    assert_eq!(count(&part.phi_new), 3);
    assert_eq!(count(&part.phi_reuse), 10);
    assert_eq!(fixtures::pump_old().feature_model().configs().len(), 10);
    assert_eq!(fixtures::pump_new().feature_model().configs().len(), 13);
}

#[test]
fn registry_defaults() {
    let r = RpRegistry::default();
    assert_eq!(r.handle(schema::RESULT_OK), RpHandle::Reverify);
    assert_eq!(r.handle(schema::RESPONDS), RpHandle::Absent);
}
