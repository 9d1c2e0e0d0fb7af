//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p liftac --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use liftac::accore::{schema, supp, Ac, AcError, Env, Goal, PredicateRef, Value, VarGoal};
use liftac::analyses::{
    check_after_action_fts, check_after_action_lts, check_response_fts, check_response_lts,
    query_fts, query_lts, PropertySpec, Query,
};
use liftac::featexpr::{is_partition, Alphabet, Configuration, FeatureExpr, Universe};
use liftac::fixtures::{self, LiftedCase};
use liftac::liftreg::{
    min_reg_lift, product_mismatches, regress_lift, regress_variability, soundness_violations, Ctx,
    VarEvolution, VarRegValue, VarRun,
};
use liftac::plmodel::{Fts, Model, ModelError, ModelStore};
use liftac::regression::{min_reg, regress, RegValue, RpRegistry};
use liftac::templates::{self, DOMAIN_DECOMP, ENUMERATION, MODEL_CHECK, QUERY_TEMPLATE};
use liftac::varac::{derive_ledger, derive_var_ac, lift_instantiate, supp_var, VarEnv};

/// Randomized instances per lifted template.
const TEMPLATE_INSTANCES: usize = 20;
/// Randomized pairs and triples for the value algebra.
const ALGEBRA_SAMPLES: usize = 1000;
/// Largest fixture product line used for the analysis check.
const MAX_STATES: usize = 12;
const MAX_FEATURES: usize = 6;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e(s: &str) -> FeatureExpr {
    s.parse().unwrap()
}

// ---------------------------------------------------------------- 1

fn derivation_fidelity() -> Outcome {
    let m = fixtures::xor_loop();
    let lts = m
        .derive(&Configuration::new(["B"]))
        .map_err(|e| e.to_string())?;
    let states: Vec<&str> = lts.states().iter().map(|s| s.id.as_str()).collect();
    ensure!(states == ["s0", "s1"], "states under {{B}}: {states:?}");
    let trs: BTreeSet<(String, String, String)> = common::lts_shape(&lts).1;
    let want: BTreeSet<(String, String, String)> = [("s0", "a", "s1"), ("s1", "b", "s0")]
        .iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect();
    ensure!(trs == want, "transitions under {{B}}: {trs:?}");
    let both = Configuration::new(["A", "B"]);
    ensure!(
        m.derive(&both) == Err(ModelError::InvalidConfiguration(both.clone())),
        "{{A,B}} was not rejected"
    );
    Ok(())
}

// ---------------------------------------------------------------- 2

fn analysis_lines() -> Vec<(&'static str, Fts)> {
    vec![
        ("xor_loop", fixtures::xor_loop()),
        (
            "xor_loop_with_self_loop",
            fixtures::xor_loop_with_self_loop(),
        ),
        ("alarm-family", fixtures::alarm_family_new_state()),
        ("response-under-b", fixtures::response_under_b()),
        ("after-action-under-c", fixtures::after_action_under_c()),
        ("pump", fixtures::pump_new()),
    ]
}

fn analyses_lift() -> Outcome {
    let mut products = 0;
    for (name, m) in analysis_lines() {
        ensure!(
            m.states().len() <= MAX_STATES && m.alphabet().len() <= MAX_FEATURES,
            "{name} too large"
        );
        let configs = common::valid_configs(&m);
        let products_of: Vec<_> = configs.iter().map(|c| m.derive(c).unwrap()).collect();
        products += configs.len();
        let labels: BTreeSet<String> = m
            .states()
            .iter()
            .flat_map(|s| s.labels.iter().cloned())
            .collect();
        let props: BTreeSet<String> = labels
            .iter()
            .cloned()
            .chain(m.states().iter().map(|s| s.id.clone()))
            .collect();
        let actions: BTreeSet<&str> = m.transitions().iter().map(|t| t.action.as_str()).collect();

        let mut queries: Vec<Query> = labels.iter().map(|l| Query::has_label(l)).collect();
        queries.push(Query::name_prefix("Alrm_"));
        for q in &queries {
            let lifted = query_fts(&m, q, &FeatureExpr::True).map_err(|e| e.to_string())?;
            for (c, p) in configs.iter().zip(&products_of) {
                ensure!(
                    lifted.derive(c) == query_lts(p, q),
                    "{name}: query {q:?} at {c}"
                );
            }
        }
        for t in &props {
            for r in &props {
                let lifted =
                    check_response_fts(&m, t, r, &FeatureExpr::True).map_err(|e| e.to_string())?;
                for (c, p) in configs.iter().zip(&products_of) {
                    let got = lifted
                        .derive(m.feature_model(), c)
                        .map_err(|e| e.to_string())?;
                    ensure!(
                        got.is_ok() == check_response_lts(p, t, r).is_ok(),
                        "{name}: {t} => {r} at {c}"
                    );
                }
            }
        }
        for a in &actions {
            for f in &props {
                let lifted = check_after_action_fts(&m, a, f, &FeatureExpr::True)
                    .map_err(|e| e.to_string())?;
                for (c, p) in configs.iter().zip(&products_of) {
                    let got = lifted
                        .derive(m.feature_model(), c)
                        .map_err(|e| e.to_string())?;
                    ensure!(
                        got.is_ok() == check_after_action_lts(p, a, f).is_ok(),
                        "{name}: after {a} not {f} at {c}"
                    );
                }
            }
        }
    }
    ensure!(products > 0, "no products checked");
    Ok(())
}

// ---------------------------------------------------------------- 3

fn support_lift() -> Outcome {
    let cases = fixtures::support_cases();
    ensure!(cases.len() >= 5, "only {} support cases", cases.len());
    ensure!(
        cases.iter().any(|(n, _, _)| *n == "coverage-gap"),
        "no coverage-gap case"
    );
    for (name, case, _) in &cases {
        let u = &case.universe;
        for node in case.ac.nodes() {
            let env = VarEnv {
                store: &case.store,
                ledger: &case.ledger,
                universe: u,
            };
            let lifted = supp_var(node, &env).map_err(|e| e.to_string())?;
            let mut enumerated = true;
            for c in u.configs(&u.restrict(node.pc()).unwrap()) {
                let ledger = derive_ledger(&case.ledger, &c);
                let a = derive_var_ac(node, &c).map_err(|e| e.to_string())?;
                enumerated &=
                    supp(&a, &Env::new(&case.store, &ledger)).map_err(|e| e.to_string())?;
            }
            ensure!(
                lifted == enumerated,
                "{name}: subtree {} lifted {lifted}, enumerated {enumerated}",
                node.id
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 4

fn shape(a: &Ac) -> (Goal, Option<Value>, Vec<Goal>) {
    let mut kids: Vec<Goal> = a
        .children()
        .iter()
        .filter(|k| !matches!(&k.goal, Goal::Prop { prop } if prop.schema == schema::LIFT_CORRECT))
        .map(|k| k.goal.clone())
        .collect();
    kids.sort();
    (
        a.goal.clone(),
        a.strategy()
            .and_then(|s| s.template_input())
            .map(|(_, x)| x.clone()),
        kids,
    )
}

/// `Ok(None)` when the random instance is not a valid instantiation.
fn template_instance(
    t: &str,
    x: &Value,
    parent: &VarGoal,
    store: &ModelStore,
    u: &Universe,
) -> Result<Option<()>, String> {
    let lifted = match lift_instantiate(t, x, "P", parent, "S", store, u) {
        Ok(a) => a,
        Err(AcError::VarCorrectness { .. } | AcError::EmptyInstantiation(_)) => return Ok(None),
        Err(e) => return Err(format!("{t}: {e}")),
    };
    for c in u.configs(&u.restrict(&parent.pc).unwrap()) {
        let got = derive_var_ac(&lifted, &c).map_err(|e| e.to_string())?;
        match templates::instantiate(t, &x.derive(&c), "P", &parent.goal.derive(&c), "S", store) {
            Ok(want) => ensure!(shape(&got) == shape(&want), "{t} at {c}"),
            Err(AcError::EmptyInstantiation(_)) => ensure!(
                got.children().is_empty(),
                "{t} at {c}: expected no children"
            ),
            Err(e) => return Err(format!("{t} at {c}: {e}")),
        }
    }
    Ok(Some(()))
}

fn abc() -> Vec<String> {
    common::names(&["A", "B", "C"])
}

fn random_universe(r: &mut StdRng) -> Universe {
    loop {
        let phi = common::random_expr(r, &abc(), 2);
        if !common::sat_configs(&abc(), &phi).is_empty() {
            return Universe::new(Alphabet::new(abc()).unwrap(), &phi).unwrap();
        }
    }
}

fn random_var_set(r: &mut StdRng, max: usize) -> Value {
    let n = r.gen_range(1..=max);
    Value::var_set(
        (0..n)
            .map(|_| {
                (
                    Value::Int(r.gen_range(0..6)),
                    common::random_expr(r, &abc(), 2),
                )
            })
            .collect(),
    )
}

fn until_valid(t: &str, mut next: impl FnMut() -> Result<Option<()>, String>) -> Outcome {
    let (mut valid, mut tries) = (0, 0);
    while valid < TEMPLATE_INSTANCES {
        tries += 1;
        ensure!(
            tries < 100 * TEMPLATE_INSTANCES,
            "{t}: too few valid instances ({valid})"
        );
        if next()?.is_some() {
            valid += 1;
        }
    }
    Ok(())
}

fn template_lift() -> Outcome {
    let even = PredicateRef::forall(PredicateRef::is_even());
    let empty = ModelStore::new();

    let mut r = StdRng::seed_from_u64(21);
    until_valid(ENUMERATION, || {
        let u = random_universe(&mut r);
        let x = random_var_set(&mut r, 4);
        let parent = VarGoal::new(
            Goal::pred(x.clone(), even.clone()),
            common::random_expr(&mut r, &abc(), 1),
        );
        template_instance(ENUMERATION, &x, &parent, &empty, &u)
    })?;

    let mut r = StdRng::seed_from_u64(22);
    until_valid(DOMAIN_DECOMP, || {
        let u = random_universe(&mut r);
        let subject = random_var_set(&mut r, 4);
        let mut family = vec![subject.clone()];
        for _ in 0..r.gen_range(0..3) {
            family.push(random_var_set(&mut r, 3));
        }
        let parent = VarGoal::new(
            Goal::pred(subject, even.clone()),
            common::random_expr(&mut r, &abc(), 1),
        );
        template_instance(DOMAIN_DECOMP, &Value::Tuple(family), &parent, &empty, &u)
    })?;

    let models = [
        fixtures::alarm_family_new_state(),
        fixtures::response_under_b(),
        fixtures::after_action_under_c(),
        fixtures::pump_new(),
    ];
    let mut r = StdRng::seed_from_u64(23);
    until_valid(MODEL_CHECK, || {
        let m = models[r.gen_range(0..models.len())].clone();
        let mut store = ModelStore::new();
        let mr = store.insert("M", "v1", Model::Fts(m.clone()));
        let u = m.feature_model().universe();
        let pc = common::random_expr(&mut r, m.alphabet().names(), 1);
        let (subject, pred, spec) = if r.gen_bool(0.5) {
            let s = m.states()[r.gen_range(0..m.states().len())].id.clone();
            (
                Value::elem(&mr, &s),
                PredicateRef::responds("Safe"),
                PropertySpec::response(&s, "Safe"),
            )
        } else {
            let t = m.transitions()[r.gen_range(0..m.transitions().len())]
                .action
                .clone();
            (
                Value::elem(&mr, &t),
                PredicateRef::after_safe("Infusing"),
                PropertySpec::after_action(&t, "Infusing"),
            )
        };
        let x = Value::Tuple(vec![Value::model(mr), Value::Spec(spec)]);
        let parent = VarGoal::new(Goal::pred(subject, pred), pc);
        template_instance(MODEL_CHECK, &x, &parent, &store, &u)
    })?;

    let mut r = StdRng::seed_from_u64(24);
    until_valid(QUERY_TEMPLATE, || {
        let m = models[r.gen_range(0..models.len())].clone();
        let mut store = ModelStore::new();
        let mr = store.insert("M", "v1", Model::Fts(m.clone()));
        let u = m.feature_model().universe();
        let pc = common::random_expr(&mut r, m.alphabet().names(), 1);
        let q = [
            Query::has_label("Alarm"),
            Query::has_label("Safe"),
            Query::name_prefix("Alrm_"),
        ][r.gen_range(0..3)]
        .clone();
        let pred = PredicateRef::forall_states(q.clone(), PredicateRef::responds("Safe"));
        let x = Value::Tuple(vec![Value::model(mr.clone()), Value::Query(q)]);
        let parent = VarGoal::new(Goal::pred(Value::model(mr), pred), pc);
        template_instance(QUERY_TEMPLATE, &x, &parent, &store, &u)
    })
}

// ---------------------------------------------------------------- 5

const SIX: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn random_value(r: &mut StdRng, names: &[String]) -> VarRegValue {
    let over = common::random_expr(r, names, 3);
    let p = common::random_expr(r, names, 3);
    let q = common::random_expr(r, names, 3);
    VarRegValue {
        reuse: over.clone() & p.clone(),
        revise: over.clone() & !p.clone() & q.clone(),
        recheck: over.clone() & !p & !q,
        over,
    }
}

fn product_value(v: &VarRegValue, c: &Configuration) -> Option<RegValue> {
    if !common::eval(&v.over, &c.0) {
        return None;
    }
    [
        (RegValue::Reuse, &v.reuse),
        (RegValue::Revise, &v.revise),
        (RegValue::Recheck, &v.recheck),
    ]
    .into_iter()
    .find(|(_, e)| common::eval(e, &c.0))
    .map(|(r, _)| r)
}

fn algebra() -> Outcome {
    let names = common::names(&SIX);
    let f = Alphabet::new(SIX).unwrap();
    let configs = common::subsets(&names);
    let partition = |v: &VarRegValue| {
        is_partition(
            &[v.reuse.clone(), v.revise.clone(), v.recheck.clone()],
            &v.over,
            &f,
        )
        .unwrap()
    };
    let mut r = StdRng::seed_from_u64(25);
    for i in 0..ALGEBRA_SAMPLES {
        let (a, b, c) = (
            random_value(&mut r, &names),
            random_value(&mut r, &names),
            random_value(&mut r, &names),
        );
        let err = |e: liftac::featexpr::ExprError| e.to_string();
        let ab = a.compose(&b, &f).map_err(err)?;
        let ba = b.compose(&a, &f).map_err(err)?;
        let left = ab.compose(&c, &f).map_err(err)?;
        let right = a
            .compose(&b.compose(&c, &f).map_err(err)?, &f)
            .map_err(err)?;
        let folded = min_reg_lift(&[a.clone(), b.clone(), c.clone()], &f)
            .map_err(err)?
            .ok_or("empty fold")?;
        for v in [&ab, &ba, &left, &right, &folded] {
            ensure!(partition(v), "sample {i}: {v} is not a partition");
        }
        ensure!(
            ab.equivalent(&ba, &f).map_err(err)?,
            "sample {i}: not commutative"
        );
        ensure!(
            left.equivalent(&right, &f).map_err(err)?,
            "sample {i}: not associative"
        );
        for cfg in &configs {
            let pair: Vec<RegValue> = [product_value(&a, cfg), product_value(&b, cfg)]
                .into_iter()
                .flatten()
                .collect();
            ensure!(ab.derive(cfg) == min_reg(pair), "sample {i}: pair at {cfg}");
            let triple: Vec<RegValue> = [
                product_value(&a, cfg),
                product_value(&b, cfg),
                product_value(&c, cfg),
            ]
            .into_iter()
            .flatten()
            .collect();
            ensure!(
                folded.derive(cfg) == min_reg(triple),
                "sample {i}: triple at {cfg}"
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 6

fn product_replay() -> Outcome {
    let case = fixtures::alarm_product_case();
    let run = regress(&case.ac, &case.delta, &case.store, &RpRegistry::default())
        .map_err(|e| e.to_string())?;
    let a = &run.annotations;
    ensure!(
        a.strategies.get("G1") == Some(&RegValue::Reuse),
        "Str1 {:?}",
        a.strategies.get("G1")
    );
    ensure!(
        a.strategies.get("G3") == Some(&RegValue::Revise),
        "Str2 {:?}",
        a.strategies.get("G3")
    );
    ensure!(
        a.strategies.get("G6") == Some(&RegValue::Reuse),
        "Str3 {:?}",
        a.strategies.get("G6")
    );
    ensure!(
        !a.evidence.is_empty() && a.evidence.values().all(|v| *v == RegValue::Reuse),
        "evidence {:?}",
        a.evidence
    );
    ensure!(
        a.goals.get("G3") == Some(&RegValue::Revise),
        "G3 {:?}",
        a.goals.get("G3")
    );
    ensure!(run.root == RegValue::Revise, "root {:?}", run.root);
    Ok(())
}

// ---------------------------------------------------------------- 7

fn same_within(got: &VarRegValue, want: [&str; 3], domain: &FeatureExpr, names: &[String]) -> bool {
    [&got.reuse, &got.revise, &got.recheck]
        .iter()
        .zip(want)
        .all(|(g, w)| common::equiv_within(g, &(e(w) & got.over.clone()), domain, names))
}

fn lifted_replay() -> Outcome {
    let case = fixtures::alarm_case();
    let registry = RpRegistry::none();
    let ctx = Ctx {
        universe: &case.universe,
        delta: &case.delta,
        store: &case.store,
        registry: &registry,
    };
    let run = regress_lift(&case.ac, &ctx).map_err(|e| e.to_string())?;
    let names = common::names(&["A", "B"]);
    let domain = e("A | B");
    for id in ["G10", "G6", "G3"] {
        let v = run.goal_value(id).ok_or(format!("{id} missing"))?;
        ensure!(
            same_within(&v, ["!B", "false", "B"], &domain, &names),
            "{id}: {v}"
        );
    }

    let case = fixtures::alarm_feature_c_case();
    let part = case.partition.as_ref().unwrap();
    let run = regress_variability(&case.ac, &case.delta, &case.store, &registry, part)
        .map_err(|e| e.to_string())?;
    let names = common::names(&["A", "B", "C"]);
    let domain = part.phi_new_model.clone();
    for id in ["G10", "G6", "G3"] {
        let v = run.goal_value(id).ok_or(format!("{id} missing"))?;
        ensure!(
            same_within(&v, ["!B & !C", "C", "B & !C"], &domain, &names),
            "with C, {id}: {v}"
        );
    }
    for id in ["G11", "G12"] {
        let v = run.goal_value(id).ok_or(format!("{id} missing"))?;
        ensure!(
            same_within(&v, ["true", "false", "false"], &domain, &names),
            "with C, {id}: {v}"
        );
        ensure!(
            common::equiv_within(&v.over, &e("A"), &domain, &names),
            "with C, {id} over {}",
            v.over
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- 8, 10

fn quiet_case() -> LiftedCase {
    let mut quiet = fixtures::alarm_case();
    quiet
        .store
        .insert("M", "v2", Model::Fts(fixtures::alarm_family_old()));
    quiet.delta = VarEvolution(vec![VarEvolution::between(
        "M",
        "v1",
        "v2",
        &quiet.store,
        &quiet.universe,
        true,
    )
    .unwrap()]);
    quiet
}

fn evolutions() -> Vec<(&'static str, LiftedCase)> {
    vec![
        ("b-change", fixtures::alarm_case()),
        ("b-change-new-alarm", fixtures::alarm_new_state_case()),
        ("b-change-with-c", fixtures::alarm_feature_c_case()),
        ("pump", fixtures::pump_case()),
        ("no-op", quiet_case()),
    ]
}

fn lifted_run(case: &LiftedCase, registry: &RpRegistry) -> Result<VarRun, String> {
    let u = match &case.partition {
        Some(p) => p.universe().with_domain(p.reuse_bits()),
        None => case.universe.clone(),
    };
    let ctx = Ctx {
        universe: &u,
        delta: &case.delta,
        store: &case.store,
        registry,
    };
    regress_lift(&case.ac, &ctx).map_err(|e| e.to_string())
}

fn registries() -> [(&'static str, RpRegistry); 2] {
    [
        ("no-handle", RpRegistry::none()),
        ("reverify", RpRegistry::default()),
    ]
}

fn lifted_equivalence() -> Outcome {
    for (name, case) in evolutions() {
        for (rname, registry) in registries() {
            let run = lifted_run(&case, &registry)?;
            let bad = product_mismatches(&case.ac, &run, &case.delta, &case.store, &registry)
                .map_err(|e| e.to_string())?;
            ensure!(
                bad.is_empty(),
                "{name}/{rname}: {} mismatching products, first {:?}",
                bad.len(),
                bad[0]
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 9

fn pump_replay() -> Outcome {
    let case = fixtures::pump_case();
    let part = case.partition.as_ref().unwrap();
    let run = regress_variability(
        &case.ac,
        &case.delta,
        &case.store,
        &RpRegistry::none(),
        part,
    )
    .map_err(|e| e.to_string())?;
    let names: Vec<String> = part.alphabet.names().to_vec();
    let domain = part.phi_new_model.clone();
    let phi_new = "CHECK_INFUSION_RATE & HW_MONITORING & PROGRAMMABLE_INFUSION & VISUAL_DISPLAY \
                   & (MULTIPLE_DRUGS => CHECK_DRUG_TYPE)";
    ensure!(
        common::equiv_within(&part.phi_new, &e(phi_new), &FeatureExpr::True, &names),
        "new region {}",
        part.phi_new
    );
    let reu = format!("!VISUAL_DISPLAY & !({phi_new})");
    let rec = format!("VISUAL_DISPLAY & !({phi_new})");
    let s1 = run.strategy_value("G4").ok_or("S1 missing")?;
    ensure!(
        same_within(
            &s1,
            [&format!("!({phi_new})"), phi_new, "false"],
            &domain,
            &names
        ),
        "S1: {s1}"
    );
    let sn7 = run.evidence_value("G4.1.2").ok_or("Sn7 missing")?;
    ensure!(
        same_within(&sn7, [&reu, phi_new, &rec], &domain, &names),
        "Sn7: {sn7}"
    );
    for id in ["G4", "G0"] {
        let v = run.goal_value(id).ok_or(format!("{id} missing"))?;
        ensure!(
            same_within(&v, [&reu, phi_new, &rec], &domain, &names),
            "{id}: {v}"
        );
    }
    let count = |f: &FeatureExpr| common::sat_configs(&names, f).len();
    let old = e(fixtures::PUMP_FM_OLD) & !FeatureExpr::var(fixtures::PI);
    let counts = [
        count(&old),
        count(&e(fixtures::PUMP_FM_NEW)),
        count(&part.phi_new),
        count(&part.phi_reuse),
    ];
    ensure!(counts == [10, 13, 3, 10], "configuration counts {counts:?}");
    Ok(())
}

fn soundness() -> Outcome {
    for (name, case) in evolutions() {
        for (rname, registry) in registries() {
            let run = lifted_run(&case, &registry)?;
            let bad = soundness_violations(
                &run.root,
                &run.core,
                &case.ledger,
                &case.store,
                &run.universe,
            )
            .map_err(|e| e.to_string())?;
            ensure!(bad.is_empty(), "{name}/{rname}: unsound at {bad:?}");
        }
    }
    let case = fixtures::alarm_product_case();
    for (rname, registry) in registries() {
        let run =
            regress(&case.ac, &case.delta, &case.store, &registry).map_err(|e| e.to_string())?;
        let supported = supp(&run.core, &Env::new(&case.store, &case.ledger).rerunning())
            .map_err(|e| e.to_string())?;
        let sound = match run.root {
            RegValue::Reuse => supported,
            RegValue::Revise => !supported,
            RegValue::Recheck => true,
        };
        ensure!(
            sound,
            "product/{rname}: root {:?} but support {supported}",
            run.root
        );
    }
    Ok(())
}

// ----------------------------------------------------------------

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, derivation_fidelity),
        (2, analyses_lift),
        (3, support_lift),
        (4, template_lift),
        (5, algebra),
        (6, product_replay),
        (7, lifted_replay),
        (8, lifted_equivalence),
        (9, pump_replay),
        (10, soundness),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (n, check) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("criterion {n}: PASS ({ms} ms)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({ms} ms): {why}");
            }
        }
    }
    println!(
        "{} of 10 criteria passed in {:.1} s",
        10 - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
