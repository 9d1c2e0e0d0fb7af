//! Lifted analyses agree with the product analyses on every product of the
//! fixture product lines, and derivation agrees with a hand-written oracle.

mod common;

use std::collections::BTreeSet;

use liftac::analyses::{
    check_after_action_fts, check_after_action_lts, check_response_fts, check_response_lts,
    query_fts, query_lts, reach_fts, Query,
};
use liftac::featexpr::FeatureExpr;
use liftac::fixtures;
use liftac::plmodel::Fts;

fn product_lines() -> Vec<(&'static str, Fts)> {
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

fn all_labels(m: &Fts) -> BTreeSet<String> {
    m.states()
        .iter()
        .flat_map(|s| s.labels.iter().cloned())
        .collect()
}

#[test]
fn fixtures_stay_within_desk_scale() {
    for (name, m) in product_lines() {
        assert!(m.states().len() <= 12, "{name}");
        assert!(m.alphabet().len() <= 6, "{name}");
    }
}

#[test]
fn derivation_matches_the_oracle() {
    for (name, m) in product_lines() {
        for c in common::valid_configs(&m) {
            let lts = m.derive(&c).unwrap();
            assert_eq!(
                common::lts_shape(&lts),
                common::derive_oracle(&m, &c),
                "{name} at {c}"
            );
            for (id, ls) in common::labels(&lts) {
                assert_eq!(ls, m.state(&id).unwrap().labels, "{name} at {c}");
            }
        }
        for c in common::subsets(m.alphabet().names()) {
            let valid = common::eval(m.feature_model().formula(), &c.0);
            assert_eq!(m.derive(&c).is_ok(), valid, "{name} at {c}");
        }
    }
}

#[test]
fn reachability_presence_conditions() {
    for (name, m) in product_lines() {
        let pcs = reach_fts(&m).unwrap();
        for c in common::valid_configs(&m) {
            let (reached, _) = common::derive_oracle(&m, &c);
            for s in m.states() {
                assert_eq!(
                    pcs[&s.id].eval(&c),
                    reached.contains(&s.id),
                    "{name}: {} at {c}",
                    s.id
                );
            }
        }
    }
}

#[test]
fn lifted_query_derives_to_product_query() {
    for (name, m) in product_lines() {
        let mut queries: Vec<Query> = all_labels(&m).iter().map(|l| Query::has_label(l)).collect();
        queries.push(Query::name_prefix("Alrm_"));
        queries.push(Query::name_prefix("s"));
        for q in queries {
            let lifted = query_fts(&m, &q, &FeatureExpr::True).unwrap();
            for c in common::valid_configs(&m) {
                let product = query_lts(&m.derive(&c).unwrap(), &q);
                assert_eq!(lifted.derive(&c), product, "{name}: {q:?} at {c}");
            }
        }
    }
}

#[test]
fn lifted_response_check_derives_to_product_check() {
    for (name, m) in product_lines() {
        let props: BTreeSet<String> = all_labels(&m)
            .into_iter()
            .chain(m.states().iter().map(|s| s.id.clone()))
            .collect();
        for trigger in &props {
            for response in &props {
                let lifted = check_response_fts(&m, trigger, response, &FeatureExpr::True).unwrap();
                lifted.validate(m.feature_model()).unwrap();
                for c in common::valid_configs(&m) {
                    let product = check_response_lts(&m.derive(&c).unwrap(), trigger, response);
                    let got = lifted.derive(m.feature_model(), &c).unwrap();
                    assert_eq!(
                        got.is_ok(),
                        product.is_ok(),
                        "{name}: {trigger} => {response} at {c}"
                    );
                }
            }
        }
    }
}

#[test]
fn lifted_after_action_check_derives_to_product_check() {
    for (name, m) in product_lines() {
        let actions: BTreeSet<&str> = m.transitions().iter().map(|t| t.action.as_str()).collect();
        let props: BTreeSet<String> = all_labels(&m)
            .into_iter()
            .chain(m.states().iter().map(|s| s.id.clone()))
            .collect();
        for action in &actions {
            for forbidden in &props {
                let lifted =
                    check_after_action_fts(&m, action, forbidden, &FeatureExpr::True).unwrap();
                for c in common::valid_configs(&m) {
                    let product = check_after_action_lts(&m.derive(&c).unwrap(), action, forbidden);
                    let got = lifted.derive(m.feature_model(), &c).unwrap();
                    assert_eq!(
                        got.is_ok(),
                        product.is_ok(),
                        "{name}: {action} forbid {forbidden} at {c}"
                    );
                }
            }
        }
    }
}

#[test]
fn verdict_cells_partition_the_restricted_feature_model() {
    for (name, m) in product_lines() {
        let fm = m.feature_model().formula().clone();
        let restrictions: Vec<FeatureExpr> = std::iter::once(FeatureExpr::True)
            .chain(
                m.alphabet()
                    .names()
                    .iter()
                    .map(|n| FeatureExpr::var(n.clone())),
            )
            .chain(
                m.alphabet()
                    .names()
                    .iter()
                    .map(|n| !FeatureExpr::var(n.clone())),
            )
            .collect();
        for r in restrictions {
            let whole = fm.clone() & r.clone();
            if common::sat_configs(m.alphabet().names(), &whole).is_empty() {
                continue;
            }
            let v = check_response_fts(&m, "Alarm", "Safe", &r).unwrap();
            let guards: Vec<FeatureExpr> = v.cells.iter().map(|c| c.guard.clone()).collect();
            for c in common::subsets(m.alphabet().names()) {
                let hits = guards.iter().filter(|g| common::eval(g, &c.0)).count();
                let inside = common::eval(&whole, &c.0);
                assert_eq!(hits, usize::from(inside), "{name} under {r} at {c}");
            }
        }
    }
}
