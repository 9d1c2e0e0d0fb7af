//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's truth-table or minimisation code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

use liftac::featexpr::{Configuration, FeatureExpr};
use liftac::plmodel::{Fts, Lts, State, Transition};

/// Direct recursive evaluation.
pub fn eval(e: &FeatureExpr, on: &BTreeSet<String>) -> bool {
    match e {
        FeatureExpr::True => true,
        FeatureExpr::False => false,
        FeatureExpr::Var(v) => on.contains(v),
        FeatureExpr::Not(a) => !eval(a, on),
        FeatureExpr::And(a, b) => eval(a, on) && eval(b, on),
        FeatureExpr::Or(a, b) => eval(a, on) || eval(b, on),
        FeatureExpr::Implies(a, b) => !eval(a, on) || eval(b, on),
        FeatureExpr::Xor(a, b) => eval(a, on) != eval(b, on),
    }
}

/// Every subset of `names`.
pub fn subsets(names: &[String]) -> Vec<Configuration> {
    (0u64..1 << names.len())
        .map(|m| {
            Configuration::new(
                names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, n)| n.clone()),
            )
        })
        .collect()
}

pub fn sat_configs(names: &[String], e: &FeatureExpr) -> Vec<Configuration> {
    subsets(names)
        .into_iter()
        .filter(|c| eval(e, &c.0))
        .collect()
}

pub fn valid_configs(m: &Fts) -> Vec<Configuration> {
    sat_configs(m.alphabet().names(), m.feature_model().formula())
}

/// Semantic equivalence of two formulas over `names`, restricted to `within`.
pub fn equiv_within(
    a: &FeatureExpr,
    b: &FeatureExpr,
    within: &FeatureExpr,
    names: &[String],
) -> bool {
    subsets(names)
        .iter()
        .filter(|c| eval(within, &c.0))
        .all(|c| eval(a, &c.0) == eval(b, &c.0))
}

pub fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Product derivation by hand: keep enabled transitions, then prune to the
/// part reachable from the initial state.
pub fn derive_oracle(
    m: &Fts,
    c: &Configuration,
) -> (BTreeSet<String>, BTreeSet<(String, String, String)>) {
    let enabled: Vec<(String, String, String)> = m
        .transitions()
        .iter()
        .filter(|t| eval(&t.pc, &c.0))
        .map(|t| (t.src.clone(), t.action.clone(), t.dst.clone()))
        .collect();
    let mut seen = BTreeSet::from([m.initial().to_string()]);
    let mut queue = VecDeque::from([m.initial().to_string()]);
    while let Some(s) = queue.pop_front() {
        for (a, _, d) in &enabled {
            if *a == s && seen.insert(d.clone()) {
                queue.push_back(d.clone());
            }
        }
    }
    let trs = enabled
        .into_iter()
        .filter(|(a, _, _)| seen.contains(a))
        .collect();
    (seen, trs)
}

pub fn lts_shape(l: &Lts) -> (BTreeSet<String>, BTreeSet<(String, String, String)>) {
    (
        l.states().iter().map(|s: &State| s.id.clone()).collect(),
        l.transitions()
            .iter()
            .map(|t: &Transition| (t.src.clone(), t.action.clone(), t.dst.clone()))
            .collect(),
    )
}

/// Labels of each state in a product.
pub fn labels(l: &Lts) -> BTreeMap<String, BTreeSet<String>> {
    l.states()
        .iter()
        .map(|s| (s.id.clone(), s.labels.clone()))
        .collect()
}

/// A random formula over `names` with at most `depth` levels of connectives.
pub fn random_expr(r: &mut impl Rng, names: &[String], depth: u32) -> FeatureExpr {
    if depth == 0 || r.gen_ratio(1, 4) {
        return match r.gen_range(0..10) {
            0 => FeatureExpr::True,
            1 => FeatureExpr::False,
            _ => FeatureExpr::var(names[r.gen_range(0..names.len())].clone()),
        };
    }
    let a = Box::new(random_expr(r, names, depth - 1));
    match r.gen_range(0..5) {
        0 => FeatureExpr::Not(a),
        1 => FeatureExpr::And(a, Box::new(random_expr(r, names, depth - 1))),
        2 => FeatureExpr::Or(a, Box::new(random_expr(r, names, depth - 1))),
        3 => FeatureExpr::Implies(a, Box::new(random_expr(r, names, depth - 1))),
        _ => FeatureExpr::Xor(a, Box::new(random_expr(r, names, depth - 1))),
    }
}
