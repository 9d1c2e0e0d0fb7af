//! Algebra of variability-aware regression values: composition against
//! the per-product minimum, associativity, commutativity, partitions.

mod common;

use proptest::prelude::*;

use liftac::featexpr::{is_partition, Alphabet, FeatureExpr};
use liftac::liftreg::{min_reg_lift, VarRegValue};
use liftac::regression::{min_reg, RegValue};

const FEATURES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn alphabet() -> Alphabet {
    Alphabet::new(FEATURES).unwrap()
}

fn expr() -> impl Strategy<Value = FeatureExpr> {
    let leaf = prop_oneof![
        1 => Just(FeatureExpr::True),
        1 => Just(FeatureExpr::False),
        8 => proptest::sample::select(FEATURES.to_vec()).prop_map(FeatureExpr::var),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| !a),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a & b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a | b),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| FeatureExpr::Xor(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| a.implies(b)),
        ]
    })
}

/// A regression value whose parts partition `over` by construction.
fn value() -> impl Strategy<Value = VarRegValue> {
    (expr(), expr(), expr()).prop_map(|(over, p, q)| VarRegValue {
        reuse: over.clone() & p.clone(),
        revise: over.clone() & !p.clone() & q.clone(),
        recheck: over.clone() & !p & !q,
        over,
    })
}

/// The oracle: the product value of `v` at `c`, read straight from the
/// formulas.
fn at(v: &VarRegValue, c: &liftac::featexpr::Configuration) -> Option<RegValue> {
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

fn strict_partition(v: &VarRegValue) -> bool {
    is_partition(
        &[v.reuse.clone(), v.revise.clone(), v.recheck.clone()],
        &v.over,
        &alphabet(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn composition_is_the_per_product_minimum(a in value(), b in value()) {
        let f = alphabet();
        let ab = a.compose(&b, &f).unwrap();
        prop_assert!(strict_partition(&ab));
        for c in common::subsets(&common::names(&FEATURES)) {
            let members: Vec<RegValue> = [at(&a, &c), at(&b, &c)].into_iter().flatten().collect();
            prop_assert_eq!(ab.derive(&c), min_reg(members), "at {}", c);
        }
    }

    #[test]
    fn composition_commutes_and_associates(a in value(), b in value(), c in value()) {
        let f = alphabet();
        prop_assert!(a.compose(&b, &f).unwrap().equivalent(&b.compose(&a, &f).unwrap(), &f).unwrap());
        let left = a.compose(&b, &f).unwrap().compose(&c, &f).unwrap();
        let right = a.compose(&b.compose(&c, &f).unwrap(), &f).unwrap();
        prop_assert!(left.equivalent(&right, &f).unwrap());
        prop_assert!(strict_partition(&left) && strict_partition(&right));
        let folded = min_reg_lift(&[a.clone(), b.clone(), c.clone()], &f).unwrap().unwrap();
        prop_assert!(folded.equivalent(&left, &f).unwrap());
        for cfg in common::subsets(&common::names(&FEATURES)) {
            let members: Vec<RegValue> = [at(&a, &cfg), at(&b, &cfg), at(&c, &cfg)].into_iter().flatten().collect();
            prop_assert_eq!(folded.derive(&cfg), min_reg(members));
        }
    }

    #[test]
    fn reuse_is_the_identity_on_its_domain(a in value()) {
        let f = alphabet();
        let id = VarRegValue::reuse(a.over.clone());
        prop_assert!(a.compose(&id, &f).unwrap().equivalent(&a, &f).unwrap());
        let bottom = VarRegValue::revise(a.over.clone());
        prop_assert!(a.compose(&bottom, &f).unwrap().equivalent(&bottom, &f).unwrap());
    }
}

#[test]
fn disjoint_domains_keep_both_values() {
    let f = alphabet();
    let a = VarRegValue::revise(FeatureExpr::var("A") & !FeatureExpr::var("B"));
    let b = VarRegValue::reuse(FeatureExpr::var("B"));
    let ab = a.compose(&b, &f).unwrap();
    assert!(common::equiv_within(
        &ab.over,
        &(FeatureExpr::var("A") | FeatureExpr::var("B")),
        &FeatureExpr::True,
        &common::names(&FEATURES)
    ));
    assert_eq!(ab.revise.to_string(), "A & !B");
    assert_eq!(ab.reuse.to_string(), "B");
    assert_eq!(ab.recheck, FeatureExpr::False);
}
