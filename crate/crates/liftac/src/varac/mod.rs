//! Variational assurance cases: derivation to product cases,
//! well-formedness, configuration invariance and the lifted supported
//! predicate.

use std::collections::BTreeSet;

use crate::accore::{
    Ac, AcError, Body, Goal, Ledger, Node, Provenance, Strategy, Value, VarAc, VarGoal,
};
use crate::featexpr::{Bits, Configuration, FeatureExpr, Universe};
use crate::plmodel::ModelStore;
use crate::templates;

pub use crate::templates::{lift_instantiate, lift_instantiate_goals};

pub fn derive_var_goal(g: &VarGoal, c: &Configuration) -> Result<Goal, AcError> {
    g.derive(c)
}

fn derive_strategy(st: &Strategy, c: &Configuration) -> Strategy {
    match &st.provenance {
        Provenance::TemplateInst { input, .. } => st.with_input(input.derive(c)),
        Provenance::Manual { .. } => st.clone(),
    }
}

/// The product case for `c`: subtrees whose presence condition `c` does not
/// satisfy are dropped, and a decomposition left without children becomes
/// undeveloped.
pub fn derive_var_ac(a: &VarAc, c: &Configuration) -> Result<Ac, AcError> {
    let goal = a.goal.derive(c)?;
    Ok(match &a.body {
        Body::Und => Ac::und(&a.id, goal),
        Body::Evd { evidence } => Ac::evd(&a.id, goal, evidence),
        Body::Decomp { strategy, children } => {
            let kids = children
                .iter()
                .filter(|k| k.goal.pc.eval(c))
                .map(|k| derive_var_ac(k, c))
                .collect::<Result<Vec<_>, _>>()?;
            if kids.is_empty() {
                Ac::und(&a.id, goal)
            } else {
                Ac::decomp(&a.id, goal, derive_strategy(strategy, c), kids)
            }
        }
    })
}

/// Every child's presence condition implies its parent's within the
/// product line.
pub fn well_formed(a: &VarAc, u: &Universe) -> Result<bool, AcError> {
    let parent = u.restrict(&a.goal.pc)?;
    for k in a.children() {
        if !u.restrict(&k.goal.pc)?.is_subset(&parent) || !well_formed(k, u)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `p` holds for every configuration of the product line satisfying `phi`.
pub fn inv<F>(u: &Universe, phi: &FeatureExpr, mut p: F) -> Result<bool, AcError>
where
    F: FnMut(&Configuration) -> Result<bool, AcError>,
{
    for c in u.configs(&u.restrict(phi)?) {
        if !p(&c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn derive_ledger(l: &Ledger, c: &Configuration) -> Ledger {
    l.derive(c)
}

/// What `supp_var` consults: `universe` is the product line's alphabet and
/// feature model.
#[derive(Clone, Copy, Debug)]
pub struct VarEnv<'a> {
    pub store: &'a ModelStore,
    pub ledger: &'a Ledger,
    pub universe: &'a Universe,
}

/// The lifted supported predicate, decided without deriving products
/// except where a template's correctness criterion must be re-evaluated.
pub fn supp_var(a: &VarAc, env: &VarEnv) -> Result<bool, AcError> {
    supp_in(a, env.universe.domain(), env)
}

fn supp_in(a: &VarAc, outer: &Bits, env: &VarEnv) -> Result<bool, AcError> {
    let u = env.universe;
    let region = outer.and(&u.restrict(&a.goal.pc)?);
    if region.is_empty() {
        return Ok(true);
    }
    match &a.body {
        Body::Und => Ok(false),
        Body::Evd { evidence } => {
            env.ledger.record(evidence)?;
            match &a.goal.goal {
                g @ Goal::Prop { .. } => Ok(env.ledger.adequate(evidence, g, env.store)),
                g @ Goal::Pred { subject, pred } => {
                    if subject.refs().is_empty()
                        && !subject.is_variational()
                        && env.ledger.adequate(evidence, g, env.store)
                    {
                        return Ok(true);
                    }
                    Ok(region.is_subset(
                        &env.ledger
                            .inv_region(evidence, pred, subject, env.store, u)?,
                    ))
                }
            }
        }
        Body::Decomp { strategy, children } => {
            let mut covered = u.empty();
            for k in children {
                if !supp_in(k, &region, env)? {
                    return Ok(false);
                }
                covered.or_assign(&u.restrict(&k.goal.pc)?);
            }
            if !region.is_subset(&covered) {
                return Ok(false);
            }
            refines_everywhere(a, strategy, children, &region, env)
        }
    }
}

fn refines_everywhere(
    a: &VarAc,
    st: &Strategy,
    children: &[VarAc],
    region: &Bits,
    env: &VarEnv,
) -> Result<bool, AcError> {
    let (template, input) = match &st.provenance {
        Provenance::Manual { reviewed } => return Ok(*reviewed),
        Provenance::TemplateInst {
            template, input, ..
        } => (templates::lookup(template)?, input),
    };
    let Goal::Pred { subject, .. } = &a.goal.goal else {
        return Ok(false);
    };
    for c in env.universe.configs(region) {
        let (x, s) = (input.derive(&c), subject.derive(&c));
        if !template.correctness(&x, &s) {
            return Ok(false);
        }
        let parent = a.goal.goal.derive(&c);
        let Ok(goals) = template.instantiate_goals(&x, &parent, env.store) else {
            return Ok(false);
        };
        let have: BTreeSet<Goal> = children
            .iter()
            .filter(|k| k.goal.pc.eval(&c))
            .map(|k| key(&k.goal.goal.derive(&c), env.store))
            .collect();
        if !goals.iter().all(|g| have.contains(&key(g, env.store))) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn key(g: &Goal, store: &ModelStore) -> Goal {
    g.map_values(&|v: &Value| v.erase_outputs().content_key(store))
}

/// The variational case with every presence condition replaced by `f(pc)`.
pub fn map_pcs(a: &VarAc, f: &dyn Fn(&FeatureExpr) -> FeatureExpr) -> VarAc {
    a.map_goals(&|g: &VarGoal| VarGoal::new(g.goal.clone(), f(&g.pc)))
}

/// Lifts a product case to a variational one with every goal present everywhere.
pub fn lift_ac(a: &Ac) -> VarAc {
    a.map_goals(&|g: &Goal| VarGoal::new(g.clone(), FeatureExpr::True))
}

pub fn node_pc<'a>(a: &'a Node<VarGoal>, id: &str) -> Option<&'a FeatureExpr> {
    a.find(id).map(|n| &n.goal.pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accore::PredicateRef;
    use crate::featexpr::Alphabet;

    fn ab() -> Universe {
        Universe::new(Alphabet::new(["A", "B"]).unwrap(), &FeatureExpr::True).unwrap()
    }

    fn e(s: &str) -> FeatureExpr {
        s.parse().unwrap()
    }

    fn vg(n: i64, pc: &str) -> VarGoal {
        VarGoal::new(Goal::pred(Value::Int(n), PredicateRef::is_even()), e(pc))
    }

    #[test]
    fn derivation_prunes_and_collapses() {
        let a = VarAc::decomp(
            "G1",
            vg(2, "true"),
            Strategy::manual("S", true),
            vec![VarAc::und("G2", vg(4, "B"))],
        );
        let got = derive_var_ac(&a, &Configuration::new(["A"])).unwrap();
        assert_eq!(
            got,
            Ac::und("G1", Goal::pred(Value::Int(2), PredicateRef::is_even()))
        );
        let kept = derive_var_ac(&a, &Configuration::new(["B"])).unwrap();
        assert_eq!(kept.children().len(), 1);
        assert!(derive_var_ac(&VarAc::und("G", vg(2, "A")), &Configuration::new(["B"])).is_err());
    }

    #[test]
    fn well_formedness() {
        let u = ab();
        let bad = VarAc::decomp(
            "G1",
            vg(2, "A"),
            Strategy::manual("S", true),
            vec![VarAc::und("G2", vg(4, "B"))],
        );
        assert!(!well_formed(&bad, &u).unwrap());
        assert!(well_formed(&VarAc::und("G", vg(1, "A")), &u).unwrap());
        let good = VarAc::decomp(
            "G1",
            vg(2, "A"),
            Strategy::manual("S", true),
            vec![VarAc::und("G2", vg(4, "A & B"))],
        );
        assert!(well_formed(&good, &u).unwrap());
    }

    #[test]
    fn coverage_gap_is_unsupported() {
        let u = ab();
        let store = ModelStore::new();
        let mut ledger = Ledger::new();
        ledger.vouch("E", Goal::pred(Value::Int(4), PredicateRef::is_even()));
        let env = VarEnv {
            store: &store,
            ledger: &ledger,
            universe: &u,
        };
        let a = VarAc::decomp(
            "G1",
            vg(2, "true"),
            Strategy::manual("S", true),
            vec![VarAc::evd("G2", vg(4, "B"), "E")],
        );
        assert!(!supp_var(&a, &env).unwrap());
        let covered = VarAc::decomp(
            "G1",
            vg(2, "true"),
            Strategy::manual("S", true),
            vec![
                VarAc::evd("G2", vg(4, "B"), "E"),
                VarAc::evd("G3", vg(4, "!B"), "E"),
            ],
        );
        assert!(supp_var(&covered, &env).unwrap());
        assert!(!supp_var(&VarAc::und("G", vg(2, "true")), &env).unwrap());
    }

    #[test]
    fn invariance() {
        let u = ab();
        assert!(inv(&u, &FeatureExpr::True, |_| Ok(true)).unwrap());
        assert!(!inv(&u, &FeatureExpr::True, |c| Ok(!c.contains("A"))).unwrap());
        assert!(inv(&u, &e("B & !A"), |c| Ok(!c.contains("A"))).unwrap());
    }
}
