//! Executable cross-checks of a lifted run: against product runs on every
//! derived case, and against support recomputed from scratch.

use std::collections::{BTreeMap, BTreeSet};

use super::{RegBits, VarEvolution, VarRun};
use crate::accore::{schema, supp, AcError, Env, Goal, Ledger, VarAc};
use crate::featexpr::{Configuration, Universe};
use crate::plmodel::ModelStore;
use crate::regression::{regress, RegValue, RpRegistry};
use crate::varac::{derive_ledger, derive_var_ac};

/// Ids of lifting-correctness goals. Product templates have no such goal,
/// so product runs treat these children as obsolete; they are left out of
/// comparisons.
pub fn lift_goal_ids(a: &VarAc) -> BTreeSet<String> {
    a.nodes()
        .into_iter()
        .filter(
            |n| matches!(&n.goal.goal, Goal::Prop { prop } if prop.schema == schema::LIFT_CORRECT),
        )
        .map(|n| n.id.clone())
        .collect()
}

/// Configurations where the lifted run, derived, disagrees with the product
/// run on the derived case and evolution. Empty when they agree everywhere.
pub fn product_mismatches(
    a: &VarAc,
    run: &VarRun,
    delta: &VarEvolution,
    store: &ModelStore,
    registry: &RpRegistry,
) -> Result<Vec<String>, AcError> {
    let u = &run.universe;
    let skip = lift_goal_ids(a);
    let keep = |m: &BTreeMap<String, RegValue>| -> BTreeMap<String, RegValue> {
        m.iter()
            .filter(|(k, _)| !skip.contains(*k))
            .map(|(k, v)| (k.clone(), *v))
            .collect()
    };
    let mut out = Vec::new();
    for idx in u.restrict(a.pc())?.ones() {
        let c = u.alphabet().config_at(idx);
        let product = regress(&derive_var_ac(a, &c)?, &delta.at(&c), store, registry)?;
        let lifted = run.derive(&c)?;
        let p = &product.annotations;
        let obsolete: BTreeSet<String> = p.obsolete.difference(&skip).cloned().collect();
        let lifted_obsolete: BTreeSet<String> =
            lifted.obsolete.difference(&skip).cloned().collect();
        let pairs = [
            ("goals", keep(&p.goals), keep(&lifted.goals)),
            ("strategies", keep(&p.strategies), keep(&lifted.strategies)),
            ("evidence", keep(&p.evidence), keep(&lifted.evidence)),
        ];
        for (what, want, got) in pairs {
            if want != got {
                out.push(format!("{c}: {what}: product {want:?}, lifted {got:?}"));
            }
        }
        if obsolete != lifted_obsolete {
            out.push(format!(
                "{c}: obsolete: product {obsolete:?}, lifted {lifted_obsolete:?}"
            ));
        }
    }
    Ok(out)
}

/// Configurations where the root value contradicts support recomputed on
/// the derived core with every analysis re-executed: ✓ must be supported
/// and ✗ unsupported.
pub fn soundness_violations(
    root: &RegBits,
    core: &VarAc,
    ledger: &Ledger,
    store: &ModelStore,
    u: &Universe,
) -> Result<Vec<Configuration>, AcError> {
    let mut out = Vec::new();
    for idx in root.reuse.or(&root.revise).ones() {
        let c = u.alphabet().config_at(idx);
        let l = derive_ledger(ledger, &c);
        let supported = supp(&derive_var_ac(core, &c)?, &Env::new(store, &l).rerunning())?;
        if supported != root.reuse.get(idx) {
            out.push(c);
        }
    }
    Ok(out)
}
