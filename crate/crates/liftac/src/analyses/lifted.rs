//! Family-based versions of the analyses, computed once per FTS over truth
//! tables instead of once per product.

use std::collections::BTreeMap;

use super::{holds, product, AnalysisError, PropertySpec, Query, VarVerdict, Verdict};
use crate::featexpr::{Bits, FeatureExpr, Universe};
use crate::plmodel::{Fts, VarSet};

fn model_universe(m: &Fts, restrict: &FeatureExpr) -> Result<Universe, AnalysisError> {
    let fm = m.feature_model();
    let u = Universe::new(
        fm.alphabet().clone(),
        &(fm.formula().clone() & restrict.clone()),
    )?;
    Ok(u)
}

/// The universe's domain narrowed to the model's own feature model.
fn domain(m: &Fts, u: &Universe) -> Result<Bits, AnalysisError> {
    Ok(u.domain().and(&u.bits(m.feature_model().formula())?))
}

/// Presence condition of every state in the derived products.
pub fn reach_fts(m: &Fts) -> Result<BTreeMap<String, FeatureExpr>, AnalysisError> {
    let u = m.feature_model().universe();
    Ok(m.reach_bits(&u)?
        .into_iter()
        .map(|(s, b)| (s, u.expr(&b)))
        .collect())
}

/// Matching states with the configurations of `u` in which they exist.
pub fn query_fts_in(
    m: &Fts,
    q: &Query,
    u: &Universe,
) -> Result<Vec<(String, Bits)>, AnalysisError> {
    let reach = m.reach_bits(u)?;
    Ok(m.states()
        .iter()
        .filter(|s| q.matches(s))
        .map(|s| (s.id.clone(), reach[&s.id].and(u.domain())))
        .filter(|(_, b)| !b.is_empty())
        .collect())
}

pub fn query_fts(
    m: &Fts,
    q: &Query,
    restrict: &FeatureExpr,
) -> Result<VarSet<String>, AnalysisError> {
    let u = model_universe(m, restrict)?;
    let entries = query_fts_in(m, q, &u)?;
    Ok(VarSet::new(
        entries.into_iter().map(|(s, b)| (s, u.expr(&b))).collect(),
    ))
}

struct Tables<'a> {
    m: &'a Fts,
    pcs: Vec<Bits>,
    reach: BTreeMap<String, Bits>,
    dom: Bits,
}

impl<'a> Tables<'a> {
    fn new(m: &'a Fts, u: &Universe) -> Result<Self, AnalysisError> {
        let dom = domain(m, u)?;
        let pcs = m
            .transitions()
            .iter()
            .map(|t| Ok(u.bits(&t.pc)?.and(&dom)))
            .collect::<Result<Vec<_>, AnalysisError>>()?;
        let reach = m
            .reach_bits(u)?
            .into_iter()
            .map(|(s, b)| (s, b.and(&dom)))
            .collect();
        Ok(Tables { m, pcs, reach, dom })
    }

    fn out(
        &self,
        s: &str,
    ) -> impl Iterator<Item = (usize, &'a crate::plmodel::FtsTransition)> + '_ {
        let s = s.to_string();
        self.m
            .transitions()
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.src == s)
    }

    /// Configurations in which `s` has no enabled outgoing transition.
    fn dead(&self, s: &str) -> Bits {
        let mut live = self.dom.cleared();
        for (i, _) in self.out(s) {
            live.or_assign(&self.pcs[i]);
        }
        self.dom.minus(&live)
    }
}

fn response_violations(t: &Tables, trigger: &str, response: &str) -> Bits {
    let m = t.m;
    let dead: BTreeMap<&str, Bits> = m
        .states()
        .iter()
        .map(|s| (s.id.as_str(), t.dead(&s.id)))
        .collect();
    // Per configuration: the states from which some maximal path avoids the
    // response forever.
    let mut z: BTreeMap<&str, Bits> = m
        .states()
        .iter()
        .map(|s| {
            (
                s.id.as_str(),
                if holds(s, response) {
                    t.dom.cleared()
                } else {
                    t.dom.clone()
                },
            )
        })
        .collect();
    loop {
        let mut changed = false;
        for s in m.states() {
            if z[s.id.as_str()].is_empty() {
                continue;
            }
            let mut keep = dead[s.id.as_str()].clone();
            for (i, e) in t.out(&s.id) {
                keep.or_assign(&t.pcs[i].and(&z[e.dst.as_str()]));
            }
            let next = z[s.id.as_str()].and(&keep);
            if next != z[s.id.as_str()] {
                z.insert(s.id.as_str(), next);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut viol = t.dom.cleared();
    for s in m.states().iter().filter(|s| holds(s, trigger)) {
        let mut bad = dead[s.id.as_str()].clone();
        for (i, e) in t.out(&s.id) {
            bad.or_assign(&t.pcs[i].and(&z[e.dst.as_str()]));
        }
        viol.or_assign(&t.reach[&s.id].and(&bad));
    }
    viol
}

fn after_action_violations(t: &Tables, action: &str, forbidden: &str) -> Bits {
    let m = t.m;
    let mut viol = t.dom.cleared();
    for (i, e) in m
        .transitions()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.action == action)
    {
        let first = t.reach[&e.src].and(&t.pcs[i]);
        if first.is_empty() {
            continue;
        }
        for (j, f) in t.out(&e.dst) {
            if holds(m.state(&f.dst).expect("validated endpoint"), forbidden) {
                viol.or_assign(&first.and(&t.pcs[j]));
            }
        }
    }
    viol
}

/// Configurations of `u` (narrowed to the feature model) whose product
/// violates `spec`.
pub fn violation_bits(m: &Fts, spec: &PropertySpec, u: &Universe) -> Result<Bits, AnalysisError> {
    let t = Tables::new(m, u)?;
    Ok(match spec {
        PropertySpec::Response { trigger, response } => response_violations(&t, trigger, response),
        PropertySpec::AfterActionSafe { action, forbidden } => {
            after_action_violations(&t, action, forbidden)
        }
    })
}

/// Verdict cells partitioning the domain of `u` narrowed to the feature
/// model. Violating configurations take their witness from the product
/// checker; cells group equal verdicts and are ordered by rendered guard.
pub fn check_fts_in(
    m: &Fts,
    spec: &PropertySpec,
    u: &Universe,
) -> Result<Vec<(Verdict, Bits)>, AnalysisError> {
    let dom = domain(m, u)?;
    let viol = violation_bits(m, spec, u)?;
    let mut groups: BTreeMap<Verdict, Bits> = BTreeMap::new();
    let ok = dom.minus(&viol);
    if !ok.is_empty() {
        groups.insert(Verdict::Ok, ok);
    }
    for idx in viol.ones() {
        let c = m.alphabet().project(&u.alphabet().config_at(idx));
        let v = product::check_lts(&m.derive(&c)?, spec);
        debug_assert!(
            !v.is_ok(),
            "symbolic violation without a product counterexample at {c}"
        );
        groups.entry(v).or_insert_with(|| dom.cleared()).set(idx);
    }
    let mut cells: Vec<(String, Verdict, Bits)> = groups
        .into_iter()
        .map(|(v, b)| (u.expr(&b).to_string(), v, b))
        .collect();
    cells.sort();
    Ok(cells.into_iter().map(|(_, v, b)| (v, b)).collect())
}

pub fn check_fts(
    m: &Fts,
    spec: &PropertySpec,
    restrict: &FeatureExpr,
) -> Result<VarVerdict, AnalysisError> {
    let u = model_universe(m, restrict)?;
    if u.domain().is_empty() {
        return Err(AnalysisError::EmptyDomain);
    }
    let cells = check_fts_in(m, spec, &u)?;
    Ok(VarVerdict::new(
        cells
            .into_iter()
            .map(|(v, b)| (v, u.alphabet().expr_of(&b)))
            .collect(),
    ))
}

pub fn check_response_fts(
    m: &Fts,
    trigger: &str,
    response: &str,
    restrict: &FeatureExpr,
) -> Result<VarVerdict, AnalysisError> {
    check_fts(m, &PropertySpec::response(trigger, response), restrict)
}

pub fn check_after_action_fts(
    m: &Fts,
    action: &str,
    forbidden: &str,
    restrict: &FeatureExpr,
) -> Result<VarVerdict, AnalysisError> {
    check_fts(m, &PropertySpec::after_action(action, forbidden), restrict)
}
