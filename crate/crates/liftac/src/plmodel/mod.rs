//! Annotative product-line models: featured transition systems and their
//! derived labelled transition systems, explicit product-line encodings,
//! the versioned model store, model diffing and Δ̂ computation.

mod diff;
mod explicit;
mod store;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::featexpr::{Alphabet, Bits, Configuration, ExprError, FeatureExpr, Universe};

pub use diff::{
    delta_hat, delta_hat_exact, delta_hat_exact_in, delta_hat_over_approx,
    delta_hat_over_approx_in, diff_models, DeltaMode, ElementDiff, StateChange, TransitionChange,
};
pub use explicit::{Cell, Entry, ExplicitPL, VarSet};
pub use store::{Model, ModelRef, ModelStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("feature model is unsatisfiable")]
    EmptyProductLine,
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate transition {0} -{1}-> {2}")]
    DuplicateTransition(String, String, String),
    #[error("configuration {0} does not satisfy the feature model")]
    InvalidConfiguration(Configuration),
    #[error("explicit product line is not a partition of the feature model: {0}")]
    NotAPartition(String),
    #[error("no cell of the explicit product line covers {0}")]
    Uncovered(Configuration),
    #[error("models do not share a feature model")]
    FeatureModelMismatch,
    #[error("model `{0}` version `{1}` is not in the store")]
    Missing(String, String),
    #[error("model `{0}` is a product line; a configuration is required")]
    NeedsConfiguration(String),
    #[error("malformed model: {0}")]
    Malformed(String),
}

/// A feature alphabet with a satisfiable formula over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureModel {
    alphabet: Alphabet,
    formula: FeatureExpr,
}

impl FeatureModel {
    pub fn new(alphabet: Alphabet, formula: FeatureExpr) -> Result<Self, ModelError> {
        let bits = alphabet.bits(&formula)?;
        if bits.is_empty() {
            return Err(ModelError::EmptyProductLine);
        }
        Ok(FeatureModel { alphabet, formula })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn formula(&self) -> &FeatureExpr {
        &self.formula
    }

    pub fn universe(&self) -> Universe {
        Universe::new(self.alphabet.clone(), &self.formula).expect("validated on construction")
    }

    pub fn configs(&self) -> Vec<Configuration> {
        let u = self.universe();
        u.configs(u.domain())
    }

    pub fn accepts(&self, c: &Configuration) -> bool {
        self.alphabet.check_config(c).is_ok() && self.formula.eval(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State {
    pub id: String,
    #[serde(default)]
    pub labels: BTreeSet<String>,
}

impl State {
    pub fn new<I, S>(id: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        State {
            id: id.into(),
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub src: String,
    pub action: String,
    pub dst: String,
}

/// A labelled transition system in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LtsJson", into = "LtsJson")]
pub struct Lts {
    states: Vec<State>,
    initial: String,
    transitions: Vec<Transition>,
}

#[derive(Serialize, Deserialize)]
struct LtsJson {
    states: Vec<State>,
    initial: String,
    transitions: Vec<Transition>,
}

impl TryFrom<LtsJson> for Lts {
    type Error = ModelError;
    fn try_from(j: LtsJson) -> Result<Self, ModelError> {
        Lts::new(j.states, j.initial, j.transitions)
    }
}

impl From<Lts> for LtsJson {
    fn from(l: Lts) -> Self {
        LtsJson {
            states: l.states,
            initial: l.initial,
            transitions: l.transitions,
        }
    }
}

fn check_skeleton<'a>(
    states: &[State],
    initial: &str,
    edges: impl Iterator<Item = (&'a str, &'a str, &'a str)>,
) -> Result<(), ModelError> {
    let mut ids = BTreeSet::new();
    for s in states {
        if !ids.insert(s.id.as_str()) {
            return Err(ModelError::DuplicateState(s.id.clone()));
        }
    }
    if !ids.contains(initial) {
        return Err(ModelError::UnknownState(initial.to_string()));
    }
    let mut seen = BTreeSet::new();
    for (src, action, dst) in edges {
        for end in [src, dst] {
            if !ids.contains(end) {
                return Err(ModelError::UnknownState(end.to_string()));
            }
        }
        if !seen.insert((src, action, dst)) {
            return Err(ModelError::DuplicateTransition(
                src.into(),
                action.into(),
                dst.into(),
            ));
        }
    }
    Ok(())
}

impl Lts {
    pub fn new(
        mut states: Vec<State>,
        initial: impl Into<String>,
        mut transitions: Vec<Transition>,
    ) -> Result<Self, ModelError> {
        let initial = initial.into();
        check_skeleton(
            &states,
            &initial,
            transitions
                .iter()
                .map(|t| (t.src.as_str(), t.action.as_str(), t.dst.as_str())),
        )?;
        states.sort();
        transitions.sort();
        Ok(Lts {
            states,
            initial,
            transitions,
        })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn state(&self, id: &str) -> Option<&State> {
        self.states
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.states[i])
    }

    /// Outgoing transitions of `id` in canonical order.
    pub fn successors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.src == id)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  rankdir=LR;\n  __start [shape=point];\n");
        out.push_str(&format!("  __start -> \"{}\";\n", self.initial));
        for s in &self.states {
            let labels: Vec<&str> = s.labels.iter().map(String::as_str).collect();
            let text = if labels.is_empty() {
                s.id.clone()
            } else {
                format!("{}\\n{}", s.id, labels.join(","))
            };
            out.push_str(&format!(
                "  \"{}\" [shape=circle, label=\"{}\"];\n",
                s.id, text
            ));
        }
        for t in &self.transitions {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                t.src, t.dst, t.action
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn is_true(e: &FeatureExpr) -> bool {
    *e == FeatureExpr::True
}

fn default_pc() -> FeatureExpr {
    FeatureExpr::True
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FtsTransition {
    pub src: String,
    pub action: String,
    pub dst: String,
    #[serde(default = "default_pc", skip_serializing_if = "is_true")]
    pub pc: FeatureExpr,
}

impl FtsTransition {
    pub fn new(src: &str, action: &str, dst: &str, pc: FeatureExpr) -> Self {
        FtsTransition {
            src: src.into(),
            action: action.into(),
            dst: dst.into(),
            pc,
        }
    }

    pub fn key(&self) -> Transition {
        Transition {
            src: self.src.clone(),
            action: self.action.clone(),
            dst: self.dst.clone(),
        }
    }
}

/// A featured transition system: an LTS skeleton whose transitions carry
/// presence conditions, together with its feature model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FtsJson", into = "FtsJson")]
pub struct Fts {
    fm: FeatureModel,
    states: Vec<State>,
    initial: String,
    transitions: Vec<FtsTransition>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct FtsJson {
    features: Vec<String>,
    feature_model: FeatureExpr,
    states: Vec<State>,
    initial: String,
    transitions: Vec<FtsTransition>,
}

impl TryFrom<FtsJson> for Fts {
    type Error = ModelError;
    fn try_from(j: FtsJson) -> Result<Self, ModelError> {
        let fm = FeatureModel::new(Alphabet::new(j.features)?, j.feature_model)?;
        Fts::new(fm, j.states, j.initial, j.transitions)
    }
}

impl From<Fts> for FtsJson {
    fn from(m: Fts) -> Self {
        FtsJson {
            features: m.fm.alphabet.names().to_vec(),
            feature_model: m.fm.formula,
            states: m.states,
            initial: m.initial,
            transitions: m.transitions,
        }
    }
}

impl Fts {
    pub fn new(
        fm: FeatureModel,
        mut states: Vec<State>,
        initial: impl Into<String>,
        mut transitions: Vec<FtsTransition>,
    ) -> Result<Self, ModelError> {
        let initial = initial.into();
        check_skeleton(
            &states,
            &initial,
            transitions
                .iter()
                .map(|t| (t.src.as_str(), t.action.as_str(), t.dst.as_str())),
        )?;
        for t in &transitions {
            fm.alphabet.check_expr(&t.pc)?;
        }
        states.sort();
        transitions.sort();
        Ok(Fts {
            fm,
            states,
            initial,
            transitions,
        })
    }

    pub fn feature_model(&self) -> &FeatureModel {
        &self.fm
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.fm.alphabet
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: &str) -> Option<&State> {
        self.states
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.states[i])
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn transitions(&self) -> &[FtsTransition] {
        &self.transitions
    }

    /// The product for configuration `c`: disabled transitions are removed
    /// and everything unreachable from the initial state is pruned.
    pub fn derive(&self, c: &Configuration) -> Result<Lts, ModelError> {
        if !self.fm.accepts(c) {
            return Err(ModelError::InvalidConfiguration(c.clone()));
        }
        let enabled: Vec<&FtsTransition> =
            self.transitions.iter().filter(|t| t.pc.eval(c)).collect();
        let mut reached: BTreeSet<&str> = BTreeSet::new();
        let mut queue = VecDeque::from([self.initial.as_str()]);
        reached.insert(self.initial.as_str());
        while let Some(s) = queue.pop_front() {
            for t in enabled.iter().filter(|t| t.src == s) {
                if reached.insert(t.dst.as_str()) {
                    queue.push_back(t.dst.as_str());
                }
            }
        }
        let states = self
            .states
            .iter()
            .filter(|s| reached.contains(s.id.as_str()))
            .cloned()
            .collect();
        let transitions = enabled
            .iter()
            .filter(|t| reached.contains(t.src.as_str()))
            .map(|t| t.key())
            .collect();
        Lts::new(states, self.initial.clone(), transitions)
    }

    /// Per-state reachability conditions inside `universe`, whose alphabet
    /// must contain this model's features. The feature model is conjoined.
    pub fn reach_bits(&self, universe: &Universe) -> Result<BTreeMap<String, Bits>, ModelError> {
        let domain = universe.domain().and(&universe.bits(self.fm.formula())?);
        let pcs = self
            .transitions
            .iter()
            .map(|t| universe.bits(&t.pc))
            .collect::<Result<Vec<_>, _>>()?;
        let mut reach: BTreeMap<String, Bits> = self
            .states
            .iter()
            .map(|s| (s.id.clone(), domain.cleared()))
            .collect();
        reach.insert(self.initial.clone(), domain);
        let mut changed = true;
        while changed {
            changed = false;
            for (t, pc) in self.transitions.iter().zip(&pcs) {
                let flow = reach[&t.src].and(pc);
                let dst = reach.get_mut(&t.dst).expect("validated endpoint");
                if !flow.is_subset(dst) {
                    dst.or_assign(&flow);
                    changed = true;
                }
            }
        }
        Ok(reach)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fts {\n  rankdir=LR;\n  __start [shape=point];\n");
        out.push_str(&format!("  __start -> \"{}\";\n", self.initial));
        for s in &self.states {
            let labels: Vec<&str> = s.labels.iter().map(String::as_str).collect();
            let text = if labels.is_empty() {
                s.id.clone()
            } else {
                format!("{}\\n{}", s.id, labels.join(","))
            };
            out.push_str(&format!(
                "  \"{}\" [shape=circle, label=\"{}\"];\n",
                s.id, text
            ));
        }
        for t in &self.transitions {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{} | {}\"];\n",
                t.src, t.dst, t.action, t.pc
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Convenience wrapper for [`Fts::derive`].
pub fn derive_fts(m: &Fts, c: &Configuration) -> Result<Lts, ModelError> {
    m.derive(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn xor_loop_derivations() {
        let m = fixtures::xor_loop();
        let b = m.derive(&Configuration::new(["B"])).unwrap();
        assert_eq!(
            b.states().iter().map(|s| s.id.as_str()).collect::<Vec<_>>(),
            ["s0", "s1"]
        );
        assert_eq!(
            b.transitions()
                .iter()
                .map(|t| t.action.as_str())
                .collect::<Vec<_>>(),
            ["a", "b"]
        );

        let a = m.derive(&Configuration::new(["A"])).unwrap();
        assert_eq!(a.states().len(), 3);
        let mut actions: Vec<&str> = a.transitions().iter().map(|t| t.action.as_str()).collect();
        actions.sort();
        assert_eq!(actions, ["a", "c", "d"]);

        assert_eq!(
            m.derive(&Configuration::new(["A", "B"])),
            Err(ModelError::InvalidConfiguration(Configuration::new([
                "A", "B"
            ])))
        );
    }

    #[test]
    fn json_round_trip() {
        let m = fixtures::xor_loop();
        let text = serde_json::to_string(&m).unwrap();
        let back: Fts = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let lts = m.derive(&Configuration::new(["B"])).unwrap();
        let back: Lts = serde_json::from_str(&serde_json::to_string(&lts).unwrap()).unwrap();
        assert_eq!(back, lts);
    }

    #[test]
    fn omitted_pc_means_true() {
        let text = r#"{"features":["A"],"featureModel":"true","states":[{"id":"s"}],"initial":"s",
            "transitions":[{"src":"s","action":"x","dst":"s"}]}"#;
        let m: Fts = serde_json::from_str(text).unwrap();
        assert_eq!(m.transitions()[0].pc, FeatureExpr::True);
    }

    #[test]
    fn validation_errors() {
        let fm = FeatureModel::new(Alphabet::new(["A"]).unwrap(), FeatureExpr::True).unwrap();
        let s = vec![State::new("s", Vec::<String>::new())];
        let bad = vec![FtsTransition::new("s", "x", "t", FeatureExpr::True)];
        assert_eq!(
            Fts::new(fm.clone(), s.clone(), "s", bad),
            Err(ModelError::UnknownState("t".into()))
        );
        let dup = vec![FtsTransition::new("s", "x", "s", FeatureExpr::True); 2];
        assert!(matches!(
            Fts::new(fm.clone(), s.clone(), "s", dup),
            Err(ModelError::DuplicateTransition(..))
        ));
        let unknown = vec![FtsTransition::new("s", "x", "s", FeatureExpr::var("Z"))];
        assert!(matches!(
            Fts::new(fm, s, "s", unknown),
            Err(ModelError::Expr(ExprError::UnknownFeature(_)))
        ));
        let a = Alphabet::new(["A"]).unwrap();
        assert_eq!(
            FeatureModel::new(a, "A & !A".parse().unwrap()),
            Err(ModelError::EmptyProductLine)
        );
    }

    #[test]
    fn reachability_matches_derivation() {
        for m in [
            fixtures::xor_loop(),
            fixtures::xor_loop_with_self_loop(),
            fixtures::pump_old(),
            fixtures::pump_new(),
        ] {
            let u = m.feature_model().universe();
            let reach = m.reach_bits(&u).unwrap();
            for idx in u.domain().ones() {
                let c = u.alphabet().config_at(idx);
                let lts = m.derive(&c).unwrap();
                for s in m.states() {
                    assert_eq!(
                        reach[&s.id].get(idx),
                        lts.state(&s.id).is_some(),
                        "{} at {c}",
                        s.id
                    );
                }
            }
        }
    }
}
