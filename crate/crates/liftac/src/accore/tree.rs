//! Assurance-case trees, generic over the goal type so product and
//! variational cases share one shape.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AcError, Goal, Value, VarGoal};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Provenance {
    Manual {
        reviewed: bool,
    },
    TemplateInst {
        template: String,
        input: Value,
        input_fingerprint: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub label: String,
    pub provenance: Provenance,
}

impl Strategy {
    pub fn manual(label: &str, reviewed: bool) -> Self {
        Strategy {
            label: label.to_string(),
            provenance: Provenance::Manual { reviewed },
        }
    }

    pub fn template(label: &str, template: &str, input: Value) -> Self {
        let input_fingerprint = crate::util::digest(&input);
        Strategy {
            label: label.to_string(),
            provenance: Provenance::TemplateInst {
                template: template.to_string(),
                input,
                input_fingerprint,
            },
        }
    }

    pub fn template_input(&self) -> Option<(&str, &Value)> {
        match &self.provenance {
            Provenance::TemplateInst {
                template, input, ..
            } => Some((template, input)),
            Provenance::Manual { .. } => None,
        }
    }

    /// The same strategy with a new template input.
    pub fn with_input(&self, input: Value) -> Self {
        match self.template_input() {
            Some((t, _)) => Strategy::template(&self.label, t, input),
            None => self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
#[serde(bound(serialize = "G: Serialize", deserialize = "G: Deserialize<'de>"))]
pub enum Body<G> {
    Und,
    Evd {
        evidence: String,
    },
    Decomp {
        strategy: Strategy,
        children: Vec<Node<G>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "G: Serialize", deserialize = "G: Deserialize<'de>"))]
pub struct Node<G> {
    pub id: String,
    pub goal: G,
    #[serde(flatten)]
    pub body: Body<G>,
}

pub type Ac = Node<Goal>;
pub type VarAc = Node<VarGoal>;

impl<G> Node<G> {
    pub fn und(id: &str, goal: G) -> Self {
        Node {
            id: id.to_string(),
            goal,
            body: Body::Und,
        }
    }

    pub fn evd(id: &str, goal: G, evidence: &str) -> Self {
        Node {
            id: id.to_string(),
            goal,
            body: Body::Evd {
                evidence: evidence.to_string(),
            },
        }
    }

    pub fn decomp(id: &str, goal: G, strategy: Strategy, children: Vec<Node<G>>) -> Self {
        Node {
            id: id.to_string(),
            goal,
            body: Body::Decomp { strategy, children },
        }
    }

    pub fn root_goal(&self) -> &G {
        &self.goal
    }

    pub fn children(&self) -> &[Node<G>] {
        match &self.body {
            Body::Decomp { children, .. } => children,
            _ => &[],
        }
    }

    pub fn strategy(&self) -> Option<&Strategy> {
        match &self.body {
            Body::Decomp { strategy, .. } => Some(strategy),
            _ => None,
        }
    }

    pub fn evidence(&self) -> Option<&str> {
        match &self.body {
            Body::Evd { evidence } => Some(evidence),
            _ => None,
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Node<G>)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn nodes(&self) -> Vec<&Node<G>> {
        let mut out = Vec::new();
        self.walk(&mut |n| out.push(n));
        out
    }

    pub fn find(&self, id: &str) -> Option<&Node<G>> {
        self.nodes().into_iter().find(|n| n.id == id)
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut Node<G>> {
        if self.id == id {
            return Some(self);
        }
        match &mut self.body {
            Body::Decomp { children, .. } => children.iter_mut().find_map(|c| c.find_mut(id)),
            _ => None,
        }
    }

    /// Ids of every node strictly below this one.
    pub fn descendant_ids(&self) -> Vec<String> {
        self.nodes()
            .into_iter()
            .skip(1)
            .map(|n| n.id.clone())
            .collect()
    }

    /// Rejects empty decompositions and duplicate node ids.
    pub fn validate_shape(&self) -> Result<(), AcError> {
        let mut seen = BTreeSet::new();
        for n in self.nodes() {
            if !seen.insert(n.id.as_str()) {
                return Err(AcError::DuplicateNode(n.id.clone()));
            }
            if matches!(&n.body, Body::Decomp { children, .. } if children.is_empty()) {
                return Err(AcError::EmptyDecomposition(n.id.clone()));
            }
        }
        Ok(())
    }

    pub fn map_goals<H>(&self, f: &dyn Fn(&G) -> H) -> Node<H> {
        Node {
            id: self.id.clone(),
            goal: f(&self.goal),
            body: match &self.body {
                Body::Und => Body::Und,
                Body::Evd { evidence } => Body::Evd {
                    evidence: evidence.clone(),
                },
                Body::Decomp { strategy, children } => Body::Decomp {
                    strategy: strategy.clone(),
                    children: children.iter().map(|c| c.map_goals(f)).collect(),
                },
            },
        }
    }
}

impl VarAc {
    pub fn pc(&self) -> &crate::featexpr::FeatureExpr {
        &self.goal.pc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accore::PredicateRef;

    fn g(n: i64) -> Goal {
        Goal::pred(Value::Int(n), PredicateRef::is_even())
    }

    #[test]
    fn json_shape_and_round_trip() {
        let ac = Ac::decomp(
            "G1",
            g(4),
            Strategy::manual("S", true),
            vec![Ac::evd("G2", g(2), "E1"), Ac::und("G3", g(6))],
        );
        let v = serde_json::to_value(&ac).unwrap();
        assert_eq!(v["kind"], "decomp");
        assert_eq!(v["children"][0]["kind"], "evd");
        assert_eq!(v["children"][0]["evidence"], "E1");
        assert_eq!(v["strategy"]["provenance"]["kind"], "manual");
        let back: Ac = serde_json::from_value(v).unwrap();
        assert_eq!(back, ac);
        assert_eq!(*back.root_goal(), g(4));
        assert_eq!(back.descendant_ids(), vec!["G2", "G3"]);
    }

    #[test]
    fn shape_validation() {
        let empty = Ac::decomp("G1", g(1), Strategy::manual("S", true), vec![]);
        assert!(matches!(
            empty.validate_shape(),
            Err(AcError::EmptyDecomposition(_))
        ));
        let dup = Ac::decomp(
            "G1",
            g(1),
            Strategy::manual("S", true),
            vec![Ac::und("G1", g(2))],
        );
        assert!(matches!(
            dup.validate_shape(),
            Err(AcError::DuplicateNode(_))
        ));
    }
}
