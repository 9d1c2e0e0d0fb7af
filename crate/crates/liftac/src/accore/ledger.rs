//! The evidence ledger: which evidence adequately supports which claims.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AcError, Goal, PredicateRef, Value, VarGoal};
use crate::featexpr::{Bits, Configuration, FeatureExpr, Universe};
use crate::plmodel::ModelStore;
use crate::util::digest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceKind {
    Manual,
    AnalysisResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub kind: EvidenceKind,
    pub digest: String,
}

/// What a ledger entry vouches for: a product goal, or a predicate holding
/// of every product of a variational subject under `pc`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Claim {
    Goal {
        goal: Goal,
    },
    Inv {
        pred: PredicateRef,
        subject: Value,
        pc: FeatureExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub evidence: String,
    pub claim: Claim,
    pub adequate: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    #[serde(default)]
    pub records: BTreeMap<String, EvidenceRecord>,
    #[serde(default)]
    pub entries: Vec<LedgerEntry>,
}

/// Deterministic digest of a goal's content: models enter by what they
/// denote, so evolving a model to different content changes the digest.
pub fn goal_fingerprint(g: &Goal, store: &ModelStore) -> String {
    digest(&g.map_values(&|v| v.content_key(store)))
}

fn inv_fingerprint(pred: &PredicateRef, subject: &Value, store: &ModelStore) -> String {
    goal_fingerprint(&Goal::pred(subject.clone(), pred.clone()), store)
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_record(&mut self, id: &str, kind: EvidenceKind, payload_digest: &str) {
        self.records.insert(
            id.to_string(),
            EvidenceRecord {
                kind,
                digest: payload_digest.to_string(),
            },
        );
    }

    pub fn record(&self, id: &str) -> Result<&EvidenceRecord, AcError> {
        self.records
            .get(id)
            .ok_or_else(|| AcError::DanglingEvidence(id.to_string()))
    }

    pub fn add_entry(&mut self, evidence: &str, claim: Claim, adequate: bool) {
        self.entries.push(LedgerEntry {
            evidence: evidence.to_string(),
            claim,
            adequate,
        });
    }

    /// Records manual evidence for a goal.
    pub fn vouch(&mut self, evidence: &str, goal: Goal) {
        self.records
            .entry(evidence.to_string())
            .or_insert_with(|| EvidenceRecord {
                kind: EvidenceKind::Manual,
                digest: digest(&goal),
            });
        self.add_entry(evidence, Claim::Goal { goal }, true);
    }

    /// Records manual evidence that `pred` holds of every product of `subject` under `pc`.
    pub fn vouch_inv(
        &mut self,
        evidence: &str,
        pred: PredicateRef,
        subject: Value,
        pc: FeatureExpr,
    ) {
        self.records
            .entry(evidence.to_string())
            .or_insert_with(|| EvidenceRecord {
                kind: EvidenceKind::Manual,
                digest: digest(&(&pred, &subject)),
            });
        self.add_entry(evidence, Claim::Inv { pred, subject, pc }, true);
    }

    /// Enters an analysis verdict embedded in a `ResultOk` goal's subject.
    /// Only the Ok part becomes an adequacy entry. Returns whether anything
    /// was entered.
    pub fn enter_result(&mut self, evidence: &str, goal: &VarGoal) -> bool {
        let Goal::Pred {
            subject: subject @ Value::Output { output, .. },
            pred,
        } = &goal.goal
        else {
            return false;
        };
        if pred.schema != super::schema::RESULT_OK {
            return false;
        }
        self.records.insert(
            evidence.to_string(),
            EvidenceRecord {
                kind: EvidenceKind::AnalysisResult,
                digest: digest(output.as_ref()),
            },
        );
        match output.as_ref() {
            Value::Verdict(v) if goal.pc == FeatureExpr::True => {
                self.add_entry(
                    evidence,
                    Claim::Goal {
                        goal: goal.goal.clone(),
                    },
                    v.is_ok(),
                );
                v.is_ok()
            }
            Value::Verdict(v) if v.is_ok() => {
                self.add_entry(
                    evidence,
                    Claim::Inv {
                        pred: pred.clone(),
                        subject: subject.clone(),
                        pc: goal.pc.clone(),
                    },
                    true,
                );
                true
            }
            Value::Choice { cells } => {
                let ok = FeatureExpr::any(
                    cells
                        .iter()
                        .filter(|c| matches!(c.value, Value::Verdict(ref v) if v.is_ok()))
                        .map(|c| c.guard.clone()),
                );
                if ok == FeatureExpr::False {
                    return false;
                }
                let pc = FeatureExpr::all([goal.pc.clone(), ok]);
                self.add_entry(
                    evidence,
                    Claim::Inv {
                        pred: pred.clone(),
                        subject: subject.clone(),
                        pc,
                    },
                    true,
                );
                true
            }
            _ => false,
        }
    }

    /// Whether `evidence` is recorded as adequate for the product goal `g`.
    pub fn adequate(&self, evidence: &str, g: &Goal, store: &ModelStore) -> bool {
        let mut fp = None;
        self.entries
            .iter()
            .filter(|e| e.evidence == evidence && e.adequate)
            .any(|e| match &e.claim {
                Claim::Goal { goal } => {
                    let want = fp.get_or_insert_with(|| goal_fingerprint(g, store));
                    goal.match_key() == g.match_key() && goal_fingerprint(goal, store) == *want
                }
                Claim::Inv { .. } => false,
            })
    }

    /// Configurations of `u` under which `evidence` vouches for `pred` of
    /// every product of `subject`.
    pub fn inv_region(
        &self,
        evidence: &str,
        pred: &PredicateRef,
        subject: &Value,
        store: &ModelStore,
        u: &Universe,
    ) -> Result<Bits, AcError> {
        let mut acc = u.empty();
        let mut fp = None;
        for e in self
            .entries
            .iter()
            .filter(|e| e.evidence == evidence && e.adequate)
        {
            if let Claim::Inv {
                pred: p,
                subject: s,
                pc,
            } = &e.claim
            {
                if p != pred || s.match_key() != subject.match_key() {
                    continue;
                }
                let want = fp.get_or_insert_with(|| inv_fingerprint(pred, subject, store));
                if inv_fingerprint(p, s, store) == *want {
                    acc.or_assign(&u.restrict(pc)?);
                }
            }
        }
        Ok(acc)
    }

    /// The product ledger for `c`: invariance claims whose region contains
    /// `c` become claims about the derived subject.
    pub fn derive(&self, c: &Configuration) -> Ledger {
        let entries = self
            .entries
            .iter()
            .filter_map(|e| match &e.claim {
                Claim::Goal { .. } => Some(e.clone()),
                Claim::Inv { pred, subject, pc } if pc.eval(c) => Some(LedgerEntry {
                    evidence: e.evidence.clone(),
                    claim: Claim::Goal {
                        goal: Goal::pred(subject.derive(c), pred.derive(c)),
                    },
                    adequate: e.adequate,
                }),
                Claim::Inv { .. } => None,
            })
            .collect();
        Ledger {
            records: self.records.clone(),
            entries,
        }
    }
}
