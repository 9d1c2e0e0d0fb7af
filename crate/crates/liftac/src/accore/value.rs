//! Goal subjects and strategy inputs: plain values, model references,
//! analysis outputs and their variational encodings.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PredicateRef;
use crate::analyses::{PropertySpec, Query, Verdict};
use crate::featexpr::{Configuration, FeatureExpr};
use crate::plmodel::{Cell, Entry, ModelRef, ModelStore};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Value {
    Int(i64),
    Text(String),
    /// A state of a model.
    Elem {
        model: ModelRef,
        id: String,
    },
    Model(ModelRef),
    Set(BTreeSet<Value>),
    Tuple(Vec<Value>),
    Spec(PropertySpec),
    Query(Query),
    Verdict(Verdict),
    Pred(PredicateRef),
    /// The result of running `analysis` on `input`.
    Output {
        analysis: String,
        input: Box<Value>,
        output: Box<Value>,
    },
    VarSet {
        entries: Vec<Entry<Value>>,
    },
    /// An explicit product line of values.
    Choice {
        cells: Vec<Cell<Value>>,
    },
    /// A singleton present only under `guard`.
    Single {
        value: Box<Value>,
        guard: FeatureExpr,
    },
    /// What a variational value derives to outside its guard.
    Undefined,
}

impl Value {
    pub fn model(r: ModelRef) -> Self {
        Value::Model(r)
    }

    pub fn elem(model: &ModelRef, id: &str) -> Self {
        Value::Elem {
            model: model.clone(),
            id: id.to_string(),
        }
    }

    pub fn set<I: IntoIterator<Item = Value>>(items: I) -> Self {
        Value::Set(items.into_iter().collect())
    }

    pub fn ints<I: IntoIterator<Item = i64>>(items: I) -> Self {
        Value::Set(items.into_iter().map(Value::Int).collect())
    }

    pub fn output(analysis: &str, input: Value, output: Value) -> Self {
        Value::Output {
            analysis: analysis.to_string(),
            input: Box::new(input),
            output: Box::new(output),
        }
    }

    pub fn single(value: Value, guard: FeatureExpr) -> Self {
        Value::Single {
            value: Box::new(value),
            guard,
        }
    }

    pub fn var_set(entries: Vec<(Value, FeatureExpr)>) -> Self {
        Value::VarSet {
            entries: entries
                .into_iter()
                .map(|(value, pc)| Entry { value, pc })
                .collect(),
        }
    }

    pub fn choice(cells: Vec<(Value, FeatureExpr)>) -> Self {
        Value::Choice {
            cells: cells
                .into_iter()
                .map(|(value, guard)| Cell { value, guard })
                .collect(),
        }
    }

    /// Whether the value carries product-line variability of its own.
    pub fn is_variational(&self) -> bool {
        let mut found = false;
        self.visit(&mut |v| {
            if matches!(
                v,
                Value::VarSet { .. } | Value::Choice { .. } | Value::Single { .. }
            ) {
                found = true;
            }
        });
        found
    }

    /// Pre-order traversal over every nested value, including predicate
    /// parameters.
    pub fn visit(&self, f: &mut dyn FnMut(&Value)) {
        f(self);
        match self {
            Value::Set(xs) => xs.iter().for_each(|x| x.visit(f)),
            Value::Tuple(xs) => xs.iter().for_each(|x| x.visit(f)),
            Value::Pred(p) => p.params.iter().for_each(|x| x.visit(f)),
            Value::Output { input, output, .. } => {
                input.visit(f);
                output.visit(f);
            }
            Value::VarSet { entries } => entries.iter().for_each(|e| e.value.visit(f)),
            Value::Choice { cells } => cells.iter().for_each(|c| c.value.visit(f)),
            Value::Single { value, .. } => value.visit(f),
            _ => {}
        }
    }

    /// Rebuilds the value bottom-up, applying `f` to every node after its
    /// children have been rebuilt.
    pub fn rewrite(&self, f: &dyn Fn(Value) -> Value) -> Value {
        let inner = match self {
            Value::Set(xs) => Value::Set(xs.iter().map(|x| x.rewrite(f)).collect()),
            Value::Tuple(xs) => Value::Tuple(xs.iter().map(|x| x.rewrite(f)).collect()),
            Value::Pred(p) => Value::Pred(p.rewrite(f)),
            Value::Output {
                analysis,
                input,
                output,
            } => Value::Output {
                analysis: analysis.clone(),
                input: Box::new(input.rewrite(f)),
                output: Box::new(output.rewrite(f)),
            },
            Value::VarSet { entries } => Value::VarSet {
                entries: entries
                    .iter()
                    .map(|e| Entry {
                        value: e.value.rewrite(f),
                        pc: e.pc.clone(),
                    })
                    .collect(),
            },
            Value::Choice { cells } => Value::Choice {
                cells: cells
                    .iter()
                    .map(|c| Cell {
                        value: c.value.rewrite(f),
                        guard: c.guard.clone(),
                    })
                    .collect(),
            },
            Value::Single { value, guard } => Value::Single {
                value: Box::new(value.rewrite(f)),
                guard: guard.clone(),
            },
            other => other.clone(),
        };
        f(inner)
    }

    /// Applies `f` to every model reference.
    pub fn map_refs(&self, f: &dyn Fn(&ModelRef) -> ModelRef) -> Value {
        self.rewrite(&|v| match v {
            Value::Model(r) => Value::Model(f(&r)),
            Value::Elem { model, id } => Value::Elem {
                model: f(&model),
                id,
            },
            other => other,
        })
    }

    pub fn refs(&self) -> BTreeSet<ModelRef> {
        let mut out = BTreeSet::new();
        self.visit(&mut |v| match v {
            Value::Model(r) | Value::Elem { model: r, .. } => {
                out.insert(r.clone());
            }
            _ => {}
        });
        out
    }

    /// Ids of the models this value mentions.
    pub fn model_ids(&self) -> BTreeSet<String> {
        self.refs().into_iter().map(|r| r.model).collect()
    }

    /// The product value for configuration `c`.
    pub fn derive(&self, c: &Configuration) -> Value {
        match self {
            Value::Model(r) => Value::Model(r.at(c)),
            Value::Elem { model, id } => Value::Elem {
                model: model.at(c),
                id: id.clone(),
            },
            Value::Set(xs) => Value::Set(xs.iter().map(|x| x.derive(c)).collect()),
            Value::Tuple(xs) => Value::Tuple(xs.iter().map(|x| x.derive(c)).collect()),
            Value::Pred(p) => Value::Pred(p.derive(c)),
            Value::Output {
                analysis,
                input,
                output,
            } => Value::Output {
                analysis: analysis.clone(),
                input: Box::new(input.derive(c)),
                output: Box::new(output.derive(c)),
            },
            Value::VarSet { entries } => Value::Set(
                entries
                    .iter()
                    .filter(|e| e.pc.eval(c))
                    .map(|e| e.value.derive(c))
                    .collect(),
            ),
            Value::Choice { cells } => cells
                .iter()
                .find(|cell| cell.guard.eval(c))
                .map(|cell| cell.value.derive(c))
                .unwrap_or(Value::Undefined),
            Value::Single { value, guard } => {
                if guard.eval(c) {
                    value.derive(c)
                } else {
                    Value::Undefined
                }
            }
            other => other.clone(),
        }
    }

    /// Drops analysis results, keeping what was analysed.
    pub fn erase_outputs(&self) -> Value {
        self.rewrite(&|v| match v {
            Value::Output {
                analysis, input, ..
            } => Value::Output {
                analysis,
                input,
                output: Box::new(Value::Undefined),
            },
            other => other,
        })
    }

    /// Identity used when matching regenerated goals against existing ones:
    /// model versions and analysis results are ignored.
    pub fn match_key(&self) -> Value {
        self.erase_outputs().map_refs(&|r| ModelRef {
            version: String::new(),
            ..r.clone()
        })
    }

    /// The value with every model reference replaced by a digest of what it
    /// denotes, so equal content gives equal keys across versions.
    pub fn content_key(&self, store: &ModelStore) -> Value {
        self.map_refs(&|r| {
            let digest = store
                .content_digest(r)
                .unwrap_or_else(|_| format!("missing:{r}"));
            ModelRef {
                model: digest,
                version: String::new(),
                config: None,
            }
        })
    }

    /// Elements of a finite set, looking through an analysis output.
    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(xs) => Some(xs),
            Value::Output { output, .. } => output.as_set(),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(
            f: &mut fmt::Formatter<'_>,
            open: &str,
            xs: impl Iterator<Item = T>,
            close: &str,
        ) -> fmt::Result {
            write!(f, "{open}")?;
            for (i, x) in xs.enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "{close}")
        }
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => write!(f, "\"{s}\""),
            Value::Elem { model, id } => write!(f, "{id}∈{model}"),
            Value::Model(r) => write!(f, "{r}"),
            Value::Set(xs) => list(f, "{", xs.iter(), "}"),
            Value::Tuple(xs) => list(f, "(", xs.iter(), ")"),
            Value::Spec(s) => write!(f, "{s}"),
            Value::Query(q) => write!(f, "{q}"),
            Value::Verdict(Verdict::Ok) => write!(f, "ok"),
            Value::Verdict(Verdict::Violation { .. }) => write!(f, "violation"),
            Value::Pred(p) => write!(f, "{p}"),
            Value::Output {
                analysis, input, ..
            } => write!(f, "{analysis}{input}"),
            Value::VarSet { entries } => list(
                f,
                "{",
                entries.iter().map(|e| format!("{}@[{}]", e.value, e.pc)),
                "}",
            ),
            Value::Choice { cells } => list(
                f,
                "<",
                cells.iter().map(|c| format!("{}@[{}]", c.value, c.guard)),
                ">",
            ),
            Value::Single { value, guard } => write!(f, "{{{value}}}@[{guard}]"),
            Value::Undefined => write!(f, "*"),
        }
    }
}
