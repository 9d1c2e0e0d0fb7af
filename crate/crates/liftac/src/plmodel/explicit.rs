//! Explicit product-line encodings of plain values.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{FeatureModel, ModelError};
use crate::featexpr::{bits_partition, Configuration, FeatureExpr};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell<T> {
    pub value: T,
    pub guard: FeatureExpr,
}

/// One value per region of a partition of the feature model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExplicitPL<T> {
    pub cells: Vec<Cell<T>>,
}

impl<T> ExplicitPL<T> {
    pub fn new(cells: Vec<(T, FeatureExpr)>) -> Self {
        ExplicitPL {
            cells: cells
                .into_iter()
                .map(|(value, guard)| Cell { value, guard })
                .collect(),
        }
    }

    /// Accepts exactly the encodings whose guards partition the feature model.
    pub fn validate(&self, fm: &FeatureModel) -> Result<(), ModelError> {
        let u = fm.universe();
        let guards = self
            .cells
            .iter()
            .map(|c| u.restrict(&c.guard))
            .collect::<Result<Vec<_>, _>>()?;
        if bits_partition(&guards, u.domain()) {
            Ok(())
        } else {
            Err(ModelError::NotAPartition(
                self.cells
                    .iter()
                    .map(|c| c.guard.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            ))
        }
    }

    /// The unique value whose guard `c` satisfies.
    pub fn derive(&self, fm: &FeatureModel, c: &Configuration) -> Result<&T, ModelError> {
        self.validate(fm)?;
        if !fm.accepts(c) {
            return Err(ModelError::InvalidConfiguration(c.clone()));
        }
        self.cells
            .iter()
            .find(|cell| cell.guard.eval(c))
            .map(|cell| &cell.value)
            .ok_or_else(|| ModelError::Uncovered(c.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Entry<T> {
    pub value: T,
    pub pc: FeatureExpr,
}

/// A set whose elements carry presence conditions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarSet<T> {
    pub entries: Vec<Entry<T>>,
}

impl<T: Ord + Clone> VarSet<T> {
    pub fn new(entries: Vec<(T, FeatureExpr)>) -> Self {
        VarSet {
            entries: entries
                .into_iter()
                .map(|(value, pc)| Entry { value, pc })
                .collect(),
        }
    }

    pub fn derive(&self, c: &Configuration) -> BTreeSet<T> {
        self.entries
            .iter()
            .filter(|e| e.pc.eval(c))
            .map(|e| e.value.clone())
            .collect()
    }
}
