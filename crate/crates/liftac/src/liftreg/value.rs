//! Variability-aware regression values and their composition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::featexpr::{Alphabet, Bits, Configuration, ExprError, FeatureExpr, Universe};
use crate::regression::RegValue;

/// A partition of the configurations in `over` into those whose assurance
/// can be reused, must be revised, or must be rechecked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarRegValue {
    pub over: FeatureExpr,
    pub reuse: FeatureExpr,
    pub revise: FeatureExpr,
    pub recheck: FeatureExpr,
}

impl VarRegValue {
    pub fn new(reuse: FeatureExpr, revise: FeatureExpr, recheck: FeatureExpr) -> Self {
        let over = FeatureExpr::any([reuse.clone(), revise.clone(), recheck.clone()]);
        VarRegValue {
            over,
            reuse,
            revise,
            recheck,
        }
    }

    pub fn reuse(phi: FeatureExpr) -> Self {
        VarRegValue {
            over: phi.clone(),
            reuse: phi,
            revise: FeatureExpr::False,
            recheck: FeatureExpr::False,
        }
    }

    pub fn revise(phi: FeatureExpr) -> Self {
        VarRegValue {
            over: phi.clone(),
            reuse: FeatureExpr::False,
            revise: phi,
            recheck: FeatureExpr::False,
        }
    }

    pub fn recheck(phi: FeatureExpr) -> Self {
        VarRegValue {
            over: phi.clone(),
            reuse: FeatureExpr::False,
            revise: FeatureExpr::False,
            recheck: phi,
        }
    }

    /// The regression value of the product `c`; `None` outside `over`.
    pub fn derive(&self, c: &Configuration) -> Option<RegValue> {
        if !self.over.eval(c) {
            None
        } else if self.revise.eval(c) {
            Some(RegValue::Revise)
        } else if self.recheck.eval(c) {
            Some(RegValue::Recheck)
        } else if self.reuse.eval(c) {
            Some(RegValue::Reuse)
        } else {
            None
        }
    }

    /// Truth tables of the parts, each read inside `over`.
    pub fn to_bits(&self, u: &Universe) -> Result<RegBits, ExprError> {
        let over = u.restrict(&self.over)?;
        Ok(RegBits {
            reuse: u.bits(&self.reuse)?.and(&over),
            revise: u.bits(&self.revise)?.and(&over),
            recheck: u.bits(&self.recheck)?.and(&over),
            over,
        })
    }

    /// Whether the three parts partition `over` on the alphabet.
    pub fn is_partition(&self, f: &Alphabet) -> Result<bool, ExprError> {
        self.is_partition_in(&Universe::new(f.clone(), &FeatureExpr::True)?)
    }

    /// Whether the three parts partition `over` within the domain of `u`.
    pub fn is_partition_in(&self, u: &Universe) -> Result<bool, ExprError> {
        Ok(self.to_bits(u)?.is_partition())
    }

    /// `self ⊗ other`: revise wins, then recheck, then reuse, on the union
    /// of the two domains.
    pub fn compose(&self, other: &VarRegValue, f: &Alphabet) -> Result<VarRegValue, ExprError> {
        let u = Universe::new(f.clone(), &FeatureExpr::True)?;
        Ok(self.to_bits(&u)?.compose(&other.to_bits(&u)?).to_value(&u))
    }

    /// Semantic equality of every part within the alphabet.
    pub fn equivalent(&self, other: &VarRegValue, f: &Alphabet) -> Result<bool, ExprError> {
        let u = Universe::new(f.clone(), &FeatureExpr::True)?;
        Ok(self.to_bits(&u)? == other.to_bits(&u)?)
    }
}

/// Left fold of `⊗`.
pub fn min_reg_lift(
    values: &[VarRegValue],
    f: &Alphabet,
) -> Result<Option<VarRegValue>, ExprError> {
    let mut it = values.iter();
    let Some(first) = it.next() else {
        return Ok(None);
    };
    let mut acc = first.clone();
    for v in it {
        acc = acc.compose(v, f)?;
    }
    Ok(Some(acc))
}

/// How a regenerated goal with presence condition `new_pc` relates to an
/// existing goal with `old_pc`: configurations where the old goal is
/// obsolete, where it is reused, and where the new goal is unmatched.
pub fn match_lift_split(
    new_pc: &FeatureExpr,
    old_pc: &FeatureExpr,
    f: &Alphabet,
) -> Result<(FeatureExpr, FeatureExpr, FeatureExpr), ExprError> {
    let (n, o) = (f.bits(new_pc)?, f.bits(old_pc)?);
    Ok((
        f.expr_of(&o.minus(&n)),
        f.expr_of(&o.and(&n)),
        f.expr_of(&n.minus(&o)),
    ))
}

impl fmt::Display for VarRegValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}, {}⟩", self.reuse, self.revise, self.recheck)
    }
}

/// A regression value over the truth table of a universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegBits {
    pub over: Bits,
    pub reuse: Bits,
    pub revise: Bits,
    pub recheck: Bits,
}

impl RegBits {
    pub fn triple(reuse: Bits, revise: Bits, recheck: Bits) -> Self {
        let over = reuse.or(&revise).or(&recheck);
        RegBits {
            over,
            reuse,
            revise,
            recheck,
        }
    }

    pub fn empty(u: &Universe) -> Self {
        Self::reuse(&u.empty())
    }

    pub fn reuse(b: &Bits) -> Self {
        Self::triple(b.clone(), b.cleared(), b.cleared())
    }

    pub fn revise(b: &Bits) -> Self {
        Self::triple(b.cleared(), b.clone(), b.cleared())
    }

    pub fn recheck(b: &Bits) -> Self {
        Self::triple(b.cleared(), b.cleared(), b.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.over.is_empty()
    }

    pub fn is_partition(&self) -> bool {
        crate::featexpr::bits_partition(
            &[
                self.reuse.clone(),
                self.revise.clone(),
                self.recheck.clone(),
            ],
            &self.over,
        )
    }

    pub fn compose(&self, o: &RegBits) -> RegBits {
        let over = self.over.or(&o.over);
        let revise = self.revise.or(&o.revise);
        let recheck = self.recheck.or(&o.recheck).minus(&revise);
        let reuse = over.minus(&revise).minus(&recheck);
        RegBits {
            over,
            reuse,
            revise,
            recheck,
        }
    }

    pub fn restrict(&self, b: &Bits) -> RegBits {
        RegBits {
            over: self.over.and(b),
            reuse: self.reuse.and(b),
            revise: self.revise.and(b),
            recheck: self.recheck.and(b),
        }
    }

    pub fn at(&self, idx: usize) -> Option<RegValue> {
        if !self.over.get(idx) {
            None
        } else if self.revise.get(idx) {
            Some(RegValue::Revise)
        } else if self.recheck.get(idx) {
            Some(RegValue::Recheck)
        } else {
            Some(RegValue::Reuse)
        }
    }

    /// Rendered against `u`: configurations outside its domain are
    /// don't-cares, so within the domain the parts partition `over`.
    pub fn to_value(&self, u: &Universe) -> VarRegValue {
        VarRegValue {
            over: u.expr(&self.over),
            reuse: u.expr(&self.reuse),
            revise: u.expr(&self.revise),
            recheck: u.expr(&self.recheck),
        }
    }
}
