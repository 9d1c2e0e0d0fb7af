//! Propositional feature expressions, configurations and truth-table reasoning.
//!
//! Every semantic question (satisfiability, implication, equivalence,
//! partitioning, minimisation) is answered by enumerating the assignments of
//! a declared [`Alphabet`]. Truth tables are stored as [`Bits`], one bit per
//! configuration, so the heavy lifting in the analyses is word-parallel.

mod bits;
mod minimize;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use bits::Bits;

/// Largest alphabet that truth-table enumeration accepts.
pub const MAX_FEATURES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("invalid feature name `{0}`")]
    InvalidName(String),
    #[error("alphabet has {0} features; enumeration is limited to {MAX_FEATURES}")]
    Capacity(usize),
    #[error("truth tables over different alphabets")]
    AlphabetMismatch,
}

/// A propositional formula whose atoms are feature names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureExpr {
    True,
    False,
    Var(String),
    Not(Box<FeatureExpr>),
    And(Box<FeatureExpr>, Box<FeatureExpr>),
    Or(Box<FeatureExpr>, Box<FeatureExpr>),
    Implies(Box<FeatureExpr>, Box<FeatureExpr>),
    Xor(Box<FeatureExpr>, Box<FeatureExpr>),
}

impl FeatureExpr {
    pub fn var(name: impl Into<String>) -> Self {
        FeatureExpr::Var(name.into())
    }

    pub fn implies(self, rhs: FeatureExpr) -> Self {
        FeatureExpr::Implies(Box::new(self), Box::new(rhs))
    }

    /// Conjunction that folds constants; `True` for an empty iterator.
    pub fn all<I: IntoIterator<Item = FeatureExpr>>(items: I) -> Self {
        items
            .into_iter()
            .fold(FeatureExpr::True, |acc, e| match (acc, e) {
                (FeatureExpr::True, e) | (e, FeatureExpr::True) => e,
                (FeatureExpr::False, _) | (_, FeatureExpr::False) => FeatureExpr::False,
                (a, b) => a & b,
            })
    }

    /// Disjunction that folds constants; `False` for an empty iterator.
    pub fn any<I: IntoIterator<Item = FeatureExpr>>(items: I) -> Self {
        items
            .into_iter()
            .fold(FeatureExpr::False, |acc, e| match (acc, e) {
                (FeatureExpr::False, e) | (e, FeatureExpr::False) => e,
                (FeatureExpr::True, _) | (_, FeatureExpr::True) => FeatureExpr::True,
                (a, b) => a | b,
            })
    }

    /// Structural evaluation: a variable holds iff the configuration selects it.
    pub fn eval(&self, c: &Configuration) -> bool {
        match self {
            FeatureExpr::True => true,
            FeatureExpr::False => false,
            FeatureExpr::Var(v) => c.contains(v),
            FeatureExpr::Not(e) => !e.eval(c),
            FeatureExpr::And(a, b) => a.eval(c) && b.eval(c),
            FeatureExpr::Or(a, b) => a.eval(c) || b.eval(c),
            FeatureExpr::Implies(a, b) => !a.eval(c) || b.eval(c),
            FeatureExpr::Xor(a, b) => a.eval(c) != b.eval(c),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            FeatureExpr::True | FeatureExpr::False => {}
            FeatureExpr::Var(v) => {
                out.insert(v.clone());
            }
            FeatureExpr::Not(e) => e.collect_vars(out),
            FeatureExpr::And(a, b)
            | FeatureExpr::Or(a, b)
            | FeatureExpr::Implies(a, b)
            | FeatureExpr::Xor(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            FeatureExpr::Implies(..) => 1,
            FeatureExpr::Or(..) => 2,
            FeatureExpr::Xor(..) => 3,
            FeatureExpr::And(..) => 4,
            FeatureExpr::Not(..) => 5,
            _ => 6,
        }
    }
}

impl std::ops::Not for FeatureExpr {
    type Output = FeatureExpr;
    fn not(self) -> FeatureExpr {
        FeatureExpr::Not(Box::new(self))
    }
}

impl std::ops::BitAnd for FeatureExpr {
    type Output = FeatureExpr;
    fn bitand(self, rhs: FeatureExpr) -> FeatureExpr {
        FeatureExpr::And(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::BitOr for FeatureExpr {
    type Output = FeatureExpr;
    fn bitor(self, rhs: FeatureExpr) -> FeatureExpr {
        FeatureExpr::Or(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::BitXor for FeatureExpr {
    type Output = FeatureExpr;
    fn bitxor(self, rhs: FeatureExpr) -> FeatureExpr {
        FeatureExpr::Xor(Box::new(self), Box::new(rhs))
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &FeatureExpr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for FeatureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left-associative binary operators parenthesise a right operand of
        // equal precedence; `=>` is right-associative so the left side does.
        let binary = |f: &mut fmt::Formatter<'_>, a: &FeatureExpr, op: &str, b: &FeatureExpr| {
            let p = self.precedence();
            let right_assoc = matches!(self, FeatureExpr::Implies(..));
            let lp = if right_assoc {
                a.precedence() <= p
            } else {
                a.precedence() < p
            };
            let rp = if right_assoc {
                b.precedence() < p
            } else {
                b.precedence() <= p
            };
            write_child(f, a, lp)?;
            write!(f, " {op} ")?;
            write_child(f, b, rp)
        };
        match self {
            FeatureExpr::True => write!(f, "true"),
            FeatureExpr::False => write!(f, "false"),
            FeatureExpr::Var(v) => write!(f, "{v}"),
            FeatureExpr::Not(e) => {
                write!(f, "!")?;
                write_child(f, e, e.precedence() < 5)
            }
            FeatureExpr::And(a, b) => binary(f, a, "&", b),
            FeatureExpr::Or(a, b) => binary(f, a, "|", b),
            FeatureExpr::Xor(a, b) => binary(f, a, "xor", b),
            FeatureExpr::Implies(a, b) => binary(f, a, "=>", b),
        }
    }
}

impl FromStr for FeatureExpr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        parse::parse(s)
    }
}

impl Serialize for FeatureExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "true" | "false" | "xor")
}

/// A set of selected features.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub BTreeSet<String>);

impl Configuration {
    pub fn new<I, S>(features: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Configuration(features.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.0.contains(feature)
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Configuration {
    type Err = ExprError;
    /// Accepts `A,B`, `{A,B}` or the empty string.
    fn from_str(s: &str) -> Result<Self, ExprError> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut out = BTreeSet::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if !is_identifier(part) {
                return Err(ExprError::InvalidName(part.to_string()));
            }
            out.insert(part.to_string());
        }
        Ok(Configuration(out))
    }
}

/// An ordered, duplicate-free feature alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if let Some(bad) = set.iter().find(|n| !is_identifier(n)) {
            return Err(ExprError::InvalidName(bad.clone()));
        }
        if set.len() > MAX_FEATURES {
            return Err(ExprError::Capacity(set.len()));
        }
        Ok(Alphabet {
            names: set.into_iter().collect(),
        })
    }

    /// The features of `c` that belong to this alphabet.
    pub fn project(&self, c: &Configuration) -> Configuration {
        Configuration(c.iter().filter(|f| self.contains(f)).cloned().collect())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Union of two alphabets.
    pub fn union(&self, other: &Alphabet) -> Result<Alphabet, ExprError> {
        Alphabet::new(self.names.iter().chain(other.names.iter()).cloned())
    }

    pub fn check_expr(&self, e: &FeatureExpr) -> Result<(), ExprError> {
        match e.vars().into_iter().find(|v| !self.contains(v)) {
            Some(v) => Err(ExprError::UnknownFeature(v)),
            None => Ok(()),
        }
    }

    pub fn check_config(&self, c: &Configuration) -> Result<(), ExprError> {
        match c.iter().find(|v| !self.contains(v)) {
            Some(v) => Err(ExprError::UnknownFeature(v.clone())),
            None => Ok(()),
        }
    }

    /// Checked evaluation: rejects names outside the alphabet.
    pub fn eval(&self, e: &FeatureExpr, c: &Configuration) -> Result<bool, ExprError> {
        self.check_expr(e)?;
        self.check_config(c)?;
        Ok(e.eval(c))
    }

    pub fn full(&self) -> Bits {
        Bits::full(self.len())
    }

    pub fn empty(&self) -> Bits {
        Bits::empty(self.len())
    }

    /// Truth table of `e`, one bit per configuration index.
    pub fn bits(&self, e: &FeatureExpr) -> Result<Bits, ExprError> {
        let n = self.len();
        Ok(match e {
            FeatureExpr::True => Bits::full(n),
            FeatureExpr::False => Bits::empty(n),
            FeatureExpr::Var(v) => {
                let i = self
                    .index_of(v)
                    .ok_or_else(|| ExprError::UnknownFeature(v.clone()))?;
                Bits::var(n, i)
            }
            FeatureExpr::Not(a) => self.bits(a)?.not(),
            FeatureExpr::And(a, b) => self.bits(a)?.and(&self.bits(b)?),
            FeatureExpr::Or(a, b) => self.bits(a)?.or(&self.bits(b)?),
            FeatureExpr::Implies(a, b) => self.bits(a)?.not().or(&self.bits(b)?),
            FeatureExpr::Xor(a, b) => self.bits(a)?.xor(&self.bits(b)?),
        })
    }

    /// Index of a configuration: bit `i` is set iff feature `i` is selected.
    pub fn index(&self, c: &Configuration) -> Result<usize, ExprError> {
        let mut idx = 0usize;
        for f in c.iter() {
            let i = self
                .index_of(f)
                .ok_or_else(|| ExprError::UnknownFeature(f.clone()))?;
            idx |= 1 << i;
        }
        Ok(idx)
    }

    pub fn config_at(&self, idx: usize) -> Configuration {
        Configuration(
            self.names
                .iter()
                .enumerate()
                .filter(|(i, _)| idx >> i & 1 == 1)
                .map(|(_, n)| n.clone())
                .collect(),
        )
    }

    /// Configurations of a truth table in canonical order.
    pub fn configs(&self, b: &Bits) -> Vec<Configuration> {
        let mut out: Vec<Configuration> = b.ones().map(|i| self.config_at(i)).collect();
        out.sort();
        out
    }

    /// Minimal sum-of-products formula for a truth table.
    pub fn expr_of(&self, b: &Bits) -> FeatureExpr {
        minimize::minimal_sop(b, &self.names)
    }

    /// Truth table of the configurations that select exactly the given features.
    pub fn bits_of_config(&self, c: &Configuration) -> Result<Bits, ExprError> {
        let mut b = self.empty();
        b.set(self.index(c)?);
        Ok(b)
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Alphabet::new(v).map_err(serde::de::Error::custom)
    }
}

/// An alphabet paired with a domain of admissible configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    alphabet: Alphabet,
    domain: Bits,
}

impl Universe {
    pub fn new(alphabet: Alphabet, domain: &FeatureExpr) -> Result<Self, ExprError> {
        let domain = alphabet.bits(domain)?;
        Ok(Universe { alphabet, domain })
    }

    pub fn from_bits(alphabet: Alphabet, domain: Bits) -> Self {
        assert_eq!(
            domain.arity(),
            alphabet.len(),
            "domain arity must match the alphabet"
        );
        Universe { alphabet, domain }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn domain(&self) -> &Bits {
        &self.domain
    }

    /// Truth table of `e` intersected with the domain.
    pub fn restrict(&self, e: &FeatureExpr) -> Result<Bits, ExprError> {
        Ok(self.alphabet.bits(e)?.and(&self.domain))
    }

    pub fn bits(&self, e: &FeatureExpr) -> Result<Bits, ExprError> {
        self.alphabet.bits(e)
    }

    /// Minimal formula agreeing with `b` on the domain; configurations
    /// outside the domain are don't-cares.
    pub fn expr(&self, b: &Bits) -> FeatureExpr {
        minimize::minimal_sop_dc(
            &b.and(&self.domain),
            &self.domain.not(),
            &self.alphabet.names,
        )
    }

    pub fn configs(&self, b: &Bits) -> Vec<Configuration> {
        self.alphabet.configs(b)
    }

    pub fn empty(&self) -> Bits {
        self.alphabet.empty()
    }

    pub fn with_domain(&self, domain: Bits) -> Universe {
        Universe::from_bits(self.alphabet.clone(), domain)
    }
}

/// Structural evaluation of `phi` under `c`.
pub fn eval_expr(phi: &FeatureExpr, c: &Configuration) -> bool {
    phi.eval(c)
}

/// All configurations over `f` satisfying `phi`, canonically ordered.
pub fn configs_of(phi: &FeatureExpr, f: &Alphabet) -> Result<Vec<Configuration>, ExprError> {
    Ok(f.configs(&f.bits(phi)?))
}

pub fn satisfiable(phi: &FeatureExpr, f: &Alphabet) -> Result<bool, ExprError> {
    Ok(!f.bits(phi)?.is_empty())
}

pub fn implies(phi: &FeatureExpr, psi: &FeatureExpr, f: &Alphabet) -> Result<bool, ExprError> {
    Ok(f.bits(phi)?.is_subset(&f.bits(psi)?))
}

pub fn equiv(phi: &FeatureExpr, psi: &FeatureExpr, f: &Alphabet) -> Result<bool, ExprError> {
    Ok(f.bits(phi)? == f.bits(psi)?)
}

/// True iff every configuration of `phi` satisfies exactly one part and no
/// part reaches outside `phi`.
pub fn is_partition(
    parts: &[FeatureExpr],
    phi: &FeatureExpr,
    f: &Alphabet,
) -> Result<bool, ExprError> {
    let tables = parts
        .iter()
        .map(|p| f.bits(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(bits_partition(&tables, &f.bits(phi)?))
}

pub(crate) fn bits_partition(parts: &[Bits], whole: &Bits) -> bool {
    let mut seen = whole.cleared();
    for p in parts {
        if !p.is_subset(whole) || !p.and(&seen).is_empty() {
            return false;
        }
        seen = seen.or(p);
    }
    seen == *whole
}

/// Canonical minimal sum-of-products form of `phi`.
pub fn simplify(phi: &FeatureExpr, f: &Alphabet) -> Result<FeatureExpr, ExprError> {
    Ok(f.expr_of(&f.bits(phi)?))
}
