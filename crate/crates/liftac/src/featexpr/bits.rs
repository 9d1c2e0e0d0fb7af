//! Dense truth tables: bit `i` stands for the configuration with index `i`.

use std::fmt;

const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    arity: usize,
    words: Vec<u64>,
}

impl Bits {
    fn tail_mask(arity: usize) -> u64 {
        if arity >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << arity)) - 1
        }
    }

    fn word_count(arity: usize) -> usize {
        if arity <= 6 {
            1
        } else {
            1 << (arity - 6)
        }
    }

    pub fn empty(arity: usize) -> Self {
        Bits {
            arity,
            words: vec![0; Self::word_count(arity)],
        }
    }

    pub fn full(arity: usize) -> Self {
        let mut b = Bits {
            arity,
            words: vec![u64::MAX; Self::word_count(arity)],
        };
        b.words[0] &= Self::tail_mask(arity);
        b
    }

    /// Table of the `i`-th variable.
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable index out of range");
        let mut b = Bits::empty(arity);
        if i < 6 {
            for w in b.words.iter_mut() {
                *w = VAR_MASKS[i];
            }
            b.words[0] &= Self::tail_mask(arity);
            if arity < 6 {
                return b;
            }
        } else {
            let stride = 1usize << (i - 6);
            for (k, w) in b.words.iter_mut().enumerate() {
                if k & stride != 0 {
                    *w = u64::MAX;
                }
            }
        }
        b
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of configurations the table ranges over.
    pub fn len(&self) -> usize {
        1 << self.arity
    }

    /// An all-zero table of the same arity.
    pub fn cleared(&self) -> Bits {
        Bits::empty(self.arity)
    }

    pub fn get(&self, idx: usize) -> bool {
        self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub fn set(&mut self, idx: usize) {
        assert!(idx < self.len(), "configuration index out of range");
        self.words[idx >> 6] |= 1 << (idx & 63);
    }

    fn zip(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        assert_eq!(
            self.arity, other.arity,
            "truth tables over different alphabets"
        );
        Bits {
            arity: self.arity,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn and(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn minus(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a & !b)
    }

    pub fn not(&self) -> Bits {
        let mut b = Bits {
            arity: self.arity,
            words: self.words.iter().map(|w| !w).collect(),
        };
        b.words[0] &= Self::tail_mask(self.arity);
        b
    }

    pub fn or_assign(&mut self, other: &Bits) {
        assert_eq!(
            self.arity, other.arity,
            "truth tables over different alphabets"
        );
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        *self == Bits::full(self.arity)
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.minus(other).is_empty()
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        !self.and(other).is_empty()
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Set indices in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    /// Whether the table depends on variable `i`.
    pub fn depends_on(&self, i: usize) -> bool {
        if i < 6 {
            let shift = 1u32 << i;
            let m = VAR_MASKS[i];
            let valid = Self::tail_mask(self.arity);
            self.words
                .iter()
                .any(|w| ((w & m) >> shift) != (w & !m & valid & (m >> shift)))
        } else {
            let stride = 1usize << (i - 6);
            (0..self.words.len())
                .filter(|k| k & stride == 0)
                .any(|k| self.words[k] != self.words[k | stride])
        }
    }

    /// Re-expresses this table over a larger arity, where `map[i]` is the
    /// new position of variable `i`; the extra variables are unconstrained.
    pub fn embed(&self, new_arity: usize, map: &[usize]) -> Bits {
        assert_eq!(map.len(), self.arity);
        let mut out = Bits::empty(new_arity);
        for idx in 0..(1usize << new_arity) {
            let mut old = 0usize;
            for (i, &j) in map.iter().enumerate() {
                if idx >> j & 1 == 1 {
                    old |= 1 << i;
                }
            }
            if self.get(old) {
                out.set(idx);
            }
        }
        out
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}]{{", self.arity)?;
        for (n, i) in self.ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_var(arity: usize, i: usize) -> Vec<bool> {
        (0..1usize << arity).map(|idx| idx >> i & 1 == 1).collect()
    }

    #[test]
    fn variables_match_index_bits() {
        for arity in 0..9 {
            for i in 0..arity {
                let b = Bits::var(arity, i);
                let got: Vec<bool> = (0..1usize << arity).map(|k| b.get(k)).collect();
                assert_eq!(got, brute_var(arity, i), "arity {arity} var {i}");
                assert_eq!(b.count(), 1 << (arity - 1));
            }
            assert_eq!(Bits::full(arity).count(), 1 << arity);
            assert_eq!(Bits::full(arity).not(), Bits::empty(arity));
        }
    }

    #[test]
    fn dependency_detection() {
        for arity in 1..9 {
            for i in 0..arity {
                let v = Bits::var(arity, i);
                for j in 0..arity {
                    assert_eq!(v.depends_on(j), i == j, "arity {arity} var {i} probe {j}");
                }
            }
        }
    }

    #[test]
    fn ones_in_order() {
        let mut b = Bits::empty(7);
        for i in [3, 64, 127, 0] {
            b.set(i);
        }
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![0, 3, 64, 127]);
    }

    #[test]
    fn embedding_adds_free_variables() {
        let a = Bits::var(1, 0);
        let e = a.embed(3, &[2]);
        assert_eq!(e, Bits::var(3, 2));
    }
}
