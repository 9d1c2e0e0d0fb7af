//! Two-level minimisation producing the canonical sum-of-products form.
//!
//! Exact Quine-McCluskey plus a branch-and-bound cover for supports of up to
//! [`EXACT_SUPPORT`] variables; larger supports use greedy prime expansion.
//! Terms are ordered by their literal keys (variable index, positive first).

use std::collections::{BTreeMap, BTreeSet};

use super::{Bits, FeatureExpr};

const EXACT_SUPPORT: usize = 12;
const SEARCH_BUDGET: usize = 200_000;

/// A cube over the support variables: `mask` bits are fixed to `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cube {
    mask: u32,
    value: u32,
}

impl Cube {
    fn covers(&self, m: u32) -> bool {
        m & self.mask == self.value
    }

    fn literals(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Literal key: (support position, 0 for positive / 1 for negative).
    fn key(&self, k: usize) -> Vec<(usize, u8)> {
        (0..k)
            .filter(|i| self.mask >> i & 1 == 1)
            .map(|i| (i, if self.value >> i & 1 == 1 { 0 } else { 1 }))
            .collect()
    }
}

pub(super) fn minimal_sop(b: &Bits, names: &[String]) -> FeatureExpr {
    minimal_sop_dc(b, &b.cleared(), names)
}

/// Minimal form of a function that must hold on `on`, may hold on `dc` and
/// must not hold elsewhere.
pub(super) fn minimal_sop_dc(on: &Bits, dc: &Bits, names: &[String]) -> FeatureExpr {
    let dc = dc.minus(on);
    if on.is_empty() {
        return FeatureExpr::False;
    }
    let care_up = on.or(&dc);
    if care_up.is_full() {
        return FeatureExpr::True;
    }
    let support: Vec<usize> = (0..on.arity())
        .filter(|&i| on.depends_on(i) || dc.depends_on(i))
        .collect();
    let k = support.len();
    let free_mask: usize = (0..on.arity())
        .filter(|i| !support.contains(i))
        .fold(0, |m, i| m | 1 << i);
    let project = |b: &Bits| -> Vec<u32> {
        b.ones()
            .filter(|idx| idx & free_mask == 0)
            .map(|idx| {
                support
                    .iter()
                    .enumerate()
                    .fold(0u32, |m, (j, &i)| m | (((idx >> i) & 1) as u32) << j)
            })
            .collect()
    };
    let minterms = project(on);
    let allowed: BTreeSet<u32> = project(&care_up).into_iter().collect();

    let cover = if k <= EXACT_SUPPORT {
        let seeds: Vec<u32> = allowed.iter().copied().collect();
        let primes = prime_implicants(&seeds, k);
        exact_cover(&minterms, &primes, k)
    } else {
        greedy_cover(&minterms, &allowed, k)
    };

    let mut terms: Vec<(Vec<(usize, u8)>, Cube)> =
        cover.into_iter().map(|c| (c.key(k), c)).collect();
    terms.sort();
    FeatureExpr::any(terms.into_iter().map(|(_, cube)| {
        FeatureExpr::all((0..k).filter(|j| cube.mask >> j & 1 == 1).map(|j| {
            let v = FeatureExpr::Var(names[support[j]].clone());
            if cube.value >> j & 1 == 1 {
                v
            } else {
                !v
            }
        }))
    }))
}

fn prime_implicants(minterms: &[u32], k: usize) -> Vec<Cube> {
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut current: BTreeSet<Cube> = minterms
        .iter()
        .map(|&m| Cube {
            mask: full,
            value: m,
        })
        .collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let mut next = BTreeSet::new();
        let mut merged = BTreeSet::new();
        // Group by mask so only compatible cubes are compared.
        let mut by_mask: BTreeMap<u32, Vec<Cube>> = BTreeMap::new();
        for c in &current {
            by_mask.entry(c.mask).or_default().push(*c);
        }
        for group in by_mask.values() {
            let values: BTreeSet<u32> = group.iter().map(|c| c.value).collect();
            for c in group {
                for bit in 0..k {
                    let b = 1u32 << bit;
                    if c.mask & b == 0 || c.value & b != 0 {
                        continue;
                    }
                    if values.contains(&(c.value | b)) {
                        let partner = Cube {
                            mask: c.mask,
                            value: c.value | b,
                        };
                        merged.insert(*c);
                        merged.insert(partner);
                        next.insert(Cube {
                            mask: c.mask & !b,
                            value: c.value,
                        });
                    }
                }
            }
        }
        for c in &current {
            if !merged.contains(c) {
                primes.insert(*c);
            }
        }
        current = next;
    }
    primes.into_iter().collect()
}

type Score = (usize, u32, Vec<Vec<(usize, u8)>>);

fn score(sel: &[Cube], k: usize) -> Score {
    let mut keys: Vec<_> = sel.iter().map(|c| c.key(k)).collect();
    keys.sort();
    (sel.len(), sel.iter().map(Cube::literals).sum(), keys)
}

fn exact_cover(minterms: &[u32], primes: &[Cube], k: usize) -> Vec<Cube> {
    let mut primes: Vec<Cube> = primes.to_vec();
    primes.sort_by_key(|c| (c.literals(), c.key(k)));
    let covering: Vec<Vec<usize>> = minterms
        .iter()
        .map(|&m| (0..primes.len()).filter(|&p| primes[p].covers(m)).collect())
        .collect();

    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    for c in &covering {
        if c.len() == 1 {
            chosen.insert(c[0]);
        }
    }
    let greedy = {
        let mut sel: BTreeSet<usize> = chosen.clone();
        loop {
            let uncovered: Vec<usize> = (0..minterms.len())
                .filter(|&m| !covering[m].iter().any(|p| sel.contains(p)))
                .collect();
            if uncovered.is_empty() {
                break;
            }
            let best = (0..primes.len())
                .filter(|p| !sel.contains(p))
                .max_by_key(|&p| {
                    let gain = uncovered
                        .iter()
                        .filter(|&&m| primes[p].covers(minterms[m]))
                        .count();
                    (
                        gain,
                        std::cmp::Reverse(primes[p].literals()),
                        std::cmp::Reverse(p),
                    )
                })
                .expect("primes cover every minterm");
            sel.insert(best);
        }
        sel.into_iter().map(|p| primes[p]).collect::<Vec<_>>()
    };

    struct Search<'a> {
        primes: &'a [Cube],
        minterms: &'a [u32],
        covering: &'a [Vec<usize>],
        k: usize,
        best: Vec<Cube>,
        best_score: Score,
        budget: usize,
    }

    impl Search<'_> {
        fn run(&mut self, sel: &mut Vec<usize>) {
            if self.budget == 0 {
                return;
            }
            self.budget -= 1;
            let cubes: Vec<Cube> = sel.iter().map(|&p| self.primes[p]).collect();
            let lits: u32 = cubes.iter().map(Cube::literals).sum();
            if (cubes.len(), lits) > (self.best_score.0, self.best_score.1) {
                return;
            }
            let uncovered: Vec<usize> = (0..self.minterms.len())
                .filter(|&m| !self.covering[m].iter().any(|p| sel.contains(p)))
                .collect();
            if uncovered.is_empty() {
                let s = score(&cubes, self.k);
                if s < self.best_score {
                    self.best_score = s;
                    self.best = cubes;
                }
                return;
            }
            if cubes.len() + 1 > self.best_score.0 {
                return;
            }
            let pivot = *uncovered
                .iter()
                .min_by_key(|&&m| (self.covering[m].len(), m))
                .unwrap();
            for &p in &self.covering[pivot] {
                sel.push(p);
                self.run(sel);
                sel.pop();
            }
        }
    }

    let mut search = Search {
        primes: &primes,
        minterms,
        covering: &covering,
        k,
        best_score: score(&greedy, k),
        best: greedy,
        budget: SEARCH_BUDGET,
    };
    let mut sel: Vec<usize> = chosen.into_iter().collect();
    search.run(&mut sel);
    search.best
}

/// Expands each uncovered minterm into a prime by dropping literals in
/// support order, then keeps the resulting cubes.
fn greedy_cover(minterms: &[u32], on: &BTreeSet<u32>, k: usize) -> Vec<Cube> {
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let inside = |c: &Cube| -> bool {
        let free: Vec<u32> = (0..k as u32).filter(|i| c.mask >> i & 1 == 0).collect();
        (0u64..1 << free.len()).all(|bits| {
            let m = free
                .iter()
                .enumerate()
                .fold(c.value, |m, (j, &i)| m | (((bits >> j) & 1) as u32) << i);
            on.contains(&m)
        })
    };
    let mut cover: Vec<Cube> = Vec::new();
    for &m in minterms {
        if cover.iter().any(|c| c.covers(m)) {
            continue;
        }
        let mut cube = Cube {
            mask: full,
            value: m,
        };
        for i in 0..k {
            let b = 1u32 << i;
            let trial = Cube {
                mask: cube.mask & !b,
                value: cube.value & !b,
            };
            if inside(&trial) {
                cube = trial;
            }
        }
        cover.push(cube);
    }
    // Drop cubes made redundant by later expansions.
    let mut i = 0;
    while i < cover.len() {
        let others: Vec<Cube> = cover
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, c)| *c)
            .collect();
        let redundant = minterms
            .iter()
            .filter(|&&m| cover[i].covers(m))
            .all(|&m| others.iter().any(|c| c.covers(m)));
        if redundant {
            cover.remove(i);
        } else {
            i += 1;
        }
    }
    cover
}
