//! Checks over a single product.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{holds, PropertySpec, Query, Trace, Verdict};
use crate::plmodel::Lts;

pub fn query_lts(m: &Lts, q: &Query) -> BTreeSet<String> {
    m.states()
        .iter()
        .filter(|s| q.matches(s))
        .map(|s| s.id.clone())
        .collect()
}

/// Breadth-first parents in canonical transition order.
fn bfs(m: &Lts) -> (Vec<String>, BTreeMap<String, Option<String>>) {
    let mut order = vec![m.initial().to_string()];
    let mut parent = BTreeMap::from([(m.initial().to_string(), None)]);
    let mut queue = VecDeque::from([m.initial().to_string()]);
    while let Some(s) = queue.pop_front() {
        for t in m.successors(&s) {
            if !parent.contains_key(&t.dst) {
                parent.insert(t.dst.clone(), Some(s.clone()));
                order.push(t.dst.clone());
                queue.push_back(t.dst.clone());
            }
        }
    }
    (order, parent)
}

fn path_to(parent: &BTreeMap<String, Option<String>>, target: &str) -> Vec<String> {
    let mut path = vec![target.to_string()];
    let mut cur = target.to_string();
    while let Some(Some(p)) = parent.get(&cur) {
        path.push(p.clone());
        cur = p.clone();
    }
    path.reverse();
    path
}

fn is_dead(m: &Lts, s: &str) -> bool {
    m.successors(s).next().is_none()
}

pub fn check_response_lts(m: &Lts, trigger: &str, response: &str) -> Verdict {
    let non_response: BTreeSet<&str> = m
        .states()
        .iter()
        .filter(|s| !holds(s, response))
        .map(|s| s.id.as_str())
        .collect();
    // Greatest set of non-response states from which some maximal path
    // avoids the response forever.
    let mut avoid = non_response.clone();
    loop {
        let next: BTreeSet<&str> = avoid
            .iter()
            .copied()
            .filter(|s| is_dead(m, s) || m.successors(s).any(|t| avoid.contains(t.dst.as_str())))
            .collect();
        if next == avoid {
            break;
        }
        avoid = next;
    }

    let (order, parent) = bfs(m);
    for t in &order {
        let state = m.state(t).expect("reachable state exists");
        if !holds(state, trigger) {
            continue;
        }
        let mut path = path_to(&parent, t);
        if is_dead(m, t) {
            return Verdict::Violation {
                witness: Trace {
                    stem: path,
                    cycle: None,
                },
            };
        }
        let Some(first) = m.successors(t).find(|e| avoid.contains(e.dst.as_str())) else {
            continue;
        };
        let walk_start = path.len();
        let mut cur = first.dst.clone();
        loop {
            if let Some(k) = path[walk_start..].iter().position(|s| *s == cur) {
                let cycle = path.split_off(walk_start + k);
                return Verdict::Violation {
                    witness: Trace {
                        stem: path,
                        cycle: Some(cycle),
                    },
                };
            }
            path.push(cur.clone());
            if is_dead(m, &cur) {
                return Verdict::Violation {
                    witness: Trace {
                        stem: path,
                        cycle: None,
                    },
                };
            }
            let next = m
                .successors(&cur)
                .find(|e| avoid.contains(e.dst.as_str()))
                .expect("live avoiding states keep an avoiding successor")
                .dst
                .clone();
            cur = next;
        }
    }
    Verdict::Ok
}

pub fn check_after_action_lts(m: &Lts, action: &str, forbidden: &str) -> Verdict {
    let (order, parent) = bfs(m);
    for src in &order {
        for e in m.successors(src).filter(|e| e.action == action) {
            for f in m.successors(&e.dst) {
                let u = m.state(&f.dst).expect("validated endpoint");
                if holds(u, forbidden) {
                    let mut stem = path_to(&parent, src);
                    stem.push(e.dst.clone());
                    stem.push(f.dst.clone());
                    return Verdict::Violation {
                        witness: Trace { stem, cycle: None },
                    };
                }
            }
        }
    }
    Verdict::Ok
}

pub fn check_lts(m: &Lts, spec: &PropertySpec) -> Verdict {
    match spec {
        PropertySpec::Response { trigger, response } => check_response_lts(m, trigger, response),
        PropertySpec::AfterActionSafe { action, forbidden } => {
            check_after_action_lts(m, action, forbidden)
        }
    }
}

/// Whether a witness is a path of `m` from its initial state, closed by a
/// back edge when it has a loop and ending in a deadlock otherwise.
pub fn replays(m: &Lts, w: &Trace) -> bool {
    let mut states: Vec<&String> = w.stem.iter().collect();
    if let Some(c) = &w.cycle {
        states.extend(c.iter());
    }
    if states.first().map(|s| s.as_str()) != Some(m.initial()) {
        return false;
    }
    let edge = |a: &str, b: &str| m.successors(a).any(|t| t.dst == b);
    if !states.windows(2).all(|p| edge(p[0], p[1])) {
        return false;
    }
    match &w.cycle {
        Some(c) if c.is_empty() => false,
        Some(c) => edge(c.last().unwrap(), &c[0]),
        None => true,
    }
}
