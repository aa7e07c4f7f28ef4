//! Branch-and-bound over restricted subfunctions.
//!
//! The search works on parametrized truth tables: restricting by a parity
//! eliminates one variable, so candidate queries at a node are exactly the
//! nonzero masks over the remaining parameters, one representative per class
//! of queries modulo everything already asked. Cutoff semantics are
//! fail-hard: `search(g, ub) = r <= ub`, with `r < ub` meaning the depth is
//! exactly `r` and `r == ub` meaning the depth is at least `ub`.

use std::collections::HashMap;
use std::time::Instant;

use crate::function::BooleanFunction;
use crate::gf2::ParityMask;
use crate::spectral::{anf, wht};

pub(crate) struct Aborted;

pub(crate) struct Search {
    memo: HashMap<(u8, Vec<u64>), Entry>,
    pub nodes_expanded: u64,
    pub memo_hits: u64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    use_memo: bool,
}

#[derive(Clone, Copy)]
struct Entry {
    lower: u16,
    exact: Option<u16>,
    best_query: u32,
}

/// Static depth lower bound for a non-constant table.
pub(crate) fn static_lower_bound(g: &BooleanFunction) -> usize {
    let gran = wht(g).granularity();
    let deg = anf(g).degree();
    (gran + 1).max(deg)
}

fn key_of(g: &BooleanFunction) -> (u8, Vec<u64>) {
    (g.n() as u8, g.table_words().to_vec())
}

impl Search {
    pub fn new(node_budget: Option<u64>, deadline: Option<Instant>, use_memo: bool) -> Self {
        Search {
            memo: HashMap::new(),
            nodes_expanded: 0,
            memo_hits: 0,
            node_budget,
            deadline,
            use_memo,
        }
    }

    /// Fail-hard bounded search; `g` must be non-constant and `ub >= 1`.
    pub fn search(&mut self, g: &BooleanFunction, ub: usize) -> Result<usize, Aborted> {
        debug_assert!(g.is_constant().is_none());
        debug_assert!(ub >= 1);
        // A non-constant single-variable table is a (negated) dictator.
        if g.n() == 1 {
            return Ok(1.min(ub));
        }
        let mut lb = static_lower_bound(g);
        if lb >= ub {
            return Ok(ub);
        }
        let key = key_of(g);
        if self.use_memo {
            if let Some(e) = self.memo.get(&key) {
                self.memo_hits += 1;
                if let Some(d) = e.exact {
                    return Ok((d as usize).min(ub));
                }
                if e.lower as usize >= ub {
                    return Ok(ub);
                }
                lb = lb.max(e.lower as usize);
            }
        }
        self.nodes_expanded += 1;
        if let Some(budget) = self.node_budget {
            if self.nodes_expanded > budget {
                return Err(Aborted);
            }
        }
        if let Some(deadline) = self.deadline {
            if self.nodes_expanded.is_multiple_of(256) && Instant::now() > deadline {
                return Err(Aborted);
            }
        }

        let d = g.n();
        let half = 1u64 << (d - 1);
        // Candidates with both children, ordered by the larger minority side
        // of the split: balanced or constant-making queries first.
        let mut cands: Vec<(u64, u32)> = (1u32..(1u32 << d))
            .map(|q| {
                let g0 = g.restrict_by_parity(ParityMask(q), false);
                let w0 = g0.weight();
                let g1 = g.restrict_by_parity(ParityMask(q), true);
                let w1 = g1.weight();
                let score = w0.min(half - w0).max(w1.min(half - w1));
                (score, q)
            })
            .collect();
        cands.sort_unstable();

        let mut best = ub;
        let mut best_query = None;
        for &(_, q) in &cands {
            if best <= lb {
                break;
            }
            let cut = best - 1;
            let g0 = g.restrict_by_parity(ParityMask(q), false);
            let g1 = g.restrict_by_parity(ParityMask(q), true);
            // Fail fast on the child with fewer true points.
            let (first, second) = if g0.weight() <= g1.weight() { (g0, g1) } else { (g1, g0) };
            let d_first = match first.is_constant() {
                Some(_) => 0,
                None => {
                    let r = self.search(&first, cut)?;
                    if r >= cut {
                        continue;
                    }
                    r
                }
            };
            let d_second = match second.is_constant() {
                Some(_) => 0,
                None => {
                    let r = self.search(&second, cut)?;
                    if r >= cut {
                        continue;
                    }
                    r
                }
            };
            let cand = 1 + d_first.max(d_second);
            if cand < best {
                best = cand;
                best_query = Some(q);
            }
        }

        if self.use_memo {
            let entry = self.memo.entry(key).or_insert(Entry {
                lower: 0,
                exact: None,
                best_query: 0,
            });
            if best < ub {
                entry.exact = Some(best as u16);
                entry.best_query = best_query.unwrap();
                entry.lower = entry.lower.max(best as u16);
            } else {
                entry.lower = entry.lower.max(ub as u16);
            }
        }
        Ok(best)
    }

    /// Optimal root query of an exactly solved table, if recorded.
    pub fn exact_query(&self, g: &BooleanFunction) -> Option<ParityMask> {
        if g.n() == 1 {
            return Some(ParityMask(1));
        }
        self.memo
            .get(&key_of(g))
            .and_then(|e| e.exact.map(|_| ParityMask(e.best_query)))
    }
}
