//! Parity certificate complexity: for each input, the smallest co-dimension
//! of an affine subspace through it on which the function is constant.
//!
//! Through a fixed point `x`, a subspace of directions `V` keeps `f`
//! constant exactly when every direction `v` in `V` satisfies
//! `f(x ^ v) = f(x)`. The search therefore looks for the largest linear
//! subspace inside the agreement set of `x`, by iterative deepening on the
//! co-dimension with a canonical basis enumeration: basis rows are added
//! with strictly increasing top bit and reduced against earlier pivots, so
//! every subspace is visited once, directions in increasing mask order.

use crate::function::BooleanFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertValue {
    Exact(usize),
    /// Certified range when the per-point budget ran out.
    Interval { lower: usize, upper: usize },
}

impl CertValue {
    pub fn lower(self) -> usize {
        match self {
            CertValue::Exact(v) => v,
            CertValue::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(self) -> usize {
        match self {
            CertValue::Exact(v) => v,
            CertValue::Interval { upper, .. } => upper,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    /// Max over all inputs.
    pub certificate: CertValue,
    /// Per-input values, indexed by assignment.
    pub per_point: Vec<CertValue>,
}

struct Dfs<'a> {
    agree: &'a [u64],
    n: usize,
    budget: u64,
}

enum DfsOutcome {
    Found,
    No,
    OutOfBudget,
}

impl Dfs<'_> {
    fn in_agree(&self, v: u32) -> bool {
        self.agree[(v >> 6) as usize] >> (v & 63) & 1 == 1
    }

    /// Is there a subspace of dimension `target` inside the agreement set?
    /// `span` holds the current subspace elements; new basis rows have top
    /// bit at least `min_top` and zeros at all previous top-bit pivots.
    fn run(&mut self, span: &mut Vec<u32>, pivots: u32, min_top: usize, target: usize) -> DfsOutcome {
        let dim = pivots.count_ones() as usize;
        if dim == target {
            return DfsOutcome::Found;
        }
        for top in min_top..self.n {
            // Not enough pivot positions left to reach the target.
            if dim + (self.n - top) < target {
                return DfsOutcome::No;
            }
            let free = ((1u32 << top) - 1) & !pivots;
            // Candidates with this top bit, ascending: iterate subsets of
            // the free low bits.
            let mut sub = 0u32;
            loop {
                let v = (1u32 << top) | sub;
                if self.budget == 0 {
                    return DfsOutcome::OutOfBudget;
                }
                self.budget -= 1;
                if self.in_agree(v) && span.iter().all(|&e| self.in_agree(e ^ v)) {
                    let old = span.len();
                    for i in 0..old {
                        let e = span[i] ^ v;
                        span.push(e);
                    }
                    match self.run(span, pivots | (1 << top), top + 1, target) {
                        DfsOutcome::No => {}
                        found_or_out => {
                            span.truncate(old);
                            return found_or_out;
                        }
                    }
                    span.truncate(old);
                }
                // Next subset of `free` in increasing numeric order.
                sub = (sub.wrapping_sub(free)) & free;
                if sub == 0 {
                    break;
                }
            }
        }
        DfsOutcome::No
    }
}

fn cert_at_point(f: &BooleanFunction, x: u32, budget: u64) -> CertValue {
    let n = f.n();
    let fx = f.bit(x);
    let words = (1usize << n).div_ceil(64);
    let mut agree = vec![0u64; words];
    for v in 0..(1u64 << n) as u32 {
        if f.bit(x ^ v) == fx {
            agree[(v >> 6) as usize] |= 1 << (v & 63);
        }
    }
    let mut dfs = Dfs { agree: &agree, n, budget };
    for r in 0..=n {
        let target = n - r;
        let mut span = vec![0u32];
        match dfs.run(&mut span, 0, 0, target) {
            DfsOutcome::Found => return CertValue::Exact(r),
            DfsOutcome::No => continue,
            DfsOutcome::OutOfBudget => return CertValue::Interval { lower: r, upper: n },
        }
    }
    // r = n always succeeds with the trivial subspace {0}.
    unreachable!("zero-dimensional subspace always fits");
}

/// Whether the table depends only on the number of ones.
fn symmetric_profile(f: &BooleanFunction) -> Option<Vec<bool>> {
    let n = f.n();
    let mut profile: Vec<Option<bool>> = vec![None; n + 1];
    for x in 0..(1u64 << n) as u32 {
        let w = x.count_ones() as usize;
        let v = f.bit(x);
        match profile[w] {
            None => profile[w] = Some(v),
            Some(p) if p == v => {}
            Some(_) => return None,
        }
    }
    Some(profile.into_iter().map(|p| p.unwrap()).collect())
}

/// Certificate complexity with a per-point step budget. Symmetric functions
/// are solved once per weight class.
pub fn parity_certificate(f: &BooleanFunction, budget_per_point: u64) -> CertificateReport {
    let n = f.n();
    let size = 1usize << n;
    let mut per_point: Vec<Option<CertValue>> = vec![None; size];
    if symmetric_profile(f).is_some() {
        for w in 0..=n {
            let rep = ((1u64 << w) - 1) as u32;
            let v = cert_at_point(f, rep, budget_per_point);
            for x in 0..size as u32 {
                if x.count_ones() as usize == w {
                    per_point[x as usize] = Some(v);
                }
            }
        }
    } else {
        for x in 0..size as u32 {
            per_point[x as usize] = Some(cert_at_point(f, x, budget_per_point));
        }
    }
    let per_point: Vec<CertValue> = per_point.into_iter().map(Option::unwrap).collect();
    let lower = per_point.iter().map(|v| v.lower()).max().unwrap();
    let upper = per_point.iter().map(|v| v.upper()).max().unwrap();
    let certificate = if lower == upper {
        CertValue::Exact(lower)
    } else {
        CertValue::Interval { lower, upper }
    };
    CertificateReport { certificate, per_point }
}
