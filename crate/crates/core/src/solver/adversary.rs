//! Granularity adversary: walks a claimed tree and produces a concrete
//! counterexample whenever the tree is shallower than the granularity bound
//! allows.
//!
//! Pick a mask attaining the granularity. The character sum over the true
//! set restricted to the current path coset has 2-adic valuation
//! `n - gran - 1` at the root; a query splits the set in two, and one side
//! keeps a valuation no larger, so following the smaller-valuation branch
//! keeps the sum too ragged to be a character sum over an affine subspace.
//! At the leaf the function therefore cannot be constant on the coset.

use crate::dyadic::{nu2, Valuation};
use crate::function::BooleanFunction;
use crate::gf2::{Coset, ParityMask};
use crate::pdt::{Node, ParityDecisionTree};
use crate::spectral::wht;

#[derive(Clone, Debug)]
pub struct Refutation {
    /// Mask attaining the granularity (smallest numerically).
    pub target_mask: ParityMask,
    /// (query, chosen branch) pairs from the root.
    pub path: Vec<(ParityMask, bool)>,
    pub leaf_label: i8,
    /// Point of the leaf coset where the tree answers incorrectly.
    pub counterexample: u32,
    /// Two leaf-coset points with different function values, when the
    /// function is non-constant there.
    pub split_pair: Option<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub enum AdversaryOutcome {
    /// The tree is deeper than the granularity bound; the walk proves
    /// nothing there.
    NotApplicable,
    Refuted(Refutation),
}

/// Character sum of `target` over the true set of `f` inside the coset.
fn true_set_character_sum(f: &BooleanFunction, coset: &Coset, target: ParityMask) -> i64 {
    let mut sum = 0i64;
    for x in coset.points() {
        if f.bit(x) {
            sum += if target.parity_of(x) { -1 } else { 1 };
        }
    }
    sum
}

pub fn adversary_refute(f: &BooleanFunction, t: &ParityDecisionTree) -> AdversaryOutcome {
    assert_eq!(f.n(), t.n(), "tree over wrong variable count");
    if f.is_constant().is_some() {
        return AdversaryOutcome::NotApplicable;
    }
    let spectrum = wht(f);
    let gran = spectrum.granularity();
    if t.depth() > gran {
        return AdversaryOutcome::NotApplicable;
    }
    let n = f.n() as u32;
    let target = (0..(1u64 << f.n()) as u32)
        .find(|&s| {
            let c = spectrum.coeff(s);
            c != 0 && nu2(c) == Valuation::Finite(n - gran as u32)
        })
        .map(ParityMask)
        .expect("some coefficient attains the granularity");

    let mut coset = Coset::full(f.n());
    let mut node = t.root();
    let mut path = Vec::new();
    loop {
        match node {
            Node::Leaf(label) => {
                let mut wrong = None;
                let mut seen_true = None;
                let mut seen_false = None;
                for x in coset.points() {
                    let v: i8 = if f.bit(x) { -1 } else { 1 };
                    if v != *label && wrong.is_none() {
                        wrong = Some(x);
                    }
                    if f.bit(x) {
                        seen_true.get_or_insert(x);
                    } else {
                        seen_false.get_or_insert(x);
                    }
                }
                let counterexample =
                    wrong.expect("shallow tree must err on the adversary path");
                return AdversaryOutcome::Refuted(Refutation {
                    target_mask: target,
                    path,
                    leaf_label: *label,
                    counterexample,
                    split_pair: seen_true.zip(seen_false),
                });
            }
            Node::Query { mask, zero, one } => {
                let s0 = true_set_character_sum(f, &coset.constrained(*mask, false), target);
                let s1 = true_set_character_sum(f, &coset.constrained(*mask, true), target);
                // Smaller valuation wins; ties go to branch 0.
                let pick = nu2(s1) < nu2(s0);
                coset = coset.constrained(*mask, pick);
                path.push((*mask, pick));
                node = if pick { one } else { zero };
            }
        }
    }
}
