//! Parity decision trees and the interactive query protocol.
//!
//! Children are indexed by the parity bit of the query, 0 and 1. A strategy
//! is the adaptive form of a tree: a deterministic function from the
//! transcript of (query, answer) pairs to the next action. Strategies keep
//! worst-case trees implicit; `materialize` expands one into a tree for
//! verification or export.

use rayon::prelude::*;

use crate::error::Error;
use crate::function::BooleanFunction;
use crate::gf2::{Coset, InsertOutcome, ParityMask};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(i8),
    Query {
        mask: ParityMask,
        zero: Box<Node>,
        one: Box<Node>,
    },
}

impl Node {
    fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    /// The label this subtree outputs on every input, if any.
    pub fn constant_value(&self) -> Option<i8> {
        match self {
            Node::Leaf(v) => Some(*v),
            Node::Query { zero, one, .. } => {
                let z = zero.constant_value()?;
                (one.constant_value()? == z).then_some(z)
            }
        }
    }

    fn leaves(&self) -> u64 {
        match self {
            Node::Leaf(_) => 1,
            Node::Query { zero, one, .. } => zero.leaves() + one.leaves(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Node::Leaf(v) => {
                if *v != 1 && *v != -1 {
                    return Err(Error::Parse { line: 0, msg: "leaf label must be 1 or -1".into() });
                }
                Ok(())
            }
            Node::Query { mask, zero, one } => {
                if mask.is_zero() || !mask.fits(n) {
                    return Err(Error::InvalidQuery { mask: mask.0, n });
                }
                zero.validate(n)?;
                one.validate(n)
            }
        }
    }

    fn write_sexpr(&self, out: &mut String) {
        match self {
            Node::Leaf(v) => {
                out.push_str("(leaf ");
                out.push_str(if *v < 0 { "-1" } else { "1" });
                out.push(')');
            }
            Node::Query { mask, zero, one } => {
                out.push_str("(q ");
                out.push_str(&mask.to_hex());
                out.push_str(" (0 ");
                zero.write_sexpr(out);
                out.push_str(") (1 ");
                one.write_sexpr(out);
                out.push_str("))");
            }
        }
    }
}

/// A materialized parity decision tree over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityDecisionTree {
    n: usize,
    root: Node,
}

impl ParityDecisionTree {
    pub fn new(n: usize, root: Node) -> Result<Self> {
        if !(1..=32).contains(&n) {
            return Err(Error::VarCount { n, max: 32 });
        }
        root.validate(n)?;
        Ok(ParityDecisionTree { n, root })
    }

    pub fn leaf(n: usize, value: i8) -> Self {
        ParityDecisionTree { n, root: Node::Leaf(value) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn leaf_count(&self) -> u64 {
        self.root.leaves()
    }

    /// Walk by parity bits; returns the leaf label.
    pub fn eval(&self, x: u32) -> i8 {
        self.eval_with_path(x).0
    }

    /// Leaf label and number of queries on the path.
    pub fn eval_with_path(&self, x: u32) -> (i8, usize) {
        let mut node = &self.root;
        let mut len = 0;
        loop {
            match node {
                Node::Leaf(v) => return (*v, len),
                Node::Query { mask, zero, one } => {
                    len += 1;
                    node = if mask.parity_of(x) { one } else { zero };
                }
            }
        }
    }

    /// Single-line s-expression form:
    /// `(q <mask-hex> (0 <subtree>) (1 <subtree>))` / `(leaf -1)` / `(leaf 1)`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.root.write_sexpr(&mut out);
        out.push('\n');
        out
    }

    pub fn from_sexpr(text: &str, n: usize) -> Result<Self> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let root = parse_node(&tokens, &mut pos, n)?;
        if pos != tokens.len() {
            return Err(Error::Parse { line: 0, msg: "trailing tokens".into() });
        }
        ParityDecisionTree::new(n, root)
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn parse_node(tokens: &[String], pos: &mut usize, n: usize) -> Result<Node> {
    let fail = |msg: &str| Error::Parse { line: 0, msg: msg.into() };
    let expect = |tokens: &[String], pos: &mut usize, want: &str| -> Result<()> {
        if tokens.get(*pos).map(|s| s.as_str()) == Some(want) {
            *pos += 1;
            Ok(())
        } else {
            Err(Error::Parse { line: 0, msg: format!("expected `{want}`") })
        }
    };
    expect(tokens, pos, "(")?;
    match tokens.get(*pos).map(|s| s.as_str()) {
        Some("leaf") => {
            *pos += 1;
            let v = match tokens.get(*pos).map(|s| s.as_str()) {
                Some("-1") => -1i8,
                Some("1") => 1i8,
                _ => return Err(fail("leaf label must be -1 or 1")),
            };
            *pos += 1;
            expect(tokens, pos, ")")?;
            Ok(Node::Leaf(v))
        }
        Some("q") => {
            *pos += 1;
            let mask = tokens
                .get(*pos)
                .and_then(|s| ParityMask::from_hex(s))
                .ok_or_else(|| fail("bad query mask"))?;
            *pos += 1;
            if mask.is_zero() || !mask.fits(n) {
                return Err(Error::InvalidQuery { mask: mask.0, n });
            }
            expect(tokens, pos, "(")?;
            expect(tokens, pos, "0")?;
            let zero = parse_node(tokens, pos, n)?;
            expect(tokens, pos, ")")?;
            expect(tokens, pos, "(")?;
            expect(tokens, pos, "1")?;
            let one = parse_node(tokens, pos, n)?;
            expect(tokens, pos, ")")?;
            expect(tokens, pos, ")")?;
            Ok(Node::Query { mask, zero: Box::new(zero), one: Box::new(one) })
        }
        _ => Err(fail("expected `leaf` or `q`")),
    }
}

/// Next step of an interactive protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyAction {
    Query(ParityMask),
    Output(i8),
}

/// Deterministic interactive query protocol. `decide` must be a pure
/// function of the transcript and must reach `Output` within `budget`
/// queries on every consistent answer sequence.
pub trait Strategy {
    fn n(&self) -> usize;
    /// Declared worst-case number of queries.
    fn budget(&self) -> usize;
    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction;
}

/// Answers parity queries about a hidden assignment and counts them.
#[derive(Clone, Debug)]
pub struct QueryOracle {
    x: u32,
    queries: usize,
}

impl QueryOracle {
    pub fn new(x: u32) -> Self {
        QueryOracle { x, queries: 0 }
    }

    pub fn answer(&mut self, mask: ParityMask) -> bool {
        self.queries += 1;
        mask.parity_of(self.x)
    }

    pub fn queries_used(&self) -> usize {
        self.queries
    }
}

/// Drive a strategy against an oracle until it outputs.
pub fn run_strategy(s: &dyn Strategy, oracle: &mut QueryOracle) -> Result<(i8, usize)> {
    let mut transcript: Vec<(ParityMask, bool)> = Vec::new();
    loop {
        match s.decide(&transcript) {
            StrategyAction::Output(v) => return Ok((v, oracle.queries_used())),
            StrategyAction::Query(q) => {
                if q.is_zero() || !q.fits(s.n()) {
                    return Err(Error::InvalidQuery { mask: q.0, n: s.n() });
                }
                if transcript.len() == s.budget() {
                    return Err(Error::BudgetExceeded { budget: s.budget() });
                }
                let a = oracle.answer(q);
                transcript.push((q, a));
            }
        }
    }
}

/// Expand a strategy into a tree by enumerating answer sequences.
///
/// Queries dependent on the answers so far produce no node: only the forced
/// branch is followed (the query still counts against the budget), and the
/// contradictory branch is pruned. Every transcript is decided twice to
/// catch strategies that are not functions of the transcript.
pub fn materialize(s: &dyn Strategy) -> Result<ParityDecisionTree> {
    let mut transcript: Vec<(ParityMask, bool)> = Vec::new();
    let coset = Coset::full(s.n());
    let root = materialize_rec(s, &mut transcript, &coset, 0)?;
    ParityDecisionTree::new(s.n(), root)
}

fn materialize_rec(
    s: &dyn Strategy,
    transcript: &mut Vec<(ParityMask, bool)>,
    coset: &Coset,
    charged: usize,
) -> Result<Node> {
    let action = s.decide(transcript);
    if s.decide(transcript) != action {
        return Err(Error::NonDeterministicStrategy);
    }
    match action {
        StrategyAction::Output(v) => Ok(Node::Leaf(v)),
        StrategyAction::Query(q) => {
            if q.is_zero() || !q.fits(s.n()) {
                return Err(Error::InvalidQuery { mask: q.0, n: s.n() });
            }
            if charged == s.budget() {
                return Err(Error::BudgetExceeded { budget: s.budget() });
            }
            match coset.insert(q, false) {
                InsertOutcome::Dependent(forced) => {
                    // Forced branch only; no node emitted.
                    transcript.push((q, forced));
                    let sub = materialize_rec(s, transcript, coset, charged + 1)?;
                    transcript.pop();
                    Ok(sub)
                }
                InsertOutcome::Extended(_) => {
                    let mut children: [Option<Node>; 2] = [None, None];
                    for b in [false, true] {
                        let extended = match coset.insert(q, b) {
                            InsertOutcome::Extended(c) => c,
                            InsertOutcome::Dependent(_) => unreachable!("independent above"),
                        };
                        transcript.push((q, b));
                        children[b as usize] =
                            Some(materialize_rec(s, transcript, &extended, charged + 1)?);
                        transcript.pop();
                    }
                    let [zero, one] = children;
                    Ok(Node::Query {
                        mask: q,
                        zero: Box::new(zero.unwrap()),
                        one: Box::new(one.unwrap()),
                    })
                }
            }
        }
    }
}

/// Verification verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Pass,
    Fail { witness: u32 },
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub result: Verification,
    /// Longest query path seen over the checked inputs.
    pub max_path: usize,
    /// Leaves whose path constraints are contradictory (leaf-wise mode).
    pub infeasible_leaves: u64,
    pub checked_points: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.result == Verification::Pass
    }
}

/// Check the tree against `value` on all `2^n` inputs.
pub fn verify_exhaustive<F>(t: &ParityDecisionTree, value: F) -> VerifyReport
where
    F: Fn(u32) -> i8 + Sync,
{
    let n = t.n();
    assert!(n <= 26, "exhaustive verification beyond 2^26 inputs");
    let size = 1u64 << n;
    let chunk = 1u64 << n.min(16);
    let outcomes: Vec<(Option<u32>, usize)> = (0..size.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(size);
            let mut worst = 0;
            let mut witness = None;
            for x in lo..hi {
                let (got, len) = t.eval_with_path(x as u32);
                worst = worst.max(len);
                if got != value(x as u32) {
                    witness = Some(x as u32);
                    break;
                }
            }
            (witness, worst)
        })
        .collect();
    let max_path = outcomes.iter().map(|o| o.1).max().unwrap_or(0);
    let witness = outcomes.iter().find_map(|o| o.0);
    VerifyReport {
        result: match witness {
            Some(w) => Verification::Fail { witness: w },
            None => Verification::Pass,
        },
        max_path,
        infeasible_leaves: 0,
        checked_points: size,
    }
}

/// Check the tree leaf by leaf: each feasible leaf's path coset must be
/// constant under `value` and equal to the leaf label. Costs the sum over
/// leaves of `2^(n - path rank)`; infeasible leaves are skipped and counted.
pub fn verify_leafwise<F>(t: &ParityDecisionTree, value: F) -> VerifyReport
where
    F: Fn(u32) -> i8 + Sync,
{
    let mut leaves: Vec<(i8, Coset, usize)> = Vec::new();
    let mut infeasible = 0u64;
    collect_leaves(
        t.root(),
        &Coset::full(t.n()),
        0,
        &mut leaves,
        &mut infeasible,
    );
    let max_path = leaves.iter().map(|l| l.2).max().unwrap_or(0);
    let results: Vec<(u64, Option<u32>)> = leaves
        .par_iter()
        .map(|(label, coset, _)| {
            let mut checked = 0u64;
            for x in coset.points() {
                checked += 1;
                if value(x) != *label {
                    return (checked, Some(x));
                }
            }
            (checked, None)
        })
        .collect();
    let checked_points = results.iter().map(|r| r.0).sum();
    let witness = results.iter().find_map(|r| r.1);
    VerifyReport {
        result: match witness {
            Some(w) => Verification::Fail { witness: w },
            None => Verification::Pass,
        },
        max_path,
        infeasible_leaves: infeasible,
        checked_points,
    }
}

fn collect_leaves(
    node: &Node,
    coset: &Coset,
    path: usize,
    out: &mut Vec<(i8, Coset, usize)>,
    infeasible: &mut u64,
) {
    match node {
        Node::Leaf(v) => out.push((*v, coset.clone(), path)),
        Node::Query { mask, zero, one } => {
            for (b, child) in [(false, zero), (true, one)] {
                match coset.insert(*mask, b) {
                    InsertOutcome::Extended(c) => {
                        collect_leaves(child, &c, path + 1, out, infeasible)
                    }
                    InsertOutcome::Dependent(forced) if forced == b => {
                        collect_leaves(child, coset, path + 1, out, infeasible)
                    }
                    InsertOutcome::Dependent(_) => {
                        let child: &Node = child;
                        *infeasible += child.leaves();
                    }
                }
            }
        }
    }
}

/// Convenience wrapper taking a truth table.
pub fn verify_tree(t: &ParityDecisionTree, f: &BooleanFunction, leafwise: bool) -> VerifyReport {
    assert_eq!(t.n(), f.n());
    let value = |x: u32| if f.bit(x) { -1i8 } else { 1 };
    if leafwise {
        verify_leafwise(t, value)
    } else {
        verify_exhaustive(t, value)
    }
}

/// Build the depth-first variable-by-variable tree for a truth table,
/// terminating early where the subfunction is constant.
pub fn variable_chain(f: &BooleanFunction) -> ParityDecisionTree {
    fn go(f: &BooleanFunction, coset: &Coset, next_var: usize) -> Node {
        let mut constant = None;
        let mut seen = false;
        for x in coset.points() {
            let v = f.bit(x);
            if !seen {
                constant = Some(v);
                seen = true;
            } else if constant != Some(v) {
                constant = None;
                break;
            }
        }
        if let Some(v) = constant {
            return Node::Leaf(if v { -1 } else { 1 });
        }
        let q = ParityMask::singleton(next_var);
        let zero = go(f, &coset.constrained(q, false), next_var + 1);
        let one = go(f, &coset.constrained(q, true), next_var + 1);
        Node::Query { mask: q, zero: Box::new(zero), one: Box::new(one) }
    }
    assert!(f.n() <= 16, "variable chain beyond 2^16 nodes");
    ParityDecisionTree { n: f.n(), root: go(f, &Coset::full(f.n()), 0) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Family;

    fn f(tag: &str) -> BooleanFunction {
        Family::parse(tag).unwrap().build().unwrap()
    }

    fn maj3_tree() -> ParityDecisionTree {
        // Query x1^x2; equal -> answer is x1, unequal -> answer is x3.
        ParityDecisionTree::from_sexpr(
            "(q 3 (0 (q 1 (0 (leaf 1)) (1 (leaf -1)))) (1 (q 4 (0 (leaf 1)) (1 (leaf -1)))))",
            3,
        )
        .unwrap()
    }

    #[test]
    fn leaf_tree_evaluates_constantly() {
        let t = ParityDecisionTree::leaf(4, -1);
        for x in 0..16 {
            assert_eq!(t.eval(x), -1);
        }
        assert_eq!(t.depth(), 0);
    }

    #[test]
    fn dictator_tree() {
        let t = ParityDecisionTree::from_sexpr("(q 1 (0 (leaf 1)) (1 (leaf -1)))", 1).unwrap();
        assert_eq!(t.eval(0), 1);
        assert_eq!(t.eval(1), -1);
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn maj3_tree_is_correct() {
        let t = maj3_tree();
        assert!(verify_tree(&t, &f("maj:3"), false).passed());
        assert!(verify_tree(&t, &f("maj:3"), true).passed());
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn flipped_leaf_fails_with_witness() {
        let t = ParityDecisionTree::from_sexpr(
            "(q 3 (0 (q 1 (0 (leaf -1)) (1 (leaf -1)))) (1 (q 4 (0 (leaf 1)) (1 (leaf -1)))))",
            3,
        )
        .unwrap();
        let g = f("maj:3");
        let rep = verify_tree(&t, &g, false);
        match rep.result {
            Verification::Fail { witness } => {
                assert_ne!(t.eval(witness) as i32, g.eval(witness));
            }
            Verification::Pass => panic!("must fail"),
        }
        let rep = verify_tree(&t, &g, true);
        assert!(!rep.passed());
    }

    #[test]
    fn sexpr_roundtrip_and_validation() {
        let t = maj3_tree();
        let text = t.to_sexpr();
        assert_eq!(ParityDecisionTree::from_sexpr(&text, 3).unwrap(), t);
        // Zero mask rejected.
        assert!(ParityDecisionTree::from_sexpr("(q 0 (0 (leaf 1)) (1 (leaf 1)))", 3).is_err());
        // Mask outside range rejected.
        assert!(ParityDecisionTree::from_sexpr("(q 8 (0 (leaf 1)) (1 (leaf 1)))", 3).is_err());
        // Whitespace-insensitive.
        assert!(ParityDecisionTree::from_sexpr("  ( leaf   -1 )  ", 2).is_ok());
    }

    #[test]
    fn infeasible_leaves_are_skipped_and_counted() {
        // Same query twice; the contradictory inner branch is unreachable.
        // The tree computes the dictator x1.
        let t = ParityDecisionTree::from_sexpr(
            "(q 1 (0 (q 1 (0 (leaf 1)) (1 (leaf -1)))) (1 (leaf -1)))",
            2,
        )
        .unwrap();
        let rep = verify_leafwise(&t, |x| if x & 1 == 1 { -1 } else { 1 });
        assert!(rep.passed());
        assert_eq!(rep.infeasible_leaves, 1);
    }

    struct FixedTree(ParityDecisionTree);

    impl Strategy for FixedTree {
        fn n(&self) -> usize {
            self.0.n()
        }
        fn budget(&self) -> usize {
            self.0.depth()
        }
        fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
            let mut node = self.0.root();
            let mut i = 0;
            loop {
                match node {
                    Node::Leaf(v) => return StrategyAction::Output(*v),
                    Node::Query { mask, zero, one } => {
                        if i == transcript.len() {
                            return StrategyAction::Query(*mask);
                        }
                        node = if transcript[i].1 { one } else { zero };
                        i += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn run_strategy_counts_queries() {
        let s = FixedTree(maj3_tree());
        let g = f("maj:3");
        for x in 0..8u32 {
            let mut oracle = QueryOracle::new(x);
            let (out, used) = run_strategy(&s, &mut oracle).unwrap();
            assert_eq!(out as i32, g.eval(x));
            assert_eq!(used, 2);
        }
    }

    #[test]
    fn materialize_roundtrips_tree_strategy() {
        let t = maj3_tree();
        let m = materialize(&FixedTree(t.clone())).unwrap();
        assert_eq!(m, t);
    }

    #[test]
    fn materialize_constant_strategy_is_single_leaf() {
        struct ConstOut;
        impl Strategy for ConstOut {
            fn n(&self) -> usize {
                3
            }
            fn budget(&self) -> usize {
                0
            }
            fn decide(&self, _t: &[(ParityMask, bool)]) -> StrategyAction {
                StrategyAction::Output(-1)
            }
        }
        let t = materialize(&ConstOut).unwrap();
        assert_eq!(t.depth(), 0);
        assert_eq!(t.leaf_count(), 1);
    }

    #[test]
    fn materialize_skips_dependent_queries() {
        // Asks x1, then x1 again (dependent), then outputs the first answer.
        struct Repeats;
        impl Strategy for Repeats {
            fn n(&self) -> usize {
                2
            }
            fn budget(&self) -> usize {
                2
            }
            fn decide(&self, t: &[(ParityMask, bool)]) -> StrategyAction {
                match t.len() {
                    0 | 1 => StrategyAction::Query(ParityMask(1)),
                    _ => StrategyAction::Output(if t[0].1 { -1 } else { 1 }),
                }
            }
        }
        let t = materialize(&Repeats).unwrap();
        // The dependent repeat adds no node.
        assert_eq!(t.depth(), 1);
        assert_eq!(t.leaf_count(), 2);
    }

    #[test]
    fn materialize_detects_budget_overrun() {
        struct Chatty;
        impl Strategy for Chatty {
            fn n(&self) -> usize {
                3
            }
            fn budget(&self) -> usize {
                1
            }
            fn decide(&self, t: &[(ParityMask, bool)]) -> StrategyAction {
                if t.len() < 3 {
                    StrategyAction::Query(ParityMask(1 << t.len()))
                } else {
                    StrategyAction::Output(1)
                }
            }
        }
        assert!(matches!(
            materialize(&Chatty),
            Err(Error::BudgetExceeded { budget: 1 })
        ));
    }

    #[test]
    fn materialize_detects_nondeterminism() {
        use std::cell::Cell;
        struct Flaky(Cell<bool>);
        impl Strategy for Flaky {
            fn n(&self) -> usize {
                2
            }
            fn budget(&self) -> usize {
                2
            }
            fn decide(&self, _t: &[(ParityMask, bool)]) -> StrategyAction {
                let flip = self.0.get();
                self.0.set(!flip);
                if flip {
                    StrategyAction::Output(1)
                } else {
                    StrategyAction::Query(ParityMask(1))
                }
            }
        }
        assert!(matches!(
            materialize(&Flaky(Cell::new(false))),
            Err(Error::NonDeterministicStrategy)
        ));
    }

    #[test]
    fn variable_chain_is_correct_and_shallow_on_constants() {
        for tag in ["maj:3", "thr:5,2", "random:5,3"] {
            let g = f(tag);
            let t = variable_chain(&g);
            assert!(verify_tree(&t, &g, false).passed(), "{tag}");
            assert!(t.depth() <= g.n());
        }
        assert_eq!(variable_chain(&f("const:4,1")).depth(), 0);
    }
}
