//! Constructive query strategies: block-merging majority, ternary-majority
//! tree evaluation, small-threshold algorithms, and the padding reduction
//! that turns a tree for `THR(n+2, k+1)` into a strategy for `THR(n, k)`.
//!
//! Each strategy is a pure function of its transcript, implemented by
//! replaying an internal state machine over the recorded answers.

use crate::error::Error;
use crate::function::BooleanFunction;
use crate::gf2::ParityMask;
use crate::machine::{replay, Machine};
use crate::pdt::{Node, ParityDecisionTree, Strategy, StrategyAction};
use crate::Result;

// ---------------------------------------------------------------------------
// Majority by block merging.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Block {
    size: u32,
    rep: usize,
    all_equal: bool, // false: balanced (equal ones and zeros)
}

#[derive(Debug)]
enum MajPhase {
    Merging,
    FinalAsked,
    Done(i8),
}

/// Block state of the majority strategy. Sizes are always powers of two;
/// all-equal blocks hold pairwise equal variables, balanced blocks hold
/// exactly as many ones as zeros.
struct MajMachine {
    blocks: Vec<Block>,
    phase: MajPhase,
}

impl MajMachine {
    fn new(n: usize) -> Self {
        MajMachine {
            blocks: (0..n).map(|i| Block { size: 1, rep: i, all_equal: true }).collect(),
            phase: MajPhase::Merging,
        }
    }

    /// Two all-equal blocks of the smallest tied size, lowest representative
    /// indices first.
    fn merge_pair(&self) -> Option<(usize, usize)> {
        let mut best: Option<(u32, usize, usize)> = None;
        for size in self.blocks.iter().filter(|b| b.all_equal).map(|b| b.size) {
            let mut idxs = self
                .blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| b.all_equal && b.size == size)
                .map(|(i, _)| i);
            if let (Some(i), Some(j)) = (idxs.next(), idxs.next()) {
                let (i, j) = order_by_rep(&self.blocks, i, j, idxs);
                if best.is_none_or(|(s, _, _)| size < s) {
                    best = Some((size, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn largest_all_equal(&self) -> Option<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.all_equal)
            .max_by_key(|(_, b)| b.size)
            .map(|(i, _)| i)
    }
}

fn order_by_rep(
    blocks: &[Block],
    i: usize,
    j: usize,
    rest: impl Iterator<Item = usize>,
) -> (usize, usize) {
    let mut all: Vec<usize> = vec![i, j];
    all.extend(rest);
    all.sort_by_key(|&k| blocks[k].rep);
    (all[0], all[1])
}

impl Machine for MajMachine {
    fn next_action(&mut self) -> StrategyAction {
        match self.phase {
            MajPhase::Done(v) => StrategyAction::Output(v),
            MajPhase::FinalAsked => unreachable!("final answer pending"),
            MajPhase::Merging => {
                if let Some((i, j)) = self.merge_pair() {
                    StrategyAction::Query(ParityMask::pair(
                        self.blocks[i].rep,
                        self.blocks[j].rep,
                    ))
                } else if let Some(i) = self.largest_all_equal() {
                    self.phase = MajPhase::FinalAsked;
                    StrategyAction::Query(ParityMask::singleton(self.blocks[i].rep))
                } else {
                    // Only balanced blocks remain: the input is balanced and
                    // the ties-to-true rule answers immediately.
                    StrategyAction::Output(-1)
                }
            }
        }
    }

    fn feed(&mut self, answer: bool) {
        match self.phase {
            MajPhase::Done(_) => debug_assert!(false, "fed after output"),
            MajPhase::FinalAsked => {
                self.phase = MajPhase::Done(if answer { -1 } else { 1 });
            }
            MajPhase::Merging => {
                let (i, j) = self.merge_pair().expect("feed without pending merge");
                let (keep, drop) = if self.blocks[i].rep <= self.blocks[j].rep {
                    (i, j)
                } else {
                    (j, i)
                };
                self.blocks[keep].size *= 2;
                self.blocks[keep].all_equal = !answer;
                self.blocks.remove(drop);
            }
        }
    }
}

/// Majority strategy: worst case `n - ones_in_binary(n) + 1` queries.
pub struct MajStrategy {
    n: usize,
}

pub fn maj_strategy(n: usize) -> MajStrategy {
    assert!(n >= 1, "majority needs at least one variable");
    MajStrategy { n }
}

impl Strategy for MajStrategy {
    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.n - (self.n as u64).count_ones() as usize + 1
    }

    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
        replay(MajMachine::new(self.n), transcript)
    }
}

// ---------------------------------------------------------------------------
// Ternary majority trees (recursive majority and arbitrary shapes).

/// Shape of a circuit of fan-in-3 majority gates with fresh variable leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Maj3Tree {
    Leaf(usize),
    Node(Box<[Maj3Tree; 3]>),
}

impl Maj3Tree {
    /// Complete ternary tree of the given depth; leaves are numbered left to
    /// right starting at `first`.
    pub fn complete(depth: u32, first: usize) -> Maj3Tree {
        if depth == 0 {
            return Maj3Tree::Leaf(first);
        }
        let step = 3usize.pow(depth - 1);
        Maj3Tree::Node(Box::new([
            Maj3Tree::complete(depth - 1, first),
            Maj3Tree::complete(depth - 1, first + step),
            Maj3Tree::complete(depth - 1, first + 2 * step),
        ]))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Maj3Tree::Leaf(_) => 1,
            Maj3Tree::Node(c) => c.iter().map(Maj3Tree::leaf_count).sum(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            Maj3Tree::Leaf(_) => 0,
            Maj3Tree::Node(c) => 1 + c.iter().map(Maj3Tree::internal_count).sum::<usize>(),
        }
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Maj3Tree::Leaf(v) => out.push(*v),
            Maj3Tree::Node(c) => c.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Value of the circuit on an assignment.
    pub fn eval(&self, x: u32) -> bool {
        match self {
            Maj3Tree::Leaf(v) => x >> v & 1 == 1,
            Maj3Tree::Node(c) => {
                let ones = c.iter().filter(|t| t.eval(x)).count();
                ones >= 2
            }
        }
    }
}

struct Maj3Machine {
    cur: Maj3Tree,
    /// (y, z, t) of the node the pending query belongs to, if any.
    done: Option<i8>,
    final_asked: bool,
}

impl Maj3Machine {
    /// Deepest internal node with three leaf children, leftmost on ties.
    /// Returns the leaf variables (y, z, t).
    fn pick(node: &Maj3Tree) -> Option<(usize, (usize, usize, usize))> {
        match node {
            Maj3Tree::Leaf(_) => None,
            Maj3Tree::Node(c) => {
                let mut best: Option<(usize, (usize, usize, usize))> = None;
                for child in c.iter() {
                    if let Some((d, vars)) = Self::pick(child) {
                        if best.is_none_or(|(bd, _)| d + 1 > bd) {
                            best = Some((d + 1, vars));
                        }
                    }
                }
                if best.is_none() {
                    if let [Maj3Tree::Leaf(y), Maj3Tree::Leaf(z), Maj3Tree::Leaf(t)] = &**c {
                        return Some((1, (*y, *z, *t)));
                    }
                    unreachable!("deepest node must have leaf children");
                }
                best
            }
        }
    }

    fn substitute(node: &mut Maj3Tree, target: (usize, usize, usize), with: usize) -> bool {
        if let Maj3Tree::Node(c) = node {
            if let [Maj3Tree::Leaf(y), Maj3Tree::Leaf(z), Maj3Tree::Leaf(t)] = &**c {
                if (*y, *z, *t) == target {
                    *node = Maj3Tree::Leaf(with);
                    return true;
                }
            }
            for child in c.iter_mut() {
                if Self::substitute(child, target, with) {
                    return true;
                }
            }
        }
        false
    }
}

impl Machine for Maj3Machine {
    fn next_action(&mut self) -> StrategyAction {
        if let Some(v) = self.done {
            return StrategyAction::Output(v);
        }
        match &self.cur {
            Maj3Tree::Leaf(v) => {
                self.final_asked = true;
                StrategyAction::Query(ParityMask::singleton(*v))
            }
            _ => {
                let (_, (y, z, _)) = Maj3Machine::pick(&self.cur).expect("internal node");
                StrategyAction::Query(ParityMask::pair(y, z))
            }
        }
    }

    fn feed(&mut self, answer: bool) {
        if self.final_asked {
            self.done = Some(if answer { -1 } else { 1 });
            return;
        }
        let (_, (y, z, t)) = Maj3Machine::pick(&self.cur).expect("internal node");
        // Equal inputs decide the gate; unequal ones defer to the third.
        let with = if answer { t } else { y };
        let ok = Maj3Machine::substitute(&mut self.cur, (y, z, t), with);
        debug_assert!(ok);
    }
}

/// Strategy for an arbitrary ternary-majority tree shape: worst case
/// `internal nodes + 1` queries.
pub struct Maj3TreeStrategy {
    shape: Maj3Tree,
    n: usize,
}

pub fn maj3tree_strategy(shape: Maj3Tree) -> Result<Maj3TreeStrategy> {
    let mut vars = Vec::new();
    shape.collect_vars(&mut vars);
    let n = vars.len();
    if n == 0 || n > 32 {
        return Err(Error::VarCount { n, max: 32 });
    }
    let mut seen = vec![false; n];
    for v in vars {
        if v >= n || seen[v] {
            return Err(Error::BadParams("leaves must be fresh variables 0..n".into()));
        }
        seen[v] = true;
    }
    Ok(Maj3TreeStrategy { n, shape })
}

/// Recursive majority on `3^k` variables.
pub fn rmaj_strategy(k: u32) -> Result<Maj3TreeStrategy> {
    if 3usize.checked_pow(k).is_none_or(|n| n > 32) {
        return Err(Error::BadParams(format!("rmaj depth {k} exceeds 32 variables")));
    }
    maj3tree_strategy(Maj3Tree::complete(k, 0))
}

impl Strategy for Maj3TreeStrategy {
    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.shape.internal_count() + 1
    }

    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
        replay(
            Maj3Machine { cur: self.shape.clone(), done: None, final_asked: false },
            transcript,
        )
    }
}

// ---------------------------------------------------------------------------
// Threshold-2 and threshold-3 strategies.

/// Tail phase shared by the threshold machines: query one representative per
/// listed block, accumulate the weighted count, compare to the threshold.
struct Tally {
    queue: Vec<(usize, u32)>, // (variable, block size)
    idx: usize,
    total: u32,
    threshold: u32,
}

impl Tally {
    fn action(&self) -> StrategyAction {
        if self.idx < self.queue.len() {
            StrategyAction::Query(ParityMask::singleton(self.queue[self.idx].0))
        } else {
            StrategyAction::Output(if self.total >= self.threshold { -1 } else { 1 })
        }
    }

    fn feed(&mut self, answer: bool) {
        if answer {
            self.total += self.queue[self.idx].1;
        }
        self.idx += 1;
    }
}

enum Thr2Phase {
    Pairing { next: usize, balanced: u32, equal_reps: Vec<usize> },
    Count(Tally),
}

/// Threshold-2 for odd `n`: pair all variables but one, then read the count
/// off the blocks. Worst case `n - 1` queries.
struct Thr2Machine {
    n: usize,
    phase: Thr2Phase,
}

impl Thr2Machine {
    fn new(n: usize) -> Self {
        Thr2Machine {
            n,
            phase: Thr2Phase::Pairing { next: 0, balanced: 0, equal_reps: Vec::new() },
        }
    }
}

impl Machine for Thr2Machine {
    fn next_action(&mut self) -> StrategyAction {
        match &mut self.phase {
            Thr2Phase::Pairing { next, balanced, equal_reps } => {
                if *next < (self.n - 1) / 2 {
                    return StrategyAction::Query(ParityMask::pair(2 * *next, 2 * *next + 1));
                }
                let mut queue: Vec<(usize, u32)> =
                    equal_reps.iter().map(|&r| (r, 2)).collect();
                if *balanced > 0 {
                    // The exact count is needed; the lone variable matters.
                    queue.push((self.n - 1, 1));
                } // otherwise every pair is all-equal and the singleton is irrelevant
                self.phase = Thr2Phase::Count(Tally {
                    queue,
                    idx: 0,
                    total: *balanced,
                    threshold: 2,
                });
                self.next_action()
            }
            Thr2Phase::Count(t) => t.action(),
        }
    }

    fn feed(&mut self, answer: bool) {
        match &mut self.phase {
            Thr2Phase::Pairing { next, balanced, equal_reps } => {
                if answer {
                    *balanced += 1;
                } else {
                    equal_reps.push(2 * *next);
                }
                *next += 1;
            }
            Thr2Phase::Count(t) => t.feed(answer),
        }
    }
}

pub struct Thr2Strategy {
    n: usize,
}

pub fn thr2_strategy(n: usize) -> Result<Thr2Strategy> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::BadParams(format!("threshold-2 strategy needs odd n >= 3, got {n}")));
    }
    Ok(Thr2Strategy { n })
}

impl Strategy for Thr2Strategy {
    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.n - 1
    }

    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
        replay(Thr2Machine::new(self.n), transcript)
    }
}

enum Thr3Phase {
    /// Pair single variables (all but the two leftovers) into 2-blocks.
    Pairing { next: usize, two_blocks: Vec<usize> },
    /// Merge equal 2-blocks pairwise into 4-blocks.
    Merging { two_blocks: Vec<usize>, next: usize, four_blocks: Vec<usize> },
    Count(Tally),
}

/// Threshold-3 for `n = 2 (mod 4)`: build 4-blocks out of all variables but
/// two; a balanced block at any point switches to counting, otherwise the
/// two leftovers cannot matter. Worst case `n - 1` queries.
struct Thr3Machine {
    n: usize,
    phase: Thr3Phase,
}

impl Thr3Machine {
    fn new(n: usize) -> Self {
        Thr3Machine { n, phase: Thr3Phase::Pairing { next: 0, two_blocks: Vec::new() } }
    }

    fn bail_to_count(&mut self, known: u32, queue: Vec<(usize, u32)>) {
        self.phase = Thr3Phase::Count(Tally { queue, idx: 0, total: known, threshold: 3 });
    }
}

impl Machine for Thr3Machine {
    fn next_action(&mut self) -> StrategyAction {
        loop {
            match &mut self.phase {
                Thr3Phase::Pairing { next, two_blocks } => {
                    if *next < (self.n - 2) / 2 {
                        return StrategyAction::Query(ParityMask::pair(2 * *next, 2 * *next + 1));
                    }
                    self.phase = Thr3Phase::Merging {
                        two_blocks: std::mem::take(two_blocks),
                        next: 0,
                        four_blocks: Vec::new(),
                    };
                }
                Thr3Phase::Merging { two_blocks, next, four_blocks } => {
                    if 2 * *next + 1 < two_blocks.len() {
                        return StrategyAction::Query(ParityMask::pair(
                            two_blocks[2 * *next],
                            two_blocks[2 * *next + 1],
                        ));
                    }
                    // Every block is all-equal: the two leftovers cannot lift
                    // the count from below 3 to 3, so read the 4-blocks only.
                    let queue = four_blocks.iter().map(|&r| (r, 4)).collect();
                    self.bail_to_count(0, queue);
                }
                Thr3Phase::Count(t) => return t.action(),
            }
        }
    }

    fn feed(&mut self, answer: bool) {
        let n = self.n;
        match &mut self.phase {
            Thr3Phase::Pairing { next, two_blocks } => {
                let i = *next;
                if answer {
                    // Balanced pair: one known one; count everything else.
                    let mut queue: Vec<(usize, u32)> =
                        two_blocks.iter().map(|&r| (r, 2)).collect();
                    queue.extend((i + 1..(n - 2) / 2).map(|j| (2 * j, 1)));
                    queue.extend((i + 1..(n - 2) / 2).map(|j| (2 * j + 1, 1)));
                    queue.push((n - 2, 1));
                    queue.push((n - 1, 1));
                    queue.sort();
                    self.bail_to_count(1, queue);
                } else {
                    two_blocks.push(2 * i);
                    *next = i + 1;
                }
            }
            Thr3Phase::Merging { two_blocks, next, four_blocks } => {
                let j = *next;
                if answer {
                    // Balanced 4-block: two known ones.
                    let mut queue: Vec<(usize, u32)> =
                        four_blocks.iter().map(|&r| (r, 4)).collect();
                    queue.extend(two_blocks[2 * j + 2..].iter().map(|&r| (r, 2)));
                    queue.push((n - 2, 1));
                    queue.push((n - 1, 1));
                    queue.sort();
                    self.bail_to_count(2, queue);
                } else {
                    four_blocks.push(two_blocks[2 * j]);
                    *next = j + 1;
                }
            }
            Thr3Phase::Count(t) => t.feed(answer),
        }
    }
}

pub struct Thr3Strategy {
    n: usize,
}

pub fn thr3_strategy(n: usize) -> Result<Thr3Strategy> {
    if n < 6 || n % 4 != 2 {
        return Err(Error::BadParams(format!(
            "threshold-3 strategy needs n = 2 (mod 4), n >= 6, got {n}"
        )));
    }
    Ok(Thr3Strategy { n })
}

impl Strategy for Thr3Strategy {
    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.n - 1
    }

    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
        replay(Thr3Machine::new(self.n), transcript)
    }
}

// ---------------------------------------------------------------------------
// Threshold padding reduction.

/// Role of a tree input position in the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PosRole {
    X(usize),
    Y,
    NotY,
}

#[derive(Clone, Debug)]
struct Anchor {
    roles: Vec<PosRole>,
    /// Parity of real variables defining the padding variable.
    y_mask: u32,
}

enum ReducePending {
    None,
    FullFirst,
    Real { constant: bool },
}

/// Simulates a tree over `(x, y, not y)` on the real input `x`, choosing the
/// padding roles so the first non-degenerate query is answered for free.
struct ReduceMachine<'a> {
    tree_n: usize,
    n: usize,
    node: &'a Node,
    anchor: Option<Anchor>,
    full_answer: Option<bool>,
    pending: ReducePending,
    done: Option<i8>,
}

impl<'a> ReduceMachine<'a> {
    fn new(tree: &'a ParityDecisionTree, n: usize) -> Self {
        ReduceMachine {
            tree_n: tree.n(),
            n,
            node: tree.root(),
            anchor: None,
            full_answer: None,
            pending: ReducePending::None,
            done: None,
        }
    }

    fn descend(&mut self, bit: bool) {
        if let Node::Query { zero, one, .. } = self.node {
            self.node = if bit { one } else { zero };
        } else {
            unreachable!("descend at leaf");
        }
    }

    /// Fix the padding roles from the first query that is not the all-input
    /// parity: the padding variable joins the query, its negation stays out,
    /// and the query is answered 0 by defining y as the matching parity.
    fn make_anchor(&mut self, mask: ParityMask) {
        let p_y = mask.0.trailing_zeros() as usize;
        let p_ny = (0..self.tree_n)
            .find(|&p| mask.0 >> p & 1 == 0)
            .expect("non-full mask");
        let mut roles = Vec::with_capacity(self.tree_n);
        let mut next_x = 0;
        for p in 0..self.tree_n {
            if p == p_y {
                roles.push(PosRole::Y);
            } else if p == p_ny {
                roles.push(PosRole::NotY);
            } else {
                roles.push(PosRole::X(next_x));
                next_x += 1;
            }
        }
        let mut y_mask = 0u32;
        for p in mask.vars() {
            if let PosRole::X(i) = roles[p] {
                y_mask |= 1 << i;
            }
        }
        self.anchor = Some(Anchor { roles, y_mask });
    }

    /// Rewrite a tree query as a parity of real variables plus a constant.
    fn substitute(&self, mask: ParityMask) -> (u32, bool) {
        let anchor = self.anchor.as_ref().expect("anchored");
        let mut xm = 0u32;
        let mut c = false;
        for p in mask.vars() {
            match anchor.roles[p] {
                PosRole::X(i) => xm ^= 1 << i,
                PosRole::Y => xm ^= anchor.y_mask,
                PosRole::NotY => {
                    xm ^= anchor.y_mask;
                    c ^= true;
                }
            }
        }
        (xm, c)
    }

    /// Advance through leaves, constant subtrees, free branches and
    /// anchoring until a real query is needed or the walk ends.
    fn advance(&mut self) {
        loop {
            if self.done.is_some() || !matches!(self.pending, ReducePending::None) {
                return;
            }
            if let Some(v) = self.node.constant_value() {
                self.done = Some(v);
                return;
            }
            let full = ParityMask::all(self.tree_n);
            match self.node {
                Node::Leaf(v) => {
                    self.done = Some(*v);
                    return;
                }
                Node::Query { mask, .. } => {
                    let mask = *mask;
                    if self.anchor.is_none() {
                        if mask == full {
                            match self.full_answer {
                                // The all-input parity equals the real
                                // all-variable parity flipped by the padding
                                // pair.
                                Some(a) => self.descend(!a),
                                None => {
                                    self.pending = ReducePending::FullFirst;
                                    return;
                                }
                            }
                        } else {
                            self.make_anchor(mask);
                            self.descend(false);
                        }
                    } else {
                        let (xm, c) = self.substitute(mask);
                        if xm == 0 {
                            self.descend(c);
                        } else {
                            self.pending = ReducePending::Real { constant: c };
                            return;
                        }
                    }
                }
            }
        }
    }
}

impl Machine for ReduceMachine<'_> {
    fn next_action(&mut self) -> StrategyAction {
        self.advance();
        if let Some(v) = self.done {
            return StrategyAction::Output(v);
        }
        match self.pending {
            ReducePending::FullFirst => StrategyAction::Query(ParityMask::all(self.n)),
            ReducePending::Real { .. } => {
                if let Node::Query { mask, .. } = self.node {
                    let (xm, _) = self.substitute(*mask);
                    StrategyAction::Query(ParityMask(xm))
                } else {
                    unreachable!()
                }
            }
            ReducePending::None => unreachable!("advance stopped without action"),
        }
    }

    fn feed(&mut self, answer: bool) {
        match std::mem::replace(&mut self.pending, ReducePending::None) {
            ReducePending::FullFirst => {
                self.full_answer = Some(answer);
                self.descend(!answer);
            }
            ReducePending::Real { constant } => {
                self.descend(answer ^ constant);
            }
            ReducePending::None => debug_assert!(false, "fed without pending query"),
        }
    }
}

/// Strategy for `THR(n, k)` obtained from a verified tree for
/// `THR(n+2, k+1)`; saves one query off the tree depth.
pub struct ThrReduceStrategy {
    tree: ParityDecisionTree,
    n: usize,
    budget: usize,
}

impl ThrReduceStrategy {
    pub fn tree(&self) -> &ParityDecisionTree {
        &self.tree
    }
}

/// Validates and wraps the input tree. The symmetry of threshold functions
/// justifies the role assignment, so the tree must verify as
/// `THR(n+2, k+1)` before the reduction is trusted.
pub fn thr_reduce(tree: ParityDecisionTree, n: usize, k: i64) -> Result<ThrReduceStrategy> {
    if tree.n() != n + 2 {
        return Err(Error::WrongVariableCount { expected: n + 2, got: tree.n() });
    }
    let m = n + 2;
    let thr = move |x: u32| if (x.count_ones() as i64) > k { -1i8 } else { 1 };
    let report = if m <= 20 {
        crate::pdt::verify_exhaustive(&tree, thr)
    } else {
        crate::pdt::verify_leafwise(&tree, thr)
    };
    if let crate::pdt::Verification::Fail { witness } = report.result {
        return Err(Error::FailsVerification { witness });
    }
    let budget = tree.depth().saturating_sub(1);
    Ok(ThrReduceStrategy { tree, n, budget })
}

impl Strategy for ThrReduceStrategy {
    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
        replay(ReduceMachine::new(&self.tree, self.n), transcript)
    }
}

// ---------------------------------------------------------------------------
// Shared sweeping helper.

/// Result of running a strategy over every input.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub correct: bool,
    pub witness: Option<u32>,
    pub worst_queries: usize,
    pub worst_input: u32,
}

/// Run the strategy on all `2^n` inputs against the expected values.
pub fn sweep_strategy<F>(s: &(dyn Strategy + Sync), expect: F) -> Result<SweepReport>
where
    F: Fn(u32) -> i8 + Sync,
{
    let n = s.n();
    assert!(n <= 22, "exhaustive sweep beyond 2^22 inputs");
    let mut worst = 0usize;
    let mut worst_input = 0u32;
    for x in 0..(1u64 << n) as u32 {
        let mut oracle = crate::pdt::QueryOracle::new(x);
        let (out, used) = crate::pdt::run_strategy(s, &mut oracle)?;
        if out != expect(x) {
            return Ok(SweepReport {
                correct: false,
                witness: Some(x),
                worst_queries: used.max(worst),
                worst_input: x,
            });
        }
        if used > worst {
            worst = used;
            worst_input = x;
        }
    }
    Ok(SweepReport { correct: true, witness: None, worst_queries: worst, worst_input })
}

/// Truth-table convenience wrapper.
pub fn sweep_strategy_table(s: &(dyn Strategy + Sync), f: &BooleanFunction) -> Result<SweepReport> {
    assert_eq!(s.n(), f.n());
    sweep_strategy(s, |x| if f.bit(x) { -1 } else { 1 })
}
