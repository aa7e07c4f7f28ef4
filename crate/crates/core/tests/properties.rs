//! Cross-module invariants: exact spectra, coset algebra, restriction
//! transport, strategy/tree agreement, and solver bounds.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pdtlab::dyadic::nu2;
use pdtlab::function::{assignment_of_index, index_of_assignment, BooleanFunction, Family};
use pdtlab::gf2::{check_rref, Coset, InsertOutcome, ParityMask};
use pdtlab::pdt::{
    materialize, run_strategy, verify_exhaustive, verify_leafwise, Node, ParityDecisionTree,
    QueryOracle, Strategy,
};
use pdtlab::solver::{
    bound_profile, exact_depth, parity_certificate, reference::reference_depth, CertValue,
    SolveOptions,
};
use pdtlab::spectral::{deg2, wht};
use pdtlab::strategies::{maj_strategy, rmaj_strategy, thr2_strategy, thr3_strategy};

fn random_function(rng: &mut StdRng, n: usize) -> BooleanFunction {
    BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5)).unwrap()
}

fn random_coset(rng: &mut StdRng, n: usize, max_rank: usize) -> Coset {
    let mut c = Coset::full(n);
    let rank = rng.gen_range(0..=max_rank.min(n - 1));
    while c.rank() < rank {
        let q = ParityMask(rng.gen_range(1..(1u32 << n)));
        let b = rng.gen_bool(0.5);
        if let InsertOutcome::Extended(ext) = c.insert(q, b) {
            c = ext;
        }
    }
    c
}

proptest! {
    #[test]
    fn index_encoding_is_a_bijection(n in 1usize..=12, x in 0u32..4096) {
        let x = x & ((1 << n) - 1);
        prop_assert_eq!(index_of_assignment(&assignment_of_index(x, n)), x);
    }

    #[test]
    fn pdttt_roundtrip(n in 1usize..=8, seed in 0u64..1000) {
        let f = Family::Random { n, seed }.build().unwrap();
        let back = BooleanFunction::from_pdttt(&f.to_pdttt()).unwrap();
        prop_assert_eq!(f, back);
    }

    #[test]
    fn coset_insert_keeps_rref_and_bumps_rank(seed in 0u64..500) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(2..=8usize);
        let mut c = Coset::full(n);
        for _ in 0..n {
            let q = ParityMask(rng.gen_range(1..(1u32 << n)));
            let b = rng.gen_bool(0.5);
            match c.insert(q, b) {
                InsertOutcome::Extended(ext) => {
                    prop_assert_eq!(ext.rank(), c.rank() + 1);
                    prop_assert!(check_rref(&ext).is_ok());
                    // Every point satisfies the new constraint.
                    for x in ext.points() {
                        prop_assert_eq!(q.parity_of(x), b);
                    }
                    c = ext;
                }
                InsertOutcome::Dependent(forced) => {
                    // The query value is constant over the coset.
                    for x in c.points() {
                        prop_assert_eq!(q.parity_of(x), forced);
                    }
                }
            }
        }
    }
}

#[test]
fn restrict_agrees_with_lift_pointwise() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let f = random_function(&mut rng, n);
        let c = random_coset(&mut rng, n, n - 1);
        let (g, param) = f.restrict(&c).unwrap();
        for t in 0..(1u32 << param.dim()) {
            assert_eq!(g.bit(t), f.bit(param.lift_point(t)));
        }
    }
}

#[test]
fn restriction_composes() {
    // Restricting twice matches restricting by the combined system, table
    // for table; the search memo relies on this canonicalization.
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..300 {
        let n = rng.gen_range(3..=8usize);
        let f = random_function(&mut rng, n);
        let q1 = ParityMask(rng.gen_range(1..(1u32 << n)));
        let c1 = Coset::full(n).constrained(q1, false);
        let (g1, param1) = f.restrict(&c1).unwrap();
        if g1.n() < 2 {
            continue;
        }
        let q2t = ParityMask(rng.gen_range(1..(1u32 << g1.n())));
        let fast = g1.restrict_by_parity(q2t, true);

        let q2x = param1.lift_mask(q2t);
        let c12 = c1.constrained(q2x, true);
        if c12.is_empty() || c12.rank() != 2 {
            continue;
        }
        let (g12, _) = f.restrict(&c12).unwrap();
        assert_eq!(fast, g12);
    }
}

#[test]
fn parseval_and_roundtrip_hold() {
    let mut rng = StdRng::seed_from_u64(9);
    let mut cases = 0;
    for _ in 0..150 {
        let n = rng.gen_range(1..=10usize);
        let f = random_function(&mut rng, n);
        let s = wht(&f);
        let sum: i64 = s.coeffs().iter().map(|c| c * c).sum();
        assert_eq!(sum, 1i64 << (2 * n), "n={n}");
        assert_eq!(s.inverse().unwrap(), f);
        cases += 1;
    }
    assert!(cases > 0);
}

#[test]
fn subfunction_spectra_identities() {
    // Fixing the top variable: 2*F0(S) = F(S) + F(S + top) and
    // 2*F1(S) = F(S) - F(S + top).
    let mut rng = StdRng::seed_from_u64(10);
    for _ in 0..100 {
        let n = rng.gen_range(2..=9usize);
        let f = random_function(&mut rng, n);
        let s = wht(&f);
        let top = ParityMask::singleton(n - 1);
        let f0 = f.restrict_by_parity(top, false);
        let f1 = f.restrict_by_parity(top, true);
        let s0 = wht(&f0);
        let s1 = wht(&f1);
        for m in 0..(1u32 << (n - 1)) {
            let hi = m | (1 << (n - 1));
            assert_eq!(2 * s0.coeff(m), s.coeff(m) + s.coeff(hi));
            assert_eq!(2 * s1.coeff(m), s.coeff(m) - s.coeff(hi));
        }
    }
}

#[test]
fn granularity_is_monotone_under_restriction() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(2..=9usize);
        let f = random_function(&mut rng, n);
        let c = random_coset(&mut rng, n, n - 1);
        let (g, _) = f.restrict(&c).unwrap();
        assert!(wht(&g).granularity() <= wht(&f).granularity());
    }
}

#[test]
fn spectral_inequality_chain() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.gen_range(1..=11usize);
        let f = random_function(&mut rng, n);
        let s = wht(&f);
        let spar = s.sparsity();
        let gran = s.granularity() as u32;
        let d = deg2(&f);
        if f.is_constant().is_none() {
            assert!(d <= gran as usize + 1, "deg2 <= gran+1");
        }
        // spar <= 4^gran, i.e. ceil(log2(spar)/2) <= gran.
        assert!(spar as u128 <= 4u128.pow(gran), "spar bound, n={n}");
        if spar >= 2 {
            // gran <= log2(spar) - 1, i.e. 2^(gran+1) <= spar.
            assert!(2u128.pow(gran + 1) <= spar as u128, "gran upper bound");
        }
        if spar >= 2 {
            assert!(d <= 64 - (spar - 1).leading_zeros() as usize, "deg2 <= ceil lg spar");
        }
    }
}

#[test]
fn bent_inner_product_attains_the_floor() {
    for m in 1..=5usize {
        let f = Family::InnerProduct { n: 2 * m }.build().unwrap();
        let s = wht(&f);
        assert_eq!(s.granularity(), m);
        assert_eq!(s.sparsity(), 4u64.pow(m as u32));
    }
}

// --- strategies and trees ---------------------------------------------------

fn strategy_roster() -> Vec<(&'static str, Box<dyn Strategy + Sync>, BooleanFunction)> {
    let f = |tag: &str| Family::parse(tag).unwrap().build().unwrap();
    vec![
        ("maj:9", Box::new(maj_strategy(9)), f("maj:9")),
        ("maj:12", Box::new(maj_strategy(12)), f("maj:12")),
        ("rmaj:2", Box::new(rmaj_strategy(2).unwrap()), f("rmaj:2")),
        ("thr:9,2", Box::new(thr2_strategy(9).unwrap()), f("thr:9,2")),
        ("thr:10,3", Box::new(thr3_strategy(10).unwrap()), f("thr:10,3")),
    ]
}

#[test]
fn materialized_depth_equals_worst_interactive_cost() {
    for (tag, strat, table) in strategy_roster() {
        let tree = materialize(strat.as_ref()).unwrap();
        let n = table.n();
        let mut worst = 0usize;
        for x in 0..(1u32 << n) {
            let mut oracle = QueryOracle::new(x);
            let (out, used) = run_strategy(strat.as_ref(), &mut oracle).unwrap();
            assert_eq!(out as i32, table.eval(x), "{tag} x={x:b}");
            worst = worst.max(used);
        }
        assert_eq!(tree.depth(), worst, "{tag}");
        assert!(worst <= strat.budget(), "{tag}");
        assert!(tree.leaf_count() <= 1u64 << tree.depth(), "{tag}");
    }
}

#[test]
fn materialized_trees_have_independent_path_queries() {
    for (tag, strat, _) in strategy_roster() {
        let tree = materialize(strat.as_ref()).unwrap();
        fn walk(node: &Node, coset: &Coset, tag: &str) {
            if let Node::Query { mask, zero, one } = node {
                for (b, child) in [(false, zero), (true, one)] {
                    match coset.insert(*mask, b) {
                        InsertOutcome::Extended(c) => walk(child, &c, tag),
                        InsertOutcome::Dependent(_) => panic!("dependent node in {tag}"),
                    }
                }
            }
        }
        walk(tree.root(), &Coset::full(tree.n()), tag);
    }
}

fn random_tree(rng: &mut StdRng, n: usize, depth: usize) -> Node {
    if depth == 0 || rng.gen_bool(0.3) {
        return Node::Leaf(if rng.gen_bool(0.5) { -1 } else { 1 });
    }
    let mask = ParityMask(rng.gen_range(1..(1u32 << n)));
    Node::Query {
        mask,
        zero: Box::new(random_tree(rng, n, depth - 1)),
        one: Box::new(random_tree(rng, n, depth - 1)),
    }
}

#[test]
fn exhaustive_and_leafwise_verification_agree() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..300 {
        let n = rng.gen_range(2..=8usize);
        let f = random_function(&mut rng, n);
        let t = ParityDecisionTree::new(n, random_tree(&mut rng, n, 4)).unwrap();
        let value = |x: u32| if f.bit(x) { -1i8 } else { 1 };
        let a = verify_exhaustive(&t, value);
        let b = verify_leafwise(&t, value);
        assert_eq!(a.passed(), b.passed());
        // Witnesses may differ between modes; each must be genuine.
        for rep in [&a, &b] {
            if let pdtlab::pdt::Verification::Fail { witness } = rep.result {
                assert_ne!(t.eval(witness), value(witness));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn tree_sexpr_roundtrip(seed in 0u64..10_000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10usize);
        let t = ParityDecisionTree::new(n, random_tree(&mut rng, n, 5)).unwrap();
        let text = t.to_sexpr();
        prop_assert_eq!(ParityDecisionTree::from_sexpr(&text, n).unwrap(), t);
    }
}

/// Replays a fixed tree as an interactive strategy.
struct FixedTree(ParityDecisionTree);

impl Strategy for FixedTree {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn budget(&self) -> usize {
        self.0.depth()
    }
    fn decide(&self, transcript: &[(ParityMask, bool)]) -> pdtlab::StrategyAction {
        let mut node = self.0.root();
        let mut i = 0;
        loop {
            match node {
                Node::Leaf(v) => return pdtlab::StrategyAction::Output(*v),
                Node::Query { mask, zero, one } => {
                    if i == transcript.len() {
                        return pdtlab::StrategyAction::Query(*mask);
                    }
                    node = if transcript[i].1 { one } else { zero };
                    i += 1;
                }
            }
        }
    }
}

#[test]
fn materializing_a_tree_strategy_preserves_its_function() {
    // Random trees may repeat queries along a path; materialization prunes
    // the dependent nodes but must not change the computed function or grow
    // the depth.
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let t = ParityDecisionTree::new(n, random_tree(&mut rng, n, 5)).unwrap();
        let m = materialize(&FixedTree(t.clone())).unwrap();
        assert!(m.depth() <= t.depth());
        for x in 0..(1u32 << n) {
            assert_eq!(m.eval(x), t.eval(x));
        }
    }
}

// --- solver ------------------------------------------------------------------

#[test]
fn exact_depth_dominates_every_bound() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..120 {
        let n = rng.gen_range(2..=5usize);
        let f = random_function(&mut rng, n);
        let rep = exact_depth(&f, &SolveOptions::default());
        let d = rep.exact().unwrap();
        let b = bound_profile(&f, true);
        assert!(d >= b.sparsity_bound);
        assert!(d >= b.deg2_bound);
        assert!(d >= b.gran_bound);
        assert!(d >= b.cert_bound.unwrap());
        assert!(d >= b.best_lower);
    }
}

#[test]
fn gran_bound_is_tight_on_named_families() {
    let f = |tag: &str| Family::parse(tag).unwrap().build().unwrap();
    for tag in ["maj:3", "maj:5", "rmaj:1", "parity:4", "and:4"] {
        let g = f(tag);
        let rep = exact_depth(&g, &SolveOptions::default());
        let b = bound_profile(&g, false);
        assert_eq!(rep.exact().unwrap(), b.gran_bound, "{tag}");
    }
}

#[test]
fn exact_depth_is_monotone_under_restriction() {
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..60 {
        let n = rng.gen_range(3..=5usize);
        let f = random_function(&mut rng, n);
        let c = random_coset(&mut rng, n, n - 2);
        let (g, _) = f.restrict(&c).unwrap();
        let df = exact_depth(&f, &SolveOptions::default()).exact().unwrap();
        let dg = exact_depth(&g, &SolveOptions::default()).exact().unwrap();
        assert!(dg <= df);
    }
}

#[test]
fn certificate_never_exceeds_depth() {
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..80 {
        let n = rng.gen_range(2..=5usize);
        let f = random_function(&mut rng, n);
        let d = exact_depth(&f, &SolveOptions::default()).exact().unwrap();
        match parity_certificate(&f, 10_000_000).certificate {
            CertValue::Exact(c) => assert!(c <= d),
            CertValue::Interval { lower, .. } => assert!(lower <= d),
        }
    }
}

#[test]
fn interval_report_serializes_and_brackets_the_truth() {
    let f = Family::Random { n: 8, seed: 0 }.build().unwrap();
    let full = exact_depth(&f, &SolveOptions::default());
    let d = full.exact().unwrap();
    let starved = exact_depth(
        &f,
        &SolveOptions { node_budget: Some(1), ..Default::default() },
    );
    match starved.outcome {
        pdtlab::solver::DepthOutcome::Unknown { lower, upper } => {
            assert!(lower <= d && d <= upper);
            let v = starved.to_json("random:8,0");
            assert_eq!(v["interval"][0].as_u64().unwrap() as usize, lower);
            assert_eq!(v["interval"][1].as_u64().unwrap() as usize, upper);
            assert!(v.get("exact_depth").is_none());
        }
        pdtlab::solver::DepthOutcome::Exact(_) => panic!("one node cannot finish this search"),
    }
}

#[test]
fn search_matches_reference_on_random_functions() {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..60 {
        let n = rng.gen_range(2..=4usize);
        let f = random_function(&mut rng, n);
        let rep = exact_depth(&f, &SolveOptions::default());
        assert_eq!(rep.exact().unwrap(), reference_depth(&f));
    }
}

#[test]
fn threshold_reduction_preserves_correctness_on_assorted_trees() {
    use pdtlab::strategies::{sweep_strategy_table, thr_reduce};
    // Correct input trees of different shapes: solver witnesses, greedy
    // incumbents and variable chains; the reduced strategy must compute the
    // smaller threshold within depth - 1 queries.
    for (n, k) in [(3usize, 1i64), (4, 1), (3, 2), (5, 2)] {
        let big = Family::Thr { n: n + 2, k: k + 1 }.build().unwrap();
        let target = Family::Thr { n, k }.build().unwrap();
        let mut trees = vec![
            pdtlab::pdt::variable_chain(&big),
            pdtlab::solver::greedy_tree(&big),
        ];
        if let Some(w) = exact_depth(&big, &SolveOptions::default()).witness {
            trees.push(w);
        }
        for t in trees {
            let depth = t.depth();
            let red = thr_reduce(t, n, k).unwrap();
            let rep = sweep_strategy_table(&red, &target).unwrap();
            assert!(rep.correct, "n={n} k={k} witness {:?}", rep.witness);
            assert!(rep.worst_queries < depth.max(1), "n={n} k={k}");
        }
    }
}

#[test]
fn thr2_spectrum_dichotomy() {
    // Exact endpoint coefficients of threshold-2 spectra: F(empty) equals
    // 2(1+n) - 2^n and F(all) equals 2(1-n); their valuations split by the
    // parity of n and pin the granularity.
    for n in 2..=9usize {
        let f = Family::Thr { n, k: 2 }.build().unwrap();
        let s = wht(&f);
        assert_eq!(s.coeff(0), 2 * (1 + n as i64) - (1i64 << n), "n={n}");
        assert_eq!(s.coeff((1u32 << n) - 1), 2 * (1 - n as i64), "n={n}");
        let expect_gran = if n % 2 == 0 { n - 1 } else { n - 2 };
        assert_eq!(s.granularity(), expect_gran, "n={n}");
        let v_lo = nu2(1 - n as i64);
        let v_hi = nu2(1 + n as i64);
        let min = v_lo.min(v_hi).finite().unwrap();
        assert_eq!(min, if n % 2 == 0 { 0 } else { 1 }, "n={n}");
    }
}
