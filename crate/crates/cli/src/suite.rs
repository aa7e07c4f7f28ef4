//! Runtime property-suite runner: re-checks the library invariants with a
//! configurable seed, case count and size ceiling, printing one line per
//! suite.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pdtlab::circuits::{circuit_to_strategy, Gate, XorAndCircuit};
use pdtlab::function::{rmaj_eval, BooleanFunction, Family};
use pdtlab::gf2::{check_rref, Coset, InsertOutcome, ParityMask};
use pdtlab::pdt::{
    materialize, run_strategy, verify_exhaustive, verify_leafwise, Node, ParityDecisionTree,
    QueryOracle, Strategy,
};
use pdtlab::solver::{
    adversary_refute, bound_profile, exact_depth, parity_certificate,
    reference::reference_depth, AdversaryOutcome, CertValue, SolveOptions,
};
use pdtlab::spectral::{deg2, wht};
use pdtlab::strategies::{
    maj_strategy, rmaj_strategy, sweep_strategy_table, thr2_strategy, thr3_strategy,
};

pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_n: usize,
    pub exhaustive_functions: bool,
}

type SuiteResult = Result<usize, String>;
type SuiteFn = fn(&SuiteConfig, &mut StdRng) -> SuiteResult;

pub fn run_all(cfg: &SuiteConfig) -> bool {
    let suites: Vec<(&str, SuiteFn)> = vec![
        ("builders", s_builders),
        ("coset-algebra", s_coset_algebra),
        ("restrict-transport", s_restrict_transport),
        ("spectral-identities", s_spectral_identities),
        ("spectral-bounds", s_spectral_bounds),
        ("tree-strategy-agreement", s_tree_strategy_agreement),
        ("strategy-families", s_strategy_families),
        ("solver-bounds", s_solver_bounds),
        ("solver-oracle", s_solver_oracle),
        ("certificates", s_certificates),
        ("circuit-simulation", s_circuit_simulation),
        ("adversary-refutation", s_adversary),
    ];
    let mut all_ok = true;
    for (name, f) in suites {
        // Per-suite generator: deterministic under the master seed and
        // independent of suite ordering.
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ fxhash(name));
        match f(cfg, &mut rng) {
            Ok(cases) => println!("suite {name}: pass ({cases} cases)"),
            Err(msg) => {
                all_ok = false;
                println!("suite {name}: FAIL - {msg}");
            }
        }
    }
    all_ok
}

fn fxhash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}

fn random_function(rng: &mut StdRng, n: usize) -> BooleanFunction {
    BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5)).unwrap()
}

fn random_coset(rng: &mut StdRng, n: usize, max_rank: usize) -> Coset {
    let mut c = Coset::full(n);
    let rank = rng.gen_range(0..=max_rank.min(n - 1));
    while c.rank() < rank {
        let q = ParityMask(rng.gen_range(1..(1u32 << n)));
        if let InsertOutcome::Extended(ext) = c.insert(q, rng.gen_bool(0.5)) {
            c = ext;
        }
    }
    c
}

fn ensure(cond: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s_builders(cfg: &SuiteConfig, _rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for n in 1..=cfg.max_n.min(10) {
        let maj = Family::Maj { n }.build().unwrap();
        let par = Family::Parity { n }.build().unwrap();
        for x in 0..(1u32 << n) {
            ensure(maj.bit(x) == (2 * x.count_ones() as usize >= n), || {
                format!("maj:{n} at {x:b}")
            })?;
            ensure(par.bit(x) == (x.count_ones() % 2 == 1), || format!("parity:{n} at {x:b}"))?;
            cases += 1;
        }
    }
    if cfg.max_n >= 9 {
        let r = Family::Rmaj { k: 2 }.build().unwrap();
        for x in 0..(1u32 << 9) {
            ensure(r.bit(x) == rmaj_eval(2, x), || format!("rmaj:2 at {x:b}"))?;
            cases += 1;
        }
    }
    Ok(cases)
}

fn s_coset_algebra(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases {
        let n = rng.gen_range(2..=cfg.max_n.min(8));
        let mut c = Coset::full(n);
        for _ in 0..n {
            let q = ParityMask(rng.gen_range(1..(1u32 << n)));
            let b = rng.gen_bool(0.5);
            match c.insert(q, b) {
                InsertOutcome::Extended(ext) => {
                    ensure(ext.rank() == c.rank() + 1, || "rank must rise by one".into())?;
                    ensure(check_rref(&ext).is_ok(), || "echelon form violated".into())?;
                    for x in ext.points() {
                        ensure(q.parity_of(x) == b, || "point violates new row".into())?;
                    }
                    c = ext;
                }
                InsertOutcome::Dependent(forced) => {
                    for x in c.points() {
                        ensure(q.parity_of(x) == forced, || "forced bit wrong".into())?;
                    }
                }
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn s_restrict_transport(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases {
        let n = rng.gen_range(2..=cfg.max_n.min(9));
        let f = random_function(rng, n);
        let c = random_coset(rng, n, n - 1);
        let (g, param) = f.restrict(&c).unwrap();
        for t in 0..(1u32 << param.dim()) {
            ensure(g.bit(t) == f.bit(param.lift_point(t)), || "lift mismatch".into())?;
        }
        cases += 1;
    }
    Ok(cases)
}

fn s_spectral_identities(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases {
        let n = rng.gen_range(2..=cfg.max_n.min(10));
        let f = random_function(rng, n);
        let s = wht(&f);
        let parseval: i64 = s.coeffs().iter().map(|c| c * c).sum();
        ensure(parseval == 1i64 << (2 * n), || "parseval".into())?;
        ensure(s.inverse().unwrap() == f, || "roundtrip".into())?;
        let top = ParityMask::singleton(n - 1);
        let s0 = wht(&f.restrict_by_parity(top, false));
        let s1 = wht(&f.restrict_by_parity(top, true));
        for m in 0..(1u32 << (n - 1)) {
            let hi = m | (1 << (n - 1));
            ensure(2 * s0.coeff(m) == s.coeff(m) + s.coeff(hi), || "subfunction 0".into())?;
            ensure(2 * s1.coeff(m) == s.coeff(m) - s.coeff(hi), || "subfunction 1".into())?;
        }
        let c = random_coset(rng, n, n - 1);
        let (g, _) = f.restrict(&c).unwrap();
        ensure(wht(&g).granularity() <= s.granularity(), || "gran monotonicity".into())?;
        cases += 1;
    }
    Ok(cases)
}

fn s_spectral_bounds(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases {
        let n = rng.gen_range(1..=cfg.max_n.min(12));
        let f = random_function(rng, n);
        let s = wht(&f);
        let spar = s.sparsity();
        let gran = s.granularity() as u32;
        ensure(spar as u128 <= 4u128.pow(gran), || "spar <= 4^gran".into())?;
        if spar >= 2 {
            ensure(2u128.pow(gran + 1) <= spar as u128, || "2^(gran+1) <= spar".into())?;
        }
        if f.is_constant().is_none() {
            ensure(deg2(&f) <= gran as usize + 1, || "deg2 <= gran + 1".into())?;
        }
        cases += 1;
    }
    Ok(cases)
}

fn random_tree(rng: &mut StdRng, n: usize, depth: usize) -> Node {
    if depth == 0 || rng.gen_bool(0.3) {
        return Node::Leaf(if rng.gen_bool(0.5) { -1 } else { 1 });
    }
    Node::Query {
        mask: ParityMask(rng.gen_range(1..(1u32 << n))),
        zero: Box::new(random_tree(rng, n, depth - 1)),
        one: Box::new(random_tree(rng, n, depth - 1)),
    }
}

fn s_tree_strategy_agreement(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases {
        let n = rng.gen_range(2..=cfg.max_n.min(8));
        let f = random_function(rng, n);
        let t = ParityDecisionTree::new(n, random_tree(rng, n, 4)).unwrap();
        let value = |x: u32| if f.bit(x) { -1i8 } else { 1 };
        let a = verify_exhaustive(&t, value);
        let b = verify_leafwise(&t, value);
        ensure(a.passed() == b.passed(), || "exhaustive vs leafwise".into())?;
        cases += 1;
    }
    // Materialized depth equals the worst interactive cost.
    let strategies: Vec<Box<dyn Strategy + Sync>> = vec![
        Box::new(maj_strategy(cfg.max_n.clamp(2, 10))),
        Box::new(rmaj_strategy(2).unwrap()),
        Box::new(thr2_strategy(7).unwrap()),
    ];
    for s in &strategies {
        let t = materialize(s.as_ref()).unwrap();
        let mut worst = 0;
        for x in 0..(1u32 << s.n()) {
            let mut o = QueryOracle::new(x);
            let (_, used) = run_strategy(s.as_ref(), &mut o).map_err(|e| e.to_string())?;
            worst = worst.max(used);
        }
        ensure(t.depth() == worst, || "materialized depth vs interactive worst".into())?;
        cases += 1;
    }
    Ok(cases)
}

fn s_strategy_families(cfg: &SuiteConfig, _rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    let top = cfg.max_n.clamp(3, 14);
    for n in 1..=top {
        let s = maj_strategy(n);
        let f = Family::Maj { n }.build().unwrap();
        let rep = sweep_strategy_table(&s, &f).map_err(|e| e.to_string())?;
        ensure(rep.correct, || format!("maj:{n} wrong at {:?}", rep.witness))?;
        let want = n - (n as u64).count_ones() as usize + 1;
        ensure(rep.worst_queries == want, || format!("maj:{n} worst {}", rep.worst_queries))?;
        cases += 1 << n;
    }
    for k in 1..=2u32 {
        if 3usize.pow(k) > cfg.max_n.max(9) {
            break;
        }
        let s = rmaj_strategy(k).unwrap();
        let f = Family::Rmaj { k }.build().unwrap();
        let rep = sweep_strategy_table(&s, &f).map_err(|e| e.to_string())?;
        ensure(rep.correct, || format!("rmaj:{k}"))?;
        ensure(rep.worst_queries == 3usize.pow(k).div_ceil(2), || format!("rmaj:{k} worst"))?;
        cases += 1 << 3usize.pow(k);
    }
    for n in (3..=top).step_by(2) {
        let s = thr2_strategy(n).unwrap();
        let f = Family::Thr { n, k: 2 }.build().unwrap();
        let rep = sweep_strategy_table(&s, &f).map_err(|e| e.to_string())?;
        ensure(rep.correct && rep.worst_queries == n - 1, || format!("thr2:{n}"))?;
        cases += 1 << n;
    }
    for n in [6usize, 10] {
        if n > top.max(6) {
            break;
        }
        let s = thr3_strategy(n).unwrap();
        let f = Family::Thr { n, k: 3 }.build().unwrap();
        let rep = sweep_strategy_table(&s, &f).map_err(|e| e.to_string())?;
        ensure(rep.correct && rep.worst_queries == n - 1, || format!("thr3:{n}"))?;
        cases += 1 << n;
    }
    Ok(cases)
}

fn s_solver_bounds(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases.min(200) {
        let n = rng.gen_range(2..=cfg.max_n.min(5));
        let f = random_function(rng, n);
        let d = exact_depth(&f, &SolveOptions::default())
            .exact()
            .ok_or("small solve must be exact")?;
        let b = bound_profile(&f, false);
        ensure(d >= b.best_lower, || "depth below lower bound".into())?;
        // Restriction monotonicity.
        let c = random_coset(rng, n, n - 2);
        let (g, _) = f.restrict(&c).unwrap();
        let dg = exact_depth(&g, &SolveOptions::default()).exact().unwrap();
        ensure(dg <= d, || "restriction raised depth".into())?;
        // Memoized and plain searches agree.
        if n <= 4 {
            let plain = exact_depth(&f, &SolveOptions { no_memo: true, ..Default::default() });
            ensure(plain.exact() == Some(d), || "memo vs plain".into())?;
        }
        cases += 1;
    }
    Ok(cases)
}

fn s_solver_oracle(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    if cfg.exhaustive_functions {
        for tt in 0u32..256 {
            let f = BooleanFunction::from_fn(3, |x| tt >> x & 1 == 1).unwrap();
            let fast = exact_depth(&f, &SolveOptions::default()).exact().unwrap();
            ensure(fast == reference_depth(&f), || format!("table {tt:02x}"))?;
            cases += 1;
        }
    }
    for _ in 0..cfg.cases.min(100) {
        let n = rng.gen_range(2..=cfg.max_n.min(4));
        let f = random_function(rng, n);
        let fast = exact_depth(&f, &SolveOptions::default()).exact().unwrap();
        ensure(fast == reference_depth(&f), || "random function mismatch".into())?;
        cases += 1;
    }
    Ok(cases)
}

fn s_certificates(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for n in 2..=cfg.max_n.min(6) {
        let and = Family::And { n }.build().unwrap();
        let rep = parity_certificate(&and, 10_000_000);
        ensure(rep.certificate == CertValue::Exact(n), || format!("and:{n} certificate"))?;
        let par = Family::Parity { n }.build().unwrap();
        let rep = parity_certificate(&par, 10_000_000);
        ensure(rep.certificate == CertValue::Exact(1), || format!("parity:{n} certificate"))?;
        cases += 2;
    }
    for _ in 0..cfg.cases.min(100) {
        let n = rng.gen_range(2..=cfg.max_n.min(5));
        let f = random_function(rng, n);
        let d = exact_depth(&f, &SolveOptions::default()).exact().unwrap();
        let c = parity_certificate(&f, 10_000_000).certificate.lower();
        ensure(c <= d, || "certificate exceeds depth".into())?;
        cases += 1;
    }
    Ok(cases)
}

fn random_netlist(rng: &mut StdRng, max_n: usize) -> XorAndCircuit {
    let n = rng.gen_range(2..=max_n.clamp(2, 8));
    let mut gates: Vec<Gate> = (0..n).map(Gate::Input).collect();
    let want_ands = rng.gen_range(0..=6usize);
    let extra = rng.gen_range(want_ands.max(1)..=want_ands + 8);
    let mut ands = 0;
    while gates.len() < n + extra {
        let i = gates.len();
        let a = rng.gen_range(0..i);
        let b = rng.gen_range(0..i);
        gates.push(match rng.gen_range(0..4) {
            0 | 1 if ands < want_ands => {
                ands += 1;
                Gate::And(a, b)
            }
            2 => Gate::Not(a),
            _ => Gate::Xor(a, b),
        });
    }
    let out = gates.len() - 1;
    XorAndCircuit::new(n, gates, out).unwrap()
}

fn s_circuit_simulation(cfg: &SuiteConfig, rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for _ in 0..cfg.cases.min(200) {
        let c = random_netlist(rng, cfg.max_n);
        let table = c.truth_table().unwrap();
        let ands = c.and_count();
        let s = circuit_to_strategy(c);
        let rep = sweep_strategy_table(&s, &table).map_err(|e| e.to_string())?;
        ensure(rep.correct, || format!("circuit wrong at {:?}", rep.witness))?;
        ensure(rep.worst_queries <= ands + 1, || "budget exceeded".into())?;
        cases += 1;
    }
    Ok(cases)
}

fn s_adversary(_cfg: &SuiteConfig, _rng: &mut StdRng) -> SuiteResult {
    let mut cases = 0;
    for tag in ["maj:3", "and:3"] {
        let f: BooleanFunction = Family::parse(tag).unwrap().build().unwrap();
        let gran = wht(&f).granularity();
        let rep = exact_depth(&f, &SolveOptions::default());
        let witness = rep.witness.ok_or("no witness")?;
        for root in truncations(witness.root(), gran) {
            let t = ParityDecisionTree::new(f.n(), root).unwrap();
            match adversary_refute(&f, &t) {
                AdversaryOutcome::Refuted(r) => {
                    ensure(f.eval(r.counterexample) as i8 != r.leaf_label, || {
                        format!("{tag}: refutation does not check out")
                    })?;
                }
                AdversaryOutcome::NotApplicable => {
                    return Err(format!("{tag}: truncation not refuted"));
                }
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn truncations(node: &Node, depth: usize) -> Vec<Node> {
    match node {
        Node::Leaf(v) => vec![Node::Leaf(*v)],
        Node::Query { mask, zero, one } => {
            if depth == 0 {
                return vec![Node::Leaf(-1), Node::Leaf(1)];
            }
            let zs = truncations(zero, depth - 1);
            let os = truncations(one, depth - 1);
            let mut out = Vec::new();
            for z in &zs {
                for o in &os {
                    out.push(Node::Query {
                        mask: *mask,
                        zero: Box::new(z.clone()),
                        one: Box::new(o.clone()),
                    });
                }
            }
            out
        }
    }
}
