//! Command line front end: spectral measures, exact depth solving, strategy
//! verification, adversary refutation, threshold reduction, circuit
//! simulation, and the invariant suite runner.

mod ledger;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pdtlab::circuits::{circuit_to_strategy, XorAndCircuit};
use pdtlab::function::{rmaj_eval, BooleanFunction, Family};
use pdtlab::pdt::{
    materialize, verify_exhaustive, verify_leafwise, ParityDecisionTree, Strategy, VerifyReport,
};
use pdtlab::solver::{
    adversary_refute, bound_profile, exact_depth, AdversaryOutcome, DepthOutcome, SolveOptions,
};
use pdtlab::spectral::{anf, wht};
use pdtlab::strategies::{
    maj_strategy, rmaj_strategy, sweep_strategy_table, thr2_strategy, thr3_strategy, thr_reduce,
};

use ledger::Ledger;

#[derive(Parser)]
#[command(name = "pdtlab", version, about = "Parity decision tree laboratory")]
struct Cli {
    /// JSON-lines results ledger (or set PDTLAB_LEDGER).
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,
    /// Worker threads for verification sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FunctionSource {
    /// Function family tag, e.g. maj:7, thr:10,3, rmaj:2, parity:6, ip:8,
    /// and:4, or:4, const:5,-1, random:8,42.
    #[arg(long = "fn", value_name = "FAMILY")]
    family: Option<String>,
    /// Truth table file in PDTTT format.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

impl FunctionSource {
    fn load(&self) -> Result<(BooleanFunction, String), String> {
        match (&self.family, &self.file) {
            (Some(tag), None) => {
                let fam = Family::parse(tag).map_err(|e| e.to_string())?;
                let f = fam.build().map_err(|e| e.to_string())?;
                Ok((f, fam.id()))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let f = BooleanFunction::from_pdttt(&text).map_err(|e| e.to_string())?;
                let id = format!("file:{}", path.display());
                Ok((f, id))
            }
            _ => Err("provide exactly one of --fn or --file".into()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Exhaustive,
    Leafwise,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Maj,
    Rmaj,
    Thr2,
    Thr3,
}

#[derive(Subcommand)]
enum Command {
    /// Exact spectral measures and depth lower bounds.
    Measures {
        #[command(flatten)]
        source: FunctionSource,
        /// Print the algebraic normal form.
        #[arg(long)]
        anf: bool,
        /// Also run the parity certificate search (expensive).
        #[arg(long)]
        cert: bool,
        /// Write nonzero spectrum entries to a file.
        #[arg(long, value_name = "PATH")]
        spectrum_out: Option<PathBuf>,
    },
    /// Exact minimal parity-decision-tree depth.
    Solve {
        #[command(flatten)]
        source: FunctionSource,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget_seconds: Option<f64>,
        /// Search node budget.
        #[arg(long)]
        budget_nodes: Option<u64>,
    },
    /// Build, run and verify a named query strategy.
    Strategy {
        #[arg(long, value_enum)]
        name: StrategyName,
        /// Variable count (maj, thr2, thr3).
        #[arg(long)]
        n: Option<usize>,
        /// Recursion depth (rmaj).
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        verify: VerifyMode,
        /// Write the materialized tree as an s-expression.
        #[arg(long, value_name = "PATH")]
        emit_tree: Option<PathBuf>,
    },
    /// Run the granularity adversary against a claimed tree.
    Refute {
        /// Truth table file (PDTTT).
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
        /// Tree file (s-expression).
        #[arg(long, value_name = "PATH")]
        tree: PathBuf,
    },
    /// Turn a tree for thr(n+2, k+1) into a strategy for thr(n, k).
    ReduceThr {
        #[arg(long, value_name = "PATH")]
        tree: PathBuf,
        /// Target variable count n.
        #[arg(long)]
        n: usize,
        /// Target threshold k.
        #[arg(long)]
        k: i64,
        /// Write the materialized reduced tree.
        #[arg(long, value_name = "PATH")]
        emit_tree: Option<PathBuf>,
    },
    /// Parse a netlist; optionally simulate it by parity queries.
    Circuit {
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
        /// Convert to a query strategy and verify it.
        #[arg(long)]
        to_pdt: bool,
        #[arg(long, value_name = "PATH")]
        emit_tree: Option<PathBuf>,
    },
    /// Run the library invariant suites.
    Suite {
        /// Master seed for all generated cases.
        #[arg(long, default_value_t = 0x70d7_1ab0)]
        seed: u64,
        /// Cases per randomized suite.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Ceiling on generated variable counts.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Cross-check all 256 three-variable functions against the
        /// reference search.
        #[arg(long)]
        exhaustive_functions: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly when the consumer of a pipe goes away.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let ledger = Ledger::from_flag(cli.ledger.clone());
    match run(cli, &ledger) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, ledger: &Ledger) -> Result<bool, String> {
    match cli.command {
        Command::Measures { source, anf: show_anf, cert, spectrum_out } => {
            cmd_measures(source, show_anf, cert, spectrum_out, ledger)
        }
        Command::Solve { source, budget_seconds, budget_nodes } => {
            cmd_solve(source, budget_seconds, budget_nodes, ledger)
        }
        Command::Strategy { name, n, k, verify, emit_tree } => {
            cmd_strategy(name, n, k, verify, emit_tree, ledger)
        }
        Command::Refute { file, tree } => cmd_refute(file, tree),
        Command::ReduceThr { tree, n, k, emit_tree } => cmd_reduce_thr(tree, n, k, emit_tree),
        Command::Circuit { file, to_pdt, emit_tree } => cmd_circuit(file, to_pdt, emit_tree),
        Command::Suite { seed, cases, max_n, exhaustive_functions } => {
            let cfg = suite::SuiteConfig { seed, cases, max_n, exhaustive_functions };
            Ok(suite::run_all(&cfg))
        }
    }
}

fn cmd_measures(
    source: FunctionSource,
    show_anf: bool,
    cert: bool,
    spectrum_out: Option<PathBuf>,
    ledger: &Ledger,
) -> Result<bool, String> {
    let (f, id) = source.load()?;
    let s = wht(&f);
    let bounds = bound_profile(&f, cert);
    println!("function {id}");
    println!("n {}", f.n());
    println!("spar {}", s.sparsity());
    println!("gran {}", s.granularity());
    println!("deg2 {}", bounds.deg2_bound);
    println!("bound.sparsity {}", bounds.sparsity_bound);
    println!("bound.deg2 {}", bounds.deg2_bound);
    println!("bound.gran {}", bounds.gran_bound);
    match bounds.cert_bound {
        Some(c) => println!("bound.cert {c}"),
        None => println!("bound.cert -"),
    }
    println!("bound.best {}", bounds.best_lower);
    // One query strips one AND gate, so the depth bound shifts down by one.
    println!("c_and_lower {}", s.granularity());
    if show_anf {
        let p = anf(&f);
        println!("deg2(anf) {}", p.degree());
        let monomials = p.monomials().len();
        if monomials <= 64 {
            println!("anf {p}");
        } else {
            println!("anf ({monomials} monomials, not printed)");
        }
    }
    if let Some(path) = spectrum_out {
        std::fs::write(&path, s.export_nonzero())
            .map_err(|e| format!("{}: {e}", path.display()))?;
        println!("spectrum written to {}", path.display());
    }
    ledger
        .append(json!({
            "kind": "measures",
            "function_id": id,
            "n": f.n(),
            "spar": s.sparsity(),
            "gran": s.granularity(),
            "deg2": bounds.deg2_bound,
            "cert": bounds.cert_bound,
            "bounds": {
                "spar": bounds.sparsity_bound,
                "deg2": bounds.deg2_bound,
                "gran": bounds.gran_bound,
                "cert": bounds.cert_bound,
            },
        }))
        .map_err(|e| e.to_string())?;
    Ok(true)
}

/// Strategy incumbent for the named families the solver knows how to seed.
fn family_incumbent(id: &str, f: &BooleanFunction) -> Option<ParityDecisionTree> {
    let fam = Family::parse(id).ok()?;
    let strat: Box<dyn Strategy> = match fam {
        Family::Maj { n } => Box::new(maj_strategy(n)),
        Family::Rmaj { k } => Box::new(rmaj_strategy(k).ok()?),
        Family::Thr { n, k: 2 } if n % 2 == 1 && n >= 3 => Box::new(thr2_strategy(n).ok()?),
        Family::Thr { n, k: 3 } if n % 4 == 2 && n >= 6 => Box::new(thr3_strategy(n).ok()?),
        _ => return None,
    };
    // Materialized trees can reach 2^budget nodes; stay within reason.
    if strat.n() != f.n() || strat.budget() > 20 {
        return None;
    }
    materialize(strat.as_ref()).ok()
}

fn cmd_solve(
    source: FunctionSource,
    budget_seconds: Option<f64>,
    budget_nodes: Option<u64>,
    ledger: &Ledger,
) -> Result<bool, String> {
    let (f, id) = source.load()?;
    let opts = SolveOptions {
        node_budget: budget_nodes,
        time_budget: budget_seconds.map(Duration::from_secs_f64),
        incumbent: family_incumbent(&id, &f),
        no_memo: false,
    };
    let rep = exact_depth(&f, &opts);
    println!("function {id}");
    match rep.outcome {
        DepthOutcome::Exact(d) => println!("exact_depth {d}"),
        DepthOutcome::Unknown { lower, upper } => println!("interval {lower} {upper}"),
    }
    println!("bound.best {}", rep.bounds.best_lower);
    println!("nodes_expanded {}", rep.nodes_expanded);
    println!("memo_hits {}", rep.memo_hits);
    println!("wall_ms {}", rep.wall.as_millis());
    if let Some(t) = &rep.witness {
        println!("witness_depth {}", t.depth());
    }
    let mut entry = rep.to_json(&id);
    entry["kind"] = json!("solve");
    println!("json {entry}");
    ledger.append(entry).map_err(|e| e.to_string())?;
    Ok(true)
}

fn report_verify(label: &str, rep: &VerifyReport) -> bool {
    match &rep.result {
        pdtlab::pdt::Verification::Pass => {
            println!(
                "verify {label}: pass ({} points, worst path {}, infeasible leaves {})",
                rep.checked_points, rep.max_path, rep.infeasible_leaves
            );
            true
        }
        pdtlab::pdt::Verification::Fail { witness } => {
            println!("verify {label}: FAIL at input {witness:#x}");
            false
        }
    }
}

fn cmd_strategy(
    name: StrategyName,
    n: Option<usize>,
    k: Option<u32>,
    verify: VerifyMode,
    emit_tree: Option<PathBuf>,
    ledger: &Ledger,
) -> Result<bool, String> {
    let need_n = || n.ok_or_else(|| "this strategy needs --n".to_string());
    let (strat, id): (Box<dyn Strategy + Sync>, String) = match name {
        StrategyName::Maj => {
            let n = need_n()?;
            (Box::new(maj_strategy(n)), format!("maj:{n}"))
        }
        StrategyName::Rmaj => {
            let k = k.ok_or("rmaj needs --k")?;
            (
                Box::new(rmaj_strategy(k).map_err(|e| e.to_string())?),
                format!("rmaj:{k}"),
            )
        }
        StrategyName::Thr2 => {
            let n = need_n()?;
            (
                Box::new(thr2_strategy(n).map_err(|e| e.to_string())?),
                format!("thr:{n},2"),
            )
        }
        StrategyName::Thr3 => {
            let n = need_n()?;
            (
                Box::new(thr3_strategy(n).map_err(|e| e.to_string())?),
                format!("thr:{n},3"),
            )
        }
    };
    let n_vars = strat.n();
    println!("strategy {id} over {n_vars} variables");
    println!("budget {}", strat.budget());
    if strat.budget() > 22 {
        return Err("materialized tree would exceed 2^22 nodes; pick a smaller instance".into());
    }
    let tree = materialize(strat.as_ref()).map_err(|e| e.to_string())?;
    println!("depth {}", tree.depth());
    println!("leaves {}", tree.leaf_count());

    let value: Box<dyn Fn(u32) -> i8 + Sync> = match name {
        StrategyName::Maj => {
            let n = n_vars;
            Box::new(move |x: u32| if 2 * x.count_ones() as usize >= n { -1 } else { 1 })
        }
        StrategyName::Rmaj => {
            let k = k.unwrap();
            Box::new(move |x: u32| if rmaj_eval(k, x) { -1 } else { 1 })
        }
        StrategyName::Thr2 => Box::new(|x: u32| if x.count_ones() >= 2 { -1 } else { 1 }),
        StrategyName::Thr3 => Box::new(|x: u32| if x.count_ones() >= 3 { -1 } else { 1 }),
    };
    let ok = match verify {
        VerifyMode::None => true,
        VerifyMode::Exhaustive => {
            if n_vars > 24 {
                return Err("exhaustive verification needs n <= 24; use --verify leafwise".into());
            }
            report_verify("exhaustive", &verify_exhaustive(&tree, &value))
        }
        VerifyMode::Leafwise => report_verify("leafwise", &verify_leafwise(&tree, &value)),
    };
    if let Some(path) = emit_tree {
        std::fs::write(&path, tree.to_sexpr()).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("tree written to {}", path.display());
    }
    ledger
        .append(json!({
            "kind": "strategy",
            "function_id": id,
            "n": n_vars,
            "strategy": {
                "budget": strat.budget(),
                "depth": tree.depth(),
                "leaves": tree.leaf_count(),
                "verified": ok,
            },
        }))
        .map_err(|e| e.to_string())?;
    Ok(ok)
}

fn cmd_refute(file: PathBuf, tree: PathBuf) -> Result<bool, String> {
    let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
    let f = BooleanFunction::from_pdttt(&text).map_err(|e| e.to_string())?;
    let ttext = std::fs::read_to_string(&tree).map_err(|e| format!("{}: {e}", tree.display()))?;
    let t = ParityDecisionTree::from_sexpr(&ttext, f.n()).map_err(|e| e.to_string())?;
    match adversary_refute(&f, &t) {
        AdversaryOutcome::NotApplicable => {
            let gran = wht(&f).granularity();
            println!(
                "not applicable: tree depth {} exceeds granularity {} (or function constant)",
                t.depth(),
                gran
            );
            Ok(true)
        }
        AdversaryOutcome::Refuted(r) => {
            println!("refuted: target mask {:x}", r.target_mask.0);
            for (q, b) in &r.path {
                println!("  query {:x} -> branch {}", q.0, *b as u8);
            }
            println!(
                "leaf label {} but f({:#x}) = {}",
                r.leaf_label,
                r.counterexample,
                f.eval(r.counterexample)
            );
            if let Some((a, b)) = r.split_pair {
                println!("split pair {:#x} {:#x}", a, b);
            }
            // Independent re-check before claiming success.
            let ok = t.eval(r.counterexample) == r.leaf_label
                && f.eval(r.counterexample) as i8 != r.leaf_label;
            println!("recheck {}", if ok { "confirmed" } else { "FAILED" });
            Ok(ok)
        }
    }
}

fn cmd_reduce_thr(
    tree: PathBuf,
    n: usize,
    k: i64,
    emit_tree: Option<PathBuf>,
) -> Result<bool, String> {
    if n > 20 {
        return Err("reduction verification needs n <= 20".into());
    }
    let ttext = std::fs::read_to_string(&tree).map_err(|e| format!("{}: {e}", tree.display()))?;
    let t = ParityDecisionTree::from_sexpr(&ttext, n + 2).map_err(|e| e.to_string())?;
    println!("input tree: thr:{},{} depth {}", n + 2, k + 1, t.depth());
    let red = thr_reduce(t, n, k).map_err(|e| e.to_string())?;
    println!("reduced strategy for thr:{n},{k}: budget {}", red.budget());
    let target = Family::Thr { n, k }.build().map_err(|e| e.to_string())?;
    let rep = sweep_strategy_table(&red, &target).map_err(|e| e.to_string())?;
    if !rep.correct {
        println!("verify: FAIL at input {:#x}", rep.witness.unwrap());
        return Ok(false);
    }
    println!("verify: pass, worst queries {}", rep.worst_queries);
    if let Some(path) = emit_tree {
        let mat = materialize(&red).map_err(|e| e.to_string())?;
        std::fs::write(&path, mat.to_sexpr()).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("tree written to {}", path.display());
    }
    Ok(true)
}

fn cmd_circuit(file: PathBuf, to_pdt: bool, emit_tree: Option<PathBuf>) -> Result<bool, String> {
    let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
    let c = XorAndCircuit::parse(&text).map_err(|e| e.to_string())?;
    println!(
        "circuit: n={} gates={} and_count={}",
        c.n(),
        c.gate_count(),
        c.and_count()
    );
    if !to_pdt {
        return Ok(true);
    }
    if c.n() > 16 {
        return Err("strategy verification needs n <= 16".into());
    }
    let table = c.truth_table().map_err(|e| e.to_string())?;
    let s = circuit_to_strategy(c);
    println!("to-pdt: budget {}", s.budget());
    let rep = sweep_strategy_table(&s, &table).map_err(|e| e.to_string())?;
    if !rep.correct {
        println!("verify: FAIL at input {:#x}", rep.witness.unwrap());
        return Ok(false);
    }
    println!("verify: pass, worst queries {}", rep.worst_queries);
    if let Some(path) = emit_tree {
        let mat = materialize(&s).map_err(|e| e.to_string())?;
        println!("tree depth {}", mat.depth());
        std::fs::write(&path, mat.to_sexpr()).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("tree written to {}", path.display());
    }
    Ok(true)
}
