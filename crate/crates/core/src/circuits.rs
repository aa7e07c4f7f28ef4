//! XOR-AND-NOT netlists with fan-in 2 and their simulation by parity
//! queries: a circuit with `s` AND gates yields a strategy asking at most
//! `s + 1` queries.

use std::collections::HashMap;

use crate::error::Error;
use crate::function::{BooleanFunction, N_MAX};
use crate::gf2::ParityMask;
use crate::machine::{replay, Machine};
use crate::pdt::{Strategy, StrategyAction};
use crate::Result;

/// Gate operands refer to earlier positions in the gate list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Not(usize),
    Xor(usize, usize),
    And(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorAndCircuit {
    n: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl XorAndCircuit {
    pub fn new(n: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if !(1..=32).contains(&n) {
            return Err(Error::VarCount { n, max: 32 });
        }
        let mut seen_input = vec![false; n];
        for (i, g) in gates.iter().enumerate() {
            let check = |j: usize| -> Result<()> {
                if j >= i {
                    Err(Error::Parse { line: i, msg: "operand must be an earlier gate".into() })
                } else {
                    Ok(())
                }
            };
            match *g {
                Gate::Input(v) => {
                    if v >= n || seen_input[v] {
                        return Err(Error::Parse { line: i, msg: "bad input index".into() });
                    }
                    seen_input[v] = true;
                }
                Gate::Not(a) => check(a)?,
                Gate::Xor(a, b) | Gate::And(a, b) => {
                    check(a)?;
                    check(b)?;
                }
            }
        }
        if !seen_input.iter().all(|&s| s) {
            return Err(Error::Parse { line: 0, msg: "missing input declarations".into() });
        }
        if output >= gates.len() {
            return Err(Error::Parse { line: 0, msg: "output refers past the last gate".into() });
        }
        Ok(XorAndCircuit { n, gates, output })
    }

    /// Netlist text: `INPUT <i>`, `<id> = NOT <id>`, `<id> = XOR <id> <id>`,
    /// `<id> = AND <id> <id>`, `OUTPUT <id>`. Inputs are `1..n`; every
    /// operand must be declared on an earlier line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ids: HashMap<i64, usize> = HashMap::new();
        let mut gates: Vec<Gate> = Vec::new();
        let mut inputs: Vec<i64> = Vec::new();
        let mut output: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if output.is_some() {
                return Err(Error::Parse { line, msg: "content after OUTPUT".into() });
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let int = |s: &str| -> Result<i64> {
                s.parse()
                    .map_err(|_| Error::Parse { line, msg: format!("bad integer `{s}`") })
            };
            let lookup = |ids: &HashMap<i64, usize>, s: &str| -> Result<usize> {
                let id = int(s)?;
                ids.get(&id)
                    .copied()
                    .ok_or_else(|| Error::Parse { line, msg: format!("undefined gate `{id}`") })
            };
            match toks.as_slice() {
                ["INPUT", v] => {
                    let id = int(v)?;
                    if ids.contains_key(&id) {
                        return Err(Error::Parse { line, msg: "duplicate id".into() });
                    }
                    inputs.push(id);
                    ids.insert(id, gates.len());
                    gates.push(Gate::Input(0)); // var index patched below
                }
                [id, "=", "NOT", a] => {
                    let id = int(id)?;
                    if ids.contains_key(&id) {
                        return Err(Error::Parse { line, msg: "duplicate id".into() });
                    }
                    let g = Gate::Not(lookup(&ids, a)?);
                    ids.insert(id, gates.len());
                    gates.push(g);
                }
                [id, "=", op @ ("XOR" | "AND"), a, b] => {
                    let id = int(id)?;
                    if ids.contains_key(&id) {
                        return Err(Error::Parse { line, msg: "duplicate id".into() });
                    }
                    let (a, b) = (lookup(&ids, a)?, lookup(&ids, b)?);
                    let g = if *op == "XOR" { Gate::Xor(a, b) } else { Gate::And(a, b) };
                    ids.insert(id, gates.len());
                    gates.push(g);
                }
                ["OUTPUT", o] => {
                    output = Some(lookup(&ids, o)?);
                }
                _ => return Err(Error::Parse { line, msg: format!("unrecognized line `{l}`") }),
            }
        }
        let output = output.ok_or(Error::Parse { line: 0, msg: "missing OUTPUT".into() })?;
        // Inputs must be exactly 1..n.
        let n = inputs.len();
        let mut sorted = inputs.clone();
        sorted.sort_unstable();
        if sorted != (1..=n as i64).collect::<Vec<_>>() {
            return Err(Error::Parse { line: 0, msg: "inputs must be exactly 1..n".into() });
        }
        for (&id, &pos) in ids.iter() {
            if let Gate::Input(_) = gates[pos] {
                gates[pos] = Gate::Input((id - 1) as usize);
            }
        }
        XorAndCircuit::new(n, gates, output)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::And(_, _))).count()
    }

    /// Evaluate over GF(2); `true` corresponds to output -1.
    pub fn eval(&self, x: u32) -> bool {
        let mut vals = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            vals[i] = match *g {
                Gate::Input(v) => x >> v & 1 == 1,
                Gate::Not(a) => !vals[a],
                Gate::Xor(a, b) => vals[a] ^ vals[b],
                Gate::And(a, b) => vals[a] & vals[b],
            };
        }
        vals[self.output]
    }

    pub fn eval_value(&self, x: u32) -> i32 {
        if self.eval(x) {
            -1
        } else {
            1
        }
    }

    pub fn truth_table(&self) -> Result<BooleanFunction> {
        if self.n > N_MAX {
            return Err(Error::VarCount { n: self.n, max: N_MAX });
        }
        BooleanFunction::from_fn(self.n, |x| self.eval(x))
    }
}

/// Linear form over GF(2): a parity of inputs plus a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub mask: ParityMask,
    pub constant: bool,
}

impl AffineForm {
    pub const ZERO: AffineForm = AffineForm { mask: ParityMask(0), constant: false };

    fn xor(self, other: AffineForm) -> AffineForm {
        AffineForm { mask: ParityMask(self.mask.0 ^ other.mask.0), constant: self.constant ^ other.constant }
    }

    fn not(self) -> AffineForm {
        AffineForm { mask: self.mask, constant: !self.constant }
    }

    fn is_constant(self) -> bool {
        self.mask.is_zero()
    }
}

/// Which input of the chosen AND gate to query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AndInputPick {
    /// Numerically smaller mask; ties go left. The default.
    SmallerMask,
    Left,
    Right,
}

enum CirPending {
    None,
    And { gate: usize, chosen: AffineForm, other: AffineForm },
    Final { constant: bool },
}

/// Gate elimination driven by queries: resolve the first AND gate in list
/// order whose inputs are affine, querying one input unless a constant
/// input short-circuits it for free.
struct CirMachine<'a> {
    c: &'a XorAndCircuit,
    pick: AndInputPick,
    resolved: HashMap<usize, AffineForm>,
    pending: CirPending,
    done: Option<i8>,
}

impl CirMachine<'_> {
    fn forms(&self) -> Vec<Option<AffineForm>> {
        let mut forms: Vec<Option<AffineForm>> = Vec::with_capacity(self.c.gates.len());
        for (i, g) in self.c.gates.iter().enumerate() {
            let form = match *g {
                Gate::Input(v) => Some(AffineForm { mask: ParityMask::singleton(v), constant: false }),
                Gate::Not(a) => forms[a].map(AffineForm::not),
                Gate::Xor(a, b) => match (forms[a], forms[b]) {
                    (Some(x), Some(y)) => Some(x.xor(y)),
                    _ => None,
                },
                Gate::And(_, _) => self.resolved.get(&i).copied(),
            };
            forms.push(form);
        }
        forms
    }

    fn advance(&mut self) {
        if self.done.is_some() || !matches!(self.pending, CirPending::None) {
            return;
        }
        loop {
            let forms = self.forms();
            if let Some(out) = forms[self.c.output] {
                if out.is_constant() {
                    self.done = Some(if out.constant { -1 } else { 1 });
                } else {
                    self.pending = CirPending::Final { constant: out.constant };
                }
                return;
            }
            let next_and = self.c.gates.iter().enumerate().find_map(|(i, g)| match g {
                Gate::And(a, b) if !self.resolved.contains_key(&i) => {
                    match (forms[*a], forms[*b]) {
                        (Some(x), Some(y)) => Some((i, x, y)),
                        _ => None,
                    }
                }
                _ => None,
            });
            let (gate, fa, fb) = next_and.expect("unresolved output implies a ready AND gate");
            // Constant inputs simplify without a query.
            if fa.is_constant() {
                self.resolved.insert(gate, if fa.constant { fb } else { AffineForm::ZERO });
                continue;
            }
            if fb.is_constant() {
                self.resolved.insert(gate, if fb.constant { fa } else { AffineForm::ZERO });
                continue;
            }
            let (chosen, other) = match self.pick {
                AndInputPick::Left => (fa, fb),
                AndInputPick::Right => (fb, fa),
                AndInputPick::SmallerMask => {
                    if fb.mask.0 < fa.mask.0 {
                        (fb, fa)
                    } else {
                        (fa, fb)
                    }
                }
            };
            self.pending = CirPending::And { gate, chosen, other };
            return;
        }
    }
}

impl Machine for CirMachine<'_> {
    fn next_action(&mut self) -> StrategyAction {
        self.advance();
        if let Some(v) = self.done {
            return StrategyAction::Output(v);
        }
        match &self.pending {
            CirPending::And { chosen, .. } => StrategyAction::Query(chosen.mask),
            CirPending::Final { .. } => {
                let forms = self.forms();
                StrategyAction::Query(forms[self.c.output].unwrap().mask)
            }
            CirPending::None => unreachable!("advance stopped without action"),
        }
    }

    fn feed(&mut self, answer: bool) {
        match std::mem::replace(&mut self.pending, CirPending::None) {
            CirPending::And { gate, chosen, other } => {
                let value = answer ^ chosen.constant;
                self.resolved.insert(gate, if value { other } else { AffineForm::ZERO });
            }
            CirPending::Final { constant } => {
                self.done = Some(if answer ^ constant { -1 } else { 1 });
            }
            CirPending::None => debug_assert!(false, "fed without pending query"),
        }
    }
}

/// Strategy computing the circuit's function in at most `and_count + 1`
/// queries.
pub struct CircuitStrategy {
    circuit: XorAndCircuit,
    pick: AndInputPick,
    budget: usize,
}

pub fn circuit_to_strategy(circuit: XorAndCircuit) -> CircuitStrategy {
    circuit_to_strategy_with(circuit, AndInputPick::SmallerMask)
}

pub fn circuit_to_strategy_with(circuit: XorAndCircuit, pick: AndInputPick) -> CircuitStrategy {
    let budget = circuit.and_count() + 1;
    CircuitStrategy { circuit, pick, budget }
}

impl CircuitStrategy {
    pub fn circuit(&self) -> &XorAndCircuit {
        &self.circuit
    }
}

impl Strategy for CircuitStrategy {
    fn n(&self) -> usize {
        self.circuit.n()
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn decide(&self, transcript: &[(ParityMask, bool)]) -> StrategyAction {
        replay(
            CirMachine {
                c: &self.circuit,
                pick: self.pick,
                resolved: HashMap::new(),
                pending: CirPending::None,
                done: None,
            },
            transcript,
        )
    }
}
