//! Bit-packed truth tables and named function families.
//!
//! A function maps `{0,1}^n` to `{-1,1}`; the value -1 stands for `true`.
//! Assignments are encoded as integers with bit `i-1` holding `x_i`, so the
//! table index of an assignment is the assignment itself.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::gf2::{Coset, CosetParam, ParityMask};
use crate::Result;

/// Largest supported variable count for truth tables. The exact transforms
/// allocate `2^n` machine integers; raise this constant when rebuilding for
/// bigger experiments.
pub const N_MAX: usize = 24;

/// Immutable bit-packed truth table; bit `x` set means `f(x) = -1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<u64>,
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BooleanFunction(n={}, weight={})", self.n, self.weight())
    }
}

fn words_for(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

impl BooleanFunction {
    pub fn from_fn(n: usize, mut f: impl FnMut(u32) -> bool) -> Result<Self> {
        if !(1..=N_MAX).contains(&n) {
            return Err(Error::VarCount { n, max: N_MAX });
        }
        let mut table = vec![0u64; words_for(n)];
        for x in 0..(1u64 << n) as u32 {
            if f(x) {
                table[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(BooleanFunction { n, table })
    }

    /// Build from raw table words; tail bits beyond `2^n` must be clear.
    pub fn from_table_words(n: usize, table: Vec<u64>) -> Result<Self> {
        if !(1..=N_MAX).contains(&n) {
            return Err(Error::VarCount { n, max: N_MAX });
        }
        if table.len() != words_for(n) {
            return Err(Error::Parse { line: 0, msg: "wrong table length".into() });
        }
        let bits = 1usize << n;
        if !bits.is_multiple_of(64) && table[bits / 64] >> (bits % 64) != 0 {
            return Err(Error::Parse { line: 0, msg: "nonzero tail bits".into() });
        }
        Ok(BooleanFunction { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    /// Whether `f(x) = -1`.
    #[inline]
    pub fn bit(&self, x: u32) -> bool {
        debug_assert!((x as u64) < self.size());
        self.table[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn eval(&self, x: u32) -> i32 {
        if self.bit(x) {
            -1
        } else {
            1
        }
    }

    /// Number of inputs mapped to -1.
    pub fn weight(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> Option<i32> {
        let w = self.weight();
        if w == 0 {
            Some(1)
        } else if w == self.size() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn table_words(&self) -> &[u64] {
        &self.table
    }

    /// Subfunction on the coset under the standard parametrization:
    /// `g(t) = f(param(t))`. The parametrization is returned so points and
    /// parities can be lifted back to the original space.
    pub fn restrict(&self, c: &Coset) -> Result<(BooleanFunction, CosetParam)> {
        if c.is_empty() {
            return Err(Error::EmptyCoset);
        }
        assert_eq!(c.n(), self.n, "coset over wrong variable count");
        let param = c.param();
        let d = param.dim();
        if d == 0 {
            // Zero-dimensional restriction: keep a 1-variable constant table
            // so downstream code never sees n = 0.
            let v = self.bit(param.lift_point(0));
            let g = BooleanFunction::from_fn(1, |_| v)?;
            return Ok((g, param));
        }
        let g = BooleanFunction::from_fn(d, |t| self.bit(param.lift_point(t)))?;
        Ok((g, param))
    }

    /// Fast path for a single parity constraint `<q, x> = b`: equivalent to
    /// restricting by `Coset::full(n).constrained(q, b)`. The pivot is the
    /// lowest set bit of `q`.
    pub fn restrict_by_parity(&self, q: ParityMask, b: bool) -> BooleanFunction {
        assert!(!q.is_zero() && q.fits(self.n), "bad restriction mask");
        assert!(self.n >= 2, "cannot drop below one variable");
        let p = q.0.trailing_zeros();
        let low = (1u32 << p) - 1;
        let rest = q.0 & !(1u32 << p);
        let d = self.n - 1;
        let mut table = vec![0u64; words_for(d)];
        for t in 0..(1u64 << d) as u32 {
            let mut x = (t & low) | ((t & !low) << 1);
            let pv = b ^ (((rest & x).count_ones() & 1) == 1);
            if pv {
                x |= 1 << p;
            }
            if self.bit(x) {
                table[(t >> 6) as usize] |= 1 << (t & 63);
            }
        }
        BooleanFunction { n: d, table }
    }

    /// Truth-table text format, versioned `PDTTT 1`. Hex character `j`
    /// encodes table bits `4j..4j+3`, bit `4j` in the low bit of the nibble.
    pub fn to_pdttt(&self) -> String {
        let chars = (1usize << self.n).div_ceil(4);
        let mut hex = String::with_capacity(chars);
        for j in 0..chars {
            let nib = (self.table[j / 16] >> ((j % 16) * 4)) & 0xf;
            hex.push(char::from_digit(nib as u32, 16).unwrap());
        }
        format!("PDTTT 1\nn={}\n{}\n", self.n, hex)
    }

    pub fn from_pdttt(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header.trim() != "PDTTT 1" {
            return Err(Error::Parse { line: 1, msg: "expected `PDTTT 1` header".into() });
        }
        let nline = lines.next().unwrap_or("");
        let n: usize = nline
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse { line: 2, msg: "expected `n=<int>`".into() })?;
        if !(1..=N_MAX).contains(&n) {
            return Err(Error::VarCount { n, max: N_MAX });
        }
        let hex = lines.next().unwrap_or("").trim();
        let want = (1usize << n).div_ceil(4);
        if hex.len() != want {
            return Err(Error::Parse {
                line: 3,
                msg: format!("expected {} hex characters, got {}", want, hex.len()),
            });
        }
        let mut table = vec![0u64; words_for(n)];
        for (j, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse { line: 3, msg: format!("bad hex char `{ch}`") })?
                as u64;
            table[j / 16] |= nib << ((j % 16) * 4);
        }
        let bits = 1usize << n;
        if !bits.is_multiple_of(64) && table[bits / 64] >> (bits % 64) != 0 {
            return Err(Error::Parse { line: 3, msg: "nonzero tail bits".into() });
        }
        if let Some(extra) = lines.next() {
            if !extra.trim().is_empty() {
                return Err(Error::Parse { line: 4, msg: "trailing content".into() });
            }
        }
        Ok(BooleanFunction { n, table })
    }
}

/// Assignment tuple -> table index.
pub fn index_of_assignment(bits: &[bool]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i))
}

/// Table index -> assignment tuple.
pub fn assignment_of_index(x: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> i & 1 == 1).collect()
}

/// Recursive majority of three on `3^k` variables, evaluated pointwise.
/// Returns the output bit (`true` = -1). Works for `3^k <= 32`, beyond the
/// truth-table ceiling.
pub fn rmaj_eval(k: u32, x: u32) -> bool {
    if k == 0 {
        return x & 1 == 1;
    }
    let m = 3usize.pow(k - 1);
    let lo = if m >= 32 { u32::MAX } else { (1u32 << m) - 1 };
    let a = rmaj_eval(k - 1, x & lo) as u32;
    let b = rmaj_eval(k - 1, (x >> m) & lo) as u32;
    let c = rmaj_eval(k - 1, (x >> (2 * m)) & lo) as u32;
    a + b + c >= 2
}

/// Named function families. The tag strings (`maj:7`, `thr:10,3`, ...) are
/// the canonical identifiers accepted by the command line tools.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Maj { n: usize },
    Thr { n: usize, k: i64 },
    Rmaj { k: u32 },
    And { n: usize },
    Or { n: usize },
    Parity { n: usize },
    InnerProduct { n: usize },
    Const { n: usize, value: i32 },
    Random { n: usize, seed: u64 },
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        let lower = s.trim().to_ascii_lowercase();
        let (tag, args) = match lower.split_once(':') {
            Some((t, a)) => (t, a),
            None => return Err(Error::UnknownFamily(s.into())),
        };
        let ints: Vec<i64> = args
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::BadParams(format!("non-integer parameter in `{s}`")))?;
        let one = |f: fn(usize) -> Family| -> Result<Family> {
            if ints.len() != 1 || ints[0] < 1 {
                return Err(Error::BadParams(format!("`{tag}` takes one positive parameter")));
            }
            Ok(f(ints[0] as usize))
        };
        match tag {
            "maj" => one(|n| Family::Maj { n }),
            "and" => one(|n| Family::And { n }),
            "or" => one(|n| Family::Or { n }),
            "parity" => one(|n| Family::Parity { n }),
            "ip" => {
                if ints.len() != 1 || ints[0] < 2 || ints[0] % 2 != 0 {
                    return Err(Error::BadParams("`ip` takes one even variable count".into()));
                }
                Ok(Family::InnerProduct { n: ints[0] as usize })
            }
            "rmaj" => {
                if ints.len() != 1 || ints[0] < 0 {
                    return Err(Error::BadParams("`rmaj` takes one nonnegative depth".into()));
                }
                Ok(Family::Rmaj { k: ints[0] as u32 })
            }
            "thr" => {
                if ints.len() != 2 || ints[0] < 1 {
                    return Err(Error::BadParams("`thr` takes n,k".into()));
                }
                Ok(Family::Thr { n: ints[0] as usize, k: ints[1] })
            }
            "const" => {
                if ints.len() != 2 || ints[0] < 1 || (ints[1] != 1 && ints[1] != -1) {
                    return Err(Error::BadParams("`const` takes n,(1|-1)".into()));
                }
                Ok(Family::Const { n: ints[0] as usize, value: ints[1] as i32 })
            }
            "random" => {
                if ints.len() != 2 || ints[0] < 1 || ints[1] < 0 {
                    return Err(Error::BadParams("`random` takes n,seed".into()));
                }
                Ok(Family::Random { n: ints[0] as usize, seed: ints[1] as u64 })
            }
            _ => Err(Error::UnknownFamily(s.into())),
        }
    }

    pub fn id(&self) -> String {
        match *self {
            Family::Maj { n } => format!("maj:{n}"),
            Family::Thr { n, k } => format!("thr:{n},{k}"),
            Family::Rmaj { k } => format!("rmaj:{k}"),
            Family::And { n } => format!("and:{n}"),
            Family::Or { n } => format!("or:{n}"),
            Family::Parity { n } => format!("parity:{n}"),
            Family::InnerProduct { n } => format!("ip:{n}"),
            Family::Const { n, value } => format!("const:{n},{value}"),
            Family::Random { n, seed } => format!("random:{n},{seed}"),
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Family::Maj { n }
            | Family::Thr { n, .. }
            | Family::And { n }
            | Family::Or { n }
            | Family::Parity { n }
            | Family::InnerProduct { n }
            | Family::Const { n, .. }
            | Family::Random { n, .. } => n,
            Family::Rmaj { k } => 3usize.pow(k),
        }
    }

    pub fn build(&self) -> Result<BooleanFunction> {
        match *self {
            Family::Maj { n } => {
                // -1 exactly when the ones reach half, ties included.
                let k = (n as i64 + 1) / 2;
                BooleanFunction::from_fn(n, |x| (x.count_ones() as i64) >= k)
            }
            Family::Thr { n, k } => BooleanFunction::from_fn(n, |x| (x.count_ones() as i64) >= k),
            Family::Rmaj { k } => {
                let n = self.n();
                if n > N_MAX {
                    return Err(Error::VarCount { n, max: N_MAX });
                }
                BooleanFunction::from_fn(n, |x| rmaj_eval(k, x))
            }
            Family::And { n } => {
                let full = ParityMask::all(n).0;
                BooleanFunction::from_fn(n, |x| x == full)
            }
            Family::Or { n } => BooleanFunction::from_fn(n, |x| x != 0),
            Family::Parity { n } => BooleanFunction::from_fn(n, |x| x.count_ones() & 1 == 1),
            Family::InnerProduct { n } => {
                let m = n / 2;
                let lo = (1u32 << m) - 1;
                BooleanFunction::from_fn(n, |x| ((x & lo) & (x >> m)).count_ones() & 1 == 1)
            }
            Family::Const { n, value } => BooleanFunction::from_fn(n, |_| value == -1),
            Family::Random { n, seed } => {
                if n > N_MAX {
                    return Err(Error::VarCount { n, max: N_MAX });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut table = vec![0u64; words_for(n)];
                for w in table.iter_mut() {
                    *w = rng.next_u64();
                }
                let bits = 1usize << n;
                if !bits.is_multiple_of(64) {
                    table[bits / 64] &= (1u64 << (bits % 64)) - 1;
                }
                BooleanFunction::from_table_words(n, table)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(tag: &str) -> BooleanFunction {
        Family::parse(tag).unwrap().build().unwrap()
    }

    #[test]
    fn named_builder_examples() {
        // MAJ(3) at (1,1,0): two of three ones.
        assert_eq!(f("maj:3").eval(0b011), -1);
        // THR(5,2) at a single one: below threshold.
        assert_eq!(f("thr:5,2").eval(0b00001), 1);
        assert_eq!(f("rmaj:2").n(), 9);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(f("parity:2").eval(0b11), 1);
        assert_eq!(f("and:2").eval(0b11), -1);
        assert_eq!(f("maj:5").eval(0b00111), -1);
    }

    #[test]
    fn majority_matches_popcount_rule() {
        for n in 1..=12 {
            let g = f(&format!("maj:{n}"));
            for x in 0..(1u32 << n) {
                let expect = 2 * x.count_ones() as usize >= n;
                assert_eq!(g.bit(x), expect, "n={n} x={x:b}");
            }
        }
    }

    #[test]
    fn threshold_out_of_range_is_constant() {
        assert_eq!(f("thr:4,0").is_constant(), Some(-1));
        assert_eq!(f("thr:4,-3").is_constant(), Some(-1));
        assert_eq!(f("thr:4,5").is_constant(), Some(1));
        assert_eq!(f("thr:4,9").is_constant(), Some(1));
    }

    #[test]
    fn rmaj_is_majority_composition() {
        let g = f("rmaj:2");
        let m3 = f("maj:3");
        for x in 0..(1u32 << 9) {
            let a = m3.bit(x & 7);
            let b = m3.bit(x >> 3 & 7);
            let c = m3.bit(x >> 6 & 7);
            let top = (a as u32 + b as u32 + c as u32) >= 2;
            assert_eq!(g.bit(x), top);
        }
    }

    #[test]
    fn rmaj_too_large_errors() {
        assert!(Family::parse("rmaj:3").unwrap().build().is_err());
    }

    #[test]
    fn unknown_family_rejected() {
        assert!(Family::parse("nope:3").is_err());
        assert!(Family::parse("maj").is_err());
        assert!(Family::parse("ip:5").is_err());
    }

    #[test]
    fn index_roundtrip() {
        for n in 1..=10usize {
            for x in 0..(1u32 << n) {
                let bits = assignment_of_index(x, n);
                assert_eq!(index_of_assignment(&bits), x);
            }
        }
    }

    #[test]
    fn pdttt_roundtrip_and_length_check() {
        for tag in ["maj:3", "and:2", "random:7,42", "parity:1"] {
            let g = f(tag);
            let text = g.to_pdttt();
            let back = BooleanFunction::from_pdttt(&text).unwrap();
            assert_eq!(g, back, "{tag}");
        }
        // AND(2) table: only x=11 true -> one hex char `8`.
        assert_eq!(f("and:2").to_pdttt(), "PDTTT 1\nn=2\n8\n");
        assert!(BooleanFunction::from_pdttt("PDTTT 1\nn=2\n88\n").is_err());
        assert!(BooleanFunction::from_pdttt("PDTTT 1\nn=3\n8\n").is_err());
        assert!(BooleanFunction::from_pdttt("PDTTT 2\nn=2\n8\n").is_err());
        // n=1 uses bits 0..1 of the nibble only.
        assert!(BooleanFunction::from_pdttt("PDTTT 1\nn=1\n4\n").is_err());
    }

    #[test]
    fn restrict_examples() {
        // Restrict MAJ(3) by x1 ^ x2 = 0: the subfunction is the value of x1.
        let g = f("maj:3");
        let c = Coset::full(3).constrained(ParityMask::pair(0, 1), false);
        let (sub, param) = g.restrict(&c).unwrap();
        assert_eq!(sub.n(), 2);
        for t in 0..4u32 {
            let x = param.lift_point(t);
            assert_eq!(sub.bit(t), g.bit(x));
            assert_eq!(sub.bit(t), x & 1 == 1, "equals lifted x1");
        }

        // Rank-0 restriction is the function itself.
        let (same, _) = g.restrict(&Coset::full(3)).unwrap();
        assert_eq!(same, g);

        // AND(2) restricted by x1 = 1 is the one-variable identity.
        let a = f("and:2");
        let c = Coset::full(2).constrained(ParityMask::singleton(0), true);
        let (sub, _) = a.restrict(&c).unwrap();
        assert_eq!(sub.n(), 1);
        assert!(!sub.bit(0));
        assert!(sub.bit(1));
    }

    #[test]
    fn restrict_by_parity_matches_coset_restrict() {
        let g = f("random:6,7");
        for q in 1u32..(1 << 6) {
            for b in [false, true] {
                let fast = g.restrict_by_parity(ParityMask(q), b);
                let c = Coset::full(6).constrained(ParityMask(q), b);
                let (slow, _) = g.restrict(&c).unwrap();
                assert_eq!(fast, slow, "q={q:b} b={b}");
            }
        }
    }

    #[test]
    fn random_is_seed_deterministic() {
        assert_eq!(f("random:8,1"), f("random:8,1"));
        assert_ne!(f("random:8,1"), f("random:8,2"));
    }
}
