//! Parity masks, affine cosets of the Boolean cube in reduced row echelon
//! form, and the standard parametrization of their solution sets.
//!
//! A coset is stored as a consistent linear system over GF(2): one row per
//! constraint `<mask, x> = rhs`. Rows are kept in reduced row echelon form
//! with the pivot of each row at its lowest set bit, pivots strictly
//! increasing down the rows, and no pivot column occurring in any other row.

use crate::error::Error;

/// A subset of variables encoded as a bit mask; bit `i` stands for `x_{i+1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityMask(pub u32);

impl ParityMask {
    pub fn singleton(var: usize) -> Self {
        ParityMask(1 << var)
    }

    pub fn pair(a: usize, b: usize) -> Self {
        ParityMask(1 << a | 1 << b)
    }

    pub fn all(n: usize) -> Self {
        debug_assert!((1..=32).contains(&n));
        ParityMask(if n == 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn fits(self, n: usize) -> bool {
        n >= 32 || self.0 < (1u32 << n)
    }

    /// Parity `<mask, point>` over GF(2).
    pub fn parity_of(self, point: u32) -> bool {
        (self.0 & point).count_ones() & 1 == 1
    }

    /// Variable indices (0-based) in the mask, ascending.
    pub fn vars(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        u32::from_str_radix(s, 16).ok().map(ParityMask)
    }
}

impl std::fmt::Display for ParityMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Row {
    mask: u32,
    rhs: bool,
}

impl Row {
    fn pivot(self) -> u32 {
        self.mask & self.mask.wrapping_neg()
    }
}

/// Affine subspace of `{0,1}^n`, possibly empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    n: usize,
    rows: Vec<Row>,
    empty: bool,
}

/// Result of inserting a constraint into a coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The constraint was independent; the extended coset has rank + 1.
    Extended(Coset),
    /// The query is in the row span; its value is forced to the carried bit.
    Dependent(bool),
}

impl Coset {
    /// The full cube: no constraints.
    pub fn full(n: usize) -> Self {
        assert!((1..=32).contains(&n), "coset variable count out of range");
        Coset { n, rows: Vec::new(), empty: false }
    }

    pub fn empty_set(n: usize) -> Self {
        Coset { n, rows: Vec::new(), empty: true }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Number of independent constraints.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Dimension of the solution set (`n - rank` when non-empty).
    pub fn dim(&self) -> usize {
        self.n - self.rows.len()
    }

    /// Row-reduce the constraint `<q, x> = b`. Returns the residual mask and
    /// right-hand side of an equivalent constraint modulo the rows.
    pub fn reduce(&self, q: ParityMask, b: bool) -> (ParityMask, bool) {
        let mut m = q.0;
        let mut r = b;
        for row in &self.rows {
            if m & row.pivot() != 0 {
                m ^= row.mask;
                r ^= row.rhs;
            }
        }
        (ParityMask(m), r)
    }

    /// Insert the constraint `<q, x> = b`, preserving reduced row echelon
    /// form. A dependent query is reported with its forced value instead of
    /// an error so that callers can distinguish consistent from
    /// contradictory repeats.
    pub fn insert(&self, q: ParityMask, b: bool) -> InsertOutcome {
        debug_assert!(!self.empty, "insert into empty coset");
        debug_assert!(q.fits(self.n));
        let (res, r) = self.reduce(q, b);
        if res.is_zero() {
            // q = XOR of some rows; forced value is b ^ r flips applied.
            return InsertOutcome::Dependent(b ^ r);
        }
        let new = Row { mask: res.0, rhs: r };
        let pivot = new.pivot();
        let mut rows = self.rows.clone();
        for row in rows.iter_mut() {
            if row.mask & pivot != 0 {
                row.mask ^= new.mask;
                row.rhs ^= new.rhs;
            }
        }
        let pos = rows
            .iter()
            .position(|row| row.pivot() > pivot)
            .unwrap_or(rows.len());
        rows.insert(pos, new);
        InsertOutcome::Extended(Coset { n: self.n, rows, empty: false })
    }

    /// Insert, mapping a contradictory dependent constraint to the empty
    /// coset and a consistent one to an unchanged copy.
    pub fn constrained(&self, q: ParityMask, b: bool) -> Coset {
        if self.empty {
            return self.clone();
        }
        match self.insert(q, b) {
            InsertOutcome::Extended(c) => c,
            InsertOutcome::Dependent(forced) if forced == b => self.clone(),
            InsertOutcome::Dependent(_) => Coset::empty_set(self.n),
        }
    }

    pub fn contains(&self, x: u32) -> bool {
        !self.empty
            && self
                .rows
                .iter()
                .all(|row| ParityMask(row.mask).parity_of(x) == row.rhs)
    }

    /// Standard parametrization: free (non-pivot) coordinates are the
    /// parameters, pivot coordinates are solved from the rows.
    pub fn param(&self) -> CosetParam {
        assert!(!self.empty, "parametrization of empty coset");
        let mut pivot_mask = 0u32;
        for row in &self.rows {
            pivot_mask |= row.pivot();
        }
        let free: Vec<u32> = (0..self.n as u32)
            .filter(|&c| pivot_mask & (1 << c) == 0)
            .collect();
        CosetParam {
            n: self.n,
            free,
            rows: self
                .rows
                .iter()
                .map(|row| (row.mask, row.pivot(), row.rhs))
                .collect(),
        }
    }

    /// All points of the coset, in parameter order.
    pub fn points(&self) -> impl Iterator<Item = u32> {
        let (param, count) = if self.empty {
            (None, 0u64)
        } else {
            let p = self.param();
            let c = 1u64 << p.dim();
            (Some(p), c)
        };
        (0..count).map(move |t| param.as_ref().unwrap().lift_point(t as u32))
    }
}

/// Affine parametrization of a coset: maps assignments of the `dim` free
/// parameters to points of the coset, and transports parities both ways.
#[derive(Clone, Debug)]
pub struct CosetParam {
    n: usize,
    free: Vec<u32>,
    rows: Vec<(u32, u32, bool)>, // (mask, pivot bit, rhs)
}

impl CosetParam {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Point of the original space for a parameter assignment `t`.
    pub fn lift_point(&self, t: u32) -> u32 {
        let mut x = 0u32;
        for (j, &col) in self.free.iter().enumerate() {
            if t >> j & 1 == 1 {
                x |= 1 << col;
            }
        }
        for &(mask, pivot, rhs) in &self.rows {
            let v = rhs ^ (((mask & !pivot) & x).count_ones() & 1 == 1);
            if v {
                x |= pivot;
            }
        }
        x
    }

    /// Parity over the parameters as a parity over the original variables.
    pub fn lift_mask(&self, m: ParityMask) -> ParityMask {
        let mut x = 0u32;
        for (j, &col) in self.free.iter().enumerate() {
            if m.0 >> j & 1 == 1 {
                x |= 1 << col;
            }
        }
        ParityMask(x)
    }

    /// Restriction of an original-space parity to the coset: a parity over
    /// the parameters plus a constant.
    pub fn project_mask(&self, s: ParityMask) -> (ParityMask, bool) {
        let mut xm = s.0;
        let mut c = false;
        // Substitute pivot variables; row masks contain no other pivots.
        for &(mask, pivot, rhs) in &self.rows {
            if xm & pivot != 0 {
                xm ^= mask;
                c ^= rhs;
            }
        }
        let mut tm = 0u32;
        for (j, &col) in self.free.iter().enumerate() {
            if xm >> col & 1 == 1 {
                tm |= 1 << j;
                xm &= !(1 << col);
            }
        }
        debug_assert_eq!(xm, 0, "projected mask has bits outside free columns");
        (ParityMask(tm), c)
    }
}

/// Validation helper: checks the reduced row echelon invariants.
pub fn check_rref(c: &Coset) -> Result<(), Error> {
    let mut last_pivot = 0u32;
    let mut pivot_union = 0u32;
    for (i, row) in c.rows.iter().enumerate() {
        if row.mask == 0 {
            return Err(Error::Parse { line: i, msg: "zero row".into() });
        }
        let p = row.pivot();
        if i > 0 && p <= last_pivot {
            return Err(Error::Parse { line: i, msg: "pivots not increasing".into() });
        }
        last_pivot = p;
        pivot_union |= p;
    }
    for (i, row) in c.rows.iter().enumerate() {
        // A row may touch no pivot column except its own.
        if row.mask & pivot_union != row.pivot() {
            return Err(Error::Parse { line: i, msg: "row touches foreign pivot".into() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dependent_combination_is_detected() {
        let c = Coset::full(3);
        let c = match c.insert(ParityMask::pair(0, 1), false) {
            InsertOutcome::Extended(c) => c,
            _ => panic!("independent"),
        };
        let c = match c.insert(ParityMask::pair(1, 2), false) {
            InsertOutcome::Extended(c) => c,
            _ => panic!("independent"),
        };
        // x1^x3 is the sum of the two rows, forced to 0.
        match c.insert(ParityMask::pair(0, 2), true) {
            InsertOutcome::Dependent(forced) => assert!(!forced),
            _ => panic!("expected dependent"),
        }
    }

    #[test]
    fn duplicate_constraint_is_dependent_with_matching_bit() {
        let c = Coset::full(4);
        let q = ParityMask(0b1011);
        let c = match c.insert(q, true) {
            InsertOutcome::Extended(c) => c,
            _ => panic!(),
        };
        match c.insert(q, true) {
            InsertOutcome::Dependent(forced) => assert!(forced),
            _ => panic!("expected dependent"),
        }
    }

    #[test]
    fn three_independent_rows_pin_one_point() {
        let mut c = Coset::full(3);
        for (q, b) in [
            (ParityMask(0b011), true),
            (ParityMask(0b110), false),
            (ParityMask(0b001), true),
        ] {
            c = match c.insert(q, b) {
                InsertOutcome::Extended(c) => c,
                InsertOutcome::Dependent(_) => panic!("dependent"),
            };
        }
        assert_eq!(c.dim(), 0);
        let pts: Vec<u32> = c.points().collect();
        assert_eq!(pts.len(), 1);
        assert!(c.contains(pts[0]));
        check_rref(&c).unwrap();
    }

    #[test]
    fn points_satisfy_constraints() {
        let c = Coset::full(5)
            .constrained(ParityMask(0b10101), true)
            .constrained(ParityMask(0b00110), false);
        assert_eq!(c.dim(), 3);
        let pts: Vec<u32> = c.points().collect();
        assert_eq!(pts.len(), 8);
        for p in pts {
            assert!(ParityMask(0b10101).parity_of(p));
            assert!(!ParityMask(0b00110).parity_of(p));
        }
        check_rref(&c).unwrap();
    }

    #[test]
    fn contradiction_yields_empty() {
        let c = Coset::full(2).constrained(ParityMask(0b11), true);
        let c2 = c.constrained(ParityMask(0b11), false);
        assert!(c2.is_empty());
        assert!(!c.is_empty());
    }

    #[test]
    fn project_then_lift_mask_roundtrip() {
        let c = Coset::full(6)
            .constrained(ParityMask(0b000111), true)
            .constrained(ParityMask(0b101000), false);
        let param = c.param();
        // A parity supported on free columns projects without constant and
        // lifts back to itself.
        let free_parity = param.lift_mask(ParityMask(0b0101));
        let (tm, cst) = param.project_mask(free_parity);
        assert_eq!(tm, ParityMask(0b0101));
        assert!(!cst);
    }

    #[test]
    fn projected_parity_agrees_pointwise() {
        let c = Coset::full(5)
            .constrained(ParityMask(0b11010), true)
            .constrained(ParityMask(0b00101), true);
        let param = c.param();
        for s in 1u32..32 {
            let (tm, cst) = param.project_mask(ParityMask(s));
            for t in 0..(1u32 << param.dim()) {
                let x = param.lift_point(t);
                assert_eq!(ParityMask(s).parity_of(x), tm.parity_of(t) ^ cst);
            }
        }
    }
}
