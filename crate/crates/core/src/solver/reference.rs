//! Plain minimax reference for cross-checking the pruned search. No
//! memoization, no bounds, no ordering: depth of a constant is 0, otherwise
//! one plus the best worst-child over every nonzero parity of the remaining
//! parameters.

use crate::function::BooleanFunction;
use crate::gf2::ParityMask;

pub fn reference_depth(g: &BooleanFunction) -> usize {
    if g.is_constant().is_some() {
        return 0;
    }
    if g.n() == 1 {
        return 1;
    }
    let d = g.n();
    (1u32..(1u32 << d))
        .map(|q| {
            let d0 = reference_depth(&g.restrict_by_parity(ParityMask(q), false));
            let d1 = reference_depth(&g.restrict_by_parity(ParityMask(q), true));
            1 + d0.max(d1)
        })
        .min()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Family;

    #[test]
    fn reference_small_values() {
        let f = |tag: &str| Family::parse(tag).unwrap().build().unwrap();
        assert_eq!(reference_depth(&f("maj:3")), 2);
        assert_eq!(reference_depth(&f("and:3")), 3);
        assert_eq!(reference_depth(&f("parity:3")), 1);
        assert_eq!(reference_depth(&f("const:3,1")), 0);
    }
}
