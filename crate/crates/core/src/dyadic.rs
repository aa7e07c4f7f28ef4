//! Popcount and 2-adic valuation helpers.

/// Number of ones in the binary representation of `m`.
pub fn ones_in_binary(m: u64) -> u32 {
    m.count_ones()
}

/// 2-adic valuation of an integer. The valuation of 0 is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// Exponent of the largest power of 2 dividing `l`; infinite for `l == 0`.
pub fn nu2(l: i64) -> Valuation {
    if l == 0 {
        Valuation::Infinite
    } else {
        Valuation::Finite(l.trailing_zeros())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn popcount_examples() {
        assert_eq!(ones_in_binary(10), 2);
        assert_eq!(ones_in_binary(8), 1);
        assert_eq!(ones_in_binary(7), 3);
        assert_eq!(ones_in_binary(0), 0);
    }

    #[test]
    fn nu2_examples() {
        assert_eq!(nu2(12), Valuation::Finite(2));
        assert_eq!(nu2(0), Valuation::Infinite);
        assert_eq!(nu2(-7), Valuation::Finite(0));
        assert_eq!(nu2(1), Valuation::Finite(0));
        assert_eq!(nu2(-64), Valuation::Finite(6));
        assert_eq!(nu2(i64::MIN), Valuation::Finite(63));
    }

    #[test]
    fn valuation_order() {
        assert!(Valuation::Finite(5) < Valuation::Infinite);
        assert!(Valuation::Finite(2) < Valuation::Finite(3));
    }
}
