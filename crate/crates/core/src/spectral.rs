//! Exact integer Fourier analysis: Walsh-Hadamard transform, sparsity and
//! support, granularity, and the algebraic normal form over GF(2).
//!
//! Coefficients are stored scaled by `2^n` so every quantity is an exact
//! signed integer; granularity is a 2-adic measurement and must not go
//! through floating point.

use crate::dyadic::{nu2, Valuation};
use crate::error::Error;
use crate::function::BooleanFunction;
use crate::Result;

/// Integer spectrum: `coeffs[s] = sum_x f(x) * (-1)^{popcount(s & x)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<i64>,
}

/// Walsh-Hadamard transform, `O(n 2^n)` exact integer butterflies.
pub fn wht(f: &BooleanFunction) -> Spectrum {
    let n = f.n();
    let size = 1usize << n;
    let mut a: Vec<i64> = (0..size).map(|x| f.eval(x as u32) as i64).collect();
    let mut h = 1;
    while h < size {
        let mut i = 0;
        while i < size {
            for j in i..i + h {
                let x = a[j];
                let y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
            i += h * 2;
        }
        h *= 2;
    }
    Spectrum { n, coeffs: a }
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: u32) -> i64 {
        self.coeffs[mask as usize]
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Number of nonzero coefficients.
    pub fn sparsity(&self) -> u64 {
        self.coeffs.iter().filter(|&&c| c != 0).count() as u64
    }

    /// Masks of the nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<u32> {
        (0..self.coeffs.len() as u32)
            .filter(|&s| self.coeffs[s as usize] != 0)
            .collect()
    }

    /// Smallest `k` such that every coefficient of the normalized spectrum is
    /// an integer multiple of `1/2^k`: the maximum over nonzero entries of
    /// `n - nu2(coeff)`, clamped at zero.
    pub fn granularity(&self) -> usize {
        let n = self.n as u32;
        let mut g = 0u32;
        for &c in &self.coeffs {
            if let Valuation::Finite(v) = nu2(c) {
                g = g.max(n.saturating_sub(v));
            }
        }
        g as usize
    }

    /// Inverse transform; errors unless the spectrum is the transform of a
    /// genuine plus-minus-one function.
    pub fn inverse(&self) -> Result<BooleanFunction> {
        let size = 1usize << self.n;
        let mut a = self.coeffs.clone();
        let mut h = 1;
        while h < size {
            let mut i = 0;
            while i < size {
                for j in i..i + h {
                    let x = a[j];
                    let y = a[j + h];
                    a[j] = x + y;
                    a[j + h] = x - y;
                }
                i += h * 2;
            }
            h *= 2;
        }
        let scale = size as i64;
        if a.iter().any(|&v| v != scale && v != -scale) {
            return Err(Error::Parse {
                line: 0,
                msg: "spectrum does not invert to a sign function".into(),
            });
        }
        BooleanFunction::from_fn(self.n, |x| a[x as usize] < 0)
    }

    /// Text export: `mask_hex<TAB>value` for nonzero entries, mask ascending.
    pub fn export_nonzero(&self) -> String {
        let mut out = String::new();
        for (s, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                out.push_str(&format!("{s:x}\t{c}\n"));
            }
        }
        out
    }
}

/// Algebraic normal form: bit `s` of the packed vector is the coefficient of
/// the monomial with variable set `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnfPolynomial {
    n: usize,
    words: Vec<u64>,
}

const HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Fast subset Moebius transform of the 0/1 truth table over GF(2).
pub fn anf(f: &BooleanFunction) -> AnfPolynomial {
    let n = f.n();
    let mut words = f.table_words().to_vec();
    for (i, &low) in HALF.iter().enumerate().take(n) {
        let shift = 1u32 << i;
        for w in words.iter_mut() {
            *w ^= (*w & low) << shift;
        }
    }
    for i in 6..n {
        let dist = 1usize << (i - 6);
        let mut j = 0;
        while j < words.len() {
            for k in j..j + dist {
                words[k + dist] ^= words[k];
            }
            j += dist * 2;
        }
    }
    AnfPolynomial { n, words }
}

impl AnfPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of the monomial with variable set `mask`.
    pub fn coeff(&self, mask: u32) -> bool {
        self.words[(mask >> 6) as usize] >> (mask & 63) & 1 == 1
    }

    /// Masks of present monomials, ascending.
    pub fn monomials(&self) -> Vec<u32> {
        (0..(1u64 << self.n) as u32).filter(|&s| self.coeff(s)).collect()
    }

    /// Degree over GF(2); zero for constants.
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for s in 0..(1u64 << self.n) as u32 {
            if self.coeff(s) {
                d = d.max(s.count_ones() as usize);
            }
        }
        d
    }

    /// Evaluate the polynomial at an assignment (GF(2) sum over monomials
    /// contained in the support of `x`).
    pub fn eval(&self, x: u32) -> bool {
        let mut acc = false;
        for s in self.monomials() {
            if s & !x == 0 {
                acc ^= true;
            }
        }
        acc
    }
}

impl std::fmt::Display for AnfPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let monos = self.monomials();
        if monos.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = monos
            .iter()
            .map(|&s| {
                if s == 0 {
                    "1".to_string()
                } else {
                    crate::gf2::ParityMask(s)
                        .vars()
                        .map(|i| format!("x{}", i + 1))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Degree of the unique multilinear GF(2) polynomial computing `f`.
pub fn deg2(f: &BooleanFunction) -> usize {
    anf(f).degree()
}
