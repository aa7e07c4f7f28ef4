//! Exact spectral and query-complexity measures of Boolean functions:
//! integer Walsh-Hadamard spectra, granularity, GF(2) degree, parity
//! certificate complexity, exact parity-decision-tree depth, constructive
//! query strategies for majority and threshold families, and the simulation
//! of XOR-AND circuits by parity queries.

pub mod circuits;
pub mod dyadic;
pub mod error;
pub mod function;
pub mod gf2;
mod machine;
pub mod pdt;
pub mod solver;
pub mod spectral;
pub mod strategies;

pub use error::Error;
pub use function::{BooleanFunction, Family, N_MAX};
pub use gf2::{Coset, CosetParam, InsertOutcome, ParityMask};
pub use pdt::{ParityDecisionTree, QueryOracle, Strategy, StrategyAction};
pub use spectral::{AnfPolynomial, Spectrum};

pub type Result<T> = std::result::Result<T, Error>;
