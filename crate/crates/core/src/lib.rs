//! Exact verification tools for the weakly monotone C*-algebra on `n`
//! generators.
//!
//! * [`fock`]: truncated Fock basis and 0/1 generator matrices
//! * [`word`] and [`rewrite`]: words in the generators and their normal forms
//! * [`order`]: the projection order and products of diagonal projections
//! * [`masa`]: conditional expectation onto the diagonal and rank-one projections
//! * [`spectrum`]: cube embedding of the Gelfand spectrum, CSV/SVG output
//! * [`gauge`]: root-of-unity bundle representation and gauge unitaries
//! * [`verify`]: suites that cross-check everything against matrices

pub mod error;
pub mod fock;
pub mod gauge;
pub mod masa;
pub mod multi_index;
pub mod order;
pub mod rational;
pub mod rewrite;
pub mod spectrum;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use fock::{FockBasis, FockModel, FockVector, SparseOp, TruncationParams};
pub use multi_index::MultiIndex;
pub use rational::Scalar;
pub use rewrite::{NormalForm, NormalMonomial};
pub use word::{GeneratorSymbol, Word};
