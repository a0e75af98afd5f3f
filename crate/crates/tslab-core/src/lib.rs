//! Finite combinatorics of Schreier families and Tsirelson-type spaces, made
//! computable: membership and enumeration for `S_xi`, exact norm evaluation
//! for `l_p`, `c_0`, the renormed `X_m`, `T[theta, S_xi]` and its dual, and a
//! certifier for finite-window upper-`l_p` estimates over Schreier-supported
//! coefficients.
//!
//! Arithmetic is exact rational wherever the computation path allows (q = 1
//! Tsirelson norms, their LP duals, subset sums, `l_1`/`l_inf`), and
//! double precision with explicit tolerances elsewhere.
//!
//! Concurrency: all values are immutable after construction and operations
//! are pure; the membership and recursion caches are write-once maps safe
//! under concurrent reads and racing identical writes, so results never
//! depend on interleaving.

pub mod caps;
pub mod error;
pub mod estimates;
pub mod ordinal;
pub mod rational;
pub mod schreier;
mod search;
pub mod simplex;
pub mod spaces;
pub mod tsirelson;
pub mod value;
pub mod vector;

pub use caps::Caps;
pub use error::{Error, Result};
pub use ordinal::{Ordinal, OrdinalClass};
pub use rational::{Exponent, Rat};
pub use schreier::FinSet;
pub use value::NormValue;
pub use vector::{AnyVec, FinVec, SumVec};
