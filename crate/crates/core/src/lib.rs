//! Finite, checkable fragments of the theory of clones on ℕ determined by
//! upper density: density estimates, badness certificates for the ideal of
//! density-preserving functions, the onto construction behind
//! precompleteness, and a small closed monoid of collapse maps.

pub mod certificate;
pub mod density;
pub mod expr;
pub mod func;
pub mod ideal;
pub mod monoid;
pub mod natset;
pub mod pairing;
pub mod precomplete;
mod parse;
pub mod rational;
pub mod setspec;
pub mod shadow;
pub mod term;

pub use expr::Expr;
pub use func::{compose, prefix_equal, shadow, FinFun, FunError, PrefixEquality};
pub use natset::{NatSet, SetError};
pub use parse::ParseError;
pub use rational::Rat;
pub use shadow::{enumerate_shadow_specs, ShadowSpec};
pub use term::Term;
