//! Exact arithmetic tools for bounded-arbitrage questions about finite
//! probability models.
//!
//! The crate answers, with rational certificates on both sides, how far a
//! probability vector sits from the convex hull of a set of opinions
//! ([`pooling`]), and how far a stochastic choice function sits from the
//! random utility polytope ([`rum`]). Every linear program is solved over
//! [`exactnum::Rational`], and each answer comes with a primal
//! representation and a dual witness that can be re-checked from its numbers
//! alone. The [`oracle`] module holds brute-force counterparts that share no
//! code with the simplex path.

pub mod blockmarschak;
pub mod cli;
pub mod duality;
pub mod error;
pub mod exactnum;
pub mod measures;
pub mod oracle;
pub mod pooling;
pub mod rum;

pub use error::{Error, Result};
