//! Exact symbolic computation for the non-finitely graded Virasoro-type Lie
//! algebras `W(eps)` (`eps = +1` or `-1`) and their rank-one free module
//! families `Omega(lambda, alpha, beta)`.
//!
//! Everything is computed over the rationals with arbitrary precision, so
//! every identity check is an exact zero test:
//!
//! * [`rat`], [`coef`], [`tpoly`] -- scalars, the coefficient ring
//!   `Q[l, l^-1, a, b]`, and polynomials in `t` over it, plus the canonical
//!   text grammar ([`parse`]);
//! * [`lie`] -- basis symbols `L[i,m]`, the bracket, and generator
//!   decompositions;
//! * [`omega`] -- the module actions, their expansion identities, the shift
//!   isomorphism, and parameter extraction;
//! * [`verify`] -- grid suites (bracket compatibility, submodule and
//!   quotient structure, sequences, combinatorial identities) and the
//!   simplicity probe;
//! * [`classify`] -- the exact linear systems that pin down the possible
//!   actions on `1`, with provenance and genericity tracking.

pub mod classify;
pub mod coef;
pub mod error;
pub mod lie;
pub mod omega;
pub mod parse;
pub mod rat;
pub mod report;
pub mod sample;
pub mod tpoly;
pub mod verify;

pub use coef::CoefPoly;
pub use error::Error;
pub use lie::{Epsilon, LieElt};
pub use rat::Rat;
pub use report::{VerificationReport, Window};
pub use tpoly::TPoly;
