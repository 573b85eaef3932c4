//! Exact-arithmetic toolkit for Picard-lattice effectivity certificates and
//! the divisor-class bookkeeping attached to them: Brill-Noether style
//! dimension counts, secant-variety expected dimensions, and the pencil
//! intersection tables that pin down difference-divisor classes.
//!
//! Everything is computed over arbitrary-precision rationals; no floats
//! anywhere. Results that matter are packaged as replayable certificates a
//! skeptical checker can verify from the pairing alone.

pub mod brill_noether;
pub mod divisor;
pub mod effectivity;
pub mod exec;
pub mod lattice;
pub mod rational;
pub mod report;
