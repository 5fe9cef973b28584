//! Verified degeneration calculus for the postulation of general lines in
//! projective 3-space.
//!
//! The crate is organized in three layers:
//!
//! * descriptors and condition counting ([`model`]), with the two
//!   specialization calculi that rewrite an emptiness claim into smaller
//!   ones — in 3-space ([`calculus3`]) and inside a plane ([`calculus2`]);
//! * an exact finite-field rank oracle ([`oracle`]) that certifies a claim
//!   directly by building the condition matrix of a random realization over
//!   a large prime field and showing it has full column rank;
//! * a searcher and replayable certificate format ([`search`]) tying the
//!   two together: every leaf of a reduction tree is either discharged by
//!   the oracle or trivially empty, and the whole tree serializes to JSON
//!   that an independent pass re-checks step by step.

// Closed-form counts are kept exactly as displayed (`(k*k + 4*k + 9) / 2`,
// `len >= d + 1`, parity via `% 2`), and the row builders walk parallel
// arrays by index; clippy's rewrites would only obscure them.
#![allow(
    clippy::manual_div_ceil,
    clippy::manual_is_multiple_of,
    clippy::int_plus_one,
    clippy::needless_range_loop
)]

pub mod calculus2;
pub mod calculus3;
pub mod model;
pub mod numstr;
pub mod oracle;
pub mod search;
