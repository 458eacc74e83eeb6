//! Exact synthesis and T-count-optimal approximation of single-qubit
//! Z-rotations over the Clifford+T gate set.
//!
//! The library is organised in four layers:
//!
//! * [`ring`]: exact arithmetic in Z[ω] (ω = e^{iπ/4}) and its real
//!   subring Z[√2], including the smallest-denominator-exponent function.
//! * [`cliffordt`]: exact unitaries over Z[ω], circuit evaluation,
//!   T-count computation, exact synthesis, and a brute-force enumeration
//!   oracle used to cross-check the search pipeline.
//! * [`normeq`]: solver for the relative norm equation |y|² = r in Z[ω]
//!   with r in Z[√2], including integer factorization support.
//! * [`search`]: the rotation-approximation search, from candidate
//!   generation out of interval constraints through the driver that
//!   produces optimal-circuit tables for a given angle.
//!
//! [`hifloat`] supplies the fixed-precision floating arithmetic the other
//! layers use for distance comparisons.

pub mod cliffordt;
pub mod hifloat;
pub mod normeq;
pub mod ring;
pub mod search;
