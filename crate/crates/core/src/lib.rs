//! Averaged binomial congruences over roots of unity.
//!
//! A modulus `d` satisfies `C_t` when
//! `(1/t) Σ_{s<t} binom(n + d ζ_t^s, c) ≡ binom(n, c) (mod d)` for all
//! integers `n` and all `c >= 0`. This crate decides `C_t` for concrete
//! `(t, d)`, using closed-form criteria where they apply and an exact modular
//! computation otherwise.

pub mod arith;
pub mod classifier;
pub mod congruence;
pub mod criteria;
pub mod cyclotomic;
pub mod symfun;

pub use arith::{Rational, Valuation};
pub use classifier::{classify, classify_with, scan, ClassificationResult, ClassifyOptions, Verdict};
pub use congruence::{check_direct, sum_valuation, DirectCheckOutcome, DirectVerdict, DEFAULT_N0};
pub use criteria::{Criterion, CriterionVerdict, Outcome};
