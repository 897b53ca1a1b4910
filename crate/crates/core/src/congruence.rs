//! The averaged roots-of-unity binomial congruence modulo `d`.
//!
//! For integers `t, d >= 1`, `c >= 0` and `n`, the quantity
//!
//! ```text
//! (1/t) Σ_{s<t} binom(n + d ζ_t^s, c) - binom(n, c)
//!     = (1/c!) Σ_{k=1}^{⌊c/t⌋} d^{kt} e_{c-kt}({n-c+1, ..., n})
//! ```
//!
//! is rational, and `d` satisfies the condition `C_t` iff it is `≡ 0 (mod d)`
//! for every `c < d` at one fixed `n0`. Everything here works with the right
//! hand side; no complex numbers are involved.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{
    factorial, factorize, is_prime, legendre, rational_valuation, vp_bigint, vp_u64, ArithError,
    Rational, ResidueRing, Valuation,
};
use crate::symfun::{elementary_symmetric_exact, ModularPrefix};

/// The base point used by every fixed-`n` check unless told otherwise.
pub const DEFAULT_N0: i64 = -1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CongruenceError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{p} does not divide {d}")]
    PrimeDoesNotDivide { p: u64, d: u64 },
    #[error("c = {c} must be below d = {d}")]
    CTooLarge { c: u64, d: u64 },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

/// Ran out of time before a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("time budget exhausted at c = {at_c}")]
pub struct BudgetExhausted {
    pub at_c: u64,
}

/// One instance `(t, d, c, n)` of the averaged congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CongruenceInstance {
    pub t: u64,
    pub d: u64,
    pub c: u64,
    pub n: i64,
}

impl CongruenceInstance {
    pub fn new(t: u64, d: u64, c: u64, n: i64) -> Self {
        CongruenceInstance { t, d, c, n }
    }
}

/// `ν_p` of the averaged excess against the `ν_p(d)` it must reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationReport {
    pub prime: u64,
    pub required: i64,
    pub found: Valuation,
    pub satisfied: bool,
}

impl ValuationReport {
    pub fn new(prime: u64, required: i64, found: Valuation) -> Self {
        ValuationReport {
            prime,
            required,
            found,
            satisfied: found.at_least(required),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectVerdict {
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectCheckOutcome {
    pub verdict: DirectVerdict,
    pub failing_c: Option<u64>,
    /// One report per prime divisor of `d` at `failing_c`; empty when the check holds.
    pub reports: Vec<ValuationReport>,
    pub n0: i64,
}

impl DirectCheckOutcome {
    /// The first unsatisfied report, if any.
    pub fn witness(&self) -> Option<&ValuationReport> {
        self.reports.iter().find(|r| !r.satisfied)
    }
}

fn excess_numerator_exact(t: u64, d: u64, c: u64, n: i64) -> BigInt {
    let c_i = c as i64;
    let prefix = elementary_symmetric_exact(n - c_i + 1, n);
    let dt = BigInt::from(d).pow(t as u32);
    let mut dpow = dt.clone();
    let mut total = BigInt::zero();
    for k in 1..=c / t {
        let e = prefix.e((c - k * t) as usize).expect("degree within interval");
        total += &dpow * e;
        dpow *= &dt;
    }
    total
}

/// `(1/t) Σ_s binom(n + d ζ_t^s, c) - binom(n, c)` as an exact rational.
pub fn root_average_excess(inst: &CongruenceInstance) -> Rational {
    let numer = excess_numerator_exact(inst.t, inst.d, inst.c, inst.n);
    Rational::new(numer, factorial(inst.c)).expect("c! is nonzero")
}

/// `x ≡ y (mod d)` for rationals: `ν_p(x - y) >= ν_p(d)` for each prime `p | d`.
pub fn congruent_mod(x: &Rational, y: &Rational, d: u64) -> Result<bool, CongruenceError> {
    let diff = x - y;
    let factors = factorize(d)?;
    Ok(factors
        .factors()
        .iter()
        .all(|&(p, r)| rational_valuation(p, &diff).at_least(r as i64)))
}

/// Whether the averaged congruence holds for the single instance `(t, d, c, n)`.
pub fn congruence_holds_at(t: u64, d: u64, c: u64, n: i64) -> Result<bool, CongruenceError> {
    validate(t, d)?;
    if c >= d {
        return Err(CongruenceError::CTooLarge { c, d });
    }
    let excess = root_average_excess(&CongruenceInstance::new(t, d, c, n));
    congruent_mod(&excess, &Rational::zero(), d)
}

fn validate(t: u64, d: u64) -> Result<(), CongruenceError> {
    if t == 0 {
        return Err(CongruenceError::NotPositive("t"));
    }
    if d == 0 {
        return Err(CongruenceError::NotPositive("d"));
    }
    Ok(())
}

/// Incremental scan over `c = 0, 1, 2, ...` of the excess numerator
/// `N_c = Σ_k d^{kt} e_{c-kt}({n0-c+1, ..., n0})` modulo `p^M`.
struct PrimeScan {
    t: u64,
    c: u64,
    required: u32,
    prefix: ModularPrefix,
    ring: Arc<ResidueRing>,
    // (d^t)^k mod p^M for k = 1, 2, ...
    dt_powers: Vec<BigUint>,
}

impl PrimeScan {
    fn new(t: u64, d: u64, n0: i64, p: u64, exponent: u32) -> Self {
        let ring = ResidueRing::new(p, exponent).expect("caller checked primality");
        let dt = BigUint::from(d).modpow(&BigUint::from(t), ring.modulus());
        PrimeScan {
            t,
            c: 0,
            required: vp_u64(p, d),
            prefix: ModularPrefix::empty_mod(n0, Arc::clone(&ring)),
            ring,
            dt_powers: vec![dt],
        }
    }

    fn exponent(&self) -> u32 {
        self.ring.exponent()
    }

    fn advance(&mut self) {
        let next = self.prefix.lower() - 1;
        self.prefix.extend_in_place(next);
        self.c += 1;
    }

    fn advance_to(&mut self, c: u64, deadline: Option<Instant>) -> Result<(), BudgetExhausted> {
        debug_assert!(c >= self.c);
        while self.c < c {
            self.advance();
            if self.c.is_multiple_of(32) {
                check_deadline(deadline, self.c)?;
            }
        }
        Ok(())
    }

    /// `N_c mod p^M` at the current position.
    fn numerator_residue(&mut self) -> BigUint {
        let modulus = self.ring.modulus().clone();
        let exponent = self.exponent() as u64;
        let step = self.t * self.required as u64;
        let mut total = BigUint::zero();
        for k in 1..=self.c / self.t {
            // d^{kt} vanishes modulo p^M from here on.
            if k * step >= exponent {
                break;
            }
            while self.dt_powers.len() < k as usize {
                let next = (self.dt_powers.last().unwrap() * &self.dt_powers[0]) % &modulus;
                self.dt_powers.push(next);
            }
            let m = (self.c - k * self.t) as usize;
            let coeffs = self.prefix.coefficients();
            if coeffs.is_zero_at(m) {
                continue;
            }
            total += &self.dt_powers[k as usize - 1] * coeffs.get_biguint(m);
            total %= &modulus;
        }
        total
    }

    /// `ν_p(N_c)` when it is below the ring exponent, else `Infinite`.
    fn numerator_valuation(&mut self) -> Valuation {
        let r = self.numerator_residue();
        self.ring.valuation_of(&r)
    }
}

fn check_deadline(deadline: Option<Instant>, c: u64) -> Result<(), BudgetExhausted> {
    match deadline {
        Some(limit) if Instant::now() >= limit => Err(BudgetExhausted { at_c: c }),
        _ => Ok(()),
    }
}

/// Precision policy for [`sum_valuation_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Escalation {
    /// Give up on residues once the slack above `ν_p(c!)` exceeds this, and
    /// fall back to exact integers.
    pub max_slack: u32,
}

impl Default for Escalation {
    fn default() -> Self {
        Escalation { max_slack: 1 << 12 }
    }
}

/// `ν_p` of the averaged excess at `(t, d, c, n0)`, for a prime `p | d`.
pub fn sum_valuation(t: u64, d: u64, c: u64, n0: i64, p: u64) -> Result<Valuation, CongruenceError> {
    sum_valuation_with(t, d, c, n0, p, Escalation::default())
}

pub fn sum_valuation_with(
    t: u64,
    d: u64,
    c: u64,
    n0: i64,
    p: u64,
    policy: Escalation,
) -> Result<Valuation, CongruenceError> {
    validate(t, d)?;
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p).into());
    }
    if !d.is_multiple_of(p) {
        return Err(CongruenceError::PrimeDoesNotDivide { p, d });
    }
    if c < t {
        return Ok(Valuation::Infinite);
    }
    let fact = legendre(p, c) as u32;
    let mut slack = vp_u64(p, d) + 1;
    while slack <= policy.max_slack {
        let mut scan = PrimeScan::new(t, d, n0, p, fact + slack);
        scan.advance_to(c, None).expect("no deadline");
        if let Valuation::Finite(v) = scan.numerator_valuation() {
            return Ok(Valuation::Finite(v - fact as i64));
        }
        slack *= 2;
    }
    let exact = excess_numerator_exact(t, d, c, n0);
    Ok(vp_bigint(p, &exact).shift(-(fact as i64)))
}

/// Decides `C_t` for `d` by checking every `c` in `t..d` at `n0`, per prime.
///
/// `c_hints` are tried first, in the order given; the remaining range is then
/// scanned in increasing order. Returns at the first violation.
pub fn check_direct(t: u64, d: u64, n0: i64, c_hints: &[u64]) -> Result<DirectCheckOutcome, CongruenceError> {
    match check_direct_until(t, d, n0, c_hints, None)? {
        Ok(outcome) => Ok(outcome),
        Err(_) => unreachable!("no deadline was set"),
    }
}

/// As [`check_direct`], giving up once `deadline` passes.
pub fn check_direct_until(
    t: u64,
    d: u64,
    n0: i64,
    c_hints: &[u64],
    deadline: Option<Instant>,
) -> Result<Result<DirectCheckOutcome, BudgetExhausted>, CongruenceError> {
    validate(t, d)?;
    let holds = DirectCheckOutcome {
        verdict: DirectVerdict::Holds,
        failing_c: None,
        reports: Vec::new(),
        n0,
    };
    if d <= t {
        return Ok(Ok(holds));
    }
    let primes: Vec<(u64, u32)> = factorize(d)?.factors().to_vec();
    let search = DirectSearch {
        t,
        d,
        n0,
        primes: &primes,
        deadline,
    };
    Ok(search.run(c_hints, holds))
}

struct DirectSearch<'a> {
    t: u64,
    d: u64,
    n0: i64,
    primes: &'a [(u64, u32)],
    deadline: Option<Instant>,
}

/// The first violation found: `ν_p` of the excess at `c` is `found < ν_p(d)`.
#[derive(Debug, Clone, Copy)]
struct Violation {
    c: u64,
    prime: u64,
    found: Valuation,
}

impl DirectSearch<'_> {
    fn run(
        &self,
        c_hints: &[u64],
        holds: DirectCheckOutcome,
    ) -> Result<DirectCheckOutcome, BudgetExhausted> {
        let mut hints: Vec<u64> = Vec::new();
        for &c in c_hints {
            if c >= self.t && c < self.d && !hints.contains(&c) {
                hints.push(c);
            }
        }
        if let Some(v) = self.first_failing_hint(&hints)? {
            return Ok(self.outcome_at(v));
        }
        match self.first_failing_in_range()? {
            Some(v) => Ok(self.outcome_at(v)),
            None => Ok(holds),
        }
    }

    fn ring_exponent(&self, p: u64, r: u32, c: u64) -> u32 {
        r + legendre(p, c) as u32 + 1
    }

    /// The excess valuation at the scan position when it falls short.
    fn violation(&self, scan: &mut PrimeScan, p: u64) -> Option<Violation> {
        let fact = legendre(p, scan.c) as i64;
        let found = scan.numerator_valuation();
        (!found.at_least(scan.required as i64 + fact)).then(|| Violation {
            c: scan.c,
            prime: p,
            found: found.shift(-fact),
        })
    }

    fn first_failing_hint(&self, hints: &[u64]) -> Result<Option<Violation>, BudgetExhausted> {
        let mut scans: Vec<Option<PrimeScan>> = self.primes.iter().map(|_| None).collect();
        for &c in hints {
            for (slot, &(p, r)) in scans.iter_mut().zip(self.primes) {
                let needed = self.ring_exponent(p, r, c);
                let reusable = matches!(slot, Some(s) if s.c <= c && s.exponent() >= needed);
                if !reusable {
                    *slot = Some(PrimeScan::new(self.t, self.d, self.n0, p, needed));
                }
                let scan = slot.as_mut().unwrap();
                scan.advance_to(c, self.deadline)?;
                if let Some(v) = self.violation(scan, p) {
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    }

    fn first_failing_in_range(&self) -> Result<Option<Violation>, BudgetExhausted> {
        let mut best: Option<Violation> = None;
        for &(p, r) in self.primes {
            let limit = best.map_or(self.d, |v| v.c);
            let mut scan = PrimeScan::new(self.t, self.d, self.n0, p, self.ring_exponent(p, r, limit - 1));
            scan.advance_to(self.t, self.deadline)?;
            while scan.c < limit {
                if let Some(v) = self.violation(&mut scan, p) {
                    best = Some(v);
                    break;
                }
                scan.advance();
                if scan.c.is_multiple_of(32) {
                    check_deadline(self.deadline, scan.c)?;
                }
            }
        }
        Ok(best)
    }

    /// Reports every prime at the failing `c`, reusing the valuation already found.
    fn outcome_at(&self, violation: Violation) -> DirectCheckOutcome {
        let c = violation.c;
        let reports = self
            .primes
            .iter()
            .map(|&(p, r)| {
                let found = if p == violation.prime {
                    violation.found
                } else {
                    sum_valuation(self.t, self.d, c, self.n0, p).expect("p is a prime divisor of d")
                };
                ValuationReport::new(p, r as i64, found)
            })
            .collect();
        DirectCheckOutcome {
            verdict: DirectVerdict::Fails,
            failing_c: Some(c),
            reports,
            n0: self.n0,
        }
    }
}
