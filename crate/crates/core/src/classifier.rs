//! Deciding `C_t` for a single modulus or a range of moduli.
//!
//! The closed-form criteria are consulted in a fixed order; the first one that
//! decides wins. Moduli that none of them settle fall back to the direct check,
//! which is seeded with `c` values where violations are expected.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, ilog, is_prime, vp_u64};
use crate::congruence::{
    check_direct_until, CongruenceError, DirectCheckOutcome, DirectVerdict, DEFAULT_N0,
};
use crate::criteria::{
    evaluate, in_at, prime_power_bound, valuation_ceiling, BoundWitness, Criterion,
    CriterionVerdict, Outcome, Parameters, CLOSED_FORM,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    /// The direct check ran out of time.
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub n0: i64,
    /// Wall-clock ceiling for the direct check; `None` means unlimited.
    pub budget: Option<Duration>,
}

/// Large enough for every hand-checked case, including `t = 5, d = 3^9`.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(15 * 60);

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            n0: DEFAULT_N0,
            budget: Some(DEFAULT_BUDGET),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub t: u64,
    pub d: u64,
    pub verdict: Verdict,
    /// Criteria in the order consulted; the last entry decided (or timed out).
    pub provenance: Vec<CriterionVerdict>,
    pub witness: Option<DirectCheckOutcome>,
    pub wall_time: Duration,
}

impl ClassificationResult {
    pub fn decisive(&self) -> &CriterionVerdict {
        self.provenance.last().expect("provenance is never empty")
    }
}

/// Witnesses found by hand for small `t`, tried before anything else.
const KNOWN_WITNESSES: &[(u64, u64, u64)] = &[
    (3, 6, 5),
    (4, 512, 384),
    (4, 2187, 1701),
    (5, 15, 13),
    (5, 20, 18),
    (5, 4096, 3072),
    (5, 19683, 15309),
];

/// Candidate `c` values for the direct check, most promising first.
pub fn c_hints(t: u64, d: u64) -> Vec<u64> {
    let mut hints: Vec<u64> = KNOWN_WITNESSES
        .iter()
        .filter(|&&(kt, kd, _)| kt == t && kd == d)
        .map(|&(_, _, c)| c)
        .collect();
    let Ok(fact) = factorize(d) else {
        return hints;
    };
    match fact.as_prime_power() {
        Some((p, r)) => {
            let alpha = ilog(p, t);
            if r > alpha {
                let base = p.pow(r - alpha - 1);
                hints.push(t.saturating_mul(base));
                let u = vp_u64(p, t);
                if u >= 1 && r > u {
                    let step = p.pow(r - u - 1);
                    hints.push((t - 1) * step * p + step);
                }
                hints.extend((1..).map(|m| m * base).take_while(|&c| c < d));
            }
        }
        None => {
            if let Some(p_max) = fact.largest_prime() {
                hints.push(d.saturating_sub(2));
                hints.push(d - d / p_max);
                // d = (q + 1) p^r fails at c = q p^r when r is large.
                hints.extend(fact.factors().iter().map(|&(p, r)| d - p.pow(r)));
            }
        }
    }
    let mut seen = Vec::with_capacity(hints.len());
    hints.retain(|&c| {
        let fresh = c >= t && c < d && !seen.contains(&c);
        if fresh {
            seen.push(c);
        }
        fresh
    });
    hints
}

pub fn classify(t: u64, d: u64) -> Result<ClassificationResult, CongruenceError> {
    classify_with(t, d, &ClassifyOptions::default())
}

pub fn classify_with(
    t: u64,
    d: u64,
    options: &ClassifyOptions,
) -> Result<ClassificationResult, CongruenceError> {
    if t == 0 {
        return Err(CongruenceError::NotPositive("t"));
    }
    if d == 0 {
        return Err(CongruenceError::NotPositive("d"));
    }
    let started = Instant::now();
    let mut provenance = Vec::new();
    for criterion in CLOSED_FORM {
        let verdict = evaluate(criterion, t, d);
        let outcome = verdict.outcome;
        provenance.push(verdict);
        let decided = match outcome {
            Outcome::Holds => Verdict::Holds,
            Outcome::Fails => Verdict::Fails,
            Outcome::Inconclusive => continue,
        };
        return Ok(ClassificationResult {
            t,
            d,
            verdict: decided,
            provenance,
            witness: None,
            wall_time: started.elapsed(),
        });
    }

    let deadline = options.budget.map(|b| started + b);
    let hints = c_hints(t, d);
    let (verdict, direct, witness) = match check_direct_until(t, d, options.n0, &hints, deadline)? {
        Ok(outcome) => {
            let entry = direct_entry(d, &outcome);
            let verdict = match outcome.verdict {
                DirectVerdict::Holds => Verdict::Holds,
                DirectVerdict::Fails => Verdict::Fails,
            };
            (verdict, entry, Some(outcome))
        }
        Err(_) => (
            Verdict::Undecided,
            CriterionVerdict {
                criterion: Criterion::DirectCheck,
                outcome: Outcome::Inconclusive,
                detail: Vec::new(),
            },
            None,
        ),
    };
    provenance.push(direct);
    Ok(ClassificationResult {
        t,
        d,
        verdict,
        provenance,
        witness,
        wall_time: started.elapsed(),
    })
}

fn direct_entry(d: u64, outcome: &DirectCheckOutcome) -> CriterionVerdict {
    let (result, detail) = match outcome.verdict {
        DirectVerdict::Holds => {
            let detail = factorize(d)
                .expect("d >= 1")
                .factors()
                .iter()
                .map(|&(p, r)| BoundWitness {
                    prime: Some(p),
                    exponent: r as u64,
                    bound: r as i64,
                    parameters: Parameters::None,
                })
                .collect();
            (Outcome::Holds, detail)
        }
        DirectVerdict::Fails => {
            let w = outcome.witness().expect("failing outcome carries a witness");
            let detail = vec![BoundWitness {
                prime: Some(w.prime),
                exponent: w.required as u64,
                bound: w.found.finite().expect("a violation is finite"),
                parameters: Parameters::None,
            }];
            (Outcome::Fails, detail)
        }
    };
    CriterionVerdict {
        criterion: Criterion::DirectCheck,
        outcome: result,
        detail,
    }
}

/// Classifies every `d` in `d_min..=d_max` on `jobs` worker threads.
/// The result is ordered by `d` and does not depend on `jobs`.
pub fn scan(
    t: u64,
    d_min: u64,
    d_max: u64,
    jobs: usize,
    options: &ClassifyOptions,
) -> Result<Vec<ClassificationResult>, CongruenceError> {
    if d_min == 0 {
        return Err(CongruenceError::NotPositive("d_min"));
    }
    if d_min > d_max {
        return Ok(Vec::new());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("cannot create thread pool");
    pool.install(|| {
        (d_min..=d_max)
            .collect::<Vec<_>>()
            .into_par_iter()
            .with_max_len(1)
            .map(|d| classify_with(t, d, options))
            .collect()
    })
}

/// Closed form for moduli with a prime divisor above `t`: `C_t` holds iff
/// `d = p^r` with `p > t` prime and `r <= t`. `None` when no such divisor exists.
pub fn classify_corollary_simple(t: u64, d: u64) -> Option<bool> {
    let fact = factorize(d).ok()?;
    fact.primes().find(|&p| p > t)?;
    Some(matches!(fact.as_prime_power(), Some((p, r)) if p > t && r as u64 <= t))
}

/// All members of the exceptional set `A_t`, ascending.
pub fn exceptional_set(t: u64) -> Vec<u64> {
    let mut members = Vec::new();
    for p in (2..=t.max(2)).filter(|&p| is_prime(p)) {
        let lo = prime_power_bound(p, t);
        let hi = valuation_ceiling(p, t);
        for r in (lo + 1).max(1)..=hi {
            if let Some(d) = p.checked_pow(r as u32) {
                if in_at(t, d) {
                    members.push(d);
                }
            }
        }
    }
    // Multiplying d / p^r <= t over all u >= 2 prime divisors gives d <= t^2.
    if t >= 3 {
        let limit = t.saturating_mul(t);
        members.extend((2..=limit).filter(|&d| factorize(d).is_ok_and(|f| f.len() >= 2) && in_at(t, d)));
    }
    members.sort_unstable();
    members.dedup();
    members
}
