//! Closed-form sufficient and necessary conditions for `C_t`.
//!
//! Each criterion either settles `(t, d)` (holds / fails) or reports
//! [`Outcome::Inconclusive`]. None of them evaluates the congruence itself;
//! they only inspect the factorizations of `t` and `d`.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, ilog, legendre, vp_u64, PrimeFactorization};

/// Criterion identifiers, serialized under their stable report ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// `d <= t`.
    #[serde(rename = "DLeT")]
    SmallModulus,
    /// `d = p^r` with `r` at most the prime-power bound.
    #[serde(rename = "CorPower")]
    PrimePowerBound,
    /// Per-prime lower bound on every summand's valuation.
    #[serde(rename = "PropSuffcond")]
    SummandBound,
    /// Valuation/size trade-off with a shift `β >= 1`.
    #[serde(rename = "PropBeta")]
    ShiftedCofactor,
    /// `d > t p^{ν_p(d)}` for some `p | d`.
    #[serde(rename = "CorTooLargeValue")]
    LargeCofactor,
    /// `ν_p(d) > (α_p + 1) t - ν_p(t!)`.
    #[serde(rename = "PropTooLargeValuation")]
    LargeValuation,
    /// `t = q p^u`, `d = q p^r`, `p` odd.
    #[serde(rename = "PropParticular")]
    MatchedCofactor,
    /// `t = p^u`, `d = p^r`, `p` odd.
    #[serde(rename = "CorPowerNot")]
    PrimePowerExcess,
    /// `t = q p^u`, `d = (q + 1) p^r`.
    #[serde(rename = "PropAnother")]
    SuccessorCofactor,
    /// Exhaustive evaluation at a fixed base point.
    #[serde(rename = "DirectCheck")]
    DirectCheck,
}

impl Criterion {
    pub fn id(self) -> &'static str {
        match self {
            Criterion::SmallModulus => "DLeT",
            Criterion::PrimePowerBound => "CorPower",
            Criterion::SummandBound => "PropSuffcond",
            Criterion::ShiftedCofactor => "PropBeta",
            Criterion::LargeCofactor => "CorTooLargeValue",
            Criterion::LargeValuation => "PropTooLargeValuation",
            Criterion::MatchedCofactor => "PropParticular",
            Criterion::PrimePowerExcess => "CorPowerNot",
            Criterion::SuccessorCofactor => "PropAnother",
            Criterion::DirectCheck => "DirectCheck",
        }
    }

    pub fn from_id(id: &str) -> Option<Criterion> {
        CLOSED_FORM
            .iter()
            .copied()
            .chain(std::iter::once(Criterion::DirectCheck))
            .find(|c| c.id() == id)
    }
}

/// Every closed-form criterion, in classifier order.
pub const CLOSED_FORM: [Criterion; 9] = [
    Criterion::LargeCofactor,
    Criterion::LargeValuation,
    Criterion::SmallModulus,
    Criterion::PrimePowerBound,
    Criterion::SummandBound,
    Criterion::ShiftedCofactor,
    Criterion::MatchedCofactor,
    Criterion::PrimePowerExcess,
    Criterion::SuccessorCofactor,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

/// Parameters of the summand lower bound at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffcondParams {
    pub p: u64,
    pub k_p: u64,
    pub gamma_p: u32,
    /// `⌊log_p(k_p t p^γ / d)⌋`; may be -1. Not the `⌊log_p t⌋` of the prime-power bound.
    pub alpha_p_suff: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parameters {
    None,
    Beta { beta: u32 },
    /// `t = q p^u`.
    Decomposition { q: u64, u: u32 },
    Suffcond(SuffcondParams),
}

/// The numbers that made a criterion fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundWitness {
    pub prime: Option<u64>,
    /// `ν_p(d)` (or `d` itself when no prime is involved).
    pub exponent: u64,
    pub bound: i64,
    pub parameters: Parameters,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: Criterion,
    pub outcome: Outcome,
    pub detail: Vec<BoundWitness>,
}

impl CriterionVerdict {
    fn inconclusive(criterion: Criterion) -> Self {
        CriterionVerdict {
            criterion,
            outcome: Outcome::Inconclusive,
            detail: Vec::new(),
        }
    }

    fn decided(criterion: Criterion, outcome: Outcome, detail: Vec<BoundWitness>) -> Self {
        debug_assert!(!detail.is_empty());
        CriterionVerdict {
            criterion,
            outcome,
            detail,
        }
    }

    pub fn is_decisive(&self) -> bool {
        self.outcome != Outcome::Inconclusive
    }
}

fn factors_of(d: u64) -> PrimeFactorization {
    factorize(d).expect("d >= 1")
}

fn pow_u128(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// `(α_p + 1)(t + 1) - (p^{α_p+1} - 1)/(p - 1)` with `α_p = ⌊log_p t⌋`.
pub fn prime_power_bound(p: u64, t: u64) -> i64 {
    let alpha = ilog(p, t);
    let geometric = (pow_u128(p, alpha + 1) - 1) / (p as u128 - 1);
    (alpha as i64 + 1) * (t as i64 + 1) - geometric as i64
}

/// `(α_p + 1) t - ν_p(t!)` with `α_p = ⌊log_p t⌋`.
pub fn valuation_ceiling(p: u64, t: u64) -> i64 {
    let alpha = ilog(p, t);
    (alpha as i64 + 1) * t as i64 - legendre(p, t) as i64
}

/// `ut + 1 - ν_p((t - 1)!)` for `t = q p^u`.
fn matched_bound(p: u64, t: u64, u: u32) -> i64 {
    u as i64 * t as i64 + 1 - legendre(p, t - 1) as i64
}

fn is_power_of(n: u64, p: u64) -> bool {
    let mut n = n;
    while n > 1 && n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// `t = q p^u` with `u = ν_p(t) >= 1` for every prime `p | t`.
fn decompositions(t: u64) -> impl Iterator<Item = (u64, u64, u32)> {
    factors_of(t)
        .factors()
        .to_vec()
        .into_iter()
        .map(move |(p, u)| (p, t / p.pow(u), u))
}

/// Membership in the exceptional set `A_t` left open by the prime-power and
/// large-cofactor classification.
pub fn in_at(t: u64, d: u64) -> bool {
    let fact = factors_of(d);
    if let Some((p, r)) = fact.as_prime_power() {
        let eligible = p == 2 || (p < t && !is_power_of(t, p));
        let r = r as i64;
        return eligible && prime_power_bound(p, t) < r && r <= valuation_ceiling(p, t);
    }
    fact.len() >= 2
        && fact
            .factors()
            .iter()
            .all(|&(p, r)| p <= t && d / p.pow(r) <= t)
}

/// Every `d <= t` satisfies `C_t`, with equality rather than congruence.
pub fn crit_d_le_t(t: u64, d: u64) -> CriterionVerdict {
    if d <= t {
        CriterionVerdict::decided(
            Criterion::SmallModulus,
            Outcome::Holds,
            vec![BoundWitness {
                prime: None,
                exponent: d,
                bound: t as i64,
                parameters: Parameters::None,
            }],
        )
    } else {
        CriterionVerdict::inconclusive(Criterion::SmallModulus)
    }
}

pub fn crit_power_holds(t: u64, d: u64) -> CriterionVerdict {
    if let Some((p, r)) = factors_of(d).as_prime_power() {
        let bound = prime_power_bound(p, t);
        if r as i64 <= bound {
            return CriterionVerdict::decided(
                Criterion::PrimePowerBound,
                Outcome::Holds,
                vec![BoundWitness {
                    prime: Some(p),
                    exponent: r as u64,
                    bound,
                    parameters: Parameters::None,
                }],
            );
        }
    }
    CriterionVerdict::inconclusive(Criterion::PrimePowerBound)
}

pub fn crit_toolarge_valuation(t: u64, d: u64) -> CriterionVerdict {
    for &(p, r) in factors_of(d).factors() {
        let bound = valuation_ceiling(p, t);
        if r as i64 > bound {
            return CriterionVerdict::decided(
                Criterion::LargeValuation,
                Outcome::Fails,
                vec![BoundWitness {
                    prime: Some(p),
                    exponent: r as u64,
                    bound,
                    parameters: Parameters::None,
                }],
            );
        }
    }
    CriterionVerdict::inconclusive(Criterion::LargeValuation)
}

pub fn crit_toolarge_value(t: u64, d: u64) -> CriterionVerdict {
    for &(p, r) in factors_of(d).factors() {
        let cap = t as u128 * pow_u128(p, r);
        if d as u128 > cap {
            return CriterionVerdict::decided(
                Criterion::LargeCofactor,
                Outcome::Fails,
                vec![BoundWitness {
                    prime: Some(p),
                    exponent: r as u64,
                    bound: cap as i64,
                    parameters: Parameters::None,
                }],
            );
        }
    }
    CriterionVerdict::inconclusive(Criterion::LargeCofactor)
}

pub fn crit_beta(t: u64, d: u64) -> CriterionVerdict {
    for &(p, r) in factors_of(d).factors() {
        let tf = legendre(p, t) as i64;
        for beta in 1..=r {
            let bound = t as i64 * beta as i64 - tf;
            let size_ok = d as u128 > t as u128 * pow_u128(p, r - beta);
            if r as i64 > bound && size_ok {
                return CriterionVerdict::decided(
                    Criterion::ShiftedCofactor,
                    Outcome::Fails,
                    vec![BoundWitness {
                        prime: Some(p),
                        exponent: r as u64,
                        bound,
                        parameters: Parameters::Beta { beta },
                    }],
                );
            }
        }
    }
    CriterionVerdict::inconclusive(Criterion::ShiftedCofactor)
}

/// `r` with `n = p^r`, `r >= 1`.
fn exact_power(n: u64, p: u64) -> Option<u32> {
    if n < p || !is_power_of(n, p) {
        return None;
    }
    Some(vp_u64(p, n))
}

pub fn crit_particular(t: u64, d: u64) -> CriterionVerdict {
    for (p, q, u) in decompositions(t) {
        if p == 2 || !d.is_multiple_of(q) {
            continue;
        }
        if let Some(r) = exact_power(d / q, p) {
            let bound = matched_bound(p, t, u);
            if r as i64 > bound {
                return CriterionVerdict::decided(
                    Criterion::MatchedCofactor,
                    Outcome::Fails,
                    vec![BoundWitness {
                        prime: Some(p),
                        exponent: r as u64,
                        bound,
                        parameters: Parameters::Decomposition { q, u },
                    }],
                );
            }
        }
    }
    CriterionVerdict::inconclusive(Criterion::MatchedCofactor)
}

/// The `q = 1` case of [`crit_particular`]; like it, only for odd `p`.
pub fn crit_powernot(t: u64, d: u64) -> CriterionVerdict {
    if let Some((p, u)) = factors_of(t).as_prime_power() {
        if p != 2 {
            if let Some(r) = exact_power(d, p) {
                let bound = matched_bound(p, t, u);
                if r as i64 > bound {
                    return CriterionVerdict::decided(
                        Criterion::PrimePowerExcess,
                        Outcome::Fails,
                        vec![BoundWitness {
                            prime: Some(p),
                            exponent: r as u64,
                            bound,
                            parameters: Parameters::Decomposition { q: 1, u },
                        }],
                    );
                }
            }
        }
    }
    CriterionVerdict::inconclusive(Criterion::PrimePowerExcess)
}

pub fn crit_another(t: u64, d: u64) -> CriterionVerdict {
    for (p, q, u) in decompositions(t) {
        let next = q + 1;
        if next % p == 0 || !d.is_multiple_of(next) {
            continue;
        }
        if let Some(r) = exact_power(d / next, p) {
            let bound = u as i64 * t as i64 - legendre(p, t) as i64;
            if r as i64 > bound {
                return CriterionVerdict::decided(
                    Criterion::SuccessorCofactor,
                    Outcome::Fails,
                    vec![BoundWitness {
                        prime: Some(p),
                        exponent: r as u64,
                        bound,
                        parameters: Parameters::Decomposition { q, u },
                    }],
                );
            }
        }
    }
    CriterionVerdict::inconclusive(Criterion::SuccessorCofactor)
}

/// `⌊n · p^{-e}⌋` for a possibly negative exponent `e`.
fn floor_scaled(n: u64, p: u64, e: i64) -> i64 {
    if e >= 0 {
        (n as u128 / pow_u128(p, e as u32)) as i64
    } else {
        (n as u128 * pow_u128(p, (-e) as u32)) as i64
    }
}

pub fn suffcond_params(t: u64, d: u64, p: u64) -> SuffcondParams {
    let nu = vp_u64(p, d);
    let gamma = ilog(p, d);
    let blocks = (d - 1) as u128 / pow_u128(p, nu + 1);
    let k = blocks.div_ceil(t as u128).max(1) as u64;
    // Largest a >= -1 with p^a <= k t p^γ / d.
    let numer = k as u128 * t as u128 * pow_u128(p, gamma);
    let alpha: i64 = if numer < d as u128 {
        -1
    } else {
        let mut a = 0i64;
        let mut scaled = d as u128 * p as u128;
        while scaled <= numer {
            a += 1;
            scaled *= p as u128;
        }
        a
    };
    let subtracted: i64 = (0..=alpha)
        .map(|g| floor_scaled(d - 1, p, gamma as i64 - g))
        .sum();
    let bound = (nu as i64 - gamma as i64 + alpha + 1) * k as i64 * t as i64 - subtracted;
    SuffcondParams {
        p,
        k_p: k,
        gamma_p: gamma,
        alpha_p_suff: alpha,
        bound,
    }
}

pub fn crit_suffcond(t: u64, d: u64) -> CriterionVerdict {
    let fact = factors_of(d);
    if fact.is_empty() {
        return CriterionVerdict::inconclusive(Criterion::SummandBound);
    }
    let mut detail = Vec::new();
    for &(p, r) in fact.factors() {
        let params = suffcond_params(t, d, p);
        if (r as i64) > params.bound {
            return CriterionVerdict::inconclusive(Criterion::SummandBound);
        }
        detail.push(BoundWitness {
            prime: Some(p),
            exponent: r as u64,
            bound: params.bound,
            parameters: Parameters::Suffcond(params),
        });
    }
    CriterionVerdict::decided(Criterion::SummandBound, Outcome::Holds, detail)
}

/// Evaluates one closed-form criterion. `DirectCheck` is not closed-form and
/// always comes back inconclusive here.
pub fn evaluate(criterion: Criterion, t: u64, d: u64) -> CriterionVerdict {
    match criterion {
        Criterion::SmallModulus => crit_d_le_t(t, d),
        Criterion::PrimePowerBound => crit_power_holds(t, d),
        Criterion::SummandBound => crit_suffcond(t, d),
        Criterion::ShiftedCofactor => crit_beta(t, d),
        Criterion::LargeCofactor => crit_toolarge_value(t, d),
        Criterion::LargeValuation => crit_toolarge_valuation(t, d),
        Criterion::MatchedCofactor => crit_particular(t, d),
        Criterion::PrimePowerExcess => crit_powernot(t, d),
        Criterion::SuccessorCofactor => crit_another(t, d),
        Criterion::DirectCheck => CriterionVerdict::inconclusive(Criterion::DirectCheck),
    }
}
