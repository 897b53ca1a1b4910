//! Exact integers and rationals, p-adic valuations and small-integer number theory.

mod rational;
mod residue;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use rational::Rational;
pub use residue::{ResidueElement, ResidueRing};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} must be at least {1}")]
    TooSmall(&'static str, u64),
    #[error("denominator is zero")]
    ZeroDenominator,
}

/// An integer extended with `+inf`, the value of `ν_p(0)`.
///
/// The derived ordering puts `Infinite` above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }

    /// Shifts a finite value by `delta`; infinity absorbs the shift.
    pub fn shift(self, delta: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + delta),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn at_least(self, bound: i64) -> bool {
        self >= Valuation::Finite(bound)
    }
}

impl PartialEq<i64> for Valuation {
    fn eq(&self, other: &i64) -> bool {
        *self == Valuation::Finite(*other)
    }
}

impl PartialOrd<i64> for Valuation {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Valuation::Finite(*other)))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

impl std::str::FromStr for Valuation {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+inf" | "inf" => Ok(Valuation::Infinite),
            v => v.parse().map(Valuation::Finite),
        }
    }
}

/// Finite values serialize as integers, infinity as the string `"+inf"`.
impl serde::Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("+inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = Valuation;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or \"+inf\"")
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Valuation, E> {
                Ok(Valuation::Finite(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Valuation, E> {
                i64::try_from(v).map(Valuation::Finite).map_err(E::custom)
            }

            // Self-describing text formats may read "+inf" as a float.
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Valuation, E> {
                if v == f64::INFINITY {
                    Ok(Valuation::Infinite)
                } else if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(Valuation::Finite(v as i64))
                } else {
                    Err(E::custom(format!("not a valuation: {v}")))
                }
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Valuation, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(Visitor)
    }
}

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut i = 5u64;
    while i <= n / i {
        if n.is_multiple_of(i) || n.is_multiple_of(i + 2) {
            return false;
        }
        i += 6;
    }
    true
}

fn check_prime(p: u64) -> Result<(), ArithError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ArithError::NotPrime(p))
    }
}

/// `ν_p` of a nonzero machine integer. `p` must be at least 2.
pub(crate) fn vp_u64(p: u64, mut n: u64) -> u32 {
    debug_assert!(p >= 2 && n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// `ν_p` of an arbitrary-precision integer; `+inf` for zero.
pub(crate) fn vp_bigint(p: u64, n: &BigInt) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut cur = n.abs();
    let mut v = 0i64;
    // Strip p^(2^j) greedily, then finish with single factors.
    let mut powers = vec![p.clone()];
    loop {
        let (q, r) = cur.div_rem(powers.last().unwrap());
        if !r.is_zero() {
            break;
        }
        cur = q;
        v += 1i64 << (powers.len() - 1);
        let next = powers.last().unwrap() * powers.last().unwrap();
        powers.push(next);
    }
    for (j, pw) in powers.iter().enumerate().rev() {
        let (q, r) = cur.div_rem(pw);
        if r.is_zero() {
            cur = q;
            v += 1i64 << j;
        }
    }
    Valuation::Finite(v)
}

/// The p-adic valuation of a rational number.
pub fn vp(p: u64, x: &Rational) -> Result<Valuation, ArithError> {
    check_prime(p)?;
    Ok(rational_valuation(p, x))
}

pub(crate) fn rational_valuation(p: u64, x: &Rational) -> Valuation {
    match vp_bigint(p, x.numer()) {
        Valuation::Infinite => Valuation::Infinite,
        Valuation::Finite(num) => {
            let den = vp_bigint(p, x.denom()).finite().unwrap_or(0);
            Valuation::Finite(num - den)
        }
    }
}

/// `ν_p(n!)` by Legendre's sum `Σ ⌊n/p^j⌋`.
pub fn vp_factorial(p: u64, n: u64) -> Result<u64, ArithError> {
    check_prime(p)?;
    Ok(legendre(p, n))
}

pub(crate) fn legendre(p: u64, n: u64) -> u64 {
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// Largest `e` with `base^e <= n`, by integer multiplication only.
pub fn floor_log(base: u64, n: u64) -> Result<u32, ArithError> {
    if base < 2 {
        return Err(ArithError::TooSmall("base", 2));
    }
    if n < 1 {
        return Err(ArithError::TooSmall("argument", 1));
    }
    Ok(ilog(base, n))
}

pub(crate) fn ilog(base: u64, n: u64) -> u32 {
    let mut e = 0;
    let mut acc = 1u64;
    while let Some(next) = acc.checked_mul(base) {
        if next > n {
            break;
        }
        acc = next;
        e += 1;
    }
    e
}

/// Complete factorization `n = p_1^r_1 ... p_u^r_u` with increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeFactorization {
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, r)| r)
    }

    /// `Some((p, r))` when the factorized integer is `p^r` with `r >= 1`.
    pub fn as_prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, r)| p.pow(r)).product()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, r)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if *r == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{r}")?;
            }
        }
        Ok(())
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<PrimeFactorization, ArithError> {
    if n == 0 {
        return Err(ArithError::TooSmall("n", 1));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut r = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            r += 1;
        }
        if r > 0 {
            factors.push((p, r));
        }
    };
    push(2, &mut rest);
    let mut p = 3;
    while p <= rest / p {
        push(p, &mut rest);
        p += 2;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(PrimeFactorization { factors })
}

/// The falling factorial `x (x-1) ... (x-k+1)`; the empty product is 1.
pub fn falling_factorial(x: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc = &acc * &term;
        term = &term - &Rational::one();
    }
    acc
}

/// `binom(x, k) = (x)_k / k!` for rational `x`.
pub fn binom(x: &Rational, k: u64) -> Rational {
    let fact: BigInt = (1..=k).map(BigInt::from).product();
    falling_factorial(x, k) / Rational::from_integer(fact)
}

pub(crate) fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d)).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(2, &q(8, 1)).unwrap(), Valuation::Finite(3));
        assert_eq!(vp(5, &q(0, 1)).unwrap(), Valuation::Infinite);
        // 20^5 / (4 * 8 * 12 * 16 * 2)
        let x = Rational::new(BigInt::from(20).pow(5), BigInt::from(4 * 8 * 12 * 16 * 2)).unwrap();
        assert_eq!(vp(2, &x).unwrap(), Valuation::Finite(-2));
        assert_eq!(vp(4, &q(8, 1)), Err(ArithError::NotPrime(4)));
    }

    #[test]
    fn valuation_of_large_powers() {
        let n = BigInt::from(3).pow(1000) * 7;
        assert_eq!(vp_bigint(3, &n), Valuation::Finite(1000));
        assert_eq!(vp_bigint(3, &-n), Valuation::Finite(1000));
        assert_eq!(vp_bigint(7, &BigInt::from(48)), Valuation::Finite(0));
    }

    #[test]
    fn infinite_is_above_everything() {
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
        assert!(Valuation::Finite(-3) < Valuation::Finite(2));
        assert!(Valuation::Infinite.at_least(1000));
        assert_eq!(Valuation::Infinite.shift(-5), Valuation::Infinite);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(vp_factorial(3, 2).unwrap(), 0);
        assert_eq!(vp_factorial(2, 4).unwrap(), 3);
        assert_eq!(vp_factorial(3, 13).unwrap(), 5);
        assert_eq!(vp_factorial(2, 0).unwrap(), 0);
        assert!(vp_factorial(9, 13).is_err());
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(19683).unwrap().factors(), &[(3, 9)]);
        assert_eq!(factorize(19683).unwrap().as_prime_power(), Some((3, 9)));
        assert_eq!(factorize(999_983 * 2).unwrap().factors(), &[(2, 1), (999_983, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn floor_log_examples() {
        assert_eq!(floor_log(2, 5).unwrap(), 2);
        assert_eq!(floor_log(3, 4).unwrap(), 1);
        assert_eq!(floor_log(7, 6).unwrap(), 0);
        assert_eq!(floor_log(2, 8).unwrap(), 3);
        assert_eq!(floor_log(10, u64::MAX).unwrap(), 19);
        assert!(floor_log(1, 5).is_err());
        assert!(floor_log(2, 0).is_err());
    }

    #[test]
    fn falling_factorial_and_binom_examples() {
        assert_eq!(falling_factorial(&q(7, 3), 0), Rational::one());
        assert_eq!(falling_factorial(&q(-1, 1), 3), q(-6, 1));
        assert_eq!(falling_factorial(&q(1, 2), 2), q(-1, 4));
        assert_eq!(binom(&q(-1, 1), 5), q(-1, 1));
        assert_eq!(binom(&q(7, 1), 2), q(21, 1));
        assert_eq!(binom(&q(1, 2), 2), q(-1, 8));
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(25));
    }
}
