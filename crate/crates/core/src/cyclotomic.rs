//! Averages over `t`-th roots of unity, computed symbolically.
//!
//! For a polynomial `P(Z) = Σ a_m Z^m`, `(1/t) Σ_{s<t} P(ζ_t^s)` equals the sum
//! of the `a_m` with `t | m`, since `Σ_s ζ_t^{sm}` is `t` or `0`. This gives an
//! exact route to `(1/t) Σ_s binom(n + d ζ_t^s, c)` that shares no code with the
//! elementary-symmetric evaluation in [`crate::congruence`].

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{binom, factorial, Rational};
use crate::congruence::{root_average_excess, CongruenceInstance};

/// A polynomial in one formal variable with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coefficients: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Rational::is_zero) {
            coefficients.pop();
        }
        RationalPolynomial { coefficients }
    }

    pub fn zero() -> Self {
        RationalPolynomial::new(Vec::new())
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: usize) -> Rational {
        self.coefficients.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, z: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, a| acc * z + a)
    }

    /// `(1/t) Σ_{s<t} P(ζ_t^s)`: the sum of the coefficients at degrees divisible by `t`.
    pub fn root_average(&self, t: usize) -> Rational {
        assert!(t >= 1, "t must be positive");
        self.coefficients.iter().step_by(t).cloned().sum()
    }
}

/// `binom(n + d Z, c) = (1/c!) ∏_{i<c} (n - i + d Z)` expanded in `Z`.
pub fn binom_poly(n: i64, d: u64, c: u64) -> RationalPolynomial {
    // Integer expansion first, one division per coefficient at the end.
    let d = BigInt::from(d);
    let mut coeffs: Vec<BigInt> = vec![BigInt::from(1)];
    for i in 0..c as i64 {
        let constant = BigInt::from(n - i);
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (m, a) in coeffs.iter().enumerate() {
            next[m] += a * &constant;
            next[m + 1] += a * &d;
        }
        coeffs = next;
    }
    let fact = factorial(c);
    RationalPolynomial::new(
        coeffs
            .into_iter()
            .map(|a| Rational::new(a, fact.clone()).expect("c! is nonzero"))
            .collect(),
    )
}

/// `(1/t) Σ_{s<t} binom(n + d ζ_t^s, c)` as an exact rational.
pub fn average_over_roots(t: u64, n: i64, d: u64, c: u64) -> Rational {
    binom_poly(n, d, c).root_average(t as usize)
}

/// Checks the averaging identity against the elementary-symmetric form.
pub fn verify_averaging_identity(t: u64, n: i64, d: u64, c: u64) -> bool {
    let lhs = average_over_roots(t, n, d, c) - binom(&Rational::from(n), c);
    lhs == root_average_excess(&CongruenceInstance::new(t, d, c, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn binom_poly_examples() {
        assert_eq!(binom_poly(5, 3, 0), RationalPolynomial::new(vec![q(1)]));
        assert_eq!(binom_poly(-4, 7, 1), RationalPolynomial::new(vec![q(-4), q(7)]));
        for &(n, d, c) in &[(3i64, 2u64, 4u64), (-5, 6, 7), (0, 1, 3), (11, 9, 10)] {
            assert_eq!(binom_poly(n, d, c).eval(&q(1)), binom(&q(n + d as i64), c));
            assert_eq!(binom_poly(n, d, c).degree(), Some(c as usize));
        }
    }

    #[test]
    fn average_examples() {
        assert_eq!(average_over_roots(1, 4, 3, 5), binom(&q(7), 5));
        assert_eq!(average_over_roots(6, 4, 3, 5), binom(&q(4), 5));
        // (binom(7, 6) + binom(-1, 6)) / 2
        assert_eq!(average_over_roots(2, 3, 4, 6), q(4));
    }

    #[test]
    fn identity_examples() {
        assert!(verify_averaging_identity(2, -1, 6, 5));
        assert!(verify_averaging_identity(1, 12, 7, 9));
        assert!(verify_averaging_identity(4, -30, 13, 17));
    }

    #[test]
    fn filtering_matches_evaluation_at_minus_one() {
        let p = binom_poly(-3, 5, 8);
        let direct = (p.eval(&q(1)) + p.eval(&q(-1))) / q(2);
        assert_eq!(p.root_average(2), direct);
        assert_eq!(p.root_average(1), p.eval(&q(1)));
    }

    #[test]
    fn zero_polynomial() {
        let z = RationalPolynomial::new(vec![q(0), q(0)]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(z.root_average(3), q(0));
    }
}
