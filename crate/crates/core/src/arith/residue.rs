use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{is_prime, ArithError, Valuation};

/// The ring `Z / p^M Z` for a prime `p`.
///
/// A ring is never resized; a computation needing more precision builds a new one.
#[derive(Debug, PartialEq, Eq)]
pub struct ResidueRing {
    prime: u64,
    exponent: u32,
    modulus: BigUint,
}

impl ResidueRing {
    pub fn new(prime: u64, exponent: u32) -> Result<Arc<Self>, ArithError> {
        if !is_prime(prime) {
            return Err(ArithError::NotPrime(prime));
        }
        if exponent == 0 {
            return Err(ArithError::TooSmall("exponent", 1));
        }
        let modulus = BigUint::from(prime).pow(exponent);
        Ok(Arc::new(ResidueRing {
            prime,
            exponent,
            modulus,
        }))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> ResidueElement {
        ResidueElement {
            ring: Arc::clone(self),
            value: BigUint::zero(),
        }
    }

    pub fn one(self: &Arc<Self>) -> ResidueElement {
        self.from_biguint(BigUint::one())
    }

    pub fn from_biguint(self: &Arc<Self>, v: BigUint) -> ResidueElement {
        ResidueElement {
            ring: Arc::clone(self),
            value: v % &self.modulus,
        }
    }

    pub fn from_bigint(self: &Arc<Self>, v: &BigInt) -> ResidueElement {
        let m = BigInt::from_biguint(Sign::Plus, self.modulus.clone());
        let r = v.mod_floor(&m);
        ResidueElement {
            ring: Arc::clone(self),
            value: r.to_biguint().expect("mod_floor is non-negative"),
        }
    }

    pub fn from_i64(self: &Arc<Self>, v: i64) -> ResidueElement {
        self.from_bigint(&BigInt::from(v))
    }

    /// `ν_p` of a residue in `[0, p^M)`: exact below `M`, `+inf` for zero.
    pub fn valuation_of(&self, value: &BigUint) -> Valuation {
        if value.is_zero() {
            return Valuation::Infinite;
        }
        super::vp_bigint(self.prime, &BigInt::from_biguint(Sign::Plus, value.clone()))
    }
}

/// An element of a [`ResidueRing`], kept in `[0, p^M)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueElement {
    ring: Arc<ResidueRing>,
    value: BigUint,
}

impl ResidueElement {
    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Multiplication by a word-sized integer.
    pub fn mul_small(&self, k: u64) -> ResidueElement {
        ResidueElement {
            ring: Arc::clone(&self.ring),
            value: (&self.value * k) % &self.ring.modulus,
        }
    }

    pub fn pow(&self, e: u64) -> ResidueElement {
        ResidueElement {
            ring: Arc::clone(&self.ring),
            value: self.value.modpow(&BigUint::from(e), &self.ring.modulus),
        }
    }

    /// The valuation of the residue; exact when below the ring exponent.
    pub fn valuation(&self) -> Valuation {
        self.ring.valuation_of(&self.value)
    }

    fn same_ring(&self, other: &ResidueElement) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "residue ring mismatch: {}^{} vs {}^{}",
            self.ring.prime,
            self.ring.exponent,
            other.ring.prime,
            other.ring.exponent
        );
    }
}

impl fmt::Debug for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} mod {}^{}",
            self.value, self.ring.prime, self.ring.exponent
        )
    }
}

impl Add<&ResidueElement> for &ResidueElement {
    type Output = ResidueElement;
    fn add(self, rhs: &ResidueElement) -> ResidueElement {
        self.same_ring(rhs);
        let mut v = &self.value + &rhs.value;
        if v >= self.ring.modulus {
            v -= &self.ring.modulus;
        }
        ResidueElement {
            ring: Arc::clone(&self.ring),
            value: v,
        }
    }
}

impl Sub<&ResidueElement> for &ResidueElement {
    type Output = ResidueElement;
    fn sub(self, rhs: &ResidueElement) -> ResidueElement {
        self.same_ring(rhs);
        let v = if self.value >= rhs.value {
            &self.value - &rhs.value
        } else {
            &self.ring.modulus - &rhs.value + &self.value
        };
        ResidueElement {
            ring: Arc::clone(&self.ring),
            value: v,
        }
    }
}

impl Mul<&ResidueElement> for &ResidueElement {
    type Output = ResidueElement;
    fn mul(self, rhs: &ResidueElement) -> ResidueElement {
        self.same_ring(rhs);
        ResidueElement {
            ring: Arc::clone(&self.ring),
            value: (&self.value * &rhs.value) % &self.ring.modulus,
        }
    }
}

impl Neg for &ResidueElement {
    type Output = ResidueElement;
    fn neg(self) -> ResidueElement {
        &self.ring.zero() - self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_examples() {
        let r = ResidueRing::new(2, 5).unwrap();
        let x = &r.from_i64(3) + &r.from_i64(30);
        assert_eq!(x.value(), &BigUint::from(1u32));

        let r = ResidueRing::new(3, 3).unwrap();
        assert_eq!(r.from_i64(2).pow(3).value(), &BigUint::from(8u32));

        let r = ResidueRing::new(7, 2).unwrap();
        assert_eq!(r.from_i64(5).mul_small(10).value(), &BigUint::from(1u32));
    }

    #[test]
    fn negatives_wrap() {
        let r = ResidueRing::new(3, 2).unwrap();
        assert_eq!(r.from_i64(-6).value(), &BigUint::from(3u32));
        assert_eq!((-&r.from_i64(1)).value(), &BigUint::from(8u32));
        assert_eq!((&r.from_i64(1) - &r.from_i64(4)).value(), &BigUint::from(6u32));
    }

    #[test]
    fn residue_valuation() {
        let r = ResidueRing::new(3, 4).unwrap();
        assert_eq!(r.from_i64(18).valuation(), Valuation::Finite(2));
        assert_eq!(r.from_i64(81).valuation(), Valuation::Infinite);
    }

    #[test]
    #[should_panic(expected = "residue ring mismatch")]
    fn mismatched_rings_panic() {
        let a = ResidueRing::new(3, 4).unwrap().from_i64(1);
        let b = ResidueRing::new(3, 5).unwrap().from_i64(1);
        let _ = &a + &b;
    }

    #[test]
    fn bad_ring_parameters() {
        assert_eq!(ResidueRing::new(6, 2), Err(ArithError::NotPrime(6)));
        assert!(ResidueRing::new(5, 0).is_err());
    }
}
