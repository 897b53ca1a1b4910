//! Elementary symmetric sums of integer intervals.
//!
//! A [`SymmetricPrefix`] holds the coefficients `e_0, e_1, ...` of
//! `∏_{j=a}^{b} (X + j)`, i.e. `e_m` is the sum of the products of all
//! `m`-subsets of `{a, ..., b}`. The interval grows one element at a time at
//! its lower end, so scanning the nested intervals `{n0-c+1, ..., n0}` for
//! `c = 0, 1, 2, ...` costs a single pass per step.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{ArithError, ResidueElement, ResidueRing};

/// Storage for the coefficient vector of a [`SymmetricPrefix`].
pub trait Coefficients: Clone {
    type Value;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends a zero coefficient at the top.
    fn push_zero(&mut self);

    /// `e[m] += element * e[m - 1]`.
    fn mul_add_previous(&mut self, m: usize, element: i64);

    fn get(&self, m: usize) -> Self::Value;
}

/// Exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(Vec<BigInt>);

impl Exact {
    fn unit() -> Self {
        Exact(vec![BigInt::one()])
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }
}

impl Coefficients for Exact {
    type Value = BigInt;

    fn len(&self) -> usize {
        self.0.len()
    }

    fn push_zero(&mut self) {
        self.0.push(BigInt::zero());
    }

    fn mul_add_previous(&mut self, m: usize, element: i64) {
        let (lo, hi) = self.0.split_at_mut(m);
        hi[0] += &lo[m - 1] * element;
    }

    fn get(&self, m: usize) -> BigInt {
        self.0[m].clone()
    }
}

/// Coefficients reduced modulo `p^M`, stored as a flat array of 64-bit limbs.
#[derive(Clone)]
pub struct Modular {
    ring: Arc<ResidueRing>,
    kernel: Arc<LimbModulus>,
    limbs: Vec<u64>,
}

impl Modular {
    fn unit(ring: Arc<ResidueRing>) -> Self {
        let kernel = Arc::new(LimbModulus::new(ring.modulus()));
        let mut limbs = vec![0u64; kernel.width];
        // p^M >= 2, so 1 is already reduced.
        limbs[0] = 1;
        Modular {
            ring,
            kernel,
            limbs,
        }
    }

    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    /// The `m`-th coefficient as a plain integer in `[0, p^M)`.
    pub fn get_biguint(&self, m: usize) -> BigUint {
        let w = self.kernel.width;
        limbs_to_biguint(&self.limbs[m * w..(m + 1) * w])
    }

    pub fn is_zero_at(&self, m: usize) -> bool {
        let w = self.kernel.width;
        self.limbs[m * w..(m + 1) * w].iter().all(|&l| l == 0)
    }
}

impl std::fmt::Debug for Modular {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let coeffs: Vec<BigUint> = (0..self.len()).map(|m| self.get_biguint(m)).collect();
        f.debug_struct("Modular")
            .field("prime", &self.ring.prime())
            .field("exponent", &self.ring.exponent())
            .field("coefficients", &coeffs)
            .finish()
    }
}

impl Coefficients for Modular {
    type Value = ResidueElement;

    fn len(&self) -> usize {
        self.limbs.len() / self.kernel.width
    }

    fn push_zero(&mut self) {
        self.limbs
            .extend(std::iter::repeat_n(0, self.kernel.width));
    }

    fn mul_add_previous(&mut self, m: usize, element: i64) {
        let w = self.kernel.width;
        let (lo, hi) = self.limbs.split_at_mut(m * w);
        self.kernel
            .mul_add_signed(&mut hi[..w], &lo[(m - 1) * w..], element);
    }

    fn get(&self, m: usize) -> ResidueElement {
        self.ring.from_biguint(self.get_biguint(m))
    }
}

fn limbs_to_biguint(limbs: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(limbs.len() * 2);
    for &l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigUint::new(digits)
}

/// A modulus in limb form supporting `acc <- acc + k * src (mod P)` for a
/// signed word-sized `k`, without a general big-by-big product.
struct LimbModulus {
    limbs: Vec<u64>,
    width: usize,
    // 1 / (top two limbs of P), for quotient estimates; unused when width == 1.
    inv_top: f64,
}

const TWO_64: f64 = 18446744073709551616.0;

fn top_two(v: &[u64]) -> f64 {
    let n = v.len();
    v[n - 1] as f64 * TWO_64 + v[n - 2] as f64
}

impl LimbModulus {
    fn new(modulus: &BigUint) -> Self {
        let limbs = modulus.to_u64_digits();
        let width = limbs.len();
        let inv_top = if width >= 2 { 1.0 / top_two(&limbs) } else { 0.0 };
        LimbModulus {
            limbs,
            width,
            inv_top,
        }
    }

    fn mul_add_signed(&self, acc: &mut [u64], src: &[u64], element: i64) {
        if element == 0 {
            return;
        }
        if self.width == 1 {
            let p = self.limbs[0] as i128;
            let r = (acc[0] as i128 + element as i128 * src[0] as i128).rem_euclid(p);
            acc[0] = r as u64;
            return;
        }
        if element.unsigned_abs() >= 1 << 32 {
            // k = hi * 2^32 + lo; 2^32 * src is formed as 2^16 * (2^16 * src).
            let k = element.unsigned_abs();
            let sign = element.signum();
            let (hi, lo) = ((k >> 32) as i64, (k & 0xffff_ffff) as i64);
            let mut once = vec![0u64; self.width];
            self.mul_add_small(&mut once, src, 1 << 16);
            let mut shifted = vec![0u64; self.width];
            self.mul_add_small(&mut shifted, &once, 1 << 16);
            self.mul_add_small(acc, src, sign * lo);
            self.mul_add_small(acc, &shifted, sign * hi);
            return;
        }
        self.mul_add_small(acc, src, element);
    }

    /// `acc + e * src - q * P` in one pass, with `q` estimated from the top
    /// limbs, then at most a few corrections by `±P`. Requires `|e| < 2^32`.
    fn mul_add_small(&self, acc: &mut [u64], src: &[u64], element: i64) {
        if element == 0 {
            return;
        }
        let estimate = (top_two(acc) + element as f64 * top_two(src)) * self.inv_top;
        let q = estimate.floor() as i128;
        let e = element as i128;
        let mut carry: i128 = 0;
        for ((a, &s), &p) in acc.iter_mut().zip(src).zip(&self.limbs) {
            let t = *a as i128 + e * s as i128 - q * p as i128 + carry;
            *a = t as u64;
            carry = t >> 64;
        }
        loop {
            if carry < 0 {
                carry += self.add_modulus(acc);
            } else if carry > 0 || !self.below_modulus(acc) {
                carry -= self.sub_modulus(acc);
            } else {
                break;
            }
        }
    }

    fn add_modulus(&self, acc: &mut [u64]) -> i128 {
        let mut carry = false;
        for (a, &p) in acc.iter_mut().zip(&self.limbs) {
            let (s1, c1) = a.overflowing_add(p);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *a = s2;
            carry = c1 || c2;
        }
        carry as i128
    }

    fn sub_modulus(&self, acc: &mut [u64]) -> i128 {
        let mut borrow = false;
        for (a, &p) in acc.iter_mut().zip(&self.limbs) {
            let (d1, b1) = a.overflowing_sub(p);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            *a = d2;
            borrow = b1 || b2;
        }
        borrow as i128
    }

    fn below_modulus(&self, acc: &[u64]) -> bool {
        for (&a, &p) in acc.iter().zip(&self.limbs).rev() {
            if a != p {
                return a < p;
            }
        }
        false
    }
}

/// Coefficients of `∏_{j=lower}^{upper} (X + j)`, optionally truncated in degree.
#[derive(Debug, Clone)]
pub struct SymmetricPrefix<C> {
    lower: i64,
    upper: i64,
    max_degree: Option<usize>,
    coefficients: C,
}

pub type ExactPrefix = SymmetricPrefix<Exact>;
pub type ModularPrefix = SymmetricPrefix<Modular>;

impl ExactPrefix {
    /// The empty interval `{upper + 1, ..., upper}`; its only coefficient is `e_0 = 1`.
    pub fn empty_exact(upper: i64) -> Self {
        SymmetricPrefix {
            lower: upper + 1,
            upper,
            max_degree: None,
            coefficients: Exact::unit(),
        }
    }
}

impl ModularPrefix {
    pub fn empty_mod(upper: i64, ring: Arc<ResidueRing>) -> Self {
        SymmetricPrefix {
            lower: upper + 1,
            upper,
            max_degree: None,
            coefficients: Modular::unit(ring),
        }
    }

    pub fn ring(&self) -> &Arc<ResidueRing> {
        self.coefficients.ring()
    }
}

impl<C: Coefficients> SymmetricPrefix<C> {
    /// Keeps only `e_0 ..= e_max` from now on.
    pub fn with_max_degree(mut self, max_degree: Option<usize>) -> Self {
        self.max_degree = max_degree;
        self
    }

    pub fn lower(&self) -> i64 {
        self.lower
    }

    pub fn upper(&self) -> i64 {
        self.upper
    }

    /// Number of elements in the interval.
    pub fn size(&self) -> usize {
        (self.upper - self.lower + 1) as usize
    }

    pub fn coefficients(&self) -> &C {
        &self.coefficients
    }

    /// Number of stored coefficients (`size + 1` unless truncated).
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `e_m`, or `None` past the stored degree. Degrees above the interval
    /// size are zero and are not stored.
    pub fn e(&self, m: usize) -> Option<C::Value> {
        (m < self.coefficients.len()).then(|| self.coefficients.get(m))
    }

    /// Extends the interval by `lower - 1`.
    pub fn extend(&self, new_element: i64) -> Self {
        let mut next = self.clone();
        next.extend_in_place(new_element);
        next
    }

    pub fn extend_in_place(&mut self, new_element: i64) {
        assert_eq!(
            new_element,
            self.lower - 1,
            "interval {{{}..{}}} can only grow by {}",
            self.lower,
            self.upper,
            self.lower - 1
        );
        self.lower = new_element;
        let cap = self.max_degree.map_or(usize::MAX, |d| d + 1);
        if self.coefficients.len() < cap {
            self.coefficients.push_zero();
        }
        for m in (1..self.coefficients.len()).rev() {
            self.coefficients.mul_add_previous(m, new_element);
        }
    }

    fn extend_down_to(&mut self, a: i64) {
        while self.lower > a {
            let next = self.lower - 1;
            self.extend_in_place(next);
        }
    }
}

/// Exact coefficients for `{a, ..., b}`; `a = b + 1` gives the empty interval.
pub fn elementary_symmetric_exact(a: i64, b: i64) -> ExactPrefix {
    assert!(a <= b + 1, "interval lower end {a} exceeds {b} + 1");
    let mut prefix = ExactPrefix::empty_exact(b);
    prefix.extend_down_to(a);
    prefix
}

/// Coefficients for `{a, ..., b}` reduced modulo `p^exponent`.
pub fn elementary_symmetric_mod(
    a: i64,
    b: i64,
    p: u64,
    exponent: u32,
) -> Result<ModularPrefix, ArithError> {
    assert!(a <= b + 1, "interval lower end {a} exceeds {b} + 1");
    let ring = ResidueRing::new(p, exponent)?;
    let mut prefix = ModularPrefix::empty_mod(b, ring);
    prefix.extend_down_to(a);
    Ok(prefix)
}
