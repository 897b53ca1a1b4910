use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rootcong::arith::{
    binom, factorize, falling_factorial, floor_log, vp, vp_factorial, Rational, ResidueRing, Valuation,
};
use rootcong::symfun::{elementary_symmetric_exact, elementary_symmetric_mod, ExactPrefix, ModularPrefix};

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 31, 47];

fn rational() -> impl Strategy<Value = Rational> {
    (-5000i64..5000, 1i64..5000).prop_map(|(a, b)| Rational::new(a.into(), b.into()).unwrap())
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

/// Subset-sum definition of e_m over {a..b}.
fn brute_force_e(a: i64, b: i64) -> Vec<BigInt> {
    let xs: Vec<i64> = (a..=b).collect();
    let mut e = vec![BigInt::zero(); xs.len() + 1];
    for mask in 0u32..(1 << xs.len()) {
        let mut prod = BigInt::one();
        for (i, &x) in xs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod *= x;
            }
        }
        e[mask.count_ones() as usize] += prod;
    }
    e
}

fn exact_coeffs(p: &ExactPrefix) -> Vec<BigInt> {
    (0..p.len()).map(|m| p.e(m).unwrap()).collect()
}

fn mod_coeffs(p: &ModularPrefix) -> Vec<BigInt> {
    (0..p.len()).map(|m| BigInt::from(p.e(m).unwrap().into_value())).collect()
}

proptest! {
    #[test]
    fn valuation_is_multiplicative(p in prime(), x in nonzero_rational(), y in nonzero_rational()) {
        let vx = vp(p, &x).unwrap().finite().unwrap();
        let vy = vp(p, &y).unwrap().finite().unwrap();
        prop_assert_eq!(vp(p, &(&x * &y)).unwrap(), Valuation::Finite(vx + vy));
    }

    #[test]
    fn valuation_is_ultrametric(p in prime(), x in nonzero_rational(), y in nonzero_rational()) {
        let (vx, vy) = (vp(p, &x).unwrap(), vp(p, &y).unwrap());
        let vs = vp(p, &(&x + &y)).unwrap();
        prop_assert!(vs >= vx.min(vy));
        if vx != vy {
            prop_assert_eq!(vs, vx.min(vy));
        }
    }

    #[test]
    fn valuation_of_zero_is_infinite(p in prime()) {
        prop_assert!(vp(p, &Rational::zero()).unwrap().is_infinite());
    }

    #[test]
    fn falling_factorial_recurrence(x in rational(), k in 0u64..25) {
        let next = falling_factorial(&x, k + 1);
        let step = &x - &Rational::from(k as i64);
        prop_assert_eq!(next, falling_factorial(&x, k) * step);
    }

    #[test]
    fn pascal_identity(x in rational(), c in 0u64..=20) {
        let lhs = binom(&(&x + &Rational::one()), c + 1);
        prop_assert_eq!(lhs, binom(&x, c + 1) + binom(&x, c));
    }

    #[test]
    fn binom_matches_integer_table(n in 0i64..40, k in 0u64..45) {
        // Pascal's triangle row by row, independent of the falling factorial
        let mut row = vec![BigInt::one()];
        for _ in 0..n {
            let mut next = vec![BigInt::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        let want = row.get(k as usize).cloned().unwrap_or_else(BigInt::zero);
        prop_assert_eq!(binom(&Rational::from(n), k), Rational::from_integer(want));
    }

    #[test]
    fn factorization_multiplies_back(n in 1u64..2_000_000) {
        let f = factorize(n).unwrap();
        let product: u64 = f.factors().iter().map(|&(p, r)| p.pow(r)).product();
        prop_assert_eq!(product, n);
        prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn floor_log_brackets(base in 2u64..20, n in 1u64..10_000_000) {
        let e = floor_log(base, n).unwrap();
        prop_assert!(base.pow(e) <= n);
        prop_assert!((base as u128).pow(e + 1) > n as u128);
    }

    #[test]
    fn residue_ops_match_exact(p in prime(), m in 1u32..60, a in any::<i64>(), b in any::<i64>(), k in 0u64..1000) {
        let ring = ResidueRing::new(p, m).unwrap();
        let modulus = BigInt::from(ring.modulus().clone());
        let reduce = |v: BigInt| BigUint::try_from(v.mod_floor(&modulus)).unwrap();
        let (x, y) = (ring.from_i64(a), ring.from_i64(b));
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        prop_assert_eq!((&x + &y).into_value(), reduce(&a + &b));
        prop_assert_eq!((&x - &y).into_value(), reduce(&a - &b));
        prop_assert_eq!((&x * &y).into_value(), reduce(&a * &b));
        prop_assert_eq!((-&x).into_value(), reduce(-a.clone()));
        prop_assert_eq!(x.mul_small(k).into_value(), reduce(&a * k));
        prop_assert_eq!(x.pow(k % 20).into_value(), reduce(a.pow((k % 20) as u32)));
    }

    #[test]
    fn symmetric_sums_match_subsets(a in -30i64..30, len in 0i64..=12) {
        let b = a + len - 1;
        prop_assert_eq!(exact_coeffs(&elementary_symmetric_exact(a, b)), brute_force_e(a, b));
    }

    #[test]
    fn newton_endpoints(a in -200i64..200, len in 1i64..60) {
        let b = a + len - 1;
        let e = exact_coeffs(&elementary_symmetric_exact(a, b));
        prop_assert_eq!(&e[1], &BigInt::from((a..=b).sum::<i64>()));
        prop_assert_eq!(&e[len as usize], &(a..=b).map(BigInt::from).product::<BigInt>());
    }

    #[test]
    fn modular_sums_match_exact(a in -100i64..100, len in 0i64..=40, p in prime(), m in 1u32..200) {
        let b = a + len - 1;
        let exact = exact_coeffs(&elementary_symmetric_exact(a, b));
        let modp = mod_coeffs(&elementary_symmetric_mod(a, b, p, m).unwrap());
        let modulus = BigInt::from(p).pow(m);
        let want: Vec<BigInt> = exact.iter().map(|v| v.mod_floor(&modulus)).collect();
        prop_assert_eq!(modp, want);
    }

    #[test]
    fn extending_from_empty_rebuilds(a in -60i64..60, len in 0i64..=40) {
        let b = a + len - 1;
        let mut prefix = ExactPrefix::empty_exact(b);
        for x in (a..=b).rev() {
            prefix = prefix.extend(x);
        }
        prop_assert_eq!((prefix.lower(), prefix.upper()), (a, b));
        prop_assert_eq!(exact_coeffs(&prefix), exact_coeffs(&elementary_symmetric_exact(a, b)));
    }
}

#[test]
fn legendre_matches_factorial() {
    for p in (2u64..=50).filter(|&p| factorize(p).unwrap().as_prime_power() == Some((p, 1))) {
        let mut fact = BigInt::one();
        for n in 0u64..=200 {
            if n > 0 {
                fact *= n;
            }
            let want = vp(p, &Rational::from_integer(fact.clone())).unwrap();
            assert_eq!(Valuation::Finite(vp_factorial(p, n).unwrap() as i64), want, "p={p} n={n}");
        }
    }
}
