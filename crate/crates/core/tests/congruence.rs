use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rootcong::arith::{factorize, vp, Rational, Valuation};
use rootcong::congruence::{
    check_direct, congruence_holds_at, congruent_mod, root_average_excess, sum_valuation,
    CongruenceInstance, DirectVerdict,
};

fn q(n: i64) -> Rational {
    Rational::from(n)
}

/// `d^{kt} / ∏ I`.
fn summand(d: i64, kt: u32, denominators: &[i64]) -> Rational {
    let denom: BigInt = denominators.iter().map(|&i| BigInt::from(i)).product();
    Rational::new(BigInt::from(d).pow(kt), denom).unwrap()
}

fn v(p: u64, x: &Rational) -> i64 {
    vp(p, x).unwrap().finite().unwrap()
}

/// All `kt`-subsets of {-c..-1} with their summand, for small `c`.
fn summands(t: u64, d: i64, c: u64) -> Vec<(Vec<i64>, Rational)> {
    let xs: Vec<i64> = (1..=c as i64).map(|i| -i).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << c) {
        let size = mask.count_ones() as u64;
        if size == 0 || !size.is_multiple_of(t) {
            continue;
        }
        let chosen: Vec<i64> = (0..c as usize).filter(|&i| mask >> i & 1 == 1).map(|i| xs[i]).collect();
        let s = summand(d, size as u32, &chosen);
        out.push((chosen, s));
    }
    out
}

/// At `n = -1` the excess equals `(-1)^c Σ_k Σ_{|I| = kt} d^{kt} / ∏ I`.
#[test]
fn excess_matches_reciprocal_subset_form() {
    for &(t, d, c) in &[(1u64, 4i64, 5u64), (2, 3, 7), (3, 6, 5), (3, 10, 9), (4, 12, 11), (5, 15, 13), (5, 20, 14)] {
        let sign = if c % 2 == 0 { q(1) } else { q(-1) };
        let total: Rational = summands(t, d, c).into_iter().map(|(_, s)| s).sum();
        let got = root_average_excess(&CongruenceInstance::new(t, d as u64, c, -1));
        assert_eq!(got, sign * total, "t={t} d={d} c={c}");
    }
}

/// `(t, d, c, p, minimal valuation, subsets attaining it)`.
type MinimalCase = (u64, i64, u64, u64, i64, &'static [&'static [i64]]);

/// The minimal-valuation summands named for each small failing case are
/// exactly the ones attaining the minimum, and the minimum is the reported value.
#[test]
fn minimal_summands_of_small_failures() {
    let cases: &[MinimalCase] = &[
        (3, 6, 5, 2, 0, &[&[-5, -4, -2], &[-4, -3, -2], &[-4, -2, -1]]),
        (
            5,
            20,
            18,
            2,
            -2,
            &[
                &[-16, -12, -8, -4, -2],
                &[-16, -12, -8, -6, -4],
                &[-16, -12, -10, -8, -4],
                &[-16, -14, -12, -8, -4],
                &[-18, -16, -12, -8, -4],
            ],
        ),
    ];
    for &(t, d, c, p, want, named) in cases {
        let all = summands(t, d, c);
        let min = all.iter().map(|(_, s)| v(p, s)).min().unwrap();
        assert_eq!(min, want, "t={t} d={d}");
        let mut minimal: Vec<Vec<i64>> = all
            .into_iter()
            .filter(|(_, s)| v(p, s) == min)
            .map(|(mut i, _)| {
                i.sort();
                i
            })
            .collect();
        minimal.sort();
        let mut named: Vec<Vec<i64>> = named
            .iter()
            .map(|i| {
                let mut i = i.to_vec();
                i.sort();
                i
            })
            .collect();
        named.sort();
        assert_eq!(minimal, named, "t={t} d={d}");
        assert_eq!(sum_valuation(t, d as u64, c, -1, p).unwrap(), Valuation::Finite(want));
    }
}

#[test]
fn d15_minimal_summands_sum_to_a_unit() {
    // 15^5 / (3·6·9·12·a), 3 ∤ a ≤ 13: each has ν_3 = 0 and so does their sum
    let terms: Vec<Rational> = (1..=13)
        .filter(|a| a % 3 != 0)
        .map(|a| summand(15, 5, &[-3, -6, -9, -12, -a]))
        .collect();
    assert!(terms.iter().all(|s| v(3, s) == 0));
    let sum: Rational = terms.into_iter().sum();
    assert_eq!(v(3, &sum), 0);
    assert_eq!(sum_valuation(5, 15, 13, -1, 3).unwrap(), Valuation::Finite(0));
}

#[test]
fn named_summands_of_large_failures() {
    // 512, t = 4, c = 384: three summands with ν_2 = 8
    for last in [64, 192, 320] {
        assert_eq!(v(2, &summand(512, 4, &[-256, -128, -384, -last])), 8);
    }
    // 2187, t = 4, c = 1701: 2187^4 / (729·1458·243a·243b); the sum has ν_3 = 6
    let units = [1i64, 2, 4, 5, 7];
    let mut sum = Rational::zero();
    for (i, &a) in units.iter().enumerate() {
        for &b in &units[i + 1..] {
            let s = summand(2187, 4, &[-729, -1458, -243 * a, -243 * b]);
            assert_eq!(v(3, &s), 6);
            sum = sum + s;
        }
    }
    assert_eq!(v(3, &sum), 6);
    // 4096, t = 5, c = 3072: a, b ∈ {1, 3, 5}, ν_2 = 11
    for (a, b) in [(1, 3), (1, 5), (3, 5)] {
        assert_eq!(v(2, &summand(4096, 5, &[-1024, -2048, -3072, -512 * a, -512 * b])), 11);
    }
    // 19683, t = 5, c = 15309, positive denominators: the sum is 2·3^8 mod 3^9
    let mut sum = Rational::zero();
    for (i, &a) in units.iter().enumerate() {
        for (j, &b) in units.iter().enumerate().skip(i + 1) {
            for &c in &units[j + 1..] {
                let s = summand(19683, 5, &[6561, 13122, 2187 * a, 2187 * b, 2187 * c]);
                assert_eq!(v(3, &s), 8);
                sum = sum + s;
            }
        }
    }
    assert_eq!(v(3, &sum), 8);
    let scaled = &sum / &q(3i64.pow(8));
    let residue = (scaled.numer() * modinv(scaled.denom(), 3)) % BigInt::from(3);
    assert_eq!((residue + 3) % 3, BigInt::from(2));
}

fn modinv(x: &BigInt, p: i64) -> BigInt {
    let x = ((x % p) + p) % p;
    (1..p).map(BigInt::from).find(|y| (&x * y) % p == BigInt::one()).unwrap()
}

#[test]
fn excess_vanishes_below_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let t = rng.gen_range(1..12u64);
        let c = rng.gen_range(0..t);
        let d = rng.gen_range(1..500u64);
        let n = rng.gen_range(-1000..1000i64);
        assert!(root_average_excess(&CongruenceInstance::new(t, d, c, n)).is_zero());
    }
}

/// The excess is periodic modulo d in n with period t·d!.
#[test]
fn excess_is_periodic_in_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in 1..=6u64 {
        let dfact: i64 = (1..=d as i64).product();
        for t in 1..=4u64 {
            let period = t as i64 * dfact;
            for c in 0..d {
                for _ in 0..4 {
                    let n1 = rng.gen_range(-200..200i64);
                    let n2 = n1 + rng.gen_range(-3..=3i64) * period;
                    let a = root_average_excess(&CongruenceInstance::new(t, d, c, n1));
                    let b = root_average_excess(&CongruenceInstance::new(t, d, c, n2));
                    assert!(congruent_mod(&a, &b, d).unwrap(), "t={t} d={d} c={c} n={n1},{n2}");
                }
            }
        }
    }
}

/// Complements the t <= 4 acceptance run with t = 5, 6.
#[test]
fn holding_moduli_hold_at_every_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in 5..=6u64 {
        for d in 1..=40u64 {
            if check_direct(t, d, -1, &[]).unwrap().verdict != DirectVerdict::Holds {
                continue;
            }
            for _ in 0..5 {
                let n = rng.gen_range(-100..=100i64);
                for c in 0..d {
                    assert!(congruence_holds_at(t, d, c, n).unwrap(), "t={t} d={d} c={c} n={n}");
                }
            }
        }
    }
}

#[test]
fn failing_moduli_fail_at_other_base_points() {
    for &(t, d) in &[(3u64, 6u64), (5, 15), (5, 20), (4, 12), (2, 6)] {
        for n0 in [-1i64, 0, 7, -13] {
            let out = check_direct(t, d, n0, &[]).unwrap();
            assert_eq!(out.verdict, DirectVerdict::Fails, "t={t} d={d} n0={n0}");
        }
    }
}

#[test]
fn direct_check_reports_every_prime() {
    let out = check_direct(5, 20, -1, &[18]).unwrap();
    assert_eq!(out.failing_c, Some(18));
    let primes: Vec<u64> = out.reports.iter().map(|r| r.prime).collect();
    assert_eq!(primes, factorize(20).unwrap().primes().collect::<Vec<_>>());
    let two = out.witness().unwrap();
    assert_eq!((two.prime, two.required, two.found), (2, 2, Valuation::Finite(-2)));
}
