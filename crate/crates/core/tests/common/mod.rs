//! Worked classifications for small t, used as fixtures by several test targets.

#![allow(dead_code)]

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// `Some((p, r))` when `d = p^r` with `r >= 1`.
pub fn prime_power(d: u64) -> Option<(u64, u32)> {
    let p = (2..=d).find(|k| d.is_multiple_of(*k))?;
    let mut r = 0;
    let mut m = d;
    while m.is_multiple_of(p) {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

/// Moduli satisfying `C_t` according to the worked tables for `t <= 5`.
pub fn holds_in_table(t: u64, d: u64) -> bool {
    let extra: &[u64] = match t {
        1 => &[1],
        2 => &[1, 8],
        3 => &[1, 16, 32, 81],
        4 => &[1, 6, 32, 64, 128, 243, 256, 729],
        5 => &[1, 6, 12, 64, 128, 256, 512, 729, 1024, 2048, 2187, 6561, 15625],
        _ => panic!("no table for t = {t}"),
    };
    extra.contains(&d) || matches!(prime_power(d), Some((_, r)) if r as u64 <= t)
}
