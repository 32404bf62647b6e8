//! Integer helpers shared by the schedules and color reductions.

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x.is_multiple_of(2) {
        return x == 2;
    }
    let mut d = 3;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= x`, or `None` if it exceeds `cap`.
pub fn prime_at_least(x: u64, cap: u64) -> Option<u64> {
    (x.max(2)..=cap).find(|&p| is_prime(p))
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// Smallest power of two `>= x` (and `>= 1`).
pub fn next_pow2(x: u64) -> u64 {
    x.max(1).next_power_of_two()
}

/// Smallest integer `r` with `r^k >= x`.
pub fn ceil_root(x: u64, k: u32) -> u64 {
    if x <= 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).floor().max(1.0) as u64;
    while r > 1 && pow_at_least(r - 1, k, x) {
        r -= 1;
    }
    while !pow_at_least(r, k, x) {
        r += 1;
    }
    r
}

/// Whether `base^k >= x`, without overflow.
pub fn pow_at_least(base: u64, k: u32, x: u64) -> bool {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(base);
        if acc >= x {
            return true;
        }
    }
    acc >= x
}

/// Iterated logarithm: how many times `log2` must be applied to bring `x`
/// down to at most 1. `log*(1) = 0`, `log*(2) = 1`, `log*(4) = 2`, `log*(16) = 3`.
pub fn log_star(x: f64) -> u32 {
    let mut x = x;
    let mut count = 0;
    while x > 1.0 {
        x = x.log2();
        count += 1;
    }
    count
}

/// `log2` applied `times` times (`times = 0` returns `x`). Values that drop
/// to 0 or below stay there.
pub fn iterated_log2(x: f64, times: u32) -> f64 {
    let mut x = x;
    for _ in 0..times {
        if x <= 0.0 {
            return 0.0;
        }
        x = x.log2();
    }
    x
}
