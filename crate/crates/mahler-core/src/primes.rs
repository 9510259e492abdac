//! Integer factorization: trial division below 2^20, then deterministic
//! Miller-Rabin and Brent's variant of Pollard's rho for the hard cofactor.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_BOUND: u64 = 1 << 20;

/// Deterministic Miller-Rabin witness set for all 64-bit inputs.
const MR_WITNESSES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Returns the prime multiset of `n` in non-increasing order.
///
/// `factor_integer(1)` is the empty multiset; zero is rejected.
pub fn factor_integer(n: &BigUint) -> Result<Vec<BigUint>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut factors: Vec<BigUint> = Vec::new();
    if let Some(small) = n.to_u64() {
        let mut buf = Vec::new();
        factor_u64(small, &mut buf);
        factors.extend(buf.into_iter().map(BigUint::from));
    } else {
        factor_big(n.clone(), &mut factors);
    }
    factors.sort_unstable_by(|a, b| b.cmp(a));
    Ok(factors)
}

/// Primality test used for primitivity checks; exact for any size input.
pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(small) => is_prime_u64(small),
        None => is_prime_big(n),
    }
}

fn factor_u64(mut n: u64, out: &mut Vec<u64>) {
    if n <= 1 {
        return;
    }
    while n.is_multiple_of(2) {
        out.push(2);
        n /= 2;
    }
    let mut d = 3u64;
    while d < TRIAL_BOUND && d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 2;
    }
    if n == 1 {
        return;
    }
    if d * d > n {
        out.push(n);
        return;
    }
    factor_u64_hard(n, out);
}

/// `n` has no prime factor below `TRIAL_BOUND` here.
fn factor_u64_hard(n: u64, out: &mut Vec<u64>) {
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = rho_u64(n);
    factor_u64_hard(d, out);
    factor_u64_hard(n / d, out);
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let t = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES_U64 {
        let mut x = pow_mod_u64(a, t, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Brent's cycle-finding rho; `n` must be odd, composite, and > 1.
/// The polynomial offset is escalated deterministically until a factor splits.
fn rho_u64(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && !is_prime_u64(n));
    for c in 1u64.. {
        if let Some(d) = brent_u64(n, c) {
            return d;
        }
    }
    unreachable!("composite input must eventually split");
}

fn brent_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let m = 128.min(r - k);
            for _ in 0..m {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
        }
        r <<= 1;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn factor_big(mut n: BigUint, out: &mut Vec<BigUint>) {
    let two = BigUint::from(2u32);
    while n.is_even() {
        out.push(two.clone());
        n /= &two;
    }
    let mut d = 3u64;
    while d < (1 << 16) {
        let big_d = BigUint::from(d);
        if (&big_d * &big_d) > n {
            break;
        }
        while (&n % &big_d).is_zero() {
            out.push(big_d.clone());
            n /= &big_d;
        }
        d += 2;
    }
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        let mut buf = Vec::new();
        factor_u64(small, &mut buf);
        out.extend(buf.into_iter().map(BigUint::from));
        return;
    }
    factor_big_hard(n, out);
}

fn factor_big_hard(n: BigUint, out: &mut Vec<BigUint>) {
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let q = &n / &d;
    for part in [d, q] {
        if let Some(small) = part.to_u64() {
            let mut buf = Vec::new();
            factor_u64(small, &mut buf);
            out.extend(buf.into_iter().map(BigUint::from));
        } else {
            factor_big_hard(part, out);
        }
    }
}

/// Miller-Rabin over the first 40 prime bases; exact far beyond any input
/// this crate can otherwise process.
fn is_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if n.is_even() {
        return *n == two;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let t = &n_minus_1 >> s;
    let bases: [u64; 40] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
        97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
    ];
    'witness: for &a in &bases {
        let a = BigUint::from(a);
        if &a % n == BigUint::zero() {
            continue;
        }
        let mut x = a.modpow(&t, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    for c in 1u64.. {
        if let Some(d) = brent_big(n, c) {
            return d;
        }
    }
    unreachable!("composite input must eventually split");
}

fn brent_big(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let one = BigUint::one();
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0u64;
        while k < r && g.is_one() {
            ys = y.clone();
            let m = 64.min(r - k);
            for _ in 0..m {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r <<= 1;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g > one {
                break;
            }
        }
    }
    if g == *n {
        None
    } else {
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors_of(n: u64) -> Vec<u64> {
        factor_integer(&BigUint::from(n))
            .unwrap()
            .into_iter()
            .map(|p| p.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn one_has_empty_factorization() {
        assert!(factors_of(1).is_empty());
    }

    #[test]
    fn zero_is_rejected() {
        assert!(factor_integer(&BigUint::zero()).is_err());
    }

    #[test]
    fn small_composites() {
        assert_eq!(factors_of(858), vec![13, 11, 3, 2]);
        assert_eq!(factors_of(549_010), vec![31, 23, 11, 7, 5, 2]);
        assert_eq!(factors_of(316_889), vec![131, 59, 41]);
        assert_eq!(factors_of(1024), vec![2; 10]);
    }

    #[test]
    fn round_trip_to_a_million() {
        for n in 2u64..=1_000_000 {
            let fs = {
                let mut buf = Vec::new();
                factor_u64(n, &mut buf);
                buf
            };
            let prod: u64 = fs.iter().product();
            assert_eq!(prod, n, "product of factors of {n}");
            for &p in &fs {
                debug_assert!(is_prime_u64(p));
            }
        }
    }

    #[test]
    fn round_trip_random_64_bit() {
        // Deterministic xorshift stream; checks the rho/Miller-Rabin path.
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..100 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let n = state | 1;
            let fs = factors_of(n);
            let mut prod = BigUint::one();
            for p in &fs {
                assert!(is_prime(&BigUint::from(*p)));
                prod *= BigUint::from(*p);
            }
            assert_eq!(prod, BigUint::from(n));
        }
    }

    #[test]
    fn big_inputs_factor_exactly() {
        // 2^89 - 1 = 618970019642690137449562111 is prime.
        let m89 = (BigUint::one() << 89u32) - BigUint::one();
        assert!(is_prime(&m89));
        let n = &m89 * BigUint::from(1_000_003u64);
        let fs = factor_integer(&n).unwrap();
        assert_eq!(fs, vec![m89, BigUint::from(1_000_003u64)]);
    }

    #[test]
    fn semiprime_beyond_trial_range() {
        let p = 1_048_583u64; // first prime past 2^20
        let q = 1_048_589u64;
        assert_eq!(factors_of(p * q), vec![q, p]);
    }
}
