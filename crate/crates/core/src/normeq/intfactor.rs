//! Integer primality, factorization, and modular square roots sized for
//! norm-equation right-hand sides: deterministic Miller-Rabin, trial
//! division, Brent's cycle variant of Pollard rho, and Tonelli-Shanks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("factorization exceeded its {0:?} deadline")]
    Timeout(Duration),
}

/// Default wall-clock budget for one factorization call.
pub const FACTOR_DEADLINE: Duration = Duration::from_secs(30);

const TRIAL_BOUND: u64 = 1 << 12;

fn small_primes() -> &'static [u64] {
    static CELL: OnceLock<Vec<u64>> = OnceLock::new();
    CELL.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        (0..n as u64).filter(|&i| sieve[i as usize]).collect()
    })
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn miller_rabin_round(n: &BigInt, d: &BigInt, s: u32, base: &BigInt) -> bool {
    let n1 = n - 1;
    let base = base.mod_floor(n);
    if base.is_zero() {
        return true;
    }
    let mut x = base.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Deterministic for everything below 3.3·10^24 (the 12 smallest prime
/// bases); larger inputs get 52 extra bases derived from the input itself.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let mut d: BigInt = n - 1;
    let mut s = 0u32;
    while d.is_even() {
        d /= 2;
        s += 1;
    }
    let fixed = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in fixed {
        if !miller_rabin_round(n, &d, s, &BigInt::from(b)) {
            return false;
        }
    }
    if n.bits() > 82 {
        let mut state = n.magnitude().iter_u64_digits().next().unwrap_or(1) ^ 0xD6E8_FEB8_6659_FD93;
        for _ in 0..52 {
            let b = BigInt::from(splitmix64(&mut state) | 2);
            if !miller_rabin_round(n, &d, s, &b) {
                return false;
            }
        }
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's rho on machine words; n odd, composite, free of factors below
/// the trial bound.
fn rho_u64(n: u64, deadline: Instant) -> Result<u64, FactorError> {
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    for c in 1..256u64 {
        let f = |x: u64| (mulmod(x, x) + c) % n;
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
                if Instant::now() > deadline {
                    return Err(FactorError::Timeout(FACTOR_DEADLINE));
                }
                ys = y;
                for _ in 0..128.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y));
                }
                g = gcd_u64(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return Ok(g);
        }
    }
    unreachable!("rho exhausted its polynomial offsets for {n}")
}

/// Brent's rho over BigInt for inputs past machine words.
fn rho_big(n: &BigInt, deadline: Instant) -> Result<BigInt, FactorError> {
    for c in 1..256u64 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                if Instant::now() > deadline {
                    return Err(FactorError::Timeout(FACTOR_DEADLINE));
                }
                ys = y.clone();
                for _ in 0..128.min(r - k) {
                    y = f(&y);
                    q = q * (&x - &y).abs() % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if g == *n {
            g = BigInt::one();
            while g.is_one() {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
            }
        }
        if g != *n {
            return Ok(g);
        }
    }
    unreachable!("rho exhausted its polynomial offsets for {n}")
}

fn split_composite(n: &BigInt, deadline: Instant) -> Result<BigInt, FactorError> {
    match n.to_u64() {
        Some(small) => rho_u64(small, deadline).map(BigInt::from),
        None => rho_big(n, deadline),
    }
}

/// Prime factorization of n ≥ 1, sorted by prime, as (prime, exponent)
/// pairs.  Runs against a wall-clock deadline and reports a hard error when
/// it is exceeded.
pub fn factor_integer(n: &BigInt, budget: Duration) -> Result<Vec<(BigInt, u32)>, FactorError> {
    assert!(n.is_positive(), "factor_integer needs n >= 1, got {n}");
    let deadline = Instant::now() + budget;
    let mut rest = n.clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let p = BigInt::from(p);
        if &p * &p > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            match out.iter_mut().find(|(p, _)| *p == m) {
                Some((_, e)) => *e += 1,
                None => out.push((m, 1)),
            }
            continue;
        }
        if Instant::now() > deadline {
            return Err(FactorError::Timeout(budget));
        }
        let d = split_composite(&m, deadline)?;
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    let e: BigInt = (p - 1) / 2;
    let r = a.mod_floor(p).modpow(&e, p);
    if r.is_zero() {
        0
    } else if r.is_one() {
        1
    } else {
        -1
    }
}

/// Square root of a modulo an odd prime p (Tonelli-Shanks), when one exists.
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    if *p == BigInt::from(2) {
        return Some(a);
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    if (p % 4u32) == BigInt::from(3) {
        let e: BigInt = (p + 1) / 4;
        return Some(a.modpow(&e, p));
    }
    let mut q: BigInt = p - 1;
    let mut s = 0u32;
    while q.is_even() {
        q /= 2;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while legendre(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1) / 2), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
            assert!(i < m, "lost the Tonelli-Shanks invariant");
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1) as usize), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}
