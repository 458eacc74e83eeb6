//! Solvability and complete enumeration of |y|² = A + B√2 over Z[ω]:
//! integer factorization of the field norm, prime splitting in Z[√2],
//! per-class solvers through Z[i] and Z[i√2], and unit balancing.

mod intfactor;

pub use intfactor::{factor_integer, is_prime, sqrt_mod, FactorError, FACTOR_DEADLINE};

use crate::ring::{ZOmega, ZSqrt2};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::time::Duration;

/// Nearest integer to x/n for n > 0, halves rounding up.
fn div_round(x: &BigInt, n: &BigInt) -> BigInt {
    debug_assert!(n.is_positive());
    (x + x + n).div_floor(&(n + n))
}

/// Exact quotient a/b in Z[√2] when b divides a.
fn zs_exact_div(a: &ZSqrt2, b: &ZSqrt2) -> Option<ZSqrt2> {
    let n = b.norm_z();
    if n.is_zero() {
        return None;
    }
    let num = a * &b.aut2();
    let (qa, ra) = num.a.div_rem(&n);
    let (qb, rb) = num.b.div_rem(&n);
    (ra.is_zero() && rb.is_zero()).then(|| ZSqrt2::new(qa, qb))
}

/// Euclidean gcd in Z[√2]; coordinate rounding keeps |N| strictly shrinking.
fn zs_gcd(a: &ZSqrt2, b: &ZSqrt2) -> ZSqrt2 {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let mut num = &a * &b.aut2();
        let mut n = b.norm_z();
        if n.is_negative() {
            num = -&num;
            n = -n;
        }
        let q = ZSqrt2::new(div_round(&num.a, &n), div_round(&num.b, &n));
        let r = &a - &(&q * &b);
        assert!(r.norm_z().abs() < n, "division stalled in Z[sqrt2]");
        a = b;
        b = r;
    }
    a
}

/// N(u) = |u|²·Aut(|u|²), a non-negative rational integer.
fn zw_norm(u: &ZOmega) -> BigInt {
    if u.is_zero() {
        BigInt::zero()
    } else {
        u.abs_sq().norm_z()
    }
}

/// Remainder of a modulo b in Z[ω]: coordinate rounding with a ±1
/// neighborhood fallback, since rounding alone does not always shrink N.
fn zw_mod(a: &ZOmega, b: &ZOmega) -> ZOmega {
    let bb = b.abs_sq();
    let nb = bb.norm_z();
    debug_assert!(nb.is_positive());
    let num = &(a * &b.conj()) * &bb.aut2().embed();
    let q0: [BigInt; 4] = std::array::from_fn(|i| div_round(&num.coeffs()[i], &nb));
    let center = a - &(&ZOmega::from_coeffs(q0.clone()) * b);
    if zw_norm(&center) < nb {
        return center;
    }
    let mut best: Option<(BigInt, ZOmega)> = None;
    for d0 in -1i64..=1 {
        for d1 in -1i64..=1 {
            for d2 in -1i64..=1 {
                for d3 in -1i64..=1 {
                    let q = ZOmega::from_coeffs([
                        &q0[0] + d0,
                        &q0[1] + d1,
                        &q0[2] + d2,
                        &q0[3] + d3,
                    ]);
                    let r = a - &(&q * b);
                    let nr = zw_norm(&r);
                    if best.as_ref().map_or(true, |(bn, _)| nr < *bn) {
                        best = Some((nr, r));
                    }
                }
            }
        }
    }
    let (nr, r) = best.unwrap();
    assert!(nr < nb, "division stalled in Z[omega]");
    r
}

fn zw_gcd(a: &ZOmega, b: &ZOmega) -> ZOmega {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = zw_mod(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Euclidean gcd of a + b·θ pairs where θ² = −w (w = 1 gives Z[i], w = 2
/// gives Z[i√2]); both are norm-Euclidean under coordinate rounding.
fn pair_gcd(a: (BigInt, BigInt), b: (BigInt, BigInt), w: u32) -> (BigInt, BigInt) {
    let w = BigInt::from(w);
    let mut a = a;
    let mut b = b;
    while !(b.0.is_zero() && b.1.is_zero()) {
        let n = &b.0 * &b.0 + &w * &b.1 * &b.1;
        let re = &a.0 * &b.0 + &w * &a.1 * &b.1;
        let im = &a.1 * &b.0 - &a.0 * &b.1;
        let q = (div_round(&re, &n), div_round(&im, &n));
        let r = (
            &a.0 - &(&q.0 * &b.0 - &w * &q.1 * &b.1),
            &a.1 - &(&q.0 * &b.1 + &q.1 * &b.0),
        );
        a = b;
        b = r;
    }
    a
}

/// (√2−1)^e for any integer exponent.
fn unit_pow(e: i64) -> ZSqrt2 {
    let base = if e >= 0 { ZSqrt2::new(-1, 1) } else { ZSqrt2::new(1, 1) };
    base.pow(e.unsigned_abs().try_into().expect("unit exponent fits u32"))
}

/// Writes a unit of Z[√2] as sign·(√2−1)^e.
fn unit_decompose(u: &ZSqrt2) -> (i8, i64) {
    assert!(u.norm_z().abs().is_one(), "not a unit: {u}");
    let lambda = ZSqrt2::new(1, 1);
    let lambda_inv = ZSqrt2::new(-1, 1);
    let measure = |z: &ZSqrt2| z.a.abs() + z.b.abs();
    let mut v = u.clone();
    let mut e = 0i64;
    while !v.b.is_zero() {
        let shrunk = &v * &lambda;
        if measure(&shrunk) < measure(&v) {
            v = shrunk;
            e += 1;
            continue;
        }
        let shrunk = &v * &lambda_inv;
        assert!(measure(&shrunk) < measure(&v), "unit reduction stalled at {v}");
        v = shrunk;
        e -= 1;
    }
    (if v.a.is_one() { 1 } else { -1 }, e)
}

/// Minimizes the rational part over the totally positive unit orbit.
fn orbit_min(z: &ZSqrt2) -> ZSqrt2 {
    let down = ZSqrt2::new(3, -2);
    let up = ZSqrt2::new(3, 2);
    let mut z = z.clone();
    loop {
        let c = &z * &down;
        if c.a.abs() < z.a.abs() {
            z = c;
            continue;
        }
        let c = &z * &up;
        if c.a.abs() < z.a.abs() {
            z = c;
            continue;
        }
        return z;
    }
}

/// The canonical prime of Z[√2] above a rational prime p ≡ ±1 (mod 8):
/// norm +p, totally positive, minimal rational part, lexicographically least
/// of the two conjugates.
pub fn split_prime_zsqrt2(p: &BigInt) -> ZSqrt2 {
    let pm8 = p.mod_floor(&BigInt::from(8));
    assert!(
        pm8.is_one() || pm8 == BigInt::from(7),
        "{p} does not split in Z[sqrt2]"
    );
    let t = sqrt_mod(&BigInt::from(2), p).expect("2 is a residue mod p");
    let g = zs_gcd(&ZSqrt2::new(p.clone(), 0), &ZSqrt2::new(t, -1));
    assert!(g.norm_z().abs() == *p, "gcd lost the prime above {p}");
    let mut pi = g;
    if pi.norm_z().is_negative() {
        pi = &pi * &ZSqrt2::new(-1, 1);
    }
    if pi.signum() == Ordering::Less {
        pi = -&pi;
    }
    debug_assert!(pi.is_totally_positive());
    let a = orbit_min(&pi);
    let b = orbit_min(&pi.aut2());
    if (&b.a, &b.b) < (&a.a, &a.b) {
        b
    } else {
        a
    }
}

/// One factor π^k·Aut(π)^k' of a right-hand side, over the rational prime
/// p = π·Aut(π) ≡ ±1 (mod 8).
#[derive(Clone, Debug)]
pub struct SplitFactor {
    pub prime: BigInt,
    pub pi: ZSqrt2,
    pub exp: u32,
    pub conj_exp: u32,
}

/// One factor q^l over a rational prime q ≡ ±3 (mod 8), inert in Z[√2].
#[derive(Clone, Debug)]
pub struct InertFactor {
    pub prime: BigInt,
    pub exp: u32,
}

/// Decomposition sign·(√2−1)^unit_exp·√2^sqrt2_exp·∏π^k·Aut(π)^k'·∏q^l.
#[derive(Clone, Debug)]
pub struct RhsFactorization {
    pub sign: i8,
    pub unit_exp: i64,
    pub sqrt2_exp: u32,
    pub split: Vec<SplitFactor>,
    pub inert: Vec<InertFactor>,
}

impl RhsFactorization {
    /// Multiplies the recorded factors back together.
    pub fn recompose(&self) -> ZSqrt2 {
        let mut out = unit_pow(self.unit_exp);
        if self.sign < 0 {
            out = -&out;
        }
        for _ in 0..self.sqrt2_exp {
            out = out.mul_sqrt2();
        }
        for f in &self.split {
            out = &out * &f.pi.pow(f.exp);
            out = &out * &f.pi.aut2().pow(f.conj_exp);
        }
        for f in &self.inert {
            out = &out * &ZSqrt2::new(f.prime.clone(), 0).pow(f.exp);
        }
        out
    }
}

/// Factors a nonzero element of Z[√2] into the canonical prime decomposition,
/// within the default factorization budget.
pub fn factor_rhs(rhs: &ZSqrt2) -> Result<RhsFactorization, FactorError> {
    factor_rhs_with_budget(rhs, FACTOR_DEADLINE)
}

pub fn factor_rhs_with_budget(
    rhs: &ZSqrt2,
    budget: Duration,
) -> Result<RhsFactorization, FactorError> {
    assert!(!rhs.is_zero(), "zero has no prime decomposition");
    let mut rest = rhs.clone();
    let mut sqrt2_exp = 0u32;
    while let Some(h) = rest.div_sqrt2() {
        rest = h;
        sqrt2_exp += 1;
    }
    let n = rest.norm_z();
    let mut split = Vec::new();
    let mut inert = Vec::new();
    for (p, e) in factor_integer(&n.abs(), budget)? {
        let pm8 = p.mod_floor(&BigInt::from(8));
        if pm8.is_one() || pm8 == BigInt::from(7) {
            let pi = split_prime_zsqrt2(&p);
            let mut exp = 0u32;
            while let Some(q) = zs_exact_div(&rest, &pi) {
                rest = q;
                exp += 1;
            }
            let conj = pi.aut2();
            let mut conj_exp = 0u32;
            while let Some(q) = zs_exact_div(&rest, &conj) {
                rest = q;
                conj_exp += 1;
            }
            assert_eq!(exp + conj_exp, e, "valuations disagree with the norm at {p}");
            split.push(SplitFactor { prime: p, pi, exp, conj_exp });
        } else {
            assert!(e % 2 == 0, "inert prime {p} with odd norm exponent");
            let q = ZSqrt2::new(p.clone(), 0);
            for _ in 0..e / 2 {
                rest = zs_exact_div(&rest, &q).expect("inert prime must divide");
            }
            inert.push(InertFactor { prime: p, exp: e / 2 });
        }
    }
    let (sign, unit_exp) = unit_decompose(&rest);
    Ok(RhsFactorization { sign, unit_exp, sqrt2_exp, split, inert })
}

/// Whether |y|² = rhs has a solution y in Z[ω]: the right-hand side must be
/// totally positive and every prime of norm ≡ −1 (mod 8) must appear with
/// even exponents.
pub fn is_solvable(rhs: &ZSqrt2) -> Result<bool, FactorError> {
    if rhs.is_zero() {
        return Ok(true);
    }
    if !rhs.is_totally_positive() {
        return Ok(false);
    }
    let f = factor_rhs(rhs)?;
    Ok(f.split.iter().all(|s| {
        s.prime.mod_floor(&BigInt::from(8)).is_one()
            || (s.exp % 2 == 0 && s.conj_exp % 2 == 0)
    }))
}

/// Multiplies z by the power of the fundamental unit making |z|² = target.
fn balance_to(z: &ZOmega, target: &ZSqrt2) -> ZOmega {
    let u = zs_exact_div(&z.abs_sq(), target).expect("norm ratio must divide");
    let (sign, e) = unit_decompose(&u);
    assert!(sign == 1 && e % 2 == 0, "norm ratio must be an even unit power");
    let out = z * &unit_pow(-e / 2).embed();
    assert_eq!(out.abs_sq(), *target);
    out
}

/// y with |y|² = π for the canonical split prime π over p ≡ 1 (mod 8),
/// through the 8th root of unity mod p matching π's residue class.
fn split_prime_solution(pi: &ZSqrt2, p: &BigInt) -> ZOmega {
    let s = sqrt_mod(&BigInt::from(-1), p).expect("-1 is a residue mod p");
    let t = sqrt_mod(&s, p)
        .or_else(|| sqrt_mod(&-&s, p))
        .expect("an 8th root of unity exists mod p");
    let mut root = None;
    for cand in [t.clone(), t.modpow(&BigInt::from(3), p), p - &t, p - t.modpow(&BigInt::from(3), p)] {
        let r2 = (&cand - cand.modpow(&BigInt::from(3), p)).mod_floor(p);
        if (&pi.a + &pi.b * &r2).mod_floor(p).is_zero() {
            root = Some(cand);
            break;
        }
    }
    let root = root.expect("one 8th root matches the prime");
    let z = zw_gcd(&pi.embed(), &ZOmega::from_coeffs([-root, BigInt::one(), BigInt::zero(), BigInt::zero()]));
    assert_eq!(zw_norm(&z), *p, "gcd lost the prime above {p}");
    balance_to(&z, pi)
}

/// y with |y|² = q for an inert rational prime q ≡ ±3 (mod 8), found in the
/// quadratic subring where q splits.
fn inert_prime_solution(q: &BigInt) -> ZOmega {
    let qm8 = q.mod_floor(&BigInt::from(8));
    let y = if qm8 == BigInt::from(5) {
        let s = sqrt_mod(&BigInt::from(-1), q).expect("-1 is a residue mod q");
        let (a, b) = pair_gcd((q.clone(), BigInt::zero()), (s, BigInt::one()), 1);
        ZOmega::from_coeffs([a, BigInt::zero(), b, BigInt::zero()])
    } else {
        let s = sqrt_mod(&BigInt::from(-2), q).expect("-2 is a residue mod q");
        let (a, b) = pair_gcd((q.clone(), BigInt::zero()), (s, BigInt::one()), 2);
        ZOmega::from_coeffs([a, b.clone(), BigInt::zero(), b])
    };
    assert_eq!(y.abs_sq(), ZSqrt2::new(q.clone(), 0), "norm check above {q}");
    y
}

/// z^e·conj(z)^{k−e} for e = 0..=k.
fn conj_mixes(z: &ZOmega, k: u32) -> Vec<ZOmega> {
    let zc = z.conj();
    (0..=k).map(|e| &z.pow(e) * &zc.pow(k - e)).collect()
}

/// The complete solution set of |y|² = rhs, sorted by coefficients.
///
/// Solutions combine the forced ramified and unit parts with, independently,
/// ω^g phases, per-split-prime conjugate mixes, and per-inert-prime
/// conjugate mixes; unsolvable right-hand sides give the empty set.
pub fn solve_all(rhs: &ZSqrt2) -> Result<Vec<ZOmega>, FactorError> {
    if rhs.is_zero() {
        return Ok(vec![ZOmega::zero()]);
    }
    if !rhs.is_totally_positive() {
        return Ok(vec![]);
    }
    let f = factor_rhs(rhs)?;
    for s in &f.split {
        if !s.prime.mod_floor(&BigInt::from(8)).is_one()
            && (s.exp % 2 == 1 || s.conj_exp % 2 == 1)
        {
            return Ok(vec![]);
        }
    }
    assert_eq!(f.sign, 1, "totally positive rhs has a positive unit part");
    assert!(
        (f.unit_exp - i64::from(f.sqrt2_exp)) % 2 == 0,
        "unit imbalance on a solvable rhs"
    );

    let y0 = ZOmega::new(1, -1, 0, 0);
    let mut base = y0.pow(f.sqrt2_exp);
    base = &base * &unit_pow((f.unit_exp - i64::from(f.sqrt2_exp)) / 2).embed();

    let mut alternatives: Vec<Vec<ZOmega>> = Vec::new();
    for sfac in &f.split {
        if sfac.prime.mod_floor(&BigInt::from(8)).is_one() {
            let z = split_prime_solution(&sfac.pi, &sfac.prime);
            alternatives.push(conj_mixes(&z, sfac.exp));
            let za = z.aut();
            debug_assert_eq!(za.abs_sq(), sfac.pi.aut2());
            alternatives.push(conj_mixes(&za, sfac.conj_exp));
        } else {
            base = &base * &sfac.pi.pow(sfac.exp / 2).embed();
            base = &base * &sfac.pi.aut2().pow(sfac.conj_exp / 2).embed();
        }
    }
    for ifac in &f.inert {
        alternatives.push(conj_mixes(&inert_prime_solution(&ifac.prime), ifac.exp));
    }

    let mut sols = vec![base];
    for alt in &alternatives {
        sols = sols
            .iter()
            .flat_map(|s| alt.iter().map(move |a| s * a))
            .collect();
    }
    let mut out: Vec<ZOmega> = Vec::with_capacity(sols.len() * 8);
    for s in &sols {
        for g in 0..8 {
            out.push(s.mul_omega_pow(g));
        }
    }
    for y in &out {
        assert_eq!(&y.abs_sq(), rhs, "solution check for {y}");
    }
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    out.dedup();
    Ok(out)
}
