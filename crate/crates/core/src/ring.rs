//! Exact arithmetic in Z[ω] with ω = e^{iπ/4} and in its real subring
//! Z[√2], together with conjugation, the √2 ↦ −√2 automorphism, norms,
//! and the smallest denominator exponent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RingError {
    #[error("element {0} is not in Z[sqrt2]")]
    NotInRealSubring(String),
    #[error("cannot parse {0:?} as {1}")]
    Parse(String, &'static str),
}

/// Element c0 + c1·ω + c2·ω² + c3·ω³ of Z[ω]; ω⁴ = −1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZOmega {
    c: [BigInt; 4],
}

/// Element a + b·√2 of Z[√2].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZSqrt2 {
    pub a: BigInt,
    pub b: BigInt,
}

/// Result of the sde function: an integer, or BOTTOM for sde(0).
///
/// BOTTOM deliberately supports no order comparisons; extract with
/// [`SdeValue::finite`] or [`SdeValue::expect_finite`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SdeValue {
    Bottom,
    Finite(i64),
}

impl SdeValue {
    pub fn finite(self) -> Option<i64> {
        match self {
            SdeValue::Bottom => None,
            SdeValue::Finite(v) => Some(v),
        }
    }

    pub fn expect_finite(self, what: &str) -> i64 {
        self.finite().unwrap_or_else(|| panic!("sde of zero while computing {what}"))
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, SdeValue::Bottom)
    }
}

impl ZOmega {
    pub fn new(c0: impl Into<BigInt>, c1: impl Into<BigInt>, c2: impl Into<BigInt>, c3: impl Into<BigInt>) -> Self {
        ZOmega { c: [c0.into(), c1.into(), c2.into(), c3.into()] }
    }

    pub fn from_coeffs(c: [BigInt; 4]) -> Self {
        ZOmega { c }
    }

    pub fn zero() -> Self {
        ZOmega::new(0, 0, 0, 0)
    }

    pub fn one() -> Self {
        ZOmega::new(1, 0, 0, 0)
    }

    pub fn omega() -> Self {
        ZOmega::new(0, 1, 0, 0)
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Complex conjugation: ω ↦ ω⁻¹ = −ω³.
    pub fn conj(&self) -> ZOmega {
        let [c0, c1, c2, c3] = &self.c;
        ZOmega { c: [c0.clone(), -c3, -c2, -c1] }
    }

    /// Ring automorphism ω ↦ −ω (hence √2 ↦ −√2).
    pub fn aut(&self) -> ZOmega {
        let [c0, c1, c2, c3] = &self.c;
        ZOmega { c: [c0.clone(), -c1, c2.clone(), -c3] }
    }

    /// u·conj(u), which always lands in the real subring.
    pub fn abs_sq(&self) -> ZSqrt2 {
        let p = self * &self.conj();
        let [c0, c1, c2, c3] = p.c;
        assert!(c2.is_zero() && c1 == -&c3, "abs_sq left the real subring");
        ZSqrt2 { a: c0, b: c1 }
    }

    /// Multiplication by ω^k for k in 0..8 (cyclic shift with ω⁴ = −1).
    pub fn mul_omega_pow(&self, k: u8) -> ZOmega {
        let mut c = self.c.clone();
        for _ in 0..(k % 8) {
            let [c0, c1, c2, c3] = c;
            c = [-c3, c0, c1, c2];
        }
        ZOmega { c }
    }

    /// Multiplication by √2 = ω − ω³.
    pub fn mul_sqrt2(&self) -> ZOmega {
        let [a0, a1, a2, a3] = &self.c;
        ZOmega { c: [a1 - a3, a0 + a2, a1 + a3, a2 - a0] }
    }

    /// Exact division by √2 when all four result coefficients are integral.
    pub fn div_sqrt2(&self) -> Option<ZOmega> {
        let [a0, a1, a2, a3] = &self.c;
        let d0 = a1 - a3;
        let d1 = a0 + a2;
        let d2 = a1 + a3;
        let d3 = a2 - a0;
        if d0.is_even() && d1.is_even() && d2.is_even() && d3.is_even() {
            Some(ZOmega { c: [d0 / 2, d1 / 2, d2 / 2, d3 / 2] })
        } else {
            None
        }
    }

    /// Least m with √2^m·(self/√2^denom_exp) in Z[ω]; BOTTOM for zero.
    pub fn sde(&self, denom_exp: i64) -> SdeValue {
        if self.is_zero() {
            return SdeValue::Bottom;
        }
        let mut m = denom_exp;
        let mut w = self.clone();
        while let Some(half) = w.div_sqrt2() {
            w = half;
            m -= 1;
        }
        SdeValue::Finite(m)
    }

    /// Checked downcast into Z[√2].
    pub fn to_zsqrt2(&self) -> Result<ZSqrt2, RingError> {
        let [c0, c1, c2, c3] = &self.c;
        if c2.is_zero() && *c1 == -c3 {
            Ok(ZSqrt2 { a: c0.clone(), b: c1.clone() })
        } else {
            Err(RingError::NotInRealSubring(self.to_string()))
        }
    }

    pub fn pow(&self, e: u32) -> ZOmega {
        let mut acc = ZOmega::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Numeric embedding (re, im) with ω = (1+i)/√2; for tests and reports.
    pub fn embed_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let f = |i: usize| self.c[i].to_f64().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (f(0) + (f(1) - f(3)) * s, f(2) + (f(1) + f(3)) * s)
    }
}

impl ZSqrt2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        ZSqrt2 { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        ZSqrt2::new(0, 0)
    }

    pub fn one() -> Self {
        ZSqrt2::new(1, 0)
    }

    pub fn sqrt2() -> Self {
        ZSqrt2::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The automorphism a + b√2 ↦ a − b√2.
    pub fn aut2(&self) -> ZSqrt2 {
        ZSqrt2 { a: self.a.clone(), b: -&self.b }
    }

    /// Field norm N(a + b√2) = a² − 2b².
    pub fn norm_z(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(2) * &self.b * &self.b
    }

    /// Embedding into Z[ω] via √2 = ω − ω³.
    pub fn embed(&self) -> ZOmega {
        ZOmega { c: [self.a.clone(), self.b.clone(), BigInt::zero(), -&self.b] }
    }

    pub fn mul_sqrt2(&self) -> ZSqrt2 {
        ZSqrt2 { a: BigInt::from(2) * &self.b, b: self.a.clone() }
    }

    pub fn div_sqrt2(&self) -> Option<ZSqrt2> {
        if self.a.is_even() {
            Some(ZSqrt2 { a: self.b.clone(), b: &self.a / 2 })
        } else {
            None
        }
    }

    /// Least m with √2^m·(self/√2^denom_exp) in Z[√2]; BOTTOM for zero.
    pub fn sde(&self, denom_exp: i64) -> SdeValue {
        if self.is_zero() {
            return SdeValue::Bottom;
        }
        let mut m = denom_exp;
        let mut w = self.clone();
        while let Some(half) = w.div_sqrt2() {
            w = half;
            m -= 1;
        }
        SdeValue::Finite(m)
    }

    /// Sign of the real value a + b√2, decided exactly.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        use num_bigint::Sign::*;
        match (sa, sb) {
            (NoSign, NoSign) => Ordering::Equal,
            (Plus | NoSign, Plus | NoSign) => Ordering::Greater,
            (Minus | NoSign, Minus | NoSign) => Ordering::Less,
            _ => {
                // opposite signs: compare a² with 2b² (equality impossible)
                let cmp = (&self.a * &self.a).cmp(&(BigInt::from(2) * &self.b * &self.b));
                match (sa, cmp) {
                    (Plus, Ordering::Greater) => Ordering::Greater,
                    (Plus, _) => Ordering::Less,
                    (Minus, Ordering::Greater) => Ordering::Less,
                    (Minus, _) => Ordering::Greater,
                    (NoSign, _) => unreachable!(),
                }
            }
        }
    }

    /// Both embeddings non-negative (strictly positive for nonzero values).
    pub fn is_totally_positive(&self) -> bool {
        self.signum() != Ordering::Less && self.aut2().signum() != Ordering::Less
    }

    pub fn pow(&self, e: u32) -> ZSqrt2 {
        let mut acc = ZSqrt2::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * std::f64::consts::SQRT_2
    }
}

impl From<&ZSqrt2> for ZOmega {
    fn from(v: &ZSqrt2) -> Self {
        v.embed()
    }
}

impl<'a, 'b> Add<&'b ZOmega> for &'a ZOmega {
    type Output = ZOmega;
    fn add(self, rhs: &'b ZOmega) -> ZOmega {
        ZOmega {
            c: [&self.c[0] + &rhs.c[0], &self.c[1] + &rhs.c[1], &self.c[2] + &rhs.c[2], &self.c[3] + &rhs.c[3]],
        }
    }
}

impl<'a, 'b> Sub<&'b ZOmega> for &'a ZOmega {
    type Output = ZOmega;
    fn sub(self, rhs: &'b ZOmega) -> ZOmega {
        ZOmega {
            c: [&self.c[0] - &rhs.c[0], &self.c[1] - &rhs.c[1], &self.c[2] - &rhs.c[2], &self.c[3] - &rhs.c[3]],
        }
    }
}

impl<'a, 'b> Mul<&'b ZOmega> for &'a ZOmega {
    type Output = ZOmega;
    fn mul(self, rhs: &'b ZOmega) -> ZOmega {
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &rhs.c;
        // ω^{i+j} wraps with ω⁴ = −1
        ZOmega {
            c: [
                a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1,
                a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2,
                a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3,
                a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0,
            ],
        }
    }
}

impl Neg for &ZOmega {
    type Output = ZOmega;
    fn neg(self) -> ZOmega {
        ZOmega { c: [-&self.c[0], -&self.c[1], -&self.c[2], -&self.c[3]] }
    }
}

impl<'a, 'b> Add<&'b ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn add(self, rhs: &'b ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl<'a, 'b> Sub<&'b ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn sub(self, rhs: &'b ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl<'a, 'b> Mul<&'b ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn mul(self, rhs: &'b ZSqrt2) -> ZSqrt2 {
        ZSqrt2 {
            a: &self.a * &rhs.a + BigInt::from(2) * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for &ZSqrt2 {
    type Output = ZSqrt2;
    fn neg(self) -> ZSqrt2 {
        ZSqrt2 { a: -&self.a, b: -&self.b }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(ZOmega);
owned_ops!(ZSqrt2);

fn write_term(f: &mut fmt::Formatter<'_>, coeff: &BigInt, sym: &str, first: &mut bool) -> fmt::Result {
    if coeff.is_zero() {
        return Ok(());
    }
    let neg = coeff.is_negative();
    if *first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, "-")?;
    } else {
        write!(f, "+")?;
    }
    *first = false;
    let mag = coeff.abs();
    if sym.is_empty() {
        write!(f, "{}", mag)?;
    } else if mag == BigInt::from(1) {
        write!(f, "{}", sym)?;
    } else {
        write!(f, "{}*{}", mag, sym)?;
    }
    Ok(())
}

impl fmt::Display for ZOmega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        write_term(f, &self.c[0], "", &mut first)?;
        write_term(f, &self.c[1], "w", &mut first)?;
        write_term(f, &self.c[2], "w^2", &mut first)?;
        write_term(f, &self.c[3], "w^3", &mut first)
    }
}

impl fmt::Display for ZSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        write_term(f, &self.a, "", &mut first)?;
        write_term(f, &self.b, "r2", &mut first)
    }
}

impl fmt::Debug for ZOmega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Debug for ZSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Splits "3+5*w-3*w^2-2*w^3" style input into (sign, magnitude, symbol) terms.
fn parse_terms(s: &str) -> Option<Vec<(bool, Option<BigInt>, String)>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let neg = match rest.as_bytes()[0] {
            b'-' => {
                rest = &rest[1..];
                true
            }
            b'+' => {
                rest = &rest[1..];
                false
            }
            _ => false,
        };
        let end = rest
            .char_indices()
            .find(|(i, ch)| *i > 0 && (*ch == '+' || *ch == '-'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        if term.is_empty() {
            return None;
        }
        let (num_part, sym_part) = match term.find(|c: char| !c.is_ascii_digit()) {
            None => (term, ""),
            Some(0) => ("", term),
            Some(i) => (&term[..i], &term[i..]),
        };
        let sym = sym_part.strip_prefix('*').unwrap_or(sym_part);
        let mag = if num_part.is_empty() {
            None
        } else {
            Some(BigInt::from_str(num_part).ok()?)
        };
        terms.push((neg, mag, sym.to_string()));
    }
    Some(terms)
}

impl FromStr for ZOmega {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RingError::Parse(s.to_string(), "ZOmega");
        let terms = parse_terms(s).ok_or_else(err)?;
        let mut c = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (neg, mag, sym) in terms {
            let idx = match sym.as_str() {
                "" => 0,
                "w" | "w^1" => 1,
                "w^2" => 2,
                "w^3" => 3,
                _ => return Err(err()),
            };
            if idx == 0 && mag.is_none() {
                return Err(err());
            }
            let mag = mag.unwrap_or_else(|| BigInt::from(1));
            c[idx] += if neg { -mag } else { mag };
        }
        Ok(ZOmega { c })
    }
}

impl FromStr for ZSqrt2 {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RingError::Parse(s.to_string(), "ZSqrt2");
        let terms = parse_terms(s).ok_or_else(err)?;
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        for (neg, mag, sym) in terms {
            let slot = match sym.as_str() {
                "" => &mut a,
                "r2" => &mut b,
                _ => return Err(err()),
            };
            if sym.is_empty() && mag.is_none() {
                return Err(err());
            }
            let mag = mag.unwrap_or_else(|| BigInt::from(1));
            *slot += if neg { -mag } else { mag };
        }
        Ok(ZSqrt2 { a, b })
    }
}
