//! Thin helpers around `astro_float::BigFloat`: fixed rounding mode,
//! integer conversions, √2 powers, total ordering, and a hex encoding
//! for 256-bit serialized values.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use std::cmp::Ordering;

/// Arbitrary-precision float used throughout the search pipeline.
pub type HF = BigFloat;

/// Rounding mode for every operation in this crate.
pub const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision in bits of significand.
pub const DEFAULT_PREC: usize = 160;

/// Escalation precision used to separate near-tied candidate values.
pub const ESCALATED_PREC: usize = 512;

/// Cache of computed constants (π and friends) plus the precision that
/// trigonometric evaluations should use.
pub struct FloatCtx {
    pub prec: usize,
    cc: Consts,
}

impl FloatCtx {
    pub fn new(prec: usize) -> Self {
        FloatCtx { prec, cc: Consts::new().expect("constants cache") }
    }

    pub fn pi(&mut self) -> HF {
        self.cc.pi(self.prec, RM)
    }

    pub fn cos(&mut self, x: &HF) -> HF {
        x.cos(self.prec, RM, &mut self.cc)
    }

    pub fn sin(&mut self, x: &HF) -> HF {
        x.sin(self.prec, RM, &mut self.cc)
    }

    pub fn log2(&mut self, x: &HF) -> HF {
        x.log2(self.prec, RM, &mut self.cc)
    }

    /// Parses a decimal literal at the context precision.
    pub fn parse_decimal(&mut self, s: &str) -> HF {
        BigFloat::parse(s, Radix::Dec, self.prec, RM, &mut self.cc)
    }
}

pub fn add(a: &HF, b: &HF, p: usize) -> HF {
    a.add(b, p, RM)
}

pub fn sub(a: &HF, b: &HF, p: usize) -> HF {
    a.sub(b, p, RM)
}

pub fn mul(a: &HF, b: &HF, p: usize) -> HF {
    a.mul(b, p, RM)
}

pub fn div(a: &HF, b: &HF, p: usize) -> HF {
    a.div(b, p, RM)
}

pub fn sqrt(a: &HF, p: usize) -> HF {
    a.sqrt(p, RM)
}

pub fn from_i64(v: i64, p: usize) -> HF {
    BigFloat::from_i64(v, p)
}

/// Exact conversion of a big integer into a float (no rounding).
pub fn from_bigint(n: &BigInt, p: usize) -> HF {
    let (sign, mag) = n.clone().into_parts();
    if mag == BigUint::from(0u32) {
        return BigFloat::from_i64(0, p);
    }
    let bits = mag.bits();
    let words = mag.to_u64_digits();
    let total = words.len() as u64 * 64;
    let shifted = (&mag) << (total - bits);
    let mut m = shifted.to_u64_digits();
    while m.len() < words.len() {
        m.push(0);
    }
    let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
    let v = BigFloat::from_raw_parts(&m, m.len() * 64, s, bits as i32, false);
    if (m.len() * 64) < p {
        let mut v = v;
        v.set_precision(p, RM).expect("widen");
        v
    } else {
        v
    }
}

/// Exact integer value of a float that is already an integer (e.g. the
/// result of `floor` or `ceil`).
pub fn to_bigint_exact(x: &HF) -> BigInt {
    if x.is_zero() {
        return BigInt::from(0);
    }
    let (m, n, s, e, _) = x.as_raw_parts().expect("finite value");
    let mag = BigUint::new(m.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect());
    let n = n as i64;
    let e = e as i64;
    let mag = if e >= n { mag << (e - n) as u64 } else { mag >> (n - e) as u64 };
    let sign = if s == Sign::Neg { IntSign::Minus } else { IntSign::Plus };
    BigInt::from_biguint(sign, mag)
}

pub fn floor_to_bigint(x: &HF) -> BigInt {
    to_bigint_exact(&x.floor())
}

pub fn ceil_to_bigint(x: &HF) -> BigInt {
    to_bigint_exact(&x.ceil())
}

/// √2 at precision `p`.
pub fn sqrt2(p: usize) -> HF {
    BigFloat::from_i64(2, p).sqrt(p, RM)
}

/// √2^m for any integer m (m may be negative).
pub fn sqrt2_pow(m: i64, p: usize) -> HF {
    let half = |k: i64| -> HF {
        // exact power of two times an optional √2 factor
        let int_part = BigFloat::from_i64(1, p).mul(&pow2(k.div_euclid(2), p), p, RM);
        if k.rem_euclid(2) == 1 {
            int_part.mul(&sqrt2(p), p, RM)
        } else {
            int_part
        }
    };
    half(m)
}

/// 2^k for any integer k.
pub fn pow2(k: i64, p: usize) -> HF {
    let one = BigFloat::from_i64(1, p);
    let mut v = one.clone();
    let two = BigFloat::from_i64(2, p);
    let n = k.unsigned_abs();
    let mut base = two;
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            v = v.mul(&base, p, RM);
        }
        base = base.mul(&base, p, RM);
        n >>= 1;
    }
    if k < 0 {
        one.div(&v, p, RM)
    } else {
        v
    }
}

/// Total order on finite values (the pipeline never produces NaN).
pub fn total_cmp(a: &HF, b: &HF) -> Ordering {
    match a.cmp(b) {
        Some(c) => c.cmp(&0),
        None => panic!("NaN in float comparison"),
    }
}

pub fn min_hf(a: HF, b: HF) -> HF {
    if total_cmp(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

pub fn max_hf(a: HF, b: HF) -> HF {
    if total_cmp(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

pub fn abs_hf(a: &HF) -> HF {
    a.abs()
}

/// Tolerance for treating a tiny negative value as a rounding residue of
/// zero at precision `p`.
pub fn neg_slack(p: usize) -> HF {
    pow2(-(p as i64 - 40), p)
}

/// True when a and b are too close to call at precision `p`: their gap is
/// below 2^{-(p-30)} relative to magnitude (with an absolute floor so that
/// near-zero values compare sanely).
pub fn tie_close(a: &HF, b: &HF, p: usize) -> bool {
    let d = abs_hf(&sub(a, b, p));
    let scale = add(&max_hf(abs_hf(a), abs_hf(b)), &pow2(-40, p), p);
    let tol = mul(&scale, &pow2(-(p as i64 - 30), p), p);
    total_cmp(&d, &tol) != Ordering::Greater
}

pub fn is_neg(a: &HF) -> bool {
    a.sign() == Some(Sign::Neg) && !a.is_zero()
}

/// Lossy conversion for reporting.
pub fn to_f64(x: &HF) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    format!("{}", x).parse::<f64>().expect("float text")
}

/// Serializes a value to a 256-bit significand hex form
/// `s<sign>e<exponent>m<64 hex digits>`; zero is `"0"`.
pub fn to_hex256(x: &HF) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let mut v = x.clone();
    v.set_precision(256, RM).expect("narrow to 256");
    let (m, _n, s, e, _) = v.as_raw_parts().expect("finite value");
    let sign = if s == Sign::Neg { '-' } else { '+' };
    let mut hex = String::with_capacity(64);
    for w in m.iter().rev() {
        hex.push_str(&format!("{:016x}", w));
    }
    format!("s{}e{}m{}", sign, e, hex)
}

/// Inverse of [`to_hex256`].
pub fn from_hex256(s: &str) -> Option<HF> {
    if s == "0" {
        return Some(BigFloat::from_i64(0, 256));
    }
    let rest = s.strip_prefix('s')?;
    let (sign, rest) = match rest.as_bytes().first()? {
        b'+' => (Sign::Pos, &rest[1..]),
        b'-' => (Sign::Neg, &rest[1..]),
        _ => return None,
    };
    let rest = rest.strip_prefix('e')?;
    let mpos = rest.find('m')?;
    let e: i32 = rest[..mpos].parse().ok()?;
    let hex = &rest[mpos + 1..];
    if hex.len() != 64 {
        return None;
    }
    let mut words = [0u64; 4];
    for (i, chunk) in hex.as_bytes().chunks(16).enumerate() {
        let w = u64::from_str_radix(std::str::from_utf8(chunk).ok()?, 16).ok()?;
        words[3 - i] = w;
    }
    Some(BigFloat::from_raw_parts(&words, 256, sign, e, false))
}

/// Strict `a < b` that escalates when the two look tied at precision `p`:
/// each side is recomputed through its refine closure and compared again at
/// [`ESCALATED_PREC`]; a tie that survives refinement reports false.
pub fn strictly_less_refined(
    a: &HF,
    b: &HF,
    p: usize,
    refine_a: impl FnOnce() -> HF,
    refine_b: impl FnOnce() -> HF,
) -> bool {
    if tie_close(a, b, p) {
        let a2 = refine_a();
        let b2 = refine_b();
        !tie_close(&a2, &b2, ESCALATED_PREC) && total_cmp(&a2, &b2) == Ordering::Less
    } else {
        total_cmp(a, b) == Ordering::Less
    }
}

/// Sorts `(value, item)` pairs ascending and clusters entries whose values
/// cannot be told apart at precision `p`.  Entries adjacent to a potential
/// tie are recomputed through `refine` (expected to re-derive the value at
/// [`ESCALATED_PREC`] from exact data); clusters of refined entries are then
/// formed with the tighter tolerance so that accidental near-ties split while
/// genuine ties stay together.
pub fn group_by_value<T>(
    vals: Vec<(HF, T)>,
    p: usize,
    refine: &mut dyn FnMut(&T) -> HF,
) -> Vec<(HF, Vec<T>)> {
    let mut items: Vec<(HF, bool, T)> =
        vals.into_iter().map(|(v, t)| (v, false, t)).collect();
    items.sort_by(|a, b| total_cmp(&a.0, &b.0));
    let mut flagged: Vec<bool> = vec![false; items.len()];
    for i in 1..items.len() {
        if tie_close(&items[i - 1].0, &items[i].0, p) {
            flagged[i - 1] = true;
            flagged[i] = true;
        }
    }
    for (i, f) in flagged.iter().enumerate() {
        if *f {
            items[i].0 = refine(&items[i].2);
            items[i].1 = true;
        }
    }
    items.sort_by(|a, b| total_cmp(&a.0, &b.0));
    let mut out: Vec<(HF, bool, Vec<T>)> = Vec::new();
    for (v, refined, t) in items {
        if let Some((lead, lead_refined, group)) = out.last_mut() {
            let q = if refined && *lead_refined { ESCALATED_PREC } else { p };
            if tie_close(lead, &v, q) {
                group.push(t);
                continue;
            }
        }
        out.push((v, refined, vec![t]));
    }
    out.into_iter().map(|(v, _, g)| (v, g)).collect()
}
