//! Enumeration of halves a + b√2 close to a scaled projection target, and
//! the ordered merge pairing real and imaginary halves into candidates.

use crate::hifloat::{
    abs_hf, add, ceil_to_bigint, floor_to_bigint, from_bigint, from_i64, is_neg, min_hf, mul,
    neg_slack, pow2, sqrt2, sqrt2_pow, sub, total_cmp, HF,
};
use num_bigint::BigInt;
use rayon::prelude::*;
use std::cmp::Ordering;

/// One admissible half with its distance contribution
/// eps_part = α√2^{−m}·(α√2^m − (a + b√2)).
#[derive(Clone, Debug)]
pub struct HalfRecord {
    pub eps_part: HF,
    pub a: BigInt,
    pub b: BigInt,
}

/// One merged candidate: eps is the clamped sum of the two parts, and the
/// numerator is x = a0 + (b0+b1)ω + a1ω² + (b1−b0)ω³ on branch k.
#[derive(Clone, Debug)]
pub struct CandidateTuple {
    pub eps: HF,
    pub a0: BigInt,
    pub b0: BigInt,
    pub a1: BigInt,
    pub b1: BigInt,
    pub k: u8,
}

fn eps_part_at(scale: &HF, v: &HF, a: &BigInt, p: usize) -> HF {
    mul(scale, &sub(v, &from_bigint(a, p), p), p)
}

/// All (a, b) with a² + 2b² ≤ 2^m and |α√2^m − (a + b√2)| ≤ δ√2^{m+1},
/// sorted ascending by (eps_part, a, b).
pub fn find_halves(alpha: &HF, m: i64, delta: &HF, p: usize) -> Vec<HalfRecord> {
    assert!(m >= 0, "denominator exponent must be non-negative");
    assert!(!is_neg(delta) && !delta.is_zero(), "tolerance must be positive");
    let half = sub(&from_i64(1, p), &div_two(&from_i64(1, p), p), p);
    assert!(total_cmp(delta, &half) != Ordering::Greater, "tolerance must be at most 1/2");

    let target = mul(alpha, &sqrt2_pow(m, p), p);
    let window = mul(delta, &sqrt2_pow(m + 1, p), p);
    let scale = mul(alpha, &sqrt2_pow(-m, p), p);
    let norm_cap = BigInt::from(1) << (m as usize);
    let b_cap: BigInt = if m == 0 {
        BigInt::from(0)
    } else {
        (BigInt::from(1) << ((m - 1) as usize)).sqrt()
    };
    let b_lo = -&b_cap;
    let mut bs = Vec::new();
    let mut b = b_lo;
    while b <= b_cap {
        bs.push(b.clone());
        b += 1;
    }

    let mut out: Vec<HalfRecord> = bs
        .par_chunks(32)
        .map(|chunk| {
            let mut local = Vec::new();
            for b in chunk {
                let two_b2 = BigInt::from(2) * b * b;
                let v = sub(&target, &mul(&from_bigint(b, p), &sqrt2(p), p), p);
                let lo = ceil_to_bigint(&sub(&v, &window, p)) - 1;
                let hi = floor_to_bigint(&add(&v, &window, p)) + 1;
                let mut a = lo;
                while a <= hi {
                    if &a * &a + &two_b2 <= norm_cap
                        && total_cmp(&abs_hf(&sub(&v, &from_bigint(&a, p), p)), &window)
                            != Ordering::Greater
                    {
                        local.push(HalfRecord {
                            eps_part: eps_part_at(&scale, &v, &a, p),
                            a: a.clone(),
                            b: b.clone(),
                        });
                    }
                    a += 1;
                }
            }
            local
        })
        .reduce(Vec::new, |mut acc, mut v| {
            acc.append(&mut v);
            acc
        });
    out.sort_by(|x, y| {
        total_cmp(&x.eps_part, &y.eps_part)
            .then_with(|| x.a.cmp(&y.a))
            .then_with(|| x.b.cmp(&y.b))
    });
    out
}

fn div_two(x: &HF, p: usize) -> HF {
    mul(x, &pow2(-1, p), p)
}

fn first_at_least(list: &[HalfRecord], bound: &HF) -> usize {
    list.partition_point(|r| total_cmp(&r.eps_part, bound) == Ordering::Less)
}

/// All pairs whose part sum lies in [lo, hi) ∩ [0, cap], with sums inside
/// the rounding slack below zero clamped to zero; sorted ascending by
/// (eps, a0, b0, a1, b1).
pub fn merge_candidates(
    l_re: &[HalfRecord],
    l_im: &[HalfRecord],
    k: u8,
    lo: &HF,
    hi: &HF,
    cap: &HF,
    p: usize,
) -> Vec<CandidateTuple> {
    let slack = neg_slack(p);
    let zero = from_i64(0, p);
    let at_zero = is_neg(lo) || lo.is_zero();
    let hi_eff = min_hf(hi.clone(), add(cap, &tiny_above(cap, p), p));
    let mut out = Vec::new();
    for re in l_re {
        let raw_lo = if at_zero {
            sub(&sub(&zero, &slack, p), &re.eps_part, p)
        } else {
            sub(lo, &re.eps_part, p)
        };
        let raw_hi = sub(&hi_eff, &re.eps_part, p);
        let start = first_at_least(l_im, &raw_lo);
        for im in &l_im[start..] {
            if total_cmp(&im.eps_part, &raw_hi) != Ordering::Less {
                break;
            }
            let sum = add(&re.eps_part, &im.eps_part, p);
            if total_cmp(&sum, cap) == Ordering::Greater {
                continue;
            }
            let eps = if is_neg(&sum) { zero.clone() } else { sum };
            if !at_zero && total_cmp(&eps, lo) == Ordering::Less {
                continue;
            }
            out.push(CandidateTuple {
                eps,
                a0: re.a.clone(),
                b0: re.b.clone(),
                a1: im.a.clone(),
                b1: im.b.clone(),
                k,
            });
        }
    }
    out.sort_by(|x, y| {
        total_cmp(&x.eps, &y.eps)
            .then_with(|| x.a0.cmp(&y.a0))
            .then_with(|| x.b0.cmp(&y.b0))
            .then_with(|| x.a1.cmp(&y.a1))
            .then_with(|| x.b1.cmp(&y.b1))
    });
    out
}

fn tiny_above(x: &HF, p: usize) -> HF {
    mul(&add(&abs_hf(x), &from_i64(1, p), p), &pow2(-(p as i64 - 40), p), p)
}

/// The smallest pair sum that is at least `from`, if any.
pub fn peek_next_sum(l_re: &[HalfRecord], l_im: &[HalfRecord], from: &HF, p: usize) -> Option<HF> {
    let mut best: Option<HF> = None;
    for re in l_re {
        let bound = sub(from, &re.eps_part, p);
        let idx = first_at_least(l_im, &bound);
        if idx == l_im.len() {
            continue;
        }
        let sum = add(&re.eps_part, &l_im[idx].eps_part, p);
        let sum = if total_cmp(&sum, from) == Ordering::Less { from.clone() } else { sum };
        best = Some(match best {
            None => sum,
            Some(b) => min_hf(b, sum),
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hifloat::{to_f64, DEFAULT_PREC};
    use num_traits::Zero;

    const P: usize = DEFAULT_PREC;

    fn brute_halves(alpha: &HF, m: i64, delta: &HF) -> Vec<(BigInt, BigInt)> {
        let target = mul(alpha, &sqrt2_pow(m, P), P);
        let window = mul(delta, &sqrt2_pow(m + 1, P), P);
        let norm_cap = BigInt::from(1) << (m as usize);
        let r = 1i64 << ((m as u64).div_ceil(2) + 1);
        let mut out = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                if BigInt::from(a * a + 2 * b * b) > norm_cap {
                    continue;
                }
                let v = sub(&target, &mul(&from_i64(b, P), &sqrt2(P), P), P);
                if total_cmp(&abs_hf(&sub(&v, &from_i64(a, P), P)), &window) != Ordering::Greater {
                    out.push((BigInt::from(a), BigInt::from(b)));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn pinned_small_list() {
        let alpha = from_i64(1, P);
        let delta = div_two(&from_i64(1, P), P);
        let list = find_halves(&alpha, 2, &delta, P);
        let got: Vec<(i64, i64, f64)> = list
            .iter()
            .map(|r| {
                (
                    i64::try_from(&r.a).unwrap(),
                    i64::try_from(&r.b).unwrap(),
                    to_f64(&r.eps_part),
                )
            })
            .collect();
        assert_eq!(got.len(), 4);
        let expect = [(1, 1, -0.20710678), (2, 0, 0.0), (0, 1, 0.29289322), (1, 0, 0.5)];
        for ((a, b, e), (ea, eb, ee)) in got.iter().zip(expect.iter()) {
            assert_eq!((a, b), (ea, eb));
            assert!((e - ee).abs() < 1e-8, "eps {e} vs {ee}");
        }
    }

    #[test]
    fn degenerate_zero_target() {
        let list = find_halves(&from_i64(0, P), 0, &div_two(&from_i64(1, P), P), P);
        assert_eq!(list.len(), 1);
        assert!(list[0].a.is_zero() && list[0].b.is_zero());
        assert!(list[0].eps_part.is_zero());
    }

    #[test]
    fn matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut ctx = crate::hifloat::FloatCtx::new(P);
        for _ in 0..25 {
            let m = rng.gen_range(0..=7);
            let alpha = ctx.parse_decimal(&format!("{:.6}", rng.gen_range(-1.0..1.0)));
            let delta = ctx.parse_decimal(&format!("{:.6}", rng.gen_range(0.01..0.5)));
            let list = find_halves(&alpha, m, &delta, P);
            let got: Vec<(BigInt, BigInt)> = {
                let mut v: Vec<_> = list.iter().map(|r| (r.a.clone(), r.b.clone())).collect();
                v.sort();
                v
            };
            assert_eq!(got, brute_halves(&alpha, m, &delta), "alpha={alpha} m={m} delta={delta}");
        }
    }

    fn quadratic_merge(
        l_re: &[HalfRecord],
        l_im: &[HalfRecord],
        lo: &HF,
        hi: &HF,
        cap: &HF,
    ) -> Vec<(BigInt, BigInt, BigInt, BigInt)> {
        let slack = neg_slack(P);
        let at_zero = is_neg(lo) || lo.is_zero();
        let mut out = Vec::new();
        for re in l_re {
            for im in l_im {
                let sum = add(&re.eps_part, &im.eps_part, P);
                if total_cmp(&sum, cap) == Ordering::Greater {
                    continue;
                }
                let eps = if is_neg(&sum) {
                    if total_cmp(&abs_hf(&sum), &slack) == Ordering::Greater {
                        continue;
                    }
                    from_i64(0, P)
                } else {
                    sum
                };
                let in_lo = if at_zero {
                    !is_neg(&eps)
                } else {
                    total_cmp(&eps, lo) != Ordering::Less
                };
                if in_lo && total_cmp(&eps, hi) == Ordering::Less {
                    out.push((re.a.clone(), re.b.clone(), im.a.clone(), im.b.clone()));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn merge_matches_quadratic_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut ctx = crate::hifloat::FloatCtx::new(P);
        for _ in 0..20 {
            let m = rng.gen_range(1..=6);
            let a1 = ctx.parse_decimal(&format!("{:.6}", rng.gen_range(-1.0..1.0)));
            let a2 = ctx.parse_decimal(&format!("{:.6}", rng.gen_range(-1.0..1.0)));
            let delta = ctx.parse_decimal(&format!("{:.6}", rng.gen_range(0.05..0.5)));
            let l_re = find_halves(&a1, m, &delta, P);
            let l_im = find_halves(&a2, m, &delta, P);
            let lo = ctx.parse_decimal(&format!("{:.6}", rng.gen_range(0.0..0.2)));
            let hi = add(&lo, &ctx.parse_decimal("0.15"), P);
            let cap = mul(&delta, &delta, P);
            let merged = merge_candidates(&l_re, &l_im, 0, &lo, &hi, &cap, P);
            let got: Vec<_> = {
                let mut v: Vec<_> = merged
                    .iter()
                    .map(|c| (c.a0.clone(), c.b0.clone(), c.a1.clone(), c.b1.clone()))
                    .collect();
                v.sort();
                v
            };
            let hi_eff = min_hf(hi.clone(), add(&cap, &tiny_above(&cap, P), P));
            assert_eq!(got, quadratic_merge(&l_re, &l_im, &lo, &hi_eff, &cap));
        }
    }

    #[test]
    fn merge_pinned_pairs() {
        let alpha = from_i64(1, P);
        let delta = div_two(&from_i64(1, P), P);
        let list = find_halves(&alpha, 2, &delta, P);
        let lo = from_i64(0, P);
        let hi = crate::hifloat::FloatCtx::new(P).parse_decimal("0.3");
        let merged = merge_candidates(&list, &list, 0, &lo, &hi, &delta, P);
        let pairs: Vec<(i64, i64, i64, i64)> = merged
            .iter()
            .map(|c| {
                (
                    i64::try_from(&c.a0).unwrap(),
                    i64::try_from(&c.b0).unwrap(),
                    i64::try_from(&c.a1).unwrap(),
                    i64::try_from(&c.b1).unwrap(),
                )
            })
            .collect();
        assert!(pairs.contains(&(1, 1, 0, 1)), "-0.207 + 0.293");
        assert!(pairs.contains(&(2, 0, 0, 1)), "0 + 0.293");
        assert!(pairs.contains(&(2, 0, 2, 0)), "0 + 0");
        assert!(pairs.contains(&(1, 0, 1, 1)), "0.5 - 0.207");
        assert!(!pairs.contains(&(1, 0, 1, 0)), "0.5 + 0.5 out of range");
        for w in merged.windows(2) {
            assert!(total_cmp(&w[0].eps, &w[1].eps) != Ordering::Greater);
        }
    }

    #[test]
    fn peek_finds_next_sum() {
        let alpha = from_i64(1, P);
        let delta = div_two(&from_i64(1, P), P);
        let list = find_halves(&alpha, 2, &delta, P);
        let from = from_i64(0, P);
        let next = peek_next_sum(&list, &list, &from, P).unwrap();
        assert!(next.is_zero(), "0 + 0 is a sum, got {next}");
        let from = crate::hifloat::FloatCtx::new(P).parse_decimal("0.01");
        let next = peek_next_sum(&list, &list, &from, P).unwrap();
        // least sum past 0.01 is 0.085786 = 0.292893 - 0.207107
        assert!((to_f64(&next) - 0.0857864376).abs() < 1e-8, "next = {next}");
        let big = from_i64(2, P);
        assert!(peek_next_sum(&list, &list, &big, P).is_none());
    }
}
