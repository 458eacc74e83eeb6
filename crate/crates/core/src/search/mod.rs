//! Approximation engine: the phase-invariant distance to R_z(φ), the
//! half-candidate enumeration, minimal-T-count filtering, and the searches
//! answering the restricted and unrestricted closest-unitaries problems.

pub mod angle;
pub mod halves;

use crate::cliffordt::{base_table, synthesize, tcount_unitary, BaseEntry, Circuit, ExactUnitary};
use crate::hifloat::{
    abs_hf, add, div, from_bigint, from_i64, group_by_value, is_neg, min_hf, mul, neg_slack, pow2,
    sqrt, sqrt2, sqrt2_pow, strictly_less_refined, sub, total_cmp, FloatCtx, HF, DEFAULT_PREC,
    ESCALATED_PREC,
};
use crate::normeq::{is_solvable, solve_all, FactorError};
use crate::ring::{SdeValue, ZOmega, ZSqrt2};
use angle::Angle;
use halves::{find_halves, merge_candidates, peek_next_sum, CandidateTuple, HalfRecord};
use num_bigint::BigInt;
use std::cmp::Ordering;

/// One row of a closest-unitaries table: the best distance achievable with
/// T-count at most n and every unitary achieving it, paired with a circuit.
#[derive(Clone, Debug)]
pub struct CupSolution {
    pub n: u32,
    pub eps: HF,
    pub units: Vec<(ExactUnitary, Circuit)>,
}

/// θ_k = πk/8 − φ/2.
pub(crate) fn theta_k(k: u8, phi: &Angle, ctx: &mut FloatCtx) -> HF {
    let p = ctx.prec;
    let pi = ctx.pi();
    let phi_v = phi.phi(ctx);
    let lhs = div(&mul(&pi, &from_i64(i64::from(k), p), p), &from_i64(8, p), p);
    sub(&lhs, &div(&phi_v, &from_i64(2, p), p), p)
}

/// Real and imaginary embeddings of a numerator x in Z[ω]:
/// (c0 + (c1−c3)/√2, c2 + (c1+c3)/√2).
pub(crate) fn embed_parts(x: &ZOmega, p: usize) -> (HF, HF) {
    let c = x.coeffs();
    let inv = div(&from_i64(1, p), &sqrt2(p), p);
    let re = add(&from_bigint(&c[0], p), &mul(&from_bigint(&(&c[1] - &c[3]), p), &inv, p), p);
    let im = add(&from_bigint(&c[2], p), &mul(&from_bigint(&(&c[1] + &c[3]), p), &inv, p), p);
    (re, im)
}

/// Clamps a negative rounding residue to zero; anything more negative than
/// the precision slack is a bug.
pub(crate) fn clamp_eps(eps: HF, p: usize) -> HF {
    if is_neg(&eps) {
        assert!(
            total_cmp(&abs_hf(&eps), &neg_slack(p)) != Ordering::Greater,
            "eps fell below zero beyond rounding slack"
        );
        from_i64(0, p)
    } else {
        eps
    }
}

/// True when u equals R_z(φ) up to a global phase, decided exactly.
pub(crate) fn exact_rz_hit(u: &ExactUnitary, phi: &Angle) -> bool {
    phi.exact_pi4_multiple()
        .map(|j| u.canonical_key() == ExactUnitary::t_pow(j).canonical_key())
        .unwrap_or(false)
}

/// Global-phase-invariant distance between u and R_z(φ):
/// sqrt(1 − |Re(x·e^{iφ/2}·ω^{−k/2})| / √2^m), which depends only on the
/// top-left entry.  Exact π/4 multiples short-circuit to exact zero.
pub fn distance(u: &ExactUnitary, phi: &Angle, ctx: &mut FloatCtx) -> HF {
    let p = ctx.prec;
    if exact_rz_hit(u, phi) {
        return from_i64(0, p);
    }
    let th = theta_k(u.k(), phi, ctx);
    let c = ctx.cos(&th);
    let s = ctx.sin(&th);
    let (xr, xi) = embed_parts(u.x(), p);
    let proj = add(&mul(&xr, &c, p), &mul(&xi, &s, p), p);
    let r = mul(&proj, &sqrt2_pow(-u.m(), p), p);
    let eps = sub(&from_i64(1, p), &abs_hf(&r), p);
    sqrt(&clamp_eps(eps, p), p)
}

/// Minimal T-count over unitaries with top-left numerator x_num at
/// denominator √2^m on branch k, or None when no unitary beyond the base
/// catalogue has that column.
pub fn min_t_count(x_num: &ZOmega, m: i64, k: u8) -> Result<Option<u32>, FactorError> {
    assert!(m >= 0, "denominator exponent must be non-negative");
    let s = match x_num.abs_sq().sde(2 * m) {
        SdeValue::Finite(s) => s,
        SdeValue::Bottom => return Ok(None),
    };
    if s <= 4 {
        return Ok(None);
    }
    let rhs = &ZSqrt2::new(BigInt::from(1) << (m as usize), 0) - &x_num.abs_sq();
    if is_solvable(&rhs)? {
        Ok(Some((s - 2 + (i64::from(k) + s) % 2) as u32))
    } else {
        Ok(None)
    }
}

/// Every minimal unitary with the given top-left column: one per second
/// column solving the norm equation, filtered to the least T-count.
pub fn all_unitaries(x_num: &ZOmega, m: i64, k: u8) -> Result<Vec<ExactUnitary>, FactorError> {
    assert!(m >= 0, "denominator exponent must be non-negative");
    let rhs = &ZSqrt2::new(BigInt::from(1) << (m as usize), 0) - &x_num.abs_sq();
    let mut built: Vec<(u32, ExactUnitary)> = Vec::new();
    for y in solve_all(&rhs)? {
        let u = ExactUnitary::new(x_num.clone(), y, k, m);
        built.push((tcount_unitary(&u), u));
    }
    if built.is_empty() {
        return Ok(vec![]);
    }
    let best = built.iter().map(|(t, _)| *t).min().unwrap();
    if let Some(expect) = min_t_count(x_num, m, k)? {
        assert_eq!(best, expect, "minimal T-count must match the closed form");
    }
    let mut units: Vec<ExactUnitary> =
        built.into_iter().filter(|(t, _)| *t == best).map(|(_, u)| u).collect();
    units.sort_by_cached_key(|u| u.canonical_key());
    units.dedup_by(|a, b| a.canonical_key() == b.canonical_key());
    Ok(units)
}

/// x = a0 + (b0+b1)ω + a1ω² + (b1−b0)ω³, the numerator a merged candidate
/// stands for.
fn candidate_numerator(c: &CandidateTuple) -> ZOmega {
    ZOmega::from_coeffs([c.a0.clone(), &c.b0 + &c.b1, c.a1.clone(), &c.b1 - &c.b0])
}

/// eps_part of one half recomputed from scratch at precision p.
fn eps_half(alpha: &HF, a: &BigInt, b: &BigInt, m: i64, p: usize) -> HF {
    let v = sub(
        &mul(alpha, &sqrt2_pow(m, p), p),
        &add(&from_bigint(a, p), &mul(&from_bigint(b, p), &sqrt2(p), p), p),
        p,
    );
    mul(&mul(alpha, &sqrt2_pow(-m, p), p), &v, p)
}

/// Candidate sum recomputed at escalated precision; negatives flatten to
/// zero since only solvable candidates matter for the ordering.
fn refine_candidate(c: &CandidateTuple, m: i64, trigs: &[(HF, HF)]) -> HF {
    let p = ESCALATED_PREC;
    let (cth, sth) = &trigs[c.k as usize];
    let sum = add(
        &eps_half(cth, &c.a0, &c.b0, m, p),
        &eps_half(sth, &c.a1, &c.b1, m, p),
        p,
    );
    if is_neg(&sum) {
        from_i64(0, p)
    } else {
        sum
    }
}

/// Smallest candidate sum at or above `from` across both k branches.
fn peek_next(lists: &[(Vec<HalfRecord>, Vec<HalfRecord>)], from: &HF, p: usize) -> Option<HF> {
    let mut best: Option<HF> = None;
    for (re, im) in lists {
        if let Some(s) = peek_next_sum(re, im, from, p) {
            best = Some(match best {
                None => s,
                Some(b) => min_hf(b, s),
            });
        }
    }
    best
}

fn pad_above(x: &HF, p: usize) -> HF {
    mul(&add(&abs_hf(x), &from_i64(1, p), p), &pow2(-(p as i64 - 40), p), p)
}

/// Units for one tie group of candidates: members within budget are ranked
/// by their minimal T-count and only the least rank contributes, mirroring
/// the earliest-layer rule of the exhaustive tables.
fn harvest(group: &[CandidateTuple], m: i64, n: u32) -> Result<Option<Vec<ExactUnitary>>, FactorError> {
    let mut scored: Vec<(u32, &CandidateTuple)> = Vec::new();
    for c in group {
        let x = candidate_numerator(c);
        if let Some(t) = min_t_count(&x, m, c.k)? {
            if t <= n {
                scored.push((t, c));
            }
        }
    }
    let Some(t_min) = scored.iter().map(|(t, _)| *t).min() else {
        return Ok(None);
    };
    let mut units = Vec::new();
    for (t, c) in scored {
        if t == t_min {
            units.extend(all_unitaries(&candidate_numerator(c), m, c.k)?);
        }
    }
    units.sort_by_cached_key(|u| u.canonical_key());
    units.dedup_by(|a, b| a.canonical_key() == b.canonical_key());
    Ok(Some(units))
}

/// Restricted search: the best distance within delta achievable at T-count
/// budget n ≥ 4 and every unitary achieving it, or (delta, empty) when
/// nothing within delta qualifies.
pub fn rcup(n: u32, phi: &Angle, delta: &HF) -> Result<(HF, Vec<ExactUnitary>), FactorError> {
    assert!(n >= 4, "budgets below 4 are covered by the base catalogue");
    let p = DEFAULT_PREC;
    assert!(
        total_cmp(delta, &pow2(-1, p)) != Ordering::Greater,
        "the distance bound must be at most 1/2"
    );
    if is_neg(delta) || delta.is_zero() {
        return Ok((delta.clone(), vec![]));
    }
    let m = (i64::from(n) + 1) / 2 + 2;
    let mut ctx = FloatCtx::new(p);
    let mut ctx_hi = FloatCtx::new(ESCALATED_PREC);
    let mut lists = Vec::new();
    let mut trigs_hi = Vec::new();
    for k in 0..2u8 {
        let th = theta_k(k, phi, &mut ctx);
        let c = ctx.cos(&th);
        let s = ctx.sin(&th);
        lists.push((find_halves(&c, m, delta, p), find_halves(&s, m, delta, p)));
        let th_hi = theta_k(k, phi, &mut ctx_hi);
        trigs_hi.push((ctx_hi.cos(&th_hi), ctx_hi.sin(&th_hi)));
    }
    let cap = mul(delta, delta, p);
    let width = mul(&cap, &pow2(-10, p), p);
    let mut lo = from_i64(0, p);
    while total_cmp(&lo, &cap) != Ordering::Greater {
        let hi = add(&lo, &width, p);
        let hi_pad = add(&hi, &pad_above(&hi, p), p);
        let mut cands: Vec<(HF, CandidateTuple)> = Vec::new();
        for (k, (l_re, l_im)) in lists.iter().enumerate() {
            for c in merge_candidates(l_re, l_im, k as u8, &lo, &hi_pad, &cap, p) {
                cands.push((c.eps.clone(), c));
            }
        }
        if !cands.is_empty() {
            let groups = group_by_value(cands, p, &mut |c| refine_candidate(c, m, &trigs_hi));
            for (lead, group) in groups {
                if total_cmp(&lead, &hi) != Ordering::Less {
                    continue;
                }
                if let Some(units) = harvest(&group, m, n)? {
                    let eps = distance(&units[0], phi, &mut ctx);
                    return Ok((eps, units));
                }
            }
        }
        match peek_next(&lists, &hi, p) {
            Some(nx) if total_cmp(&nx, &cap) != Ordering::Greater => {
                let backed = sub(&nx, &pad_above(&nx, p), p);
                lo = if is_neg(&backed) { from_i64(0, p) } else { backed };
            }
            _ => break,
        }
    }
    Ok((delta.clone(), vec![]))
}

/// Closest-unitaries table for budgets 0..=n_max: each row carries the best
/// distance within the budget and all minimal unitaries achieving it, with
/// synthesized circuits; distances never increase down the table.
pub fn cup(phi: &Angle, n_max: u32) -> Result<Vec<CupSolution>, FactorError> {
    let p = DEFAULT_PREC;
    let mut ctx = FloatCtx::new(p);
    let mut rows: Vec<CupSolution> = Vec::new();
    let mut catalogue: Vec<&'static BaseEntry> = base_table().values().collect();
    catalogue.sort_by_cached_key(|e| e.unit.canonical_key());
    for n in 0..=n_max.min(3) {
        let scored: Vec<(HF, &BaseEntry)> = catalogue
            .iter()
            .filter(|e| e.tcount <= n)
            .map(|e| (distance(&e.unit, phi, &mut ctx), *e))
            .collect();
        let mut groups = group_by_value(scored, p, &mut |e| {
            distance(&e.unit, phi, &mut FloatCtx::new(ESCALATED_PREC))
        });
        let (eps, mut members) = groups.swap_remove(0);
        members.sort_by_cached_key(|e| e.unit.canonical_key());
        let improved = match rows.last() {
            None => true,
            Some(prev) => strictly_less_refined(
                &eps,
                &prev.eps,
                p,
                || distance(&members[0].unit, phi, &mut FloatCtx::new(ESCALATED_PREC)),
                || distance(&prev.units[0].0, phi, &mut FloatCtx::new(ESCALATED_PREC)),
            ),
        };
        let row = if improved {
            CupSolution {
                n,
                eps,
                units: members.iter().map(|e| (e.unit.clone(), e.word.clone())).collect(),
            }
        } else {
            let prev = rows.last().unwrap();
            CupSolution { n, eps: prev.eps.clone(), units: prev.units.clone() }
        };
        rows.push(row);
    }
    for n in 4..=n_max {
        let prev = rows.last().unwrap().clone();
        let (eps, units) = rcup(n, phi, &prev.eps)?;
        let improved = !units.is_empty()
            && strictly_less_refined(
                &eps,
                &prev.eps,
                p,
                || distance(&units[0], phi, &mut FloatCtx::new(ESCALATED_PREC)),
                || distance(&prev.units[0].0, phi, &mut FloatCtx::new(ESCALATED_PREC)),
            );
        let row = if improved {
            let with_words = units
                .into_iter()
                .map(|u| {
                    let w = synthesize(&u);
                    (u, w)
                })
                .collect();
            CupSolution { n, eps, units: with_words }
        } else {
            CupSolution { n, eps: prev.eps.clone(), units: prev.units.clone() }
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hifloat::{pow2, DEFAULT_PREC};

    #[test]
    fn distance_identity_at_zero() {
        let mut ctx = FloatCtx::new(DEFAULT_PREC);
        let d = distance(&ExactUnitary::identity(), &Angle::pi_rational(0, 1), &mut ctx);
        assert!(d.is_zero());
    }

    #[test]
    fn distance_t_at_quarter_pi() {
        let mut ctx = FloatCtx::new(DEFAULT_PREC);
        let d = distance(&ExactUnitary::t_gate(), &Angle::pi_rational(1, 4), &mut ctx);
        assert!(d.is_zero());
        let d2 = distance(&ExactUnitary::t_gate().mul_scalar_omega(3), &Angle::pi_rational(1, 4), &mut ctx);
        assert!(d2.is_zero());
        let off = distance(&ExactUnitary::s_gate(), &Angle::pi_rational(1, 4), &mut ctx);
        assert!(!off.is_zero());
    }

    #[test]
    fn distance_identity_at_tenth() {
        // sqrt(1 - cos(0.05)): log2(1/d) = 4.8220783787...
        let mut ctx = FloatCtx::new(DEFAULT_PREC);
        let phi = "rad:0.1".parse::<Angle>().unwrap();
        let d = distance(&ExactUnitary::identity(), &phi, &mut ctx);
        let log = ctx.log2(&d);
        let expect = ctx.parse_decimal("-4.8220783787517612783");
        let gap = abs_hf(&sub(&log, &expect, DEFAULT_PREC));
        assert!(total_cmp(&gap, &pow2(-40, DEFAULT_PREC)) == Ordering::Less, "log2 = {log}");
    }

    #[test]
    fn min_t_count_examples() {
        let x = ZOmega::new(3, 5, -3, -2);
        assert_eq!(min_t_count(&x, 6, 0).unwrap(), Some(10));
        assert_eq!(min_t_count(&ZOmega::one(), 0, 0).unwrap(), None);
        assert_eq!(min_t_count(&ZOmega::new(3, 0, 0, 0), 4, 0).unwrap(), None);
        assert_eq!(min_t_count(&ZOmega::zero(), 3, 0).unwrap(), None);
    }

    #[test]
    fn all_unitaries_examples() {
        let x = ZOmega::new(3, 5, -3, -2);
        let units = all_unitaries(&x, 6, 0).unwrap();
        assert!(!units.is_empty());
        for u in &units {
            assert_eq!(crate::cliffordt::tcount_unitary(u), 10);
        }
        let ys: Vec<_> = units.iter().map(|u| u.y().coeffs().clone()).collect();
        let included: [BigInt; 4] =
            [BigInt::from(-2), BigInt::from(0), BigInt::from(2), BigInt::from(-3)];
        let excluded: [BigInt; 4] =
            [BigInt::from(3), BigInt::from(-2), BigInt::from(0), BigInt::from(2)];
        assert!(ys.contains(&included), "minimal second column present");
        assert!(!ys.contains(&excluded), "non-minimal second column filtered");

        let trivial = all_unitaries(&ZOmega::one(), 0, 0).unwrap();
        assert_eq!(trivial.len(), 1);
        assert!(trivial[0].phase_equal(&ExactUnitary::identity()));
    }

    #[test]
    fn candidate_sums_recompute_as_distances() {
        // eps_re + eps_im = 1 - Re(x e^{-i theta_k}) / sqrt2^m for every pair
        let mut ctx = FloatCtx::new(DEFAULT_PREC);
        let p = DEFAULT_PREC;
        let phi = "rad:0.7".parse::<Angle>().unwrap();
        let m = 6;
        let delta = ctx.parse_decimal("0.3");
        let cap = mul(&delta, &delta, p);
        for k in 0..2u8 {
            let th = theta_k(k, &phi, &mut ctx);
            let c = ctx.cos(&th);
            let s = ctx.sin(&th);
            let l_re = find_halves(&c, m, &delta, p);
            let l_im = find_halves(&s, m, &delta, p);
            let lo = from_i64(0, p);
            let cands = merge_candidates(&l_re, &l_im, k, &lo, &cap, &cap, p);
            assert!(!cands.is_empty());
            for cand in &cands {
                let x = candidate_numerator(cand);
                let (xr, xi) = embed_parts(&x, p);
                let proj = add(&mul(&xr, &c, p), &mul(&xi, &s, p), p);
                let direct =
                    sub(&from_i64(1, p), &mul(&proj, &sqrt2_pow(-m, p), p), p);
                let gap = abs_hf(&sub(&cand.eps, &direct, p));
                let tol = mul(
                    &add(&abs_hf(&direct), &from_i64(1, p), p),
                    &pow2(-(p as i64 - 20), p),
                    p,
                );
                assert!(
                    total_cmp(&gap, &tol) != Ordering::Greater,
                    "candidate sum {} vs direct {direct}",
                    cand.eps
                );
            }
        }
    }

    #[test]
    fn cup_quarter_pi_hits_exactly() {
        let rows = cup(&Angle::pi_rational(1, 4), 5).unwrap();
        assert!(!rows[0].eps.is_zero());
        for row in &rows[1..] {
            assert!(row.eps.is_zero(), "budget {} should be exact", row.n);
            assert_eq!(row.units.len(), 1);
            assert!(row.units[0].0.phase_equal(&ExactUnitary::t_gate()));
        }
    }

    #[test]
    fn cup_tenth_radian_reference_points() {
        let phi = "rad:0.1".parse::<Angle>().unwrap();
        let rows = cup(&phi, 12).unwrap();
        let mut ctx = FloatCtx::new(DEFAULT_PREC);
        let log = |eps: &HF, ctx: &mut FloatCtx| -(crate::hifloat::to_f64(&ctx.log2(eps)));
        assert!((log(&rows[0].eps, &mut ctx) - 4.8220783788).abs() < 1e-6);
        for n in 1..=10 {
            assert!(
                total_cmp(&rows[n].eps, &rows[0].eps) == Ordering::Equal,
                "no improvement expected at budget {n}"
            );
        }
        assert!((log(&rows[11].eps, &mut ctx) - 5.4507107576).abs() < 1e-6);
        assert!(total_cmp(&rows[12].eps, &rows[11].eps) == Ordering::Equal);
        for (u, w) in &rows[11].units {
            assert_eq!(&crate::cliffordt::eval_circuit(w).unwrap(), u);
            assert_eq!(crate::cliffordt::tcount_unitary(u), 11);
        }
    }

    #[test]
    fn cup_matches_exhaustive_tables() {
        use crate::cliffordt::{cup_bruteforce_table, enumerate_upto_tcount};
        let layers = enumerate_upto_tcount(6);
        for phi in [Angle::pi_rational(7, 500), "rad:0.3".parse::<Angle>().unwrap()] {
            let mine = cup(&phi, 6).unwrap();
            let oracle = cup_bruteforce_table(&layers, &phi, 6);
            for (a, b) in mine.iter().zip(oracle.iter()) {
                let gap = abs_hf(&sub(&a.eps, &b.eps, DEFAULT_PREC));
                assert!(
                    total_cmp(&gap, &pow2(-100, DEFAULT_PREC)) == Ordering::Less,
                    "phi {phi} budget {}: {} vs {}",
                    a.n,
                    a.eps,
                    b.eps
                );
                let keys = |units: &[(ExactUnitary, Circuit)]| {
                    let mut v: Vec<_> = units.iter().map(|(u, _)| u.canonical_key()).collect();
                    v.sort();
                    v
                };
                assert_eq!(keys(&a.units), keys(&b.units), "phi {phi} budget {}", a.n);
            }
        }
    }
}
