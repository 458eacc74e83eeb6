//! Reference answers by exhaustion: a trace-based distance, evaluated
//! independently of the search pipeline, and closest-unitaries tables built
//! by scanning every unitary up to a T-count bound.

use super::tables::{enumerate_upto_tcount, EnumEntry};
use super::{Circuit, ExactUnitary};
use crate::hifloat::{
    add, from_i64, group_by_value, mul, sqrt, sqrt2_pow, strictly_less_refined, sub, FloatCtx, HF,
    DEFAULT_PREC, ESCALATED_PREC,
};
use crate::search::angle::Angle;
use crate::search::{clamp_eps, embed_parts, exact_rz_hit, CupSolution};
use rayon::prelude::*;

/// Real and imaginary parts of ω^k, built from {0, ±1, ±1/√2}.
fn omega_pow_parts(k: u8, p: usize) -> (HF, HF) {
    let h = sqrt2_pow(-1, p);
    let nh = mul(&h, &from_i64(-1, p), p);
    let one = from_i64(1, p);
    let none = from_i64(-1, p);
    let zero = from_i64(0, p);
    match k % 8 {
        0 => (one, zero),
        1 => (h.clone(), h),
        2 => (zero, one),
        3 => (nh, h),
        4 => (none, zero),
        5 => (nh.clone(), nh),
        6 => (zero, none),
        _ => (h, nh),
    }
}

/// Distance to R_z(φ) through the trace: with z = x·e^{iφ/2}/√2^m the value
/// is sqrt(1 − |z + conj(z)·ω^k| / 2).  Agrees with [`crate::search::distance`]
/// but follows a different evaluation route.
pub fn trace_distance(u: &ExactUnitary, phi: &Angle, ctx: &mut FloatCtx) -> HF {
    let p = ctx.prec;
    if exact_rz_hit(u, phi) {
        return from_i64(0, p);
    }
    let half = div_by_two(&phi.phi(ctx), p);
    let c = ctx.cos(&half);
    let s = ctx.sin(&half);
    let (xr, xi) = embed_parts(u.x(), p);
    let zr = sub(&mul(&xr, &c, p), &mul(&xi, &s, p), p);
    let zi = add(&mul(&xr, &s, p), &mul(&xi, &c, p), p);
    let (wr, wi) = omega_pow_parts(u.k(), p);
    let tr_r = add(&zr, &add(&mul(&zr, &wr, p), &mul(&zi, &wi, p), p), p);
    let tr_i = add(&zi, &sub(&mul(&zr, &wi, p), &mul(&zi, &wr, p), p), p);
    let norm = sqrt(&add(&mul(&tr_r, &tr_r, p), &mul(&tr_i, &tr_i, p), p), p);
    let scaled = mul(&norm, &sqrt2_pow(-u.m(), p), p);
    let eps = sub(&from_i64(1, p), &div_by_two(&scaled, p), p);
    sqrt(&clamp_eps(eps, p), p)
}

fn div_by_two(v: &HF, p: usize) -> HF {
    mul(v, &crate::hifloat::pow2(-1, p), p)
}

fn layer_best<'a>(
    layer: &'a [EnumEntry],
    phi: &Angle,
) -> (HF, Vec<&'a EnumEntry>) {
    let scored: Vec<(HF, &EnumEntry)> = layer
        .par_iter()
        .map_init(
            || FloatCtx::new(DEFAULT_PREC),
            |ctx, e| (trace_distance(&e.unit, phi, ctx), e),
        )
        .collect();
    let mut groups = group_by_value(scored, DEFAULT_PREC, &mut |e| {
        trace_distance(&e.unit, phi, &mut FloatCtx::new(ESCALATED_PREC))
    });
    let (eps, mut members) = groups.swap_remove(0);
    members.sort_by(|a, b| a.unit.canonical_key().cmp(&b.unit.canonical_key()));
    (eps, members)
}

/// Closest-unitaries rows for T-count budgets 0..=n_max over precomputed
/// enumeration layers.  A later layer replaces the running answer only when
/// its best distance is strictly smaller, so each row reports the unitaries
/// of minimal T-count achieving its distance.
pub fn cup_bruteforce_table(
    layers: &[Vec<EnumEntry>],
    phi: &Angle,
    n_max: u32,
) -> Vec<CupSolution> {
    assert!((n_max as usize) < layers.len(), "need enumeration layers up to {n_max}");
    let mut rows: Vec<CupSolution> = Vec::new();
    let mut best: Option<(HF, Vec<(ExactUnitary, Circuit)>)> = None;
    for n in 0..=n_max {
        let (eps, members) = layer_best(&layers[n as usize], phi);
        let improved = match &best {
            None => true,
            Some((cur, cur_units)) => strictly_less_refined(
                &eps,
                cur,
                DEFAULT_PREC,
                || trace_distance(&members[0].unit, phi, &mut FloatCtx::new(ESCALATED_PREC)),
                || trace_distance(&cur_units[0].0, phi, &mut FloatCtx::new(ESCALATED_PREC)),
            ),
        };
        if improved {
            let units = members
                .into_iter()
                .map(|e| (e.unit.clone(), e.word.clone()))
                .collect();
            best = Some((eps, units));
        }
        let (eps, units) = best.as_ref().unwrap();
        rows.push(CupSolution { n, eps: eps.clone(), units: units.clone() });
    }
    rows
}

/// Single closest-unitaries row at T-count budget n, by full enumeration.
pub fn cup_bruteforce(n: u32, phi: &Angle) -> CupSolution {
    let layers = enumerate_upto_tcount(n as usize);
    cup_bruteforce_table(&layers, phi, n).pop().unwrap()
}
