//! Incremental closest-unitaries table with per-budget timing.

use ctsynth::cliffordt::synthesize;
use ctsynth::hifloat::{strictly_less_refined, total_cmp, FloatCtx, DEFAULT_PREC, ESCALATED_PREC, HF};
use ctsynth::normeq::FactorError;
use ctsynth::search::angle::Angle;
use ctsynth::search::{cup, distance, rcup, CupSolution};
use std::cmp::Ordering;
use std::time::Instant;

pub struct TimedRow {
    pub row: CupSolution,
    pub millis: u128,
    pub improved: bool,
}

/// Budget rows 0..=n_max, stopping early once ε ≤ stop_eps if given.
pub fn build_table(
    phi: &Angle,
    n_max: u32,
    stop_eps: Option<&HF>,
) -> Result<Vec<TimedRow>, FactorError> {
    let p = DEFAULT_PREC;
    let mut out: Vec<TimedRow> = Vec::new();
    let t0 = Instant::now();
    let base = cup(phi, n_max.min(3))?;
    let base_millis = t0.elapsed().as_millis();
    for row in base {
        let improved = match out.last() {
            None => true,
            Some(prev) => total_cmp(&row.eps, &prev.row.eps) == Ordering::Less,
        };
        let millis = if out.is_empty() { base_millis } else { 0 };
        out.push(TimedRow { row, millis, improved });
        if stop_reached(&out.last().unwrap().row.eps, stop_eps) {
            return Ok(out);
        }
    }
    for n in 4..=n_max {
        let prev = out.last().unwrap().row.clone();
        let t = Instant::now();
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
        out.push(TimedRow { row, millis: t.elapsed().as_millis(), improved });
        if stop_reached(&out.last().unwrap().row.eps, stop_eps) {
            break;
        }
    }
    Ok(out)
}

fn stop_reached(eps: &HF, stop_eps: Option<&HF>) -> bool {
    stop_eps.is_some_and(|target| total_cmp(eps, target) != Ordering::Greater)
}
