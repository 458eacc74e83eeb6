//! End-to-end acceptance checks; each test prints one PASS/FAIL line.

use ctsynth::cliffordt::{
    cup_bruteforce_table, enumerate_upto_tcount, eval_circuit, synthesize, tcount_of_word,
    tcount_unitary, Circuit, EnumEntry, ExactUnitary,
};
use ctsynth::hifloat::{abs_hf, pow2, sub, to_f64, total_cmp, FloatCtx, DEFAULT_PREC};
use ctsynth::normeq::{factor_rhs, solve_all};
use ctsynth::ring::{ZOmega, ZSqrt2};
use ctsynth::search::angle::Angle;
use ctsynth::search::{all_unitaries, cup, min_t_count};
use num_bigint::BigInt;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::sync::OnceLock;
use std::time::Instant;

static ORACLE12: OnceLock<Vec<Vec<EnumEntry>>> = OnceLock::new();

fn oracle12() -> &'static [Vec<EnumEntry>] {
    ORACLE12.get_or_init(|| enumerate_upto_tcount(12))
}

fn report(idx: u32, what: &str, violations: &[String], started: Instant) {
    let status = if violations.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "criterion {idx} {status}: {what} ({:.1}s)",
        started.elapsed().as_secs_f64()
    );
    assert!(violations.is_empty(), "criterion {idx}: {}", violations.join("; "));
}

fn canonical_keys(units: &[(ExactUnitary, Circuit)]) -> Vec<ctsynth::cliffordt::CanonicalKey> {
    let mut v: Vec<_> = units.iter().map(|(u, _)| u.canonical_key()).collect();
    v.sort();
    v
}

#[test]
fn criterion_1_search_matches_exhaustion() {
    let started = Instant::now();
    let layers = oracle12();
    let mut violations = Vec::new();
    let results: Vec<(u32, Vec<String>)> = [1u32, 7, 50, 125, 333, 500]
        .par_iter()
        .map(|&k| {
            let phi = Angle::pi_rational(2 * i64::from(k), 1000);
            let mine = cup(&phi, 12).expect("search table");
            let oracle = cup_bruteforce_table(layers, &phi, 12);
            let mut bad = Vec::new();
            for (a, b) in mine.iter().zip(oracle.iter()) {
                let gap = abs_hf(&sub(&a.eps, &b.eps, DEFAULT_PREC));
                if total_cmp(&gap, &pow2(-100, DEFAULT_PREC)) != Ordering::Less {
                    bad.push(format!("k={k} n={}: eps {} vs {}", a.n, a.eps, b.eps));
                }
                if canonical_keys(&a.units) != canonical_keys(&b.units) {
                    bad.push(format!("k={k} n={}: solution sets differ", a.n));
                }
            }
            (k, bad)
        })
        .collect();
    for (_, mut bad) in results {
        violations.append(&mut bad);
    }
    report(1, "search equals exhaustive tables on 6 angles up to budget 12", &violations, started);
}

#[test]
fn criterion_2_minimal_pair() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let x = ZOmega::new(3, 5, -3, -2);
    match min_t_count(&x, 6, 0) {
        Ok(Some(10)) => {}
        other => violations.push(format!("min_t_count gave {other:?}, want 10")),
    }
    let units = all_unitaries(&x, 6, 0).expect("unitaries");
    let y_min = [BigInt::from(-2), BigInt::from(0), BigInt::from(2), BigInt::from(-3)];
    let y_bad = ZOmega::new(3, -2, 0, 2);
    if !units.iter().any(|u| u.y().coeffs() == &y_min) {
        violations.push("minimal second column missing".into());
    }
    if units.iter().any(|u| u.y().coeffs() == y_bad.coeffs()) {
        violations.push("non-minimal second column present".into());
    }
    let worse = ExactUnitary::new(x, y_bad, 0, 6);
    if tcount_unitary(&worse) != 12 {
        violations.push(format!("excluded unitary T-count {} != 12", tcount_unitary(&worse)));
    }
    report(2, "minimal/non-minimal column pair at T-counts 10/12", &violations, started);
}

#[test]
fn criterion_3_norm_equation_example() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let rhs = ZSqrt2::new(1828037034i64, -1292617383i64);
    let f = factor_rhs(&rhs).expect("factorization");
    if f.sign != 1 || f.unit_exp != 15 || f.sqrt2_exp != 1 {
        violations.push(format!(
            "unit part sign={} (sqrt2-1)^{} sqrt2^{}",
            f.sign, f.unit_exp, f.sqrt2_exp
        ));
    }
    let mut split: Vec<(i64, i64, u32, u32)> = f
        .split
        .iter()
        .map(|s| {
            (
                i64::try_from(&s.prime).unwrap(),
                i64::try_from(&s.pi.a).unwrap(),
                s.exp,
                s.conj_exp,
            )
        })
        .collect();
    split.sort();
    if split != vec![(193, 15, 1, 0), (2297, 53, 1, 0)] {
        violations.push(format!("split factors {split:?}"));
    }
    if f.inert.len() != 1 || f.inert[0].prime != BigInt::from(3) || f.inert[0].exp != 1 {
        violations.push("inert factor is not 3^1".into());
    }
    if f.recompose() != rhs {
        violations.push("recomposition mismatch".into());
    }
    let sols = solve_all(&rhs).expect("solutions");
    if sols.len() != 64 {
        violations.push(format!("{} solutions, want 64", sols.len()));
    }
    for y in &sols {
        if y.abs_sq() != rhs {
            violations.push(format!("solution {y} fails |y|^2 = rhs"));
        }
    }
    report(3, "worked factorization with 64 verified solutions", &violations, started);
}

#[test]
fn criterion_4_tenth_radian_curve() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let phi = "rad:0.1".parse::<Angle>().unwrap();
    let rows = cup(&phi, 34).expect("curve");
    let mut ctx = FloatCtx::new(DEFAULT_PREC);
    let expect = [
        (0usize, 4.82208),
        (11, 5.45071),
        (12, 5.45071),
        (13, 5.45071),
        (14, 5.45071),
        (16, 6.89383),
        (22, 10.78285),
        (34, 14.21322),
    ];
    for (n, want) in expect {
        let got = -to_f64(&ctx.log2(&rows[n].eps));
        if (got - want).abs() >= 1e-3 {
            violations.push(format!("n={n}: log2(1/eps) = {got:.5}, want {want}"));
        }
    }
    report(4, "reference approximation curve for R_z(0.1) up to budget 34", &violations, started);
}

#[test]
fn criterion_5_clifford_budget_bound() {
    let started = Instant::now();
    let layers = enumerate_upto_tcount(3);
    let bad: Vec<String> = (1..=100i64)
        .into_par_iter()
        .filter_map(|k| {
            let phi = Angle::pi_rational(2 * k, 100);
            let row = cup_bruteforce_table(&layers, &phi, 3).pop().unwrap();
            let eps = to_f64(&row.eps);
            (eps >= 0.1376).then(|| format!("k={k}: eps[3] = {eps:.5}"))
        })
        .collect();
    report(5, "three-T budget stays below 0.1376 across the circle", &bad, started);
}

#[test]
fn criterion_6_enumeration_counts() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let layers = enumerate_upto_tcount(6);
    let mut cumulative = 0usize;
    for n in 0..=6usize {
        cumulative += layers[n].len();
        let expect = 24 * (3 * (1usize << n) - 2);
        if cumulative != expect {
            violations.push(format!("n={n}: {cumulative} classes, want {expect}"));
        }
    }
    report(6, "phase-class counts follow 24(3*2^n - 2)", &violations, started);
}

#[test]
fn criterion_7_scaling_regression() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let points: Vec<(f64, f64)> = (1..=49i64)
        .into_par_iter()
        .flat_map_iter(|k| {
            let phi = Angle::pi_rational(2 * k, 50);
            let rows = cup(&phi, 40).expect("table");
            let mut ctx = FloatCtx::new(DEFAULT_PREC);
            let mut pts = Vec::new();
            let mut last: Option<f64> = None;
            for row in &rows {
                if row.eps.is_zero() {
                    pts.clear();
                    break;
                }
                let x = -to_f64(&ctx.log2(&row.eps));
                if last.map_or(true, |prev| x > prev) {
                    pts.push((x, f64::from(row.n)));
                    last = Some(x);
                }
            }
            pts
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    if !(2.8..=3.3).contains(&slope) {
        violations.push(format!("slope {slope:.4} outside [2.8, 3.3] over {} points", points.len()));
    }
    report(
        7,
        &format!("T-count growth slope {slope:.3} per bit of precision"),
        &violations,
        started,
    );
}

#[test]
fn criterion_8_synthesis_round_trip() {
    let started = Instant::now();
    let layers = &oracle12()[..=10];
    let violations: Vec<String> = layers
        .par_iter()
        .enumerate()
        .flat_map_iter(|(t, layer)| {
            let mut bad = Vec::new();
            for e in layer {
                let word = synthesize(&e.unit);
                match eval_circuit(&word) {
                    Ok(u) if u.phase_equal(&e.unit) => {}
                    _ => {
                        bad.push(format!("T-count {t}: word does not evaluate back"));
                        continue;
                    }
                }
                let tw = tcount_of_word(&word);
                let tu = tcount_unitary(&e.unit);
                if tw != tu || tu != t as u32 {
                    bad.push(format!("T-count {t}: word {tw} vs unitary {tu}"));
                }
            }
            bad
        })
        .collect();
    report(8, "synthesis round-trips every unitary up to T-count 10", &violations, started);
}
