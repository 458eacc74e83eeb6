//! Command-line front end: approximate Z-rotations, verify against the
//! exhaustive oracle, batch angle families to CSV, and solve norm equations.

mod cache;
mod table;

use cache::{read_cache, write_cache, CacheRecord};
use clap::{Parser, Subcommand};
use ctsynth::cliffordt::{
    cup_bruteforce_table, enumerate_upto_tcount, eval_circuit, tcount_of_word, tcount_unitary,
    CanonicalKey, Circuit, ExactUnitary, ORACLE_BOUND,
};
use ctsynth::hifloat::{
    abs_hf, mul, pow2, sub, to_f64, to_hex256, from_hex256, total_cmp, FloatCtx, DEFAULT_PREC, HF,
};
use ctsynth::normeq::{factor_rhs, is_solvable, solve_all, FactorError, RhsFactorization};
use ctsynth::ring::ZSqrt2;
use ctsynth::search::angle::Angle;
use ctsynth::search::{cup, distance};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::path::PathBuf;
use std::process::ExitCode;
use table::{build_table, TimedRow};

#[derive(Parser)]
#[command(name = "ctsynth", version, about = "T-optimal Clifford+T approximation of Z-rotations")]
struct Cli {
    /// Significand bits for angle parsing and reporting.
    #[arg(long, global = true, default_value_t = 160)]
    precision_bits: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximate R_z(ANGLE) and print the best circuit found.
    Approx {
        /// Angle: "pi/16", "2pi*17/1000", or "rad:0.1".
        #[arg(allow_hyphen_values = true)]
        angle: String,
        /// Largest T-count budget to search.
        #[arg(long, conflicts_with = "precision")]
        tcount_max: Option<u32>,
        /// Target distance; the search stops once ε is at or below it.
        #[arg(long)]
        precision: Option<String>,
        /// Write the answer cache here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diff the search pipeline against the exhaustive enumeration oracle.
    Verify {
        #[arg(long, default_value_t = 8)]
        max_tcount: u32,
        /// Checks angles 2πj/1000 for j = 1..=K.
        #[arg(long, default_value_t = 10)]
        angles: u32,
        /// Also validate every record of this cache file.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Emit per-budget CSV tables for a family of angles.
    Batch {
        /// "thousandths", "qft:K", or "single:ANGLE".
        #[arg(long)]
        angle_set: String,
        /// For thousandths: evenly spaced subsample size.
        #[arg(long, default_value_t = 1000)]
        sample: u32,
        #[arg(long, default_value_t = 10)]
        tcount_max: u32,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Factor A+B*r2 and list every y with |y|² equal to it.
    Normeq {
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// T-count of a unitary given as a circuit word or exact columns.
    Tcount {
        #[arg(long)]
        word: Option<String>,
        /// First column as c0,c1,c2,c3 coefficients of 1,ω,ω²,ω³.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Second column in the same form.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// Phase exponent of the right column pair.
        #[arg(long)]
        k: Option<u8>,
        /// √2 denominator exponent.
        #[arg(long)]
        m: Option<i64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let bits = cli.precision_bits;
    if !(64..=4096).contains(&bits) {
        return ExitCode::from(fail(2, "--precision-bits must be in 64..=4096"));
    }
    let result = match cli.cmd {
        Cmd::Approx { angle, tcount_max, precision, out } => {
            cmd_approx(&angle, tcount_max, precision.as_deref(), out.as_deref(), bits)
        }
        Cmd::Verify { max_tcount, angles, cache } => {
            cmd_verify(max_tcount, angles, cache.as_deref())
        }
        Cmd::Batch { angle_set, sample, tcount_max, csv } => {
            cmd_batch(&angle_set, sample, tcount_max, csv.as_deref(), bits)
        }
        Cmd::Normeq { rhs } => cmd_normeq(&rhs),
        Cmd::Tcount { word, x, y, k, m } => cmd_tcount(word, x, y, k, m),
    };
    ExitCode::from(match result {
        Ok(()) => 0,
        Err(code) => code,
    })
}

fn fail(code: u8, msg: impl AsRef<str>) -> u8 {
    eprintln!("error: {}", msg.as_ref());
    code
}

fn factor_exit(e: FactorError) -> u8 {
    fail(3, e.to_string())
}

fn parse_angle(s: &str) -> Result<Angle, u8> {
    s.parse().map_err(|e| fail(2, format!("{e}")))
}

fn quiet<T>(f: impl FnOnce() -> T) -> Option<T> {
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).ok();
    std::panic::set_hook(hook);
    r
}

/// Projective form of a word: W is a global phase, so drop it; empty means I.
fn stripped(word: &str) -> String {
    let w: String = word.chars().filter(|&c| c != 'W').collect();
    if w.is_empty() {
        "I".into()
    } else {
        w
    }
}

fn log2_inv(eps: &HF, bits: usize) -> String {
    if eps.is_zero() {
        "inf".into()
    } else {
        let mut ctx = FloatCtx::new(bits);
        format!("{:.6}", -to_f64(&ctx.log2(eps)))
    }
}

fn records(angle_text: &str, rows: &[TimedRow]) -> Vec<CacheRecord> {
    let mut out = Vec::new();
    for tr in rows.iter().filter(|tr| tr.improved) {
        let eps2_hex = to_hex256(&mul(&tr.row.eps, &tr.row.eps, DEFAULT_PREC));
        for (u, w) in &tr.row.units {
            out.push(CacheRecord {
                angle: angle_text.to_string(),
                n: tr.row.n,
                k: u.k(),
                m: u.m(),
                x: u.x().clone(),
                y: u.y().clone(),
                eps2_hex: eps2_hex.clone(),
                word: w.clone(),
            });
        }
    }
    out
}

fn cmd_approx(
    angle: &str,
    tcount_max: Option<u32>,
    precision: Option<&str>,
    out: Option<&std::path::Path>,
    bits: usize,
) -> Result<(), u8> {
    let phi = parse_angle(angle)?;
    let rows = match (tcount_max, precision) {
        (Some(n), None) => build_table(&phi, n, None).map_err(factor_exit)?,
        (None, Some(eps_text)) => {
            let mut ctx = FloatCtx::new(bits);
            let target = ctx.parse_decimal(eps_text);
            if target.is_nan() || target.is_inf() || target.is_zero() || target.is_negative() {
                return Err(fail(2, format!("bad --precision value {eps_text:?}")));
            }
            let floor_log2 = (bits / 2) as i64 - 20;
            let floor = pow2(-floor_log2, bits);
            if total_cmp(&target, &floor) == Ordering::Less {
                return Err(fail(
                    2,
                    format!("targets below 2^-{floor_log2} need a larger --precision-bits"),
                ));
            }
            build_table(&phi, 200, Some(&target)).map_err(factor_exit)?
        }
        _ => return Err(fail(2, "give exactly one of --tcount-max or --precision")),
    };
    let last = rows.last().expect("at least the budget-0 row");
    let word = &last.row.units[0].1;
    println!("angle: {phi}");
    println!("circuit: {}", stripped(word));
    println!("tcount: {}", tcount_of_word(word));
    println!("log2_inv_eps: {}", log2_inv(&last.row.eps, bits));
    if let Some(path) = out {
        let recs = records(&phi.to_string(), &rows);
        write_cache(path, &recs).map_err(|e| fail(2, format!("cannot write cache: {e}")))?;
        println!("cache: {} records -> {}", recs.len(), path.display());
    }
    Ok(())
}

fn keyset(units: &[(ExactUnitary, Circuit)]) -> Vec<CanonicalKey> {
    let mut v: Vec<CanonicalKey> = units.iter().map(|(u, _)| u.canonical_key()).collect();
    v.sort();
    v
}

fn cmd_verify(max_tcount: u32, angles: u32, cache: Option<&std::path::Path>) -> Result<(), u8> {
    if max_tcount as usize > ORACLE_BOUND {
        return Err(fail(2, format!("--max-tcount must be at most {ORACLE_BOUND}")));
    }
    let layers = enumerate_upto_tcount(max_tcount as usize);
    let tol = pow2(-100, DEFAULT_PREC);
    for j in 1..=i64::from(angles) {
        let phi = Angle::pi_rational(2 * j, 1000);
        let mine = cup(&phi, max_tcount).map_err(factor_exit)?;
        let oracle = cup_bruteforce_table(&layers, &phi, max_tcount);
        for (a, b) in mine.iter().zip(oracle.iter()) {
            let gap = abs_hf(&sub(&a.eps, &b.eps, DEFAULT_PREC));
            if total_cmp(&gap, &tol) != Ordering::Less {
                return Err(fail(
                    1,
                    format!("distance mismatch at {phi}, n = {}: {} vs {}", a.n, a.eps, b.eps),
                ));
            }
            if keyset(&a.units) != keyset(&b.units) {
                return Err(fail(1, format!("solution set mismatch at {phi}, n = {}", a.n)));
            }
        }
    }
    println!("verified {angles} angles up to T-count {max_tcount}: identical");
    if let Some(path) = cache {
        let recs = read_cache(path).map_err(|e| fail(2, e))?;
        for (i, r) in recs.iter().enumerate() {
            validate_record(r).map_err(|e| fail(1, format!("cache record {}: {e}", i + 1)))?;
        }
        println!("cache: {} records valid", recs.len());
    }
    Ok(())
}

fn validate_record(r: &CacheRecord) -> Result<(), String> {
    let phi: Angle = r.angle.parse().map_err(|_| format!("bad angle {:?}", r.angle))?;
    let (x, y, k, m) = (r.x.clone(), r.y.clone(), r.k, r.m);
    let unit = quiet(move || ExactUnitary::new(x, y, k, m))
        .ok_or("columns are not a unit-norm pair")?;
    let ev = eval_circuit(&r.word).map_err(|e| format!("bad word: {e}"))?;
    if ev != unit {
        return Err("word does not evaluate to the stored unitary".into());
    }
    if tcount_of_word(&r.word) != r.n {
        return Err(format!(
            "word carries {} T symbols, record says {}",
            tcount_of_word(&r.word),
            r.n
        ));
    }
    let stored = from_hex256(&r.eps2_hex).ok_or("bad eps² field")?;
    let d = distance(&unit, &phi, &mut FloatCtx::new(DEFAULT_PREC));
    let d2 = mul(&d, &d, DEFAULT_PREC);
    let gap = abs_hf(&sub(&d2, &stored, DEFAULT_PREC));
    if total_cmp(&gap, &pow2(-100, DEFAULT_PREC)) != Ordering::Less {
        return Err("stored ε² disagrees with recomputation".into());
    }
    Ok(())
}

fn angle_list(set: &str, sample: u32) -> Result<Vec<Angle>, u8> {
    if set == "thousandths" {
        let s = i64::from(sample.clamp(1, 1000));
        let mut ks: Vec<i64> = if s >= 1000 {
            (1..=1000).collect()
        } else {
            (1..=s).map(|j| j * 1000 / (s + 1)).filter(|&k| k >= 1).collect()
        };
        ks.dedup();
        Ok(ks.into_iter().map(|k| Angle::pi_rational(2 * k, 1000)).collect())
    } else if let Some(kk) = set.strip_prefix("qft:") {
        let kmax: u32 = kk.parse().map_err(|_| fail(2, "bad qft:K"))?;
        if !(1..=64).contains(&kmax) {
            return Err(fail(2, "qft:K needs K in 1..=64"));
        }
        Ok((1..=kmax).map(|k| Angle::pi_rational(1, BigInt::from(1) << k)).collect())
    } else if let Some(a) = set.strip_prefix("single:") {
        Ok(vec![parse_angle(a)?])
    } else {
        Err(fail(2, "angle set must be thousandths, qft:K, or single:ANGLE"))
    }
}

fn cmd_batch(
    set: &str,
    sample: u32,
    tcount_max: u32,
    csv: Option<&std::path::Path>,
    bits: usize,
) -> Result<(), u8> {
    let angles = angle_list(set, sample)?;
    let results: Vec<(String, Result<Vec<TimedRow>, FactorError>)> = angles
        .par_iter()
        .map(|phi| (phi.to_string(), build_table(phi, tcount_max, None)))
        .collect();
    let mut lines = vec!["angle,n,log2_inv_eps,num_solutions,millis".to_string()];
    let mut failures = 0u32;
    for (text, res) in &results {
        match res {
            Ok(rows) => {
                for tr in rows {
                    lines.push(format!(
                        "{text},{},{},{},{}",
                        tr.row.n,
                        log2_inv(&tr.row.eps, bits),
                        tr.row.units.len(),
                        tr.millis
                    ));
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {text}: {e}");
            }
        }
    }
    let body = lines.join("\n") + "\n";
    match csv {
        Some(p) => {
            std::fs::write(p, &body).map_err(|e| fail(2, format!("cannot write CSV: {e}")))?
        }
        None => print!("{body}"),
    }
    if failures > 0 {
        return Err(fail(3, format!("{failures} angle(s) failed; partial results flushed")));
    }
    Ok(())
}

fn parse_rhs(s: &str) -> Option<ZSqrt2> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if let Some(pos) = t[1..].find(['+', '-']).map(|i| i + 1) {
        let (a, rest) = t.split_at(pos);
        let b = rest.strip_suffix("*r2")?;
        Some(ZSqrt2::new(a.parse::<BigInt>().ok()?, b.parse::<BigInt>().ok()?))
    } else if let Some(b) = t.strip_suffix("*r2") {
        Some(ZSqrt2::new(0, b.parse::<BigInt>().ok()?))
    } else {
        Some(ZSqrt2::new(t.parse::<BigInt>().ok()?, 0))
    }
}

fn zsqrt2_text(z: &ZSqrt2) -> String {
    if z.b.is_zero() {
        format!("{}", z.a)
    } else if z.b.is_negative() {
        format!("{}-{}*r2", z.a, -&z.b)
    } else {
        format!("{}+{}*r2", z.a, z.b)
    }
}

fn factor_text(f: &RhsFactorization) -> String {
    let mut parts = Vec::new();
    if f.sign < 0 {
        parts.push("(-1)".to_string());
    }
    if f.unit_exp != 0 {
        parts.push(format!("(r2-1)^{}", f.unit_exp));
    }
    if f.sqrt2_exp != 0 {
        parts.push(format!("r2^{}", f.sqrt2_exp));
    }
    for s in &f.split {
        if s.exp != 0 {
            parts.push(format!("({})^{}", zsqrt2_text(&s.pi), s.exp));
        }
        if s.conj_exp != 0 {
            let aut = ZSqrt2::new(s.pi.a.clone(), -s.pi.b.clone());
            parts.push(format!("({})^{}", zsqrt2_text(&aut), s.conj_exp));
        }
    }
    for q in &f.inert {
        parts.push(format!("{}^{}", q.prime, q.exp));
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" * ")
    }
}

fn cmd_normeq(rhs_text: &str) -> Result<(), u8> {
    let rhs = parse_rhs(rhs_text)
        .ok_or_else(|| fail(2, format!("cannot parse {rhs_text:?} as A+B*r2")))?;
    println!("rhs: {}", zsqrt2_text(&rhs));
    if rhs.a.is_zero() && rhs.b.is_zero() {
        println!("factorization: 0");
        println!("solutions: 1");
        println!("0");
        return Ok(());
    }
    let f = factor_rhs(&rhs).map_err(factor_exit)?;
    println!("factorization: {}", factor_text(&f));
    if !is_solvable(&rhs).map_err(factor_exit)? {
        return Err(fail(4, "no solutions: rhs is not a norm in the eighth cyclotomic ring"));
    }
    let sols = solve_all(&rhs).map_err(factor_exit)?;
    println!("solutions: {}", sols.len());
    for y in &sols {
        println!("{y}");
    }
    Ok(())
}

fn cmd_tcount(
    word: Option<String>,
    x: Option<String>,
    y: Option<String>,
    k: Option<u8>,
    m: Option<i64>,
) -> Result<(), u8> {
    let unit = if let Some(w) = word {
        let w: String = w.to_uppercase().chars().filter(|&c| c != 'I').collect();
        eval_circuit(&w).map_err(|e| fail(2, e.to_string()))?
    } else {
        let (x, y, k, m) = match (x, y, k, m) {
            (Some(x), Some(y), Some(k), Some(m)) => (x, y, k, m),
            _ => return Err(fail(2, "give --word or all of --x --y --k --m")),
        };
        let xz = cache::parse_coeffs(&x).ok_or_else(|| fail(2, "bad --x coefficients"))?;
        let yz = cache::parse_coeffs(&y).ok_or_else(|| fail(2, "bad --y coefficients"))?;
        quiet(move || ExactUnitary::new(xz, yz, k, m))
            .ok_or_else(|| fail(2, "columns are not a unit-norm pair"))?
    };
    println!("tcount: {}", tcount_unitary(&unit));
    Ok(())
}
