//! End-to-end checks of the ctsynth binary.

use ctsynth::ring::ZOmega;
use num_bigint::BigInt;
use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ctsynth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn approx_quarter_pi_is_a_single_t() {
    let out = run(&["approx", "pi/4", "--tcount-max", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("circuit: T\n"), "{text}");
    assert!(text.contains("tcount: 1"), "{text}");
    assert!(text.contains("log2_inv_eps: inf"), "{text}");
}

#[test]
fn cache_round_trips_and_survives_verification() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = dir.path().join("a.cache");
    let c2 = dir.path().join("b.cache");
    let angle = "2pi*333/1000";
    assert!(run(&["approx", angle, "--tcount-max", "6", "--out", c1.to_str().unwrap()])
        .status
        .success());
    assert!(run(&["approx", angle, "--tcount-max", "6", "--out", c2.to_str().unwrap()])
        .status
        .success());
    let text = fs::read_to_string(&c1).unwrap();
    assert_eq!(text, fs::read_to_string(&c2).unwrap(), "cache writes are deterministic");
    assert!(text.starts_with("SQCT-CACHE v1\n"));
    assert!(text.lines().skip(1).all(|l| l.starts_with("v1|")));
    let ok = run(&["verify", "--max-tcount", "4", "--angles", "1", "--cache", c1.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
}

#[test]
fn tampered_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    assert!(run(&["approx", "2pi*333/1000", "--tcount-max", "6", "--out", path.to_str().unwrap()])
        .status
        .success());
    let text = fs::read_to_string(&path).unwrap();
    let tampered: Vec<String> = {
        let mut done = false;
        text.lines()
            .map(|l| {
                if !done && l.starts_with("v1|") && l.rsplit('|').next().unwrap().contains('T') {
                    done = true;
                    let pos = l.rfind('T').unwrap();
                    format!("{}S{}", &l[..pos], &l[pos + 1..])
                } else {
                    l.to_string()
                }
            })
            .collect()
    };
    fs::write(&path, tampered.join("\n") + "\n").unwrap();
    let out = run(&["verify", "--max-tcount", "4", "--angles", "1", "--cache", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cached_table_contains_the_ten_t_entry_for_sixteenth_pi() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p16.cache");
    assert!(run(&["approx", "pi/16", "--tcount-max", "10", "--out", path.to_str().unwrap()])
        .status
        .success());
    let text = fs::read_to_string(&path).unwrap();
    let mut hits = 0;
    for line in text.lines().filter(|l| l.starts_with("v1|")) {
        let f: Vec<&str> = line.split('|').collect();
        if f[2] != "10" {
            continue;
        }
        let c: Vec<BigInt> = f[5].split(',').map(|s| s.parse().unwrap()).collect();
        let mut x = ZOmega::new(3, 5, -3, -2);
        for _ in 0..8 {
            if x.coeffs()[..] == c[..] {
                hits += 1;
            }
            let d = x.coeffs();
            x = ZOmega::new(-d[3].clone(), d[0].clone(), d[1].clone(), d[2].clone());
        }
    }
    assert!(hits > 0, "no n=10 record matches the expected numerator up to phase:\n{text}");
}

#[test]
fn normeq_worked_example_lists_64_solutions() {
    let out = run(&["normeq", "1828037034-1292617383*r2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("factorization: (r2-1)^15 * r2^1 * (15-4*r2)^1 * (53-16*r2)^1 * 3^1"));
    assert!(text.contains("solutions: 64"));
    let listed = text.lines().skip_while(|l| !l.starts_with("solutions:")).skip(1).count();
    assert_eq!(listed, 64);
}

#[test]
fn normeq_unsolvable_exits_four_with_factorization() {
    let out = run(&["normeq", "7"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("factorization: (3-1*r2)^1 * (3+1*r2)^1"));
}

#[test]
fn normeq_rejects_garbage() {
    assert_eq!(run(&["normeq", "2+x*r2"]).status.code(), Some(2));
}

#[test]
fn batch_single_angle_stays_under_the_clifford_bound() {
    let out = run(&["batch", "--angle-set", "single:pi/3", "--tcount-max", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0], "pi/3");
    assert_eq!(cols[1], "3");
    let log2_inv: f64 = cols[2].parse().unwrap();
    assert!(log2_inv > 2.8617, "eps[3] must be below 0.1376, got 2^-{log2_inv}");
}

#[test]
fn batch_rows_are_monotone() {
    let out = run(&["batch", "--angle-set", "qft:5", "--tcount-max", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut last_angle = String::new();
    let mut last_val = f64::INFINITY;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let v = if cols[2] == "inf" { f64::INFINITY } else { cols[2].parse().unwrap() };
        if cols[0] == last_angle {
            assert!(
                v >= last_val || (v.is_infinite() && last_val.is_infinite()),
                "precision regressed within {line}"
            );
        }
        last_angle = cols[0].to_string();
        last_val = v;
    }
}

#[test]
fn tcount_accepts_words_and_columns() {
    let out = run(&["tcount", "--word", "T"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("tcount: 1"));
    let out = run(&["tcount", "--word", "HH"]);
    assert!(stdout(&out).contains("tcount: 0"));
    let out = run(&["tcount", "--word", "I"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("tcount: 0"));
    let out = run(&["tcount", "--x", "3,5,-3,-2", "--y", "-2,0,2,-3", "--k", "0", "--m", "6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("tcount: 10"));
    assert_eq!(run(&["tcount", "--word", "Q"]).status.code(), Some(2));
    assert_eq!(
        run(&["tcount", "--x", "1,0,0,0", "--y", "1,0,0,0", "--k", "0", "--m", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_rejects_budgets_beyond_the_oracle() {
    assert_eq!(run(&["verify", "--max-tcount", "15", "--angles", "1"]).status.code(), Some(2));
}
