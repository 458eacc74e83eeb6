//! Line-oriented ASCII cache of approximation answers.

use ctsynth::ring::ZOmega;
use num_bigint::BigInt;
use std::fs;
use std::io::Write;
use std::path::Path;

pub const HEADER: &str = "SQCT-CACHE v1";

/// One cached answer: the unitary columns, its circuit word, and ε² as a
/// 256-bit hex float.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheRecord {
    pub angle: String,
    pub n: u32,
    pub k: u8,
    pub m: i64,
    pub x: ZOmega,
    pub y: ZOmega,
    pub eps2_hex: String,
    pub word: String,
}

fn coeffs_text(z: &ZOmega) -> String {
    let c = z.coeffs();
    format!("{},{},{},{}", c[0], c[1], c[2], c[3])
}

pub(crate) fn parse_coeffs(s: &str) -> Option<ZOmega> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return None;
    }
    let c: Vec<BigInt> = parts.iter().map(|p| p.parse().ok()).collect::<Option<_>>()?;
    Some(ZOmega::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()))
}

impl CacheRecord {
    pub fn render(&self) -> String {
        format!(
            "v1|{}|{}|{}|{}|{}|{}|{}|{}",
            self.angle,
            self.n,
            self.k,
            self.m,
            coeffs_text(&self.x),
            coeffs_text(&self.y),
            self.eps2_hex,
            self.word
        )
    }

    pub fn parse(line: &str) -> Result<CacheRecord, String> {
        let bad = || format!("malformed cache record: {line:?}");
        let f: Vec<&str> = line.split('|').collect();
        if f.len() != 9 || f[0] != "v1" {
            return Err(bad());
        }
        Ok(CacheRecord {
            angle: f[1].to_string(),
            n: f[2].parse().map_err(|_| bad())?,
            k: f[3].parse().map_err(|_| bad())?,
            m: f[4].parse().map_err(|_| bad())?,
            x: parse_coeffs(f[5]).ok_or_else(bad)?,
            y: parse_coeffs(f[6]).ok_or_else(bad)?,
            eps2_hex: f[7].to_string(),
            word: f[8].to_string(),
        })
    }
}

pub fn write_cache(path: &Path, records: &[CacheRecord]) -> std::io::Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "{HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.render())?;
    }
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<Vec<CacheRecord>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(format!("missing {HEADER:?} header"));
    }
    lines.filter(|l| !l.is_empty()).map(CacheRecord::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trips() {
        let r = CacheRecord {
            angle: "2pi*7/1000".into(),
            n: 10,
            k: 0,
            m: 6,
            x: ZOmega::new(3, 5, -3, -2),
            y: ZOmega::new(-2, 0, 2, -3),
            eps2_hex: "+3.fa0@-7".into(),
            word: "HTHTSW".into(),
        };
        assert_eq!(CacheRecord::parse(&r.render()).unwrap(), r);
        assert!(CacheRecord::parse("v0|x").is_err());
        assert!(CacheRecord::parse("v1|a|1|2|3|4|5|6").is_err());
    }
}
