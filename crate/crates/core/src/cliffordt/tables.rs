//! Clifford group closure, breadth-first enumeration of exact unitaries by
//! T-count, and the optimal-word table for T-count ≤ 3.

use super::{CanonicalKey, ExactUnitary};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

/// Hard cap on the enumeration depth; beyond this the memory cost is no
/// longer desk-scale.
pub const ORACLE_BOUND: usize = 14;

/// An enumerated unitary with a word that evaluates to it exactly.
#[derive(Clone, Debug)]
pub struct EnumEntry {
    pub unit: ExactUnitary,
    pub word: String,
}

/// A T-count ≤ 3 canonical representative with an optimal word.
#[derive(Clone, Debug)]
pub struct BaseEntry {
    pub unit: ExactUnitary,
    pub word: String,
    pub tcount: u32,
}

/// Flat coefficient key for dedupe inside the bounded enumeration, where
/// coefficients always fit machine words.
type CompactKey = ([i64; 8], u8, i64);

fn compact_key(rep: &ExactUnitary) -> CompactKey {
    let f = |c: &num_bigint::BigInt| c.to_i64().expect("enumeration coefficient exceeds i64");
    let x = rep.x().coeffs();
    let y = rep.y().coeffs();
    (
        [f(&x[0]), f(&x[1]), f(&x[2]), f(&x[3]), f(&y[0]), f(&y[1]), f(&y[2]), f(&y[3])],
        rep.k(),
        rep.m(),
    )
}

/// Collapses scalar W symbols into one tail run of length (count mod 8);
/// W commutes with everything, so evaluation is unchanged.
fn tidy_word(word: &str) -> String {
    let ws = word.bytes().filter(|&b| b == b'W').count() % 8;
    let mut out: String = word.chars().filter(|&c| c != 'W').collect();
    out.extend(std::iter::repeat('W').take(ws));
    out
}

/// All 24 Clifford unitaries up to phase, as closure of {H, S}, each with a
/// word evaluating to it exactly.
pub fn clifford_group() -> &'static [EnumEntry] {
    static CELL: OnceLock<Vec<EnumEntry>> = OnceLock::new();
    CELL.get_or_init(|| {
        let gens = [('H', ExactUnitary::h_gate()), ('S', ExactUnitary::s_gate())];
        let mut found: HashMap<CompactKey, EnumEntry> = HashMap::new();
        let (rep0, g0) = ExactUnitary::identity().canonical_rep();
        let word0 = "W".repeat(g0 as usize);
        let mut queue = VecDeque::new();
        queue.push_back(EnumEntry { unit: rep0.clone(), word: word0.clone() });
        found.insert(compact_key(&rep0), EnumEntry { unit: rep0, word: word0 });
        while let Some(cur) = queue.pop_front() {
            for (ch, gate) in &gens {
                let (rep, g) = cur.unit.mul(gate).canonical_rep();
                let key = compact_key(&rep);
                if found.contains_key(&key) {
                    continue;
                }
                let mut word = cur.word.clone();
                word.push(*ch);
                word.extend(std::iter::repeat('W').take(g as usize));
                let word = tidy_word(&word);
                found.insert(key, EnumEntry { unit: rep.clone(), word: word.clone() });
                queue.push_back(EnumEntry { unit: rep, word });
            }
        }
        let mut out: Vec<EnumEntry> = found.into_values().collect();
        out.sort_by_key(|e| compact_key(&e.unit));
        assert_eq!(out.len(), 24, "Clifford closure has 24 phase classes");
        out
    })
}

fn merge_min_word(acc: &mut HashMap<CompactKey, EnumEntry>, key: CompactKey, entry: EnumEntry) {
    match acc.entry(key) {
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(entry);
        }
        std::collections::hash_map::Entry::Occupied(mut o) => {
            let old = o.get();
            if (entry.word.len(), &entry.word) < (old.word.len(), &old.word) {
                o.insert(entry);
            }
        }
    }
}

/// Layers of canonical representatives by exact T-count: result[t] holds the
/// unitaries whose minimal T-count is t, each with a word of t T symbols.
///
/// Layer t+1 is the closure {C·T·V} over Cliffords C and layer-t members V,
/// minus everything already seen; a word's phase fix keeps eval exact.
pub fn enumerate_upto_tcount(n: usize) -> Vec<Vec<EnumEntry>> {
    assert!(n <= ORACLE_BOUND, "enumeration budget exceeded: {n} > {ORACLE_BOUND}");
    let ct: Vec<EnumEntry> = clifford_group()
        .iter()
        .map(|c| EnumEntry {
            unit: c.unit.mul(&ExactUnitary::t_gate()),
            word: tidy_word(&format!("{}T", c.word)),
        })
        .collect();
    let mut layers = vec![clifford_group().to_vec()];
    let mut seen: HashSet<CompactKey> =
        layers[0].iter().map(|e| compact_key(&e.unit)).collect();
    for _ in 1..=n {
        let frontier = layers.last().unwrap();
        let next: HashMap<CompactKey, EnumEntry> = frontier
            .par_chunks(64)
            .fold(HashMap::new, |mut acc, chunk| {
                for v in chunk {
                    for c in &ct {
                        let (rep, g) = c.unit.mul(&v.unit).canonical_rep();
                        let key = compact_key(&rep);
                        if seen.contains(&key) {
                            continue;
                        }
                        let mut word = String::with_capacity(c.word.len() + v.word.len() + g as usize);
                        word.push_str(&c.word);
                        word.push_str(&v.word);
                        word.extend(std::iter::repeat('W').take(g as usize));
                        merge_min_word(&mut acc, key, EnumEntry { unit: rep, word: tidy_word(&word) });
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, e) in b {
                    merge_min_word(&mut a, k, e);
                }
                a
            });
        let mut layer: Vec<(CompactKey, EnumEntry)> = next.into_iter().collect();
        layer.sort_by(|l, r| l.0.cmp(&r.0));
        seen.extend(layer.iter().map(|(k, _)| *k));
        layers.push(layer.into_iter().map(|(_, e)| e).collect());
    }
    layers
}

/// Optimal words for every phase class with T-count ≤ 3 (528 keys).
pub fn base_table() -> &'static HashMap<CanonicalKey, BaseEntry> {
    static CELL: OnceLock<HashMap<CanonicalKey, BaseEntry>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut map = HashMap::new();
        for (t, layer) in enumerate_upto_tcount(3).into_iter().enumerate() {
            for e in layer {
                let key = CanonicalKey::of_rep(&e.unit);
                let old = map.insert(key, BaseEntry { unit: e.unit, word: e.word, tcount: t as u32 });
                assert!(old.is_none(), "duplicate key across layers");
            }
        }
        assert_eq!(map.len(), 528, "phase classes with T-count <= 3");
        map
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliffordt::{eval_circuit, tcount_of_word};

    #[test]
    fn clifford_closure() {
        let group = clifford_group();
        assert_eq!(group.len(), 24);
        let keys: HashSet<CompactKey> = group.iter().map(|e| compact_key(&e.unit)).collect();
        // closed under multiplication, contains X, words evaluate exactly
        let x_key = compact_key(&ExactUnitary::x_gate().canonical_rep().0);
        assert!(keys.contains(&x_key));
        for a in group {
            assert_eq!(eval_circuit(&a.word).unwrap(), a.unit);
            for b in group {
                let prod = a.unit.mul(&b.unit).canonical_rep().0;
                assert!(keys.contains(&compact_key(&prod)));
            }
        }
    }

    #[test]
    fn layer_counts_small() {
        let layers = enumerate_upto_tcount(4);
        let expect_total = |n: u32| 24 * (3 * 2i64.pow(n) - 2);
        let mut total = 0i64;
        for (n, layer) in layers.iter().enumerate() {
            total += layer.len() as i64;
            if n == 0 {
                assert_eq!(total, 24);
            } else {
                assert_eq!(total, expect_total(n as u32), "cumulative count at {n}");
            }
        }
    }

    #[test]
    fn layer_words_evaluate() {
        let layers = enumerate_upto_tcount(3);
        for (t, layer) in layers.iter().enumerate() {
            for e in layer {
                assert_eq!(eval_circuit(&e.word).unwrap(), e.unit);
                assert_eq!(tcount_of_word(&e.word), t as u32);
            }
        }
    }

    #[test]
    fn base_table_covers_small_words() {
        let table = base_table();
        assert_eq!(table.len(), 528);
        for word in ["", "T", "TT", "HTH", "THTHST", "XSYZT"] {
            let u = eval_circuit(word).unwrap();
            assert!(table.contains_key(&u.canonical_key()), "word {word}");
        }
    }

    #[test]
    fn budget_guard() {
        let result = std::panic::catch_unwind(|| enumerate_upto_tcount(ORACLE_BOUND + 1));
        assert!(result.is_err());
    }
}
