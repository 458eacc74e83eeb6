//! Exact single-qubit unitaries over the Clifford+T gate set: circuit
//! evaluation, phase canonicalization, T-count, T-optimal synthesis, and a
//! breadth-first enumeration that doubles as an independent oracle.

mod bruteforce;
mod tables;

pub use bruteforce::{cup_bruteforce, cup_bruteforce_table, trace_distance};
pub use tables::{base_table, clifford_group, enumerate_upto_tcount, BaseEntry, EnumEntry, ORACLE_BOUND};

use crate::ring::{SdeValue, ZOmega, ZSqrt2};
use num_bigint::BigInt;
use num_traits::One;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("unknown gate symbol {0:?}")]
    UnknownSymbol(char),
    #[error("cannot parse {0:?} as an exact unitary")]
    Parse(String),
}

/// Gate word over the alphabet {H, T, S, X, Y, Z, W}; W is the scalar ω.
///
/// The word reads left-to-right as a matrix product left-to-right, so the
/// first symbol is the last gate applied to a state.
pub type Circuit = String;

/// [[x, −conj(y)ω^k], [y, conj(x)ω^k]] / √2^m with x, y in Z[ω].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactUnitary {
    x: ZOmega,
    y: ZOmega,
    k: u8,
    m: i64,
}

/// Lexicographically least (x, y, k, m) among the 8 phase multiples ω^g·U.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey {
    pub x: [BigInt; 4],
    pub y: [BigInt; 4],
    pub k: u8,
    pub m: i64,
}

impl CanonicalKey {
    fn of_rep(rep: &ExactUnitary) -> CanonicalKey {
        CanonicalKey { x: rep.x.coeffs().clone(), y: rep.y.coeffs().clone(), k: rep.k, m: rep.m }
    }
}

impl ExactUnitary {
    /// Builds the unitary, reducing common √2 factors and checking unit
    /// column norm.
    pub fn new(x: ZOmega, y: ZOmega, k: u8, m: i64) -> ExactUnitary {
        assert!(!(x.is_zero() && y.is_zero()), "zero columns are not unitary");
        let mut x = x;
        let mut y = y;
        let mut m = m;
        while m > 0 {
            match (x.div_sqrt2(), y.div_sqrt2()) {
                (Some(xh), Some(yh)) => {
                    x = xh;
                    y = yh;
                    m -= 1;
                }
                _ => break,
            }
        }
        assert!(m >= 0, "denominator exponent must be non-negative");
        let norm = &x.abs_sq() + &y.abs_sq();
        assert!(
            norm == ZSqrt2::new(BigInt::one() << (m as usize), 0),
            "columns are not unit length: |x|^2+|y|^2 = {norm}, m = {m}"
        );
        ExactUnitary { x, y, k: k % 8, m }
    }

    pub fn x(&self) -> &ZOmega {
        &self.x
    }

    pub fn y(&self) -> &ZOmega {
        &self.y
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn identity() -> ExactUnitary {
        ExactUnitary::new(ZOmega::one(), ZOmega::zero(), 0, 0)
    }

    pub fn t_gate() -> ExactUnitary {
        ExactUnitary::t_pow(1)
    }

    /// T^j = diag(1, ω^j); j is reduced mod 8 (T⁸ = identity exactly).
    pub fn t_pow(j: u8) -> ExactUnitary {
        ExactUnitary::new(ZOmega::one(), ZOmega::zero(), j % 8, 0)
    }

    pub fn s_gate() -> ExactUnitary {
        ExactUnitary::t_pow(2)
    }

    pub fn z_gate() -> ExactUnitary {
        ExactUnitary::t_pow(4)
    }

    pub fn x_gate() -> ExactUnitary {
        ExactUnitary::new(ZOmega::zero(), ZOmega::one(), 4, 0)
    }

    pub fn y_gate() -> ExactUnitary {
        ExactUnitary::new(ZOmega::zero(), ZOmega::new(0, 0, 1, 0), 4, 0)
    }

    pub fn h_gate() -> ExactUnitary {
        ExactUnitary::new(ZOmega::one(), ZOmega::one(), 4, 1)
    }

    /// Matrix product self·rhs.
    pub fn mul(&self, rhs: &ExactUnitary) -> ExactUnitary {
        let wk = |z: ZOmega| z.mul_omega_pow(self.k);
        let x = &(&self.x * &rhs.x) - &wk(&self.y.conj() * &rhs.y);
        let y = &(&self.y * &rhs.x) + &wk(&self.x.conj() * &rhs.y);
        ExactUnitary::new(x, y, (self.k + rhs.k) % 8, self.m + rhs.m)
    }

    pub fn dagger(&self) -> ExactUnitary {
        let kk = (8 - self.k) % 8;
        ExactUnitary::new(self.x.conj(), -&self.y.mul_omega_pow(kk), kk, self.m)
    }

    /// Scalar multiplication by ω^g.
    pub fn mul_scalar_omega(&self, g: u8) -> ExactUnitary {
        let g = g % 8;
        ExactUnitary {
            x: self.x.mul_omega_pow(g),
            y: self.y.mul_omega_pow(g),
            k: (self.k + 2 * g) % 8,
            m: self.m,
        }
    }

    /// sde of |x|² with denominator exponent 2m (the unitary's sde).
    pub fn sde(&self) -> SdeValue {
        self.x.abs_sq().sde(2 * self.m)
    }

    /// The phase representative with the least key, and g with rep = ω^g·self.
    pub fn canonical_rep(&self) -> (ExactUnitary, u8) {
        let mut best: Option<(ExactUnitary, u8)> = None;
        for g in 0..8 {
            let cand = self.mul_scalar_omega(g);
            let better = match &best {
                None => true,
                Some((b, _)) => {
                    (cand.x.coeffs(), cand.y.coeffs(), cand.k) < (b.x.coeffs(), b.y.coeffs(), b.k)
                }
            };
            if better {
                best = Some((cand, g));
            }
        }
        best.unwrap()
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey::of_rep(&self.canonical_rep().0)
    }

    /// Same unitary up to a global phase ω^g.
    pub fn phase_equal(&self, other: &ExactUnitary) -> bool {
        self.canonical_key() == other.canonical_key()
    }
}

impl fmt::Display for ExactUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}; {}; {}", self.x, self.y, self.k, self.m)
    }
}

impl FromStr for ExactUnitary {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CircuitError::Parse(s.to_string());
        let parts: Vec<&str> = s.split(';').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(err());
        }
        let x: ZOmega = parts[0].parse().map_err(|_| err())?;
        let y: ZOmega = parts[1].parse().map_err(|_| err())?;
        let k: u8 = parts[2].parse().map_err(|_| err())?;
        let m: i64 = parts[3].parse().map_err(|_| err())?;
        if k >= 8 {
            return Err(err());
        }
        Ok(ExactUnitary::new(x, y, k, m))
    }
}

/// Evaluates a gate word to its exact matrix product.
pub fn eval_circuit(word: &str) -> Result<ExactUnitary, CircuitError> {
    let mut acc = ExactUnitary::identity();
    for ch in word.chars() {
        acc = match ch {
            'H' => acc.mul(&ExactUnitary::h_gate()),
            'T' => acc.mul(&ExactUnitary::t_gate()),
            'S' => acc.mul(&ExactUnitary::s_gate()),
            'X' => acc.mul(&ExactUnitary::x_gate()),
            'Y' => acc.mul(&ExactUnitary::y_gate()),
            'Z' => acc.mul(&ExactUnitary::z_gate()),
            'W' => acc.mul_scalar_omega(1),
            _ => return Err(CircuitError::UnknownSymbol(ch)),
        };
    }
    Ok(acc)
}

/// Number of T symbols in a word.
pub fn tcount_of_word(word: &str) -> u32 {
    word.chars().filter(|c| *c == 'T').count() as u32
}

fn ht_j() -> &'static [ExactUnitary; 8] {
    static CELL: OnceLock<[ExactUnitary; 8]> = OnceLock::new();
    CELL.get_or_init(|| std::array::from_fn(|j| ExactUnitary::h_gate().mul(&ExactUnitary::t_pow(j as u8))))
}

fn t_l_h() -> &'static [ExactUnitary; 8] {
    static CELL: OnceLock<[ExactUnitary; 8]> = OnceLock::new();
    CELL.get_or_init(|| std::array::from_fn(|l| ExactUnitary::t_pow(l as u8).mul(&ExactUnitary::h_gate())))
}

fn h_t_negj() -> &'static [ExactUnitary; 8] {
    static CELL: OnceLock<[ExactUnitary; 8]> = OnceLock::new();
    CELL.get_or_init(|| {
        std::array::from_fn(|j| ExactUnitary::h_gate().mul(&ExactUnitary::t_pow(((8 - j) % 8) as u8)))
    })
}

/// Minimal number of T gates over all circuits implementing u up to phase.
///
/// Keys with T-count ≤ 3 come from the base table; above that, some pair
/// (j, l) raises the sde of H·T^j·u·T^l·H by two, every such pair shares one
/// parity signature, and the answer is sde(u) − (j mod 2) − (l mod 2).
pub fn tcount_unitary(u: &ExactUnitary) -> u32 {
    if let Some(entry) = tables::base_table().get(&u.canonical_key()) {
        return entry.tcount;
    }
    let s = u.sde().expect_finite("T-count");
    assert!(s >= 4, "unitary outside the base table must have sde >= 4, got {s}");
    for j in 0..8usize {
        let left = ht_j()[j].mul(u);
        for (l, right) in t_l_h().iter().enumerate() {
            if left.mul(right).sde() == SdeValue::Finite(s + 2) {
                return (s - (j % 2) as i64 - (l % 2) as i64) as u32;
            }
        }
    }
    unreachable!("no denominator-raising pair (j, l) for {u}")
}

/// Produces a word with tcount_unitary(u) T symbols whose evaluation is
/// exactly u (global phase included, encoded as trailing W symbols).
pub fn synthesize(u: &ExactUnitary) -> Circuit {
    let mut word = String::new();
    let mut cur = u.clone();
    let mut guard = 0usize;
    loop {
        let (rep, g) = cur.canonical_rep();
        let key = CanonicalKey::of_rep(&rep);
        if let Some(entry) = tables::base_table().get(&key) {
            // cur = ω^(8−g)·rep
            word.push_str(&entry.word);
            for _ in 0..((8 - g) % 8) {
                word.push('W');
            }
            break;
        }
        let s = cur.sde().expect_finite("synthesis");
        let mut reduced = false;
        // even j first: those reduction steps cost no T gate
        for j in [0, 2, 4, 6, 1, 3, 5, 7] {
            // cur = T^j·H·cand, peel the prefix and keep reducing cand
            let cand = h_t_negj()[j].mul(&cur);
            if cand.sde() == SdeValue::Finite(s - 1) {
                for _ in 0..(j / 2) {
                    word.push('S');
                }
                if j % 2 == 1 {
                    word.push('T');
                }
                word.push('H');
                cur = cand;
                reduced = true;
                break;
            }
        }
        assert!(reduced, "no denominator-lowering j for {cur}");
        guard += 1;
        assert!(guard < 10_000, "synthesis failed to terminate");
    }
    // collect the scalar ω factors at the end of the word
    let w_total = word.chars().filter(|c| *c == 'W').count() % 8;
    let mut out: String = word.chars().filter(|c| *c != 'W').collect();
    for _ in 0..w_total {
        out.push('W');
    }
    out
}
