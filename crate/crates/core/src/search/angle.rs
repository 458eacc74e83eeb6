//! Rotation angles for R_z(φ): exact rational multiples of π, or decimal
//! radian literals that can be re-evaluated at any precision.

use crate::hifloat::{div, from_bigint, mul, FloatCtx, HF};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AngleError {
    #[error("cannot parse {0:?} as an angle")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Angle {
    /// π·num/den with the fraction reduced and den > 0.
    PiRational { num: BigInt, den: BigInt },
    /// Plain radians, kept as text so any precision can re-parse it.
    Radians { literal: String },
}

impl Angle {
    pub fn pi_rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Angle {
        let mut num = num.into();
        let mut den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_zero() {
            num /= &g;
            den /= &g;
        }
        if num.is_zero() {
            den = BigInt::from(1);
        }
        Angle::PiRational { num, den }
    }

    pub fn radians(literal: &str) -> Result<Angle, AngleError> {
        let mut probe = FloatCtx::new(64);
        let v = probe.parse_decimal(literal);
        if v.is_nan() || v.is_inf() {
            return Err(AngleError::Parse(format!("rad:{literal}")));
        }
        Ok(Angle::Radians { literal: literal.to_string() })
    }

    /// φ in radians at the context precision.
    pub fn phi(&self, ctx: &mut FloatCtx) -> HF {
        let p = ctx.prec;
        match self {
            Angle::PiRational { num, den } => {
                let pi = ctx.pi();
                div(&mul(&pi, &from_bigint(num, p), p), &from_bigint(den, p), p)
            }
            Angle::Radians { literal } => ctx.parse_decimal(literal),
        }
    }

    /// When φ = jπ/4 exactly, the exponent j mod 8 (R_z(jπ/4) is T^j up to
    /// phase); None otherwise.
    pub fn exact_pi4_multiple(&self) -> Option<u8> {
        match self {
            Angle::PiRational { num, den } => {
                let four = BigInt::from(4);
                if (&four % den).is_zero() {
                    let j = (num * (&four / den)).mod_floor(&BigInt::from(8));
                    Some(j.to_u8().unwrap())
                } else {
                    None
                }
            }
            Angle::Radians { .. } => None,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiRational { num, den } => {
                let one = BigInt::from(1);
                if num.is_zero() {
                    write!(f, "0pi")
                } else if *den == one {
                    if *num == one {
                        write!(f, "pi")
                    } else if *num == -&one {
                        write!(f, "-pi")
                    } else {
                        write!(f, "{num}pi")
                    }
                } else if *num == one {
                    write!(f, "pi/{den}")
                } else if *num == -&one {
                    write!(f, "-pi/{den}")
                } else {
                    write!(f, "{num}pi/{den}")
                }
            }
            Angle::Radians { literal } => write!(f, "rad:{literal}"),
        }
    }
}

impl FromStr for Angle {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || AngleError::Parse(s.to_string());
        if let Some(lit) = compact.strip_prefix("rad:") {
            return Angle::radians(lit);
        }
        // forms: [INT]pi[*INT][/INT]
        let pos = compact.find("pi").ok_or_else(err)?;
        let (head, tail) = (&compact[..pos], &compact[pos + 2..]);
        let coeff: BigInt = match head {
            "" | "+" => BigInt::from(1),
            "-" => BigInt::from(-1),
            _ => head.parse().map_err(|_| err())?,
        };
        let (mult, den) = if let Some(rest) = tail.strip_prefix('*') {
            let (m, d) = match rest.split_once('/') {
                Some((m, d)) => (m.parse().map_err(|_| err())?, d.parse().map_err(|_| err())?),
                None => (rest.parse().map_err(|_| err())?, BigInt::from(1)),
            };
            (m, d)
        } else if let Some(rest) = tail.strip_prefix('/') {
            (BigInt::from(1), rest.parse().map_err(|_| err())?)
        } else if tail.is_empty() {
            (BigInt::from(1), BigInt::from(1))
        } else {
            return Err(err());
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(Angle::pi_rational(coeff * mult, den))
    }
}
