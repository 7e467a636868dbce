//! Exact rational scalars and vectors.
//!
//! Every geometric predicate in this crate is decided over `Rat` =
//! arbitrary-precision rationals. Floating point appears only in sampled
//! data and in reported magnitudes (distances, maxima), never in verdicts.
//!
//! JSON encoding: rationals are strings `"p/q"` (or `"p"`, or a plain
//! decimal such as `"0.25"` on input). The serde adapters in [`q`],
//! [`q_vec`] and [`q_mat`] implement this convention for struct fields.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;
/// A point or covector with exact rational coordinates.
pub type QVec = Vec<Rat>;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"`, `"p"`, or a plain decimal like `"-1.25"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let d = BigInt::from_str(den.trim()).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let i = BigInt::from_str(int.trim()).map_err(|e| format!("bad number {s:?}: {e}"))?;
        let digits = frac.trim();
        let f = if digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(digits).map_err(|e| format!("bad number {s:?}: {e}"))?
        };
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let num = i * &scale + BigInt::from(sign) * f;
        return Ok(Rat::new(num, scale));
    }
    let n = BigInt::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}"))?;
    Ok(Rat::from_integer(n))
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good enough for reporting; exact comparisons never go through here.
    let n = r.numer();
    let d = r.denom();
    match (n.to_string().parse::<f64>(), d.to_string().parse::<f64>()) {
        (Ok(nf), Ok(df)) => nf / df,
        _ => f64::NAN,
    }
}

/// Exact conversion: every finite f64 is a rational.
pub fn f64_to_rat(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Rat, a: &[Rat]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn vec_neg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn vec_is_zero(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn norm_sq(a: &[Rat]) -> Rat {
    dot(a, a)
}

pub fn zeros(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

/// Canonical primitive-integer representative of the ray through `a`.
///
/// Scales so entries are coprime integers and the first nonzero entry is
/// positive when `fix_sign`. Returns `None` for the zero vector.
pub fn primitive(a: &[Rat], fix_sign: bool) -> Option<Vec<BigInt>> {
    if vec_is_zero(a) {
        return None;
    }
    let mut lcm = BigInt::one();
    for x in a {
        lcm = num::integer::lcm(lcm, x.denom().clone());
    }
    let mut ints: Vec<BigInt> = a.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = num::integer::gcd(g, v.clone());
    }
    if !g.is_zero() {
        for v in ints.iter_mut() {
            *v /= &g;
        }
    }
    if fix_sign {
        if let Some(first) = ints.iter().find(|v| !v.is_zero()) {
            if first.is_negative() {
                for v in ints.iter_mut() {
                    *v = -v.clone();
                }
            }
        }
    }
    Some(ints)
}

/// Serde adapter: a single rational as `"p/q"`.
pub mod q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: `Vec<Rat>` as `["p/q", ...]`.
pub mod q_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&fmt_rat(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<QVec, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter: `Vec<Vec<Rat>>`.
pub mod q_mat {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[QVec], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let strs: Vec<String> = row.iter().map(fmt_rat).collect();
            seq.serialize_element(&strs)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<QVec>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}
