//! Exact rational helpers: decimal parsing and string serde for `Rational64`.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse `{}` as an exact rational", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `"3/4"`, `"0.75"`, `"2"` or `"-1.5"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| err())?;
        let den: i64 = den.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        return Ok(Rational64::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) || frac_part.len() > 15 {
        return Err(err());
    }
    let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| err())? };
    let den = 10i64.pow(frac_part.len() as u32);
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| err())? };
    let value = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(err)?;
    let r = Rational64::new(value, den);
    Ok(if negative { -r } else { r })
}

/// Canonical text form: `"3/4"`, or `"2"` for integers.
pub fn format_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `2^r` as a float, exact when `r` is an integer.
pub fn exp2(r: &Rational64) -> f64 {
    if r.is_integer() {
        (r.to_integer() as i32 as f64).exp2()
    } else {
        to_f64(r).exp2()
    }
}

pub fn is_positive(r: &Rational64) -> bool {
    *r > Rational64::zero()
}

/// Serde adapter storing a `Rational64` as its canonical string.
pub mod serde_str {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_rational(&t).map_err(D::Error::custom),
            Raw::Int(i) => Ok(Rational64::from_integer(i)),
            Raw::Float(f) => parse_rational(&f.to_string()).map_err(D::Error::custom),
        }
    }
}

/// Same as [`serde_str`] for lists.
pub mod serde_str_vec {
    use super::*;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational64>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super::serde_str")] Rational64);
        Ok(Vec::<Wrapped>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.75").unwrap(), Rational64::new(3, 4));
        assert_eq!(parse_rational("3/4").unwrap(), Rational64::new(3, 4));
        assert_eq!(parse_rational("2").unwrap(), Rational64::from_integer(2));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational64::new(-3, 2));
        assert_eq!(parse_rational(".1").unwrap(), Rational64::new(1, 10));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e-3").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&Rational64::new(6, 8)), "3/4");
        assert_eq!(format_rational(&Rational64::from_integer(5)), "5");
    }

    #[test]
    fn exp2_is_exact_on_integers() {
        assert_eq!(exp2(&Rational64::from_integer(10)), 1024.0);
        assert_eq!(exp2(&Rational64::from_integer(-3)), 0.125);
    }
}
