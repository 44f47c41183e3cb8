//! Exact rationals and the exact-or-binary64 scalar used by certificates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Exact probability in `[0, 1]`. Range is enforced where distributions are built.
pub type Probability = BigRational;

/// Absolute slack used for every comparison in approximate mode.
pub const APPROX_TOLERANCE: f64 = 1e-9;

pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"0.25"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty rational".to_string());
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if t.contains('/') {
            return Err(format!("malformed rational {text:?}"));
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let numer = BigInt::from_str(&digits).map_err(|_| format!("malformed decimal {text:?}"))?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let (numer, denom) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| format!("malformed rational {text:?}"))?;
    let denom = BigInt::from_str(denom).map_err(|_| format!("malformed rational {text:?}"))?;
    if denom.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(BigRational::new(numer, denom))
}

pub fn rational_to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `base^exp` for a non-negative integer exponent.
pub fn rational_pow(base: &Rational, exp: u64) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    result
}

/// Value of a certificate: exact rational, or a binary64 approximation.
///
/// Arithmetic between two exact values stays exact; any approximate operand
/// makes the result approximate.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rational),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn mul_rational(&self, p: &Rational) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a * p),
            Scalar::Approx(x) => Scalar::Approx(x * rational_to_f64(p)),
        }
    }

    /// Total order used for sorting; approximate values compare as binary64.
    pub fn total_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    /// Checks `self <= rhs`. Exact operands compare exactly; otherwise the
    /// inequality may be violated by at most [`APPROX_TOLERANCE`].
    pub fn check_le(&self, rhs: &Scalar) -> Comparison {
        let slack = rhs.sub(self);
        match &slack {
            Scalar::Exact(s) => Comparison {
                holds: !s.is_negative(),
                tight: s.is_zero(),
                slack,
            },
            Scalar::Approx(s) => Comparison {
                holds: *s >= -APPROX_TOLERANCE,
                tight: s.abs() <= APPROX_TOLERANCE,
                slack,
            },
        }
    }

    /// Checks `self > margin` strictly (exact) or `self > margin` with the
    /// approximate margin already folded into `margin`.
    pub fn check_gt(&self, margin: &Scalar) -> Comparison {
        let slack = self.sub(margin);
        let holds = match &slack {
            Scalar::Exact(s) => s.is_positive(),
            Scalar::Approx(s) => *s > 0.0,
        };
        Comparison {
            holds,
            tight: false,
            slack,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Approx(x) => *x < 0.0,
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other.total_cmp(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other.total_cmp(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Approx(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(x) => write!(f, "{x:e}"),
        }
    }
}

/// Exact scalars serialize as `"p/q"` text, approximate ones as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&r.to_string()),
            Scalar::Approx(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(t) => parse_rational(&t)
                .map(Scalar::Exact)
                .map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(Scalar::Exact(int(i))),
            Raw::Float(x) => Ok(Scalar::Approx(x)),
        }
    }
}

/// Outcome of a single inequality evaluation.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub holds: bool,
    /// Held with equality (exact) or within tolerance (approximate).
    pub tight: bool,
    /// `rhs - lhs`; negative means violated.
    pub slack: Scalar,
}

/// Serde adapter writing rationals as `"p/q"` text.
pub mod rational_text {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("4/6").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let q = rat(2, 3);
        assert_eq!(rational_pow(&q, 0), int(1));
        assert_eq!(rational_pow(&q, 3), rat(8, 27));
    }

    #[test]
    fn exact_equality_is_tight_and_holds() {
        let c = Scalar::Exact(rat(1, 3)).check_le(&Scalar::Exact(rat(1, 3)));
        assert!(c.holds && c.tight);
        let c = Scalar::Exact(rat(1, 3)).check_le(&Scalar::Exact(rat(1, 4)));
        assert!(!c.holds);
        assert_eq!(c.slack, Scalar::Exact(rat(-1, 12)));
    }

    #[test]
    fn approximate_comparison_uses_tolerance() {
        let c = Scalar::Approx(1.0 + 5e-10).check_le(&Scalar::Approx(1.0));
        assert!(c.holds && c.tight);
        let c = Scalar::Approx(1.0 + 1e-6).check_le(&Scalar::Approx(1.0));
        assert!(!c.holds);
    }

    #[test]
    fn mixed_arithmetic_degrades_to_approx() {
        let s = Scalar::Exact(rat(1, 2)).add(&Scalar::Approx(0.25));
        assert!(!s.is_exact());
        assert!((s.to_f64() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn scalar_json_round_trip() {
        let s = Scalar::Exact(rat(2, 3));
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, "\"2/3\"");
        let back: Scalar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let approx: Scalar = serde_json::from_str("0.5").unwrap();
        assert!(!approx.is_exact());
    }
}
