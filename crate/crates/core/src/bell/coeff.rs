use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A functional coefficient: exact rational when possible, float otherwise.
///
/// Arithmetic stays exact while both operands are exact and no overflow
/// occurs; otherwise it degrades to `f64`.
#[derive(Clone, Copy, Debug)]
pub enum Coeff {
    Exact(Rational64),
    Real(f64),
}

/// Largest denominator accepted when reading a float as a dyadic rational.
const DYADIC_LIMIT: i64 = 1 << 20;

impl Coeff {
    pub const ZERO: Coeff = Coeff::Exact(Rational64::new_raw(0, 1));

    pub fn int(n: i64) -> Self {
        Coeff::Exact(Rational64::from_integer(n))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Coeff::Exact(Rational64::new(p, q))
    }

    /// Floats that are small dyadic fractions (0.5, -1.25, 3.0) become exact.
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() && x.abs() < 1e12 {
            let scaled = x * DYADIC_LIMIT as f64;
            if scaled.fract() == 0.0 {
                return Coeff::Exact(Rational64::new(scaled as i64, DYADIC_LIMIT));
            }
        }
        Coeff::Real(x)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Coeff::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Coeff::Real(x) => x,
        }
    }

    pub fn as_exact(self) -> Option<Rational64> {
        match self {
            Coeff::Exact(r) => Some(r),
            Coeff::Real(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_zero(self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_zero(),
            Coeff::Real(x) => x == 0.0,
        }
    }

    fn combine(
        self,
        rhs: Coeff,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        real: impl Fn(f64, f64) -> f64,
    ) -> Coeff {
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, rhs) {
            if let Some(r) = exact(&a, &b) {
                return Coeff::Exact(r);
            }
        }
        Coeff::Real(real(self.to_f64(), rhs.to_f64()))
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::ZERO
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        self.combine(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        self.combine(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        self.combine(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(-r),
            Coeff::Real(x) => Coeff::Real(-x),
        }
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::int(n)
    }
}

impl From<f64> for Coeff {
    fn from(x: f64) -> Self {
        Coeff::from_f64(x)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Coeff::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Coeff::Real(x) => write!(f, "{x}"),
        }
    }
}

impl std::str::FromStr for Coeff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidCoefficient(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(Coeff::ratio(p, q));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Coeff::int(n));
        }
        s.parse::<f64>().map(Coeff::from_f64).map_err(|_| bad())
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Coeff::Exact(r) if r.is_integer() => serializer.serialize_i64(*r.numer()),
            Coeff::Exact(r) => serializer.collect_str(&format_args!("{}/{}", r.numer(), r.denom())),
            Coeff::Real(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(deserializer)? {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Coeff::int(i))
                } else {
                    n.as_f64()
                        .map(Coeff::from_f64)
                        .ok_or_else(|| D::Error::custom("coefficient out of range"))
                }
            }
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("invalid coefficient {other}"))),
        }
    }
}
