use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use super::Rational;
use crate::error::Error;

/// A rational cost or `+inf`. Variant order gives `Finite(_) < PosInf`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::PosInf => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        assert!(!c.is_negative(), "cannot scale an extended value by a negative factor");
        match self {
            ExtRational::Finite(q) => ExtRational::Finite(q * c),
            ExtRational::PosInf if c.is_zero() => ExtRational::zero(),
            ExtRational::PosInf => ExtRational::PosInf,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(q: Rational) -> Self {
        ExtRational::Finite(q)
    }
}

impl From<Option<Rational>> for ExtRational {
    fn from(q: Option<Rational>) -> Self {
        q.map_or(ExtRational::PosInf, ExtRational::Finite)
    }
}

impl Add for &ExtRational {
    type Output = ExtRational;
    fn add(self, rhs: &ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::PosInf,
        }
    }
}

impl Add for ExtRational {
    type Output = ExtRational;
    fn add(self, rhs: ExtRational) -> ExtRational {
        &self + &rhs
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::PosInf => f.write_str("+inf"),
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtRational::PosInf),
            t => t.parse().map(ExtRational::Finite),
        }
    }
}

impl serde::Serialize for ExtRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExtRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
