use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::Rational;
use crate::error::{Error, Result};

pub const MIN_EXP: i32 = -1;
pub const MAX_EXP: i32 = 4;
const LEN: usize = (MAX_EXP - MIN_EXP + 1) as usize;

/// Finite Laurent polynomial `sum a_j eps^j` for `j` in `-1..=4`, where `eps`
/// is a positive infinitesimal. Comparison is lexicographic starting from the
/// `eps^-1` coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentNum {
    coeffs: [Rational; LEN],
}

fn slot(exp: i32) -> Result<usize> {
    if (MIN_EXP..=MAX_EXP).contains(&exp) {
        Ok((exp - MIN_EXP) as usize)
    } else {
        Err(Error::ExponentOverflow(exp))
    }
}

impl LaurentNum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(c: &Rational) -> Self {
        let mut z = Self::zero();
        z.coeffs[slot(0).unwrap()] = c.clone();
        z
    }

    pub fn monomial(c: Rational, exp: i32) -> Result<Self> {
        let mut z = Self::zero();
        z.coeffs[slot(exp)?] = c;
        Ok(z)
    }

    pub fn from_coeffs(coeffs: [Rational; LEN]) -> Self {
        LaurentNum { coeffs }
    }

    pub fn coeff(&self, exp: i32) -> &Rational {
        &self.coeffs[slot(exp).expect("exponent in range")]
    }

    /// Coefficients paired with their exponents, lowest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.coeffs.iter().enumerate().map(|(i, c)| (i as i32 + MIN_EXP, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// Sign of the leading coefficient.
    pub fn signum(&self) -> i32 {
        self.coeffs.iter().map(Rational::signum).find(|s| *s != 0).unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LaurentNum { coeffs: std::array::from_fn(|i| &self.coeffs[i] * c) }
    }

    /// Multiplication by `eps^k`; fails if a nonzero coefficient leaves the range.
    pub fn shift(&self, k: i32) -> Result<Self> {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            if !c.is_zero() {
                out.coeffs[slot(e + k)?] = c.clone();
            }
        }
        Ok(out)
    }

    /// `c * eps^shift * a`.
    pub fn affine(c: &Rational, shift: i32, a: &LaurentNum) -> Result<Self> {
        a.shift(shift).map(|s| s.scale(c))
    }

    /// Substitutes a concrete positive rational for `eps`.
    pub fn eval(&self, eps: &Rational) -> Rational {
        assert!(eps.is_positive(), "eps must be positive");
        let inv = eps.recip();
        let mut acc = &self.coeffs[0] * &inv;
        let mut p = Rational::one();
        for c in &self.coeffs[1..] {
            if !c.is_zero() {
                acc += c * &p;
            }
            p = &p * eps;
        }
        acc
    }
}

impl Ord for LaurentNum {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for LaurentNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &LaurentNum {
    type Output = LaurentNum;
    fn add(self, rhs: &LaurentNum) -> LaurentNum {
        LaurentNum { coeffs: std::array::from_fn(|i| &self.coeffs[i] + &rhs.coeffs[i]) }
    }
}

impl Sub for &LaurentNum {
    type Output = LaurentNum;
    fn sub(self, rhs: &LaurentNum) -> LaurentNum {
        LaurentNum { coeffs: std::array::from_fn(|i| &self.coeffs[i] - &rhs.coeffs[i]) }
    }
}

impl Neg for &LaurentNum {
    type Output = LaurentNum;
    fn neg(self) -> LaurentNum {
        LaurentNum { coeffs: std::array::from_fn(|i| -&self.coeffs[i]) }
    }
}

impl fmt::Display for LaurentNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*eps")?,
                _ => write!(f, "{c}*eps^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn order_is_lexicographic_from_the_pole() {
        let inv = LaurentNum::monomial(q("1"), -1).unwrap();
        let big = LaurentNum::from_rational(&q("1000000"));
        assert!(big < inv);
        let tiny = LaurentNum::monomial(q("1000000"), 1).unwrap();
        assert!(tiny < LaurentNum::from_rational(&q("1/1000000")));
        assert!(LaurentNum::monomial(q("-1"), 4).unwrap() < LaurentNum::zero());
    }

    #[test]
    fn affine_shifts_and_scales() {
        let a = LaurentNum::monomial(q("3"), 1).unwrap();
        let r = LaurentNum::affine(&q("2"), 2, &a).unwrap();
        assert_eq!(r, LaurentNum::monomial(q("6"), 3).unwrap());
    }

    #[test]
    fn affine_overflow_is_reported() {
        let a = LaurentNum::monomial(q("1"), 4).unwrap();
        assert_eq!(LaurentNum::affine(&q("1"), 1, &a), Err(Error::ExponentOverflow(5)));
        let b = LaurentNum::monomial(q("1"), -1).unwrap();
        assert_eq!(b.shift(-1), Err(Error::ExponentOverflow(-2)));
        assert!(LaurentNum::monomial(q("1"), 5).is_err());
    }

    #[test]
    fn eval_substitutes_eps() {
        let x = &LaurentNum::monomial(q("2"), -1).unwrap() + &LaurentNum::monomial(q("3"), 3).unwrap();
        assert_eq!(x.eval(&q("1/2")), q("4") + q("3/8"));
    }
}
