//! Exact number types: rationals, Laurent polynomials in an infinitesimal, and
//! rationals extended with `+inf`.

mod ext;
mod laurent;
mod rational;

pub use ext::ExtRational;
pub use laurent::{LaurentNum, MAX_EXP, MIN_EXP};
pub use rational::{denominator_lcm, Rational};

/// Totally ordered carrier that formulas and cost functions can be evaluated
/// over: the rationals themselves, or the Laurent extension.
pub trait Carrier: Clone + Ord {
    fn from_rational(c: &Rational) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
    fn plus(&self, other: &Self) -> Self;
}

impl Carrier for Rational {
    fn from_rational(c: &Rational) -> Self {
        c.clone()
    }
    fn scaled(&self, c: &Rational) -> Self {
        self * c
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}

impl Carrier for LaurentNum {
    fn from_rational(c: &Rational) -> Self {
        LaurentNum::from_rational(c)
    }
    fn scaled(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
}
