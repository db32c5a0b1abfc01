//! Exact Gaussian-rational scalars: the coefficient field for every series.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;

pub type Rational = BigRational;

/// A Gaussian rational `re + im*i`. All arithmetic is exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub re: Rational,
    pub im: Rational,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: Rational::one(),
            im: Rational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: Rational::from_integer(BigInt::from(n)),
            im: Rational::zero(),
        }
    }

    pub fn from_rational(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: Rational::new(BigInt::from(num), BigInt::from(den)),
            im: Rational::zero(),
        }
    }

    pub fn from_real(re: Rational) -> Self {
        Scalar {
            re,
            im: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate (an involution).
    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// The modulus surrogate `m(a+bi) = |a| + |b|`.
    ///
    /// Subadditive and submultiplicative, which is all the norm inequalities
    /// in this crate rely on.
    pub fn abs_surrogate(&self) -> Rational {
        self.re.abs() + self.im.abs()
    }

    /// `|re|^2 + |im|^2`, exact.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inverse(&self) -> Result<Self, CoreError> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let n = self.norm_sq();
        Ok(Scalar {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<'a> Sub<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        (&self).mul(&rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        let v = (&*self).mul(rhs);
        *self = v;
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        let inv = rhs.inverse().expect("division by zero scalar");
        (&self).mul(&inv)
    }
}

impl<'a> Div<&'a Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        let inv = rhs.inverse().expect("division by zero scalar");
        self.mul(&inv)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Canonical reduced-fraction string for a rational, e.g. `-3/4` or `2`.
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn rational_from_str(s: &str) -> Result<Rational, CoreError> {
    Rational::from_str(s.trim()).map_err(|_| CoreError::BadRational(s.to_string()))
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    re: String,
    im: String,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            re: rational_to_string(&self.re),
            im: rational_to_string(&self.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let re = rational_from_str(&repr.re).map_err(DeError::custom)?;
        let im = rational_from_str(&repr.im).map_err(DeError::custom)?;
        Ok(Scalar { re, im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_is_involutive_and_multiplicative() {
        let x = Scalar::new(
            Rational::new(BigInt::from(3), BigInt::from(4)),
            Rational::new(BigInt::from(-1), BigInt::from(2)),
        );
        let y = Scalar::new(
            Rational::new(BigInt::from(2), BigInt::from(7)),
            Rational::new(BigInt::from(5), BigInt::from(3)),
        );
        assert_eq!(x.conj().conj(), x);
        assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
    }

    #[test]
    fn surrogate_modulus_is_subadditive_and_submultiplicative() {
        let x = Scalar::new(
            Rational::new(BigInt::from(3), BigInt::from(4)),
            Rational::new(BigInt::from(-7), BigInt::from(2)),
        );
        let y = Scalar::new(
            Rational::new(BigInt::from(-2), BigInt::from(5)),
            Rational::new(BigInt::from(1), BigInt::from(3)),
        );
        assert!((&x + &y).abs_surrogate() <= x.abs_surrogate() + y.abs_surrogate());
        assert!((&x * &y).abs_surrogate() <= x.abs_surrogate() * y.abs_surrogate());
    }

    #[test]
    fn division_round_trips() {
        let x = Scalar::new(
            Rational::new(BigInt::from(3), BigInt::from(4)),
            Rational::new(BigInt::from(-1), BigInt::from(2)),
        );
        let q = &Scalar::one() / &x;
        assert!( (&q * &x).is_one());
    }

    #[test]
    fn rational_strings_round_trip() {
        for s in ["3/4", "-2", "0", "-11/13"] {
            let r = rational_from_str(s).unwrap();
            assert_eq!(rational_to_string(&r), s);
        }
    }
}
