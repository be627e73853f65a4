//! Exact Gaussian rationals, the coefficient field of every algebraic
//! computation in the crate.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A number `re + im·i` with `re`, `im` exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(n.into()),
            im: BigRational::zero(),
        }
    }

    /// `re_num/re_den + (im_num/im_den)·i`. Panics on a zero denominator.
    pub fn from_ratios(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Scalar {
            re: BigRational::new(re_num.into(), re_den.into()),
            im: BigRational::new(im_num.into(), im_den.into()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// `[re_num, re_den, im_num, im_den]` with positive denominators.
    pub fn to_parts(&self) -> [BigInt; 4] {
        [
            self.re.numer().clone(),
            self.re.denom().clone(),
            self.im.numer().clone(),
            self.im.denom().clone(),
        ]
    }

    pub fn from_parts(parts: [BigInt; 4]) -> Option<Self> {
        let [a, b, c, d] = parts;
        if b.is_zero() || d.is_zero() {
            return None;
        }
        Some(Scalar {
            re: BigRational::new(a, b),
            im: BigRational::new(c, d),
        })
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
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

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
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

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.re += rhs.re;
        self.im += rhs.im;
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

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
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

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", self.re, sign, self.im.abs())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Part {
    Int(i64),
    Big(String),
}

impl Part {
    fn from_big(b: &BigInt) -> Part {
        b.to_i64()
            .map(Part::Int)
            .unwrap_or_else(|| Part::Big(b.to_string()))
    }

    fn to_big(&self) -> Result<BigInt, String> {
        match self {
            Part::Int(i) => Ok(BigInt::from(*i)),
            Part::Big(s) => s.parse().map_err(|_| format!("not an integer: {s}")),
        }
    }
}

/// Serialised as `[re_num, re_den, im_num, im_den]`; entries that do not fit
/// in an `i64` are written as decimal strings. A bare integer is also read.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let parts = self.to_parts();
        [0, 1, 2, 3]
            .map(|i| Part::from_big(&parts[i]))
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Whole(i64),
            Parts([Part; 4]),
        }
        let parts = match Repr::deserialize(deserializer)? {
            Repr::Whole(n) => return Ok(Scalar::from_int(n)),
            Repr::Parts(p) => p,
        };
        let mut big = Vec::with_capacity(4);
        for p in &parts {
            big.push(p.to_big().map_err(de::Error::custom)?);
        }
        let arr: [BigInt; 4] = big.try_into().expect("four parts");
        Scalar::from_parts(arr).ok_or_else(|| de::Error::custom("zero denominator"))
    }
}
