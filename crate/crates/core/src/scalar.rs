//! Exact scalars over Q and the Gaussian rationals Q(i).
//!
//! A single [`Scalar`] type covers both fields: a rational is a Gaussian
//! rational whose imaginary part is zero, so an embedded rational compares
//! equal to itself in either field. The field an algebra lives over is a
//! runtime [`Field`] tag checked by the operations that combine algebras.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground field tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    /// The rationals, standing in for the reals.
    Q,
    /// The Gaussian rationals, standing in for the complex numbers.
    Qi,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Q => "Q",
            Field::Qi => "Qi",
        }
    }

    /// Whether `s` is an element of this field.
    pub fn contains(self, s: &Scalar) -> bool {
        match self {
            Field::Q => s.is_rational(),
            Field::Qi => true,
        }
    }

    pub fn check_same(self, other: Field) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(Field::Q),
            "Qi" | "Q(i)" => Ok(Field::Qi),
            other => Err(Error::Parse(format!("unknown field '{other}'"))),
        }
    }
}

/// An exact Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

/// Lexicographic on `(re, im)`; a total order used for deterministic output.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.re, &self.im).cmp(&(&other.re, &other.im))
    }
}

impl Scalar {
    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::from_rational(BigRational::from_integer(n))
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

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `num/den`; panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re² + im²`.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar::from_rational(self.re.recip()));
        }
        let n = self.norm();
        Some(Scalar {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of a rational scalar (-1, 0, 1); `None` when the imaginary part is nonzero.
    pub fn sign(&self) -> Option<i8> {
        if !self.im.is_zero() {
            return None;
        }
        Some(if self.re.is_zero() {
            0
        } else if self.re.is_positive() {
            1
        } else {
            -1
        })
    }

    /// Largest absolute value of any numerator or denominator appearing in
    /// either part.
    pub fn height(&self) -> BigInt {
        [
            self.re.numer().abs(),
            self.re.denom().clone(),
            self.im.numer().abs(),
            self.im.denom().clone(),
        ]
        .into_iter()
        .max()
        .unwrap()
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Canonical text in the given field: `p/q` (or `p`) over Q, and
    /// `a+bi` with both parts always present over Q(i).
    pub fn to_field_string(&self, field: Field) -> String {
        match field {
            Field::Q if self.im.is_zero() => fmt_rational(&self.re),
            _ => {
                let re = fmt_rational(&self.re);
                let im = fmt_rational(&self.im);
                if im.starts_with('-') {
                    format!("{re}{im}i")
                } else {
                    format!("{re}+{im}i")
                }
            }
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("malformed rational '{s}'"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let digits = |t: &str| {
        let body = t.strip_prefix(['+', '-']).unwrap_or(t);
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits(num) || !den.bytes().all(|b| b.is_ascii_digit()) || den.is_empty() {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p`, `p/q`, `a+bi`, `a-bi`, `bi`, `i`, `-i` with rational parts.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Scalar::from_rational(parse_rational(t)?));
        };
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (parse_rational(&body[..k])?, &body[k..]),
            None => (BigRational::zero(), body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other)?,
        };
        Ok(Scalar { re, im })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = if self.im.is_zero() { Field::Q } else { Field::Qi };
        f.write_str(&self.to_field_string(field))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_rational(BigRational::from_integer(n))
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &o.re,
            im: if self.im.is_zero() && o.im.is_zero() {
                BigRational::zero()
            } else {
                &self.im + &o.im
            },
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &o.re,
            im: if self.im.is_zero() && o.im.is_zero() {
                BigRational::zero()
            } else {
                &self.im - &o.im
            },
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::from_rational(&self.re * &o.re);
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero scalar")
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

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Squarefree integer representing the square class of a nonzero rational,
/// e.g. `-4 -> -1`, `18 -> 2`, `3/4 -> 3`. Returns `None` for zero or for
/// numbers too large to factor by trial division.
pub fn square_class(r: &BigRational) -> Option<BigInt> {
    if r.is_zero() {
        return None;
    }
    // p/q ~ p*q modulo squares
    let n = r.numer() * r.denom();
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1u64 << 40);
    while &p * &p <= m {
        if p > limit {
            return None;
        }
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out *= m;
    Some(out * sign)
}

/// Exact rational square root if `r` is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Square root in the given field, when it exists there.
pub fn field_sqrt(s: &Scalar, field: Field) -> Option<Scalar> {
    if s.is_zero() {
        return Some(Scalar::zero());
    }
    if s.is_rational() {
        if let Some(r) = rational_sqrt(s.re()) {
            return Some(Scalar::from_rational(r));
        }
        if field == Field::Qi {
            if let Some(r) = rational_sqrt(&-s.re().clone()) {
                return Some(Scalar::gaussian(BigRational::zero(), r));
            }
        }
        return None;
    }
    if field == Field::Q {
        return None;
    }
    // (x + yi)^2 = a + bi  =>  x^2 = (a + |s|)/2, y = b / 2x
    let modulus = rational_sqrt(&s.norm())?;
    let two = BigRational::from_integer(BigInt::from(2));
    let x2 = (s.re() + &modulus) / &two;
    let x = rational_sqrt(&x2)?;
    if x.is_zero() {
        let y = rational_sqrt(&((&modulus - s.re()) / &two))?;
        return Some(Scalar::gaussian(BigRational::zero(), y));
    }
    let y = s.im() / (&two * &x);
    Some(Scalar::gaussian(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    #[test]
    fn canonical_text() {
        assert_eq!(s("2/4").to_string(), "1/2");
        assert_eq!(s("-6/3").to_string(), "-2");
        assert_eq!(s("3").to_field_string(Field::Qi), "3+0i");
        assert_eq!(s("1/2-3/4i").to_string(), "1/2-3/4i");
        assert_eq!(s("-i").to_string(), "0-1i");
        assert_eq!(s("2i"), Scalar::gaussian(BigRational::zero(), BigRational::from_integer(2.into())));
    }

    #[test]
    fn rejects_garbage() {
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
        assert!("1.5".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
    }

    #[test]
    fn embedded_rational_equals_gaussian() {
        assert_eq!(s("5/7"), s("5/7+0i"));
        assert!(Field::Q.contains(&s("5/7+0i")));
        assert!(!Field::Q.contains(&Scalar::i()));
    }

    #[test]
    fn arithmetic() {
        let i = Scalar::i();
        assert_eq!(&i * &i, Scalar::from_int(-1));
        assert_eq!(s("1+i").inv().unwrap(), s("1/2-1/2i"));
        assert_eq!(s("3") / s("2"), s("3/2"));
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn square_classes_and_roots() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(square_class(&q(-4, 1)), Some(BigInt::from(-1)));
        assert_eq!(square_class(&q(18, 1)), Some(BigInt::from(2)));
        assert_eq!(square_class(&q(3, 4)), Some(BigInt::from(3)));
        assert_eq!(field_sqrt(&s("-4"), Field::Q), None);
        assert_eq!(field_sqrt(&s("-4"), Field::Qi), Some(s("2i")));
        assert_eq!(field_sqrt(&s("2i"), Field::Qi), Some(s("1+i")));
        assert_eq!(field_sqrt(&s("9/4"), Field::Q), Some(s("3/2")));
    }
}
