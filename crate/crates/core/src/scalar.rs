//! Exact arithmetic in Q(sqrt 3).
//!
//! A [`Scalar`] is `a + b*sqrt(3)` with rational `a`, `b`. Rationals keep an
//! `i64` fast path and promote to big integers on overflow, so arithmetic
//! never loses precision.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arithmetic failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
}

/// Text that does not match the scalar grammar.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse scalar {text:?}: unexpected {token:?} at byte {pos}")]
pub struct ParseScalarError {
    pub text: String,
    pub token: String,
    pub pos: usize,
}

/// Exact rational in lowest terms with positive denominator.
///
/// Values whose numerator and denominator fit in `i64` (excluding
/// `i64::MIN`) are always stored as `Small`; derived equality relies on it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

impl Rational {
    pub const ZERO: Rational = Rational::Small(0, 1);
    pub const ONE: Rational = Rational::Small(1, 1);

    pub fn from_int(n: i64) -> Rational {
        if n == i64::MIN {
            Rational::from_big(BigRational::from_integer(BigInt::from(n)))
        } else {
            Rational::Small(n, 1)
        }
    }

    /// `num/den` reduced; panics on zero denominator.
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        Rational::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Rational {
        let (mut n, mut d) = (num, den);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        if fits(n) && fits(d) {
            Rational::Small(n as i64, d as i64)
        } else {
            Rational::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    /// Demotes to `Small` when possible. Input must already be reduced.
    pub fn from_big(r: BigRational) -> Rational {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN && d != i64::MIN {
                return Rational::Small(n, d);
            }
        }
        Rational::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(n, _) => n.signum() as i32,
            Rational::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Rational {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Rational, ArithError> {
        match self {
            Rational::Small(0, _) => Err(ArithError::DivisionByZero),
            Rational::Small(n, d) => Ok(Rational::from_i128(*d as i128, *n as i128)),
            Rational::Big(b) => Ok(Rational::from_big(b.recip())),
        }
    }

    fn big_op(&self, rhs: &Rational, f: impl Fn(BigRational, BigRational) -> BigRational) -> Rational {
        Rational::from_big(f(self.to_big(), rhs.to_big()))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            Rational::Small(n, d) => Rational::Small(-n, *d),
            Rational::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(0, _), _) => rhs.clone(),
            (_, Rational::Small(0, _)) => self.clone(),
            (Rational::Small(a, 1), Rational::Small(c, 1)) => Rational::from_int_i128(*a as i128 + *c as i128),
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rational::from_i128(a + c, b)
                } else {
                    Rational::from_i128(a * d + c * b, b * d)
                }
            }
            _ => self.big_op(rhs, |x, y| x + y),
        }
    }
}

impl Rational {
    fn from_int_i128(n: i128) -> Rational {
        if fits(n) {
            Rational::Small(n as i64, 1)
        } else {
            Rational::Big(Box::new(BigRational::from_integer(BigInt::from(n))))
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (_, Rational::Small(0, _)) => self.clone(),
            (Rational::Small(a, 1), Rational::Small(c, 1)) => Rational::from_int_i128(*a as i128 - *c as i128),
            (Rational::Small(_, _), Rational::Small(c, d)) => self + &Rational::Small(-c, *d),
            _ => self.big_op(rhs, |x, y| x - y),
        }
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(0, _), _) | (_, Rational::Small(0, _)) => Rational::ZERO,
            (Rational::Small(a, 1), Rational::Small(c, 1)) => Rational::from_int_i128(*a as i128 * *c as i128),
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => self.big_op(rhs, |x, y| x * y),
        }
    }
}

macro_rules! owned_ops {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { (&self).$m(&rhs) }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Rational, Add add, Sub sub, Mul mul);

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

/// `a + b*sqrt(3)` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    a: Rational,
    b: Rational,
}

impl Scalar {
    pub const ZERO: Scalar = Scalar {
        a: Rational::ZERO,
        b: Rational::ZERO,
    };
    pub const ONE: Scalar = Scalar {
        a: Rational::ONE,
        b: Rational::ZERO,
    };

    pub fn new(rat_part: Rational, irr_part: Rational) -> Scalar {
        Scalar {
            a: rat_part,
            b: irr_part,
        }
    }

    pub fn int(n: i64) -> Scalar {
        Scalar {
            a: Rational::from_int(n),
            b: Rational::ZERO,
        }
    }

    pub fn frac(num: i64, den: i64) -> Scalar {
        Scalar {
            a: Rational::new(num, den),
            b: Rational::ZERO,
        }
    }

    pub fn sqrt3() -> Scalar {
        Scalar {
            a: Rational::ZERO,
            b: Rational::ONE,
        }
    }

    pub fn rat_part(&self) -> &Rational {
        &self.a
    }

    pub fn irr_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// `a^2 - 3 b^2`, nonzero unless the scalar is zero.
    pub fn norm(&self) -> Rational {
        let three = Rational::Small(3, 1);
        &(&self.a * &self.a) - &(&three * &(&self.b * &self.b))
    }

    pub fn recip(&self) -> Result<Scalar, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(Scalar {
                a: self.a.recip()?,
                b: Rational::ZERO,
            });
        }
        let inv = self.norm().recip()?;
        Ok(Scalar {
            a: &self.a * &inv,
            b: -(&self.b * &inv),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ArithError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Scalar::ONE;
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let (sa, sb) = (self.a.signum(), self.b.signum());
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with 3 b^2
        let a2 = &self.a * &self.a;
        let b2 = &Rational::Small(3, 1) * &(&self.b * &self.b);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            _ => sb,
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// `self += x * y` without an intermediate clone of `self`.
    #[inline]
    pub fn add_mul(&mut self, x: &Scalar, y: &Scalar) {
        if x.is_zero() || y.is_zero() {
            return;
        }
        let p = x * y;
        *self += &p;
    }

    /// Floating approximation, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let f = |r: &Rational| match r {
            Rational::Small(n, d) => *n as f64 / *d as f64,
            Rational::Big(b) => b.numer().to_f64().unwrap_or(f64::NAN) / b.denom().to_f64().unwrap_or(f64::NAN),
        };
        f(&self.a) + f(&self.b) * 3f64.sqrt()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Scalar {
        Scalar {
            a: r,
            b: Rational::ZERO,
        }
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    #[inline]
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.b.is_zero() && rhs.b.is_zero() {
            return Scalar {
                a: &self.a * &rhs.a,
                b: Rational::ZERO,
            };
        }
        let three = Rational::Small(3, 1);
        let a = &(&self.a * &rhs.a) + &(&three * &(&self.b * &rhs.b));
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        Scalar { a, b }
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] to handle it.
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

owned_ops!(Scalar, Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    #[inline]
    fn add_assign(&mut self, rhs: &Scalar) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        self.a = &self.a + &rhs.a;
        if !(self.b.is_zero() && rhs.b.is_zero()) {
            self.b = &self.b + &rhs.b;
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self += &(-rhs);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::ZERO;
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::ZERO;
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.b.signum() > 0 {
            write!(f, "{}+{}*sqrt(3)", self.a, self.b)
        } else {
            write!(f, "{}-{}*sqrt(3)", self.a, -&self.b)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn err(&self) -> ParseScalarError {
        let rest = &self.text[self.pos..];
        let token = match rest.chars().next() {
            None => "end of input".to_string(),
            Some(c) if c.is_ascii_digit() => rest.chars().take_while(|c| c.is_ascii_digit()).collect(),
            Some(c) => c.to_string(),
        };
        ParseScalarError {
            text: self.text.to_string(),
            token,
            pos: self.pos,
        }
    }

    fn digits(&mut self) -> Result<&'a str, ParseScalarError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err());
        }
        Ok(&self.text[start..self.pos])
    }

    fn rational(&mut self) -> Result<Rational, ParseScalarError> {
        let mut neg = false;
        match self.peek() {
            Some('-') => {
                neg = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let num: BigInt = self.digits()?.parse().expect("digits");
        let mut den = BigInt::one();
        if self.peek() == Some('/') {
            self.pos += 1;
            let at = self.pos;
            den = self.digits()?.parse().expect("digits");
            if den.is_zero() {
                return Err(ParseScalarError {
                    text: self.text.to_string(),
                    token: self.text[at..self.pos].to_string(),
                    pos: at,
                });
            }
        }
        let num = if neg { -num } else { num };
        Ok(Rational::from_big(BigRational::new(num, den)))
    }

    fn literal(&mut self, lit: &str) -> Result<(), ParseScalarError> {
        if self.text[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.err())
        }
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Grammar: `rational ( ('+'|'-') rational '*sqrt(3)' )?`.
    fn from_str(text: &str) -> Result<Scalar, ParseScalarError> {
        let mut c = Cursor { text, pos: 0 };
        let a = c.rational()?;
        let mut b = Rational::ZERO;
        if let Some(op) = c.peek() {
            if op != '+' && op != '-' {
                return Err(c.err());
            }
            c.pos += 1;
            b = c.rational()?;
            if op == '-' {
                b = -b;
            }
            c.literal("*sqrt(3)")?;
            if c.pos != text.len() {
                return Err(c.err());
            }
        }
        Ok(Scalar { a, b })
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(s("-3/2"), Scalar::frac(-3, 2));
        assert_eq!(
            s("1/2+1/2*sqrt(3)"),
            Scalar::new(Rational::new(1, 2), Rational::new(1, 2))
        );
        assert_eq!(s("0"), Scalar::ZERO);
        assert_eq!(s("1+-2*sqrt(3)"), s("1-2*sqrt(3)"));
        assert_eq!(s("4/6"), Scalar::frac(2, 3));
        assert_eq!(s("+5"), Scalar::int(5));
    }

    #[test]
    fn parse_errors_name_token() {
        let e = "1/0".parse::<Scalar>().unwrap_err();
        assert_eq!(e.token, "0");
        let e = "1+2*sqrt(2)".parse::<Scalar>().unwrap_err();
        assert_eq!(e.pos, 3);
        let e = "abc".parse::<Scalar>().unwrap_err();
        assert_eq!(e.token, "a");
        assert!("1+2".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("1 ".parse::<Scalar>().is_err());
        assert!("1/-2".parse::<Scalar>().is_err());
    }

    #[test]
    fn format_canonical() {
        assert_eq!(Scalar::sqrt3().to_string(), "0+1*sqrt(3)");
        assert_eq!(s("1/2-3/4*sqrt(3)").to_string(), "1/2-3/4*sqrt(3)");
        assert_eq!(Scalar::frac(6, -4).to_string(), "-3/2");
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(s("1+1*sqrt(3)") * s("1-1*sqrt(3)"), Scalar::int(-2));
        assert_eq!(Scalar::sqrt3() * Scalar::sqrt3(), Scalar::int(3));
        assert_eq!(s("1/2+1/2*sqrt(3)") + s("1/2-1/2*sqrt(3)"), Scalar::ONE);
        assert_eq!(Scalar::ZERO.recip(), Err(ArithError::DivisionByZero));
        let x = s("2-1*sqrt(3)");
        assert_eq!(x.recip().unwrap(), s("2+1*sqrt(3)"));
    }

    #[test]
    fn signs() {
        assert_eq!(s("2-1*sqrt(3)").signum(), 1);
        assert_eq!(s("1-1*sqrt(3)").signum(), -1);
        assert_eq!(s("-7+4*sqrt(3)").signum(), -1);
        assert_eq!(s("-6+4*sqrt(3)").signum(), 1);
        assert!(s("-3/2") < Scalar::ZERO);
    }

    #[test]
    fn overflow_promotes() {
        let big = Scalar::int(i64::MAX);
        let sq = &big * &big;
        let back = sq.checked_div(&big).unwrap();
        assert_eq!(back, big);
        assert_eq!((&sq - &sq), Scalar::ZERO);
        let r = Rational::from_int(i64::MIN);
        assert!(matches!(r, Rational::Big(_)));
        assert_eq!((&r - &r), Rational::ZERO);
        assert_eq!((&Rational::new(1, 3) + &Rational::new(2, 3)), Rational::ONE);
    }
}
