//! Scalar fields used throughout the engine.
//!
//! Two arithmetic modes share one trait: [`GaussRational`] (exact, `Q(i)`)
//! and [`Complex64`] (double precision). Exponents and coefficients of the
//! series types are both stored as scalars, so the exact mode keeps ladder
//! membership `d + m` decidable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Q = BigRational;

/// Tolerance used in float mode to decide that two exponents differ by an integer.
pub const FLOAT_LADDER_TOL: f64 = 1e-9;

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: divide in f64 after scaling
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Parse `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(n));
    }
    // decimal literal: exact base-10 expansion
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if let Some((ip, fp)) = body.split_once('.') {
        let digits = format!("{ip}{fp}");
        let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = BigRational::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    Err(Error::Parse(format!("bad number '{s}'")))
}

/// Gaussian rational `re + i·im` with exact arithmetic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRational {
    pub re: Q,
    pub im: Q,
}

impl GaussRational {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn real(re: Q) -> Self {
        Self { re, im: Q::zero() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({} + {}i)", self.re, self.im)
        }
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for GaussRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(self.re * o.re);
        }
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for GaussRational {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        if o.im.is_zero() {
            return Self { re: self.re / &o.re, im: self.im / &o.re };
        }
        let n = o.norm_sqr();
        Self {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }
}

impl Neg for GaussRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

/// JSON representation of one real number: a float, or an exact `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealRepr {
    Num(f64),
    Exact(String),
}

impl RealRepr {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            RealRepr::Exact(s) => parse_q(s),
            RealRepr::Num(x) => BigRational::from_float(*x)
                .ok_or_else(|| Error::Parse(format!("non-finite number {x}"))),
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        match self {
            RealRepr::Num(x) => Ok(*x),
            RealRepr::Exact(s) => Ok(q_to_f64(&parse_q(s)?)),
        }
    }
}

/// Common interface of the two arithmetic modes.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_q(x: &Q) -> Self;
    fn from_gauss(g: &GaussRational) -> Self;
    fn from_c64(z: Complex64) -> Result<Self>;
    fn to_c64(&self) -> Complex64;
    /// Exactly zero (float mode: bitwise zero).
    fn is_zero(&self) -> bool;
    /// Magnitude estimate used for pivoting and tolerances.
    fn magnitude(&self) -> f64;
    /// `Some(k)` when `self - other == k` for an integer `k` (float mode: within
    /// [`FLOAT_LADDER_TOL`]).
    fn integer_offset(&self, other: &Self) -> Option<i64>;
    /// `floor(Re self)`, snapping values within tolerance of an integer.
    fn re_floor(&self) -> i64;
    /// Total order by real part, then imaginary part.
    fn lex_cmp(&self, other: &Self) -> Ordering;
    fn to_repr(&self) -> [RealRepr; 2];
    fn from_repr(r: &[RealRepr; 2]) -> Result<Self>;

    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::real(Q::zero())
    }
    fn one() -> Self {
        Self::real(Q::one())
    }
    fn from_i64(n: i64) -> Self {
        Self::real(qi(n))
    }
    fn from_q(x: &Q) -> Self {
        Self::real(x.clone())
    }
    fn from_gauss(g: &GaussRational) -> Self {
        g.clone()
    }
    fn from_c64(z: Complex64) -> Result<Self> {
        let re = BigRational::from_float(z.re).ok_or_else(|| Error::Numeric("non-finite value".into()))?;
        let im = BigRational::from_float(z.im).ok_or_else(|| Error::Numeric("non-finite value".into()))?;
        Ok(Self { re, im })
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn integer_offset(&self, other: &Self) -> Option<i64> {
        if self.im != other.im {
            return None;
        }
        let d = &self.re - &other.re;
        if d.is_integer() {
            d.to_integer().to_i64()
        } else {
            None
        }
    }
    fn re_floor(&self) -> i64 {
        self.re.floor().to_integer().to_i64().unwrap_or(i64::MAX)
    }
    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
    fn to_repr(&self) -> [RealRepr; 2] {
        [RealRepr::Exact(self.re.to_string()), RealRepr::Exact(self.im.to_string())]
    }
    fn from_repr(r: &[RealRepr; 2]) -> Result<Self> {
        Ok(Self { re: r[0].to_q()?, im: r[1].to_q()? })
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_q(x: &Q) -> Self {
        Complex64::new(q_to_f64(x), 0.0)
    }
    fn from_gauss(g: &GaussRational) -> Self {
        g.to_c64()
    }
    fn from_c64(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(Error::Numeric("non-finite value".into()))
        }
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn integer_offset(&self, other: &Self) -> Option<i64> {
        let d = *self - *other;
        let k = d.re.round();
        if (d.re - k).abs() <= FLOAT_LADDER_TOL && d.im.abs() <= FLOAT_LADDER_TOL {
            Some(k as i64)
        } else {
            None
        }
    }
    fn re_floor(&self) -> i64 {
        let r = self.re.round();
        if (self.re - r).abs() <= FLOAT_LADDER_TOL {
            r as i64
        } else {
            self.re.floor() as i64
        }
    }
    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re
            .partial_cmp(&other.re)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.im.partial_cmp(&other.im).unwrap_or(Ordering::Equal))
    }
    fn to_repr(&self) -> [RealRepr; 2] {
        [RealRepr::Num(self.re), RealRepr::Num(self.im)]
    }
    fn from_repr(r: &[RealRepr; 2]) -> Result<Self> {
        Ok(Complex64::new(r[0].to_f64()?, r[1].to_f64()?))
    }
}

/// Generalised binomial coefficient `C(s, j) = s(s-1)…(s-j+1)/j!`.
pub fn binom<S: Scalar>(s: &S, j: u32) -> S {
    let mut acc = S::one();
    for i in 0..j {
        acc = acc * (s.clone() - S::from_i64(i as i64)) / S::from_i64(i as i64 + 1);
    }
    acc
}

/// Exact integer binomial `C(n, j)` for any integer `n` and `j >= 0`.
pub fn binom_int(n: i64, j: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..j as i64 {
        acc = acc * qi(n - i) / qi(i + 1);
    }
    acc
}

/// `C(s, j)` for a rational `s`.
pub fn binom_q(s: &Q, j: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..j as i64 {
        acc = acc * (s - qi(i)) / qi(i + 1);
    }
    acc
}

/// Principal branch `z^s = exp(s·Log z)`.
pub fn cpow(z: Complex64, s: Complex64) -> Complex64 {
    if s.re == 0.0 && s.im == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if s.im == 0.0 && s.re.fract() == 0.0 && s.re.abs() < 64.0 {
        return z.powi(s.re as i32);
    }
    (s * z.ln()).exp()
}

/// True when `z` lies on the closed negative real axis (including 0).
pub fn on_branch_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

pub fn factorial_q(n: u32) -> Q {
    let mut acc = Q::one();
    for i in 2..=n as i64 {
        acc *= qi(i);
    }
    acc
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_q("-3").unwrap(), qi(-3));
        assert_eq!(parse_q("0.25").unwrap(), q(1, 4));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn generalised_binomials() {
        assert_eq!(binom_int(-1, 5), qi(-1));
        assert_eq!(binom_int(5, 2), qi(10));
        assert_eq!(binom_int(2, 3), qi(0));
        assert_eq!(binom_q(&q(1, 2), 1), q(1, 2));
        assert_eq!(binom_q(&q(1, 2), 2), q(-1, 8));
    }

    #[test]
    fn integer_offsets() {
        let a = GaussRational::real(q(5, 2));
        let b = GaussRational::real(q(1, 2));
        assert_eq!(a.integer_offset(&b), Some(2));
        assert_eq!(a.integer_offset(&GaussRational::real(q(1, 3))), None);
        let z = Complex64::new(2.5 + 1e-12, 0.0);
        assert_eq!(z.integer_offset(&Complex64::new(0.5, 0.0)), Some(2));
        assert_eq!(Complex64::new(-0.3, 0.0).re_floor(), -1);
        assert_eq!(Complex64::new(0.9999999999999, 0.0).re_floor(), 1);
    }

    #[test]
    fn gauss_division() {
        let a = GaussRational::new(qi(1), qi(2));
        let b = GaussRational::new(qi(3), qi(-1));
        let c = a.clone() / b.clone();
        assert_eq!(c * b, a);
    }

    #[test]
    fn principal_powers() {
        let v = cpow(Complex64::i(), Complex64::new(0.5, 0.0));
        let expect = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((v - expect).norm() < 1e-15);
    }
}
