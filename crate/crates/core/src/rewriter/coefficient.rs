//! Laurent monomials `x^p y^q (x - y)^e` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::logseries::{Flavor, Monomial2, MonomialSeries2};
use crate::scalar::{q_to_f64, GaussRational, Q};

/// `Σ c · x^p y^q (x - y)^e`, keyed by `[p, q, e]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coefficient(BTreeMap<[i64; 3], Q>);

impl Coefficient {
    pub fn one() -> Self {
        Self::monomial(0, 0, 0, Q::one())
    }

    pub fn monomial(p: i64, q: i64, e: i64, c: Q) -> Self {
        let mut out = Self::default();
        out.push([p, q, e], c);
        out
    }

    pub fn terms(&self) -> &BTreeMap<[i64; 3], Q> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, m: [i64; 3], c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.0 {
            self.push(*m, c.clone());
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.0 {
            out.push(*m, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.0 {
            for (n, d) in &other.0 {
                out.push([m[0] + n[0], m[1] + n[1], m[2] + n[2]], c * d);
            }
        }
        out
    }

    pub fn times_monomial(&self, p: i64, q: i64, e: i64) -> Self {
        Self(self.0.iter().map(|(m, c)| ([m[0] + p, m[1] + q, m[2] + e], c.clone())).collect())
    }

    /// Componentwise minimum of the exponents (zeros for the zero coefficient).
    pub fn min_exponents(&self) -> [i64; 3] {
        let mut lo = [0i64; 3];
        for (i, slot) in lo.iter_mut().enumerate() {
            *slot = self.0.keys().map(|m| m[i]).min().unwrap_or(0);
        }
        lo
    }

    /// Monomials whose exponent on `axis` (0: x, 1: y, 2: x - y) equals `value`.
    pub fn restrict(&self, axis: usize, value: i64) -> Self {
        Self(self.0.iter().filter(|(m, _)| m[axis] == value).map(|(m, c)| (*m, c.clone())).collect())
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        let d = x - y;
        self.0
            .iter()
            .map(|(m, c)| q_to_f64(c) * x.powi(m[0] as i32) * y.powi(m[1] as i32) * d.powi(m[2] as i32))
            .sum()
    }

    pub fn to_series(&self, flavor: Flavor) -> MonomialSeries2 {
        let mut s = MonomialSeries2::zero(flavor);
        for (m, c) in &self.0 {
            s.push(Monomial2::int(m[0], m[1], m[2]), GaussRational::real(c.clone()));
        }
        s
    }

    pub fn to_json(&self) -> Vec<(i64, i64, i64, String)> {
        self.0.iter().map(|(m, c)| (m[0], m[1], m[2], c.to_string())).collect()
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (name, p) in [("x", m[0]), ("y", m[1]), ("(x-y)", m[2])] {
                if p != 0 {
                    write!(f, "·{name}^{p}")?;
                }
            }
        }
        Ok(())
    }
}
