//! Two-variable monomial series in `x`, `y`, `x - y` with log factors, and the
//! ι-expansion maps between the regions `|y| < |x|` and `|x - y| < |y|`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{binom, cpow, on_branch_cut, GaussRational, Scalar};

/// Which binomial expansion produced the infinite sums in a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    None,
    /// `ι_{x,y}`: powers of `(x - y)` expanded for `|y| < |x|`.
    IotaXY,
    /// `ι_{y,x-y}`: powers of `x` expanded for `|x - y| < |y|`.
    IotaYXmY,
}

impl Flavor {
    fn join(self, other: Flavor) -> Result<Flavor> {
        match (self, other) {
            (Flavor::None, f) | (f, Flavor::None) => Ok(f),
            (f, g) if f == g => Ok(f),
            _ => Err(Error::Invalid(format!("cannot combine {self:?} and {other:?} series"))),
        }
    }
}

/// `x^a y^b (x-y)^e log^h x log^k y log^j (x-y)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial2 {
    pub a: GaussRational,
    pub b: GaussRational,
    pub e: GaussRational,
    pub h: u32,
    pub k: u32,
    pub j: u32,
}

impl Monomial2 {
    pub fn new(a: GaussRational, b: GaussRational, e: GaussRational) -> Self {
        Self { a, b, e, h: 0, k: 0, j: 0 }
    }

    pub fn int(a: i64, b: i64, e: i64) -> Self {
        Self::new(GaussRational::from_i64(a), GaussRational::from_i64(b), GaussRational::from_i64(e))
    }

    pub fn one() -> Self {
        Self::int(0, 0, 0)
    }

    fn times(&self, o: &Self) -> Self {
        Self {
            a: self.a.clone() + o.a.clone(),
            b: self.b.clone() + o.b.clone(),
            e: self.e.clone() + o.e.clone(),
            h: self.h + o.h,
            k: self.k + o.k,
            j: self.j + o.j,
        }
    }
}

/// Finite sum of [`Monomial2`] terms with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialSeries2 {
    flavor: Flavor,
    terms: BTreeMap<Monomial2, GaussRational>,
}

impl MonomialSeries2 {
    pub fn zero(flavor: Flavor) -> Self {
        Self { flavor, terms: BTreeMap::new() }
    }

    pub fn constant(c: GaussRational) -> Self {
        let mut s = Self::zero(Flavor::None);
        s.push(Monomial2::one(), c);
        s
    }

    pub fn monomial(m: Monomial2, c: GaussRational, flavor: Flavor) -> Self {
        let mut s = Self::zero(flavor);
        s.push(m, c);
        s
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn terms(&self) -> &BTreeMap<Monomial2, GaussRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c · m` in place.
    pub fn push(&mut self, m: Monomial2, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(GaussRational::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.flavor = self.flavor.join(other.flavor)?;
        for (m, c) in &other.terms {
            out.push(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        let mut out = Self::zero(self.flavor);
        for (m, v) in &self.terms {
            out.push(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.flavor.join(other.flavor)?);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.push(m1.times(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    /// Rewrite every `(x - y)^e` with `e` a nonnegative integer and no
    /// `log(x - y)` as a polynomial in `x`, `y`. Used to compare expansions.
    pub fn expand_integer_xmy(&self) -> Self {
        let mut out = Self::zero(self.flavor);
        for (m, c) in &self.terms {
            let n = m.e.integer_offset(&GaussRational::zero());
            match n {
                Some(n) if n >= 0 && m.j == 0 => {
                    for i in 0..=n as u32 {
                        let coeff = c.clone() * binom(&GaussRational::from_i64(n), i) * sign(i);
                        let mm = Monomial2 {
                            a: m.a.clone() + GaussRational::from_i64(n - i as i64),
                            b: m.b.clone() + GaussRational::from_i64(i as i64),
                            e: GaussRational::zero(),
                            ..m.clone()
                        };
                        out.push(mm, coeff);
                    }
                }
                _ => out.push(m.clone(), c.clone()),
            }
        }
        out
    }

    /// `∂/∂x`, exact.
    pub fn derive_x(&self) -> Self {
        let mut out = Self::zero(self.flavor);
        let one = GaussRational::one();
        for (m, c) in &self.terms {
            if !m.a.is_zero() {
                out.push(Monomial2 { a: m.a.clone() - one.clone(), ..m.clone() }, c.clone() * m.a.clone());
            }
            if !m.e.is_zero() {
                out.push(Monomial2 { e: m.e.clone() - one.clone(), ..m.clone() }, c.clone() * m.e.clone());
            }
            if m.h > 0 {
                let mm = Monomial2 { a: m.a.clone() - one.clone(), h: m.h - 1, ..m.clone() };
                out.push(mm, c.clone() * GaussRational::from_i64(m.h as i64));
            }
            if m.j > 0 {
                let mm = Monomial2 { e: m.e.clone() - one.clone(), j: m.j - 1, ..m.clone() };
                out.push(mm, c.clone() * GaussRational::from_i64(m.j as i64));
            }
        }
        out
    }

    /// `∂/∂y`, exact.
    pub fn derive_y(&self) -> Self {
        let mut out = Self::zero(self.flavor);
        let one = GaussRational::one();
        for (m, c) in &self.terms {
            if !m.b.is_zero() {
                out.push(Monomial2 { b: m.b.clone() - one.clone(), ..m.clone() }, c.clone() * m.b.clone());
            }
            if !m.e.is_zero() {
                out.push(Monomial2 { e: m.e.clone() - one.clone(), ..m.clone() }, -(c.clone() * m.e.clone()));
            }
            if m.k > 0 {
                let mm = Monomial2 { b: m.b.clone() - one.clone(), k: m.k - 1, ..m.clone() };
                out.push(mm, c.clone() * GaussRational::from_i64(m.k as i64));
            }
            if m.j > 0 {
                let mm = Monomial2 { e: m.e.clone() - one.clone(), j: m.j - 1, ..m.clone() };
                out.push(mm, -(c.clone() * GaussRational::from_i64(m.j as i64)));
            }
        }
        out
    }

    /// Principal-branch value at `(x, y)`.
    pub fn eval(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let d = x - y;
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = c.to_c64();
            for (z, p, l) in [(x, &m.a, m.h), (y, &m.b, m.k), (d, &m.e, m.j)] {
                if p.is_zero() && l == 0 {
                    continue;
                }
                let integral = p.integer_offset(&GaussRational::zero());
                if l > 0 || integral.is_none() {
                    if on_branch_cut(z) {
                        return Err(Error::BranchCut(format!("{z}")));
                    }
                    v *= cpow(z, p.to_c64()) * z.ln().powu(l);
                } else {
                    v *= z.powi(integral.unwrap() as i32);
                }
            }
            total += v;
        }
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Numeric("overflow in bivariate evaluation".into()));
        }
        Ok(total)
    }
}

impl fmt::Display for MonomialSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (name, p) in [("x", &m.a), ("y", &m.b), ("(x-y)", &m.e)] {
                if !p.is_zero() {
                    write!(f, "·{name}^{p}")?;
                }
            }
            for (name, l) in [("log x", m.h), ("log y", m.k), ("log(x-y)", m.j)] {
                if l > 0 {
                    write!(f, "·{name}^{l}")?;
                }
            }
        }
        Ok(())
    }
}

fn sign(j: u32) -> GaussRational {
    GaussRational::from_i64(if j.is_multiple_of(2) { 1 } else { -1 })
}

/// `Σ_{j=0}^{M} C(s,j) x^{s-j} (-y)^j`.
pub fn iota_xy(s: &GaussRational, m: u32) -> MonomialSeries2 {
    let mut out = MonomialSeries2::zero(Flavor::IotaXY);
    for j in 0..=m {
        let c = binom(s, j) * sign(j);
        let jj = GaussRational::from_i64(j as i64);
        out.push(Monomial2::new(s.clone() - jj.clone(), jj, GaussRational::zero()), c);
    }
    out
}

/// `Σ_{j=0}^{M} C(s,j) y^{s-j} (x-y)^j`.
pub fn iota_y_xmy(s: &GaussRational, m: u32) -> MonomialSeries2 {
    let mut out = MonomialSeries2::zero(Flavor::IotaYXmY);
    for j in 0..=m {
        let jj = GaussRational::from_i64(j as i64);
        out.push(Monomial2::new(GaussRational::zero(), s.clone() - jj.clone(), jj), binom(s, j));
    }
    out
}

/// `log y + Σ_{j<M} (-1)^j/(j+1) ((x-y)/y)^{j+1}`, the expansion of `log x`
/// around `x = y`.
pub fn log_x_substitute(m: u32) -> MonomialSeries2 {
    let mut out = MonomialSeries2::zero(Flavor::IotaYXmY);
    out.push(Monomial2 { k: 1, ..Monomial2::one() }, GaussRational::one());
    for j in 0..m {
        let p = j as i64 + 1;
        let c = sign(j) / GaussRational::from_i64(p);
        out.push(Monomial2::int(0, -p, p), c);
    }
    out
}

/// Both sides of the `Z^ℓ` coefficient of
/// `Σ_{j,ℓ} C(n,j)C(j,ℓ) x^{n-j} y^{j-ℓ} Z^ℓ = Σ_ℓ C(n,ℓ) ι_{x,y}{(x+y)^{n-ℓ}} Z^ℓ`,
/// each truncated after `terms` powers of `y`.
pub fn binomial_identity_xy(n: i64, l: u32, terms: u32) -> (MonomialSeries2, MonomialSeries2) {
    let nn = GaussRational::from_i64(n);
    let mut lhs = MonomialSeries2::zero(Flavor::IotaXY);
    for j in l..l + terms {
        let c = binom(&nn, j) * binom(&GaussRational::from_i64(j as i64), l);
        lhs.push(Monomial2::int(n - j as i64, (j - l) as i64, 0), c);
    }
    let mut rhs = MonomialSeries2::zero(Flavor::IotaXY);
    let s = GaussRational::from_i64(n - l as i64);
    let pre = binom(&nn, l);
    for i in 0..terms {
        let c = pre.clone() * binom(&s, i);
        rhs.push(Monomial2::int(n - l as i64 - i as i64, i as i64, 0), c);
    }
    (lhs, rhs)
}

/// Both sides of the `Z^ℓ` coefficient of
/// `Σ_{i,j} C(n-j,i)C(n,j)(-1)^{i+j}(x-y)^j y^i Z^{i+j} = Σ_ℓ C(n,ℓ)(-1)^ℓ ι_{y,x-y}{x^ℓ} Z^ℓ`.
/// Both sides are finite sums.
pub fn binomial_identity_yxmy(n: i64, l: u32) -> (MonomialSeries2, MonomialSeries2) {
    let nn = GaussRational::from_i64(n);
    let mut lhs = MonomialSeries2::zero(Flavor::IotaYXmY);
    for j in 0..=l {
        let i = l - j;
        let c = binom(&GaussRational::from_i64(n - j as i64), i) * binom(&nn, j) * sign(l);
        lhs.push(Monomial2::int(0, i as i64, j as i64), c);
    }
    let rhs = iota_y_xmy(&GaussRational::from_i64(l as i64), l).scale(&(binom(&nn, l) * sign(l)));
    (lhs, rhs)
}
