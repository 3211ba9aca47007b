//! Closed-form correlators and truncated double mode sums.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{multiplicity, partitions, size, Intertwiner, Partition};
use crate::rewriter::LinearCombination;
use crate::error::{Error, Result};
use crate::scalar::{binom_q, cpow, factorial_q, on_branch_cut, q_to_f64, qi, Q};

fn qc(x: &Q) -> Complex64 {
    Complex64::new(q_to_f64(x), 0.0)
}

fn check_cut(name: &str, z: Complex64) -> Result<()> {
    if on_branch_cut(z) {
        return Err(Error::BranchCut(format!("{name} = {z}")));
    }
    Ok(())
}

/// `x^{ac} y^{bc} (x-y)^{ab}` on principal branches, for `0 < |y| < |x|`.
pub fn closed_form_4pt(a: &Q, b: &Q, c: &Q, x: Complex64, y: Complex64) -> Result<Complex64> {
    check_cut("x", x)?;
    check_cut("y", y)?;
    check_cut("x-y", x - y)?;
    if !(y.norm() < x.norm()) {
        return Err(Error::Region(format!("need 0 < |y| < |x|, got x = {x}, y = {y}")));
    }
    Ok(cpow(x, qc(&(a * c))) * cpow(y, qc(&(b * c))) * cpow(x - y, qc(&(a * b))))
}

/// `x^{ad} y^{bd} z^{cd} (x-y)^{ab} (x-z)^{ac} (y-z)^{bc}` on principal branches.
pub fn closed_form_5pt(m: [&Q; 4], x: Complex64, y: Complex64, z: Complex64) -> Result<Complex64> {
    let [a, b, c, d] = m;
    for (name, w) in [("x", x), ("y", y), ("z", z), ("x-y", x - y), ("x-z", x - z), ("y-z", y - z)] {
        check_cut(name, w)?;
    }
    let f = |w: Complex64, e: Q| cpow(w, qc(&e));
    Ok(f(x, a * d) * f(y, b * d) * f(z, c * d) * f(x - y, a * b) * f(x - z, a * c) * f(y - z, b * c))
}

/// `⟨ν*, 𝒴(|a⟩, x) 𝒴(|b⟩, y) |c⟩⟩ = Π_n ((a xⁿ + b yⁿ)/n)^{m_n} / m_n! · x^{ac} y^{bc} (x-y)^{ab}`.
pub fn basis_correlator(a: &Q, b: &Q, c: &Q, nu: &[u32], x: Complex64, y: Complex64) -> Result<Complex64> {
    let mut pre = Complex64::one();
    let mut labels = nu.to_vec();
    labels.dedup();
    for n in labels {
        let m = multiplicity(nu, n);
        let s = (qc(a) * x.powi(n as i32) + qc(b) * y.powi(n as i32)) / n as f64;
        pre *= s.powi(m as i32) / q_to_f64(&factorial_q(m));
    }
    Ok(pre * closed_form_4pt(a, b, c, x, y)?)
}

/// The two ways of composing intertwiners in a four-point function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chain {
    /// `⟨θ, 𝒴(v, x) 𝒴(u, y) w⟩`, expanded in `t = y/x`.
    A,
    /// `⟨θ, 𝒴(𝒴(v, x-y) u, y) w⟩`, expanded in `t = (x-y)/y`.
    B,
}

/// Homogeneous two-variable series of total degree `degree`, stored by the
/// exponent of the small variable (`y` for chain A, `x - y` for chain B).
/// Coefficients are exact up to exponent `cap`; higher ones are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSeries {
    pub chain: Chain,
    pub degree: Q,
    pub cap: Q,
    pub terms: BTreeMap<Q, Q>,
}

impl ChainSeries {
    pub fn zero(chain: Chain, degree: Q, cap: Q) -> Self {
        Self { chain, degree, cap, terms: BTreeMap::new() }
    }

    pub fn push(&mut self, e: Q, c: Q) {
        if c.is_zero() || e > self.cap {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Multiply by `Σ_k poly[k] t^k`.
    pub fn mul_poly(&self, poly: &[Q]) -> Self {
        let mut out = Self::zero(self.chain, self.degree.clone(), self.cap.clone());
        for (e, c) in &self.terms {
            for (k, p) in poly.iter().enumerate() {
                out.push(e + qi(k as i64), c * p);
            }
        }
        out
    }

    /// Multiply by `(1 + sign·t)^s`, truncated at the cap.
    pub fn mul_binomial(&self, s: &Q, sign: i64) -> Self {
        let lo = match self.terms.keys().next() {
            Some(e) => e.clone(),
            None => return self.clone(),
        };
        let span = (&self.cap - &lo).floor().to_integer();
        let n: i64 = span.try_into().unwrap_or(0).max(0);
        let poly: Vec<Q> = (0..=n).map(|k| binom_q(s, k as u32) * qi(sign.pow(k as u32))).collect();
        self.mul_poly(&poly)
    }

    /// Multiply by `t^k` and raise the total degree by `degree`.
    pub fn shift(&self, k: &Q, degree: &Q) -> Self {
        let mut out = Self::zero(self.chain, &self.degree + degree, &self.cap + k);
        for (e, c) in &self.terms {
            out.push(e + k, c.clone());
        }
        out
    }

    /// Multiply by `x^p y^q (x-y)^e` expanded in this chain's region.
    pub fn mul_monomial(&self, p: &Q, q: &Q, e: &Q) -> Self {
        let deg = p + q + e;
        match self.chain {
            // x^p y^q (x-y)^e = x^{p+q+e} t^q (1-t)^e
            Chain::A => self.shift(q, &deg).mul_binomial(e, -1),
            // = y^{p+q+e} t^e (1+t)^p
            Chain::B => self.shift(e, &deg).mul_binomial(p, 1),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.chain != other.chain {
            return Err(Error::Invalid("adding series of different chains".into()));
        }
        let degree = match (self.terms.is_empty(), other.terms.is_empty()) {
            (false, false) if self.degree != other.degree => {
                return Err(Error::Invalid(format!("degree mismatch: {} vs {}", self.degree, other.degree)))
            }
            (true, false) => other.degree.clone(),
            _ => self.degree.clone(),
        };
        let mut out = Self::zero(self.chain, degree, self.cap.clone().min(other.cap.clone()));
        for (e, c) in self.terms.iter().chain(&other.terms) {
            out.push(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn truncate(&self, cap: &Q) -> Self {
        let mut out = self.clone();
        out.cap = cap.clone().min(self.cap.clone());
        out.terms.retain(|e, _| *e <= out.cap);
        out
    }

    /// Sum of the terms on principal branches.
    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for (e, c) in &self.terms {
            let rest = &self.degree - e;
            acc += qc(c)
                * match self.chain {
                    Chain::A => cpow(x, qc(&rest)) * cpow(y, qc(e)),
                    Chain::B => cpow(x - y, qc(e)) * cpow(y, qc(&rest)),
                };
        }
        acc
    }

    /// Magnitude of the band just below the cap: zero when the sum
    /// terminated before reaching it.
    pub fn last_band(&self, x: Complex64, y: Complex64) -> f64 {
        match self.terms.iter().next_back().filter(|(e, _)| **e > &self.cap - qi(1)) {
            Some((e, c)) => {
                let mut one = Self::zero(self.chain, self.degree.clone(), self.cap.clone());
                one.push(e.clone(), c.clone());
                one.eval(x, y).norm()
            }
            None => 0.0,
        }
    }
}

/// Truncated mode sum with its heuristic tail.
#[derive(Clone, Debug)]
pub struct ModeSum {
    pub value: Complex64,
    pub tail: f64,
    pub series: ChainSeries,
}

/// Three Fock modules `F_a, F_b, F_c` with the four intertwiners that build
/// `A(BC)` and `(AB)C`, both landing in `F_{a+b+c}`.
#[derive(Clone, Debug)]
pub struct FourPoint {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    /// `F_a ⊗ F_{b+c} → F_{a+b+c}`
    pub y1: Intertwiner,
    /// `F_b ⊗ F_c → F_{b+c}`
    pub y2: Intertwiner,
    /// `F_{a+b} ⊗ F_c → F_{a+b+c}`
    pub y3: Intertwiner,
    /// `F_a ⊗ F_b → F_{a+b}`
    pub y4: Intertwiner,
}

impl FourPoint {
    pub fn new(a: Q, b: Q, c: Q) -> Self {
        Self {
            y1: Intertwiner::new(a.clone(), &b + &c),
            y2: Intertwiner::new(b.clone(), c.clone()),
            y3: Intertwiner::new(&a + &b, c.clone()),
            y4: Intertwiner::new(a.clone(), b.clone()),
            a,
            b,
            c,
        }
    }

    pub fn momenta(&self) -> [Q; 3] {
        [self.a.clone(), self.b.clone(), self.c.clone()]
    }

    /// Total degree `wt(θ) - wt(v) - wt(u) - wt(w)` of the correlator.
    pub fn degree(&self, theta: &[u32], v: &[u32], u: &[u32], w: &[u32]) -> Q {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        a * b + a * c + b * c + qi(size(theta) as i64 - size(v) as i64 - size(u) as i64 - size(w) as i64)
    }

    /// Exponent of the small variable at intermediate grade 0.
    pub fn lead(&self, chain: Chain, v: &[u32], u: &[u32], w: &[u32]) -> Q {
        match chain {
            Chain::A => &self.b * &self.c - qi(size(u) as i64 + size(w) as i64),
            Chain::B => &self.a * &self.b - qi(size(v) as i64 + size(u) as i64),
        }
    }

    /// Exact double mode sum over intermediate grades `≤ g`.
    pub fn mode_series(&self, chain: Chain, theta: &[u32], v: &[u32], u: &[u32], w: &[u32], g: u32) -> ChainSeries {
        let lead = self.lead(chain, v, u, w);
        let mut out = ChainSeries::zero(chain, self.degree(theta, v, u, w), &lead + qi(g as i64));
        for n in 0..=g {
            let mut band = Q::zero();
            for d in partitions(n) {
                band += match chain {
                    Chain::A => {
                        let m1 = self.y1.matrix_element(theta, v, &d);
                        if m1.is_zero() { continue; }
                        m1 * self.y2.matrix_element(&d, u, w)
                    }
                    Chain::B => {
                        let m4 = self.y4.matrix_element(&d, v, u);
                        if m4.is_zero() { continue; }
                        m4 * self.y3.matrix_element(theta, &d, w)
                    }
                };
            }
            out.push(&lead + qi(n as i64), band);
        }
        out
    }

    /// `direct_mode_sum`: the truncated double sum evaluated at `(x, y)`.
    pub fn direct_mode_sum(
        &self,
        chain: Chain,
        quad: (&[u32], &[u32], &[u32], &[u32]),
        x: Complex64,
        y: Complex64,
        g: u32,
    ) -> Result<ModeSum> {
        check_cut("x", x)?;
        check_cut("y", y)?;
        check_cut("x-y", x - y)?;
        let ok = match chain {
            Chain::A => y.norm() < x.norm() && y.norm() > 0.0,
            Chain::B => (x - y).norm() < y.norm() && (x - y).norm() > 0.0,
        };
        if !ok {
            return Err(Error::Region(format!("({x}, {y}) outside the convergence region of chain {chain:?}")));
        }
        let (theta, v, u, w) = quad;
        let series = self.mode_series(chain, theta, v, u, w, g);
        let value = series.eval(x, y);
        let tail = series.last_band(x, y);
        Ok(ModeSum { value, tail, series })
    }

    /// Exact expansion of the basis correlator `(ν*, |a⟩, |b⟩, |c⟩)` in the
    /// chain's variable, through exponent `cap`.
    pub fn basis_series(&self, chain: Chain, nu: &[u32], cap: &Q) -> ChainSeries {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let degree = a * b + a * c + b * c + qi(size(nu) as i64);
        let mut s = ChainSeries::zero(chain, degree, cap.clone());
        let mut labels = nu.to_vec();
        labels.dedup();
        match chain {
            Chain::A => {
                // x^D t^{bc} (1-t)^{ab} Π ((a + b tⁿ)/n)^m / m!
                s.push(b * c, Q::one());
                s = s.mul_binomial(&(a * b), -1);
                for n in labels {
                    let m = multiplicity(nu, n);
                    let mut poly = vec![Q::zero(); n as usize + 1];
                    poly[0] = a / qi(n as i64);
                    poly[n as usize] += b / qi(n as i64);
                    for _ in 0..m {
                        s = s.mul_poly(&poly);
                    }
                    s = s.mul_poly(&[Q::one() / factorial_q(m)]);
                }
            }
            Chain::B => {
                // y^D t^{ab} (1+t)^{ac} Π ((a(1+t)ⁿ + b)/n)^m / m!
                s.push(a * b, Q::one());
                s = s.mul_binomial(&(a * c), 1);
                for n in labels {
                    let m = multiplicity(nu, n);
                    let mut poly: Vec<Q> =
                        (0..=n).map(|k| a * crate::scalar::binom_int(n as i64, k) / qi(n as i64)).collect();
                    poly[0] += b / qi(n as i64);
                    for _ in 0..m {
                        s = s.mul_poly(&poly);
                    }
                    s = s.mul_poly(&[Q::one() / factorial_q(m)]);
                }
            }
        }
        s
    }
}

impl FourPoint {
    /// Series of `Σ c · F(q)` exact through exponent `cap`. Basis quadruples
    /// (all of `v, u, w` highest weight) use the closed-form expansion when
    /// `closed_basis` is set; everything else uses mode sums deep enough to
    /// reach `cap`.
    pub fn combination_series(
        &self,
        lc: &LinearCombination<Partition>,
        degree: &Q,
        cap: &Q,
        closed_basis: bool,
    ) -> Result<ChainSeries> {
        let chain = lc.chain;
        let mut out = ChainSeries::zero(chain, degree.clone(), cap.clone());
        for ((q, h, k), coef) in &lc.terms {
            if *h != 0 || *k != 0 {
                return Err(Error::Invalid("Fock correlators carry no logarithms".into()));
            }
            for (m, c) in coef.terms() {
                let [p, yq, e] = *m;
                let shift = qi(match chain {
                    Chain::A => yq,
                    Chain::B => e,
                });
                let need = cap - &shift;
                let base = if closed_basis && q.v.is_empty() && q.u.is_empty() && q.w.is_empty() {
                    self.basis_series(chain, &q.theta, &need)
                } else {
                    let lead = self.lead(chain, &q.v, &q.u, &q.w);
                    let g = (&need - &lead).ceil().to_integer();
                    let g: i64 = g.try_into().map_err(|_| Error::Invalid("series cap out of range".into()))?;
                    self.mode_series(chain, &q.theta, &q.v, &q.u, &q.w, g.max(0) as u32)
                };
                let term = base.mul_monomial(&qi(p), &qi(yq), &qi(e)).mul_poly(std::slice::from_ref(c));
                out = out.add(&term)?;
            }
        }
        Ok(out.truncate(cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn unit_momenta_value() {
        let one = qi(1);
        let v = closed_form_4pt(&one, &one, &one, Complex64::new(7.0, 0.0), Complex64::new(4.0, 0.0)).unwrap();
        assert!((v - 84.0).norm() < 1e-12);
    }

    #[test]
    fn highest_weight_chain_a_matches_binomial() {
        let fp = FourPoint::new(q(1, 2), qi(1), qi(1));
        let s = fp.mode_series(Chain::A, &[], &[], &[], &[], 8);
        let b = fp.basis_series(Chain::A, &[], &s.cap);
        assert_eq!(s.terms, b.terms);
    }
}
