//! Truncated log-power series `Σ c · z^{d_i + m} · log^t z`.
//!
//! Exponents are grouped into classes modulo the integers. Each class is
//! stored by its smallest present exponent (the *base*) and terms carry a
//! nonnegative integer offset from it, so `z^{1/2}` and `z^{5/2}` live in one
//! class and `z^{1/2}` and `z^{1/3}` in two.

mod bivariate;
mod json;

pub use bivariate::{
    binomial_identity_xy, binomial_identity_yxmy, iota_xy, iota_y_xmy, log_x_substitute, Flavor, Monomial2,
    MonomialSeries2,
};
pub use json::{LpsJson, TermJson};

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{cpow, on_branch_cut, Scalar};

/// Default log-power cap.
pub const DEFAULT_K_MAX: u32 = 8;

/// Finite set of exponent bases, no two of which differ by an integer.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSet<S> {
    bases: Vec<S>,
}

impl<S: Scalar> ExponentSet<S> {
    /// Merge `values` modulo the integers, keeping the smallest member of
    /// every class as its representative.
    pub fn canonical(values: impl IntoIterator<Item = S>) -> Self {
        let mut bases: Vec<S> = Vec::new();
        for v in values {
            match bases.iter().position(|b| v.integer_offset(b).is_some()) {
                Some(i) => {
                    if v.integer_offset(&bases[i]).unwrap() < 0 {
                        bases[i] = v;
                    }
                }
                None => bases.push(v),
            }
        }
        bases.sort_by(|a, b| a.lex_cmp(b));
        Self { bases }
    }

    pub fn bases(&self) -> &[S] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// `Some((i, m))` with `s = bases[i] + m`, `m` possibly negative.
    pub fn locate(&self, s: &S) -> Option<(usize, i64)> {
        self.bases.iter().enumerate().find_map(|(i, b)| s.integer_offset(b).map(|m| (i, m)))
    }

    pub fn contains_mod_z(&self, s: &S) -> bool {
        self.locate(s).is_some()
    }
}

/// Truncated series in one variable with complex exponents and integer
/// log-powers. Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct LogPowerSeries<S: Scalar> {
    var: String,
    bases: Vec<S>,
    terms: BTreeMap<(usize, u32, u32), S>,
    m_max: u32,
    k_max: u32,
    truncated: bool,
}

impl<S: Scalar> PartialEq for LogPowerSeries<S> {
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var && self.bases == other.bases && self.terms == other.terms
    }
}

impl<S: Scalar> LogPowerSeries<S> {
    pub fn zero(var: &str, m_max: u32, k_max: u32) -> Self {
        Self { var: var.to_string(), bases: Vec::new(), terms: BTreeMap::new(), m_max, k_max, truncated: false }
    }

    pub fn monomial(var: &str, exponent: S, logpow: u32, coeff: S, m_max: u32, k_max: u32) -> Self {
        Self::from_terms(var, vec![(exponent, logpow, coeff)], m_max, k_max)
    }

    /// Power series `Σ c_m z^m` with integer exponents.
    pub fn power_series(var: &str, coeffs: &[S], m_max: u32, k_max: u32) -> Self {
        let terms = coeffs.iter().enumerate().map(|(m, c)| (S::from_i64(m as i64), 0, c.clone())).collect();
        Self::from_terms(var, terms, m_max, k_max)
    }

    /// Build the canonical form from raw `(exponent, logpow, coefficient)` triples.
    /// Terms beyond the caps are dropped and the truncation flag is set.
    pub fn from_terms(var: &str, raw: Vec<(S, u32, S)>, m_max: u32, k_max: u32) -> Self {
        let mut out = Self::zero(var, m_max, k_max);
        // class representative, then (offset from representative, logpow) -> coeff
        let mut classes: Vec<(S, BTreeMap<(i64, u32), S>)> = Vec::new();
        for (e, t, c) in raw {
            if c.is_zero() {
                continue;
            }
            if t > k_max {
                out.truncated = true;
                continue;
            }
            let slot = classes.iter().position(|(rep, _)| e.integer_offset(rep).is_some());
            let (idx, off) = match slot {
                Some(i) => (i, e.integer_offset(&classes[i].0).unwrap()),
                None => {
                    classes.push((e, BTreeMap::new()));
                    (classes.len() - 1, 0)
                }
            };
            let entry = classes[idx].1.entry((off, t)).or_insert_with(S::zero);
            *entry = entry.clone() + c;
        }
        out.install_classes(classes);
        out
    }

    fn install_classes(&mut self, classes: Vec<(S, BTreeMap<(i64, u32), S>)>) {
        let mut built: Vec<(S, Vec<((u32, u32), S)>)> = Vec::new();
        for (rep, terms) in classes {
            let live: Vec<((i64, u32), S)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            let Some(min_off) = live.iter().map(|((o, _), _)| *o).min() else { continue };
            let base = rep + S::from_i64(min_off);
            let mut kept = Vec::new();
            for ((o, t), c) in live {
                let off = (o - min_off) as u32;
                if off > self.m_max {
                    self.truncated = true;
                    continue;
                }
                kept.push(((off, t), c));
            }
            built.push((base, kept));
        }
        built.sort_by(|a, b| a.0.lex_cmp(&b.0));
        self.bases.clear();
        self.terms.clear();
        for (i, (base, kept)) in built.into_iter().enumerate() {
            self.bases.push(base);
            for ((o, t), c) in kept {
                self.terms.insert((i, o, t), c);
            }
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponent_set(&self) -> ExponentSet<S> {
        ExponentSet { bases: self.bases.clone() }
    }

    pub fn bases(&self) -> &[S] {
        &self.bases
    }

    /// Raw stored terms keyed by `(base index, offset, log power)`.
    pub fn raw_terms(&self) -> &BTreeMap<(usize, u32, u32), S> {
        &self.terms
    }

    /// Iterate `(exponent, logpow, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (S, u32, &S)> + '_ {
        self.terms
            .iter()
            .map(move |(&(b, o, t), c)| (self.bases[b].clone() + S::from_i64(o as i64), t, c))
    }

    pub fn max_log_power(&self) -> u32 {
        self.terms.keys().map(|k| k.2).max().unwrap_or(0)
    }

    /// Coefficient of `z^s log^t z`.
    pub fn coeff(&self, s: &S, t: u32) -> S {
        for (i, b) in self.bases.iter().enumerate() {
            if let Some(off) = s.integer_offset(b) {
                if off < 0 {
                    return S::zero();
                }
                return self.terms.get(&(i, off as u32, t)).cloned().unwrap_or_else(S::zero);
            }
        }
        S::zero()
    }

    pub fn with_caps(&self, m_max: u32, k_max: u32) -> Self {
        Self::from_terms(&self.var, self.terms().map(|(e, t, c)| (e, t, c.clone())).collect(), m_max, k_max)
            .flag(self.truncated)
    }

    fn flag(mut self, t: bool) -> Self {
        self.truncated |= t;
        self
    }

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.clone(), other.var.clone()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let mut raw: Vec<(S, u32, S)> = self.terms().map(|(e, t, c)| (e, t, c.clone())).collect();
        raw.extend(other.terms().map(|(e, t, c)| (e, t, c.clone())));
        let m = self.m_max.min(other.m_max);
        let k = self.k_max.min(other.k_max);
        Ok(Self::from_terms(&self.var, raw, m, k).flag(self.truncated || other.truncated))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.bases.clear();
            out.terms.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    /// Multiply by `z^d`.
    pub fn shift(&self, d: &S) -> Self {
        let mut out = self.clone();
        for b in out.bases.iter_mut() {
            *b = b.clone() + d.clone();
        }
        out.bases_resort();
        out
    }

    fn bases_resort(&mut self) {
        let mut idx: Vec<usize> = (0..self.bases.len()).collect();
        idx.sort_by(|&a, &b| self.bases[a].lex_cmp(&self.bases[b]));
        if idx.iter().enumerate().all(|(i, &j)| i == j) {
            return;
        }
        let mut inv = vec![0; idx.len()];
        for (new, &old) in idx.iter().enumerate() {
            inv[old] = new;
        }
        self.bases = idx.iter().map(|&i| self.bases[i].clone()).collect();
        self.terms = std::mem::take(&mut self.terms).into_iter().map(|((b, o, t), c)| ((inv[b], o, t), c)).collect();
    }

    /// Product with the strict log cap disabled: log overflow drops terms.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, false)
    }

    /// Product. With `strict_log_cap`, any product term above `K_max` is an error.
    pub fn mul_with(&self, other: &Self, strict_log_cap: bool) -> Result<Self> {
        self.check_var(other)?;
        let m_max = self.m_max.min(other.m_max);
        let k_max = self.k_max.min(other.k_max);
        let mut truncated = self.truncated || other.truncated;

        // product classes: representative, and for each input pair its integer shift
        let mut reps: Vec<S> = Vec::new();
        let mut pair_class: BTreeMap<(usize, usize), (usize, i64)> = BTreeMap::new();
        for (i, bi) in self.bases.iter().enumerate() {
            for (j, bj) in other.bases.iter().enumerate() {
                let s = bi.clone() + bj.clone();
                let (c, off) = match reps.iter().position(|r| s.integer_offset(r).is_some()) {
                    Some(c) => (c, s.integer_offset(&reps[c]).unwrap()),
                    None => {
                        reps.push(s);
                        (reps.len() - 1, 0)
                    }
                };
                pair_class.insert((i, j), (c, off));
            }
        }
        // shift each class so the smallest contributing pair sits at offset 0
        let mut min_off = vec![i64::MAX; reps.len()];
        for &(c, off) in pair_class.values() {
            min_off[c] = min_off[c].min(off);
        }
        let mut classes: Vec<(S, BTreeMap<(i64, u32), S>)> =
            reps.iter().enumerate().map(|(c, r)| (r.clone() + S::from_i64(min_off[c]), BTreeMap::new())).collect();

        for (&(i, o1, t1), c1) in &self.terms {
            for (&(j, o2, t2), c2) in &other.terms {
                let (c, off) = pair_class[&(i, j)];
                let total = o1 as i64 + o2 as i64 + off - min_off[c];
                if total > m_max as i64 {
                    truncated = true;
                    continue;
                }
                let t = t1 + t2;
                if t > k_max {
                    if strict_log_cap {
                        return Err(Error::LogCapOverflow { cap: k_max, got: t });
                    }
                    truncated = true;
                    continue;
                }
                let e = classes[c].1.entry((total, t)).or_insert_with(S::zero);
                *e = e.clone() + c1.clone() * c2.clone();
            }
        }
        let mut out = Self::zero(&self.var, m_max, k_max);
        out.install_classes(classes);
        out.truncated |= truncated;
        Ok(out)
    }

    /// d/dz, exact: `c z^s log^t ↦ c s z^{s-1} log^t + c t z^{s-1} log^{t-1}`.
    pub fn derive(&self) -> Self {
        let mut raw = Vec::new();
        for (s, t, c) in self.terms() {
            let e = s.clone() - S::one();
            raw.push((e.clone(), t, c.clone() * s));
            if t > 0 {
                raw.push((e, t - 1, c.clone() * S::from_i64(t as i64)));
            }
        }
        Self::from_terms(&self.var, raw, self.m_max, self.k_max).flag(self.truncated)
    }

    /// `z · d/dz`, which keeps every exponent in place.
    pub fn euler_derive(&self) -> Self {
        self.derive().shift(&S::one())
    }

    /// Principal-branch value and a heuristic tail estimate (magnitude of the
    /// last retained offset band of every class).
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, f64)> {
        if on_branch_cut(z) {
            return Err(Error::BranchCut(format!("{z}")));
        }
        let lz = z.ln();
        let mut value = Complex64::new(0.0, 0.0);
        let mut bands: BTreeMap<usize, (u32, Complex64)> = BTreeMap::new();
        for (&(b, o, t), c) in &self.terms {
            let s = self.bases[b].to_c64() + Complex64::new(o as f64, 0.0);
            let term = c.to_c64() * cpow(z, s) * lz.powu(t);
            if !term.re.is_finite() || !term.im.is_finite() {
                return Err(Error::Numeric(format!("overflow evaluating at {z}")));
            }
            value += term;
            let band = bands.entry(b).or_insert((o, Complex64::new(0.0, 0.0)));
            match o.cmp(&band.0) {
                Ordering::Greater => *band = (o, term),
                Ordering::Equal => band.1 += term,
                Ordering::Less => {}
            }
        }
        let tail = bands.values().map(|(_, v)| v.norm()).sum();
        Ok((value, tail))
    }

    /// Largest coefficient magnitude among terms with offset `<= window` in
    /// the class of `anchor`, counting offsets from `anchor` itself.
    pub fn max_abs_upto(&self, anchor: &S, window: i64) -> f64 {
        let mut best: f64 = 0.0;
        for (s, _, c) in self.terms() {
            if let Some(off) = s.integer_offset(anchor) {
                if off <= window {
                    best = best.max(c.magnitude());
                }
            }
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T, g: impl Fn(&S) -> T) -> LogPowerSeries<T> {
        let raw = self.terms().map(|(e, t, c)| (g(&e), t, f(c))).collect();
        let mut out = LogPowerSeries::from_terms(&self.var, raw, self.m_max, self.k_max);
        out.truncated |= self.truncated;
        out
    }

    pub fn to_c64(&self) -> LogPowerSeries<Complex64> {
        self.map_coeffs(|c| c.to_c64(), |e| e.to_c64())
    }

    /// Drop coefficients below `tol` in magnitude (float mode cleanup).
    pub fn chop(&self, tol: f64) -> Self {
        let raw = self.terms().filter(|(_, _, c)| c.magnitude() > tol).map(|(e, t, c)| (e, t, c.clone())).collect();
        Self::from_terms(&self.var, raw, self.m_max, self.k_max).flag(self.truncated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, GaussRational};

    fn gq(n: i64, d: i64) -> GaussRational {
        GaussRational::real(q(n, d))
    }

    #[test]
    fn merging_bases() {
        let s = LogPowerSeries::from_terms(
            "z",
            vec![(gq(5, 2), 0, gq(1, 1)), (gq(1, 2), 0, gq(2, 1)), (gq(1, 3), 1, gq(1, 1))],
            10,
            8,
        );
        assert_eq!(s.bases().len(), 2);
        assert_eq!(s.bases()[1], gq(1, 2));
        assert_eq!(s.coeff(&gq(5, 2), 0), gq(1, 1));
        assert_eq!(s.coeff(&gq(1, 3), 1), gq(1, 1));
    }

    #[test]
    fn cancellation_moves_base() {
        let d = gq(1, 3);
        let a = LogPowerSeries::from_terms("z", vec![(d.clone(), 0, gq(1, 1)), (d.clone() + gq(1, 1), 0, gq(1, 1))], 4, 8);
        let b = LogPowerSeries::monomial("z", d.clone() + gq(1, 1), 0, gq(-1, 1), 4, 8);
        let c = a.add(&b).unwrap();
        assert_eq!(c, LogPowerSeries::monomial("z", d, 0, gq(1, 1), 4, 8));
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn truncating_product() {
        let a = LogPowerSeries::power_series("z", &[gq(1, 1), gq(1, 1), gq(1, 1)], 2, 8);
        let b = LogPowerSeries::power_series("z", &[gq(1, 1), gq(-1, 1)], 2, 8);
        let p = a.mul(&b).unwrap();
        assert_eq!(p, LogPowerSeries::monomial("z", gq(0, 1), 0, gq(1, 1), 2, 8));
        assert!(p.truncated());
    }

    #[test]
    fn strict_log_cap() {
        let a = LogPowerSeries::monomial("z", gq(0, 1), 1, gq(1, 1), 4, 1);
        assert!(matches!(a.mul_with(&a, true), Err(Error::LogCapOverflow { .. })));
        assert!(a.mul(&a).unwrap().is_zero());
    }

    #[test]
    fn derivative_product_rule() {
        let a = LogPowerSeries::monomial("z", gq(1, 2), 1, gq(1, 1), 4, 8);
        let d = a.derive();
        assert_eq!(d.coeff(&gq(-1, 2), 1), gq(1, 2));
        assert_eq!(d.coeff(&gq(-1, 2), 0), gq(1, 1));
        let one = LogPowerSeries::monomial("z", gq(0, 1), 0, gq(1, 1), 4, 8);
        assert!(one.derive().is_zero());
    }

    #[test]
    fn variable_mismatch() {
        let a: LogPowerSeries<GaussRational> = LogPowerSeries::zero("x", 2, 2);
        let b = LogPowerSeries::zero("y", 2, 2);
        assert!(matches!(a.add(&b), Err(Error::VariableMismatch(..))));
    }

    #[test]
    fn principal_evaluation() {
        let s = LogPowerSeries::monomial("z", gq(1, 2), 0, gq(1, 1), 0, 8);
        let (v, _) = s.eval(Complex64::i()).unwrap();
        assert!((v - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
        let l = LogPowerSeries::monomial("z", gq(0, 1), 1, gq(1, 1), 0, 8);
        let (v, _) = l.eval(Complex64::new(std::f64::consts::E, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        assert!(matches!(l.eval(Complex64::new(-1.0, 0.0)), Err(Error::BranchCut(_))));
        assert!(l.eval(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn exponent_set_locate() {
        let e = ExponentSet::canonical(vec![gq(3, 2), gq(1, 2), gq(2, 3)]);
        assert_eq!(e.len(), 2);
        assert_eq!(e.locate(&gq(7, 2)), Some((0, 3)));
        assert!(!e.contains_mod_z(&GaussRational::real(qi(0))));
    }
}
