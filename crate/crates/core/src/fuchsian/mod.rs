//! Fuchsian systems `dY/dz = A(z)/(z - z0) · Y` with holomorphic `A`.
//!
//! Everything is expressed in the local coordinate `z - z0`, written `z` in
//! the series. Solutions are vectors of [`LogPowerSeries`].

mod levelt;
mod solve;
mod spectral;

pub use levelt::{gauge_transform, to_levelt, LeveltOptions, LeveltSystem};
pub use solve::{coefficient_growth, fuchsian_solve, residual, SolveOptions};
pub use spectral::{spectral, Cluster, Spectral, SpectralOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logseries::{LogPowerSeries, LpsJson, DEFAULT_K_MAX};
use crate::mat::Mat;
use crate::scalar::{factorial_q, RealRepr, Scalar};

/// `A(z) = Σ_k A_k z^k`, truncated at `coeffs.len() - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSeries<S> {
    r: usize,
    z0: S,
    coeffs: Vec<Mat<S>>,
    radius: f64,
}

impl<S: Scalar> MatrixSeries<S> {
    pub fn new(coeffs: Vec<Mat<S>>, z0: S, radius: f64) -> Result<Self> {
        let r = coeffs.first().map(|m| m.rows()).ok_or_else(|| Error::Invalid("empty matrix series".into()))?;
        if coeffs.iter().any(|m| m.rows() != r || m.cols() != r) {
            return Err(Error::Invalid("matrix series coefficients must be square of equal size".into()));
        }
        if coeffs.iter().any(|m| !m.to_c64().max_abs().is_finite()) {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Invalid("radius must be positive".into()));
        }
        Ok(Self { r, z0, coeffs, radius })
    }

    /// Constant series `A_0`, infinite radius.
    pub fn constant(a0: Mat<S>) -> Result<Self> {
        Self::new(vec![a0], S::zero(), f64::INFINITY)
    }

    pub fn size(&self) -> usize {
        self.r
    }

    pub fn z0(&self) -> &S {
        &self.z0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat<S>] {
        &self.coeffs
    }

    /// `A_k`, zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> Mat<S> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.r, self.r))
    }

    /// `A(1) = Σ_k A_k` over the stored coefficients.
    pub fn sum(&self) -> Mat<S> {
        self.coeffs.iter().fold(Mat::zeros(self.r, self.r), |acc, m| &acc + m)
    }

    /// Copy truncated (or zero-padded) to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let coeffs = (0..=order).map(|k| self.coeff(k)).collect();
        Self { coeffs, ..self.clone() }
    }

    /// Series product truncated at `order`.
    pub fn mul(&self, other: &Self, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                let mut acc = Mat::zeros(self.r, self.r);
                for i in 0..=k.min(self.order()) {
                    if k - i <= other.order() {
                        acc = &acc + &(&self.coeffs[i] * &other.coeffs[k - i]);
                    }
                }
                acc
            })
            .collect();
        Self { r: self.r, z0: self.z0.clone(), coeffs, radius: self.radius.min(other.radius) }
    }

    /// Multiplicative inverse as a series (requires invertible constant term).
    pub fn inverse(&self, order: usize) -> Result<Self> {
        let inv0 = self.coeffs[0].inverse().map_err(|_| Error::Numeric("gauge not invertible at 0".into()))?;
        let mut out: Vec<Mat<S>> = vec![inv0.clone()];
        for k in 1..=order {
            let mut acc = Mat::zeros(self.r, self.r);
            for i in 1..=k.min(self.order()) {
                acc = &acc + &(&self.coeffs[i] * &out[k - i]);
            }
            out.push(-&(&inv0 * &acc));
        }
        Ok(Self { coeffs: out, ..self.clone() })
    }

    /// `z · d/dz`.
    pub fn euler_derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, m)| m.scale(&S::from_i64(k as i64))).collect();
        Self { coeffs, ..self.clone() }
    }

    pub fn max_diff(&self, other: &Self, order: usize) -> f64 {
        (0..=order).map(|k| (&self.coeff(k) - &other.coeff(k)).max_abs()).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> MatrixSeries<Complex64> {
        MatrixSeries {
            r: self.r,
            z0: self.z0.to_c64(),
            coeffs: self.coeffs.iter().map(|m| m.to_c64()).collect(),
            radius: self.radius,
        }
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            r: self.r,
            z0: self.z0.to_repr(),
            radius: if self.radius.is_finite() { Some(self.radius) } else { None },
            coeffs: self
                .coeffs
                .iter()
                .map(|m| (0..self.r).flat_map(|i| (0..self.r).map(move |j| m[(i, j)].to_repr())).collect())
                .collect(),
        }
    }

    pub fn from_json(doc: &SystemJson) -> Result<Self> {
        let r = doc.r;
        let mut coeffs = Vec::new();
        for flat in &doc.coeffs {
            if flat.len() != r * r {
                return Err(Error::Parse(format!("coefficient has {} entries, expected {}", flat.len(), r * r)));
            }
            let vals = flat.iter().map(S::from_repr).collect::<Result<Vec<S>>>()?;
            coeffs.push(Mat::from_fn(r, r, |i, j| vals[i * r + j].clone()));
        }
        Self::new(coeffs, S::from_repr(&doc.z0)?, doc.radius.unwrap_or(f64::INFINITY))
    }
}

/// JSON form: every coefficient is a row-major list of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub r: usize,
    pub z0: [RealRepr; 2],
    #[serde(default)]
    pub radius: Option<f64>,
    pub coeffs: Vec<Vec<[RealRepr; 2]>>,
}

/// Semisimple plus nilpotent splitting of a square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DunfordPair<S> {
    pub s: Mat<S>,
    pub n: Mat<S>,
    pub degraded: bool,
}

pub fn dunford<S: Scalar>(a: &Mat<S>) -> Result<DunfordPair<S>> {
    let sp = spectral(a, &SpectralOptions::default())?;
    let s = sp.semisimple();
    let n = a - &s;
    Ok(DunfordPair { s, n, degraded: sp.degraded })
}

/// Columns of a fundamental solution; `columns[c][i]` is component `i` of column `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalSolutionSet<S: Scalar> {
    pub columns: Vec<Vec<LogPowerSeries<S>>>,
    /// Characteristic exponent of each column: its `log^0` coefficient vector
    /// at this exponent forms the leading matrix.
    pub exponents: Vec<S>,
    /// Coefficients are reliable up to `exponent class minimum + order`.
    pub order: u32,
    pub z0: S,
}

impl<S: Scalar> FundamentalSolutionSet<S> {
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    /// Smallest exponent of the resonance class of column `c`.
    pub fn anchor(&self, c: usize) -> S {
        let e = &self.exponents[c];
        self.exponents
            .iter()
            .filter(|x| x.integer_offset(e).is_some())
            .min_by(|a, b| a.lex_cmp(b))
            .cloned()
            .unwrap_or_else(|| e.clone())
    }

    pub fn leading_matrix(&self) -> Mat<S> {
        let r = self.columns.len();
        Mat::from_fn(r, r, |i, c| self.columns[c][i].coeff(&self.exponents[c], 0))
    }

    pub fn is_independent(&self, tol: f64) -> bool {
        let m = self.leading_matrix();
        m.rank(tol) == m.rows()
    }

    /// `Φ(z0 + dz)` under principal branches.
    pub fn eval(&self, dz: Complex64) -> Result<Mat<Complex64>> {
        let r = self.columns.len();
        let mut out = Mat::zeros(r, r);
        for (c, col) in self.columns.iter().enumerate() {
            for (i, comp) in col.iter().enumerate() {
                out[(i, c)] = comp.eval(dz)?.0;
            }
        }
        Ok(out)
    }

    /// Multiply every column by `z^d`.
    pub fn shift(&self, d: &S) -> Self {
        Self {
            columns: self.columns.iter().map(|col| col.iter().map(|s| s.shift(d)).collect()).collect(),
            exponents: self.exponents.iter().map(|e| e.clone() + d.clone()).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> SolutionJson {
        SolutionJson {
            order: self.order,
            z0: self.z0.to_repr(),
            exponents: self.exponents.iter().map(|e| e.to_repr()).collect(),
            columns: self.columns.iter().map(|col| col.iter().map(|s| s.to_json()).collect()).collect(),
        }
    }

    pub fn from_json(doc: &SolutionJson) -> Result<Self> {
        Ok(Self {
            columns: doc
                .columns
                .iter()
                .map(|col| col.iter().map(LogPowerSeries::from_json).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
            exponents: doc.exponents.iter().map(S::from_repr).collect::<Result<Vec<_>>>()?,
            order: doc.order,
            z0: S::from_repr(&doc.z0)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub order: u32,
    pub z0: [RealRepr; 2],
    pub exponents: Vec<[RealRepr; 2]>,
    pub columns: Vec<Vec<LpsJson>>,
}

/// Fundamental solution `z^{A0}·V` of the Euler system `z Y' = A0 Y`.
///
/// For a Jordan cell `J_s(a)` (ones above the diagonal) the columns are
/// `z^a (log^t z / t!, …, log z, 1, 0, …, 0)ᵗ`, `t = 0..s-1`.
pub fn euler_fundamental<S: Scalar>(a0: &Mat<S>, z0: S) -> Result<FundamentalSolutionSet<S>> {
    let sp = spectral(a0, &SpectralOptions::default())?;
    let r = a0.rows();
    let mut columns = Vec::new();
    let mut exponents = Vec::new();
    for cl in &sp.clusters {
        let vc = sp.v.block(0, r, cl.start, cl.start + cl.mult);
        let wc = sp.w.block(cl.start, cl.start + cl.mult, 0, r);
        let nc = &(&(&wc * a0) * &vc) - &Mat::identity(cl.mult).scale(&cl.eigenvalue);
        for q in 0..cl.mult {
            let mut raw: Vec<Vec<(S, u32, S)>> = vec![Vec::new(); r];
            let mut u: Vec<S> = (0..cl.mult).map(|i| if i == q { S::one() } else { S::zero() }).collect();
            for t in 0..cl.mult as u32 {
                let comp = vc.mul_vec(&u);
                let fact = S::from_q(&factorial_q(t));
                for (i, c) in comp.into_iter().enumerate() {
                    if !c.is_negligible(0.0) {
                        raw[i].push((cl.eigenvalue.clone(), t, c / fact.clone()));
                    }
                }
                u = nc.mul_vec(&u);
            }
            let k_max = (cl.mult as u32).max(DEFAULT_K_MAX);
            columns.push(raw.into_iter().map(|terms| LogPowerSeries::from_terms("z", terms, 0, k_max)).collect());
            exponents.push(cl.eigenvalue.clone());
        }
    }
    Ok(FundamentalSolutionSet { columns, exponents, order: 0, z0 })
}

/// `L = Σ_c floor(Re λ_c) P_c` for a semisimple matrix.
pub fn shift_l<S: Scalar>(b0s: &Mat<S>) -> Result<Mat<S>> {
    let sp = spectral(b0s, &SpectralOptions::default())?;
    let n = b0s.rows();
    let mut d = Mat::zeros(n, n);
    for (c, cl) in sp.clusters.iter().enumerate() {
        let l = S::from_i64(sp.floor(c));
        for i in cl.range() {
            d[(i, i)] = l.clone();
        }
    }
    Ok(sp.from_basis(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, GaussRational};

    fn g(n: i64) -> GaussRational {
        GaussRational::from_i64(n)
    }

    #[test]
    fn dunford_jordan_cell() {
        let a = Mat::from_rows(vec![vec![g(5), g(1)], vec![g(0), g(5)]]).unwrap();
        let d = dunford(&a).unwrap();
        assert_eq!(d.s, Mat::identity(2).scale(&g(5)));
        assert_eq!(d.n, Mat::from_rows(vec![vec![g(0), g(1)], vec![g(0), g(0)]]).unwrap());
    }

    #[test]
    fn shift_l_examples() {
        let h = |n, d| GaussRational::real(q(n, d));
        let l = shift_l(&Mat::diag(&[h(1, 2), h(5, 2)])).unwrap();
        assert_eq!(l, Mat::diag(&[g(0), g(2)]));
        let l = shift_l(&Mat::diag(&[GaussRational::new(q(0, 1), q(1, 1)), GaussRational::new(q(1, 1), q(1, 1))]))
            .unwrap();
        assert_eq!(l, Mat::diag(&[g(0), g(1)]));
        let l = shift_l(&Mat::diag(&[Complex64::new(-0.3, 0.0)])).unwrap();
        assert_eq!(l[(0, 0)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn euler_j2() {
        let a = g(3);
        let j = Mat::from_rows(vec![vec![a.clone(), g(1)], vec![g(0), a.clone()]]).unwrap();
        let f = euler_fundamental(&j, g(0)).unwrap();
        assert_eq!(f.columns[0][0], LogPowerSeries::monomial("z", a.clone(), 0, g(1), 0, 8));
        assert!(f.columns[0][1].is_zero());
        assert_eq!(f.columns[1][0], LogPowerSeries::monomial("z", a.clone(), 1, g(1), 0, 8));
        assert_eq!(f.columns[1][1], LogPowerSeries::monomial("z", a, 0, g(1), 0, 8));
    }

    #[test]
    fn system_json_round_trip() {
        let a = Mat::from_rows(vec![vec![g(1), GaussRational::real(q(1, 3))], vec![g(0), g(2)]]).unwrap();
        let s = MatrixSeries::new(vec![a.clone(), a], g(0), 1.0).unwrap();
        let doc = serde_json::to_string(&s.to_json()).unwrap();
        let back = MatrixSeries::<GaussRational>::from_json(&serde_json::from_str(&doc).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
