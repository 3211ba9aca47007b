//! Holomorphic gauge to Levelt normal form.
//!
//! With `Δ = I + Δ_1 z + …` and `B = B_0 + B_1 z + …`, the gauge equation
//! `z Δ' = A Δ - Δ B` at order `k` reads, in the generalized eigenbasis of
//! `A_0`, blockwise
//!
//! ```text
//! (T_i - k) X_ij - X_ij T_j = (B_k)_ij - (R_k)_ij,
//! R_k = Σ_{i≥1} A_i Δ_{k-i} - Σ_{1≤j<k} Δ_{k-j} B_j.
//! ```
//!
//! The operator on the left is invertible unless `λ_i - λ_j = k`. Resonant
//! blocks go to `B_k` with `X_ij = 0`; all others go to `Δ_k` with `B_k = 0`.

use super::spectral::{spectral, Spectral, SpectralOptions};
use super::MatrixSeries;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LeveltOptions {
    pub spectral: SpectralOptions,
}

#[derive(Clone, Debug)]
pub struct LeveltSystem<S: Scalar> {
    pub b: MatrixSeries<S>,
    pub delta: MatrixSeries<S>,
    pub l: Mat<S>,
    /// Generalized eigenbasis of `A_0 = B_0`.
    pub spectral: Spectral<S>,
    b_basis: Vec<Mat<S>>,
    delta_basis: Vec<Mat<S>>,
}

impl<S: Scalar> LeveltSystem<S> {
    pub fn order(&self) -> usize {
        self.b.order()
    }

    /// Semisimple part of `B_0`.
    pub fn b0s(&self) -> Mat<S> {
        self.spectral.semisimple()
    }

    /// `max_k |ad(B_{0,s}) B_k - k B_k|`.
    pub fn levelt_defect(&self) -> f64 {
        let s = self.b0s();
        (0..=self.order())
            .map(|k| {
                let bk = self.b.coeff(k);
                (&s.commutator(&bk) - &bk.scale(&S::from_i64(k as i64))).max_abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max_k |(z Δ' - A Δ + Δ B)_k|` through the truncation order.
    pub fn gauge_residual(&self, a: &MatrixSeries<S>) -> f64 {
        let m = self.order();
        let lhs = self.delta.euler_derivative();
        let ad = a.mul(&self.delta, m);
        let db = self.delta.mul(&self.b, m);
        (0..=m)
            .map(|k| (&(&lhs.coeff(k) - &ad.coeff(k)) + &db.coeff(k)).max_abs())
            .fold(0.0, f64::max)
    }

    /// `B_k` in the eigenbasis of `A_0`.
    pub fn b_in_basis(&self, k: usize) -> Mat<S> {
        self.b_basis.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.b.size(), self.b.size()))
    }

    pub fn delta_in_basis(&self, k: usize) -> Mat<S> {
        self.delta_basis.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.b.size(), self.b.size()))
    }

    /// Integer shifts `ℓ_i` along the eigenbasis columns.
    pub fn shifts(&self) -> Vec<i64> {
        let mut out = vec![0; self.b.size()];
        for (c, cl) in self.spectral.clusters.iter().enumerate() {
            for i in cl.range() {
                out[i] = self.spectral.floor(c);
            }
        }
        out
    }

    /// `B(1) - L` in the eigenbasis, the constant matrix of the Euler system
    /// satisfied by `z^{-L} Δ^{-1} Y`.
    pub fn euler_matrix_in_basis(&self) -> Mat<S> {
        let n = self.b.size();
        let mut m = self.b_basis.iter().fold(Mat::zeros(n, n), |acc, b| &acc + b);
        for (i, l) in self.shifts().into_iter().enumerate() {
            m[(i, i)] = m[(i, i)].clone() - S::from_i64(l);
        }
        m
    }
}

/// Gauge action `B = Δ^{-1}(A Δ - z Δ')` through `order`.
pub fn gauge_transform<S: Scalar>(a: &MatrixSeries<S>, delta: &MatrixSeries<S>, order: usize) -> Result<MatrixSeries<S>> {
    let inv = delta.inverse(order)?;
    let ad = a.mul(delta, order);
    let dd = delta.euler_derivative().truncate(order);
    let diff = MatrixSeries::new((0..=order).map(|k| &ad.coeff(k) - &dd.coeff(k)).collect(), a.z0().clone(), a.radius())?;
    Ok(inv.mul(&diff, order))
}

pub fn to_levelt<S: Scalar>(a: &MatrixSeries<S>, opts: &LeveltOptions) -> Result<LeveltSystem<S>> {
    let n = a.size();
    let m = a.order();
    let sp = spectral(&a.coeff(0), &opts.spectral)?;
    let at: Vec<Mat<S>> = (0..=m).map(|k| sp.to_basis(&a.coeff(k))).collect();
    let blocks: Vec<Mat<S>> =
        sp.clusters.iter().map(|c| at[0].block(c.start, c.start + c.mult, c.start, c.start + c.mult)).collect();

    let mut delta: Vec<Mat<S>> = vec![Mat::identity(n)];
    let mut b: Vec<Mat<S>> = vec![at[0].clone()];
    for k in 1..=m {
        let mut r = Mat::zeros(n, n);
        for i in 1..=k {
            r = &r + &(&at[i] * &delta[k - i]);
        }
        for j in 1..k {
            r = &r - &(&delta[k - j] * &b[j]);
        }
        let mut dk = Mat::zeros(n, n);
        let mut bk = Mat::zeros(n, n);
        for (ci, c) in sp.clusters.iter().enumerate() {
            for (cj, d) in sp.clusters.iter().enumerate() {
                let rij = r.block(c.start, c.start + c.mult, d.start, d.start + d.mult);
                if sp.difference(ci, cj) == Some(k as i64) {
                    bk.set_block(c.start, d.start, &rij);
                } else {
                    let x = sylvester(&blocks[ci], &blocks[cj], k as i64, &(-&rij))?;
                    dk.set_block(c.start, d.start, &x);
                }
            }
        }
        delta.push(dk);
        b.push(bk);
    }

    let z0 = a.z0().clone();
    let b_orig = MatrixSeries::new(b.iter().map(|x| sp.from_basis(x)).collect(), z0.clone(), a.radius())?;
    let d_orig = MatrixSeries::new(delta.iter().map(|x| sp.from_basis(x)).collect(), z0, a.radius())?;
    let mut ld = Mat::zeros(n, n);
    for (c, cl) in sp.clusters.iter().enumerate() {
        for i in cl.range() {
            ld[(i, i)] = S::from_i64(sp.floor(c));
        }
    }
    let l = sp.from_basis(&ld);
    Ok(LeveltSystem { b: b_orig, delta: d_orig, l, spectral: sp, b_basis: b, delta_basis: delta })
}

/// Solve `(T_i - k) X - X T_j = C` through its Kronecker form.
fn sylvester<S: Scalar>(ti: &Mat<S>, tj: &Mat<S>, k: i64, c: &Mat<S>) -> Result<Mat<S>> {
    let (p, q) = (ti.rows(), tj.rows());
    if c.is_zero() {
        return Ok(Mat::zeros(p, q));
    }
    let shifted = ti - &Mat::identity(p).scale(&S::from_i64(k));
    let op = &shifted.kron(&Mat::identity(q)) - &Mat::identity(p).kron(&tj.transpose());
    let rhs: Vec<S> = (0..p).flat_map(|i| (0..q).map(move |j| (i, j))).map(|(i, j)| c[(i, j)].clone()).collect();
    let x = op.solve_vec(&rhs).map_err(|_| Error::Spectrum("singular non-resonant Sylvester block".into()))?;
    Ok(Mat::from_fn(p, q, |i, j| x[i * q + j].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    fn g(n: i64) -> GaussRational {
        GaussRational::from_i64(n)
    }

    #[test]
    fn resonant_two_by_two() {
        let a0 = Mat::diag(&[g(0), g(1)]);
        let a1 = Mat::from_rows(vec![vec![g(0), g(0)], vec![g(1), g(0)]]).unwrap();
        let a = MatrixSeries::new(vec![a0, a1], g(0), f64::INFINITY).unwrap();
        let lv = to_levelt(&a, &LeveltOptions::default()).unwrap();
        assert_eq!(lv.levelt_defect(), 0.0);
        assert_eq!(lv.gauge_residual(&a), 0.0);
        // E21 maps the eigenvalue-0 line to the eigenvalue-1 line: resonant at k = 1
        assert_eq!(lv.b.coeff(1), a.coeff(1));
    }

    #[test]
    fn already_levelt_is_fixed() {
        let a0 = Mat::diag(&[g(2), g(0)]);
        let a2 = Mat::from_rows(vec![vec![g(0), g(7)], vec![g(0), g(0)]]).unwrap();
        let a = MatrixSeries::new(vec![a0, Mat::zeros(2, 2), a2], g(0), 1.0).unwrap();
        let lv = to_levelt(&a, &LeveltOptions::default()).unwrap();
        assert_eq!(lv.b, a);
        assert_eq!(lv.delta, MatrixSeries::new(vec![Mat::identity(2), Mat::zeros(2, 2), Mat::zeros(2, 2)], g(0), 1.0).unwrap());
    }
}
