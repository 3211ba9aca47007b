//! Generalized eigenspace decomposition `A = V · diag(T_c) · W`.
//!
//! Float mode reorders a complex Schur form so that every eigenvalue cluster
//! is contiguous, then decouples the clusters with triangular Sylvester
//! solves. Exact mode finds Gaussian-rational roots of the characteristic
//! polynomial and takes null spaces of `(A - λ)^m`.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::{GaussRational, Scalar, Q};

/// Tolerances of the float path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Schur eigenvalues closer than `cluster_tol · max(1, |A|)` are one cluster.
    pub cluster_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { cluster_tol: 1e-6 }
    }
}

/// One eigenvalue with its generalized eigenspace.
#[derive(Clone, Debug)]
pub struct Cluster<S> {
    /// Eigenvalue; in float mode members of a resonance class are snapped to
    /// `representative + offset`.
    pub eigenvalue: S,
    pub mult: usize,
    /// First column of the cluster in `V`.
    pub start: usize,
    /// Resonance class: clusters whose eigenvalues differ by integers.
    pub class: usize,
    /// `eigenvalue - representative`, a nonnegative integer.
    pub offset: i64,
}

impl<S> Cluster<S> {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.mult
    }
}

#[derive(Clone, Debug)]
pub struct Spectral<S> {
    pub clusters: Vec<Cluster<S>>,
    /// Class representatives (smallest real part in each class).
    pub class_reps: Vec<S>,
    pub v: Mat<S>,
    pub w: Mat<S>,
    /// Set when a cluster had to absorb eigenvalues spread wider than
    /// `1e-9` around its mean.
    pub degraded: bool,
}

impl<S: Scalar> Spectral<S> {
    pub fn dim(&self) -> usize {
        self.v.rows()
    }

    /// `W · X · V`.
    pub fn to_basis(&self, x: &Mat<S>) -> Mat<S> {
        &(&self.w * x) * &self.v
    }

    /// `V · X · W`.
    pub fn from_basis(&self, x: &Mat<S>) -> Mat<S> {
        &(&self.v * x) * &self.w
    }

    /// Eigenvalue attached to column `i` of `V`.
    pub fn eigenvalue_of(&self, i: usize) -> &S {
        &self.cluster_of(i).eigenvalue
    }

    pub fn cluster_of(&self, i: usize) -> &Cluster<S> {
        self.clusters.iter().find(|c| c.range().contains(&i)).expect("column index within V")
    }

    /// `floor(Re λ)` of a cluster, consistent across a resonance class.
    pub fn floor(&self, c: usize) -> i64 {
        let cl = &self.clusters[c];
        self.class_reps[cl.class].re_floor() + cl.offset
    }

    /// `Some(k)` when `λ_i - λ_j = k` exactly (same resonance class).
    pub fn difference(&self, i: usize, j: usize) -> Option<i64> {
        let (a, b) = (&self.clusters[i], &self.clusters[j]);
        (a.class == b.class).then_some(a.offset - b.offset)
    }

    /// Semisimple part `Σ λ_c P_c`.
    pub fn semisimple(&self) -> Mat<S> {
        let n = self.dim();
        let mut d = Mat::zeros(n, n);
        for c in &self.clusters {
            for i in c.range() {
                d[(i, i)] = c.eigenvalue.clone();
            }
        }
        self.from_basis(&d)
    }

    /// Spectral projector onto the generalized eigenspace of cluster `c`.
    pub fn projector(&self, c: usize) -> Mat<S> {
        let n = self.dim();
        let mut d = Mat::zeros(n, n);
        for i in self.clusters[c].range() {
            d[(i, i)] = S::one();
        }
        self.from_basis(&d)
    }
}

/// Spectral decomposition in either arithmetic mode.
pub fn spectral<S: Scalar>(a: &Mat<S>, opts: &SpectralOptions) -> Result<Spectral<S>> {
    if !a.is_square() {
        return Err(Error::Invalid("spectral decomposition of a non-square matrix".into()));
    }
    if a.rows() == 0 {
        return Ok(Spectral { clusters: vec![], class_reps: vec![], v: a.clone(), w: a.clone(), degraded: false });
    }
    let (values, mults, v, degraded) = if S::EXACT { exact_path(a, opts)? } else { float_path(a, opts)? };
    let w = v.inverse().map_err(|_| Error::Spectrum("generalized eigenbasis is singular".into()))?;

    // resonance classes
    let mut class_of = vec![usize::MAX; values.len()];
    let mut reps: Vec<S> = Vec::new();
    for i in 0..values.len() {
        if let Some(c) = (0..reps.len()).find(|&c| values[i].integer_offset(&reps[c]).is_some()) {
            class_of[i] = c;
            if values[i].integer_offset(&reps[c]).unwrap() < 0 {
                reps[c] = values[i].clone();
            }
        } else {
            class_of[i] = reps.len();
            reps.push(values[i].clone());
        }
    }
    let mut clusters = Vec::new();
    let mut start = 0;
    for (i, val) in values.iter().enumerate() {
        let class = class_of[i];
        let offset = val.integer_offset(&reps[class]).expect("class membership");
        let eigenvalue = if S::EXACT { val.clone() } else { reps[class].clone() + S::from_i64(offset) };
        clusters.push(Cluster { eigenvalue, mult: mults[i], start, class, offset });
        start += mults[i];
    }
    Ok(Spectral { clusters, class_reps: reps, v, w, degraded })
}

fn order_desc<S: Scalar>(a: &S, b: &S) -> Ordering {
    b.lex_cmp(a)
}

type PathOut<S> = (Vec<S>, Vec<usize>, Mat<S>, bool);

fn schur(a: &Mat<Complex64>) -> (Mat<Complex64>, Mat<Complex64>) {
    let n = a.rows();
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| a[(i, j)]);
    let (q, t) = m.schur().unpack();
    let to = |x: &DMatrix<Complex64>| Mat::from_fn(n, n, |i, j| x[(i, j)]);
    let mut t = to(&t);
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    (to(&q), t)
}

/// Single-linkage clustering of `values`; returns members of each cluster.
fn cluster_values(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        l[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                label[ri] = rj;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

fn mean(values: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| values[i]).sum::<Complex64>() / idx.len() as f64
}

fn float_path<S: Scalar>(a: &Mat<S>, opts: &SpectralOptions) -> Result<PathOut<S>> {
    let ac = a.to_c64();
    let n = ac.rows();
    let scale = ac.max_abs().max(1.0);
    let (mut q, mut t) = schur(&ac);
    let diag: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let groups = cluster_values(&diag, opts.cluster_tol * scale);
    let mut degraded = false;
    let mut centers: Vec<(Complex64, usize)> = Vec::new();
    for g in &groups {
        let c = mean(&diag, g);
        if g.iter().any(|&i| (diag[i] - c).norm() > 1e-9 * scale) {
            degraded = true;
        }
        centers.push((c, g.len()));
    }
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&x, &y| order_desc(&centers[x].0, &centers[y].0));
    let mut rank = vec![0; centers.len()];
    for (r, &g) in order.iter().enumerate() {
        rank[g] = r;
    }
    // target rank of every diagonal position
    let mut pos_rank = vec![0; n];
    for (g, members) in groups.iter().enumerate() {
        for &i in members {
            pos_rank[i] = rank[g];
        }
    }
    // bubble the diagonal into cluster order with unitary swaps
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            if pos_rank[k] > pos_rank[k + 1] {
                swap_schur(&mut t, &mut q, k);
                pos_rank.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    // decouple blocks: T_II Y - Y T_JJ = -T_IJ
    let sizes: Vec<usize> = order.iter().map(|&g| centers[g].1).collect();
    let mut v = q;
    let mut s = 0;
    for &sz in &sizes {
        let e = s + sz;
        if e < n {
            let t11 = t.block(s, e, s, e);
            let t22 = t.block(e, n, e, n);
            let t12 = t.block(s, e, e, n);
            let y = sylvester_triangular(&t11, &t22, &(-&t12))?;
            let v1 = v.block(0, n, s, e);
            let upd = &v.block(0, n, e, n) + &(&v1 * &y);
            v.set_block(0, e, &upd);
            t.set_block(s, e, &Mat::zeros(sz, n - e));
        }
        s = e;
    }
    let values = order.iter().map(|&g| S::from_c64(centers[g].0)).collect::<Result<Vec<S>>>()?;
    let vv = v.map(|x| S::from_c64(*x).expect("finite eigenvector"));
    Ok((values, sizes, vv, degraded))
}

/// Swap diagonal entries `k`, `k+1` of the upper-triangular `t`.
fn swap_schur(t: &mut Mat<Complex64>, q: &mut Mat<Complex64>, k: usize) {
    let n = t.rows();
    let (a, b, c) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k + 1)]);
    let x0 = b;
    let x1 = c - a;
    let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return;
    }
    let (g0, g1) = (x0 / nrm, x1 / nrm);
    // G = [[g0, -conj(g1)], [g1, conj(g0)]]
    let g = [[g0, -g1.conj()], [g1, g0.conj()]];
    for j in 0..n {
        let (r0, r1) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = g[0][0].conj() * r0 + g[1][0].conj() * r1;
        t[(k + 1, j)] = g[0][1].conj() * r0 + g[1][1].conj() * r1;
    }
    for i in 0..n {
        let (c0, c1) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = c0 * g[0][0] + c1 * g[1][0];
        t[(i, k + 1)] = c0 * g[0][1] + c1 * g[1][1];
        let (c0, c1) = (q[(i, k)], q[(i, k + 1)]);
        q[(i, k)] = c0 * g[0][0] + c1 * g[1][0];
        q[(i, k + 1)] = c0 * g[0][1] + c1 * g[1][1];
    }
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
}

/// Solve `A Y - Y B = C` with `A`, `B` upper triangular and disjoint spectra.
pub(crate) fn sylvester_triangular(a: &Mat<Complex64>, b: &Mat<Complex64>, c: &Mat<Complex64>) -> Result<Mat<Complex64>> {
    let (p, q) = (a.rows(), b.rows());
    let mut y = Mat::zeros(p, q);
    for j in 0..q {
        let mut rhs: Vec<Complex64> = (0..p).map(|i| c[(i, j)]).collect();
        for l in 0..j {
            for i in 0..p {
                rhs[i] += y[(i, l)] * b[(l, j)];
            }
        }
        let beta = b[(j, j)];
        for i in (0..p).rev() {
            let mut acc = rhs[i];
            for l in i + 1..p {
                acc -= a[(i, l)] * y[(l, j)];
            }
            let d = a[(i, i)] - beta;
            if d.norm() == 0.0 {
                return Err(Error::Spectrum("clusters share an eigenvalue".into()));
            }
            y[(i, j)] = acc / d;
        }
    }
    Ok(y)
}

/// Best rational approximation with denominator at most `max_den`.
fn rationalize(x: f64, max_den: i64) -> Q {
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    Q::new(h1.into(), k1.into())
}

fn poly_eval<S: Scalar>(p: &[S], x: &S) -> S {
    p.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Divide by `(z - x)`; returns quotient and remainder.
fn deflate<S: Scalar>(p: &[S], x: &S) -> (Vec<S>, S) {
    let n = p.len() - 1;
    let mut qv = vec![S::zero(); n];
    let mut carry = S::zero();
    for i in (0..=n).rev() {
        let v = p[i].clone() + carry.clone() * x.clone();
        if i == 0 {
            return (qv, v);
        }
        qv[i - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

fn exact_path<S: Scalar>(a: &Mat<S>, opts: &SpectralOptions) -> Result<PathOut<S>> {
    let n = a.rows();
    let ac = a.to_c64();
    let (_, t) = schur(&ac);
    let diag: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = ac.max_abs().max(1.0);
    // defective eigenvalues scatter like eps^(1/m); try coarse cluster means first
    let mut candidates = Vec::new();
    for tol in [1e-3, opts.cluster_tol, 0.0] {
        for g in cluster_values(&diag, tol * scale) {
            candidates.push(mean(&diag, &g));
        }
    }
    let mut poly = a.char_poly();
    let mut found: Vec<(S, usize)> = Vec::new();
    for c in candidates {
        let guess = GaussRational::new(rationalize(c.re, 1_000_000), rationalize(c.im, 1_000_000));
        let lam = S::from_gauss(&guess);
        if !poly_eval(&poly, &lam).is_zero() || found.iter().any(|(l, _)| *l == lam) {
            continue;
        }
        let mut m = 0;
        loop {
            let (qv, r) = deflate(&poly, &lam);
            if !r.is_zero() {
                break;
            }
            poly = qv;
            m += 1;
        }
        found.push((lam, m));
    }
    let total: usize = found.iter().map(|f| f.1).sum();
    if total != n {
        return Err(Error::Spectrum(
            "exact mode needs every eigenvalue to be a Gaussian rational with denominator below 10^6".into(),
        ));
    }
    found.sort_by(|x, y| order_desc(&x.0, &y.0));
    let mut blocks = Vec::new();
    for (lam, m) in &found {
        let shifted = a - &Mat::identity(n).scale(lam);
        let basis = shifted.pow(*m as u32).nullspace(0.0);
        if basis.len() != *m {
            return Err(Error::Spectrum("generalized eigenspace has the wrong dimension".into()));
        }
        blocks.push(Mat::from_columns(n, &basis));
    }
    let v = Mat::hstack(&blocks);
    let (values, mults) = found.into_iter().unzip();
    Ok((values, mults, v, false))
}
