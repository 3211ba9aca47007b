//! Log-power fundamental solutions `Y = Δ · z^L · z^{B(1) - L}`.

use super::levelt::{to_levelt, LeveltOptions, LeveltSystem};
use super::{FundamentalSolutionSet, MatrixSeries};
use crate::error::{Error, Result};
use crate::logseries::{LogPowerSeries, DEFAULT_K_MAX};
use crate::mat::Mat;
use crate::scalar::{factorial_q, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Series order `M`: coefficients up to `z^{class minimum + M}` are computed.
    pub order: usize,
    pub levelt: LeveltOptions,
}

impl SolveOptions {
    pub fn with_order(order: usize) -> Self {
        Self { order, levelt: LeveltOptions::default() }
    }
}

/// Fundamental solution of `z Y' = A Y`. Every column lies in a single
/// exponent class `d + ℤ`, with log powers below the class size.
pub fn fuchsian_solve<S: Scalar>(a: &MatrixSeries<S>, opts: &SolveOptions) -> Result<FundamentalSolutionSet<S>> {
    let m = opts.order;
    let lv = to_levelt(&a.truncate(m), &opts.levelt)?;
    solve_from_levelt(&lv, m)
}

pub(crate) fn solve_from_levelt<S: Scalar>(lv: &LeveltSystem<S>, m: usize) -> Result<FundamentalSolutionSet<S>> {
    let sp = &lv.spectral;
    let n = sp.dim();
    for cl in &sp.clusters {
        if cl.offset as usize > m {
            return Err(Error::Cutoff { cutoff: m as u32, needed: cl.offset as u32 });
        }
    }
    let euler = lv.euler_matrix_in_basis();
    let vd: Vec<Mat<S>> = (0..=m).map(|k| &sp.v * &lv.delta_in_basis(k)).collect();

    let mut columns = Vec::with_capacity(n);
    let mut exponents = Vec::with_capacity(n);
    for q in 0..n {
        let cq = sp.cluster_of(q);
        let class = cq.class;
        let rep = sp.class_reps[class].clone();
        let idx: Vec<usize> =
            sp.clusters.iter().filter(|c| c.class == class).flat_map(|c| c.range()).collect();
        let mu = rep.clone() - S::from_i64(rep.re_floor());
        let local = euler.sub_matrix(&idx, &idx);
        let nil = &local - &Mat::identity(idx.len()).scale(&mu);
        let mut u: Vec<S> = idx.iter().map(|&p| if p == q { S::one() } else { S::zero() }).collect();
        let mut logs: Vec<Vec<S>> = Vec::new();
        for t in 0..idx.len() as u32 {
            let fact = S::from_q(&factorial_q(t));
            logs.push(u.iter().map(|x| x.clone() / fact.clone()).collect());
            u = nil.mul_vec(&u);
            if u.iter().all(|x| x.is_zero()) {
                break;
            }
        }
        let mut raw: Vec<Vec<(S, u32, S)>> = vec![Vec::new(); n];
        for (pos, &p) in idx.iter().enumerate() {
            let cp = sp.cluster_of(p);
            let off = cp.offset as usize;
            for (t, coeffs) in logs.iter().enumerate() {
                let up = &coeffs[pos];
                if up.is_zero() {
                    continue;
                }
                for (k, vdk) in vd.iter().enumerate().take(m - off + 1) {
                    let e = cp.eigenvalue.clone() + S::from_i64(k as i64);
                    for (i, comp) in raw.iter_mut().enumerate() {
                        let c = vdk[(i, p)].clone();
                        if !c.is_zero() {
                            comp.push((e.clone(), t as u32, c * up.clone()));
                        }
                    }
                }
            }
        }
        let k_max = (idx.len() as u32).max(DEFAULT_K_MAX);
        columns.push(raw.into_iter().map(|terms| LogPowerSeries::from_terms("z", terms, m as u32, k_max)).collect());
        exponents.push(cq.eigenvalue.clone());
    }
    Ok(FundamentalSolutionSet { columns, exponents, order: m as u32, z0: lv.b.z0().clone() })
}

/// Largest coefficient of `z Y' - A Y` inside each column's reliable window.
pub fn residual<S: Scalar>(a: &MatrixSeries<S>, y: &FundamentalSolutionSet<S>) -> f64 {
    let order = y.order;
    let cap = order + a.order() as u32 + 8;
    let mut worst: f64 = 0.0;
    for (c, col) in y.columns.iter().enumerate() {
        let anchor = y.anchor(c);
        let wide: Vec<LogPowerSeries<S>> = col.iter().map(|s| s.with_caps(cap, s.k_max())).collect();
        for i in 0..a.size() {
            let mut r = wide[i].euler_derive();
            for (k, ak) in a.coeffs().iter().enumerate() {
                if k > order as usize {
                    break;
                }
                for (j, yj) in wide.iter().enumerate() {
                    let coef = &ak[(i, j)];
                    if coef.is_zero() || yj.is_zero() {
                        continue;
                    }
                    let term = yj.shift(&S::from_i64(k as i64)).scale(coef);
                    r = r.sub(&term).expect("same variable");
                }
            }
            worst = worst.max(r.max_abs_upto(&anchor, order as i64));
        }
    }
    worst
}

/// `max_{i,t} |coefficient of z^{anchor + k} log^t z in column c|^{1/k}`.
pub fn coefficient_growth<S: Scalar>(y: &FundamentalSolutionSet<S>, c: usize, k: u32) -> f64 {
    let e = y.anchor(c) + S::from_i64(k as i64);
    let mut best: f64 = 0.0;
    for comp in &y.columns[c] {
        for t in 0..=comp.max_log_power() {
            best = best.max(comp.coeff(&e, t).magnitude());
        }
    }
    best.powf(1.0 / k as f64)
}
