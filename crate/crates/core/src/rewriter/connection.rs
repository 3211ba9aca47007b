//! Connection matrices `Λ³⁴(x₀, y)` (in `y`) and `Λ²³(x, y₀)` (in `x - y₀`).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Chain, Coefficient, GradedModule, LinearCombination, Normalization, Quadruple, Reducer, Slot};
use crate::error::{Error, Result};
use crate::fuchsian::{spectral, MatrixSeries, SpectralOptions};
use crate::mat::Mat;
use crate::scalar::{binom_int, on_branch_cut, qi, GaussRational, Scalar};

/// Alternative homogeneous basis of the dual window: within each dual grade
/// the new basis is `T θ` for a random unit lower-triangular integer `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualBasis {
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionOptions {
    /// Dual-grade window `N`.
    pub n: u32,
    /// Series order `M`.
    pub order: usize,
    /// `P̃` of `A`, `B`, `C`: the complement plus basis vectors up to this grade.
    pub tilde: [u32; 3],
    pub dual_basis: Option<DualBasis>,
}

impl Default for ConnectionOptions {
    fn default() -> Self {
        Self { n: 4, order: 24, tilde: [0; 3], dual_basis: None }
    }
}

/// `Λ` together with its row/column labels.
#[derive(Clone, Debug)]
pub struct ConnectionMatrix<S, L> {
    pub normalization: Normalization,
    pub index: Vec<Quadruple<L>>,
    /// Whether each index lies in `𝒥⁰_N`.
    pub basis_mask: Vec<bool>,
    pub series: MatrixSeries<S>,
}

impl<S: Scalar, L: PartialEq> ConnectionMatrix<S, L> {
    pub fn position(&self, q: &Quadruple<L>) -> Option<usize> {
        self.index.iter().position(|p| p == q)
    }

    pub fn constant_term(&self) -> Mat<S> {
        self.series.coeff(0)
    }
}

fn spow<S: Scalar>(b: &S, k: i64) -> S {
    let mut out = S::one();
    for _ in 0..k.unsigned_abs() {
        out = out * b.clone();
    }
    if k < 0 {
        S::one() / out
    } else {
        out
    }
}

/// Taylor coefficients of a `Λ` entry around the base point, up to `order`.
fn expand_entry<S: Scalar>(c: &Coefficient, norm: Normalization, base: &S, order: usize) -> Result<Vec<S>> {
    let mut out = vec![S::zero(); order + 1];
    for (m, q) in c.terms() {
        let [p, yq, e] = *m;
        let cq = S::from_q(q);
        match norm {
            // x = y₀ + t, y = y₀, x - y = t
            Normalization::Xmy => {
                if e < 0 {
                    return Err(Error::Reduction(format!("negative power of x - y in {c}")));
                }
                let pre = cq * spow(base, yq);
                for j in 0..=order.saturating_sub(e as usize) {
                    let k = j + e as usize;
                    if k > order {
                        break;
                    }
                    let b = S::from_q(&binom_int(p, j as u32));
                    if b.is_zero() {
                        continue;
                    }
                    out[k] = out[k].clone() + pre.clone() * b * spow(base, p - j as i64);
                }
            }
            // x = x₀, series in y
            Normalization::Y => {
                if yq < 0 {
                    return Err(Error::Reduction(format!("negative power of y in {c}")));
                }
                let pre = cq * spow(base, p + e);
                for j in 0..=order.saturating_sub(yq as usize) {
                    let k = j + yq as usize;
                    if k > order {
                        break;
                    }
                    let b = S::from_q(&(binom_int(e, j as u32) * if j % 2 == 0 { qi(1) } else { qi(-1) }));
                    if b.is_zero() {
                        continue;
                    }
                    out[k] = out[k].clone() + pre.clone() * b * spow(base, -(j as i64));
                }
            }
            Normalization::F => return Err(Error::Invalid("connection matrices use the y or x-y normalization".into())),
        }
    }
    Ok(out)
}

fn dual_transform(dim: usize, rng: &mut ChaCha8Rng) -> Mat<GaussRational> {
    Mat::from_fn(dim, dim, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => GaussRational::one(),
        std::cmp::Ordering::Greater => GaussRational::from_i64(rng.gen_range(-2..=2)),
        std::cmp::Ordering::Less => GaussRational::zero(),
    })
}

/// Rows of `Λ` as exact polynomials in `x`, `y`, `x - y`, before expansion
/// around a base point. Reusable across base points.
#[derive(Clone, Debug)]
pub struct SymbolicConnection<L> {
    pub normalization: Normalization,
    pub index: Vec<Quadruple<L>>,
    pub basis_mask: Vec<bool>,
    /// `rows[i]` maps a column to its entry.
    pub rows: Vec<BTreeMap<usize, Coefficient>>,
    /// Block-diagonal change of dual basis, if requested.
    transform: Option<Mat<GaussRational>>,
}

/// Reduce the rows of `Λ` for `norm = Xmy` (`Λ²³(x, y₀)`) or `norm = Y`
/// (`Λ³⁴(x₀, y)`).
///
/// Row `ξ` encodes `(x-y)∂_x G(ξ) = (x-y)^{g+1} F(L(-1)v …) + g G(ξ)` (resp.
/// `y∂_y` with `L(-1)` on `u`), reduced to `𝒥⁰_N`; columns outside `𝒥⁰_N` vanish.
pub fn symbolic_connection<M: GradedModule>(
    red: &Reducer<M>,
    norm: Normalization,
    opts: &ConnectionOptions,
) -> Result<SymbolicConnection<M::Label>> {
    let slot = match norm {
        Normalization::Xmy => Slot::Left,
        Normalization::Y => Slot::Middle,
        Normalization::F => return Err(Error::Invalid("connection matrices use the y or x-y normalization".into())),
    };
    let mods = &red.mods;
    let n = opts.n.min(red.n);
    let thetas: Vec<M::Label> = (0..=n).flat_map(|g| mods[0].basis(g)).collect();
    let tv = mods[1].enlargement(opts.tilde[0]);
    let tu = mods[2].enlargement(opts.tilde[1]);
    let tw = mods[3].enlargement(opts.tilde[2]);
    let mut index = Vec::new();
    for v in &tv {
        for u in &tu {
            for w in &tw {
                for t in &thetas {
                    index.push(Quadruple::new(mods, t.clone(), v.clone(), u.clone(), w.clone()));
                }
            }
        }
    }
    let basis_mask: Vec<bool> = index.iter().map(|q| red.is_basis(q)).collect();
    let mut rows = Vec::with_capacity(index.len());
    for xi in &index {
        let g = xi.gr234();
        let deriv = red.derivative(xi, slot, Chain::A)?.combination.renormalize(g + 1, norm)?;
        let own = red
            .reduce_combination(&LinearCombination::single(xi.clone(), Normalization::F, Chain::A))?
            .combination
            .renormalize(g, norm)?;
        let mut entries: BTreeMap<usize, Coefficient> = BTreeMap::new();
        for (lc, scale) in [(&deriv, qi(1)), (&own, qi(g as i64))] {
            lc.check_ring()?;
            for ((q, _, _), c) in &lc.terms {
                let col = index
                    .iter()
                    .position(|p| p == q)
                    .ok_or_else(|| Error::Reduction(format!("basis quadruple {q:?} missing from the index")))?;
                entries.entry(col).or_default().add_assign(&c.scale(&scale));
            }
        }
        entries.retain(|_, c| !c.is_zero());
        rows.push(entries);
    }
    let transform = opts.dual_basis.map(|db| {
        let r = index.len();
        let mut rng = ChaCha8Rng::seed_from_u64(db.seed);
        // block-diagonal T over groups of equal (v, u, w) and dual grade
        let mut t = Mat::<GaussRational>::identity(r);
        let key = |q: &Quadruple<M::Label>| (q.v.clone(), q.u.clone(), q.w.clone(), mods[0].grade(&q.theta));
        let mut start = 0;
        while start < r {
            let k0 = key(&index[start]);
            let mut end = start;
            while end < r && key(&index[end]) == k0 {
                end += 1;
            }
            t.set_block(start, start, &dual_transform(end - start, &mut rng));
            start = end;
        }
        t
    });
    Ok(SymbolicConnection { normalization: norm, index, basis_mask, rows, transform })
}

impl<L: Clone> SymbolicConnection<L> {
    /// Expand around `base`: `y₀` for `Xmy` (series in `x - y₀`), `x₀` for `Y`
    /// (series in `y`).
    pub fn expand<S: Scalar>(&self, base: S, order: usize) -> Result<ConnectionMatrix<S, L>> {
        if base.is_zero() || on_branch_cut(base.to_c64()) {
            return Err(Error::BranchCut(format!("base point {:?}", base.to_c64())));
        }
        let norm = self.normalization;
        let r = self.index.len();
        let mut coeffs = vec![Mat::<S>::zeros(r, r); order + 1];
        for (row, entries) in self.rows.iter().enumerate() {
            for (&col, c) in entries {
                for (k, v) in expand_entry(c, norm, &base, order)?.into_iter().enumerate() {
                    coeffs[k][(row, col)] = v;
                }
            }
        }
        if let Some(t) = &self.transform {
            let ts: Mat<S> = t.map(S::from_gauss);
            let ti = ts.inverse()?;
            for c in coeffs.iter_mut() {
                *c = &(&ts * &*c) * &ti;
            }
        }
        let radius = base.to_c64().norm();
        let z0 = match norm {
            Normalization::Xmy => base,
            _ => S::zero(),
        };
        Ok(ConnectionMatrix {
            normalization: norm,
            index: self.index.clone(),
            basis_mask: self.basis_mask.clone(),
            series: MatrixSeries::new(coeffs, z0, radius)?,
        })
    }
}

/// [`symbolic_connection`] expanded at `base` to `opts.order`.
pub fn connection_matrix<M: GradedModule, S: Scalar>(
    red: &Reducer<M>,
    norm: Normalization,
    base: S,
    opts: &ConnectionOptions,
) -> Result<ConnectionMatrix<S, M::Label>> {
    if base.is_zero() || on_branch_cut(base.to_c64()) {
        return Err(Error::BranchCut(format!("base point {:?}", base.to_c64())));
    }
    symbolic_connection(red, norm, opts)?.expand(base, opts.order)
}

/// Eigenvalues of a constant term, grouped into integer ladders.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentSet {
    pub eigenvalues: Vec<Complex64>,
    pub ladders: Vec<Ladder>,
}

/// `base + offsets`, `base` having the smallest real part of its class.
#[derive(Clone, Debug, PartialEq)]
pub struct Ladder {
    pub base: Complex64,
    pub offsets: Vec<i64>,
}

impl ExponentSet {
    /// Some eigenvalue differs from `value` by an integer, within `tol`.
    pub fn contains_mod_z(&self, value: Complex64, tol: f64) -> bool {
        self.eigenvalues.iter().any(|e| {
            let d = e - value;
            (d.re - d.re.round()).abs() <= tol && d.im.abs() <= tol
        })
    }

    /// Eigenvalues of modulus above `tol`, sorted by real then imaginary part.
    pub fn nonzero(&self, tol: f64) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.eigenvalues.iter().copied().filter(|e| e.norm() > tol).collect();
        out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        out
    }
}

/// `Δ′`: the spectrum of `Λ(0)` organized by classes modulo `ℤ`.
pub fn exponent_set<S: Scalar>(lambda0: &Mat<S>) -> Result<ExponentSet> {
    let sp = spectral(lambda0, &SpectralOptions::default())?;
    let mut eigenvalues = Vec::new();
    let mut ladders: Vec<Ladder> =
        sp.class_reps.iter().map(|b| Ladder { base: b.to_c64(), offsets: Vec::new() }).collect();
    for cl in &sp.clusters {
        for _ in 0..cl.mult {
            eigenvalues.push(cl.eigenvalue.to_c64());
        }
        let lad = &mut ladders[cl.class];
        if !lad.offsets.contains(&cl.offset) {
            lad.offsets.push(cl.offset);
        }
    }
    for l in &mut ladders {
        l.offsets.sort_unstable();
    }
    Ok(ExponentSet { eigenvalues, ladders })
}
