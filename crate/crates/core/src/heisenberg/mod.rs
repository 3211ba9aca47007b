//! Rank-one free boson testbed.
//!
//! Fock modules `F_p` have the unnormalized monomial basis
//! `a_{-λ_1} ⋯ a_{-λ_r} |p⟩` indexed by partitions, so `a_n` for `n > 0`
//! acts as `n ∂/∂a_{-n}` and dual basis vectors are plain coordinates.

mod correlator;
mod intertwiner;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binom_int, parse_q, q, qi, Q};

pub use correlator::{basis_correlator, closed_form_4pt, closed_form_5pt, Chain, ChainSeries, FourPoint, ModeSum};
pub use intertwiner::{AxiomReport, Intertwiner};

/// Weakly decreasing list of positive parts.
pub type Partition = Vec<u32>;

/// Finite linear combination of basis vectors (or of dual basis vectors).
pub type FockVector = BTreeMap<Partition, Q>;

pub fn size(p: &[u32]) -> u32 {
    p.iter().sum()
}

pub fn multiplicity(p: &[u32], n: u32) -> u32 {
    p.iter().filter(|&&x| x == n).count() as u32
}

/// `λ ∪ {n}`, kept sorted.
pub fn add_part(p: &[u32], n: u32) -> Partition {
    let mut out = p.to_vec();
    let pos = out.iter().position(|&x| x < n).unwrap_or(out.len());
    out.insert(pos, n);
    out
}

/// `λ ∖ {n}` when `n` is a part.
pub fn remove_part(p: &[u32], n: u32) -> Option<Partition> {
    let pos = p.iter().position(|&x| x == n)?;
    let mut out = p.to_vec();
    out.remove(pos);
    Some(out)
}

/// All partitions of `n`, largest parts first.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(rest)).rev() {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn basis_vector(p: Partition) -> FockVector {
    BTreeMap::from([(p, qi(1))])
}

fn push(v: &mut FockVector, p: Partition, c: Q) {
    if c == qi(0) {
        return;
    }
    let slot = v.entry(p.clone()).or_insert_with(|| qi(0));
    *slot += c;
    if *slot == qi(0) {
        v.remove(&p);
    }
}

/// Elements of the Heisenberg vertex algebra `F_0` whose modes the engine uses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VoaElement {
    Vacuum,
    /// `a_{-k} 𝟙`, `k ≥ 1`; `Heis(1)` is the generating field.
    Heis(u32),
    /// Conformal vector `½ a_{-1}² 𝟙`, so `ω_n = L(n-1)`.
    Omega,
}

impl VoaElement {
    pub fn weight(&self) -> u32 {
        match self {
            VoaElement::Vacuum => 0,
            VoaElement::Heis(k) => *k,
            VoaElement::Omega => 2,
        }
    }

    /// The element as a vector of `F_0`.
    pub fn state(&self) -> FockVector {
        match self {
            VoaElement::Vacuum => basis_vector(vec![]),
            VoaElement::Heis(k) => basis_vector(vec![*k]),
            VoaElement::Omega => BTreeMap::from([(vec![1, 1], q(1, 2))]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModuleConfig {
    Fock { momentum: String, grade_cutoff: u32 },
}

impl ModuleConfig {
    pub fn build(&self) -> Result<FockModule> {
        match self {
            ModuleConfig::Fock { momentum, grade_cutoff } => Ok(FockModule::new(parse_q(momentum)?, *grade_cutoff)),
        }
    }
}

/// Highest-weight Fock module `F_p` truncated at `grade_cutoff`.
#[derive(Clone, Debug)]
pub struct FockModule {
    momentum: Q,
    cutoff: u32,
    basis: Vec<Vec<Partition>>,
}

impl PartialEq for FockModule {
    fn eq(&self, other: &Self) -> bool {
        self.momentum == other.momentum && self.cutoff == other.cutoff
    }
}

impl FockModule {
    pub fn new(momentum: Q, cutoff: u32) -> Self {
        Self { momentum, cutoff, basis: (0..=cutoff).map(partitions).collect() }
    }

    pub fn momentum(&self) -> &Q {
        &self.momentum
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn config(&self) -> ModuleConfig {
        ModuleConfig::Fock { momentum: self.momentum.to_string(), grade_cutoff: self.cutoff }
    }

    /// Conformal weight of the highest-weight vector, `p²/2`.
    pub fn lowest_weight(&self) -> Q {
        &self.momentum * &self.momentum / qi(2)
    }

    pub fn weight(&self, p: &[u32]) -> Q {
        self.lowest_weight() + qi(size(p) as i64)
    }

    pub fn dim(&self, grade: u32) -> usize {
        self.basis.get(grade as usize).map_or(0, Vec::len)
    }

    pub fn basis(&self, grade: u32) -> &[Partition] {
        self.basis.get(grade as usize).map_or(&[], Vec::as_slice)
    }

    /// Oscillator `a_n` on a basis vector, without cutoff checks.
    pub fn osc(&self, n: i64, p: &[u32]) -> Option<(Partition, Q)> {
        match n {
            0 if self.momentum == qi(0) => None,
            0 => Some((p.to_vec(), self.momentum.clone())),
            n if n > 0 => {
                let m = multiplicity(p, n as u32);
                remove_part(p, n as u32).map(|r| (r, qi(n * m as i64)))
            }
            n => Some((add_part(p, (-n) as u32), qi(1))),
        }
    }

    pub fn apply_osc(&self, n: i64, v: &FockVector) -> FockVector {
        let mut out = BTreeMap::new();
        for (p, c) in v {
            if let Some((r, s)) = self.osc(n, p) {
                push(&mut out, r, c * s);
            }
        }
        out
    }

    /// `L(n) = ½ Σ :a_{n-r} a_r:`.
    pub fn apply_virasoro(&self, n: i64, v: &FockVector) -> FockVector {
        let mut out = BTreeMap::new();
        let top = v.keys().map(|p| size(p) as i64).max().unwrap_or(0);
        // pairs (i, j), i + j = n, i < j; annihilator a_j applied first
        let lo = n.div_euclid(2) + 1;
        for j in lo..=top.max(0) {
            let i = n - j;
            let w = self.apply_osc(i, &self.apply_osc(j, v));
            for (p, c) in w {
                push(&mut out, p, c);
            }
        }
        if n % 2 == 0 {
            let w = self.apply_osc(n / 2, &self.apply_osc(n / 2, v));
            for (p, c) in w {
                push(&mut out, p, c / qi(2));
            }
        }
        out
    }

    /// `α_j` on a vector; the result may exceed the cutoff.
    pub fn act(&self, alpha: &VoaElement, j: i64, v: &FockVector) -> FockVector {
        match alpha {
            VoaElement::Vacuum if j == -1 => v.clone(),
            VoaElement::Vacuum => BTreeMap::new(),
            VoaElement::Heis(k) => {
                let k = *k as i64;
                let c = binom_int(k - 2 - j, (k - 1) as u32);
                if c == qi(0) {
                    return BTreeMap::new();
                }
                self.apply_osc(j - k + 1, v).into_iter().map(|(p, x)| (p, x * &c)).collect()
            }
            VoaElement::Omega => self.apply_virasoro(j - 1, v),
        }
    }

    /// Grade-checked mode action on a basis vector.
    pub fn mode_action(&self, alpha: &VoaElement, j: i64, p: &[u32]) -> Result<FockVector> {
        let target = size(p) as i64 + alpha.weight() as i64 - j - 1;
        if target > self.cutoff as i64 {
            return Err(Error::Cutoff { cutoff: self.cutoff, needed: target as u32 });
        }
        Ok(self.act(alpha, j, &basis_vector(p.to_vec())))
    }

    /// Transpose of `α_j` on the dual basis vector `θ*`:
    /// `(α_j)ᵀ θ* = Σ_ν ⟨θ*, α_j ν⟩ ν*`.
    pub fn dual_mode(&self, alpha: &VoaElement, j: i64, theta: &[u32]) -> Result<FockVector> {
        let g = size(theta) as i64 - (alpha.weight() as i64 - j - 1);
        if g < 0 {
            return Ok(BTreeMap::new());
        }
        if let VoaElement::Heis(1) = alpha {
            let mut out = BTreeMap::new();
            match j {
                0 => push(&mut out, theta.to_vec(), self.momentum.clone()),
                j if j < 0 => {
                    if let Some(r) = remove_part(theta, (-j) as u32) {
                        push(&mut out, r, qi(1));
                    }
                }
                j => {
                    let m = multiplicity(theta, j as u32) as i64;
                    push(&mut out, add_part(theta, j as u32), qi(j * (m + 1)));
                }
            }
            return Ok(out);
        }
        if g > self.cutoff as i64 {
            return Err(Error::Cutoff { cutoff: self.cutoff, needed: g as u32 });
        }
        let mut out = BTreeMap::new();
        for nu in self.basis(g as u32) {
            let img = self.act(alpha, j, &basis_vector(nu.clone()));
            if let Some(c) = img.get(theta) {
                push(&mut out, nu.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Write a non-highest-weight basis vector as `α_{-1}` of a lower one:
    /// `a_{-k} ν = (a_{-k}𝟙)_{-1} ν` with `k` the largest part.
    pub fn c1_rewrite(&self, p: &[u32]) -> Option<(VoaElement, FockVector)> {
        let k = *p.first()?;
        Some((VoaElement::Heis(k), basis_vector(p[1..].to_vec())))
    }
}

/// `p(n)` for `n ≤ 12`, from the generating function `Π 1/(1-qⁿ)`.
pub fn partition_count(n: u32) -> u64 {
    let mut c = vec![0u64; n as usize + 1];
    c[0] = 1;
    for k in 1..=n as usize {
        for m in k..=n as usize {
            c[m] += c[m - k];
        }
    }
    c[n as usize]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_are_sorted_and_counted() {
        assert_eq!(partitions(4), vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
        assert_eq!(partitions(0), vec![Vec::<u32>::new()]);
        assert_eq!(partitions(12).len(), 77);
    }

    #[test]
    fn heisenberg_commutator_on_basis() {
        let f = FockModule::new(q(1, 2), 8);
        let v = basis_vector(vec![3, 1, 1]);
        for m in -3i64..=3 {
            for n in -3i64..=3 {
                let lhs = f.apply_osc(m, &f.apply_osc(n, &v));
                let rhs = f.apply_osc(n, &f.apply_osc(m, &v));
                let mut diff = lhs;
                for (p, c) in rhs {
                    push(&mut diff, p, -c);
                }
                let want = if m + n == 0 && m != 0 { v.iter().map(|(p, c)| (p.clone(), c * qi(m))).collect() } else { BTreeMap::new() };
                assert_eq!(diff, want, "[a_{m}, a_{n}]");
            }
        }
    }
}
