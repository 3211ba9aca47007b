//! Borcherds-identity reduction of four-point correlator symbols to a finite
//! basis, and the connection matrices of the resulting Fuchsian systems.
//!
//! A correlator symbol `F(θ, v, u, w)` stands for `⟨θ, 𝒴(v, x) 𝒴(u, y) w⟩`
//! (chain A) or `⟨θ, 𝒴(𝒴(v, x - y) u, y) w⟩` (chain B). Slots are numbered
//! 1 to 4 in that order. Both chains obey identities with the same
//! coefficients, so the engine is chain-agnostic and only tags its output.

mod borcherds;
mod coefficient;
mod connection;
mod reduce;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{size, FockModule, Partition, VoaElement};
use crate::scalar::Q;

pub use borcherds::{borcherds_expand, Slot};
pub use coefficient::Coefficient;
pub use connection::{
    connection_matrix, exponent_set, symbolic_connection, ConnectionMatrix, ConnectionOptions, DualBasis, ExponentSet,
    Ladder, SymbolicConnection,
};
pub use reduce::{derivative_recursion, LogFamily, Reducer, Reduction, TraceStep};

pub use crate::heisenberg::Chain;

/// Module interface used by the reducer. Vectors are finite maps from basis
/// labels to rational coefficients; dual vectors use the dual basis.
pub trait GradedModule: Clone + Debug + Send + Sync {
    type Label: Clone + Ord + Hash + Debug + Serialize + Send + Sync;
    type Generator: Clone + Ord + Debug + Send + Sync;

    fn grade(&self, l: &Self::Label) -> u32;
    fn cutoff(&self) -> u32;
    fn basis(&self, grade: u32) -> Vec<Self::Label>;
    /// `d(W)`: conformal weight of grade 0.
    fn weight_offset(&self) -> Q;
    fn generator_weight(&self, g: &Self::Generator) -> u32;
    /// Generator whose mode `0` is `L(-1)`.
    fn translation(&self) -> Self::Generator;
    /// `g_j` on a basis vector; errors past the grade cutoff.
    fn act(&self, g: &Self::Generator, j: i64, l: &Self::Label) -> Result<BTreeMap<Self::Label, Q>>;
    /// Transpose of `g_j` on a dual basis vector.
    fn act_dual(&self, g: &Self::Generator, j: i64, l: &Self::Label) -> Result<BTreeMap<Self::Label, Q>>;
    /// Basis of the chosen complement `P_W` of `C₁(W)`.
    fn complement(&self) -> Vec<Self::Label>;
    fn in_complement(&self, l: &Self::Label) -> bool;
    /// `l = Σ_i (g_i)_{-1} w_i`, for `l` outside the complement.
    fn c1_rewrite(&self, l: &Self::Label) -> Result<Vec<(Self::Generator, BTreeMap<Self::Label, Q>)>>;

    /// Enlargement `P̃_W`: the complement plus every basis vector of grade
    /// at most `extra`.
    fn enlargement(&self, extra: u32) -> Vec<Self::Label> {
        let mut out = self.complement();
        for g in 0..=extra.min(self.cutoff()) {
            for l in self.basis(g) {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out
    }
}

impl GradedModule for FockModule {
    type Label = Partition;
    type Generator = VoaElement;

    fn grade(&self, l: &Partition) -> u32 {
        size(l)
    }

    fn cutoff(&self) -> u32 {
        FockModule::cutoff(self)
    }

    fn basis(&self, grade: u32) -> Vec<Partition> {
        FockModule::basis(self, grade).to_vec()
    }

    fn weight_offset(&self) -> Q {
        self.lowest_weight()
    }

    fn generator_weight(&self, g: &VoaElement) -> u32 {
        g.weight()
    }

    fn translation(&self) -> VoaElement {
        VoaElement::Omega
    }

    fn act(&self, g: &VoaElement, j: i64, l: &Partition) -> Result<BTreeMap<Partition, Q>> {
        self.mode_action(g, j, l)
    }

    fn act_dual(&self, g: &VoaElement, j: i64, l: &Partition) -> Result<BTreeMap<Partition, Q>> {
        self.dual_mode(g, j, l)
    }

    fn complement(&self) -> Vec<Partition> {
        vec![vec![]]
    }

    fn in_complement(&self, l: &Partition) -> bool {
        l.is_empty()
    }

    fn c1_rewrite(&self, l: &Partition) -> Result<Vec<(VoaElement, BTreeMap<Partition, Q>)>> {
        FockModule::c1_rewrite(self, l)
            .map(|r| vec![r])
            .ok_or_else(|| Error::Reduction(format!("{l:?} lies in the complement")))
    }
}

/// `(θ, v, u, w)` with cached grades.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Quadruple<L> {
    pub theta: L,
    pub v: L,
    pub u: L,
    pub w: L,
    gr234: u32,
    gr: u32,
}

impl<L: Clone> Quadruple<L> {
    pub fn new<M: GradedModule<Label = L>>(mods: &[M; 4], theta: L, v: L, u: L, w: L) -> Self {
        let gr234 = mods[1].grade(&v) + mods[2].grade(&u) + mods[3].grade(&w);
        let gr = gr234 + mods[0].grade(&theta);
        Self { theta, v, u, w, gr234, gr }
    }

    /// `gr(v) + gr(u) + gr(w)`.
    pub fn gr234(&self) -> u32 {
        self.gr234
    }

    /// Total grade, including `θ`.
    pub fn grade(&self) -> u32 {
        self.gr
    }

    pub fn slot(&self, s: Slot) -> &L {
        match s {
            Slot::Dual => &self.theta,
            Slot::Left => &self.v,
            Slot::Middle => &self.u,
            Slot::Right => &self.w,
        }
    }

    pub fn with_slot<M: GradedModule<Label = L>>(&self, mods: &[M; 4], s: Slot, l: L) -> Self {
        let mut out = [self.theta.clone(), self.v.clone(), self.u.clone(), self.w.clone()];
        out[s.index()] = l;
        let [t, v, u, w] = out;
        Self::new(mods, t, v, u, w)
    }
}

/// Which normalization a combination refers to: the raw correlator `F`,
/// `G^{:y} = F · y^{gr²³⁴}`, or `G^{:x-y} = F · (x - y)^{gr²³⁴}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    F,
    Y,
    Xmy,
}

impl Normalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Self::F),
            "y" => Ok(Self::Y),
            "xmy" | "x-y" => Ok(Self::Xmy),
            _ => Err(Error::Parse(format!("unknown flavor '{s}' (expected y or xmy)"))),
        }
    }
}

/// One summand `coefficient · F_{h,k}(quad)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorTerm<L> {
    pub quad: Quadruple<L>,
    pub h: u32,
    pub k: u32,
    pub coefficient: Coefficient,
}

/// Finite combination of correlator symbols with Laurent-monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCombination<L: Ord> {
    pub normalization: Normalization,
    pub chain: Chain,
    pub terms: BTreeMap<(Quadruple<L>, u32, u32), Coefficient>,
}

impl<L: Clone + Ord + Debug + Serialize> LinearCombination<L> {
    pub fn new(normalization: Normalization, chain: Chain) -> Self {
        Self { normalization, chain, terms: BTreeMap::new() }
    }

    pub fn single(q: Quadruple<L>, normalization: Normalization, chain: Chain) -> Self {
        let mut out = Self::new(normalization, chain);
        out.add_term(q, 0, 0, Coefficient::one());
        out
    }

    pub fn add_term(&mut self, q: Quadruple<L>, h: u32, k: u32, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let key = (q, h, k);
        let slot = self.terms.entry(key.clone()).or_default();
        slot.add_assign(&c);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_terms(&self) -> Vec<CorrelatorTerm<L>> {
        self.terms
            .iter()
            .map(|((q, h, k), c)| CorrelatorTerm { quad: q.clone(), h: *h, k: *k, coefficient: c.clone() })
            .collect()
    }

    pub fn coefficient(&self, q: &Quadruple<L>) -> Coefficient {
        self.terms.get(&(q.clone(), 0, 0)).cloned().unwrap_or_default()
    }

    /// Change normalization of a combination expressing the correlator of
    /// `source` (with `gr²³⁴ = g`).
    pub fn renormalize(&self, g: u32, to: Normalization) -> Result<Self> {
        if self.normalization != Normalization::F {
            return Err(Error::Invalid("renormalize expects an F-normalized combination".into()));
        }
        let mut out = Self::new(to, self.chain);
        for ((q, h, k), c) in &self.terms {
            let shift = g as i64 - q.gr234() as i64;
            let c = match to {
                Normalization::F => c.clone(),
                Normalization::Y => c.times_monomial(0, shift, 0),
                Normalization::Xmy => c.times_monomial(0, 0, shift),
            };
            out.add_term(q.clone(), *h, *k, c);
        }
        Ok(out)
    }

    /// Runtime check of the coefficient ring: no negative powers of `y` in
    /// the `y` normalization, none of `x - y` in the `x - y` normalization.
    pub fn check_ring(&self) -> Result<()> {
        for ((q, _, _), c) in &self.terms {
            let bad = match self.normalization {
                Normalization::F => false,
                Normalization::Y => c.min_exponents()[1] < 0,
                Normalization::Xmy => c.min_exponents()[2] < 0,
            };
            if bad {
                return Err(Error::Reduction(format!(
                    "coefficient {c} of {q:?} leaves the {:?} coefficient ring",
                    self.normalization
                )));
            }
        }
        Ok(())
    }

    /// Coefficients modulo the small variable of the normalization: keeps the
    /// monomials with zero `y` (resp. `x - y`) exponent.
    pub fn constant_part(&self) -> BTreeMap<Quadruple<L>, Coefficient> {
        let axis = match self.normalization {
            Normalization::Y => 1,
            _ => 2,
        };
        let mut out = BTreeMap::new();
        for ((q, _, _), c) in &self.terms {
            let r = c.restrict(axis, 0);
            if !r.is_zero() {
                out.insert(q.clone(), r);
            }
        }
        out
    }

    pub fn to_json(&self) -> CombinationJson<L> {
        CombinationJson {
            normalization: self.normalization,
            chain: match self.chain {
                Chain::A => "A".into(),
                Chain::B => "B".into(),
            },
            terms: self
                .terms
                .iter()
                .map(|((q, h, k), c)| TermJson {
                    theta: q.theta.clone(),
                    v: q.v.clone(),
                    u: q.u.clone(),
                    w: q.w.clone(),
                    h: *h,
                    k: *k,
                    coefficient: c.to_json(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinationJson<L> {
    pub normalization: Normalization,
    pub chain: String,
    pub terms: Vec<TermJson<L>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermJson<L> {
    pub theta: L,
    pub v: L,
    pub u: L,
    pub w: L,
    pub h: u32,
    pub k: u32,
    /// Entries `[x exponent, y exponent, (x-y) exponent, "p/q"]`.
    pub coefficient: Vec<(i64, i64, i64, String)>,
}

/// Quadruple input as read from JSON: four partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrupleJson {
    pub theta: Partition,
    pub v: Partition,
    pub u: Partition,
    pub w: Partition,
}

impl QuadrupleJson {
    pub fn build<M: GradedModule<Label = Partition>>(&self, mods: &[M; 4]) -> Quadruple<Partition> {
        let sort = |p: &Partition| {
            let mut p = p.clone();
            p.sort_unstable_by(|a, b| b.cmp(a));
            p
        };
        Quadruple::new(mods, sort(&self.theta), sort(&self.v), sort(&self.u), sort(&self.w))
    }
}

/// The four modules of the testbed: `F_{a+b+c}` (dual slot), `F_a`, `F_b`, `F_c`.
pub fn fock_modules(momenta: &[Q; 3], cutoff: u32) -> [FockModule; 4] {
    let [a, b, c] = momenta;
    [
        FockModule::new(a + b + c, cutoff),
        FockModule::new(a.clone(), cutoff),
        FockModule::new(b.clone(), cutoff),
        FockModule::new(c.clone(), cutoff),
    ]
}
