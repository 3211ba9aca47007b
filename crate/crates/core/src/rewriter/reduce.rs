//! Iterated `n = -1` reductions down to the basis quadruples.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use super::{borcherds_expand, Chain, Coefficient, GradedModule, LinearCombination, Normalization, Quadruple, Slot};
use crate::error::{Error, Result};
use crate::logseries::MonomialSeries2;
use crate::scalar::{GaussRational, Scalar};

/// One rewrite: a quadruple of total grade `grade` replaced through the
/// identity of `slot` by quadruples of the listed grades.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub grade: u32,
    pub slot: Slot,
    pub produced: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Reduction<L: Ord> {
    pub combination: LinearCombination<L>,
    pub trace: Vec<TraceStep>,
}

/// Reduction engine over four modules: the dual slot first, then `A`, `B`, `C`.
#[derive(Clone, Debug)]
pub struct Reducer<M: GradedModule> {
    pub mods: [M; 4],
    /// Dual-grade window `N`.
    pub n: u32,
}

type Key<L> = (u32, Reverse<Slot>, Quadruple<L>);

impl<M: GradedModule> Reducer<M> {
    pub fn new(mods: [M; 4], n: u32) -> Self {
        Self { mods, n }
    }

    pub fn quadruple(&self, theta: M::Label, v: M::Label, u: M::Label, w: M::Label) -> Quadruple<M::Label> {
        Quadruple::new(&self.mods, theta, v, u, w)
    }

    /// First slot among 2, 3, 4 outside the complement.
    pub fn open_slot(&self, q: &Quadruple<M::Label>) -> Option<Slot> {
        [Slot::Left, Slot::Middle, Slot::Right].into_iter().find(|&s| !self.mods[s.index()].in_complement(q.slot(s)))
    }

    pub fn is_basis(&self, q: &Quadruple<M::Label>) -> bool {
        self.open_slot(q).is_none()
    }

    /// Expand the correlator of `q` once, through the `C₁` rewrite of its
    /// first open slot and the `n = -1` identity of that slot.
    pub fn step(&self, q: &Quadruple<M::Label>, chain: Chain) -> Result<(Slot, LinearCombination<M::Label>)> {
        let slot = self.open_slot(q).ok_or_else(|| Error::Reduction("quadruple is already basic".into()))?;
        let m = &self.mods[slot.index()];
        let mut out = LinearCombination::new(Normalization::F, chain);
        for (alpha, lower) in m.c1_rewrite(q.slot(slot))? {
            for (lab, c) in lower {
                let base = q.with_slot(&self.mods, slot, lab);
                let part = borcherds_expand(&self.mods, slot, -1, &alpha, &base, chain)?;
                for ((p, h, k), cf) in part.terms {
                    out.add_term(p, h, k, cf.scale(&c));
                }
            }
        }
        Ok((slot, out))
    }

    /// Reduce a combination of correlators (`F`-normalized) to basis quadruples,
    /// always expanding the highest total grade first.
    pub fn reduce_combination(&self, input: &LinearCombination<M::Label>) -> Result<Reduction<M::Label>> {
        let chain = input.chain;
        let mut queue: BTreeMap<Key<M::Label>, Coefficient> = BTreeMap::new();
        let mut done = LinearCombination::new(Normalization::F, chain);
        let mut trace = Vec::new();
        let enqueue = |queue: &mut BTreeMap<Key<M::Label>, Coefficient>,
                           done: &mut LinearCombination<M::Label>,
                           q: Quadruple<M::Label>,
                           c: Coefficient|
         -> Result<()> {
            if self.mods[0].grade(&q.theta) > self.n {
                return Err(Error::Reduction(format!("dual grade of {q:?} exceeds N = {}", self.n)));
            }
            match self.open_slot(&q) {
                None => done.add_term(q, 0, 0, c),
                Some(s) => {
                    let slot = queue.entry((q.grade(), Reverse(s), q.clone())).or_default();
                    slot.add_assign(&c);
                    if slot.is_zero() {
                        queue.remove(&(q.grade(), Reverse(s), q));
                    }
                }
            }
            Ok(())
        };
        for ((q, h, k), c) in &input.terms {
            if *h != 0 || *k != 0 {
                return Err(Error::Reduction("log-indexed symbols need a logarithmic module".into()));
            }
            enqueue(&mut queue, &mut done, q.clone(), c.clone())?;
        }
        while let Some(((grade, _, q), c)) = queue.pop_last() {
            let (slot, part) = self.step(&q, chain)?;
            let produced: Vec<u32> = part.terms.keys().map(|(p, _, _)| p.grade()).collect();
            if let Some(bad) = produced.iter().find(|&&g| g >= grade) {
                return Err(Error::Reduction(format!("total grade did not decrease: {grade} -> {bad} at {q:?}")));
            }
            trace.push(TraceStep { grade, slot, produced });
            for ((p, _, _), cf) in part.terms {
                enqueue(&mut queue, &mut done, p, cf.mul(&c))?;
            }
        }
        Ok(Reduction { combination: done, trace })
    }

    /// Express the correlator of `q` over basis quadruples, in normalization `norm`.
    pub fn reduce_to_basis(&self, q: &Quadruple<M::Label>, norm: Normalization, chain: Chain) -> Result<Reduction<M::Label>> {
        let input = LinearCombination::single(q.clone(), Normalization::F, chain);
        let mut red = self.reduce_combination(&input)?;
        red.combination = red.combination.renormalize(q.gr234(), norm)?;
        red.combination.check_ring()?;
        Ok(red)
    }

    /// `L(-1)` applied in `slot` (2 or 3) and reduced: by the derivative
    /// property this is `∂_x F(q)` for slot 2 and `∂_y F(q)` for slot 3.
    pub fn derivative(&self, q: &Quadruple<M::Label>, slot: Slot, chain: Chain) -> Result<Reduction<M::Label>> {
        if !matches!(slot, Slot::Left | Slot::Middle) {
            return Err(Error::Invalid("derivatives act through slot 2 or 3".into()));
        }
        let m = &self.mods[slot.index()];
        let img = m.act(&m.translation(), 0, q.slot(slot))?;
        let mut input = LinearCombination::new(Normalization::F, chain);
        for (lab, c) in img {
            input.add_term(q.with_slot(&self.mods, slot, lab), 0, 0, Coefficient::monomial(0, 0, 0, c));
        }
        self.reduce_combination(&input)
    }
}

/// Log-indexed family `F_{h,k}` standing for `Σ F_{h,k} log^h x log^k y`.
pub type LogFamily = BTreeMap<(u32, u32), MonomialSeries2>;

/// The derivative relations between log components:
/// `∂_y` of the family has components `∂_y F_{h,k} + (k+1)/y · F_{h,k+1}`,
/// and `∂_x` has `∂_x F_{h,k} + (h+1)/x · F_{h+1,k}`. `in_y` picks the
/// variable; `caps` bounds `(h, k)`.
pub fn derivative_recursion(family: &LogFamily, in_y: bool, caps: (u32, u32)) -> Result<LogFamily> {
    for &(h, k) in family.keys() {
        if h > caps.0 || k > caps.1 {
            return Err(Error::LogCapOverflow { cap: if h > caps.0 { caps.0 } else { caps.1 }, got: h.max(k) });
        }
    }
    let mut out = LogFamily::new();
    for h in 0..=caps.0 {
        for k in 0..=caps.1 {
            let base = family.get(&(h, k));
            let mut acc = match base {
                Some(f) if in_y => f.derive_y(),
                Some(f) => f.derive_x(),
                None => zero_like(family),
            };
            let (next, factor, mono) = if in_y {
                ((h, k + 1), k + 1, crate::logseries::Monomial2::int(0, -1, 0))
            } else {
                ((h + 1, k), h + 1, crate::logseries::Monomial2::int(-1, 0, 0))
            };
            if let Some(g) = family.get(&next) {
                let shifted = g.mul(&MonomialSeries2::monomial(
                    mono,
                    GaussRational::from_i64(factor as i64),
                    crate::logseries::Flavor::None,
                ))?;
                acc = acc.add(&shifted)?;
            }
            if !acc.is_zero() {
                out.insert((h, k), acc);
            }
        }
    }
    Ok(out)
}

fn zero_like(family: &LogFamily) -> MonomialSeries2 {
    let flavor = family.values().next().map_or(crate::logseries::Flavor::None, |f| f.flavor());
    MonomialSeries2::zero(flavor)
}
