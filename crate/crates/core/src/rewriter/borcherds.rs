//! One application of a Borcherds identity: move `α_n` out of one slot of a
//! correlator symbol.

use num_traits::{One, Zero};

use super::{Chain, Coefficient, GradedModule, LinearCombination, Normalization, Quadruple};
use crate::error::{Error, Result};
use crate::scalar::{binom_int, Q};

/// Position in `⟨θ, 𝒴(v, ·) 𝒴(u, ·) w⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Dual,
    Left,
    Middle,
    Right,
}

impl Slot {
    pub fn index(self) -> usize {
        match self {
            Slot::Dual => 0,
            Slot::Left => 1,
            Slot::Middle => 2,
            Slot::Right => 3,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Slot::Dual),
            2 => Ok(Slot::Left),
            3 => Ok(Slot::Middle),
            4 => Ok(Slot::Right),
            _ => Err(Error::Invalid(format!("slot must be 1..=4, got {i}"))),
        }
    }
}

fn sign(k: i64) -> Q {
    if k.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

struct Expander<'a, M: GradedModule> {
    mods: &'a [M; 4],
    alpha: &'a M::Generator,
    xi: &'a Quadruple<M::Label>,
    out: LinearCombination<M::Label>,
}

impl<M: GradedModule> Expander<'_, M> {
    /// Largest `j` with `α_j` nonzero on the slot's grade (`None`: always zero).
    fn top_mode(&self, s: Slot) -> Option<i64> {
        let g = self.mods[s.index()].grade(self.xi.slot(s)) as i64;
        let top = g + self.mods[s.index()].generator_weight(self.alpha) as i64 - 1;
        (top >= 0).then_some(top)
    }

    /// Smallest `p` with `(α_p)*θ` nonzero.
    fn bottom_dual_mode(&self) -> i64 {
        let g = self.mods[0].grade(&self.xi.theta) as i64;
        self.mods[0].generator_weight(self.alpha) as i64 - 1 - g
    }

    /// Add `coef · x^p y^q (x-y)^e · F(α_j^{[s]} ξ)`; for `s = Dual`, `α_j` acts
    /// by its transpose.
    fn add(&mut self, s: Slot, j: i64, coef: Q, mono: [i64; 3]) -> Result<()> {
        if coef.is_zero() {
            return Ok(());
        }
        let m = &self.mods[s.index()];
        let l = self.xi.slot(s);
        let img = if s == Slot::Dual { m.act_dual(self.alpha, j, l)? } else { m.act(self.alpha, j, l)? };
        for (lab, c) in img {
            let q = self.xi.with_slot(self.mods, s, lab);
            let cf = Coefficient::monomial(mono[0], mono[1], mono[2], &coef * c);
            self.out.add_term(q, 0, 0, cf);
        }
        Ok(())
    }

    fn modes(&self, s: Slot) -> std::ops::RangeInclusive<i64> {
        match self.top_mode(s) {
            Some(t) => 0..=t,
            #[allow(clippy::reversed_empty_ranges)]
            None => 1..=0,
        }
    }
}

/// Right-hand side of the Borcherds identity for `α_n` in `slot`, with `ξ`
/// holding the vector `α_n` acts on. The result is `F`-normalized.
///
/// The four identities, with `C(n, j)` generalized binomials and negative
/// powers of `x - y` read in the expansion region of `chain`:
///
/// * dual: `F((α_n)*θ) = Σ C(n,j) x^{n-j} F(α_j v) + Σ C(n,j) y^{n-j} F(α_j u) + F(α_n w)`
/// * left: `F(α_n v) = Σ C(n,j)(-1)^j x^j F((α_{n-j})*θ) - (-1)^n Σ C(n,j)(-1)^j x^{n-j} F(α_j w)
///   - Σ (-1)^{n+i} C(n,i) (x-y)^{n-i} F(α_i u)`
/// * middle: `F(α_n u) = Σ C(n,j)(-1)^j y^j F((α_{n-j})*θ) - Σ C(n,i)(x-y)^{n-i} F(α_i v)
///   - (-1)^n Σ C(n,j)(-1)^j y^{n-j} F(α_j w)`
/// * right: `F(α_n w) = F((α_n)*θ) - Σ C(n,j) x^{n-j} F(α_j v) - Σ C(n,j) y^{n-j} F(α_j u)`
pub fn borcherds_expand<M: GradedModule>(
    mods: &[M; 4],
    slot: Slot,
    n: i64,
    alpha: &M::Generator,
    xi: &Quadruple<M::Label>,
    chain: Chain,
) -> Result<LinearCombination<M::Label>> {
    let mut ex = Expander { mods, alpha, xi, out: LinearCombination::new(Normalization::F, chain) };
    let b = |j: i64| binom_int(n, j as u32);
    match slot {
        Slot::Dual => {
            for j in ex.modes(Slot::Left) {
                ex.add(Slot::Left, j, b(j), [n - j, 0, 0])?;
            }
            for j in ex.modes(Slot::Middle) {
                ex.add(Slot::Middle, j, b(j), [0, n - j, 0])?;
            }
            ex.add(Slot::Right, n, Q::one(), [0, 0, 0])?;
        }
        Slot::Left | Slot::Middle => {
            // the left and middle identities differ in which of x, y appears
            let (other, mono_dual, mono_w): (Slot, fn(i64) -> [i64; 3], fn(i64, i64) -> [i64; 3]) =
                if slot == Slot::Left {
                    (Slot::Middle, |j| [j, 0, 0], |n, j| [n - j, 0, 0])
                } else {
                    (Slot::Left, |j| [0, j, 0], |n, j| [0, n - j, 0])
                };
            let jmax = n - ex.bottom_dual_mode();
            for j in 0..=jmax {
                ex.add(Slot::Dual, n - j, b(j) * sign(j), mono_dual(j))?;
            }
            for j in ex.modes(Slot::Right) {
                ex.add(Slot::Right, j, -(sign(n) * b(j) * sign(j)), mono_w(n, j))?;
            }
            for i in ex.modes(other) {
                let c = if slot == Slot::Left { -(sign(n + i) * b(i)) } else { -b(i) };
                ex.add(other, i, c, [0, 0, n - i])?;
            }
        }
        Slot::Right => {
            ex.add(Slot::Dual, n, Q::one(), [0, 0, 0])?;
            for j in ex.modes(Slot::Left) {
                ex.add(Slot::Left, j, -b(j), [n - j, 0, 0])?;
            }
            for j in ex.modes(Slot::Middle) {
                ex.add(Slot::Middle, j, -b(j), [0, n - j, 0])?;
            }
        }
    }
    Ok(ex.out)
}
