//! Intertwining operator `𝒴(·, z): F_a ⊗ F_b → F_{a+b}{z}`.
//!
//! Matrix elements are written `⟨μ*, 𝒴(v, z) λ⟩ = M(μ, v, λ) z^{ab + |μ| - |v| - |λ|}`.
//! For the highest-weight vector `v = |a⟩` the operator is
//! `E⁻(a, z) E⁺(a, z) z^{ab}`, which factorizes over oscillator labels `n`:
//!
//! ```text
//! M(μ, ∅, λ) = Π_n Σ_r C(m_n(λ), r) (-a)^{m_n(λ)-r} (a/n)^{m_n(μ)-r} / (m_n(μ)-r)!
//! ```
//!
//! Descendants `v = a_{-k} v'` follow from the iterate formula
//!
//! ```text
//! M(μ, v, λ) = Σ_j C(k+j-1, j) [ M(μ∖(k+j), v', λ) - (-1)^k M(μ, v', a_j λ) ].
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{basis_vector, multiplicity, remove_part, size, FockModule, FockVector, Partition, VoaElement};
use crate::scalar::{binom_int, cpow, factorial_q, q_to_f64, qi, Q};

type Key = (Partition, Partition, Partition);

#[derive(Debug)]
pub struct Intertwiner {
    a: Q,
    b: Q,
    cache: Mutex<HashMap<Key, Q>>,
}

impl Clone for Intertwiner {
    fn clone(&self) -> Self {
        Self::new(self.a.clone(), self.b.clone())
    }
}

/// Outcome of the axiom suite: number of identities checked and the first failures.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub i1_checked: usize,
    pub i2_checked: usize,
    pub i3_checked: usize,
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn qpow(x: &Q, n: u32) -> Q {
    (0..n).fold(Q::one(), |acc, _| acc * x)
}

impl Intertwiner {
    /// Intertwiner of type `F_{a+b} ← F_a ⊗ F_b`, normalized so that
    /// `⟨|a+b⟩*, 𝒴(|a⟩, z)|b⟩⟩ = z^{ab}`.
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b, cache: Mutex::new(HashMap::new()) }
    }

    pub fn source(&self) -> &Q {
        &self.a
    }

    pub fn input(&self) -> &Q {
        &self.b
    }

    pub fn target(&self) -> Q {
        &self.a + &self.b
    }

    pub fn exponent(&self, mu: &[u32], v: &[u32], lam: &[u32]) -> Q {
        &self.a * &self.b + qi(size(mu) as i64 - size(v) as i64 - size(lam) as i64)
    }

    fn base(&self, mu: &[u32], lam: &[u32]) -> Q {
        let mut labels: Vec<u32> = mu.iter().chain(lam).copied().collect();
        labels.sort_unstable();
        labels.dedup();
        let mut out = Q::one();
        for n in labels {
            let ml = multiplicity(lam, n);
            let mm = multiplicity(mu, n);
            let an = &self.a / qi(n as i64);
            let mut s = Q::zero();
            for r in 0..=ml.min(mm) {
                s += binom_int(ml as i64, r) * qpow(&-self.a.clone(), ml - r) * qpow(&an, mm - r) / factorial_q(mm - r);
            }
            if s.is_zero() {
                return s;
            }
            out *= s;
        }
        out
    }

    /// `M(μ, v, λ)` for basis vectors.
    pub fn matrix_element(&self, mu: &[u32], v: &[u32], lam: &[u32]) -> Q {
        if v.is_empty() {
            return self.base(mu, lam);
        }
        let key = (mu.to_vec(), v.to_vec(), lam.to_vec());
        if let Some(x) = self.cache.lock().expect("cache poisoned").get(&key) {
            return x.clone();
        }
        let k = v[0];
        let rest = &v[1..];
        let sign = if k.is_multiple_of(2) { qi(1) } else { qi(-1) };
        let mut out = Q::zero();
        let top_mu = mu.first().copied().unwrap_or(0);
        let top_lam = lam.first().copied().unwrap_or(0);
        for j in 0..=top_mu.max(top_lam) {
            let c = binom_int((k + j) as i64 - 1, j);
            if let Some(m2) = remove_part(mu, k + j) {
                out += &c * self.matrix_element(&m2, rest, lam);
            }
            let hit = if j == 0 {
                if self.b.is_zero() { None } else { Some((lam.to_vec(), self.b.clone())) }
            } else {
                let m = multiplicity(lam, j);
                remove_part(lam, j).map(|l2| (l2, qi((j * m) as i64)))
            };
            if let Some((l2, s)) = hit {
                out -= &c * &sign * s * self.matrix_element(mu, rest, &l2);
            }
        }
        self.cache.lock().expect("cache poisoned").insert(key, out.clone());
        out
    }

    /// Bilinear pairing `⟨θ, 𝒴(v, z) λ⟩` as a map exponent → coefficient.
    pub fn pair(&self, theta: &FockVector, v: &FockVector, lam: &FockVector) -> BTreeMap<Q, Q> {
        let mut out: BTreeMap<Q, Q> = BTreeMap::new();
        for (mu, ct) in theta {
            for (vv, cv) in v {
                for (l, cl) in lam {
                    let m = self.matrix_element(mu, vv, l);
                    if m.is_zero() {
                        continue;
                    }
                    let e = self.exponent(mu, vv, l);
                    *out.entry(e).or_insert_with(Q::zero) += m * ct * cv * cl;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Mode `v_s λ = Σ_μ M(μ, v, λ) μ`, the coefficient of `z^{-s-1}`.
    /// Empty when `s` is off the ladder `-ab - 1 + ℤ`.
    pub fn mode(&self, v: &[u32], s: &Q, lam: &[u32]) -> FockVector {
        let g = -s - qi(1) - &self.a * &self.b + qi(size(v) as i64 + size(lam) as i64);
        let mut out = BTreeMap::new();
        if !g.is_integer() || g < qi(0) {
            return out;
        }
        let g = g.to_integer().try_into().unwrap_or(u32::MAX);
        for mu in super::partitions(g) {
            let m = self.matrix_element(&mu, v, lam);
            if !m.is_zero() {
                out.insert(mu, m);
            }
        }
        out
    }

    /// Components `⟨μ*, 𝒴(ℓ, z) r⟩` for all `|μ| ≤ max_grade`, evaluated on the
    /// principal branch.
    pub fn apply_numeric(
        &self,
        left: &BTreeMap<Partition, Complex64>,
        z: Complex64,
        right: &BTreeMap<Partition, Complex64>,
        max_grade: u32,
    ) -> BTreeMap<Partition, Complex64> {
        let mut out = BTreeMap::new();
        for g in 0..=max_grade {
            for mu in super::partitions(g) {
                let mut acc = Complex64::zero();
                for (d, cd) in left {
                    for (e, ce) in right {
                        let m = self.matrix_element(&mu, d, e);
                        if m.is_zero() {
                            continue;
                        }
                        let ex = q_to_f64(&self.exponent(&mu, d, e));
                        acc += cd * ce * q_to_f64(&m) * cpow(z, Complex64::new(ex, 0.0));
                    }
                }
                if acc != Complex64::zero() {
                    out.insert(mu, acc);
                }
            }
        }
        out
    }

    /// Check (I 1) commutativity and (I 2) associativity for every
    /// `α ∈ alphas`, mode `m ∈ modes`, and basis triples `(θ, v, λ)` with
    /// `|θ| + |v| + |λ| ≤ max_grade`; and (I 3) for the same triples.
    pub fn check_axioms(&self, max_grade: u32, alphas: &[VoaElement], modes: &[i64]) -> AxiomReport {
        let wt_max = alphas.iter().map(VoaElement::weight).max().unwrap_or(0);
        let m_max = modes.iter().map(|m| m.unsigned_abs() as u32).max().unwrap_or(0);
        let cut = max_grade + wt_max + m_max + 2;
        let fa = FockModule::new(self.a.clone(), cut);
        let fb = FockModule::new(self.b.clone(), cut);
        let fc = FockModule::new(self.target(), cut);
        let mut report = AxiomReport::default();
        let mut dual_cache: HashMap<(VoaElement, i64, Partition), FockVector> = HashMap::new();
        let mut dual = |al: &VoaElement, m: i64, th: &Partition| -> FockVector {
            dual_cache
                .entry((al.clone(), m, th.clone()))
                .or_insert_with(|| fc.dual_mode(al, m, th).expect("cutoff sized for the suite"))
                .clone()
        };
        let shift = |map: BTreeMap<Q, Q>, by: i64, scale: &Q, into: &mut BTreeMap<Q, Q>| {
            for (e, c) in map {
                *into.entry(e + qi(by)).or_insert_with(Q::zero) += c * scale;
            }
        };
        let clean = |mut m: BTreeMap<Q, Q>| {
            m.retain(|_, c| !c.is_zero());
            m
        };

        for gt in 0..=max_grade {
            for th in fc.basis(gt).to_vec() {
                let theta = basis_vector(th.clone());
                for gv in 0..=max_grade - gt {
                    for v in fa.basis(gv).to_vec() {
                        let vv = basis_vector(v.clone());
                        for gl in 0..=max_grade - gt - gv {
                            for l in fb.basis(gl).to_vec() {
                                let lv = basis_vector(l.clone());
                                for al in alphas {
                                    let w = al.weight() as i64;
                                    for &m in modes {
                                        // (I 1)
                                        let mut lhs = BTreeMap::new();
                                        shift(self.pair(&dual(al, m, &th), &vv, &lv), 0, &qi(1), &mut lhs);
                                        shift(self.pair(&theta, &vv, &fb.act(al, m, &lv)), 0, &qi(-1), &mut lhs);
                                        let mut rhs = BTreeMap::new();
                                        for j in 0..=(gv as i64 + w) {
                                            let c = binom_int(m, j as u32);
                                            if c.is_zero() {
                                                continue;
                                            }
                                            shift(self.pair(&theta, &fa.act(al, j, &vv), &lv), m - j, &c, &mut rhs);
                                        }
                                        report.i1_checked += 1;
                                        if clean(lhs.clone()) != clean(rhs.clone()) && report.failures.len() < 10 {
                                            report.failures.push(format!("I1 {al:?} m={m} θ={th:?} v={v:?} λ={l:?}"));
                                        }
                                        // (I 2)
                                        let lhs2 = self.pair(&theta, &fa.act(al, m, &vv), &lv);
                                        let mut rhs2 = BTreeMap::new();
                                        let sign_m = if m.rem_euclid(2) == 0 { qi(1) } else { qi(-1) };
                                        let jmax = (gt as i64 + m + 1).max(gl as i64 + w).max(0);
                                        for j in 0..=jmax {
                                            let c = binom_int(m, j as u32) * if j % 2 == 0 { qi(1) } else { qi(-1) };
                                            if c.is_zero() {
                                                continue;
                                            }
                                            shift(self.pair(&dual(al, m - j, &th), &vv, &lv), j, &c, &mut rhs2);
                                            let c2 = -(&c * &sign_m);
                                            shift(self.pair(&theta, &vv, &fb.act(al, j, &lv)), m - j, &c2, &mut rhs2);
                                        }
                                        report.i2_checked += 1;
                                        if clean(lhs2) != clean(rhs2) && report.failures.len() < 10 {
                                            report.failures.push(format!("I2 {al:?} m={m} θ={th:?} v={v:?} λ={l:?}"));
                                        }
                                    }
                                }
                                // (I 3)
                                let lhs3 = self.pair(&theta, &fa.act(&VoaElement::Omega, 0, &vv), &lv);
                                let rhs3: BTreeMap<Q, Q> = self
                                    .pair(&theta, &vv, &lv)
                                    .into_iter()
                                    .map(|(e, c)| (&e - qi(1), c * e))
                                    .collect();
                                report.i3_checked += 1;
                                if clean(lhs3) != clean(rhs3) && report.failures.len() < 10 {
                                    report.failures.push(format!("I3 θ={th:?} v={v:?} λ={l:?}"));
                                }
                            }
                        }
                    }
                }
            }
        }
        report
    }
}
