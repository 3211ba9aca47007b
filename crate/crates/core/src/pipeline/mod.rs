//! End-to-end checks on the free-boson testbed: G-vectors from mode sums,
//! the connection problem at a matching point, principal-branch assembly
//! around `x = y₀`, associativity and the pentagon identity.

mod pentagon;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{fuchsian_solve, FundamentalSolutionSet, MatrixSeries, SolveOptions};
use crate::heisenberg::{closed_form_4pt, Chain, ChainSeries, FockModule, FourPoint, Partition};
use crate::logseries::LogPowerSeries;
use crate::mat::Mat;
use crate::rewriter::{
    exponent_set, fock_modules, symbolic_connection, ConnectionMatrix, ConnectionOptions, ExponentSet,
    GradedModule, Normalization, Quadruple, Reducer, SymbolicConnection,
};
use crate::scalar::{on_branch_cut, q_to_f64, Q};

pub use pentagon::{check_pentagon, in_d3, Bracketing, BracketValue, PentagonReport};

/// Truncations and tolerances of one pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Dual-grade window `N`.
    pub n: u32,
    /// Series order of `Λ` and of the fundamental solution.
    pub order: usize,
    /// Intermediate-grade cutoff of the mode sums.
    pub g_max: u32,
    /// Grade cutoff of the Fock modules used by the reductions.
    pub grade_cutoff: u32,
    /// `P̃` enlargement of `A`, `B`, `C`.
    pub tilde: [u32; 3],
    /// Matching point `x₁ = match_ratio · y₀`, cross-checked at `check_ratio · y₀`.
    pub match_ratio: f64,
    pub check_ratio: f64,
    /// Relative agreement required between the two sides and the closed form.
    pub tol: f64,
    /// Agreement required between the two matching points.
    pub match_tol: f64,
    /// Largest condition number accepted at a matching point.
    pub max_condition: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            n: 4,
            order: 24,
            g_max: 12,
            grade_cutoff: 12,
            tilde: [0; 3],
            match_ratio: 1.75,
            check_ratio: 1.6,
            tol: 1e-6,
            match_tol: 1e-8,
            max_condition: 1e12,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.g_max == 0 || self.grade_cutoff < self.n {
            return Err(Error::Invalid("cutoffs must be positive and the grade cutoff at least N".into()));
        }
        if !(self.tol > 0.0 && self.match_tol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        for r in [self.match_ratio, self.check_ratio] {
            if !(r > 1.0 && r < 2.0) {
                return Err(Error::Invalid(format!("matching ratio {r} outside (1, 2)")));
            }
        }
        Ok(())
    }
}

/// `0 < |x-y| < |y| < |x|` with `x`, `y`, `x-y` off the cut.
pub fn in_d2(x: Complex64, y: Complex64) -> Result<()> {
    for (name, z) in [("x", x), ("y", y), ("x-y", x - y)] {
        if on_branch_cut(z) {
            return Err(Error::Region(format!("{name} = {z} lies on the branch cut")));
        }
    }
    let d = (x - y).norm();
    if !(0.0 < d && d < y.norm() && y.norm() < x.norm()) {
        return Err(Error::Region(format!("({x}, {y}) violates 0 < |x-y| < |y| < |x|")));
    }
    Ok(())
}

/// `count` points in the polydisk of radius `radius` around `center`, all in
/// `𝒟²`. Deterministic in `seed`.
pub fn sample_points(seed: u64, count: usize, center: (Complex64, Complex64), radius: f64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disk = |rng: &mut ChaCha8Rng| loop {
        let z = Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if z.norm() < radius {
            return z;
        }
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = (center.0 + disk(&mut rng), center.1 + disk(&mut rng));
        if in_d2(p.0, p.1).is_ok() {
            out.push(p);
        }
    }
    out
}

/// Fock modules, the reducer and the symbolic `Λ²³` for one set of momenta.
#[derive(Clone, Debug)]
pub struct Testbed {
    pub four: FourPoint,
    pub reducer: Reducer<FockModule>,
    pub config: PipelineConfig,
    symbolic: SymbolicConnection<Partition>,
    /// Mode series over the index; they do not depend on the base point.
    components: Vec<GComponent>,
}

impl Testbed {
    pub fn new(momenta: &[Q; 3], config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let reducer = Reducer::new(fock_modules(momenta, config.grade_cutoff), config.n);
        let symbolic = symbolic_connection(&reducer, Normalization::Xmy, &connection_options(&config))?;
        let four = FourPoint::new(momenta[0].clone(), momenta[1].clone(), momenta[2].clone());
        let components = mode_components(&four, &symbolic.index, config.g_max);
        Ok(Self { four, reducer, config, symbolic, components })
    }

    /// `𝒥_N`, in the row order of `Λ`.
    pub fn index(&self) -> &[Quadruple<Partition>] {
        &self.symbolic.index
    }

    /// The all-highest-weight quadruple `ξ₀`.
    pub fn vacuum_quadruple(&self) -> Quadruple<Partition> {
        self.reducer.quadruple(vec![], vec![], vec![], vec![])
    }

    /// `Λ²³(x, y₀)` as a series in `x - y₀`.
    pub fn connection(&self, y0: Complex64) -> Result<ConnectionMatrix<Complex64, Partition>> {
        self.symbolic.expand(y0, self.config.order)
    }

    /// The `Xmy` G-vector over the index, based at `y0`.
    pub fn gvector(&self, y0: Complex64) -> Result<GVector> {
        check_basepoint(y0)?;
        Ok(GVector { flavor: Normalization::Xmy, basepoint: y0, components: self.components.clone() })
    }

    /// Largest grade in `P̃_C`.
    pub fn max_grade_c(&self) -> u32 {
        let c = &self.reducer.mods[3];
        c.enlargement(self.config.tilde[2]).iter().map(|w| c.grade(w)).max().unwrap_or(0)
    }
}

fn connection_options(cfg: &PipelineConfig) -> ConnectionOptions {
    ConnectionOptions { n: cfg.n, order: cfg.order, tilde: cfg.tilde, dual_basis: None }
}

/// One component of a G-vector: the chain-A mode sum of `F(ξ)` and the
/// exponent `gr²³⁴(ξ)` of its normalization.
#[derive(Clone, Debug)]
pub struct GComponent {
    pub quadruple: Quadruple<Partition>,
    pub gr234: u32,
    pub series: ChainSeries,
}

/// G-vector of flavor `Y` (basepoint `x₀`, function of `y`) or `Xmy`
/// (basepoint `y₀`, function of `x`). The testbed has no logarithms, so
/// only the `(h, k) = (0, 0)` components exist.
#[derive(Clone, Debug)]
pub struct GVector {
    pub flavor: Normalization,
    pub basepoint: Complex64,
    pub components: Vec<GComponent>,
}

impl GVector {
    fn point(&self, free: Complex64) -> (Complex64, Complex64) {
        match self.flavor {
            Normalization::Y => (self.basepoint, free),
            _ => (free, self.basepoint),
        }
    }

    fn norm_factor(&self, x: Complex64, y: Complex64, g: u32) -> Complex64 {
        match self.flavor {
            Normalization::Y => y.powu(g),
            Normalization::Xmy => (x - y).powu(g),
            Normalization::F => Complex64::new(1.0, 0.0),
        }
    }

    /// Normalized components at `y` (flavor `Y`) or `x` (flavor `Xmy`).
    pub fn eval(&self, free: Complex64) -> Result<Vec<Complex64>> {
        let (x, y) = self.point(free);
        check_chain_a(x, y)?;
        Ok(self.components.iter().map(|c| c.series.eval(x, y) * self.norm_factor(x, y, c.gr234)).collect())
    }

    /// Largest last-band magnitude relative to its component.
    pub fn tail(&self, free: Complex64) -> f64 {
        let (x, y) = self.point(free);
        self.components
            .iter()
            .map(|c| {
                let v = c.series.eval(x, y).norm();
                if v == 0.0 {
                    0.0
                } else {
                    c.series.last_band(x, y) / v
                }
            })
            .fold(0.0, f64::max)
    }

    /// Component `i` of a `Y`-flavor vector as a series in `y`.
    pub fn component_series(&self, i: usize) -> Result<LogPowerSeries<Complex64>> {
        if self.flavor != Normalization::Y {
            return Err(Error::Invalid("only y-flavor components are series in one variable".into()));
        }
        let c = &self.components[i];
        let x0 = self.basepoint;
        let lo = c.series.terms.keys().next().cloned().unwrap_or_else(|| c.series.cap.clone());
        let span = (&c.series.cap - &lo).floor().to_integer().try_into().unwrap_or(0u32);
        let raw = c
            .series
            .terms
            .iter()
            .map(|(e, v)| {
                let rest = q_to_f64(&(&c.series.degree - e));
                let coef = Complex64::new(q_to_f64(v), 0.0) * crate::scalar::cpow(x0, Complex64::new(rest, 0.0));
                (Complex64::new(q_to_f64(e) + c.gr234 as f64, 0.0), 0, coef)
            })
            .collect();
        Ok(LogPowerSeries::from_terms("y", raw, span, 0))
    }
}

fn check_chain_a(x: Complex64, y: Complex64) -> Result<()> {
    for (name, z) in [("x", x), ("y", y), ("x-y", x - y)] {
        if on_branch_cut(z) {
            return Err(Error::BranchCut(format!("{name} = {z}")));
        }
    }
    if !(y.norm() < x.norm()) {
        return Err(Error::Region(format!("mode sums need |y| < |x|, got x = {x}, y = {y}")));
    }
    Ok(())
}

fn check_basepoint(b: Complex64) -> Result<()> {
    if b.is_zero() || on_branch_cut(b) {
        return Err(Error::BranchCut(format!("basepoint {b}")));
    }
    Ok(())
}

fn mode_components(four: &FourPoint, index: &[Quadruple<Partition>], g_max: u32) -> Vec<GComponent> {
    index
        .iter()
        .map(|q| GComponent {
            quadruple: q.clone(),
            gr234: q.gr234(),
            series: four.mode_series(Chain::A, &q.theta, &q.v, &q.u, &q.w, g_max),
        })
        .collect()
}

/// Components over `index` from chain-A mode sums through intermediate grade `g_max`.
pub fn build_gvector(
    four: &FourPoint,
    index: &[Quadruple<Partition>],
    flavor: Normalization,
    basepoint: Complex64,
    g_max: u32,
) -> Result<GVector> {
    check_basepoint(basepoint)?;
    if flavor == Normalization::F {
        return Err(Error::Invalid("G-vectors use the y or x-y normalization".into()));
    }
    Ok(GVector { flavor, basepoint, components: mode_components(four, index, g_max) })
}

/// `c` with `Φ(x₁ - y₀) c = G(x₁)`.
#[derive(Clone, Debug)]
pub struct ConnectionSolution {
    pub coefficients: Vec<Complex64>,
    pub solution: FundamentalSolutionSet<Complex64>,
    pub matching_point: Complex64,
    /// `‖Φ c - G‖∞ / ‖G‖∞` at the matching point.
    pub residual: f64,
    pub condition: f64,
    /// Second matching point and `‖c - c′‖∞ / ‖c‖∞`.
    pub cross_check: Option<(Complex64, f64)>,
}

fn condition_number(m: &Mat<Complex64>) -> f64 {
    let d = DMatrix::<Complex64>::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let sv = d.singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn match_at(
    g: &GVector,
    phi: &FundamentalSolutionSet<Complex64>,
    x1: Complex64,
    max_condition: f64,
) -> Result<(Vec<Complex64>, f64, f64)> {
    let y0 = g.basepoint;
    if !((x1 - y0).norm() < y0.norm() && x1.norm() > y0.norm()) {
        return Err(Error::Region(format!("matching point {x1} outside the overlap around {y0}")));
    }
    let m = phi.eval(x1 - y0)?;
    let cond = condition_number(&m);
    if !(cond <= max_condition) {
        return Err(Error::Numeric(format!("Φ({x1}) is ill-conditioned (condition {cond:.3e})")));
    }
    let rhs = g.eval(x1)?;
    let c = m.solve_vec(&rhs)?;
    let back = m.mul_vec(&c);
    let diff: Vec<Complex64> = back.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let scale = sup(&rhs).max(f64::MIN_POSITIVE);
    Ok((c, sup(&diff) / scale, cond))
}

/// Solve the connection problem between the chain-A expansion of `g`
/// (flavor `Xmy`) and the local solutions of `Λ` around `x = y₀`, matching at
/// `x1` and cross-checking at `x1_alt`. An ill-conditioned first point falls
/// back to the second.
pub fn solve_connection(
    g: &GVector,
    lambda: &MatrixSeries<Complex64>,
    x1: Complex64,
    x1_alt: Complex64,
    order: usize,
    max_condition: f64,
) -> Result<ConnectionSolution> {
    if g.flavor != Normalization::Xmy {
        return Err(Error::Invalid("the connection problem is posed for the x-y flavor".into()));
    }
    if g.components.len() != lambda.size() {
        return Err(Error::Invalid(format!("G has {} components, Λ has size {}", g.components.len(), lambda.size())));
    }
    let solution = fuchsian_solve(lambda, &SolveOptions::with_order(order))?;
    let (first, second) = match match_at(g, &solution, x1, max_condition) {
        Ok(r) => ((x1, r), Some(x1_alt)),
        Err(Error::Numeric(_)) => ((x1_alt, match_at(g, &solution, x1_alt, max_condition)?), None),
        Err(e) => return Err(e),
    };
    let (matching_point, (coefficients, residual, condition)) = first;
    let cross_check = match second {
        Some(p) => {
            let (c2, _, _) = match_at(g, &solution, p, max_condition)?;
            let diff: Vec<Complex64> = coefficients.iter().zip(&c2).map(|(a, b)| a - b).collect();
            Some((p, sup(&diff) / sup(&coefficients).max(f64::MIN_POSITIVE)))
        }
        None => None,
    };
    Ok(ConnectionSolution { coefficients, solution, matching_point, residual, condition, cross_check })
}

/// `coefficient · (x-y)^{exponent} log^{log_power}(x-y)`; in the sign
/// convention `(x-y)^{-s-1}` the ladder index is `s = -exponent - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssemblyTerm {
    pub exponent: Complex64,
    pub log_power: u32,
    pub coefficient: Complex64,
}

impl AssemblyTerm {
    pub fn s(&self) -> Complex64 {
        -self.exponent - 1.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AssembledComponent {
    pub theta: Partition,
    pub v: Partition,
    pub u: Partition,
    pub w: Partition,
    pub terms: Vec<AssemblyTerm>,
}

/// `F̃(ξ; x, y₀)` for every `ξ` as a finite sum of powers and logs of `x - y₀`.
#[derive(Clone, Debug, Serialize)]
pub struct BranchAssembly {
    pub y0: Complex64,
    /// `Δ`: ladder bases of `Λ(0)` minus the top grade of `P̃_C`.
    pub delta: Vec<Complex64>,
    pub components: Vec<AssembledComponent>,
}

impl BranchAssembly {
    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|c| c.terms.is_empty())
    }

    /// Principal-branch value of component `i` at `x`.
    pub fn eval(&self, i: usize, x: Complex64) -> Result<Complex64> {
        let t = x - self.y0;
        if on_branch_cut(t) {
            return Err(Error::BranchCut(format!("x - y0 = {t}")));
        }
        let lt = t.ln();
        Ok(self.components[i]
            .terms
            .iter()
            .map(|term| term.coefficient * crate::scalar::cpow(t, term.exponent) * lt.powu(term.log_power))
            .sum())
    }

    /// Coefficient of `(x-y)^e log^t(x-y)` in component `i`, matching `e` within `tol`.
    pub fn coefficient(&self, i: usize, exponent: Complex64, log_power: u32, tol: f64) -> Complex64 {
        self.components[i]
            .terms
            .iter()
            .filter(|t| t.log_power == log_power && (t.exponent - exponent).norm() <= tol)
            .map(|t| t.coefficient)
            .sum()
    }

    /// Largest `|coefficient|` among terms with a logarithm.
    pub fn max_log_coefficient(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| &c.terms)
            .filter(|t| t.log_power > 0)
            .map(|t| t.coefficient.norm())
            .fold(0.0, f64::max)
    }
}

const CLASS_TOL: f64 = 1e-8;

fn ladder_offset(e: Complex64, base: Complex64) -> Option<i64> {
    let d = e - base;
    let k = d.re.round();
    ((d.re - k).abs() <= CLASS_TOL && d.im.abs() <= CLASS_TOL).then_some(k as i64)
}

/// Multiply out `Φ c`, divide by `(x-y)^{gr²³⁴}` and collect by exponent and
/// log power. Every exponent must lie in `Δ - gr(v) - gr(u) + ℕ`; anything
/// else is a [`Error::Ladder`] failure.
pub fn assemble_principal_branch(
    sol: &ConnectionSolution,
    exponents: &ExponentSet,
    index: &[Quadruple<Partition>],
    max_grade_c: u32,
) -> Result<BranchAssembly> {
    let phi = &sol.solution;
    let delta: Vec<Complex64> = exponents.ladders.iter().map(|l| l.base - max_grade_c as f64).collect();
    let mut components = Vec::with_capacity(index.len());
    for (i, q) in index.iter().enumerate() {
        let g = q.gr234();
        let shift = (q.v.iter().sum::<u32>() + q.u.iter().sum::<u32>()) as f64;
        // (ladder, offset from the ladder base, log power) -> coefficient
        let mut acc: BTreeMap<(usize, i64, u32), Complex64> = BTreeMap::new();
        for (col, c) in sol.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (s, t, v) in phi.columns[col][i].terms() {
                let e = s - g as f64;
                let found = delta.iter().enumerate().find_map(|(l, d)| ladder_offset(e, d - shift).map(|k| (l, k)));
                match found {
                    Some((l, k)) if k >= 0 => *acc.entry((l, k, t)).or_insert_with(Complex64::zero) += c * v,
                    _ => {
                        return Err(Error::Ladder(format!(
                            "exponent {e} of component {i} lies outside Δ - gr(v) - gr(u) + ℕ (Δ = {delta:?})"
                        )))
                    }
                }
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((l, k, t), coefficient)| AssemblyTerm {
                exponent: delta[l] - shift + k as f64,
                log_power: t,
                coefficient,
            })
            .collect();
        components.push(AssembledComponent {
            theta: q.theta.clone(),
            v: q.v.clone(),
            u: q.u.clone(),
            w: q.w.clone(),
            terms,
        });
    }
    Ok(BranchAssembly { y0: phi.z0, delta, components })
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub base: Complex64,
    pub offsets: Vec<i64>,
}

/// One sample point of the associativity check.
#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub x: Complex64,
    pub y: Complex64,
    /// `F̃^{A(BC)}`: mode sums, connection problem and assembly around `x = y`.
    pub a_bc: Complex64,
    /// `F̃^{(AB)C}`: direct mode sum in `(x-y)/y`.
    pub ab_c: Complex64,
    pub closed_form: Complex64,
    pub deviation: f64,
    pub closed_form_deviation: f64,
    pub tail_a: f64,
    pub tail_b: f64,
    pub matching_point: Complex64,
    pub matching_residual: f64,
    pub matching_condition: f64,
    pub cross_check: f64,
    pub max_log_coefficient: f64,
    pub ladders: Vec<LadderReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociativityReport {
    pub momenta: [String; 3],
    pub config: PipelineConfig,
    pub points: Vec<PointReport>,
    pub max_deviation: f64,
    pub max_closed_form_deviation: f64,
    pub max_cross_check: f64,
    pub passed: bool,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Both sides of the associativity identity at one point of `𝒟²`.
pub fn check_point(tb: &Testbed, x: Complex64, y: Complex64) -> Result<PointReport> {
    in_d2(x, y)?;
    let cfg = &tb.config;
    let y0 = y;
    let lambda = tb.connection(y0)?;
    let ex = exponent_set(&lambda.constant_term())?;
    let g = tb.gvector(y0)?;
    let (x1, x1_alt) = (y0 * cfg.match_ratio, y0 * cfg.check_ratio);
    let sol = solve_connection(&g, &lambda.series, x1, x1_alt, cfg.order, cfg.max_condition)?;
    let asm = assemble_principal_branch(&sol, &ex, tb.index(), tb.max_grade_c())?;
    let xi0 = tb.vacuum_quadruple();
    let i0 = lambda.position(&xi0).ok_or_else(|| Error::Invalid("ξ₀ missing from 𝒥_N".into()))?;
    let a_bc = asm.eval(i0, x)?;
    let direct = tb.four.direct_mode_sum(Chain::B, (&[], &[], &[], &[]), x, y, cfg.g_max)?;
    let ab_c = direct.value;
    let [a, b, c] = tb.four.momenta();
    let closed_form = closed_form_4pt(&a, &b, &c, x, y)?;
    Ok(PointReport {
        x,
        y,
        a_bc,
        ab_c,
        closed_form,
        deviation: rel(a_bc, ab_c),
        closed_form_deviation: rel(a_bc, closed_form).max(rel(ab_c, closed_form)),
        tail_a: g.tail(x1),
        tail_b: if ab_c.norm() == 0.0 { 0.0 } else { direct.tail / ab_c.norm() },
        matching_point: sol.matching_point,
        matching_residual: sol.residual,
        matching_condition: sol.condition,
        cross_check: sol.cross_check.map_or(0.0, |(_, d)| d),
        max_log_coefficient: asm.max_log_coefficient(),
        ladders: ex.ladders.iter().map(|l| LadderReport { base: l.base, offsets: l.offsets.clone() }).collect(),
    })
}

/// Compare `F̃^{A(BC)}` and `F̃^{(AB)C}` at every point. Points are
/// independent and are spread over the available threads.
pub fn check_associativity(
    momenta: &[Q; 3],
    points: &[(Complex64, Complex64)],
    config: &PipelineConfig,
) -> Result<AssociativityReport> {
    if points.is_empty() {
        return Err(Error::Invalid("no sample points".into()));
    }
    for &(x, y) in points {
        in_d2(x, y)?;
    }
    let tb = Testbed::new(momenta, config.clone())?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len());
    let chunk = points.len().div_ceil(threads);
    let results: Vec<Result<PointReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|ps| {
                let tb = &tb;
                s.spawn(move || ps.iter().map(|&(x, y)| check_point(tb, x, y)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("point worker panicked")).collect()
    });
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    let max_deviation = points.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let max_closed_form_deviation = points.iter().map(|p| p.closed_form_deviation).fold(0.0, f64::max);
    let max_cross_check = points.iter().map(|p| p.cross_check).fold(0.0, f64::max);
    let passed = max_deviation <= config.tol
        && max_closed_form_deviation <= config.tol
        && max_cross_check <= config.match_tol
        && points.iter().all(|p| p.deviation.is_finite());
    Ok(AssociativityReport {
        momenta: [momenta[0].to_string(), momenta[1].to_string(), momenta[2].to_string()],
        config: config.clone(),
        points,
        max_deviation,
        max_closed_form_deviation,
        max_cross_check,
        passed,
    })
}
