//! Weight families `a(k)` on `ℕ^d`: trigonometric polynomials and bounded
//! Besicovitch weights given as an approximant ladder plus a closed-form
//! perturbation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::index::{IndexBox, MultiIndex};
use crate::sum::prefix_sums;

const TWO_PI_HI: f64 = core::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.4492935982947064e-16;

/// Label attached to every Besicovitch report: the limsup is only sampled.
pub const FINITE_BOX_EVIDENCE: &str = "finite-box evidence";

/// Default cap on lattice points scanned by [`verify_besicovitch`].
pub const DEFAULT_SCAN_BUDGET: u64 = 1 << 24;

/// `e^{iθk}` with the product `θk` carried in double-double and reduced
/// modulo `2π` before the trigonometric call, so large `k` keeps full
/// accuracy.
pub fn unimodular_power(theta: f64, k: usize) -> C64 {
    let kf = k as f64;
    let hi = theta * kf;
    let lo = theta.mul_add(kf, -hi);
    let q = (hi / TWO_PI_HI).round();
    let r = (-q).mul_add(TWO_PI_HI, hi);
    let r = (-q).mul_add(TWO_PI_LO, r) + lo;
    let (s, c) = r.sin_cos();
    C64::new(c, s)
}

/// A weight on `ℕ^d`, evaluated at indices with all components `≥ 1`.
pub trait Weight {
    fn dim(&self) -> usize;
    fn eval(&self, k: &[usize]) -> C64;
    /// Declared `sup_k |a(k)|`.
    fn bound(&self) -> f64;
}

impl<W: Weight + ?Sized> Weight for &W {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, k: &[usize]) -> C64 {
        (**self).eval(k)
    }
    fn bound(&self) -> f64 {
        (**self).bound()
    }
}

/// `Re a(k)` as a weight.
pub struct RealPart<W>(pub W);
/// `Im a(k)` as a weight.
pub struct ImagPart<W>(pub W);

impl<W: Weight> Weight for RealPart<W> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, k: &[usize]) -> C64 {
        C64::new(self.0.eval(k).re, 0.0)
    }
    fn bound(&self) -> f64 {
        self.0.bound()
    }
}

impl<W: Weight> Weight for ImagPart<W> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, k: &[usize]) -> C64 {
        C64::new(self.0.eval(k).im, 0.0)
    }
    fn bound(&self) -> f64 {
        self.0.bound()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm {
    pub coefficient: C64,
    /// Angles in `[0, 2π)`, one per axis.
    pub phases: Vec<f64>,
}

impl TrigTerm {
    /// `Π_i e^{iθ_i k_i}`.
    pub fn character(&self, k: &[usize]) -> C64 {
        self.phases
            .iter()
            .zip(k)
            .fold(C64::new(1.0, 0.0), |acc, (&t, &ki)| acc * unimodular_power(t, ki))
    }

    /// `g_i = e^{iθ_i}`.
    pub fn generator(&self, axis: usize) -> C64 {
        unimodular_power(self.phases[axis], 1)
    }
}

/// `P(k) = Σ_j c_j Π_i e^{iθ_{j,i} k_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    /// Phases are reduced into `[0, 2π)`; an empty term list is the zero
    /// polynomial.
    pub fn new(dim: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Structural("weight dimension must be positive".into()));
        }
        let mut out = Vec::with_capacity(terms.len());
        for (j, mut t) in terms.into_iter().enumerate() {
            if t.phases.len() != dim {
                return Err(Error::Structural(format!(
                    "term {j} has {} phases, expected {dim}",
                    t.phases.len()
                )));
            }
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(Error::Numeric(format!("term {j} has a non-finite coefficient")));
            }
            for th in t.phases.iter_mut() {
                if !th.is_finite() {
                    return Err(Error::Numeric(format!("term {j} has a non-finite phase")));
                }
                let r = *th - 2.0 * PI * (*th / (2.0 * PI)).floor();
                *th = if r >= 2.0 * PI { 0.0 } else { r };
            }
            out.push(t);
        }
        Ok(TrigPolynomial { dim, terms: out })
    }

    pub fn constant(dim: usize, c: C64) -> Result<Self> {
        Self::new(
            dim,
            vec![TrigTerm {
                coefficient: c,
                phases: vec![0.0; dim],
            }],
        )
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    /// `Σ_j |c_j|`, an upper bound for `|P|` on all of `ℕ^d`.
    pub fn l1_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    pub fn scaled(&self, f: f64) -> Self {
        let mut p = self.clone();
        for t in &mut p.terms {
            t.coefficient *= f;
        }
        p
    }

    /// `self − other` as a single term list.
    pub fn difference(&self, other: &TrigPolynomial) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Structural("weight dimensions differ".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| TrigTerm {
            coefficient: -t.coefficient,
            phases: t.phases.clone(),
        }));
        Ok(TrigPolynomial { dim: self.dim, terms })
    }
}

impl Weight for TrigPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, k: &[usize]) -> C64 {
        self.terms
            .iter()
            .fold(C64::new(0.0, 0.0), |acc, t| acc + t.coefficient * t.character(k))
    }

    fn bound(&self) -> f64 {
        self.l1_bound()
    }
}

/// Closed-form perturbation `η(k) = a(k) − base(k)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation {
    Zero,
    /// `c / m(k)^α`, `α ≥ 0`.
    Decay { coefficient: C64, alpha: f64 },
    /// `values[(k_1 + ⋯ + k_d) mod L]`, with `Σ values = 0`.
    Periodic { values: Vec<C64> },
    /// `amplitude · m(k)^{−β} · u(seed, k)` with `u ∈ [−1, 1)` from a
    /// counter-based hash of `(seed, k)`.
    SeededNoise { amplitude: f64, beta: f64, seed: u64 },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[−1, 1)` keyed by `(seed, k)`.
pub fn keyed_uniform(seed: u64, k: &[usize]) -> f64 {
    let mut h = splitmix64(seed);
    for &ki in k {
        h = splitmix64(h ^ ki as u64);
    }
    (h >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0
}

fn min_component(k: &[usize]) -> usize {
    k.iter().copied().min().unwrap_or(0)
}

impl Perturbation {
    fn validate(&self) -> Result<()> {
        match self {
            Perturbation::Zero => Ok(()),
            Perturbation::Decay { coefficient, alpha } => {
                if !(coefficient.re.is_finite() && coefficient.im.is_finite()) {
                    return Err(Error::Config("decay coefficient must be finite".into()));
                }
                if !(alpha.is_finite() && *alpha >= 0.0) {
                    return Err(Error::Config(format!("decay exponent {alpha} must be >= 0")));
                }
                Ok(())
            }
            Perturbation::Periodic { values } => {
                if values.is_empty() {
                    return Err(Error::Config("periodic perturbation needs values".into()));
                }
                let total: C64 = values.iter().sum();
                let scale: f64 = values.iter().map(|v| v.norm()).sum();
                if total.norm() > 1e-12 * (1.0 + scale) {
                    return Err(Error::Config(format!(
                        "periodic perturbation must have zero mean (sum {total})"
                    )));
                }
                Ok(())
            }
            Perturbation::SeededNoise {
                amplitude, beta, ..
            } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::Config("noise amplitude must be finite and >= 0".into()));
                }
                if !(beta.is_finite() && *beta >= 0.0) {
                    return Err(Error::Config("noise decay exponent must be >= 0".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, k: &[usize]) -> C64 {
        match self {
            Perturbation::Zero => C64::new(0.0, 0.0),
            Perturbation::Decay { coefficient, alpha } => {
                let m = min_component(k) as f64;
                if *alpha == 1.0 {
                    coefficient / m
                } else {
                    coefficient / m.powf(*alpha)
                }
            }
            Perturbation::Periodic { values } => {
                let s = k.iter().fold(0usize, |acc, &ki| (acc + ki % values.len()) % values.len());
                values[s]
            }
            Perturbation::SeededNoise {
                amplitude,
                beta,
                seed,
            } => {
                let m = min_component(k) as f64;
                C64::new(amplitude * m.powf(-*beta) * keyed_uniform(*seed, k), 0.0)
            }
        }
    }

    /// `sup_k |η(k)|` over `k ≥ 1`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Perturbation::Zero => 0.0,
            Perturbation::Decay { coefficient, .. } => coefficient.norm(),
            Perturbation::Periodic { values } => {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            Perturbation::SeededNoise { amplitude, .. } => *amplitude,
        }
    }

    fn scaled(&self, f: f64) -> Self {
        match self {
            Perturbation::Zero => Perturbation::Zero,
            Perturbation::Decay { coefficient, alpha } => Perturbation::Decay {
                coefficient: coefficient * f,
                alpha: *alpha,
            },
            Perturbation::Periodic { values } => Perturbation::Periodic {
                values: values.iter().map(|v| v * f).collect(),
            },
            Perturbation::SeededNoise {
                amplitude,
                beta,
                seed,
            } => Perturbation::SeededNoise {
                amplitude: amplitude * f.abs(),
                beta: *beta,
                seed: if f < 0.0 { !*seed } else { *seed },
            },
        }
    }
}

/// `a(k) = base(k) + η(k)` with declared trigonometric approximants per
/// `ε`-level.
#[derive(Clone, Debug, PartialEq)]
pub struct BesicovitchWeight {
    base: TrigPolynomial,
    perturbation: Perturbation,
    levels: Vec<(f64, TrigPolynomial)>,
    bound: f64,
}

impl BesicovitchWeight {
    /// Without an explicit bound, `Σ|c_j| + sup|η|` is declared.
    pub fn new(
        base: TrigPolynomial,
        perturbation: Perturbation,
        mut levels: Vec<(f64, TrigPolynomial)>,
        bound: Option<f64>,
    ) -> Result<Self> {
        perturbation.validate()?;
        for (eps, p) in &levels {
            if !(eps.is_finite() && *eps > 0.0) {
                return Err(Error::Config(format!("approximant level {eps} must be > 0")));
            }
            if p.dim != base.dim {
                return Err(Error::Structural(format!(
                    "approximant at level {eps} has dimension {}, expected {}",
                    p.dim, base.dim
                )));
            }
        }
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        let bound = match bound {
            Some(b) if b.is_finite() && b >= 0.0 => b,
            Some(b) => return Err(Error::Config(format!("declared bound {b} is invalid"))),
            None => base.l1_bound() + perturbation.sup_abs(),
        };
        Ok(BesicovitchWeight {
            base,
            perturbation,
            levels,
            bound,
        })
    }

    /// A polynomial weight viewed as a Besicovitch weight that is its own
    /// approximant at every level.
    pub fn from_polynomial(p: TrigPolynomial, level: f64) -> Result<Self> {
        Self::new(p.clone(), Perturbation::Zero, vec![(level, p)], None)
    }

    pub fn base(&self) -> &TrigPolynomial {
        &self.base
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn levels(&self) -> &[(f64, TrigPolynomial)] {
        &self.levels
    }

    /// Approximant for `ε`: the finest declared level `ε' ≤ ε`.
    pub fn approximant(&self, eps: f64) -> Result<(f64, &TrigPolynomial)> {
        self.levels
            .iter()
            .rev()
            .find(|(l, _)| *l <= eps)
            .map(|(l, p)| (*l, p))
            .ok_or_else(|| Error::Config(format!("no approximant declared at level <= {eps}")))
    }

    /// `a / f` for `f > 0`; with `f = bound` the result satisfies
    /// `sup|a| ≤ 1`.
    pub fn scaled(&self, f: f64) -> Self {
        BesicovitchWeight {
            base: self.base.scaled(f),
            perturbation: self.perturbation.scaled(f),
            levels: self.levels.iter().map(|(e, p)| (*e * f.abs(), p.scaled(f))).collect(),
            bound: self.bound * f.abs(),
        }
    }

    pub fn normalized(&self) -> Self {
        if self.bound > 0.0 {
            self.scaled(1.0 / self.bound)
        } else {
            self.clone()
        }
    }
}

impl Weight for BesicovitchWeight {
    fn dim(&self) -> usize {
        self.base.dim
    }

    fn eval(&self, k: &[usize]) -> C64 {
        self.base.eval(k) + self.perturbation.eval(k)
    }

    fn bound(&self) -> f64 {
        self.bound
    }
}

/// Either weight family, as stored in scenarios.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    Trig(TrigPolynomial),
    Besicovitch(BesicovitchWeight),
}

impl WeightFamily {
    pub fn as_trig(&self) -> Option<&TrigPolynomial> {
        match self {
            WeightFamily::Trig(p) => Some(p),
            WeightFamily::Besicovitch(_) => None,
        }
    }

    pub fn normalized(&self) -> Self {
        match self {
            WeightFamily::Trig(p) => {
                let b = p.l1_bound();
                WeightFamily::Trig(if b > 0.0 { p.scaled(1.0 / b) } else { p.clone() })
            }
            WeightFamily::Besicovitch(w) => WeightFamily::Besicovitch(w.normalized()),
        }
    }
}

impl Weight for WeightFamily {
    fn dim(&self) -> usize {
        match self {
            WeightFamily::Trig(p) => p.dim(),
            WeightFamily::Besicovitch(w) => w.dim(),
        }
    }

    fn eval(&self, k: &[usize]) -> C64 {
        match self {
            WeightFamily::Trig(p) => p.eval(k),
            WeightFamily::Besicovitch(w) => w.eval(k),
        }
    }

    fn bound(&self) -> f64 {
        match self {
            WeightFamily::Trig(p) => p.bound(),
            WeightFamily::Besicovitch(w) => w.bound(),
        }
    }
}

/// `a(k)` with a positivity check on `k`.
pub fn eval_weight(a: &impl Weight, k: &MultiIndex) -> Result<C64> {
    if k.dim() != a.dim() {
        return Err(Error::Structural(format!(
            "index of dimension {} for a weight on N^{}",
            k.dim(),
            a.dim()
        )));
    }
    if !k.is_positive() {
        return Err(Error::Domain(format!("weights are indexed from 1, got {k}")));
    }
    Ok(a.eval(k.components()))
}

/// Largest `|a(k)|` on the box, checked against the declared bound.
pub fn sup_bound(a: &impl Weight, sample: &IndexBox) -> Result<f64> {
    if sample.dim() != a.dim() {
        return Err(Error::Structural("box and weight dimensions differ".into()));
    }
    let mut best = 0.0f64;
    let mut witness = None;
    for k in sample.iter() {
        let v = a.eval(k.components()).norm();
        if v > best || witness.is_none() {
            best = best.max(v);
            witness = Some(k);
        }
    }
    if best > a.bound() + 1e-12 {
        return Err(Error::BoundViolated {
            bound: a.bound(),
            value: best,
            witness: witness.expect("non-empty box"),
        });
    }
    Ok(best)
}

/// Which values of `m(N)` are tested.
#[derive(Clone, Debug, PartialEq)]
pub enum Ladder {
    /// `1, 2, 4, …` and finally `m(N*)`.
    Doubling,
    /// Every `m` from `1` to `m(N*)`.
    Every,
    /// Given rungs, clipped to `m(N*)`.
    Explicit(Vec<usize>),
}

impl Ladder {
    pub fn rungs(&self, top: usize) -> Vec<usize> {
        let mut r = match self {
            Ladder::Doubling => {
                let mut v = Vec::new();
                let mut m = 1usize;
                while m < top {
                    v.push(m);
                    m = m.saturating_mul(2);
                }
                v.push(top);
                v
            }
            Ladder::Every => (1..=top).collect(),
            Ladder::Explicit(v) => v.iter().copied().filter(|&m| m >= 1 && m <= top).collect(),
        };
        r.sort_unstable();
        r.dedup();
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BesicovitchCheck {
    pub epsilon: f64,
    /// Largest box `N*`; rung boxes scale it so that `m(N) = m`.
    pub cutoff: MultiIndex,
    pub ladder: Ladder,
    /// Rungs with `m(N)` at least this must pass.
    pub onset: usize,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyRow {
    pub m: usize,
    pub shape: MultiIndex,
    pub discrepancy: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BesicovitchReport {
    pub epsilon: f64,
    /// Level of the approximant used.
    pub level: f64,
    pub rows: Vec<DiscrepancyRow>,
    pub configured_onset: usize,
    /// Smallest rung from which every later rung passes.
    pub observed_onset: Option<usize>,
    pub passed: bool,
    pub evidence: &'static str,
}

/// Rung box with `m(N) = m`, proportional to `cutoff`.
pub fn rung_shape(cutoff: &MultiIndex, m: usize) -> MultiIndex {
    let top = cutoff.min_component().max(1);
    let comps = cutoff
        .components()
        .iter()
        .map(|&n| (m * n).div_ceil(top).max(1))
        .collect();
    MultiIndex::new(comps).expect("non-empty")
}

/// `D(N) = |N|⁻¹ Σ_{k ≤ N} |a(k) − P_ε(k)|` on a box ladder.
pub fn verify_besicovitch(a: &BesicovitchWeight, check: &BesicovitchCheck) -> Result<BesicovitchReport> {
    if !(check.epsilon.is_finite() && check.epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon {} must be > 0", check.epsilon)));
    }
    if check.cutoff.dim() != a.dim() || !check.cutoff.is_positive() {
        return Err(Error::Structural(format!(
            "cutoff {} does not fit a weight on N^{}",
            check.cutoff,
            a.dim()
        )));
    }
    let (level, approx) = a.approximant(check.epsilon)?;
    let points = check.cutoff.volume();
    if points > check.budget as u128 {
        return Err(Error::Budget {
            points,
            budget: check.budget,
        });
    }
    let shape: Vec<usize> = check.cutoff.components().to_vec();
    let region = IndexBox::from_origin(check.cutoff.clone())?;
    let mut table: Vec<C64> = region
        .iter()
        .map(|k| C64::new((a.eval(k.components()) - approx.eval(k.components())).norm(), 0.0))
        .collect();
    prefix_sums(&mut table, &shape, 1);

    let mut rows = Vec::new();
    for m in check.ladder.rungs(check.cutoff.min_component()) {
        let n = rung_shape(&check.cutoff, m);
        let at = n
            .components()
            .iter()
            .zip(&shape)
            .fold(0usize, |acc, (&ni, &len)| acc * len + (ni - 1));
        let discrepancy = table[at].re / n.volume() as f64;
        rows.push(DiscrepancyRow {
            m,
            shape: n,
            discrepancy,
            passed: discrepancy < check.epsilon,
        });
    }
    let mut observed_onset = None;
    for row in rows.iter().rev() {
        if !row.passed {
            break;
        }
        observed_onset = Some(row.m);
    }
    let passed = rows
        .iter()
        .filter(|r| r.m >= check.onset)
        .all(|r| r.passed);
    Ok(BesicovitchReport {
        epsilon: check.epsilon,
        level,
        rows,
        configured_onset: check.onset,
        observed_onset,
        passed,
        evidence: FINITE_BOX_EVIDENCE,
    })
}
