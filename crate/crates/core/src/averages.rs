//! Weighted multiparameter averages
//! `A_N(x) = |N|⁻¹ Σ_{1 ≤ k ≤ N} a(k) T^k(x)` and their limits.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{Element, C64};
use crate::contraction::{apply_power, cesaro_limit_projection, AbsoluteContraction, IllConditioned};
use crate::error::{Error, Result};
use crate::index::{IndexBox, MultiIndex};
use crate::operator::{LinearMap, LinearOperator};
use crate::sum::{prefix_sums, ComplexAccumulator};
use crate::weights::{unimodular_power, ImagPart, RealPart, TrigPolynomial, Weight, WeightFamily};

/// Default cap on `|N|` for the direct and grid evaluators.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Evaluator {
    Direct,
    Grid,
    Factorized,
}

impl Evaluator {
    pub fn name(&self) -> &'static str {
        match self {
            Evaluator::Direct => "direct",
            Evaluator::Grid => "grid",
            Evaluator::Factorized => "factorized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(Evaluator::Direct),
            "grid" => Some(Evaluator::Grid),
            "factorized" => Some(Evaluator::Factorized),
            _ => None,
        }
    }
}

/// `A_N` for every `N` of a box.
#[derive(Clone, Debug)]
pub struct AverageFamily {
    pub region: IndexBox,
    values: Vec<Element>,
    pub evaluator: Evaluator,
}

impl AverageFamily {
    pub fn get(&self, n: &MultiIndex) -> Option<&Element> {
        self.region.position(n).map(|p| &self.values[p])
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &Element)> + '_ {
        self.region.iter().zip(self.values.iter())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_setup(dim: usize, maps: &[AbsoluteContraction], x: &Element, n: &MultiIndex) -> Result<()> {
    if maps.len() != dim || n.dim() != dim {
        return Err(Error::Structural(format!(
            "weight on N^{dim}, {} contractions, box of dimension {}",
            maps.len(),
            n.dim()
        )));
    }
    if !n.is_positive() {
        return Err(Error::Domain(format!("box corner {n} must be >= 1")));
    }
    for t in maps {
        if **t.algebra() != **x.algebra() {
            return Err(Error::Structural(
                "element and contraction live on different algebras".into(),
            ));
        }
    }
    Ok(())
}

fn check_budget(n: &MultiIndex, budget: u64) -> Result<()> {
    let points = n.volume();
    if points > budget as u128 {
        return Err(Error::Budget { points, budget });
    }
    Ok(())
}

/// `A_N(x)` by explicit summation over the box.
pub fn weighted_average_direct(
    a: &impl Weight,
    maps: &[AbsoluteContraction],
    x: &Element,
    n: &MultiIndex,
    budget: u64,
) -> Result<Element> {
    check_setup(a.dim(), maps, x, n)?;
    check_budget(n, budget)?;
    let d = n.dim();
    let alg = x.algebra();
    let mut acc = ComplexAccumulator::new(alg.coord_dim());
    let last = n.components()[d - 1];
    let head_corner = MultiIndex::new(n.components()[..d - 1].to_vec());
    let heads: Vec<Vec<usize>> = match head_corner {
        Ok(h) => IndexBox::from_origin(h)?.iter().map(Vec::from).collect(),
        Err(_) => vec![Vec::new()],
    };
    let mut k = vec![0usize; d];
    for head in heads {
        let mut y = if head.is_empty() {
            x.clone()
        } else {
            apply_power(&maps[..d - 1], &MultiIndex::new(head.clone())?, x)?
        };
        k[..d - 1].copy_from_slice(&head);
        for kd in 1..=last {
            y = maps[d - 1].apply(&y);
            k[d - 1] = kd;
            acc.add_scaled(a.eval(&k), &y.to_flat());
        }
    }
    let scale = C64::new(1.0 / n.volume() as f64, 0.0);
    let coords: Vec<C64> = acc.values().into_iter().map(|v| v * scale).collect();
    Element::from_flat(alg, &coords)
}

/// `M_N(T)x`, the unweighted average.
pub fn ergodic_average(
    maps: &[AbsoluteContraction],
    x: &Element,
    n: &MultiIndex,
    budget: u64,
) -> Result<Element> {
    weighted_average_direct(&Unit(n.dim()), maps, x, n, budget)
}

struct Unit(usize);

impl Weight for Unit {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, _: &[usize]) -> C64 {
        C64::new(1.0, 0.0)
    }
    fn bound(&self) -> f64 {
        1.0
    }
}

/// `A_N` for every `N` in the box, from one pass of `T^k x` over the
/// lattice followed by compensated prefix sums along each axis.
pub fn weighted_average_grid(
    a: &impl Weight,
    maps: &[AbsoluteContraction],
    x: &Element,
    region: &IndexBox,
    budget: u64,
) -> Result<AverageFamily> {
    let top = region.upper().clone();
    check_setup(a.dim(), maps, x, &top)?;
    if !region.lower().is_positive() {
        return Err(Error::Domain("box corners must be >= 1".into()));
    }
    check_budget(&top, budget)?;
    let shape: Vec<usize> = top.components().to_vec();
    let width = x.algebra().coord_dim();
    let points: usize = shape.iter().product();
    let mut buf = vec![C64::new(0.0, 0.0); points * width];

    // depth-first over the axes: `y` holds T_j^{k_j}⋯T_1^{k_1}x
    struct Walk<'a, W: Weight> {
        a: &'a W,
        maps: &'a [AbsoluteContraction],
        shape: &'a [usize],
        width: usize,
        buf: &'a mut [C64],
        k: Vec<usize>,
    }
    impl<W: Weight> Walk<'_, W> {
        fn run(&mut self, axis: usize, mut y: Element, offset: usize) {
            for kj in 1..=self.shape[axis] {
                y = self.maps[axis].apply(&y);
                self.k[axis] = kj;
                let pos = offset * self.shape[axis] + (kj - 1);
                if axis + 1 == self.shape.len() {
                    let w = self.a.eval(&self.k);
                    let slot = &mut self.buf[pos * self.width..(pos + 1) * self.width];
                    for (s, v) in slot.iter_mut().zip(y.to_flat()) {
                        *s = w * v;
                    }
                } else {
                    self.run(axis + 1, y.clone(), pos);
                }
            }
        }
    }
    Walk {
        a,
        maps,
        shape: &shape,
        width,
        buf: &mut buf,
        k: vec![0; shape.len()],
    }
    .run(0, x.clone(), 0);

    prefix_sums(&mut buf, &shape, width);
    let full = IndexBox::from_origin(top)?;
    let mut values = Vec::new();
    for n in region.iter() {
        let pos = full.position(&n).expect("inside");
        let scale = 1.0 / n.volume() as f64;
        let coords: Vec<C64> = buf[pos * width..(pos + 1) * width]
            .iter()
            .map(|v| v * scale)
            .collect();
        values.push(Element::from_flat(x.algebra(), &coords)?);
    }
    Ok(AverageFamily {
        region: region.clone(),
        values,
        evaluator: Evaluator::Grid,
    })
}

/// `M_N(gT)y = N⁻¹ Σ_{k=1}^N g^k T^k y` for `g = e^{iθ}`.
fn rotated_mean(t: &AbsoluteContraction, theta: f64, n: usize, y: &Element) -> Element {
    let mut acc = ComplexAccumulator::new(y.algebra().coord_dim());
    let mut z = y.clone();
    for k in 1..=n {
        z = t.apply(&z);
        acc.add_scaled(unimodular_power(theta, k), &z.to_flat());
    }
    let scale = 1.0 / n as f64;
    let coords: Vec<C64> = acc.values().into_iter().map(|v| v * scale).collect();
    Element::from_flat(y.algebra(), &coords).expect("same algebra")
}

/// `Σ_j c_j M_{N_d}(g_{j,d}T_d) ∘ ⋯ ∘ M_{N_1}(g_{j,1}T_1)(x)`, at cost
/// `O(Σ_i N_i)` applications per term.
pub fn weighted_average_factorized(
    p: &TrigPolynomial,
    maps: &[AbsoluteContraction],
    x: &Element,
    n: &MultiIndex,
) -> Result<Element> {
    check_setup(p.dim(), maps, x, n)?;
    let mut out = Element::zeros(x.algebra());
    for term in p.terms() {
        let mut y = x.clone();
        for (axis, t) in maps.iter().enumerate() {
            y = rotated_mean(t, term.phases[axis], n.components()[axis], &y);
        }
        out += &y.scale(term.coefficient);
    }
    Ok(out)
}

/// Dispatches to the chosen evaluator.
pub fn weighted_average(
    evaluator: Evaluator,
    a: &WeightFamily,
    maps: &[AbsoluteContraction],
    x: &Element,
    n: &MultiIndex,
    budget: u64,
) -> Result<Element> {
    match evaluator {
        Evaluator::Direct => weighted_average_direct(a, maps, x, n, budget),
        Evaluator::Grid => {
            let region = IndexBox::new(n.clone(), n.clone())?;
            let fam = weighted_average_grid(a, maps, x, &region, budget)?;
            Ok(fam.values.into_iter().next().expect("one point"))
        }
        Evaluator::Factorized => match a.as_trig() {
            Some(p) => weighted_average_factorized(p, maps, x, n),
            None => Err(Error::Unsupported(
                "factorized evaluation needs a trigonometric polynomial weight; use direct or grid"
                    .into(),
            )),
        },
    }
}

/// `(A^{(R)}_N x, A^{(I)}_N x)`: averages with weights `Re a` and `Im a`.
pub fn split_real_imag(
    a: &impl Weight,
    maps: &[AbsoluteContraction],
    x: &Element,
    n: &MultiIndex,
    budget: u64,
) -> Result<(Element, Element)> {
    let re = weighted_average_direct(&RealPart(a), maps, x, n, budget)?;
    let im = weighted_average_direct(&ImagPart(a), maps, x, n, budget)?;
    Ok((re, im))
}

#[derive(Clone, Debug)]
pub struct LimitOracle {
    pub value: Element,
    /// Near-kernel warnings from the Cesàro projections used.
    pub warnings: Vec<IllConditioned>,
}

/// `Σ_j c_j Q_{j,d} ∘ ⋯ ∘ Q_{j,1}(x)` with `Q_{j,i}` the Cesàro limit of
/// `g_{j,i}T_i`.
pub fn limit_oracle(p: &TrigPolynomial, maps: &[AbsoluteContraction], x: &Element) -> Result<LimitOracle> {
    check_setup(p.dim(), maps, x, &MultiIndex::diagonal(1, p.dim()))?;
    let mut cache: Vec<(usize, u64, LinearOperator)> = Vec::new();
    let mut warnings = Vec::new();
    let mut out = Element::zeros(x.algebra());
    for term in p.terms() {
        let mut y = x.clone();
        for (axis, t) in maps.iter().enumerate() {
            let theta = term.phases[axis];
            let key = theta.to_bits();
            let q = match cache.iter().find(|(a, b, _)| *a == axis && *b == key) {
                Some((_, _, q)) => q.clone(),
                None => {
                    let lim = cesaro_limit_projection(t, unimodular_power(theta, 1))?;
                    if let Some(w) = lim.warning {
                        warnings.push(w);
                    }
                    cache.push((axis, key, lim.operator.clone()));
                    lim.operator
                }
            };
            y = q.apply(&y);
        }
        out += &y.scale(term.coefficient);
    }
    Ok(LimitOracle {
        value: out,
        warnings,
    })
}
