//! Finite-dimensional von Neumann algebras `⊕_b M_{n_b}(ℂ)` with a weighted
//! block trace, and their elements.
//!
//! Everything spectral (modulus, `L_p` norms, positive parts, spectral
//! projections) goes through a blockwise Hermitian eigendecomposition.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

pub type C64 = Complex64;
pub type Block = DMatrix<C64>;

/// Default tolerance for Hermiticity and positivity decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

const HINT_TOL: f64 = 1e-12;
/// Eigenvalues this close to a spectral-interval endpoint are reported.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// `M = ⊕_b M_{n_b}(ℂ)` with trace `τ(x) = Σ_b w_b tr(x_b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    block_dims: Vec<usize>,
    trace_weights: Vec<f64>,
    offsets: Vec<usize>,
}

impl Algebra {
    pub fn new(block_dims: Vec<usize>, trace_weights: Vec<f64>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::Structural("algebra needs at least one block".into()));
        }
        if block_dims.len() != trace_weights.len() {
            return Err(Error::Structural(format!(
                "{} block dimensions but {} trace weights",
                block_dims.len(),
                trace_weights.len()
            )));
        }
        if block_dims.contains(&0) {
            return Err(Error::Structural("block dimensions must be >= 1".into()));
        }
        if trace_weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::Structural(
                "trace weights must be finite and > 0".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut acc = 0;
        for &n in &block_dims {
            offsets.push(acc);
            acc += n * n;
        }
        Ok(Algebra {
            block_dims,
            trace_weights,
            offsets,
        })
    }

    /// `M_n(ℂ)` with the ordinary trace.
    pub fn matrix(n: usize) -> Result<Self> {
        Self::new(alloc::vec![n], alloc::vec![1.0])
    }

    /// `ℓ_∞` on `n` points with counting measure: `n` one-dimensional blocks.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::new(alloc::vec![1; n], alloc::vec![1.0; n])
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn trace_weights(&self) -> &[f64] {
        &self.trace_weights
    }

    pub fn weight(&self, block: usize) -> f64 {
        self.trace_weights[block]
    }

    /// `τ(1)`.
    pub fn total_trace(&self) -> f64 {
        self.block_dims
            .iter()
            .zip(&self.trace_weights)
            .map(|(&n, &w)| w * n as f64)
            .collect::<NeumaierSum>()
            .value()
    }

    /// Complex dimension `Σ_b n_b²`.
    pub fn coord_dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// Flat coordinate of the matrix unit `e_{ij}` of block `b` (row-major).
    pub fn unit_coord(&self, block: usize, i: usize, j: usize) -> usize {
        self.offsets[block] + i * self.block_dims[block] + j
    }

    /// Inverse of [`Algebra::unit_coord`].
    pub fn decode_coord(&self, coord: usize) -> (usize, usize, usize) {
        let block = match self.offsets.binary_search(&coord) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        let n = self.block_dims[block];
        let local = coord - self.offsets[block];
        (block, local / n, local % n)
    }

    pub fn coord_offset(&self, block: usize) -> usize {
        self.offsets[block]
    }
}

/// Eigendecomposition of one Hermitian block, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    pub values: Vec<f64>,
    pub vectors: Block,
}

impl BlockEigen {
    /// `V diag(f(λ)) V*`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> Block {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn eigh(m: &Block) -> BlockEigen {
    let n = m.nrows();
    if n == 1 {
        return BlockEigen {
            values: alloc::vec![m[(0, 0)].re],
            vectors: Block::identity(1, 1),
        };
    }
    let h = hermitize(m);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Block::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    BlockEigen { values, vectors }
}

/// `(m + m*)/2`.
pub fn hermitize(m: &Block) -> Block {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Singular values of a block (unordered).
pub fn singular_values(m: &Block) -> Vec<f64> {
    if m.nrows() == 1 {
        return alloc::vec![m[(0, 0)].norm()];
    }
    m.clone().singular_values().iter().copied().collect()
}

/// An element `x = ⊕_b x_b` of an [`Algebra`].
///
/// Arithmetic operators panic when the operands live in different algebras;
/// the fallible entry points of the crate check compatibility first.
#[derive(Clone, Debug)]
pub struct Element {
    algebra: Arc<Algebra>,
    blocks: Vec<Block>,
    hermitian_hint: Option<bool>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.blocks == other.blocks
    }
}

impl Element {
    pub fn zeros(algebra: &Arc<Algebra>) -> Self {
        let blocks = algebra
            .block_dims
            .iter()
            .map(|&n| Block::zeros(n, n))
            .collect();
        Element {
            algebra: algebra.clone(),
            blocks,
            hermitian_hint: Some(true),
        }
    }

    pub fn identity(algebra: &Arc<Algebra>) -> Self {
        Self::scalar(algebra, C64::new(1.0, 0.0))
    }

    pub fn scalar(algebra: &Arc<Algebra>, c: C64) -> Self {
        let blocks = algebra
            .block_dims
            .iter()
            .map(|&n| Block::from_diagonal_element(n, n, c))
            .collect();
        Element {
            algebra: algebra.clone(),
            blocks,
            hermitian_hint: Some(c.im == 0.0),
        }
    }

    pub fn from_blocks(algebra: &Arc<Algebra>, blocks: Vec<Block>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::Structural(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (b, (blk, &n)) in blocks.iter().zip(&algebra.block_dims).enumerate() {
            if blk.nrows() != n || blk.ncols() != n {
                return Err(Error::Structural(format!(
                    "block {b} has shape {}x{}, algebra expects {n}x{n}",
                    blk.nrows(),
                    blk.ncols()
                )));
            }
        }
        Ok(Element {
            algebra: algebra.clone(),
            blocks,
            hermitian_hint: None,
        })
    }

    /// Builds an element from flat coordinates (block-major, row-major).
    pub fn from_flat(algebra: &Arc<Algebra>, coords: &[C64]) -> Result<Self> {
        if coords.len() != algebra.coord_dim() {
            return Err(Error::Structural(format!(
                "expected {} coordinates, got {}",
                algebra.coord_dim(),
                coords.len()
            )));
        }
        let blocks = algebra
            .block_dims
            .iter()
            .zip(&algebra.offsets)
            .map(|(&n, &off)| Block::from_row_slice(n, n, &coords[off..off + n * n]))
            .collect();
        Ok(Element {
            algebra: algebra.clone(),
            blocks,
            hermitian_hint: None,
        })
    }

    pub fn to_flat(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.algebra.coord_dim());
        for blk in &self.blocks {
            let n = blk.nrows();
            for i in 0..n {
                for j in 0..n {
                    out.push(blk[(i, j)]);
                }
            }
        }
        out
    }

    /// Matrix unit `e_{ij}` of block `b`.
    pub fn matrix_unit(algebra: &Arc<Algebra>, block: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zeros(algebra);
        x.blocks[block][(i, j)] = C64::new(1.0, 0.0);
        x.hermitian_hint = Some(i == j);
        x
    }

    /// Applies `f` to every block.
    pub fn map_blocks(&self, f: impl Fn(usize, &Block) -> Block) -> Self {
        Element {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(b, blk)| f(b, blk))
                .collect(),
            hermitian_hint: None,
        }
    }

    /// Records that the element is Hermitian; rejected unless
    /// `max|x − x*| ≤ 1e-12·(1 + max|x|)`.
    pub fn with_hermitian_hint(mut self, hermitian: bool) -> Result<Self> {
        if hermitian {
            let dev = self.hermitian_deviation();
            if dev > HINT_TOL * (1.0 + self.max_abs_entry()) {
                return Err(Error::Structural(format!(
                    "hermitian hint set but max|x - x*| = {dev:.3e}"
                )));
            }
        }
        self.hermitian_hint = Some(hermitian);
        Ok(self)
    }

    pub fn hermitian_hint(&self) -> Option<bool> {
        self.hermitian_hint
    }

    fn hinted(mut self, hint: Option<bool>) -> Self {
        self.hermitian_hint = hint;
        self
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &Block {
        &self.blocks[b]
    }

    pub fn block_mut(&mut self, b: usize) -> &mut Block {
        self.hermitian_hint = None;
        &mut self.blocks[b]
    }

    pub fn same_algebra(&self, other: &Element) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || *self.algebra == *other.algebra
    }

    pub fn check_same_algebra(&self, other: &Element) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::Structural(
                "elements belong to different algebras".into(),
            ))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Numeric("element has non-finite entries".into()))
        }
    }

    pub fn adjoint(&self) -> Self {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let hint = if c.im == 0.0 { self.hermitian_hint } else { None };
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
            hermitian_hint: hint,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `xy − yx`.
    pub fn commutator(&self, other: &Element) -> Self {
        &(self * other) - &(other * self)
    }

    /// `τ(x)`.
    pub fn trace(&self) -> C64 {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for (blk, &w) in self.blocks.iter().zip(&self.algebra.trace_weights) {
            let t = blk.trace();
            re.add(w * t.re);
            im.add(w * t.im);
        }
        C64::new(re.value(), im.value())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |(x − x*)_{ij}|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for blk in &self.blocks {
            let n = blk.nrows();
            for i in 0..n {
                for j in i..n {
                    dev = dev.max((blk[(i, j)] - blk[(j, i)].conj()).norm());
                }
            }
        }
        dev
    }

    /// Hermitian within `tol·(1 + max|x|)` entrywise.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.hermitian_hint == Some(true) {
            return true;
        }
        self.hermitian_deviation() <= tol * (1.0 + self.max_abs_entry())
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        if self.is_hermitian(tol) {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "element is not Hermitian (max|x - x*| = {:.3e})",
                self.hermitian_deviation()
            )))
        }
    }

    /// `(x + x*)/2`.
    pub fn real_part(&self) -> Self {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(hermitize).collect(),
            hermitian_hint: Some(true),
        }
    }

    /// `(x − x*)/(2i)`.
    pub fn imag_part(&self) -> Self {
        let half_over_i = C64::new(0.0, -0.5);
        Element {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| (b - b.adjoint()) * half_over_i)
                .collect(),
            hermitian_hint: Some(true),
        }
    }

    /// Blockwise eigendecomposition of the Hermitian part.
    pub fn eigh(&self) -> Vec<BlockEigen> {
        self.blocks.iter().map(eigh).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh()
            .iter()
            .map(BlockEigen::min)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigh()
            .iter()
            .map(BlockEigen::max)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Functional calculus `f(h)` of the Hermitian part `h`.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| eigh(b).reconstruct(&f))
            .collect();
        Element {
            algebra: self.algebra.clone(),
            blocks,
            hermitian_hint: Some(true),
        }
    }

    /// `h₊` for the Hermitian part `h`.
    pub fn positive_part(&self) -> Self {
        self.hermitian_map(|l| l.max(0.0))
    }

    /// `h₋ = (−h)₊`.
    pub fn negative_part(&self) -> Self {
        self.hermitian_map(|l| (-l).max(0.0))
    }

    /// `|x| = (x*x)^{1/2}`.
    pub fn modulus(&self) -> Result<Self> {
        self.require_finite()?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| eigh(&(b.adjoint() * b)).reconstruct(|l| l.max(0.0).sqrt()))
            .collect();
        Ok(Element {
            algebra: self.algebra.clone(),
            blocks,
            hermitian_hint: Some(true),
        })
    }

    /// Singular values per block.
    pub fn singular_values(&self) -> Vec<Vec<f64>> {
        self.blocks.iter().map(singular_values).collect()
    }

    /// `‖x‖_p = τ(|x|^p)^{1/p}`; `p = ∞` is the operator norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        self.require_finite()?;
        let svals = self.singular_values();
        let smax = svals
            .iter()
            .flat_map(|v| v.iter().copied())
            .fold(0.0, f64::max);
        if p == f64::INFINITY || smax == 0.0 {
            return Ok(smax);
        }
        let mut acc = NeumaierSum::new();
        for (vals, &w) in svals.iter().zip(&self.algebra.trace_weights) {
            for &s in vals {
                acc.add(w * (s / smax).powf(p));
            }
        }
        Ok(smax * acc.value().powf(1.0 / p))
    }

    /// Hermitian within `tol` and smallest eigenvalue `≥ −tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_finite() && self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// `x = x₀ + i x₁ − x₂ − i x₃` with each `x_k ⪰ 0`: `x₀, x₂` are the
    /// positive and negative parts of `Re x`, `x₁, x₃` those of `Im x`.
    pub fn decompose_four_positives(&self) -> FourPositives {
        let re = self.real_part();
        let im = self.imag_part();
        let (re_pos, re_neg) = split_signs(&re);
        let (im_pos, im_neg) = split_signs(&im);
        FourPositives {
            parts: [re_pos, im_pos, re_neg, im_neg],
        }
    }

    /// Projection onto the eigenvectors of the Hermitian element with
    /// eigenvalue in the closed interval `[lo, hi]`.
    pub fn spectral_projection(&self, lo: f64, hi: f64) -> Result<SpectralProjection> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("interval endpoints must not be NaN".into()));
        }
        self.require_finite()?;
        self.require_hermitian(DEFAULT_TOL)?;
        let mut warnings = Vec::new();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (b, blk) in self.blocks.iter().enumerate() {
            let eig = eigh(blk);
            for &lam in &eig.values {
                for endpoint in [lo, hi] {
                    if endpoint.is_finite() && (lam - endpoint).abs() <= ENDPOINT_TOL {
                        warnings.push(EndpointWarning {
                            block: b,
                            eigenvalue: lam,
                            endpoint,
                        });
                    }
                }
            }
            blocks.push(eig.reconstruct(|l| if lo <= l && l <= hi { 1.0 } else { 0.0 }));
        }
        let element = Element {
            algebra: self.algebra.clone(),
            blocks,
            hermitian_hint: Some(true),
        };
        Ok(SpectralProjection {
            projection: Projection(element),
            warnings,
        })
    }
}

fn split_signs(h: &Element) -> (Element, Element) {
    let mut pos = Vec::with_capacity(h.blocks.len());
    let mut neg = Vec::with_capacity(h.blocks.len());
    for blk in &h.blocks {
        let eig = eigh(blk);
        pos.push(eig.reconstruct(|l| l.max(0.0)));
        neg.push(eig.reconstruct(|l| (-l).max(0.0)));
    }
    let mk = |blocks| Element {
        algebra: h.algebra.clone(),
        blocks,
        hermitian_hint: Some(true),
    };
    (mk(pos), mk(neg))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::Domain(format!("exponent p = {p} is outside [1, inf]")))
    } else {
        Ok(())
    }
}

/// Hölder conjugate `q` with `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p == f64::INFINITY {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Result of [`Element::decompose_four_positives`].
#[derive(Clone, Debug)]
pub struct FourPositives {
    pub parts: [Element; 4],
}

impl FourPositives {
    /// `Σ_k i^k x_k`.
    pub fn recombine(&self) -> Element {
        let [x0, x1, x2, x3] = &self.parts;
        let i = C64::new(0.0, 1.0);
        let mut out = x0 - x2;
        out += &(x1 - x3).scale(i);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndpointWarning {
    pub block: usize,
    pub eigenvalue: f64,
    pub endpoint: f64,
}

#[derive(Clone, Debug)]
pub struct SpectralProjection {
    pub projection: Projection,
    pub warnings: Vec<EndpointWarning>,
}

/// A self-adjoint idempotent element.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection(Element);

impl Projection {
    /// Validates `‖e² − e‖ ≤ 1e-10`, `‖e − e*‖ ≤ 1e-10` (max entry) and a
    /// spectrum within `1e-8` of `{0, 1}`.
    pub fn new(e: Element) -> Result<Self> {
        e.require_finite()?;
        if e.hermitian_deviation() > 1e-10 {
            return Err(Error::Structural("projection is not self-adjoint".into()));
        }
        let sq = &e * &e;
        let idem = (&sq - &e).max_abs_entry();
        if idem > 1e-10 {
            return Err(Error::Structural(format!(
                "projection is not idempotent (max|e^2 - e| = {idem:.3e})"
            )));
        }
        for eig in e.eigh() {
            if eig
                .values
                .iter()
                .any(|&l| l.abs() > 1e-8 && (l - 1.0).abs() > 1e-8)
            {
                return Err(Error::Structural(
                    "projection has eigenvalues outside {0, 1}".into(),
                ));
            }
        }
        Ok(Projection(e.hinted(Some(true))))
    }

    pub fn identity(algebra: &Arc<Algebra>) -> Self {
        Projection(Element::identity(algebra))
    }

    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        Projection(Element::zeros(algebra))
    }

    pub fn element(&self) -> &Element {
        &self.0
    }

    pub fn into_element(self) -> Element {
        self.0
    }

    /// `e⊥ = 1 − e`.
    pub fn complement(&self) -> Projection {
        let one = Element::identity(self.0.algebra());
        Projection((&one - &self.0).hinted(Some(true)))
    }

    /// `τ(e)`, real.
    pub fn tau(&self) -> f64 {
        self.0.trace().re
    }

    /// `e ∧ f`, the projection onto `range(e) ∩ range(f)`, computed as the
    /// eigenvalue-2 spectral projection of `e + f`.
    pub fn meet(&self, other: &Projection) -> Result<Projection> {
        self.0.check_same_algebra(&other.0)?;
        let sum = (&self.0 + &other.0).hinted(Some(true));
        Ok(sum.spectral_projection(2.0 - 1e-6, f64::INFINITY)?.projection)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt, $hint:expr) => {
        impl $trait<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                assert!(self.same_algebra(rhs), "elements belong to different algebras");
                let blocks = self
                    .blocks
                    .iter()
                    .zip(&rhs.blocks)
                    .map(|(a, b)| a $op b)
                    .collect();
                let hint = match (self.hermitian_hint, rhs.hermitian_hint) {
                    (Some(true), Some(true)) if $hint => Some(true),
                    _ => None,
                };
                Element { algebra: self.algebra.clone(), blocks, hermitian_hint: hint }
            }
        }
    };
}

binop!(Add, add, +, true);
binop!(Sub, sub, -, true);
binop!(Mul, mul, *, false);

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        assert!(self.same_algebra(rhs), "elements belong to different algebras");
        for (a, b) in self.blocks.iter_mut().zip(&rhs.blocks) {
            *a += b;
        }
        if rhs.hermitian_hint != Some(true) {
            self.hermitian_hint = None;
        }
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale_real(-1.0)
    }
}
