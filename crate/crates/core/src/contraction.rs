//! Absolute contractions: positive, subunital, trace-decreasing maps.
//!
//! Every constructor enforces a sufficient condition for complete
//! positivity, so the verifier can certify positivity through the Choi
//! matrix. Contraction on `M` is checked as `T(1) ⪯ 1` and the trace
//! condition as `T†(1) ⪯ 1`, where `τ(T(x) y) = τ(x T†(y))`; for positive
//! maps both are equivalent to the cone-quantified conditions.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{eigh, Algebra, Block, Element, Projection, C64, DEFAULT_TOL};
use crate::error::{Error, KrausCondition, Result};
use crate::index::MultiIndex;
use crate::operator::{LinearMap, LinearOperator};

/// Singular values of `1 − λS` at or below this are treated as exact kernel.
pub const KERNEL_TOL: f64 = 1e-10;
/// Singular values in `(KERNEL_TOL, NEAR_KERNEL_TOL]` trigger a warning.
pub const NEAR_KERNEL_TOL: f64 = 1e-8;

/// Parameters for [`construct_contraction`].
#[derive(Clone, Debug)]
pub enum ContractionSpec {
    /// `x ↦ s·U*xU`, `U` unitary, `s ∈ (0, 1]`.
    ScaledUnitary { unitary: Element, scale: f64 },
    /// `x ↦ Σ P_i x P_i` for projections with `Σ P_i ⪯ 1`.
    Pinching { projections: Vec<Element> },
    /// `x ↦ H ∘ x` on a single-block algebra, `H ⪰ 0`, `diag(H) ≤ 1`.
    SchurMultiplier { coefficients: Element },
    /// `x ↦ Σ K_j* x K_j` with `Σ K_j*K_j ⪯ 1` and `Σ K_jK_j* ⪯ 1`.
    Kraus { operators: Vec<Element> },
    /// `x ↦ Σ w_i T_i(x)`, `w_i ≥ 0`, `Σ w_i ≤ 1`.
    ConvexCombination {
        weights: Vec<f64>,
        maps: Vec<AbsoluteContraction>,
    },
    /// `x ↦ T_n(⋯T_2(T_1(x)))`: maps are applied in list order.
    Composition { maps: Vec<AbsoluteContraction> },
    /// An arbitrary transfer matrix. Accepted when Hermiticity-preserving,
    /// subunital and trace-decreasing; flagged when the Choi test fails.
    Raw { transfer: DMatrix<C64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionKind {
    ScaledUnitary,
    Pinching,
    SchurMultiplier,
    Kraus,
    ConvexCombination,
    Composition,
    Raw,
}

impl ContractionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ContractionKind::ScaledUnitary => "scaled_unitary",
            ContractionKind::Pinching => "pinching",
            ContractionKind::SchurMultiplier => "schur_multiplier",
            ContractionKind::Kraus => "kraus",
            ContractionKind::ConvexCombination => "convex_combination",
            ContractionKind::Composition => "composition",
            ContractionKind::Raw => "raw",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    /// Choi matrix certified positive semidefinite.
    CompletelyPositive,
    /// Loaded from a raw map whose Choi matrix is not positive; positivity
    /// of the map itself is not decided.
    Unverified,
}

impl Positivity {
    pub fn name(&self) -> &'static str {
        match self {
            Positivity::CompletelyPositive => "completely_positive",
            Positivity::Unverified => "positivity_unverified",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// `λ_min(1 − T(1))`.
    pub subunital_margin: f64,
    /// `λ_min(1 − T†(1))`.
    pub trace_margin: f64,
    /// Smallest eigenvalue over the Choi blocks.
    pub choi_min_eig: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
enum Kind {
    ScaledUnitary { unitary: Element, adjoint: Element, scale: f64 },
    Pinching { projections: Vec<Element> },
    Schur { coefficients: Block },
    Kraus { operators: Vec<Element>, adjoints: Vec<Element> },
    Convex { weights: Vec<f64>, maps: Vec<AbsoluteContraction> },
    Composition { maps: Vec<AbsoluteContraction> },
    Raw { operator: LinearOperator },
}

/// A verified absolute contraction on a fixed algebra.
#[derive(Clone, Debug)]
pub struct AbsoluteContraction {
    algebra: Arc<Algebra>,
    kind: Kind,
    report: VerificationReport,
    positivity: Positivity,
}

impl AbsoluteContraction {
    pub fn kind(&self) -> ContractionKind {
        match self.kind {
            Kind::ScaledUnitary { .. } => ContractionKind::ScaledUnitary,
            Kind::Pinching { .. } => ContractionKind::Pinching,
            Kind::Schur { .. } => ContractionKind::SchurMultiplier,
            Kind::Kraus { .. } => ContractionKind::Kraus,
            Kind::Convex { .. } => ContractionKind::ConvexCombination,
            Kind::Composition { .. } => ContractionKind::Composition,
            Kind::Raw { .. } => ContractionKind::Raw,
        }
    }

    /// Report computed at construction with tolerance `1e-10`.
    pub fn verification(&self) -> &VerificationReport {
        &self.report
    }

    pub fn positivity(&self) -> Positivity {
        self.positivity
    }

    /// The identity map, as `scaled_unitary` with `U = 1`, `s = 1`.
    pub fn identity(algebra: &Arc<Algebra>) -> Self {
        construct_contraction(
            algebra,
            ContractionSpec::ScaledUnitary {
                unitary: Element::identity(algebra),
                scale: 1.0,
            },
        )
        .expect("identity is an absolute contraction")
    }

    /// `T(x)` with an algebra check.
    pub fn try_apply(&self, x: &Element) -> Result<Element> {
        if *x.algebra().as_ref() != *self.algebra {
            return Err(Error::Structural(
                "element and contraction live on different algebras".into(),
            ));
        }
        Ok(self.apply(x))
    }
}

impl LinearMap for AbsoluteContraction {
    fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    fn apply(&self, x: &Element) -> Element {
        match &self.kind {
            Kind::ScaledUnitary {
                unitary,
                adjoint,
                scale,
            } => (&(adjoint * x) * unitary).scale_real(*scale),
            Kind::Pinching { projections } => {
                let mut acc = Element::zeros(x.algebra());
                for p in projections {
                    acc += &(&(p * x) * p);
                }
                acc
            }
            Kind::Schur { coefficients } => {
                x.map_blocks(|_, b| coefficients.component_mul(b))
            }
            Kind::Kraus {
                operators,
                adjoints,
            } => {
                let mut acc = Element::zeros(x.algebra());
                for (k, ks) in operators.iter().zip(adjoints) {
                    acc += &(&(ks * x) * k);
                }
                acc
            }
            Kind::Convex { weights, maps } => {
                let mut acc = Element::zeros(x.algebra());
                for (w, t) in weights.iter().zip(maps) {
                    acc += &t.apply(x).scale_real(*w);
                }
                acc
            }
            Kind::Composition { maps } => {
                let mut y = x.clone();
                for t in maps {
                    y = t.apply(&y);
                }
                y
            }
            Kind::Raw { operator } => operator.apply(x),
        }
    }

    fn transfer_matrix(&self) -> DMatrix<C64> {
        match &self.kind {
            Kind::Raw { operator } => operator.matrix().clone(),
            _ => default_transfer(self),
        }
    }
}

fn default_transfer(map: &impl LinearMap) -> DMatrix<C64> {
    let alg = map.algebra();
    let dim = alg.coord_dim();
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let (b, i, j) = alg.decode_coord(c);
        for (r, v) in map
            .apply(&Element::matrix_unit(alg, b, i, j))
            .to_flat()
            .into_iter()
            .enumerate()
        {
            m[(r, c)] = v;
        }
    }
    m
}

fn require_algebra(algebra: &Arc<Algebra>, x: &Element, what: &str) -> Result<()> {
    if **x.algebra() != **algebra {
        return Err(Error::Structural(format!(
            "{what} does not belong to the contraction's algebra"
        )));
    }
    Ok(())
}

fn rejected(msg: String) -> Error {
    Error::ContractionRejected(msg)
}

/// Builds an absolute contraction, enforcing the sufficient conditions of
/// each kind, then verifies it at tolerance `1e-10`.
pub fn construct_contraction(
    algebra: &Arc<Algebra>,
    spec: ContractionSpec,
) -> Result<AbsoluteContraction> {
    let tol = DEFAULT_TOL;
    let kind = match spec {
        ContractionSpec::ScaledUnitary { unitary, scale } => {
            require_algebra(algebra, &unitary, "unitary")?;
            if !(scale > 0.0 && scale <= 1.0) {
                return Err(rejected(format!("scale {scale} is outside (0, 1]")));
            }
            let adjoint = unitary.adjoint();
            let defect = (&(&adjoint * &unitary) - &Element::identity(algebra)).max_abs_entry();
            if defect > tol {
                return Err(rejected(format!(
                    "U is not unitary (max|U*U - 1| = {defect:.3e})"
                )));
            }
            Kind::ScaledUnitary {
                unitary,
                adjoint,
                scale,
            }
        }
        ContractionSpec::Pinching { projections } => {
            if projections.is_empty() {
                return Err(rejected("pinching needs at least one projection".into()));
            }
            let mut total = Element::zeros(algebra);
            let mut checked = Vec::with_capacity(projections.len());
            for (i, p) in projections.into_iter().enumerate() {
                require_algebra(algebra, &p, "pinching projection")?;
                let p = Projection::new(p)
                    .map_err(|e| rejected(format!("pinching member {i}: {e}")))?
                    .into_element();
                total += &p;
                checked.push(p);
            }
            let top = total.max_eigenvalue();
            if top > 1.0 + tol {
                return Err(rejected(format!(
                    "sum of pinching projections is not <= 1 (largest eigenvalue {top:.6})"
                )));
            }
            Kind::Pinching {
                projections: checked,
            }
        }
        ContractionSpec::SchurMultiplier { coefficients } => {
            if algebra.num_blocks() != 1 {
                return Err(Error::Unsupported(
                    "schur multipliers are only defined on single-block algebras".into(),
                ));
            }
            require_algebra(algebra, &coefficients, "schur coefficient matrix")?;
            let h = coefficients.block(0).clone();
            let herm = coefficients.hermitian_deviation();
            if herm > tol * (1.0 + coefficients.max_abs_entry()) {
                return Err(rejected("schur coefficients are not Hermitian".into()));
            }
            let low = eigh(&h).min();
            if low < -tol {
                return Err(rejected(format!(
                    "schur coefficients are not positive semidefinite (min eigenvalue {low:.3e})"
                )));
            }
            if (0..h.nrows()).any(|i| h[(i, i)].re > 1.0 + tol) {
                return Err(rejected("schur coefficient diagonal exceeds 1".into()));
            }
            Kind::Schur { coefficients: h }
        }
        ContractionSpec::Kraus { operators } => {
            if operators.is_empty() {
                return Err(rejected("kraus family is empty".into()));
            }
            let mut gram_right = Element::zeros(algebra);
            let mut gram_left = Element::zeros(algebra);
            let mut adjoints = Vec::with_capacity(operators.len());
            for k in &operators {
                require_algebra(algebra, k, "kraus operator")?;
                let ks = k.adjoint();
                gram_right += &(&ks * k);
                gram_left += &(k * &ks);
                adjoints.push(ks);
            }
            let top = gram_right.max_eigenvalue();
            if top > 1.0 + tol {
                return Err(Error::KrausRejected {
                    condition: KrausCondition::Subunital,
                    max_eigenvalue: top,
                });
            }
            let top = gram_left.max_eigenvalue();
            if top > 1.0 + tol {
                return Err(Error::KrausRejected {
                    condition: KrausCondition::TraceDecreasing,
                    max_eigenvalue: top,
                });
            }
            Kind::Kraus {
                operators,
                adjoints,
            }
        }
        ContractionSpec::ConvexCombination { weights, maps } => {
            if maps.is_empty() || weights.len() != maps.len() {
                return Err(rejected(format!(
                    "convex combination needs matching non-empty weights and maps ({} vs {})",
                    weights.len(),
                    maps.len()
                )));
            }
            if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(rejected("convex weights must be finite and >= 0".into()));
            }
            let total: f64 = weights.iter().sum();
            if total > 1.0 + 1e-12 {
                return Err(rejected(format!("convex weights sum to {total} > 1")));
            }
            for t in &maps {
                if *t.algebra != **algebra {
                    return Err(Error::Structural(
                        "sub-map acts on a different algebra".into(),
                    ));
                }
            }
            Kind::Convex { weights, maps }
        }
        ContractionSpec::Composition { maps } => {
            if maps.is_empty() {
                return Err(rejected("composition of zero maps".into()));
            }
            for t in &maps {
                if *t.algebra != **algebra {
                    return Err(Error::Structural(
                        "sub-map acts on a different algebra".into(),
                    ));
                }
            }
            Kind::Composition { maps }
        }
        ContractionSpec::Raw { transfer } => Kind::Raw {
            operator: LinearOperator::new(algebra, transfer)?,
        },
    };
    let raw = matches!(kind, Kind::Raw { .. });
    let sub_positivity = match &kind {
        Kind::Convex { maps, .. } | Kind::Composition { maps } => maps
            .iter()
            .all(|t| t.positivity == Positivity::CompletelyPositive),
        _ => true,
    };
    let mut map = AbsoluteContraction {
        algebra: algebra.clone(),
        kind,
        report: VerificationReport {
            subunital_margin: 0.0,
            trace_margin: 0.0,
            choi_min_eig: 0.0,
            tol,
            passed: false,
        },
        positivity: Positivity::CompletelyPositive,
    };
    let report = verify_absolute_contraction(&map, tol)?;
    if report.subunital_margin < -tol {
        return Err(rejected(format!(
            "T(1) <= 1 fails (margin {:.3e})",
            report.subunital_margin
        )));
    }
    if report.trace_margin < -tol {
        return Err(rejected(format!(
            "trace condition T^dagger(1) <= 1 fails (margin {:.3e})",
            report.trace_margin
        )));
    }
    if report.choi_min_eig < -tol || !sub_positivity {
        if !raw && sub_positivity {
            return Err(rejected(format!(
                "choi matrix not positive (min eigenvalue {:.3e})",
                report.choi_min_eig
            )));
        }
        map.positivity = Positivity::Unverified;
    }
    map.report = report;
    Ok(map)
}

/// Checks subunitality, the trace condition and complete positivity of a
/// linear map.
///
/// A map that does not preserve Hermiticity fails structurally with
/// [`Error::NotHermiticityPreserving`], separately from margin failures.
pub fn verify_absolute_contraction(map: &impl LinearMap, tol: f64) -> Result<VerificationReport> {
    let alg = map.algebra().clone();
    let transfer = map.transfer_matrix();
    let image = |b: usize, i: usize, j: usize| -> Element {
        let col = alg.unit_coord(b, i, j);
        let coords: Vec<C64> = transfer.column(col).iter().copied().collect();
        Element::from_flat(&alg, &coords).expect("transfer matrix matches algebra")
    };

    let mut scale: f64 = 0.0;
    let mut deviation: f64 = 0.0;
    for (b, &n) in alg.block_dims().iter().enumerate() {
        for i in 0..n {
            for j in i..n {
                let tij = image(b, i, j);
                let tji = image(b, j, i);
                scale = scale.max(tij.max_abs_entry()).max(tji.max_abs_entry());
                deviation = deviation.max((&tji - &tij.adjoint()).max_abs_entry());
            }
        }
    }
    if deviation > tol * (1.0 + scale) {
        return Err(Error::NotHermiticityPreserving { deviation });
    }

    let one = Element::identity(&alg);
    let t_one = map.apply(&one);
    let subunital_margin = (&one - &t_one).min_eigenvalue();

    // T†(1) is the y with τ(x y) = τ(T(x)) for all x; testing on matrix
    // units gives y^b_{ji} = τ(T(e^b_{ij})) / w_b.
    let mut dual_one = Element::zeros(&alg);
    for (b, &n) in alg.block_dims().iter().enumerate() {
        let w = alg.weight(b);
        for i in 0..n {
            for j in 0..n {
                let t = image(b, i, j).trace();
                dual_one.block_mut(b)[(j, i)] = t / w;
            }
        }
    }
    let trace_margin = (&one - &dual_one).min_eigenvalue();

    let mut choi_min_eig = f64::INFINITY;
    for (b, &nb) in alg.block_dims().iter().enumerate() {
        let images: Vec<Vec<Element>> = (0..nb)
            .map(|i| (0..nb).map(|j| image(b, i, j)).collect())
            .collect();
        for (c, &nc) in alg.block_dims().iter().enumerate() {
            let size = nb * nc;
            let choi = Block::from_fn(size, size, |row, col| {
                let (i, r) = (row / nc, row % nc);
                let (j, s) = (col / nc, col % nc);
                images[i][j].block(c)[(r, s)]
            });
            choi_min_eig = choi_min_eig.min(eigh(&choi).min());
        }
    }

    let passed = subunital_margin >= -tol && trace_margin >= -tol && choi_min_eig >= -tol;
    Ok(VerificationReport {
        subunital_margin,
        trace_margin,
        choi_min_eig,
        tol,
        passed,
    })
}

fn check_tuple(maps: &[AbsoluteContraction], k: &MultiIndex, x: &Element) -> Result<()> {
    if maps.len() != k.dim() {
        return Err(Error::Structural(format!(
            "{} contractions for a multi-index of dimension {}",
            maps.len(),
            k.dim()
        )));
    }
    for t in maps {
        if **x.algebra() != *t.algebra {
            return Err(Error::Structural(
                "element and contraction live on different algebras".into(),
            ));
        }
    }
    Ok(())
}

/// `T^k(x) = T_d^{k_d} ⋯ T_1^{k_1}(x)`: `T_1` is applied first.
pub fn apply_power(maps: &[AbsoluteContraction], k: &MultiIndex, x: &Element) -> Result<Element> {
    check_tuple(maps, k, x)?;
    let mut y = x.clone();
    for (t, &times) in maps.iter().zip(k.components()) {
        for _ in 0..times {
            y = t.apply(&y);
        }
    }
    Ok(y)
}

/// Singular value of `1 − λS` that sits between exact kernel and clear
/// separation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IllConditioned {
    pub singular_value: f64,
}

#[derive(Clone, Debug)]
pub struct CesaroLimit {
    pub operator: LinearOperator,
    pub kernel_dim: usize,
    pub warning: Option<IllConditioned>,
}

/// Norm limit of `(1/N) Σ_{k=1}^N (λT)^k`: the spectral projection of `λT`
/// onto eigenvalue 1.
///
/// The kernel of `1 − λS` is read off an SVD in trace-orthonormal
/// coordinates; with right kernel `W` and left kernel `U`, the projection is
/// `W (U*W)⁻¹ U*` (eigenvalue 1 is semisimple because `λT` is power bounded).
pub fn cesaro_limit_projection(map: &impl LinearMap, phase: C64) -> Result<CesaroLimit> {
    if (phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("phase {phase} is not unimodular")));
    }
    let alg = map.algebra().clone();
    let dim = alg.coord_dim();
    let root_w: Vec<f64> = (0..dim)
        .map(|c| alg.weight(alg.decode_coord(c).0).sqrt())
        .collect();
    let s = map.transfer_matrix();
    let a = DMatrix::from_fn(dim, dim, |r, c| {
        let delta = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        delta - phase * s[(r, c)] * (root_w[r] / root_w[c])
    });
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");

    let mut kernel = Vec::new();
    let mut warning: Option<IllConditioned> = None;
    for (idx, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma <= KERNEL_TOL {
            kernel.push(idx);
        } else if sigma <= NEAR_KERNEL_TOL {
            let worse = warning.is_none_or(|w| sigma < w.singular_value);
            if worse {
                warning = Some(IllConditioned {
                    singular_value: sigma,
                });
            }
        }
    }
    if kernel.is_empty() {
        return Ok(CesaroLimit {
            operator: LinearOperator::zero(&alg),
            kernel_dim: 0,
            warning,
        });
    }
    let r = kernel.len();
    let right = DMatrix::from_fn(dim, r, |i, k| v_t[(kernel[k], i)].conj());
    let left = DMatrix::from_fn(dim, r, |i, k| u[(i, kernel[k])]);
    let gram = left.adjoint() * &right;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Numeric("eigenvalue 1 is not semisimple".into()))?;
    let p = right * inv * left.adjoint();
    let p = DMatrix::from_fn(dim, dim, |i, j| p[(i, j)] * (root_w[j] / root_w[i]));
    Ok(CesaroLimit {
        operator: LinearOperator::new(&alg, p)?,
        kernel_dim: r,
        warning,
    })
}
