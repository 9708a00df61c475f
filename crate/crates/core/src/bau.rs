//! Bilaterally almost uniform convergence certificates.
//!
//! For a tail family of residuals `r_n`, a dominant `a ⪰ ±r_n` and the
//! Chebyshev cut `e = χ_{[0,λ]}(a)` give `‖e r_n e‖_∞ ≤ ‖e a e‖_∞ ≤ λ` for
//! every tail index while `τ(e⊥) ≤ (‖a‖_p/λ)^p`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{Element, Projection};
use crate::averages::weighted_average_grid;
use crate::contraction::AbsoluteContraction;
use crate::error::{Error, Result};
use crate::index::{IndexBox, MultiIndex};
use crate::maximal::{dominant_element, SolverOptions};
use crate::weights::Weight;

/// Slack on `tail_sup ≤ λ` in soundness checks.
pub const SOUNDNESS_SLACK: f64 = 1e-10;
/// Slack on the Chebyshev inequality.
pub const CHEBYSHEV_SLACK: f64 = 1e-8;

/// How the cut level is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// `λ = ‖a‖_p / ε^{1/p}`.
    Epsilon(f64),
    /// Given `λ`; `ε = (‖a‖_p/λ)^p` is back-computed.
    Lambda(f64),
}

/// Certificate for one Hermitian part.
#[derive(Clone, Debug)]
pub struct PartCertificate {
    pub dominant_norm: f64,
    pub epsilon: f64,
    pub lambda: f64,
    /// `τ(χ_{(λ,∞)}(a))`.
    pub chebyshev_mass: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct BauCertificate {
    pub e: Projection,
    pub epsilon: f64,
    pub lambda: f64,
    pub onset: usize,
    /// `max_n ‖e r_n e‖_∞` over the tested tail.
    pub tail_sup: f64,
    /// Largest `‖r_n‖_∞` over the tail, for comparison.
    pub raw_sup: f64,
    pub dominant_norm: f64,
    pub tau_complement: f64,
    pub tail_size: usize,
    /// Hermitian residuals give one part; complex residuals a real and an
    /// imaginary part whose projections are met.
    pub parts: Vec<PartCertificate>,
    /// Every dominant solve converged; otherwise the bound may not be tight
    /// but the certificate is still valid.
    pub tight: bool,
    pub sound: bool,
    /// Chebyshev inequality holds for every part within `1e-8`.
    pub chebyshev_consistent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateCheck {
    pub tail_sup: f64,
    pub tau_complement: f64,
    pub within_lambda: bool,
    pub within_epsilon: bool,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.within_lambda && self.within_epsilon
    }
}

/// `(n, r_n)` restricted to `m(n) ≥ onset`.
pub fn tail(residuals: &[(MultiIndex, Element)], onset: usize) -> Vec<&(MultiIndex, Element)> {
    residuals.iter().filter(|(n, _)| n.min_component() >= onset).collect()
}

/// `r_n = A_n(x) − limit` for every `n ∈ [1, n_max]^d`, via the grid
/// evaluator.
pub fn residual_family(
    a: &impl Weight,
    maps: &[AbsoluteContraction],
    x: &Element,
    limit: &Element,
    n_max: usize,
    budget: u64,
) -> Result<Vec<(MultiIndex, Element)>> {
    let region = IndexBox::cube(1, n_max, a.dim())?;
    let fam = weighted_average_grid(a, maps, x, &region, budget)?;
    Ok(fam.iter().map(|(n, v)| (n, v - limit)).collect())
}

fn certify_part(
    members: &[Element],
    p: f64,
    threshold: Threshold,
    opts: &SolverOptions,
) -> Result<(Projection, PartCertificate)> {
    let mut family = Vec::with_capacity(2 * members.len());
    for r in members {
        family.push(r.clone());
        family.push(r.scale_real(-1.0));
    }
    let rep = dominant_element(&family, p, opts)?;
    let norm = rep.norm;
    let (lambda, epsilon) = match threshold {
        Threshold::Epsilon(eps) => {
            if norm == 0.0 {
                (0.0, eps)
            } else {
                (norm / eps.powf(1.0 / p), eps)
            }
        }
        Threshold::Lambda(l) => {
            let eps = if norm == 0.0 { 0.0 } else { (norm / l).powf(p) };
            (l, eps)
        }
    };
    let e = rep
        .dominant
        .spectral_projection(f64::NEG_INFINITY, lambda)?
        .projection;
    let chebyshev_mass = weighted_count_above(&rep.dominant, lambda);
    Ok((
        e,
        PartCertificate {
            dominant_norm: norm,
            epsilon,
            lambda,
            chebyshev_mass,
            converged: rep.converged,
        },
    ))
}

/// `τ(χ_{(λ,∞)}(a))` as a weighted eigenvalue count.
fn weighted_count_above(a: &Element, lambda: f64) -> f64 {
    let alg = a.algebra();
    a.eigh()
        .iter()
        .enumerate()
        .map(|(b, eig)| alg.weight(b) * eig.values.iter().filter(|&&l| l > lambda).count() as f64)
        .sum()
}

/// Builds a certificate for the residuals with `m(n) ≥ onset`.
///
/// Hermitian residuals are certified directly; otherwise the real and
/// imaginary parts each get half of `ε` (or of `λ`) and the projections are
/// met, so `τ(e⊥) ≤ ε_R + ε_I` and `‖e r_n e‖_∞ ≤ λ_R + λ_I`.
pub fn certify_bau(
    residuals: &[(MultiIndex, Element)],
    onset: usize,
    p: f64,
    threshold: Threshold,
    opts: &SolverOptions,
) -> Result<BauCertificate> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("certificates need p > 1, got {p}")));
    }
    let members: Vec<&(MultiIndex, Element)> = tail(residuals, onset);
    let first = members
        .first()
        .ok_or_else(|| Error::Structural(format!("no residuals with m(n) >= {onset}")))?;
    let alg = first.1.algebra().clone();
    let total = alg.total_trace();
    match threshold {
        Threshold::Epsilon(eps) if !(eps > 0.0 && eps < total) => {
            return Err(Error::Domain(format!(
                "epsilon {eps} must lie in (0, tau(1) = {total})"
            )))
        }
        Threshold::Lambda(l) if !(l > 0.0 && l.is_finite()) => {
            return Err(Error::Domain(format!("lambda {l} must be positive")))
        }
        _ => {}
    }
    let hermitian = members
        .iter()
        .all(|(_, r)| r.is_hermitian(1e-10));
    let (e, parts) = if hermitian {
        let rs: Vec<Element> = members.iter().map(|(_, r)| r.real_part()).collect();
        let (e, part) = certify_part(&rs, p, threshold, opts)?;
        (e, alloc::vec![part])
    } else {
        let half = match threshold {
            Threshold::Epsilon(eps) => Threshold::Epsilon(eps / 2.0),
            Threshold::Lambda(l) => Threshold::Lambda(l / 2.0),
        };
        let re: Vec<Element> = members.iter().map(|(_, r)| r.real_part()).collect();
        let im: Vec<Element> = members.iter().map(|(_, r)| r.imag_part()).collect();
        let (er, pr) = certify_part(&re, p, half, opts)?;
        let (ei, pi) = certify_part(&im, p, half, opts)?;
        (er.meet(&ei)?, alloc::vec![pr, pi])
    };
    let epsilon = parts.iter().map(|q| q.epsilon).sum();
    let lambda = parts.iter().map(|q| q.lambda).sum();
    let dominant_norm = parts.iter().map(|q| q.dominant_norm).fold(0.0, f64::max);
    let tight = parts.iter().all(|q| q.converged);
    let chebyshev_consistent = parts.iter().all(|q| {
        let bound = if q.lambda > 0.0 {
            (q.dominant_norm / q.lambda).powf(p)
        } else if q.dominant_norm == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        q.chebyshev_mass <= bound + CHEBYSHEV_SLACK
    });
    let mut cert = BauCertificate {
        e,
        epsilon,
        lambda,
        onset,
        tail_sup: 0.0,
        raw_sup: 0.0,
        dominant_norm,
        tau_complement: 0.0,
        tail_size: members.len(),
        parts,
        tight,
        sound: false,
        chebyshev_consistent,
    };
    let check = verify_certificate(&cert, residuals)?;
    cert.tail_sup = check.tail_sup;
    cert.tau_complement = check.tau_complement;
    cert.sound = check.passed();
    cert.raw_sup = members
        .iter()
        .map(|(_, r)| r.lp_norm(f64::INFINITY))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(cert)
}

/// Recomputes `max ‖e r_n e‖_∞` over the certificate's tail and `τ(1 − e)`
/// from the projection itself.
pub fn verify_certificate(cert: &BauCertificate, residuals: &[(MultiIndex, Element)]) -> Result<CertificateCheck> {
    let e = cert.e.element();
    let mut tail_sup: f64 = 0.0;
    for (_, r) in tail(residuals, cert.onset) {
        let cut = &(e * r) * e;
        tail_sup = tail_sup.max(cut.lp_norm(f64::INFINITY)?);
    }
    let tau_complement = cert.e.complement().tau();
    // the trace of an eigen-reconstructed projection is an integer
    // combination of weights up to rounding
    let rounding = 1e-12 * e.algebra().total_trace();
    Ok(CertificateCheck {
        tail_sup,
        tau_complement,
        within_lambda: tail_sup <= cert.lambda + SOUNDNESS_SLACK,
        within_epsilon: tau_complement <= cert.epsilon + rounding,
    })
}

/// Certificates at each onset of a ladder, on a fixed residual family.
pub fn certify_ladder(
    residuals: &[(MultiIndex, Element)],
    onsets: &[usize],
    p: f64,
    threshold: Threshold,
    opts: &SolverOptions,
) -> Result<Vec<BauCertificate>> {
    onsets
        .iter()
        .map(|&n0| certify_bau(residuals, n0, p, threshold, opts))
        .collect()
}
