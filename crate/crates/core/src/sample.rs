//! Seeded random elements, unitaries and contraction data.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::algebra::{Algebra, Block, Element, C64};

/// Per-purpose seed derived from a scenario seed, so adding a consumer of
/// randomness never shifts another consumer's stream.
pub fn keyed_seed(seed: u64, tag: &str) -> u64 {
    // FNV-1a over the tag, then one splitmix64 round over the mix
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal via Box–Muller.
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random::<f64>();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Block {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    Block::from_fn(n, n, |_, _| C64::new(normal(rng) * s, normal(rng) * s))
}

fn per_block<R: Rng + ?Sized>(alg: &Arc<Algebra>, rng: &mut R, f: impl Fn(usize, &mut R) -> Block) -> Element {
    let blocks = alg.block_dims().iter().map(|&n| f(n, rng)).collect();
    Element::from_blocks(alg, blocks).expect("shapes follow the algebra")
}

/// General element with Gaussian entries.
pub fn random_general<R: Rng + ?Sized>(alg: &Arc<Algebra>, rng: &mut R) -> Element {
    per_block(alg, rng, |n, r| ginibre(n, r))
}

/// Hermitian element `(g + g*)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(alg: &Arc<Algebra>, rng: &mut R) -> Element {
    per_block(alg, rng, |n, r| {
        let g = ginibre(n, r);
        (&g + g.adjoint()).map(|z| z * 0.5)
    })
}

/// Positive element `g g* / n`.
pub fn random_positive<R: Rng + ?Sized>(alg: &Arc<Algebra>, rng: &mut R) -> Element {
    let x = per_block(alg, rng, |n, r| {
        let g = ginibre(n, r);
        (&g * g.adjoint()).map(|z| z / n as f64)
    });
    x.with_hermitian_hint(true).expect("g g* is Hermitian")
}

/// Haar unitary from the QR factorization of a Ginibre matrix, with the
/// phases of `diag(R)` divided out.
pub fn random_unitary_block<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Block {
    let qr = ginibre(n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= ph;
        }
    }
    u
}

pub fn random_unitary<R: Rng + ?Sized>(alg: &Arc<Algebra>, rng: &mut R) -> Element {
    per_block(alg, rng, |n, r| random_unitary_block(n, r))
}

/// `count` operators with `Σ K*K ⪯ shrink` and `Σ KK* ⪯ shrink`,
/// `shrink ∈ (0, 1]`.
pub fn random_kraus<R: Rng + ?Sized>(alg: &Arc<Algebra>, count: usize, shrink: f64, rng: &mut R) -> Vec<Element> {
    let ks: Vec<Element> = (0..count).map(|_| random_general(alg, rng)).collect();
    let mut right = Element::zeros(alg);
    let mut left = Element::zeros(alg);
    for k in &ks {
        right += &(&k.adjoint() * k);
        left += &(k * &k.adjoint());
    }
    let top = right.max_eigenvalue().max(left.max_eigenvalue());
    let s = (shrink / top).sqrt();
    ks.into_iter().map(|k| k.scale_real(s)).collect()
}

/// Nonnegative `n×n` matrix with row and column sums at most `shrink`.
pub fn random_substochastic<R: Rng + ?Sized>(n: usize, shrink: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mut top: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        top = top.max(row.iter().sum());
        top = top.max(m.iter().map(|r| r[i]).sum());
    }
    for row in &mut m {
        for v in row.iter_mut() {
            *v *= shrink / top;
        }
    }
    m
}
