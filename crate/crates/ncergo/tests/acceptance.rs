//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ncergo::config::Resolver;
use ncergo::{emit_report, run_scenario, OutputFormat, RunOptions, Scenario};
use ncergo_core::algebra::singular_values;
use ncergo_core::averages::DEFAULT_BUDGET;
use ncergo_core::bau::{certify_ladder, residual_family, tail};
use ncergo_core::maximal::maximal_inequality_report;
use ncergo_core::sample;
use ncergo_core::weights::{keyed_uniform, BesicovitchCheck, ImagPart, Ladder, RealPart};
use ncergo_core::{
    construct_contraction, dominant_element, interpolation_check, limit_oracle,
    verify_besicovitch, verify_certificate, weighted_average_direct, weighted_average_factorized,
    weighted_average_grid, AbsoluteContraction, Algebra, BesicovitchWeight, Block, ContractionSpec,
    Element, IndexBox, MultiIndex, Perturbation, SolverOptions, Threshold, TrigPolynomial, TrigTerm,
    Weight, C64,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod tol {
    pub const NORM_SLACK: f64 = 1e-9;
    pub const COMMUTATIVE: f64 = 1e-12;
    pub const EVALUATORS: f64 = 1e-9;
    pub const SANDWICH: f64 = -1e-10;
    pub const DIAGONAL_DOMINANT: f64 = 1e-6;
    pub const GRID_GAP: f64 = 1e-3;
    pub const LADDER_STEP: f64 = 0.05;
    pub const TAIL_SUP: f64 = 1e-3;
    pub const MAX_ONSET: usize = 64;
    pub const CHEBYSHEV: f64 = 1e-8;
    pub const BESICOVITCH_EPS: f64 = 0.05;
    pub const ONSET_1D: usize = 100;
    pub const ONSET_2D: usize = 32;
    pub const SLOPE: (f64, f64) = (-1.3, -0.7);
    pub const INTERPOLATION: f64 = 1e-6;
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample::keyed_seed(seed, tag))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn shape(i: usize) -> Arc<Algebra> {
    let (dims, weights) = match i % 4 {
        0 => (vec![2], vec![1.0]),
        1 => (vec![3], vec![1.0]),
        2 => (vec![2, 2], vec![1.0, 0.5]),
        _ => (vec![3, 2], vec![0.7, 1.3]),
    };
    Arc::new(Algebra::new(dims, weights).unwrap())
}

fn random_map(alg: &Arc<Algebra>, seed: u64, tag: &str) -> AbsoluteContraction {
    let mut r = rng(seed, tag);
    let spec = if keyed_uniform(seed, &[tag.len(), 1]) < 0.0 {
        ContractionSpec::Kraus {
            operators: sample::random_kraus(alg, 3, 0.95, &mut r),
        }
    } else {
        ContractionSpec::ScaledUnitary {
            unitary: sample::random_unitary(alg, &mut r),
            scale: 0.97,
        }
    };
    construct_contraction(alg, spec).unwrap()
}

fn random_trig(d: usize, seed: u64, terms: usize) -> TrigPolynomial {
    let terms = (0..terms)
        .map(|j| TrigTerm {
            coefficient: C64::new(keyed_uniform(seed, &[j, 0]), keyed_uniform(seed, &[j, 1])),
            phases: (0..d).map(|i| PI * (1.0 + keyed_uniform(seed, &[j, 2 + i]))).collect(),
        })
        .collect();
    TrigPolynomial::new(d, terms).unwrap()
}

fn max_entry_diff(a: &Element, b: &Element) -> f64 {
    (a - b).max_abs_entry()
}

/// Diagonal element with the given entries, block after block.
fn diag(alg: &Arc<Algebra>, vals: &[f64]) -> Element {
    let mut at = 0;
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&n| {
            let b = Block::from_fn(n, n, |i, j| if i == j { c(vals[at + i]) } else { c(0.0) });
            at += n;
            b
        })
        .collect();
    Element::from_blocks(alg, blocks).unwrap()
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// `τ(xy)` from the blocks.
fn tau_product(x: &Element, y: &Element) -> C64 {
    (x * y).trace()
}

fn norm_trace_suite() -> Outcome {
    let start = Instant::now();
    let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    for i in 0..500 {
        let alg = shape(i);
        let mut r = rng(i as u64, "norm-suite");
        let x = sample::random_general(&alg, &mut r);
        let y = sample::random_general(&alg, &mut r);
        let a = sample::random_positive(&alg, &mut r);
        let b = &a + &sample::random_positive(&alg, &mut r);
        for &p in &ps {
            let q = ncergo_core::algebra::conjugate_exponent(p);
            let (xp, yq, yp) = (x.lp_norm(p).unwrap(), y.lp_norm(q).unwrap(), y.lp_norm(p).unwrap());
            let holder = tau_product(&x, &y).norm() - xp * yq;
            let triangle = (&x + &y).lp_norm(p).unwrap() - xp - yp;
            let mono = a.lp_norm(p).unwrap() - b.lp_norm(p).unwrap();
            for (v, scale) in [(holder, xp * yq), (triangle, xp + yp), (mono, 1.0)] {
                worst = worst.max(v / (1.0 + scale));
            }
        }
        let four = x.decompose_four_positives();
        let recon = max_entry_diff(&four.recombine(), &x) / (1.0 + x.max_abs_entry());
        worst = worst.max(recon);
        if !four.parts.iter().all(|p| p.is_positive(tol::NORM_SLACK)) {
            worst = f64::INFINITY;
        }
        count += 1;
    }
    let elapsed = start.elapsed();
    let pass = worst <= tol::NORM_SLACK && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!("{count} element sets, worst relative excess {worst:.2e}, {:.2?}", elapsed),
    )
}

fn commutative_oracle() -> Outcome {
    let start = Instant::now();
    let n = 8;
    let alg = Arc::new(Algebra::diagonal(n).unwrap());
    let mats: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|i| sample::random_substochastic(n, 1.0, &mut rng(11, &format!("substochastic/{i}"))))
        .collect();
    let maps: Vec<AbsoluteContraction> = mats
        .iter()
        .map(|m| {
            construct_contraction(
                &alg,
                ContractionSpec::Raw {
                    transfer: Block::from_fn(n, n, |i, j| c(m[i][j])),
                },
            )
            .unwrap()
        })
        .collect();
    let f: Vec<f64> = (0..n).map(|i| 1.0 + keyed_uniform(5, &[i])).collect();
    let x = Element::from_flat(&alg, &f.iter().map(|&v| c(v)).collect::<Vec<_>>()).unwrap();
    let a = random_trig(2, 17, 3);

    // scalar side: plain vectors, std trigonometry
    let matvec = |m: &Vec<Vec<f64>>, v: &[f64]| -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect()
    };
    let top = 16;
    let mut powers: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut v1 = f.clone();
    for _ in 1..=top {
        v1 = matvec(&mats[0], &v1);
        let mut row = Vec::new();
        let mut v2 = v1.clone();
        for _ in 1..=top {
            v2 = matvec(&mats[1], &v2);
            row.push(v2.clone());
        }
        powers.push(row);
    }
    let weight = |k1: usize, k2: usize| -> (f64, f64) {
        a.terms().iter().fold((0.0, 0.0), |(re, im), t| {
            let ang = t.phases[0] * k1 as f64 + t.phases[1] * k2 as f64;
            let (s, co) = ang.sin_cos();
            (
                re + t.coefficient.re * co - t.coefficient.im * s,
                im + t.coefficient.re * s + t.coefficient.im * co,
            )
        })
    };

    let region = IndexBox::cube(1, top, 2).unwrap();
    let fam = weighted_average_grid(&a, &maps, &x, &region, DEFAULT_BUDGET).unwrap();
    let mut worst: f64 = 0.0;
    for (nn, got) in fam.iter() {
        let (n1, n2) = (nn.components()[0], nn.components()[1]);
        let mut want = vec![C64::new(0.0, 0.0); n];
        for k1 in 1..=n1 {
            for k2 in 1..=n2 {
                let (wr, wi) = weight(k1, k2);
                for (i, w) in want.iter_mut().enumerate() {
                    *w += C64::new(wr, wi) * powers[k1 - 1][k2 - 1][i];
                }
            }
        }
        let vol = (n1 * n2) as f64;
        let direct = weighted_average_direct(&a, &maps, &x, &nn, DEFAULT_BUDGET).unwrap();
        for (i, g) in got.to_flat().iter().enumerate() {
            worst = worst.max((g - want[i] / vol).norm());
        }
        for (i, g) in direct.to_flat().iter().enumerate() {
            worst = worst.max((g - want[i] / vol).norm());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= tol::COMMUTATIVE && elapsed < Duration::from_secs(10),
        format!("256 boxes, grid and direct, worst deviation {worst:.2e}, {:.2?}", elapsed),
    )
}

fn evaluator_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for s in 0..20u64 {
        let d = 1 + (s as usize % 3);
        let alg = shape(s as usize);
        let maps: Vec<_> = (0..d).map(|i| random_map(&alg, s, &format!("eval/{i}"))).collect();
        let x = sample::random_general(&alg, &mut rng(s, "eval/x"));
        let a = random_trig(d, 100 + s, 3);
        let region = IndexBox::cube(1, 32, d).unwrap();
        let fam = weighted_average_grid(&a, &maps, &x, &region, DEFAULT_BUDGET).unwrap();
        let scale = 1.0 + x.max_abs_entry();
        // every box in d = 1, a fixed sample of boxes otherwise
        let probes: Vec<MultiIndex> = match d {
            1 => region.iter().collect(),
            _ => (0..12)
                .map(|j| {
                    let comps = (0..d)
                        .map(|i| 1 + ((keyed_uniform(s, &[j, i]) + 1.0) * 16.0) as usize % 32)
                        .collect();
                    MultiIndex::new(comps).unwrap()
                })
                .chain([MultiIndex::diagonal(32, d)])
                .collect(),
        };
        for nn in probes {
            let grid = fam.get(&nn).unwrap();
            let direct = weighted_average_direct(&a, &maps, &x, &nn, DEFAULT_BUDGET).unwrap();
            let fact = weighted_average_factorized(&a, &maps, &x, &nn).unwrap();
            worst = worst
                .max(max_entry_diff(grid, &direct) / scale)
                .max(max_entry_diff(grid, &fact) / scale);
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= tol::EVALUATORS && elapsed < Duration::from_secs(120),
        format!("20 scenarios, {compared} boxes, worst deviation {worst:.2e}, {:.2?}", elapsed),
    )
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for s in 0..100u64 {
        let alg = shape(s as usize);
        let maps: Vec<_> = (0..2).map(|i| random_map(&alg, 1000 + s, &format!("sandwich/{i}"))).collect();
        let x = sample::random_positive(&alg, &mut rng(s, "sandwich/x"));
        let raw = random_trig(2, 2000 + s, 1 + s as usize % 4);
        let a = raw.scaled(1.0 / raw.l1_bound());
        let region = IndexBox::cube(1, 8, 2).unwrap();
        let unit = TrigPolynomial::constant(2, c(1.0)).unwrap();
        let m = weighted_average_grid(&unit, &maps, &x, &region, DEFAULT_BUDGET).unwrap();
        let re = weighted_average_grid(&RealPart(&a), &maps, &x, &region, DEFAULT_BUDGET).unwrap();
        let im = weighted_average_grid(&ImagPart(&a), &maps, &x, &region, DEFAULT_BUDGET).unwrap();
        for (((_, mn), (_, r)), (_, i)) in m.iter().zip(re.iter()).zip(im.iter()) {
            for part in [r, i] {
                worst = worst
                    .min((mn + part).min_eigenvalue())
                    .min((mn - part).min_eigenvalue());
            }
        }
    }
    outcome(
        worst >= tol::SANDWICH,
        format!("100 scenarios x 64 boxes, smallest eigenvalue {worst:.2e}, {:.2?}", start.elapsed()),
    )
}

/// Smallest `‖a‖_p` over real symmetric `a ⪰ P_0, P_45` on a dense
/// `(α, β)` grid with the third entry found by bisection.
fn grid_search_45(p: f64) -> f64 {
    let feasible = |al: f64, be: f64, ga: f64| {
        // a − P_0 and a − P_45 positive semidefinite
        let psd = |a: f64, b: f64, g: f64| a >= -1e-15 && g >= -1e-15 && a * g - b * b >= -1e-15;
        psd(al - 1.0, be, ga) && psd(al - 0.5, be - 0.5, ga - 0.5)
    };
    let norm = |al: f64, be: f64, ga: f64| {
        let mean = 0.5 * (al + ga);
        let rad = (0.25 * (al - ga) * (al - ga) + be * be).sqrt();
        let (l1, l2) = (mean + rad, mean - rad);
        (l1.powf(p) + l2.max(0.0).powf(p)).powf(1.0 / p)
    };
    let steps = 600;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let al = 1.0 + 0.6 * i as f64 / steps as f64;
        for j in 0..=steps {
            let be = -0.2 + 0.8 * j as f64 / steps as f64;
            let (mut lo, mut hi) = (0.5, 3.0);
            if !feasible(al, be, hi) {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(al, be, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            best = best.min(norm(al, be, hi));
        }
    }
    best
}

fn dominant_elements() -> Outcome {
    let start = Instant::now();
    let opts = SolverOptions::default();
    let mut worst_diag: f64 = 0.0;
    for s in 0..50u64 {
        let alg = shape(s as usize);
        let slots: usize = alg.block_dims().iter().sum();
        let members = 2 + s as usize % 5;
        let fam: Vec<Vec<f64>> = (0..members)
            .map(|k| (0..slots).map(|i| 2.0 * keyed_uniform(s, &[k, i])).collect())
            .collect();
        let element = |vals: &[f64]| diag(&alg, vals);
        let elems: Vec<Element> = fam.iter().map(|v| element(v)).collect();
        let top: Vec<f64> = (0..slots)
            .map(|i| fam.iter().map(|v| v[i]).fold(0.0, f64::max))
            .collect();
        let oracle = element(&top);
        for p in [1.0, 2.0, 4.0] {
            let want = oracle.lp_norm(p).unwrap();
            let got = dominant_element(&elems, p, &opts).unwrap().norm;
            worst_diag = worst_diag.max((got - want).abs() / (1.0 + want));
        }
    }
    let mut worst_single: f64 = 0.0;
    for s in 0..20u64 {
        let alg = shape(s as usize);
        let x = sample::random_positive(&alg, &mut rng(s, "single"));
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let got = dominant_element(std::slice::from_ref(&x), p, &opts).unwrap().norm;
            let want = x.lp_norm(p).unwrap();
            worst_single = worst_single.max((got - want).abs() / want);
        }
    }
    let alg = Arc::new(Algebra::matrix(2).unwrap());
    let ray = |t: f64| {
        let (s, co) = t.sin_cos();
        Element::from_blocks(&alg, vec![Block::from_row_slice(2, 2, &[c(co * co), c(co * s), c(co * s), c(s * s)])])
            .unwrap()
    };
    let fam = [ray(0.0), ray(PI / 4.0)];
    let mut worst_gap: f64 = 0.0;
    for p in [1.0, 2.0] {
        let rep = dominant_element(&fam, p, &opts).unwrap();
        let oracle = grid_search_45(p);
        worst_gap = worst_gap
            .max(rep.relative_gap())
            .max((rep.norm - oracle).abs() / oracle);
    }
    let pass = worst_diag <= tol::DIAGONAL_DOMINANT && worst_single <= 1e-12 && worst_gap <= tol::GRID_GAP;
    outcome(
        pass,
        format!(
            "diagonal {worst_diag:.2e}, single {worst_single:.2e}, 45-degree gap {worst_gap:.2e}, {:.2?}",
            start.elapsed()
        ),
    )
}

fn maximal_ladder() -> Outcome {
    let start = Instant::now();
    let opts = SolverOptions::default();
    let mut bad = Vec::new();
    let mut steps = Vec::new();
    for s in 0..10u64 {
        let d = 1 + s as usize % 2;
        let alg = shape(s as usize);
        let maps: Vec<_> = (0..d).map(|i| random_map(&alg, 300 + s, &format!("ladder/{i}"))).collect();
        let x = sample::random_positive(&alg, &mut rng(s, "ladder/x"));
        let rep = maximal_inequality_report(&maps, &x, 2.0, &[4, 8, 16, 32], DEFAULT_BUDGET, tol::LADDER_STEP, &opts)
            .unwrap();
        let [.., a, b] = rep.rungs.as_slice() else {
            bad.push(s);
            continue;
        };
        steps.push((b.ratio - a.ratio).abs() / a.ratio);
        if !(rep.monotone && rep.cauchy && rep.rungs.len() == 4 && !rep.truncated) {
            bad.push(s);
        }
    }
    let last = steps.iter().copied().fold(0.0, f64::max);
    outcome(
        bad.is_empty(),
        format!(
            "10 scenarios, failing {bad:?}, largest last-step change {last:.2e}, {:.2?}",
            start.elapsed()
        ),
    )
}

fn bau_certificates() -> Outcome {
    let start = Instant::now();
    let scenario = Scenario::load(&scenarios().join("pinching_2d.toml")).unwrap();
    let cfg = &scenario.config;
    let resolver = Resolver {
        alg: scenario.algebra().unwrap(),
        seed: cfg.seed,
        base_dir: &scenario.base_dir,
    };
    let maps: Vec<_> = cfg
        .contractions
        .iter()
        .enumerate()
        .map(|(i, m)| resolver.contraction(m, &format!("contraction/{i}")).unwrap())
        .collect();
    let x = resolver.element(&cfg.x, "x").unwrap();
    let w = resolver.weight(cfg.weight.as_ref().unwrap(), 2).unwrap();
    let limit = limit_oracle(w.as_trig().unwrap(), &maps, &x).unwrap().value;
    let residuals = residual_family(&w, &maps, &x, &limit, 96, DEFAULT_BUDGET).unwrap();
    let opts = SolverOptions::default();
    let certs = certify_ladder(&residuals, &[16, 32, 64], 2.0, Threshold::Epsilon(0.01), &opts).unwrap();
    let mut sound = true;
    let mut best: Option<(usize, f64)> = None;
    for cert in &certs {
        sound &= verify_certificate(cert, &residuals).unwrap().passed();
        // independent check: every tail residual, compressed by e
        let e = cert.e.element();
        let mut sup: f64 = 0.0;
        for (_, r) in tail(&residuals, cert.onset) {
            let pressed = &(e * r) * e;
            for b in pressed.blocks() {
                sup = sup.max(singular_values(b).into_iter().fold(0.0, f64::max));
            }
        }
        let tau_perp = e.algebra().total_trace() - e.trace().re;
        sound &= sup <= cert.lambda + 1e-10 && tau_perp <= 0.01 + 1e-12;
        sound &= cert.chebyshev_consistent;
        for part in &cert.parts {
            let mass_bound = (part.dominant_norm / part.lambda).powf(2.0);
            sound &= part.chebyshev_mass <= mass_bound + tol::CHEBYSHEV;
        }
        if cert.onset <= tol::MAX_ONSET && cert.tail_sup <= tol::TAIL_SUP && best.is_none_or(|(_, t)| cert.tail_sup < t) {
            best = Some((cert.onset, cert.tail_sup));
        }
    }
    let detail = match best {
        Some((n0, t)) => format!("tail_sup {t:.2e} at onset {n0}"),
        None => "no onset reached the tail bound".into(),
    };
    outcome(
        sound && best.is_some(),
        format!("{detail}, re-verification {}, {:.2?}", if sound { "exact" } else { "FAILED" }, start.elapsed()),
    )
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

fn besicovitch() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    for (d, cutoff, onset) in [(1usize, 400usize, tol::ONSET_1D), (2, 256, tol::ONSET_2D)] {
        let one = TrigPolynomial::constant(d, c(1.0)).unwrap();
        let a = BesicovitchWeight::new(
            one.clone(),
            Perturbation::Decay {
                coefficient: c(1.0),
                alpha: 1.0,
            },
            vec![(tol::BESICOVITCH_EPS, one)],
            None,
        )
        .unwrap();
        let check = BesicovitchCheck {
            epsilon: tol::BESICOVITCH_EPS,
            cutoff: MultiIndex::diagonal(cutoff, d),
            ladder: Ladder::Every,
            onset,
            budget: DEFAULT_BUDGET,
        };
        let rep = verify_besicovitch(&a, &check).unwrap();
        // closed forms: H_n / n on [1, n], ((2n+1) H_n − 2n) / n² on [1, n]²
        let oracle_err = rep
            .rows
            .iter()
            .map(|row| {
                let n = row.m as f64;
                let want = match d {
                    1 => harmonic(row.m) / n,
                    _ => ((2.0 * n + 1.0) * harmonic(row.m) - 2.0 * n) / (n * n),
                };
                (row.discrepancy - want).abs()
            })
            .fold(0.0, f64::max);
        let observed = rep.observed_onset;
        let ok = rep.passed && oracle_err < 1e-12;
        pass &= ok;
        detail.push(format!(
            "d={d}: onset {} (need <= {onset}), oracle deviation {oracle_err:.1e}",
            observed.map_or("none".to_string(), |m| m.to_string())
        ));
    }
    detail.push(format!("{:.2?}", start.elapsed()));
    outcome(pass, detail.join("; "))
}

fn fitted_slope(ns: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn convergence_rate() -> Outcome {
    let start = Instant::now();
    let omega = 2.0 * PI / 3.0;
    let m3 = Arc::new(Algebra::matrix(3).unwrap());
    let pinch = |alg: &Arc<Algebra>, a: &[f64], b: &[f64]| {
        construct_contraction(
            alg,
            ContractionSpec::Pinching {
                projections: vec![diag(alg, a), diag(alg, b)],
            },
        )
        .unwrap()
    };
    let term = |coef: C64, phases: Vec<f64>| TrigTerm {
        coefficient: coef,
        phases,
    };
    let two_axis = |th: f64| {
        TrigPolynomial::new(2, vec![term(c(0.5), vec![0.0, 0.0]), term(C64::new(0.3, 0.2), vec![th, 0.0])]).unwrap()
    };
    let mut cases: Vec<(&str, Vec<AbsoluteContraction>, Element, TrigPolynomial)> = Vec::new();
    cases.push((
        "pinchings",
        vec![pinch(&m3, &[1.0, 0.0, 0.0], &[0.0, 1.0, 1.0]), pinch(&m3, &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0])],
        sample::random_positive(&m3, &mut rng(1, "rate/x")),
        two_axis(omega),
    ));
    let alg = shape(3);
    cases.push((
        "pinching+kraus",
        vec![
            pinch(&alg, &[1.0, 0.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 1.0, 0.0, 1.0]),
            construct_contraction(
                &alg,
                ContractionSpec::Kraus {
                    operators: sample::random_kraus(&alg, 3, 0.9, &mut rng(2, "rate/kraus")),
                },
            )
            .unwrap(),
        ],
        sample::random_positive(&alg, &mut rng(2, "rate/x")),
        two_axis(omega),
    ));
    let alg = shape(2);
    cases.push((
        "kraus-1d",
        vec![construct_contraction(
            &alg,
            ContractionSpec::Kraus {
                operators: sample::random_kraus(&alg, 2, 0.9, &mut rng(3, "rate/kraus")),
            },
        )
        .unwrap()],
        sample::random_positive(&alg, &mut rng(3, "rate/x")),
        TrigPolynomial::new(1, vec![term(c(0.7), vec![0.0]), term(C64::new(0.0, 0.3), vec![PI / 2.0])]).unwrap(),
    ));
    let ns = [8usize, 16, 32, 64];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, maps, x, a) in &cases {
        let limit = limit_oracle(a, maps, x).unwrap().value;
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let avg = weighted_average_direct(a, maps, x, &MultiIndex::diagonal(n, a.dim()), DEFAULT_BUDGET).unwrap();
                (&avg - &limit).lp_norm(2.0).unwrap()
            })
            .collect();
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        let slope = fitted_slope(&ns, &errs);
        pass &= decreasing && slope >= tol::SLOPE.0 && slope <= tol::SLOPE.1;
        detail.push(format!("{name} slope {slope:.3}"));
    }
    detail.push(format!("{:.2?}", start.elapsed()));
    outcome(pass, detail.join(", "))
}

fn interpolation() -> Outcome {
    let start = Instant::now();
    let opts = SolverOptions::default();
    let mut failures = 0;
    let mut tightest = f64::INFINITY;
    for s in 0..100u64 {
        let alg = shape(s as usize);
        let mut r = rng(s, "interpolation");
        let fam: Vec<Element> = (0..2 + s as usize % 4).map(|_| sample::random_positive(&alg, &mut r)).collect();
        for (p, q) in [(4.0, 2.0), (3.0, 1.5)] {
            let rep = interpolation_check(&fam, p, q, tol::INTERPOLATION, &opts).unwrap();
            if !rep.holds {
                failures += 1;
            }
            tightest = tightest.min(rep.rhs / rep.lhs - 1.0);
        }
    }
    outcome(
        failures == 0,
        format!("200 checks, {failures} failures, smallest relative margin {tightest:.2e}, {:.2?}", start.elapsed()),
    )
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let mut files = 0;
    let mut diffs = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(scenarios())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    paths.sort();
    for path in &paths {
        let s = Scenario::load(path).unwrap();
        let tasks = ncergo::configured_tasks(&s);
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let r = run_scenario(&s, &tasks, &RunOptions::default());
            emit_report(&r, d.path(), OutputFormat::Both).unwrap();
        }
        for entry in std::fs::read_dir(dirs[0].path()).unwrap() {
            let name = entry.unwrap().file_name();
            if name == "timing.json" {
                continue;
            }
            files += 1;
            if std::fs::read(dirs[0].path().join(&name)).unwrap() != std::fs::read(dirs[1].path().join(&name)).unwrap() {
                diffs.push(format!("{}:{}", path.display(), name.to_string_lossy()));
            }
        }
    }
    outcome(
        diffs.is_empty() && files > 0,
        format!("{} scenarios, {files} files compared, {} differ, {:.2?}", paths.len(), diffs.len(), start.elapsed()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("norm/trace suite", norm_trace_suite),
        ("commutative oracle", commutative_oracle),
        ("evaluator agreement", evaluator_agreement),
        ("real/imaginary sandwich", sandwich),
        ("dominant-element correctness", dominant_elements),
        ("maximal ladder", maximal_ladder),
        ("b.a.u. certificates", bau_certificates),
        ("Besicovitch verification", besicovitch),
        ("convergence-rate shadow", convergence_rate),
        ("interpolation inequality", interpolation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {:>2} {name}: {}", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
