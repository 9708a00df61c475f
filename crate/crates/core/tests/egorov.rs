//! On a diagonal algebra a certificate projection is a set of points; it
//! must sit inside the set found by a direct scalar search.

use std::sync::Arc;

use ncergo_core::bau::tail;
use ncergo_core::weights::keyed_uniform;
use ncergo_core::{certify_bau, Algebra, Element, IndexBox, MultiIndex, SolverOptions, Threshold, C64};

#[test]
fn certificate_matches_scalar_egorov_search() {
    let n = 12;
    let weights: Vec<f64> = (0..n).map(|i| 0.5 + 0.05 * i as f64).collect();
    let alg = Arc::new(Algebra::new(vec![1; n], weights.clone()).unwrap());
    // most points decay like 1/m(k), two points carry a slowly decaying bump
    let amp: Vec<f64> = (0..n)
        .map(|i| if i == 3 || i == 8 { 40.0 } else { 0.2 * (1.0 + keyed_uniform(9, &[i])) })
        .collect();
    let residual = |k: &MultiIndex| {
        let m = k.min_component() as f64;
        let vals: Vec<C64> = (0..n)
            .map(|i| {
                let sign = if (k.components()[0] + i).is_multiple_of(2) { 1.0 } else { -1.0 };
                C64::new(sign * amp[i] / m, 0.0)
            })
            .collect();
        Element::from_flat(&alg, &vals).unwrap()
    };
    let residuals: Vec<(MultiIndex, Element)> =
        IndexBox::cube(1, 24, 2).unwrap().iter().map(|k| (k.clone(), residual(&k))).collect();

    let mut excluded = 0;
    for onset in [4, 8, 16] {
        for eps in [0.3, 2.0] {
            let cert = certify_bau(&residuals, onset, 2.0, Threshold::Epsilon(eps), &SolverOptions::default()).unwrap();
            assert!(cert.sound);
            let flat = cert.e.element().to_flat();
            let chosen: Vec<bool> = flat.iter().map(|v| v.re > 0.5).collect();
            for v in &flat {
                assert!(v.im.abs() < 1e-12 && (v.re.abs() < 1e-12 || (v.re - 1.0).abs() < 1e-12));
            }
            // scalar search: points whose tail sup stays below λ
            let tail_sup: Vec<f64> = (0..n)
                .map(|i| {
                    tail(&residuals, onset)
                        .iter()
                        .map(|(_, r)| r.to_flat()[i].norm())
                        .fold(0.0, f64::max)
                })
                .collect();
            let good: Vec<bool> = tail_sup.iter().map(|&s| s <= cert.lambda + 1e-10).collect();
            for i in 0..n {
                assert!(!chosen[i] || good[i], "point {i} chosen but its tail sup exceeds lambda");
            }
            excluded += chosen.iter().filter(|c| !**c).count();
            let measure_out: f64 = (0..n).filter(|&i| !chosen[i]).map(|i| weights[i]).sum();
            assert!(measure_out <= eps + 1e-12, "{measure_out} > {eps}");
            let search_out: f64 = (0..n).filter(|&i| !good[i]).map(|i| weights[i]).sum();
            assert!(search_out <= measure_out + 1e-12);
        }
    }
    assert!(excluded > 0, "no certificate cut any point");
}
