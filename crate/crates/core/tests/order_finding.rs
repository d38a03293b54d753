use std::collections::BTreeSet;

use num_complex::Complex64;

use semiqft::semiclassical::Execution;
use semiqft::shor::{factor, post_process, pow_mod, run_order_finding, ShorConfig};

/// `P(c) = Σ_y |2^{-n} Σ_{a : x^a ≡ y} e^{2πi·ac/2^n}|²`, summed directly.
fn oracle(modulus: u64, x: u64, n: usize) -> Vec<f64> {
    let size = 1u64 << n;
    let residues: Vec<u64> = (0..size).map(|a| pow_mod(x, a, modulus)).collect();
    let ys: BTreeSet<u64> = residues.iter().copied().collect();
    (0..size)
        .map(|c| {
            ys.iter()
                .map(|&y| {
                    let amp: Complex64 = (0..size)
                        .filter(|&a| residues[a as usize] == y)
                        .map(|a| {
                            let theta =
                                2.0 * std::f64::consts::PI * ((a * c) % size) as f64 / size as f64;
                            Complex64::from_polar(1.0, theta)
                        })
                        .sum();
                    (amp / size as f64).norm_sqr()
                })
                .sum()
        })
        .collect()
}

fn check(modulus: u64, x: u64, t: usize) {
    let cfg = ShorConfig::new(modulus, x, t).unwrap();
    let got = run_order_finding(&cfg, Execution::Enumerate).unwrap();
    let want = oracle(modulus, x, cfg.n);
    for (c, p) in want.iter().enumerate() {
        assert!(
            (got.probability(c as u64) - p).abs() < 1e-9,
            "N={modulus} x={x} t={t} c={c}"
        );
    }
}

#[test]
fn mod_15_distributions_match_the_oracle() {
    for x in [2, 4, 7, 11, 13, 14] {
        check(15, x, 2);
    }
}

#[test]
fn distribution_does_not_depend_on_block_size() {
    let reference =
        run_order_finding(&ShorConfig::new(15, 7, 1).unwrap(), Execution::Enumerate).unwrap();
    for t in 2..=8 {
        let d =
            run_order_finding(&ShorConfig::new(15, 7, t).unwrap(), Execution::Enumerate).unwrap();
        assert!(d.total_variation(&reference).unwrap() < 1e-9, "t={t}");
    }
}

#[test]
fn mod_21_matches_the_oracle() {
    check(21, 2, 5);
}

#[test]
fn reported_factors_are_always_genuine() {
    for (modulus, x) in [(15, 7), (15, 11), (21, 2), (21, 5)] {
        let cfg = ShorConfig::new(modulus, x, 2).unwrap();
        for c in 0..1u64 << cfg.n {
            let out = post_process(&cfg, c);
            if let Some(fs) = &out.factors {
                assert!(out.is_success());
                for &f in fs {
                    assert!(
                        f > 1 && f < modulus && modulus % f == 0,
                        "N={modulus} c={c} f={f}"
                    );
                }
            }
        }
    }
}

#[test]
fn factors_21_and_15() {
    for (modulus, x, want) in [(21u64, 2u64, [3u64, 7]), (15, 4, [3, 5]), (15, 7, [3, 5])] {
        let cfg = ShorConfig::new(modulus, x, 3).unwrap();
        let run = factor(&cfg, 64, 9, 64).unwrap();
        assert!(run.succeeded(), "N={modulus} x={x}");
        assert_eq!(run.outcome.factors, Some(want.into_iter().collect()));
    }
}
