use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use zerocorr::closed_form::{kappa, KappaQuery};
use zerocorr::kac_rice::{correlation, normalized_correlation, pair_configuration, CorrelationQuery};
use zerocorr::rng::stream_rng;
use zerocorr::{KernelModel, Method};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn limit_query(m: usize, k: usize, points: Vec<Vec<Complex64>>) -> CorrelationQuery {
    CorrelationQuery::new(KernelModel::HeisenbergLimit { dim: m }, k, points, Method::Exact)
}

fn random_points<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|_| (0..m).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect()
}

/// A random element of U(m) for m ≤ 2.
fn random_unitary<R: Rng>(rng: &mut R, m: usize) -> Vec<Vec<Complex64>> {
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    if m == 1 {
        return vec![vec![phase]];
    }
    let a = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let b = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    vec![vec![phase * a, -phase * b.conj()], vec![phase * b, phase * a.conj()]]
}

fn apply(u: &[Vec<Complex64>], shift: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    u.iter()
        .zip(shift)
        .map(|(row, s)| row.iter().zip(z).map(|(a, b)| a * b).sum::<Complex64>() + s)
        .collect()
}

#[test]
fn invariant_under_euclidean_motions() {
    let mut rng = stream_rng(10, 0);
    for (m, k, n) in [(1, 1, 2), (1, 1, 3), (2, 1, 2), (2, 2, 2), (2, 1, 3)] {
        for _ in 0..20 {
            let pts = random_points(&mut rng, n, m);
            let u = random_unitary(&mut rng, m);
            let shift: Vec<Complex64> = (0..m).map(|_| c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
            let moved: Vec<Vec<Complex64>> = pts.iter().map(|z| apply(&u, &shift, z)).collect();
            let a = correlation(&limit_query(m, k, pts)).unwrap().value;
            let b = correlation(&limit_query(m, k, moved)).unwrap().value;
            assert!((a - b).abs() <= 1e-10 * a.abs(), "m={m} k={k} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn symmetric_under_point_permutations() {
    let mut rng = stream_rng(11, 0);
    for (m, k) in [(1, 1), (2, 1)] {
        let pts = random_points(&mut rng, 3, m);
        let base = correlation(&limit_query(m, k, pts.clone())).unwrap().value;
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let p: Vec<Vec<Complex64>> = perm.iter().map(|&i| pts[i].clone()).collect();
            let v = correlation(&limit_query(m, k, p)).unwrap().value;
            assert!((v - base).abs() <= 1e-10 * base.abs());
        }
    }
}

#[test]
fn correlations_are_positive() {
    let mut rng = stream_rng(12, 0);
    for (m, k, n) in [(1, 1, 2), (1, 1, 3), (2, 2, 2), (3, 1, 2)] {
        for _ in 0..20 {
            let v = correlation(&limit_query(m, k, random_points(&mut rng, n, m))).unwrap().value;
            assert!(v > 0.0, "m={m} k={k} n={n}: {v}");
        }
    }
}

#[test]
fn pair_correlation_matches_closed_form() {
    for (m, k) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
        for r in [0.05, 0.3, 1.0, 2.0, 3.5] {
            let got = normalized_correlation(&limit_query(m, k, pair_configuration(r, m))).unwrap().value;
            let want = kappa(KappaQuery::new(r, m, k)).unwrap();
            assert!((got - want).abs() <= 1e-8 * want.max(1e-3), "m={m} k={k} r={r}: {got} vs {want}");
        }
    }
}

#[test]
fn codimension_two_pair_tends_to_three_quarters() {
    let got = normalized_correlation(&limit_query(2, 2, pair_configuration(0.01, 2))).unwrap().value;
    assert!((got - 0.75).abs() < 1e-4, "{got}");
}

#[test]
fn fubini_study_density() {
    let level = 20;
    let z = vec![vec![c(0.4, -0.7)]];
    let q = CorrelationQuery::new(KernelModel::FubiniStudy { level, dim: 1 }, 1, z, Method::Exact);
    let v = correlation(&q).unwrap().value;
    assert!((v - f64::from(level) / PI).abs() < 1e-10 * v);
}

#[test]
fn heisenberg_level_pair_is_rescaled_kappa() {
    for level in [1u32, 4, 9] {
        for r in [0.2, 0.5, 1.0] {
            let q = CorrelationQuery::new(KernelModel::HeisenbergLevel { level, dim: 1 }, 1, pair_configuration(r, 1), Method::Exact);
            let got = normalized_correlation(&q).unwrap().value;
            let want = kappa(KappaQuery::new(f64::from(level).sqrt() * r, 1, 1)).unwrap();
            assert!((got - want).abs() < 1e-9 * want, "N={level} r={r}: {got} vs {want}");
        }
    }
}

#[test]
fn monte_carlo_estimate_brackets_exact_value() {
    let pts = vec![vec![c(0.0, 0.0)], vec![c(0.7, 0.1)], vec![c(-0.2, 0.9)]];
    let exact = correlation(&limit_query(1, 1, pts.clone())).unwrap().value;
    let q = CorrelationQuery::new(KernelModel::HeisenbergLimit { dim: 1 }, 1, pts, Method::MonteCarlo { samples: 300_000, seed: 3 });
    let mc = correlation(&q).unwrap();
    assert!(((mc.value - exact) / mc.std_error).abs() < 4.0, "{} ± {} vs {exact}", mc.value, mc.std_error);
}

#[test]
fn rejects_bad_queries() {
    let kind = |q: CorrelationQuery| correlation(&q).unwrap_err().kind();
    assert_eq!(kind(limit_query(1, 2, pair_configuration(1.0, 1))), "InvalidInput");
    assert_eq!(kind(limit_query(1, 1, pair_configuration(1e-6, 1))), "NearSingular");
    let four = vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], vec![c(0.0, 1.0)], vec![c(1.0, 1.0)]];
    assert_eq!(kind(limit_query(1, 1, four)), "SizeLimitExceeded");
}
