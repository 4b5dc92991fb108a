use num_complex::Complex64;

use zerocorr::gaussian::{expectation_det_product, sample_complex_gaussian, wick_mixed_moment, GaussianSpec};
use zerocorr::kac_rice::{assemble_blocks, jet_covariance, pair_configuration, CorrelationQuery};
use zerocorr::numeric::ComplexMatrix;
use zerocorr::{KernelModel, Method};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spec3() -> GaussianSpec {
    let g = ComplexMatrix::from_fn(3, 3, |i, j| c(0.3 * i as f64 - 0.2 * j as f64 + if i == j { 1.0 } else { 0.0 }, 0.1 * (i + 2 * j) as f64));
    GaussianSpec::new(g.matmul(&g.adjoint()).hermitian_part()).unwrap()
}

fn pair_lambda(m: usize, k: usize, r: f64) -> ComplexMatrix {
    let q = CorrelationQuery::new(KernelModel::HeisenbergLimit { dim: m }, k, pair_configuration(r, m), Method::Exact);
    jet_covariance(&assemble_blocks(&q).unwrap()).unwrap()
}

#[test]
fn wick_moment_invariant_under_reordering() {
    let s = spec3();
    let holo = [0, 1, 1, 2];
    let anti = [2, 0, 1, 1];
    let base = wick_mixed_moment(&s, &holo, &anti).unwrap();
    let perms = [[1, 0, 3, 2], [3, 2, 1, 0], [2, 3, 0, 1]];
    for p in perms {
        let h: Vec<usize> = p.iter().map(|&i| holo[i]).collect();
        let a: Vec<usize> = p.iter().rev().map(|&i| anti[i]).collect();
        let v = wick_mixed_moment(&s, &h, &a).unwrap();
        assert!((v - base).norm() < 1e-12 * base.norm());
    }
    assert_eq!(wick_mixed_moment(&s, &[0, 1], &[2]).unwrap(), c(0.0, 0.0));
}

#[test]
fn sample_moments_match_wick() {
    let s = spec3();
    let draws = sample_complex_gaussian(&s, 200_000, 11);
    let n = draws.rows() as f64;
    let cases: [(&[usize], &[usize]); 3] = [(&[0], &[1]), (&[0, 2], &[1, 2]), (&[1, 1], &[0, 2])];
    for (h, a) in cases {
        let want = wick_mixed_moment(&s, h, a).unwrap();
        let mut sum = c(0.0, 0.0);
        let mut sq = 0.0;
        for i in 0..draws.rows() {
            let v: Complex64 = h.iter().map(|&j| draws[(i, j)]).product::<Complex64>()
                * a.iter().map(|&j| draws[(i, j)].conj()).product::<Complex64>();
            sum += v;
            sq += v.norm_sqr();
        }
        let mean = sum / n;
        let se = ((sq / n - mean.norm_sqr()) / n).sqrt();
        assert!((mean - want).norm() < 5.0 * se, "{h:?},{a:?}: {mean} vs {want} (se {se})");
    }
}

#[test]
fn bracket_is_homogeneous() {
    for (m, k) in [(1, 1), (2, 1), (2, 2)] {
        let lambda = pair_lambda(m, k, 0.8);
        let base = expectation_det_product(&lambda, 2, k, m, Method::Exact).unwrap().value;
        let t = 1.7;
        let scaled = ComplexMatrix::from_fn(lambda.rows(), lambda.cols(), |i, j| lambda[(i, j)] * t);
        let v = expectation_det_product(&scaled, 2, k, m, Method::Exact).unwrap().value;
        let want = base * t.powi((k * 2) as i32);
        assert!((v - want).abs() < 1e-12 * want.abs(), "m={m} k={k}");
    }
}

#[test]
fn identity_bracket_is_falling_factorial() {
    for m in 1..=4usize {
        for k in 1..=m {
            let v = expectation_det_product(&ComplexMatrix::identity(k * m), 1, k, m, Method::Exact).unwrap().value;
            let want: usize = (m - k + 1..=m).product();
            assert!((v - want as f64).abs() < 1e-12, "m={m} k={k}: {v}");
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    for (m, k) in [(1, 1), (2, 1), (2, 2)] {
        let lambda = pair_lambda(m, k, 1.0);
        let exact = expectation_det_product(&lambda, 2, k, m, Method::Exact).unwrap().value;
        let mc = expectation_det_product(&lambda, 2, k, m, Method::MonteCarlo { samples: 400_000, seed: 5 }).unwrap();
        let z = (mc.value - exact) / mc.std_error;
        assert!(z.abs() < 4.0, "m={m} k={k}: exact {exact}, mc {} ± {}", mc.value, mc.std_error);
    }
}
