use num_complex::Complex64;
use rand::Rng;

use zerocorr::kac_rice::{assemble_blocks, assemble_blocks_with, correlation_from_blocks, CorrelationQuery};
use zerocorr::kernels::{
    disk_grid, fs_scaled_szego, heisenberg_left_invariant_jet, heisenberg_level_kernel, kernel_jet,
    neardiag_deviation, KernelModel,
};
use zerocorr::rng::stream_rng;
use zerocorr::Method;

fn random_point<R: Rng>(rng: &mut R, m: usize, spread: f64) -> Vec<Complex64> {
    (0..m)
        .map(|_| Complex64::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread)))
        .collect()
}

fn models() -> Vec<KernelModel> {
    let mut out = Vec::new();
    for m in 1..=3 {
        out.push(KernelModel::FubiniStudy { level: 6, dim: m });
        out.push(KernelModel::HeisenbergLevel { level: 3, dim: m });
        out.push(KernelModel::HeisenbergLimit { dim: m });
    }
    out
}

#[test]
fn hermitian_symmetry() {
    let mut rng = stream_rng(1, 0);
    for model in models() {
        for _ in 0..100 {
            let z = random_point(&mut rng, model.dim(), 0.8);
            let w = random_point(&mut rng, model.dim(), 0.8);
            let a = kernel_jet(&model, &z, &w).value;
            let b = kernel_jet(&model, &w, &z).value;
            assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0), "{model:?}");
        }
    }
}

/// Gaussian weight separating the Heisenberg kernel into a holomorphic part.
fn weight(model: &KernelModel, z: &[Complex64]) -> f64 {
    match *model {
        KernelModel::HeisenbergLevel { level, .. } => {
            (-0.5 * f64::from(level) * z.iter().map(|x| x.norm_sqr()).sum::<f64>()).exp()
        }
        _ => 1.0,
    }
}

#[test]
fn jets_match_finite_differences() {
    let h = 1e-5;
    let mut rng = stream_rng(2, 0);
    for model in models() {
        let m = model.dim();
        for _ in 0..5 {
            let z = random_point(&mut rng, m, 0.5);
            let w = random_point(&mut rng, m, 0.5);
            // holomorphic in z, antiholomorphic in w
            let f = |z: &[Complex64], w: &[Complex64]| kernel_jet(&model, z, w).value / (weight(&model, z) * weight(&model, w));
            let jet = kernel_jet(&model, &z, &w);
            let scale = weight(&model, &z) * weight(&model, &w);
            let shift = |p: &[Complex64], q: usize, d: f64| {
                let mut p = p.to_vec();
                p[q] += Complex64::new(d, 0.0);
                p
            };
            for qp in 0..m {
                let fd = (f(&z, &shift(&w, qp, h)) - f(&z, &shift(&w, qp, -h))) / (2.0 * h);
                let got = jet.grad[qp] / scale;
                assert!((fd - got).norm() <= 1e-6 * got.norm().max(1.0), "{model:?} grad {qp}: {fd} vs {got}");
                // mixed second differences lose digits as eps/h^2, so use a wider step
                let h = 1e-4;
                for q in 0..m {
                    let fd = (f(&shift(&z, q, h), &shift(&w, qp, h)) - f(&shift(&z, q, h), &shift(&w, qp, -h))
                        - f(&shift(&z, q, -h), &shift(&w, qp, h))
                        + f(&shift(&z, q, -h), &shift(&w, qp, -h)))
                        / (4.0 * h * h);
                    let got = jet.hess[(q, qp)] / scale;
                    assert!((fd - got).norm() <= 1e-6 * got.norm().max(1.0), "{model:?} hess {q}{qp}: {fd} vs {got}");
                }
            }
        }
    }
}

#[test]
fn fubini_study_kernel_scales_to_bargmann_fock() {
    let mut rng = stream_rng(3, 0);
    for m in 1..=3 {
        for _ in 0..10 {
            let z = random_point(&mut rng, m, 2.0 / (2f64).sqrt());
            let w = random_point(&mut rng, m, 2.0 / (2f64).sqrt());
            let limit = kernel_jet(&KernelModel::HeisenbergLimit { dim: m }, &z, &w).value;
            let consts: Vec<f64> = [100u32, 1000, 10000]
                .iter()
                .map(|&n| {
                    let s = 1.0 / f64::from(n).sqrt();
                    let zs: Vec<Complex64> = z.iter().map(|x| x * s).collect();
                    let ws: Vec<Complex64> = w.iter().map(|x| x * s).collect();
                    let v = kernel_jet(&KernelModel::FubiniStudy { level: n, dim: m }, &zs, &ws).value;
                    (v - limit).norm() * f64::from(n)
                })
                .collect();
            let (lo, hi) = consts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &c| (l.min(c), h.max(c)));
            assert!(hi <= 1.5 * lo + 1e-9, "m={m}: N·deviation {consts:?}");
        }
    }
}

#[test]
fn heisenberg_level_one_reproduces_limit_kernel() {
    let u = [Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.1)];
    let v = [Complex64::new(-0.1, 0.7), Complex64::new(0.2, 0.2)];
    let lvl = heisenberg_level_kernel(1, &u, 0.4, &v, -0.3);
    let lim = zerocorr::kernels::heisenberg_limit_kernel(&u, 0.4, &v, -0.3);
    assert_eq!(lvl, lim);
}

#[test]
fn scaled_szego_converges_to_heisenberg_kernel() {
    let u = [Complex64::new(0.9, -0.4)];
    let v = [Complex64::new(-0.6, 1.1)];
    let want = (u[0] * v[0].conj() - 0.5 * u[0].norm_sqr() - 0.5 * v[0].norm_sqr()).exp() / std::f64::consts::PI;
    let got = fs_scaled_szego(10_000_000, &u, &v);
    assert!((got - want).norm() < 1e-6);
}

#[test]
fn near_diagonal_deviation_shrinks() {
    let grid = disk_grid(2.0, 4, 8);
    let d100 = neardiag_deviation(100, &grid);
    let d400 = neardiag_deviation(400, &grid);
    // at least the O(N^{-1/2}) rate; in practice close to N^{-1}
    assert!(d100 / d400 >= 2.0 * 0.9, "ratio {}", d100 / d400);
}

#[test]
fn left_and_right_invariant_fields_give_equal_correlations() {
    let mut rng = stream_rng(4, 0);
    for (m, k, n) in [(1usize, 1usize, 2usize), (2, 1, 2), (2, 2, 2), (1, 1, 3), (2, 1, 3)] {
        let level = 4;
        let points: Vec<Vec<Complex64>> = (0..n).map(|_| random_point(&mut rng, m, 0.6)).collect();
        let q = CorrelationQuery::new(KernelModel::HeisenbergLevel { level, dim: m }, k, points, Method::Exact);
        let right = correlation_from_blocks(&q, &assemble_blocks(&q).unwrap()).unwrap().value;
        let blocks = assemble_blocks_with(&q, |z, w| heisenberg_left_invariant_jet(level, z, w)).unwrap();
        let left = correlation_from_blocks(&q, &blocks).unwrap().value;
        assert!((left - right).abs() <= 1e-10 * right.abs(), "m={m} k={k} n={n}: {left} vs {right}");
    }
}
