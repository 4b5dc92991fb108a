//! Szegő kernels of the model geometries and their jets.
//!
//! A [`KernelJet`] at a point pair `(z, w)` carries the three covariances
//! that drive the zero statistics of a Gaussian section `s`:
//!
//! * `value   = E[ s(z) conj(s(w)) ]`
//! * `grad[q] = E[ s(z) conj(∂_q s(w)) ]`
//! * `hess[q][q'] = E[ ∂_q s(z) conj(∂_q' s(w)) ]`
//!
//! For the Heisenberg kernels the derivatives are horizontal derivatives on
//! the circle bundle, taken at phase zero.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::ComplexMatrix;

/// Largest complex dimension supported by the correlation routines.
pub const MAX_DIM: usize = 4;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelModel {
    /// Degree-`level` SU(dim+1) polynomials on CP^dim, affine chart.
    FubiniStudy { level: u32, dim: usize },
    /// Level-`level` Szegő kernel of the reduced Heisenberg group.
    HeisenbergLevel { level: u32, dim: usize },
    /// Bargmann-Fock scaling limit, S(z, w) = exp(z·w̄).
    HeisenbergLimit { dim: usize },
}

impl KernelModel {
    pub fn dim(&self) -> usize {
        match *self {
            KernelModel::FubiniStudy { dim, .. }
            | KernelModel::HeisenbergLevel { dim, .. }
            | KernelModel::HeisenbergLimit { dim } => dim,
        }
    }

    pub fn level(&self) -> Option<u32> {
        match *self {
            KernelModel::FubiniStudy { level, .. } | KernelModel::HeisenbergLevel { level, .. } => {
                Some(level)
            }
            KernelModel::HeisenbergLimit { .. } => None,
        }
    }

    /// Natural length scale of the model: zeros are typically this far apart.
    pub fn length_scale(&self) -> f64 {
        self.level().map_or(1.0, |n| 1.0 / f64::from(n).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidInput(format!(
                "dimension {dim} outside supported range 1..={MAX_DIM}"
            )));
        }
        if self.level() == Some(0) {
            return Err(Error::InvalidInput("level must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelJet {
    pub value: Complex64,
    pub grad: Vec<Complex64>,
    pub hess: ComplexMatrix,
}

/// Σ_r z_r conj(w_r)
pub fn hermitian_dot(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn squared_distance(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// Jet of the model kernel at `(z, w)`.
///
/// # Panics
/// If `z` or `w` do not have `model.dim()` coordinates.
pub fn kernel_jet(model: &KernelModel, z: &[Complex64], w: &[Complex64]) -> KernelJet {
    let m = model.dim();
    assert!(z.len() == m && w.len() == m, "point dimension must equal model dimension {m}");
    match *model {
        KernelModel::FubiniStudy { level, .. } => fubini_study_jet(level, z, w),
        KernelModel::HeisenbergLevel { level, .. } => heisenberg_level_jet(level, z, w),
        KernelModel::HeisenbergLimit { .. } => heisenberg_limit_jet(z, w),
    }
}

/// S_N(z,w) = (1 + z·w̄)^N with its w̄- and z-derivatives.
fn fubini_study_jet(level: u32, z: &[Complex64], w: &[Complex64]) -> KernelJet {
    let m = z.len();
    let n = f64::from(level);
    let t = Complex64::new(1.0, 0.0) + hermitian_dot(z, w);
    let t_n2 = if level >= 2 { t.powu(level - 2) } else { Complex64::new(0.0, 0.0) };
    let t_n1 = t.powu(level - 1);
    let value = t_n1 * t;
    let grad = z.iter().map(|zq| n * zq * t_n1).collect();
    let hess = ComplexMatrix::from_fn(m, m, |q, qp| {
        let delta = if q == qp { n * t_n1 } else { Complex64::new(0.0, 0.0) };
        n * (n - 1.0) * w[q].conj() * z[qp] * t_n2 + delta
    });
    KernelJet { value, grad, hess }
}

fn heisenberg_limit_jet(z: &[Complex64], w: &[Complex64]) -> KernelJet {
    let m = z.len();
    let e = hermitian_dot(z, w).exp();
    KernelJet {
        value: e,
        grad: z.iter().map(|zq| zq * e).collect(),
        hess: ComplexMatrix::from_fn(m, m, |q, qp| {
            let delta = if q == qp { 1.0 } else { 0.0 };
            (delta + w[q].conj() * z[qp]) * e
        }),
    }
}

/// Right-invariant horizontal derivatives of Π_N^H at θ = φ = 0.
fn heisenberg_level_jet(level: u32, z: &[Complex64], w: &[Complex64]) -> KernelJet {
    let m = z.len();
    let n = f64::from(level);
    let value = heisenberg_level_kernel(level, z, 0.0, w, 0.0);
    KernelJet {
        value,
        grad: z.iter().map(|zq| n * zq * value).collect(),
        hess: ComplexMatrix::from_fn(m, m, |q, qp| {
            let delta = if q == qp { n } else { 0.0 };
            (n * n * w[q].conj() * z[qp] + delta) * value
        }),
    }
}

/// Jet of Π_N^H built from the left-invariant horizontal fields instead of
/// the right-invariant ones. Correlations do not depend on this choice.
pub fn heisenberg_left_invariant_jet(level: u32, z: &[Complex64], w: &[Complex64]) -> KernelJet {
    let m = z.len();
    assert_eq!(w.len(), m);
    let n = f64::from(level);
    let value = heisenberg_level_kernel(level, z, 0.0, w, 0.0);
    KernelJet {
        value,
        grad: (0..m).map(|q| n * (z[q] - w[q]) * value).collect(),
        hess: ComplexMatrix::from_fn(m, m, |q, qp| {
            let delta = if q == qp { n } else { 0.0 };
            (n * n * (z[qp] - w[qp]) * (w[q].conj() - z[q].conj()) + delta) * value
        }),
    }
}

/// Π_N^H(z,θ; w,φ) = (N/π)^m e^{iN(θ-φ)} e^{iN Im(z·w̄)} e^{-N|z-w|²/2}.
pub fn heisenberg_level_kernel(level: u32, z: &[Complex64], theta: f64, w: &[Complex64], phi: f64) -> Complex64 {
    let m = z.len() as i32;
    let n = f64::from(level);
    let phase = n * (theta - phi + hermitian_dot(z, w).im);
    let modulus = (n / PI).powi(m) * (-0.5 * n * squared_distance(z, w)).exp();
    (I * phase).exp() * modulus
}

/// The Heisenberg Szegő kernel at level one.
pub fn heisenberg_limit_kernel(u: &[Complex64], theta: f64, v: &[Complex64], phi: f64) -> Complex64 {
    heisenberg_level_kernel(1, u, theta, v, phi)
}

/// ln(1 + x) for complex x, accurate when |x| is small.
fn ln_1p_complex(x: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * x.re + x.norm_sqr()).ln_1p();
    let im = x.im.atan2(1.0 + x.re);
    Complex64::new(re, im)
}

/// N^{-m} Π_N(u/√N, 0; v/√N, 0) for the Fubini-Study circle bundle, which
/// tends to the Heisenberg kernel as N grows. Evaluated in the log domain so
/// large levels do not overflow.
pub fn fs_scaled_szego(level: u32, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let m = u.len();
    assert_eq!(v.len(), m);
    let n = f64::from(level);
    // ln[(N+m)!/N!] - m ln N - m ln π
    let ln_norm: f64 = (1..=m).map(|i| ((n + i as f64) / n).ln()).sum::<f64>() - m as f64 * PI.ln();
    let uv = hermitian_dot(u, v) / n;
    let uu = hermitian_dot(u, u).re / n;
    let vv = hermitian_dot(v, v).re / n;
    let log = n * ln_1p_complex(uv) - Complex64::new(0.5 * n * (uu.ln_1p() + vv.ln_1p()) - ln_norm, 0.0);
    log.exp()
}

/// Polar grid of points in the disk of the given radius in ℂ: `rings`
/// circles of `spokes` points each, plus the center.
pub fn disk_grid(radius: f64, rings: usize, spokes: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for i in 1..=rings {
        let r = radius * i as f64 / rings as f64;
        for j in 0..spokes {
            out.push(Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5 * (i % 2) as f64) / spokes as f64));
        }
    }
    out
}

/// sup over pairs of grid points of |N^{-1} Π_N(u/√N, v/√N) − Π^H_1(u, v)|
/// in one complex dimension.
pub fn neardiag_deviation(level: u32, grid: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for &u in grid {
        for &v in grid {
            let a = fs_scaled_szego(level, &[u], &[v]);
            let b = heisenberg_limit_kernel(&[u], 0.0, &[v], 0.0);
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn limit_jet_at_origin() {
        for m in 1..=4 {
            let zero = vec![c(0.0, 0.0); m];
            let jet = kernel_jet(&KernelModel::HeisenbergLimit { dim: m }, &zero, &zero);
            assert_eq!(jet.value, c(1.0, 0.0));
            assert!(jet.grad.iter().all(|g| g.norm() == 0.0));
            assert_eq!(jet.hess, ComplexMatrix::identity(m));
        }
    }

    #[test]
    fn fubini_study_jet_at_origin() {
        let zero = vec![c(0.0, 0.0); 3];
        let jet = kernel_jet(&KernelModel::FubiniStudy { level: 7, dim: 3 }, &zero, &zero);
        assert_eq!(jet.value, c(1.0, 0.0));
        assert!(jet.grad.iter().all(|g| g.norm() == 0.0));
        assert_eq!(jet.hess, ComplexMatrix::identity(3).scale(c(7.0, 0.0)));
    }

    #[test]
    fn fubini_study_level_one_has_no_second_order_term() {
        let z = [c(0.3, -0.2)];
        let w = [c(-0.1, 0.4)];
        let jet = kernel_jet(&KernelModel::FubiniStudy { level: 1, dim: 1 }, &z, &w);
        assert_eq!(jet.hess[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn level_one_heisenberg_is_rescaled_limit() {
        // Π_1^H(z,0;w,0) = π^{-m} e^{-|z|²/2} S(z,w) e^{-|w|²/2}, jets alike.
        let z = [c(0.4, 0.1), c(-0.3, 0.2)];
        let w = [c(0.1, -0.5), c(0.2, 0.3)];
        let lvl = kernel_jet(&KernelModel::HeisenbergLevel { level: 1, dim: 2 }, &z, &w);
        let lim = kernel_jet(&KernelModel::HeisenbergLimit { dim: 2 }, &z, &w);
        let f = (-0.5 * (hermitian_dot(&z, &z).re + hermitian_dot(&w, &w).re)).exp() / (PI * PI);
        assert!((lvl.value - lim.value * f).norm() < 1e-15);
        for q in 0..2 {
            assert!((lvl.grad[q] - lim.grad[q] * f).norm() < 1e-15);
            for qp in 0..2 {
                assert!((lvl.hess[(q, qp)] - lim.hess[(q, qp)] * f).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn heisenberg_kernel_values() {
        let u = [c(0.7, -1.1)];
        assert!((heisenberg_limit_kernel(&u, 0.3, &u, 0.3) - c(1.0 / PI, 0.0)).norm() < 1e-15);
        let zero = [c(0.0, 0.0), c(0.0, 0.0)];
        assert!((heisenberg_limit_kernel(&zero, 0.0, &zero, 0.0) - c(1.0 / (PI * PI), 0.0)).norm() < 1e-15);
        let v = [c(0.7 + 2.0 / 2f64.sqrt(), -1.1 + 2.0 / 2f64.sqrt())];
        let k = heisenberg_limit_kernel(&u, 0.0, &v, 0.0);
        assert!((k.norm() - (-2.0f64).exp() / PI).abs() < 1e-15);
    }

    #[test]
    fn fs_scaled_szego_on_diagonal_origin() {
        let zero = [c(0.0, 0.0), c(0.0, 0.0)];
        for n in [1u32, 10, 1000] {
            let nf = f64::from(n);
            let want = (nf + 1.0) * (nf + 2.0) / (PI * PI * nf * nf);
            assert!((fs_scaled_szego(n, &zero, &zero) - c(want, 0.0)).norm() < 1e-14);
        }
        let big = fs_scaled_szego(1_000_000, &zero, &zero);
        assert!((big.re - 1.0 / (PI * PI)).abs() < 1e-5);
    }

    #[test]
    fn fs_scaled_szego_matches_direct_formula_at_small_level() {
        let u = [c(0.5, -0.25)];
        let v = [c(-0.3, 0.6)];
        let n = 5u32;
        let nf = 5.0;
        let s = (nf + 1.0) / (PI * nf);
        let t = Complex64::new(1.0, 0.0) + u[0] * v[0].conj() / nf;
        let want = t.powu(n) * s
            / ((1.0 + u[0].norm_sqr() / nf).powf(nf / 2.0) * (1.0 + v[0].norm_sqr() / nf).powf(nf / 2.0));
        assert!((fs_scaled_szego(n, &u, &v) - want).norm() < 1e-14);
    }

    #[test]
    fn model_validation() {
        assert!(KernelModel::HeisenbergLimit { dim: 0 }.validate().is_err());
        assert!(KernelModel::HeisenbergLimit { dim: 5 }.validate().is_err());
        assert!(KernelModel::FubiniStudy { level: 0, dim: 1 }.validate().is_err());
        assert!(KernelModel::HeisenbergLevel { level: 3, dim: 4 }.validate().is_ok());
    }
}
