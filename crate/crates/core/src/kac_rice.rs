//! n-point zero correlations through the Kac-Rice formula.
//!
//! The joint jet of k independent sections at n points is Gaussian with
//! covariance [[A, B], [B*, C]], block-diagonal in the section index. The
//! correlation is
//!
//! K_n = ⟨∏_p det(a^p a^{p*})⟩_Λ / (π^{kn} det A),  Λ = C − B* A⁻¹ B,
//!
//! where `a^p` is the k×m matrix of first derivatives at the p-th point,
//! conditioned on all sections vanishing at every point.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::closed_form::density;
use crate::error::{Error, Result};
use crate::gaussian::{expectation_det_product, jet_index, Estimate, Method};
use crate::kernels::{kernel_jet, KernelJet, KernelModel};
use crate::numeric::{cholesky, determinant, forward_substitute, hermitian_solve, ComplexMatrix};

/// Points closer than this many model length scales are rejected.
pub const MIN_SEPARATION: f64 = 1e-3;
/// Largest relative asymmetry tolerated in the conditioned covariance.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationQuery {
    pub model: KernelModel,
    /// Number of independent sections (codimension of the zero set).
    pub k: usize,
    pub points: Vec<Vec<Complex64>>,
    pub method: Method,
}

impl CorrelationQuery {
    pub fn new(model: KernelModel, k: usize, points: Vec<Vec<Complex64>>, method: Method) -> Self {
        Self { model, k, points, method }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let m = self.model.dim();
        let n = self.n();
        if self.k == 0 || self.k > m {
            return Err(Error::InvalidInput(format!("codimension k = {} must lie in 1..={m}", self.k)));
        }
        if n == 0 {
            return Err(Error::InvalidInput("at least one point is required".into()));
        }
        if let Some(p) = self.points.iter().position(|z| z.len() != m) {
            return Err(Error::InvalidInput(format!(
                "point {p} has {} coordinates, model dimension is {m}",
                self.points[p].len()
            )));
        }
        if self.points.iter().flatten().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::InvalidInput("point coordinates must be finite".into()));
        }
        if self.method == Method::Exact {
            let limit = if self.k == 1 { 3 } else { 2 };
            if n > limit {
                return Err(Error::SizeLimitExceeded {
                    what: "points for exact evaluation at this codimension",
                    got: n,
                    limit,
                });
            }
        }
        let floor = MIN_SEPARATION * self.model.length_scale();
        for p in 0..n {
            for q in p + 1..n {
                let d = distance(&self.points[p], &self.points[q]);
                if d < floor {
                    return Err(Error::NearSingular {
                        rcond: 0.0,
                        context: format!("points {p} and {q} are {d:e} apart, below {floor:e}"),
                    });
                }
            }
        }
        Ok(())
    }
}

fn distance(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Reduced covariance blocks of the joint jet, one copy per section.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBlocks {
    /// n×n, a[p][p'] = S(z^p, z^p').
    pub a: ComplexMatrix,
    /// n×(n·m), b[p][(p',q')] = S_q'(z^p, z^p').
    pub b: ComplexMatrix,
    /// (n·m)×(n·m), c[(p,q)][(p',q')] = S_qq'(z^p, z^p').
    pub c: ComplexMatrix,
    pub k: usize,
}

impl CovarianceBlocks {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols() / self.a.rows()
    }
}

pub fn assemble_blocks(query: &CorrelationQuery) -> Result<CovarianceBlocks> {
    assemble_blocks_with(query, |z, w| kernel_jet(&query.model, z, w))
}

/// Like [`assemble_blocks`] but with the kernel jets supplied by `jet`.
pub fn assemble_blocks_with<F>(query: &CorrelationQuery, jet: F) -> Result<CovarianceBlocks>
where
    F: Fn(&[Complex64], &[Complex64]) -> KernelJet,
{
    query.validate()?;
    let n = query.n();
    let m = query.model.dim();
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n * m);
    let mut c = ComplexMatrix::zeros(n * m, n * m);
    for p in 0..n {
        for pp in 0..n {
            let jet = jet(&query.points[p], &query.points[pp]);
            a[(p, pp)] = jet.value;
            for qp in 0..m {
                b[(p, pp * m + qp)] = jet.grad[qp];
                for q in 0..m {
                    c[(p * m + q, pp * m + qp)] = jet.hess[(q, qp)];
                }
            }
        }
    }
    Ok(CovarianceBlocks { a, b, c, k: query.k })
}

/// λ = c − b* a⁻¹ b, the conditioned derivative covariance of one section
/// (size n·m).
pub fn reduced_covariance(blocks: &CovarianceBlocks) -> Result<ComplexMatrix> {
    let (scaled, scales) = equilibrate(blocks)?;
    let n = blocks.n();
    let m = blocks.m();
    let lambda = conditioned(&scaled)?;
    // undo the diagonal scaling
    Ok(ComplexMatrix::from_fn(n * m, n * m, |i, j| {
        lambda[(i, j)] / (scales[i / m] * scales[j / m])
    }))
}

/// Full Λ of size n·k·m, indexed by [`jet_index`], with Λ = δ_jj' ⊗ λ.
pub fn jet_covariance(blocks: &CovarianceBlocks) -> Result<ComplexMatrix> {
    Ok(expand_sections(&reduced_covariance(blocks)?, blocks.n(), blocks.k, blocks.m()))
}

fn expand_sections(lambda: &ComplexMatrix, n: usize, k: usize, m: usize) -> ComplexMatrix {
    let mut full = ComplexMatrix::zeros(n * k * m, n * k * m);
    for p in 0..n {
        for pp in 0..n {
            for j in 0..k {
                for q in 0..m {
                    for qp in 0..m {
                        full[(jet_index(p, j, q, k, m), jet_index(pp, j, qp, k, m))] =
                            lambda[(p * m + q, pp * m + qp)];
                    }
                }
            }
        }
    }
    full
}

/// Rescales every point's jet by a_pp^{-1/2} so that the value block has a
/// unit diagonal. Returns the scaled blocks and the factors a_pp^{-1/2}.
fn equilibrate(blocks: &CovarianceBlocks) -> Result<(CovarianceBlocks, Vec<f64>)> {
    let n = blocks.n();
    let m = blocks.m();
    let mut scales = Vec::with_capacity(n);
    for p in 0..n {
        let d = blocks.a[(p, p)].re;
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::NotPositiveDefinite { pivot: p, value: d });
        }
        scales.push(d.sqrt().recip());
    }
    let a = ComplexMatrix::from_fn(n, n, |i, j| blocks.a[(i, j)] * (scales[i] * scales[j]));
    let b = ComplexMatrix::from_fn(n, n * m, |i, j| blocks.b[(i, j)] * (scales[i] * scales[j / m]));
    let c = ComplexMatrix::from_fn(n * m, n * m, |i, j| {
        blocks.c[(i, j)] * (scales[i / m] * scales[j / m])
    });
    Ok((CovarianceBlocks { a, b, c, k: blocks.k }, scales))
}

fn conditioned(blocks: &CovarianceBlocks) -> Result<ComplexMatrix> {
    let x = hermitian_solve(&blocks.a, &blocks.b)?;
    let lambda = &blocks.c - &blocks.b.adjoint().matmul(&x);
    let scale = lambda.max_abs().max(f64::MIN_POSITIVE);
    let defect = lambda.hermitian_defect() / scale;
    if defect > ASYMMETRY_TOLERANCE {
        return Err(Error::NearSingular {
            rcond: defect,
            context: "conditioned jet covariance lost Hermitian symmetry".into(),
        });
    }
    Ok(lambda.hermitian_part())
}

/// Fubini-Study metric g_qq' at z in the affine chart.
pub fn fubini_study_metric(z: &[Complex64]) -> ComplexMatrix {
    let m = z.len();
    let s = 1.0 + z.iter().map(|x| x.norm_sqr()).sum::<f64>();
    ComplexMatrix::from_fn(m, m, |q, qp| {
        let delta = if q == qp { s } else { 0.0 };
        (Complex64::new(delta, 0.0) - z[q].conj() * z[qp]) / (s * s)
    })
}

/// Replaces each λ block by R_p⁻¹ λ_pp' R_p'^{-*}, where g(z^p) = R_p R_p*,
/// so that the plain det(a a*) expectation measures volume in the metric g.
fn contract_metric(lambda: &ComplexMatrix, points: &[Vec<Complex64>]) -> Result<ComplexMatrix> {
    let m = points[0].len();
    let n = points.len();
    let mut t = ComplexMatrix::zeros(n * m, n * m);
    for (p, z) in points.iter().enumerate() {
        let r = cholesky(&fubini_study_metric(z))?;
        let mut inv = ComplexMatrix::identity(m);
        forward_substitute(&r, &mut inv);
        for q in 0..m {
            for qp in 0..m {
                t[(p * m + q, p * m + qp)] = inv[(q, qp)];
            }
        }
    }
    Ok(t.matmul(lambda).matmul(&t.adjoint()).hermitian_part())
}

/// Unnormalized n-point correlation K_n of the simultaneous zeros of k
/// independent sections, measured against the model's volume form.
pub fn correlation(query: &CorrelationQuery) -> Result<Estimate> {
    correlation_from_blocks(query, &assemble_blocks(query)?)
}

/// K_n from covariance blocks already assembled for `query`.
pub fn correlation_from_blocks(query: &CorrelationQuery, blocks: &CovarianceBlocks) -> Result<Estimate> {
    let (scaled, _) = equilibrate(blocks)?;
    let n = query.n();
    let k = query.k;
    let m = query.model.dim();
    let mut lambda = conditioned(&scaled)?;
    if let KernelModel::FubiniStudy { .. } = query.model {
        lambda = contract_metric(&lambda, &query.points)?;
    }
    let full = expand_sections(&lambda, n, k, m);
    let det_a = determinant(&scaled.a)?.re;
    if !(det_a > 0.0) {
        return Err(Error::NotPositiveDefinite { pivot: 0, value: det_a });
    }
    let bracket = expectation_det_product(&full, n, k, m, query.method)?;
    let prefactor = 1.0 / (PI.powi((k * n) as i32) * det_a.powi(k as i32));
    Ok(bracket.scaled(prefactor))
}

/// K_n divided by the product of one-point densities.
pub fn normalized_correlation(query: &CorrelationQuery) -> Result<Estimate> {
    let k = correlation(query)?;
    let rho = density(&query.model, query.k)?;
    Ok(k.scaled(rho.powi(query.n() as i32).recip()))
}

/// Two points at distance `separation`, placed symmetrically about the
/// origin along the first axis.
pub fn pair_configuration(separation: f64, dim: usize) -> Vec<Vec<Complex64>> {
    let mut left = vec![Complex64::new(0.0, 0.0); dim];
    let mut right = left.clone();
    left[0] = Complex64::new(-0.5 * separation, 0.0);
    right[0] = Complex64::new(0.5 * separation, 0.0);
    vec![left, right]
}

/// Divides every coordinate by √level, mapping scaled positions to chart
/// positions of the level-`level` model.
pub fn shrink_points(points: &[Vec<Complex64>], level: u32) -> Vec<Vec<Complex64>> {
    let s = f64::from(level).sqrt().recip();
    points.iter().map(|z| z.iter().map(|x| x * s).collect()).collect()
}

/// |N^{-nk} K^N_n(z/√N) − K^∞_n(z)| for the Fubini-Study model at `level`.
pub fn scaling_deviation(points: &[Vec<Complex64>], k: usize, level: u32, method: Method) -> Result<f64> {
    let dim = points.first().map_or(0, Vec::len);
    let limit = correlation(&CorrelationQuery::new(
        KernelModel::HeisenbergLimit { dim },
        k,
        points.to_vec(),
        method,
    ))?;
    let finite = correlation(&CorrelationQuery::new(
        KernelModel::FubiniStudy { level, dim },
        k,
        shrink_points(points, level),
        method,
    ))?;
    let scale = f64::from(level).powi((points.len() * k) as i32);
    Ok((finite.value / scale - limit.value).abs())
}
