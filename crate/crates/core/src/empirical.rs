//! Pair statistics of the zeros of sampled SU(2) polynomials.
//!
//! The roots of p(z) = Σ sqrt(C(N,j)) c_j z^j with standard Gaussian c_j are
//! uniformly spread over the Riemann sphere. Distances are measured with
//! the Fubini-Study metric of the affine chart, scaled by √N so that the
//! root density is 1/π.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::rng::{map_indexed, standard_complex, stream_rng};

pub const MIN_DEGREE: usize = 2;
pub const MAX_DEGREE: usize = 2000;
/// Top coefficients whose unweighted size c_j / sqrt(C(N, j)) falls below
/// this fraction of the largest are dropped, lowering the degree.
pub const LEADING_FLOOR: f64 = 1e-13;
/// Accepted backward error |p(z)| / Σ|c_j z^j|.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Largest observation window radius in scaled units.
pub const MAX_WINDOW: f64 = 3.0;

const ABERTH_MAX_ITER: usize = 400;
const POLISH_MAX_ITER: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSample {
    pub degree: usize,
    /// Affine-chart coefficients in increasing powers.
    pub coeffs: Vec<Complex64>,
}

/// sqrt(C(N, j)) for j = 0..=N, via running log sums.
pub fn binomial_weights(degree: usize) -> Vec<f64> {
    let n = degree as f64;
    let mut ln = 0.0;
    let mut out = Vec::with_capacity(degree + 1);
    out.push(1.0);
    for j in 1..=degree {
        ln += ((n - j as f64 + 1.0) / j as f64).ln();
        out.push((0.5 * ln).exp());
    }
    out
}

fn check_degree(degree: usize) -> Result<()> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&degree) {
        return Err(Error::InvalidInput(format!(
            "degree {degree} outside {MIN_DEGREE}..={MAX_DEGREE}"
        )));
    }
    Ok(())
}

pub fn sample_su2_polynomial(degree: usize, seed: u64) -> Result<PolynomialSample> {
    sample_su2_stream(degree, seed, 0)
}

/// The polynomial drawn from sub-stream `stream` of `seed`.
pub fn sample_su2_stream(degree: usize, seed: u64, stream: u64) -> Result<PolynomialSample> {
    check_degree(degree)?;
    let mut rng = stream_rng(seed, stream);
    let coeffs = binomial_weights(degree)
        .into_iter()
        .map(|w| standard_complex(&mut rng) * w)
        .collect();
    Ok(PolynomialSample { degree, coeffs })
}

/// Affine roots of the polynomial. Roots at infinity (leading coefficients
/// below the floor) are dropped, so fewer than `degree` roots may return.
pub fn polynomial_roots(p: &PolynomialSample) -> Result<Vec<Complex64>> {
    let scale = p.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::InvalidInput("polynomial coefficients must be finite and not all zero".into()));
    }
    let c: Vec<Complex64> = p.coeffs.iter().map(|x| x / scale).collect();
    // degree deficiency is judged on the unweighted coefficients
    let weights = binomial_weights(c.len() - 1);
    let xi_scale = c.iter().zip(&weights).map(|(x, w)| x.norm() / w).fold(0.0, f64::max);
    let top = c
        .iter()
        .zip(&weights)
        .rposition(|(x, w)| x.norm() / w >= LEADING_FLOOR * xi_scale)
        .unwrap_or(0);
    let low = c.iter().position(|x| x.norm() != 0.0).unwrap_or(0);
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let reduced = &c[low..=top];
    if reduced.len() < 2 {
        return Ok(roots);
    }
    let found = match aberth(reduced).and_then(|z| polish_all(reduced, z)) {
        Some(z) => z,
        None => {
            let z = companion_roots(reduced)?;
            polish_all(reduced, z).ok_or_else(|| {
                Error::RootFindingFailed(format!(
                    "Newton polishing did not reach backward error {RESIDUAL_TOLERANCE:e}"
                ))
            })?
        }
    };
    roots.extend(found);
    Ok(roots)
}

/// Newton correction p/p' and backward error |p| / Σ|c_j z^j| at z.
/// Points outside the unit disk are handled through the reversed polynomial.
fn newton_step(c: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let d = (c.len() - 1) as f64;
    if z.norm_sqr() <= 1.0 {
        let r = z.norm();
        let (mut p, mut dp, mut bound) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            bound = bound * r + a.norm();
        }
        (p / dp, p.norm() / bound)
    } else {
        let w = z.inv();
        let r = w.norm();
        let (mut q, mut dq, mut bound) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        for a in c.iter() {
            dq = dq * w + q;
            q = q * w + a;
            bound = bound * r + a.norm();
        }
        (z * q / (q * d - w * dq), q.norm() / bound)
    }
}

/// Starting points on circles whose radii come from the upper convex hull
/// of (j, ln|c_j|).
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| x.norm() > 0.0)
        .map(|(j, x)| (j, x.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(d);
    for pair in hull.windows(2) {
        let (i, li) = pair[0];
        let (k, lk) = pair[1];
        let count = k - i;
        let radius = ((li - lk) / count as f64).exp();
        for l in 0..count {
            let angle = 2.0 * PI * (l as f64 / count as f64 + i as f64 / d as f64) + 0.7;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// Simultaneous Aberth-Ehrlich iteration; `None` if it fails to settle.
fn aberth(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = c.len() - 1;
    let mut z = initial_guesses(c);
    let mut done = vec![false; d];
    for _ in 0..ABERTH_MAX_ITER {
        let mut settled = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (newton, berr) = newton_step(c, z[i]);
            if berr == 0.0 {
                done[i] = true;
                continue;
            }
            let zi = z[i];
            let repulsion: Complex64 = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() || berr < f64::EPSILON {
                done[i] = true;
            } else {
                settled = false;
            }
        }
        if settled {
            return Some(z);
        }
    }
    None
}

/// Newton-polishes every root that misses the backward-error tolerance.
fn polish_all(c: &[Complex64], mut z: Vec<Complex64>) -> Option<Vec<Complex64>> {
    for root in z.iter_mut() {
        let mut ok = false;
        for _ in 0..POLISH_MAX_ITER {
            let (step, berr) = newton_step(c, *root);
            if berr <= RESIDUAL_TOLERANCE {
                ok = true;
                break;
            }
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            *root -= step;
        }
        if !ok {
            return None;
        }
    }
    Some(z)
}

/// Backward error |p(z)| / Σ|c_j z^j| of a candidate root.
pub fn relative_residual(p: &PolynomialSample, z: Complex64) -> f64 {
    newton_step(&p.coeffs, z).1
}

/// Eigenvalues of the companion matrix (coefficients in increasing powers,
/// nonzero leading coefficient).
pub fn companion_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = c[d];
    let m = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::RootFindingFailed("companion eigenvalue iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Fubini-Study distance between two chart points (on the sphere of area π).
pub fn fubini_study_distance(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm().atan2((Complex64::new(1.0, 0.0) + z * w.conj()).norm())
}

/// Area of a geodesic disk of scaled radius `s` at level `degree`.
pub fn scaled_cap_area(degree: usize, s: f64) -> f64 {
    let n = degree as f64;
    let d = (s / n.sqrt()).min(FRAC_PI_2);
    n * PI * d.sin().powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairHistogram {
    pub bin_edges: Vec<f64>,
    /// Ordered pairs (core point, any other point) per bin.
    pub counts: Vec<u64>,
    /// Expected counts for a Poisson process of the same intensity.
    pub normalizer: Vec<f64>,
    pub samples: u64,
    /// Per-bin sum over samples of the squared per-sample count.
    pub sum_sq_counts: Vec<u64>,
    /// Affine roots found in total.
    pub points: u64,
    /// Roots lost to infinity through degree deficiency.
    pub points_at_infinity: u64,
}

impl PairHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        0.5 * (self.bin_edges[b] + self.bin_edges[b + 1])
    }

    pub fn g_estimate(&self) -> Vec<f64> {
        self.counts.iter().zip(&self.normalizer).map(|(&c, &n)| c as f64 / n).collect()
    }

    /// Standard error of each bin estimate from the spread of per-sample counts.
    pub fn stderr(&self) -> Vec<f64> {
        let s = self.samples as f64;
        (0..self.bins())
            .map(|b| {
                let mean = self.counts[b] as f64 / s;
                let var = if self.samples > 1 {
                    (self.sum_sq_counts[b] as f64 - s * mean * mean).max(0.0) / (s - 1.0)
                } else {
                    0.0
                };
                (s * var).sqrt() / self.normalizer[b]
            })
            .collect()
    }
}

/// Validated estimator geometry shared by the root and Poisson runs.
struct Window {
    degree: usize,
    radius: f64,
    edges: Vec<f64>,
    /// Expected pairs per sample per bin under a Poisson process.
    per_sample: Vec<f64>,
}

impl Window {
    fn new(degree: usize, radius: f64, edges: &[f64]) -> Result<Self> {
        check_degree(degree)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("window radius must be positive, got {radius}")));
        }
        if radius > MAX_WINDOW {
            return Err(Error::WindowTooLarge(format!("radius {radius} exceeds {MAX_WINDOW}")));
        }
        if edges.len() < 2 || edges[0] < 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("bin edges must be non-negative and strictly increasing".into()));
        }
        let r_max = edges[edges.len() - 1];
        if r_max > radius {
            return Err(Error::WindowTooLarge(format!("largest bin edge {r_max} exceeds window radius {radius}")));
        }
        if (degree as f64) < 25.0 * radius * radius {
            return Err(Error::InsufficientDegree(format!(
                "degree {degree} below 25·R² = {}",
                25.0 * radius * radius
            )));
        }
        let rho = 1.0 / PI;
        let core = scaled_cap_area(degree, radius);
        let per_sample = edges
            .windows(2)
            .map(|w| rho * rho * core * (scaled_cap_area(degree, w[1]) - scaled_cap_area(degree, w[0])))
            .collect();
        Ok(Self { degree, radius, edges: edges.to_vec(), per_sample })
    }

    /// Pair counts per bin for one configuration of chart points.
    fn count(&self, points: &[Complex64]) -> Vec<u64> {
        let scale = (self.degree as f64).sqrt();
        let origin = Complex64::new(0.0, 0.0);
        let r_max = self.edges[self.edges.len() - 1];
        let mut counts = vec![0u64; self.edges.len() - 1];
        for (i, &z) in points.iter().enumerate() {
            if scale * fubini_study_distance(z, origin) > self.radius {
                continue;
            }
            for (j, &w) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let s = scale * fubini_study_distance(z, w);
                if s < self.edges[0] || s >= r_max {
                    continue;
                }
                let b = self.edges.partition_point(|&e| e <= s) - 1;
                counts[b] += 1;
            }
        }
        counts
    }

    fn histogram(&self, samples: u64, per_sample: Vec<(Vec<u64>, u64)>) -> PairHistogram {
        let bins = self.edges.len() - 1;
        let mut counts = vec![0u64; bins];
        let mut sum_sq_counts = vec![0u64; bins];
        let mut points = 0;
        for (c, found) in per_sample {
            points += found;
            for b in 0..bins {
                counts[b] += c[b];
                sum_sq_counts[b] += c[b] * c[b];
            }
        }
        PairHistogram {
            bin_edges: self.edges.clone(),
            counts,
            normalizer: self.per_sample.iter().map(|x| x * samples as f64).collect(),
            samples,
            sum_sq_counts,
            points,
            points_at_infinity: (self.degree as u64 * samples).saturating_sub(points),
        }
    }
}

/// Histogram of scaled pair distances among the roots of `samples`
/// independent SU(2) polynomials of the given degree. Pairs are anchored at
/// roots within scaled distance `window` of the chart origin; partners may
/// lie anywhere on the sphere.
pub fn pair_correlation_estimate(
    degree: usize,
    samples: u64,
    window: f64,
    bin_edges: &[f64],
    seed: u64,
) -> Result<PairHistogram> {
    let geometry = Window::new(degree, window, bin_edges)?;
    if samples < 1 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    let per_sample = map_indexed(samples as usize, |s| -> Result<(Vec<u64>, u64)> {
        let p = sample_su2_stream(degree, seed, s as u64)?;
        let roots = polynomial_roots(&p)?;
        Ok((geometry.count(&roots), roots.len() as u64))
    });
    let per_sample = per_sample.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(geometry.histogram(samples, per_sample))
}

/// A point uniform on the sphere, in the affine chart.
fn uniform_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let cos_theta: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    // z = tan(θ/2) e^{iφ}
    let r = ((1.0 - cos_theta) / (1.0 + cos_theta)).sqrt();
    Complex64::from_polar(r, phi)
}

/// The same estimator run on Poisson processes of the same mean intensity,
/// which should return 1 in every bin.
pub fn poisson_calibration(
    degree: usize,
    samples: u64,
    window: f64,
    bin_edges: &[f64],
    seed: u64,
) -> Result<PairHistogram> {
    let geometry = Window::new(degree, window, bin_edges)?;
    if samples < 1 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    let law = Poisson::new(degree as f64).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let per_sample = map_indexed(samples as usize, |s| {
        let mut rng = stream_rng(seed, s as u64);
        let count = law.sample(&mut rng) as usize;
        let points: Vec<Complex64> = (0..count).map(|_| uniform_sphere_point(&mut rng)).collect();
        (geometry.count(&points), degree as u64)
    });
    Ok(geometry.histogram(samples, per_sample))
}
