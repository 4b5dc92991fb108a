//! Circular complex Gaussian vectors: Wick moments, sampling, and the
//! expectation of a product of Gram determinants that appears in the
//! Kac-Rice formula.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{cholesky, ryser, ComplexMatrix};
use crate::rng::{map_indexed, standard_complex, stream_rng};

/// Longest holomorphic index list accepted by [`wick_mixed_moment`].
pub const MAX_WICK_ORDER: usize = 10;
/// Largest k·n handled by the exact expansion.
pub const MAX_EXACT_PAIRING: usize = 8;
/// Largest m handled by the exact expansion.
pub const MAX_EXACT_DIM: usize = 4;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
/// Samples per deterministic sub-stream.
pub const MC_CHUNK: u64 = 1 << 14;

/// Centered circular complex Gaussian with E[z_j conj(z_k)] = covariance[j][k]
/// and vanishing pseudo-covariance.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    covariance: ComplexMatrix,
    factor: ComplexMatrix,
}

impl GaussianSpec {
    pub fn new(covariance: ComplexMatrix) -> Result<Self> {
        if !covariance.is_hermitian(1e-12) {
            return Err(Error::InvalidInput("covariance must be Hermitian".into()));
        }
        let factor = cholesky(&covariance)?;
        Ok(Self { covariance, factor })
    }

    pub fn dim(&self) -> usize {
        self.covariance.rows()
    }

    pub fn covariance(&self) -> &ComplexMatrix {
        &self.covariance
    }

    /// Lower Cholesky factor of the covariance.
    pub fn factor(&self) -> &ComplexMatrix {
        &self.factor
    }

    /// Writes `L g` into `out` for a fresh standard vector `g`.
    fn draw_into<R: rand::Rng + ?Sized>(&self, rng: &mut R, g: &mut [Complex64], out: &mut [Complex64]) {
        let d = self.dim();
        for x in g.iter_mut() {
            *x = standard_complex(rng);
        }
        let l = self.factor.as_slice();
        for i in 0..d {
            let row = &l[i * d..i * d + i + 1];
            out[i] = row.iter().zip(&g[..=i]).map(|(a, b)| a * b).sum();
        }
    }
}

/// E[∏ z_holo[i] · ∏ conj(z_anti[j])] as the permanent of the covariance
/// block selected by the two index lists.
pub fn wick_mixed_moment(spec: &GaussianSpec, holo: &[usize], anti: &[usize]) -> Result<Complex64> {
    covariance_moment(spec.covariance(), holo, anti)
}

fn covariance_moment(cov: &ComplexMatrix, holo: &[usize], anti: &[usize]) -> Result<Complex64> {
    let order = holo.len().max(anti.len());
    if order > MAX_WICK_ORDER {
        return Err(Error::SizeLimitExceeded {
            what: "Wick moment order",
            got: order,
            limit: MAX_WICK_ORDER,
        });
    }
    let d = cov.rows();
    if let Some(&bad) = holo.iter().chain(anti).find(|&&i| i >= d) {
        return Err(Error::InvalidInput(format!("index {bad} out of range for dimension {d}")));
    }
    if holo.len() != anti.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = holo.len();
    let mut buf = [Complex64::new(0.0, 0.0); MAX_WICK_ORDER * MAX_WICK_ORDER];
    for (i, &h) in holo.iter().enumerate() {
        for (j, &a) in anti.iter().enumerate() {
            buf[i * n + j] = cov[(h, a)];
        }
    }
    Ok(ryser(&buf[..n * n], n))
}

/// `count` draws (rows) from the distribution, reproducible from `seed`.
pub fn sample_complex_gaussian(spec: &GaussianSpec, count: usize, seed: u64) -> ComplexMatrix {
    let d = spec.dim();
    let chunks = (count as u64).div_ceil(MC_CHUNK) as usize;
    let parts = map_indexed(chunks, |c| {
        let mut rng = stream_rng(seed, c as u64);
        let len = ((count as u64) - c as u64 * MC_CHUNK).min(MC_CHUNK) as usize;
        let mut g = vec![Complex64::new(0.0, 0.0); d];
        let mut row = vec![Complex64::new(0.0, 0.0); d];
        let mut out = Vec::with_capacity(len * d);
        for _ in 0..len {
            spec.draw_into(&mut rng, &mut g, &mut row);
            out.extend_from_slice(&row);
        }
        out
    });
    ComplexMatrix::new(count, d, parts.concat()).expect("sizes agree")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// A value with its standard error (zero for exact evaluations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            std_error: self.std_error * factor.abs(),
        }
    }
}

/// Layout of the jet vector: entry (p, j, q) sits at `(p·k + j)·m + q`.
#[inline]
pub fn jet_index(p: usize, j: usize, q: usize, k: usize, m: usize) -> usize {
    (p * k + j) * m + q
}

/// ⟨∏_p det(Σ_q a^p_{jq} conj(a^p_{j'q}))_{j,j'}⟩ for a Gaussian jet vector
/// `a` with covariance `lambda`, indexed by [`jet_index`].
pub fn expectation_det_product(
    lambda: &ComplexMatrix,
    n: usize,
    k: usize,
    m: usize,
    method: Method,
) -> Result<Estimate> {
    let d = n * k * m;
    if lambda.rows() != d || !lambda.is_square() {
        return Err(Error::InvalidInput(format!(
            "covariance is {}x{}, expected {d}x{d} for n={n}, k={k}, m={m}",
            lambda.rows(),
            lambda.cols()
        )));
    }
    if k == 0 || m == 0 {
        return Err(Error::InvalidInput("k and m must be positive".into()));
    }
    match method {
        Method::Exact => exact_det_product(lambda, n, k, m).map(Estimate::exact),
        Method::MonteCarlo { samples, seed } => {
            let spec = GaussianSpec::new(lambda.clone())?;
            monte_carlo_det_product(&spec, n, k, m, samples, seed)
        }
    }
}

/// All permutations of 0..k with their signs.
fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if left.is_empty() {
            let mut inversions = 0;
            for i in 0..prefix.len() {
                for j in i + 1..prefix.len() {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

/// Expands each determinant over S_k and each Gram entry over q, reducing
/// every resulting mixed moment to a permanent.
fn exact_det_product(lambda: &ComplexMatrix, n: usize, k: usize, m: usize) -> Result<f64> {
    let pairing = n * k;
    if pairing > MAX_EXACT_PAIRING {
        return Err(Error::SizeLimitExceeded {
            what: "k·n for exact evaluation",
            got: pairing,
            limit: MAX_EXACT_PAIRING,
        });
    }
    if m > MAX_EXACT_DIM {
        return Err(Error::SizeLimitExceeded {
            what: "m for exact evaluation",
            got: m,
            limit: MAX_EXACT_DIM,
        });
    }
    let perms = signed_permutations(k);
    let combos = perms.len().pow(n as u32);
    let mut qs = vec![0usize; pairing];
    let mut holo = vec![0usize; pairing];
    let mut anti = vec![0usize; pairing];
    let mut choice = vec![0usize; n];
    let mut buf = [Complex64::new(0.0, 0.0); MAX_EXACT_PAIRING * MAX_EXACT_PAIRING];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        for p in 0..n {
            for j in 0..k {
                holo[p * k + j] = jet_index(p, j, qs[p * k + j], k, m);
            }
        }
        for combo in 0..combos {
            let mut c = combo;
            let mut sign = 1.0;
            for slot in choice.iter_mut() {
                *slot = c % perms.len();
                c /= perms.len();
            }
            for p in 0..n {
                let (sigma, s) = &perms[choice[p]];
                sign *= s;
                for j in 0..k {
                    anti[p * k + j] = jet_index(p, sigma[j], qs[p * k + j], k, m);
                }
            }
            for (i, &h) in holo.iter().enumerate() {
                for (j, &a) in anti.iter().enumerate() {
                    buf[i * pairing + j] = lambda[(h, a)];
                }
            }
            total += ryser(&buf[..pairing * pairing], pairing) * sign;
        }
        // next q assignment (mixed radix m)
        let mut pos = 0;
        loop {
            if pos == pairing {
                return Ok(total.re);
            }
            qs[pos] += 1;
            if qs[pos] < m {
                break;
            }
            qs[pos] = 0;
            pos += 1;
        }
    }
}

/// Determinant of a small Hermitian matrix stored row-major in `a`
/// (destroyed). Real part only; the imaginary part is rounding noise.
fn small_det(a: &mut [Complex64], k: usize) -> f64 {
    match k {
        1 => return a[0].re,
        2 => return a[0].re * a[3].re - a[1].norm_sqr(),
        _ => {}
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i * k + col].norm().total_cmp(&a[j * k + col].norm()))
            .unwrap_or(col);
        if a[pivot * k + col].norm() == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
            }
            det = -det;
        }
        let p = a[col * k + col];
        det *= p;
        for i in col + 1..k {
            let f = a[i * k + col] / p;
            for j in col..k {
                let v = a[col * k + j];
                a[i * k + j] -= f * v;
            }
        }
    }
    det.re
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }
}

fn monte_carlo_det_product(
    spec: &GaussianSpec,
    n: usize,
    k: usize,
    m: usize,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::InvalidInput("Monte Carlo needs at least two samples".into()));
    }
    let d = spec.dim();
    let chunks = samples.div_ceil(MC_CHUNK) as usize;
    let parts = map_indexed(chunks, |c| {
        let mut rng = stream_rng(seed, c as u64);
        let len = (samples - c as u64 * MC_CHUNK).min(MC_CHUNK);
        let mut g = vec![Complex64::new(0.0, 0.0); d];
        let mut a = vec![Complex64::new(0.0, 0.0); d];
        let mut gram = vec![Complex64::new(0.0, 0.0); k * k];
        let mut acc = Moments::default();
        for _ in 0..len {
            spec.draw_into(&mut rng, &mut g, &mut a);
            let mut prod = 1.0;
            for p in 0..n {
                for j in 0..k {
                    for jp in 0..k {
                        let row = &a[jet_index(p, j, 0, k, m)..][..m];
                        let col = &a[jet_index(p, jp, 0, k, m)..][..m];
                        gram[j * k + jp] = row.iter().zip(col).map(|(x, y)| x * y.conj()).sum();
                    }
                }
                prod *= small_det(&mut gram, k);
            }
            acc.push(prod);
        }
        acc
    });
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1) as f64;
    Ok(Estimate {
        value: total.mean,
        std_error: (variance / total.count as f64).sqrt(),
    })
}
