//! Dense complex linear algebra and the combinatorial primitives used by the
//! correlation routines: Cholesky factorization, Hermitian solves,
//! determinants, permanents (Ryser) and set partitions.

use std::fmt;
use std::ops::{Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot floor for the Cholesky factorization.
pub const PIVOT_FLOOR: f64 = 1e-14;
/// Reciprocal condition number below which a Hermitian solve is refused.
pub const RCOND_FLOOR: f64 = 1e-12;
/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_SIZE: usize = 20;
/// Largest set accepted by [`set_partitions`].
pub const MAX_PARTITION_SIZE: usize = 8;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C1 } else { C0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - conj(a_ji)|, or infinity for a non-square matrix.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `rel_tol` relative to the largest entry.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// (A + A*)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Sub-matrix picking the given rows and columns (repetitions allowed).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", x.re, x.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn require_square(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what} needs a square matrix, got {}x{}",
            a.rows, a.cols
        )))
    }
}

/// Lower-triangular `L` with `L L* = a` and a real positive diagonal.
///
/// Only the lower triangle of `a` is read.
pub fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a, "cholesky")?;
    let n = a.rows;
    let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let floor = PIVOT_FLOOR * max_diag;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L y = b` in place for lower-triangular `L`.
pub(crate) fn forward_substitute(l: &ComplexMatrix, b: &mut ComplexMatrix) {
    let n = l.rows;
    for c in 0..b.cols {
        for i in 0..n {
            let mut s = b[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * b[(k, c)];
            }
            b[(i, c)] = s / l[(i, i)];
        }
    }
}

/// Solves `L* x = y` in place for lower-triangular `L`.
fn backward_substitute_adjoint(l: &ComplexMatrix, y: &mut ComplexMatrix) {
    let n = l.rows;
    for c in 0..y.cols {
        for i in (0..n).rev() {
            let mut s = y[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * y[(k, c)];
            }
            y[(i, c)] = s / l[(i, i)].conj();
        }
    }
}

/// Cheap condition estimate from a Cholesky factor: (min l_ii / max l_ii)^2.
/// This is an upper bound on the true reciprocal condition number.
fn cholesky_rcond(l: &ComplexMatrix) -> f64 {
    let diag = (0..l.rows).map(|i| l[(i, i)].re);
    let (lo, hi) = diag.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if hi == 0.0 {
        0.0
    } else {
        (lo / hi).powi(2)
    }
}

/// Solves `a x = b` for Hermitian positive-definite `a` without forming `a^-1`.
pub fn hermitian_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a, "hermitian_solve")?;
    if b.rows != a.rows {
        return Err(Error::InvalidInput(format!(
            "right-hand side has {} rows, matrix has {}",
            b.rows, a.rows
        )));
    }
    let max_diag = (0..a.rows).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let l = match cholesky(a) {
        Ok(l) => l,
        // A pivot that is merely tiny (rounding around zero) means a singular
        // matrix, not an indefinite one.
        Err(Error::NotPositiveDefinite { value, .. }) if value > -1e-8 * max_diag => {
            return Err(Error::NearSingular {
                rcond: 0.0,
                context: "Cholesky pivot vanished".into(),
            })
        }
        Err(e) => return Err(e),
    };
    let rcond = cholesky_rcond(&l);
    if rcond < RCOND_FLOOR {
        return Err(Error::NearSingular {
            rcond,
            context: "Hermitian solve".into(),
        });
    }
    let mut x = b.clone();
    forward_substitute(&l, &mut x);
    backward_substitute_adjoint(&l, &mut x);
    Ok(x)
}

/// Determinant via partial-pivoting LU.
fn lu_determinant(a: &ComplexMatrix) -> Complex64 {
    let n = a.rows;
    let mut m = a.clone();
    let mut det = C1;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .unwrap_or(col);
        if m[(pivot, col)] == C0 {
            return C0;
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for i in col + 1..n {
            let f = m[(i, col)] / p;
            if f == C0 {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    det
}

/// Determinant of a square matrix. Hermitian positive-definite input goes
/// through Cholesky (the result is then real), everything else through LU.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    require_square(a, "determinant")?;
    if a.rows == 0 {
        return Ok(C1);
    }
    if a.is_hermitian(1e-12) {
        if let Ok(l) = cholesky(a) {
            let d: f64 = (0..a.rows).map(|i| l[(i, i)].re.powi(2)).product();
            return Ok(Complex64::new(d, 0.0));
        }
    }
    Ok(lu_determinant(a))
}

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order so each step updates the row sums in O(n).
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    require_square(a, "permanent")?;
    let n = a.rows;
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::SizeLimitExceeded {
            what: "permanent size",
            got: n,
            limit: MAX_PERMANENT_SIZE,
        });
    }
    Ok(ryser(a.as_slice(), n))
}

/// Ryser kernel on a row-major n x n slice; callers guarantee the size.
pub(crate) fn ryser(a: &[Complex64], n: usize) -> Complex64 {
    match n {
        0 => return C1,
        1 => return a[0],
        2 => return a[0] * a[3] + a[1] * a[2],
        _ => {}
    }
    let mut row_sums = [C0; MAX_PERMANENT_SIZE];
    let row_sums = &mut row_sums[..n];
    let mut total = C0;
    let mut gray: u32 = 0;
    for step in 1u32..(1u32 << n) {
        let col = step.trailing_zeros() as usize;
        gray ^= 1 << col;
        if gray & (1 << col) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[i * n + col];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[i * n + col];
            }
        }
        let prod = row_sums.iter().fold(C1, |acc, &s| acc * s);
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// A set partition: disjoint blocks of 0-based indices covering `0..n`.
pub type Partition = Vec<Vec<usize>>;

/// All partitions of `{0, .., n-1}`, enumerated through restricted growth
/// strings. Blocks are listed in order of their smallest element.
pub fn set_partitions(n: usize) -> Result<Vec<Partition>> {
    if n > MAX_PARTITION_SIZE {
        return Err(Error::SizeLimitExceeded {
            what: "partition set size",
            got: n,
            limit: MAX_PARTITION_SIZE,
        });
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    // labels[i] = block of element i; labels[i] <= 1 + max(labels[..i])
    let mut labels = vec![0usize; n];
    loop {
        let blocks = labels.iter().max().map_or(0, |&m| m + 1);
        let mut partition = vec![Vec::new(); blocks];
        for (i, &b) in labels.iter().enumerate() {
            partition[b].push(i);
        }
        out.push(partition);

        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let prefix_max = labels[..i].iter().copied().max().unwrap_or(0);
            if labels[i] <= prefix_max {
                labels[i] += 1;
                for l in &mut labels[i + 1..] {
                    *l = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Exponent p of a power-law decay y ≈ C·x^{-p}, fitted by least squares on
/// logarithms. Non-positive values of `y` make the result NaN.
pub fn fit_decay_exponent(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| if *v > 0.0 { v.ln() } else { f64::NAN }).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    -sxy / sxx
}
