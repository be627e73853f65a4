//! Dense complex matrices and the few spectral quantities the crate needs.
//!
//! Largest eigenvalues of positive semidefinite matrices come from the power
//! method. The iteration is started from a column of a high power of the
//! matrix (obtained by repeated squaring with trace normalisation), then run
//! until the Rayleigh quotient settles to 1e-13 relative or 10 000 steps.

use num_complex::Complex64;

/// Iteration cap of the power method.
pub const POWER_ITERATION_CAP: usize = 10_000;
/// Relative change of the Rayleigh quotient at which iteration stops.
pub const POWER_TOLERANCE: f64 = 1e-13;
const MAX_SQUARINGS: usize = 64;

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, c: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "dimension mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = if self.cols <= self.rows {
            self.adjoint().mul(self)
        } else {
            self.mul(&self.adjoint())
        };
        psd_max_eigenvalue(&gram).max(0.0).sqrt()
    }

    /// Largest eigenvalue of a Hermitian matrix.
    pub fn hermitian_max_eigenvalue(&self) -> f64 {
        let c = self.gershgorin_bound();
        let shifted = self.add(&CMatrix::identity(self.rows).scale(c));
        psd_max_eigenvalue(&shifted) - c
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn hermitian_min_eigenvalue(&self) -> f64 {
        let c = self.gershgorin_bound();
        let flipped = CMatrix::identity(self.rows).scale(c).add(&self.scale(-1.0));
        c - psd_max_eigenvalue(&flipped)
    }

    /// An upper bound for the absolute value of every eigenvalue.
    fn gershgorin_bound(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rayleigh(a: &CMatrix, v: &[Complex64]) -> f64 {
    let av = a.mul_vec(v);
    let num: Complex64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    num.re / v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Largest eigenvalue of a Hermitian positive semidefinite matrix.
pub fn psd_max_eigenvalue(a: &CMatrix) -> f64 {
    let n = a.rows;
    if n == 0 {
        return 0.0;
    }
    let tr = a.trace().re;
    if tr <= 0.0 || a.max_abs() == 0.0 {
        return 0.0;
    }
    // Repeated squaring: b ≈ (a / tr)^(2^k), normalised by its trace.
    let mut b = a.scale(1.0 / tr);
    for _ in 0..MAX_SQUARINGS {
        let sq = b.mul(&b);
        let t = sq.trace().re;
        if t <= 0.0 || !t.is_finite() {
            break;
        }
        let next = sq.scale(1.0 / t);
        let delta = next.add(&b.scale(-1.0)).max_abs();
        b = next;
        if delta < 1e-15 {
            break;
        }
    }
    let start = (0..n)
        .map(|j| (0..n).map(|i| b[(i, j)]).collect::<Vec<_>>())
        .max_by(|x, y| norm(x).total_cmp(&norm(y)))
        .expect("nonempty matrix");
    let mut v = if norm(&start) > 0.0 {
        start
    } else {
        vec![Complex64::new(1.0, 0.0); n]
    };
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);

    let mut lambda = rayleigh(a, &v);
    for _ in 0..POWER_ITERATION_CAP {
        let w = a.mul_vec(&v);
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|z| z / nw).collect();
        let next = rayleigh(a, &v);
        let converged =
            (next - lambda).abs() <= POWER_TOLERANCE * next.abs().max(f64::MIN_POSITIVE);
        lambda = next;
        if converged {
            break;
        }
    }
    lambda
}
