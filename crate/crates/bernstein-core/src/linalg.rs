//! Dense complex matrices and a hermitian eigenvalue solver.
//!
//! The solver reduces a hermitian matrix to real symmetric tridiagonal form
//! with complex Householder reflections and then runs implicit-shift QL
//! iteration on the tridiagonal. Eigenvectors are never accumulated; every
//! consumer in this crate needs spectra only. Dimensions stay small (at most
//! 2^12), so a dense O(n^3) reduction is the right tool.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in &rows {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            data.extend_from_slice(row);
        }
        CMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Largest entrywise absolute difference against `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from hermitian symmetry.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// All eigenvalues of a hermitian matrix, sorted ascending.
///
/// The input is assumed hermitian; only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(m);
    tql_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}

/// Householder reduction of a hermitian matrix to real symmetric tridiagonal
/// form. Returns the diagonal and the n-1 off-diagonal magnitudes; the phases
/// of the off-diagonal entries are removable by a diagonal unitary similarity,
/// which leaves the spectrum unchanged.
fn tridiagonalize(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut e = vec![0.0f64; n.saturating_sub(1)];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the diagonal.
        let mut norm_sqr = 0.0f64;
        for i in k + 1..n {
            norm_sqr += a[(i, k)].norm_sqr();
        }
        let norm = norm_sqr.sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase.scale(norm);

        // u = x - alpha e1; |u|^2 = 2 norm (norm + |x0|), no cancellation.
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let unorm = (2.0 * norm * (norm + x0.norm())).sqrt();
        for item in v.iter_mut().take(n).skip(k + 1) {
            *item = item.unscale(unorm);
        }

        // w = A v on the trailing block, reading only the lower triangle.
        for i in k + 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in k + 1..=i {
                acc += a[(i, j)] * v[j];
            }
            for j in i + 1..n {
                acc += a[(j, i)].conj() * v[j];
            }
            w[i] = acc;
        }
        let mut c = 0.0f64;
        for i in k + 1..n {
            c += (v[i].conj() * w[i]).re;
        }
        // q = 2 (w - c v); then P A P = A - v q^† - q v^† with P = I - 2 v v^†.
        for i in k + 1..n {
            w[i] = (w[i] - v[i].scale(c)).scale(2.0);
        }
        for i in k + 1..n {
            let vi = v[i];
            let qi = w[i];
            for j in k + 1..=i {
                let upd = vi * w[j].conj() + qi * v[j].conj();
                a[(i, j)] -= upd;
            }
        }

        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
        e[k] = norm;
    }

    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)].norm();
    }
    let d = (0..n).map(|i| a[(i, i)].re).collect();
    (d, e)
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix.
/// `d` holds the diagonal, `e` the subdiagonal (length n-1).
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // Shift the off-diagonal so e[l] couples d[l] and d[l+1], with a zero pad.
    let mut e: Vec<f64> = {
        let mut t = e.to_vec();
        t.push(0.0);
        t
    };

    // Deflation needs an absolute floor besides the relative test: rank
    // deficient inputs leave stretches where both neighboring diagonals sit
    // at the round-off level and a purely relative test never fires.
    let anorm = (0..n)
        .map(|i| {
            d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max);
    let floor = f64::EPSILON * anorm;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::EigensolverNoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
