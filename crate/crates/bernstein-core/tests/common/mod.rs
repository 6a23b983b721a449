//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the crate's fast paths: joint probabilities are
//! computed from explicit 2^N × 2^N projector matrices assembled with
//! Kronecker products, and spectra come from a cyclic Jacobi sweep on the
//! real symmetric embedding of a hermitian matrix.

#![allow(dead_code)]

use bernstein_core::qstate::{Axis, Sign, StateVector};
use bernstein_core::stats::OutcomeQuery;
use num_complex::Complex64;

/// Dense square matrix as nested rows.
pub type Dense = Vec<Vec<Complex64>>;

pub fn identity(dim: usize) -> Dense {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn projector_2x2(axis: Axis, sign: Sign) -> Dense {
    let p = axis.projector(sign);
    vec![vec![p[0][0], p[0][1]], vec![p[1][0], p[1][1]]]
}

/// Full 2^n × 2^n projector for a joint outcome, built factor by factor.
pub fn projector_matrix(n: usize, query: &OutcomeQuery) -> Dense {
    let mut out = vec![vec![Complex64::new(1.0, 0.0)]];
    for particle in 1..=n {
        let factor = query
            .entries()
            .iter()
            .find(|(p, _, _)| *p == particle)
            .map(|&(_, axis, sign)| projector_2x2(axis, sign))
            .unwrap_or_else(|| identity(2));
        out = kron(&out, &factor);
    }
    out
}

pub fn mat_vec(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// ⟨s| Π π |s⟩ with the projector product materialized as full matrices.
pub fn oracle_joint_probability(s: &StateVector, query: &OutcomeQuery) -> f64 {
    let n = s.n_particles();
    let mut v = s.amplitudes().to_vec();
    let m = projector_matrix(n, query);
    v = mat_vec(&m, &v);
    let bra = s.amplitudes();
    let val: Complex64 = bra.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    assert!(val.im.abs() < 1e-12, "projector expectation must be real");
    val.re
}

/// Eigenvalues of a hermitian matrix via cyclic Jacobi on its real symmetric
/// embedding [[A, -B], [B, A]]; each eigenvalue of the input appears twice.
pub fn jacobi_hermitian_eigenvalues(m: &Dense) -> Vec<f64> {
    let n = m.len();
    let dim = 2 * n;
    let mut a = vec![vec![0.0f64; dim]; dim];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = m[i][j].re;
            a[i][j + n] = -m[i][j].im;
            a[i + n][j] = m[i][j].im;
            a[i + n][j + n] = m[i][j].re;
        }
    }
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..dim {
            for j in i + 1..dim {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..dim).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // doubled spectrum: keep every other entry
    ev.into_iter().step_by(2).collect()
}

/// Density-matrix entries of a crate DensityMatrix as a Dense for oracles.
pub fn dense_of(rho: &bernstein_core::DensityMatrix) -> Dense {
    let dim = rho.dim();
    (0..dim)
        .map(|i| (0..dim).map(|j| rho.entry(i, j)).collect())
        .collect()
}
