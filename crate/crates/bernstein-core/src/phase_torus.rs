//! Orbit geometry of local phase transformations on Bernstein states: the
//! single-down phase-shift matrices and their exact rational inverses, the
//! period lattice they induce, orbit-membership decisions, and the dimension
//! gap between the orbit torus and the full Bernstein torus.

use num_rational::Ratio;
use std::f64::consts::{PI, TAU};

use crate::constructions::{odd_parity_labels, TermPhaseVector};
use crate::error::{Error, Result};

/// Residual tolerance for orbit membership, measured modulo 2π.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// The linear system relating the phase differences δ_k to the single-down
/// term phase shifts φ_k. The forward matrix rows sum all but one δ (odd N)
/// with a corrected last column (even N); the inverse is exact with
/// denominator N-1 (odd) or N-2 (even).
#[derive(Debug, Clone)]
pub struct PhaseShiftSystem {
    n: usize,
    forward: Vec<Vec<i64>>,
    inverse: Vec<Vec<Ratio<i64>>>,
}

impl PhaseShiftSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&self) -> &[Vec<i64>] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Vec<Ratio<i64>>] {
        &self.inverse
    }

    /// forward · inverse in exact rational arithmetic.
    pub fn product(&self) -> Vec<Vec<Ratio<i64>>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| Ratio::from_integer(self.forward[i][k]) * self.inverse[k][j])
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Build the phase-shift system for N ≥ 3.
pub fn phase_shift_system(n: usize) -> Result<PhaseShiftSystem> {
    if n < 3 {
        return Err(Error::ParticleCountOutOfRange { n, min: 3, max: usize::MAX });
    }
    let odd = n % 2 == 1;
    let mut forward = vec![vec![1i64; n]; n];
    for k in 0..n {
        forward[k][n - 1 - k] = 0;
    }
    if !odd {
        for row in forward.iter_mut() {
            row[n - 1] -= 1;
        }
    }

    let inverse = if odd {
        let den = (n - 1) as i64;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let num = if j == n - 1 - k { 2 - n as i64 } else { 1 };
                        Ratio::new(num, den)
                    })
                    .collect()
            })
            .collect()
    } else {
        let den = (n - 2) as i64;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let num = if j == 0 {
                            if k == n - 1 {
                                2 - n as i64
                            } else {
                                0
                            }
                        } else if j == n - 1 - k {
                            3 - n as i64
                        } else {
                            1
                        };
                        Ratio::new(num, den)
                    })
                    .collect()
            })
            .collect()
    };

    Ok(PhaseShiftSystem { n, forward, inverse })
}

/// Generators of the invariance lattice in δ-space, in exact rational
/// multiples of π: twice the columns of the inverse matrix.
#[derive(Debug, Clone)]
pub struct PeriodLattice {
    generators: Vec<Vec<Ratio<i64>>>,
}

impl PeriodLattice {
    /// Generators in units of π.
    pub fn generators(&self) -> &[Vec<Ratio<i64>>] {
        &self.generators
    }

    /// Generators in radians.
    pub fn generator_angles(&self) -> Vec<Vec<f64>> {
        self.generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|r| PI * (*r.numer() as f64) / (*r.denom() as f64))
                    .collect()
            })
            .collect()
    }
}

pub fn period_lattice(n: usize) -> Result<PeriodLattice> {
    let sys = phase_shift_system(n)?;
    let generators = (0..n)
        .map(|col| {
            (0..n)
                .map(|row| sys.inverse[row][col] * Ratio::from_integer(2))
                .collect()
        })
        .collect();
    Ok(PeriodLattice { generators })
}

/// Whether a phase vector lies on the local-phase orbit of the special
/// Bernstein state, with the recovered transformation when it does.
#[derive(Debug, Clone)]
pub struct OrbitMembership {
    pub reachable: bool,
    /// δ_k such that alphas = δ, betas = 0 reproduces the phase vector
    /// projectively; present when reachable.
    pub deltas: Option<Vec<f64>>,
    /// The solved overall constant.
    pub constant: f64,
    pub max_residual_mod_2pi: f64,
}

fn dist_mod_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

/// Decide orbit membership of a term-phase vector.
///
/// Model: a local phase transformation shifts the phase of an odd-parity
/// term T to c - Σ_{k down in T} δ_k modulo 2π, with one free overall
/// constant c. The single-down phases determine δ_k = c - φ_k; the first
/// three-down term pins c up to π, and both candidates are checked against
/// every remaining term.
pub fn orbit_membership(n: usize, t: &TermPhaseVector) -> Result<OrbitMembership> {
    orbit_membership_with_tol(n, t, MEMBERSHIP_TOL)
}

pub fn orbit_membership_with_tol(
    n: usize,
    t: &TermPhaseVector,
    tol: f64,
) -> Result<OrbitMembership> {
    if n < 3 {
        return Err(Error::ParticleCountOutOfRange { n, min: 3, max: usize::MAX });
    }
    let labels = odd_parity_labels(n);
    let expected = labels.len();
    if t.len() != expected {
        return Err(Error::PhaseVectorLength {
            got: t.len(),
            expected,
        });
    }
    let phase_of = |label: usize| -> f64 {
        let pos = labels.binary_search(&label).expect("odd-parity label");
        t.phases()[pos]
    };
    // φ_k: phase of the term with only particle k down.
    let phi: Vec<f64> = (1..=n).map(|k| phase_of(1usize << (n - k))).collect();
    let theta0 = phase_of((1 << (n - 1)) | (1 << (n - 2)) | (1 << (n - 3)));
    let base_c = (phi[0] + phi[1] + phi[2] - theta0) / 2.0;

    let mut best: Option<OrbitMembership> = None;
    for candidate in [base_c, base_c + PI] {
        let deltas: Vec<f64> = phi.iter().map(|p| candidate - p).collect();
        let mut worst = 0.0f64;
        for &label in &labels {
            let down_sum: f64 = (1..=n)
                .filter(|k| (label >> (n - k)) & 1 == 1)
                .map(|k| deltas[k - 1])
                .sum();
            let predicted = candidate - down_sum;
            worst = worst.max(dist_mod_2pi(phase_of(label) - predicted));
        }
        let better = best
            .as_ref()
            .map(|b| worst < b.max_residual_mod_2pi)
            .unwrap_or(true);
        if better {
            let reachable = worst < tol;
            best = Some(OrbitMembership {
                reachable,
                deltas: if reachable {
                    Some(
                        deltas
                            .iter()
                            .map(|d| {
                                let r = d.rem_euclid(TAU);
                                if r > PI {
                                    r - TAU
                                } else {
                                    r
                                }
                            })
                            .collect(),
                    )
                } else {
                    None
                },
                constant: candidate,
                max_residual_mod_2pi: worst,
            });
        }
    }
    Ok(best.expect("two candidates evaluated"))
}

/// The orbit torus has dimension N; the manifold of projective Bernstein
/// states has dimension 2^{N-1} - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionGap {
    pub orbit_dim: usize,
    pub bernstein_dim: usize,
}

pub fn dimension_gap(n: usize) -> Result<DimensionGap> {
    if n < 3 {
        return Err(Error::ParticleCountOutOfRange { n, min: 3, max: usize::MAX });
    }
    Ok(DimensionGap {
        orbit_dim: n,
        bernstein_dim: (1usize << (n - 1)) - 1,
    })
}
