//! Builders for the state families under study: the special Bernstein state
//! B^(N), phase-decorated Bernstein states, GHZ states in the z and x bases,
//! the inhomogeneous three-particle family B_q, and local phase transforms.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::qstate::{Axis, Sign, StateVector, MAX_STATE_PARTICLES};

/// Smallest particle count with a Bernstein state.
pub const MIN_BERNSTEIN_PARTICLES: usize = 3;

/// Local phase parameters: particle k picks up exp(i alpha_k) when up and
/// exp(i beta_k) when down.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAssignment {
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl PhaseAssignment {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<PhaseAssignment> {
        if alphas.len() != betas.len() {
            return Err(Error::PhaseAssignmentLength {
                got: betas.len(),
                expected: alphas.len(),
            });
        }
        if alphas.iter().chain(&betas).any(|a| !a.is_finite()) {
            return Err(Error::StateFormat("phase angles must be finite".into()));
        }
        Ok(PhaseAssignment { alphas, betas })
    }

    pub fn n_particles(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// The phase differences delta_k = alpha_k - beta_k.
    pub fn deltas(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .zip(&self.betas)
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// One phase per odd-down-parity basis label, in increasing basis-index
/// order. Angles are reduced to [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct TermPhaseVector {
    phases: Vec<f64>,
}

impl TermPhaseVector {
    pub fn new(phases: Vec<f64>) -> TermPhaseVector {
        TermPhaseVector {
            phases: phases.into_iter().map(|p| p.rem_euclid(TAU)).collect(),
        }
    }

    pub fn zeros(len: usize) -> TermPhaseVector {
        TermPhaseVector {
            phases: vec![0.0; len],
        }
    }

    /// Push a local phase assignment forward onto the odd-parity terms of an
    /// N-particle Bernstein state: term T gets sum of alpha over up particles
    /// plus sum of beta over down particles.
    pub fn from_phase_assignment(n: usize, p: &PhaseAssignment) -> Result<TermPhaseVector> {
        if p.n_particles() != n {
            return Err(Error::PhaseAssignmentLength {
                got: p.n_particles(),
                expected: n,
            });
        }
        let phases = odd_parity_labels(n)
            .into_iter()
            .map(|label| {
                (1..=n)
                    .map(|k| {
                        if (label >> (n - k)) & 1 == 0 {
                            p.alphas[k - 1]
                        } else {
                            p.betas[k - 1]
                        }
                    })
                    .sum::<f64>()
            })
            .collect();
        Ok(TermPhaseVector::new(phases))
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// Basis labels with an odd number of down spins, ascending. There are
/// 2^{N-1} of them.
pub fn odd_parity_labels(n: usize) -> Vec<usize> {
    (0..(1usize << n)).filter(|i| i.count_ones() % 2 == 1).collect()
}

fn check_bernstein_n(n: usize) -> Result<()> {
    if !(MIN_BERNSTEIN_PARTICLES..=MAX_STATE_PARTICLES).contains(&n) {
        return Err(Error::ParticleCountOutOfRange {
            n,
            min: MIN_BERNSTEIN_PARTICLES,
            max: MAX_STATE_PARTICLES,
        });
    }
    Ok(())
}

/// The special Bernstein state B^(N): amplitude 2^{-(N-1)/2} on every basis
/// label with an odd number of down spins.
pub fn special_bernstein(n: usize) -> Result<StateVector> {
    check_bernstein_n(n)?;
    let amp = 0.5f64.powf((n as f64 - 1.0) / 2.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for label in odd_parity_labels(n) {
        amps[label] = Complex64::new(amp, 0.0);
    }
    StateVector::from_amplitudes(n, amps)
}

/// A Bernstein state with the given phase on each odd-parity term. Support
/// and moduli match [`special_bernstein`].
pub fn general_bernstein(n: usize, t: &TermPhaseVector) -> Result<StateVector> {
    check_bernstein_n(n)?;
    let expected = 1usize << (n - 1);
    if t.len() != expected {
        return Err(Error::PhaseVectorLength {
            got: t.len(),
            expected,
        });
    }
    let amp = 0.5f64.powf((n as f64 - 1.0) / 2.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (label, phase) in odd_parity_labels(n).into_iter().zip(t.phases()) {
        amps[label] = Complex64::from_polar(amp, *phase);
    }
    StateVector::from_amplitudes(n, amps)
}

/// GHZ state (|e+...e+⟩ + sign·|e-...e-⟩)/√2 in the eigenbasis of the chosen
/// axis. The returned amplitudes are coefficients in that product eigenbasis:
/// for `Axis::Z` this is the computational basis; for `Axis::X` convert with
/// [`StateVector::basis_change_z_to_x`] (its own inverse) to read the state in
/// the z basis. The y axis is not supported here.
pub fn ghz(n: usize, axis: Axis, relative_sign: Sign) -> Result<StateVector> {
    if !(2..=MAX_STATE_PARTICLES).contains(&n) {
        return Err(Error::ParticleCountOutOfRange {
            n,
            min: 2,
            max: MAX_STATE_PARTICLES,
        });
    }
    if axis == Axis::Y {
        return Err(Error::UnsupportedAxis('y'));
    }
    let dim = 1usize << n;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(r, 0.0);
    amps[dim - 1] = Complex64::new(relative_sign.factor() * r, 0.0);
    StateVector::from_amplitudes(n, amps)
}

/// The inhomogeneous three-particle Bernstein state B_q for 0 < q ≤ 1/2:
/// coefficient q on the one-down terms, sqrt(q(1-2q)) on the two-down terms,
/// and sqrt(1-3q(1-q)) on |↓↓↓⟩.
pub fn inhomogeneous_bernstein3(q: f64) -> Result<StateVector> {
    if !(q > 0.0 && q <= 0.5) {
        return Err(Error::QOutOfRange(q));
    }
    let one_down = q;
    let two_down = (q * (1.0 - 2.0 * q)).sqrt();
    let all_down = (1.0 - 3.0 * q * (1.0 - q)).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    for label in [0b001usize, 0b010, 0b100] {
        amps[label] = Complex64::new(one_down, 0.0);
    }
    for label in [0b011usize, 0b101, 0b110] {
        amps[label] = Complex64::new(two_down, 0.0);
    }
    amps[0b111] = Complex64::new(all_down, 0.0);
    StateVector::from_amplitudes(3, amps)
}

/// Multiply each basis amplitude by exp(i sum_k [alpha_k if up else beta_k]).
pub fn local_phase_transform(s: &StateVector, p: &PhaseAssignment) -> Result<StateVector> {
    let n = s.n_particles();
    if p.n_particles() != n {
        return Err(Error::PhaseAssignmentLength {
            got: p.n_particles(),
            expected: n,
        });
    }
    let amps = (0..s.dim())
        .map(|label| {
            let phase: f64 = (1..=n)
                .map(|k| {
                    if (label >> (n - k)) & 1 == 0 {
                        p.alphas[k - 1]
                    } else {
                        p.betas[k - 1]
                    }
                })
                .sum();
            s.amplitude(label) * Complex64::from_polar(1.0, phase)
        })
        .collect();
    StateVector::from_amplitudes(n, amps)
}
