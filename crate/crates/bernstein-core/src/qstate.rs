//! Dense N-qubit state vectors and density matrices.
//!
//! Basis labels are bit patterns with particle 1 at the most significant bit
//! and spin-up encoded as bit 0, so printed kets read left to right. All
//! values are immutable after construction; operations return new values.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest particle count for a state vector.
pub const MAX_STATE_PARTICLES: usize = 16;
/// Largest particle count for a density matrix.
pub const MAX_DENSITY_PARTICLES: usize = 12;

/// Norm and unitarity tolerance.
pub const NORM_TOL: f64 = 1e-12;

pub type Mat2 = [[Complex64; 2]; 2];

/// Spin along the z axis for one particle. `Up` encodes bit 0, `Down` bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Spin {
        if bit & 1 == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

/// Measurement axis. The positive eigenvector conventions follow the usual
/// arrow notation: x-up is (|↑⟩+|↓⟩)/√2, y-up is (|↑⟩+i|↓⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Mat2 {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Axis::X => [[z, one], [one, z]],
            Axis::Y => [[z, -i], [i, z]],
            Axis::Z => [[one, z], [z, -one]],
        }
    }

    /// Projector onto the ±1 eigenspace: (1 ± sigma)/2.
    pub fn projector(self, sign: Sign) -> Mat2 {
        let p = self.pauli();
        let s = sign.factor();
        let half = 0.5;
        [
            [
                (Complex64::new(1.0, 0.0) + p[0][0].scale(s)).scale(half),
                p[0][1].scale(s * half),
            ],
            [
                p[1][0].scale(s * half),
                (Complex64::new(1.0, 0.0) + p[1][1].scale(s)).scale(half),
            ],
        ]
    }

    /// Unitary whose rows are the conjugated eigenbras of this axis, so that
    /// applying it re-expresses amplitudes in the axis eigenbasis.
    pub fn basis_change_to_z(self) -> Mat2 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let h = Complex64::new(r, 0.0);
        let mi = Complex64::new(0.0, -r);
        let pi = Complex64::new(0.0, r);
        match self {
            Axis::X => [[h, h], [h, -h]],
            Axis::Y => [[h, mi], [h, pi]],
            Axis::Z => [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        }
    }

    pub fn from_char(ch: char) -> Result<Axis> {
        match ch.to_ascii_lowercase() {
            'x' => Ok(Axis::X),
            'y' => Ok(Axis::Y),
            'z' => Ok(Axis::Z),
            other => Err(Error::UnsupportedAxis(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// Outcome sign of a projective spin measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Basis index of a spin pattern; particle 1 occupies the most significant bit.
pub fn basis_index(pattern: &[Spin]) -> Result<usize> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let n = pattern.len();
    Ok(pattern
        .iter()
        .enumerate()
        .map(|(k, s)| s.bit() << (n - 1 - k))
        .sum())
}

/// Inverse of [`basis_index`] for an `n`-particle system.
pub fn pattern_of(index: usize, n: usize) -> Vec<Spin> {
    (1..=n).map(|k| Spin::from_bit(index >> (n - k))).collect()
}

/// Number of particles pointing down in a basis label.
pub fn down_count(index: usize) -> u32 {
    index.count_ones()
}

/// Complex amplitudes over the 2^N computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Normalize raw amplitudes into a state.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        if !(1..=MAX_STATE_PARTICLES).contains(&n) {
            return Err(Error::ParticleCountOutOfRange {
                n,
                min: 1,
                max: MAX_STATE_PARTICLES,
            });
        }
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1 << n,
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::ZeroState);
        }
        let norm = norm_sqr.sqrt();
        let amps = amps.into_iter().map(|a| a.unscale(norm)).collect();
        Ok(StateVector { n, amps })
    }

    /// Build a state from (pattern, amplitude) terms and normalize.
    pub fn from_terms(n: usize, terms: &[(Vec<Spin>, Complex64)]) -> Result<StateVector> {
        if !(1..=MAX_STATE_PARTICLES).contains(&n) {
            return Err(Error::ParticleCountOutOfRange {
                n,
                min: 1,
                max: MAX_STATE_PARTICLES,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let mut seen = vec![false; 1 << n];
        for (pattern, amp) in terms {
            if pattern.len() != n {
                return Err(Error::DimensionMismatch {
                    left: pattern.len(),
                    right: n,
                });
            }
            let idx = basis_index(pattern)?;
            if seen[idx] {
                return Err(Error::DuplicatePattern(idx));
            }
            seen[idx] = true;
            amps[idx] = *amp;
        }
        StateVector::from_amplitudes(n, amps)
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bit of `index` belonging to 1-based `particle` (0 = up, 1 = down).
    pub fn bit_of(&self, index: usize, particle: usize) -> usize {
        (index >> (self.n - particle)) & 1
    }

    /// ⟨self|other⟩ with conjugation on `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|, the projective comparison used throughout.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm())
    }

    /// Apply a 2x2 unitary to one particle (1-based index).
    pub fn apply_local_unitary(&self, particle: usize, u: &Mat2) -> Result<StateVector> {
        if particle < 1 || particle > self.n {
            return Err(Error::ParticleOutOfRange {
                particle,
                n: self.n,
            });
        }
        let dev = unitarity_deviation(u);
        if dev > NORM_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(self.apply_local_matrix(particle, u))
    }

    /// Apply a 2x2 matrix to one particle without a unitarity check.
    pub(crate) fn apply_local_matrix(&self, particle: usize, u: &Mat2) -> StateVector {
        let mask = 1usize << (self.n - particle);
        let mut amps = self.amps.clone();
        for i in 0..amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let up = amps[i];
                let down = amps[j];
                amps[i] = u[0][0] * up + u[0][1] * down;
                amps[j] = u[1][0] * up + u[1][1] * down;
            }
        }
        StateVector { n: self.n, amps }
    }

    /// Re-express the selected particles in the x basis using
    /// |↑⟩ = (|←⟩+|→⟩)/√2, |↓⟩ = (|←⟩−|→⟩)/√2. Involutive.
    pub fn basis_change_z_to_x(&self, particles: &[usize]) -> Result<StateVector> {
        let mut seen = vec![false; self.n + 1];
        for &p in particles {
            if p < 1 || p > self.n {
                return Err(Error::ParticleOutOfRange {
                    particle: p,
                    n: self.n,
                });
            }
            if seen[p] {
                return Err(Error::DuplicateParticle(p));
            }
            seen[p] = true;
        }
        let h = Axis::X.basis_change_to_z();
        let mut out = self.clone();
        for &p in particles {
            out = out.apply_local_matrix(p, &h);
        }
        Ok(out)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let ket: String = pattern_of(i, self.n)
                .iter()
                .map(|s| match s {
                    Spin::Up => '↑',
                    Spin::Down => '↓',
                })
                .collect();
            if a.im.abs() < 1e-12 {
                write!(f, "{:.4}|{}⟩", a.re, ket)?;
            } else {
                write!(f, "({:.4}{:+.4}i)|{}⟩", a.re, a.im, ket)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn unitarity_deviation(u: &Mat2) -> f64 {
    // u u^† = I for a 2x2 unitary.
    let mut worst = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += u[r][k] * u[c][k].conj();
            }
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((acc - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Hermitian, unit-trace matrix over a subset of particles.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Pure-state projector |s⟩⟨s|.
    pub fn from_state(s: &StateVector) -> Result<DensityMatrix> {
        if s.n_particles() > MAX_DENSITY_PARTICLES {
            return Err(Error::DimensionCap {
                requested: s.n_particles(),
                cap: MAX_DENSITY_PARTICLES,
            });
        }
        let dim = s.dim();
        let mut mat = CMatrix::zeros(dim);
        for i in 0..dim {
            let ai = s.amplitude(i);
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                mat[(i, j)] = ai * s.amplitude(j).conj();
            }
        }
        Ok(DensityMatrix { n: s.n_particles(), mat })
    }

    /// Validate hermiticity and unit trace of an externally built matrix.
    /// Positivity is not checked here; callers that need it diagonalize.
    pub fn from_matrix(n: usize, mat: CMatrix) -> Result<DensityMatrix> {
        if !(1..=MAX_DENSITY_PARTICLES).contains(&n) {
            return Err(Error::ParticleCountOutOfRange {
                n,
                min: 1,
                max: MAX_DENSITY_PARTICLES,
            });
        }
        if mat.dim() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: mat.dim(),
                right: 1 << n,
            });
        }
        let dev = mat.hermiticity_deviation();
        if dev > NORM_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        Ok(DensityMatrix { n, mat })
    }

    pub(crate) fn from_parts_unchecked(n: usize, mat: CMatrix) -> DensityMatrix {
        DensityMatrix { n, mat }
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Bit of a row/column index belonging to 1-based `particle`.
    pub fn bit_of(&self, index: usize, particle: usize) -> usize {
        (index >> (self.n - particle)) & 1
    }

    /// tr(F ρ) for F a product of 2x2 factors on distinct particles
    /// (identity elsewhere). Runs in O(dim · 4^{|factors|}).
    pub fn expectation_local(&self, factors: &[(usize, Mat2)]) -> Result<Complex64> {
        let mut seen = vec![false; self.n + 1];
        for &(p, _) in factors {
            if p < 1 || p > self.n {
                return Err(Error::ParticleOutOfRange { particle: p, n: self.n });
            }
            if seen[p] {
                return Err(Error::DuplicateParticle(p));
            }
            seen[p] = true;
        }
        let q = factors.len();
        let free_positions: Vec<usize> = (1..=self.n)
            .filter(|p| !seen[*p])
            .map(|p| self.n - p)
            .collect();
        let factor_positions: Vec<usize> = factors.iter().map(|&(p, _)| self.n - p).collect();

        let scatter = |bits: usize, positions: &[usize]| -> usize {
            positions
                .iter()
                .enumerate()
                .map(|(j, pos)| ((bits >> j) & 1) << pos)
                .sum()
        };

        // tr(F rho) = sum over frames m and factor patterns a (row), b (col):
        // prod_k F_k[a_k, b_k] * rho[(m|b), (m|a)].
        let mut total = Complex64::new(0.0, 0.0);
        for m in 0..(1usize << free_positions.len()) {
            let base = scatter(m, &free_positions);
            for a in 0..(1usize << q) {
                let row_part = scatter(a, &factor_positions);
                for b in 0..(1usize << q) {
                    let col_part = scatter(b, &factor_positions);
                    let mut coeff = Complex64::new(1.0, 0.0);
                    for (k, &(_, f)) in factors.iter().enumerate() {
                        coeff *= f[(a >> k) & 1][(b >> k) & 1];
                    }
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    total += coeff * self.mat[(base | col_part, base | row_part)];
                }
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_index_convention() {
        use Spin::*;
        assert_eq!(basis_index(&[Up, Up, Up]).unwrap(), 0);
        assert_eq!(basis_index(&[Up, Up, Down]).unwrap(), 1);
        assert_eq!(basis_index(&[Down, Up, Up]).unwrap(), 4);
        assert!(matches!(basis_index(&[]), Err(Error::EmptyPattern)));
    }

    #[test]
    fn basis_index_round_trips() {
        for n in 1..=12 {
            for i in 0..(1usize << n) {
                assert_eq!(basis_index(&pattern_of(i, n)).unwrap(), i);
            }
        }
    }

    #[test]
    fn from_terms_normalizes() {
        use Spin::*;
        let s = StateVector::from_terms(
            2,
            &[
                (vec![Up, Up], c(1.0, 0.0)),
                (vec![Down, Down], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert!((s.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_terms_rejects_duplicates_and_zero() {
        use Spin::*;
        let dup = StateVector::from_terms(
            1,
            &[(vec![Up], c(1.0, 0.0)), (vec![Up], c(0.5, 0.0))],
        );
        assert!(matches!(dup, Err(Error::DuplicatePattern(0))));
        let zero = StateVector::from_terms(1, &[(vec![Up], c(0.0, 0.0))]);
        assert!(matches!(zero, Err(Error::ZeroState)));
    }

    #[test]
    fn single_ket_inner_products() {
        use Spin::*;
        let up = StateVector::from_terms(1, &[(vec![Up], c(1.0, 0.0))]).unwrap();
        let down = StateVector::from_terms(1, &[(vec![Down], c(1.0, 0.0))]).unwrap();
        assert!((up.inner_product(&up).unwrap().re - 1.0).abs() < 1e-15);
        assert!(up.inner_product(&down).unwrap().norm() < 1e-15);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        use Spin::*;
        let a = StateVector::from_terms(1, &[(vec![Up], c(1.0, 0.0))]).unwrap();
        let b = StateVector::from_terms(2, &[(vec![Up, Up], c(1.0, 0.0))]).unwrap();
        assert!(a.inner_product(&b).is_err());
    }

    #[test]
    fn diagonal_unitary_action() {
        use Spin::*;
        let s = StateVector::from_terms(
            2,
            &[(vec![Up, Down], c(1.0, 0.0)), (vec![Down, Up], c(1.0, 0.0))],
        )
        .unwrap();
        let (alpha, beta) = (0.3f64, -1.1f64);
        let u: Mat2 = [
            [Complex64::from_polar(1.0, alpha), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, beta)],
        ];
        let t = s.apply_local_unitary(1, &u).unwrap();
        // particle 1 up on index 1, down on index 2
        assert!((t.amplitude(1) - s.amplitude(1) * Complex64::from_polar(1.0, alpha)).norm() < 1e-15);
        assert!((t.amplitude(2) - s.amplitude(2) * Complex64::from_polar(1.0, beta)).norm() < 1e-15);
        assert!((t.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        use Spin::*;
        let s = StateVector::from_terms(1, &[(vec![Up], c(1.0, 0.0))]).unwrap();
        let u: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]];
        assert!(matches!(
            s.apply_local_unitary(1, &u),
            Err(Error::NotUnitary { .. })
        ));
        assert!(s.apply_local_unitary(2, &Axis::X.pauli()).is_err());
    }

    #[test]
    fn hadamard_on_each_particle_turns_ghz_x_into_b3() {
        use crate::constructions::{ghz, special_bernstein};
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let h: Mat2 = [
            [c(r, 0.0), c(r, 0.0)],
            [c(r, 0.0), c(-r, 0.0)],
        ];
        let mut s = ghz(3, Axis::X, Sign::Minus).unwrap();
        for p in 1..=3 {
            s = s.apply_local_unitary(p, &h).unwrap();
        }
        let b3 = special_bernstein(3).unwrap();
        assert!((s.overlap(&b3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_change_is_involutive() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for n in 2..=8 {
            for _ in 0..100 {
                let amps: Vec<Complex64> = (0..(1usize << n)).map(|_| c(next(), next())).collect();
                let s = StateVector::from_amplitudes(n, amps).unwrap();
                let particles: Vec<usize> = (1..=n).collect();
                let once = s.basis_change_z_to_x(&particles).unwrap();
                let twice = once.basis_change_z_to_x(&particles).unwrap();
                for i in 0..s.dim() {
                    assert!((twice.amplitude(i) - s.amplitude(i)).norm() < 1e-12);
                }
                assert!((once.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_subset_is_identity() {
        use Spin::*;
        let s = StateVector::from_terms(2, &[(vec![Up, Down], c(1.0, 0.0))]).unwrap();
        let t = s.basis_change_z_to_x(&[]).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn density_from_up_state() {
        use Spin::*;
        let up = StateVector::from_terms(1, &[(vec![Up], c(1.0, 0.0))]).unwrap();
        let rho = DensityMatrix::from_state(&up).unwrap();
        assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!(rho.entry(1, 1).norm() < 1e-15);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_is_idempotent_projector() {
        use Spin::*;
        let s = StateVector::from_terms(
            3,
            &[
                (vec![Up, Up, Down], c(1.0, 0.0)),
                (vec![Up, Down, Up], c(1.0, 0.0)),
                (vec![Down, Up, Up], c(1.0, 0.0)),
                (vec![Down, Down, Down], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let rho = DensityMatrix::from_state(&s).unwrap();
        let sq = rho.matrix().mul(rho.matrix());
        assert!(sq.max_abs_diff(rho.matrix()) < 1e-10);
        // 16 entries of 1/4 on the support of the four-term state
        let support = [1usize, 2, 4, 7];
        let mut quarter_entries = 0;
        for i in 0..8 {
            for j in 0..8 {
                let v = rho.entry(i, j);
                if support.contains(&i) && support.contains(&j) {
                    assert!((v.re - 0.25).abs() < 1e-15 && v.im.abs() < 1e-15);
                    quarter_entries += 1;
                } else {
                    assert!(v.norm() < 1e-15);
                }
            }
        }
        assert_eq!(quarter_entries, 16);
    }

    #[test]
    fn expectation_local_matches_direct_sum() {
        use Spin::*;
        let s = StateVector::from_terms(
            2,
            &[(vec![Up, Up], c(0.6, 0.0)), (vec![Down, Down], c(0.0, 0.8))],
        )
        .unwrap();
        let rho = DensityMatrix::from_state(&s).unwrap();
        let pz = Axis::Z.projector(Sign::Plus);
        let p = rho.expectation_local(&[(1, pz)]).unwrap();
        assert!((p.re - 0.36).abs() < 1e-12 && p.im.abs() < 1e-12);
        let pboth = rho.expectation_local(&[(1, pz), (2, pz)]).unwrap();
        assert!((pboth.re - 0.36).abs() < 1e-12);
        assert!(rho.expectation_local(&[(1, pz), (1, pz)]).is_err());
    }
}
