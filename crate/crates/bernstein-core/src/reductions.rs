//! Partial traces, partial transposes, PPT spectra, the constructive
//! separable decomposition for GHZ-orbit reductions, and the fragility
//! report.
//!
//! A negative eigenvalue of a partial transpose certifies entanglement. The
//! converse holds only for two qubits here, so "separable" verdicts come from
//! either that case or from an explicit decomposition of the reduced state as
//! an equal mixture of two product states.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::qstate::{DensityMatrix, StateVector, MAX_DENSITY_PARTICLES};

/// Eigenvalues above this threshold count as nonnegative.
pub const EIG_TOL: f64 = 1e-10;
/// Decomposition residual below this threshold certifies separability.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Unordered bipartition of a reduced system's particles (1-based labels).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteSplit {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl BipartiteSplit {
    pub fn new(mut side_a: Vec<usize>, mut side_b: Vec<usize>) -> Result<BipartiteSplit> {
        side_a.sort_unstable();
        side_b.sort_unstable();
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidSplit);
        }
        Ok(BipartiteSplit { side_a, side_b })
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    fn validate_against(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n + 1];
        for &p in self.side_a.iter().chain(&self.side_b) {
            if p < 1 || p > n || seen[p] {
                return Err(Error::InvalidSplit);
            }
            seen[p] = true;
        }
        if seen[1..].iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::InvalidSplit)
        }
    }
}

/// All unordered bipartitions of an `n`-particle system; side a holds
/// particle 1. There are 2^{n-1} - 1 of them.
pub fn enumerate_splits(n: usize) -> Vec<BipartiteSplit> {
    let full = (1usize << n) - 1;
    let first = 1usize << (n - 1);
    let mut out = Vec::new();
    for mask in 1..full {
        if mask & first == 0 || mask == full {
            continue;
        }
        let side_a: Vec<usize> = (1..=n).filter(|&p| mask >> (n - p) & 1 == 1).collect();
        let side_b: Vec<usize> = (1..=n).filter(|&p| mask >> (n - p) & 1 == 0).collect();
        out.push(BipartiteSplit { side_a, side_b });
    }
    out
}

fn keep_positions(n: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::InvalidKeepSet);
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    let mut seen = vec![false; n + 1];
    for &p in &sorted {
        if p < 1 || p > n {
            return Err(Error::ParticleOutOfRange { particle: p, n });
        }
        if seen[p] {
            return Err(Error::DuplicateParticle(p));
        }
        seen[p] = true;
    }
    if sorted.len() > MAX_DENSITY_PARTICLES {
        return Err(Error::DimensionCap {
            requested: sorted.len(),
            cap: MAX_DENSITY_PARTICLES,
        });
    }
    let traced: Vec<usize> = (1..=n).filter(|p| !seen[*p]).collect();
    Ok((sorted, traced))
}

/// Expand compressed bits (MSB-first over `particles`) into a full basis
/// label of an `n`-particle system.
fn scatter_table(n: usize, particles: &[usize]) -> Vec<usize> {
    let k = particles.len();
    (0..(1usize << k))
        .map(|bits| {
            particles
                .iter()
                .enumerate()
                .map(|(j, &p)| ((bits >> (k - 1 - j)) & 1) << (n - p))
                .sum()
        })
        .collect()
}

/// Reduce a pure state to the kept particles: ρ(a,b) = Σ_e ψ(a,e) ψ*(b,e).
pub fn partial_trace_state(s: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = s.n_particles();
    let (kept, traced) = keep_positions(n, keep)?;
    let kept_table = scatter_table(n, &kept);
    let traced_table = scatter_table(n, &traced);
    let dim = kept_table.len();
    let mut mat = CMatrix::zeros(dim);
    for &env in &traced_table {
        for (a, &fa) in kept_table.iter().enumerate() {
            let amp_a = s.amplitude(fa | env);
            if amp_a.norm_sqr() == 0.0 {
                continue;
            }
            for (b, &fb) in kept_table.iter().enumerate() {
                mat[(a, b)] += amp_a * s.amplitude(fb | env).conj();
            }
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(kept.len(), mat))
}

/// Reduce a density matrix to the kept particles.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_particles();
    let (kept, traced) = keep_positions(n, keep)?;
    let kept_table = scatter_table(n, &kept);
    let traced_table = scatter_table(n, &traced);
    let dim = kept_table.len();
    let mut mat = CMatrix::zeros(dim);
    for &env in &traced_table {
        for (a, &fa) in kept_table.iter().enumerate() {
            for (b, &fb) in kept_table.iter().enumerate() {
                mat[(a, b)] += rho.entry(fa | env, fb | env);
            }
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(kept.len(), mat))
}

/// Transpose the indices of side b only. Hermitian and involutive.
pub fn partial_transpose(rho: &DensityMatrix, split: &BipartiteSplit) -> Result<CMatrix> {
    let n = rho.n_particles();
    split.validate_against(n)?;
    let mask_b: usize = split.side_b.iter().map(|&p| 1usize << (n - p)).sum();
    let mask_a = ((1usize << n) - 1) ^ mask_b;
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = rho.entry((r & mask_a) | (c & mask_b), (c & mask_a) | (r & mask_b));
        }
    }
    Ok(out)
}

/// Minimum eigenvalue of the partial transpose across the given split.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, split: &BipartiteSplit) -> Result<f64> {
    let pt = partial_transpose(rho, split)?;
    let ev = hermitian_eigenvalues(&pt)?;
    Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
}

/// The two product states whose equal mixture reproduces a single-particle
/// trace-out of a GHZ-orbit state, plus the entrywise residual against the
/// actual reduced matrix. A residual below [`RESIDUAL_TOL`] certifies
/// separability constructively; a large residual signals that the input is
/// not in the orbit.
#[derive(Debug, Clone)]
pub struct GhzOrbitDecomposition {
    pub product_state_1: StateVector,
    pub product_state_2: StateVector,
    pub residual: f64,
}

/// Separable decomposition of `tr_t |s⟩⟨s|` for states in the GHZ orbit.
///
/// Two supported forms: states supported on the two polar labels (GHZ in the
/// z basis, where the mixture is the two poles), and states supported on the
/// odd-down-parity labels (the x-basis GHZ orbit under local phase
/// transforms, where each kept particle contributes an equatorial arrow state
/// recovered from the term phases).
pub fn ghz_orbit_separable_decomposition(
    s: &StateVector,
    traced: usize,
) -> Result<GhzOrbitDecomposition> {
    let n = s.n_particles();
    if traced < 1 || traced > n {
        return Err(Error::ParticleOutOfRange {
            particle: traced,
            n,
        });
    }
    if n < 2 {
        return Err(Error::InvalidKeepSet);
    }
    if n - 1 > MAX_DENSITY_PARTICLES {
        return Err(Error::DimensionCap {
            requested: n - 1,
            cap: MAX_DENSITY_PARTICLES,
        });
    }
    let keep: Vec<usize> = (1..=n).filter(|&p| p != traced).collect();
    let reduced = partial_trace_state(s, &keep)?;

    let dim = s.dim();
    let polar_mass = s.probability(0) + s.probability(dim - 1);
    let r = std::f64::consts::FRAC_1_SQRT_2;

    // Per kept particle: the (up, down) components of the two orthogonal
    // single-particle states whose products form the mixture.
    let factors: Vec<([Complex64; 2], [Complex64; 2])> = if polar_mass > 0.999 {
        keep.iter()
            .map(|_| {
                (
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                )
            })
            .collect()
    } else {
        // Arrow form: term phases obey theta_T = c - sum_{k down} delta_k.
        // Single-down phases give delta_k up to the constant; a three-down
        // term fixes the constant up to pi, which only swaps the two
        // product states.
        let single_down_phase =
            |k: usize| -> f64 { s.amplitude(1usize << (n - k)).arg() };
        let c = if n >= 3 {
            let theta0 = s
                .amplitude((1 << (n - 1)) | (1 << (n - 2)) | (1 << (n - 3)))
                .arg();
            (single_down_phase(1) + single_down_phase(2) + single_down_phase(3) - theta0) / 2.0
        } else {
            0.0
        };
        keep.iter()
            .map(|&k| {
                let delta = c - single_down_phase(k);
                let down = Complex64::from_polar(r, -delta);
                (
                    [Complex64::new(r, 0.0), down],
                    [Complex64::new(r, 0.0), -down],
                )
            })
            .collect()
    };

    let m = keep.len();
    let build = |which: usize| -> StateVector {
        let amps = (0..(1usize << m))
            .map(|pattern| {
                let mut amp = Complex64::new(1.0, 0.0);
                for (j, f) in factors.iter().enumerate() {
                    let bit = (pattern >> (m - 1 - j)) & 1;
                    amp *= if which == 0 { f.0[bit] } else { f.1[bit] };
                }
                amp
            })
            .collect();
        StateVector::from_amplitudes(m, amps).expect("product state is normalized")
    };
    let p1 = build(0);
    let p2 = build(1);

    let rdim = reduced.dim();
    let mut residual = 0.0f64;
    for i in 0..rdim {
        for j in 0..rdim {
            let mix = (p1.amplitude(i) * p1.amplitude(j).conj()
                + p2.amplitude(i) * p2.amplitude(j).conj())
            .scale(0.5);
            residual = residual.max((mix - reduced.entry(i, j)).norm());
        }
    }

    Ok(GhzOrbitDecomposition {
        product_state_1: p1,
        product_state_2: p2,
        residual,
    })
}

/// Separability verdict for one reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparabilityVerdict {
    Separable,
    Entangled,
    Inconclusive,
}

/// PPT minimum for one bipartition, labeled by original particle indices.
#[derive(Debug, Clone, Serialize)]
pub struct SplitPpt {
    #[serde(rename = "a")]
    pub side_a: Vec<usize>,
    #[serde(rename = "b")]
    pub side_b: Vec<usize>,
    #[serde(rename = "ppt_min")]
    pub min_eigenvalue: f64,
}

/// Analysis of the reduced state left after tracing out one particle.
#[derive(Debug, Clone, Serialize)]
pub struct TracedParticleReport {
    pub traced: usize,
    pub splits: Vec<SplitPpt>,
    #[serde(rename = "residual")]
    pub decomposition_residual: Option<f64>,
    pub verdict: SeparabilityVerdict,
}

/// Per-particle fragility analysis of a pure state.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct FragilityReport {
    pub per_particle: Vec<TracedParticleReport>,
}

impl FragilityReport {
    pub fn all_separable(&self) -> bool {
        self.per_particle
            .iter()
            .all(|r| r.verdict == SeparabilityVerdict::Separable)
    }
}

/// Trace out each particle in turn and analyze the reduced state: PPT minima
/// on every bipartition, the GHZ-orbit decomposition residual where that
/// decomposition applies, and a verdict per the PPT/decomposition policy.
pub fn fragility_report(s: &StateVector) -> Result<FragilityReport> {
    fragility_report_with_tol(s, EIG_TOL, RESIDUAL_TOL)
}

pub fn fragility_report_with_tol(
    s: &StateVector,
    eig_tol: f64,
    residual_tol: f64,
) -> Result<FragilityReport> {
    let n = s.n_particles();
    if !(3..=11).contains(&n) {
        return Err(Error::ParticleCountOutOfRange { n, min: 3, max: 11 });
    }

    // The decomposition targets the two GHZ-orbit support patterns; other
    // states get PPT analysis only.
    let dim = s.dim();
    let polar_mass = s.probability(0) + s.probability(dim - 1);
    let even_mass: f64 = (0..dim)
        .filter(|i| i.count_ones() % 2 == 0)
        .map(|i| s.probability(i))
        .sum();
    let decomposition_applies = polar_mass > 1.0 - 1e-9 || even_mass < 1e-9;

    let m = n - 1;
    let splits = enumerate_splits(m);
    let reduced: Vec<(usize, Vec<usize>, DensityMatrix)> = (1..=n)
        .map(|t| {
            let keep: Vec<usize> = (1..=n).filter(|&p| p != t).collect();
            let rho = partial_trace_state(s, &keep)?;
            Ok((t, keep, rho))
        })
        .collect::<Result<_>>()?;

    // Flatten (traced, split) pairs for the eigensolve sweep.
    let jobs: Vec<(usize, usize)> = (0..reduced.len())
        .flat_map(|ti| (0..splits.len()).map(move |si| (ti, si)))
        .collect();
    let minima = exec::map_collect(&jobs, |&(ti, si)| {
        ppt_min_eigenvalue(&reduced[ti].2, &splits[si])
    });

    let mut per_particle = Vec::with_capacity(n);
    for (ti, (t, keep, _rho)) in reduced.iter().enumerate() {
        let mut split_reports = Vec::with_capacity(splits.len());
        let mut worst = f64::INFINITY;
        for (si, split) in splits.iter().enumerate() {
            let min_eig = minima[ti * splits.len() + si].clone()?;
            worst = worst.min(min_eig);
            split_reports.push(SplitPpt {
                side_a: split.side_a.iter().map(|&r| keep[r - 1]).collect(),
                side_b: split.side_b.iter().map(|&r| keep[r - 1]).collect(),
                min_eigenvalue: min_eig,
            });
        }
        let residual = if decomposition_applies {
            Some(ghz_orbit_separable_decomposition(s, *t)?.residual)
        } else {
            None
        };
        let verdict = if worst < -eig_tol {
            SeparabilityVerdict::Entangled
        } else if residual.map(|r| r < residual_tol).unwrap_or(false)
            || (m == 2 && worst >= -eig_tol)
        {
            SeparabilityVerdict::Separable
        } else {
            SeparabilityVerdict::Inconclusive
        };
        per_particle.push(TracedParticleReport {
            traced: *t,
            splits: split_reports,
            decomposition_residual: residual,
            verdict,
        });
    }

    Ok(FragilityReport { per_particle })
}
