//! Joint outcome probabilities, marginals, k-wise independence reports, and
//! the Bernstein certificate.
//!
//! The independence sweep rotates the state once into the per-particle
//! measurement eigenbases, after which every joint probability is a marginal
//! of a single 2^N distribution; each subset then costs one pass over that
//! distribution. The sweep over subsets is data-parallel.

use serde::Serialize;

use crate::constructions::odd_parity_labels;
use crate::error::{Error, Result};
use crate::exec;
use crate::qstate::{Axis, DensityMatrix, Sign, StateVector};

/// Probability deviation below which outcomes count as independent.
pub const INDEPENDENCE_TOL: f64 = 1e-9;
/// Amplitude tolerance for the certificate's support and modulus tests.
pub const CERTIFICATE_AMP_TOL: f64 = 1e-9;

/// A joint projective outcome: per-particle axis and sign on distinct
/// particles, e.g. (+••) for "spin up along z on particle 1".
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeQuery {
    entries: Vec<(usize, Axis, Sign)>,
}

impl OutcomeQuery {
    pub fn new(entries: Vec<(usize, Axis, Sign)>) -> Result<OutcomeQuery> {
        if entries.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut particles: Vec<usize> = entries.iter().map(|e| e.0).collect();
        particles.sort_unstable();
        for w in particles.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateParticle(w[0]));
            }
        }
        Ok(OutcomeQuery { entries })
    }

    /// All-z query from particles and signs.
    pub fn all_z(entries: Vec<(usize, Sign)>) -> Result<OutcomeQuery> {
        OutcomeQuery::new(entries.into_iter().map(|(p, s)| (p, Axis::Z, s)).collect())
    }

    pub fn entries(&self) -> &[(usize, Axis, Sign)] {
        &self.entries
    }

    pub fn particles(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    fn validate_against(&self, n: usize) -> Result<()> {
        for &(p, _, _) in &self.entries {
            if p < 1 || p > n {
                return Err(Error::ParticleOutOfRange { particle: p, n });
            }
        }
        Ok(())
    }

    /// Bullet notation over `n` particles, e.g. "(+•−)".
    pub fn render(&self, n: usize) -> String {
        let mut slots = vec!['•'; n];
        for &(p, _, sign) in &self.entries {
            if p >= 1 && p <= n {
                slots[p - 1] = sign.to_char();
            }
        }
        format!("({})", slots.into_iter().collect::<String>())
    }
}

/// Verdict for one subset size in an independence report.
#[derive(Debug, Clone, Serialize)]
pub struct SizeVerdict {
    pub size: usize,
    pub independent: bool,
    pub worst_deviation: f64,
    #[serde(skip)]
    pub witness: Option<OutcomeQuery>,
}

/// Independence verdicts per subset size, plus the N-wise headline numbers.
#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub max_checked: usize,
    pub per_size: Vec<SizeVerdict>,
    pub n_wise_joint: f64,
    pub n_wise_product: f64,
}

impl IndependenceReport {
    pub fn verdict_for(&self, size: usize) -> Option<&SizeVerdict> {
        self.per_size.iter().find(|v| v.size == size)
    }

    /// True when every checked size up to `size` is independent.
    pub fn independent_through(&self, size: usize) -> bool {
        (1..=size).all(|k| self.verdict_for(k).map(|v| v.independent).unwrap_or(false))
    }
}

/// Why a state failed the Bernstein certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateFailure {
    Support,
    Modulus,
    Independence,
    NWise,
}

/// Result of [`bernstein_certificate`].
#[derive(Debug, Clone)]
pub struct BernsteinCertificate {
    pub is_bernstein: bool,
    pub reason: Option<CertificateFailure>,
}

/// Correlation data for two disjoint outcome queries against a density matrix.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationCheck {
    pub p1: f64,
    pub p2: f64,
    pub p12: f64,
    pub independent: bool,
}

/// Squared-modulus outcome distribution over the 2^N computational labels.
pub fn outcome_distribution(s: &StateVector) -> Vec<f64> {
    (0..s.dim()).map(|i| s.probability(i)).collect()
}

/// Probability of a joint projective outcome.
///
/// All-z queries reduce to a bit-filtered sum over the outcome distribution;
/// mixed-axis queries apply the per-particle projectors to a working copy.
pub fn joint_probability(s: &StateVector, q: &OutcomeQuery) -> Result<f64> {
    q.validate_against(s.n_particles())?;
    let n = s.n_particles();
    if q.entries.iter().all(|&(_, axis, _)| axis == Axis::Z) {
        let mut mask = 0usize;
        let mut want = 0usize;
        for &(p, _, sign) in &q.entries {
            let bit = 1usize << (n - p);
            mask |= bit;
            if sign == Sign::Minus {
                want |= bit;
            }
        }
        let p = (0..s.dim())
            .filter(|i| i & mask == want)
            .map(|i| s.probability(i))
            .sum();
        return Ok(p);
    }
    let mut working = s.clone();
    for &(p, axis, sign) in &q.entries {
        working = working.apply_local_matrix(p, &axis.projector(sign));
    }
    Ok(working.amplitudes().iter().map(|a| a.norm_sqr()).sum())
}

/// Marginal of the outcome distribution over the complement of `subset`.
/// Entries are indexed with the smallest kept particle at the most
/// significant bit.
pub fn marginal_table(s: &StateVector, subset: &[usize]) -> Result<Vec<f64>> {
    let dist = outcome_distribution(s);
    marginal_of_distribution(&dist, s.n_particles(), subset)
}

fn marginal_of_distribution(dist: &[f64], n: usize, subset: &[usize]) -> Result<Vec<f64>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateParticle(w[0]));
        }
    }
    for &p in &sorted {
        if p < 1 || p > n {
            return Err(Error::ParticleOutOfRange { particle: p, n });
        }
    }
    let k = sorted.len();
    let positions: Vec<usize> = sorted.iter().map(|&p| n - p).collect();
    let mut table = vec![0.0f64; 1 << k];
    for (i, pr) in dist.iter().enumerate() {
        let mut compressed = 0usize;
        for (j, &pos) in positions.iter().enumerate() {
            compressed |= ((i >> pos) & 1) << (k - 1 - j);
        }
        table[compressed] += pr;
    }
    Ok(table)
}

/// Lexicographic subsets of {1..n} of the given size.
fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=size).collect();
    loop {
        out.push(current.clone());
        // advance to the next combination
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - (size - 1 - i) {
                current[i] += 1;
                for j in i + 1..size {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Compare every joint outcome on subsets of size ≤ `max_k` against the
/// product of singles, in the per-particle measurement bases given by `axes`.
pub fn kwise_independence_report(
    s: &StateVector,
    axes: &[Axis],
    max_k: usize,
) -> Result<IndependenceReport> {
    kwise_independence_report_with_tol(s, axes, max_k, INDEPENDENCE_TOL)
}

pub fn kwise_independence_report_with_tol(
    s: &StateVector,
    axes: &[Axis],
    max_k: usize,
    tol: f64,
) -> Result<IndependenceReport> {
    let n = s.n_particles();
    if axes.len() != n {
        return Err(Error::DimensionMismatch {
            left: axes.len(),
            right: n,
        });
    }
    if max_k < 1 || max_k > n {
        return Err(Error::MaxKOutOfRange { max_k, n });
    }

    // One rotation pass puts every queried axis on z.
    let mut rotated = s.clone();
    for (k, axis) in axes.iter().enumerate() {
        if *axis != Axis::Z {
            rotated = rotated.apply_local_matrix(k + 1, &axis.basis_change_to_z());
        }
    }
    let dist = outcome_distribution(&rotated);

    let singles: Vec<[f64; 2]> = (1..=n)
        .map(|p| {
            let t = marginal_of_distribution(&dist, n, &[p]).expect("singleton subset");
            [t[0], t[1]]
        })
        .collect();

    let n_wise_joint = dist[0];
    let n_wise_product = singles.iter().map(|s| s[0]).product();

    let mut per_size = Vec::new();
    for size in 1..=max_k {
        let subsets = subsets_of_size(n, size);
        // Per subset: worst deviation plus the first failing sign pattern.
        let scans = exec::map_collect(&subsets, |subset| {
            let table = marginal_of_distribution(&dist, n, subset).expect("validated subset");
            let mut worst = 0.0f64;
            let mut first_fail: Option<usize> = None;
            for (pattern, joint) in table.iter().enumerate() {
                let product: f64 = subset
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| singles[p - 1][(pattern >> (size - 1 - j)) & 1])
                    .product();
                let dev = (joint - product).abs();
                if dev > worst {
                    worst = dev;
                }
                if dev >= tol && first_fail.is_none() {
                    first_fail = Some(pattern);
                }
            }
            (worst, first_fail)
        });

        let mut worst = 0.0f64;
        let mut witness = None;
        for (subset, (dev, first_fail)) in subsets.iter().zip(&scans) {
            if *dev > worst {
                worst = *dev;
            }
            if witness.is_none() {
                if let Some(pattern) = first_fail {
                    let entries = subset
                        .iter()
                        .enumerate()
                        .map(|(j, &p)| {
                            let sign = if (pattern >> (size - 1 - j)) & 1 == 0 {
                                Sign::Plus
                            } else {
                                Sign::Minus
                            };
                            (p, axes[p - 1], sign)
                        })
                        .collect();
                    witness = Some(OutcomeQuery::new(entries).expect("distinct particles"));
                }
            }
        }
        let independent = worst < tol;
        per_size.push(SizeVerdict {
            size,
            independent,
            worst_deviation: worst,
            witness,
        });
        if !independent {
            break;
        }
    }

    Ok(IndependenceReport {
        max_checked: max_k,
        per_size,
        n_wise_joint,
        n_wise_product,
    })
}

/// Decide whether a state is a Bernstein state.
///
/// The amplitude side checks that every odd-down-parity label is present and
/// that the modulus pattern is exactly 2^{-(N-1)/2} on odd labels and zero
/// elsewhere. The statistics side checks z-outcome singles of 1/2,
/// independence through N-1, and an N-wise failure with zero all-up joint.
/// The two sides are equivalent for exact states; a disagreement is reported
/// as an internal error rather than a verdict.
pub fn bernstein_certificate(s: &StateVector) -> Result<BernsteinCertificate> {
    bernstein_certificate_with_tol(s, CERTIFICATE_AMP_TOL, INDEPENDENCE_TOL)
}

pub fn bernstein_certificate_with_tol(
    s: &StateVector,
    amp_tol: f64,
    prob_tol: f64,
) -> Result<BernsteinCertificate> {
    let n = s.n_particles();
    if n < 3 {
        return Err(Error::ParticleCountOutOfRange { n, min: 3, max: 16 });
    }
    let target = 0.5f64.powf((n as f64 - 1.0) / 2.0);

    let odd = odd_parity_labels(n);
    let support_ok = odd.iter().all(|&label| s.amplitude(label).norm() > amp_tol);
    let mut modulus_ok = true;
    let mut is_odd = vec![false; s.dim()];
    for &label in &odd {
        is_odd[label] = true;
    }
    for i in 0..s.dim() {
        let want = if is_odd[i] { target } else { 0.0 };
        if (s.amplitude(i).norm() - want).abs() > amp_tol {
            modulus_ok = false;
            break;
        }
    }
    let amp_ok = support_ok && modulus_ok;

    let report = kwise_independence_report_with_tol(s, &vec![Axis::Z; n], n, prob_tol)?;
    let singles_half = (1..=n).all(|p| {
        let t = marginal_table(s, &[p]).expect("singleton");
        (t[0] - 0.5).abs() < prob_tol
    });
    let through = report.independent_through(n - 1);
    let fails_n_wise = report
        .verdict_for(n)
        .map(|v| !v.independent)
        .unwrap_or(false)
        && report.n_wise_joint.abs() < prob_tol;
    let stats_ok = singles_half && through && fails_n_wise;

    if amp_ok != stats_ok {
        return Err(Error::InternalInconsistency(format!(
            "amplitude test {} but statistics test {}",
            amp_ok, stats_ok
        )));
    }

    let reason = if amp_ok {
        None
    } else if !support_ok {
        Some(CertificateFailure::Support)
    } else if !modulus_ok {
        Some(CertificateFailure::Modulus)
    } else if !(singles_half && through) {
        Some(CertificateFailure::Independence)
    } else {
        Some(CertificateFailure::NWise)
    };

    Ok(BernsteinCertificate {
        is_bernstein: amp_ok,
        reason,
    })
}

/// Joint and single probabilities of two projective outcomes on disjoint
/// particle sets of a density matrix, and whether they factorize.
pub fn correlation_check(
    rho: &DensityMatrix,
    q1: &OutcomeQuery,
    q2: &OutcomeQuery,
) -> Result<CorrelationCheck> {
    let n = rho.n_particles();
    for q in [q1, q2] {
        for p in q.particles() {
            if p < 1 || p > n {
                return Err(Error::ParticleOutOfRange { particle: p, n });
            }
        }
    }
    for p in q1.particles() {
        if q2.particles().any(|r| r == p) {
            return Err(Error::OverlappingQueries(p));
        }
    }
    let factors = |q: &OutcomeQuery| {
        q.entries()
            .iter()
            .map(|&(p, axis, sign)| (p, axis.projector(sign)))
            .collect::<Vec<_>>()
    };
    let f1 = factors(q1);
    let f2 = factors(q2);
    let both: Vec<_> = f1.iter().chain(&f2).cloned().collect();
    let p1 = rho.expectation_local(&f1)?.re;
    let p2 = rho.expectation_local(&f2)?.re;
    let p12 = rho.expectation_local(&both)?.re;
    Ok(CorrelationCheck {
        p1,
        p2,
        p12,
        independent: (p12 - p1 * p2).abs() < INDEPENDENCE_TOL,
    })
}
