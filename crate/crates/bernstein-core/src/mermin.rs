//! Generalized Mermin analysis: the x/y product observables with an even
//! number of y factors, their GHZ eigenvalues, and the enumeration of
//! contradiction sets over GF(2).
//!
//! Each relation contributes one outcome variable per particle (m_x or m_y),
//! encoded as a 2N-bit exponent vector. A subset of relations whose exponent
//! vectors XOR to zero and whose signs multiply to -1 forces +1 = -1 on
//! preassigned outcomes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::qstate::{Axis, StateVector};

/// Residual above which a state is rejected as a non-eigenstate.
pub const EIGENSTATE_TOL: f64 = 1e-10;

/// One product observable over {x, y} with even y-count, its exponent vector
/// over the 2N outcome variables (x variables first), and its predicted
/// eigenvalue on the GHZ state with relative sign -1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MerminRelation {
    pub axes: String,
    pub exponent_vector: u64,
    pub sign: i8,
}

/// A subset of relations whose product forces a contradiction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContradictionSet {
    pub relation_indices: Vec<usize>,
    pub size: usize,
}

/// All C(N, 2k) relations in lexicographic axis order (x before y).
///
/// With 2k factors of y: k even predicts eigenvalue -1, k odd predicts +1.
pub fn mermin_observables(n: usize) -> Result<Vec<MerminRelation>> {
    if n < 3 {
        return Err(Error::ParticleCountOutOfRange { n, min: 3, max: 32 });
    }
    if n > 32 {
        return Err(Error::DimensionCap { requested: n, cap: 32 });
    }
    let mut out = Vec::new();
    for y_mask in 0..(1u64 << n) {
        let y_count = y_mask.count_ones();
        if y_count % 2 != 0 {
            continue;
        }
        let k = y_count / 2;
        let sign = if k % 2 == 0 { -1i8 } else { 1 };
        let mut axes = String::with_capacity(n);
        let mut exponent = 0u64;
        for particle in 1..=n {
            let is_y = (y_mask >> (n - particle)) & 1 == 1;
            axes.push(if is_y { 'y' } else { 'x' });
            let var = if is_y { n + particle - 1 } else { particle - 1 };
            exponent |= 1u64 << var;
        }
        out.push(MerminRelation {
            axes,
            exponent_vector: exponent,
            sign,
        });
    }
    Ok(out)
}

/// Eigenvalue of a product of Pauli operators on `s`, or an error when `s`
/// is not an eigenstate within [`EIGENSTATE_TOL`].
pub fn observable_eigenvalue(s: &StateVector, axes: &str) -> Result<f64> {
    let parsed: Vec<Axis> = axes
        .chars()
        .map(Axis::from_char)
        .collect::<Result<_>>()
        .map_err(|_| Error::BadAxisString(axes.to_string()))?;
    if parsed.len() != s.n_particles() {
        return Err(Error::BadAxisString(axes.to_string()));
    }
    let mut applied = s.clone();
    for (k, axis) in parsed.iter().enumerate() {
        applied = applied.apply_local_matrix(k + 1, &axis.pauli());
    }
    let lambda = s.inner_product(&applied)?;
    let mut residual = lambda.im.abs();
    for i in 0..s.dim() {
        residual = residual.max((applied.amplitude(i) - s.amplitude(i).scale(lambda.re)).norm());
    }
    if residual > EIGENSTATE_TOL {
        return Err(Error::NotAnEigenstate { residual });
    }
    Ok(lambda.re)
}

/// All subsets of the relation list, up to `max_size`, whose exponent
/// vectors XOR to zero and whose signs multiply to -1. Sorted by size, then
/// lexicographically by indices.
pub fn find_contradictions(n: usize, max_size: usize) -> Result<Vec<ContradictionSet>> {
    let relations = mermin_observables(n)?;
    let count = relations.len();
    let max_size = max_size.min(count);
    let vectors: Vec<u64> = relations.iter().map(|r| r.exponent_vector).collect();
    let signs: Vec<i8> = relations.iter().map(|r| r.sign).collect();

    let mut found: Vec<ContradictionSet> = Vec::new();

    // Each relation covers every particle exactly once, so only even subset
    // sizes can cancel.
    for size in (2..=max_size).step_by(2) {
        if size <= 4 {
            found.extend(direct_search(&vectors, &signs, size));
        } else {
            found.extend(meet_in_the_middle(&vectors, &signs, size));
        }
    }
    found.sort_by(|a, b| {
        a.size
            .cmp(&b.size)
            .then_with(|| a.relation_indices.cmp(&b.relation_indices))
    });
    Ok(found)
}

/// Plain enumeration over index combinations, parallel over the leading
/// index.
fn direct_search(vectors: &[u64], signs: &[i8], size: usize) -> Vec<ContradictionSet> {
    let count = vectors.len();
    if size > count {
        return Vec::new();
    }
    let per_lead = exec::map_range(count, |first| {
        let mut sets = Vec::new();
        let mut combo = vec![first; size];
        search_rest(vectors, signs, &mut combo, 1, &mut sets);
        sets
    });
    per_lead.into_iter().flatten().collect()
}

fn search_rest(
    vectors: &[u64],
    signs: &[i8],
    combo: &mut Vec<usize>,
    depth: usize,
    out: &mut Vec<ContradictionSet>,
) {
    if depth == combo.len() {
        let xor = combo.iter().fold(0u64, |acc, &i| acc ^ vectors[i]);
        if xor != 0 {
            return;
        }
        let sign = combo.iter().fold(1i8, |acc, &i| acc * signs[i]);
        if sign == -1 {
            out.push(ContradictionSet {
                relation_indices: combo.clone(),
                size: combo.len(),
            });
        }
        return;
    }
    for next in combo[depth - 1] + 1..vectors.len() {
        combo[depth] = next;
        search_rest(vectors, signs, combo, depth + 1, out);
    }
}

/// Join half-size combinations on equal XOR keys. Every sorted index set
/// splits uniquely into its first half and its second half, with the first
/// half's maximum below the second half's minimum.
fn meet_in_the_middle(vectors: &[u64], signs: &[i8], size: usize) -> Vec<ContradictionSet> {
    use std::collections::HashMap;
    let half_a = size / 2;
    let half_b = size - half_a;
    let mut by_xor: HashMap<u64, Vec<(usize, i8, Vec<usize>)>> = HashMap::new();
    for combo in combinations(vectors.len(), half_a) {
        let xor = combo.iter().fold(0u64, |acc, &i| acc ^ vectors[i]);
        let sign = combo.iter().fold(1i8, |acc, &i| acc * signs[i]);
        let max = *combo.last().expect("nonempty combination");
        by_xor.entry(xor).or_default().push((max, sign, combo));
    }
    let mut out = Vec::new();
    for combo in combinations(vectors.len(), half_b) {
        let xor = combo.iter().fold(0u64, |acc, &i| acc ^ vectors[i]);
        let sign = combo.iter().fold(1i8, |acc, &i| acc * signs[i]);
        let min = combo[0];
        if let Some(candidates) = by_xor.get(&xor) {
            for (max_a, sign_a, combo_a) in candidates {
                if *max_a < min && sign_a * sign == -1 {
                    let mut indices = combo_a.clone();
                    indices.extend_from_slice(&combo);
                    out.push(ContradictionSet {
                        relation_indices: indices,
                        size,
                    });
                }
            }
        }
    }
    out
}

fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 || size > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..size).collect();
    loop {
        out.push(current.clone());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - (size - i) {
                current[i] += 1;
                for j in i + 1..size {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// One row of the relation table: predicted sign versus the eigenvalue
/// measured on ghz(N, Z, -1).
#[derive(Debug, Clone, Serialize)]
pub struct RelationTableEntry {
    pub axes: String,
    pub predicted: i8,
    pub measured: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationTableCheck {
    pub entries: Vec<RelationTableEntry>,
    pub all_match: bool,
    pub mismatches: Vec<usize>,
}

/// Measure every relation on ghz(N, Z, -1) and compare with the parity
/// prediction. Mismatches are data, not faults.
pub fn verify_relation_table(n: usize) -> Result<RelationTableCheck> {
    relation_table(n, crate::qstate::Sign::Minus)
}

/// Relation table against a GHZ state with a caller-chosen relative sign;
/// with `Sign::Plus` every measured eigenvalue flips against the prediction.
pub fn relation_table(n: usize, relative_sign: crate::qstate::Sign) -> Result<RelationTableCheck> {
    if n > 12 {
        return Err(Error::DimensionCap { requested: n, cap: 12 });
    }
    let relations = mermin_observables(n)?;
    let state = crate::constructions::ghz(n, Axis::Z, relative_sign)?;
    verify_relation_table_against(&relations, &state)
}

pub(crate) fn verify_relation_table_against(
    relations: &[MerminRelation],
    state: &StateVector,
) -> Result<RelationTableCheck> {
    let measured = exec::map_collect(relations, |r| observable_eigenvalue(state, &r.axes));
    let mut entries = Vec::with_capacity(relations.len());
    let mut mismatches = Vec::new();
    for (i, (r, m)) in relations.iter().zip(measured).enumerate() {
        let value = m?;
        if (value - r.sign as f64).abs() > 1e-8 {
            mismatches.push(i);
        }
        entries.push(RelationTableEntry {
            axes: r.axes.clone(),
            predicted: r.sign,
            measured: value,
        });
    }
    Ok(RelationTableCheck {
        all_match: mismatches.is_empty(),
        entries,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::ghz;
    use crate::qstate::Sign;

    #[test]
    fn n3_relations() {
        let rels = mermin_observables(3).unwrap();
        assert_eq!(rels.len(), 4);
        let by_axes: Vec<(&str, i8)> = rels.iter().map(|r| (r.axes.as_str(), r.sign)).collect();
        assert_eq!(
            by_axes,
            vec![("xxx", -1), ("xyy", 1), ("yxy", 1), ("yyx", 1)]
        );
        for r in &rels {
            // one variable per particle
            let low = r.exponent_vector & 0b111;
            let high = (r.exponent_vector >> 3) & 0b111;
            assert_eq!(low | high, 0b111);
            assert_eq!(low & high, 0);
        }
    }

    #[test]
    fn n4_and_n5_relation_counts_and_signs() {
        let rels = mermin_observables(4).unwrap();
        assert_eq!(rels.len(), 8);
        assert_eq!(rels.iter().filter(|r| r.sign == -1).count(), 2);
        let all_x = rels.iter().find(|r| r.axes == "xxxx").unwrap();
        assert_eq!(all_x.sign, -1);
        let all_y = rels.iter().find(|r| r.axes == "yyyy").unwrap();
        assert_eq!(all_y.sign, -1);

        let rels = mermin_observables(5).unwrap();
        assert_eq!(rels.len(), 16);
        assert_eq!(rels.iter().filter(|r| r.sign == -1).count(), 6);
        assert_eq!(rels.iter().filter(|r| r.sign == 1).count(), 10);
        for r in &rels {
            let y_count = r.axes.chars().filter(|&c| c == 'y').count();
            assert_eq!(r.sign == -1, (y_count / 2) % 2 == 0);
        }
    }

    #[test]
    fn ghz3_eigenvalues() {
        let g = ghz(3, Axis::Z, Sign::Minus).unwrap();
        assert!((observable_eigenvalue(&g, "xyy").unwrap() - 1.0).abs() < 1e-12);
        assert!((observable_eigenvalue(&g, "yxy").unwrap() - 1.0).abs() < 1e-12);
        assert!((observable_eigenvalue(&g, "yyx").unwrap() - 1.0).abs() < 1e-12);
        assert!((observable_eigenvalue(&g, "xxx").unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz5_two_y_eigenvalue() {
        let g = ghz(5, Axis::Z, Sign::Minus).unwrap();
        assert!((observable_eigenvalue(&g, "xxxyy").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_eigenstate_is_reported() {
        let b3 = crate::constructions::special_bernstein(3).unwrap();
        match observable_eigenvalue(&b3, "xxy") {
            Err(Error::NotAnEigenstate { residual }) => assert!(residual > 0.1),
            other => panic!("expected NotAnEigenstate, got {other:?}"),
        }
    }

    #[test]
    fn bad_axis_strings() {
        let g = ghz(3, Axis::Z, Sign::Minus).unwrap();
        assert!(observable_eigenvalue(&g, "xx").is_err());
        assert!(observable_eigenvalue(&g, "xxq").is_err());
    }

    #[test]
    fn n3_single_contradiction() {
        let sets = find_contradictions(3, 4).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].relation_indices, vec![0, 1, 2, 3]);
        assert_eq!(sets[0].size, 4);
    }

    #[test]
    fn n4_eight_quadruplets() {
        let sets = find_contradictions(4, 4).unwrap();
        assert_eq!(sets.len(), 8);
        for set in &sets {
            assert_eq!(set.size, 4);
            let rels = mermin_observables(4).unwrap();
            let xor = set
                .relation_indices
                .iter()
                .fold(0u64, |acc, &i| acc ^ rels[i].exponent_vector);
            assert_eq!(xor, 0);
            let sign: i8 = set.relation_indices.iter().map(|&i| rels[i].sign).product();
            assert_eq!(sign, -1);
            // no duplicate indices: squaring an outcome variable cancels it
            let mut sorted = set.relation_indices.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), set.size);
        }
    }

    #[test]
    fn mitm_agrees_with_direct_enumeration() {
        let rels = mermin_observables(5).unwrap();
        let vectors: Vec<u64> = rels.iter().map(|r| r.exponent_vector).collect();
        let signs: Vec<i8> = rels.iter().map(|r| r.sign).collect();
        let mut direct = direct_search(&vectors, &signs, 6);
        let mut mitm = meet_in_the_middle(&vectors, &signs, 6);
        let key = |s: &ContradictionSet| s.relation_indices.clone();
        direct.sort_by_key(key);
        mitm.sort_by_key(key);
        assert_eq!(direct, mitm);
        assert!(!direct.is_empty());
    }

    #[test]
    fn relation_table_matches_for_small_n() {
        for n in 3..=6 {
            let check = verify_relation_table(n).unwrap();
            assert!(check.all_match, "n={n}: {:?}", check.mismatches);
            assert_eq!(check.entries.len(), 1 << (n - 1));
        }
    }

    #[test]
    fn relation_table_flips_on_plus_sign_ghz() {
        let relations = mermin_observables(4).unwrap();
        let plus = ghz(4, Axis::Z, Sign::Plus).unwrap();
        let check = verify_relation_table_against(&relations, &plus).unwrap();
        assert!(!check.all_match);
        assert_eq!(check.mismatches.len(), relations.len());
        for e in &check.entries {
            assert!((e.measured + e.predicted as f64).abs() < 1e-8);
        }
    }
}
